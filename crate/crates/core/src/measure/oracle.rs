//! Independent side masses by clipping the triangulation directly.

use num_traits::Zero;

use crate::geometry::clip::{area, clip_band, clip_x};
use crate::geometry::{triangulate, PizzaInstance};
use crate::numeric::Rational;
use crate::sc_path::FeasibleSolution;

#[derive(Debug, Clone, PartialEq)]
pub struct SideMasses {
    pub a: Rational,
    pub b: Rational,
}

impl SideMasses {
    pub fn gap(&self) -> Rational {
        &self.a - &self.b
    }
}

/// Per-color exact masses of sides A and B, from clipping every triangle of
/// the triangulation against each strip and its cut. Does not use atoms.
pub fn region_mass_oracle(inst: &PizzaInstance, sol: &FeasibleSolution<Rational>) -> crate::Result<Vec<SideMasses>> {
    let strips: Vec<_> = sol.strips().into_iter().filter(|s| s.hi > s.lo).collect();
    let mut out = Vec::with_capacity(inst.n_colors());
    for m in &inst.masses {
        let (mut a, mut b) = (Rational::zero(), Rational::zero());
        for poly in &m.polygons {
            for t in triangulate(poly)? {
                let tri = [t.a.clone(), t.b.clone(), t.c.clone()];
                for s in &strips {
                    let band = clip_band(&tri, &s.lo, &s.hi);
                    if band.len() < 3 {
                        continue;
                    }
                    let (left, right) = match &s.cut {
                        Some(c) => (area(&clip_x(&band, c, true)), area(&clip_x(&band, c, false))),
                        None => (area(&band), Rational::zero()),
                    };
                    let (sa, sb) = if s.positive { (left, right) } else { (right, left) };
                    a += &t.weight * sa;
                    b += &t.weight * sb;
                }
            }
        }
        out.push(SideMasses { a, b });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{MassDistribution, Point, WeightedPolygon};
    use crate::numeric::{frac, int};
    use crate::sc_path::sphere_to_solution;

    fn single(poly: WeightedPolygon) -> PizzaInstance {
        PizzaInstance::new(vec![MassDistribution { color: 0, polygons: vec![poly] }]).unwrap()
    }

    #[test]
    fn horizontal_bisection() {
        let inst = single(WeightedPolygon::rect(int(1), int(0), int(0), int(1), int(1)));
        let sol = sphere_to_solution(&[frac(1, 2), frac(3, 2), int(0)]).unwrap();
        assert_eq!(region_mass_oracle(&inst, &sol).unwrap(), vec![SideMasses { a: frac(1, 2), b: frac(1, 2) }]);
    }

    #[test]
    fn triangle_split() {
        let tri = WeightedPolygon::new(int(1), vec![Point::from_ints(0, 0), Point::from_ints(1, 0), Point::from_ints(0, 1)], vec![]);
        let inst = single(tri);
        let sol = sphere_to_solution(&[frac(1, 2), frac(3, 2), int(0)]).unwrap();
        assert_eq!(region_mass_oracle(&inst, &sol).unwrap(), vec![SideMasses { a: frac(3, 8), b: frac(1, 8) }]);
    }
}
