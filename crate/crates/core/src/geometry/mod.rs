//! Polygonal mass distributions over exact rationals.

mod atoms;
pub mod clip;
mod io;
mod normalize;
mod triangulate;

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};

pub use atoms::{decompose_axis_aligned, is_obtuse, split_obtuse, Atom, Quadrant};
pub use io::{parse_instance, serialize_instance};
pub use normalize::{normalize_instance, Transform};
pub use triangulate::triangulate;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(crate::numeric::int(x), crate::numeric::int(y))
    }

    pub fn sub(&self, o: &Point) -> (Rational, Rational) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    pub fn dist2(&self, o: &Point) -> Rational {
        let (dx, dy) = self.sub(o);
        &dx * &dx + &dy * &dy
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (format_rational(&self.x), format_rational(&self.y)).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = crate::numeric::serde_rational::vec::deserialize(d)?;
        match <[Rational; 2]>::try_from(v) {
            Ok([x, y]) => Ok(Point { x, y }),
            Err(v) => Err(D::Error::custom(format!("point needs 2 coordinates, got {}", v.len()))),
        }
    }
}

/// Twice the signed area of the triangle `abc`; positive when counterclockwise.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Rational {
    let (abx, aby) = b.sub(a);
    let (acx, acy) = c.sub(a);
    abx * acy - aby * acx
}

fn sgn(r: &Rational) -> Ordering {
    r.cmp(&Rational::zero())
}

/// Shoelace signed area of a closed chain; positive iff counterclockwise.
pub fn chain_signed_area(chain: &[Point]) -> Result<Rational> {
    if chain.len() < 3 {
        return Err(Error::ShortChain(format!("of length {}", chain.len())));
    }
    Ok(shoelace(chain))
}

pub(crate) fn shoelace(chain: &[Point]) -> Rational {
    let mut acc = Rational::zero();
    for (i, p) in chain.iter().enumerate() {
        let q = &chain[(i + 1) % chain.len()];
        acc += &p.x * &q.y - &q.x * &p.y;
    }
    acc / crate::numeric::int(2)
}

fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    orient(a, b, p).is_zero()
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_touch(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = sgn(&orient(a, b, c));
    let o2 = sgn(&orient(a, b, d));
    let o3 = sgn(&orient(c, d, a));
    let o4 = sgn(&orient(c, d, b));
    if o1 != o2 && o3 != o4 && o1 != Ordering::Equal && o2 != Ordering::Equal
        && o3 != Ordering::Equal && o4 != Ordering::Equal
    {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Strict point-in-polygon for a simple chain of either orientation.
/// Returns `None` for points on the boundary.
pub fn point_in_chain(p: &Point, chain: &[Point]) -> Option<bool> {
    let mut inside = false;
    for (i, a) in chain.iter().enumerate() {
        let b = &chain[(i + 1) % chain.len()];
        if on_segment(p, a, b) {
            return None;
        }
        if (a.y > p.y) != (b.y > p.y) {
            // x-coordinate of the crossing compared without division
            let lhs = (&p.x - &a.x) * (&b.y - &a.y);
            let rhs = (&b.x - &a.x) * (&p.y - &a.y);
            let crosses = if b.y > a.y { lhs < rhs } else { lhs > rhs };
            if crosses {
                inside = !inside;
            }
        }
    }
    Some(inside)
}

fn validate_chain(chain: &[Point], what: &str) -> Result<Rational> {
    if chain.len() < 3 {
        return Err(Error::ShortChain(what.to_string()));
    }
    let n = chain.len();
    for i in 0..n {
        if chain[i] == chain[(i + 1) % n] {
            return Err(Error::RepeatedPoint(what.to_string()));
        }
    }
    for i in 0..n {
        let (a, b) = (&chain[i], &chain[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (&chain[j], &chain[(j + 1) % n]);
            let adjacent_next = j == i + 1;
            let adjacent_wrap = i == 0 && j == n - 1;
            if adjacent_next || adjacent_wrap {
                // Neighbours share one endpoint; they must not fold back onto each other.
                let (shared, p, q) = if adjacent_next { (b, a, d) } else { (a, b, c) };
                let fold = orient(p, shared, q).is_zero() && {
                    let (ux, uy) = p.sub(shared);
                    let (vx, vy) = q.sub(shared);
                    (ux * vx + uy * vy).is_positive()
                };
                if fold {
                    return Err(Error::SelfIntersecting(what.to_string()));
                }
                if n == 3 {
                    continue;
                }
                // Also reject touching beyond the shared endpoint.
                let other_touch = if adjacent_next {
                    on_segment(a, c, d) || on_segment(d, a, b)
                } else {
                    on_segment(b, c, d) || on_segment(c, a, b)
                };
                if other_touch {
                    return Err(Error::SelfIntersecting(what.to_string()));
                }
                continue;
            }
            if segments_touch(a, b, c, d) {
                return Err(Error::SelfIntersecting(what.to_string()));
            }
        }
    }
    let area = shoelace(chain);
    if area.is_zero() {
        return Err(Error::ZeroArea(what.to_string()));
    }
    Ok(area)
}

fn chains_disjoint(a: &[Point], b: &[Point]) -> bool {
    for i in 0..a.len() {
        let (p, q) = (&a[i], &a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            if segments_touch(p, q, &b[j], &b[(j + 1) % b.len()]) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPolygon {
    #[serde(with = "crate::numeric::serde_rational")]
    pub weight: Rational,
    pub outer: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
}

impl WeightedPolygon {
    pub fn new(weight: Rational, outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Self {
        WeightedPolygon { weight, outer, holes }
    }

    /// Axis-aligned rectangle `[x0,x1]×[y0,y1]`, counterclockwise.
    pub fn rect(weight: Rational, x0: Rational, y0: Rational, x1: Rational, y1: Rational) -> Self {
        let outer = vec![
            Point::new(x0.clone(), y0.clone()),
            Point::new(x1.clone(), y0),
            Point::new(x1, y1.clone()),
            Point::new(x0, y1),
        ];
        WeightedPolygon::new(weight, outer, Vec::new())
    }

    /// Net (unweighted) area: solid minus holes.
    pub fn area(&self) -> Rational {
        let mut a = shoelace(&self.outer).abs();
        for h in &self.holes {
            a -= shoelace(h).abs();
        }
        a
    }

    pub fn mass(&self) -> Rational {
        &self.weight * self.area()
    }

    /// Checks weight, orientation, simplicity and hole containment.
    pub fn validate(&self, index: usize) -> Result<()> {
        if !self.weight.is_positive() {
            return Err(Error::NonPositiveWeight(format_rational(&self.weight)));
        }
        let what = format!("polygon {index}");
        if validate_chain(&self.outer, &what)?.is_negative() {
            return Err(Error::Orientation { what, expected: "solid", orientation: "CCW" });
        }
        for (h, hole) in self.holes.iter().enumerate() {
            let what = format!("hole {h} of polygon {index}");
            if validate_chain(hole, &what)?.is_positive() {
                return Err(Error::Orientation { what, expected: "hole", orientation: "CW" });
            }
            let inside = point_in_chain(&hole[0], &self.outer) == Some(true);
            if !inside || !chains_disjoint(hole, &self.outer) {
                return Err(Error::HoleOutside { polygon: index, hole: h });
            }
            for (g, other) in self.holes.iter().enumerate().take(h) {
                let nested = point_in_chain(&hole[0], other) != Some(false)
                    || point_in_chain(&other[0], hole) != Some(false);
                if nested || !chains_disjoint(hole, other) {
                    return Err(Error::HoleOutside { polygon: index, hole: h.max(g) });
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.outer.iter().chain(self.holes.iter().flatten())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassDistribution {
    pub color: usize,
    pub polygons: Vec<WeightedPolygon>,
}

impl MassDistribution {
    pub fn total(&self) -> Rational {
        self.polygons.iter().map(WeightedPolygon::mass).fold(Rational::zero(), |a, b| a + b)
    }
}

/// `n` colors, each a set of weighted polygons with holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PizzaInstance {
    pub masses: Vec<MassDistribution>,
}

impl PizzaInstance {
    /// Builds and validates an instance, sorting colors ascending.
    pub fn new(mut masses: Vec<MassDistribution>) -> Result<Self> {
        masses.sort_by_key(|m| m.color);
        let inst = PizzaInstance { masses };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.is_empty() {
            return Err(Error::NoColors);
        }
        for w in self.masses.windows(2) {
            if w[0].color >= w[1].color {
                return Err(Error::Parse(format!("duplicate or unsorted color {}", w[1].color)));
            }
        }
        for m in &self.masses {
            for (i, p) in m.polygons.iter().enumerate() {
                p.validate(i)?;
            }
            if !m.total().is_positive() {
                return Err(Error::EmptyColor(m.color));
            }
        }
        Ok(())
    }

    pub fn n_colors(&self) -> usize {
        self.masses.len()
    }

    pub fn totals(&self) -> Vec<Rational> {
        self.masses.iter().map(MassDistribution::total).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.masses.iter().flat_map(|m| m.polygons.iter().flat_map(WeightedPolygon::points))
    }

    /// All coordinates lie in the unit square.
    pub fn is_normalized(&self) -> bool {
        let zero = Rational::zero();
        let one = crate::numeric::int(1);
        self.points().all(|p| p.x >= zero && p.x <= one && p.y >= zero && p.y <= one)
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bbox(&self) -> Option<(Point, Point)> {
        let mut it = self.points();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for p in it {
            if p.x < lo.x {
                lo.x = p.x.clone();
            }
            if p.y < lo.y {
                lo.y = p.y.clone();
            }
            if p.x > hi.x {
                hi.x = p.x.clone();
            }
            if p.y > hi.y {
                hi.y = p.y.clone();
            }
        }
        Some((lo, hi))
    }
}

/// A weighted triangle; counterclockwise when produced by [`triangulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub weight: Rational,
}

impl Triangle {
    pub fn new(a: Point, b: Point, c: Point, weight: Rational) -> Self {
        Triangle { a, b, c, weight }
    }

    pub fn signed_area(&self) -> Rational {
        orient(&self.a, &self.b, &self.c) / crate::numeric::int(2)
    }

    pub fn area(&self) -> Rational {
        self.signed_area().abs()
    }

    pub fn vertices(&self) -> [&Point; 3] {
        [&self.a, &self.b, &self.c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{frac, int};

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()
    }

    #[test]
    fn signed_areas() {
        let sq = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(chain_signed_area(&sq).unwrap(), int(1));
        let mut cw = sq.clone();
        cw.reverse();
        assert_eq!(chain_signed_area(&cw).unwrap(), int(-1));
        assert_eq!(chain_signed_area(&pts(&[(0, 0), (4, 0), (1, 1)])).unwrap(), int(2));
        assert!(chain_signed_area(&pts(&[(0, 0), (1, 0)])).is_err());
    }

    #[test]
    fn holed_square_area() {
        let p = WeightedPolygon::new(
            int(1),
            pts(&[(0, 0), (4, 0), (4, 4), (0, 4)]),
            vec![pts(&[(1, 1), (1, 3), (3, 3), (3, 1)])],
        );
        p.validate(0).unwrap();
        assert_eq!(p.area(), int(12));
    }

    #[test]
    fn rejects_bad_polygons() {
        let bowtie = WeightedPolygon::new(int(1), pts(&[(0, 0), (2, 2), (2, 0), (0, 2)]), vec![]);
        assert!(matches!(bowtie.validate(0), Err(Error::SelfIntersecting(_))));
        let cw = WeightedPolygon::new(int(1), pts(&[(0, 0), (0, 1), (1, 1), (1, 0)]), vec![]);
        let err = cw.validate(0).unwrap_err();
        assert!(err.to_string().contains("orientation: expected solid (CCW)"));
        let neg = WeightedPolygon::new(frac(-1, 2), pts(&[(0, 0), (1, 0), (0, 1)]), vec![]);
        assert!(matches!(neg.validate(0), Err(Error::NonPositiveWeight(_))));
        let outside = WeightedPolygon::new(
            int(1),
            pts(&[(0, 0), (4, 0), (4, 4), (0, 4)]),
            vec![pts(&[(5, 1), (5, 3), (7, 3), (7, 1)])],
        );
        assert!(matches!(outside.validate(0), Err(Error::HoleOutside { .. })));
        let ccw_hole = WeightedPolygon::new(
            int(1),
            pts(&[(0, 0), (4, 0), (4, 4), (0, 4)]),
            vec![pts(&[(1, 1), (3, 1), (3, 3), (1, 3)])],
        );
        assert!(matches!(ccw_hole.validate(0), Err(Error::Orientation { .. })));
        let spike = WeightedPolygon::new(int(1), pts(&[(0, 0), (2, 0), (1, 0), (1, 1)]), vec![]);
        assert!(spike.validate(0).is_err());
    }

    #[test]
    fn point_in_chain_boundary() {
        let sq = pts(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        assert_eq!(point_in_chain(&Point::from_ints(1, 1), &sq), Some(true));
        assert_eq!(point_in_chain(&Point::from_ints(3, 1), &sq), Some(false));
        assert_eq!(point_in_chain(&Point::from_ints(2, 1), &sq), None);
    }
}
