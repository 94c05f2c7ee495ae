use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{MassDistribution, PizzaInstance, Point, WeightedPolygon};
use crate::error::{Error, Result};
use crate::numeric::Rational;

/// `p ↦ (p + shift) · scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    #[serde(with = "crate::numeric::serde_rational")]
    pub shift_x: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub shift_y: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub scale: Rational,
}

impl Transform {
    pub fn identity() -> Self {
        Transform { shift_x: Rational::zero(), shift_y: Rational::zero(), scale: Rational::one() }
    }

    pub fn is_identity(&self) -> bool {
        self.shift_x.is_zero() && self.shift_y.is_zero() && self.scale.is_one()
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new((&p.x + &self.shift_x) * &self.scale, (&p.y + &self.shift_y) * &self.scale)
    }

    pub fn invert(&self, p: &Point) -> Point {
        Point::new(&p.x / &self.scale - &self.shift_x, &p.y / &self.scale - &self.shift_y)
    }

    pub fn apply_instance(&self, inst: &PizzaInstance) -> PizzaInstance {
        let map = |c: &Vec<Point>| c.iter().map(|p| self.apply(p)).collect::<Vec<_>>();
        let masses = inst
            .masses
            .iter()
            .map(|m| MassDistribution {
                color: m.color,
                polygons: m
                    .polygons
                    .iter()
                    .map(|p| WeightedPolygon {
                        weight: p.weight.clone(),
                        outer: map(&p.outer),
                        holes: p.holes.iter().map(map).collect(),
                    })
                    .collect(),
            })
            .collect();
        PizzaInstance { masses }
    }
}

/// Maps the instance into the unit square by translating the bounding box to
/// the origin and scaling by the side of the smallest enclosing square.
/// Instances already inside `[0,1]²` are returned unchanged.
pub fn normalize_instance(inst: &PizzaInstance) -> Result<(PizzaInstance, Transform)> {
    let (lo, hi) = inst.bbox().ok_or(Error::ZeroExtent)?;
    let side = (&hi.x - &lo.x).max(&hi.y - &lo.y);
    if side.is_zero() {
        return Err(Error::ZeroExtent);
    }
    if inst.is_normalized() {
        return Ok((inst.clone(), Transform::identity()));
    }
    let t = Transform { shift_x: -lo.x, shift_y: -lo.y, scale: side.recip() };
    Ok((t.apply_instance(inst), t))
}
