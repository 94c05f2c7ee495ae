//! Obtuse splitting and the decomposition of triangles into signed
//! axis-aligned right triangles ("atoms").

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{orient, Point, Triangle};
use crate::error::{Error, Result};
use crate::numeric::{int, Rational};

fn dot(o: &Point, a: &Point, b: &Point) -> Rational {
    let (ax, ay) = a.sub(o);
    let (bx, by) = b.sub(o);
    ax * bx + ay * by
}

/// Some interior angle exceeds a right angle.
pub fn is_obtuse(t: &Triangle) -> bool {
    dot(&t.a, &t.b, &t.c).is_negative() || dot(&t.b, &t.a, &t.c).is_negative() || dot(&t.c, &t.a, &t.b).is_negative()
}

/// Splits an obtuse triangle along the altitude from the obtuse vertex.
/// Non-obtuse triangles come back unchanged.
pub fn split_obtuse(t: &Triangle) -> Vec<Triangle> {
    // Relabel so that `b` is the vertex opposite the longest side `ac`.
    let [p, q, r] = t.vertices();
    let (a, b, c) = if dot(q, p, r).is_negative() {
        (p, q, r)
    } else if dot(p, q, r).is_negative() {
        (r, p, q)
    } else if dot(r, p, q).is_negative() {
        (q, r, p)
    } else {
        return vec![t.clone()];
    };
    // Foot of the perpendicular from b onto ac.
    let (acx, acy) = c.sub(a);
    let s = dot(a, b, c) / (&acx * &acx + &acy * &acy);
    let d = Point::new(&a.x + &s * acx, &a.y + &s * acy);
    vec![
        Triangle::new(a.clone(), b.clone(), d.clone(), t.weight.clone()),
        Triangle::new(d, b.clone(), c.clone(), t.weight.clone()),
    ]
}

/// Which quadrant, seen from the right-angle vertex, the atom occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

/// Right triangle with legs parallel to the axes: vertices `corner`,
/// `corner + (hx, 0)` and `corner + (0, hy)`. Contributes
/// `sign · weight · |hx·hy|/2` to its color's mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub corner: Point,
    pub hx: Rational,
    pub hy: Rational,
    pub sign: i8,
    pub weight: Rational,
}

impl Atom {
    pub fn quadrant(&self) -> Quadrant {
        match (self.hx.is_positive(), self.hy.is_positive()) {
            (true, true) => Quadrant::I,
            (false, true) => Quadrant::II,
            (false, false) => Quadrant::III,
            (true, false) => Quadrant::IV,
        }
    }

    fn ends(&self) -> (Point, Point) {
        let leg = Point::new(&self.corner.x + &self.hx, self.corner.y.clone());
        let apex = Point::new(self.corner.x.clone(), &self.corner.y + &self.hy);
        (leg, apex)
    }

    /// Lower endpoint of the hypotenuse.
    pub fn hyp_low(&self) -> Point {
        let (leg, apex) = self.ends();
        if self.hy.is_positive() { leg } else { apex }
    }

    /// Upper endpoint of the hypotenuse.
    pub fn hyp_high(&self) -> Point {
        let (leg, apex) = self.ends();
        if self.hy.is_positive() { apex } else { leg }
    }

    pub fn area(&self) -> Rational {
        (&self.hx * &self.hy).abs() / int(2)
    }

    pub fn signed_mass(&self) -> Rational {
        let m = &self.weight * self.area();
        if self.sign < 0 { -m } else { m }
    }

    pub fn vertices(&self) -> [Point; 3] {
        let (leg, apex) = self.ends();
        [self.corner.clone(), leg, apex]
    }
}

/// Atom with right angle at `corner`; `p` and `q` are the other two vertices,
/// one sharing its y-coordinate with `corner` and the other its x-coordinate.
fn right_atom(corner: &Point, p: &Point, q: &Point, sign: i8, weight: &Rational) -> Option<Atom> {
    let (h, v) = if p.y == corner.y && q.x == corner.x {
        (p, q)
    } else if q.y == corner.y && p.x == corner.x {
        (q, p)
    } else {
        return None;
    };
    Some(Atom {
        corner: corner.clone(),
        hx: &h.x - &corner.x,
        hy: &v.y - &corner.y,
        sign,
        weight: weight.clone(),
    })
}

/// Decomposes a non-obtuse triangle into atoms whose signed weighted areas
/// sum to the triangle's weighted area. Triangles that already have
/// axis-parallel legs give a single atom; all others use the tight bounding
/// rectangle `XYBZ` split along its diagonal `XB`, minus the three corner
/// pieces `AYB`, `XAC`, `CBZ`. Zero-area pieces are dropped.
pub fn decompose_axis_aligned(t: &Triangle) -> Result<Vec<Atom>> {
    if orient(&t.a, &t.b, &t.c).is_zero() {
        return Err(Error::DegenerateTriangle);
    }
    if is_obtuse(t) {
        return Err(Error::ObtuseTriangle);
    }
    let v = t.vertices();
    let w = &t.weight;
    for i in 0..3 {
        let (p, q, r) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
        if let Some(atom) = right_atom(p, q, r, 1, w) {
            if !atom.hx.is_zero() && !atom.hy.is_zero() {
                return Ok(vec![atom]);
            }
        }
    }
    let xs = [&v[0].x, &v[1].x, &v[2].x];
    let ys = [&v[0].y, &v[1].y, &v[2].y];
    let (xmin, xmax) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
    let (ymin, ymax) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
    let is_corner = |p: &Point| (&p.x == xmin || &p.x == xmax) && (&p.y == ymin || &p.y == ymax);
    for i in 0..3 {
        let b = v[i];
        if !is_corner(b) {
            continue;
        }
        let x = Point::new(
            if &b.x == xmin { xmax.clone() } else { xmin.clone() },
            if &b.y == ymin { ymax.clone() } else { ymin.clone() },
        );
        // Y shares x with X and y with B; Z shares x with B and y with X.
        let y = Point::new(x.x.clone(), b.y.clone());
        let z = Point::new(b.x.clone(), x.y.clone());
        for (a, c) in [(v[(i + 1) % 3], v[(i + 2) % 3]), (v[(i + 2) % 3], v[(i + 1) % 3])] {
            if a.x != x.x || c.y != x.y {
                continue;
            }
            let pieces = [
                right_atom(&y, b, &x, 1, w),
                right_atom(&z, &x, b, 1, w),
                right_atom(&y, b, a, -1, w),
                right_atom(&x, c, a, -1, w),
                right_atom(&z, c, b, -1, w),
            ];
            let atoms: Vec<Atom> = pieces
                .into_iter()
                .map(|p| p.expect("rectangle corners share coordinates by construction"))
                .filter(|a| !a.hx.is_zero() && !a.hy.is_zero())
                .collect();
            return Ok(atoms);
        }
    }
    Err(Error::Triangulation("no bounding-rectangle split for triangle".into()))
}
