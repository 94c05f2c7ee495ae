//! Exact half-plane clipping of convex polygons.

use num_traits::{Signed, Zero};

use super::{shoelace, Point};
use crate::numeric::Rational;

/// Part of the convex polygon `poly` where `a·x + b·y ≤ c` (`keep_le`) or
/// `a·x + b·y ≥ c` (otherwise).
pub fn clip_halfplane(poly: &[Point], a: &Rational, b: &Rational, c: &Rational, keep_le: bool) -> Vec<Point> {
    let side = |p: &Point| {
        let v = a * &p.x + b * &p.y - c;
        if keep_le { v } else { -v }
    };
    let vals: Vec<Rational> = poly.iter().map(side).collect();
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        let (vp, vq) = (&vals[i], &vals[j]);
        if !vp.is_positive() {
            out.push(poly[i].clone());
        }
        if (vp.is_negative() && vq.is_positive()) || (vp.is_positive() && vq.is_negative()) {
            let t = vp / (vp - vq);
            let (p, q) = (&poly[i], &poly[j]);
            out.push(Point::new(&p.x + &t * (&q.x - &p.x), &p.y + &t * (&q.y - &p.y)));
        }
    }
    out
}

pub fn clip_x(poly: &[Point], x: &Rational, keep_le: bool) -> Vec<Point> {
    clip_halfplane(poly, &Rational::from_integer(1.into()), &Rational::zero(), x, keep_le)
}

pub fn clip_y(poly: &[Point], y: &Rational, keep_le: bool) -> Vec<Point> {
    clip_halfplane(poly, &Rational::zero(), &Rational::from_integer(1.into()), y, keep_le)
}

/// Intersection with the horizontal band `lo ≤ y ≤ hi`.
pub fn clip_band(poly: &[Point], lo: &Rational, hi: &Rational) -> Vec<Point> {
    clip_y(&clip_y(poly, lo, false), hi, true)
}

/// Unsigned area; zero for fewer than three vertices.
pub fn area(poly: &[Point]) -> Rational {
    if poly.len() < 3 {
        Rational::zero()
    } else {
        shoelace(poly).abs()
    }
}

/// Intersection of two convex polygons (the second given counterclockwise).
pub fn intersect_convex(subject: &[Point], clipper: &[Point]) -> Vec<Point> {
    let mut out = subject.to_vec();
    for i in 0..clipper.len() {
        if out.is_empty() {
            break;
        }
        let (p, q) = (&clipper[i], &clipper[(i + 1) % clipper.len()]);
        // r is left of p→q iff a·r.x + b·r.y ≤ c
        let a = &q.y - &p.y;
        let b = &p.x - &q.x;
        let c = &a * &p.x + &b * &p.y;
        out = clip_halfplane(&out, &a, &b, &c, true);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{frac, int};

    fn unit_triangle() -> Vec<Point> {
        vec![Point::from_ints(0, 0), Point::from_ints(1, 0), Point::from_ints(0, 1)]
    }

    #[test]
    fn band_and_half_plane() {
        let t = unit_triangle();
        assert_eq!(area(&clip_band(&t, &int(0), &frac(1, 2))), frac(3, 8));
        let band = clip_band(&t, &int(0), &frac(1, 2));
        assert_eq!(area(&clip_x(&band, &frac(1, 4), true)), frac(1, 8));
        assert_eq!(area(&clip_x(&t, &int(2), false)), int(0));
    }

    #[test]
    fn convex_intersection() {
        let a = vec![Point::from_ints(0, 0), Point::from_ints(2, 0), Point::from_ints(2, 2), Point::from_ints(0, 2)];
        let b = vec![Point::from_ints(1, 1), Point::from_ints(3, 1), Point::from_ints(3, 3), Point::from_ints(1, 3)];
        assert_eq!(area(&intersect_convex(&a, &b)), int(1));
        let c = vec![Point::from_ints(2, 0), Point::from_ints(4, 0), Point::from_ints(4, 2), Point::from_ints(2, 2)];
        assert_eq!(area(&intersect_convex(&a, &c)), int(0));
    }
}
