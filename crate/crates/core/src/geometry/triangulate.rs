//! Hole bridging followed by ear clipping, with exact orientation tests.

use num_traits::{Signed, Zero};

use super::{orient, segments_touch, Point, Triangle, WeightedPolygon};
use crate::error::{Error, Result};

fn left(a: &Point, b: &Point, c: &Point) -> bool {
    orient(a, b, c).is_positive()
}

fn left_on(a: &Point, b: &Point, c: &Point) -> bool {
    !orient(a, b, c).is_negative()
}

/// Is `target` strictly inside the interior angle at `ring[i]`?
/// The interior is on the left of the chain's edges.
fn in_cone(ring: &[Point], i: usize, target: &Point) -> bool {
    let n = ring.len();
    let prev = &ring[(i + n - 1) % n];
    let v = &ring[i];
    let next = &ring[(i + 1) % n];
    if left_on(v, next, prev) {
        left(v, target, prev) && left(target, v, next)
    } else {
        !(left_on(v, target, next) && left_on(target, v, prev))
    }
}

fn edges(chain: &[Point]) -> impl Iterator<Item = (&Point, &Point)> {
    chain.iter().zip(chain.iter().cycle().skip(1))
}

/// Segment `ab` meets no edge except those incident to positions `a` or `b`.
fn clear_of(a: &Point, b: &Point, chains: &[&[Point]]) -> bool {
    chains.iter().all(|chain| {
        edges(chain).all(|(c, d)| c == a || c == b || d == a || d == b || !segments_touch(a, b, c, d))
    })
}

fn rightmost(chain: &[Point]) -> usize {
    (0..chain.len()).max_by(|&i, &j| chain[i].cmp(&chain[j])).unwrap_or(0)
}

/// Splices every hole into the solid chain through a bridge edge, giving a
/// single weakly simple counterclockwise ring.
fn bridge_holes(outer: &[Point], holes: &[Vec<Point>]) -> Result<Vec<Point>> {
    let mut ring = outer.to_vec();
    let mut order: Vec<&Vec<Point>> = holes.iter().collect();
    order.sort_by(|a, b| b[rightmost(b)].cmp(&a[rightmost(a)]));
    for (h, hole) in order.iter().enumerate() {
        let m = rightmost(hole);
        let target = &hole[m];
        let mut candidates: Vec<usize> = (0..ring.len()).collect();
        candidates.sort_by(|&i, &j| ring[i].dist2(target).cmp(&ring[j].dist2(target)).then(i.cmp(&j)));
        let pick = candidates.into_iter().find(|&i| {
            let v = &ring[i];
            if !in_cone(&ring, i, target) || !in_cone(hole, m, v) {
                return false;
            }
            let mut chains: Vec<&[Point]> = vec![&ring];
            chains.extend(order[h..].iter().map(|c| c.as_slice()));
            clear_of(v, target, &chains)
        });
        let i = pick.ok_or_else(|| Error::Triangulation("no visible bridge for a hole".into()))?;
        let mut spliced = Vec::with_capacity(ring.len() + hole.len() + 2);
        spliced.extend_from_slice(&ring[..=i]);
        spliced.extend_from_slice(&hole[m..]);
        spliced.extend_from_slice(&hole[..=m]);
        spliced.push(ring[i].clone());
        spliced.extend_from_slice(&ring[i + 1..]);
        ring = spliced;
    }
    Ok(ring)
}

fn inside_closed(p: &Point, a: &Point, b: &Point, c: &Point) -> bool {
    left_on(a, b, p) && left_on(b, c, p) && left_on(c, a, p)
}

fn inside_open(p: &Point, a: &Point, b: &Point, c: &Point) -> bool {
    left(a, b, p) && left(b, c, p) && left(c, a, p)
}

fn ear_clip(ring: Vec<Point>, weight: &crate::numeric::Rational) -> Result<Vec<Triangle>> {
    let mut live = ring;
    let mut out = Vec::new();
    let tri = |a: &Point, b: &Point, c: &Point| Triangle::new(a.clone(), b.clone(), c.clone(), weight.clone());
    while live.len() > 3 {
        let n = live.len();
        let flat = (0..n).find(|&k| orient(&live[(k + n - 1) % n], &live[k], &live[(k + 1) % n]).is_zero());
        if let Some(k) = flat {
            live.remove(k);
            continue;
        }
        let is_ear = |k: usize, strict: bool| {
            let (a, b, c) = (&live[(k + n - 1) % n], &live[k], &live[(k + 1) % n]);
            if !left(a, b, c) {
                return false;
            }
            let blocked = live.iter().any(|p| {
                p != a && p != b && p != c
                    && if strict { inside_open(p, a, b, c) } else { inside_closed(p, a, b, c) }
            });
            if blocked {
                return false;
            }
            strict
                || (in_cone(&live, (k + n - 1) % n, c)
                    && in_cone(&live, (k + 1) % n, a)
                    && clear_of(a, c, &[&live]))
        };
        let k = (0..n)
            .find(|&k| is_ear(k, false))
            .or_else(|| (0..n).find(|&k| is_ear(k, true)))
            .ok_or_else(|| Error::Triangulation("no ear found".into()))?;
        out.push(tri(&live[(k + n - 1) % n], &live[k], &live[(k + 1) % n]));
        live.remove(k);
    }
    if live.len() == 3 && left(&live[0], &live[1], &live[2]) {
        out.push(tri(&live[0], &live[1], &live[2]));
    }
    Ok(out)
}

/// Triangulates a validated polygon. Every triangle is counterclockwise and
/// carries the polygon's weight; the areas sum to the net polygon area.
pub fn triangulate(poly: &WeightedPolygon) -> Result<Vec<Triangle>> {
    if poly.outer.len() < 3 {
        return Err(Error::ShortChain("solid chain".into()));
    }
    if poly.holes.is_empty() && poly.outer.len() == 3 {
        let [a, b, c] = [&poly.outer[0], &poly.outer[1], &poly.outer[2]];
        if orient(a, b, c).is_zero() {
            return Err(Error::DegenerateTriangle);
        }
        return Ok(vec![Triangle::new(a.clone(), b.clone(), c.clone(), poly.weight.clone())]);
    }
    let ring = bridge_holes(&poly.outer, &poly.holes)?;
    let tris = ear_clip(ring, &poly.weight)?;
    let total = tris.iter().map(Triangle::area).fold(crate::numeric::int(0), |a, b| a + b);
    if total != poly.area() {
        return Err(Error::Triangulation("triangle areas do not cover the polygon".into()));
    }
    Ok(tris)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()
    }

    fn area_sum(t: &[Triangle]) -> crate::numeric::Rational {
        t.iter().map(Triangle::area).fold(int(0), |a, b| a + b)
    }

    #[test]
    fn quadrilateral() {
        let p = WeightedPolygon::new(int(1), pts(&[(0, 0), (3, 0), (4, 2), (1, 3)]), vec![]);
        let t = triangulate(&p).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(area_sum(&t), p.area());
    }

    #[test]
    fn triangle_unchanged() {
        let p = WeightedPolygon::new(int(2), pts(&[(0, 0), (1, 0), (0, 1)]), vec![]);
        let t = triangulate(&p).unwrap();
        assert_eq!(t, vec![Triangle::new(p.outer[0].clone(), p.outer[1].clone(), p.outer[2].clone(), int(2))]);
    }

    #[test]
    fn square_with_hole() {
        let p = WeightedPolygon::new(
            int(1),
            pts(&[(0, 0), (4, 0), (4, 4), (0, 4)]),
            vec![pts(&[(1, 1), (1, 3), (3, 3), (3, 1)])],
        );
        let t = triangulate(&p).unwrap();
        assert_eq!(area_sum(&t), int(12));
        assert!(t.iter().all(|t| t.signed_area().is_positive()));
    }

    #[test]
    fn several_holes_and_reflex_outer() {
        let outer = pts(&[(0, 0), (10, 0), (10, 10), (6, 10), (5, 4), (4, 10), (0, 10)]);
        let holes = vec![
            pts(&[(1, 1), (1, 3), (3, 3), (3, 1)]),
            pts(&[(6, 1), (6, 3), (8, 2)]),
            pts(&[(1, 6), (1, 8), (2, 8), (2, 6)]),
            pts(&[(7, 5), (7, 8), (9, 8), (9, 5)]),
        ];
        let p = WeightedPolygon::new(int(1), outer, holes);
        p.validate(0).unwrap();
        let t = triangulate(&p).unwrap();
        assert_eq!(area_sum(&t), p.area());
    }

    #[test]
    fn holes_sharing_the_bridge_column() {
        let outer = pts(&[(0, 0), (12, 0), (12, 4), (0, 4)]);
        let holes = vec![
            pts(&[(1, 1), (1, 3), (3, 3), (3, 1)]),
            pts(&[(5, 1), (5, 3), (7, 3), (7, 1)]),
            pts(&[(9, 1), (9, 3), (11, 3), (11, 1)]),
        ];
        let p = WeightedPolygon::new(int(1), outer, holes);
        let t = triangulate(&p).unwrap();
        assert_eq!(area_sum(&t), p.area());
    }

    #[test]
    fn collinear_vertices() {
        let p = WeightedPolygon::new(int(1), pts(&[(0, 0), (1, 0), (2, 0), (2, 2), (1, 2), (0, 2)]), vec![]);
        let t = triangulate(&p).unwrap();
        assert_eq!(area_sum(&t), int(4));
    }
}
