//! Piecewise-linear path following for zeros of maps `g: [-1,1]^n → R^n`
//! that are odd on the boundary of the cube.
//!
//! The cube carries the Kuhn triangulation on an odd grid, which is
//! symmetric under `y ↦ −y`. The homotopy runs through one prism layer
//! `cube × {0,1}`, labelled with `y` at the bottom and `g(y)` at the top.
//! Each prism is split into `n + 1` simplices by a vertex order that is
//! invariant under negation, so a path leaving through a boundary facet
//! re-enters through the antipodal facet with the same barycentric
//! coordinates. Ties are broken lexicographically.

use std::cmp::Ordering;
use std::collections::HashMap;

use nalgebra::DMatrix;

type Grid = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Vtx {
    g: Grid,
    top: bool,
}

#[derive(Clone, Debug)]
struct Kuhn {
    base: Grid,
    perm: Vec<usize>,
}

impl Kuhn {
    fn vertices(&self) -> Vec<Grid> {
        let mut out = vec![self.base.clone()];
        let mut cur = self.base.clone();
        for &i in &self.perm {
            cur[i] += 1;
            out.push(cur.clone());
        }
        out
    }

    /// Neighbor across the facet opposite vertex `i`.
    fn flip(&self, i: usize) -> Kuhn {
        let n = self.perm.len();
        let mut k = self.clone();
        if i == 0 {
            k.base[self.perm[0]] += 1;
            k.perm.rotate_left(1);
        } else if i == n {
            k.base[self.perm[n - 1]] -= 1;
            k.perm.rotate_right(1);
        } else {
            k.perm.swap(i - 1, i);
        }
        k
    }

    fn negate(&self, m: i64) -> Kuhn {
        let top = self.vertices().pop().expect("n + 1 vertices");
        Kuhn { base: top.iter().map(|v| m - v).collect(), perm: self.perm.iter().rev().copied().collect() }
    }

    fn inside(&self, m: i64) -> bool {
        self.vertices().iter().all(|v| v.iter().all(|&c| (0..=m).contains(&c)))
    }
}

struct Grid1 {
    m: i64,
}

impl Grid1 {
    fn neg(&self, g: &Grid) -> Grid {
        g.iter().map(|v| self.m - v).collect()
    }

    fn on_boundary(&self, g: &Grid) -> bool {
        g.iter().any(|&c| c == 0 || c == self.m)
    }

    /// Strict order, even under negation away from the central cube.
    fn cmp(&self, a: &Grid, b: &Grid) -> Ordering {
        let key = |g: &Grid| {
            let n = self.neg(g);
            if *g >= n {
                g.clone()
            } else {
                n
            }
        };
        key(a).cmp(&key(b)).then_with(|| a.cmp(b))
    }

    fn coords(&self, g: &Grid) -> Vec<f64> {
        g.iter().map(|&c| (2 * c - self.m) as f64 / self.m as f64).collect()
    }
}

/// One simplex of the prism over a Kuhn simplex: bottom copies of the first
/// `j + 1` ordered vertices and top copies of the last `n + 1 − j`.
struct Prism {
    kuhn: Kuhn,
    order: Vec<Grid>,
    j: usize,
}

impl Prism {
    fn new(kuhn: Kuhn, j: usize, grid: &Grid1) -> Prism {
        let mut order = kuhn.vertices();
        order.sort_by(|a, b| grid.cmp(a, b));
        Prism { kuhn, order, j }
    }

    fn pos(&self, g: &Grid) -> usize {
        self.order.iter().position(|v| v == g).expect("vertex of simplex")
    }
}

pub struct Trace {
    /// Approximate zero in cube coordinates.
    pub point: Vec<f64>,
    pub pivots: usize,
    /// True when a vertex label already met the caller's tolerance.
    pub early: bool,
}

struct Labels<'a> {
    grid: &'a Grid1,
    g: &'a mut dyn FnMut(&[f64]) -> Vec<f64>,
    cache: HashMap<Vtx, Vec<f64>>,
    tol: f64,
    hit: Option<Vec<f64>>,
}

impl Labels<'_> {
    fn get(&mut self, v: &Vtx) -> Vec<f64> {
        if let Some(l) = self.cache.get(v) {
            return l.clone();
        }
        let neg = self.grid.neg(&v.g);
        let l = if self.grid.on_boundary(&v.g) && neg > v.g {
            self.get(&Vtx { g: neg, top: v.top }).iter().map(|x| -x).collect()
        } else {
            let y = self.grid.coords(&v.g);
            if v.top {
                let mut l = (self.g)(&y);
                for (c, x) in l.iter_mut().enumerate() {
                    *x += JITTER * jitter(&v.g, c);
                }
                if self.hit.is_none() && l.iter().all(|x| x.abs() <= self.tol) {
                    self.hit = Some(y);
                }
                l
            } else {
                y
            }
        };
        self.cache.insert(v.clone(), l.clone());
        l
    }
}

/// Scale of the deterministic label perturbation that keeps bases regular
/// where the map is locally constant.
const JITTER: f64 = 1e-9;

fn jitter(g: &Grid, c: usize) -> f64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15 ^ c as u64;
    for &v in g {
        h ^= v as u64;
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 31;
    }
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^= h >> 29;
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn column(l: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(l.len() + 1);
    c.push(1.0);
    c.extend_from_slice(l);
    c
}

fn inverse(cols: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let k = cols.len();
    DMatrix::from_fn(k, k, |r, c| cols[c][r]).try_inverse()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let scale = x.abs().max(y.abs()).max(1e-300);
        if (x - y).abs() > 1e-11 * scale {
            return x.total_cmp(y);
        }
    }
    Ordering::Equal
}

/// Follows the homotopy path on a grid with `m` cells per side (rounded up
/// to odd). Returns `None` if the pivot budget runs out or the basis
/// becomes singular. Stops early at a vertex whose label is within `tol`.
pub fn antipodal_zero(n: usize, m: usize, max_pivots: usize, tol: f64, g: &mut dyn FnMut(&[f64]) -> Vec<f64>) -> Option<Trace> {
    assert!(n >= 1);
    let m = (m.max(3) | 1) as i64;
    let grid = Grid1 { m };
    let mut labels = Labels { grid: &grid, g, cache: HashMap::new(), tol, hit: None };

    let start = Kuhn { base: vec![(m - 1) / 2; n], perm: (0..n).collect() };
    let mut simplex = Prism::new(start, n, &grid);
    let mut facet: Vec<Vtx> = simplex.order.iter().map(|g| Vtx { g: g.clone(), top: false }).collect();
    let mut entering = Vtx { g: simplex.order[n].clone(), top: true };
    let mut cols: Vec<Vec<f64>> = facet.iter().map(|v| column(&labels.get(v))).collect();
    let mut binv = inverse(&cols)?;

    for pivots in 0..max_pivots {
        let c = column(&labels.get(&entering));
        if let Some(y) = labels.hit.take() {
            return Some(Trace { point: y, pivots, early: true });
        }
        let d = &binv * DMatrix::from_column_slice(n + 1, 1, &c);
        let mut leave: Option<(usize, Vec<f64>)> = None;
        for r in 0..=n {
            if d[r] <= 1e-12 {
                continue;
            }
            let ratio: Vec<f64> = (0..=n).map(|k| binv[(r, k)] / d[r]).collect();
            if leave.as_ref().is_none_or(|(_, best)| lex_cmp(&ratio, best) == Ordering::Less) {
                leave = Some((r, ratio));
            }
        }
        let (r, _) = leave?;
        let gone = std::mem::replace(&mut facet[r], entering.clone());
        cols[r] = c;
        binv = inverse(&cols)?;

        let j = simplex.j;
        let i = simplex.pos(&gone.g);
        if i == j && !gone.top {
            if j == 0 {
                let lambda: Vec<f64> = (0..=n).map(|k| binv[(k, 0)]).collect();
                let mut point = vec![0.0; n];
                for (v, l) in facet.iter().zip(&lambda) {
                    for (p, y) in point.iter_mut().zip(grid.coords(&v.g)) {
                        *p += l * y;
                    }
                }
                return Some(Trace { point, pivots, early: false });
            }
            simplex.j = j - 1;
            entering = Vtx { g: simplex.order[j - 1].clone(), top: true };
        } else if i == j {
            if j == n {
                return None;
            }
            simplex.j = j + 1;
            entering = Vtx { g: simplex.order[j + 1].clone(), top: false };
        } else {
            let kuhn_index = simplex.kuhn.vertices().iter().position(|v| *v == gone.g).expect("vertex");
            let next = simplex.kuhn.flip(kuhn_index);
            if next.inside(m) {
                let wj = simplex.order[j].clone();
                let fresh = next.vertices().into_iter().find(|v| !simplex.order.contains(v)).expect("new vertex");
                let s = Prism::new(next, 0, &grid);
                let j2 = s.pos(&wj);
                let top = s.pos(&fresh) > j2;
                simplex = Prism { j: j2, ..s };
                entering = Vtx { g: fresh, top };
            } else {
                simplex = Prism::new(simplex.kuhn.negate(m), j, &grid);
                for v in facet.iter_mut() {
                    v.g = grid.neg(&v.g);
                }
                cols = facet.iter().map(|v| column(&labels.get(v))).collect();
                binv = inverse(&cols)?;
                entering = Vtx { g: grid.neg(&gone.g), top: gone.top };
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuhn_flip_is_involutive() {
        let k = Kuhn { base: vec![2, 3, 1], perm: vec![1, 0, 2] };
        for i in 0..=3 {
            let f = k.flip(i);
            let back = (0..=3).map(|t| f.flip(t)).find(|b| b.base == k.base && b.perm == k.perm);
            assert!(back.is_some(), "facet {i}");
            let shared = k.vertices().iter().filter(|v| f.vertices().contains(v)).count();
            assert_eq!(shared, 3);
        }
    }

    #[test]
    fn negation_maps_simplices() {
        let k = Kuhn { base: vec![0, 4], perm: vec![1, 0] };
        let mut a: Vec<Grid> = k.negate(7).vertices();
        let mut b: Vec<Grid> = k.vertices().iter().map(|v| v.iter().map(|c| 7 - c).collect()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn finds_zero_of_odd_map() {
        // Odd on the boundary, with the zero pushed off the origin.
        let bump = |y: &[f64]| 1.0 - y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut g = |y: &[f64]| vec![y[1] - y[0].powi(3) + 0.6 * bump(y), -y[0] + 0.2 * y[1] + 0.3 * bump(y)];
        let t = antipodal_zero(2, 41, 100_000, 0.0, &mut g).expect("path ends");
        let v = g(&t.point);
        assert!(v.iter().all(|x| x.abs() < 0.05), "{v:?}");
    }

    #[test]
    fn boundary_odd_map_in_three_dims() {
        let bump = |y: &[f64]| 1.0 - y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut g = |y: &[f64]| {
            let b = bump(y);
            vec![y[0].powi(3) - 0.4 * y[1] + 0.5 * b, y[1] + y[2] * 0.5 - 0.9 * b, -y[2] - y[0] * 0.3 + 0.7 * b]
        };
        let t = antipodal_zero(3, 31, 100_000, 0.0, &mut g).expect("path ends");
        let v = g(&t.point);
        assert!(v.iter().all(|x| x.abs() < 0.1), "{v:?}");
    }
}
