//! Non-overlapping variant: each interval of interest becomes a diagonal
//! block tiled with Latin-square patterns of small color squares.

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{place, Cell, ChInstance, ReductionKind, ReductionMeta, ValuationKind};
use crate::error::{Error, Result};
use crate::geometry::{PizzaInstance, Transform, WeightedPolygon};
use crate::numeric::{dyadic_sqrt_floor, exact_sqrt, format_rational, int, Rational};

#[derive(Debug, Clone)]
pub struct CheckerboardParams {
    pub eps: Rational,
    /// Tiles per block side. `None` uses `√(n·(x_{j+1} − x_j))` where that is
    /// a whole number and 1 elsewhere.
    pub granularity: Option<u32>,
    /// Refuse irrational side lengths instead of snapping them.
    pub exact: bool,
    /// Bits kept when snapping a side to a dyadic rational.
    pub bits: u32,
}

impl CheckerboardParams {
    pub fn new(eps: Rational) -> Self {
        CheckerboardParams { eps, granularity: None, exact: false, bits: 32 }
    }
}

fn whole_sqrt(r: &Rational) -> Option<u32> {
    if !r.is_integer() || !r.is_positive() {
        return None;
    }
    let v = r.to_integer();
    let s = v.sqrt();
    (&s * &s == v).then(|| s.to_u32()).flatten()
}

fn side(value: &Rational, exact: bool, bits: u32, what: &str) -> Result<(Rational, bool)> {
    match exact_sqrt(value) {
        Some(s) => Ok((s, false)),
        None if exact => Err(Error::Reduction(format!("{what} √{} is irrational", format_rational(value)))),
        None => Ok((dyadic_sqrt_floor(value, bits), true)),
    }
}

/// Block `B_j` has side `y_j = √((x_{j+1} − x_j)·c_max)` and an
/// `n·t_j × n·t_j` grid of cells; agent `i ∈ A_j` owns the cells of row `r`
/// in columns `≡ i + r (mod n)`, each holding one centred square of side
/// `√((x_{j+1} − x_j)·c_i)/(n·t_j)` and weight `n`. Together they carry
/// `μ_i(B_j) = (x_{j+1} − x_j)·c_i`. Snapped sides get the weight that keeps
/// this mass exact.
pub fn reduce_checkerboard(ch: &ChInstance, params: &CheckerboardParams) -> Result<(PizzaInstance, ReductionMeta)> {
    ch.validate()?;
    if !params.eps.is_positive() {
        return Err(Error::Config("epsilon must be positive".into()));
    }
    let n = ch.n();
    let mut c = Vec::with_capacity(n);
    for (i, a) in ch.agents.iter().enumerate() {
        if a.kind == ValuationKind::BlockPlusTriangle || a.blocks.len() > 2 {
            return Err(Error::Reduction(format!("agent {i} is not two-block uniform")));
        }
        c.push(a.uniform_density().ok_or_else(|| Error::Reduction(format!("agent {i} is not two-block uniform")))?);
    }
    let c_max = c.iter().max().expect("at least one agent").clone();
    let pts = super::points_of_interest(ch);
    if pts.len() < 2 {
        return Err(Error::Reduction("need at least two points of interest".into()));
    }
    let nr = int(n as i64);
    let mut raw = Vec::new();
    let mut cells = Vec::new();
    let mut z = Rational::zero();
    let mut approximate = false;
    for j in 0..pts.len() - 1 {
        let (lo, hi) = (&pts[j], &pts[j + 1]);
        let len = hi - lo;
        let t = params.granularity.or_else(|| whole_sqrt(&(&nr * &len))).unwrap_or(1).max(1);
        let (y, snapped) = side(&(&len * &c_max), params.exact, params.bits, "block side")?;
        approximate |= snapped;
        let per_side = n as i64 * t as i64;
        let cell = &y / int(per_side);
        for (i, agent) in ch.agents.iter().enumerate() {
            let ci = agent.density_on(lo, hi);
            if !ci.is_positive() {
                continue;
            }
            let (root, snapped) = side(&(&len * &ci), params.exact, params.bits, "square side")?;
            approximate |= snapped;
            let mut s = root / int(per_side);
            if s > cell {
                s = cell.clone();
            }
            if !s.is_positive() {
                return Err(Error::Reduction("square side snapped to zero; raise the precision".into()));
            }
            let count = int(n as i64 * t as i64 * t as i64);
            let weight = &len * &ci / (count * &s * &s);
            let pad = (&cell - &s) / int(2);
            for r in 0..per_side {
                for u in 0..t as i64 {
                    let q = u * n as i64 + (i as i64 + r) % n as i64;
                    let x0 = &z + &cell * int(q) + &pad;
                    let y0 = &z + &cell * int(r) + &pad;
                    raw.push((i, WeightedPolygon::rect(weight.clone(), x0.clone(), y0.clone(), &x0 + &s, &y0 + &s)));
                }
            }
        }
        cells.push((j, lo.clone(), hi.clone(), z.clone(), y.clone(), t));
        z += y;
    }
    let transform = Transform { shift_x: Rational::zero(), shift_y: Rational::zero(), scale: Rational::one() / &z };
    let inst = place(n, raw, &transform)?;
    let mut meta = ReductionMeta::base(ReductionKind::Checkerboard, ch, transform.clone());
    meta.cells = cells
        .into_iter()
        .map(|(j, lo, hi, z0, y, t)| Cell {
            interval: j,
            lo,
            hi,
            x0: &z0 * &transform.scale,
            y0: &z0 * &transform.scale,
            side: &y * &transform.scale,
            tiles: Some(t),
            gadget: false,
        })
        .collect();
    meta.eps_out = Some(&params.eps * &nr / &c_max);
    meta.approximate = approximate;
    Ok((inst, meta))
}
