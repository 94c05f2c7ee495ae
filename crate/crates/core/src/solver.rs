//! Search for sphere points with small antipodal residual.
//!
//! The main search follows a simplicial homotopy (see `simplicial`) on a
//! hemisphere chart and finishes with Levenberg-Marquardt. If that fails,
//! multistart runs: each seed runs projected coordinate descent on
//! `Φ(p) = Σ_i (f_i(p) − f_i(−p))²` followed by Levenberg-Marquardt steps in
//! the tangent space of the current L1 face. The best float candidate is
//! snapped to nearby rationals and checked exactly, by the measure function
//! and by the clipping oracle.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{region_mass_oracle, CompiledInstance};
use crate::numeric::{approximate, format_rational, from_f64, int, to_f64, Rational};
use crate::sc_path::{layout, solution_to_path, sphere_to_solution, FeasibleSolution, ScPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Simplicial homotopy runs, then multistart if none verifies.
    Homotopy,
    Multistart,
    Grid,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homotopy" => Ok(Method::Homotopy),
            "multistart" => Ok(Method::Multistart),
            "grid" => Ok(Method::Grid),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub epsilon: Rational,
    pub turns: usize,
    pub method: Method,
    pub seeds: usize,
    pub rng_seed: u64,
    pub grid_resolution: usize,
    /// Coordinate-descent sweeps per seed.
    pub max_iters: usize,
    /// Largest number of grid points `solve_grid` will visit.
    pub grid_budget: u128,
    /// Pivot budget per homotopy run.
    pub max_pivots: usize,
    /// Grid sizes tried by each homotopy variant, coarse to fine.
    pub homotopy_cells: Vec<usize>,
    pub homotopy_variants: usize,
    /// Worker threads; `None` reads `PIZZA_THREADS`, then uses all cores.
    pub threads: Option<usize>,
}

impl SolverConfig {
    /// Defaults with the turn budget `n − 1` for `n` colors.
    pub fn for_colors(n: usize, epsilon: Rational) -> Self {
        SolverConfig {
            epsilon,
            turns: n.saturating_sub(1),
            method: Method::Homotopy,
            seeds: 64,
            rng_seed: 0,
            grid_resolution: 32,
            max_iters: 300,
            grid_budget: 2_000_000,
            max_pivots: 200_000,
            homotopy_cells: vec![45, 135],
            homotopy_variants: 16,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_positive() {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.grid_resolution < 2 {
            return Err(Error::Config("grid resolution must be at least 2".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Config("need at least one seed".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub point: Vec<Rational>,
    pub solution: FeasibleSolution<Rational>,
    pub path: ScPath<Rational>,
    /// Exact `‖f(p) − f(−p)‖∞`.
    pub residual: Rational,
    /// Exact `μ_i(A) − μ_i(B)` per color.
    pub per_color_gap: Vec<Rational>,
    pub evaluations: u64,
    pub wall_time: Duration,
    pub verified_exact: bool,
}

impl SolveReport {
    pub fn turns(&self) -> usize {
        self.path.turns()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "residual": format_rational(&self.residual),
            "residual_f64": to_f64(&self.residual),
            "per_color_gap": self.per_color_gap.iter().map(format_rational).collect::<Vec<_>>(),
            "evaluations": self.evaluations,
            "verified_exact": self.verified_exact,
            "turns": self.turns(),
        })
    }
}

fn thread_count(cfg: &SolverConfig) -> usize {
    cfg.threads
        .or_else(|| std::env::var("PIZZA_THREADS").ok().and_then(|v| v.parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn with_pool<T: Send>(cfg: &SolverConfig, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(thread_count(cfg)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Rescales onto `Σ|p_j| = radius`, keeping signs.
pub fn project(p: &mut [f64], radius: f64) {
    let norm: f64 = p.iter().map(|v| v.abs()).sum();
    if norm <= f64::MIN_POSITIVE || !norm.is_finite() {
        p.iter_mut().for_each(|v| *v = 0.0);
        let last = p.len() - 1;
        p[last] = radius;
        return;
    }
    let s = radius / norm;
    p.iter_mut().for_each(|v| *v *= s);
}

/// Odd, continuous retraction onto points with `|X_i| ≤ 1`: clamps the
/// cut coordinates and hands the excess to the slice block by scaling.
/// Off `Z = R = 0` its image avoids the points where the encoding jumps
/// (`R = 0` with an unfilled top slice).
pub fn regularize(p: &mut [f64]) {
    let Ok(k) = crate::sc_path::turns_for_len(p.len()) else { return };
    let s = layout(k).0;
    let mut excess = 0.0;
    for v in p[s + 1..].iter_mut() {
        if v.abs() > 1.0 {
            excess += v.abs() - 1.0;
            *v = v.signum();
        }
    }
    if excess <= 0.0 {
        return;
    }
    let head: f64 = p[..=s].iter().map(|v| v.abs()).sum();
    if head > 0.0 {
        let f = (head + excess) / head;
        p[..=s].iter_mut().for_each(|v| *v *= f);
    } else {
        // Sign of the first clamped cut keeps the map odd here too.
        let sign = p[s + 1..].iter().find(|v| **v != 0.0).map_or(1.0, |v| v.signum());
        p[s] = sign * excess;
    }
}

struct Objective<'a> {
    ci: &'a CompiledInstance,
    evals: u64,
    regular: bool,
}

impl Objective<'_> {
    fn gaps(&mut self, p: &[f64]) -> Vec<f64> {
        self.evals += 1;
        if !self.regular {
            return self.ci.gaps_f64(p).expect("length checked by caller");
        }
        let mut q = p.to_vec();
        regularize(&mut q);
        self.ci.gaps_f64(&q).expect("length checked by caller")
    }

    fn phi(&mut self, p: &[f64]) -> f64 {
        self.gaps(p).iter().map(|g| g * g).sum()
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Coordinate descent with step halving.
fn descend(obj: &mut Objective, p: &mut Vec<f64>, radius: f64, sweeps: usize) -> f64 {
    let mut best = obj.phi(p);
    let mut h = radius / 4.0;
    for _ in 0..sweeps {
        if best < 1e-30 || h < 1e-13 {
            break;
        }
        let mut improved = false;
        for j in 0..p.len() {
            for dir in [1.0, -1.0] {
                let mut q = p.clone();
                q[j] += dir * h;
                project(&mut q, radius);
                let v = obj.phi(&q);
                if v < best {
                    best = v;
                    *p = q;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// Levenberg-Marquardt on the face of the sphere containing `p`.
fn refine(obj: &mut Objective, p: &mut Vec<f64>, radius: f64, iters: usize) -> f64 {
    let d = p.len();
    let mut gaps = obj.gaps(p);
    let mut best: f64 = gaps.iter().map(|g| g * g).sum();
    let mut lambda = 1e-3;
    for _ in 0..iters {
        if best < 1e-30 {
            break;
        }
        // Tangent directions e_j − σ_j σ_a e_a, pivoting on the largest coordinate a.
        let a = (0..d).max_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs())).unwrap_or(0);
        let sigma: Vec<f64> = p.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
        let dirs: Vec<usize> = (0..d).filter(|&j| j != a).collect();
        let h = 1e-7;
        let n = gaps.len();
        let mut jac = DMatrix::<f64>::zeros(n, dirs.len());
        for (c, &j) in dirs.iter().enumerate() {
            let mut q = p.clone();
            q[j] += h;
            q[a] -= sigma[j] * sigma[a] * h;
            let gq = obj.gaps(&q);
            for r in 0..n {
                jac[(r, c)] = (gq[r] - gaps[r]) / h;
            }
        }
        let f = DVector::from_vec(gaps.clone());
        let jtj = jac.transpose() * &jac;
        let jtf = jac.transpose() * f;
        let mut accepted = false;
        for _ in 0..8 {
            let mut m = jtj.clone();
            for i in 0..m.nrows() {
                m[(i, i)] += lambda;
            }
            let Some(step) = m.lu().solve(&(-&jtf)) else {
                lambda *= 10.0;
                continue;
            };
            let mut q = p.clone();
            for (c, &j) in dirs.iter().enumerate() {
                q[j] += step[c];
                q[a] -= sigma[j] * sigma[a] * step[c];
            }
            project(&mut q, radius);
            let gq = obj.gaps(&q);
            let v: f64 = gq.iter().map(|g| g * g).sum();
            if v < best {
                best = v;
                *p = q;
                gaps = gq;
                lambda = (lambda * 0.3).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    best
}

struct Candidate {
    seed: usize,
    point: Vec<f64>,
    residual: f64,
    evals: u64,
}

fn run_seed(ci: &CompiledInstance, cfg: &SolverConfig, seed: usize) -> Candidate {
    let d = cfg.turns + 2;
    let radius = (cfg.turns + 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(seed as u64));
    let mut p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project(&mut p, radius);
    let mut obj = Objective { ci, evals: 0, regular: true };
    descend(&mut obj, &mut p, radius, cfg.max_iters);
    refine(&mut obj, &mut p, radius, 60);
    let residual = inf_norm(&obj.gaps(&p));
    regularize(&mut p);
    Candidate { seed, point: p, residual, evals: obj.evals }
}

/// Hemisphere chart `R ≥ 0` of the sphere over the cube `[-1,1]^(d-1)`,
/// odd on the cube boundary.
fn chart(y: &[f64], s: usize, radius: f64) -> Vec<f64> {
    let l1: f64 = y.iter().map(|v| v.abs()).sum();
    let linf = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if l1 > 0.0 { linf / l1 * radius } else { 0.0 };
    let mut p: Vec<f64> = y.iter().map(|v| v * scale).collect();
    p.insert(s, radius - linf * radius);
    p
}

/// Homotopy on a grid of `cells` per side, then local refinement. Variant
/// `v > 0` permutes and reflects the cube axes and mixes the labels by a
/// random matrix, which changes the path but keeps its endpoints zeros.
fn run_homotopy(ci: &CompiledInstance, cfg: &SolverConfig, cells: usize, v: usize) -> Option<Candidate> {
    let d = cfg.turns + 2;
    let dim = d - 1;
    let colors = ci.n_colors();
    if colors > dim {
        return None;
    }
    let radius = (cfg.turns + 1) as f64;
    let s = layout(cfg.turns).0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ (v as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut axes: Vec<usize> = (0..dim).collect();
    let mut flips = vec![1.0; dim];
    let mut mix = DMatrix::<f64>::identity(dim, dim);
    if v > 0 {
        for i in (1..dim).rev() {
            axes.swap(i, rng.gen_range(0..=i));
        }
        flips.iter_mut().for_each(|f| *f = if rng.gen_bool(0.5) { -1.0 } else { 1.0 });
        mix = DMatrix::from_fn(dim, dim, |r, c| if r == c { 1.0 } else { 0.0 } + rng.gen_range(-0.5..0.5));
    }
    let to_chart = |y: &[f64]| -> Vec<f64> {
        let z: Vec<f64> = (0..dim).map(|i| flips[i] * y[axes[i]]).collect();
        chart(&z, s, radius)
    };
    let mut obj = Objective { ci, evals: 0, regular: false };
    let tol = to_f64(&cfg.epsilon) / 4.0;
    let trace = {
        let mut label = |y: &[f64]| {
            let mut g = obj.gaps(&to_chart(y));
            g.extend_from_slice(&y[colors..]);
            (&mix * DVector::from_vec(g)).as_slice().to_vec()
        };
        crate::simplicial::antipodal_zero(dim, cells, cfg.max_pivots, tol, &mut label)?
    };
    let mut p = to_chart(&trace.point);
    refine(&mut obj, &mut p, radius, 60);
    let residual = inf_norm(&obj.gaps(&p));
    Some(Candidate { seed: v, point: p, residual, evals: obj.evals })
}

fn sphere_fixup(p: &mut [Rational], remainder: usize, radius: &Rational) {
    let others = p.iter().enumerate().filter(|(j, _)| *j != remainder).fold(Rational::zero(), |a, (_, v)| a + v.abs());
    let rest = radius - &others;
    if !rest.is_negative() {
        p[remainder] = if p[remainder].is_negative() { -rest } else { rest };
        return;
    }
    let total = &others + p[remainder].abs();
    if total.is_zero() {
        p[remainder] = radius.clone();
        return;
    }
    let s = radius / total;
    p.iter_mut().for_each(|v| *v *= &s);
}

fn max_denominator(p: &[Rational]) -> BigInt {
    p.iter().map(|v| v.denom().clone()).max().unwrap_or_else(|| BigInt::from(1))
}

/// Snaps `p` to nearby small-denominator rationals on the exact sphere.
/// Tries denominator caps `2^4, 2^8, …, 2^48` and `p` itself; keeps the
/// candidate with the least exact residual, preferring smaller denominators.
pub fn polish(ci: &CompiledInstance, p: &[Rational]) -> Result<(Vec<Rational>, Rational)> {
    let k = crate::sc_path::turns_for_len(p.len())?;
    let remainder = layout(k).0;
    let radius = int(k as i64 + 1);
    let mut candidates = Vec::new();
    for bits in (4..=48).step_by(4) {
        let cap = BigInt::from(1u64) << bits;
        let mut q: Vec<Rational> = p.iter().map(|v| approximate(v, &cap)).collect();
        sphere_fixup(&mut q, remainder, &radius);
        candidates.push(q);
    }
    let mut raw = p.to_vec();
    sphere_fixup(&mut raw, remainder, &radius);
    candidates.push(raw);
    let mut best: Option<(Vec<Rational>, Rational, BigInt)> = None;
    for q in candidates {
        let r = ci.residual(&q)?;
        let den = max_denominator(&q);
        let better = match &best {
            None => true,
            Some((_, br, bd)) => r < *br || (r == *br && den < *bd),
        };
        if better {
            best = Some((q, r, den));
        }
    }
    let (q, r, _) = best.expect("at least one candidate");
    Ok((q, r))
}

/// Exact check of `p`: residual through the measure function and per-color
/// gaps through the clipping oracle.
pub fn verify_point(ci: &CompiledInstance, p: &[Rational], epsilon: &Rational) -> Result<(Rational, Vec<Rational>, bool)> {
    crate::sc_path::check_exact_sphere(p)?;
    let residual = ci.residual(p)?;
    let sol = sphere_to_solution(p)?;
    let gaps: Vec<Rational> = region_mass_oracle(&ci.instance, &sol)?.iter().map(|m| m.gap()).collect();
    let ok = &residual <= epsilon && gaps.iter().all(|g| &g.abs() <= epsilon);
    Ok((residual, gaps, ok))
}

fn report(ci: &CompiledInstance, point: Vec<Rational>, cfg: &SolverConfig, evaluations: u64, start: Instant) -> Result<SolveReport> {
    let (residual, per_color_gap, ok) = verify_point(ci, &point, &cfg.epsilon)?;
    let solution = sphere_to_solution(&point)?;
    let path = solution_to_path(&solution)?;
    let verified_exact = ok && path.turns() <= cfg.turns;
    Ok(SolveReport { point, solution, path, residual, per_color_gap, evaluations, wall_time: start.elapsed(), verified_exact })
}

/// Dispatches on `cfg.method`.
pub fn run(ci: &CompiledInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    match cfg.method {
        Method::Homotopy | Method::Multistart => solve(ci, cfg),
        Method::Grid => solve_grid(ci, cfg),
    }
}

/// Homotopy runs first (unless `cfg.method` is `Multistart`), in parallel
/// batches checked in a fixed order. Then multistart seeds, also batched:
/// after every batch the best candidate so far (lowest residual, then lowest
/// seed index) is polished and verified. Stops at the first success.
pub fn solve(ci: &CompiledInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let eps = to_f64(&cfg.epsilon);
    let batch = 8;
    let mut evaluations = 0u64;
    let mut best: Option<Candidate> = None;
    let mut tried_seed = usize::MAX;
    let mut best_exact: Option<(Vec<Rational>, Rational)> = None;
    let variants = if cfg.method == Method::Multistart { 0 } else { cfg.homotopy_variants };
    let runs: Vec<(usize, usize)> = (0..variants).flat_map(|v| cfg.homotopy_cells.iter().map(move |&c| (v, c))).collect();
    for chunk in runs.chunks(batch) {
        let found: Vec<Option<Candidate>> = with_pool(cfg, || chunk.par_iter().map(|&(v, cells)| run_homotopy(ci, cfg, cells, v)).collect());
        for c in found.into_iter().flatten() {
            evaluations += c.evals;
            if c.residual > eps {
                continue;
            }
            let exact: Vec<Rational> = c.point.iter().map(|&v| from_f64(v)).collect();
            let (q, r) = polish(ci, &exact)?;
            let rep = report(ci, q.clone(), cfg, evaluations, start)?;
            if rep.verified_exact {
                return Ok(rep);
            }
            if best_exact.as_ref().is_none_or(|(_, br)| r < *br) {
                best_exact = Some((q, r));
            }
        }
    }
    let mut first = 0;
    while first < cfg.seeds {
        let last = (first + batch).min(cfg.seeds);
        let found: Vec<Candidate> = with_pool(cfg, || (first..last).into_par_iter().map(|s| run_seed(ci, cfg, s)).collect());
        for c in found {
            evaluations += c.evals;
            let better = match &best {
                None => true,
                Some(b) => c.residual < b.residual || (c.residual == b.residual && c.seed < b.seed),
            };
            if better {
                best = Some(c);
            }
        }
        first = last;
        let b = best.as_ref().expect("non-empty batch");
        if b.residual <= eps && b.seed != tried_seed {
            tried_seed = b.seed;
            let exact: Vec<Rational> = b.point.iter().map(|&v| from_f64(v)).collect();
            let (q, r) = polish(ci, &exact)?;
            let rep = report(ci, q.clone(), cfg, evaluations, start)?;
            if rep.verified_exact {
                return Ok(rep);
            }
            if best_exact.as_ref().is_none_or(|(_, br)| r < *br) {
                best_exact = Some((q, r));
            }
        }
    }
    let point = match best_exact {
        Some((q, _)) => q,
        None => {
            let b = best.expect("at least one seed");
            polish(ci, &b.point.iter().map(|&v| from_f64(v)).collect::<Vec<_>>())?.0
        }
    };
    report(ci, point, cfg, evaluations, start)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of signed grid points `solve_grid` visits: for each count `j` of
/// nonzero coordinates, `C(d,j)·C(N−1,j−1)·2^j`.
pub fn grid_size(d: usize, resolution: usize) -> u128 {
    let (d, n) = (d as u128, resolution as u128);
    (1..=d.min(n))
        .map(|j| binomial(d, j).saturating_mul(binomial(n - 1, j - 1)).saturating_mul(1u128 << j.min(120)))
        .fold(0u128, u128::saturating_add)
}

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if cur.len() + 1 == parts {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for a in 0..=total {
        cur.push(a);
        compositions(total - a, parts, out, cur);
        cur.pop();
    }
}

/// Exhaustive search over `p_j = ±(k+1)·a_j/N` with `Σ a_j = N`.
/// Float residuals screen the grid; points within a small margin of the
/// best are re-evaluated exactly and the exact minimum is returned.
pub fn solve_grid(ci: &CompiledInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let d = cfg.turns + 2;
    let n = cfg.grid_resolution;
    let points = grid_size(d, n);
    if points > cfg.grid_budget {
        return Err(Error::GridTooLarge { points, budget: cfg.grid_budget });
    }
    let mut comps = Vec::new();
    compositions(n, d, &mut comps, &mut Vec::with_capacity(d));
    let radius = (cfg.turns + 1) as i64;
    let expand = |comp: &Vec<usize>| -> Vec<Vec<Rational>> {
        let nz: Vec<usize> = (0..d).filter(|&j| comp[j] > 0).collect();
        (0..1u64 << nz.len())
            .map(|mask| {
                let mut p: Vec<Rational> = comp.iter().map(|&a| Rational::new((radius * a as i64).into(), (n as i64).into())).collect();
                for (bit, &j) in nz.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        p[j] = -p[j].clone();
                    }
                }
                p
            })
            .collect()
    };
    let grid: Vec<Vec<Rational>> = comps.iter().flat_map(expand).collect();
    let scored: Vec<f64> = with_pool(cfg, || {
        grid.par_iter()
            .map(|p| {
                let pf: Vec<f64> = p.iter().map(to_f64).collect();
                ci.residual_f64(&pf).unwrap_or(f64::INFINITY)
            })
            .collect()
    });
    let best_float = scored.iter().cloned().fold(f64::INFINITY, f64::min);
    let margin = 1e-9 + best_float * 1e-9;
    let shortlist: Vec<usize> = (0..grid.len()).filter(|&i| scored[i] <= best_float + margin).collect();
    let exact: Vec<Rational> = with_pool(cfg, || {
        shortlist.par_iter().map(|&i| ci.residual(&grid[i]).expect("grid points have valid length")).collect()
    });
    let mut pick = 0;
    for i in 1..shortlist.len() {
        if exact[i] < exact[pick] {
            pick = i;
        }
    }
    let point = grid[shortlist[pick]].clone();
    report(ci, point, cfg, grid.len() as u64 * 2, start)
}

/// Float residual of a rational point, for reporting.
pub fn residual_estimate(ci: &CompiledInstance, p: &[Rational]) -> f64 {
    let pf: Vec<f64> = p.iter().map(to_f64).collect();
    ci.residual_f64(&pf).unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{MassDistribution, PizzaInstance, WeightedPolygon};
    use crate::measure::compile;
    use crate::numeric::frac;

    fn colors(rects: &[(Rational, Rational, Rational, Rational)]) -> CompiledInstance {
        let masses = rects
            .iter()
            .enumerate()
            .map(|(i, (x0, y0, x1, y1))| MassDistribution {
                color: i,
                polygons: vec![WeightedPolygon::rect(int(1), x0.clone(), y0.clone(), x1.clone(), y1.clone())],
            })
            .collect();
        compile(&PizzaInstance::new(masses).unwrap()).unwrap()
    }

    fn unit() -> (Rational, Rational, Rational, Rational) {
        (int(0), int(0), int(1), int(1))
    }

    #[test]
    fn one_square_zero_turns() {
        let ci = colors(&[unit()]);
        let mut cfg = SolverConfig::for_colors(1, frac(1, 1000));
        cfg.seeds = 8;
        let rep = solve(&ci, &cfg).unwrap();
        assert!(rep.verified_exact);
        assert_eq!(rep.residual, int(0));
        assert_eq!(rep.point[0].abs(), frac(1, 2));
    }

    #[test]
    fn two_colors_symmetric() {
        let ci = colors(&[unit(), (int(0), int(0), frac(1, 2), int(1))]);
        let cfg = SolverConfig::for_colors(2, frac(1, 1000));
        let rep = solve(&ci, &cfg).unwrap();
        assert!(rep.verified_exact, "residual {}", rep.residual);
        assert!(rep.turns() <= 1);
        let again = solve(&ci, &cfg).unwrap();
        assert_eq!(again.point, rep.point);
    }

    #[test]
    fn grid_on_unit_square() {
        let ci = colors(&[unit()]);
        let mut cfg = SolverConfig::for_colors(1, frac(1, 64));
        cfg.method = Method::Grid;
        cfg.grid_resolution = 64;
        let rep = run(&ci, &cfg).unwrap();
        assert!(rep.residual <= frac(1, 64));
        cfg.turns = 6;
        cfg.grid_budget = 1000;
        assert!(matches!(solve_grid(&ci, &cfg), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn grid_size_matches_enumeration() {
        let mut comps = Vec::new();
        compositions(5, 3, &mut comps, &mut Vec::new());
        let count: u128 = comps.iter().map(|c| 1u128 << c.iter().filter(|&&a| a > 0).count()).sum();
        assert_eq!(grid_size(3, 5), count);
    }

    #[test]
    fn polish_snaps_and_keeps_rationals() {
        let ci = colors(&[unit()]);
        let p = vec![from_f64(0.4999999), from_f64(-0.5000001)];
        let (q, r) = polish(&ci, &p).unwrap();
        assert_eq!(q, vec![frac(1, 2), frac(-1, 2)]);
        assert_eq!(r, int(0));
        let exact = vec![frac(1, 3), frac(-2, 3)];
        assert_eq!(polish(&ci, &exact).unwrap().0, exact);
    }
}
