#![allow(dead_code)]

use num_traits::{Signed, Zero};
use rand::Rng;
use scpizza::geometry::{is_obtuse, orient, MassDistribution, PizzaInstance, Point, Triangle, WeightedPolygon};
use scpizza::numeric::{int, Rational};

pub const GRID: i64 = 64;

pub fn grid_point<R: Rng>(rng: &mut R) -> Point {
    Point::new(Rational::new(rng.gen_range(0..=GRID).into(), GRID.into()), Rational::new(rng.gen_range(0..=GRID).into(), GRID.into()))
}

/// Counter-clockwise, non-degenerate triangle with grid vertices.
pub fn random_triangle<R: Rng>(rng: &mut R, non_obtuse: bool) -> Triangle {
    loop {
        let (a, b, mut c) = (grid_point(rng), grid_point(rng), grid_point(rng));
        let o = orient(&a, &b, &c);
        if o.is_zero() {
            continue;
        }
        let mut b = b;
        if o.is_negative() {
            std::mem::swap(&mut b, &mut c);
        }
        let w = Rational::new(rng.gen_range(1..=8).into(), rng.gen_range(1..=4).into());
        let t = Triangle::new(a, b, c, w);
        if non_obtuse && is_obtuse(&t) {
            continue;
        }
        return t;
    }
}

pub fn triangle_polygon(t: &Triangle) -> WeightedPolygon {
    WeightedPolygon::new(t.weight.clone(), vec![t.a.clone(), t.b.clone(), t.c.clone()], vec![])
}

pub fn random_instance<R: Rng>(rng: &mut R, colors: usize, max_triangles: usize) -> PizzaInstance {
    let masses = (0..colors)
        .map(|color| {
            let k = rng.gen_range(1..=max_triangles);
            MassDistribution { color, polygons: (0..k).map(|_| triangle_polygon(&random_triangle(rng, false))).collect() }
        })
        .collect();
    PizzaInstance::new(masses).expect("valid random instance")
}

/// Exact point with `Σ|p_j| = k + 1`. Slice and cut coordinates are
/// sometimes zero; `R` never is, since its sign decides the top slice.
pub fn random_sphere_point<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    let r = scpizza::sc_path::layout(k).0;
    loop {
        let raw: Vec<i64> = (0..k + 2)
            .map(|j| loop {
                let v = if rng.gen_bool(0.15) { 0 } else { rng.gen_range(-50..=50) };
                if j != r || v != 0 {
                    break v;
                }
            })
            .collect();
        let norm: i64 = raw.iter().map(|v| v.abs()).sum();
        if norm == 0 {
            continue;
        }
        let scale = Rational::new(((k + 1) as i64).into(), norm.into());
        return raw.into_iter().map(|v| int(v) * &scale).collect();
    }
}

pub fn unit_square() -> PizzaInstance {
    PizzaInstance::new(vec![MassDistribution { color: 0, polygons: vec![WeightedPolygon::rect(int(1), int(0), int(0), int(1), int(1))] }]).unwrap()
}

pub struct ChRoundTrip {
    pub instance: PizzaInstance,
    pub meta: scpizza::reductions::ReductionMeta,
    pub report: scpizza::solver::SolveReport,
    pub cuts: scpizza::reductions::ChSolution,
}

/// Reduce with diagonal squares, solve with `n − 1` turns, map the path back.
pub fn solve_ch(ch: &scpizza::reductions::ChInstance, eps: Rational, seed: u64) -> ChRoundTrip {
    use scpizza::reductions::{path_to_ch_cuts, reduce_overlapping};
    let (instance, meta) = reduce_overlapping(ch).expect("reduction");
    let ci = scpizza::measure::compile(&instance).expect("compile");
    let mut cfg = scpizza::solver::SolverConfig::for_colors(ch.n(), eps);
    cfg.rng_seed = seed;
    let report = scpizza::solver::solve(&ci, &cfg).expect("solve");
    let cuts = path_to_ch_cuts(&meta, &report.solution).expect("map back");
    ChRoundTrip { instance, meta, report, cuts }
}
