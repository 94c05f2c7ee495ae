//! Straight-line pizza sharing: unit tiles on the parabola `y = x²`, one per
//! `d`-block of `[0, 1]`, and the maps between line sets and cuts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::{place, ChInstance, ChSolution, Label, ReductionKind, ReductionMeta, ValuationKind};
use crate::error::{Error, Result};
use crate::geometry::clip::{area, clip_halfplane};
use crate::geometry::{triangulate, PizzaInstance, Point, Transform, WeightedPolygon};
use crate::measure::SideMasses;
use crate::numeric::serde_rational::{decode, Num};
use crate::numeric::{dyadic_sqrt_floor, exact_sqrt, format_rational, int, to_f64, Rational};

/// The line `a·x + b·y = c`; its positive side is `a·x + b·y > c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Line {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        Line { a, b, c }
    }

    pub fn eval(&self, p: &Point) -> Rational {
        &self.a * &p.x + &self.b * &p.y - &self.c
    }

    pub fn is_degenerate(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The same line in construction coordinates, given `p ↦ (p + shift)·scale`.
    fn pull_back(&self, t: &Transform) -> Line {
        let a = &self.a * &t.scale;
        let b = &self.b * &t.scale;
        let c = &self.c - &a * &t.shift_x - &b * &t.shift_y;
        Line { a, b, c }
    }

    fn push_forward(&self, t: &Transform) -> Line {
        let a = &self.a / &t.scale;
        let b = &self.b / &t.scale;
        let c = &self.c + &self.a * &t.shift_x + &self.b * &t.shift_y;
        Line { a, b, c }
    }
}

impl Serialize for Line {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.a), format_rational(&self.b), format_rational(&self.c)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Line {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[Num; 3]>::deserialize(d)?;
        Ok(Line { a: decode(a).map_err(D::Error::custom)?, b: decode(b).map_err(D::Error::custom)?, c: decode(c).map_err(D::Error::custom)? })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StraightCutSet {
    pub lines: Vec<Line>,
}

impl StraightCutSet {
    pub fn parse(text: &str) -> Result<Self> {
        let s: StraightCutSet = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        if self.lines.iter().any(Line::is_degenerate) {
            return Err(Error::DegenerateLine);
        }
        Ok(())
    }

    /// Side A is where the point is on the positive side of an even number
    /// of lines.
    pub fn in_a(&self, p: &Point) -> bool {
        self.lines.iter().filter(|l| l.eval(p).is_positive()).count() % 2 == 0
    }
}

#[derive(Debug, Clone)]
pub struct StraightParams {
    pub eps: Rational,
    /// Exponent `δ` in the line budget `n + ⌊n^{1−δ}⌋`.
    pub delta: Rational,
    /// Discretization step; by default the largest `1/D` below `ε²` on
    /// which every endpoint lies.
    pub d: Option<Rational>,
    pub exact: bool,
    pub bits: u32,
    /// Refuse constructions with more tiles than this.
    pub max_tiles: usize,
}

impl StraightParams {
    pub fn new(eps: Rational) -> Self {
        StraightParams { eps, delta: int(1), d: None, exact: false, bits: 40, max_tiles: 20_000 }
    }
}

fn choose_step(ch: &ChInstance, eps: &Rational) -> Rational {
    let lcm = super::points_of_interest(ch).iter().fold(BigInt::one(), |l, p| l.lcm(p.denom()));
    let bound = eps * eps;
    let mut mult = BigInt::one();
    // 1/(lcm·mult) < ε²  ⇔  lcm·mult·ε² > 1.
    let base = Rational::from_integer(lcm.clone()) * &bound;
    if !base.is_zero() {
        let need = (Rational::one() / &base).floor().to_integer() + 1;
        if need > mult {
            mult = need;
        }
    }
    Rational::new(BigInt::one(), lcm * mult)
}

/// Tile `j` (1-based) stands for the `d`-block `[(j−1)d, jd]` and has its
/// lower-left corner at `(j, j²)`. Agent `i` (0-based) valuing that block
/// gets a square of side `√c_i·ε` at `(j + i/n, j² + i/n)` whose mass is
/// `c_i·d`.
pub fn reduce_straight(ch: &ChInstance, params: &StraightParams) -> Result<(PizzaInstance, ReductionMeta)> {
    ch.validate()?;
    let n = ch.n();
    let eps = &params.eps;
    if !eps.is_positive() {
        return Err(Error::Config("epsilon must be positive".into()));
    }
    let mut c = Vec::with_capacity(n);
    for (i, a) in ch.agents.iter().enumerate() {
        if a.kind == ValuationKind::BlockPlusTriangle || a.blocks.len() > 2 {
            return Err(Error::Reduction(format!("agent {i} is not two-block uniform")));
        }
        c.push(a.uniform_density().ok_or_else(|| Error::Reduction(format!("agent {i} is not two-block uniform")))?);
    }
    let d = params.d.clone().unwrap_or_else(|| choose_step(ch, eps));
    if !d.is_positive() || d >= eps * eps {
        return Err(Error::Reduction(format!("step d = {} must lie in (0, ε²)", format_rational(&d))));
    }
    let tiles_r = Rational::one() / &d;
    if !tiles_r.is_integer() {
        return Err(Error::Reduction("1/d must be a whole number".into()));
    }
    let tiles = tiles_r.to_integer().to_usize().filter(|&t| t <= params.max_tiles).ok_or_else(|| {
        Error::Reduction(format!("{} tiles exceed the limit of {}", format_rational(&tiles_r), params.max_tiles))
    })?;
    for p in super::points_of_interest(ch) {
        if !(&p / &d).is_integer() {
            return Err(Error::Reduction(format!("endpoint {} is not a multiple of d", format_rational(&p))));
        }
    }
    let nr = int(n as i64);
    let mut approximate = false;
    let mut sides = Vec::with_capacity(n);
    for ci in &c {
        let s = match exact_sqrt(ci) {
            Some(r) => r * eps,
            None if params.exact => return Err(Error::Reduction(format!("√{} is irrational", format_rational(ci)))),
            None => {
                approximate = true;
                dyadic_sqrt_floor(&(ci * eps * eps), params.bits)
            }
        };
        if s > Rational::one() / &nr || !s.is_positive() {
            return Err(Error::Reduction(format!("square side {} does not fit a squarelet of side 1/{n}", format_rational(&s))));
        }
        sides.push(s);
    }
    let mut raw = Vec::new();
    for j in 1..=tiles {
        let lo = &d * int(j as i64 - 1);
        let hi = &d * int(j as i64);
        let (tx, ty) = (int(j as i64), int((j * j) as i64));
        for (i, agent) in ch.agents.iter().enumerate() {
            if !agent.density_on(&lo, &hi).is_positive() {
                continue;
            }
            let off = Rational::new((i as i64).into(), (n as i64).into());
            let (x0, y0) = (&tx + &off, &ty + &off);
            let s = &sides[i];
            let weight = &c[i] * &d / (s * s);
            raw.push((i, WeightedPolygon::rect(weight, x0.clone(), y0.clone(), &x0 + s, &y0 + s)));
        }
    }
    let span = int((tiles * tiles) as i64);
    let transform = Transform { shift_x: int(-1), shift_y: int(-1), scale: Rational::one() / span };
    let inst = place(n, raw, &transform)?;
    let mut meta = ReductionMeta::base(ReductionKind::Straight, ch, transform);
    let budget = n + (n as f64).powf(1.0 - to_f64(&params.delta)).floor() as usize;
    meta.eps_out = Some(eps / int(2));
    meta.d = Some(d);
    meta.delta = Some(params.delta.clone());
    meta.line_budget = Some(budget);
    meta.tiles = Some(tiles);
    meta.approximate = approximate;
    Ok((inst, meta))
}

/// Corners of tile `j` in construction coordinates, counter-clockwise from
/// the lower left.
pub fn tile_corners(j: usize) -> [Point; 4] {
    let (x, y) = (j as i64, (j * j) as i64);
    [Point::from_ints(x, y), Point::from_ints(x + 1, y), Point::from_ints(x + 1, y + 1), Point::from_ints(x, y + 1)]
}

fn crosses(l: &Line, j: usize) -> bool {
    crosses_f(l, &(to_f64(&l.a), to_f64(&l.b), to_f64(&l.c)), j)
}

/// `crosses` with the line's f64 coefficients precomputed. Corner signs are
/// read in f64 and recomputed exactly only when they are close to zero.
fn crosses_f(l: &Line, f: &(f64, f64, f64), j: usize) -> bool {
    let (x, y) = (j as f64, (j * j) as f64);
    let scale = f.0.abs() * (x + 1.0) + f.1.abs() * (y + 1.0) + f.2.abs();
    let tol = scale * 1e-9;
    let (mut pos, mut neg) = (false, false);
    for (k, (dx, dy)) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].into_iter().enumerate() {
        let v = f.0 * (x + dx) + f.1 * (y + dy) - f.2;
        if !v.is_finite() || v.abs() <= tol {
            let e = l.eval(&tile_corners(j)[k]);
            pos |= e.is_positive();
            neg |= e.is_negative();
        } else {
            pos |= v > 0.0;
            neg |= v < 0.0;
        }
    }
    pos && neg
}

fn tile_free(l: &Line, tiles: usize) -> bool {
    let f = (to_f64(&l.a), to_f64(&l.b), to_f64(&l.c));
    (1..=tiles).all(|t| !crosses_f(l, &f, t))
}

fn tile_count(meta: &ReductionMeta) -> Result<usize> {
    if meta.kind != ReductionKind::Straight {
        return Err(Error::MapBack("meta does not describe a straight-cut instance".into()));
    }
    meta.tiles.ok_or_else(|| Error::MapBack("meta lacks the tile count".into()))
}

/// Tiles whose interior the line (in instance coordinates) meets.
pub fn crossed_tiles(meta: &ReductionMeta, line: &Line) -> Result<Vec<usize>> {
    let l = line.pull_back(&meta.transform);
    Ok((1..=tile_count(meta)?).filter(|&j| crosses(&l, j)).collect())
}

/// Turns `l` about its point on `x = −1` (or on `y = −1` when vertical) to
/// the nearest orientation, in angle, that misses every tile interior. Such
/// orientations are bounded by lines through tile corners.
fn rotate_clear(l: &Line, tiles: usize) -> Line {
    let pivot = if l.b.is_zero() {
        Point::new(&l.c / &l.a, int(-1))
    } else {
        Point::new(int(-1), (&l.c + &l.a) / &l.b)
    };
    let dir = (to_f64(&l.b), -to_f64(&l.a));
    let mut cands: Vec<((f64, bool), Point)> = Vec::with_capacity(4 * tiles);
    for j in 1..=tiles {
        for q in tile_corners(j) {
            let (dx, dy) = q.sub(&pivot);
            if dx.is_zero() && dy.is_zero() {
                continue;
            }
            let (vx, vy) = (to_f64(&dx), to_f64(&dy));
            let cross = dir.0 * vy - dir.1 * vx;
            let dot = dir.0 * vx + dir.1 * vy;
            let mut ang = cross.atan2(dot);
            if ang > std::f64::consts::FRAC_PI_2 {
                ang -= std::f64::consts::PI;
            } else if ang <= -std::f64::consts::FRAC_PI_2 {
                ang += std::f64::consts::PI;
            }
            cands.push(((ang.abs(), ang < 0.0), q));
        }
    }
    // Stable sort keeps the corner order among ties.
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let best = cands.into_iter().find_map(|(_, q)| {
        let (dx, dy) = q.sub(&pivot);
        // Normal (dy, −dx), oriented to agree with the original normal.
        let (mut a, mut b) = (dy, -dx);
        if (&a * &l.a + &b * &l.b).is_negative() {
            a = -a;
            b = -b;
        }
        let c = &a * &pivot.x + &b * &pivot.y;
        let cand = Line { a, b, c };
        tile_free(&cand, tiles).then_some(cand)
    });
    // The vertical line x = −1 through the pivot side always qualifies.
    best.unwrap_or_else(|| Line { a: int(1), b: int(0), c: int(-1) })
}

#[derive(Debug, Clone)]
pub struct LinesMapBack {
    pub solution: ChSolution,
    /// Tile-free lines in instance coordinates, one per input line.
    pub lines: StraightCutSet,
    pub rotated: Vec<bool>,
}

/// Rotates every line crossing a tile until it crosses none, labels each
/// tile by the parity rule, and cuts at `j·d` wherever tiles `j` and `j+1`
/// disagree.
pub fn lines_to_ch_cuts_detailed(meta: &ReductionMeta, lines: &StraightCutSet) -> Result<LinesMapBack> {
    lines.validate()?;
    let tiles = tile_count(meta)?;
    let d = meta.d.clone().ok_or_else(|| Error::MapBack("meta lacks d".into()))?;
    let mut raw = Vec::with_capacity(lines.lines.len());
    let mut rotated = Vec::with_capacity(lines.lines.len());
    for l in &lines.lines {
        let r = l.pull_back(&meta.transform);
        if !tile_free(&r, tiles) {
            raw.push(rotate_clear(&r, tiles));
            rotated.push(true);
        } else {
            raw.push(r);
            rotated.push(false);
        }
    }
    let set = StraightCutSet { lines: raw };
    let labels: Vec<Label> = (1..=tiles)
        .map(|j| {
            let h = Rational::new(1.into(), 2.into());
            let centre = Point::new(int(j as i64) + &h, int((j * j) as i64) + h);
            if set.in_a(&centre) { Label::Plus } else { Label::Minus }
        })
        .collect();
    let pieces: Vec<(Rational, Rational, Label)> =
        labels.iter().enumerate().map(|(j, l)| (&d * int(j as i64), &d * int(j as i64 + 1), *l)).collect();
    let solution = ChSolution::from_pieces(&pieces);
    let lines = StraightCutSet { lines: set.lines.iter().map(|l| l.push_forward(&meta.transform)).collect() };
    Ok(LinesMapBack { solution, lines, rotated })
}

pub fn lines_to_ch_cuts(meta: &ReductionMeta, lines: &StraightCutSet) -> Result<ChSolution> {
    Ok(lines_to_ch_cuts_detailed(meta, lines)?.solution)
}

/// Vertical lines between tiles realizing a cut solution whose cuts lie on
/// the `d`-grid. Labels follow the parity rule.
pub fn ch_cuts_to_lines(meta: &ReductionMeta, sol: &ChSolution) -> Result<StraightCutSet> {
    let tiles = tile_count(meta)?;
    let d = meta.d.clone().ok_or_else(|| Error::MapBack("meta lacks d".into()))?;
    let pieces = sol.pieces(&int(1))?;
    for c in &sol.cuts {
        if !(c / &d).is_integer() {
            return Err(Error::MapBack(format!("cut {} is not on the d-grid", format_rational(c))));
        }
    }
    let h = Rational::new(1.into(), 2.into());
    let label_at = |x: &Rational| pieces.iter().find(|(lo, hi, _)| lo < x && x < hi).map(|p| p.2).unwrap_or(Label::Plus);
    let labels: Vec<Label> = (1..=tiles).map(|j| label_at(&(&d * (int(j as i64) - &h)))).collect();
    let mut raw = Vec::new();
    for j in 1..tiles {
        if labels[j] != labels[j - 1] {
            raw.push(Line::new(int(1), int(0), int(j as i64 + 1)));
        }
    }
    if labels.first() == Some(&Label::Minus) {
        match raw.first_mut() {
            Some(l) => *l = Line::new(-l.a.clone(), -l.b.clone(), -l.c.clone()),
            None => raw.push(Line::new(int(1), int(0), int(0))),
        }
    }
    Ok(StraightCutSet { lines: raw.iter().map(|l| l.push_forward(&meta.transform)).collect() })
}

/// Exact per-color side masses under the parity rule, by splitting every
/// triangle along each line in turn.
pub fn straight_masses(inst: &PizzaInstance, lines: &StraightCutSet) -> Result<Vec<SideMasses>> {
    lines.validate()?;
    let mut out = Vec::with_capacity(inst.n_colors());
    for m in &inst.masses {
        let (mut a, mut b) = (Rational::zero(), Rational::zero());
        for poly in &m.polygons {
            for t in triangulate(poly)? {
                let mut pieces: Vec<(Vec<Point>, bool)> = vec![(t.vertices().iter().map(|p| (*p).clone()).collect::<Vec<_>>(), false)];
                for l in &lines.lines {
                    let mut next = Vec::with_capacity(pieces.len() * 2);
                    for (poly, odd) in pieces {
                        let pos = clip_halfplane(&poly, &l.a, &l.b, &l.c, false);
                        let neg = clip_halfplane(&poly, &l.a, &l.b, &l.c, true);
                        if !area(&pos).is_zero() {
                            next.push((pos, !odd));
                        }
                        if !area(&neg).is_zero() {
                            next.push((neg, odd));
                        }
                    }
                    pieces = next;
                }
                for (poly, odd) in pieces {
                    let v = area(&poly) * &t.weight;
                    if odd {
                        b += v;
                    } else {
                        a += v;
                    }
                }
            }
        }
        out.push(SideMasses { a, b });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct StraightReport {
    pub masses: Vec<SideMasses>,
    pub within_budget: bool,
    pub pass: bool,
}

impl StraightReport {
    pub fn gaps(&self) -> Vec<Rational> {
        self.masses.iter().map(SideMasses::gap).collect()
    }
}

pub fn verify_straight(inst: &PizzaInstance, lines: &StraightCutSet, eps: &Rational, budget: Option<usize>) -> Result<StraightReport> {
    let masses = straight_masses(inst, lines)?;
    let within_budget = budget.is_none_or(|b| lines.lines.len() <= b);
    let pass = within_budget && masses.iter().all(|m| &m.gap().abs() <= eps);
    Ok(StraightReport { masses, within_budget, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{MassDistribution, WeightedPolygon};
    use crate::numeric::frac;
    use crate::reductions::ChValuation;

    fn unit() -> PizzaInstance {
        PizzaInstance::new(vec![MassDistribution { color: 0, polygons: vec![WeightedPolygon::rect(int(1), int(0), int(0), int(1), int(1))] }]).unwrap()
    }

    fn horizontal(y: Rational) -> Line {
        Line::new(int(0), int(1), y)
    }

    #[test]
    fn parity_examples() {
        let one = StraightCutSet { lines: vec![horizontal(frac(1, 2))] };
        assert_eq!(verify_straight(&unit(), &one, &int(0), Some(1)).unwrap().gaps(), vec![int(0)]);
        let two = StraightCutSet { lines: vec![horizontal(frac(1, 4)), horizontal(frac(3, 4))] };
        let r = verify_straight(&unit(), &two, &int(0), None).unwrap();
        assert_eq!(r.masses[0].a, frac(1, 2));
        assert!(r.pass);
        let miss = StraightCutSet { lines: vec![horizontal(int(2))] };
        assert_eq!(verify_straight(&unit(), &miss, &int(0), None).unwrap().gaps(), vec![int(1)]);
        let bad = StraightCutSet { lines: vec![Line::new(int(0), int(0), int(1))] };
        assert!(matches!(verify_straight(&unit(), &bad, &int(0), None), Err(Error::DegenerateLine)));
        assert!(!verify_straight(&unit(), &two, &int(0), Some(1)).unwrap().pass);
    }

    fn sample() -> (ChInstance, PizzaInstance, ReductionMeta) {
        let ch = ChInstance {
            agents: vec![
                ChValuation::uniform(&[(int(0), frac(1, 2)), (frac(3, 4), int(1))]),
                ChValuation::uniform(&[(frac(1, 4), int(1))]),
                ChValuation::uniform(&[(int(0), int(1))]),
                ChValuation::uniform(&[(int(0), frac(1, 4)), (frac(1, 2), int(1))]),
            ],
        };
        let p = StraightParams { d: Some(frac(1, 40)), ..StraightParams::new(frac(1, 5)) };
        let (inst, meta) = reduce_straight(&ch, &p).unwrap();
        (ch, inst, meta)
    }

    #[test]
    fn construction() {
        let (ch, inst, meta) = sample();
        assert_eq!(meta.tiles, Some(40));
        assert_eq!(meta.line_budget, Some(5));
        for (i, m) in inst.masses.iter().enumerate() {
            assert_eq!(m.total(), ch.agents[i].total());
        }
        // Agent 1 of 4 first values block [10/40, 11/40], tile 11.
        let first = &inst.masses[1].polygons[0];
        let lowest = first.outer.iter().map(|p| meta.transform.invert(p)).min_by(|p, q| (&p.x, &p.y).cmp(&(&q.x, &q.y))).unwrap();
        assert_eq!(lowest, Point::new(int(11) + frac(1, 4), int(121) + frac(1, 4)));
        assert!(reduce_straight(&ch, &StraightParams { d: Some(frac(1, 20)), ..StraightParams::new(frac(1, 5)) }).is_err());
        assert!(reduce_straight(&ch, &StraightParams { d: Some(frac(1, 40)), ..StraightParams::new(frac(1, 3)) }).is_err());
    }

    #[test]
    fn lines_to_cuts_examples() {
        let (_, _, meta) = sample();
        let below = StraightCutSet { lines: vec![horizontal(frac(-1, 2))] };
        let sol = lines_to_ch_cuts(&meta, &below).unwrap();
        assert!(sol.cuts.is_empty());
        let between = ch_cuts_to_lines(&meta, &ChSolution { cuts: vec![frac(1, 40)], first_label: Label::Plus }).unwrap();
        let sol = lines_to_ch_cuts(&meta, &between).unwrap();
        assert_eq!(sol, ChSolution { cuts: vec![frac(1, 40)], first_label: Label::Plus });
        let minus = ch_cuts_to_lines(&meta, &ChSolution { cuts: vec![], first_label: Label::Minus }).unwrap();
        assert_eq!(lines_to_ch_cuts(&meta, &minus).unwrap(), ChSolution { cuts: vec![], first_label: Label::Minus });
    }

    #[test]
    fn rotation_clears_tiles() {
        let (_, _, meta) = sample();
        let t = &meta.transform;
        let through = Line::new(int(1), int(0), frac(7, 2)).push_forward(t);
        assert_eq!(crossed_tiles(&meta, &through).unwrap(), vec![3]);
        let out = lines_to_ch_cuts_detailed(&meta, &StraightCutSet { lines: vec![through] }).unwrap();
        assert_eq!(out.rotated, vec![true]);
        assert!(crossed_tiles(&meta, &out.lines.lines[0]).unwrap().is_empty());
    }
}
