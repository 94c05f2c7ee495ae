//! Consensus halving instances, their reductions to pizza sharing, and the
//! maps taking pizza solutions back to cuts.

mod checkerboard;
mod overlapping;
mod straight;

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{MassDistribution, PizzaInstance, Transform, WeightedPolygon};
use crate::numeric::serde_rational::{decode, Num};
use crate::numeric::{format_rational, frac, int, Rational};

pub use checkerboard::{reduce_checkerboard, CheckerboardParams};
pub use overlapping::{path_to_ch_cuts, reduce_exact, reduce_overlapping, side_a_fraction, verify_scpath, ScPathReport};
pub use straight::{
    ch_cuts_to_lines, crossed_tiles, lines_to_ch_cuts, lines_to_ch_cuts_detailed, reduce_straight, straight_masses, tile_corners,
    verify_straight, Line, LinesMapBack, StraightCutSet, StraightParams, StraightReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValuationKind {
    #[serde(rename = "kBlock")]
    KBlock,
    #[serde(rename = "twoBlockUniform")]
    TwoBlockUniform,
    #[serde(rename = "blockPlusTriangle")]
    BlockPlusTriangle,
}

/// Interval `[a, b]` carrying uniform `density`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub a: Rational,
    pub b: Rational,
    pub density: Rational,
}

impl Block {
    pub fn new(a: Rational, b: Rational, density: Rational) -> Self {
        Block { a, b, density }
    }

    pub fn value(&self) -> Rational {
        (&self.b - &self.a) * &self.density
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.a), format_rational(&self.b), format_rational(&self.density)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[Num; 3]>::deserialize(d)?;
        Ok(Block { a: decode(a).map_err(D::Error::custom)?, b: decode(b).map_err(D::Error::custom)?, density: decode(c).map_err(D::Error::custom)? })
    }
}

/// Interval `[a, b]` with cumulative value `(x − a)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleBlock {
    pub a: Rational,
    pub b: Rational,
}

impl Serialize for TriangleBlock {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.a), format_rational(&self.b)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for TriangleBlock {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[Num; 2]>::deserialize(d)?;
        Ok(TriangleBlock { a: decode(a).map_err(D::Error::custom)?, b: decode(b).map_err(D::Error::custom)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChValuation {
    pub kind: ValuationKind,
    #[serde(default)]
    pub blocks: Vec<Block>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle: Option<TriangleBlock>,
}

fn clamp(x: &Rational, lo: &Rational, hi: &Rational) -> Rational {
    if x < lo {
        lo.clone()
    } else if x > hi {
        hi.clone()
    } else {
        x.clone()
    }
}

impl ChValuation {
    pub fn blocks(blocks: Vec<Block>) -> Self {
        ChValuation { kind: ValuationKind::KBlock, blocks, triangle: None }
    }

    /// Two (or one) blocks of equal density `1/(total length)`.
    pub fn uniform(intervals: &[(Rational, Rational)]) -> Self {
        let len = intervals.iter().fold(Rational::zero(), |s, (a, b)| s + (b - a));
        let c = Rational::one() / len;
        ChValuation {
            kind: ValuationKind::TwoBlockUniform,
            blocks: intervals.iter().map(|(a, b)| Block::new(a.clone(), b.clone(), c.clone())).collect(),
            triangle: None,
        }
    }

    /// `v([0, x])`.
    pub fn cumulative(&self, x: &Rational) -> Rational {
        let mut v = Rational::zero();
        for b in &self.blocks {
            v += (clamp(x, &b.a, &b.b) - &b.a) * &b.density;
        }
        if let Some(t) = &self.triangle {
            let u = clamp(x, &t.a, &t.b) - &t.a;
            v += &u * &u;
        }
        v
    }

    pub fn value(&self, lo: &Rational, hi: &Rational) -> Rational {
        self.cumulative(hi) - self.cumulative(lo)
    }

    pub fn total(&self) -> Rational {
        let mut v = self.blocks.iter().map(Block::value).fold(Rational::zero(), |s, x| s + x);
        if let Some(t) = &self.triangle {
            v += (&t.b - &t.a) * (&t.b - &t.a);
        }
        v
    }

    /// Uniform density of the agent, when every block shares one.
    pub fn uniform_density(&self) -> Option<Rational> {
        let first = self.blocks.first()?.density.clone();
        self.blocks.iter().all(|b| b.density == first).then_some(first)
    }

    /// Density on `[lo, hi]` if it lies within a single block.
    pub fn density_on(&self, lo: &Rational, hi: &Rational) -> Rational {
        self.blocks.iter().find(|b| &b.a <= lo && hi <= &b.b).map(|b| b.density.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn validate(&self, agent: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::ChInstance(format!("agent {agent}: {msg}")));
        let mut sorted: Vec<&Block> = self.blocks.iter().collect();
        sorted.sort_by(|x, y| x.a.cmp(&y.a));
        for b in &sorted {
            if b.a >= b.b {
                return bad(format!("empty block [{}, {}]", format_rational(&b.a), format_rational(&b.b)));
            }
            if !b.density.is_positive() {
                return bad("block density must be positive".into());
            }
            if b.a.is_negative() {
                return bad("block starts below 0".into());
            }
        }
        for w in sorted.windows(2) {
            if w[0].b > w[1].a {
                return bad("blocks overlap".into());
            }
        }
        match self.kind {
            ValuationKind::KBlock | ValuationKind::TwoBlockUniform => {
                if self.triangle.is_some() {
                    return bad("only block-plus-triangle valuations carry a triangle".into());
                }
                if self.blocks.iter().any(|b| b.b > int(1)) {
                    return bad("block leaves [0, 1]".into());
                }
                if self.total() != int(1) {
                    return bad(format!("total value {} is not 1", format_rational(&self.total())));
                }
            }
            ValuationKind::BlockPlusTriangle => {
                let Some(t) = &self.triangle else { return bad("missing triangle".into()) };
                if &t.b - &t.a != int(1) || t.a.is_negative() {
                    return bad("triangle must have width 1 inside the domain".into());
                }
                if self.blocks.iter().any(|b| b.a < t.b && t.a < b.b) {
                    return bad("triangle overlaps a block".into());
                }
            }
        }
        if self.kind == ValuationKind::TwoBlockUniform {
            if self.blocks.len() > 2 {
                return bad("two-block uniform valuation with more than two blocks".into());
            }
            if self.uniform_density().is_none() {
                return bad("two-block uniform valuation with unequal densities".into());
            }
        }
        if self.blocks.is_empty() && self.triangle.is_none() {
            return bad("no value anywhere".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChInstance {
    pub agents: Vec<ChValuation>,
}

impl ChInstance {
    pub fn parse(text: &str) -> Result<Self> {
        let ch: ChInstance = serde_json::from_str(text)?;
        ch.validate()?;
        Ok(ch)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(Error::ChInstance("no agents".into()));
        }
        for (i, a) in self.agents.iter().enumerate() {
            a.validate(i)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    /// Right end of the interval being cut: 1, or further when width-1
    /// triangles reach past it.
    pub fn domain_end(&self) -> Rational {
        points_of_interest(self).into_iter().fold(int(1), |m, x| if x > m { x } else { m })
    }
}

/// Sorted, deduplicated block and triangle endpoints.
pub fn points_of_interest(ch: &ChInstance) -> Vec<Rational> {
    let mut pts: Vec<Rational> = ch
        .agents
        .iter()
        .flat_map(|a| {
            a.blocks.iter().flat_map(|b| [b.a.clone(), b.b.clone()]).chain(a.triangle.iter().flat_map(|t| [t.a.clone(), t.b.clone()]))
        })
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Plus,
    Minus,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Label::Plus => "+",
            Label::Minus => "-",
        })
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "+" => Ok(Label::Plus),
            "-" | "−" => Ok(Label::Minus),
            other => Err(D::Error::custom(format!("label must be \"+\" or \"-\", got {other:?}"))),
        }
    }
}

/// Cuts with alternating labels, starting with `first_label` at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChSolution {
    #[serde(with = "crate::numeric::serde_rational::vec")]
    pub cuts: Vec<Rational>,
    pub first_label: Label,
}

impl ChSolution {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// Builds the solution from labelled pieces covering `[start, end]`,
    /// dropping empty pieces and merging neighbours with equal labels.
    pub fn from_pieces(pieces: &[(Rational, Rational, Label)]) -> Self {
        let mut merged: Vec<(Rational, Rational, Label)> = Vec::new();
        for (lo, hi, l) in pieces {
            if hi <= lo {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.2 == *l => last.1 = hi.clone(),
                _ => merged.push((lo.clone(), hi.clone(), *l)),
            }
        }
        let first_label = merged.first().map(|p| p.2).unwrap_or(Label::Plus);
        ChSolution { cuts: merged.iter().skip(1).map(|p| p.0.clone()).collect(), first_label }
    }

    /// `(lo, hi, label)` pieces of `[0, end]`.
    pub fn pieces(&self, end: &Rational) -> Result<Vec<(Rational, Rational, Label)>> {
        let mut out = Vec::with_capacity(self.cuts.len() + 1);
        let mut lo = Rational::zero();
        let mut label = self.first_label;
        for c in &self.cuts {
            if c.is_negative() || c > end {
                return Err(Error::CutOutside(format_rational(c)));
            }
            if *c < lo {
                return Err(Error::ChInstance("cuts must be sorted".into()));
            }
            out.push((lo, c.clone(), label));
            lo = c.clone();
            label = label.other();
        }
        out.push((lo, end.clone(), label));
        Ok(out)
    }

    /// Labels alternate by construction; this checks the cut list itself.
    pub fn is_valid(&self, end: &Rational) -> bool {
        self.pieces(end).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChReport {
    pub plus: Vec<Rational>,
    pub minus: Vec<Rational>,
    pub pass: bool,
}

impl ChReport {
    pub fn gaps(&self) -> Vec<Rational> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p - m).collect()
    }

    pub fn max_gap(&self) -> Rational {
        self.gaps().into_iter().map(|g| g.abs()).max().unwrap_or_else(Rational::zero)
    }
}

/// Exact `v_i(I⁺)` and `v_i(I⁻)` per agent.
pub fn verify_ch(ch: &ChInstance, sol: &ChSolution, eps: &Rational) -> Result<ChReport> {
    let pieces = sol.pieces(&ch.domain_end())?;
    let mut plus = Vec::with_capacity(ch.n());
    let mut minus = Vec::with_capacity(ch.n());
    for a in &ch.agents {
        let (mut p, mut m) = (Rational::zero(), Rational::zero());
        for (lo, hi, l) in &pieces {
            let v = a.value(lo, hi);
            match l {
                Label::Plus => p += v,
                Label::Minus => m += v,
            }
        }
        plus.push(p);
        minus.push(m);
    }
    let pass = plus.iter().zip(&minus).all(|(p, m)| &(p - m).abs() <= eps);
    Ok(ChReport { plus, minus, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionKind {
    Overlapping,
    Checkerboard,
    Straight,
    Exact,
}

impl std::str::FromStr for ReductionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlapping" => Ok(ReductionKind::Overlapping),
            "checkerboard" => Ok(ReductionKind::Checkerboard),
            "straight" => Ok(ReductionKind::Straight),
            "exact" => Ok(ReductionKind::Exact),
            other => Err(Error::Config(format!("unknown reduction {other:?}"))),
        }
    }
}

/// Square region of the generated instance standing for the interval of
/// interest `[lo, hi]`, in instance coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub interval: usize,
    #[serde(with = "crate::numeric::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub hi: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub x0: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub y0: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub side: Rational,
    /// Tiles per block side (checkerboard only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiles: Option<u32>,
    /// Holds a triangle gadget (exact reduction only).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub gadget: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionMeta {
    pub kind: ReductionKind,
    pub agents: usize,
    #[serde(with = "crate::numeric::serde_rational::vec")]
    pub points_of_interest: Vec<Rational>,
    #[serde(default)]
    pub cells: Vec<Cell>,
    /// Construction coordinates to instance coordinates. Weights were
    /// multiplied by `1/scale²` so masses are unchanged.
    pub transform: Transform,
    #[serde(default, with = "crate::numeric::serde_rational::opt", skip_serializing_if = "Option::is_none")]
    pub eps_out: Option<Rational>,
    /// Weight of a triangle gadget in construction coordinates.
    #[serde(default, with = "crate::numeric::serde_rational::opt", skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Rational>,
    /// Square sides were snapped to dyadic rationals.
    #[serde(default)]
    pub approximate: bool,
    #[serde(default, with = "crate::numeric::serde_rational::opt", skip_serializing_if = "Option::is_none")]
    pub d: Option<Rational>,
    #[serde(default, with = "crate::numeric::serde_rational::opt", skip_serializing_if = "Option::is_none")]
    pub delta: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_budget: Option<usize>,
    /// Number of parabola tiles; tile `j` has its lower-left corner at `(j, j²)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiles: Option<usize>,
}

impl ReductionMeta {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    fn base(kind: ReductionKind, ch: &ChInstance, transform: Transform) -> Self {
        ReductionMeta {
            kind,
            agents: ch.n(),
            points_of_interest: points_of_interest(ch),
            cells: Vec::new(),
            transform,
            eps_out: None,
            calibration: None,
            approximate: false,
            d: None,
            delta: None,
            line_budget: None,
            tiles: None,
        }
    }
}

/// Maps construction-coordinate polygons through `t`, scaling weights by
/// `1/scale²` so every mass is preserved.
pub(crate) fn place(n: usize, raw: Vec<(usize, WeightedPolygon)>, t: &Transform) -> Result<PizzaInstance> {
    let w = Rational::one() / (&t.scale * &t.scale);
    let mut masses: Vec<MassDistribution> = (0..n).map(|color| MassDistribution { color, polygons: Vec::new() }).collect();
    for (color, poly) in raw {
        masses[color].polygons.push(WeightedPolygon {
            weight: &poly.weight * &w,
            outer: poly.outer.iter().map(|p| t.apply(p)).collect(),
            holes: poly.holes.iter().map(|h| h.iter().map(|p| t.apply(p)).collect()).collect(),
        });
    }
    PizzaInstance::new(masses)
}

/// Random 2-block valuation on a grid of step `1/grid`; `uniform` gives both
/// blocks the same density.
pub fn random_two_block<R: Rng>(rng: &mut R, grid: i64, uniform: bool) -> ChValuation {
    loop {
        let mut cuts: Vec<i64> = (0..4).map(|_| rng.gen_range(0..=grid)).collect();
        cuts.sort();
        cuts.dedup();
        if cuts.len() < 2 {
            continue;
        }
        let blocks: Vec<(i64, i64)> = if cuts.len() >= 4 {
            vec![(cuts[0], cuts[1]), (cuts[2], cuts[3])]
        } else {
            vec![(cuts[0], cuts[cuts.len() - 1])]
        };
        let iv: Vec<(Rational, Rational)> = blocks.iter().map(|&(a, b)| (frac(a, grid), frac(b, grid))).collect();
        if uniform {
            return ChValuation::uniform(&iv);
        }
        let raw: Vec<Rational> = iv.iter().map(|_| int(rng.gen_range(1..=4))).collect();
        let total = iv.iter().zip(&raw).fold(Rational::zero(), |s, ((a, b), r)| s + (b - a) * r);
        return ChValuation::blocks(iv.iter().zip(&raw).map(|((a, b), r)| Block::new(a.clone(), b.clone(), r / &total)).collect());
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, n: usize, grid: i64, uniform: bool) -> ChInstance {
    ChInstance { agents: (0..n).map(|_| random_two_block(rng, grid, uniform)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform01() -> ChInstance {
        ChInstance { agents: vec![ChValuation::uniform(&[(int(0), int(1))])] }
    }

    #[test]
    fn points_of_interest_examples() {
        assert_eq!(points_of_interest(&uniform01()), vec![int(0), int(1)]);
        let two = ChInstance { agents: vec![ChValuation::uniform(&[(frac(1, 5), frac(1, 2)), (frac(7, 10), frac(9, 10))])] };
        assert_eq!(points_of_interest(&two), vec![frac(1, 5), frac(1, 2), frac(7, 10), frac(9, 10)]);
        let shared = ChInstance {
            agents: vec![ChValuation::uniform(&[(int(0), frac(1, 2))]), ChValuation::uniform(&[(frac(1, 2), int(1))])],
        };
        assert_eq!(points_of_interest(&shared), vec![int(0), frac(1, 2), int(1)]);
    }

    #[test]
    fn verify_ch_examples() {
        let ch = uniform01();
        let at = |c: Rational| ChSolution { cuts: vec![c], first_label: Label::Plus };
        let r = verify_ch(&ch, &at(frac(1, 2)), &int(0)).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_gap(), int(0));
        assert_eq!(verify_ch(&ch, &at(frac(3, 5)), &int(0)).unwrap().max_gap(), frac(1, 5));
        let tri = ChInstance {
            agents: vec![ChValuation { kind: ValuationKind::BlockPlusTriangle, blocks: vec![], triangle: Some(TriangleBlock { a: int(1), b: int(2) }) }],
        };
        tri.validate().unwrap();
        let r = verify_ch(&tri, &at(frac(17, 10)), &int(1)).unwrap();
        assert_eq!(r.plus[0], frac(49, 100));
        assert_eq!(r.max_gap(), frac(2, 100));
        assert!(matches!(verify_ch(&ch, &at(int(2)), &int(1)), Err(Error::CutOutside(_))));
    }

    #[test]
    fn parse_and_validate() {
        let text = r#"{"agents":[{"kind":"twoBlockUniform","blocks":[["0","1/4","2"],["0.5","3/4","2"]]}]}"#;
        let ch = ChInstance::parse(text).unwrap();
        assert_eq!(ch.agents[0].total(), int(1));
        assert_eq!(ChInstance::parse(&ch.to_json()).unwrap(), ch);
        let bad = r#"{"agents":[{"kind":"kBlock","blocks":[["0","1/2","1"]]}]}"#;
        assert!(matches!(ChInstance::parse(bad), Err(Error::ChInstance(_))));
        let overlap = r#"{"agents":[{"kind":"kBlock","blocks":[["0","1/2","1"],["1/4","3/4","1"]]}]}"#;
        assert!(ChInstance::parse(overlap).is_err());
        let sol = ChSolution::parse(r#"{"cuts":["1/2"],"first_label":"-"}"#).unwrap();
        assert_eq!(sol.first_label, Label::Minus);
        assert_eq!(ChSolution::parse(&sol.to_json()).unwrap(), sol);
    }

    #[test]
    fn pieces_merge() {
        let s = ChSolution::from_pieces(&[
            (int(0), frac(1, 4), Label::Plus),
            (frac(1, 4), frac(1, 4), Label::Minus),
            (frac(1, 4), frac(1, 2), Label::Plus),
            (frac(1, 2), int(1), Label::Minus),
        ]);
        assert_eq!(s, ChSolution { cuts: vec![frac(1, 2)], first_label: Label::Plus });
    }

    #[test]
    fn random_instances_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            random_instance(&mut rng, 3, 20, false).validate().unwrap();
            random_instance(&mut rng, 3, 20, true).validate().unwrap();
        }
    }
}
