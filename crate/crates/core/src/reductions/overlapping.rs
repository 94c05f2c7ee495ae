//! Diagonal unit squares, one per interval of interest, and the map from a
//! square-cut path back to labelled cuts.

use num_traits::{Signed, Zero};

use super::{place, Cell, ChInstance, ChSolution, Label, ReductionKind, ReductionMeta, ValuationKind};
use crate::error::{Error, Result};
use crate::geometry::{PizzaInstance, Point, Transform, WeightedPolygon};
use crate::measure::{region_mass_oracle, SideMasses};
use crate::numeric::{format_rational, int, Rational};
use crate::sc_path::{point_side, solution_to_path, FeasibleSolution, Segment, Side};

fn diagonal(ch: &ChInstance, kind: ReductionKind) -> Result<(PizzaInstance, ReductionMeta)> {
    ch.validate()?;
    let pts = super::points_of_interest(ch);
    let m = pts.len();
    if m < 2 {
        return Err(Error::Reduction("need at least two points of interest".into()));
    }
    let squares = (m - 1) as i64;
    let calibration = int(2);
    let mut raw = Vec::new();
    let mut gadget = vec![false; m - 1];
    for (i, agent) in ch.agents.iter().enumerate() {
        if agent.kind == ValuationKind::BlockPlusTriangle && kind != ReductionKind::Exact {
            return Err(Error::Reduction(format!("agent {i} has a triangle; use the exact reduction")));
        }
        for j in 0..m - 1 {
            let (lo, hi) = (&pts[j], &pts[j + 1]);
            let c = agent.density_on(lo, hi);
            if c.is_positive() {
                let at = int(j as i64 + 1);
                let top = int(j as i64 + 2);
                raw.push((i, WeightedPolygon::rect(c * (hi - lo), at.clone(), at.clone(), top.clone(), top)));
            }
        }
        if let Some(t) = &agent.triangle {
            let j = pts.iter().position(|p| p == &t.a).expect("endpoint is a point of interest");
            if pts[j + 1] != t.b {
                return Err(Error::Reduction(format!(
                    "triangle of agent {i} on [{}, {}] spans two intervals of interest",
                    format_rational(&t.a),
                    format_rational(&t.b)
                )));
            }
            let a = j as i64 + 1;
            gadget[j] = true;
            raw.push((
                i,
                WeightedPolygon::new(calibration.clone(), vec![Point::from_ints(a, a + 1), Point::from_ints(a + 1, a), Point::from_ints(a + 1, a + 1)], vec![]),
            ));
        }
    }
    let transform = Transform { shift_x: int(-1), shift_y: int(-1), scale: Rational::new(1.into(), squares.into()) };
    let inst = place(ch.n(), raw, &transform)?;
    let mut meta = ReductionMeta::base(kind, ch, transform.clone());
    meta.cells = (0..m - 1)
        .map(|j| Cell {
            interval: j,
            lo: pts[j].clone(),
            hi: pts[j + 1].clone(),
            x0: Rational::new((j as i64).into(), squares.into()),
            y0: Rational::new((j as i64).into(), squares.into()),
            side: transform.scale.clone(),
            tiles: None,
            gadget: gadget[j],
        })
        .collect();
    if kind == ReductionKind::Exact {
        meta.calibration = Some(calibration);
    }
    Ok((inst, meta))
}

/// One unit square per interval of interest on the diagonal; agent `i`
/// has density `c_ij·(x_{j+1} − x_j)` on square `j`.
pub fn reduce_overlapping(ch: &ChInstance) -> Result<(PizzaInstance, ReductionMeta)> {
    diagonal(ch, ReductionKind::Overlapping)
}

/// The overlapping construction plus a right-triangle gadget with vertices
/// `(j, j+1), (j+1, j), (j+1, j+1)` for every width-1 triangle valuation.
/// The gadget weight 2 makes its mass equal the triangle's value 1.
pub fn reduce_exact(ch: &ChInstance) -> Result<(PizzaInstance, ReductionMeta)> {
    diagonal(ch, ReductionKind::Exact)
}

fn overlap(a0: &Rational, a1: &Rational, b0: &Rational, b1: &Rational) -> Rational {
    let lo = if a0 > b0 { a0 } else { b0 };
    let hi = if a1 < b1 { a1 } else { b1 };
    if hi > lo { hi - lo } else { Rational::zero() }
}

/// Fraction of the square `[x0, x0+side] × [y0, y0+side]` on side A.
pub fn side_a_fraction(sol: &FeasibleSolution, x0: &Rational, y0: &Rational, side: &Rational) -> Rational {
    let (x1, y1) = (x0 + side, y0 + side);
    let (zero, one) = (Rational::zero(), int(1));
    let mut area = Rational::zero();
    for s in sol.strips() {
        let h = overlap(&s.lo, &s.hi, y0, &y1);
        if h.is_zero() {
            continue;
        }
        let (l, r) = match (&s.cut, s.positive) {
            (None, true) => (&zero, &one),
            (None, false) => continue,
            (Some(c), true) => (&zero, c),
            (Some(c), false) => (c, &one),
        };
        area += h * overlap(l, r, x0, &x1);
    }
    area / (side * side)
}

fn label(side: Side) -> Label {
    match side {
        Side::A => Label::Plus,
        Side::B => Label::Minus,
    }
}

/// Labelled cuts from a path on an overlapping, exact or checkerboard
/// instance. Within every cell the `+` share of the interval equals the
/// cell's side-A share. The interval starts with the label of the cell's
/// lower-left corner and ends with that of its upper-right corner; when
/// both agree and the cell is split, the opposite label goes first.
/// Corners lying on the path take the cheaper label.
pub fn path_to_ch_cuts(meta: &ReductionMeta, sol: &FeasibleSolution) -> Result<ChSolution> {
    if meta.kind == ReductionKind::Straight {
        return Err(Error::MapBack("straight-cut instances map back through lines".into()));
    }
    if meta.cells.is_empty() {
        return Err(Error::MapBack("meta has no cells".into()));
    }
    let end = meta.points_of_interest.iter().fold(int(1), |m, x| if x > &m { x.clone() } else { m });
    let mut pieces: Vec<(Rational, Rational, Label)> = Vec::new();
    let mut state: Option<Label> = None;
    let one = int(1);
    for cell in &meta.cells {
        let p = side_a_fraction(sol, &cell.x0, &cell.y0, &cell.side);
        let len = &cell.hi - &cell.lo;
        let fixed = if p.is_zero() {
            Some(Label::Minus)
        } else if p == one {
            Some(Label::Plus)
        } else {
            None
        };
        let lower = point_side(sol, &cell.x0, &cell.y0).map(label).or(state).unwrap_or(fixed.unwrap_or(Label::Plus));
        if let Some(l) = fixed {
            pieces.push((cell.lo.clone(), cell.hi.clone(), l));
            state = Some(l);
            continue;
        }
        let upper = point_side(sol, &(&cell.x0 + &cell.side), &(&cell.y0 + &cell.side)).map(label).unwrap_or(lower.other());
        let share = |l: Label| if l == Label::Plus { p.clone() } else { &one - &p };
        let first = if lower == upper { lower.other() } else { lower };
        let mid = &cell.lo + share(first) * &len;
        pieces.push((cell.lo.clone(), mid.clone(), first));
        pieces.push((mid, cell.hi.clone(), first.other()));
        state = Some(first.other());
    }
    if let Some(first) = pieces.first_mut() {
        first.0 = Rational::zero();
    }
    if let Some(last) = pieces.last_mut() {
        last.1 = end;
    }
    Ok(ChSolution::from_pieces(&pieces))
}

#[derive(Debug, Clone)]
pub struct ScPathReport {
    pub masses: Vec<SideMasses>,
    pub turns: usize,
    pub within_budget: bool,
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl ScPathReport {
    pub fn gaps(&self) -> Vec<Rational> {
        self.masses.iter().map(SideMasses::gap).collect()
    }
}

fn turn_points(sol: &FeasibleSolution) -> Result<Vec<(Rational, Rational)>> {
    let path = solution_to_path(sol)?;
    Ok(path
        .segments
        .windows(2)
        .filter(|w| w[0].is_horizontal() != w[1].is_horizontal())
        .map(|w| match &w[0] {
            Segment::Vertical { x, to, .. } => (x.clone(), to.clone()),
            Segment::Horizontal { y, to, .. } => (to.clone(), y.clone()),
        })
        .collect())
}

/// Exact per-color check through the clipping oracle. For exact-reduction
/// instances, turns strictly inside a cell are reported as warnings.
pub fn verify_scpath(
    inst: &PizzaInstance,
    sol: &FeasibleSolution,
    eps: &Rational,
    budget: Option<usize>,
    meta: Option<&ReductionMeta>,
) -> Result<ScPathReport> {
    let masses = region_mass_oracle(inst, sol)?;
    let turns = solution_to_path(sol)?.turns();
    let within_budget = budget.is_none_or(|b| turns <= b);
    let pass = within_budget && masses.iter().all(|m| &m.gap().abs() <= eps);
    let mut warnings = Vec::new();
    if let Some(meta) = meta.filter(|m| m.kind == ReductionKind::Exact) {
        for (x, y) in turn_points(sol)? {
            for c in &meta.cells {
                let inside = |v: &Rational, lo: &Rational| v > lo && *v < lo + &c.side;
                if inside(&x, &c.x0) && inside(&y, &c.y0) {
                    warnings.push(format!(
                        "turn at ({}, {}) lies inside the square of interval {}",
                        format_rational(&x),
                        format_rational(&y),
                        c.interval
                    ));
                }
            }
        }
    }
    Ok(ScPathReport { masses, turns, within_budget, pass, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::frac;
    use crate::reductions::{verify_ch, Block, ChValuation, TriangleBlock};
    use crate::sc_path::sphere_to_solution;

    fn horizontal(y: Rational, below_a: bool) -> FeasibleSolution {
        FeasibleSolution { thick: vec![y.clone(), int(1) - y], positive: vec![below_a, !below_a], x: vec![], x_positive: vec![] }
    }

    #[test]
    fn single_agent_square() {
        let ch = ChInstance { agents: vec![ChValuation::uniform(&[(int(0), int(1))])] };
        let (inst, meta) = reduce_overlapping(&ch).unwrap();
        assert_eq!(inst.masses[0].polygons.len(), 1);
        assert_eq!(inst.totals(), vec![int(1)]);
        assert_eq!(meta.transform.apply(&Point::from_ints(1, 1)), Point::from_ints(0, 0));
        assert_eq!(meta.transform.apply(&Point::from_ints(2, 2)), Point::from_ints(1, 1));
    }

    #[test]
    fn density_formula() {
        let ch = ChInstance {
            agents: vec![ChValuation::blocks(vec![Block::new(int(0), frac(1, 2), int(2))]), ChValuation::uniform(&[(int(0), int(1))])],
        };
        let (inst, _) = reduce_overlapping(&ch).unwrap();
        // Agent 0 on square s_1: density 2 · 1/2 = 1 per unit of construction area.
        assert_eq!(inst.masses[0].total(), int(1));
        assert_eq!(inst.masses[1].polygons.len(), 2);
    }

    #[test]
    fn case_one_and_three() {
        let ch = ChInstance { agents: vec![ChValuation::uniform(&[(int(0), int(1))])] };
        let (_, meta) = reduce_overlapping(&ch).unwrap();
        let sol = horizontal(frac(3, 10), true);
        let cuts = path_to_ch_cuts(&meta, &sol).unwrap();
        assert_eq!(cuts, ChSolution { cuts: vec![frac(3, 10)], first_label: Label::Plus });
        let both_a = FeasibleSolution {
            thick: vec![frac(1, 5), frac(3, 5), frac(1, 5)],
            positive: vec![true, false, true],
            x: vec![frac(1, 2)],
            x_positive: vec![true],
        };
        // Bottom band, right half of the negative middle band, top band.
        assert_eq!(side_a_fraction(&both_a, &int(0), &int(0), &int(1)), frac(7, 10));
        // Both corners on side A: the minus share comes first.
        let cuts = path_to_ch_cuts(&meta, &both_a).unwrap();
        assert_eq!(cuts, ChSolution { cuts: vec![frac(3, 10)], first_label: Label::Minus });
        let r = verify_ch(&ch, &cuts, &int(0)).unwrap();
        assert_eq!(r.plus[0], frac(7, 10));
    }

    #[test]
    fn untouched_square_has_no_cut() {
        let ch = ChInstance { agents: vec![ChValuation::uniform(&[(int(0), frac(1, 2))]), ChValuation::uniform(&[(frac(1, 2), int(1))])] };
        let (_, meta) = reduce_overlapping(&ch).unwrap();
        let sol = horizontal(frac(1, 4), true);
        let cuts = path_to_ch_cuts(&meta, &sol).unwrap();
        assert_eq!(cuts.cuts, vec![frac(1, 4)]);
    }

    #[test]
    fn exact_gadget() {
        let ch = ChInstance {
            agents: vec![
                ChValuation { kind: ValuationKind::BlockPlusTriangle, blocks: vec![], triangle: Some(TriangleBlock { a: int(0), b: int(1) }) },
                ChValuation::uniform(&[(int(0), int(1))]),
            ],
        };
        let (inst, meta) = reduce_exact(&ch).unwrap();
        assert_eq!(inst.totals(), vec![int(1), int(1)]);
        assert_eq!(meta.calibration, Some(int(2)));
        assert!(meta.cells[0].gadget);
        // A vertical cut at x = 7/10 with side A on the left.
        let p = [int(0), frac(13, 10), frac(7, 10)];
        let sol = sphere_to_solution(&p).unwrap();
        let rep = verify_scpath(&inst, &sol, &int(1), Some(1), Some(&meta)).unwrap();
        let cuts = path_to_ch_cuts(&meta, &sol).unwrap();
        let ch_rep = verify_ch(&ch, &cuts, &int(1)).unwrap();
        for (m, v) in rep.masses.iter().zip(&ch_rep.plus) {
            assert_eq!(&m.a, v);
        }
        assert_eq!(ch_rep.plus[0], frac(49, 100));
        let wide = ChInstance {
            agents: vec![
                ChValuation { kind: ValuationKind::BlockPlusTriangle, blocks: vec![], triangle: Some(TriangleBlock { a: int(0), b: int(1) }) },
                ChValuation::uniform(&[(int(0), frac(1, 2))]),
            ],
        };
        assert!(matches!(reduce_exact(&wide), Err(Error::Reduction(_))));
        assert!(matches!(reduce_overlapping(&ch), Err(Error::Reduction(_))));
    }

    #[test]
    fn turn_inside_gadget_square_warns() {
        let ch = ChInstance {
            agents: vec![ChValuation { kind: ValuationKind::BlockPlusTriangle, blocks: vec![], triangle: Some(TriangleBlock { a: int(0), b: int(1) }) }],
        };
        let (inst, meta) = reduce_exact(&ch).unwrap();
        let sol = FeasibleSolution { thick: vec![frac(1, 2), frac(1, 2)], positive: vec![true, true], x: vec![frac(1, 2)], x_positive: vec![true] };
        let rep = verify_scpath(&inst, &sol, &int(1), None, Some(&meta)).unwrap();
        assert!(!rep.warnings.is_empty());
        let straight = horizontal(frac(1, 2), true);
        assert!(verify_scpath(&inst, &straight, &int(1), None, Some(&meta)).unwrap().warnings.is_empty());
    }

    #[test]
    fn offset_path_fails() {
        let ch = ChInstance { agents: vec![ChValuation::uniform(&[(int(0), int(1))])] };
        let (inst, _) = reduce_overlapping(&ch).unwrap();
        assert!(verify_scpath(&inst, &horizontal(frac(1, 2), true), &int(0), Some(0), None).unwrap().pass);
        let off = verify_scpath(&inst, &horizontal(frac(3, 5), true), &frac(1, 10), Some(0), None).unwrap();
        assert!(!off.pass);
        assert_eq!(off.gaps(), vec![frac(1, 5)]);
    }
}
