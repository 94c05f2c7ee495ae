//! Points on the L1 sphere, the slice/cut vectors they decode to, and the
//! y-monotone square-cut paths those vectors describe.
//!
//! A `k`-turn point has `k + 2` coordinates `Z_1..Z_s, R, X_1..X_{k+1-s}`
//! with `s = ⌈(k+1)/2⌉` and `Σ|P_j| = k + 1`. It decodes to `s + 1`
//! horizontal strips stacked from `y = 0`; strip `t ≥ 2` is split by the
//! vertical cut `x_{t-1}` when that cut exists, and the bottom strip is never
//! split. A `+` strip puts its left part on side A, a `−` strip its right part.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Field, Rational};

/// `(s, number of vertical cuts)` for a `k`-turn budget.
pub fn layout(k: usize) -> (usize, usize) {
    let s = (k + 2) / 2;
    (s, k + 1 - s)
}

/// Turn budget encoded by a coordinate vector of length `len`.
pub fn turns_for_len(len: usize) -> Result<usize> {
    len.checked_sub(2).ok_or_else(|| Error::SpherePoint(format!("need at least 2 coordinates, got {len}")))
}

fn abs_sum<T: Field>(coords: &[T]) -> T {
    coords.iter().fold(T::zero(), |acc, c| acc + c.abs())
}

fn radius_of<T: Field>(len: usize) -> T {
    T::from_rational(&Rational::from_integer((len as i64 - 1).into()))
}

/// Checks `Σ|P_j| = k + 1` exactly.
pub fn check_exact_sphere(coords: &[Rational]) -> Result<()> {
    turns_for_len(coords.len())?;
    let sum = abs_sum(coords);
    let radius: Rational = radius_of(coords.len());
    if sum != radius {
        return Err(Error::SpherePoint(format!(
            "L1 norm is {} but the radius is {}",
            format_rational(&sum),
            format_rational(&radius)
        )));
    }
    Ok(())
}

/// Checks `|Σ|P_j| − (k + 1)| ≤ 2⁻⁵⁰ · (k + 1)`.
pub fn check_float_sphere(coords: &[f64]) -> Result<()> {
    turns_for_len(coords.len())?;
    let r = (coords.len() - 1) as f64;
    let sum: f64 = coords.iter().map(|c| c.abs()).sum();
    if !sum.is_finite() || (sum - r).abs() > r * 2f64.powi(-50) {
        return Err(Error::SpherePoint(format!("L1 norm is {sum} but the radius is {r}")));
    }
    Ok(())
}

pub fn antipode<T: Field>(coords: &[T]) -> Vec<T> {
    coords.iter().map(|c| -c.clone()).collect()
}

/// Slice thicknesses with their signs, and vertical cut positions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSolution<T = Rational> {
    /// `|z_1| .. |z_{s+1}|`, summing to 1.
    pub thick: Vec<T>,
    /// `sign(z_i) = +`. Zero counts as `+`.
    pub positive: Vec<bool>,
    pub x: Vec<T>,
    /// `sign(X_i)`; decoded for completeness, never used geometrically.
    pub x_positive: Vec<bool>,
}

/// One horizontal strip of a decoded solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Strip<T> {
    pub index: usize,
    pub lo: T,
    pub hi: T,
    pub positive: bool,
    pub cut: Option<T>,
}

impl<T: Field> FeasibleSolution<T> {
    pub fn n_strips(&self) -> usize {
        self.thick.len()
    }

    /// Signed slice values `z_i`.
    pub fn z(&self) -> Vec<T> {
        self.thick
            .iter()
            .zip(&self.positive)
            .map(|(t, &p)| if p { t.clone() } else { -t.clone() })
            .collect()
    }

    /// Cut splitting strip `t` (0-based), if any.
    pub fn cut(&self, t: usize) -> Option<&T> {
        if t == 0 { None } else { self.x.get(t - 1) }
    }

    pub fn strips(&self) -> Vec<Strip<T>> {
        let mut lo = T::zero();
        let mut out = Vec::with_capacity(self.thick.len());
        for (t, th) in self.thick.iter().enumerate() {
            let hi = lo.clone() + th.clone();
            out.push(Strip { index: t, lo: lo.clone(), hi: hi.clone(), positive: self.positive[t], cut: self.cut(t).cloned() });
            lo = hi;
        }
        out
    }

    /// Flips every sign; the result describes the same path with sides swapped.
    pub fn flipped(&self) -> Self {
        FeasibleSolution {
            thick: self.thick.clone(),
            positive: self.positive.iter().map(|p| !p).collect(),
            x: self.x.clone(),
            x_positive: self.x_positive.iter().map(|p| !p).collect(),
        }
    }
}

/// Decodes a sphere point: `|z_i| = min(S_i, 1) − min(S_{i−1}, 1)` with
/// `S_i = Σ_{j≤i} |Z_j|`, the top slice takes the remainder and the sign of
/// `R`, and `x_i = min(|X_i|, 1)`.
pub fn sphere_to_solution<T: Field>(coords: &[T]) -> Result<FeasibleSolution<T>> {
    let k = turns_for_len(coords.len())?;
    let (s, nx) = layout(k);
    let one = T::one();
    let mut thick = Vec::with_capacity(s + 1);
    let mut positive = Vec::with_capacity(s + 1);
    let mut partial = T::zero();
    let mut used = T::zero();
    for z in &coords[..s] {
        partial = partial + z.abs();
        let level = partial.min_of(&one);
        thick.push(level.clone() - used.clone());
        positive.push(!z.is_negative());
        used = level;
    }
    thick.push(one - used);
    positive.push(!coords[s].is_negative());
    let xs = &coords[s + 1..];
    debug_assert_eq!(xs.len(), nx);
    Ok(FeasibleSolution {
        thick,
        positive,
        x: xs.iter().map(|x| x.abs().min_of(&T::one())).collect(),
        x_positive: xs.iter().map(|x| !x.is_negative()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

fn side_in_strip<T: Field>(strip: &Strip<T>, x: &T) -> Option<Side> {
    let left_is_a = strip.positive;
    let in_a = match &strip.cut {
        None => true,
        Some(c) if x < c => true,
        Some(c) if x > c => false,
        Some(_) => return None,
    };
    Some(if in_a == left_is_a { Side::A } else { Side::B })
}

/// Side of the point `(x, y)` of the unit square; `None` on the path.
pub fn point_side<T: Field>(sol: &FeasibleSolution<T>, x: &T, y: &T) -> Option<Side> {
    let strips: Vec<Strip<T>> = sol.strips().into_iter().filter(|s| s.hi > s.lo).collect();
    let mut below = None;
    let mut above = None;
    for s in &strips {
        if &s.lo < y && y < &s.hi {
            return side_in_strip(s, x);
        }
        if &s.hi == y {
            below = Some(s);
        }
        if &s.lo == y {
            above = Some(s);
        }
    }
    // On a level shared by two strips: interior only if both agree.
    match (below, above) {
        (Some(b), Some(a)) => {
            let (sb, sa) = (side_in_strip(b, x)?, side_in_strip(a, x)?);
            if sb == sa { Some(sb) } else { None }
        }
        (Some(s), None) | (None, Some(s)) => side_in_strip(s, x),
        (None, None) => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
}

/// Axis-parallel piece of a square-cut path. A wrapping horizontal segment
/// leaves through one side of the square and re-enters through the other.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment<T> {
    Horizontal { y: T, from: T, to: T, dir: Direction, wraps: bool },
    Vertical { x: T, from: T, to: T },
}

impl<T: Field> Segment<T> {
    pub fn is_horizontal(&self) -> bool {
        matches!(self, Segment::Horizontal { .. })
    }

    pub fn length(&self) -> T {
        match self {
            Segment::Vertical { from, to, .. } => to.clone() - from.clone(),
            Segment::Horizontal { from, to, wraps: false, .. } => (to.clone() - from.clone()).abs(),
            Segment::Horizontal { from, to, wraps: true, .. } => T::one() - (to.clone() - from.clone()).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScPath<T = Rational> {
    pub segments: Vec<Segment<T>>,
}

impl<T: Field> ScPath<T> {
    pub fn turns(&self) -> usize {
        turn_count(self)
    }

    /// Vertices in travel order plus, per edge, whether it is the seam jump
    /// between `x = 1` and `x = 0` (not part of the drawn path).
    pub fn polyline(&self) -> (Vec<(T, T)>, Vec<bool>) {
        let mut pts: Vec<(T, T)> = Vec::new();
        let mut jumps = Vec::new();
        let mut push = |p: (T, T), jump: bool, pts: &mut Vec<(T, T)>| {
            if pts.last() == Some(&p) {
                return;
            }
            if !pts.is_empty() {
                jumps.push(jump);
            }
            pts.push(p);
        };
        for seg in &self.segments {
            match seg {
                Segment::Vertical { x, from, to } => {
                    push((x.clone(), from.clone()), false, &mut pts);
                    push((x.clone(), to.clone()), false, &mut pts);
                }
                Segment::Horizontal { y, from, to, dir, wraps } => {
                    push((from.clone(), y.clone()), false, &mut pts);
                    if *wraps {
                        let (exit, enter) = match dir {
                            Direction::Right => (T::one(), T::zero()),
                            Direction::Left => (T::zero(), T::one()),
                        };
                        push((exit, y.clone()), false, &mut pts);
                        push((enter, y.clone()), true, &mut pts);
                    }
                    push((to.clone(), y.clone()), false, &mut pts);
                }
            }
        }
        (pts, jumps)
    }
}

/// Number of junctions between a horizontal and a vertical segment.
pub fn turn_count<T: Field>(path: &ScPath<T>) -> usize {
    path.segments.windows(2).filter(|w| w[0].is_horizontal() != w[1].is_horizontal()).count()
}

/// Horizontal travel at height `y` from `a` to `b` that separates a strip of
/// sign `below` from one of sign `above`. Equal signs travel directly between
/// the cuts; opposite signs travel the complement through the seam, going
/// left when the cuts coincide.
fn connector<T: Field>(y: &T, a: &T, b: &T, same_sign: bool) -> Option<Segment<T>> {
    let zero = T::zero();
    let one = T::one();
    let seg = |from: &T, to: &T, dir, wraps| Segment::Horizontal { y: y.clone(), from: from.clone(), to: to.clone(), dir, wraps };
    if same_sign {
        return if a < b {
            Some(seg(a, b, Direction::Right, false))
        } else if a > b {
            Some(seg(a, b, Direction::Left, false))
        } else {
            None
        };
    }
    let dir = if a > b { Direction::Right } else { Direction::Left };
    // Pieces of zero length at the seam collapse into a plain segment.
    match dir {
        Direction::Right if a == &one => Some(seg(&zero, b, Direction::Right, false)),
        Direction::Right if b == &zero => Some(seg(a, &one, Direction::Right, false)),
        Direction::Left if a == &zero => Some(seg(&one, b, Direction::Left, false)),
        Direction::Left if b == &one => Some(seg(a, &zero, Direction::Left, false)),
        _ => Some(seg(a, b, dir, true)),
    }
}

/// Rebuilds the path separating side A from side B. Zero-thickness slices
/// are skipped; uncut strips count as cut at `x = 1`.
pub fn solution_to_path<T: Field>(sol: &FeasibleSolution<T>) -> Result<ScPath<T>> {
    let strips: Vec<Strip<T>> = sol.strips().into_iter().filter(|s| s.hi > s.lo).collect();
    if strips.is_empty() {
        return Err(Error::AllZeroSlices);
    }
    let at = |s: &Strip<T>| s.cut.clone().unwrap_or_else(T::one);
    let mut segs: Vec<Segment<T>> = Vec::new();
    let push_vertical = |x: T, from: T, to: T, segs: &mut Vec<Segment<T>>| {
        if let Some(Segment::Vertical { x: px, to: pto, .. }) = segs.last_mut() {
            if *px == x && *pto == from {
                *pto = to;
                return;
            }
        }
        segs.push(Segment::Vertical { x, from, to });
    };
    for (i, s) in strips.iter().enumerate() {
        if let Some(c) = &s.cut {
            push_vertical(c.clone(), s.lo.clone(), s.hi.clone(), &mut segs);
        }
        if let Some(next) = strips.get(i + 1) {
            if let Some(h) = connector(&s.hi, &at(s), &at(next), s.positive == next.positive) {
                segs.push(h);
            }
        }
    }
    Ok(ScPath { segments: segs })
}

/// Where the path starts, following the sign test on the two lowest
/// non-empty slices: `(0, y)` for opposite signs and `(1, y)` otherwise.
pub fn start_point<T: Field>(sol: &FeasibleSolution<T>) -> Option<(T, T)> {
    let strips: Vec<Strip<T>> = sol.strips().into_iter().filter(|s| s.hi > s.lo).collect();
    let (first, second) = (strips.first()?, strips.get(1)?);
    let x = if first.positive != second.positive { T::zero() } else { T::one() };
    Some((x, first.hi.clone()))
}

/// On-disk form of a point on the sphere. Only `coords` is read back; the
/// remaining fields are re-derived on write.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathFile {
    #[serde(with = "crate::numeric::serde_rational::vec")]
    pub coords: Vec<Rational>,
    #[serde(default, skip_deserializing, serialize_with = "ser_opt_str")]
    pub radius: Option<String>,
    #[serde(default, skip_deserializing)]
    pub z: Vec<String>,
    #[serde(default, skip_deserializing)]
    pub x: Vec<String>,
    #[serde(default, skip_deserializing)]
    pub polyline: Vec<[String; 2]>,
    #[serde(default, skip_deserializing)]
    pub wraps: Vec<bool>,
    #[serde(default, skip_deserializing)]
    pub turns: usize,
}

fn ser_opt_str<S: serde::Serializer>(v: &Option<String>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(t) => s.serialize_str(t),
        None => s.serialize_none(),
    }
}

impl PathFile {
    pub fn from_coords(coords: Vec<Rational>) -> Result<Self> {
        check_exact_sphere(&coords)?;
        let sol = sphere_to_solution(&coords)?;
        let (polyline, wraps, turns) = match solution_to_path(&sol) {
            Ok(path) => {
                let (pts, jumps) = path.polyline();
                let pts = pts.iter().map(|(x, y)| [format_rational(x), format_rational(y)]).collect();
                (pts, jumps, path.turns())
            }
            Err(_) => (Vec::new(), Vec::new(), 0),
        };
        let fmt_signed = |v: &Rational, pos: bool| {
            let s = format_rational(v);
            if !pos && v.is_zero() { format!("-{s}") } else { s }
        };
        Ok(PathFile {
            radius: Some(format_rational(&Rational::from_integer((coords.len() as i64 - 1).into()))),
            z: sol.z().iter().zip(&sol.positive).map(|(z, &p)| fmt_signed(z, p)).collect(),
            x: sol.x.iter().map(format_rational).collect(),
            polyline,
            wraps,
            turns,
            coords,
        })
    }

    pub fn parse(text: &str) -> Result<Vec<Rational>> {
        let f: PathFile = serde_json::from_str(text)?;
        check_exact_sphere(&f.coords)?;
        Ok(f.coords)
    }
}
