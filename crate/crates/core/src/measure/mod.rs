//! The Borsuk-Ulam measure function: per-color side-A mass of the path
//! encoded by a sphere point.

pub mod circuit;
pub mod etr;
mod oracle;
pub mod strip;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{decompose_axis_aligned, split_obtuse, triangulate, Atom, PizzaInstance};
use crate::numeric::{int, to_f64, Eval, Gates, Rational};
use crate::sc_path::{layout, turns_for_len};

pub use oracle::{region_mass_oracle, SideMasses};
pub use strip::{atom_strip_mass, HalfPlane, Prepared};

/// An instance reduced to per-color atom lists, ready for evaluation in
/// exact or floating-point mode.
#[derive(Debug, Clone)]
pub struct CompiledInstance {
    pub instance: PizzaInstance,
    pub atoms: Vec<Vec<Atom>>,
    pub totals: Vec<Rational>,
    exact: Vec<Vec<Prepared<Rational>>>,
    float: Vec<Vec<Prepared<f64>>>,
}

/// Triangulates, splits obtuse triangles and decomposes into atoms.
/// The instance must already lie in the unit square.
pub fn compile(inst: &PizzaInstance) -> Result<CompiledInstance> {
    inst.validate()?;
    if !inst.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let mut atoms = Vec::with_capacity(inst.n_colors());
    for m in &inst.masses {
        let mut list = Vec::new();
        for poly in &m.polygons {
            for t in triangulate(poly)? {
                for piece in split_obtuse(&t) {
                    list.extend(decompose_axis_aligned(&piece)?);
                }
            }
        }
        atoms.push(list);
    }
    let totals = inst.totals();
    for (color, (list, total)) in atoms.iter().zip(&totals).enumerate() {
        let sum = list.iter().map(Atom::signed_mass).fold(Rational::zero(), |a, b| a + b);
        if &sum != total {
            return Err(Error::Triangulation(format!("atoms of color {color} do not sum to its mass")));
        }
    }
    let ge = Eval::<Rational>::new();
    let gf = Eval::<f64>::new();
    let exact = atoms.iter().map(|l| l.iter().map(|a| strip::prepare(&ge, a)).collect()).collect();
    let float = atoms.iter().map(|l| l.iter().map(|a| strip::prepare(&gf, a)).collect()).collect();
    Ok(CompiledInstance { instance: inst.clone(), atoms, totals, exact, float })
}

fn abs<G: Gates>(g: &G, v: &G::V, zero: &G::V) -> G::V {
    g.add(&g.max(v, zero), &g.max(&g.neg(v), zero))
}

struct StripTerm<V> {
    lo: V,
    /// Thickness carried by a `+` sign (side A on the left).
    pos: V,
    /// Thickness carried by a `−` sign (side A on the right).
    neg: V,
    cut: Option<V>,
}

/// Decodes the sphere point into strips using only the gate basis:
/// `|z_i| = min(S_i,1) − min(S_{i−1},1)`, the `+` share is
/// `min(max(Z_i,0), |z_i|)`, and the top strip takes its sign from `step(R)`.
fn strip_terms<G: Gates>(g: &G, p: &[G::V]) -> Vec<StripTerm<G::V>> {
    let k = p.len() - 2;
    let (s, nx) = layout(k);
    let zero = g.konst(&int(0));
    let one = g.konst(&int(1));
    let mut terms = Vec::with_capacity(s + 1);
    let mut partial = zero.clone();
    let mut used = zero.clone();
    for (i, z) in p[..s].iter().enumerate() {
        partial = if i == 0 { abs(g, z, &zero) } else { g.add(&partial, &abs(g, z, &zero)) };
        let level = g.min(&partial, &one);
        let thick = g.sub(&level, &used);
        let pos = g.min(&g.max(z, &zero), &thick);
        let neg = g.sub(&thick, &pos);
        terms.push(StripTerm { lo: used.clone(), pos, neg, cut: None });
        used = level;
    }
    let thick = g.sub(&one, &used);
    let pos = g.mul(&thick, &g.step(&p[s]));
    let neg = g.sub(&thick, &pos);
    terms.push(StripTerm { lo: used, pos, neg, cut: None });
    for (j, x) in p[s + 1..s + 1 + nx].iter().enumerate() {
        terms[j + 1].cut = Some(g.min(&abs(g, x, &zero), &one));
    }
    terms
}

/// Side-A mass of every color at sphere point `p`, written against the gate
/// basis. Strip `t` contributes its left part over the `+` share of its
/// thickness and its right part over the `−` share.
pub fn side_a_masses<G: Gates>(g: &G, atoms: &[Vec<Prepared<G::V>>], p: &[G::V]) -> Vec<G::V> {
    let terms = strip_terms(g, p);
    let zero = g.konst(&int(0));
    atoms
        .iter()
        .map(|list| {
            let mut acc: Option<G::V> = None;
            for atom in list {
                let mut per_atom: Option<G::V> = None;
                for t in &terms {
                    let v = match &t.cut {
                        None => strip::band_mass(g, atom, &t.lo, &g.add(&t.lo, &t.pos)),
                        Some(c) => g.add(
                            &strip::side_mass(g, atom, &t.lo, &g.add(&t.lo, &t.pos), c, false),
                            &strip::side_mass(g, atom, &t.lo, &g.add(&t.lo, &t.neg), c, true),
                        ),
                    };
                    per_atom = Some(match per_atom {
                        None => v,
                        Some(a) => g.add(&a, &v),
                    });
                }
                let weighted = g.mul(&atom.ws, &per_atom.unwrap_or_else(|| zero.clone()));
                acc = Some(match acc {
                    None => weighted,
                    Some(a) => g.add(&a, &weighted),
                });
            }
            acc.unwrap_or_else(|| zero.clone())
        })
        .collect()
}

impl CompiledInstance {
    pub fn n_colors(&self) -> usize {
        self.totals.len()
    }

    pub fn totals_f64(&self) -> Vec<f64> {
        self.totals.iter().map(to_f64).collect()
    }

    /// `f(p)`: exact side-A mass per color.
    pub fn bu_eval(&self, p: &[Rational]) -> Result<Vec<Rational>> {
        turns_for_len(p.len())?;
        Ok(side_a_masses(&Eval::<Rational>::new(), &self.exact, p))
    }

    /// `f(p)` in floating point.
    pub fn bu_eval_f64(&self, p: &[f64]) -> Result<Vec<f64>> {
        turns_for_len(p.len())?;
        Ok(side_a_masses(&Eval::<f64>::new(), &self.float, p))
    }

    /// `f(p) − f(−p)` per color, exactly.
    pub fn gaps(&self, p: &[Rational]) -> Result<Vec<Rational>> {
        let fp = self.bu_eval(p)?;
        let fm = self.bu_eval(&crate::sc_path::antipode(p))?;
        Ok(fp.into_iter().zip(fm).map(|(a, b)| a - b).collect())
    }

    pub fn gaps_f64(&self, p: &[f64]) -> Result<Vec<f64>> {
        let fp = self.bu_eval_f64(p)?;
        let fm = self.bu_eval_f64(&crate::sc_path::antipode(p))?;
        Ok(fp.into_iter().zip(fm).map(|(a, b)| a - b).collect())
    }

    /// `‖f(p) − f(−p)‖∞`, exactly.
    pub fn residual(&self, p: &[Rational]) -> Result<Rational> {
        Ok(self.gaps(p)?.into_iter().map(|g| g.abs()).max().unwrap_or_else(Rational::zero))
    }

    pub fn residual_f64(&self, p: &[f64]) -> Result<f64> {
        Ok(self.gaps_f64(p)?.into_iter().map(f64::abs).fold(0.0, f64::max))
    }
}
