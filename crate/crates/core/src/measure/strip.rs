//! Closed-form strip masses of atoms, written once against [`Gates`] so the
//! same code evaluates exactly, in floats, or records a circuit.
//!
//! An atom's horizontal cross-section at height `y` is `[a(y), b(y)]`; one
//! edge is the vertical leg `x = C` and the other the hypotenuse
//! `L(y) = lx0 − kx·(y − cy)`. Over a band `[Y0, Y1]` the part left of
//! `x = c` has area `∫min(b,c) − ∫min(a,c)` and the part right of it
//! `∫max(b,c) − ∫max(a,c)`. For linear `L` those integrals split at the
//! height `u` where `L(u) = c`, which is where the max/min gates come from.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::Atom;
use crate::numeric::{format_rational, half, Gates, Rational};

/// Atom data in the value domain of some [`Gates`] implementation.
#[derive(Debug, Clone)]
pub struct Prepared<V> {
    pub y0: V,
    pub y1: V,
    /// x of the vertical leg.
    pub cx: V,
    /// Hypotenuse x at the horizontal leg's height `cy`.
    pub lx0: V,
    pub cy: V,
    /// `hx / hy`; the hypotenuse is `x = lx0 − kx·(y − cy)`.
    pub kx: V,
    /// Height where the hypotenuse meets the vertical leg.
    pub apex_y: V,
    /// `hy / hx`, used to invert the hypotenuse.
    pub ky: V,
    /// Hypotenuse x decreases with y.
    pub decreasing: bool,
    /// The hypotenuse is the right edge of every cross-section.
    pub linear_right: bool,
    /// `sign · weight`.
    pub ws: V,
}

pub fn prepare<G: Gates>(g: &G, atom: &Atom) -> Prepared<G::V> {
    let cy = &atom.corner.y;
    let apex = cy + &atom.hy;
    let (y0, y1) = if atom.hy.is_positive() { (cy.clone(), apex.clone()) } else { (apex.clone(), cy.clone()) };
    let kx = &atom.hx / &atom.hy;
    let ws = if atom.sign < 0 { -atom.weight.clone() } else { atom.weight.clone() };
    Prepared {
        y0: g.konst(&y0),
        y1: g.konst(&y1),
        cx: g.konst(&atom.corner.x),
        lx0: g.konst(&(&atom.corner.x + &atom.hx)),
        cy: g.konst(cy),
        decreasing: kx.is_positive(),
        kx: g.konst(&kx),
        apex_y: g.konst(&apex),
        ky: g.konst(&(&atom.hy / &atom.hx)),
        linear_right: atom.hx.is_positive(),
        ws: g.konst(&ws),
    }
}

fn clamp<G: Gates>(g: &G, v: &G::V, lo: &G::V, hi: &G::V) -> G::V {
    g.min(&g.max(v, lo), hi)
}

fn hyp<G: Gates>(g: &G, p: &Prepared<G::V>, y: &G::V) -> G::V {
    g.sub(&p.lx0, &g.mul(&p.kx, &g.sub(y, &p.cy)))
}

/// `(L(a) + L(b))/2 · (b − a)`.
fn trapezoid<G: Gates>(g: &G, p: &Prepared<G::V>, a: &G::V, b: &G::V) -> G::V {
    let h = g.konst(&half());
    g.mul(&g.mul(&h, &g.add(&hyp(g, p, a), &hyp(g, p, b))), &g.sub(b, a))
}

/// `∫_{Y0}^{Y1} min(L, c)` (or `max` when `take_max`).
fn linear_clip<G: Gates>(g: &G, p: &Prepared<G::V>, y0: &G::V, y1: &G::V, c: &G::V, take_max: bool) -> G::V {
    let cross = g.sub(&p.apex_y, &g.mul(&p.ky, &g.sub(c, &p.cx)));
    let u = clamp(g, &cross, y0, y1);
    let flat_low = g.mul(c, &g.sub(&u, y0));
    let flat_high = g.mul(c, &g.sub(y1, &u));
    // Below u the hypotenuse is on one side of c, above it on the other.
    let low_is_flat = p.decreasing != take_max;
    if low_is_flat {
        g.add(&flat_low, &trapezoid(g, p, &u, y1))
    } else {
        g.add(&trapezoid(g, p, y0, &u), &flat_high)
    }
}

fn const_clip<G: Gates>(g: &G, x: &G::V, y0: &G::V, y1: &G::V, c: &G::V, take_max: bool) -> G::V {
    let v = if take_max { g.max(x, c) } else { g.min(x, c) };
    g.mul(&v, &g.sub(y1, y0))
}

fn clamp_band<G: Gates>(g: &G, p: &Prepared<G::V>, lo: &G::V, hi: &G::V) -> (G::V, G::V) {
    (clamp(g, lo, &p.y0, &p.y1), clamp(g, hi, &p.y0, &p.y1))
}

/// Unweighted area of the atom inside `lo ≤ y ≤ hi` and left of `x = c`
/// (`right == false`) or right of it (`right == true`). Requires `lo ≤ hi`.
pub fn side_mass<G: Gates>(g: &G, p: &Prepared<G::V>, lo: &G::V, hi: &G::V, c: &G::V, right: bool) -> G::V {
    let (y0, y1) = clamp_band(g, p, lo, hi);
    let lin = linear_clip(g, p, &y0, &y1, c, right);
    let con = const_clip(g, &p.cx, &y0, &y1, c, right);
    // Left part: ∫min(b,c) − ∫min(a,c); right part: ∫max(b,c) − ∫max(a,c).
    if p.linear_right { g.sub(&lin, &con) } else { g.sub(&con, &lin) }
}

/// Unweighted area of the atom inside `lo ≤ y ≤ hi`.
pub fn band_mass<G: Gates>(g: &G, p: &Prepared<G::V>, lo: &G::V, hi: &G::V) -> G::V {
    let (y0, y1) = clamp_band(g, p, lo, hi);
    let lin = trapezoid(g, p, &y0, &y1);
    let con = g.mul(&p.cx, &g.sub(&y1, &y0));
    if p.linear_right { g.sub(&lin, &con) } else { g.sub(&con, &lin) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Left,
    Right,
}

/// Weighted (signed) mass of `atom ∩ [y_lo, y_hi] ∩ half-plane`, exactly.
pub fn atom_strip_mass(atom: &Atom, y_lo: &Rational, y_hi: &Rational, x_cut: &Rational, side: HalfPlane) -> Result<Rational> {
    if y_lo > y_hi {
        return Err(Error::InvertedStrip { lo: format_rational(y_lo), hi: format_rational(y_hi) });
    }
    let g = crate::numeric::Eval::<Rational>::new();
    let p = prepare(&g, atom);
    let m = side_mass(&g, &p, y_lo, y_hi, x_cut, side == HalfPlane::Right);
    Ok(if m.is_zero() { m } else { m * &p.ws })
}
