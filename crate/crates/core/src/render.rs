//! Static SVG figures of instances with an optional path or line overlay.

use std::fmt::Write;

use crate::geometry::{PizzaInstance, Point};
use crate::numeric::to_f64;
use crate::reductions::StraightCutSet;
use crate::sc_path::ScPath;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

pub enum Overlay<'a> {
    None,
    Path(&'a ScPath),
    Lines(&'a StraightCutSet),
}

pub fn color_of(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn ring(out: &mut String, pts: &[Point]) {
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(out, "{}{:.6},{:.6} ", if i == 0 { "M" } else { "L" }, to_f64(&p.x), to_f64(&p.y));
    }
    out.push('Z');
}

/// Part of `a·x + b·y = c` inside `[lo, hi]²`, if any.
fn line_in_box(a: f64, b: f64, c: f64, lo: f64, hi: f64) -> Option<((f64, f64), (f64, f64))> {
    let mut hits: Vec<(f64, f64)> = Vec::new();
    let tol = 1e-12 * (hi - lo).max(1.0);
    if b.abs() > 0.0 {
        for x in [lo, hi] {
            let y = (c - a * x) / b;
            if y >= lo - tol && y <= hi + tol {
                hits.push((x, y));
            }
        }
    }
    if a.abs() > 0.0 {
        for y in [lo, hi] {
            let x = (c - b * y) / a;
            if x >= lo - tol && x <= hi + tol {
                hits.push((x, y));
            }
        }
    }
    hits.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
    hits.dedup_by(|p, q| (p.0 - q.0).abs() < tol && (p.1 - q.1).abs() < tol);
    (hits.len() >= 2).then(|| (hits[0], hits[hits.len() - 1]))
}

/// Draws the unit square scaled to `size` pixels, y upward. Output depends
/// only on the inputs.
pub fn render(inst: &PizzaInstance, overlay: Overlay<'_>, size: u32) -> String {
    let s = size as f64;
    let margin = 0.05;
    let (lo, hi) = (-margin, 1.0 + margin);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="{lo} {lo} {w} {w}">"#,
        w = hi - lo
    );
    let _ = writeln!(out, r#"<g transform="translate(0,{}) scale(1,-1)">"#, lo + hi);
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="1" height="1" fill="white" stroke="black" stroke-width="{:.6}"/>"#,
        1.0 / s
    );
    let max_w = inst
        .masses
        .iter()
        .flat_map(|m| m.polygons.iter().map(|p| to_f64(&p.weight)))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for (i, m) in inst.masses.iter().enumerate() {
        let _ = writeln!(out, r#"<g id="color-{}" fill="{}">"#, m.color, color_of(i));
        for poly in &m.polygons {
            let mut d = String::new();
            ring(&mut d, &poly.outer);
            for h in &poly.holes {
                d.push(' ');
                ring(&mut d, h);
            }
            let opacity = 0.25 + 0.5 * to_f64(&poly.weight) / max_w;
            let _ = writeln!(out, r#"<path d="{d}" fill-rule="evenodd" fill-opacity="{opacity:.3}"/>"#);
        }
        out.push_str("</g>\n");
    }
    let stroke = 2.0 / s;
    match overlay {
        Overlay::None => {}
        Overlay::Path(path) => {
            let (pts, jumps) = path.polyline();
            let mut run: Vec<(f64, f64)> = Vec::new();
            let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
                if run.len() >= 2 {
                    let p: Vec<String> = run.iter().map(|(x, y)| format!("{x:.6},{y:.6}")).collect();
                    let _ = writeln!(
                        out,
                        r#"<polyline class="path" points="{}" fill="none" stroke="black" stroke-width="{stroke:.6}"/>"#,
                        p.join(" ")
                    );
                }
                run.clear();
            };
            for (i, (x, y)) in pts.iter().enumerate() {
                let p = (to_f64(x), to_f64(y));
                if i > 0 && jumps[i - 1] {
                    let q = *run.last().expect("previous vertex");
                    flush(&mut run, &mut out);
                    let _ = writeln!(
                        out,
                        r#"<line class="seam" x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="gray" stroke-width="{stroke:.6}" stroke-dasharray="{:.6}"/>"#,
                        q.0,
                        q.1,
                        p.0,
                        p.1,
                        4.0 / s
                    );
                }
                run.push(p);
            }
            flush(&mut run, &mut out);
        }
        Overlay::Lines(lines) => {
            for l in &lines.lines {
                if let Some(((x1, y1), (x2, y2))) = line_in_box(to_f64(&l.a), to_f64(&l.b), to_f64(&l.c), lo, hi) {
                    let _ = writeln!(
                        out,
                        r#"<line class="cut" x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}" stroke="black" stroke-width="{stroke:.6}"/>"#
                    );
                }
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{MassDistribution, WeightedPolygon};
    use crate::numeric::{frac, int};
    use crate::reductions::Line;
    use crate::sc_path::{solution_to_path, sphere_to_solution};

    fn unit() -> PizzaInstance {
        PizzaInstance::new(vec![MassDistribution { color: 0, polygons: vec![WeightedPolygon::rect(int(1), int(0), int(0), int(1), int(1))] }]).unwrap()
    }

    #[test]
    fn deterministic_with_path() {
        let p = [frac(1, 2), frac(1, 2), frac(1, 2)];
        let path = solution_to_path(&sphere_to_solution(&p).unwrap()).unwrap();
        let a = render(&unit(), Overlay::Path(&path), 400);
        assert_eq!(a, render(&unit(), Overlay::Path(&path), 400));
        assert!(a.contains("class=\"path\""));
        assert!(a.contains("#1f77b4"));
    }

    #[test]
    fn lines_are_clipped() {
        let set = StraightCutSet { lines: vec![Line::new(int(0), int(1), frac(1, 2)), Line::new(int(0), int(1), int(5))] };
        let svg = render(&unit(), Overlay::Lines(&set), 100);
        assert_eq!(svg.matches("class=\"cut\"").count(), 1);
    }
}
