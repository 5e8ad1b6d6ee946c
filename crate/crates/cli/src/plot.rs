//! SVG and CSV output. Floats appear only in the SVG coordinates.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use cgf_core::{QuasiPeriodicPwl, Rational};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 3] = ["#1f4e9c", "#c0392b", "#2e8b57"];

/// `[0, period]`, or `[-M, M]` when `m` is given.
pub fn domain(f: &QuasiPeriodicPwl, m: Option<&Rational>) -> (Rational, Rational) {
    match m {
        Some(m) => (-m, m.clone()),
        None => (Rational::zero(), f.period().clone()),
    }
}

/// `n` equally spaced points of `[lo, hi)`.
pub fn uniform(lo: &Rational, hi: &Rational, n: usize) -> Vec<Rational> {
    let step = (hi - lo) / Rational::from(n as i64);
    (0..n).map(|k| lo + &step * Rational::from(k as i64)).collect()
}

/// Exact samples as a two-column CSV.
pub fn csv(f: &QuasiPeriodicPwl, xs: &[Rational]) -> String {
    let mut out = String::from("x,f(x)\n");
    for x in xs {
        let _ = writeln!(out, "{x},{}", f.eval(x));
    }
    out
}

pub struct Curve {
    pub points: Vec<(Rational, Rational)>,
    pub breakpoints: Vec<(Rational, Rational)>,
}

impl Curve {
    /// Uniform samples merged with every breakpoint in `[lo, hi]`, so the
    /// polyline is exact between consecutive points.
    pub fn new(f: &QuasiPeriodicPwl, lo: &Rational, hi: &Rational, samples: usize) -> Self {
        let bps = f.breakpoints_in(lo, hi);
        let mut xs: BTreeSet<Rational> = uniform(lo, hi, samples.max(1)).into_iter().collect();
        xs.insert(hi.clone());
        xs.extend(bps.iter().cloned());
        Curve {
            points: xs.into_iter().map(|x| point(f, x)).collect(),
            breakpoints: bps.into_iter().map(|x| point(f, x)).collect(),
        }
    }
}

fn point(f: &QuasiPeriodicPwl, x: Rational) -> (Rational, Rational) {
    let y = f.eval(&x);
    (x, y)
}

pub fn svg(curves: &[Curve], lo: &Rational, hi: &Rational) -> String {
    let (x0, x1) = (lo.to_f64(), hi.to_f64());
    let ys = curves.iter().flat_map(|c| c.points.iter().map(|p| p.1.to_f64()));
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !(y1 > y0) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ax, ay) = (sx(x0), sy(y0.max(0.0).min(y1)));
    let _ = writeln!(
        out,
        r##"<line x1="{ax:.2}" y1="{ay:.2}" x2="{:.2}" y2="{ay:.2}" stroke="#999" stroke-width="1"/>"##,
        sx(x1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{lo}</text><text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif" text-anchor="end">{hi}</text>"#,
        sx(x0),
        HEIGHT - MARGIN / 3.0,
        sx(x1),
        HEIGHT - MARGIN / 3.0
    );
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|(x, y)| format!("{:.3},{:.3}", sx(x.to_f64()), sy(y.to_f64())))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        for (x, y) in &c.breakpoints {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{color}"><title>({x}, {y})</title></circle>"#,
                sx(x.to_f64()),
                sy(y.to_f64())
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
