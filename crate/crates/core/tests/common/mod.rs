//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use cgf_core::approx_group::build_pi_delta;
use cgf_core::approx_truncated::{inverse_transform, TransformParams};
use cgf_core::minimality::check_strongly_minimal;
use cgf_core::{rat, GroupProblem, PwlPeriodic, QuasiPeriodicPwl, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub type Points = Vec<(Rational, Rational)>;

/// Periodic interpolation of `points` (first x is 0, all x in [0,1)).
pub fn eval_points(points: &[(Rational, Rational)], x: &Rational) -> Rational {
    let t = x - Rational::from_integer(x.floor());
    let n = points.len();
    for i in 0..n {
        let (x0, y0) = &points[i];
        let (x1, y1) = if i + 1 < n {
            (points[i + 1].0.clone(), points[i + 1].1.clone())
        } else {
            (rat(1, 1), points[0].1.clone())
        };
        if &t >= x0 && t <= x1 {
            return y0 + (y1 - y0) * (&t - x0) / (x1 - x0);
        }
    }
    unreachable!("x reduced into [0,1)")
}

pub fn points_of(f: &PwlPeriodic) -> Points {
    f.nodes().iter().map(|n| (n.x.clone(), n.y.clone())).collect()
}

/// Subadditivity by brute force on `(1/m)ℤ² ∩ [0,1)²`.
pub fn brute_subadditive(points: &[(Rational, Rational)], m: i64) -> bool {
    let vals: Vec<Rational> = (0..2 * m).map(|k| eval_points(points, &rat(k, m))).collect();
    (0..m).all(|i| (0..m).all(|j| &vals[i as usize] + &vals[j as usize] >= vals[(i + j) as usize]))
}

/// Minimum slack of `points` over grid points of `(1/m)ℤ²` in the closed
/// complement of the border and diagonal strips.
pub fn grid_gamma(points: &[(Rational, Rational)], b: &Rational, delta: &Rational, m: i64) -> Rational {
    let one = rat(1, 1);
    let mut best: Option<Rational> = None;
    for i in 0..=m {
        for j in 0..=m {
            let (x, y) = (rat(i, m), rat(j, m));
            let inside = |t: &Rational| t >= delta && *t <= &one - delta;
            if !inside(&x) || !inside(&y) {
                continue;
            }
            let s = &x + &y;
            let gap = |c: Rational| s > &c - delta && s < &c + delta;
            if gap(b.clone()) || gap(b + &one) {
                continue;
            }
            let v = eval_points(points, &x) + eval_points(points, &y) - eval_points(points, &s);
            best = Some(best.map_or(v.clone(), |b: Rational| b.min(v)));
        }
    }
    best.expect("complement is nonempty")
}

/// Rank by fraction-free elimination after clearing denominators row-wise.
pub fn bareiss_rank(m: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                a[i][j] = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

pub fn gmi(b: Rational) -> PwlPeriodic {
    PwlPeriodic::gmi(&b).unwrap()
}

pub fn pi_delta(b: Rational, d: Rational) -> PwlPeriodic {
    build_pi_delta(&b, &d).unwrap()
}

pub fn is_strongly_minimal(f: &PwlPeriodic, b: &Rational) -> bool {
    check_strongly_minimal(f, &GroupProblem::affine(b).unwrap())
        .unwrap()
        .is_strongly_minimal
}

/// Hand-picked strongly minimal inputs for `b + ℤ`.
pub fn z_fixtures() -> Vec<(String, PwlPeriodic, Rational)> {
    let mut out = vec![
        ("gmi(2/5)".into(), gmi(rat(2, 5)), rat(2, 5)),
        ("gmi(1/3)".into(), gmi(rat(1, 3)), rat(1, 3)),
        ("pi_delta(2/5,1/10)".into(), pi_delta(rat(2, 5), rat(1, 10)), rat(2, 5)),
        ("pi_delta(1/3,1/12)".into(), pi_delta(rat(1, 3), rat(1, 12)), rat(1, 3)),
        ("pi_delta(1/2,1/8)".into(), pi_delta(rat(1, 2), rat(1, 8)), rat(1, 2)),
    ];
    out.push((
        "mix(gmi(2/5),pi_delta(2/5,1/10))".into(),
        gmi(rat(2, 5)).convex_combination(&pi_delta(rat(2, 5), rat(1, 10)), &rat(1, 2)),
        rat(2, 5),
    ));
    out.push((
        "mix(gmi(1/3),pi_delta(1/3,1/12))".into(),
        gmi(rat(1, 3)).convex_combination(&pi_delta(rat(1, 3), rat(1, 12)), &rat(2, 3)),
        rat(1, 3),
    ));
    out.push((
        "mix(pi_delta(1/2,1/8),pi_delta(1/2,1/16))".into(),
        pi_delta(rat(1, 2), rat(1, 8)).convex_combination(&pi_delta(rat(1, 2), rat(1, 16)), &rat(1, 3)),
        rat(1, 2),
    ));
    out
}

/// Grid functions on `(1/q)ℤ` obtained from a random mixture of minimal
/// functions by random symmetric moves, keeping only moves that verify.
pub fn random_grid_function(rng: &mut impl Rng, q: i64) -> (PwlPeriodic, Rational) {
    let k = rng.gen_range(1..q);
    let b = rat(k, q);
    let dmax = k.min(q - k);
    let mut f = gmi(b.clone());
    // 2δ < min{b, 1−b} on the grid needs 2j < min{k, q−k}
    for _ in 0..2 {
        let choices: Vec<i64> = (1..q).filter(|j| 2 * j < dmax).collect();
        if choices.is_empty() {
            break;
        }
        let j = choices[rng.gen_range(0..choices.len())];
        let w = rat(rng.gen_range(1..4), 4);
        f = f.convex_combination(&pi_delta(b.clone(), rat(j, q)), &w);
    }
    let mut vals: Vec<Rational> = (0..q).map(|i| f.eval(&rat(i, q))).collect();
    for _ in 0..3 * q {
        let i = rng.gen_range(1..q);
        let partner = (k - i).rem_euclid(q);
        if partner == i || partner == 0 || i == k {
            continue;
        }
        let t = rat(rng.gen_range(-2..=2), 4 * q);
        let mut trial = vals.clone();
        trial[i as usize] += &t;
        trial[partner as usize] -= &t;
        let g = grid_to_pwl(q, &trial);
        if is_strongly_minimal(&g, &b) {
            vals = trial;
        }
    }
    (grid_to_pwl(q, &vals), b)
}

pub fn grid_to_pwl(q: i64, vals: &[Rational]) -> PwlPeriodic {
    let pts: Points = vals.iter().enumerate().map(|(i, v)| (rat(i as i64, q), v.clone())).collect();
    PwlPeriodic::from_points(&pts).unwrap()
}

/// Random periodic function with breakpoints in `(1/q)ℤ`; about half are
/// convex combinations of minimal functions, the rest arbitrary.
pub fn random_periodic(rng: &mut impl Rng, q: i64) -> Points {
    if rng.gen_bool(0.5) && q >= 4 {
        let (f, _) = random_grid_function(rng, q);
        let mut pts = points_of(&f);
        if rng.gen_bool(0.5) && pts.len() > 1 {
            let i = rng.gen_range(1..pts.len());
            pts[i].1 += rat(rng.gen_range(-3..=3), 8 * q);
        }
        pts
    } else {
        let mut pts = vec![(rat(0, 1), rat(0, 1))];
        for i in 1..q {
            if rng.gen_bool(0.6) {
                pts.push((rat(i, q), rat(rng.gen_range(0..=12), 12)));
            }
        }
        pts
    }
}

/// Quasi-periodic `π̄` with period `d` and `π̄(−1) = 0`, built from a minimal
/// `g` for `b/d + ℤ` so that the linear part is `α = v/(1 + v·b)`,
/// `v = g(−1/d)`.
pub fn forward_truncated(b: &Rational, d: &Rational, g: &PwlPeriodic) -> QuasiPeriodicPwl {
    let v = g.eval(&(-d.recip()));
    let alpha = &v / (rat(1, 1) + &v * b);
    let params = TransformParams::new(d.clone(), &alpha * d, b.clone()).unwrap();
    inverse_transform(g, &params).unwrap()
}

/// `π̄(r) = g(r/d)` with period `d` and no linear part.
pub fn scaled_truncated(d: &Rational, g: &PwlPeriodic) -> QuasiPeriodicPwl {
    g.compose_scale(&d.recip()).unwrap().normalized()
}

pub fn truncated_fixtures() -> Vec<(String, QuasiPeriodicPwl, Rational)> {
    let fr = |x: Rational| x.fract();
    let mut out = Vec::new();
    for b in [rat(-1, 2), rat(-3, 5), rat(-7, 4)] {
        out.push((format!("gmi, d=1, b={b}"), scaled_truncated(&rat(1, 1), &gmi(fr(b.clone()))), b));
    }
    for b in [rat(-3, 5), rat(-7, 4)] {
        let d = rat(1, 2);
        let g = gmi(fr(&b / &d));
        out.push((format!("gmi, d=1/2, b={b}"), scaled_truncated(&d, &g), b));
    }
    let b = rat(-1, 2);
    let d = rat(2, 1);
    out.push((
        format!("forward gmi, d=2, b={b}"),
        forward_truncated(&b, &d, &gmi(fr(&b / &d))),
        b,
    ));
    let b = rat(-3, 5);
    let d = rat(3, 2);
    let bt = fr(&b / &d);
    out.push((
        format!("forward pi_delta, d=3/2, b={b}"),
        forward_truncated(&b, &d, &pi_delta(bt.clone(), rat(1, 10))),
        b,
    ));
    // d = 2 would give 1 + v·b = 0 here
    let b = rat(-7, 4);
    let d = rat(3, 2);
    out.push((
        format!("forward gmi, d=3/2, b={b}"),
        forward_truncated(&b, &d, &gmi(fr(&b / &d))),
        b,
    ));
    out
}

pub fn abs_max(xs: impl Iterator<Item = Rational>) -> Rational {
    xs.map(|x| x.abs()).fold(Rational::zero(), Rational::max)
}

pub fn is_nonneg(x: &Rational) -> bool {
    !x.as_big().is_negative()
}
