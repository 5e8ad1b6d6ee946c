//! Approximation for the truncated lattice `b + ℤ₊`: remove the linear part
//! of a quasi-periodic input, approximate the periodic remainder for
//! `b/d + ℤ`, undo the transform and correct the value at −1.

use serde::Serialize;

use crate::approx_group::{approximate_extreme_z, describe_failure, ZReport};
use crate::error::{stage, Error, Result};
use crate::minimality::{check_strongly_minimal, GroupProblem};
use crate::pwl::{distance_on_interval, PeriodicSource, PwlPeriodic, QuasiPeriodicPwl};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformParams {
    pub d: Rational,
    pub c: Rational,
    /// `c/d`.
    pub alpha: Rational,
    pub b: Rational,
    /// `1 − α·b`.
    pub scale: Rational,
}

impl TransformParams {
    pub fn new(d: Rational, c: Rational, b: Rational) -> Result<Self> {
        if !d.is_positive() {
            return Err(Error::OutOfRange(format!("period must be positive, got {d}")));
        }
        if c.is_negative() {
            return Err(Error::OutOfRange(format!("shift must be nonnegative, got {c}")));
        }
        if (&b / &d).is_integer() {
            return Err(Error::InvalidProblem(format!("b/d = {} is an integer", &b / &d)));
        }
        let alpha = &c / &d;
        let scale = Rational::one() - &alpha * &b;
        if !scale.is_positive() {
            return Err(Error::OutOfRange(format!("1 - alpha*b = {scale} is not positive")));
        }
        Ok(TransformParams {
            d,
            c,
            alpha,
            b,
            scale,
        })
    }

    /// The transformed right-hand side `b/d`.
    pub fn b_tilde(&self) -> Rational {
        &self.b / &self.d
    }
}

/// `π̃(r) = (π̄(d·r) − α·d·r)/(1 − α·b)`, periodic modulo 1.
pub fn periodize_transform(
    pibar: &QuasiPeriodicPwl,
    b: &Rational,
) -> Result<(PwlPeriodic, TransformParams)> {
    let problem = GroupProblem::truncated(b)?;
    let params = TransformParams::new(pibar.period().clone(), pibar.shift().clone(), b.clone())?;
    let report = check_strongly_minimal(pibar, &problem)?;
    if !report.is_strongly_minimal {
        return Err(Error::NotStronglyMinimal(describe_failure(&report)));
    }
    let pitilde = apply_forward(pibar, &params)?;
    let inner = check_strongly_minimal(&pitilde, &GroupProblem::affine(&params.b_tilde())?)?;
    if !inner.is_strongly_minimal {
        return Err(stage("periodize", describe_failure(&inner)));
    }
    Ok((pitilde, params))
}

fn apply_forward(pibar: &QuasiPeriodicPwl, p: &TransformParams) -> Result<PwlPeriodic> {
    let stretched = pibar.compose_scale(&p.d)?;
    let k = p.scale.recip();
    let l = -(&p.alpha * &p.d) / &p.scale;
    PwlPeriodic::try_from_quasi(stretched.scale_add_linear(&k, &l))
}

/// `π′(r) = (1 − α·b)·π̃(r/d) + α·r`, quasi-periodic with period `d`.
pub fn inverse_transform(pitilde: &PwlPeriodic, params: &TransformParams) -> Result<QuasiPeriodicPwl> {
    let squeezed = pitilde.compose_scale(&params.d.recip())?;
    Ok(squeezed.scale_add_linear(&params.scale, &params.alpha))
}

fn eps_prime_holds(bound: &Rational, b: &Rational, m: &Rational, eps: &Rational, e: &Rational) -> bool {
    let one = Rational::one();
    let half = Rational::new(1, 2);
    let eb = e * b;
    let lo = &one + &eb;
    if lo < half {
        return false;
    }
    let first = lo.recip() - &one;
    let second = &one - (&one - &eb).recip();
    let factor = Rational::max(first, second);
    factor * bound + e * (m + Rational::from(2)) <= *eps
}

/// Largest `ε′ = eps/2^k` with `1 + ε′b ≥ 1/2` and
/// `max{1/(1+ε′b) − 1, 1 − 1/(1−ε′b)}·max_{[−M,M]}|π̄| + ε′(M + 2) ≤ eps`.
pub fn choose_eps_prime(
    pibar: &QuasiPeriodicPwl,
    b: &Rational,
    m: &Rational,
    eps: &Rational,
) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange(format!("eps must be positive, got {eps}")));
    }
    let bound = pibar.max_abs_on_interval(m)?;
    let mut e = eps.clone();
    let half = Rational::new(1, 2);
    // The left side vanishes as ε′ → 0, so this terminates.
    while !eps_prime_holds(&bound, b, m, eps, &e) {
        e = e * &half;
    }
    Ok(e)
}

/// `π*(r) = (π′(r) + π′(−1)·r)/β` with `β = 1 + π′(−1)·b`.
pub fn correct_at_minus_one(piprime: &QuasiPeriodicPwl, b: &Rational) -> Result<QuasiPeriodicPwl> {
    let (beta, v) = beta_of(piprime, b);
    if !beta.is_positive() {
        return Err(Error::OutOfRange(format!("beta = {beta} is not positive")));
    }
    Ok(piprime.scale_add_linear(&beta.recip(), &(v / &beta)))
}

fn beta_of(piprime: &QuasiPeriodicPwl, b: &Rational) -> (Rational, Rational) {
    let v = piprime.eval(&-Rational::one());
    (Rational::one() + &v * b, v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZPlusReport {
    pub b: Rational,
    pub m: Rational,
    pub eps: Rational,
    pub params: TransformParams,
    pub eps_prime: Rational,
    /// Tolerance handed to the periodic stage: `ε′/(1 − α·b)`.
    pub inner_eps: Rational,
    pub piprime_at_minus_one: Rational,
    pub beta: Rational,
    pub inner: ZReport,
    pub distance_piprime: Rational,
    pub distance_on_interval: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZPlusApproximation {
    pub pistar: QuasiPeriodicPwl,
    pub pitilde: PwlPeriodic,
    pub pitilde_sym: PwlPeriodic,
    pub piprime: QuasiPeriodicPwl,
    pub report: ZPlusReport,
}

/// Extreme 2-slope `π*` for `b + ℤ₊` with `|π̄ − π*| ≤ eps` on `[−M, M]`.
pub fn approximate_extreme_zplus(
    pibar: &QuasiPeriodicPwl,
    b: &Rational,
    m: &Rational,
    eps: &Rational,
) -> Result<ZPlusApproximation> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange(format!("eps must be positive, got {eps}")));
    }
    if m.is_negative() {
        return Err(Error::OutOfRange(format!("M must be nonnegative, got {m}")));
    }
    let problem = GroupProblem::truncated(b)?;
    let (pitilde, params) = periodize_transform(pibar, b)?;
    let eps_prime = choose_eps_prime(pibar, b, m, eps)?;
    let inner_eps = &eps_prime / &params.scale;
    let inner = approximate_extreme_z(&PeriodicSource::Pwl(pitilde.clone()), &params.b_tilde(), &inner_eps)?;
    let piprime = inverse_transform(&inner.pistar, &params)?;
    let (beta, v) = beta_of(&piprime, b);
    let pistar = correct_at_minus_one(&piprime, b)?;

    let distance_piprime = distance_on_interval(pibar, &piprime, m)?;
    let report = check_strongly_minimal(&pistar, &problem)?;
    if !report.extreme_certified {
        return Err(stage("correction", describe_failure(&report)));
    }
    let dist = distance_on_interval(pibar, &pistar, m)?;
    if &dist > eps {
        return Err(stage(
            "correction",
            format!("interval distance {dist} exceeds {eps}"),
        ));
    }
    Ok(ZPlusApproximation {
        report: ZPlusReport {
            b: b.clone(),
            m: m.clone(),
            eps: eps.clone(),
            params,
            eps_prime,
            inner_eps,
            piprime_at_minus_one: v,
            beta,
            inner: inner.report,
            distance_piprime,
            distance_on_interval: dist,
        },
        pistar,
        pitilde,
        pitilde_sym: inner.pistar,
        piprime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimality::{certify_extreme_two_slope, check_symmetric};
    use crate::pwl::sup_distance_quasi;
    use crate::rational::rat;

    fn gmi_quasi(b: Rational) -> QuasiPeriodicPwl {
        PwlPeriodic::gmi(&b).unwrap().into_quasi()
    }

    /// π̄ with `α > 0`: the inverse transform of a GMI for `b/d + ℤ` chosen
    /// so that `π̄(−1) = 0`.
    fn forward_fixture(b: Rational, d: Rational) -> QuasiPeriodicPwl {
        let bt = (&b / &d).fract();
        let g = PwlPeriodic::gmi(&bt).unwrap();
        let v = g.eval(&(-d.recip()));
        let alpha = &v / (Rational::one() + &v * &b);
        let c = &alpha * &d;
        let params = TransformParams::new(d, c, b).unwrap();
        inverse_transform(&g, &params).unwrap()
    }

    #[test]
    fn periodic_input_transforms_to_itself() {
        let f = gmi_quasi(rat(2, 5));
        let (pt, p) = periodize_transform(&f, &rat(-3, 5)).unwrap();
        assert_eq!(p.alpha, rat(0, 1));
        assert_eq!(p.scale, rat(1, 1));
        assert_eq!(pt.as_quasi(), &f);
    }

    #[test]
    fn round_trip_with_linear_part() {
        let f = forward_fixture(rat(-1, 2), rat(2, 1));
        assert!(f.shift().is_positive());
        let problem = GroupProblem::truncated(&rat(-1, 2)).unwrap();
        assert!(check_strongly_minimal(&f, &problem).unwrap().is_strongly_minimal);
        let (pt, p) = periodize_transform(&f, &rat(-1, 2)).unwrap();
        assert!(p.alpha.is_positive());
        assert!(check_symmetric(&pt, &p.b_tilde()).is_symmetric);
        let back = inverse_transform(&pt, &p).unwrap();
        assert_eq!(back, f);
        assert_eq!(sup_distance_quasi(&back, &f).unwrap(), rat(0, 1));
    }

    #[test]
    fn transform_rejections() {
        let f = gmi_quasi(rat(2, 5));
        let neg = f.scale_add_linear(&rat(1, 1), &rat(-1, 10));
        assert!(periodize_transform(&neg, &rat(-3, 5)).is_err());
        assert!(TransformParams::new(rat(1, 2), rat(0, 1), rat(-1, 1)).is_err());
        assert!(TransformParams::new(rat(1, 2), rat(0, 1), rat(-1, 2)).is_err());
        // GMI for 2/5 is not minimal for -1/2 + ℤ₊
        assert!(matches!(
            periodize_transform(&f, &rat(-1, 2)),
            Err(Error::NotStronglyMinimal(_))
        ));
    }

    #[test]
    fn eps_prime_substitution() {
        let f = forward_fixture(rat(-1, 2), rat(2, 1));
        let (b, m, eps) = (rat(-1, 2), rat(2, 1), rat(1, 10));
        let e = choose_eps_prime(&f, &b, &m, &eps).unwrap();
        let bound = f.max_abs_on_interval(&m).unwrap();
        assert!(eps_prime_holds(&bound, &b, &m, &eps, &e));
        assert!(!eps_prime_holds(&bound, &b, &m, &eps, &(&e * rat(2, 1))) || e == eps);
        assert!(rat(1, 1) + &e * &b >= rat(1, 2));

        let big = choose_eps_prime(&f, &b, &m, &rat(1000, 1)).unwrap();
        assert!(rat(1, 1) + &big * &b >= rat(1, 2));
    }

    #[test]
    fn correction_is_identity_when_value_vanishes() {
        let f = gmi_quasi(rat(2, 5));
        assert_eq!(correct_at_minus_one(&f, &rat(-3, 5)).unwrap(), f);
    }

    #[test]
    fn pipeline_on_periodic_gmi() {
        let f = gmi_quasi(rat(2, 5));
        let b = rat(-3, 5);
        let out = approximate_extreme_zplus(&f, &b, &rat(3, 1), &rat(1, 10)).unwrap();
        let p = GroupProblem::truncated(&b).unwrap();
        assert!(certify_extreme_two_slope(&out.pistar, &p));
        assert!(out.report.distance_on_interval <= rat(1, 10));
        assert_eq!(out.pistar.eval(&rat(-1, 1)), rat(0, 1));
    }

    #[test]
    fn pipeline_on_forward_fixture() {
        let b = rat(-1, 2);
        let f = forward_fixture(b.clone(), rat(2, 1));
        let out = approximate_extreme_zplus(&f, &b, &rat(1, 1), &rat(1, 10)).unwrap();
        assert!(out.report.params.alpha.is_positive());
        assert!(certify_extreme_two_slope(&out.pistar, &GroupProblem::truncated(&b).unwrap()));
        assert!(out.report.distance_on_interval <= rat(1, 10));
        assert!(out.report.distance_piprime <= out.report.eps_prime);
    }

    #[test]
    fn zero_radius() {
        let f = gmi_quasi(rat(2, 5));
        let out = approximate_extreme_zplus(&f, &rat(-3, 5), &rat(0, 1), &rat(1, 10)).unwrap();
        assert_eq!(out.report.distance_on_interval, rat(0, 1));
    }
}
