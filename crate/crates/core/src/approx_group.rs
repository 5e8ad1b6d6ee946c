//! Approximation of a strongly minimal function for `b + ℤ` by an extreme
//! 2-slope function: interpolation, an equality-reducing perturbation, and a
//! symmetric 2-slope fill-in.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{stage, Error, Result};
use crate::minimality::{
    check_strongly_minimal, check_subadditive, complex_vertices, min_slack_in_window,
    GroupProblem, MinimalityReport, SlackVertex, VertexWindow,
};
use crate::pwl::{breakpoint_denominator_lcm, sup_distance, Node, PeriodicSource, PwlPeriodic};
use crate::rational::{denominator_lcm, Rational};

/// The border strips `E_δ` and the diagonal strips `E_b`, `E_{1+b}` in `[0, 1]²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EqualityRegions {
    pub delta: Rational,
    pub b: Rational,
}

impl EqualityRegions {
    pub fn new(delta: Rational, b: Rational) -> Self {
        EqualityRegions { delta, b }
    }

    pub fn in_border(&self, x: &Rational, y: &Rational) -> bool {
        let one = Rational::one();
        let hi = &one - &self.delta;
        let near = |t: &Rational| (!t.is_negative() && t <= &self.delta) || (t >= &hi && t <= &one);
        near(x) || near(y)
    }

    fn in_strip(&self, x: &Rational, y: &Rational, centre: &Rational) -> bool {
        let s = x + y;
        s >= centre - &self.delta && s <= centre + &self.delta
    }

    pub fn in_diagonal_b(&self, x: &Rational, y: &Rational) -> bool {
        self.in_strip(x, y, &self.b)
    }

    pub fn in_diagonal_1b(&self, x: &Rational, y: &Rational) -> bool {
        self.in_strip(x, y, &(&self.b + Rational::one()))
    }

    /// Membership in `E_δ ∪ E_b ∪ E_{1+b}` for `(x, y) ∈ [0, 1]²`.
    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        self.in_border(x, y) || self.in_diagonal_b(x, y) || self.in_diagonal_1b(x, y)
    }

    /// Closure of `[0, 1]²` minus the regions.
    pub fn complement_window(&self) -> VertexWindow {
        let one = Rational::one();
        let d = &self.delta;
        let b1 = &self.b + &one;
        VertexWindow {
            lo: d.clone(),
            hi: &one - d,
            open_gaps: vec![(&self.b - d, &self.b + d), (&b1 - d, &b1 + d)],
        }
    }

    /// Breakpoints that make the closed complement a union of complex cells.
    pub fn boundary_points(&self) -> Vec<Rational> {
        let one = Rational::one();
        let d = &self.delta;
        vec![d.clone(), &one - d, &self.b - d, &self.b + d]
    }
}

/// `π_δ`: the six-piece strongly minimal function with breakpoints
/// `0, δ, b − δ, b, b + δ, 1 − δ`.
pub fn build_pi_delta(b: &Rational, delta: &Rational) -> Result<PwlPeriodic> {
    let zero = Rational::zero();
    let one = Rational::one();
    if b <= &zero || b >= &one {
        return Err(Error::OutOfRange(format!("b must lie in (0, 1), got {b}")));
    }
    let two = Rational::from(2);
    let bound = Rational::min_of(&(b / &two), &((&one - b) / &two)).clone();
    if delta <= &zero || delta >= &bound {
        return Err(Error::OutOfRange(format!(
            "delta must lie in (0, {bound}), got {delta}"
        )));
    }
    let half = Rational::new(1, 2);
    PwlPeriodic::from_points(&[
        (zero, Rational::zero()),
        (delta.clone(), half.clone()),
        (b - delta, half.clone()),
        (b.clone(), one.clone()),
        (b + delta, half.clone()),
        (&one - delta, half),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionOutput {
    pub pi_comb: PwlPeriodic,
    pub pi_delta: PwlPeriodic,
    pub delta: Rational,
    /// Minimum slack of `pi_comb` over the closed complement of the regions.
    pub gamma: Rational,
    pub gamma_vertex: SlackVertex,
    pub distance: Rational,
    pub regions: EqualityRegions,
}

fn check_b_unit(b: &Rational) -> Result<()> {
    if !b.is_positive() || b >= &Rational::one() {
        return Err(Error::OutOfRange(format!("b must lie in (0, 1), got {b}")));
    }
    Ok(())
}

fn require_strongly_minimal(f: &PwlPeriodic, b: &Rational) -> Result<MinimalityReport> {
    let report = check_strongly_minimal(f, &GroupProblem::affine(b)?)?;
    if !report.is_strongly_minimal {
        return Err(Error::NotStronglyMinimal(describe_failure(&report)));
    }
    Ok(report)
}

pub(crate) fn describe_failure(r: &MinimalityReport) -> String {
    let mut parts = Vec::new();
    if !r.boundary_conditions_hold {
        parts.push("boundary conditions fail".to_string());
    }
    if let Some(w) = &r.subadditivity_witness {
        parts.push(format!(
            "negative slack {} at ({}, {})",
            w.slack, w.x, w.y
        ));
    }
    if let Some(w) = &r.symmetry_witness {
        parts.push(format!("symmetry fails at r = {w}"));
    }
    if parts.is_empty() {
        parts.push("unknown".into());
    }
    parts.join("; ")
}

/// `δ = ½·min{u_min, 1 − u_max, b/2, (1 − b)/2}` for the breakpoints of `pi`.
pub fn choose_delta(pi: &PwlPeriodic, b: &Rational) -> Rational {
    let one = Rational::one();
    let two = Rational::from(2);
    let mut m = Rational::min_of(&(b / &two), &((&one - b) / &two)).clone();
    if let (Some(first), Some(last)) = (pi.nodes().get(1), pi.nodes().last()) {
        m = Rational::min_of(&m, &first.x).clone();
        m = Rational::min_of(&m, &(&one - &last.x)).clone();
    }
    m / two
}

/// `π_comb = (1 − ε)·π + ε·π_δ` with `γ` computed exactly.
pub fn equality_reduce(pi: &PwlPeriodic, b: &Rational, eps: &Rational) -> Result<ReductionOutput> {
    check_b_unit(b)?;
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::OutOfRange(format!("eps must lie in (0, 1), got {eps}")));
    }
    require_strongly_minimal(pi, b)?;
    let delta = choose_delta(pi, b);
    let pi_delta = build_pi_delta(b, &delta)?;
    let pi_comb = pi.convex_combination(&pi_delta, eps);
    let regions = EqualityRegions::new(delta.clone(), b.clone());
    let gamma_vertex = min_slack_in_window(
        &pi_comb,
        &regions.boundary_points(),
        &regions.complement_window(),
    )
    .ok_or_else(|| stage("equality reduction", "no complex vertex outside the regions"))?;
    if !gamma_vertex.slack.is_positive() {
        return Err(stage(
            "equality reduction",
            format!(
                "slack {} at ({}, {}) outside the equality regions",
                gamma_vertex.slack, gamma_vertex.x, gamma_vertex.y
            ),
        ));
    }
    let distance = sup_distance(pi, &pi_comb);
    if &distance > eps {
        return Err(stage(
            "equality reduction",
            format!("distance {distance} exceeds {eps}"),
        ));
    }
    Ok(ReductionOutput {
        pi_comb,
        pi_delta,
        gamma: gamma_vertex.slack.clone(),
        gamma_vertex,
        delta,
        distance,
        regions,
    })
}

/// Complex vertices of `f` with zero slack that fall outside `regions`.
pub fn zero_slack_vertices_outside(f: &PwlPeriodic, regions: &EqualityRegions) -> Vec<SlackVertex> {
    complex_vertices(f)
        .into_iter()
        .filter(|v| v.slack.is_zero() && !regions.contains(&v.x, &v.y))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillIn {
    pub pi_fillin: PwlPeriodic,
    pub q: u64,
    pub s_plus: Rational,
    pub s_minus: Rational,
}

fn origin_slopes_checked(f: &PwlPeriodic) -> Result<(Rational, Rational)> {
    let (s_plus, s_minus) = f.origin_slopes();
    if !s_plus.is_positive() || !s_minus.is_negative() {
        return Err(Error::DegenerateSlopes { s_plus, s_minus });
    }
    Ok((s_plus, s_minus))
}

/// Lcm of the denominators of the breakpoints, `b/2` and `(1 + b)/2`.
fn grid_base(f: &PwlPeriodic, b: &Rational) -> BigInt {
    let two = Rational::from(2);
    let halves = [b / &two, (b + Rational::one()) / &two];
    breakpoint_denominator_lcm(f).lcm(&denominator_lcm(halves.iter()))
}

/// Smallest multiple `q` of `base` with `max{s₊, |s₋|}/q < tol/2`.
fn grid_size_for(base: &BigInt, s: &Rational, tol: &Rational) -> BigInt {
    let base_r = Rational::from_integer(base.clone());
    let k = (Rational::from(2) * s / (tol * &base_r)).floor() + BigInt::one();
    base * k
}

/// The 2-slope fill-in of `pi_comb` on `(1/q)ℤ` with `q` chosen so that the
/// grid contains every breakpoint, `b/2` and `(1 + b)/2`, and
/// `max{s₊, |s₋|}/q < eps/2`.
pub fn two_slope_fill_in(pi_comb: &PwlPeriodic, b: &Rational, eps: &Rational) -> Result<FillIn> {
    check_b_unit(b)?;
    if !eps.is_positive() {
        return Err(Error::OutOfRange(format!("eps must be positive, got {eps}")));
    }
    let (s_plus, s_minus) = origin_slopes_checked(pi_comb)?;
    let s = Rational::max(s_plus.clone(), s_minus.abs());
    let q = grid_size_for(&grid_base(pi_comb, b), &s, eps);
    let q = q
        .to_u64()
        .ok_or_else(|| Error::OutOfRange(format!("grid size {q} is too large")))?;
    let pi_fillin = fill_in_on_grid(pi_comb, q, &s_plus, &s_minus)?;
    Ok(FillIn {
        pi_fillin,
        q,
        s_plus,
        s_minus,
    })
}

/// `r ↦ min_{u ∈ (1/q)ℤ} φ(u) + g(r − u)` with `g(t) = max(s₊t, s₋t)`.
///
/// On the cell `[kh, (k+1)h]` the minimum is the lower envelope of a rising
/// line from the best left source and a falling line from the best right
/// source; both are found with one cyclic sweep each.
pub fn fill_in_on_grid(
    phi: &PwlPeriodic,
    q: u64,
    s_plus: &Rational,
    s_minus: &Rational,
) -> Result<PwlPeriodic> {
    if q == 0 {
        return Err(Error::OutOfRange("q must be positive".into()));
    }
    if !s_plus.is_positive() || !s_minus.is_negative() {
        return Err(Error::DegenerateSlopes {
            s_plus: s_plus.clone(),
            s_minus: s_minus.clone(),
        });
    }
    let n = usize::try_from(q).map_err(|_| Error::OutOfRange(format!("q = {q} is too large")))?;
    let qi = BigInt::from(q);
    let h = Rational::from_bigints(BigInt::one(), qi.clone());
    let at = |k: usize| Rational::from_bigints(BigInt::from(k), qi.clone());
    let values: Vec<Rational> = (0..n).map(|k| phi.eval(&at(k))).collect();

    let rise = s_plus * &h;
    let fall = -(s_minus * &h);
    // left[k]: min over sources u ≤ kh of φ(u) + s₊(kh − u)
    let mut left = vec![Rational::zero(); n];
    let mut cur = values[0].clone();
    for step in 1..2 * n + 1 {
        let k = step % n;
        let cand = &cur + &rise;
        cur = if values[k] < cand { values[k].clone() } else { cand };
        if step > n {
            left[k] = cur.clone();
        }
    }
    // right[k]: min over sources u ≥ kh of φ(u) + |s₋|(u − kh)
    let mut right = vec![Rational::zero(); n];
    let mut cur = values[0].clone();
    for step in 1..2 * n + 1 {
        let k = (2 * n - step) % n;
        let cand = &cur + &fall;
        cur = if values[k] < cand { values[k].clone() } else { cand };
        if step > n {
            right[k] = cur.clone();
        }
    }

    let width = s_plus - s_minus;
    let mut nodes = Vec::with_capacity(2 * n);
    for k in 0..n {
        let x = at(k);
        let l = &left[k];
        let r_next = &right[(k + 1) % n];
        let at_start = Rational::min_of(l, &(r_next + &fall)).clone();
        nodes.push(Node::new(x.clone(), at_start));
        let t = (r_next - l - s_minus * &h) / &width;
        if t.is_positive() && t < h {
            let y = l + s_plus * &t;
            nodes.push(Node::new(x + t, y));
        }
    }
    PwlPeriodic::new(nodes)
}

/// `π_sym(r) = f(r)` on `[0, b/2] ∪ [(1+b)/2, 1]` and `1 − f(b − r)` between.
pub fn symmetrize(f: &PwlPeriodic, b: &Rational) -> Result<PwlPeriodic> {
    check_b_unit(b)?;
    let one = Rational::one();
    let half = Rational::new(1, 2);
    let lo = b / Rational::from(2);
    let hi = (b + &one) / Rational::from(2);
    for p in [&lo, &hi] {
        let v = f.eval(p);
        if v != half {
            return Err(Error::NotOnGrid(format!(
                "value at {p} is {v}, not 1/2; the point is missing from the breakpoint grid"
            )));
        }
    }
    let inner = |r: &Rational| r > &lo && r < &hi;
    let mut xs = std::collections::BTreeSet::new();
    xs.insert(Rational::zero());
    xs.insert(lo.clone());
    xs.insert(hi.clone());
    for x in f.breakpoints() {
        if !inner(x) {
            xs.insert(x.clone());
        }
        let mirrored = (b - x).fract();
        if inner(&mirrored) {
            xs.insert(mirrored);
        }
    }
    let nodes = xs
        .into_iter()
        .map(|r| {
            let y = if inner(&r) { &one - f.eval(&(b - &r)) } else { f.eval(&r) };
            Node::new(r, y)
        })
        .collect();
    PwlPeriodic::new(nodes)
}

/// Exact checks of the fill-in laws on one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillInLaws {
    pub dominates: bool,
    pub agrees_on_grid: bool,
    pub subadditive: bool,
}

impl FillInLaws {
    pub fn all(&self) -> bool {
        self.dominates && self.agrees_on_grid && self.subadditive
    }
}

pub fn fill_in_laws(pi_comb: &PwlPeriodic, pi_fillin: &PwlPeriodic, q: u64) -> FillInLaws {
    let mut xs: std::collections::BTreeSet<&Rational> = pi_comb.breakpoints().collect();
    xs.extend(pi_fillin.breakpoints());
    let dominates = xs.iter().all(|x| pi_fillin.eval(x) >= pi_comb.eval(x));
    let qi = BigInt::from(q);
    let agrees_on_grid = (0..q).all(|k| {
        let u = Rational::from_bigints(BigInt::from(k), qi.clone());
        pi_fillin.eval(&u) == pi_comb.eval(&u)
    });
    FillInLaws {
        dominates,
        agrees_on_grid,
        subadditive: check_subadditive(pi_fillin).is_subadditive,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZReport {
    pub b: Rational,
    pub eps: Rational,
    pub eps_reduce: Rational,
    pub eps_fill: Rational,
    /// `min(eps_fill, γ/4)`; the grid bound below is derived from it.
    pub fill_tolerance: Rational,
    pub delta: Rational,
    pub gamma: Rational,
    pub q: u64,
    /// Grid size that guarantees success for the fill tolerance.
    pub q_bound: u64,
    pub q_tried: Vec<u64>,
    pub s_plus: Rational,
    pub s_minus: Rational,
    pub distance_interpolation: Rational,
    pub distance_reduction: Rational,
    pub distance_fill: Rational,
    pub distance_total: Rational,
    pub breakpoints: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZApproximation {
    pub pistar: PwlPeriodic,
    pub input: PwlPeriodic,
    pub reduction: ReductionOutput,
    pub fill: FillIn,
    pub report: ZReport,
}

/// Extreme 2-slope `π*` with `‖input − π*‖_∞ ≤ eps`.
///
/// The reduction stage gets `eps/3` (capped at 1/2) and the fill-in stage
/// the rest; grid data is interpolated exactly, so the interpolation stage
/// costs nothing. Grids `L·2^k` are tried from coarse to fine up to the
/// bound that guarantees success, and the first one whose symmetrized
/// fill-in verifies is returned.
pub fn approximate_extreme_z(
    input: &PeriodicSource,
    b: &Rational,
    eps: &Rational,
) -> Result<ZApproximation> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange(format!("eps must be positive, got {eps}")));
    }
    let problem = GroupProblem::affine(b)?;
    let b = problem.b().clone();
    let pi = input.to_pwl();
    require_strongly_minimal(&pi, &b)?;

    let eps_reduce = Rational::min_of(&(eps / Rational::from(3)), &Rational::new(1, 2)).clone();
    let eps_fill = eps - &eps_reduce;
    let reduction = equality_reduce(&pi, &b, &eps_reduce)?;
    let pi_comb = &reduction.pi_comb;

    let (s_plus, s_minus) = origin_slopes_checked(pi_comb)?;
    let s = Rational::max(s_plus.clone(), s_minus.abs());
    let fill_tolerance =
        Rational::min_of(&eps_fill, &(&reduction.gamma / Rational::from(4))).clone();
    let base = grid_base(pi_comb, &b);
    let q_bound = grid_size_for(&base, &s, &fill_tolerance);

    let mut candidates = Vec::new();
    let mut q = base.clone();
    while q < q_bound {
        candidates.push(q.clone());
        q *= 2;
    }
    candidates.push(q_bound.clone());
    let to_u64 = |q: &BigInt| {
        q.to_u64()
            .ok_or_else(|| Error::OutOfRange(format!("grid size {q} is too large")))
    };

    let mut tried = Vec::new();
    let mut last_failure = String::new();
    for cand in &candidates {
        let q = to_u64(cand)?;
        tried.push(q);
        let pi_fillin = fill_in_on_grid(pi_comb, q, &s_plus, &s_minus)?;
        let pi_sym = match symmetrize(&pi_fillin, &b) {
            Ok(f) => f,
            Err(e) => {
                last_failure = e.to_string();
                continue;
            }
        };
        let distance_fill = sup_distance(pi_comb, &pi_sym);
        if distance_fill > eps_fill {
            last_failure = format!("q = {q}: distance {distance_fill} exceeds {eps_fill}");
            continue;
        }
        if pi_sym.slope_set().len() != 2 {
            last_failure = format!("q = {q}: {} slopes", pi_sym.slope_set().len());
            continue;
        }
        let report = check_strongly_minimal(&pi_sym, &problem)?;
        if !report.is_strongly_minimal {
            last_failure = format!("q = {q}: {}", describe_failure(&report));
            continue;
        }
        let distance_total = sup_distance(&pi, &pi_sym);
        if &distance_total > eps {
            last_failure = format!("q = {q}: total distance {distance_total} exceeds {eps}");
            continue;
        }
        let breakpoints = pi_sym.nodes().len();
        return Ok(ZApproximation {
            report: ZReport {
                b: b.clone(),
                eps: eps.clone(),
                eps_reduce,
                eps_fill,
                fill_tolerance,
                delta: reduction.delta.clone(),
                gamma: reduction.gamma.clone(),
                q,
                q_bound: to_u64(&q_bound)?,
                q_tried: tried,
                s_plus: s_plus.clone(),
                s_minus: s_minus.clone(),
                distance_interpolation: Rational::zero(),
                distance_reduction: reduction.distance.clone(),
                distance_fill,
                distance_total,
                breakpoints,
            },
            pistar: pi_sym,
            input: pi,
            fill: FillIn {
                pi_fillin,
                q,
                s_plus,
                s_minus,
            },
            reduction,
        });
    }
    Err(stage("fill-in", last_failure))
}
