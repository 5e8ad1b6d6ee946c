//! Continuous piecewise-linear functions on the real line, periodic or
//! quasi-periodic, with exact rational breakpoints.

use std::collections::BTreeSet;
use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserializer, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{denominator_lcm, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub x: Rational,
    pub y: Rational,
}

impl Node {
    pub fn new(x: Rational, y: Rational) -> Self {
        Node { x, y }
    }
}

/// φ with φ(r + d) = φ(r) + c, given by its nodes on `[0, d)`.
///
/// The last piece runs from the last node to `(d, y₀ + c)`. Nodes are kept in
/// normalized form: the node at 0 is always present and no other node is
/// collinear with its neighbours, so two functions are equal iff their
/// representations are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuasiPeriodicPwl {
    period: Rational,
    shift: Rational,
    nodes: Vec<Node>,
}

impl QuasiPeriodicPwl {
    pub fn new(period: Rational, shift: Rational, nodes: Vec<Node>) -> Result<Self> {
        let f = Self::new_unnormalized(period, shift, nodes)?;
        Ok(f.normalized())
    }

    /// Validates without removing collinear nodes.
    pub(crate) fn new_unnormalized(
        period: Rational,
        shift: Rational,
        nodes: Vec<Node>,
    ) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidFunction(format!(
                "period must be positive, got {period}"
            )));
        }
        match nodes.first() {
            None => return Err(Error::InvalidFunction("no breakpoints".into())),
            Some(n) if !n.x.is_zero() => {
                return Err(Error::InvalidFunction(format!(
                    "first breakpoint must be at 0, got {}",
                    n.x
                )))
            }
            _ => {}
        }
        for w in nodes.windows(2) {
            if w[0].x >= w[1].x {
                return Err(Error::InvalidFunction(format!(
                    "breakpoints must be strictly increasing ({} then {})",
                    w[0].x, w[1].x
                )));
            }
        }
        let last = &nodes[nodes.len() - 1].x;
        if last >= &period {
            return Err(Error::InvalidFunction(format!(
                "breakpoint {last} is not below the period {period}"
            )));
        }
        Ok(QuasiPeriodicPwl {
            period,
            shift,
            nodes,
        })
    }

    pub fn from_points(period: Rational, shift: Rational, points: &[(Rational, Rational)]) -> Result<Self> {
        let nodes = points
            .iter()
            .map(|(x, y)| Node::new(x.clone(), y.clone()))
            .collect();
        Self::new(period, shift, nodes)
    }

    pub fn normalized(mut self) -> Self {
        let end = Node::new(self.period.clone(), &self.nodes[0].y + &self.shift);
        let mut kept: Vec<Node> = Vec::with_capacity(self.nodes.len());
        let nodes = std::mem::take(&mut self.nodes);
        let len = nodes.len();
        let mut iter = nodes.into_iter().peekable();
        let mut idx = 0;
        while let Some(node) = iter.next() {
            if idx > 0 {
                let prev = kept.last().expect("node 0 is kept");
                let next = iter.peek().unwrap_or(&end);
                let collinear = (&node.y - &prev.y) * (&next.x - &node.x)
                    == (&next.y - &node.y) * (&node.x - &prev.x);
                if collinear {
                    idx += 1;
                    continue;
                }
            }
            kept.push(node);
            idx += 1;
        }
        debug_assert!(idx == len);
        self.nodes = kept;
        self
    }

    pub fn period(&self) -> &Rational {
        &self.period
    }

    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.nodes.iter().map(|n| &n.x)
    }

    /// `(x, y)` of the right end of segment `i` (the wrap node for the last one).
    fn segment_end(&self, i: usize) -> (Rational, Rational) {
        match self.nodes.get(i + 1) {
            Some(n) => (n.x.clone(), n.y.clone()),
            None => (self.period.clone(), &self.nodes[0].y + &self.shift),
        }
    }

    /// Slope of the affine piece starting at node `i`.
    pub fn segment_slope(&self, i: usize) -> Rational {
        let (x1, y1) = self.segment_end(i);
        let n = &self.nodes[i];
        (y1 - &n.y) / (x1 - &n.x)
    }

    pub fn segment_slopes(&self) -> Vec<Rational> {
        (0..self.nodes.len()).map(|i| self.segment_slope(i)).collect()
    }

    pub fn slope_set(&self) -> BTreeSet<Rational> {
        self.segment_slopes().into_iter().collect()
    }

    /// One-sided slopes at the origin: `(s₊, s₋)` with `s₊` from the right.
    pub fn origin_slopes(&self) -> (Rational, Rational) {
        (self.segment_slope(0), self.segment_slope(self.nodes.len() - 1))
    }

    /// Value on the base period `[0, d)`.
    fn eval_base(&self, t: &Rational) -> Rational {
        let i = self.nodes.partition_point(|n| &n.x <= t) - 1;
        let n = &self.nodes[i];
        if &n.x == t {
            return n.y.clone();
        }
        let (x1, y1) = self.segment_end(i);
        &n.y + (y1 - &n.y) * (t - &n.x) / (x1 - &n.x)
    }

    pub fn eval(&self, r: &Rational) -> Rational {
        let k = r.div_floor(&self.period);
        if k.is_zero() {
            return self.eval_base(r);
        }
        let k = Rational::from_integer(k);
        let t = r - &(&self.period * &k);
        self.eval_base(&t) + &self.shift * &k
    }

    /// `r ↦ k·f(r) + l·r`.
    pub fn scale_add_linear(&self, k: &Rational, l: &Rational) -> Self {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node::new(n.x.clone(), k * &n.y + l * &n.x))
            .collect();
        let shift = k * &self.shift + l * &self.period;
        QuasiPeriodicPwl {
            period: self.period.clone(),
            shift,
            nodes,
        }
        .normalized()
    }

    /// `r ↦ f(λ·r)` for `λ > 0`; the period becomes `d/λ`.
    pub fn compose_scale(&self, lambda: &Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::OutOfRange(format!(
                "domain scale must be positive, got {lambda}"
            )));
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node::new(&n.x / lambda, n.y.clone()))
            .collect();
        Ok(QuasiPeriodicPwl {
            period: &self.period / lambda,
            shift: self.shift.clone(),
            nodes,
        })
    }

    /// The same function written over `k` consecutive base periods.
    pub fn unroll(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut nodes = Vec::with_capacity(self.nodes.len() * k);
        for j in 0..k {
            let jr = Rational::from(j as u64);
            let dx = &self.period * &jr;
            let dy = &self.shift * &jr;
            nodes.extend(
                self.nodes
                    .iter()
                    .map(|n| Node::new(&n.x + &dx, &n.y + &dy)),
            );
        }
        let kr = Rational::from(k as u64);
        QuasiPeriodicPwl {
            period: &self.period * &kr,
            shift: &self.shift * &kr,
            nodes,
        }
        .normalized()
    }

    /// Converts to a period-1 periodic function when that is the same
    /// function: `c = 0` and `1/d` a positive integer.
    pub fn to_unit_periodic(&self) -> Result<PwlPeriodic> {
        if !self.shift.is_zero() {
            return Err(Error::VariantMismatch(format!(
                "function has nonzero shift {} and is not periodic",
                self.shift
            )));
        }
        let reps = self.period.recip();
        if !reps.is_integer() {
            return Err(Error::VariantMismatch(format!(
                "period {} does not divide 1",
                self.period
            )));
        }
        let k = reps.numer().to_usize().ok_or_else(|| {
            Error::OutOfRange(format!("period {} is too small to unroll", self.period))
        })?;
        Ok(PwlPeriodic(self.unroll(k)))
    }

    /// `a·f + b·g` for functions with equal periods.
    pub fn linear_combination(
        &self,
        a: &Rational,
        other: &QuasiPeriodicPwl,
        b: &Rational,
    ) -> Result<Self> {
        if self.period != other.period {
            return Err(self.mismatch(other));
        }
        let xs = merge_sorted(self.breakpoints(), other.breakpoints());
        let nodes = xs
            .into_iter()
            .map(|x| {
                let y = a * self.eval_base(&x) + b * other.eval_base(&x);
                Node::new(x, y)
            })
            .collect();
        Ok(QuasiPeriodicPwl {
            period: self.period.clone(),
            shift: a * &self.shift + b * &other.shift,
            nodes,
        }
        .normalized())
    }

    fn mismatch(&self, other: &QuasiPeriodicPwl) -> Error {
        Error::PeriodMismatch {
            d1: self.period.clone(),
            c1: self.shift.clone(),
            d2: other.period.clone(),
            c2: other.shift.clone(),
        }
    }

    /// Smallest value over one period (attained at a node, counting the wrap node).
    pub fn min_over_period(&self) -> Rational {
        let wrap = &self.nodes[0].y + &self.shift;
        self.nodes
            .iter()
            .map(|n| &n.y)
            .fold(wrap.clone(), |m, y| if y < &m { y.clone() } else { m })
    }

    /// Exact `f(r) ≥ 0` for every `r ≥ 0`.
    pub fn nonnegative_on_halfline(&self) -> bool {
        !self.shift.is_negative() && !self.min_over_period().is_negative()
    }

    /// Breakpoints of `f` inside `[lo, hi]`, unrolled over the periods that
    /// meet the interval.
    pub fn breakpoints_in(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        if lo > hi {
            return out;
        }
        let k0 = lo.div_floor(&self.period);
        let k1 = hi.div_floor(&self.period);
        let mut k = k0;
        while k <= k1 {
            let off = &self.period * &Rational::from_integer(k.clone());
            for n in &self.nodes {
                let x = &n.x + &off;
                if &x >= lo && &x <= hi {
                    out.push(x);
                }
            }
            k += BigInt::one();
        }
        out
    }

    /// `max |f|` over `[−M, M]`.
    pub fn max_abs_on_interval(&self, m: &Rational) -> Result<Rational> {
        if m.is_negative() {
            return Err(Error::OutOfRange(format!("M must be nonnegative, got {m}")));
        }
        let lo = -m;
        let mut pts = self.breakpoints_in(&lo, m);
        pts.push(lo);
        pts.push(m.clone());
        Ok(pts
            .iter()
            .map(|x| self.eval(x).abs())
            .max()
            .expect("interval endpoints are present"))
    }
}

fn merge_sorted<'a>(
    a: impl Iterator<Item = &'a Rational>,
    b: impl Iterator<Item = &'a Rational>,
) -> Vec<Rational> {
    let set: BTreeSet<&Rational> = a.chain(b).collect();
    set.into_iter().cloned().collect()
}

/// A continuous piecewise-linear function periodic modulo 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PwlPeriodic(QuasiPeriodicPwl);

impl Deref for PwlPeriodic {
    type Target = QuasiPeriodicPwl;
    fn deref(&self) -> &QuasiPeriodicPwl {
        &self.0
    }
}

impl PwlPeriodic {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        QuasiPeriodicPwl::new(Rational::one(), Rational::zero(), nodes).map(PwlPeriodic)
    }

    pub fn from_points(points: &[(Rational, Rational)]) -> Result<Self> {
        QuasiPeriodicPwl::from_points(Rational::one(), Rational::zero(), points).map(PwlPeriodic)
    }

    /// Accepts a quasi-periodic function that already has period 1 and shift 0.
    pub fn try_from_quasi(f: QuasiPeriodicPwl) -> Result<Self> {
        if f.period == Rational::one() && f.shift.is_zero() {
            Ok(PwlPeriodic(f))
        } else {
            Err(Error::VariantMismatch(format!(
                "expected period 1 and shift 0, got period {} and shift {}",
                f.period, f.shift
            )))
        }
    }

    /// The Gomory mixed-integer function for `b + ℤ`: rises linearly from 0
    /// to 1 on `[0, b]` and falls back on `[b, 1]`.
    pub fn gmi(b: &Rational) -> Result<Self> {
        if b.is_integer() {
            return Err(Error::OutOfRange(format!("b must not be an integer, got {b}")));
        }
        let b = b.fract();
        Self::from_points(&[
            (Rational::zero(), Rational::zero()),
            (b, Rational::one()),
        ])
    }

    pub fn zero_function() -> Self {
        Self::from_points(&[(Rational::zero(), Rational::zero())]).expect("valid")
    }

    pub fn as_quasi(&self) -> &QuasiPeriodicPwl {
        &self.0
    }

    pub fn into_quasi(self) -> QuasiPeriodicPwl {
        self.0
    }

    /// `r ↦ k·f(r)`.
    pub fn scale(&self, k: &Rational) -> Self {
        PwlPeriodic(self.0.scale_add_linear(k, &Rational::zero()))
    }

    /// `a·f + b·g`.
    pub fn combine(&self, a: &Rational, other: &PwlPeriodic, b: &Rational) -> Self {
        PwlPeriodic(
            self.0
                .linear_combination(a, &other.0, b)
                .expect("both functions have period 1"),
        )
    }

    /// `(1 − t)·f + t·g`.
    pub fn convex_combination(&self, other: &PwlPeriodic, t: &Rational) -> Self {
        self.combine(&(Rational::one() - t), other, t)
    }
}

/// Claimed values of a function on `{0, 1/q, …, (q−1)/q}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridFunction {
    q: usize,
    values: Vec<Rational>,
}

impl GridFunction {
    pub fn new(q: usize, values: Vec<Rational>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidFunction("grid size q must be positive".into()));
        }
        if values.len() != q {
            return Err(Error::InvalidFunction(format!(
                "grid of size {q} needs {q} values, got {}",
                values.len()
            )));
        }
        Ok(GridFunction { q, values })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn interpolate(&self) -> PwlPeriodic {
        let q = self.q as i64;
        let nodes = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| Node::new(Rational::new(i as i64, q), v.clone()))
            .collect();
        PwlPeriodic::new(nodes).expect("grid nodes are valid")
    }

    /// Samples `f` on `(1/q)ℤ`.
    pub fn sample(f: &PwlPeriodic, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::OutOfRange("q must be positive".into()));
        }
        let qi = q as i64;
        let values = (0..qi).map(|i| f.eval(&Rational::new(i, qi))).collect();
        Ok(GridFunction { q, values })
    }
}

/// Periodic input given either as a function or as grid data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodicSource {
    Pwl(PwlPeriodic),
    Grid(GridFunction),
}

impl PeriodicSource {
    pub fn to_pwl(&self) -> PwlPeriodic {
        match self {
            PeriodicSource::Pwl(f) => f.clone(),
            PeriodicSource::Grid(g) => g.interpolate(),
        }
    }
}

/// Piecewise-linear interpolation of `source` restricted to `(1/q)ℤ`.
pub fn restrict_and_interpolate(source: &PeriodicSource, q: usize) -> Result<PwlPeriodic> {
    match source {
        PeriodicSource::Pwl(f) => Ok(GridFunction::sample(f, q)?.interpolate()),
        PeriodicSource::Grid(g) => {
            if g.q != q {
                return Err(Error::OutOfRange(format!(
                    "grid has q = {}, requested q = {q}",
                    g.q
                )));
            }
            Ok(g.interpolate())
        }
    }
}

/// Exact `‖f − g‖_∞` for period-1 functions.
pub fn sup_distance(f: &PwlPeriodic, g: &PwlPeriodic) -> Rational {
    merged_max_abs_diff(f, g)
}

/// Exact `‖f − g‖_∞` for quasi-periodic functions with the same period and shift.
pub fn sup_distance_quasi(f: &QuasiPeriodicPwl, g: &QuasiPeriodicPwl) -> Result<Rational> {
    if f.period != g.period || f.shift != g.shift {
        return Err(f.mismatch(g));
    }
    Ok(merged_max_abs_diff(f, g))
}

fn merged_max_abs_diff(f: &QuasiPeriodicPwl, g: &QuasiPeriodicPwl) -> Rational {
    merge_sorted(f.breakpoints(), g.breakpoints())
        .iter()
        .map(|x| (f.eval_base(x) - g.eval_base(x)).abs())
        .max()
        .unwrap_or_default()
}

/// Exact `max |f − g|` over `[−M, M]`.
pub fn distance_on_interval(
    f: &QuasiPeriodicPwl,
    g: &QuasiPeriodicPwl,
    m: &Rational,
) -> Result<Rational> {
    if m.is_negative() {
        return Err(Error::OutOfRange(format!("M must be nonnegative, got {m}")));
    }
    let lo = -m;
    let mut pts: BTreeSet<Rational> = f.breakpoints_in(&lo, m).into_iter().collect();
    pts.extend(g.breakpoints_in(&lo, m));
    pts.insert(lo);
    pts.insert(m.clone());
    Ok(pts
        .iter()
        .map(|x| (f.eval(x) - g.eval(x)).abs())
        .max()
        .expect("endpoints are present"))
}

/// Least common multiple of the breakpoint denominators.
pub fn breakpoint_denominator_lcm(f: &QuasiPeriodicPwl) -> BigInt {
    denominator_lcm(f.breakpoints())
}

/// Tagged JSON form shared by every function kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCutFunction", into = "RawCutFunction")]
pub enum CutFunction {
    Periodic(PwlPeriodic),
    QuasiPeriodic(QuasiPeriodicPwl),
    Grid(GridFunction),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawCutFunction {
    Periodic {
        breakpoints: Vec<Node>,
    },
    QuasiPeriodic {
        period: Rational,
        shift: Rational,
        breakpoints: Vec<Node>,
    },
    Grid {
        q: usize,
        values: Vec<Rational>,
    },
}

impl TryFrom<RawCutFunction> for CutFunction {
    type Error = Error;

    fn try_from(raw: RawCutFunction) -> Result<Self> {
        Ok(match raw {
            RawCutFunction::Periodic { breakpoints } => {
                CutFunction::Periodic(PwlPeriodic::new(breakpoints)?)
            }
            RawCutFunction::QuasiPeriodic {
                period,
                shift,
                breakpoints,
            } => CutFunction::QuasiPeriodic(QuasiPeriodicPwl::new(period, shift, breakpoints)?),
            RawCutFunction::Grid { q, values } => CutFunction::Grid(GridFunction::new(q, values)?),
        })
    }
}

impl From<CutFunction> for RawCutFunction {
    fn from(f: CutFunction) -> Self {
        match f {
            CutFunction::Periodic(p) => RawCutFunction::Periodic {
                breakpoints: p.0.nodes,
            },
            CutFunction::QuasiPeriodic(q) => RawCutFunction::QuasiPeriodic {
                period: q.period,
                shift: q.shift,
                breakpoints: q.nodes,
            },
            CutFunction::Grid(g) => RawCutFunction::Grid {
                q: g.q,
                values: g.values,
            },
        }
    }
}

impl CutFunction {
    /// The represented function as quasi-periodic (grid data is interpolated).
    pub fn to_quasi(&self) -> QuasiPeriodicPwl {
        match self {
            CutFunction::Periodic(p) => p.0.clone(),
            CutFunction::QuasiPeriodic(q) => q.clone(),
            CutFunction::Grid(g) => g.interpolate().0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CutFunction::Periodic(_) => "periodic",
            CutFunction::QuasiPeriodic(_) => "quasi_periodic",
            CutFunction::Grid(_) => "grid",
        }
    }
}

impl From<PwlPeriodic> for CutFunction {
    fn from(f: PwlPeriodic) -> Self {
        CutFunction::Periodic(f)
    }
}

impl From<QuasiPeriodicPwl> for CutFunction {
    fn from(f: QuasiPeriodicPwl) -> Self {
        CutFunction::QuasiPeriodic(f)
    }
}

impl From<GridFunction> for CutFunction {
    fn from(f: GridFunction) -> Self {
        CutFunction::Grid(f)
    }
}

impl Serialize for PwlPeriodic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawCutFunction::from(CutFunction::Periodic(self.clone())).serialize(serializer)
    }
}

impl Serialize for QuasiPeriodicPwl {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawCutFunction::from(CutFunction::QuasiPeriodic(self.clone())).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PwlPeriodic {
    /// Accepts any kind that denotes a period-1 function; grid data is interpolated.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let f = CutFunction::deserialize(deserializer)?;
        match f {
            CutFunction::Periodic(p) => Ok(p),
            CutFunction::Grid(g) => Ok(g.interpolate()),
            CutFunction::QuasiPeriodic(q) => {
                PwlPeriodic::try_from_quasi(q).map_err(serde::de::Error::custom)
            }
        }
    }
}

impl<'de> Deserialize<'de> for QuasiPeriodicPwl {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(CutFunction::deserialize(deserializer)?.to_quasi())
    }
}
