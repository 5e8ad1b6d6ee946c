//! Slack function, vertex-based subadditivity, symmetry and strong minimality
//! for the one-row problems `b + ℤ` and `b + ℤ₊`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pwl::{Node, PwlPeriodic, QuasiPeriodicPwl};
use crate::rational::{denominator_lcm, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    /// `S = b + ℤ`.
    Affine,
    /// `S = b + ℤ₊` with `b ≤ 0`.
    Truncated,
}

/// The target set `S`. Affine problems store `b` reduced into `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupProblem {
    lattice: Lattice,
    b: Rational,
}

impl GroupProblem {
    pub fn affine(b: &Rational) -> Result<Self> {
        if b.is_integer() {
            return Err(Error::InvalidProblem(format!("b = {b} is an integer")));
        }
        Ok(GroupProblem {
            lattice: Lattice::Affine,
            b: b.fract(),
        })
    }

    pub fn truncated(b: &Rational) -> Result<Self> {
        if b.is_integer() {
            return Err(Error::InvalidProblem(format!("b = {b} is an integer")));
        }
        if b.is_positive() {
            return Err(Error::InvalidProblem(format!(
                "truncated lattice needs b <= 0, got {b}"
            )));
        }
        Ok(GroupProblem {
            lattice: Lattice::Truncated,
            b: b.clone(),
        })
    }

    pub fn new(lattice: Lattice, b: &Rational) -> Result<Self> {
        match lattice {
            Lattice::Affine => Self::affine(b),
            Lattice::Truncated => Self::truncated(b),
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }
}

/// A vertex of the slack complex with its exact slack `Δπ(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SlackVertex {
    pub x: Rational,
    pub y: Rational,
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubadditivityCheck {
    pub is_subadditive: bool,
    /// A vertex of minimum slack when that slack is negative.
    pub witness: Option<SlackVertex>,
    /// A vertex of minimum slack (ties broken by smallest coordinates).
    pub min_vertex: SlackVertex,
    pub vertices_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryCheck {
    pub is_symmetric: bool,
    pub witness: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub problem: GroupProblem,
    pub is_subadditive: bool,
    pub subadditivity_witness: Option<SlackVertex>,
    pub min_slack: Rational,
    pub is_symmetric: bool,
    pub symmetry_witness: Option<Rational>,
    pub boundary_conditions_hold: bool,
    pub is_strongly_minimal: bool,
    pub slope_count: usize,
    /// Only meaningful for the truncated lattice.
    pub nonnegative_on_halfline: Option<bool>,
    pub extreme_certified: bool,
}

/// `Δπ(x, y) = π(x) + π(y) − π(x + y)`.
pub fn slack(f: &QuasiPeriodicPwl, x: &Rational, y: &Rational) -> Rational {
    f.eval(x) + f.eval(y) - f.eval(&(x + y))
}

/// Vertices of the slack complex in `[0, d)²`, sorted, with their slacks.
///
/// These are the `(x, y)` with `x, y ∈ U`, or `x, x + y ∈ U`, or
/// `y, x + y ∈ U`, all modulo the period.
pub fn complex_vertices(f: &QuasiPeriodicPwl) -> Vec<SlackVertex> {
    complex_vertices_with(f, &[])
}

/// As [`complex_vertices`] with `U` enlarged by `extra` (taken modulo the period).
pub fn complex_vertices_with(f: &QuasiPeriodicPwl, extra: &[Rational]) -> Vec<SlackVertex> {
    let d = f.period();
    let mut u: BTreeSet<Rational> = f.breakpoints().cloned().collect();
    u.extend(extra.iter().map(|e| e.rem_euclid(d)));
    let mut pts: BTreeSet<(Rational, Rational)> = BTreeSet::new();
    for a in &u {
        for c in &u {
            pts.insert((a.clone(), c.clone()));
            let y = (c - a).rem_euclid(d);
            pts.insert((a.clone(), y.clone()));
            pts.insert((y, a.clone()));
        }
    }
    pts.into_iter()
        .map(|(x, y)| {
            let s = slack(f, &x, &y);
            SlackVertex { x, y, slack: s }
        })
        .collect()
}

/// Exact subadditivity test on the vertices of the slack complex.
pub fn check_subadditive(f: &QuasiPeriodicPwl) -> SubadditivityCheck {
    let grid = ScaledGrid::from_function(f.period(), f.shift(), f.nodes());
    let (best, count) = grid
        .min_slack(None)
        .expect("the vertex (0, 0) is always present");
    let min_vertex = grid.vertex_to_rational(best);
    let is_subadditive = !min_vertex.slack.is_negative();
    SubadditivityCheck {
        is_subadditive,
        witness: (!is_subadditive).then(|| min_vertex.clone()),
        min_vertex,
        vertices_checked: count,
    }
}

/// Keeps vertices with `x, y ∈ [lo, hi]` and `x + y` outside every open gap.
#[derive(Debug, Clone)]
pub struct VertexWindow {
    pub lo: Rational,
    pub hi: Rational,
    pub open_gaps: Vec<(Rational, Rational)>,
}

impl VertexWindow {
    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        let s = x + y;
        x >= &self.lo
            && x <= &self.hi
            && y >= &self.lo
            && y <= &self.hi
            && self.open_gaps.iter().all(|(a, b)| !(&s > a && &s < b))
    }
}

/// Integer form of a [`VertexWindow`] on a scaled grid (all bounds inclusive).
struct ScaledWindow<T> {
    lo: T,
    hi: T,
    gaps: Vec<(T, T)>,
}

impl<T: Ring> ScaledWindow<T> {
    fn keeps(&self, x: &T, y: &T) -> bool {
        if x < &self.lo || x > &self.hi || y < &self.lo || y > &self.hi {
            return false;
        }
        let s = x.add(y);
        self.gaps.iter().all(|(a, b)| &s < a || &s > b)
    }
}

/// Minimum slack over the complex vertices of `f` (with `U` refined by
/// `extra`) that lie in `window`.
pub fn min_slack_in_window(
    f: &QuasiPeriodicPwl,
    extra: &[Rational],
    window: &VertexWindow,
) -> Option<SlackVertex> {
    let d = f.period();
    let mut nodes: Vec<Node> = f.nodes().to_vec();
    let mut xs: BTreeSet<Rational> = f.breakpoints().cloned().collect();
    for e in extra {
        let e = e.rem_euclid(d);
        if xs.insert(e.clone()) {
            let y = f.eval(&e);
            nodes.push(Node::new(e, y));
        }
    }
    nodes.sort_by(|a, b| a.x.cmp(&b.x));
    let grid = ScaledGrid::from_function(d, f.shift(), &nodes);
    grid.min_slack(Some(window)).map(|(v, _)| grid.vertex_to_rational(v))
}

/// Exact test of `f(r) + f(b − r) = 1` for all `r`.
pub fn check_symmetric(f: &QuasiPeriodicPwl, b: &Rational) -> SymmetryCheck {
    let d = f.period();
    let mut pts: BTreeSet<Rational> = BTreeSet::new();
    for u in f.breakpoints() {
        pts.insert(u.clone());
        pts.insert((b - u).rem_euclid(d));
    }
    let one = Rational::one();
    let witness = pts
        .into_iter()
        .find(|r| f.eval(r) + f.eval(&(b - r)) != one);
    SymmetryCheck {
        is_symmetric: witness.is_none(),
        witness,
    }
}

/// Evaluates the strong-minimality characterization for `problem`.
///
/// For the affine lattice `f` must be periodic modulo 1 (a quasi-periodic
/// input with zero shift and period `1/k` is accepted and unrolled).
pub fn check_strongly_minimal(
    f: &QuasiPeriodicPwl,
    problem: &GroupProblem,
) -> Result<MinimalityReport> {
    match problem.lattice() {
        Lattice::Affine => {
            let unit: PwlPeriodic = f.to_unit_periodic()?;
            let boundary = unit.eval(&Rational::zero()).is_zero()
                && unit.nodes().iter().all(|n| !n.y.is_negative());
            Ok(assemble(&unit, problem, boundary, None))
        }
        Lattice::Truncated => {
            let boundary = f.eval(&Rational::zero()).is_zero()
                && f.eval(&-Rational::one()).is_zero();
            let nonneg = f.nonnegative_on_halfline();
            Ok(assemble(f, problem, boundary, Some(nonneg)))
        }
    }
}

fn assemble(
    f: &QuasiPeriodicPwl,
    problem: &GroupProblem,
    boundary: bool,
    nonneg: Option<bool>,
) -> MinimalityReport {
    let sub = check_subadditive(f);
    let sym = check_symmetric(f, problem.b());
    let slope_count = f.slope_set().len();
    let strongly = boundary && sub.is_subadditive && sym.is_symmetric;
    MinimalityReport {
        problem: problem.clone(),
        is_subadditive: sub.is_subadditive,
        subadditivity_witness: sub.witness,
        min_slack: sub.min_vertex.slack,
        is_symmetric: sym.is_symmetric,
        symmetry_witness: sym.witness,
        boundary_conditions_hold: boundary,
        is_strongly_minimal: strongly,
        slope_count,
        nonnegative_on_halfline: nonneg,
        extreme_certified: strongly && slope_count == 2 && nonneg.unwrap_or(true),
    }
}

/// Sufficient certificate of extremality: strongly minimal with exactly two
/// slopes (and nonnegative on `[0, ∞)` for the truncated lattice). `false`
/// means "not certified".
pub fn certify_extreme_two_slope(f: &QuasiPeriodicPwl, problem: &GroupProblem) -> bool {
    check_strongly_minimal(f, problem)
        .map(|r| r.extreme_certified)
        .unwrap_or(false)
}

// ---------------------------------------------------------------------------
// Integer-scaled vertex enumeration.
//
// Positions are multiplied by X (so every breakpoint and the period are
// integers) and values by W (so every node value, the shift, and every slope
// per unit of position are integers). All vertex coordinates are then integer
// positions and every slack is an integer. Small instances run on i128, the
// rest on BigInt.

pub(crate) trait Ring: Clone + Ord {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Ring for i128 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for BigInt {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

struct Scaled<T> {
    pos: Vec<T>,
    val: Vec<T>,
    slope: Vec<T>,
    period: T,
    shift: T,
}

pub(crate) struct ScaledGrid {
    x_scale: BigInt,
    w_scale: BigInt,
    big: Scaled<BigInt>,
    small: Option<Scaled<i128>>,
}

/// Largest magnitude admitted on the i128 path; every intermediate quantity
/// is bounded by a small multiple of the inputs.
const SMALL_LIMIT_BITS: u64 = 100;

impl ScaledGrid {
    pub(crate) fn from_function(period: &Rational, shift: &Rational, nodes: &[Node]) -> Self {
        let x_scale = denominator_lcm(nodes.iter().map(|n| &n.x).chain(std::iter::once(period)));
        let xs = Rational::from_integer(x_scale.clone());
        let pos: Vec<BigInt> = nodes.iter().map(|n| (&n.x * &xs).numer().clone()).collect();
        let big_period = (period * &xs).numer().clone();
        let m = nodes.len();
        let slopes: Vec<Rational> = (0..m)
            .map(|i| {
                let (x1, y1) = match nodes.get(i + 1) {
                    Some(n) => (pos[i + 1].clone(), n.y.clone()),
                    None => (big_period.clone(), &nodes[0].y + shift),
                };
                (y1 - &nodes[i].y) / Rational::from_integer(x1 - &pos[i])
            })
            .collect();
        let w_scale = denominator_lcm(
            nodes
                .iter()
                .map(|n| &n.y)
                .chain(std::iter::once(shift))
                .chain(slopes.iter()),
        );
        let ws = Rational::from_integer(w_scale.clone());
        let to_int = |r: &Rational| -> BigInt {
            let v = r * &ws;
            debug_assert!(v.is_integer());
            v.numer().clone()
        };
        let big = Scaled {
            pos,
            val: nodes.iter().map(|n| to_int(&n.y)).collect(),
            slope: slopes.iter().map(to_int).collect(),
            period: big_period,
            shift: to_int(shift),
        };
        let small = Self::narrow(&big);
        ScaledGrid {
            x_scale,
            w_scale,
            big,
            small,
        }
    }

    fn narrow(big: &Scaled<BigInt>) -> Option<Scaled<i128>> {
        let fits = |v: &BigInt| v.abs().bits() <= SMALL_LIMIT_BITS;
        let all = big
            .pos
            .iter()
            .chain(&big.val)
            .chain(&big.slope)
            .chain([&big.period, &big.shift])
            .all(fits);
        if !all {
            return None;
        }
        let conv = |v: &Vec<BigInt>| v.iter().map(|x| x.to_i128().expect("fits")).collect();
        Some(Scaled {
            pos: conv(&big.pos),
            val: conv(&big.val),
            slope: conv(&big.slope),
            period: big.period.to_i128().expect("fits"),
            shift: big.shift.to_i128().expect("fits"),
        })
    }

    /// Minimum-slack vertex (in scaled coordinates) inside `window`, plus
    /// the number of vertices visited.
    fn min_slack(
        &self,
        window: Option<&VertexWindow>,
    ) -> Option<((BigInt, BigInt, BigInt), u64)> {
        let big_window = window.map(|w| self.scale_window(w));
        if let Some(s) = &self.small {
            let small_window = match &big_window {
                None => Some(None),
                Some(w) => narrow_window(w).map(Some),
            };
            if let Some(sw) = small_window {
                return min_slack_generic(s, sw.as_ref()).map(|((x, y, v), c)| {
                    ((BigInt::from(x), BigInt::from(y), BigInt::from(v)), c)
                });
            }
        }
        min_slack_generic(&self.big, big_window.as_ref())
    }

    fn scale_window(&self, w: &VertexWindow) -> ScaledWindow<BigInt> {
        let xs = Rational::from_integer(self.x_scale.clone());
        let scale = |r: &Rational| r * &xs;
        ScaledWindow {
            lo: scale(&w.lo).ceil(),
            hi: scale(&w.hi).floor(),
            gaps: w
                .open_gaps
                .iter()
                .map(|(a, b)| {
                    (
                        scale(a).floor() + BigInt::one(),
                        scale(b).ceil() - BigInt::one(),
                    )
                })
                .collect(),
        }
    }

    fn vertex_to_rational(&self, (x, y, s): (BigInt, BigInt, BigInt)) -> SlackVertex {
        SlackVertex {
            x: Rational::from_bigints(x, self.x_scale.clone()),
            y: Rational::from_bigints(y, self.x_scale.clone()),
            slack: Rational::from_bigints(s, self.w_scale.clone()),
        }
    }
}

/// Walks `t ↦ F(t)` over `[0, 2P)` with a monotone cursor.
struct Cursor {
    v: usize,
}

impl Cursor {
    fn new() -> Self {
        Cursor { v: 0 }
    }

    fn eval<T: Ring>(&mut self, s: &Scaled<T>, t: &T) -> T {
        let m = s.pos.len();
        let start = |v: usize| -> T {
            if v < m {
                s.pos[v].clone()
            } else {
                s.pos[v - m].add(&s.period)
            }
        };
        while self.v + 1 < 2 * m && &start(self.v + 1) <= t {
            self.v += 1;
        }
        let seg = self.v % m;
        let base = if self.v < m {
            s.val[seg].clone()
        } else {
            s.val[seg].add(&s.shift)
        };
        base.add(&s.slope[seg].mul(&t.sub(&start(self.v))))
    }
}

fn better<T: Ord>(cand: &(T, T, T), best: &Option<(T, T, T)>) -> bool {
    match best {
        None => true,
        Some(b) => {
            let (cx, cy, cs) = cand;
            let (bx, by, bs) = b;
            let (clo, chi) = if cx <= cy { (cx, cy) } else { (cy, cx) };
            let (blo, bhi) = if bx <= by { (bx, by) } else { (by, bx) };
            match cs.cmp(bs) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => (clo, chi) < (blo, bhi),
            }
        }
    }
}

fn narrow_window(w: &ScaledWindow<BigInt>) -> Option<ScaledWindow<i128>> {
    let c = |v: &BigInt| v.to_i128();
    let gaps = w
        .gaps
        .iter()
        .map(|(a, b)| Some((c(a)?, c(b)?)))
        .collect::<Option<Vec<_>>>()?;
    Some(ScaledWindow {
        lo: c(&w.lo)?,
        hi: c(&w.hi)?,
        gaps,
    })
}

fn min_slack_generic<T: Ring>(
    s: &Scaled<T>,
    window: Option<&ScaledWindow<T>>,
) -> Option<((T, T, T), u64)> {
    let keep = |x: &T, y: &T| window.map_or(true, |w| w.keeps(x, y));
    let m = s.pos.len();
    let mut best: Option<(T, T, T)> = None;
    let mut count: u64 = 0;
    let mut consider = |x: &T, y: &T, slack: T, best: &mut Option<(T, T, T)>| {
        if !keep(x, y) {
            return;
        }
        count += 1;
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let cand = (lo.clone(), hi.clone(), slack);
        if better(&cand, best) {
            *best = Some(cand);
        }
    };

    // x, y ∈ U (the slack is symmetric, so y ≥ x suffices).
    for i in 0..m {
        let mut cur = Cursor::new();
        for j in i..m {
            let z = s.pos[i].add(&s.pos[j]);
            let fz = cur.eval(s, &z);
            let sl = s.val[i].add(&s.val[j]).sub(&fz);
            consider(&s.pos[i], &s.pos[j], sl, &mut best);
        }
    }

    // x ∈ U and x + y ∈ U; the family with y ∈ U is its mirror image.
    for i in 0..m {
        let x = &s.pos[i];
        let mut cur = Cursor::new();
        let first = s.pos.partition_point(|p| p < x);
        for k in (first..m).chain(0..first) {
            let wrapped = k < first;
            let (z, fz) = if wrapped {
                (s.pos[k].add(&s.period), s.val[k].add(&s.shift))
            } else {
                (s.pos[k].clone(), s.val[k].clone())
            };
            let y = z.sub(x);
            let fy = cur.eval(s, &y);
            let sl = s.val[i].add(&fy).sub(&fz);
            consider(x, &y, sl, &mut best);
        }
    }
    best.map(|b| (b, count))
}
