//! Maximal S-free polyhedra in the plane.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::{ExtendedGcd, Integer};
use serde::Serialize;

use super::linalg::{dot, norm_inf, scale, solve, sub, Vector};
use super::polyhedron::{fmt_point, SFreePolyhedron};
use super::{ExtremalityVerdict, VerdictReason};
use crate::error::{Error, Result};
use crate::rational::{denominator_lcm, Rational};

/// Cap on the halving search for the perturbation size.
pub const MAX_HALVINGS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Split,
    Triangle,
    Quadrilateral,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacetPoint {
    /// Index into the input facet list.
    pub facet: usize,
    pub point: Vector,
    /// Position on the edge `rⁱ → rⁱ⁺¹`; absent for splits.
    pub lambda: Option<Rational>,
    /// Number of S-points in the relative interior of this facet (splits: 0,
    /// meaning infinitely many).
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification2D {
    pub kind: ShapeKind,
    /// Facet indices in counterclockwise order of their normals, starting at 0.
    pub order: Vec<usize>,
    /// `rⁱ` is the intersection of facets `order[i−1]` and `order[i]`.
    pub vertices: Vec<Vector>,
    /// One entry per position in `order`.
    pub facet_points: Vec<FacetPoint>,
}

fn cross(a: &[Rational], b: &[Rational]) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn half_plane(a: &[Rational]) -> u8 {
    if a[1].is_positive() || (a[1].is_zero() && a[0].is_positive()) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    half_plane(a)
        .cmp(&half_plane(b))
        .then_with(|| Rational::zero().cmp(&cross(a, b)))
}

/// Primitive integer vector with the same direction as `a`.
fn primitive(a: &[Rational]) -> (BigInt, BigInt) {
    let l = denominator_lcm(a.iter());
    let lr = Rational::from(l);
    let x = (&a[0] * &lr).numer().clone();
    let y = (&a[1] * &lr).numer().clone();
    let g = x.gcd(&y);
    (x / &g, y / g)
}

pub fn classify_max_s_free_2d(k: &SFreePolyhedron) -> Result<Classification2D> {
    if k.n() != 2 {
        return Err(Error::Precondition(format!("expected dimension 2, got {}", k.n())));
    }
    match k.facets().len() {
        2 => classify_split(k),
        3 | 4 => classify_polygon(k),
        m => Err(Error::UnsupportedShape(format!("{m} facets"))),
    }
}

fn classify_split(k: &SFreePolyhedron) -> Result<Classification2D> {
    let (a1, a2) = (&k.facets()[0], &k.facets()[1]);
    if !cross(a1, a2).is_zero() || dot(a1, a2).is_positive() {
        return Err(Error::UnsupportedShape("two facets that are not opposite parallel lines".into()));
    }
    // a1 = κ·p, a2 = −κμ·p; the strip is −1/(κμ) ≤ p·x ≤ 1/κ
    let (px, py) = primitive(a1);
    let p = vec![Rational::from(px.clone()), Rational::from(py.clone())];
    let j = if a1[0].is_zero() { 1 } else { 0 };
    let kappa = &a1[j] / &p[j];
    let kappa2 = -(&a2[j] / &p[j]);
    let upper = kappa.recip();
    let lower = -kappa2.recip();
    let pb = dot(&p, k.b());
    // S-points have p·s ∈ p·b + ℤ
    let lo_off = &lower - &pb;
    let hi_off = &upper - &pb;
    let first_above = &pb + Rational::from(lo_off.floor() + 1);
    if first_above < upper {
        return Err(Error::NotSFree(format!("lattice line p·x = {first_above} crosses the interior")));
    }
    if !lo_off.is_integer() || !hi_off.is_integer() {
        return Err(Error::NotMaximal("a boundary line carries no S-point".into()));
    }
    let ExtendedGcd { x: u, y: v, .. } = px.extended_gcd(&py);
    let on_line = |off: &Rational| -> Vector {
        let kk = off.numer();
        let z = [Rational::from(kk * &u), Rational::from(kk * &v)];
        vec![&k.b()[0] + &z[0], &k.b()[1] + &z[1]]
    };
    Ok(Classification2D {
        kind: ShapeKind::Split,
        order: vec![0, 1],
        vertices: Vec::new(),
        facet_points: vec![
            FacetPoint {
                facet: 0,
                point: on_line(&hi_off),
                lambda: None,
                count: 0,
            },
            FacetPoint {
                facet: 1,
                point: on_line(&lo_off),
                lambda: None,
                count: 0,
            },
        ],
    })
}

fn edge_parameter(r0: &[Rational], r1: &[Rational], s: &[Rational]) -> Rational {
    let j = if r1[0] != r0[0] { 0 } else { 1 };
    (&s[j] - &r0[j]) / (&r1[j] - &r0[j])
}

fn classify_polygon(k: &SFreePolyhedron) -> Result<Classification2D> {
    let facets = k.facets();
    let m = facets.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| angle_cmp(&facets[i], &facets[j]));
    let start = order.iter().position(|&i| i == 0).expect("facet 0 present");
    order.rotate_left(start);
    for w in 0..m {
        let (i, j) = (order[w], order[(w + 1) % m]);
        if !cross(&facets[i], &facets[j]).is_positive() {
            return Err(Error::UnsupportedShape(format!(
                "facets {i} and {j} do not bound a polygon"
            )));
        }
    }
    let ones = [Rational::one(), Rational::one()];
    let mut vertices = Vec::with_capacity(m);
    for w in 0..m {
        let (i, j) = (order[(w + m - 1) % m], order[w]);
        let r = solve(&vec![facets[i].clone(), facets[j].clone()], &ones)
            .ok_or_else(|| Error::InvalidPolyhedron(format!("facets {i} and {j} are parallel")))?;
        if !k.contains(&r) {
            return Err(Error::InvalidPolyhedron(format!("facet {j} is redundant")));
        }
        vertices.push(r);
    }
    for w in 0..m {
        if vertices[w] == vertices[(w + 1) % m] {
            return Err(Error::InvalidPolyhedron(format!("facet {} is degenerate", order[w])));
        }
    }
    let points = k.boundary_s_points()?;
    let mut facet_points = Vec::with_capacity(m);
    for w in 0..m {
        let f = order[w];
        let (r0, r1) = (&vertices[w], &vertices[(w + 1) % m]);
        let mut on_edge: Vec<(Rational, Vector)> = points
            .iter()
            .filter(|s| dot(&facets[f], s) == Rational::one())
            .map(|s| (edge_parameter(r0, r1, s), s.clone()))
            .filter(|(l, _)| l.is_positive() && *l < Rational::one())
            .collect();
        on_edge.sort();
        let count = on_edge.len();
        let Some((lambda, point)) = on_edge.into_iter().next() else {
            return Err(Error::NotMaximal(format!("facet {f} has no S-point in its relative interior")));
        };
        facet_points.push(FacetPoint {
            facet: f,
            point,
            lambda: Some(lambda),
            count,
        });
    }
    Ok(Classification2D {
        kind: if m == 3 { ShapeKind::Triangle } else { ShapeKind::Quadrilateral },
        order,
        vertices,
        facet_points,
    })
}

/// Ratio test on the chosen facet points; `tᵢ = λᵢ/(1 − λᵢ)`.
pub fn quadrilateral_ratio_test(c: &Classification2D) -> Result<ExtremalityVerdict> {
    if c.kind != ShapeKind::Quadrilateral || c.facet_points.len() != 4 {
        return Err(Error::Precondition("ratio test needs a quadrilateral".into()));
    }
    if c.facet_points.iter().any(|p| p.count != 1) {
        return Ok(ExtremalityVerdict {
            extreme: false,
            reason: VerdictReason::NotCertified,
        });
    }
    let t: Vec<Rational> = c
        .facet_points
        .iter()
        .map(|p| {
            let l = p.lambda.clone().expect("polygon facets carry lambda");
            &l / (Rational::one() - &l)
        })
        .collect();
    let condition = t[0] == t[2] && t[1] == t[3] && &t[0] * &t[1] == Rational::one();
    Ok(ExtremalityVerdict {
        extreme: !condition,
        reason: VerdictReason::QuadrilateralRatio {
            t: condition.then(|| t[0].clone()),
        },
    })
}

pub fn extremality_2d(c: &Classification2D) -> Result<ExtremalityVerdict> {
    match c.kind {
        ShapeKind::Split => Ok(ExtremalityVerdict {
            extreme: true,
            reason: VerdictReason::SplitRule,
        }),
        ShapeKind::Triangle => Ok(ExtremalityVerdict {
            extreme: true,
            reason: VerdictReason::TriangleRule,
        }),
        ShapeKind::Quadrilateral => quadrilateral_ratio_test(c),
    }
}

/// `sup{|γ_K(r) − γ_L(r)| : ‖r‖₁ = 1}` for planar gauges. On each edge of
/// the ℓ1 sphere both gauges are piecewise linear with kinks where two
/// normals agree, so the sup is attained at an endpoint or such a crossing.
pub fn gauge_distance_2d(k: &SFreePolyhedron, l: &SFreePolyhedron) -> Result<Rational> {
    if k.n() != 2 || l.n() != 2 {
        return Err(Error::Precondition("planar gauges only".into()));
    }
    let one = Rational::one();
    let corners = [
        vec![one.clone(), Rational::zero()],
        vec![Rational::zero(), one.clone()],
        vec![-one.clone(), Rational::zero()],
        vec![Rational::zero(), -one.clone()],
    ];
    let normals: Vec<&Vector> = k.facets().iter().chain(l.facets()).collect();
    let diff = |r: &[Rational]| (k.gauge(r) - l.gauge(r)).abs();
    let mut best = Rational::zero();
    for e in 0..4 {
        let (p, q) = (&corners[e], &corners[(e + 1) % 4]);
        let dir = sub(q, p);
        best = best.max(diff(p));
        for (i, ai) in normals.iter().enumerate() {
            for aj in &normals[i + 1..] {
                let g = sub(ai, aj);
                // g·(p + t·dir) = 0
                let denom = dot(&g, &dir);
                if denom.is_zero() {
                    continue;
                }
                let t = -dot(&g, p) / denom;
                if t.is_positive() && t < one {
                    let r: Vector = p.iter().zip(&dir).map(|(x, d)| x + &t * d).collect();
                    best = best.max(diff(&r));
                }
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Approximation2D {
    pub polyhedron: SFreePolyhedron,
    /// Size of the perturbation applied to facet 0; absent if the input was
    /// already extreme.
    pub eps_prime: Option<Rational>,
    pub direction: Option<Vector>,
    pub distance: Rational,
    pub classification: Classification2D,
    pub verdict: ExtremalityVerdict,
}

/// A maximal S-free `K̃` with extreme gauge and `‖γ_K − γ_K̃‖ ≤ eps`.
pub fn approximate_extreme_2d(k: &SFreePolyhedron, eps: &Rational) -> Result<Approximation2D> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange(format!("eps must be positive, got {eps}")));
    }
    let c = classify_max_s_free_2d(k)?;
    let verdict = extremality_2d(&c)?;
    if verdict.extreme {
        return Ok(Approximation2D {
            polyhedron: k.clone(),
            eps_prime: None,
            direction: None,
            distance: Rational::zero(),
            classification: c,
            verdict,
        });
    }
    let w = &c.facet_points[0].point;
    let a = scale(&norm_inf(w).recip(), &[w[1].clone(), -w[0].clone()]);
    let mut e = eps / Rational::from(2);
    let half = Rational::new(1, 2);
    for _ in 0..MAX_HALVINGS {
        let mut facets = k.facets().to_vec();
        facets[0] = facets[0].iter().zip(&a).map(|(x, y)| x + &e * y).collect();
        if let Ok(kt) = k.with_facets(facets) {
            if let Ok(ct) = classify_max_s_free_2d(&kt) {
                let vt = extremality_2d(&ct)?;
                let distance = gauge_distance_2d(k, &kt)?;
                if vt.extreme && ct.kind == ShapeKind::Quadrilateral && &distance <= eps {
                    return Ok(Approximation2D {
                        polyhedron: kt,
                        eps_prime: Some(e),
                        direction: Some(a),
                        distance,
                        classification: ct,
                        verdict: vt,
                    });
                }
            }
        }
        e = e * &half;
    }
    Err(Error::SearchExhausted(format!(
        "no extreme perturbation of facet 0 along {} after {MAX_HALVINGS} halvings",
        fmt_point(&a)
    )))
}
