//! Simplices in ℝⁿ: extremality via the affine hull of their S-points, the
//! lattice-free family `Δ_n`, and separation radii.

use std::collections::BTreeSet;

use serde::Serialize;

use super::linalg::{dot, rank, scale, Matrix, Vector};
use super::plane::MAX_HALVINGS;
use super::polyhedron::{fmt_point, SFreePolyhedron};
use super::{ExtremalityVerdict, VerdictReason};
use crate::error::{stage, Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplexAnalysis {
    /// `facet_points[i]` is the unique S-point on facet `i`.
    pub facet_points: Vec<Vector>,
    /// Rank of the points as columns with a row of ones appended.
    pub rank: usize,
    pub verdict: ExtremalityVerdict,
}

/// Rank of the `(n+1)×k` matrix whose columns are the points with 1 appended.
pub fn homogenized_rank(points: &[Vector]) -> usize {
    let Some(n) = points.first().map(Vec::len) else {
        return 0;
    };
    let mut m: Matrix = (0..n)
        .map(|j| points.iter().map(|p| p[j].clone()).collect())
        .collect();
    m.push(vec![Rational::one(); points.len()]);
    rank(&m)
}

pub fn analyze_simplex(k: &SFreePolyhedron) -> Result<SimplexAnalysis> {
    let n = k.n();
    if k.facets().len() != n + 1 {
        return Err(Error::UnsupportedShape(format!(
            "a simplex in dimension {n} has {} facets, got {}",
            n + 1,
            k.facets().len()
        )));
    }
    if !k.is_bounded() {
        return Err(Error::Unbounded);
    }
    let points = k.boundary_s_points()?;
    let mut per_facet: Vec<Option<Vector>> = vec![None; n + 1];
    for s in points {
        let tight = k.tight_facets(&s);
        if tight.len() != 1 {
            return Err(Error::Precondition(format!(
                "S-point {} lies on {} facets",
                fmt_point(&s),
                tight.len()
            )));
        }
        let slot = &mut per_facet[tight[0]];
        if slot.is_some() {
            return Err(Error::Precondition(format!("facet {} holds two or more S-points", tight[0])));
        }
        *slot = Some(s);
    }
    let facet_points = per_facet
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::NotMaximal(format!("facet {i} has no S-point"))))
        .collect::<Result<Vec<_>>>()?;
    let r = homogenized_rank(&facet_points);
    Ok(SimplexAnalysis {
        facet_points,
        rank: r,
        verdict: ExtremalityVerdict {
            extreme: r == n + 1,
            reason: VerdictReason::SimplexAffineHull { rank: r },
        },
    })
}

pub fn simplex_extreme_test(k: &SFreePolyhedron) -> Result<ExtremalityVerdict> {
    Ok(analyze_simplex(k)?.verdict)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaN {
    pub polyhedron: SFreePolyhedron,
    pub eps: Rational,
    /// Perturbation of the last inequality row actually used (`n ≥ 4`).
    pub epsbar: Option<Rational>,
    /// Interior point moved to the origin; `b = −translation`.
    pub translation: Vector,
    /// Integer points of the untranslated simplex, ordered by facet.
    pub lattice_points: Vec<Vector>,
    pub analysis: SimplexAnalysis,
}

/// Rows `(a, h)` of `{x : a·x ≤ h}` before translation.
fn delta_rows(n: usize, eps: &Rational, epsbar: &Rational) -> Vec<(Vector, Rational)> {
    let z = Rational::zero;
    let one = Rational::one();
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n - 1 {
        let mut a = vec![z(); n];
        a[i] = -one.clone();
        if i + 1 < n - 1 {
            a[i + 1] = eps.clone();
        } else {
            a[0] = eps.clone();
            if n >= 4 {
                a[1] = -epsbar.clone();
            }
        }
        rows.push((a, eps.clone()));
    }
    let mid = Rational::new(3, 2);
    let mut c1 = vec![z(); n];
    let mut c2 = vec![z(); n];
    for j in 0..n - 1 {
        let w = if j < 2 { one.clone() } else { mid.clone() };
        c1[j] = -w.clone();
        c2[j] = w;
    }
    c1[n - 1] = -eps.recip();
    c2[n - 1] = (Rational::from(2) * eps).recip();
    rows.push((c1, z()));
    rows.push((c2, Rational::from(2)));
    rows
}

fn expected_lattice_points(n: usize) -> BTreeSet<Vector> {
    let unit = |j: usize| {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        e
    };
    let mut out = BTreeSet::new();
    out.insert(vec![Rational::zero(); n]);
    for j in 0..n - 1 {
        out.insert(unit(j));
    }
    let mut e12 = unit(0);
    e12[1] = Rational::one();
    out.insert(e12);
    out
}

fn build_delta(n: usize, eps: &Rational, epsbar: &Rational) -> Result<(SFreePolyhedron, Vector)> {
    let p = vec![eps / Rational::from(2 * n as i64); n];
    let mut facets = Vec::with_capacity(n + 1);
    for (a, h) in delta_rows(n, eps, epsbar) {
        let slack = h - dot(&a, &p);
        if !slack.is_positive() {
            return Err(stage("delta-n", "translation point is not interior"));
        }
        facets.push(scale(&slack.recip(), &a));
    }
    let b = p.iter().map(|x| -x).collect();
    Ok((SFreePolyhedron::new(n, b, facets)?, p))
}

fn verify_delta(n: usize, k: &SFreePolyhedron, p: &[Rational]) -> Result<(SimplexAnalysis, Vec<Vector>)> {
    let analysis = analyze_simplex(k)?;
    let lattice: Vec<Vector> = analysis
        .facet_points
        .iter()
        .map(|s| s.iter().zip(p).map(|(x, t)| x + t).collect())
        .collect();
    let found: BTreeSet<Vector> = lattice.iter().cloned().collect();
    if found != expected_lattice_points(n) {
        return Err(stage("delta-n", "unexpected lattice points"));
    }
    if lattice.iter().any(|x| !x[n - 1].is_zero()) {
        return Err(stage("delta-n", "lattice point off the hyperplane x_n = 0"));
    }
    if analysis.rank != n {
        return Err(stage("delta-n", format!("affine hull has dimension {}", analysis.rank - 1)));
    }
    Ok((analysis, lattice))
}

/// Lattice-free simplex whose `n + 1` integer points span only a hyperplane,
/// translated so the origin is interior.
pub fn construct_delta_n(n: usize, eps: &Rational, epsbar: &Rational) -> Result<DeltaN> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("n must be at least 3, got {n}")));
    }
    if !eps.is_positive() || *eps >= Rational::new(1, 4) {
        return Err(Error::OutOfRange(format!("eps must lie in (0, 1/4), got {eps}")));
    }
    if !epsbar.is_positive() {
        return Err(Error::OutOfRange(format!("epsbar must be positive, got {epsbar}")));
    }
    let mut eb = epsbar.clone();
    let mut last = None;
    let tries = if n >= 4 { MAX_HALVINGS } else { 1 };
    for _ in 0..tries {
        let (k, p) = build_delta(n, eps, &eb)?;
        match verify_delta(n, &k, &p) {
            Ok((analysis, lattice_points)) => {
                return Ok(DeltaN {
                    polyhedron: k,
                    eps: eps.clone(),
                    epsbar: (n >= 4).then_some(eb),
                    translation: p,
                    lattice_points,
                    analysis,
                })
            }
            Err(e) => last = Some(e),
        }
        eb = eb * Rational::new(1, 2);
    }
    Err(Error::SearchExhausted(format!(
        "delta-n verification failed: {}",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationCertificate {
    pub eps: Rational,
    /// `max ‖x‖₁` over `K`.
    pub m: Rational,
    /// Smallest gauge value above 1 among S-points of `2K`, capped at 2.
    pub g_min: Rational,
    /// `1 + ε·M`.
    pub dilate: Rational,
    pub s_points: Vec<Vector>,
}

/// Radius `ε` such that dilating `K` by `1 + εM` admits no new S-point.
pub fn separation_certificate(k: &SFreePolyhedron) -> Result<SeparationCertificate> {
    let analysis = analyze_simplex(k)?;
    if analysis.verdict.extreme {
        return Err(Error::Precondition(
            "S-points of the simplex are affinely independent".into(),
        ));
    }
    let one = Rational::one();
    let two = Rational::from(2);
    let m = k.max_vertex_norm_1()?;
    let g_min = k
        .enumerate_s_in_dilate(&two)?
        .iter()
        .map(|s| k.gauge(s))
        .filter(|g| *g > one)
        .fold(two.clone(), Rational::min);
    let eps = (&g_min - &one) / (&two * &m);
    let dilate = &one + &eps * &m;
    let inside = k.enumerate_s_in_dilate(&one)?;
    if k.enumerate_s_in_dilate(&dilate)? != inside {
        return Err(stage("certificate", format!("dilate {dilate} picks up a new S-point")));
    }
    Ok(SeparationCertificate {
        eps,
        m,
        g_min,
        dilate,
        s_points: inside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccgf::polyhedron::tests::v;
    use crate::rational::rat;

    #[test]
    fn delta_three_points_and_facets() {
        let d = construct_delta_n(3, &rat(1, 8), &rat(1, 100)).unwrap();
        let want = |xs: [i64; 3]| xs.iter().map(|&x| rat(x, 1)).collect::<Vector>();
        // facets: A-row-1, A-row-2, C-row-1, C-row-2
        assert_eq!(
            d.lattice_points,
            vec![want([0, 1, 0]), want([1, 0, 0]), want([0, 0, 0]), want([1, 1, 0])]
        );
        assert_eq!(d.analysis.rank, 3);
        assert!(!d.analysis.verdict.extreme);
        assert_eq!(d.epsbar, None);
        assert_eq!(d.polyhedron.b(), &[rat(-1, 48), rat(-1, 48), rat(-1, 48)][..]);
        assert_eq!(d.polyhedron.enumerate_s_in_dilate(&rat(1, 1)).unwrap().len(), 4);
    }

    #[test]
    fn delta_four_and_five() {
        for n in [4, 5] {
            let d = construct_delta_n(n, &rat(1, 8), &rat(1, 100)).unwrap();
            assert_eq!(d.lattice_points.len(), n + 1);
            assert_eq!(d.analysis.rank, n);
            assert!(!simplex_extreme_test(&d.polyhedron).unwrap().extreme);
        }
    }

    #[test]
    fn delta_rejections() {
        assert!(construct_delta_n(2, &rat(1, 8), &rat(1, 100)).is_err());
        assert!(construct_delta_n(3, &rat(1, 4), &rat(1, 100)).is_err());
        assert!(construct_delta_n(4, &rat(1, 8), &rat(0, 1)).is_err());
    }

    #[test]
    fn independent_facet_points_are_extreme() {
        // one lattice point in the relative interior of each edge, at
        // (0,0), (1,0), (0,1), shifted by (1/3, 1/3)
        let k = SFreePolyhedron::new(
            2,
            v(&[(-1, 3), (-1, 3)]),
            vec![v(&[(-9, 5), (-6, 5)]), v(&[(3, 5), (-9, 5)]), v(&[(1, 1), (2, 1)])],
        )
        .unwrap();
        let a = analyze_simplex(&k).unwrap();
        assert_eq!(a.rank, 3);
        assert!(a.verdict.extreme);
        assert!(separation_certificate(&k).is_err());
    }

    #[test]
    fn simplex_rejections() {
        let d = construct_delta_n(3, &rat(1, 8), &rat(1, 100)).unwrap();
        let shrunk = d.polyhedron.scale_normals(&rat(2, 1)).unwrap();
        assert!(matches!(analyze_simplex(&shrunk), Err(Error::NotMaximal(_))));
        let mut f = d.polyhedron.facets().to_vec();
        f.pop();
        let open = d.polyhedron.with_facets(f).unwrap();
        assert!(matches!(analyze_simplex(&open), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn certificate_on_delta_three() {
        let d = construct_delta_n(3, &rat(1, 8), &rat(1, 100)).unwrap();
        let c = separation_certificate(&d.polyhedron).unwrap();
        assert!(c.eps.is_positive());
        assert!(c.g_min > rat(1, 1) && c.g_min <= rat(2, 1));
        assert_eq!(c.eps, (&c.g_min - rat(1, 1)) / (rat(2, 1) * &c.m));
        assert_eq!(c.s_points.len(), 4);
    }

    #[test]
    fn homogenized_rank_of_collinear_points() {
        let pts = vec![v(&[(0, 1), (0, 1)]), v(&[(1, 1), (1, 1)]), v(&[(2, 1), (2, 1)])];
        assert_eq!(homogenized_rank(&pts), 2);
    }
}
