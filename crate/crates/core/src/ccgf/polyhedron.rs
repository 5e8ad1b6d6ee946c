use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::linalg::{dot, norm_1, norm_inf, null_line, rank, scale, solve, Matrix, Vector};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Upper bound on the number of lattice points visited by one box enumeration.
pub const MAX_BOX_POINTS: u64 = 20_000_000;

/// `K = {x : aᵢ·x ≤ 1}` together with the target set `S = b + ℤⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyhedron", into = "RawPolyhedron")]
pub struct SFreePolyhedron {
    n: usize,
    b: Vector,
    facets: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolyhedron {
    n: usize,
    b: Vector,
    facets: Vec<Vector>,
}

impl TryFrom<RawPolyhedron> for SFreePolyhedron {
    type Error = Error;
    fn try_from(r: RawPolyhedron) -> Result<Self> {
        SFreePolyhedron::new(r.n, r.b, r.facets)
    }
}

impl From<SFreePolyhedron> for RawPolyhedron {
    fn from(k: SFreePolyhedron) -> Self {
        RawPolyhedron {
            n: k.n,
            b: k.b,
            facets: k.facets,
        }
    }
}

impl SFreePolyhedron {
    pub fn new(n: usize, b: Vector, facets: Vec<Vector>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPolyhedron("dimension must be positive".into()));
        }
        if b.len() != n {
            return Err(Error::InvalidPolyhedron(format!("b has {} entries, expected {n}", b.len())));
        }
        if b.iter().all(Rational::is_integer) {
            return Err(Error::InvalidPolyhedron("b must not be an integer point".into()));
        }
        if facets.is_empty() {
            return Err(Error::EmptyFacets);
        }
        for (i, a) in facets.iter().enumerate() {
            if a.len() != n {
                return Err(Error::InvalidPolyhedron(format!("facet {i} has {} entries, expected {n}", a.len())));
            }
            if a.iter().all(Rational::is_zero) {
                return Err(Error::InvalidPolyhedron(format!("facet {i} is the zero vector")));
            }
        }
        Ok(SFreePolyhedron { n, b, facets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn facets(&self) -> &[Vector] {
        &self.facets
    }

    /// Same `b`, new facet list.
    pub fn with_facets(&self, facets: Vec<Vector>) -> Result<Self> {
        SFreePolyhedron::new(self.n, self.b.clone(), facets)
    }

    /// Facet normals multiplied by `k`, i.e. `K` scaled by `1/k`.
    pub fn scale_normals(&self, k: &Rational) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::OutOfRange(format!("scale factor must be positive, got {k}")));
        }
        self.with_facets(self.facets.iter().map(|a| scale(k, a)).collect())
    }

    /// `γ_K(r) = max aᵢ·r`.
    pub fn gauge(&self, r: &[Rational]) -> Rational {
        self.facets
            .iter()
            .map(|a| dot(a, r))
            .max()
            .expect("facet list is nonempty")
    }

    /// `‖γ_K‖ = max |aᵢ|_∞`.
    pub fn norm(&self) -> Rational {
        self.facets.iter().map(|a| norm_inf(a)).max().expect("facet list is nonempty")
    }

    /// Indices of the facets with `aᵢ·x = 1`.
    pub fn tight_facets(&self, x: &[Rational]) -> Vec<usize> {
        let one = Rational::one();
        (0..self.facets.len()).filter(|&i| dot(&self.facets[i], x) == one).collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.gauge(x) <= Rational::one()
    }

    /// `{d : aᵢ·d ≤ 0 ∀i} = {0}`. A pointed nonzero recession cone has an
    /// extreme ray cut out by `n − 1` independent facets, so it suffices to
    /// test the null lines of all `(n−1)`-subsets.
    pub fn is_bounded(&self) -> bool {
        let n = self.n;
        if rank(&self.facets) < n {
            return false;
        }
        let mut bounded = true;
        for_each_subset(self.facets.len(), n - 1, |idx| {
            if !bounded {
                return;
            }
            let rows: Matrix = idx.iter().map(|&i| self.facets[i].clone()).collect();
            let Some(d) = null_line(&rows, n) else {
                return;
            };
            let signs: Vec<_> = self.facets.iter().map(|a| dot(a, &d).signum()).collect();
            use std::cmp::Ordering::*;
            if signs.iter().all(|s| *s != Greater) || signs.iter().all(|s| *s != Less) {
                bounded = false;
            }
        });
        bounded
    }

    /// Vertices from all nonsingular `n`-subsets that satisfy every facet.
    pub fn vertices(&self) -> Result<Vec<Vector>> {
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let n = self.n;
        let ones = vec![Rational::one(); n];
        let mut out = BTreeSet::new();
        for_each_subset(self.facets.len(), n, |idx| {
            let rows: Matrix = idx.iter().map(|&i| self.facets[i].clone()).collect();
            if let Some(x) = solve(&rows, &ones) {
                if self.contains(&x) {
                    out.insert(x);
                }
            }
        });
        Ok(out.into_iter().collect())
    }

    /// `sup{‖x‖₁ : x ∈ K}`, attained at a vertex.
    pub fn max_vertex_norm_1(&self) -> Result<Rational> {
        Ok(self
            .vertices()?
            .iter()
            .map(|v| norm_1(v))
            .max()
            .unwrap_or_else(Rational::zero))
    }

    /// All `s ∈ S` with `γ_K(s) ≤ factor`, sorted.
    pub fn enumerate_s_in_dilate(&self, factor: &Rational) -> Result<Vec<Vector>> {
        if !factor.is_positive() {
            return Err(Error::OutOfRange(format!("dilation factor must be positive, got {factor}")));
        }
        let verts = self.vertices()?;
        let n = self.n;
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        let mut total: u64 = 1;
        for j in 0..n {
            let coords = verts.iter().map(|v| factor * &v[j]);
            let (min, max) = coords.fold((None::<Rational>, None::<Rational>), |(mn, mx), c| {
                (
                    Some(mn.map_or(c.clone(), |m| m.min(c.clone()))),
                    Some(mx.map_or(c.clone(), |m| m.max(c))),
                )
            });
            let (min, max) = (min.ok_or(Error::Unbounded)?, max.ok_or(Error::Unbounded)?);
            let l = (min - &self.b[j]).ceil();
            let h = (max - &self.b[j]).floor();
            let (Some(l), Some(h)) = (l.to_i64(), h.to_i64()) else {
                return Err(Error::Precondition("enumeration box exceeds i64".into()));
            };
            if h < l {
                return Ok(Vec::new());
            }
            total = total.saturating_mul((h - l + 1) as u64);
            lo.push(l);
            hi.push(h);
        }
        if total > MAX_BOX_POINTS {
            return Err(Error::Precondition(format!("enumeration box has {total} points")));
        }
        let mut z = lo.clone();
        let mut out = Vec::new();
        loop {
            let s: Vector = z.iter().zip(&self.b).map(|(&zi, bi)| bi + Rational::from(zi)).collect();
            if self.gauge(&s) <= *factor {
                out.push(s);
            }
            let mut j = 0;
            loop {
                if j == n {
                    out.sort();
                    return Ok(out);
                }
                if z[j] < hi[j] {
                    z[j] += 1;
                    break;
                }
                z[j] = lo[j];
                j += 1;
            }
        }
    }

    /// S-points of `K`; errors with a witness if one lies in the interior.
    pub fn boundary_s_points(&self) -> Result<Vec<Vector>> {
        let pts = self.enumerate_s_in_dilate(&Rational::one())?;
        if let Some(s) = pts.iter().find(|s| self.gauge(s) < Rational::one()) {
            return Err(Error::NotSFree(format!("{} lies in the interior", fmt_point(s))));
        }
        Ok(pts)
    }
}

pub(crate) fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Calls `f` on every increasing `k`-subset of `0..m`.
pub(crate) fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + m - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn v(xs: &[(i64, i64)]) -> Vector {
        xs.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    pub fn diamond() -> SFreePolyhedron {
        let f = |a: i64, b: i64| v(&[(a, 1), (b, 1)]);
        SFreePolyhedron::new(2, v(&[(1, 2), (1, 2)]), vec![f(1, 1), f(1, -1), f(-1, 1), f(-1, -1)]).unwrap()
    }

    #[test]
    fn gauge_and_norm() {
        let k = diamond();
        assert_eq!(k.gauge(&v(&[(1, 1), (0, 1)])), rat(1, 1));
        assert_eq!(k.gauge(&v(&[(0, 1), (0, 1)])), rat(0, 1));
        assert_eq!(k.norm(), rat(1, 1));
        assert_eq!(k.scale_normals(&rat(2, 1)).unwrap().norm(), rat(2, 1));
    }

    #[test]
    fn norm_is_sup_over_l1_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(1..5);
            let m = rng.gen_range(1..6);
            let facets: Vec<Vector> = (0..m)
                .map(|_| (0..n).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..5))).collect())
                .filter(|a: &Vector| a.iter().any(|x| !x.is_zero()))
                .collect();
            if facets.is_empty() {
                continue;
            }
            let mut b = vec![rat(0, 1); n];
            b[0] = rat(1, 2);
            let k = SFreePolyhedron::new(n, b, facets).unwrap();
            let mut sup = None::<Rational>;
            for j in 0..n {
                for sign in [1, -1] {
                    let mut e = vec![rat(0, 1); n];
                    e[j] = rat(sign, 1);
                    let g = k.gauge(&e);
                    sup = Some(sup.map_or(g.clone(), |s| s.max(g)));
                }
            }
            assert_eq!(sup.unwrap(), k.norm());
        }
    }

    #[test]
    fn gauge_laws() {
        let k = diamond();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut r = || v(&[(rng.gen_range(-20..20), 7), (rng.gen_range(-20..20), 5)]);
        for _ in 0..100 {
            let (x, y) = (r(), r());
            let lam = rat(x[0].numer().to_i64().unwrap().abs(), 3);
            assert_eq!(k.gauge(&scale(&lam, &x)), &lam * k.gauge(&x));
            let sum: Vector = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            assert!(k.gauge(&sum) <= k.gauge(&x) + k.gauge(&y));
            let inside = x[0].abs() + x[1].abs() <= rat(1, 1);
            assert_eq!(k.contains(&x), inside);
        }
    }

    #[test]
    fn boundedness() {
        assert!(diamond().is_bounded());
        let strip = SFreePolyhedron::new(2, v(&[(1, 2), (1, 4)]), vec![v(&[(2, 1), (0, 1)]), v(&[(-2, 1), (0, 1)])]).unwrap();
        assert!(!strip.is_bounded());
        let wedge = SFreePolyhedron::new(2, v(&[(1, 2), (0, 1)]), vec![v(&[(1, 1), (0, 1)]), v(&[(0, 1), (1, 1)]), v(&[(-1, 1), (-1, 1)])]).unwrap();
        assert!(wedge.is_bounded());
        let open = SFreePolyhedron::new(2, v(&[(1, 2), (0, 1)]), vec![v(&[(1, 1), (0, 1)]), v(&[(0, 1), (1, 1)]), v(&[(-1, 1), (1, 1)])]).unwrap();
        assert!(!open.is_bounded());
        assert_eq!(strip.vertices(), Err(Error::Unbounded));
    }

    #[test]
    fn diamond_s_points() {
        let k = diamond();
        let pts = k.enumerate_s_in_dilate(&rat(1, 1)).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|s| k.gauge(s) == rat(1, 1)));
        assert!(k.enumerate_s_in_dilate(&rat(99, 100)).unwrap().is_empty());
        assert_eq!(k.max_vertex_norm_1().unwrap(), rat(1, 1));
        assert_eq!(k.vertices().unwrap().len(), 4);
    }

    #[test]
    fn interior_point_is_reported() {
        let k = diamond().scale_normals(&rat(1, 2)).unwrap();
        assert!(matches!(k.boundary_s_points(), Err(Error::NotSFree(_))));
    }

    #[test]
    fn json_shape() {
        let k = diamond();
        let s = serde_json::to_string(&k).unwrap();
        assert!(s.starts_with(r#"{"n":2,"b":["1/2","1/2"],"facets":[["1","1"]"#));
        let back: SFreePolyhedron = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
        assert!(serde_json::from_str::<SFreePolyhedron>(r#"{"n":2,"b":["1","0"],"facets":[["1","1"]]}"#).is_err());
        assert!(serde_json::from_str::<SFreePolyhedron>(r#"{"n":2,"b":["1/2","0"],"facets":[]}"#).is_err());
    }

    #[test]
    fn subsets() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[5], vec![2, 3]);
        let mut count = 0;
        for_each_subset(3, 0, |_| count += 1);
        assert_eq!(count, 1);
    }
}
