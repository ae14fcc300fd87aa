//! Hermitian forms `x^T H x^{(q)}` over `F_{q^2}` and their linear sections.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::linalg::{Coords, Mat, MAX_COORDS};
use crate::projgeom::{projective_count, Hyperplane, LinearSubspace, PointSpace, ProjPoint};

/// Default cap on point evaluations for a single enumeration.
pub const DEFAULT_BUDGET: u64 = 300_000_000;

/// `|U_m(F_{q^2})| = (q^m - (-1)^m)(q^{m+1} - (-1)^{m+1})/(q^2 - 1)` for a
/// non-degenerate Hermitian variety in `P^m`; zero for `m < 0`.
pub fn hermitian_points(m: isize, q: u64) -> u128 {
    if m < 0 {
        return 0;
    }
    let q = q as i128;
    let sign = |k: isize| if k % 2 == 0 { 1i128 } else { -1 };
    let a = q.pow(m as u32) - sign(m);
    let b = q.pow(m as u32 + 1) - sign(m + 1);
    ((a * b) / (q * q - 1)) as u128
}

/// Points on a rank-`r` Hermitian variety in `P^n`, i.e. the cone
/// `Π_{n-r} U_{r-1}`: `|P^{n-r}| + q^{2(n-r+1)} |U_{r-1}|`.
pub fn count_points_formula(n: usize, q: u64, r: usize) -> Result<u128> {
    if r == 0 || r > n + 1 {
        return Err(Error::OutOfRange(format!("rank {r} not in 1..={}", n + 1)));
    }
    let vertex = n as isize - r as isize;
    let lift = (q as u128).pow(2 * (vertex + 1) as u32);
    Ok(projective_count(vertex, q) + lift * hermitian_points(r as isize - 1, q))
}

/// Shape `Π_v U_s` of a section of a non-degenerate Hermitian variety by an
/// `m`-dimensional subspace, with `v + s = m - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectionType {
    /// Vertex dimension; `-1` for a non-degenerate section.
    pub v: isize,
    /// Dimension of the non-degenerate base; `-1` when the subspace lies on the variety.
    pub s: isize,
}

impl SectionType {
    pub fn new(v: isize, s: isize) -> Self {
        assert!(v >= -1 && s >= -1, "section indices below -1");
        SectionType { v, s }
    }

    /// Dimension of the cut subspace.
    pub fn m(&self) -> isize {
        self.v + self.s + 1
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.v == -1
    }

    /// Number of rational points of the cone.
    pub fn count(&self, q: u64) -> u128 {
        if self.s < 0 {
            return projective_count(self.m(), q);
        }
        count_points_formula(self.m() as usize, q, self.s as usize + 1).expect("rank within range")
    }
}

impl fmt::Display for SectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.v, self.s) {
            (-1, s) => write!(f, "U_{s}"),
            (v, -1) => write!(f, "Π_{v}"),
            (v, s) => write!(f, "Π_{v} U_{s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tangency {
    Tangent,
    NonTangent,
}

/// Tangent hyperplanes carry their point of tangency, non-tangent ones the
/// external point they are polar to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangencyReport {
    pub kind: Tangency,
    pub witness: ProjPoint,
}

/// Change of basis `P` with `P H P^{(q)T} = diag(1, .., 1, 0, .., 0)`.
#[derive(Clone, Copy, Debug)]
pub struct Congruence {
    pub transform: Mat,
    pub rank: usize,
}

/// Restriction of a form to a subspace, expressed in the subspace's basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    Form(HermitianForm),
    /// The subspace lies on the variety (or is empty when `m = -1`).
    Zero { m: isize },
}

/// A Hermitian form on `F_{q^2}^{n+1}`; its zero set is a Hermitian variety in `P^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    n: usize,
    matrix: Mat,
    inverse: Option<Mat>,
    identity: bool,
}

impl HermitianForm {
    /// Validates `H ≠ 0` and `H^T = H^{(q)}`.
    pub fn new(f: &FieldCtx, matrix: Mat) -> Result<Self> {
        let size = matrix.rows();
        if size != matrix.cols() {
            return Err(Error::NotHermitian("matrix is not square"));
        }
        if size == 0 || size > MAX_COORDS {
            return Err(Error::DimensionTooLarge(size.saturating_sub(1)));
        }
        if matrix.is_zero() {
            return Err(Error::NotHermitian("zero matrix"));
        }
        if matrix.transpose() != matrix.frob(f) {
            return Err(Error::NotHermitian("H^T differs from H^(q)"));
        }
        Ok(HermitianForm {
            n: size - 1,
            inverse: matrix.inverse(f),
            identity: matrix == Mat::identity(size),
            matrix,
        })
    }

    /// `x_0^{q+1} + ... + x_n^{q+1}`.
    pub fn standard(n: usize) -> Self {
        assert!(n < MAX_COORDS, "dimension too large");
        let id = Mat::identity(n + 1);
        HermitianForm { n, matrix: id, inverse: Some(id), identity: true }
    }

    /// `x_0^{q+1} + ... + x_{r-1}^{q+1}` on `P^n`.
    pub fn with_rank(n: usize, r: usize) -> Result<Self> {
        if r == 0 || r > n + 1 {
            return Err(Error::OutOfRange(format!("rank {r} not in 1..={}", n + 1)));
        }
        if r == n + 1 {
            return Ok(Self::standard(n));
        }
        let mut m = Mat::zeros(n + 1, n + 1);
        for i in 0..r {
            m.set(i, i, Elem::ONE);
        }
        Ok(HermitianForm { n, matrix: m, inverse: None, identity: false })
    }

    /// Uniformly random Hermitian matrix (resampled if zero).
    pub fn random<R: Rng + ?Sized>(f: &FieldCtx, n: usize, rng: &mut R) -> Self {
        let sub: Vec<Elem> = f.subfield_elements().collect();
        loop {
            let mut m = Mat::zeros(n + 1, n + 1);
            for i in 0..=n {
                m.set(i, i, sub[rng.gen_range(0..sub.len())]);
                for j in i + 1..=n {
                    let a = f.elem(rng.gen_range(0..f.order()));
                    m.set(i, j, a);
                    m.set(j, i, f.frob(a));
                }
            }
            if let Ok(h) = Self::new(f, m) {
                return h;
            }
        }
    }

    /// Random Hermitian matrix of full rank.
    pub fn random_nondegenerate<R: Rng + ?Sized>(f: &FieldCtx, n: usize, rng: &mut R) -> Self {
        loop {
            let h = Self::random(f, n, rng);
            if h.inverse.is_some() {
                return h;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.inverse.is_some()
    }

    fn require_nondegenerate(&self, f: &FieldCtx) -> Result<&Mat> {
        self.inverse.as_ref().ok_or_else(|| Error::Degenerate { rank: self.rank(f), full: self.n + 1 })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, actual: len });
        }
        Ok(())
    }

    /// `x^T H y^{(q)}`: linear in `x`, Frobenius-semilinear in `y`.
    pub fn sesquilinear(&self, f: &FieldCtx, x: &[Elem], y: &[Elem]) -> Elem {
        let mut acc = Elem::ZERO;
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let mut row = Elem::ZERO;
            for (j, &yj) in y.iter().enumerate() {
                row = f.add(row, f.mul(self.matrix.get(i, j), f.frob(yj)));
            }
            acc = f.add(acc, f.mul(xi, row));
        }
        acc
    }

    /// Value of the form at a coordinate vector.
    #[inline]
    pub fn evaluate(&self, f: &FieldCtx, x: &[Elem]) -> Elem {
        if self.identity {
            x.iter().fold(Elem::ZERO, |acc, &c| f.add(acc, f.norm(c)))
        } else {
            self.sesquilinear(f, x, x)
        }
    }

    #[inline]
    pub fn contains_coords(&self, f: &FieldCtx, x: &[Elem]) -> bool {
        self.evaluate(f, x).is_zero()
    }

    pub fn contains(&self, f: &FieldCtx, p: &ProjPoint) -> bool {
        self.contains_coords(f, p.coords())
    }

    pub fn rank(&self, f: &FieldCtx) -> usize {
        self.matrix.rank(f)
    }

    /// Congruence diagonalization: pivot on a nonzero diagonal entry when one
    /// exists, otherwise create one from a nonzero mixed term, then scale the
    /// pivot to 1 with a norm root and clear it from the remaining rows.
    pub fn congruence_reduce(&self, f: &FieldCtx) -> Congruence {
        let size = self.n + 1;
        let mut p = Mat::identity(size);
        let h = |p: &Mat, i: usize, j: usize| self.sesquilinear(f, p.row(i), p.row(j));
        let mut k = 0;
        while k < size {
            let pivot = match (k..size).find(|&i| !h(&p, i, i).is_zero()) {
                Some(i) => i,
                None => {
                    let pair = (k..size).flat_map(|i| (i + 1..size).map(move |j| (i, j))).find(|&(i, j)| !h(&p, i, j).is_zero());
                    let Some((i, j)) = pair else { break };
                    // h(u + λv, u + λv) = Tr(λ h(v, u)) when h(u,u) = h(v,v) = 0
                    let c = h(&p, j, i);
                    let lambda = f.elements().find(|&l| !f.trace(f.mul(l, c)).is_zero()).expect("trace is onto F_q");
                    let vj: Coords = p.row(j).iter().copied().collect();
                    for (col, &x) in vj.iter().enumerate() {
                        let updated = f.add(p.get(i, col), f.mul(lambda, x));
                        p.set(i, col, updated);
                    }
                    i
                }
            };
            p.swap_rows(k, pivot);
            let d = h(&p, k, k);
            let mu = f.solve_norm(f.inv(d));
            for col in 0..size {
                let scaled = f.mul(mu, p.get(k, col));
                p.set(k, col, scaled);
            }
            for j in k + 1..size {
                let alpha = h(&p, j, k);
                if alpha.is_zero() {
                    continue;
                }
                for col in 0..size {
                    let t = f.mul(alpha, p.get(k, col));
                    let updated = f.sub(p.get(j, col), t);
                    p.set(j, col, updated);
                }
            }
            k += 1;
        }
        Congruence { transform: p, rank: k }
    }

    /// Exact `|V(f)(F_{q^2})|` by scanning `P^n`.
    pub fn count_points_enum(&self, f: &FieldCtx, budget: u64) -> Result<u64> {
        let space = PointSpace::for_field(self.n, f)?;
        if space.count() > budget {
            return Err(Error::BudgetExceeded { what: "point count", needed: space.count() as u128, budget });
        }
        const CHUNK: u64 = 1 << 14;
        let chunks = space.count().div_ceil(CHUNK);
        Ok((0..chunks)
            .into_par_iter()
            .map(|c| space.iter_range(c * CHUNK, (c + 1) * CHUNK).filter(|x| self.contains_coords(f, x)).count() as u64)
            .sum())
    }

    /// Covector of the tangent hyperplane at a point of the variety:
    /// `x ↦ x^T H p^{(q)}`.
    pub fn tangent_hyperplane(&self, f: &FieldCtx, p: &ProjPoint) -> Result<Hyperplane> {
        self.check_len(p.coords().len())?;
        if !self.contains(f, p) {
            return Err(Error::NotOnVariety);
        }
        let pq: Coords = p.coords().iter().map(|&c| f.frob(c)).collect();
        let cov = self.matrix.mul_vec(f, &pq);
        // p lies in the radical of a degenerate form; every hyperplane is then "tangent".
        Hyperplane::new(f, &cov).ok_or(Error::Degenerate { rank: self.rank(f), full: self.n + 1 })
    }

    /// `(H^{-1} a)^{(q)}`: the point whose polar (or tangent) hyperplane is `V(a·x)`.
    pub fn polar_point(&self, f: &FieldCtx, hyperplane: &Hyperplane) -> Result<ProjPoint> {
        self.check_len(hyperplane.covector().len())?;
        let inv = self.require_nondegenerate(f)?;
        let c: Coords = inv.mul_vec(f, hyperplane.covector()).iter().map(|&x| f.frob(x)).collect();
        Ok(ProjPoint::new(f, &c).expect("H^{-1} is invertible"))
    }

    pub fn classify_hyperplane(&self, f: &FieldCtx, hyperplane: &Hyperplane) -> Result<TangencyReport> {
        let witness = self.polar_point(f, hyperplane)?;
        let kind = if self.contains(f, &witness) { Tangency::Tangent } else { Tangency::NonTangent };
        Ok(TangencyReport { kind, witness })
    }

    /// `B H B^{(q)T}` for the basis `B` of the subspace.
    pub fn restrict(&self, f: &FieldCtx, pi: &LinearSubspace) -> Result<Restriction> {
        self.check_len(pi.ambient_dim() + 1)?;
        let b = pi.basis();
        if b.rows() == 0 {
            return Ok(Restriction::Zero { m: -1 });
        }
        let restricted = b.mul(f, &self.matrix).mul(f, &b.conj_transpose(f));
        if restricted.is_zero() {
            return Ok(Restriction::Zero { m: pi.dim() });
        }
        Ok(Restriction::Form(HermitianForm::new(f, restricted).expect("restriction of a Hermitian form is Hermitian")))
    }

    /// Type `Π_v U_s` of the section by `pi`, read off the rank of the restriction.
    pub fn classify_section(&self, f: &FieldCtx, pi: &LinearSubspace) -> Result<SectionType> {
        self.require_nondegenerate(f)?;
        let m = pi.dim();
        if m < 0 || m > self.n as isize {
            return Err(Error::OutOfRange(format!("subspace dimension {m} not in 0..={}", self.n)));
        }
        let rank = match self.restrict(f, pi)? {
            Restriction::Zero { .. } => 0,
            Restriction::Form(h) => h.rank(f) as isize,
        };
        let s = rank - 1;
        let t = self.n as isize - 2 * m + s;
        assert!(t >= 0, "section Π_{} U_{s} violates n - 2m + s ≥ 0", m - rank);
        Ok(SectionType { v: m - rank, s })
    }

    /// `q^2 |U_{n-2}| + 1`, the number of tangent hyperplanes through a point of the variety.
    pub fn tangents_through_count(&self, f: &FieldCtx, p: &ProjPoint) -> Result<u128> {
        self.check_len(p.coords().len())?;
        self.require_nondegenerate(f)?;
        if !self.contains(f, p) {
            return Err(Error::NotOnVariety);
        }
        let q = f.q() as u128;
        Ok(q * q * hermitian_points(self.n as isize - 2, f.q() as u64) + 1)
    }

    /// Counts `{Q on the variety : P ∈ T_Q}` by scanning all points.
    pub fn tangents_through_enum(&self, f: &FieldCtx, p: &ProjPoint, budget: u64) -> Result<u64> {
        self.check_len(p.coords().len())?;
        self.require_nondegenerate(f)?;
        if !self.contains(f, p) {
            return Err(Error::NotOnVariety);
        }
        let space = PointSpace::for_field(self.n, f)?;
        if space.count() > budget {
            return Err(Error::BudgetExceeded { what: "tangent scan", needed: space.count() as u128, budget });
        }
        let mut hits = 0;
        for q in space.points() {
            if self.contains(f, &q) && self.tangent_hyperplane(f, &q)?.contains(f, p) {
                hits += 1;
            }
        }
        Ok(hits)
    }
}

/// Section type of `V(a) ∩ V(b)` computed from the 2×2 Gram matrix of the
/// polar points `(H^{-1}a)^{(q)}`, `(H^{-1}b)^{(q)}`: the radical of the
/// section has the same dimension as the radical of the polar line, so
/// `s = n - 4 + rank(G)`.
pub fn codim2_type_from_polars(f: &FieldCtx, form: &HermitianForm, pa: &[Elem], pb: &[Elem]) -> SectionType {
    let haa = form.evaluate(f, pa);
    let hbb = form.evaluate(f, pb);
    let hab = form.sesquilinear(f, pa, pb);
    let rank = if !f.sub(f.mul(haa, hbb), f.norm(hab)).is_zero() {
        2
    } else if haa.is_zero() && hbb.is_zero() && hab.is_zero() {
        0
    } else {
        1
    };
    let n = form.n() as isize;
    let s = n - 4 + rank;
    SectionType { v: n - 3 - s, s }
}

/// Rank of the Gram matrix `(h(p_i, p_j))` of a list of vectors.
pub fn gram_rank(f: &FieldCtx, form: &HermitianForm, vectors: &[&[Elem]]) -> usize {
    let k = vectors.len();
    let mut g = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g.set(i, j, form.sesquilinear(f, vectors[i], vectors[j]));
        }
    }
    g.rank(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgeom::intersect;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: u8) -> Elem {
        Elem(i)
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(hermitian_points(0, 2), 0);
        assert_eq!(hermitian_points(1, 2), 3);
        assert_eq!(hermitian_points(2, 2), 9);
        assert_eq!(hermitian_points(3, 2), 45);
        assert_eq!(hermitian_points(4, 2), 165);
        assert_eq!(hermitian_points(3, 3), 280);
        assert_eq!(hermitian_points(2, 3), 28);
        assert_eq!(hermitian_points(4, 7), 840_400);
        assert_eq!(hermitian_points(3, 7), 17_200);
        assert_eq!(hermitian_points(2, 7), 344);
    }

    #[test]
    fn formula_examples() {
        assert_eq!(count_points_formula(4, 2, 5).unwrap(), 165);
        // codim-2 sections in P^4: Π_0 U_1 and Π_1 U_0 inside a plane
        assert_eq!(count_points_formula(2, 2, 2).unwrap(), 13);
        assert_eq!(count_points_formula(2, 2, 1).unwrap(), 5);
        assert!(count_points_formula(2, 2, 0).is_err());
        assert!(count_points_formula(2, 2, 4).is_err());
    }

    #[test]
    fn standard_form_small_counts() {
        let f = FieldCtx::new(2).unwrap();
        assert_eq!(HermitianForm::standard(1).count_points_enum(&f, DEFAULT_BUDGET).unwrap(), 3);
        assert_eq!(HermitianForm::standard(2).count_points_enum(&f, DEFAULT_BUDGET).unwrap(), 9);
        assert_eq!(HermitianForm::standard(0).count_points_enum(&f, DEFAULT_BUDGET).unwrap(), 0);
        assert_eq!(HermitianForm::standard(3).count_points_enum(&f, DEFAULT_BUDGET).unwrap(), 45);
        assert_eq!(HermitianForm::standard(4).count_points_enum(&f, DEFAULT_BUDGET).unwrap(), 165);
        assert!(matches!(
            HermitianForm::standard(4).count_points_enum(&f, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let f = FieldCtx::new(2).unwrap();
        let h = HermitianForm::standard(3);
        let p = ProjPoint::new(&f, &[e(1), e(2), e(0), e(0)]).unwrap();
        assert!(h.contains(&f, &p));
        assert_eq!(h.evaluate(&f, ProjPoint::unit(3, 0).coords()), Elem::ONE);
        let deg = HermitianForm::with_rank(3, 2).unwrap();
        assert_eq!(deg.evaluate(&f, ProjPoint::unit(3, 3).coords()), Elem::ZERO);
    }

    #[test]
    fn representative_independence() {
        let f = FieldCtx::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = HermitianForm::random(&f, 3, &mut rng);
        for x in PointSpace::for_field(3, &f).unwrap().iter().step_by(11) {
            let v = h.evaluate(&f, &x);
            for lam in f.elements().skip(1) {
                let y: Coords = x.iter().map(|&c| f.mul(lam, c)).collect();
                assert_eq!(h.evaluate(&f, &y), f.mul(f.norm(lam), v));
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let f = FieldCtx::new(2).unwrap();
        let mut m = Mat::identity(2);
        m.set(0, 1, e(2));
        m.set(1, 0, e(2)); // needs frob(ω) = 3
        assert!(matches!(HermitianForm::new(&f, m), Err(Error::NotHermitian(_))));
        assert!(HermitianForm::new(&f, Mat::zeros(2, 2)).is_err());
        m.set(1, 0, e(3));
        assert!(HermitianForm::new(&f, m).is_ok());
    }

    fn check_certificate(f: &FieldCtx, h: &HermitianForm) {
        let c = h.congruence_reduce(f);
        let d = c.transform.mul(f, h.matrix()).mul(f, &c.transform.conj_transpose(f));
        let mut expected = Mat::zeros(h.n() + 1, h.n() + 1);
        for i in 0..c.rank {
            expected.set(i, i, Elem::ONE);
        }
        assert_eq!(d, expected);
        assert!(c.transform.inverse(f).is_some());
        assert_eq!(c.rank, h.rank(f));
    }

    #[test]
    fn congruence_identity_and_radical() {
        let f = FieldCtx::new(2).unwrap();
        let id = HermitianForm::standard(3);
        let c = id.congruence_reduce(&f);
        assert_eq!(c.rank, 4);
        assert_eq!(c.transform, Mat::identity(4));
        let deg = HermitianForm::with_rank(3, 3).unwrap();
        assert_eq!(deg.congruence_reduce(&f).rank, 3);
    }

    #[test]
    fn congruence_with_zero_diagonal() {
        // hyperbolic plane [[0,1],[1,0]] has no nonzero diagonal entry
        for q in [2, 3, 4] {
            let f = FieldCtx::new(q).unwrap();
            let mut m = Mat::zeros(3, 3);
            m.set(0, 1, Elem::ONE);
            m.set(1, 0, Elem::ONE);
            let h = HermitianForm::new(&f, m).unwrap();
            check_certificate(&f, &h);
            assert_eq!(h.congruence_reduce(&f).rank, 2);
        }
    }

    #[test]
    fn congruence_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2, 3, 4, 5] {
            let f = FieldCtx::new(q).unwrap();
            for n in 1..5 {
                for _ in 0..20 {
                    let h = HermitianForm::random(&f, n, &mut rng);
                    check_certificate(&f, &h);
                }
            }
        }
    }

    #[test]
    fn degenerate_counts_match_cone_formula() {
        for q in [2u32, 3] {
            let f = FieldCtx::new(q).unwrap();
            for n in 1..=4 {
                for r in 1..=n + 1 {
                    let h = HermitianForm::with_rank(n, r).unwrap();
                    assert_eq!(
                        h.count_points_enum(&f, DEFAULT_BUDGET).unwrap() as u128,
                        count_points_formula(n, q as u64, r).unwrap(),
                        "q={q} n={n} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn tangent_hyperplane_example() {
        let f = FieldCtx::new(2).unwrap();
        let h = HermitianForm::standard(2);
        let p = ProjPoint::new(&f, &[e(1), e(2), e(0)]).unwrap();
        let t = h.tangent_hyperplane(&f, &p).unwrap();
        assert_eq!(t.covector(), &[e(1), e(3), e(0)]);
        assert!(t.contains(&f, &p));
        assert_eq!(h.tangent_hyperplane(&f, &ProjPoint::unit(2, 0)), Err(Error::NotOnVariety));
    }

    #[test]
    fn classify_hyperplane_examples() {
        let f = FieldCtx::new(2).unwrap();
        let h = HermitianForm::standard(4);
        let r = h.classify_hyperplane(&f, &Hyperplane::coordinate(4, 0)).unwrap();
        assert_eq!(r.kind, Tangency::NonTangent);
        assert_eq!(r.witness, ProjPoint::unit(4, 0));

        let space = PointSpace::for_field(4, &f).unwrap();
        let mut tangent = 0;
        for hp in space.hyperplanes() {
            let rep = h.classify_hyperplane(&f, &hp).unwrap();
            let sec = h.classify_section(&f, &hp.as_subspace(&f)).unwrap();
            match rep.kind {
                Tangency::Tangent => {
                    tangent += 1;
                    assert_eq!(h.tangent_hyperplane(&f, &rep.witness).unwrap(), hp);
                    assert_eq!(sec, SectionType::new(0, 2));
                }
                Tangency::NonTangent => {
                    assert!(!h.contains(&f, &rep.witness));
                    assert_eq!(sec, SectionType::new(-1, 3));
                }
            }
        }
        assert_eq!(tangent, 165);
        assert!(matches!(
            HermitianForm::with_rank(4, 3).unwrap().classify_hyperplane(&f, &Hyperplane::coordinate(4, 0)),
            Err(Error::Degenerate { rank: 3, full: 5 })
        ));
    }

    #[test]
    fn restriction_examples() {
        let f = FieldCtx::new(2).unwrap();
        let h = HermitianForm::standard(4);
        assert_eq!(h.restrict(&f, &LinearSubspace::whole(4)).unwrap(), Restriction::Form(h.clone()));
        let pi = intersect(&f, &[Hyperplane::coordinate(4, 0), Hyperplane::coordinate(4, 1)]);
        match h.restrict(&f, &pi).unwrap() {
            Restriction::Form(r) => assert_eq!(*r.matrix(), Mat::identity(3)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(h.classify_section(&f, &pi).unwrap(), SectionType::new(-1, 2));
        // (1, ω, 0, 0, 0) and (0, 0, 1, ω, 0) span a line on U_4
        let line = LinearSubspace::span(&f, 4, &[[e(1), e(2), e(0), e(0), e(0)], [e(0), e(0), e(1), e(2), e(0)]]);
        assert_eq!(h.restrict(&f, &line).unwrap(), Restriction::Zero { m: 1 });
        assert_eq!(h.classify_section(&f, &line).unwrap(), SectionType::new(1, -1));
    }

    #[test]
    fn tangents_through_examples() {
        for (q, n, expected) in [(2u32, 3usize, 13u128), (2, 4, 37), (3, 4, 253)] {
            let f = FieldCtx::new(q).unwrap();
            let h = HermitianForm::standard(n);
            let space = PointSpace::for_field(n, &f).unwrap();
            let p = space.points().find(|p| h.contains(&f, p)).unwrap();
            assert_eq!(h.tangents_through_count(&f, &p).unwrap(), expected);
            if q == 2 {
                assert_eq!(h.tangents_through_enum(&f, &p, DEFAULT_BUDGET).unwrap() as u128, expected);
            }
        }
    }

    #[test]
    fn polar_gram_route_matches_restriction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2, 3] {
            let f = FieldCtx::new(q).unwrap();
            for n in [4usize, 5] {
                let h = HermitianForm::random_nondegenerate(&f, n, &mut rng);
                let space = PointSpace::for_field(n, &f).unwrap();
                for _ in 0..200 {
                    let a = Hyperplane::from_canonical(space.unrank(rng.gen_range(0..space.count())));
                    let b = Hyperplane::from_canonical(space.unrank(rng.gen_range(0..space.count())));
                    if a == b {
                        continue;
                    }
                    let pa = h.polar_point(&f, &a).unwrap();
                    let pb = h.polar_point(&f, &b).unwrap();
                    let via_polar = codim2_type_from_polars(&f, &h, pa.coords(), pb.coords());
                    let via_restrict = h.classify_section(&f, &intersect(&f, &[a, b])).unwrap();
                    assert_eq!(via_polar, via_restrict);
                }
            }
        }
    }
}
