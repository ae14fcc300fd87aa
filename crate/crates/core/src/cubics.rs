//! Unions of hyperplanes as cubic hypersurfaces: intersection counts with
//! `U_n`, the extremal configuration, and the closed-form maxima.

use std::collections::HashSet;

use num_bigint::BigInt;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::hermitian::{HermitianForm, SectionType, Tangency};
use crate::linalg::{Coords, MAX_COORDS};
use crate::poly::{monomial_basis, Hypersurface};
use crate::projgeom::{intersect, pencil_through, Hyperplane, LinearSubspace, PointSpace};
use crate::sequences::hermitian_count;

/// Distinct hyperplanes whose union is the hypersurface of interest, with
/// their tangency to the variety and the type of their common section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    pub n: usize,
    pub q: u32,
    pub hyperplanes: Vec<Hyperplane>,
    pub tangency: Vec<Tangency>,
    /// Section type of the common intersection of all hyperplanes.
    pub pi_section: SectionType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    InclusionExclusion,
}

/// Section counts behind an inclusion–exclusion total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Breakdown {
    /// Common intersection has codimension 2.
    pub pencil: bool,
    pub singles: Vec<u64>,
    /// In the order (0,1), (0,2), (1,2).
    pub pairs: Vec<u64>,
    pub triple: u64,
    pub pair_types: Vec<SectionType>,
    pub triple_type: SectionType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionReport {
    pub count: u64,
    pub method: Method,
    pub breakdown: Option<Breakdown>,
}

/// JSON shape of an arrangement together with its intersection count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrangementRecord {
    pub n: usize,
    pub q: u32,
    pub covectors: Vec<Vec<u8>>,
    pub tangency: Vec<Tangency>,
    pub pi_section: SectionType,
    pub count: u64,
}

impl Arrangement {
    pub fn new(f: &FieldCtx, form: &HermitianForm, hyperplanes: Vec<Hyperplane>) -> Result<Self> {
        if hyperplanes.is_empty() {
            return Err(Error::PreconditionViolated("arrangement needs at least one hyperplane".into()));
        }
        let n = form.n();
        for h in &hyperplanes {
            if h.dim() != n {
                return Err(Error::DimensionMismatch { expected: n + 1, actual: h.dim() + 1 });
            }
        }
        let distinct: HashSet<&Hyperplane> = hyperplanes.iter().collect();
        if distinct.len() != hyperplanes.len() {
            return Err(Error::DuplicateHyperplanes);
        }
        let tangency = hyperplanes
            .iter()
            .map(|h| form.classify_hyperplane(f, h).map(|r| r.kind))
            .collect::<Result<Vec<_>>>()?;
        let common = intersect(f, &hyperplanes);
        let pi_section = section_or_empty(f, form, &common)?;
        Ok(Arrangement { n, q: f.q(), hyperplanes, tangency, pi_section })
    }

    pub fn common_subspace(&self, f: &FieldCtx) -> LinearSubspace {
        intersect(f, &self.hyperplanes)
    }

    /// The hyperplanes meet in a codimension-2 subspace.
    pub fn is_pencil(&self, f: &FieldCtx) -> bool {
        self.common_subspace(f).dim() == self.n as isize - 2
    }

    /// Product of the linear forms.
    pub fn to_hypersurface(&self, f: &FieldCtx) -> Hypersurface {
        let covs: Vec<&[Elem]> = self.hyperplanes.iter().map(|h| h.covector()).collect();
        Hypersurface::product_of_linear(f, &covs).expect("nonempty product of nonzero forms")
    }

    pub fn record(&self, count: u64) -> ArrangementRecord {
        ArrangementRecord {
            n: self.n,
            q: self.q,
            covectors: self.hyperplanes.iter().map(|h| h.covector().iter().map(|e| e.0).collect()).collect(),
            tangency: self.tangency.clone(),
            pi_section: self.pi_section,
            count,
        }
    }
}

/// The empty subspace has no points; `SectionType` cannot express it.
fn section_or_empty(f: &FieldCtx, form: &HermitianForm, pi: &LinearSubspace) -> Result<SectionType> {
    if pi.dim() < 0 {
        return Ok(SectionType { v: -1, s: -1 });
    }
    form.classify_section(f, pi)
}

fn section_count(f: &FieldCtx, t: SectionType) -> u64 {
    if t.m() < 0 {
        return 0;
    }
    t.count(f.q() as u64) as u64
}

/// `|V(C) ∩ U_n|` by scanning `P^n`.
pub fn intersect_count_enum(f: &FieldCtx, c: &Hypersurface, form: &HermitianForm, budget: u64) -> Result<u64> {
    if c.n() != form.n() {
        return Err(Error::DimensionMismatch { expected: form.n() + 1, actual: c.n() + 1 });
    }
    let space = PointSpace::for_field(form.n(), f)?;
    if space.count() > budget {
        return Err(Error::BudgetExceeded { what: "cubic intersection scan", needed: space.count() as u128, budget });
    }
    const CHUNK: u64 = 1 << 14;
    let chunks = space.count().div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|i| {
            space
                .iter_range(i * CHUNK, (i + 1) * CHUNK)
                .filter(|x| form.contains_coords(f, x) && c.vanishes_at(f, x))
                .count() as u64
        })
        .sum())
}

/// Inclusion–exclusion over the three hyperplanes, every term read off a
/// section type; no points are enumerated.
pub fn intersect_count_arrangement(f: &FieldCtx, arr: &Arrangement, form: &HermitianForm) -> Result<IntersectionReport> {
    let hs = &arr.hyperplanes;
    if hs.len() != 3 {
        return Err(Error::PreconditionViolated(format!("expected 3 hyperplanes, got {}", hs.len())));
    }
    if hs[0] == hs[1] || hs[0] == hs[2] || hs[1] == hs[2] {
        return Err(Error::DuplicateHyperplanes);
    }
    let singles = hs
        .iter()
        .map(|h| Ok(section_count(f, form.classify_section(f, &h.as_subspace(f))?)))
        .collect::<Result<Vec<u64>>>()?;
    let mut pair_types = Vec::with_capacity(3);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        pair_types.push(form.classify_section(f, &intersect(f, &[hs[i].clone(), hs[j].clone()]))?);
    }
    let pairs: Vec<u64> = pair_types.iter().map(|&t| section_count(f, t)).collect();
    let common = intersect(f, hs);
    let triple_type = section_or_empty(f, form, &common)?;
    let triple = section_count(f, triple_type);
    let count = singles.iter().sum::<u64>() + triple - pairs.iter().sum::<u64>();
    let pencil = common.dim() == arr.n as isize - 2;
    Ok(IntersectionReport {
        count,
        method: Method::InclusionExclusion,
        breakdown: Some(Breakdown { pencil, singles, pairs, triple, pair_types, triple_type }),
    })
}

/// Three hyperplanes through a common `Π_{n-2}` with non-degenerate section,
/// all tangent for odd `n` and all non-tangent for even `n`.
///
/// Pencils are taken from pairs of non-tangent hyperplanes in canonical
/// order; the first pencil with three members of the required kind wins and
/// the three smallest such members are returned. At most `max_pairs` pairs are
/// examined.
pub fn build_extremal(f: &FieldCtx, form: &HermitianForm, max_pairs: u64) -> Result<Arrangement> {
    let n = form.n();
    if n < 4 {
        return Err(Error::OutOfRange(format!("n = {n} must be at least 4")));
    }
    if !form.is_nondegenerate() {
        return Err(Error::Degenerate { rank: form.rank(f), full: n + 1 });
    }
    let (wanted, label) = if n % 2 == 0 { (Tangency::NonTangent, "non-tangent") } else { (Tangency::Tangent, "tangent") };
    let space = PointSpace::for_field(n, f)?;
    let is_tangent = |h: &Hyperplane| -> bool {
        matches!(form.classify_hyperplane(f, h), Ok(r) if r.kind == Tangency::Tangent)
    };
    let mut seen: HashSet<LinearSubspace> = HashSet::new();
    let mut best = 0;
    let mut examined = 0u64;
    for (i, a) in space.hyperplanes().enumerate() {
        if is_tangent(&a) {
            continue;
        }
        for b in space.iter_range(i as u64 + 1, space.count()).map(Hyperplane::from_canonical) {
            if examined >= max_pairs {
                return Err(Error::InsufficientPencilMembers { wanted: label, best });
            }
            examined += 1;
            if is_tangent(&b) {
                continue;
            }
            let pi = intersect(f, &[a.clone(), b]);
            if !seen.insert(pi) || !form.classify_section(f, &pi)?.is_nondegenerate() {
                continue;
            }
            let mut members = pencil_through(f, &pi)?;
            members.sort();
            let chosen: Vec<Hyperplane> = members
                .into_iter()
                .filter(|h| form.classify_hyperplane(f, h).map(|r| r.kind == wanted).unwrap_or(false))
                .collect();
            best = best.max(chosen.len());
            if chosen.len() >= 3 {
                return Arrangement::new(f, form, chosen[..3].to_vec());
            }
        }
    }
    Err(Error::InsufficientPencilMembers { wanted: label, best })
}

fn big_to_u128(v: BigInt) -> Result<u128> {
    u128::try_from(v).map_err(|e| Error::OutOfRange(format!("value does not fit 128 bits: {e}")))
}

/// `3|U_{n-1}| - 2|U_{n-2}|` for even `n`, `(3q^2 - 2)|U_{n-2}| + 3` for odd `n`.
pub fn max_formula(n: usize, q: u64) -> Result<u128> {
    if n < 4 {
        return Err(Error::OutOfRange(format!("n = {n} must be at least 4")));
    }
    let n = n as i64;
    let v = if n % 2 == 0 {
        3 * hermitian_count(n - 1, q) - 2 * hermitian_count(n - 2, q)
    } else {
        (3 * BigInt::from(q * q) - 2) * hermitian_count(n - 2, q) + 3
    };
    big_to_u128(v)
}

/// Count for three tangent members of a pencil over a non-degenerate
/// `Π_{n-2}`, even `n`: `(q^{2n-3}(3q^2 - 2) - q^n(q - 1) - 1)/(q^2 - 1)`.
pub fn all_tangent_pencil_value(n: usize, q: u64) -> Result<u128> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::OutOfRange(format!("n = {n} must be even and at least 4")));
    }
    let b = BigInt::from(q);
    let n = n as u32;
    let num = b.pow(2 * n - 3) * (3 * &b * &b - 2) - b.pow(n) * (&b - 1) - 1;
    big_to_u128(num / (&b * &b - 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineCheck {
    pub count: u64,
    pub bound: u64,
    pub holds: bool,
}

/// `(d - 1)(q + 1)q^{2n-6}`.
pub fn affine_bound(d: usize, n: usize, q: u64) -> u64 {
    (d as u64 - 1) * (q + 1) * q.pow(2 * n as u32 - 6)
}

/// Enumerates `|X ∩ U_n ∩ (Σ \ Π)|` and compares it with the affine bound.
pub fn check_affine_lachaud(
    f: &FieldCtx,
    x: &Hypersurface,
    form: &HermitianForm,
    sigma: &Hyperplane,
    pi: &LinearSubspace,
    budget: u64,
) -> Result<AffineCheck> {
    let n = form.n();
    let q = f.q() as u64;
    let d = x.degree();
    let fail = |m: &str| Err(Error::PreconditionViolated(m.into()));
    if x.n() != n || sigma.dim() != n || pi.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n + 1, actual: x.n() + 1 });
    }
    if n < 3 {
        return fail("n must be at least 3");
    }
    if d as u64 > q {
        return fail("degree exceeds q");
    }
    if pi.dim() != n as isize - 2 {
        return Err(Error::WrongDimension { expected: n as isize - 2, actual: pi.dim() });
    }
    let sigma_space = sigma.as_subspace(f);
    if !sigma_space.contains_subspace(f, pi) {
        return fail("Π is not contained in Σ");
    }
    let budget_needed = sigma_space.point_count(q);
    if budget_needed > budget as u128 {
        return Err(Error::BudgetExceeded { what: "hyperplane scan", needed: budget_needed, budget });
    }
    // d < q^2, so vanishing on every rational point means containment.
    if !pi.points(f).all(|p| x.vanishes_at(f, p.coords())) {
        return fail("Π is not contained in the hypersurface");
    }
    if x.divisible_by(f, sigma) {
        return fail("Σ is contained in the hypersurface");
    }
    let count = sigma_space
        .points(f)
        .filter(|p| form.contains(f, p) && x.vanishes_at(f, p.coords()) && !pi.contains(f, p))
        .count() as u64;
    let bound = affine_bound(d, n, q);
    Ok(AffineCheck { count, bound, holds: count <= bound })
}

/// A hypersurface `X = L·Q_1 + L'·Q_2` with `Σ = V(L) ⊄ X` and
/// `Π = V(L, L') ⊂ X ∩ Σ`.
#[derive(Clone, Debug)]
pub struct AffineInstance {
    pub hypersurface: Hypersurface,
    pub sigma: Hyperplane,
    pub pi: LinearSubspace,
}

/// Random instance of degree `d ≥ 1` in `P^n`.
pub fn random_affine_instance<R: Rng + ?Sized>(f: &FieldCtx, n: usize, d: u8, rng: &mut R) -> AffineInstance {
    assert!(d >= 1 && n >= 2);
    let basis = monomial_basis(n, d - 1);
    let random_cov = |rng: &mut R| -> Coords { (0..=n).map(|_| Elem(rng.gen_range(0..f.order()) as u8)).collect() };
    loop {
        let l = random_cov(rng);
        let l2 = random_cov(rng);
        let (Some(sigma), Some(other)) = (Hyperplane::new(f, &l), Hyperplane::new(f, &l2)) else { continue };
        if sigma == other {
            continue;
        }
        let mut terms = Vec::new();
        for cov in [&l, &l2] {
            for e in &basis {
                let c = Elem(rng.gen_range(0..f.order()) as u8);
                for (i, &a) in cov.iter().enumerate() {
                    let mut e2 = *e;
                    e2[i] += 1;
                    terms.push((e2, f.mul(a, c)));
                }
            }
        }
        debug_assert!(terms.iter().all(|(e, _)| e[n + 1..MAX_COORDS].iter().all(|&x| x == 0)));
        let Ok(x) = Hypersurface::new(f, n, terms) else { continue };
        if x.divisible_by(f, &sigma) {
            continue;
        }
        let pi = intersect(f, &[sigma.clone(), other]);
        return AffineInstance { hypersurface: x, sigma, pi };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::MAX_COORDS;

    fn coord(n: usize, i: usize) -> Hyperplane {
        Hyperplane::coordinate(n, i)
    }

    #[test]
    fn maxima() {
        assert_eq!(max_formula(4, 2).unwrap(), 117);
        assert_eq!(max_formula(5, 2).unwrap(), 453);
        assert_eq!(max_formula(4, 3).unwrap(), 784);
        assert_eq!(max_formula(4, 7).unwrap(), 50912);
        assert!(max_formula(3, 2).is_err());
        assert_eq!(all_tangent_pencil_value(4, 7).unwrap(), 50471);
        assert_eq!(all_tangent_pencil_value(4, 2).unwrap(), 101);
        assert!(all_tangent_pencil_value(5, 2).is_err());
        for q in [2, 3, 4, 5, 7, 8, 9] {
            for n in [4, 6, 8] {
                assert!(all_tangent_pencil_value(n, q).unwrap() < max_formula(n, q).unwrap());
            }
        }
    }

    #[test]
    fn triple_hyperplane_cubic() {
        let f = FieldCtx::new(2).unwrap();
        let form = HermitianForm::standard(4);
        let mut e = [0u8; MAX_COORDS];
        e[0] = 3;
        let c = Hypersurface::new(&f, 4, [(e, Elem::ONE)]).unwrap();
        assert_eq!(intersect_count_enum(&f, &c, &form, u64::MAX).unwrap(), 45);
    }

    #[test]
    fn coordinate_triple_methods_agree() {
        let f = FieldCtx::new(2).unwrap();
        let form = HermitianForm::standard(4);
        let arr = Arrangement::new(&f, &form, vec![coord(4, 0), coord(4, 1), coord(4, 2)]).unwrap();
        assert!(!arr.is_pencil(&f));
        let rep = intersect_count_arrangement(&f, &arr, &form).unwrap();
        let b = rep.breakdown.clone().unwrap();
        assert_eq!(b.singles, vec![45, 45, 45]);
        assert_eq!(b.pairs, vec![9, 9, 9]);
        assert_eq!(b.triple_type, SectionType::new(-1, 1));
        assert_eq!(b.triple, 3);
        assert_eq!(rep.count, 135 - 27 + 3);
        let enumerated = intersect_count_enum(&f, &arr.to_hypersurface(&f), &form, u64::MAX).unwrap();
        assert_eq!(rep.count, enumerated);
    }

    #[test]
    fn duplicates_rejected() {
        let f = FieldCtx::new(2).unwrap();
        let form = HermitianForm::standard(4);
        assert_eq!(
            Arrangement::new(&f, &form, vec![coord(4, 0), coord(4, 0), coord(4, 2)]).unwrap_err(),
            Error::DuplicateHyperplanes
        );
    }

    #[test]
    fn extremal_odd_q2() {
        let f = FieldCtx::new(2).unwrap();
        let form = HermitianForm::standard(5);
        let arr = build_extremal(&f, &form, u64::MAX).unwrap();
        assert!(arr.tangency.iter().all(|&t| t == Tangency::Tangent));
        assert!(arr.pi_section.is_nondegenerate());
        let rep = intersect_count_arrangement(&f, &arr, &form).unwrap();
        assert_eq!(rep.count, 453);
        assert_eq!(rep.breakdown.unwrap().singles, vec![181; 3]);
    }

    #[test]
    fn extremal_even_q3() {
        let f = FieldCtx::new(3).unwrap();
        let form = HermitianForm::standard(4);
        let arr = build_extremal(&f, &form, u64::MAX).unwrap();
        let rep = intersect_count_arrangement(&f, &arr, &form).unwrap();
        assert_eq!(rep.count, 784);
        let enumerated = intersect_count_enum(&f, &arr.to_hypersurface(&f), &form, u64::MAX).unwrap();
        assert_eq!(enumerated, 784);
    }

    #[test]
    fn extremal_even_q2_has_too_few_non_tangent_members() {
        // every pencil over a non-degenerate Π_2 has q + 1 = 3 tangent and
        // q^2 - q = 2 non-tangent members
        let f = FieldCtx::new(2).unwrap();
        let form = HermitianForm::standard(4);
        assert_eq!(
            build_extremal(&f, &form, u64::MAX).unwrap_err(),
            Error::InsufficientPencilMembers { wanted: "non-tangent", best: 2 }
        );
    }

    #[test]
    fn affine_bound_values() {
        assert_eq!(affine_bound(3, 4, 7), 784);
        assert_eq!(affine_bound(2, 4, 3), 36);
    }

    #[test]
    fn affine_rejects_contained_sigma() {
        let f = FieldCtx::new(3).unwrap();
        let form = HermitianForm::standard(4);
        let sigma = coord(4, 0);
        let arr = Arrangement::new(&f, &form, vec![sigma.clone(), coord(4, 1), coord(4, 2)]).unwrap();
        let c = arr.to_hypersurface(&f);
        let pi = intersect(&f, &[sigma.clone(), coord(4, 1)]);
        assert!(matches!(
            check_affine_lachaud(&f, &c, &form, &sigma, &pi, u64::MAX),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn affine_quadric_instance() {
        // X = x0 x3 + x1 x4 contains Π = V(x0, x1) and not Σ = V(x0)
        let f = FieldCtx::new(3).unwrap();
        let form = HermitianForm::standard(4);
        let mut a = [0u8; MAX_COORDS];
        a[0] = 1;
        a[3] = 1;
        let mut b = [0u8; MAX_COORDS];
        b[1] = 1;
        b[4] = 1;
        let x = Hypersurface::new(&f, 4, [(a, Elem::ONE), (b, Elem::ONE)]).unwrap();
        let sigma = coord(4, 0);
        let pi = intersect(&f, &[sigma.clone(), coord(4, 1)]);
        let check = check_affine_lachaud(&f, &x, &form, &sigma, &pi, u64::MAX).unwrap();
        assert_eq!(check.bound, 36);
        assert!(check.holds, "{check:?}");
    }
}
