//! Homogeneous polynomials over `F_{q^2}` and the hypersurfaces they cut out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::linalg::{Mat, MAX_COORDS};
use crate::projgeom::{Hyperplane, PointSpace};

/// Exponent vector; entries past `n` are zero.
pub type Exponents = [u8; MAX_COORDS];

type Terms = BTreeMap<Exponents, Elem>;

/// A hypersurface `V(F)` of degree `d` in `P^n`, stored as the polynomial `F`
/// scaled so that its largest monomial in lexicographic order
/// (`x_0^d > x_0^{d-1} x_1 > ...`) has coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypersurface {
    n: usize,
    degree: u8,
    monomials: Terms,
}

/// Cubic hypersurfaces are the degree-3 case.
pub type CubicHypersurface = Hypersurface;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermRecord {
    pub exponents: Vec<u8>,
    pub coeff: u8,
}

impl Hypersurface {
    pub fn new<I>(f: &FieldCtx, n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Elem)>,
    {
        if n >= MAX_COORDS {
            return Err(Error::DimensionTooLarge(n));
        }
        let mut monomials = Terms::new();
        let mut degree = None;
        for (e, c) in terms {
            if e[n + 1..].iter().any(|&x| x != 0) {
                return Err(Error::OutOfRange(format!("exponent {e:?} uses a variable beyond x_{n}")));
            }
            let d: u8 = e.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => return Err(Error::PreconditionViolated("polynomial is not homogeneous".into())),
                _ => {}
            }
            let slot = monomials.entry(e).or_insert(Elem::ZERO);
            *slot = f.add(*slot, c);
        }
        monomials.retain(|_, c| !c.is_zero());
        let Some(degree) = degree else {
            return Err(Error::PreconditionViolated("zero polynomial".into()));
        };
        if monomials.is_empty() {
            return Err(Error::PreconditionViolated("zero polynomial".into()));
        }
        Ok(Self::scaled(f, n, degree, monomials))
    }

    fn scaled(f: &FieldCtx, n: usize, degree: u8, mut monomials: Terms) -> Self {
        let lead = *monomials.values().next_back().expect("nonempty");
        let s = f.inv(lead);
        for c in monomials.values_mut() {
            *c = f.mul(*c, s);
        }
        Hypersurface { n, degree, monomials }
    }

    /// Product of linear forms given by covectors.
    pub fn product_of_linear(f: &FieldCtx, covectors: &[&[Elem]]) -> Result<Self> {
        let Some(first) = covectors.first() else {
            return Err(Error::PreconditionViolated("empty product".into()));
        };
        let n = first.len() - 1;
        let mut acc = Terms::from([([0u8; MAX_COORDS], Elem::ONE)]);
        for cov in covectors {
            if cov.len() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, actual: cov.len() });
            }
            acc = mul_terms(f, &acc, &linear_terms(cov));
        }
        Self::new(f, n, acc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn monomials(&self) -> &BTreeMap<Exponents, Elem> {
        &self.monomials
    }

    pub fn terms(&self) -> Vec<TermRecord> {
        self.monomials
            .iter()
            .rev()
            .map(|(e, c)| TermRecord { exponents: e[..=self.n].to_vec(), coeff: c.0 })
            .collect()
    }

    pub fn evaluate(&self, f: &FieldCtx, x: &[Elem]) -> Elem {
        debug_assert_eq!(x.len(), self.n + 1);
        let d = self.degree as usize;
        let mut pw = [[Elem::ONE; MAX_COORDS + 1]; MAX_COORDS];
        for (i, &xi) in x.iter().enumerate() {
            for e in 1..=d {
                pw[i][e] = f.mul(pw[i][e - 1], xi);
            }
        }
        let mut acc = Elem::ZERO;
        for (e, &c) in &self.monomials {
            let mut t = c;
            for i in 0..=self.n {
                if e[i] != 0 {
                    t = f.mul(t, pw[i][e[i] as usize]);
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    pub fn vanishes_at(&self, f: &FieldCtx, x: &[Elem]) -> bool {
        self.evaluate(f, x).is_zero()
    }

    /// Whether the linear form `a·x` divides the polynomial, by substituting
    /// `x_k = -sum_{j>k} a_j x_j` (with `k` the leading index of the
    /// canonical covector) and testing for zero.
    pub fn divisible_by(&self, f: &FieldCtx, hyperplane: &Hyperplane) -> bool {
        let a = hyperplane.covector();
        assert_eq!(a.len(), self.n + 1, "dimension mismatch");
        let k = a.iter().position(|e| !e.is_zero()).expect("nonzero covector");
        let mut lin = Terms::new();
        for j in k + 1..=self.n {
            if !a[j].is_zero() {
                let mut e = [0u8; MAX_COORDS];
                e[j] = 1;
                lin.insert(e, f.neg(a[j]));
            }
        }
        let mut lin_pows = vec![Terms::from([([0u8; MAX_COORDS], Elem::ONE)])];
        for p in 1..=self.degree as usize {
            let next = mul_terms(f, &lin_pows[p - 1], &lin);
            lin_pows.push(next);
        }
        let mut out = Terms::new();
        for (e, &c) in &self.monomials {
            let mut rest = *e;
            let ek = rest[k] as usize;
            rest[k] = 0;
            for (le, &lc) in &lin_pows[ek] {
                let mut m = rest;
                for i in 0..MAX_COORDS {
                    m[i] += le[i];
                }
                let slot = out.entry(m).or_insert(Elem::ZERO);
                *slot = f.add(*slot, f.mul(c, lc));
            }
        }
        out.values().all(|c| c.is_zero())
    }

    /// All rational hyperplanes contained in the hypersurface.
    ///
    /// Take a point `P_0` off the hypersurface with leading index `k`. A
    /// hyperplane factor misses `P_0`, so it meets each line `P_0 e_j`
    /// (`j ≠ k`) in exactly one point, which must be a zero of `F` there; the
    /// `n` meeting points span the hyperplane. Each line carries at most `d`
    /// zeros, so at most `d^n` candidates are tested for divisibility.
    pub fn linear_factors(&self, f: &FieldCtx) -> Vec<Hyperplane> {
        let space = PointSpace::for_field(self.n, f).expect("dimension checked on construction");
        let Some(p0) = space.iter().find(|x| !self.vanishes_at(f, x)) else {
            return self.linear_factors_exhaustive(f);
        };
        let k = p0.iter().position(|e| !e.is_zero()).expect("canonical point");
        let mut lines: Vec<Vec<Vec<Elem>>> = Vec::with_capacity(self.n);
        for j in (0..=self.n).filter(|&j| j != k) {
            let mut zeros = Vec::new();
            let mut x: Vec<Elem> = p0.to_vec();
            for t in f.elements().skip(1) {
                x[j] = f.add(p0[j], t);
                if self.vanishes_at(f, &x) {
                    zeros.push(x.clone());
                }
            }
            let mut ej = vec![Elem::ZERO; self.n + 1];
            ej[j] = Elem::ONE;
            if self.vanishes_at(f, &ej) {
                zeros.push(ej);
            }
            if zeros.is_empty() {
                return Vec::new();
            }
            lines.push(zeros);
        }
        let mut found = BTreeSet::new();
        let mut choice = vec![0usize; lines.len()];
        loop {
            let rows: Vec<&[Elem]> = choice.iter().zip(&lines).map(|(&c, l)| l[c].as_slice()).collect();
            let kernel = Mat::from_rows(self.n + 1, &rows).kernel(f);
            if kernel.rows() == 1 {
                let h = Hyperplane::new(f, kernel.row(0)).expect("nonzero kernel vector");
                if !h.contains_coords(f, &p0) && self.divisible_by(f, &h) {
                    found.insert(h);
                }
            }
            // odometer over the candidate choices
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return found.into_iter().collect();
                }
                choice[i] += 1;
                if choice[i] < lines[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// Divisibility test against every rational hyperplane.
    pub fn linear_factors_exhaustive(&self, f: &FieldCtx) -> Vec<Hyperplane> {
        let space = PointSpace::for_field(self.n, f).expect("dimension checked on construction");
        space.hyperplanes().filter(|h| self.divisible_by(f, h)).collect()
    }

    pub fn has_linear_factor(&self, f: &FieldCtx) -> bool {
        !self.linear_factors(f).is_empty()
    }
}

impl fmt::Display for Hypersurface {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (e, c)) in self.monomials.iter().rev().enumerate() {
            if idx > 0 {
                write!(fm, " + ")?;
            }
            write!(fm, "[{}]", c.0)?;
            for (i, &p) in e[..=self.n].iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(fm, "*x{i}")?,
                    _ => write!(fm, "*x{i}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Hypersurface {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "Hypersurface(n={}, {})", self.n, self)
    }
}

fn linear_terms(cov: &[Elem]) -> Terms {
    let mut t = Terms::new();
    for (i, &c) in cov.iter().enumerate() {
        if !c.is_zero() {
            let mut e = [0u8; MAX_COORDS];
            e[i] = 1;
            t.insert(e, c);
        }
    }
    t
}

fn mul_terms(f: &FieldCtx, a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ea, &ca) in a {
        for (eb, &cb) in b {
            let mut e = *ea;
            for i in 0..MAX_COORDS {
                e[i] += eb[i];
            }
            let slot = out.entry(e).or_insert(Elem::ZERO);
            *slot = f.add(*slot, f.mul(ca, cb));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// All degree-`d` exponent vectors in `n + 1` variables, largest first.
pub fn monomial_basis(n: usize, d: u8) -> Vec<Exponents> {
    fn rec(i: usize, n: usize, left: u8, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i == n {
            cur[i] = left;
            out.push(*cur);
            cur[i] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, n, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, n, d, &mut [0; MAX_COORDS], &mut out);
    out
}

/// Values of every basis monomial at a point, in basis order.
pub fn monomial_values(f: &FieldCtx, basis: &[Exponents], x: &[Elem], out: &mut Vec<Elem>) {
    out.clear();
    for e in basis {
        let mut t = Elem::ONE;
        for (i, &xi) in x.iter().enumerate() {
            for _ in 0..e[i] {
                t = f.mul(t, xi);
            }
        }
        out.push(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps(v: &[u8]) -> Exponents {
        let mut e = [0; MAX_COORDS];
        e[..v.len()].copy_from_slice(v);
        e
    }

    #[test]
    fn canonical_scaling() {
        let f = FieldCtx::new(2).unwrap();
        let c = Hypersurface::new(&f, 2, [(exps(&[1, 1, 1]), Elem(2)), (exps(&[0, 3, 0]), Elem(3))]).unwrap();
        // leading monomial x0 x1 x2 scaled to 1; 3/2 = ω^2/ω = ω
        assert_eq!(c.monomials()[&exps(&[1, 1, 1])], Elem::ONE);
        assert_eq!(c.monomials()[&exps(&[0, 3, 0])], Elem(2));
        assert!(Hypersurface::new(&f, 2, [(exps(&[3, 0, 0]), Elem(1)), (exps(&[3, 0, 0]), Elem(1))]).is_err());
        assert!(Hypersurface::new(&f, 2, [(exps(&[3, 0, 0]), Elem(1)), (exps(&[1, 0, 0]), Elem(1))]).is_err());
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(monomial_basis(4, 3).len(), 35);
        assert_eq!(monomial_basis(2, 2).len(), 6);
        assert_eq!(monomial_basis(4, 3)[0], exps(&[3, 0, 0, 0, 0]));
    }

    #[test]
    fn product_vanishes_on_factors() {
        let f = FieldCtx::new(3).unwrap();
        let l1 = [Elem(1), Elem(4), Elem(0), Elem(2)];
        let l2 = [Elem(0), Elem(1), Elem(7), Elem(7)];
        let c = Hypersurface::product_of_linear(&f, &[&l1, &l2]).unwrap();
        assert_eq!(c.degree(), 2);
        let h1 = Hyperplane::new(&f, &l1).unwrap();
        let h2 = Hyperplane::new(&f, &l2).unwrap();
        assert!(c.divisible_by(&f, &h1) && c.divisible_by(&f, &h2));
        let factors = c.linear_factors(&f);
        let mut expected = vec![h1.clone(), h2.clone()];
        expected.sort();
        assert_eq!(factors, expected);
        let space = PointSpace::for_field(3, &f).unwrap();
        for x in space.iter() {
            assert_eq!(c.vanishes_at(&f, &x), h1.contains_coords(&f, &x) || h2.contains_coords(&f, &x));
        }
    }

    #[test]
    fn fermat_cubic_factors_agree_with_exhaustive() {
        let f = FieldCtx::new(2).unwrap();
        let c = Hypersurface::new(&f, 3, (0..4).map(|i| {
            let mut e = [0; MAX_COORDS];
            e[i] = 3;
            (e, Elem::ONE)
        }))
        .unwrap();
        assert_eq!(c.linear_factors(&f), c.linear_factors_exhaustive(&f));
    }
}
