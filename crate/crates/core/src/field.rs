//! Table-driven arithmetic in `F_{q^2}` and its subfield `F_q`.
//!
//! `F_{q^2}` is built as `F_p[x]/(f)` where `f` is the first primitive monic
//! polynomial of degree `2e` (for `q = p^e`) in the order described on
//! [`FieldCtx::modulus`]. An element is stored as the integer `sum c_i p^i` of
//! its coefficient vector, so index 0 is zero, index 1 is one and index `p` is
//! the class of `x`, which generates the multiplicative group.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `q` accepted by [`FieldCtx::new`].
pub const DEFAULT_FIELD_CAP: u32 = 13;
/// Hard upper limit for `q`; indices must fit in a byte.
pub const MAX_FIELD_CAP: u32 = 16;

/// An element of `F_{q^2}`, interpreted against a [`FieldCtx`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u8);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Returns `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Immutable lookup tables for `F_{q^2}`.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    q: u32,
    p: u32,
    e: u32,
    order: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    frob: Vec<u8>,
    log: Vec<u16>,
    exp: Vec<u8>,
    subfield: Vec<bool>,
}

impl FieldCtx {
    /// Builds `F_{q^2}` with the default cap on `q`.
    pub fn new(q: u32) -> Result<Self> {
        Self::with_cap(q, DEFAULT_FIELD_CAP)
    }

    /// Builds `F_{q^2}`, rejecting `q > cap`. The cap itself may not exceed
    /// [`MAX_FIELD_CAP`].
    pub fn with_cap(q: u32, cap: u32) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let cap = cap.min(MAX_FIELD_CAP);
        if q > cap {
            return Err(Error::ExceedsCap { q, cap });
        }
        let degree = 2 * e as usize;
        let order = (q * q) as usize;
        let (modulus, exp) = find_primitive_modulus(p, degree, order);

        let mut log = vec![0u16; order];
        for (k, &a) in exp.iter().enumerate() {
            log[a as usize] = k as u16;
        }

        let digits: Vec<Vec<u32>> = (0..order).map(|i| to_digits(i as u32, p, degree)).collect();
        let mut add = vec![0u8; order * order];
        let mut neg = vec![0u8; order];
        for a in 0..order {
            for b in 0..order {
                let sum: Vec<u32> = digits[a].iter().zip(&digits[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * order + b] = from_digits(&sum, p) as u8;
            }
            let minus: Vec<u32> = digits[a].iter().map(|x| (p - x) % p).collect();
            neg[a] = from_digits(&minus, p) as u8;
        }

        let group = order - 1;
        let mut mul = vec![0u8; order * order];
        let mut inv = vec![0u8; order];
        let mut frob = vec![0u8; order];
        for a in 1..order {
            let la = log[a] as usize;
            for b in 1..order {
                mul[a * order + b] = exp[(la + log[b] as usize) % group];
            }
            inv[a] = exp[(group - la) % group];
            frob[a] = exp[(la * q as usize) % group];
        }
        let subfield = (0..order).map(|a| frob[a] as usize == a).collect();

        Ok(FieldCtx { q, p, e, order, modulus, add, mul, neg, inv, frob, log, exp, subfield })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Extension degree of `F_q` over its prime field.
    #[inline]
    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Number of elements of `F_{q^2}`.
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Low coefficients `c_0..c_{2e-1}` of the defining polynomial
    /// `x^{2e} + sum c_i x^i`. Candidates are tried in increasing order of
    /// `sum c_i p^i` and the first primitive one is kept.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn elem(&self, index: usize) -> Elem {
        debug_assert!(index < self.order);
        Elem(index as u8)
    }

    /// The class of `x`, a generator of the multiplicative group.
    pub fn generator(&self) -> Elem {
        Elem(self.exp[1])
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(|i| Elem(i as u8))
    }

    /// The `q` elements fixed by Frobenius, in index order.
    pub fn subfield_elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.elements().filter(|a| self.subfield[a.index()])
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.index() * self.order + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.index() * self.order + b.index()])
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(!a.is_zero(), "inverse of zero");
        Elem(self.inv[a.index()])
    }

    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        if k == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let group = (self.order - 1) as u64;
        Elem(self.exp[((self.log[a.index()] as u64 * (k % group)) % group) as usize])
    }

    /// `a ↦ a^q`.
    #[inline]
    pub fn frob(&self, a: Elem) -> Elem {
        Elem(self.frob[a.index()])
    }

    /// `a^{q+1} = a · a^q`, always in `F_q`.
    #[inline]
    pub fn norm(&self, a: Elem) -> Elem {
        self.mul(a, self.frob(a))
    }

    /// `a + a^q`, always in `F_q`.
    #[inline]
    pub fn trace(&self, a: Elem) -> Elem {
        self.add(a, self.frob(a))
    }

    #[inline]
    pub fn in_subfield(&self, a: Elem) -> bool {
        self.subfield[a.index()]
    }

    /// Smallest-index `λ` with `λ^{q+1} = d`, for `d` a nonzero subfield
    /// element. The norm map is onto `F_q^*`, so a solution always exists.
    pub fn solve_norm(&self, d: Elem) -> Elem {
        assert!(!d.is_zero() && self.in_subfield(d), "solve_norm needs a nonzero element of F_q");
        self.elements()
            .find(|&l| self.norm(l) == d)
            .expect("norm map F_{q^2}^* -> F_q^* is surjective")
    }

    /// Raw multiplication table, row-major by element index.
    pub fn mul_table(&self) -> &[u8] {
        &self.mul
    }

    /// Raw addition table, row-major by element index.
    pub fn add_table(&self) -> &[u8] {
        &self.add
    }

    /// Discrete log base [`generator`](Self::generator); `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.index()] as u32)
    }
}

fn to_digits(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Scans monic degree-`degree` polynomials over `F_p` and returns the first
/// one for which `x` has multiplicative order `order - 1`, together with the
/// table `k ↦ index(x^k)`.
fn find_primitive_modulus(p: u32, degree: usize, order: usize) -> (Vec<u32>, Vec<u8>) {
    'candidates: for code in 0..order as u32 {
        let low = to_digits(code, p, degree);
        if low[0] == 0 {
            continue;
        }
        let mut cur = vec![0u32; degree];
        cur[0] = 1;
        let mut exp = Vec::with_capacity(order - 1);
        for k in 0..order - 1 {
            let idx = from_digits(&cur, p);
            if k > 0 && idx == 1 {
                continue 'candidates;
            }
            exp.push(idx as u8);
            // cur *= x, then reduce x^degree = -sum low_i x^i
            let top = cur[degree - 1];
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            for i in 0..degree {
                cur[i] = (cur[i] + (p - low[i]) * top) % p;
            }
        }
        if from_digits(&cur, p) == 1 {
            return (low, exp);
        }
    }
    unreachable!("a primitive polynomial of every degree exists over F_{p}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn f4_is_built_from_x2_x_1() {
        let f = FieldCtx::new(2).unwrap();
        assert_eq!(f.modulus(), &[1, 1]);
        let w = f.generator();
        assert_eq!(w, Elem(2));
        // ω² = ω + 1
        assert_eq!(f.mul(w, w), f.add(w, Elem::ONE));
        assert_eq!(f.frob(w), Elem(3));
        assert_eq!(f.norm(w), Elem::ONE);
        assert_eq!(f.norm(Elem::ONE), Elem::ONE);
        assert_eq!(f.trace(Elem::ONE), Elem::ZERO);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldCtx::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert!(FieldCtx::new(4).is_ok());
        assert_eq!(FieldCtx::new(16).unwrap_err(), Error::ExceedsCap { q: 16, cap: 13 });
        assert!(FieldCtx::with_cap(16, 16).is_ok());
    }

    #[test]
    fn frobenius_fixes_zero_and_one() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13] {
            let f = FieldCtx::new(q).unwrap();
            assert_eq!(f.frob(Elem::ZERO), Elem::ZERO);
            assert_eq!(f.frob(Elem::ONE), Elem::ONE);
        }
    }

    #[test]
    fn norm_of_generator_f9() {
        let f = FieldCtx::new(3).unwrap();
        let g = f.generator();
        let n = f.norm(g);
        assert_eq!(n, f.pow(g, 4));
        assert!(f.in_subfield(n));
        assert!(!n.is_zero());
    }

    #[test]
    fn solve_norm_examples() {
        let f2 = FieldCtx::new(2).unwrap();
        assert_eq!(f2.solve_norm(Elem::ONE), Elem::ONE);

        let f3 = FieldCtx::new(3).unwrap();
        // 2 ∈ F_3 is -1
        let two = f3.neg(Elem::ONE);
        let l = f3.solve_norm(two);
        assert_eq!(f3.pow(l, 4), two);
        assert!(f3.elements().filter(|&x| f3.pow(x, 4) == two).all(|x| x >= l));

        let f7 = FieldCtx::new(7).unwrap();
        let three = f7.add(f7.add(Elem::ONE, Elem::ONE), Elem::ONE);
        let l = f7.solve_norm(three);
        assert_eq!(f7.pow(l, 8), three);
    }

    #[test]
    fn field_axioms_small_q() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = FieldCtx::new(q).unwrap();
            let n = f.order();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a)), Elem::ONE);
                }
            }
            // sampled associativity/distributivity
            for i in (0..n).step_by(3) {
                for j in (0..n).step_by(5) {
                    for k in (0..n).step_by(7) {
                        let (a, b, c) = (f.elem(i), f.elem(j), f.elem(k));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_an_involutive_automorphism() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13] {
            let f = FieldCtx::new(q).unwrap();
            let mut fixed = 0;
            for a in f.elements() {
                assert_eq!(f.frob(f.frob(a)), a);
                assert_eq!(f.frob(a), f.pow(a, q as u64));
                if f.in_subfield(a) {
                    fixed += 1;
                }
                assert!(f.in_subfield(f.norm(a)));
                assert!(f.in_subfield(f.trace(a)));
                for b in f.elements().step_by(3) {
                    assert_eq!(f.frob(f.add(a, b)), f.add(f.frob(a), f.frob(b)));
                    assert_eq!(f.frob(f.mul(a, b)), f.mul(f.frob(a), f.frob(b)));
                }
            }
            assert_eq!(fixed, q);
        }
    }

    #[test]
    fn norm_hits_each_nonzero_subfield_element_q_plus_1_times() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13] {
            let f = FieldCtx::new(q).unwrap();
            let mut hits = vec![0usize; f.order()];
            for a in f.elements().skip(1) {
                hits[f.norm(a).index()] += 1;
            }
            for d in f.subfield_elements() {
                let expected = if d.is_zero() { 0 } else { q as usize + 1 };
                assert_eq!(hits[d.index()], expected, "q={q} d={d:?}");
            }
            assert_eq!(hits.iter().sum::<usize>(), f.order() - 1);
        }
    }
}
