//! The threshold sequences `A_n`, `B_n` and the exact point counts they are
//! compared against. All arithmetic is in arbitrary precision.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

fn pow(q: u64, k: i64) -> BigInt {
    assert!(k >= 0, "negative exponent");
    BigInt::from(q).pow(k as u32)
}

fn require_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::OutOfRange(format!("n = {n} must be at least {min}")));
    }
    Ok(())
}

/// `delta = 0` for even `n`, `1` for odd `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parity {
    pub delta: u8,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        Parity { delta: (n % 2) as u8 }
    }

    pub fn is_even(self) -> bool {
        self.delta == 0
    }
}

/// `A_4 = q^5 + q^4 + 4q^3 - 3q + 1`.
fn a4(q: u64) -> BigInt {
    pow(q, 5) + pow(q, 4) + 4 * pow(q, 3) - 3 * BigInt::from(q) + 1
}

/// `B_4 = 3(q^5 + 1)`.
fn b4(q: u64) -> BigInt {
    3 * (pow(q, 5) + 1)
}

/// `A_n` by its defining recursion.
pub fn a_rec(n: usize, q: u64) -> Result<BigInt> {
    require_n(n, 4)?;
    let mut a = a4(q);
    for k in 5..=n as i64 {
        a = if k % 2 == 0 {
            pow(q, 2) * a - pow(q, k - 2)
        } else {
            pow(q, 2) * a + pow(q, k - 2) + 2 * pow(q, k - 3)
        };
    }
    Ok(a)
}

/// `A_n = q^{2n-8} A_4 + sum_{i=n-2}^{2n-7} q^i + 2 delta q^{n-3}`.
pub fn a_closed(n: usize, q: u64) -> Result<BigInt> {
    require_n(n, 4)?;
    let n = n as i64;
    let sum: BigInt = (n - 2..=2 * n - 7).map(|i| pow(q, i)).sum();
    let delta = Parity::of(n as usize).delta as u32;
    Ok(pow(q, 2 * n - 8) * a4(q) + sum + 2 * delta * pow(q, n - 3))
}

/// `B_n` by its defining recursion.
pub fn b_rec(n: usize, q: u64) -> Result<BigInt> {
    require_n(n, 4)?;
    let mut b = b4(q);
    for k in 5..=n as i64 {
        b = if k % 2 == 0 {
            pow(q, 2) * b - pow(q, k - 2)
        } else {
            pow(q, 2) * b + 3 * pow(q, k - 2) + pow(q, k - 3)
        };
    }
    Ok(b)
}

/// Closed form of `B_n`, split by parity.
pub fn b_closed(n: usize, q: u64) -> Result<BigInt> {
    require_n(n, 4)?;
    let lead = 3 * pow(q, 2 * n as i64 - 8) * (pow(q, 5) + 1);
    let n = n as i64;
    Ok(if n % 2 == 0 {
        let tail: BigInt = (1..=(n - 4) / 2).map(|i| pow(q, 2 * i + n - 3)).sum();
        lead + 3 * tail
    } else {
        let tail: BigInt = (1..=(n - 3) / 2).map(|i| pow(q, 2 * i + n - 4)).sum();
        lead + 3 * tail + pow(q, n - 3)
    })
}

/// `|U_n(F_{q^2})|` for the non-degenerate variety; zero for `n < 0`.
pub fn hermitian_count(n: i64, q: u64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    let sign = |k: i64| if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    (pow(q, n) - sign(n)) * (pow(q, n + 1) - sign(n + 1)) / (pow(q, 2) - 1)
}

/// Sizes of the three possible codimension-2 sections of `U_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeCounts {
    /// `|U_{n-2}|`
    pub nondegenerate: BigInt,
    /// `|Π_0 U_{n-3}|`
    pub point_cone: BigInt,
    /// `|Π_1 U_{n-4}|`
    pub line_cone: BigInt,
}

/// Codimension-2 section sizes from the parity-split closed forms
/// (independent of [`hermitian_count`]).
pub fn cone_counts(n: usize, q: u64) -> Result<ConeCounts> {
    require_n(n, 4)?;
    let n = n as i64;
    let d = pow(q, 2) - 1;
    let top = pow(q, 2 * n - 3);
    let one = BigInt::one();
    let (u, p0, p1) = if n % 2 == 0 {
        (
            &top - pow(q, n - 1) + pow(q, n - 2) - &one,
            &top + pow(q, n) - pow(q, n - 1) - &one,
            &top - pow(q, n + 1) + pow(q, n) - &one,
        )
    } else {
        (
            &top + pow(q, n - 1) - pow(q, n - 2) - &one,
            &top - pow(q, n) + pow(q, n - 1) - &one,
            &top + pow(q, n + 1) - pow(q, n) - &one,
        )
    };
    Ok(ConeCounts { nondegenerate: u / &d, point_cone: p0 / &d, line_cone: p1 / d })
}

/// Largest possible hyperplane section: `|U_{n-1}|` for even `n`,
/// `q^2 |U_{n-2}| + 1` for odd `n`.
pub fn hyperplane_section_bound(n: usize, q: u64) -> BigInt {
    let n = n as i64;
    if n % 2 == 0 {
        hermitian_count(n - 1, q)
    } else {
        pow(q, 2) * hermitian_count(n - 2, q) + 1
    }
}

/// Outcome of an inequality check. `asserted` is false when the parameters
/// fall outside the range where the inequality is claimed to hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IneqCheck {
    #[serde(serialize_with = "ser_big")]
    pub lhs: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub rhs: BigInt,
    pub holds: bool,
    pub asserted: bool,
}

fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `B_{n-1} > q^{2n-5} + q^{2n-6}` for even `n`, `B_{n-1} < 3q^{2n-5} + q^{2n-6}`
/// for odd `n`. For odd `n` the check is recorded as `lhs < rhs`, for even `n`
/// as `lhs > rhs`, with `lhs = B_{n-1}`.
pub fn check_corollary_inq(n: usize, q: u64) -> Result<IneqCheck> {
    require_n(n, 5)?;
    let b = b_rec(n - 1, q)?;
    let k = 2 * n as i64;
    let (rhs, holds) = if n % 2 == 0 {
        let rhs = pow(q, k - 5) + pow(q, k - 6);
        let holds = b > rhs;
        (rhs, holds)
    } else {
        let rhs = 3 * pow(q, k - 5) + pow(q, k - 6);
        let holds = b < rhs;
        (rhs, holds)
    };
    Ok(IneqCheck { lhs: b, rhs, holds, asserted: true })
}

/// `hyperplane_section_bound + A_n < B_n`; only claimed for `q ≥ 3`.
pub fn check_lemma_ineq1(n: usize, q: u64) -> Result<IneqCheck> {
    require_n(n, 4)?;
    let lhs = hyperplane_section_bound(n, q) + a_rec(n, q)?;
    let rhs = b_rec(n, q)?;
    let holds = lhs < rhs;
    Ok(IneqCheck { lhs, rhs, holds, asserted: q >= 3 })
}

/// One row of a [`BoundTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub n: usize,
    pub a_rec: BigInt,
    pub a_closed: BigInt,
    pub b_rec: BigInt,
    pub b_closed: BigInt,
    pub hermitian_count: BigInt,
    pub cones: ConeCounts,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundTable {
    pub q: u64,
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    /// Rows for `n` in `4..=max_n`.
    pub fn build(q: u64, max_n: usize) -> Result<Self> {
        let rows = (4..=max_n)
            .map(|n| {
                Ok(BoundRow {
                    n,
                    a_rec: a_rec(n, q)?,
                    a_closed: a_closed(n, q)?,
                    b_rec: b_rec(n, q)?,
                    b_closed: b_closed(n, q)?,
                    hermitian_count: hermitian_count(n as i64, q),
                    cones: cone_counts(n, q)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(BoundTable { q, rows })
    }

    /// Every row has matching recursive and closed forms and positive entries.
    pub fn is_consistent(&self) -> bool {
        self.rows.iter().all(|r| {
            r.a_rec == r.a_closed
                && r.b_rec == r.b_closed
                && [&r.a_rec, &r.b_rec, &r.hermitian_count, &r.cones.nondegenerate, &r.cones.point_cone, &r.cones.line_cone]
                    .iter()
                    .all(|v| **v > BigInt::zero())
        })
    }

    /// CSV with columns `q,n,A,B,U_n,U_n-2,cone0,cone1`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["q", "n", "A", "B", "U_n", "U_n-2", "cone0", "cone1"])?;
        for r in &self.rows {
            w.write_record([
                self.q.to_string(),
                r.n.to_string(),
                r.a_rec.to_string(),
                r.b_rec.to_string(),
                r.hermitian_count.to_string(),
                r.cones.nondegenerate.to_string(),
                r.cones.point_cone.to_string(),
                r.cones.line_cone.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn a_examples() {
        assert_eq!(a_rec(4, 2).unwrap(), big(75));
        assert_eq!(a_rec(5, 2).unwrap(), big(316));
        assert_eq!(a_rec(6, 2).unwrap(), big(1248));
        assert_eq!(a_rec(4, 3).unwrap(), big(424));
        assert!(a_rec(3, 2).is_err());
    }

    #[test]
    fn b_examples() {
        assert_eq!(b_rec(4, 2).unwrap(), big(99));
        assert_eq!(b_rec(5, 2).unwrap(), big(424));
        assert_eq!(b_rec(4, 7).unwrap(), big(50424));
        assert_eq!(b_rec(4, 3).unwrap(), big(732));
        assert!(b_closed(3, 2).is_err());
    }

    #[test]
    fn counts_and_cones() {
        assert_eq!(hermitian_count(4, 2), big(165));
        assert_eq!(hermitian_count(-1, 2), big(0));
        let c4 = cone_counts(4, 2).unwrap();
        assert_eq!((c4.nondegenerate, c4.point_cone, c4.line_cone), (big(9), big(13), big(5)));
        let c5 = cone_counts(5, 2).unwrap();
        assert_eq!((c5.nondegenerate, c5.point_cone, c5.line_cone), (big(45), big(37), big(53)));
    }

    #[test]
    fn cone_orderings_flip_with_parity() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13] {
            for n in 4..=16 {
                let c = cone_counts(n, q).unwrap();
                if n % 2 == 0 {
                    assert!(c.line_cone < c.nondegenerate && c.nondegenerate < c.point_cone);
                } else {
                    assert!(c.point_cone < c.nondegenerate && c.nondegenerate < c.line_cone);
                }
                // direct cone sizes 1 + q^2|U_{n-3}| and q^2 + 1 + q^4|U_{n-4}|
                let n = n as i64;
                assert_eq!(c.nondegenerate, hermitian_count(n - 2, q));
                assert_eq!(c.point_cone, 1 + pow(q, 2) * hermitian_count(n - 3, q));
                assert_eq!(c.line_cone, pow(q, 2) + 1 + pow(q, 4) * hermitian_count(n - 4, q));
            }
        }
    }

    #[test]
    fn b_bound_examples() {
        let c = check_corollary_inq(6, 2).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone(), c.holds), (big(424), big(192), true));
        let c = check_corollary_inq(5, 2).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone(), c.holds), (big(99), big(112), true));
        let c = check_corollary_inq(5, 7).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone(), c.holds), (big(50424), big(52822), true));
        assert!(check_corollary_inq(4, 2).is_err());
    }

    #[test]
    fn lemma_examples() {
        let c = check_lemma_ineq1(4, 3).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (big(280 + 424), big(732)));
        assert!(c.holds && c.asserted);
        let c = check_lemma_ineq1(5, 3).unwrap();
        assert_eq!(c.lhs, big(2521 + 3861));
        assert_eq!(c.rhs, big(6678));
        assert!(c.holds);
        let c = check_lemma_ineq1(4, 2).unwrap();
        assert!(!c.asserted);
    }

    #[test]
    fn parity() {
        assert!(Parity::of(4).is_even());
        assert_eq!(Parity::of(7).delta, 1);
    }

    #[test]
    fn table_csv() {
        let t = BoundTable::build(2, 6).unwrap();
        assert!(t.is_consistent());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("q,n,A,B,U_n,U_n-2,cone0,cone1"));
        assert_eq!(lines.next(), Some("2,4,75,99,165,9,13,5"));
        assert_eq!(text.lines().count(), 4);
    }
}
