//! Points, hyperplanes and linear subspaces of `P^n(F_{q^2})`.
//!
//! Every projective object has a canonical representative: points and
//! covectors have their first nonzero coordinate equal to 1, subspaces are
//! stored by the reduced row-echelon form of a basis. Points are ranked
//! densely in the order produced by [`PointSpace::iter`]: first by the
//! position of the leading 1, then by the remaining coordinates read as a
//! base-`q^2` number with the last coordinate least significant.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::linalg::{dot, Coords, Mat, MAX_COORDS};

/// Scales `v` so its first nonzero entry is 1. `None` for the zero vector.
pub fn normalize(f: &FieldCtx, v: &[Elem]) -> Option<Coords> {
    let lead = v.iter().copied().find(|e| !e.is_zero())?;
    let s = f.inv(lead);
    Some(v.iter().map(|&x| f.mul(x, s)).collect())
}

/// Number of points of `P^m(F_{q^2})`; zero for `m = -1`.
pub fn projective_count(m: isize, q: u64) -> u128 {
    if m < 0 {
        return 0;
    }
    let qq = (q * q) as u128;
    (0..=m as u32).map(|i| qq.pow(i)).sum()
}

/// A point of `P^n(F_{q^2})` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    coords: Coords,
}

impl ProjPoint {
    pub fn new(f: &FieldCtx, coords: &[Elem]) -> Option<Self> {
        normalize(f, coords).map(|coords| ProjPoint { coords })
    }

    /// Wraps coordinates already known to be canonical.
    pub(crate) fn from_canonical(coords: Coords) -> Self {
        debug_assert_eq!(coords.iter().find(|e| !e.is_zero()), Some(&Elem::ONE));
        ProjPoint { coords }
    }

    /// The coordinate point `e_i` of `P^n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut coords: Coords = (0..=n).map(|_| Elem::ZERO).collect();
        coords[i] = Elem::ONE;
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

/// The hyperplane `V(sum a_i x_i)`, stored by its canonical covector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hyperplane {
    covector: Coords,
}

impl Hyperplane {
    pub fn new(f: &FieldCtx, covector: &[Elem]) -> Option<Self> {
        normalize(f, covector).map(|covector| Hyperplane { covector })
    }

    pub(crate) fn from_canonical(covector: Coords) -> Self {
        Hyperplane { covector }
    }

    /// `V(x_i)`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        Hyperplane { covector: ProjPoint::unit(n, i).coords }
    }

    pub fn covector(&self) -> &[Elem] {
        &self.covector
    }

    pub fn dim(&self) -> usize {
        self.covector.len() - 1
    }

    #[inline]
    pub fn contains_coords(&self, f: &FieldCtx, x: &[Elem]) -> bool {
        dot(f, &self.covector, x).is_zero()
    }

    pub fn contains(&self, f: &FieldCtx, p: &ProjPoint) -> bool {
        self.contains_coords(f, p.coords())
    }

    /// This hyperplane as an `(n-1)`-dimensional subspace.
    pub fn as_subspace(&self, f: &FieldCtx) -> LinearSubspace {
        intersect(f, std::slice::from_ref(self))
    }
}

/// Dense ranking of `P^n(F_{q^2})` (also used for the dual space of
/// hyperplanes, whose covectors obey the same normalization).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointSpace {
    n: usize,
    order: u64,
    count: u64,
}

impl PointSpace {
    pub fn new(n: usize, order: usize) -> Result<Self> {
        if n >= MAX_COORDS {
            return Err(Error::DimensionTooLarge(n));
        }
        let order = order as u64;
        let count = (0..=n as u32).map(|i| order.pow(i)).sum();
        Ok(PointSpace { n, order, count })
    }

    pub fn for_field(n: usize, f: &FieldCtx) -> Result<Self> {
        Self::new(n, f.order())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(q^{2(n+1)} - 1)/(q^2 - 1)`.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Rank of a canonical coordinate vector.
    pub fn rank(&self, coords: &[Elem]) -> u64 {
        debug_assert_eq!(coords.len(), self.n + 1);
        let k = coords.iter().position(|e| !e.is_zero()).expect("zero vector has no rank");
        let offset: u64 = (0..k).map(|j| self.order.pow((self.n - j) as u32)).sum();
        let tail = coords[k + 1..].iter().fold(0u64, |acc, e| acc * self.order + e.0 as u64);
        offset + tail
    }

    pub fn unrank(&self, mut r: u64) -> Coords {
        assert!(r < self.count, "rank out of range");
        let mut k = 0;
        loop {
            let block = self.order.pow((self.n - k) as u32);
            if r < block {
                break;
            }
            r -= block;
            k += 1;
        }
        let mut coords: Coords = (0..=self.n).map(|_| Elem::ZERO).collect();
        coords[k] = Elem::ONE;
        for i in (k + 1..=self.n).rev() {
            coords[i] = Elem((r % self.order) as u8);
            r /= self.order;
        }
        coords
    }

    /// All canonical coordinate vectors in rank order.
    pub fn iter(&self) -> PointIter {
        self.iter_range(0, self.count)
    }

    /// Canonical coordinate vectors with rank in `start..end`.
    pub fn iter_range(&self, start: u64, end: u64) -> PointIter {
        let end = end.min(self.count);
        let current = (start < end).then(|| self.unrank(start));
        PointIter { order: self.order as u16, remaining: end.saturating_sub(start), current }
    }

    pub fn points(&self) -> impl Iterator<Item = ProjPoint> {
        self.iter().map(ProjPoint::from_canonical)
    }

    pub fn hyperplanes(&self) -> impl Iterator<Item = Hyperplane> {
        self.iter().map(Hyperplane::from_canonical)
    }
}

/// Odometer over canonical coordinate vectors.
pub struct PointIter {
    order: u16,
    remaining: u64,
    current: Option<Coords>,
}

impl Iterator for PointIter {
    type Item = Coords;

    fn next(&mut self) -> Option<Coords> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.current.clone()?;
        self.remaining -= 1;
        if self.remaining > 0 {
            let cur = self.current.as_mut().unwrap();
            let len = cur.len();
            let k = cur.iter().position(|e| !e.is_zero()).unwrap();
            let mut i = len - 1;
            loop {
                if i == k {
                    // tail exhausted: move the leading 1 one place right
                    cur[k] = Elem::ZERO;
                    cur[k + 1] = Elem::ONE;
                    for c in cur[k + 2..].iter_mut() {
                        *c = Elem::ZERO;
                    }
                    break;
                }
                let v = cur[i].0 as u16 + 1;
                if v < self.order {
                    cur[i] = Elem(v as u8);
                    break;
                }
                cur[i] = Elem::ZERO;
                i -= 1;
            }
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

/// Canonical enumeration of `P^n(F_{q^2})`.
pub fn enumerate_points(n: usize, f: &FieldCtx) -> Result<impl Iterator<Item = ProjPoint>> {
    Ok(PointSpace::for_field(n, f)?.points())
}

/// Number of hyperplanes through a point: `(q^{2n} - 1)/(q^2 - 1)`.
pub fn hyperplanes_through_count(n: usize, q: u64) -> u128 {
    projective_count(n as isize - 1, q)
}

/// All hyperplanes containing `p`, each canonical, in dual-rank order of
/// their coefficient vectors.
pub fn hyperplanes_through(f: &FieldCtx, p: &ProjPoint) -> Vec<Hyperplane> {
    let ann = Mat::from_rows(p.dim() + 1, &[p.coords()]).kernel(f);
    span_points(f, &ann).map(Hyperplane::from_canonical).collect()
}

/// A linear subspace of `P^n`, stored as a basis in reduced row-echelon form.
/// Zero rows encode the empty subspace (dimension -1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinearSubspace {
    n: usize,
    basis: Mat,
}

impl LinearSubspace {
    /// Span of the given vectors in `P^n`.
    pub fn span<R: AsRef<[Elem]>>(f: &FieldCtx, n: usize, rows: &[R]) -> Self {
        let m = Mat::from_rows(n + 1, rows);
        LinearSubspace { n, basis: m.rref(f).basis() }
    }

    pub fn from_basis(f: &FieldCtx, basis: &Mat) -> Self {
        LinearSubspace { n: basis.cols() - 1, basis: basis.rref(f).basis() }
    }

    pub fn whole(n: usize) -> Self {
        LinearSubspace { n, basis: Mat::identity(n + 1) }
    }

    pub fn empty(n: usize) -> Self {
        LinearSubspace { n, basis: Mat::zeros(0, n + 1) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Projective dimension `m`, `-1` for the empty subspace.
    pub fn dim(&self) -> isize {
        self.basis.rows() as isize - 1
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn contains_coords(&self, f: &FieldCtx, x: &[Elem]) -> bool {
        if self.basis.rows() == 0 {
            return false;
        }
        let mut m = self.basis;
        m.push_row(x);
        m.rank(f) == self.basis.rows()
    }

    pub fn contains(&self, f: &FieldCtx, p: &ProjPoint) -> bool {
        self.contains_coords(f, p.coords())
    }

    pub fn contains_subspace(&self, f: &FieldCtx, other: &LinearSubspace) -> bool {
        (0..other.basis.rows()).all(|i| self.contains_coords(f, other.basis.row(i)))
    }

    /// Covectors vanishing on the subspace, as rows.
    pub fn annihilator(&self, f: &FieldCtx) -> Mat {
        if self.basis.rows() == 0 {
            return Mat::identity(self.n + 1);
        }
        self.basis.kernel(f)
    }

    /// Canonical points of the subspace, enumerated through coefficient
    /// vectors over the basis. Order follows the coefficient enumeration, not
    /// the ambient rank.
    pub fn points<'a>(&self, f: &'a FieldCtx) -> impl Iterator<Item = ProjPoint> + 'a {
        span_points(f, &self.basis).map(ProjPoint::from_canonical)
    }

    pub fn point_count(&self, q: u64) -> u128 {
        projective_count(self.dim(), q)
    }
}

/// Canonical vectors `y B` for `y` ranging over `P^{rows-1}`.
fn span_points<'a>(f: &'a FieldCtx, basis: &Mat) -> impl Iterator<Item = Coords> + 'a {
    let basis = *basis;
    let rows = basis.rows();
    let cols = basis.cols();
    let coeffs: Box<dyn Iterator<Item = Coords>> = if rows == 0 {
        Box::new(std::iter::empty())
    } else {
        Box::new(PointSpace::new(rows - 1, f.order()).expect("rows bounded").iter())
    };
    coeffs.map(move |y| {
        let mut v = [Elem::ZERO; MAX_COORDS];
        for (i, &c) in y.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in v[..cols].iter_mut().enumerate() {
                *slot = f.add(*slot, f.mul(c, basis.get(i, j)));
            }
        }
        normalize(f, &v[..cols]).expect("basis rows are independent")
    })
}

/// Common zero set of the given hyperplanes.
pub fn intersect(f: &FieldCtx, hyperplanes: &[Hyperplane]) -> LinearSubspace {
    assert!(!hyperplanes.is_empty(), "intersect needs at least one hyperplane");
    let n = hyperplanes[0].dim();
    let rows: Vec<&[Elem]> = hyperplanes.iter().map(|h| h.covector()).collect();
    let m = Mat::from_rows(n + 1, &rows);
    let kernel = m.kernel(f);
    if kernel.rows() == 0 {
        LinearSubspace::empty(n)
    } else {
        LinearSubspace { n, basis: kernel }
    }
}

/// The `q^2 + 1` hyperplanes containing a codimension-2 subspace.
pub fn pencil_through(f: &FieldCtx, pi: &LinearSubspace) -> Result<Vec<Hyperplane>> {
    let expected = pi.n as isize - 2;
    if pi.dim() != expected {
        return Err(Error::WrongDimension { expected, actual: pi.dim() });
    }
    let ann = pi.annihilator(f);
    debug_assert_eq!(ann.rows(), 2);
    Ok(span_points(f, &ann).map(Hyperplane::from_canonical).collect())
}

/// A uniformly random subspace of projective dimension `dim` (rejection on
/// random spanning sets).
pub fn random_subspace<R: Rng + ?Sized>(f: &FieldCtx, n: usize, dim: usize, rng: &mut R) -> LinearSubspace {
    assert!(dim <= n, "subspace dimension exceeds ambient dimension");
    loop {
        let rows: Vec<Coords> = (0..=dim)
            .map(|_| (0..=n).map(|_| Elem(rng.gen_range(0..f.order()) as u8)).collect())
            .collect();
        let s = LinearSubspace::span(f, n, &rows);
        if s.dim() == dim as isize {
            return s;
        }
    }
}

/// Membership of a point in a subspace.
pub fn membership(f: &FieldCtx, p: &ProjPoint, pi: &LinearSubspace) -> bool {
    pi.contains(f, p)
}
