//! Exhaustive and sampled experiments over hyperplane triples, incidences
//! and random cubics.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cubics::{intersect_count_arrangement, intersect_count_enum, max_formula, Arrangement, ArrangementRecord};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::hermitian::{HermitianForm, SectionType, Tangency};
use crate::linalg::{dot, Coords};
use crate::poly::{monomial_basis, monomial_values, Hypersurface, TermRecord};
use crate::projgeom::{intersect, normalize, Hyperplane, LinearSubspace, PointSpace};
use crate::sequences::b_rec;

/// Section type cut by `k` independent hyperplanes whose polar vectors have a
/// Gram matrix of rank `g`: the radical of the section and of the polar span
/// coincide, so the restricted rank is `n + 1 - 2k + g`.
pub fn section_from_gram(n: usize, k: usize, g: usize) -> SectionType {
    let m = n as isize - k as isize;
    let r = n as isize + 1 - 2 * k as isize + g as isize;
    SectionType { v: m - r, s: r - 1 }
}

fn type_count(q: u64, t: SectionType) -> u64 {
    if t.m() < 0 || t.s < -1 || t.v < -1 {
        return 0;
    }
    t.count(q) as u64
}

/// Membership of `U_n` over the canonical point order.
#[derive(Clone, Debug)]
pub struct VarietyBitset {
    space: PointSpace,
    bits: Vec<u64>,
    count: u64,
}

impl VarietyBitset {
    pub fn new(f: &FieldCtx, form: &HermitianForm, budget: u64) -> Result<Self> {
        let space = PointSpace::for_field(form.n(), f)?;
        if space.count() > budget {
            return Err(Error::BudgetExceeded { what: "variety scan", needed: space.count() as u128, budget });
        }
        let mut bits = vec![0u64; space.count().div_ceil(64) as usize];
        for (r, x) in space.iter().enumerate() {
            if form.contains_coords(f, &x) {
                bits[r / 64] |= 1 << (r % 64);
            }
        }
        let count = bits.iter().map(|w| w.count_ones() as u64).sum();
        Ok(VarietyBitset { space, bits, count })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn contains_rank(&self, r: u64) -> bool {
        self.bits[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    /// Canonical coordinates of the variety points in rank order.
    pub fn points(&self) -> impl Iterator<Item = Coords> + '_ {
        self.space.iter().enumerate().filter(|(r, _)| self.contains_rank(*r as u64)).map(|(_, x)| x)
    }
}

/// Per-hyperplane data shared by the triple searches.
struct HyperplaneData {
    q: u64,
    hyperplanes: Vec<Hyperplane>,
    /// `(H^{-1} a)^{(q)}`, unnormalized.
    polar: Vec<Coords>,
    /// `H p^{(q)}` for each polar vector, so that `h(p_i, p_j) = p_i · w_j`.
    dual: Vec<Coords>,
    tangent: Vec<bool>,
    single: Vec<u64>,
    pair_count: [u64; 3],
    triple_count: [u64; 4],
}

impl HyperplaneData {
    fn build(f: &FieldCtx, form: &HermitianForm, hyperplanes: Vec<Hyperplane>) -> Result<Self> {
        let n = form.n();
        let q = f.q() as u64;
        let inv = form
            .matrix()
            .inverse(f)
            .ok_or(Error::Degenerate { rank: form.rank(f), full: n + 1 })?;
        let mut polar = Vec::with_capacity(hyperplanes.len());
        let mut dual = Vec::with_capacity(hyperplanes.len());
        let mut tangent = Vec::with_capacity(hyperplanes.len());
        let mut single = Vec::with_capacity(hyperplanes.len());
        for h in &hyperplanes {
            let p: Coords = inv.mul_vec(f, h.covector()).iter().map(|&c| f.frob(c)).collect();
            let pq: Coords = p.iter().map(|&c| f.frob(c)).collect();
            let w = form.matrix().mul_vec(f, &pq);
            let on = dot(f, &p, &w).is_zero();
            tangent.push(on);
            single.push(type_count(q, section_from_gram(n, 1, usize::from(!on))));
            polar.push(p);
            dual.push(w);
        }
        let pair_count = [0, 1, 2].map(|g| type_count(q, section_from_gram(n, 2, g)));
        let triple_count = [0, 1, 2, 3].map(|g| type_count(q, section_from_gram(n, 3, g)));
        Ok(HyperplaneData { q, hyperplanes, polar, dual, tangent, single, pair_count, triple_count })
    }

    #[inline]
    fn gram(&self, f: &FieldCtx, i: usize, j: usize) -> Elem {
        dot(f, &self.polar[i], &self.dual[j])
    }
}

#[inline]
fn rank2(f: &FieldCtx, a: Elem, b: Elem, c: Elem, d: Elem) -> usize {
    if !f.sub(f.mul(a, d), f.mul(b, c)).is_zero() {
        2
    } else if a.is_zero() && b.is_zero() && c.is_zero() && d.is_zero() {
        0
    } else {
        1
    }
}

/// Rank of a 3×3 matrix given row-major.
#[inline]
fn rank3(f: &FieldCtx, g: &[Elem; 9]) -> usize {
    let m = |a: usize, b: usize| f.mul(g[a], g[b]);
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| f.sub(m(3 * r0 + c0, 3 * r1 + c1), m(3 * r0 + c1, 3 * r1 + c0));
    let det = f.add(
        f.sub(f.mul(g[0], minor(1, 2, 1, 2)), f.mul(g[1], minor(1, 2, 0, 2))),
        f.mul(g[2], minor(1, 2, 0, 1)),
    );
    if !det.is_zero() {
        return 3;
    }
    for (r0, r1) in [(0, 1), (0, 2), (1, 2)] {
        for (c0, c1) in [(0, 1), (0, 2), (1, 2)] {
            if !minor(r0, r1, c0, c1).is_zero() {
                return 2;
            }
        }
    }
    usize::from(g.iter().any(|e| !e.is_zero()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ArgmaxEntry {
    pub arrangement: ArrangementRecord,
    pub pencil: bool,
    pub enumerated: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodMix {
    pub formula: f64,
    pub enumeration: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleCheck {
    pub sampled: usize,
    pub mismatches: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub q: u32,
    /// `exhaustive` over all unordered triples, or `orbit` over triples
    /// through one representative of each hyperplane orbit.
    pub scope: &'static str,
    pub triples: u64,
    pub global_max: u64,
    pub max_formula: u64,
    pub reaches_max_formula: bool,
    pub argmax_count: usize,
    pub argmax_arrangements: Vec<ArgmaxEntry>,
    pub all_argmax_pencil: bool,
    pub argmax_verified: bool,
    pub histogram: BTreeMap<u64, u64>,
    pub method_mix: MethodMix,
    pub sample_check: SampleCheck,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl SearchReport {
    pub fn write_histogram_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        write_histogram_csv(&self.histogram, out)
    }
}

pub fn write_histogram_csv<W: std::io::Write>(hist: &BTreeMap<u64, u64>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value", "count"])?;
    for (v, c) in hist {
        w.write_record([v.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn binom3(n: u64) -> u128 {
    let n = n as u128;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

#[derive(Default)]
struct Partial {
    hist: BTreeMap<u64, u64>,
    max: u64,
    argmax: Vec<[u32; 3]>,
    triples: u64,
}

impl Partial {
    #[inline]
    fn record(&mut self, v: u64, t: [u32; 3]) {
        *self.hist.entry(v).or_insert(0) += 1;
        self.triples += 1;
        if v > self.max || self.triples == 1 {
            self.max = v;
            self.argmax.clear();
        }
        if v == self.max {
            self.argmax.push(t);
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (v, c) in other.hist {
            *self.hist.entry(v).or_insert(0) += c;
        }
        if other.triples > 0 {
            if self.triples == 0 || other.max > self.max {
                self.max = other.max;
                self.argmax = other.argmax;
            } else if other.max == self.max {
                self.argmax.extend(other.argmax);
            }
        }
        self.triples += other.triples;
        self
    }
}

/// Exact maximum of `|(Σ_1 ∪ Σ_2 ∪ Σ_3) ∩ U_n|` over all unordered triples of
/// distinct hyperplanes. Pair terms and pencil membership come from tables
/// over all pairs; the triple term from the rank of the 3×3 Gram matrix of the
/// polar points. Every argmax triple and `samples` random triples are
/// recounted by enumerating the expanded cubic.
pub fn exhaustive_triples(f: &FieldCtx, form: &HermitianForm, budget: u64, samples: usize, seed: u64) -> Result<SearchReport> {
    let start = Instant::now();
    let n = form.n();
    let space = PointSpace::for_field(n, f)?;
    let big_n = space.count();
    let total = binom3(big_n);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { what: "triple search", needed: total, budget });
    }
    let data = HyperplaneData::build(f, form, space.hyperplanes().collect())?;
    let nn = big_n as usize;

    let mut gram = vec![Elem::ZERO; nn * nn];
    for i in 0..nn {
        for j in 0..nn {
            gram[i * nn + j] = data.gram(f, i, j);
        }
    }
    // pencil ids, memoized by the reduced basis of the common subspace
    let mut ids: HashMap<LinearSubspace, u32> = HashMap::new();
    let mut pencil = vec![u32::MAX; nn * nn];
    let mut pair = vec![0u64; nn * nn];
    for i in 0..nn {
        for j in i + 1..nn {
            let pi = intersect(f, &[data.hyperplanes[i].clone(), data.hyperplanes[j].clone()]);
            let next = ids.len() as u32;
            let id = *ids.entry(pi).or_insert(next);
            pencil[i * nn + j] = id;
            pencil[j * nn + i] = id;
            let g = rank2(f, gram[i * nn + i], gram[i * nn + j], gram[j * nn + i], gram[j * nn + j]);
            let c = data.pair_count[g];
            pair[i * nn + j] = c;
            pair[j * nn + i] = c;
        }
    }

    let value = |i: usize, j: usize, k: usize| -> u64 {
        let singles = data.single[i] + data.single[j] + data.single[k];
        if pencil[i * nn + j] == pencil[i * nn + k] {
            return singles - 2 * pair[i * nn + j];
        }
        let g = [
            gram[i * nn + i],
            gram[i * nn + j],
            gram[i * nn + k],
            gram[j * nn + i],
            gram[j * nn + j],
            gram[j * nn + k],
            gram[k * nn + i],
            gram[k * nn + j],
            gram[k * nn + k],
        ];
        singles + data.triple_count[rank3(f, &g)] - pair[i * nn + j] - pair[i * nn + k] - pair[j * nn + k]
    };

    let partial = (0..nn)
        .into_par_iter()
        .map(|i| {
            let mut p = Partial::default();
            for j in i + 1..nn {
                for k in j + 1..nn {
                    p.record(value(i, j, k), [i as u32, j as u32, k as u32]);
                }
            }
            p
        })
        .reduce(Partial::default, Partial::merge);
    let mut argmax = partial.argmax;
    argmax.sort_unstable();

    let (entries, verified, all_pencil) = verify_argmax(f, form, &data, &argmax, partial.max)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..samples {
        let mut t = sample(&mut rng, nn, 3).into_vec();
        t.sort_unstable();
        let fast = value(t[0], t[1], t[2]);
        let arr = Arrangement::new(f, form, t.iter().map(|&i| data.hyperplanes[i].clone()).collect())?;
        let formula = intersect_count_arrangement(f, &arr, form)?.count;
        let enumerated = intersect_count_enum(f, &arr.to_hypersurface(f), form, u64::MAX)?;
        if fast != enumerated || formula != enumerated {
            mismatches += 1;
        }
    }

    let mf = max_formula(n, data.q)? as u64;
    Ok(SearchReport {
        n,
        q: f.q(),
        scope: "exhaustive",
        triples: partial.triples,
        global_max: partial.max,
        max_formula: mf,
        reaches_max_formula: partial.max >= mf,
        argmax_count: argmax.len(),
        argmax_arrangements: entries,
        all_argmax_pencil: all_pencil,
        argmax_verified: verified,
        histogram: partial.hist,
        method_mix: MethodMix { formula: 1.0, enumeration: 0.0 },
        sample_check: SampleCheck { sampled: samples, mismatches, seed },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn verify_argmax(
    f: &FieldCtx,
    form: &HermitianForm,
    data: &HyperplaneData,
    argmax: &[[u32; 3]],
    max: u64,
) -> Result<(Vec<ArgmaxEntry>, bool, bool)> {
    let mut entries = Vec::with_capacity(argmax.len());
    let mut verified = true;
    let mut all_pencil = true;
    for t in argmax {
        let arr = Arrangement::new(f, form, t.iter().map(|&i| data.hyperplanes[i as usize].clone()).collect())?;
        let enumerated = intersect_count_enum(f, &arr.to_hypersurface(f), form, u64::MAX)?;
        let pencil = arr.is_pencil(f);
        verified &= enumerated == max;
        all_pencil &= pencil;
        entries.push(ArgmaxEntry { arrangement: arr.record(max), pencil, enumerated });
    }
    Ok((entries, verified, all_pencil))
}

/// The triple search restricted to triples through a fixed representative
/// hyperplane: the first non-tangent hyperplane (paired with any two others)
/// and the first tangent one (paired with two other tangent hyperplanes).
/// The unitary group is transitive on tangent and on non-tangent
/// hyperplanes, so every triple is equivalent to one of these and the global
/// maximum and the pencil property of maximizers carry over. The histogram
/// counts the reduced triples only.
pub fn orbit_triples(f: &FieldCtx, form: &HermitianForm, budget: u64, samples: usize, seed: u64) -> Result<SearchReport> {
    let start = Instant::now();
    let n = form.n();
    let space = PointSpace::for_field(n, f)?;
    let big_n = space.count();
    let pairs = (big_n as u128) * (big_n as u128 - 1);
    if pairs > budget as u128 {
        return Err(Error::BudgetExceeded { what: "orbit triple search", needed: pairs, budget });
    }
    let data = HyperplaneData::build(f, form, space.hyperplanes().collect())?;
    let nn = big_n as usize;
    let reps = [
        data.tangent.iter().position(|&t| !t),
        data.tangent.iter().position(|&t| t),
    ];

    // pencil through (r, j) identified by the image of a_j in the quotient by a_r
    let pencil_key = |r: usize, j: usize| -> u64 {
        let ar = data.hyperplanes[r].covector();
        let aj = data.hyperplanes[j].covector();
        let k = ar.iter().position(|e| !e.is_zero()).expect("nonzero covector");
        let mut rest = Coords::new();
        for i in 0..ar.len() {
            if i != k {
                rest.push(f.sub(aj[i], f.mul(aj[k], ar[i])));
            }
        }
        let rest = normalize(f, &rest).expect("distinct hyperplanes");
        PointSpace::for_field(n - 1, f).expect("n ≥ 1").rank(&rest)
    };

    let mut total = Partial::default();
    for (which, rep) in reps.iter().enumerate() {
        let Some(r) = *rep else { continue };
        let others: Vec<usize> = (0..nn).filter(|&j| j != r && (which == 0 || data.tangent[j])).collect();
        let keys: Vec<u64> = others.iter().map(|&j| pencil_key(r, j)).collect();
        let grr = data.gram(f, r, r);
        let gr: Vec<(Elem, Elem)> = others.iter().map(|&j| (data.gram(f, r, j), data.gram(f, j, r))).collect();
        let pr: Vec<u64> = others
            .iter()
            .zip(&gr)
            .map(|(&j, &(a, b))| data.pair_count[rank2(f, grr, a, b, data.gram(f, j, j))])
            .collect();
        let partial = (0..others.len())
            .into_par_iter()
            .map(|x| {
                let mut p = Partial::default();
                let j = others[x];
                let gjj = data.gram(f, j, j);
                for y in x + 1..others.len() {
                    let k = others[y];
                    let singles = data.single[r] + data.single[j] + data.single[k];
                    let v = if keys[x] == keys[y] {
                        singles - 2 * pr[x]
                    } else {
                        let gjk = data.gram(f, j, k);
                        let gkj = data.gram(f, k, j);
                        let gkk = data.gram(f, k, k);
                        let pjk = data.pair_count[rank2(f, gjj, gjk, gkj, gkk)];
                        let g = [grr, gr[x].0, gr[y].0, gr[x].1, gjj, gjk, gr[y].1, gkj, gkk];
                        singles + data.triple_count[rank3(f, &g)] - pr[x] - pr[y] - pjk
                    };
                    let mut t = [r as u32, j as u32, k as u32];
                    t.sort_unstable();
                    p.record(v, t);
                }
                p
            })
            .reduce(Partial::default, Partial::merge);
        total = total.merge(partial);
    }
    let mut argmax = total.argmax;
    argmax.sort_unstable();
    argmax.dedup();
    let (entries, verified, all_pencil) = verify_argmax(f, form, &data, &argmax, total.max)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..samples {
        let mut t = sample(&mut rng, nn, 3).into_vec();
        t.sort_unstable();
        let arr = Arrangement::new(f, form, t.iter().map(|&i| data.hyperplanes[i].clone()).collect())?;
        let formula = intersect_count_arrangement(f, &arr, form)?.count;
        let enumerated = intersect_count_enum(f, &arr.to_hypersurface(f), form, u64::MAX)?;
        if formula != enumerated {
            mismatches += 1;
        }
    }

    let mf = max_formula(n, data.q)? as u64;
    Ok(SearchReport {
        n,
        q: f.q(),
        scope: "orbit",
        triples: total.triples,
        global_max: total.max,
        max_formula: mf,
        reaches_max_formula: total.max >= mf,
        argmax_count: argmax.len(),
        argmax_arrangements: entries,
        all_argmax_pencil: all_pencil,
        argmax_verified: verified,
        histogram: total.hist,
        method_mix: MethodMix { formula: 1.0, enumeration: 0.0 },
        sample_check: SampleCheck { sampled: samples, mismatches, seed },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IncidenceReport {
    pub n: usize,
    pub q: u32,
    pub variety_points: u64,
    pub hyperplanes: u64,
    pub tangent_hyperplanes: u64,
    pub nontangent_hyperplanes: u64,
    /// Number of tangent hyperplanes through a point → number of points.
    pub tangent_through_histogram: BTreeMap<u64, u64>,
    /// Number of hyperplanes through a point → number of points.
    pub hyperplanes_through_histogram: BTreeMap<u64, u64>,
    pub expected_tangent_through: u64,
    pub expected_hyperplanes_through: u64,
    /// Sum over variety points of the non-tangent hyperplanes through them.
    pub left_sum: u64,
    /// Sum over non-tangent hyperplanes of the variety points on them.
    pub right_sum: u64,
    /// `(number of non-tangent hyperplanes) · |U_{n-1}|`.
    pub right_formula: u64,
}

impl IncidenceReport {
    pub fn tangent_count_uniform(&self) -> Option<u64> {
        match self.tangent_through_histogram.keys().collect::<Vec<_>>()[..] {
            [&v] => Some(v),
            _ => None,
        }
    }

    pub fn passed(&self) -> bool {
        self.tangent_count_uniform() == Some(self.expected_tangent_through)
            && self.hyperplanes_through_histogram.keys().eq([self.expected_hyperplanes_through].iter())
            && self.left_sum == self.right_sum
            && self.right_sum == self.right_formula
            && self.tangent_hyperplanes == self.variety_points
    }
}

/// Classifies every hyperplane and counts all point–hyperplane incidences
/// between `U_n` and the dual space.
pub fn incidence_double_count(f: &FieldCtx, form: &HermitianForm, budget: u64) -> Result<IncidenceReport> {
    let n = form.n();
    let q = f.q() as u64;
    let variety = VarietyBitset::new(f, form, budget)?;
    let space = PointSpace::for_field(n, f)?;
    let needed = variety.count() as u128 * space.count() as u128;
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { what: "incidence count", needed, budget });
    }
    let hyperplanes: Vec<Hyperplane> = space.hyperplanes().collect();
    let tangent: Vec<bool> = hyperplanes
        .iter()
        .map(|h| form.classify_hyperplane(f, h).map(|r| r.kind == Tangency::Tangent))
        .collect::<Result<_>>()?;
    let points: Vec<Coords> = variety.points().collect();
    let per_point: Vec<(u64, u64)> = points
        .par_iter()
        .map(|x| {
            let mut through = 0;
            let mut tan = 0;
            for (h, &t) in hyperplanes.iter().zip(&tangent) {
                if h.contains_coords(f, x) {
                    through += 1;
                    tan += u64::from(t);
                }
            }
            (through, tan)
        })
        .collect();
    let right_sum: u64 = hyperplanes
        .par_iter()
        .zip(&tangent)
        .filter(|(_, &t)| !t)
        .map(|(h, _)| points.iter().filter(|x| h.contains_coords(f, x)).count() as u64)
        .sum();
    let mut tangent_through_histogram = BTreeMap::new();
    let mut hyperplanes_through_histogram = BTreeMap::new();
    let mut left_sum = 0;
    for &(through, tan) in &per_point {
        *tangent_through_histogram.entry(tan).or_insert(0) += 1;
        *hyperplanes_through_histogram.entry(through).or_insert(0) += 1;
        left_sum += through - tan;
    }
    let tangent_hyperplanes = tangent.iter().filter(|&&t| t).count() as u64;
    let nontangent = space.count() - tangent_hyperplanes;
    let u = |m: isize| crate::hermitian::hermitian_points(m, q) as u64;
    Ok(IncidenceReport {
        n,
        q: f.q(),
        variety_points: variety.count(),
        hyperplanes: space.count(),
        tangent_hyperplanes,
        nontangent_hyperplanes: nontangent,
        tangent_through_histogram,
        hyperplanes_through_histogram,
        expected_tangent_through: q * q * u(n as isize - 2) + 1,
        expected_hyperplanes_through: crate::projgeom::hyperplanes_through_count(n, q) as u64,
        left_sum,
        right_sum,
        right_formula: nontangent * u(n as isize - 1),
    })
}

/// Section types met by pairs of distinct hyperplanes, split by tangency.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub n: usize,
    pub q: u32,
    pub pairs: u64,
    /// `"tangent/tangent"`, `"tangent/non-tangent"`, `"non-tangent/non-tangent"`
    /// → section type → number of pairs.
    pub types: BTreeMap<String, BTreeMap<String, u64>>,
    /// Pairs with a non-tangent member whose section is `Π_1 U_{n-4}`.
    pub nontangent_violations: u64,
    /// Tangent pairs whose section is `Π_0 U_{n-3}`.
    pub tangent_violations: u64,
}

/// Classifies the section of every pair of distinct hyperplanes by
/// restricting the form to their intersection.
pub fn pair_exclusions(f: &FieldCtx, form: &HermitianForm, budget: u64) -> Result<PairReport> {
    let n = form.n();
    let space = PointSpace::for_field(n, f)?;
    let nn = space.count() as usize;
    let pairs = (nn as u128) * (nn as u128 - 1) / 2;
    if pairs > budget as u128 {
        return Err(Error::BudgetExceeded { what: "pair classification", needed: pairs, budget });
    }
    let hyperplanes: Vec<Hyperplane> = space.hyperplanes().collect();
    let tangent: Vec<bool> = hyperplanes
        .iter()
        .map(|h| form.classify_hyperplane(f, h).map(|r| r.kind == Tangency::Tangent))
        .collect::<Result<_>>()?;
    let cone0 = SectionType { v: 0, s: n as isize - 3 };
    let cone1 = SectionType { v: 1, s: n as isize - 4 };
    let counts = (0..nn)
        .into_par_iter()
        .map(|i| {
            let mut local: BTreeMap<(u8, SectionType), u64> = BTreeMap::new();
            for j in i + 1..nn {
                let pi = intersect(f, &[hyperplanes[i].clone(), hyperplanes[j].clone()]);
                let t = form.classify_section(f, &pi)?;
                let kind = u8::from(tangent[i]) + u8::from(tangent[j]);
                *local.entry((kind, t)).or_insert(0) += 1;
            }
            Ok(local)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })?;
    let mut types: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut nontangent_violations = 0;
    let mut tangent_violations = 0;
    for (&(kind, t), &c) in &counts {
        let label = ["non-tangent/non-tangent", "tangent/non-tangent", "tangent/tangent"][kind as usize];
        *types.entry(label.to_string()).or_default().entry(t.to_string()).or_insert(0) += c;
        if kind < 2 && t == cone1 {
            nontangent_violations += c;
        }
        if kind == 2 && t == cone0 {
            tangent_violations += c;
        }
    }
    Ok(PairReport { n, q: f.q(), pairs: pairs as u64, types, nontangent_violations, tangent_violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct Exceedance {
    pub trial: usize,
    pub count: u64,
    pub polynomial: String,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomSampleReport {
    pub n: usize,
    pub q: u32,
    pub seed: u64,
    pub prng: &'static str,
    pub trials: usize,
    /// Samples thrown away because a rational hyperplane divides them.
    pub discarded: usize,
    pub threshold: u64,
    /// Whether exceeding the threshold contradicts a proved statement (`q ≥ 7`).
    pub asserted: bool,
    pub max_count: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub exceedances: Vec<Exceedance>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl RandomSampleReport {
    pub fn passed(&self) -> bool {
        !self.asserted || self.exceedances.is_empty()
    }
}

/// Monomial values of every variety point, for repeated cubic evaluation.
pub struct MonomialTable {
    pub basis: Vec<crate::poly::Exponents>,
    values: Vec<u8>,
    points: usize,
}

impl MonomialTable {
    pub fn new(f: &FieldCtx, n: usize, degree: u8, points: &[Coords]) -> Self {
        let basis = monomial_basis(n, degree);
        let mut values = Vec::with_capacity(points.len() * basis.len());
        let mut buf = Vec::with_capacity(basis.len());
        for x in points {
            monomial_values(f, &basis, x, &mut buf);
            values.extend(buf.iter().map(|e| e.0));
        }
        MonomialTable { basis, values, points: points.len() }
    }

    /// Number of points where `sum_i c_i m_i` vanishes.
    pub fn zeros(&self, f: &FieldCtx, coeffs: &[Elem]) -> u64 {
        let k = self.basis.len();
        let order = f.order();
        let mul = f.mul_table();
        let add = f.add_table();
        let rows: Vec<usize> = coeffs.iter().map(|c| c.index() * order).collect();
        const CHUNK: usize = 1 << 12;
        self.values
            .par_chunks(k * CHUNK)
            .map(|block| {
                block
                    .chunks_exact(k)
                    .filter(|pt| {
                        let mut acc = 0u8;
                        for (m, row) in pt.iter().zip(&rows) {
                            let t = mul[row + *m as usize];
                            acc = add[acc as usize * order + t as usize];
                        }
                        acc == 0
                    })
                    .count() as u64
            })
            .sum()
    }

    pub fn points(&self) -> usize {
        self.points
    }
}

/// Uniformly random cubics (nonzero coefficient vectors), skipping those
/// with a rational linear factor, counted against `U_n` and compared with
/// `B_n`. The PRNG is ChaCha8 seeded with `seed`.
pub fn random_cubic_sample(f: &FieldCtx, form: &HermitianForm, trials: usize, seed: u64, budget: u64) -> Result<RandomSampleReport> {
    let start = Instant::now();
    let n = form.n();
    let variety = VarietyBitset::new(f, form, budget)?;
    let points: Vec<Coords> = variety.points().collect();
    let table = MonomialTable::new(f, n, 3, &points);
    let threshold = u64::try_from(b_rec(n, f.q() as u64)?).map_err(|_| Error::OutOfRange("B_n exceeds 64 bits".into()))?;
    let asserted = f.q() >= 7;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = f.order();
    let mut histogram = BTreeMap::new();
    let mut exceedances = Vec::new();
    let mut discarded = 0;
    let mut accepted = 0;
    let mut max_count = 0;
    while accepted < trials {
        let coeffs: Vec<Elem> = (0..table.basis.len()).map(|_| Elem(rng.gen_range(0..order) as u8)).collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let cubic = Hypersurface::new(f, n, table.basis.iter().copied().zip(coeffs.iter().copied()))?;
        if cubic.has_linear_factor(f) {
            discarded += 1;
            continue;
        }
        let count = table.zeros(f, &coeffs);
        *histogram.entry(count).or_insert(0) += 1;
        max_count = max_count.max(count);
        if count > threshold {
            exceedances.push(Exceedance { trial: accepted, count, polynomial: cubic.to_string(), terms: cubic.terms() });
        }
        accepted += 1;
    }
    Ok(RandomSampleReport {
        n,
        q: f.q(),
        seed,
        prng: "ChaCha8",
        trials,
        discarded,
        threshold,
        asserted,
        max_count,
        histogram,
        exceedances,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
