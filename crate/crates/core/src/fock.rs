//! Free-boson Fock space and normal-ordered quantization of local functionals.
//!
//! The field on the circle is `u(x) = sum_k p_k e^{ikx}` with modes obeying
//! `[p_a, p_b] = i*hbar*a*delta_{a+b,0}`. A density `f` is quantized by
//! taking the zero Fourier mode of its symbol,
//!
//! ```text
//! f = c hbar^a prod_r u_{j_r}  |->  c hbar^a sum_{k_1+...+k_r=0} prod_r (i k_r)^{j_r} :p_{k_1}...p_{k_r}:
//! ```
//!
//! and normal ordering puts creators (`k < 0`) to the left. The zero mode
//! `p_0` is central and kept as a formal variable. A basis state
//! `|λ> = prod_i p_{-λ_i} |0>` is a partition; `p_k` with `k > 0` acts as
//! `i*hbar*k * d/dp_{-k}`.
//!
//! Every operator here conserves momentum, and on a sector of momentum `m`
//! only modes with `|k| <= m` can contribute, so all results are exact.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::functional::{poisson_bracket, to_functional};
use crate::hierarchy::HamiltonianCache;
use crate::scalar::Scalar;

/// A multiset of positive creation modes, stored non-increasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn vacuum() -> Self {
        Partition(Vec::new())
    }

    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn momentum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiplicity(&self, k: u32) -> u32 {
        self.0.iter().filter(|&&p| p == k).count() as u32
    }

    /// Size of the multiset intersection with `other`.
    pub fn common_parts(&self, other: &Partition) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Greater => i += 1,
                std::cmp::Ordering::Less => j += 1,
            }
        }
        n
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All partitions of `m`, in reverse lexicographic order.
pub fn partitions(m: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            cur.push(k);
            rec(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

/// Polynomial in `hbar` and the central zero mode `p0`, keyed by `(hbar, p0)` exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SectorScalar {
    terms: BTreeMap<(u32, u32), Scalar>,
}

impl SectorScalar {
    pub fn zero() -> Self {
        SectorScalar::default()
    }

    pub fn one() -> Self {
        SectorScalar::monomial(Scalar::one(), 0, 0)
    }

    pub fn monomial(c: Scalar, hbar: u32, p0: u32) -> Self {
        let mut s = SectorScalar::zero();
        s.add_term(hbar, p0, c);
        s
    }

    pub fn add_term(&mut self, hbar: u32, p0: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((hbar, p0)).or_insert_with(Scalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&(hbar, p0));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, hbar: u32, p0: u32) -> Scalar {
        self.terms
            .get(&(hbar, p0))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// The `hbar^a` coefficient, a polynomial in `p0` alone.
    pub fn hbar_coefficient(&self, a: u32) -> SectorScalar {
        let mut out = SectorScalar::zero();
        for (&(h, p), c) in &self.terms {
            if h == a {
                out.add_term(0, p, c.clone());
            }
        }
        out
    }

    pub fn min_hbar(&self) -> Option<u32> {
        self.terms.keys().map(|&(h, _)| h).min()
    }

    pub fn add_assign(&mut self, other: &SectorScalar) {
        for (&(h, p), c) in &other.terms {
            self.add_term(h, p, c.clone());
        }
    }

    pub fn sub(&self, other: &SectorScalar) -> SectorScalar {
        let mut out = self.clone();
        for (&(h, p), c) in &other.terms {
            out.add_term(h, p, -c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> SectorScalar {
        let mut out = SectorScalar::zero();
        for (&(h, p), v) in &self.terms {
            out.add_term(h, p, v * c);
        }
        out
    }

    pub fn mul(&self, other: &SectorScalar) -> SectorScalar {
        let mut out = SectorScalar::zero();
        for (&(ha, pa), ca) in &self.terms {
            for (&(hb, pb), cb) in &other.terms {
                out.add_term(ha + hb, pa + pb, ca * cb);
            }
        }
        out
    }

    /// Add `self * c * hbar^dh * p0^dp` into `acc`.
    fn accumulate_shifted(&self, c: &Scalar, dh: u32, dp: u32, acc: &mut SectorScalar) {
        for (&(h, p), v) in &self.terms {
            acc.add_term(h + dh, p + dp, v * c);
        }
    }
}

impl fmt::Display for SectorScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(h, p), c)| {
                let mut s = format!("({c})");
                if h > 0 {
                    s.push_str(&format!("*hbar^{h}"));
                }
                if p > 0 {
                    s.push_str(&format!("*p0^{p}"));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Finite linear combination of partition states.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FockVector {
    terms: BTreeMap<Partition, SectorScalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn basis(p: Partition) -> Self {
        let mut v = FockVector::zero();
        v.add(p, SectorScalar::one());
        v
    }

    pub fn vacuum() -> Self {
        FockVector::basis(Partition::vacuum())
    }

    pub fn add(&mut self, p: Partition, c: SectorScalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(p.clone()).or_default();
        e.add_assign(&c);
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &SectorScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Partition) -> SectorScalar {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    pub fn max_momentum(&self) -> u32 {
        self.terms
            .keys()
            .map(Partition::momentum)
            .max()
            .unwrap_or(0)
    }

    /// The common momentum of all states, if there is one.
    pub fn momentum(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Partition::momentum);
        let first = it.next()?;
        it.all(|m| m == first).then_some(first)
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add(p.clone(), c.scale(&-Scalar::one()));
        }
        out
    }

    pub fn scale(&self, c: &SectorScalar) -> FockVector {
        let mut out = FockVector::zero();
        for (p, v) in &self.terms {
            out.add(p.clone(), v.mul(c));
        }
        out
    }

    pub fn plus(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add(p.clone(), c.clone());
        }
        out
    }
}

/// Normal-ordered symbol of a quantized density, restricted to modes that
/// can act on states of momentum at most `bound`. Keys are the sorted
/// nonzero modes; the zero mode lives in the coefficient.
#[derive(Clone, Debug)]
pub struct QuantizedOperator {
    terms: BTreeMap<Vec<i32>, SectorScalar>,
    bound: u32,
}

impl QuantizedOperator {
    pub fn new(f: &DiffPoly, bound: u32) -> Self {
        let b = bound as i32;
        let mut terms: BTreeMap<Vec<i32>, SectorScalar> = BTreeMap::new();
        for (mono, c) in f.terms() {
            // (sorted modes, p0 power) -> coefficient, summed over ordered tuples
            let mut layer: BTreeMap<(Vec<i32>, u32), Scalar> = BTreeMap::new();
            layer.insert((Vec::new(), 0), c.clone());
            for j in mono.jets() {
                let mut next: BTreeMap<(Vec<i32>, u32), Scalar> = BTreeMap::new();
                for ((modes, p0), v) in &layer {
                    let pos: i32 = modes.iter().filter(|&&k| k > 0).sum();
                    let neg: i32 = -modes.iter().filter(|&&k| k < 0).sum::<i32>();
                    if j == 0 {
                        let e = next
                            .entry((modes.clone(), p0 + 1))
                            .or_insert_with(Scalar::zero);
                        *e += v;
                    }
                    for k in (-(b - neg))..=(b - pos) {
                        if k == 0 {
                            continue;
                        }
                        // (i k)^j
                        let w = Scalar::i_pow(j).scale_int((k as i64).pow(j));
                        let mut key = modes.clone();
                        let at = key.partition_point(|&x| x < k);
                        key.insert(at, k);
                        let e = next.entry((key, *p0)).or_insert_with(Scalar::zero);
                        *e += &(v * &w);
                    }
                }
                next.retain(|_, v| !v.is_zero());
                layer = next;
            }
            for ((modes, p0), v) in layer {
                if modes.iter().sum::<i32>() != 0 {
                    continue;
                }
                terms.entry(modes).or_default().add_term(mono.hbar(), p0, v);
            }
        }
        terms.retain(|_, v| !v.is_zero());
        QuantizedOperator { terms, bound }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        assert!(
            v.max_momentum() <= self.bound,
            "state momentum {} exceeds operator bound {}",
            v.max_momentum(),
            self.bound
        );
        let mut out = FockVector::zero();
        for (lambda, cv) in v.terms() {
            let mut acc: BTreeMap<Partition, SectorScalar> = BTreeMap::new();
            for (modes, coef) in &self.terms {
                let Some((factor, annihilated, result)) = contract(lambda, modes) else {
                    continue;
                };
                let entry = acc.entry(result).or_default();
                let prod = coef.mul(cv);
                prod.accumulate_shifted(&factor, annihilated, 0, entry);
            }
            for (p, c) in acc {
                out.add(p, c);
            }
        }
        out
    }
}

/// Act with `:prod p_k:` on `|λ>`: returns the scalar factor (without its
/// `hbar^A`), the number `A` of annihilated modes, and the output partition.
fn contract(lambda: &Partition, modes: &[i32]) -> Option<(Scalar, u32, Partition)> {
    let mut parts = lambda.parts().to_vec();
    let mut factor: i64 = 1;
    let mut count = 0u32;
    for &k in modes.iter().filter(|&&k| k > 0) {
        let k = k as u32;
        let mu = parts.iter().filter(|&&p| p == k).count() as i64;
        if mu == 0 {
            return None;
        }
        factor *= k as i64 * mu;
        count += 1;
        let pos = parts.iter().position(|&p| p == k).expect("part present");
        parts.remove(pos);
    }
    for &k in modes.iter().filter(|&&k| k < 0) {
        parts.push((-k) as u32);
    }
    let c = Scalar::i_pow(count).scale_int(factor);
    Some((c, count, Partition::new(parts)))
}

/// Quantize `f` and apply it to `v`.
pub fn apply_quantized(f: &DiffPoly, v: &FockVector) -> FockVector {
    QuantizedOperator::new(f, v.max_momentum()).apply(v)
}

/// `f g v - g f v`.
pub fn commutator_apply(f: &DiffPoly, g: &DiffPoly, v: &FockVector) -> FockVector {
    let m = v.max_momentum();
    let fo = QuantizedOperator::new(f, m);
    let go = QuantizedOperator::new(g, m);
    commutator_with(&fo, &go, v).0
}

/// Commutator on `v` from prebuilt operators; also returns the largest
/// intermediate vector length.
pub fn commutator_with(
    f: &QuantizedOperator,
    g: &QuantizedOperator,
    v: &FockVector,
) -> (FockVector, usize) {
    let gv = g.apply(v);
    let fv = f.apply(v);
    let dim = gv.len().max(fv.len());
    (f.apply(&gv).sub(&g.apply(&fv)), dim)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub d1: i64,
    pub d2: i64,
    pub mmax: u32,
    pub status: String,
    pub sectors: usize,
    pub max_intermediate_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub d1: i64,
    pub d2: i64,
    pub partition: String,
    pub output: String,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub pairs: Vec<PairReport>,
    pub witness: Option<Witness>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.witness.is_none() && self.pairs.iter().all(|p| p.status == "pass")
    }

    /// Concatenate reports; the first witness wins.
    pub fn merge(mut self, other: Report) -> Report {
        self.pairs.extend(other.pairs);
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }

    pub fn into_result(self) -> Result<Report> {
        match &self.witness {
            None => Ok(self),
            Some(w) => Err(Error::CommutatorNonzero {
                d1: w.d1,
                d2: w.d2,
                partition: parse_partition(&w.partition),
                output: parse_partition(&w.output),
                coefficient: w.coefficient.clone(),
            }),
        }
    }
}

fn parse_partition(s: &str) -> Partition {
    Partition::new(
        s.trim_matches(|c| c == '{' || c == '}')
            .split(',')
            .filter_map(|x| x.trim().parse().ok())
            .collect(),
    )
}

/// Commutator of `H_{d1}` and `H_{d2}` on every partition of momentum
/// `<= mmax`; failures are reported with a witness rather than an error.
pub fn commute_report(cache: &HamiltonianCache, d1: i64, d2: i64, mmax: u32) -> Result<Report> {
    let h1 = cache.get(d1)?;
    let h2 = cache.get(d2)?;
    let mut sectors = 0;
    let mut max_dim = 0;
    for m in 0..=mmax {
        let fo = QuantizedOperator::new(&h1.density, m);
        let go = QuantizedOperator::new(&h2.density, m);
        let parts = partitions(m);
        let results: Vec<(Partition, FockVector, usize)> = parts
            .into_par_iter()
            .map(|lambda| {
                let (c, dim) = commutator_with(&fo, &go, &FockVector::basis(lambda.clone()));
                (lambda, c, dim)
            })
            .collect();
        for (lambda, c, dim) in results {
            sectors += 1;
            max_dim = max_dim.max(dim);
            if let Some((out, coef)) = c.terms().next() {
                return Ok(Report {
                    pairs: vec![PairReport {
                        d1,
                        d2,
                        mmax,
                        status: "fail".into(),
                        sectors,
                        max_intermediate_dim: max_dim,
                    }],
                    witness: Some(Witness {
                        d1,
                        d2,
                        partition: lambda.to_string(),
                        output: out.to_string(),
                        coefficient: coef.to_string(),
                    }),
                });
            }
        }
    }
    Ok(Report {
        pairs: vec![PairReport {
            d1,
            d2,
            mmax,
            status: "pass".into(),
            sectors,
            max_intermediate_dim: max_dim,
        }],
        witness: None,
    })
}

/// `[H_{d1}, H_{d2}] = 0` on all sectors of momentum `<= mmax`.
pub fn check_commute(cache: &HamiltonianCache, d1: i64, d2: i64, mmax: u32) -> Result<Report> {
    commute_report(cache, d1, d2, mmax)?.into_result()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub mmax: u32,
    pub sectors: usize,
    pub comparisons: usize,
    pub status: String,
}

/// Compare the leading quantum correction of `[f, g]` with the quantized
/// Poisson bracket `{f, g}`.
///
/// A normal-ordered term with `a` annihilators picks up `hbar^a` when it
/// acts on a state, so for the transition `λ -> μ` the lowest possible
/// contraction order is `a_min = len(λ) - |λ ∩ μ|`. The commutator starts
/// at `hbar^{1 + a_min}` there and its coefficient must equal the
/// `hbar^{a_min}` coefficient of the bracket's action.
pub fn classical_consistency(f: &DiffPoly, g: &DiffPoly, mmax: u32) -> Result<ConsistencyReport> {
    if !f.is_hbar_free() || !g.is_hbar_free() {
        return Err(Error::InvalidIndex(
            "classical consistency needs hbar-free densities".into(),
        ));
    }
    let bracket = poisson_bracket(&to_functional(f), &to_functional(g)).into_rep();
    let mut sectors = 0;
    let mut comparisons = 0;
    for m in 0..=mmax {
        let fo = QuantizedOperator::new(f, m);
        let go = QuantizedOperator::new(g, m);
        let po = QuantizedOperator::new(&bracket, m);
        for lambda in partitions(m) {
            sectors += 1;
            let v = FockVector::basis(lambda.clone());
            let (lhs, _) = commutator_with(&fo, &go, &v);
            let rhs = po.apply(&v);
            let mut outputs: Vec<&Partition> = lhs.terms().map(|(p, _)| p).collect();
            outputs.extend(rhs.terms().map(|(p, _)| p));
            outputs.sort();
            outputs.dedup();
            for mu in outputs {
                comparisons += 1;
                let a_min = (lambda.len() - lambda.common_parts(mu)) as u32;
                let l = lhs.coeff(mu);
                let r = rhs.coeff(mu);
                let below = l.min_hbar().is_some_and(|h| h < 1 + a_min);
                let lead = l.hbar_coefficient(1 + a_min);
                let want = r.hbar_coefficient(a_min);
                if below || lead != want {
                    return Err(Error::Mismatch {
                        partition: lambda.clone(),
                        output: mu.clone(),
                        lhs: l.to_string(),
                        rhs: r.to_string(),
                    });
                }
            }
        }
    }
    Ok(ConsistencyReport {
        mmax,
        sectors,
        comparisons,
        status: "pass".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::wang_hamiltonian;

    fn u(s: u32) -> DiffPoly {
        DiffPoly::u(s)
    }

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec())
    }

    fn p0_poly(coeffs: &[(u32, u32, Scalar)]) -> SectorScalar {
        let mut s = SectorScalar::zero();
        for (h, p, c) in coeffs {
            s.add_term(*h, *p, c.clone());
        }
        s
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|m| partitions(m).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(part(&[1, 3, 1]).parts(), &[3, 1, 1]);
        assert_eq!(part(&[3, 1, 1]).common_parts(&part(&[1, 2])), 1);
    }

    #[test]
    fn h1_on_vacuum_and_one() {
        let h1 = wang_hamiltonian(1).unwrap();
        let out = apply_quantized(&h1.density, &FockVector::vacuum());
        let mut want = FockVector::zero();
        want.add(
            Partition::vacuum(),
            SectorScalar::monomial(Scalar::from_ratio(1, 6), 0, 3),
        );
        assert_eq!(out, want);

        let out = apply_quantized(&h1.density, &FockVector::basis(part(&[1])));
        let mut want = FockVector::zero();
        want.add(
            part(&[1]),
            p0_poly(&[(0, 3, Scalar::from_ratio(1, 6)), (1, 1, Scalar::i())]),
        );
        assert_eq!(out, want);
    }

    #[test]
    fn h0_counts_momentum() {
        let h0 = wang_hamiltonian(0).unwrap();
        for lambda in partitions(4) {
            let out = apply_quantized(&h0.density, &FockVector::basis(lambda.clone()));
            let mut want = FockVector::zero();
            want.add(
                lambda,
                p0_poly(&[
                    (0, 2, Scalar::from_ratio(1, 2)),
                    (1, 0, Scalar::i().scale_int(4)),
                ]),
            );
            assert_eq!(out, want);
        }
    }

    #[test]
    fn total_derivatives_act_as_zero() {
        let g = &u(0).pow(2) * &u(1) + &u(0) * &u(2);
        for m in 0..=4 {
            for lambda in partitions(m) {
                assert!(apply_quantized(&g.dx(), &FockVector::basis(lambda)).is_zero());
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let h0 = wang_hamiltonian(0).unwrap();
        let h1 = wang_hamiltonian(1).unwrap();
        let one = FockVector::basis(part(&[1]));
        assert!(commutator_apply(&h1.density, &h1.density, &one).is_zero());
        assert!(commutator_apply(&h0.density, &h1.density, &one).is_zero());
        // u_0 quantizes to the central p_0
        let g = &u(0).pow(3) + &(&u(1) * &u(1));
        for lambda in partitions(3) {
            assert!(commutator_apply(&u(0), &g, &FockVector::basis(lambda)).is_zero());
        }
    }

    #[test]
    fn check_commute_small() {
        let cache = HamiltonianCache::in_memory();
        let r = check_commute(&cache, 1, 2, 4).unwrap();
        assert!(r.passed());
        assert_eq!(r.pairs[0].sectors, 1 + 1 + 2 + 3 + 5);
        assert!(check_commute(&cache, -1, 3, 4).unwrap().passed());
        assert!(check_commute(&cache, 0, 3, 4).unwrap().passed());
    }

    #[test]
    fn wrong_sign_is_detected() {
        // flipping hbar -> -hbar in H_2 breaks commutation with H_1
        let h1 = wang_hamiltonian(1).unwrap();
        let h2 = wang_hamiltonian(2).unwrap();
        let flipped = DiffPoly::from_terms(h2.density.terms().map(|(m, c)| {
            let sign = if m.hbar() % 2 == 1 {
                -Scalar::one()
            } else {
                Scalar::one()
            };
            (m.clone(), c * &sign)
        }));
        let c = commutator_apply(&h1.density, &flipped, &FockVector::basis(part(&[2])));
        assert!(!c.is_zero());
    }

    #[test]
    fn classical_consistency_examples() {
        let q = Scalar::from_ratio;
        let f = u(0).pow(3).scale(&q(1, 6));
        let g = u(0).pow(4).scale(&q(1, 24));
        assert!(classical_consistency(&f, &g, 4).is_ok());
        assert!(classical_consistency(&u(0).pow(3), &u(1).pow(2), 4).is_ok());
        assert!(classical_consistency(&f, &f, 3).is_ok());
        assert!(classical_consistency(&DiffPoly::hbar(), &f, 2).is_err());
    }

    #[test]
    fn report_json_shape() {
        let cache = HamiltonianCache::in_memory();
        let r = check_commute(&cache, 1, 1, 3).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["pairs"][0]["status"], "pass");
        assert_eq!(v["pairs"][0]["d1"], 1);
        assert!(v["witness"].is_null());
    }
}
