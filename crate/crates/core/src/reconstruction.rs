//! Rebuild a quantum Hamiltonian from its classical part and the single
//! requirement that it commute with `∫H_1`.
//!
//! The candidate is
//!
//! ```text
//! Q = u^{d+2}/(d+2)! + sum_{g=1}^{G} hbar^g * (combination of a basis of grade 2g, weight d+2),
//! ```
//!
//! and every matrix element of `[Q, H_1]` on a Fock sector is an affine
//! function of the unknown coefficients. Sectors are added until the
//! linear part has trivial kernel, which is also the uniqueness witness:
//! a candidate with vanishing classical part that commutes with `H_1`
//! must vanish.
//!
//! When `G` stops short of the last nonempty block, only matrix elements
//! the missing blocks cannot reach are imposed: a term `hbar^g Q_g`
//! enters `[Q, H]` on `λ -> μ` no earlier than `hbar^{g + 1 + a_min}`,
//! with `a_min = len(λ) - |λ ∩ μ|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::fock::{commutator_with, partitions, FockVector, Partition, QuantizedOperator};
use crate::functional::{functional_basis, normal_form, to_functional, LocalFunctional};
use crate::hierarchy::{classical_density, HamiltonianCache};
use crate::linalg::{solution_from_rref, RowSpace, Solution};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct AnsatzBlock {
    pub g: u32,
    pub basis: Vec<LocalFunctional>,
}

#[derive(Clone, Debug)]
pub struct Ansatz {
    pub d: i64,
    pub order: u32,
    pub classical: DiffPoly,
    pub blocks: Vec<AnsatzBlock>,
}

impl Ansatz {
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.basis.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.basis.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The density multiplying each unknown, `hbar^g * basis element`.
    pub fn unknown_densities(&self) -> Vec<DiffPoly> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let h = DiffPoly::hbar().pow(b.g);
            for f in &b.basis {
                out.push(&h * f.rep());
            }
        }
        out
    }

    /// Highest relative hbar order that is exact for the truncated
    /// candidate, or `None` when no nonzero block was left out.
    pub fn cutoff(&self) -> Option<u32> {
        let top = (self.d + 1).max(0) / 2;
        let truncated =
            (self.order as i64 + 1..=top).any(|g| !functional_basis(2 * g, self.d + 2).is_empty());
        truncated.then_some(self.order + 1)
    }

    pub fn candidate(&self, x: &[Scalar]) -> DiffPoly {
        let mut q = self.classical.clone();
        for (p, c) in self.unknown_densities().iter().zip(x) {
            q = &q + &p.scale(c);
        }
        q
    }
}

pub fn build_ansatz(d: i64, order: u32) -> Result<Ansatz> {
    let classical = classical_density(d)?;
    let blocks = (1..=order)
        .map(|g| AnsatzBlock {
            g,
            basis: functional_basis(2 * g as i64, d + 2),
        })
        .collect();
    Ok(Ansatz {
        d,
        order,
        classical,
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelStep {
    pub mmax: u32,
    pub rows: usize,
    pub nullity: usize,
}

/// Machine-readable record of one reconstruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub d: i64,
    pub order: u32,
    pub ansatz_dims: Vec<usize>,
    pub ansatz_basis: Vec<DiffPoly>,
    pub mmax: u32,
    pub kernel_trace: Vec<KernelStep>,
    pub homogeneous_kernel_dim: usize,
    pub hbar_cutoff: Option<u32>,
    pub reverified_up_to: u32,
    pub coefficients: Vec<Scalar>,
    pub functional: DiffPoly,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub functional: LocalFunctional,
    pub certificate: Certificate,
}

/// Accumulates constraint rows sector by sector.
struct System<'a> {
    ansatz: &'a Ansatz,
    h1: &'a DiffPoly,
    space: RowSpace,
    rows: usize,
}

impl<'a> System<'a> {
    fn new(ansatz: &'a Ansatz, h1: &'a DiffPoly) -> Self {
        let n = ansatz.len();
        System {
            ansatz,
            h1,
            space: RowSpace::new(n + 1),
            rows: 0,
        }
    }

    fn add_sector(&mut self, m: u32) {
        let n = self.ansatz.len();
        let classical_op = QuantizedOperator::new(&self.ansatz.classical, m);
        let unknown_ops: Vec<QuantizedOperator> = self
            .ansatz
            .unknown_densities()
            .iter()
            .map(|p| QuantizedOperator::new(p, m))
            .collect();
        let h1_op = QuantizedOperator::new(self.h1, m);
        let cutoff = self.ansatz.cutoff();
        let sector_rows: Vec<Vec<Vec<Scalar>>> = partitions(m)
            .into_par_iter()
            .map(|lambda| {
                let v = FockVector::basis(lambda.clone());
                let (c0, _) = commutator_with(&classical_op, &h1_op, &v);
                let cs: Vec<FockVector> = unknown_ops
                    .iter()
                    .map(|op| commutator_with(op, &h1_op, &v).0)
                    .collect();
                let mut keys: Vec<(Partition, u32, u32)> = Vec::new();
                for vec in std::iter::once(&c0).chain(cs.iter()) {
                    for (p, s) in vec.terms() {
                        for (&(h, q), _) in s.terms() {
                            if within_cutoff(&lambda, p, h, cutoff) {
                                keys.push((p.clone(), h, q));
                            }
                        }
                    }
                }
                keys.sort();
                keys.dedup();
                keys.into_iter()
                    .map(|(p, h, q)| {
                        let mut row: Vec<Scalar> =
                            cs.iter().map(|c| c.coeff(&p).coeff(h, q)).collect();
                        row.push(-c0.coeff(&p).coeff(h, q));
                        row
                    })
                    .collect()
            })
            .collect();
        for rows in sector_rows {
            for row in rows {
                debug_assert_eq!(row.len(), n + 1);
                self.rows += 1;
                self.space.insert(row);
            }
        }
    }

    /// Dimension of the kernel of the linear part.
    fn nullity(&self) -> usize {
        let n = self.ansatz.len();
        n - self.space.rref().pivots.iter().filter(|&&p| p < n).count()
    }

    fn solution(&self) -> Solution {
        solution_from_rref(self.space.rref(), self.ansatz.len())
    }
}

fn within_cutoff(lambda: &Partition, mu: &Partition, hbar: u32, cutoff: Option<u32>) -> bool {
    match cutoff {
        None => true,
        Some(c) => hbar <= c + (lambda.len() - lambda.common_parts(mu)) as u32,
    }
}

/// First momentum in `range` on which `[q, h]` does not vanish (up to
/// `cutoff`).
fn commutes_on(
    q: &DiffPoly,
    h: &DiffPoly,
    range: std::ops::RangeInclusive<u32>,
    cutoff: Option<u32>,
) -> Option<u32> {
    for m in range {
        let qo = QuantizedOperator::new(q, m);
        let ho = QuantizedOperator::new(h, m);
        let bad = partitions(m).into_par_iter().any(|lambda| {
            let c = commutator_with(&qo, &ho, &FockVector::basis(lambda.clone())).0;
            let hit = c.terms().any(|(mu, s)| {
                s.terms()
                    .any(|(&(hb, _), _)| within_cutoff(&lambda, mu, hb, cutoff))
            });
            hit
        });
        if bad {
            return Some(m);
        }
    }
    None
}

fn finish(
    ansatz: &Ansatz,
    x: Vec<Scalar>,
    h1: &DiffPoly,
    mmax: u32,
    trace: Vec<KernelStep>,
    nullity: usize,
) -> Result<Reconstruction> {
    let q = ansatz.candidate(&x);
    if let Some(m) = commutes_on(&q, h1, 0..=mmax + 2, ansatz.cutoff()) {
        return Err(Error::Reverification {
            d: ansatz.d,
            momentum: m,
        });
    }
    let certificate = Certificate {
        d: ansatz.d,
        order: ansatz.order,
        ansatz_dims: ansatz.dims(),
        ansatz_basis: ansatz
            .blocks
            .iter()
            .flat_map(|b| b.basis.iter().map(|f| f.rep().clone()))
            .collect(),
        mmax,
        kernel_trace: trace,
        homogeneous_kernel_dim: nullity,
        hbar_cutoff: ansatz.cutoff(),
        reverified_up_to: mmax + 2,
        coefficients: x,
        functional: normal_form(&q),
    };
    Ok(Reconstruction {
        functional: to_functional(&q),
        certificate,
    })
}

/// Solve with all sectors of momentum `<= mmax`.
pub fn reconstruct(
    cache: &HamiltonianCache,
    d: i64,
    order: u32,
    mmax: u32,
) -> Result<Reconstruction> {
    let ansatz = build_ansatz(d, order)?;
    let h1 = cache.get(1)?;
    let mut sys = System::new(&ansatz, &h1.density);
    let mut trace = Vec::new();
    for m in 0..=mmax {
        sys.add_sector(m);
        trace.push(KernelStep {
            mmax: m,
            rows: sys.rows,
            nullity: sys.nullity(),
        });
    }
    match sys.solution() {
        Solution::Inconsistent => Err(Error::Inconsistent { d, mmax }),
        Solution::Solved { nullity, .. } if nullity > 0 => {
            Err(Error::Underdetermined { d, mmax, nullity })
        }
        Solution::Solved { x, nullity } => finish(&ansatz, x, &h1.density, mmax, trace, nullity),
    }
}

/// Start at `d + 2G + 1` and add sectors until the solution is unique.
pub fn reconstruct_auto(cache: &HamiltonianCache, d: i64, order: u32) -> Result<Reconstruction> {
    let start = (d + 2 * order as i64 + 1).max(0) as u32;
    let limit = start + 6;
    let ansatz = build_ansatz(d, order)?;
    let h1 = cache.get(1)?;
    let mut sys = System::new(&ansatz, &h1.density);
    let mut trace: Vec<KernelStep> = Vec::new();
    for m in 0..=limit {
        sys.add_sector(m);
        let solution = sys.solution();
        let nullity = match &solution {
            Solution::Inconsistent => return Err(Error::Inconsistent { d, mmax: m }),
            Solution::Solved { nullity, .. } => *nullity,
        };
        trace.push(KernelStep {
            mmax: m,
            rows: sys.rows,
            nullity,
        });
        if m >= start && nullity == 0 {
            let Solution::Solved { x, .. } = solution else {
                unreachable!()
            };
            return finish(&ansatz, x, &h1.density, m, trace, nullity);
        }
    }
    let nullity = trace.last().map(|s| s.nullity).unwrap_or(0);
    Err(Error::Underdetermined {
        d,
        mmax: limit,
        nullity,
    })
}

/// The reconstructed functional equals `∫H_d` truncated at `hbar^G`.
pub fn compare_with_wang(cache: &HamiltonianCache, rec: &Reconstruction) -> Result<bool> {
    let cert = &rec.certificate;
    let wang = cache.get(cert.d)?.density.truncate_hbar(cert.order);
    Ok(rec.functional == to_functional(&wang))
}

/// Commutation of a reconstructed Hamiltonian with `H_{d'}` for each `d'`
/// in `others`, on momenta `<= mmax`; returns the first failing `(d', m)`.
pub fn cross_check(
    cache: &HamiltonianCache,
    rec: &Reconstruction,
    others: &[i64],
    mmax: u32,
) -> Result<Option<(i64, u32)>> {
    let q = rec.functional.rep();
    for &dp in others {
        let h = cache.get(dp)?;
        if let Some(m) = commutes_on(q, &h.density, 0..=mmax, rec.certificate.hbar_cutoff) {
            return Ok(Some((dp, m)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ansatz_dimensions() {
        let a = build_ansatz(2, 1).unwrap();
        assert_eq!(a.dims(), vec![1]);
        assert_eq!(a.blocks[0].basis[0].rep(), &DiffPoly::u(1).pow(2));
        assert_eq!(build_ansatz(1, 1).unwrap().dims(), vec![0]);
        assert_eq!(build_ansatz(-1, 1).unwrap().dims(), vec![0]);
        assert_eq!(build_ansatz(3, 2).unwrap().dims(), vec![1, 0]);
    }

    #[test]
    fn reconstruct_d2() {
        let cache = HamiltonianCache::in_memory();
        let rec = reconstruct(&cache, 2, 1, 5).unwrap();
        assert_eq!(rec.certificate.homogeneous_kernel_dim, 0);
        assert!(compare_with_wang(&cache, &rec).unwrap());
        // ∫(u^4/24 + i*hbar*u1^2/24)
        let q = Scalar::from_ratio;
        let want = DiffPoly::u(0).pow(4).scale(&q(1, 24))
            + (&DiffPoly::hbar() * &DiffPoly::u(1).pow(2)).scale(&(&Scalar::i() * &q(1, 24)));
        assert_eq!(rec.certificate.functional, want);
    }

    #[test]
    fn degenerate_cases() {
        let cache = HamiltonianCache::in_memory();
        for d in -1..=1 {
            let rec = reconstruct_auto(&cache, d, 2).unwrap();
            assert!(compare_with_wang(&cache, &rec).unwrap());
            assert_eq!(
                rec.functional,
                to_functional(&classical_density(d).unwrap())
            );
        }
    }

    #[test]
    fn too_few_sectors_is_underdetermined() {
        let cache = HamiltonianCache::in_memory();
        assert!(matches!(
            reconstruct(&cache, 2, 1, 0),
            Err(Error::Underdetermined { .. })
        ));
    }
}
