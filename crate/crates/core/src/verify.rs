//! Batch verification suite.
//!
//! Every check is exact. The summary carries no timings, so two runs with
//! the same level serialize to identical JSON.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffpoly::{DiffMonomial, DiffPoly};
use crate::error::{Error, Result};
use crate::fock::{check_commute, classical_consistency};
use crate::functional::{jet_multisets, to_functional};
use crate::hierarchy::{
    check_vder_recursion, classical_density, compute_wang_hamiltonian, s_partial_check,
    HamiltonianCache,
};
use crate::intersection::{
    admissible_genera, assemble_polynomial, extract_coeff_table, genus0_check, reassemble_density,
    TableDocument,
};
use crate::reconstruction::{compare_with_wang, cross_check, reconstruct_auto};
use crate::scalar::Scalar;

pub const CLASSICAL_SEED: u64 = 0x5eed_cafe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(Error::Format(format!("unknown level {other:?}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

/// Bounds used by one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scale {
    pub dmax: i64,
    pub commute_dmax: i64,
    pub commute_mmax: u32,
    pub random_pairs: usize,
    pub random_mmax: u32,
    pub reconstruct: Vec<(i64, u32)>,
    pub cross_dmax: i64,
    pub cross_mmax: u32,
}

impl Scale {
    pub fn for_level(level: Level) -> Scale {
        match level {
            Level::Quick => Scale {
                dmax: 3,
                commute_dmax: 3,
                commute_mmax: 5,
                random_pairs: 10,
                random_mmax: 4,
                reconstruct: vec![(1, 2), (2, 1), (3, 1)],
                cross_dmax: 2,
                cross_mmax: 4,
            },
            Level::Full => Scale {
                dmax: 5,
                commute_dmax: 5,
                commute_mmax: 8,
                random_pairs: 20,
                random_mmax: 4,
                reconstruct: vec![(1, 2), (2, 1), (3, 1), (3, 2), (4, 1)],
                cross_dmax: 3,
                cross_mmax: 5,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub level: Level,
    pub engine: String,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "criterion {}: {status} {}: {}\n",
                c.id, c.name, c.detail
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed { "PASS" } else { "FAIL" }
        ));
        out
    }
}

fn outcome(id: u32, name: &str, r: Result<String>) -> CriterionResult {
    let (passed, detail) = match r {
        Ok(detail) => (true, detail),
        Err(e) => (false, e.to_string()),
    };
    CriterionResult {
        id,
        name: name.into(),
        passed,
        detail,
    }
}

fn fail(msg: String) -> Error {
    Error::Format(msg)
}

pub fn expansion(cache: &HamiltonianCache, dmax: i64) -> Result<String> {
    for d in -1..=dmax {
        let h = cache.get(d)?;
        if !h.check_structure() {
            return Err(fail(format!("H_{d} fails grading or classical limit")));
        }
    }
    Ok(format!(
        "H_d for -1 <= d <= {dmax}: grade 0, weight d+2, limit u^(d+2)/(d+2)!"
    ))
}

pub fn first_hamiltonian(cache: &HamiltonianCache) -> Result<String> {
    let h = cache.get(1)?;
    let cubic = to_functional(&classical_density(1)?);
    if h.functional != cubic {
        return Err(fail("∫H_1 differs from ∫u^3/6".into()));
    }
    Ok("∫H_1 = ∫u^3/6".into())
}

pub fn recursion(dmax: i64) -> Result<String> {
    for d in 0..=dmax {
        if !check_vder_recursion(d)? {
            return Err(fail(format!("δH_{d}/δu != H_{}", d - 1)));
        }
        for s in 0..=d as usize {
            if !s_partial_check(d as usize, s) {
                return Err(fail(format!("∂S_{}/∂u_{s} pattern fails", d + 1)));
            }
        }
    }
    Ok(format!(
        "variational recursion and S-derivatives for d <= {dmax}"
    ))
}

pub fn integrability(cache: &HamiltonianCache, dmax: i64, mmax: u32) -> Result<String> {
    let mut pairs = 0;
    let mut sectors = 0;
    for d1 in -1..=dmax {
        for d2 in d1 + 1..=dmax {
            let r = check_commute(cache, d1, d2, mmax)?;
            pairs += 1;
            sectors += r.pairs.iter().map(|p| p.sectors).sum::<usize>();
        }
    }
    Ok(format!(
        "{pairs} pairs with -1 <= d1 < d2 <= {dmax}, {sectors} sectors up to momentum {mmax}"
    ))
}

/// A random hbar-free density: one to three monomials of weight `<= 6`
/// with small rational coefficients.
pub fn random_density<R: Rng>(rng: &mut R) -> DiffPoly {
    let mut pool: Vec<DiffMonomial> = Vec::new();
    for factors in 1..=6usize {
        for jets in 0..=(6 - factors) as u32 {
            for js in jet_multisets(factors, jets) {
                pool.push(DiffMonomial::from_jets(&js, 0));
            }
        }
    }
    let k = rng.gen_range(1..=3);
    let mut out = DiffPoly::zero();
    for m in pool.choose_multiple(rng, k) {
        let mut num = 0;
        while num == 0 {
            num = rng.gen_range(-5..=5);
        }
        let den = rng.gen_range(1..=4);
        out.add_term(m.clone(), Scalar::from_ratio(num, den));
    }
    out
}

pub fn classical_limit(count: usize, mmax: u32) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(CLASSICAL_SEED);
    let mut comparisons = 0;
    for i in 0..count {
        let f = random_density(&mut rng);
        let g = random_density(&mut rng);
        let r = classical_consistency(&f, &g, mmax)
            .map_err(|e| fail(format!("pair {i} ({f}, {g}): {e}")))?;
        comparisons += r.comparisons;
    }
    Ok(format!(
        "{count} random pairs, {comparisons} matrix elements up to momentum {mmax}"
    ))
}

pub fn reconstruction(cache: &HamiltonianCache, scale: &Scale) -> Result<String> {
    let mut parts = Vec::new();
    for &(d, g) in &scale.reconstruct {
        let rec = reconstruct_auto(cache, d, g)?;
        let cert = &rec.certificate;
        if cert.homogeneous_kernel_dim != 0 {
            return Err(fail(format!(
                "({d},{g}): kernel {}",
                cert.homogeneous_kernel_dim
            )));
        }
        if !compare_with_wang(cache, &rec)? {
            return Err(fail(format!("({d},{g}): differs from H_{d}")));
        }
        let others: Vec<i64> = (-1..=scale.cross_dmax).collect();
        if let Some((dp, m)) = cross_check(cache, &rec, &others, scale.cross_mmax)? {
            return Err(fail(format!(
                "({d},{g}): fails to commute with H_{dp} at momentum {m}"
            )));
        }
        parts.push(format!("({d},{g}) at mmax {}", cert.mmax));
    }
    Ok(format!("unique and equal to H_d: {}", parts.join(", ")))
}

pub fn intersection(cache: &HamiltonianCache, dmax: i64) -> Result<String> {
    let mut count = 0;
    for d in -1..=dmax {
        if !genus0_check(cache, d)? {
            return Err(fail(format!("genus 0 polynomial for d = {d} is not 1")));
        }
        for g in admissible_genera(d) {
            let p = assemble_polynomial(cache, d, g)?;
            if !p.check_structure() {
                return Err(fail(format!(
                    "d = {d}, g = {g}: not symmetric of degree {}",
                    2 * g
                )));
            }
            count += 1;
        }
        let table = extract_coeff_table(cache, d)?;
        if reassemble_density(&table) != cache.get(d)?.density {
            return Err(fail(format!("round trip fails for d = {d}")));
        }
    }
    Ok(format!(
        "{count} polynomials for d <= {dmax}; round trips exact"
    ))
}

pub fn infrastructure(cache: &HamiltonianCache, dmax: i64) -> Result<String> {
    for d in -1..=dmax {
        let h = cache.get(d)?;
        if compute_wang_hamiltonian(d)?.density != h.density {
            return Err(fail(format!(
                "cached H_{d} differs from a fresh computation"
            )));
        }
        let text = serde_json::to_string(&h.density)?;
        let back: DiffPoly = serde_json::from_str(&text)?;
        if back != h.density || serde_json::to_string(&back)? != text {
            return Err(fail(format!("DiffPoly JSON round trip fails for H_{d}")));
        }
        let doc = TableDocument::from(&extract_coeff_table(cache, d)?);
        let text = serde_json::to_string(&doc)?;
        let back: TableDocument = serde_json::from_str(&text)?;
        if back != doc {
            return Err(fail(format!("table JSON round trip fails for d = {d}")));
        }
    }
    Ok(format!(
        "JSON round trips and cache transparency for d <= {dmax}"
    ))
}

pub fn run(level: Level, cache: &HamiltonianCache) -> Summary {
    let s = Scale::for_level(level);
    let criteria = vec![
        outcome(1, "expansion", expansion(cache, 5)),
        outcome(2, "first Hamiltonian", first_hamiltonian(cache)),
        outcome(3, "variational recursion", recursion(5)),
        outcome(
            4,
            "integrability",
            integrability(cache, s.commute_dmax, s.commute_mmax),
        ),
        outcome(
            5,
            "classical limit",
            classical_limit(s.random_pairs, s.random_mmax),
        ),
        outcome(6, "reconstruction", reconstruction(cache, &s)),
        outcome(7, "intersection numbers", intersection(cache, s.dmax)),
        outcome(8, "infrastructure", infrastructure(cache, s.dmax)),
    ];
    let passed = criteria.iter().all(|c| c.passed);
    Summary {
        level,
        engine: crate::hierarchy::ENGINE_VERSION.into(),
        criteria,
        passed,
    }
}
