//! Predicted psi-class integrals over strata of meromorphic differentials.
//!
//! The densities expand as
//!
//! ```text
//! H_d = sum_{g,n} (-i*hbar)^g / n! * sum_{s_1+...+s_n = 2g} u_{s_1}...u_{s_n} * K_g(s_1, ..., s_n),
//! ```
//!
//! where `K_g(s)` is the coefficient of `m_1^{s_1 falling} ... m_n^{s_n falling}`
//! in `∫_{H_g(-1, m_1, ..., m_n, 2g-1-sum m_i)} psi_0^{d+1}`. Reading the
//! Wang densities backwards gives those coefficients: a monomial
//! `c (-i*hbar)^g prod_j u_j^{a_j}` is hit by `n!/prod a_j!` ordered tuples,
//! so `K = c * prod_j a_j!`. The integrals are not computed geometrically;
//! every polynomial here is a prediction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::diffpoly::{DiffMonomial, DiffPoly};
use crate::error::{Error, Result};
use crate::hierarchy::{factorial, inv_factorial, HamiltonianCache};
use crate::scalar::Scalar;

/// Polynomial in `n` variables, keyed by exponent vectors. Whether the
/// exponents mean powers or falling factorials is up to the caller.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Scalar>,
}

impl MPoly {
    pub fn new(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Scalar) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exps.clone()).or_insert_with(Scalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Homogeneous of the given degree (vacuously true for zero).
    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == degree)
    }

    /// Part of exact total degree `degree`.
    pub fn homogeneous_part(&self, degree: u32) -> MPoly {
        let mut out = MPoly::new(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == degree {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn permuted(&self, perm: &[usize]) -> MPoly {
        let mut out = MPoly::new(self.nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; self.nvars];
            for (i, &p) in perm.iter().enumerate() {
                f[p] = e[i];
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Invariant under swapping each adjacent pair of variables, hence under
    /// the whole symmetric group.
    pub fn is_symmetric(&self) -> bool {
        (0..self.nvars.saturating_sub(1)).all(|i| {
            let mut perm: Vec<usize> = (0..self.nvars).collect();
            perm.swap(i, i + 1);
            self.permuted(&perm) == *self
        })
    }
}

/// Signed Stirling numbers of the first kind, `x^{n falling} = sum_k s(n,k) x^k`.
pub fn stirling_first(n: u32) -> Vec<Vec<BigInt>> {
    let n = n as usize;
    let mut t = vec![vec![BigInt::zero(); n + 1]; n + 1];
    t[0][0] = BigInt::one();
    for i in 1..=n {
        for k in 1..=i {
            t[i][k] = &t[i - 1][k - 1] - BigInt::from(i - 1) * &t[i - 1][k];
        }
    }
    t
}

/// Stirling numbers of the second kind, `x^n = sum_k S(n,k) x^{k falling}`.
pub fn stirling_second(n: u32) -> Vec<Vec<BigInt>> {
    let n = n as usize;
    let mut t = vec![vec![BigInt::zero(); n + 1]; n + 1];
    t[0][0] = BigInt::one();
    for i in 1..=n {
        for k in 1..=i {
            t[i][k] = &t[i - 1][k - 1] + BigInt::from(k) * &t[i - 1][k];
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    ToFalling,
    ToPower,
}

/// Change of basis between powers and falling factorials, variable by variable.
pub fn falling_convert(p: &MPoly, direction: Basis) -> MPoly {
    let top = p
        .terms
        .keys()
        .flat_map(|e| e.iter().copied())
        .max()
        .unwrap_or(0);
    let table = match direction {
        Basis::ToFalling => stirling_second(top),
        Basis::ToPower => stirling_first(top),
    };
    let mut out = MPoly::new(p.nvars);
    for (exps, c) in &p.terms {
        // expand the product one variable at a time
        let mut partial: Vec<(Vec<u32>, Scalar)> = vec![(Vec::new(), c.clone())];
        for &e in exps {
            let mut next = Vec::new();
            for (prefix, v) in &partial {
                for k in 0..=e {
                    let s = &table[e as usize][k as usize];
                    if s.is_zero() {
                        continue;
                    }
                    let mut ex = prefix.clone();
                    ex.push(k);
                    next.push((ex, v * &Scalar::real(s.clone().into())));
                }
            }
            partial = next;
        }
        for (ex, v) in partial {
            out.add_term(ex, v);
        }
    }
    out
}

/// `K_g(s)` values read off `H_d`, keyed by `(g, sorted s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FallingCoeffTable {
    pub d: i64,
    pub entries: BTreeMap<(u32, Vec<u32>), Scalar>,
}

impl FallingCoeffTable {
    pub fn get(&self, g: u32, s: &[u32]) -> Scalar {
        let mut key = s.to_vec();
        key.sort_unstable();
        self.entries
            .get(&(g, key))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }
}

/// Genera `g` with `n = d + 2 - 2g >= 1`.
pub fn admissible_genera(d: i64) -> Vec<u32> {
    (0..).take_while(|&g| d + 2 - 2 * g as i64 >= 1).collect()
}

pub fn extract_coeff_table(cache: &HamiltonianCache, d: i64) -> Result<FallingCoeffTable> {
    let h = cache.get(d)?;
    table_from_density(d, &h.density)
}

pub fn table_from_density(d: i64, density: &DiffPoly) -> Result<FallingCoeffTable> {
    let mut entries = BTreeMap::new();
    for (m, c) in density.terms() {
        let g = m.hbar();
        let n = m.degree() as usize;
        if n as i64 != d + 2 - 2 * g as i64 || m.jet_weight() != 2 * g {
            return Err(Error::WeightMismatch {
                d,
                monomial: m.to_string(),
                n,
                g,
            });
        }
        let mult = m
            .uexp()
            .values()
            .fold(BigInt::one(), |acc, &a| acc * factorial(a));
        let k = &(c / &Scalar::minus_i_pow(g)) * &Scalar::real(mult.into());
        entries.insert((g, m.jets()), k);
    }
    Ok(FallingCoeffTable { d, entries })
}

/// Ordered tuples of `n` non-negative integers summing to `total`.
pub fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, total: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for s in 0..=total {
            cur.push(s);
            rec(n - 1, total - s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

/// Evaluate the ordered-tuple sum with the tabulated `K` values.
pub fn reassemble_density(table: &FallingCoeffTable) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for g in admissible_genera(table.d) {
        let n = (table.d + 2 - 2 * g as i64) as usize;
        let pref = &Scalar::minus_i_pow(g) * &inv_factorial(n as u32);
        for s in compositions(n, 2 * g) {
            let k = table.get(g, &s);
            if k.is_zero() {
                continue;
            }
            out.add_term(DiffMonomial::from_jets(&s, g), &pref * &k);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrataPolynomial {
    pub d: i64,
    pub g: u32,
    pub n: usize,
    /// Coefficients in the falling-factorial basis.
    pub falling: MPoly,
    /// The same polynomial in the power basis.
    pub power: MPoly,
}

pub fn assemble_polynomial(cache: &HamiltonianCache, d: i64, g: u32) -> Result<StrataPolynomial> {
    let n = d + 2 - 2 * g as i64;
    if n < 1 {
        return Err(Error::InvalidIndex(format!(
            "no stratum for d = {d}, g = {g}: n = d + 2 - 2g = {n} must be at least 1"
        )));
    }
    let table = extract_coeff_table(cache, d)?;
    Ok(polynomial_from_table(&table, g))
}

pub fn polynomial_from_table(table: &FallingCoeffTable, g: u32) -> StrataPolynomial {
    let n = (table.d + 2 - 2 * g as i64) as usize;
    let mut falling = MPoly::new(n);
    for s in compositions(n, 2 * g) {
        falling.add_term(s.clone(), table.get(g, &s));
    }
    let power = falling_convert(&falling, Basis::ToPower);
    StrataPolynomial {
        d: table.d,
        g,
        n,
        falling,
        power,
    }
}

impl StrataPolynomial {
    /// Symmetric, falling-homogeneous of degree 2g, power degree at most 2g
    /// with the same top-degree part.
    pub fn check_structure(&self) -> bool {
        let deg = 2 * self.g;
        self.falling.is_symmetric()
            && self.power.is_symmetric()
            && self.falling.is_homogeneous(deg)
            && self.power.total_degree().unwrap_or(0) <= deg
            && self.power.homogeneous_part(deg) == self.falling
            && falling_convert(&self.power, Basis::ToFalling) == self.falling
    }

    pub fn power_text(&self) -> String {
        render(&self.power, self.n, Style::Power)
    }

    pub fn falling_text(&self) -> String {
        render(&self.falling, self.n, Style::Falling)
    }

    pub fn power_latex(&self) -> String {
        render(&self.power, self.n, Style::PowerLatex)
    }

    pub fn falling_latex(&self) -> String {
        render(&self.falling, self.n, Style::FallingLatex)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let falling: serde_json::Map<String, serde_json::Value> = self
            .falling
            .terms
            .iter()
            .map(|(e, c)| {
                let key = format!(
                    "({})",
                    e.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                (key, serde_json::Value::String(scalar_string(c)))
            })
            .collect();
        serde_json::json!({
            "d": self.d,
            "g": self.g,
            "n": self.n,
            "falling": falling,
            "power": self.power_text(),
        })
    }

    pub fn latex_row(&self) -> String {
        format!(
            "{} & {} & {} & ${}$ & ${}$ \\\\",
            self.d,
            self.g,
            self.n,
            self.falling_latex(),
            self.power_latex()
        )
    }
}

fn scalar_string(c: &Scalar) -> String {
    if c.is_real() {
        c.re.to_string()
    } else {
        c.to_string()
    }
}

/// `true` iff the genus-0 polynomial is the constant 1.
pub fn genus0_check(cache: &HamiltonianCache, d: i64) -> Result<bool> {
    let p = assemble_polynomial(cache, d, 0)?;
    let mut one = MPoly::new(p.n);
    one.add_term(vec![0; p.n], Scalar::one());
    Ok(p.power == one && p.falling == one)
}

#[derive(Clone, Copy)]
enum Style {
    Power,
    Falling,
    PowerLatex,
    FallingLatex,
}

fn var_name(i: usize, n: usize, latex: bool) -> String {
    match (n, latex) {
        (1, _) => "m".into(),
        (_, false) => format!("m{}", i + 1),
        (_, true) => format!("m_{{{}}}", i + 1),
    }
}

fn render_factor(var: &str, e: u32, style: Style) -> String {
    match style {
        Style::Power => {
            if e == 1 {
                var.to_string()
            } else {
                format!("{var}^{e}")
            }
        }
        Style::PowerLatex => {
            if e == 1 {
                var.to_string()
            } else {
                format!("{var}^{{{e}}}")
            }
        }
        Style::Falling => {
            let mut s = var.to_string();
            if e > 1 {
                s.push('(');
                let tail: Vec<String> = (1..e).map(|k| format!("{var}-{k}")).collect();
                s.push_str(&tail.join(")("));
                s.push(')');
            }
            s
        }
        Style::FallingLatex => {
            if e == 1 {
                var.to_string()
            } else {
                format!("{var}^{{\\underline{{{e}}}}}")
            }
        }
    }
}

/// Display order: constant, then single-variable terms by variable and
/// descending degree, then mixed terms.
fn display_key(e: &[u32]) -> (usize, Vec<usize>, Vec<i64>) {
    let support: Vec<usize> = (0..e.len()).filter(|&i| e[i] > 0).collect();
    let neg: Vec<i64> = support.iter().map(|&i| -(e[i] as i64)).collect();
    (support.len(), support, neg)
}

fn render(p: &MPoly, n: usize, style: Style) -> String {
    let latex = matches!(style, Style::PowerLatex | Style::FallingLatex);
    if p.terms.is_empty() {
        return "0".into();
    }
    if p.terms.values().any(|c| !c.is_real()) {
        // not expected for strata polynomials; fall back to explicit coefficients
        let parts: Vec<String> = p
            .terms
            .iter()
            .map(|(e, c)| format!("({c})*{}", monomial_body(e, n, style, latex)))
            .collect();
        return parts.join("+");
    }
    let lcm = p
        .terms
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.re.denom()));
    let mut keys: Vec<&Vec<u32>> = p.terms.keys().collect();
    keys.sort_by_key(|e| display_key(e));
    let mut body = String::new();
    for (idx, e) in keys.iter().enumerate() {
        let c = &p.terms[*e].re;
        let num = (c * num_rational::BigRational::from_integer(lcm.clone())).to_integer();
        let neg = num.is_negative();
        let mag = num.abs();
        if neg {
            body.push('-');
        } else if idx > 0 {
            body.push('+');
        }
        let mono = monomial_body(e, n, style, latex);
        match (mono.is_empty(), mag.is_one()) {
            (true, _) => body.push_str(&mag.to_string()),
            (false, true) => body.push_str(&mono),
            (false, false) => {
                body.push_str(&mag.to_string());
                body.push_str(if latex { " " } else { "*" });
                body.push_str(&mono);
            }
        }
    }
    if lcm.is_one() {
        return body;
    }
    if latex {
        return format!("\\frac{{{body}}}{{{lcm}}}");
    }
    if keys.len() == 1 && !body.starts_with('-') {
        format!("{body}/{lcm}")
    } else {
        format!("({body})/{lcm}")
    }
}

fn monomial_body(e: &[u32], n: usize, style: Style, latex: bool) -> String {
    let factors: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| render_factor(&var_name(i, n, latex), x, style))
        .collect();
    factors.join(if latex { " " } else { "*" })
}

/// Serializable form of a coefficient table, keyed `"g:(s1,...,sn)"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TableDocument {
    pub d: i64,
    pub entries: BTreeMap<String, String>,
}

impl From<&FallingCoeffTable> for TableDocument {
    fn from(t: &FallingCoeffTable) -> Self {
        TableDocument {
            d: t.d,
            entries: t
                .entries
                .iter()
                .map(|((g, s), c)| {
                    let s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                    (format!("{g}:({})", s.join(",")), scalar_string(c))
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn single(e: u32) -> MPoly {
        let mut p = MPoly::new(1);
        p.add_term(vec![e], Scalar::one());
        p
    }

    #[test]
    fn falling_examples() {
        let f = falling_convert(&single(2), Basis::ToFalling);
        let mut want = MPoly::new(1);
        want.add_term(vec![2], Scalar::one());
        want.add_term(vec![1], Scalar::one());
        assert_eq!(f, want);

        let p = falling_convert(&single(2), Basis::ToPower);
        let mut want = MPoly::new(1);
        want.add_term(vec![2], Scalar::one());
        want.add_term(vec![1], -Scalar::one());
        assert_eq!(p, want);

        assert_eq!(falling_convert(&single(0), Basis::ToPower), single(0));
    }

    /// Brute-force check of the Stirling tables against m(m-1)...(m-s+1)
    /// evaluated at integer points.
    #[test]
    fn stirling_tables_match_products() {
        let s1 = stirling_first(7);
        let s2 = stirling_second(7);
        for s in 0..=7u32 {
            for m in -3i64..=9 {
                let falling: i64 = (0..s as i64).map(|k| m - k).product();
                let via_powers: BigInt = (0..=s as usize)
                    .map(|k| &s1[s as usize][k] * BigInt::from(m).pow(k as u32))
                    .sum();
                assert_eq!(via_powers, BigInt::from(falling));
                let power = BigInt::from(m).pow(s);
                let via_falling: BigInt = (0..=s as usize)
                    .map(|k| {
                        let ff: i64 = (0..k as i64).map(|j| m - j).product();
                        &s2[s as usize][k] * BigInt::from(ff)
                    })
                    .sum();
                assert_eq!(via_falling, power);
            }
        }
    }

    #[test]
    fn coefficient_tables() {
        let cache = HamiltonianCache::in_memory();
        let t1 = extract_coeff_table(&cache, 1).unwrap();
        assert_eq!(t1.get(1, &[2]), q(1, 12));
        assert_eq!(t1.get(0, &[0, 0, 0]), q(1, 1));
        let t2 = extract_coeff_table(&cache, 2).unwrap();
        assert_eq!(t2.get(1, &[2, 0]), q(1, 12));
        assert_eq!(t2.get(1, &[1, 1]), q(1, 12));
    }

    #[test]
    fn assembled_polynomials() {
        let cache = HamiltonianCache::in_memory();
        let p = assemble_polynomial(&cache, 1, 1).unwrap();
        assert_eq!(p.falling_text(), "m(m-1)/12");
        assert_eq!(p.power_text(), "(m^2-m)/12");
        let p = assemble_polynomial(&cache, 2, 1).unwrap();
        assert_eq!(p.power_text(), "(m1^2-m1+m2^2-m2+m1*m2)/12");
        assert!(p.check_structure());
        let p = assemble_polynomial(&cache, 0, 0).unwrap();
        assert_eq!(p.power_text(), "1");
        assert!(assemble_polynomial(&cache, 1, 2).is_err());
    }

    #[test]
    fn genus_zero() {
        let cache = HamiltonianCache::in_memory();
        for d in -1..=4 {
            assert!(genus0_check(&cache, d).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn weight_mismatch_is_reported() {
        let bad = DiffPoly::u(0).pow(2);
        assert!(matches!(
            table_from_density(2, &bad),
            Err(Error::WeightMismatch { .. })
        ));
    }

    #[test]
    fn json_and_latex() {
        let cache = HamiltonianCache::in_memory();
        let p = assemble_polynomial(&cache, 2, 1).unwrap();
        let v = p.to_json();
        assert_eq!(v["falling"]["(1,1)"], "1/12");
        assert_eq!(v["n"], 2);
        assert_eq!(
            p.latex_row(),
            "2 & 1 & 2 & $\\frac{m_{1}^{\\underline{2}}+m_{2}^{\\underline{2}}+m_{1} m_{2}}{12}$ & $\\frac{m_{1}^{2}-m_{1}+m_{2}^{2}-m_{2}+m_{1} m_{2}}{12}$ \\\\"
        );
    }
}
