//! Differential polynomials: sparse polynomials in the jet variables
//! `u_0, u_1, ...` and `hbar` over the Gaussian rationals.
//!
//! `u_s` stands for the s-th x-derivative of the field, so the total
//! derivative acts by `u_s -> u_{s+1}` and the Leibniz rule.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A monomial `hbar^a * prod u_s^{e_s}`. Exponents are always positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DiffMonomial {
    uexp: BTreeMap<u32, u32>,
    hbar: u32,
}

/// Grade (`deg u_i = i`, `deg hbar = -2`) and weight (`u_j -> j + 1`, `hbar -> 0`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub grade: i64,
    pub weight: i64,
}

impl DiffMonomial {
    pub fn one() -> Self {
        DiffMonomial::default()
    }

    pub fn new(uexp: impl IntoIterator<Item = (u32, u32)>, hbar: u32) -> Self {
        let mut map = BTreeMap::new();
        for (s, e) in uexp {
            if e > 0 {
                *map.entry(s).or_insert(0) += e;
            }
        }
        DiffMonomial { uexp: map, hbar }
    }

    /// Monomial from a list of jet indices, one entry per factor.
    pub fn from_jets(jets: &[u32], hbar: u32) -> Self {
        DiffMonomial::new(jets.iter().map(|&s| (s, 1)), hbar)
    }

    pub fn hbar(&self) -> u32 {
        self.hbar
    }

    pub fn uexp(&self) -> &BTreeMap<u32, u32> {
        &self.uexp
    }

    pub fn exponent(&self, s: u32) -> u32 {
        self.uexp.get(&s).copied().unwrap_or(0)
    }

    /// Number of `u` factors counted with multiplicity.
    pub fn degree(&self) -> u32 {
        self.uexp.values().sum()
    }

    /// `sum_j j * e_j`, the number of x-derivatives.
    pub fn jet_weight(&self) -> u32 {
        self.uexp.iter().map(|(s, e)| s * e).sum()
    }

    pub fn max_jet(&self) -> Option<u32> {
        self.uexp.keys().next_back().copied()
    }

    /// Sorted jet indices with multiplicity, e.g. `u_0^2 u_3 -> [0, 0, 3]`.
    pub fn jets(&self) -> Vec<u32> {
        self.uexp
            .iter()
            .flat_map(|(&s, &e)| std::iter::repeat_n(s, e as usize))
            .collect()
    }

    pub fn bidegree(&self) -> Bidegree {
        let grade = self.jet_weight() as i64 - 2 * self.hbar as i64;
        let weight = self.uexp.iter().map(|(s, e)| ((s + 1) * e) as i64).sum();
        Bidegree { grade, weight }
    }

    pub fn is_constant(&self) -> bool {
        self.uexp.is_empty()
    }

    pub fn without_hbar(&self) -> Self {
        DiffMonomial {
            uexp: self.uexp.clone(),
            hbar: 0,
        }
    }

    pub fn with_hbar(&self, hbar: u32) -> Self {
        DiffMonomial {
            uexp: self.uexp.clone(),
            hbar,
        }
    }

    pub fn mul(&self, other: &DiffMonomial) -> DiffMonomial {
        let mut uexp = self.uexp.clone();
        for (&s, &e) in &other.uexp {
            *uexp.entry(s).or_insert(0) += e;
        }
        DiffMonomial {
            uexp,
            hbar: self.hbar + other.hbar,
        }
    }

    /// Change the exponent of `u_s` by `delta`; the caller keeps it non-negative.
    fn shifted(&self, s: u32, delta: i32) -> DiffMonomial {
        let mut uexp = self.uexp.clone();
        let e = uexp.get(&s).copied().unwrap_or(0) as i32 + delta;
        debug_assert!(e >= 0);
        if e == 0 {
            uexp.remove(&s);
        } else {
            uexp.insert(s, e as u32);
        }
        DiffMonomial {
            uexp,
            hbar: self.hbar,
        }
    }

    /// Text form of the u-part: `u^3`, `u*u2`, `u1^2`; empty for constants.
    pub fn u_string(&self) -> String {
        self.uexp
            .iter()
            .map(|(&s, &e)| {
                let var = if s == 0 {
                    "u".to_string()
                } else {
                    format!("u{s}")
                };
                if e == 1 {
                    var
                } else {
                    format!("{var}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl Ord for DiffMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.hbar
            .cmp(&other.hbar)
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| self.jets().cmp(&other.jets()))
    }
}

impl PartialOrd for DiffMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DiffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = self.u_string();
        match (self.hbar, u.is_empty()) {
            (0, true) => write!(f, "1"),
            (0, false) => write!(f, "{u}"),
            (1, true) => write!(f, "hbar"),
            (h, true) => write!(f, "hbar^{h}"),
            (1, false) => write!(f, "hbar*{u}"),
            (h, false) => write!(f, "hbar^{h}*{u}"),
        }
    }
}

/// An element of `Q(i)[u_0, u_1, ...; hbar]` in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DiffPoly {
    terms: BTreeMap<DiffMonomial, Scalar>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        DiffPoly::term(c, DiffMonomial::one())
    }

    pub fn one() -> Self {
        DiffPoly::constant(Scalar::one())
    }

    pub fn term(c: Scalar, m: DiffMonomial) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(m, c);
        p
    }

    /// The jet variable `u_s`.
    pub fn u(s: u32) -> Self {
        DiffPoly::term(Scalar::one(), DiffMonomial::new([(s, 1)], 0))
    }

    pub fn hbar() -> Self {
        DiffPoly::term(Scalar::one(), DiffMonomial::new([], 1))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (DiffMonomial, Scalar)>) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: DiffMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &DiffMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn max_jet(&self) -> Option<u32> {
        self.terms.keys().filter_map(|m| m.max_jet()).max()
    }

    pub fn max_hbar(&self) -> u32 {
        self.terms.keys().map(|m| m.hbar).max().unwrap_or(0)
    }

    /// The total x-derivative `sum_i u_{i+1} d/du_i`.
    pub fn dx(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (&s, &e) in &m.uexp {
                let next = m.shifted(s, -1).shifted(s + 1, 1);
                out.add_term(next, c.scale_int(e as i64));
            }
        }
        out
    }

    pub fn dx_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.dx();
        }
        p
    }

    /// Formal partial derivative with respect to `u_s`.
    pub fn partial_u(&self, s: u32) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            if e > 0 {
                out.add_term(m.shifted(s, -1), c.scale_int(e as i64));
            }
        }
        out
    }

    /// Euler operator `sum_s (-dx)^s d/du_s`.
    pub fn variational_derivative(&self) -> DiffPoly {
        let Some(top) = self.max_jet() else {
            return DiffPoly::zero();
        };
        let mut out = DiffPoly::zero();
        for s in 0..=top {
            let mut term = self.partial_u(s).dx_n(s);
            if s % 2 == 1 {
                term = -term;
            }
            out = &out + &term;
        }
        out
    }

    /// Common bidegree of all monomials; `None` if inhomogeneous or zero.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(DiffMonomial::bidegree);
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Common weight of all monomials; `None` if mixed or zero.
    pub fn weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.bidegree().weight);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Apply `u_j -> lambda^j u_j` with `lambda^2 = -i*hbar`.
    ///
    /// Every monomial must carry an even number of x-derivatives; the
    /// factor `lambda^{2k}` is then recorded exactly as `(-i)^k hbar^k`.
    pub fn scale_substitute(&self) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let w = m.jet_weight();
            if w % 2 == 1 {
                return Err(Error::OddPower {
                    monomial: m.to_string(),
                    weight: w,
                });
            }
            let k = w / 2;
            out.add_term(m.with_hbar(m.hbar + k), c * &Scalar::minus_i_pow(k));
        }
        Ok(out)
    }

    /// Coefficient of `hbar^a`, as an hbar-free polynomial.
    pub fn hbar_coefficient(&self, a: u32) -> DiffPoly {
        DiffPoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.hbar == a)
                .map(|(m, c)| (m.without_hbar(), c.clone())),
        )
    }

    /// Drop every term with `hbar` exponent above `max`.
    pub fn truncate_hbar(&self, max: u32) -> DiffPoly {
        DiffPoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.hbar <= max)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn at_hbar_zero(&self) -> DiffPoly {
        self.truncate_hbar(0)
    }

    pub fn is_hbar_free(&self) -> bool {
        self.terms.keys().all(|m| m.hbar == 0)
    }

    /// Text rendering with `u, u1, u2, ...` and `hbar`; the factor
    /// `(-i)^g` is grouped with `hbar^g` whenever that leaves a real coefficient.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let (negative, body) = render_term(m, c);
            match (idx, negative) {
                (0, false) => {}
                (0, true) => out.push('-'),
                (_, false) => out.push_str(" + "),
                (_, true) => out.push_str(" - "),
            }
            out.push_str(&body);
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("DiffPoly serializes")
    }
}

/// Returns (is_negative, rendered magnitude).
fn render_term(m: &DiffMonomial, c: &Scalar) -> (bool, String) {
    let g = m.hbar;
    let u = m.u_string();
    let grouped = c / &Scalar::minus_i_pow(g);
    if grouped.is_real() {
        let r = grouped.re;
        let negative = r.is_negative();
        let r = r.abs();
        let mut factors: Vec<String> = Vec::new();
        match g {
            0 => {}
            1 => factors.push("(-i*hbar)".into()),
            _ => factors.push(format!("(-i*hbar)^{g}")),
        }
        let numer = r.numer().to_string();
        if numer != "1" || (factors.is_empty() && u.is_empty()) {
            factors.push(numer);
        }
        if !u.is_empty() {
            factors.push(u);
        }
        let mut s = factors.join("*");
        if !r.denom().is_one() {
            s.push('/');
            s.push_str(&r.denom().to_string());
        }
        (negative, s)
    } else {
        let mut factors = vec![c.to_string()];
        match g {
            0 => {}
            1 => factors.push("hbar".into()),
            _ => factors.push(format!("hbar^{g}")),
        }
        if !u.is_empty() {
            factors.push(u);
        }
        (false, factors.join("*"))
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<'a> Add<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: DiffPoly) -> DiffPoly {
        &self + &rhs
    }
}

impl<'a> Sub<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: DiffPoly) -> DiffPoly {
        &self - &rhs
    }
}

impl<'a> Mul<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        self.scale(&-Scalar::one())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    c: Scalar,
    hbar: u32,
    u: BTreeMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for DiffPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    c: c.clone(),
                    hbar: m.hbar,
                    u: m.uexp.iter().map(|(s, e)| (s.to_string(), *e)).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PolyRepr::deserialize(d)?;
        let mut p = DiffPoly::zero();
        for t in repr.terms {
            let mut uexp = Vec::with_capacity(t.u.len());
            for (k, e) in t.u {
                let s: u32 = k
                    .parse()
                    .map_err(|_| D::Error::custom(format!("bad jet index {k:?}")))?;
                uexp.push((s, e));
            }
            p.add_term(DiffMonomial::new(uexp, t.hbar), t.c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn u(s: u32) -> DiffPoly {
        DiffPoly::u(s)
    }

    #[test]
    fn ring_operations() {
        assert_eq!(&u(0) + &u(0), u(0).scale(&Scalar::int(2)));
        let lhs = &(&u(0) + &u(1)) * &u(0);
        let rhs = &u(0).pow(2) + &(&u(0) * &u(1));
        assert_eq!(lhs, rhs);
        let scaled = (&DiffPoly::hbar() * &u(2)).scale(&Scalar::i());
        let (m, c) = scaled.terms().next().unwrap();
        assert_eq!(m, &DiffMonomial::new([(2, 1)], 1));
        assert_eq!(c, &Scalar::i());
        assert!((&u(3) - &u(3)).is_zero());
    }

    #[test]
    fn dx_examples() {
        assert_eq!(u(0).pow(2).dx(), (&u(0) * &u(1)).scale(&Scalar::int(2)));
        let f = &u(0).pow(2).scale(&q(1, 2)) + &u(1).scale(&q(1, 2));
        let expected = &(&u(0) * &u(1)) + &u(2).scale(&q(1, 2));
        assert_eq!(f.dx(), expected);
        assert!(DiffPoly::hbar().dx().is_zero());
        assert!(DiffPoly::constant(q(5, 1)).dx().is_zero());
    }

    #[test]
    fn partial_u_examples() {
        assert_eq!(u(0).pow(3).partial_u(0), u(0).pow(2).scale(&Scalar::int(3)));
        let f = &u(0) * &u(1).pow(2);
        assert_eq!(f.partial_u(1), (&u(0) * &u(1)).scale(&Scalar::int(2)));
        assert!(f.partial_u(2).is_zero());
    }

    #[test]
    fn variational_derivative_examples() {
        assert_eq!(
            u(0).pow(3).scale(&q(1, 6)).variational_derivative(),
            u(0).pow(2).scale(&q(1, 2))
        );
        let f = &u(0) * &u(1).pow(2);
        let expected = &(-u(1).pow(2)) - &(&u(0) * &u(2)).scale(&Scalar::int(2));
        assert_eq!(f.variational_derivative(), expected);
        let g = &u(0).pow(2) * &u(1);
        assert!(g.dx().variational_derivative().is_zero());
        assert!(DiffPoly::constant(q(7, 3))
            .variational_derivative()
            .is_zero());
    }

    #[test]
    fn bidegree_examples() {
        let hu2 = &DiffPoly::hbar() * &u(2);
        assert_eq!(
            hu2.bidegree(),
            Some(Bidegree {
                grade: 0,
                weight: 3
            })
        );
        assert_eq!(
            u(0).pow(3).bidegree(),
            Some(Bidegree {
                grade: 0,
                weight: 3
            })
        );
        assert_eq!((&u(0) + &u(1)).bidegree(), None);
    }

    #[test]
    fn scale_substitute_examples() {
        let f = &u(0).pow(3) + &u(2).scale(&q(1, 12));
        let minus_i_hbar = DiffPoly::hbar().scale(&-Scalar::i());
        let expected = &u(0).pow(3) + &(&minus_i_hbar * &u(2)).scale(&q(1, 12));
        assert_eq!(f.scale_substitute().unwrap(), expected);
        assert_eq!(
            u(1).pow(2).scale_substitute().unwrap(),
            &minus_i_hbar * &u(1).pow(2)
        );
        assert!(matches!(
            u(1).scale_substitute(),
            Err(Error::OddPower { weight: 1, .. })
        ));
    }

    #[test]
    fn text_rendering() {
        let minus_i_hbar = DiffPoly::hbar().scale(&-Scalar::i());
        let h1 = &u(0).pow(3).scale(&q(1, 6)) + &(&minus_i_hbar * &u(2)).scale(&q(1, 12));
        assert_eq!(h1.to_text(), "u^3/6 + (-i*hbar)*u2/12");
        assert_eq!(u(0).to_text(), "u");
        assert_eq!(DiffPoly::zero().to_text(), "0");
        assert_eq!((-u(1).pow(2)).to_text(), "-u1^2");
        assert_eq!(DiffPoly::constant(q(-3, 2)).to_text(), "-3/2");
    }

    #[test]
    fn json_schema() {
        let f = u(0).pow(3).scale(&q(1, 6));
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(
            js,
            r#"{"terms":[{"c":{"re":"1/6","im":"0"},"hbar":0,"u":{"0":3}}]}"#
        );
        let back: DiffPoly = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
    }
}
