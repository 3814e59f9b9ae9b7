//! Local functionals: differential polynomials modulo total x-derivatives
//! and constants.
//!
//! Equality is decided by the Euler operator, whose kernel on a single
//! dependent variable is exactly `Im dx + constants`. A canonical
//! integration-by-parts normal form is also provided; it is used for
//! display and for coordinates on the bigraded components.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::diffpoly::{DiffMonomial, DiffPoly};
use crate::linalg::{rref, Rref};
use crate::scalar::Scalar;

/// The class `∫ f dx` of a density `f`.
#[derive(Clone, Debug)]
pub struct LocalFunctional {
    rep: DiffPoly,
}

impl LocalFunctional {
    pub fn new(rep: DiffPoly) -> Self {
        LocalFunctional { rep }
    }

    pub fn rep(&self) -> &DiffPoly {
        &self.rep
    }

    pub fn into_rep(self) -> DiffPoly {
        self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.variational_derivative().is_zero()
    }

    pub fn variational_derivative(&self) -> DiffPoly {
        self.rep.variational_derivative()
    }

    /// Canonical representative: per component, pivot monomials of the
    /// `dx`-image are eliminated and constants dropped.
    pub fn normal_form(&self) -> DiffPoly {
        normal_form(&self.rep)
    }

    pub fn add(&self, other: &LocalFunctional) -> LocalFunctional {
        LocalFunctional::new(&self.rep + &other.rep)
    }

    pub fn sub(&self, other: &LocalFunctional) -> LocalFunctional {
        LocalFunctional::new(&self.rep - &other.rep)
    }

    pub fn scale(&self, c: &Scalar) -> LocalFunctional {
        LocalFunctional::new(self.rep.scale(c))
    }
}

impl PartialEq for LocalFunctional {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for LocalFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "∫({})dx", self.normal_form())
    }
}

pub fn to_functional(f: &DiffPoly) -> LocalFunctional {
    LocalFunctional::new(f.clone())
}

/// First Poisson bracket `{f, g} = ∫ (δf/δu) dx(δg/δu)`.
pub fn poisson_bracket(f: &LocalFunctional, g: &LocalFunctional) -> LocalFunctional {
    let df = f.variational_derivative();
    let dg = g.variational_derivative();
    LocalFunctional::new(&df * &dg.dx())
}

/// Non-decreasing jet-index sequences of length `n` summing to `total`.
pub fn jet_multisets(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, total: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // remaining n entries are all >= s, so s * n <= total
        let mut s = min;
        while s as usize * n <= total as usize {
            cur.push(s);
            rec(n - 1, total - s, s, cur, out);
            cur.pop();
            s += 1;
        }
    }
    let mut out = Vec::new();
    rec(n, total, 0, &mut Vec::new(), &mut out);
    out
}

/// One homogeneous component of the hbar-free ring: `n` factors carrying
/// `jets` derivatives in total, together with the `dx`-image coming from
/// the component with one derivative fewer.
#[derive(Clone, Debug)]
pub struct Component {
    pub factors: usize,
    pub jets: u32,
    /// Column order: monomials most likely to be pivots come first.
    pub monomials: Vec<DiffMonomial>,
    pub image: Rref,
}

impl Component {
    pub fn new(factors: usize, jets: u32) -> Self {
        let mut monomials: Vec<DiffMonomial> = jet_multisets(factors, jets)
            .iter()
            .map(|js| DiffMonomial::from_jets(js, 0))
            .collect();
        // Highest derivative first: those are eliminated by integrating by
        // parts, leaving low-order representatives such as u1^2.
        monomials.sort_by(|a, b| {
            let ka = (a.max_jet(), a.exponent(a.max_jet().unwrap_or(0)));
            let kb = (b.max_jet(), b.exponent(b.max_jet().unwrap_or(0)));
            kb.0.cmp(&ka.0)
                .then(ka.1.cmp(&kb.1))
                .then_with(|| b.jets().cmp(&a.jets()))
        });
        let index: BTreeMap<&DiffMonomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let rows: Vec<Vec<Scalar>> = if jets == 0 || factors == 0 {
            Vec::new()
        } else {
            jet_multisets(factors, jets - 1)
                .iter()
                .map(|js| {
                    let d = DiffPoly::term(Scalar::from(1), DiffMonomial::from_jets(js, 0)).dx();
                    let mut row = vec![Scalar::zero(); monomials.len()];
                    for (m, c) in d.terms() {
                        row[index[m]] = c.clone();
                    }
                    row
                })
                .collect()
        };
        let image = rref(&rows, monomials.len());
        Component {
            factors,
            jets,
            monomials,
            image,
        }
    }

    /// Dimension of the component of the quotient space.
    pub fn quotient_dim(&self) -> usize {
        if self.factors == 0 {
            0
        } else {
            self.image.nullity()
        }
    }

    /// Representatives of a complement of the image.
    pub fn basis(&self) -> Vec<DiffMonomial> {
        if self.factors == 0 {
            return Vec::new();
        }
        self.image
            .free_columns()
            .into_iter()
            .map(|c| self.monomials[c].clone())
            .collect()
    }

    pub fn coordinates(&self, f: &DiffPoly) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.monomials.len()];
        for (i, m) in self.monomials.iter().enumerate() {
            v[i] = f.coeff(m);
        }
        v
    }

    /// Reduce an hbar-free density supported in this component.
    pub fn reduce(&self, f: &DiffPoly) -> DiffPoly {
        if self.factors == 0 {
            return DiffPoly::zero();
        }
        let mut v = self.coordinates(f);
        self.image.reduce(&mut v);
        DiffPoly::from_terms(self.monomials.iter().cloned().zip(v))
    }

    /// Rank of the Euler operator on this component.
    pub fn euler_rank(&self) -> usize {
        let images: Vec<DiffPoly> = self
            .monomials
            .iter()
            .map(|m| DiffPoly::term(Scalar::from(1), m.clone()).variational_derivative())
            .collect();
        let mut targets: Vec<DiffMonomial> = images
            .iter()
            .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
            .collect();
        targets.sort();
        targets.dedup();
        // columns = source monomials, rows = target monomials
        let rows: Vec<Vec<Scalar>> = targets
            .iter()
            .map(|t| images.iter().map(|p| p.coeff(t)).collect())
            .collect();
        rref(&rows, self.monomials.len()).rank()
    }
}

/// Basis of the component of local functionals with the given grade
/// (`sum s_i`) and weight (`sum (s_i + 1)`); the number of factors is
/// `weight - grade`. Constants are quotiented out, so an empty list is a
/// valid answer.
pub fn functional_basis(grade: i64, weight: i64) -> Vec<LocalFunctional> {
    let factors = weight - grade;
    if grade < 0 || factors <= 0 {
        return Vec::new();
    }
    Component::new(factors as usize, grade as u32)
        .basis()
        .into_iter()
        .map(|m| LocalFunctional::new(DiffPoly::term(Scalar::from(1), m)))
        .collect()
}

/// Integration-by-parts normal form of a density.
pub fn normal_form(f: &DiffPoly) -> DiffPoly {
    let mut groups: BTreeMap<(u32, usize, u32), DiffPoly> = BTreeMap::new();
    for (m, c) in f.terms() {
        let key = (m.hbar(), m.degree() as usize, m.jet_weight());
        groups
            .entry(key)
            .or_default()
            .add_term(m.without_hbar(), c.clone());
    }
    let mut out = DiffPoly::zero();
    for ((hbar, factors, jets), part) in groups {
        if factors == 0 {
            continue;
        }
        let reduced = Component::new(factors, jets).reduce(&part);
        for (m, c) in reduced.terms() {
            out.add_term(m.with_hbar(hbar), c.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: u32) -> DiffPoly {
        DiffPoly::u(s)
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn to_functional_examples() {
        assert!(to_functional(&u(2)).is_zero());
        assert_eq!(
            to_functional(&(&u(0) * &u(2))),
            to_functional(&-u(1).pow(2))
        );
        assert!(to_functional(&DiffPoly::constant(q(5, 1))).is_zero());
        assert!(!to_functional(&u(0).pow(2)).is_zero());
    }

    #[test]
    fn basis_examples() {
        let b = functional_basis(2, 4);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].rep(), &u(1).pow(2));
        assert_eq!(functional_basis(0, 3).len(), 1);
        assert!(functional_basis(1, 2).is_empty());
        // u_2 is the only monomial with 2 derivatives on one factor
        assert!(functional_basis(2, 3).is_empty());
        assert!(functional_basis(0, 0).is_empty());
    }

    #[test]
    fn normal_form_is_canonical() {
        let a = &u(0) * &u(2);
        assert_eq!(normal_form(&a), -u(1).pow(2));
        let b = &(&u(0).pow(3) + &u(3)) + &DiffPoly::constant(q(2, 1));
        assert_eq!(normal_form(&b), u(0).pow(3));
    }

    #[test]
    fn euler_kernel_matches_image() {
        for factors in 1..=4 {
            for jets in 0..=6 {
                let c = Component::new(factors, jets);
                let nullity = c.monomials.len() - c.euler_rank();
                assert_eq!(nullity, c.image.rank(), "factors {factors}, jets {jets}");
            }
        }
    }

    #[test]
    fn poisson_bracket_examples() {
        let h1 = to_functional(&u(0).pow(3).scale(&q(1, 6)));
        let h2 = to_functional(&u(0).pow(4).scale(&q(1, 24)));
        assert!(poisson_bracket(&h1, &h2).is_zero());
        assert!(poisson_bracket(&h1, &h1).is_zero());
        // u^4/24 generates the flow u^2 u_1 / 2
        let h = u(0).pow(4).scale(&q(1, 24));
        assert_eq!(
            h.variational_derivative().dx(),
            (&u(0).pow(2) * &u(1)).scale(&q(1, 2))
        );
    }
}
