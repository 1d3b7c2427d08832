//! q-characters as finite integer combinations of Laurent monomials.

use std::collections::BTreeMap;

use crate::calculus::{self, is_antidominant, is_dominant};
use crate::cartan::CartanData;
use crate::monomial::{Monomial, Weight};

/// A finite sum `sum mult_m * m` with positive multiplicities, together with
/// a designated head monomial.
///
/// For characters produced by the saturation engine the head is the unique
/// dominant monomial and every term lies in `head * Q^-`; maps like sigma
/// transport the head along without re-deriving that property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QCharacter {
    head: Monomial,
    terms: BTreeMap<Monomial, i64>,
}

impl QCharacter {
    /// The character holding just its head with multiplicity 1.
    pub fn of_head(head: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(head.clone(), 1);
        QCharacter { head, terms }
    }

    /// Assemble from explicit terms. Zero multiplicities are dropped;
    /// negative ones are a caller bug.
    pub fn from_terms(head: Monomial, terms: BTreeMap<Monomial, i64>) -> Self {
        let terms: BTreeMap<Monomial, i64> =
            terms.into_iter().filter(|&(_, c)| c != 0).collect();
        assert!(
            terms.values().all(|&c| c > 0),
            "q-character multiplicities must be positive"
        );
        QCharacter { head, terms }
    }

    pub fn head(&self) -> &Monomial {
        &self.head
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, i64> {
        &self.terms
    }

    pub fn get(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Number of distinct monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of multiplicities.
    pub fn total_multiplicity(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn max_multiplicity(&self) -> i64 {
        self.terms.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Pointwise product; heads multiply.
    pub fn mul(&self, other: &QCharacter) -> QCharacter {
        let mut terms: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                *terms.entry(a.mul(b)).or_insert(0) += ca * cb;
            }
        }
        QCharacter {
            head: self.head.mul(&other.head),
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> QCharacter {
        let mut out = QCharacter::of_head(Monomial::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Dominant monomials present, with multiplicities, in canonical order.
    pub fn dominant_terms(&self) -> Vec<(Monomial, i64)> {
        self.iter()
            .filter(|(m, _)| is_dominant(m))
            .map(|(m, c)| (m.clone(), c))
            .collect()
    }

    pub fn antidominant_terms(&self) -> Vec<(Monomial, i64)> {
        self.iter()
            .filter(|(m, _)| is_antidominant(m))
            .map(|(m, c)| (m.clone(), c))
            .collect()
    }

    /// Monomial-wise image under a multiplicative map; multiplicities ride
    /// along and collisions add. The head is mapped too.
    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Monomial) -> QCharacter {
        let mut terms: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (m, c) in self.iter() {
            *terms.entry(f(m)).or_insert(0) += c;
        }
        QCharacter {
            head: f(&self.head),
            terms,
        }
    }

    /// Collapse to weight multiplicities.
    pub fn weights(&self, cd: &CartanData) -> BTreeMap<Weight, i64> {
        let mut out: BTreeMap<Weight, i64> = BTreeMap::new();
        for (m, c) in self.iter() {
            *out.entry(calculus::weight_of(cd, m)).or_insert(0) += c;
        }
        out
    }

    /// Equality of term maps, ignoring heads.
    pub fn same_terms(&self, other: &QCharacter) -> bool {
        self.terms == other.terms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::parse_monomial;

    fn m(s: &str) -> Monomial {
        parse_monomial(s, 2).unwrap()
    }

    fn qc(head: &str, terms: &[(&str, i64)]) -> QCharacter {
        QCharacter::from_terms(
            m(head),
            terms.iter().map(|&(s, c)| (m(s), c)).collect(),
        )
    }

    #[test]
    fn product_collects_collisions() {
        let a = qc("1_0", &[("1_0", 1), ("1_2^-1", 1)]);
        let b = qc("1_2", &[("1_2", 1), ("1_4^-1", 1)]);
        let p = a.mul(&b);
        assert_eq!(p.head().to_string(), "1_0 1_2");
        assert_eq!(p.len(), 4);
        assert_eq!(p.total_multiplicity(), 4);
        assert_eq!(p.get(&m("1_0 1_2")), 1);
        assert_eq!(p.get(&m("1_0 1_4^-1")), 1);
        // 1_2^-1 * 1_2 collapses to the empty monomial.
        assert_eq!(p.get(&Monomial::one()), 1);
    }

    #[test]
    fn dominant_scan() {
        let a = qc(
            "1_0 2_1",
            &[("1_0 2_1", 1), ("1_0 1_2 2_3^-1", 2), ("1_2 2_1", 1), ("2_5^-1", 1)],
        );
        let doms = a.dominant_terms();
        assert_eq!(doms.len(), 2);
        assert_eq!(doms[0].0.to_string(), "1_0 2_1");
        assert_eq!(doms[1].0.to_string(), "1_2 2_1");
        let anti = a.antidominant_terms();
        assert_eq!(anti.len(), 1);
        assert_eq!(anti[0].0.to_string(), "2_5^-1");
    }

    #[test]
    fn map_monomials_merges() {
        let a = qc("1_0", &[("1_0", 1), ("1_2", 1)]);
        let squashed = a.map_monomials(|_| Monomial::one());
        assert_eq!(squashed.len(), 1);
        assert_eq!(squashed.get(&Monomial::one()), 2);
    }

    #[test]
    fn weights_collapse() {
        let cd = CartanData::from_name("A2").unwrap();
        let a = qc("1_0", &[("1_0", 1), ("1_2^-1 2_1", 1), ("2_3^-1", 1)]);
        let w = a.weights(&cd);
        assert_eq!(w.len(), 3);
        assert_eq!(w[&Weight(vec![1, 0])], 1);
        assert_eq!(w[&Weight(vec![-1, 1])], 1);
        assert_eq!(w[&Weight(vec![0, -1])], 1);
    }

    #[test]
    fn pow_zero_is_one() {
        let a = qc("1_0", &[("1_0", 1), ("1_2^-1", 1)]);
        let p = a.pow(0);
        assert_eq!(p.len(), 1);
        assert!(p.head().is_one());
        assert_eq!(a.pow(2).total_multiplicity(), 4);
    }
}
