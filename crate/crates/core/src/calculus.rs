//! Monomial-level calculus: the `A_{i,a}` variables, dominance predicates,
//! factorization of ratios over products of `A^{-1}`, and the maps sigma and
//! shift.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cartan::CartanData;
use crate::monomial::{Monomial, Node, Var, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("node {0} outside 1..={1}")]
    NodeRange(Node, usize),
    #[error("operation needs the lowest-monomial twist, unavailable for {0}")]
    NoTwist(String),
    #[error("monomial is not dominant: {0}")]
    NotDominant(Monomial),
}

/// `A_{i,q^c}^{-1}` expanded in the `Y` variables:
/// the two inverse self-entries at `c - r_i` and `c + r_i`, and for every
/// neighbor `j` the entries at `c - C_{ji} + 1 - 2k`, `k = 1..=-C_{ji}`.
pub fn a_inverse(cd: &CartanData, i: Node, c: i32) -> Monomial {
    assert!(i >= 1 && (i as usize) <= cd.rank(), "node out of range");
    let ri = cd.r(i) as i32;
    let mut pairs: Vec<(Var, i32)> = vec![((i, c - ri), -1), ((i, c + ri), -1)];
    for j in cd.neighbors(i) {
        let m = -cd.c(j, i) as i32;
        for k in 1..=m {
            pairs.push(((j, c + m + 1 - 2 * k), 1));
        }
    }
    Monomial::from_pairs(pairs)
}

/// `A_{i,q^c}` itself.
pub fn a_monomial(cd: &CartanData, i: Node, c: i32) -> Monomial {
    a_inverse(cd, i, c).invert()
}

pub fn is_dominant(m: &Monomial) -> bool {
    m.iter().all(|(_, e)| e > 0)
}

pub fn is_antidominant(m: &Monomial) -> bool {
    m.iter().all(|(_, e)| e < 0)
}

/// All node-`j` exponents nonnegative.
pub fn is_j_dominant(m: &Monomial, j: Node) -> bool {
    m.iter().all(|((i, _), e)| i != j || e > 0)
}

/// Right-negative: looking at the largest occupied q-exponent column, every
/// entry there is negative. The empty monomial is not right-negative.
pub fn is_right_negative(m: &Monomial) -> bool {
    match m.max_col() {
        None => false,
        Some(top) => m.iter().all(|((_, r), e)| r != top || e < 0),
    }
}

/// Mirror of `is_right_negative` at the smallest occupied column.
pub fn is_left_negative(m: &Monomial) -> bool {
    match m.min_col() {
        None => false,
        Some(bot) => m.iter().all(|((_, r), e)| r != bot || e < 0),
    }
}

/// Thin: every exponent is 1 or -1.
pub fn is_thin(m: &Monomial) -> bool {
    m.iter().all(|(_, e)| e == 1 || e == -1)
}

/// Predicate bundle for one monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonomialFlags {
    pub dominant: bool,
    pub antidominant: bool,
    pub right_negative: bool,
    pub left_negative: bool,
    pub thin: bool,
}

pub fn classify(m: &Monomial) -> MonomialFlags {
    MonomialFlags {
        dominant: is_dominant(m),
        antidominant: is_antidominant(m),
        right_negative: is_right_negative(m),
        left_negative: is_left_negative(m),
        thin: is_thin(m),
    }
}

/// Result of writing `low = high * prod A_{i,q^c}^{-v_{i,c}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AFactorization {
    /// Sorted (variable, multiplicity) pairs, all multiplicities positive.
    pub factors: Vec<(Var, i64)>,
}

impl AFactorization {
    pub fn total(&self) -> i64 {
        self.factors.iter().map(|&(_, v)| v).sum()
    }

    /// Multiplicity sum on node `j`.
    pub fn node_total(&self, j: Node) -> i64 {
        self.factors
            .iter()
            .filter(|&&((i, _), _)| i == j)
            .map(|&(_, v)| v)
            .sum()
    }

    /// Node-`j` factors as (q-exponent, multiplicity).
    pub fn node_factors(&self, j: Node) -> Vec<(i32, i64)> {
        self.factors
            .iter()
            .filter(|&&((i, _), _)| i == j)
            .map(|&((_, c), v)| (c, v))
            .collect()
    }
}

/// Writes `low / high` as a product of `A_{i,q^c}^{-1}` factors, if possible.
///
/// Works by peeling the top occupied column of the ratio: when
/// `r_i >= -C_{ji}` for all adjacent pairs (true for every builtin type and
/// for the path shapes with one multiple bond), the only factor that can
/// touch column `T` at node `i` is `A_{i,q^{T-r_i}}^{-1}`, so top entries
/// must be negative and force the factor multiplicities. Returns `None`
/// when the ratio is not such a product.
pub fn factor_over_a(cd: &CartanData, low: &Monomial, high: &Monomial) -> Option<AFactorization> {
    assert!(
        cd.peel_safe(),
        "factor_over_a requires r_i >= -C_(ji) on all edges"
    );
    let mut ratio = low.div(high);
    let mut out: BTreeMap<Var, i64> = BTreeMap::new();
    while !ratio.is_one() {
        let top = ratio.max_col().unwrap();
        // Collect the top-column entries first; peeling mutates the ratio.
        let entries: Vec<(Node, i32)> = ratio
            .iter()
            .filter(|&((_, r), _)| r == top)
            .map(|((i, _), e)| (i, e))
            .collect();
        debug_assert!(!entries.is_empty());
        for (i, e) in entries {
            if e > 0 {
                return None;
            }
            let label = (i, top - cd.r(i) as i32);
            *out.entry(label).or_insert(0) += (-e) as i64;
            // Remove the forced (-e) copies of A_{i,label}^{-1}.
            ratio = ratio.mul(&a_inverse(cd, i, label.1).pow(e));
        }
        debug_assert!(ratio.max_col().map_or(true, |t| t < top));
    }
    Some(AFactorization {
        factors: out.into_iter().collect(),
    })
}

/// sigma: `Y_{i,q^r} -> Y_{i,q^{-r}}^{-1}` multiplicatively.
pub fn sigma_monomial(m: &Monomial) -> Monomial {
    Monomial::from_pairs(m.iter().map(|((i, r), e)| ((i, -r), -e)))
}

/// shift by `q^s`: `Y_{i,q^r} -> Y_{i,q^{r+s}}`.
pub fn shift_monomial(m: &Monomial, s: i32) -> Monomial {
    m.map_cols(|r| r + s)
}

/// Lowest monomial of the simple module with dominant highest monomial `m`:
/// `prod Y_{bar(i), q^{r + twist}}^{-e}` over the entries `Y_{i,q^r}^e` of `m`.
pub fn lowest_monomial_formula(cd: &CartanData, m: &Monomial) -> Result<Monomial, CalculusError> {
    if !is_dominant(m) {
        return Err(CalculusError::NotDominant(m.clone()));
    }
    let t = cd
        .twist()
        .ok_or_else(|| CalculusError::NoTwist(cd.name()))? as i32;
    Ok(Monomial::from_pairs(
        m.iter().map(|((i, r), e)| ((cd.bar(i), r + t), -e)),
    ))
}

/// Highest monomial of the sigma-twisted simple module, shifted by
/// `q^normalize`: `prod Y_{bar(i), q^{-r - twist + normalize}}^{e}`.
pub fn sigma_partner(
    cd: &CartanData,
    m: &Monomial,
    normalize: i32,
) -> Result<Monomial, CalculusError> {
    let low = lowest_monomial_formula(cd, m)?;
    Ok(shift_monomial(&sigma_monomial(&low), normalize))
}

/// Weight of a monomial: exponent sums per node, in the fundamental-weight
/// basis.
pub fn weight_of(cd: &CartanData, m: &Monomial) -> Weight {
    let mut w = vec![0i64; cd.rank()];
    for ((i, _), e) in m.iter() {
        w[i as usize - 1] += e as i64;
    }
    Weight(w)
}
