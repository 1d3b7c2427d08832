//! Rank-one building blocks: q-strings, normal writings, and the closed
//! Kirillov-Reshetikhin characters they expand into.
//!
//! Everything is parametrized by a step `d >= 1` (the symmetrizer of the
//! ambient node), with variables indexed by integer q-exponents and strings
//! advancing by `2d`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::monomial::{Monomial, Node};
use crate::qchar::QCharacter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Sl2Error {
    #[error("monomial has entries off node 1: {0}")]
    NotRankOne(Monomial),
    #[error("monomial is not dominant on the node: {0}")]
    NotDominant(Monomial),
}

/// A q-string: `len` variables starting at q-exponent `start`, stepping by
/// `2d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QString {
    pub start: i32,
    pub len: u32,
}

impl QString {
    /// Largest occupied q-exponent.
    pub fn end(&self, d: i32) -> i32 {
        self.start + 2 * d * (self.len as i32 - 1)
    }

    /// The product of the string's variables on node `j`.
    pub fn monomial(&self, j: Node, d: i32) -> Monomial {
        Monomial::from_pairs((0..self.len).map(|l| ((j, self.start + 2 * d * l as i32), 1)))
    }

    /// Flip labels of the term with `t` lowered variables: the rightmost `t`
    /// positions `l` contribute labels `start + 2dl + d`, ascending.
    pub fn flip_labels(&self, d: i32, t: u32) -> Vec<i32> {
        assert!(t <= self.len);
        (self.len - t..self.len)
            .map(|l| self.start + 2 * d * l as i32 + d)
            .collect()
    }
}

/// Two strings are in special position when the union of their supports is
/// again a string distinct from both.
pub fn in_special_position(a: &QString, b: &QString, d: i32) -> bool {
    let step = 2 * d;
    if (a.start - b.start).rem_euclid(step) != 0 {
        return false;
    }
    let (ea, eb) = (a.end(d), b.end(d));
    // Union is a string: overlap or adjacency.
    if a.start.max(b.start) > ea.min(eb) + step {
        return false;
    }
    let a_contains_b = a.start <= b.start && eb <= ea;
    let b_contains_a = b.start <= a.start && ea <= eb;
    !a_contains_b && !b_contains_a
}

/// Greedy normal writing of a dominant rank-one exponent profile: repeatedly
/// take the lowest occupied exponent and extend upward by `2d` while
/// multiplicity remains. The result is pairwise not in special position.
///
/// All multiplicities must be positive.
pub fn normal_writing_cols(cols: &BTreeMap<i32, i64>, d: i32) -> Vec<QString> {
    debug_assert!(cols.values().all(|&c| c > 0));
    fn take(map: &mut BTreeMap<i32, i64>, c: i32) -> bool {
        match map.get_mut(&c) {
            Some(v) => {
                *v -= 1;
                if *v == 0 {
                    map.remove(&c);
                }
                true
            }
            None => false,
        }
    }
    let mut left = cols.clone();
    let mut out = Vec::new();
    loop {
        let s = match left.keys().next().copied() {
            Some(s) => s,
            None => break,
        };
        take(&mut left, s);
        let mut end = s;
        while take(&mut left, end + 2 * d) {
            end += 2 * d;
        }
        out.push(QString {
            start: s,
            len: ((end - s) / (2 * d) + 1) as u32,
        });
    }
    out
}

/// Highest monomial of the length-`k` Kirillov-Reshetikhin module with
/// variables on node 1 starting at `q^r`: `Y_{1,r} Y_{1,r+2} ... Y_{1,r+2(k-1)}`.
pub fn kr_monomial_sl2(k: u32, r: i32) -> Monomial {
    QString { start: r, len: k }.monomial(1, 1)
}

fn a_inverse_rank_one(c: i32) -> Monomial {
    Monomial::from_pairs([((1 as Node, c - 1), -1), ((1, c + 1), -1)])
}

/// Full rank-one Kirillov-Reshetikhin character: `k + 1` terms, the `t`-th
/// lowering the rightmost `t` variables.
pub fn kr_qchar_sl2(k: u32, r: i32) -> QCharacter {
    let s = QString { start: r, len: k };
    let head = s.monomial(1, 1);
    let mut terms = BTreeMap::new();
    for t in 0..=k {
        let mut m = head.clone();
        for c in s.flip_labels(1, t) {
            m = m.mul(&a_inverse_rank_one(c));
        }
        *terms.entry(m).or_insert(0) += 1;
    }
    QCharacter::from_terms(head, terms)
}

/// Normal writing of a dominant rank-one monomial on node 1.
pub fn normal_writing(m: &Monomial) -> Result<Vec<QString>, Sl2Error> {
    let mut cols = BTreeMap::new();
    for ((i, r), e) in m.iter() {
        if i != 1 {
            return Err(Sl2Error::NotRankOne(m.clone()));
        }
        if e < 0 {
            return Err(Sl2Error::NotDominant(m.clone()));
        }
        cols.insert(r, e as i64);
    }
    Ok(normal_writing_cols(&cols, 1))
}

/// Character of the simple rank-one module with dominant highest monomial
/// `m`: the product of the Kirillov-Reshetikhin characters of its normal
/// writing.
pub fn simple_qchar_sl2(m: &Monomial) -> Result<QCharacter, Sl2Error> {
    let strings = normal_writing(m)?;
    let mut out = QCharacter::of_head(Monomial::one());
    for s in strings {
        out = out.mul(&kr_qchar_sl2(s.len, s.start));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::parse_monomial;

    fn m(s: &str) -> Monomial {
        parse_monomial(s, 1).unwrap()
    }

    #[test]
    fn kr_monomial_anchors_left() {
        assert_eq!(kr_monomial_sl2(3, -2).to_string(), "1_-2 1_0 1_2");
        assert_eq!(kr_monomial_sl2(1, 5).to_string(), "1_5");
        assert!(kr_monomial_sl2(0, 0).is_one());
    }

    #[test]
    fn kr_characters_small() {
        let w1 = kr_qchar_sl2(1, 0);
        assert_eq!(w1.len(), 2);
        assert_eq!(w1.get(&m("1_0")), 1);
        assert_eq!(w1.get(&m("1_2^-1")), 1);
        let w2 = kr_qchar_sl2(2, 0);
        assert_eq!(w2.len(), 3);
        assert_eq!(w2.get(&m("1_0 1_2")), 1);
        assert_eq!(w2.get(&m("1_0 1_4^-1")), 1);
        assert_eq!(w2.get(&m("1_2^-1 1_4^-1")), 1);
    }

    #[test]
    fn kr_characters_shape() {
        for k in 0..=10u32 {
            let w = kr_qchar_sl2(k, -3);
            assert_eq!(w.len() as u32, k + 1);
            assert_eq!(w.total_multiplicity() as u32, k + 1);
            assert_eq!(w.dominant_terms().len(), 1);
            // The unique antidominant term is the full flip.
            let expect = QString { start: -3, len: k }
                .monomial(1, 1)
                .invert()
                .map_cols(|c| c + 2);
            assert_eq!(w.antidominant_terms(), vec![(expect, 1)]);
        }
    }

    #[test]
    fn special_position_table() {
        let d = 1;
        let s = |start: i32, len: u32| QString { start, len };
        // Adjacent strings merge into a longer one.
        assert!(in_special_position(&s(0, 2), &s(4, 1), d));
        // Overlapping but not nested.
        assert!(in_special_position(&s(0, 2), &s(2, 2), d));
        assert!(in_special_position(&s(0, 1), &s(2, 1), d));
        // Nested or equal strings are not special.
        assert!(!in_special_position(&s(0, 3), &s(2, 1), d));
        assert!(!in_special_position(&s(0, 2), &s(0, 2), d));
        assert!(!in_special_position(&s(0, 3), &s(0, 2), d));
        // Gaps and parity mismatches are not special.
        assert!(!in_special_position(&s(0, 1), &s(4, 1), d));
        assert!(!in_special_position(&s(0, 1), &s(1, 1), d));
        // Wider steps scale everything.
        assert!(in_special_position(&s(0, 1), &s(4, 1), 2));
        assert!(!in_special_position(&s(0, 1), &s(2, 1), 2));
    }

    #[test]
    fn normal_writing_greedy() {
        let w = normal_writing(&m("1_0^2 1_2")).unwrap();
        assert_eq!(
            w,
            vec![QString { start: 0, len: 2 }, QString { start: 0, len: 1 }]
        );
        let w = normal_writing(&m("1_0 1_4")).unwrap();
        assert_eq!(
            w,
            vec![QString { start: 0, len: 1 }, QString { start: 4, len: 1 }]
        );
        for a in &w {
            for b in &w {
                if a != b {
                    assert!(!in_special_position(a, b, 1));
                }
            }
        }
        assert!(normal_writing(&m("1_0^-1")).is_err());
    }

    #[test]
    fn simple_characters_multiply_strings() {
        // A single string of length 2 is a 3-term module, not a product.
        let c = simple_qchar_sl2(&m("1_0 1_2")).unwrap();
        assert_eq!(c.len(), 3);
        // Two distant variables give the full 4-term product.
        let c = simple_qchar_sl2(&m("1_0 1_4")).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.total_multiplicity(), 4);
        // A doubled variable: 3 distinct terms, total 4.
        let c = simple_qchar_sl2(&m("1_0^2")).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.total_multiplicity(), 4);
        assert_eq!(c.get(&m("1_0 1_2^-1")), 2);
    }

    #[test]
    fn flip_labels_are_right_anchored() {
        let s = QString { start: 3, len: 2 };
        assert_eq!(s.flip_labels(2, 0), Vec::<i32>::new());
        assert_eq!(s.flip_labels(2, 1), vec![9]);
        assert_eq!(s.flip_labels(2, 2), vec![5, 9]);
    }
}
