//! Laurent monomials in the variables `Y_{i,q^r}`.
//!
//! A variable is addressed by its node `i` (1-based) and the exponent `r` of
//! its spectral parameter `q^r`; all spectral parameters live on a single
//! `q^Z` orbit. The text form of a variable with exponent `e` is `i_r^e`,
//! with `^e` omitted when `e = 1`, and the empty product prints as `1`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// 1-based Dynkin node index.
pub type Node = u8;

/// Variable key: node and q-exponent.
pub type Var = (Node, i32);

/// A Laurent monomial `prod Y_{i,q^r}^{e_{i,r}}` with integer exponents.
///
/// Entries are kept sorted by `(node, q-exponent)` with all zero exponents
/// dropped, so equal monomials have identical representations and the
/// derived `Ord` is a usable canonical order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    exps: Vec<(Var, i32)>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    /// Single variable `Y_{i,q^r}^e`.
    pub fn var(i: Node, r: i32, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        Monomial {
            exps: vec![((i, r), e)],
        }
    }

    /// Build from arbitrary (variable, exponent) pairs; repeated keys are
    /// summed and zeros dropped.
    pub fn from_pairs<I: IntoIterator<Item = (Var, i32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<Var, i32> = BTreeMap::new();
        for (v, e) in pairs {
            let cur = map.entry(v).or_insert(0);
            *cur += e;
            if *cur == 0 {
                map.remove(&v);
            }
        }
        Monomial {
            exps: map.into_iter().collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent of `Y_{i,q^r}`, zero if absent.
    pub fn get(&self, i: Node, r: i32) -> i32 {
        match self.exps.binary_search_by_key(&(i, r), |&(v, _)| v) {
            Ok(pos) => self.exps[pos].1,
            Err(_) => 0,
        }
    }

    /// Iterate entries in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, i32)> + '_ {
        self.exps.iter().copied()
    }

    /// Number of variables with nonzero exponent.
    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        // Linear merge of two sorted entry lists.
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (self.exps.iter().peekable(), other.exps.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => {
                    if va < vb {
                        out.push((va, ea));
                        a.next();
                    } else if vb < va {
                        out.push((vb, eb));
                        b.next();
                    } else {
                        if ea + eb != 0 {
                            out.push((va, ea + eb));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some(_), None) => {
                    out.extend(a.by_ref().copied());
                    break;
                }
                (None, Some(_)) => {
                    out.extend(b.by_ref().copied());
                    break;
                }
                (None, None) => break,
            }
        }
        Monomial { exps: out }
    }

    pub fn invert(&self) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|&(v, e)| (v, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|&(v, e)| (v, e * k)).collect(),
        }
    }

    /// `self * other^{-1}`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.invert())
    }

    /// Largest q-exponent carrying a nonzero entry, if any.
    pub fn max_col(&self) -> Option<i32> {
        self.exps.iter().map(|&((_, r), _)| r).max()
    }

    /// Smallest q-exponent carrying a nonzero entry, if any.
    pub fn min_col(&self) -> Option<i32> {
        self.exps.iter().map(|&((_, r), _)| r).min()
    }

    /// Entries of node `i` as (q-exponent, exponent), ascending.
    pub fn node_entries(&self, i: Node) -> Vec<(i32, i32)> {
        self.exps
            .iter()
            .filter(|&&((j, _), _)| j == i)
            .map(|&((_, r), e)| (r, e))
            .collect()
    }

    /// Nodes with at least one nonzero entry, ascending, deduplicated.
    pub fn support_nodes(&self) -> Vec<Node> {
        let mut out: Vec<Node> = self.exps.iter().map(|&((i, _), _)| i).collect();
        out.dedup();
        out
    }

    /// Map every q-exponent through `f`, keeping exponents. `f` must be
    /// injective on the occupied columns.
    pub fn map_cols(&self, f: impl Fn(i32) -> i32) -> Monomial {
        Monomial::from_pairs(self.exps.iter().map(|&((i, r), e)| ((i, f(r)), e)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (pos, &((i, r), e)) in self.exps.iter().enumerate() {
            if pos > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}_{}", i, r)?;
            if e != 1 {
                write!(f, "^{}", e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Monomial text error with a byte offset into the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("monomial syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parse the monomial grammar:
///
/// ```text
/// monomial := "1" | token (" " token)*
/// token    := INT "_" INT ("^" INT)?
/// ```
///
/// The first INT is the node (1-based, bounded by `rank`), the second the
/// q-exponent, the third the variable exponent (default 1). Repeated
/// variables are merged; zero exponents vanish.
pub fn parse_monomial(s: &str, rank: usize) -> Result<Monomial, ParseError> {
    let err = |pos: usize, msg: &str| ParseError {
        pos,
        msg: msg.to_string(),
    };
    if s == "1" {
        return Ok(Monomial::one());
    }
    if s.is_empty() {
        return Err(err(0, "empty input"));
    }
    let bytes = s.as_bytes();
    let mut pos = 0usize;

    let mut read_int = |pos: &mut usize, what: &str| -> Result<i64, ParseError> {
        let start = *pos;
        let mut p = *pos;
        if p < bytes.len() && bytes[p] == b'-' {
            p += 1;
        }
        let digits_start = p;
        while p < bytes.len() && bytes[p].is_ascii_digit() {
            p += 1;
        }
        if p == digits_start {
            return Err(err(start, &format!("expected integer ({what})")));
        }
        let text = &s[start..p];
        let val: i64 = text
            .parse()
            .map_err(|_| err(start, &format!("integer out of range ({what})")))?;
        *pos = p;
        Ok(val)
    };

    let mut pairs: Vec<(Var, i32)> = Vec::new();
    loop {
        let tok_start = pos;
        let node = read_int(&mut pos, "node")?;
        if node < 1 || node > rank as i64 {
            return Err(err(
                tok_start,
                &format!("node {node} outside 1..={rank}"),
            ));
        }
        if pos >= bytes.len() || bytes[pos] != b'_' {
            return Err(err(pos, "expected '_' after node"));
        }
        pos += 1;
        let qexp = read_int(&mut pos, "q-exponent")?;
        if qexp < i32::MIN as i64 || qexp > i32::MAX as i64 {
            return Err(err(tok_start, "q-exponent out of range"));
        }
        let mut exp = 1i64;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            exp = read_int(&mut pos, "exponent")?;
            if exp < i32::MIN as i64 || exp > i32::MAX as i64 {
                return Err(err(tok_start, "exponent out of range"));
            }
        }
        pairs.push(((node as Node, qexp as i32), exp as i32));
        if pos == bytes.len() {
            break;
        }
        if bytes[pos] != b' ' {
            return Err(err(pos, "expected ' ' between tokens"));
        }
        pos += 1;
        if pos == bytes.len() {
            return Err(err(pos, "trailing space"));
        }
    }
    Ok(Monomial::from_pairs(pairs))
}

/// Integer weight in the basis of fundamental weights, index 0 is node 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn add(&self, other: &Weight) -> Weight {
        assert_eq!(self.0.len(), other.0.len());
        Weight(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (pos, c) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_round_trips() {
        let m = parse_monomial("1", 4).unwrap();
        assert!(m.is_one());
        assert_eq!(m.to_string(), "1");
    }

    #[test]
    fn canonical_text_sorts_and_merges() {
        let m = parse_monomial("2_3^-1 1_0 2_3^2 1_-2^3", 2).unwrap();
        assert_eq!(m.to_string(), "1_-2^3 1_0 2_3");
        assert_eq!(m.get(2, 3), 1);
        assert_eq!(m.get(1, -2), 3);
        assert_eq!(m.get(1, 99), 0);
    }

    #[test]
    fn zero_exponents_vanish() {
        let m = parse_monomial("1_0^0", 1).unwrap();
        assert!(m.is_one());
        let n = parse_monomial("1_0 1_0^-1", 1).unwrap();
        assert!(n.is_one());
    }

    #[test]
    fn rejects_bad_syntax() {
        assert!(parse_monomial("", 2).is_err());
        assert!(parse_monomial("1_", 2).is_err());
        assert!(parse_monomial("1_0  2_1", 2).is_err());
        assert!(parse_monomial("1_0 ", 2).is_err());
        assert!(parse_monomial("3_0", 2).is_err());
        assert!(parse_monomial("0_2", 2).is_err());
        assert!(parse_monomial("1_0^", 2).is_err());
        assert!(parse_monomial("x_0", 2).is_err());
    }

    #[test]
    fn error_positions_point_at_offender() {
        let e = parse_monomial("1_0 9_2", 2).unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_monomial("1_0 2+1", 2).unwrap_err();
        assert_eq!(e.pos, 5);
    }

    #[test]
    fn mul_div_pow() {
        let a = parse_monomial("1_0 2_1^2", 2).unwrap();
        let b = parse_monomial("1_0^-1 2_1", 2).unwrap();
        assert_eq!(a.mul(&b).to_string(), "2_1^3");
        assert_eq!(a.div(&a).to_string(), "1");
        assert_eq!(a.pow(-2).to_string(), "1_0^-2 2_1^-4");
        assert_eq!(a.pow(0).to_string(), "1");
    }

    #[test]
    fn ordering_is_deterministic() {
        let a = parse_monomial("1_0", 2).unwrap();
        let b = parse_monomial("1_0 2_1", 2).unwrap();
        let c = parse_monomial("1_1", 2).unwrap();
        let mut v = vec![c.clone(), b.clone(), a.clone()];
        v.sort();
        assert_eq!(v, vec![a, b, c]);
    }

    #[test]
    fn negative_q_exponents_parse() {
        let m = parse_monomial("1_-2^-1 2_-13", 2).unwrap();
        assert_eq!(m.get(1, -2), -1);
        assert_eq!(m.get(2, -13), 1);
        assert_eq!(m.to_string(), "1_-2^-1 2_-13");
    }
}
