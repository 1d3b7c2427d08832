//! Cartan matrices, symmetrizers, and the data attached to them.
//!
//! Nodes are 1-based throughout. `c(i, j)` is the Cartan matrix entry
//! `C_{ij}`, and the symmetrizers `r_i` are the minimal positive integers
//! with `r_i C_{ij} = r_j C_{ji}`; for the builtin finite types they are the
//! half squared root lengths, with short roots at 1. Spectral parameters of
//! node `i` step by `q^{r_i}`.

use serde::Deserialize;
use thiserror::Error;

use crate::monomial::Node;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CartanKind {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    Custom,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("unknown type name '{0}' (expected a letter A-G and a rank, e.g. B3)")]
    UnknownName(String),
    #[error("rank {rank} invalid for type {kind}: {why}")]
    BadRank {
        kind: char,
        rank: usize,
        why: &'static str,
    },
    #[error("matrix is not a generalized Cartan matrix: {0}")]
    NotGcm(String),
    #[error("matrix is not symmetrizable")]
    NotSymmetrizable,
    #[error("bad symmetrizers: {0}")]
    BadSymmetrizers(String),
    #[error("matrix JSON: {0}")]
    Json(String),
}

/// A symmetrizable generalized Cartan matrix plus the extra structure the
/// character computations use.
#[derive(Clone, Debug)]
pub struct CartanData {
    pub kind: CartanKind,
    rank: usize,
    /// Row-major `rank x rank` entries.
    c: Vec<i64>,
    /// Minimal positive symmetrizers.
    r: Vec<i64>,
    /// Node involution induced by `-w_0`; identity when unknown.
    bar: Vec<Node>,
    /// q-exponent shift between a simple module's highest and lowest
    /// variables; `None` outside the builtin finite types.
    twist: Option<i64>,
    /// Whether `r_i >= -C_{ji}` holds for every adjacent pair, which the
    /// top-column peeling in `factor_over_a` relies on.
    peel_safe: bool,
}

impl CartanData {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cartan matrix entry `C_{ij}`, 1-based.
    pub fn c(&self, i: Node, j: Node) -> i64 {
        self.c[(i as usize - 1) * self.rank + (j as usize - 1)]
    }

    /// Symmetrizer of node `i`.
    pub fn r(&self, i: Node) -> i64 {
        self.r[i as usize - 1]
    }

    pub fn bar(&self, i: Node) -> Node {
        self.bar[i as usize - 1]
    }

    pub fn twist(&self) -> Option<i64> {
        self.twist
    }

    pub fn peel_safe(&self) -> bool {
        self.peel_safe
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> {
        1..=self.rank as Node
    }

    /// Nodes `j != i` with `C_{ji} < 0`.
    pub fn neighbors(&self, i: Node) -> Vec<Node> {
        self.nodes()
            .filter(|&j| j != i && self.c(j, i) < 0)
            .collect()
    }

    pub fn is_adjacent(&self, i: Node, j: Node) -> bool {
        i != j && self.c(i, j) < 0
    }

    /// Short display name for diagnostics.
    pub fn name(&self) -> String {
        let letter = match self.kind {
            CartanKind::A => 'A',
            CartanKind::B => 'B',
            CartanKind::C => 'C',
            CartanKind::D => 'D',
            CartanKind::E => 'E',
            CartanKind::F => 'F',
            CartanKind::G => 'G',
            CartanKind::Custom => return format!("custom(rank {})", self.rank),
        };
        format!("{}{}", letter, self.rank)
    }

    /// Detects the path shape with a single multiple bond at the far end:
    /// `C_{i,i+1} = -1` for all `i`, `C_{i+1,i} = -1` for `i < n-1`, and
    /// `C_{n,n-1} = -p` with `p >= 2`. Returns `p`. Rank 1 and plain type A
    /// paths return `None`.
    pub fn generalized_b_p(&self) -> Option<i64> {
        let n = self.rank;
        if n < 2 {
            return None;
        }
        for i in 1..=n as Node {
            for j in 1..=n as Node {
                if i == j {
                    continue;
                }
                let want = if j == i + 1 || i == j + 1 {
                    if i as usize == n && j as usize == n - 1 {
                        continue; // checked below
                    }
                    -1
                } else {
                    0
                };
                if self.c(i, j) != want {
                    return None;
                }
            }
        }
        let p = -self.c(n as Node, n as Node - 1);
        if p >= 2 {
            Some(p)
        } else {
            None
        }
    }

    /// Builtin finite type from a compact name like `"A1"`, `"B3"`, `"E8"`.
    pub fn from_name(name: &str) -> Result<CartanData, CartanError> {
        let mut chars = name.chars();
        let letter = chars
            .next()
            .ok_or_else(|| CartanError::UnknownName(name.to_string()))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| CartanError::UnknownName(name.to_string()))?;
        let kind = match letter.to_ascii_uppercase() {
            'A' => CartanKind::A,
            'B' => CartanKind::B,
            'C' => CartanKind::C,
            'D' => CartanKind::D,
            'E' => CartanKind::E,
            'F' => CartanKind::F,
            'G' => CartanKind::G,
            _ => return Err(CartanError::UnknownName(name.to_string())),
        };
        CartanData::builtin(kind, rank)
    }

    /// Builtin finite type tables.
    pub fn builtin(kind: CartanKind, rank: usize) -> Result<CartanData, CartanError> {
        let n = rank;
        let bad = |kind: char, why: &'static str| CartanError::BadRank {
            kind,
            rank: n,
            why,
        };
        // Edges as (i, j, C_{ij}, C_{ji}); unlisted off-diagonal pairs are 0.
        let mut edges: Vec<(usize, usize, i64, i64)> = Vec::new();
        let chain = |upto: usize| -> Vec<(usize, usize, i64, i64)> {
            (1..upto).map(|i| (i, i + 1, -1, -1)).collect()
        };
        let (r, bar, twist): (Vec<i64>, Vec<Node>, i64) = match kind {
            CartanKind::A => {
                if n < 1 {
                    return Err(bad('A', "needs rank >= 1"));
                }
                edges = chain(n);
                (
                    vec![1; n],
                    (1..=n).map(|i| (n + 1 - i) as Node).collect(),
                    (n + 1) as i64,
                )
            }
            CartanKind::B => {
                if n < 2 {
                    return Err(bad('B', "needs rank >= 2"));
                }
                edges = chain(n - 1);
                edges.push((n - 1, n, -1, -2));
                let mut r = vec![2; n];
                r[n - 1] = 1;
                (r, (1..=n as Node).collect(), (4 * n - 2) as i64)
            }
            CartanKind::C => {
                if n < 2 {
                    return Err(bad('C', "needs rank >= 2"));
                }
                edges = chain(n - 1);
                edges.push((n - 1, n, -2, -1));
                let mut r = vec![1; n];
                r[n - 1] = 2;
                (r, (1..=n as Node).collect(), (2 * n + 2) as i64)
            }
            CartanKind::D => {
                if n < 3 {
                    return Err(bad('D', "needs rank >= 3"));
                }
                edges = chain(n - 2);
                edges.push((n - 2, n - 1, -1, -1));
                edges.push((n - 2, n, -1, -1));
                let mut bar: Vec<Node> = (1..=n as Node).collect();
                if n % 2 == 1 {
                    bar.swap(n - 2, n - 1);
                }
                (vec![1; n], bar, (2 * n - 2) as i64)
            }
            CartanKind::E => {
                if !(6..=8).contains(&n) {
                    return Err(bad('E', "needs rank 6, 7 or 8"));
                }
                edges.push((1, 3, -1, -1));
                edges.push((2, 4, -1, -1));
                for i in 3..n {
                    edges.push((i, i + 1, -1, -1));
                }
                let mut bar: Vec<Node> = (1..=n as Node).collect();
                if n == 6 {
                    bar.swap(0, 5);
                    bar.swap(2, 4);
                }
                let twist = match n {
                    6 => 12,
                    7 => 18,
                    _ => 30,
                };
                (vec![1; n], bar, twist)
            }
            CartanKind::F => {
                if n != 4 {
                    return Err(bad('F', "needs rank 4"));
                }
                edges.push((1, 2, -1, -1));
                edges.push((2, 3, -1, -2));
                edges.push((3, 4, -1, -1));
                (vec![2, 2, 1, 1], vec![1, 2, 3, 4], 18)
            }
            CartanKind::G => {
                if n != 2 {
                    return Err(bad('G', "needs rank 2"));
                }
                edges.push((1, 2, -1, -3));
                (vec![3, 1], vec![1, 2], 12)
            }
            CartanKind::Custom => {
                return Err(CartanError::UnknownName("custom".to_string()))
            }
        };
        let mut c = vec![0i64; n * n];
        for i in 0..n {
            c[i * n + i] = 2;
        }
        for (i, j, cij, cji) in edges {
            c[(i - 1) * n + (j - 1)] = cij;
            c[(j - 1) * n + (i - 1)] = cji;
        }
        let cd = CartanData {
            kind,
            rank: n,
            c,
            r,
            bar,
            twist: Some(twist),
            peel_safe: true,
        };
        debug_assert!(cd.check_symmetric());
        debug_assert!(cd.compute_peel_safe());
        Ok(cd)
    }

    /// Custom symmetrizable generalized Cartan matrix. Symmetrizers are
    /// validated when given and computed minimally otherwise. The bar
    /// involution is taken to be the identity and no twist is available, so
    /// operations needing the lowest-monomial shift refuse custom data.
    pub fn custom(
        matrix: Vec<Vec<i64>>,
        symmetrizers: Option<Vec<i64>>,
    ) -> Result<CartanData, CartanError> {
        let n = matrix.len();
        if n == 0 {
            return Err(CartanError::NotGcm("empty matrix".to_string()));
        }
        if n > Node::MAX as usize {
            return Err(CartanError::NotGcm(format!("rank {n} too large")));
        }
        let mut c = vec![0i64; n * n];
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(CartanError::NotGcm(format!(
                    "row {} has length {}, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if i == j && v != 2 {
                    return Err(CartanError::NotGcm(format!(
                        "diagonal entry C_{},{} = {v}, expected 2",
                        i + 1,
                        j + 1
                    )));
                }
                if i != j && v > 0 {
                    return Err(CartanError::NotGcm(format!(
                        "off-diagonal entry C_{},{} = {v} > 0",
                        i + 1,
                        j + 1
                    )));
                }
                c[i * n + j] = v;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if (c[i * n + j] == 0) != (c[j * n + i] == 0) {
                    return Err(CartanError::NotGcm(format!(
                        "C_{},{} and C_{},{} disagree on vanishing",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let r = match symmetrizers {
            Some(r) => {
                if r.len() != n {
                    return Err(CartanError::BadSymmetrizers(format!(
                        "{} values for rank {n}",
                        r.len()
                    )));
                }
                if r.iter().any(|&v| v <= 0) {
                    return Err(CartanError::BadSymmetrizers(
                        "must be positive".to_string(),
                    ));
                }
                for i in 0..n {
                    for j in 0..n {
                        if r[i] * c[i * n + j] != r[j] * c[j * n + i] {
                            return Err(CartanError::BadSymmetrizers(format!(
                                "r_{} C_{},{} != r_{} C_{},{}",
                                i + 1,
                                i + 1,
                                j + 1,
                                j + 1,
                                j + 1,
                                i + 1
                            )));
                        }
                    }
                }
                r
            }
            None => minimal_symmetrizers(&c, n)?,
        };
        let mut cd = CartanData {
            kind: CartanKind::Custom,
            rank: n,
            c,
            r,
            bar: (1..=n as Node).collect(),
            twist: None,
            peel_safe: false,
        };
        cd.peel_safe = cd.compute_peel_safe();
        Ok(cd)
    }

    /// Custom matrix from JSON: `{"matrix": [[..]], "symmetrizers": [..]}`
    /// with `symmetrizers` optional.
    pub fn from_matrix_json(text: &str) -> Result<CartanData, CartanError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            matrix: Vec<Vec<i64>>,
            #[serde(default)]
            symmetrizers: Option<Vec<i64>>,
        }
        let raw: Raw =
            serde_json::from_str(text).map_err(|e| CartanError::Json(e.to_string()))?;
        CartanData::custom(raw.matrix, raw.symmetrizers)
    }

    fn check_symmetric(&self) -> bool {
        let n = self.rank;
        (0..n).all(|i| {
            (0..n).all(|j| self.c[i * n + j] * self.r[i] == self.c[j * n + i] * self.r[j])
        })
    }

    fn compute_peel_safe(&self) -> bool {
        self.nodes().all(|i| {
            self.neighbors(i)
                .into_iter()
                .all(|j| self.r(i) >= -self.c(j, i))
        })
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Minimal positive integers `r_i` with `r_i C_{ij} = r_j C_{ji}`, found by
/// propagating exact ratios along nonzero entries and clearing denominators
/// per connected component. Every edge is revisited in both directions, so
/// inconsistent cycles are rejected.
fn minimal_symmetrizers(c: &[i64], n: usize) -> Result<Vec<i64>, CartanError> {
    let mut out = vec![0i64; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        // ratio[i] = reduced (num, den) with r_i / r_root = num / den.
        let mut ratio: Vec<Option<(i64, i64)>> = vec![None; n];
        ratio[root] = Some((1, 1));
        seen[root] = true;
        let mut comp = vec![root];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let (ni, di) = ratio[i].unwrap();
            for j in 0..n {
                if i == j || c[i * n + j] == 0 {
                    continue;
                }
                // r_j / r_root = (r_i / r_root) * C_{ij} / C_{ji}
                let (mut num, mut den) = (ni * c[i * n + j], di * c[j * n + i]);
                if den < 0 {
                    num = -num;
                    den = -den;
                }
                let g = gcd(num, den).max(1);
                let cand = (num / g, den / g);
                match ratio[j] {
                    None => {
                        ratio[j] = Some(cand);
                        seen[j] = true;
                        comp.push(j);
                        stack.push(j);
                    }
                    Some(prev) => {
                        if prev != cand {
                            return Err(CartanError::NotSymmetrizable);
                        }
                    }
                }
            }
        }
        let mut lcm = 1i64;
        for &i in &comp {
            let d = ratio[i].unwrap().1;
            lcm = lcm / gcd(lcm, d) * d;
        }
        let mut vals: Vec<i64> = comp
            .iter()
            .map(|&i| {
                let (a, d) = ratio[i].unwrap();
                a * (lcm / d)
            })
            .collect();
        let mut g = 0;
        for &v in &vals {
            g = gcd(g, v);
        }
        if g > 1 {
            for v in &mut vals {
                *v /= g;
            }
        }
        for (&i, &v) in comp.iter().zip(&vals) {
            if v <= 0 {
                return Err(CartanError::NotSymmetrizable);
            }
            out[i] = v;
        }
    }
    Ok(out)
}
