//! The saturation engine: node expansions, Frenkel-Mukhin completion from a
//! dominant head, property checks, and the certified presence explorer.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::calculus::{
    a_inverse, a_monomial, factor_over_a, is_dominant, is_j_dominant, is_thin,
    lowest_monomial_formula,
};
use crate::cartan::CartanData;
use crate::monomial::{parse_monomial, Monomial, Node};
use crate::qchar::QCharacter;
use crate::sl2::normal_writing_cols;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("node {node} outside 1..={rank}")]
    NodeRange { node: Node, rank: usize },
    #[error("monomial has a negative exponent on node {node}: {m}")]
    NotJDominant { node: Node, m: Monomial },
    #[error("monomial is not dominant: {0}")]
    NotDominant(Monomial),
    #[error("{0} needs r_i >= -C_(ji) on all edges of the diagram")]
    NotPeelSafe(String),
    #[error("script step {step}: walk is at {expected}, script says {got}")]
    ScriptMismatch {
        step: usize,
        expected: Monomial,
        got: Monomial,
    },
    #[error("script step {step}: {m} is not dominant on node {node}")]
    StepNotDominant { step: usize, node: Node, m: Monomial },
    #[error("script step {step}: ancestor candidates exceed {limit}")]
    TooManyCandidates { step: usize, limit: usize },
    #[error("script JSON: {0}")]
    ScriptJson(String),
}

/// Terms of the lifted node-`j` expansion of `m`: triples of (monomial,
/// coefficient, number of `A^{-1}` factors). The zero-factor term is `m`
/// itself. Distinct factor multisets give distinct monomials, so the factor
/// count per monomial is well defined.
fn expansion_terms(
    cd: &CartanData,
    m: &Monomial,
    j: Node,
) -> Result<Vec<(Monomial, i64, u32)>, EngineError> {
    if j < 1 || j as usize > cd.rank() {
        return Err(EngineError::NodeRange {
            node: j,
            rank: cd.rank(),
        });
    }
    let d = cd.r(j) as i32;
    let mut cols = BTreeMap::new();
    for (r, e) in m.node_entries(j) {
        if e < 0 {
            return Err(EngineError::NotJDominant {
                node: j,
                m: m.clone(),
            });
        }
        cols.insert(r, e as i64);
    }
    let strings = normal_writing_cols(&cols, d);
    // Per string, the A^{-1} product and factor count of each flip depth.
    let per_string: Vec<Vec<(Monomial, u32)>> = strings
        .iter()
        .map(|s| {
            (0..=s.len)
                .map(|t| {
                    let mut a = Monomial::one();
                    for c in s.flip_labels(d, t) {
                        a = a.mul(&a_inverse(cd, j, c));
                    }
                    (a, t)
                })
                .collect()
        })
        .collect();
    let mut acc: Vec<(Monomial, u32)> = vec![(Monomial::one(), 0)];
    for choices in &per_string {
        let mut next = Vec::with_capacity(acc.len() * choices.len());
        for (cur, n) in &acc {
            for (a, t) in choices {
                next.push((cur.mul(a), n + t));
            }
        }
        acc = next;
    }
    let mut out: BTreeMap<Monomial, (i64, u32)> = BTreeMap::new();
    for (a, n) in acc {
        let term = m.mul(&a);
        let e = out.entry(term).or_insert((0, n));
        e.0 += 1;
        debug_assert_eq!(e.1, n, "factor multisets must determine monomials");
    }
    Ok(out.into_iter().map(|(mm, (c, n))| (mm, c, n)).collect())
}

/// Lift of the simple rank-one character of the node-`j` restriction of `m`,
/// as a q-character headed at `m`.
pub fn l_expansion(cd: &CartanData, m: &Monomial, j: Node) -> Result<QCharacter, EngineError> {
    let terms = expansion_terms(cd, m, j)?;
    Ok(QCharacter::from_terms(
        m.clone(),
        terms.into_iter().map(|(mm, c, _)| (mm, c)).collect(),
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct FmOptions {
    /// Stop once a pending grade exceeds this total A-degree.
    pub max_v: u32,
    /// Stop once this many distinct monomials have been produced.
    pub max_terms: usize,
    /// Abort as soon as a dominant monomial other than the head is retired.
    pub strict: bool,
    /// Worker threads per grade: 0 uses the global pool, 1 is sequential.
    pub threads: usize,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions {
            max_v: 10_000,
            max_terms: 5_000_000,
            strict: false,
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    VGradeCap,
    TermCap,
    ExtraDominant(Monomial),
}

#[derive(Clone, Debug)]
pub struct FmDiagnostics {
    pub stop: StopReason,
    /// Number of A-degree grades retired.
    pub rounds: u32,
    /// False when some retired monomial had a color it is not dominant on
    /// whose incoming demand missed the assigned multiplicity.
    pub color_consistent: bool,
    /// Dominant non-head monomials retired, in retirement order.
    pub extra_dominant: Vec<Monomial>,
}

#[derive(Clone, Debug)]
pub struct FmRun {
    pub chi: QCharacter,
    pub diag: FmDiagnostics,
}

impl FmRun {
    pub fn converged(&self) -> bool {
        self.diag.stop == StopReason::Converged
    }
}

struct GradeResult {
    mu: Monomial,
    mult: i64,
    inconsistent: bool,
    /// (target grade, monomial, color index, demand increment)
    expansions: Vec<(u32, Monomial, usize, i64)>,
}

/// Saturation from a dominant head.
///
/// Monomials are retired grade by grade in their total A-degree below the
/// head; demands flow strictly downward, so when a grade is reached every
/// incoming demand for it is known. The multiplicity of a monomial is the
/// maximum demand over colors; a color the monomial is not dominant on must
/// have demanded exactly that multiplicity, otherwise the run is flagged
/// color-inconsistent. Grades are processed in parallel with an
/// order-preserving merge, so results are independent of thread count.
pub fn fm_qchar(cd: &CartanData, head: &Monomial, opts: &FmOptions) -> Result<FmRun, EngineError> {
    if !is_dominant(head) {
        return Err(EngineError::NotDominant(head.clone()));
    }
    if let Some(&top) = head.support_nodes().last() {
        if top as usize > cd.rank() {
            return Err(EngineError::NodeRange {
                node: top,
                rank: cd.rank(),
            });
        }
    }
    let n = cd.rank();
    let pool = if opts.threads >= 2 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .ok()
    } else {
        None
    };

    let mut pending: BTreeMap<u32, BTreeMap<Monomial, Vec<i64>>> = BTreeMap::new();
    pending
        .entry(0)
        .or_default()
        .insert(head.clone(), vec![0; n]);
    let mut terms: BTreeMap<Monomial, i64> = BTreeMap::new();
    let mut rounds = 0u32;
    let mut color_consistent = true;
    let mut extra_dominant: Vec<Monomial> = Vec::new();
    let mut stop = StopReason::Converged;

    'outer: loop {
        let (v, grade) = match pending.pop_first() {
            Some(x) => x,
            None => break,
        };
        if v > opts.max_v {
            stop = StopReason::VGradeCap;
            break;
        }
        rounds += 1;
        let entries: Vec<(Monomial, Vec<i64>)> = grade.into_iter().collect();
        let work = |(mu, demands): &(Monomial, Vec<i64>)| -> GradeResult {
            let is_head = mu == head;
            let mult = if is_head {
                1
            } else {
                demands.iter().copied().max().unwrap_or(0)
            };
            let mut inconsistent = false;
            let mut expansions = Vec::new();
            for i in 1..=n as Node {
                let idx = i as usize - 1;
                if is_j_dominant(mu, i) {
                    let lambda = mult - demands[idx];
                    debug_assert!(lambda >= 0);
                    if lambda > 0 && mu.node_entries(i).iter().any(|&(_, e)| e > 0) {
                        let expanded =
                            expansion_terms(cd, mu, i).expect("dominance checked above");
                        for (m2, coeff, na) in expanded {
                            if na > 0 {
                                expansions.push((v + na, m2, idx, lambda * coeff));
                            }
                        }
                    }
                } else if demands[idx] != mult {
                    inconsistent = true;
                }
            }
            GradeResult {
                mu: mu.clone(),
                mult,
                inconsistent,
                expansions,
            }
        };
        let results: Vec<GradeResult> = match (&pool, opts.threads) {
            (_, 1) => entries.iter().map(work).collect(),
            (Some(p), _) => p.install(|| entries.par_iter().map(work).collect()),
            (None, _) => entries.par_iter().map(work).collect(),
        };
        for res in results {
            if res.mult == 0 {
                continue;
            }
            if res.inconsistent {
                color_consistent = false;
            }
            if is_dominant(&res.mu) && res.mu != *head {
                extra_dominant.push(res.mu.clone());
                if opts.strict {
                    terms.insert(res.mu.clone(), res.mult);
                    stop = StopReason::ExtraDominant(res.mu);
                    break 'outer;
                }
            }
            terms.insert(res.mu.clone(), res.mult);
            for (v2, m2, idx, delta) in res.expansions {
                debug_assert!(v2 > v);
                pending
                    .entry(v2)
                    .or_default()
                    .entry(m2)
                    .or_insert_with(|| vec![0; n])[idx] += delta;
            }
        }
        if terms.len() > opts.max_terms {
            stop = StopReason::TermCap;
            break;
        }
    }

    Ok(FmRun {
        chi: QCharacter::from_terms(head.clone(), terms),
        diag: FmDiagnostics {
            stop,
            rounds,
            color_consistent,
            extra_dominant,
        },
    })
}

/// Saturation of a single variable `Y_{i,q^r}`.
pub fn fundamental_qchar(
    cd: &CartanData,
    i: Node,
    r: i32,
    opts: &FmOptions,
) -> Result<FmRun, EngineError> {
    fm_qchar(cd, &Monomial::var(i, r, 1), opts)
}

/// Character of the tensor product of fundamentals matching `m`: the product
/// of the saturations of its variables. Meaningful when every factor
/// converges; the first non-converged factor's stop reason is reported.
pub fn standard_qchar(
    cd: &CartanData,
    m: &Monomial,
    opts: &FmOptions,
) -> Result<FmRun, EngineError> {
    if !is_dominant(m) {
        return Err(EngineError::NotDominant(m.clone()));
    }
    let mut cache: BTreeMap<(Node, i32), FmRun> = BTreeMap::new();
    let mut chi = QCharacter::of_head(Monomial::one());
    let mut rounds = 0u32;
    let mut color_consistent = true;
    let mut stop = StopReason::Converged;
    for ((i, r), e) in m.iter() {
        if !cache.contains_key(&(i, r)) {
            let run = fundamental_qchar(cd, i, r, opts)?;
            cache.insert((i, r), run);
        }
        let run = &cache[&(i, r)];
        rounds += run.diag.rounds;
        color_consistent &= run.diag.color_consistent;
        if stop == StopReason::Converged && run.diag.stop != StopReason::Converged {
            stop = run.diag.stop.clone();
        }
        for _ in 0..e {
            chi = chi.mul(&run.chi);
        }
    }
    Ok(FmRun {
        chi,
        diag: FmDiagnostics {
            stop,
            rounds,
            color_consistent,
            extra_dominant: Vec::new(),
        },
    })
}

/// Predicate summary of a saturated character.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub run: FmRun,
    /// Unique dominant monomial (the head) and converged.
    pub special: bool,
    /// Unique antidominant monomial and converged.
    pub antispecial: bool,
    /// Every monomial thin.
    pub all_thin: bool,
    /// Lowest monomial predicted by the bar-involution twist, when known.
    pub lowest_expected: Option<Monomial>,
    /// Whether the unique antidominant term matches `lowest_expected`.
    pub lowest_matches: Option<bool>,
}

pub fn check_properties(
    cd: &CartanData,
    head: &Monomial,
    opts: &FmOptions,
) -> Result<PropertyReport, EngineError> {
    let run = fm_qchar(cd, head, opts)?;
    let converged = run.converged();
    let special = converged && run.diag.extra_dominant.is_empty();
    let anti = run.chi.antidominant_terms();
    let antispecial = converged && anti.len() == 1;
    let all_thin = run.chi.iter().all(|(m, _)| is_thin(m));
    let lowest_expected = if cd.twist().is_some() {
        Some(lowest_monomial_formula(cd, head).expect("head is dominant"))
    } else {
        None
    };
    let lowest_matches = match (&lowest_expected, converged) {
        (Some(low), true) => Some(anti.len() == 1 && anti[0].0 == *low && anti[0].1 == 1),
        _ => None,
    };
    Ok(PropertyReport {
        run,
        special,
        antispecial,
        all_thin,
        lowest_expected,
        lowest_matches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorerStep {
    pub m: Monomial,
    pub node: Node,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplorerScript {
    pub steps: Vec<ExplorerStep>,
    pub targets: Vec<Monomial>,
}

/// Script JSON: `{"steps": [{"m": "...", "node": 2}, ...], "targets": ["..."]}`.
pub fn script_from_json(cd: &CartanData, text: &str) -> Result<ExplorerScript, EngineError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawStep {
        m: String,
        node: Node,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        steps: Vec<RawStep>,
        #[serde(default)]
        targets: Vec<String>,
    }
    let raw: Raw =
        serde_json::from_str(text).map_err(|e| EngineError::ScriptJson(e.to_string()))?;
    let parse = |s: &str| {
        parse_monomial(s, cd.rank()).map_err(|e| EngineError::ScriptJson(e.to_string()))
    };
    Ok(ExplorerScript {
        steps: raw
            .steps
            .iter()
            .map(|s| {
                Ok(ExplorerStep {
                    m: parse(&s.m)?,
                    node: s.node,
                })
            })
            .collect::<Result<_, EngineError>>()?,
        targets: raw
            .targets
            .iter()
            .map(|s| parse(s))
            .collect::<Result<_, EngineError>>()?,
    })
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub m: Monomial,
    pub node: Node,
    /// Ancestor candidates whose expansion contains `m`, spoiling the
    /// inference that `m` heads its own string.
    pub blocking: Vec<Monomial>,
    /// Whether the step's string contents were certified present.
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct ExploreReport {
    pub head: Monomial,
    pub steps: Vec<StepReport>,
    /// Monomials proved to occur in the character of the head's simple
    /// module.
    pub certified: BTreeSet<Monomial>,
    /// Monomials reached through steps whose inference did not close.
    pub heuristic: BTreeSet<Monomial>,
    pub missing_targets: Vec<Monomial>,
}

impl ExploreReport {
    pub fn all_targets_certified(&self) -> bool {
        self.missing_targets.is_empty()
    }
}

const CANDIDATE_LIMIT: usize = 1 << 14;

/// Nonempty upward moves of `m` by node-`j` A-variables drawn from its
/// factorization over `head`, kept when the result is `j`-dominant and still
/// under the head. Any string containing `m` in the restriction to node `j`
/// must be headed at one of these or at `m` itself.
pub fn ancestor_candidates(
    cd: &CartanData,
    head: &Monomial,
    m: &Monomial,
    j: Node,
    step: usize,
) -> Result<Vec<Monomial>, EngineError> {
    let fact = match factor_over_a(cd, m, head) {
        Some(f) => f,
        None => return Ok(Vec::new()),
    };
    let slots = fact.node_factors(j);
    let mut combos: usize = 1;
    for &(_, v) in &slots {
        combos = combos.saturating_mul(v as usize + 1);
        if combos > CANDIDATE_LIMIT {
            return Err(EngineError::TooManyCandidates {
                step,
                limit: CANDIDATE_LIMIT,
            });
        }
    }
    let mut out = Vec::new();
    let mut pick = vec![0i64; slots.len()];
    loop {
        // Advance the mixed-radix counter.
        let mut k = 0;
        loop {
            if k == slots.len() {
                return Ok(out);
            }
            pick[k] += 1;
            if pick[k] <= slots[k].1 {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        let mut cand = m.clone();
        for (idx, &(c, _)) in slots.iter().enumerate() {
            if pick[idx] > 0 {
                cand = cand.mul(&a_monomial(cd, j, c).pow(pick[idx] as i32));
            }
        }
        if is_j_dominant(&cand, j) && factor_over_a(cd, &cand, head).is_some() {
            out.push(cand);
        }
    }
}

/// Walk a guided script down from `head`.
///
/// Each step asserts the walk is at the step's monomial, checks that no
/// ancestor candidate's node expansion contains it (so the monomial heads
/// its own string on that node), and then descends to the lowest term of
/// its own expansion. When the check passes and the walk is still on
/// certified ground, every term of the expansion is certified present in
/// the simple character of `head`; otherwise terms are kept as heuristic.
pub fn explore(
    cd: &CartanData,
    head: &Monomial,
    script: &ExplorerScript,
) -> Result<ExploreReport, EngineError> {
    if !cd.peel_safe() {
        return Err(EngineError::NotPeelSafe("explore".to_string()));
    }
    if !is_dominant(head) {
        return Err(EngineError::NotDominant(head.clone()));
    }
    let mut certified: BTreeSet<Monomial> = BTreeSet::new();
    let mut heuristic: BTreeSet<Monomial> = BTreeSet::new();
    certified.insert(head.clone());
    let mut position = head.clone();
    let mut position_certified = true;
    let mut steps = Vec::new();
    for (idx, step) in script.steps.iter().enumerate() {
        if step.m != position {
            return Err(EngineError::ScriptMismatch {
                step: idx,
                expected: position,
                got: step.m.clone(),
            });
        }
        let j = step.node;
        if !is_j_dominant(&position, j) {
            return Err(EngineError::StepNotDominant {
                step: idx,
                node: j,
                m: position,
            });
        }
        let mut blocking = Vec::new();
        for cand in ancestor_candidates(cd, head, &position, j, idx)? {
            let contains = expansion_terms(cd, &cand, j)?
                .iter()
                .any(|(t, _, _)| *t == position);
            if contains {
                blocking.push(cand);
            }
        }
        let ok = blocking.is_empty() && position_certified;
        let expansion = expansion_terms(cd, &position, j)?;
        let full_flip = expansion
            .iter()
            .max_by_key(|&&(_, _, na)| na)
            .expect("expansion includes the zero-flip term")
            .0
            .clone();
        for (t, _, _) in &expansion {
            if ok {
                certified.insert(t.clone());
            } else if !certified.contains(t) {
                heuristic.insert(t.clone());
            }
        }
        steps.push(StepReport {
            m: position.clone(),
            node: j,
            blocking,
            certified: ok,
        });
        position = full_flip;
        position_certified = ok;
    }
    let missing_targets = script
        .targets
        .iter()
        .filter(|t| !certified.contains(*t))
        .cloned()
        .collect();
    Ok(ExploreReport {
        head: head.clone(),
        steps,
        certified,
        heuristic,
        missing_targets,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct AutoExploreOptions {
    pub max_monomials: usize,
}

impl Default for AutoExploreOptions {
    fn default() -> Self {
        AutoExploreOptions {
            max_monomials: 10_000,
        }
    }
}

/// Breadth-first presence exploration without a script: expand every
/// reached monomial on every node it is dominant on, certifying string
/// contents whenever the no-higher-ancestor check closes, and tracking the
/// rest as heuristic. Upgrades re-enqueue, so the certified set is a
/// fixpoint when the budget suffices.
pub fn auto_explore(
    cd: &CartanData,
    head: &Monomial,
    opts: &AutoExploreOptions,
) -> Result<ExploreReport, EngineError> {
    if !cd.peel_safe() {
        return Err(EngineError::NotPeelSafe("explore".to_string()));
    }
    if !is_dominant(head) {
        return Err(EngineError::NotDominant(head.clone()));
    }
    let mut status: BTreeMap<Monomial, bool> = BTreeMap::new();
    status.insert(head.clone(), true);
    let mut queue: VecDeque<Monomial> = VecDeque::new();
    queue.push_back(head.clone());
    let mut guard: usize = 0;
    while let Some(mu) = queue.pop_front() {
        guard += 1;
        if guard > opts.max_monomials.saturating_mul(2 * cd.rank() + 2) {
            break;
        }
        let mu_cert = *status.get(&mu).unwrap_or(&false);
        for j in cd.nodes() {
            if !is_j_dominant(&mu, j) || mu.node_entries(j).iter().all(|&(_, e)| e <= 0) {
                continue;
            }
            let candidates = match ancestor_candidates(cd, head, &mu, j, 0) {
                Ok(c) => c,
                Err(EngineError::TooManyCandidates { .. }) => {
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mut blocked = false;
            for cand in candidates {
                if expansion_terms(cd, &cand, j)?
                    .iter()
                    .any(|(t, _, _)| *t == mu)
                {
                    blocked = true;
                    break;
                }
            }
            let ok = mu_cert && !blocked;
            for (t, _, _) in expansion_terms(cd, &mu, j)? {
                let prev = status.get(&t).copied();
                let fresh = prev.is_none();
                let upgraded = prev == Some(false) && ok;
                if fresh && status.len() >= opts.max_monomials {
                    continue;
                }
                if fresh || upgraded {
                    status.insert(t.clone(), ok || prev == Some(true));
                    queue.push_back(t);
                }
            }
        }
    }
    let mut certified = BTreeSet::new();
    let mut heuristic = BTreeSet::new();
    for (m, ok) in status {
        if ok {
            certified.insert(m);
        } else {
            heuristic.insert(m);
        }
    }
    Ok(ExploreReport {
        head: head.clone(),
        steps: Vec::new(),
        certified,
        heuristic,
        missing_targets: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::parse_monomial;

    fn cd(name: &str) -> CartanData {
        CartanData::from_name(name).unwrap()
    }

    fn m(cd: &CartanData, s: &str) -> Monomial {
        parse_monomial(s, cd.rank()).unwrap()
    }

    #[test]
    fn sl2_fundamental() {
        let a1 = cd("A1");
        let run = fundamental_qchar(&a1, 1, 0, &FmOptions::default()).unwrap();
        assert!(run.converged());
        assert!(run.diag.color_consistent);
        assert_eq!(run.chi.len(), 2);
        assert_eq!(run.chi.get(&m(&a1, "1_2^-1")), 1);
    }

    #[test]
    fn sl2_kr_modules_match_closed_form() {
        let a1 = cd("A1");
        for k in 1..=6u32 {
            let head = crate::sl2::kr_monomial_sl2(k, 0);
            let run = fm_qchar(&a1, &head, &FmOptions::default()).unwrap();
            assert!(run.converged());
            assert!(run
                .chi
                .same_terms(&crate::sl2::kr_qchar_sl2(k, 0)));
        }
    }

    #[test]
    fn a2_fundamental_three_terms() {
        let a2 = cd("A2");
        let run = fundamental_qchar(&a2, 1, 0, &FmOptions::default()).unwrap();
        assert!(run.converged());
        assert_eq!(run.chi.len(), 3);
        assert_eq!(run.chi.get(&m(&a2, "1_2^-1 2_1")), 1);
        assert_eq!(run.chi.get(&m(&a2, "2_3^-1")), 1);
        assert!(run.diag.extra_dominant.is_empty());
    }

    #[test]
    fn a2_adjoint_has_doubled_term() {
        // L(1_0 2_1): eight distinct monomials, total multiplicity nine,
        // with multiplicity two on 2_1 2_3^-1. Demands for it arrive only
        // through color 2, whose string pair forces the doubling.
        let a2 = cd("A2");
        let head = m(&a2, "1_0 2_1");
        let run = fm_qchar(&a2, &head, &FmOptions::default()).unwrap();
        assert!(run.converged());
        assert!(run.diag.color_consistent);
        assert_eq!(run.chi.len(), 8);
        assert_eq!(run.chi.total_multiplicity(), 9);
        assert_eq!(run.chi.get(&m(&a2, "2_1 2_3^-1")), 2);
        assert!(run.diag.extra_dominant.is_empty());
    }

    #[test]
    fn l_expansion_lifts_strings() {
        let a2 = cd("A2");
        let head = m(&a2, "1_0");
        let e = l_expansion(&a2, &head, 1).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.get(&m(&a2, "1_2^-1 2_1")), 1);
        let e2 = l_expansion(&a2, &head, 2).unwrap();
        assert_eq!(e2.len(), 1);
        assert!(l_expansion(&a2, &m(&a2, "1_2^-1 2_1"), 1).is_err());
    }

    #[test]
    fn strictness_stops_on_extra_dominant() {
        // The A2 standard head 1_0 1_2 is not special: FM in strict mode
        // must abort once a second dominant monomial retires.
        let a2 = cd("A2");
        let head = m(&a2, "1_0 1_2");
        let strict = FmOptions {
            strict: true,
            ..FmOptions::default()
        };
        let run = fm_qchar(&a2, &head, &strict).unwrap();
        match &run.diag.stop {
            StopReason::ExtraDominant(d) => {
                assert_eq!(d, &m(&a2, "2_1"));
            }
            other => panic!("expected dominant abort, got {other:?}"),
        }
        let relaxed = fm_qchar(&a2, &head, &FmOptions::default()).unwrap();
        assert!(relaxed.converged());
        assert_eq!(relaxed.diag.extra_dominant, vec![m(&a2, "2_1")]);
    }

    #[test]
    fn caps_stop_early() {
        let a2 = cd("A2");
        let head = m(&a2, "1_0 2_1");
        let tiny = FmOptions {
            max_v: 1,
            ..FmOptions::default()
        };
        let run = fm_qchar(&a2, &head, &tiny).unwrap();
        assert_eq!(run.diag.stop, StopReason::VGradeCap);
        let tiny = FmOptions {
            max_terms: 2,
            ..FmOptions::default()
        };
        let run = fm_qchar(&a2, &head, &tiny).unwrap();
        assert_eq!(run.diag.stop, StopReason::TermCap);
    }

    #[test]
    fn thread_counts_agree() {
        let b2 = cd("B2");
        let head = m(&b2, "1_0 1_4");
        let base = fm_qchar(&b2, &head, &FmOptions { threads: 1, ..Default::default() }).unwrap();
        for threads in [2, 4, 8] {
            let other =
                fm_qchar(&b2, &head, &FmOptions { threads, ..Default::default() }).unwrap();
            assert!(base.chi.same_terms(&other.chi));
            assert_eq!(base.diag.rounds, other.diag.rounds);
            assert_eq!(base.diag.extra_dominant, other.diag.extra_dominant);
        }
    }

    #[test]
    fn standard_is_product_of_fundamentals() {
        let a2 = cd("A2");
        let head = m(&a2, "1_0 2_1");
        let std_run = standard_qchar(&a2, &head, &FmOptions::default()).unwrap();
        assert!(std_run.converged());
        assert_eq!(std_run.chi.total_multiplicity(), 9);
        assert_eq!(std_run.chi.len(), 8);
        assert_eq!(std_run.chi.max_multiplicity(), 2);
        // Here the tensor product is simple, so saturation agrees with it.
        let simple = fm_qchar(&a2, &head, &FmOptions::default()).unwrap();
        assert!(simple.chi.same_terms(&std_run.chi));
        // Repeated variables exercise the power path.
        let sq = standard_qchar(&a2, &m(&a2, "1_0^2"), &FmOptions::default()).unwrap();
        assert_eq!(sq.chi.total_multiplicity(), 9);
        assert_eq!(sq.chi.get(&m(&a2, "1_0 1_2^-1 2_1")), 2);
    }

    #[test]
    fn properties_of_b2_fundamentals() {
        let b2 = cd("B2");
        for (i, len) in [(1u8, 5usize), (2u8, 4usize)] {
            let rep = check_properties(&b2, &Monomial::var(i, 0, 1), &FmOptions::default())
                .unwrap();
            assert!(rep.special, "node {i}");
            assert!(rep.antispecial, "node {i}");
            assert!(rep.all_thin, "node {i}");
            assert_eq!(rep.lowest_matches, Some(true), "node {i}");
            assert_eq!(rep.run.chi.len(), len, "node {i}");
        }
    }

    #[test]
    fn explorer_walks_and_certifies() {
        // Full walk down the A2 fundamental: both steps head their own
        // strings, so all three monomials come out certified.
        let a2 = cd("A2");
        let head = m(&a2, "1_0");
        let script = ExplorerScript {
            steps: vec![
                ExplorerStep { m: head.clone(), node: 1 },
                ExplorerStep { m: m(&a2, "1_2^-1 2_1"), node: 2 },
            ],
            targets: vec![m(&a2, "2_3^-1")],
        };
        let rep = explore(&a2, &head, &script).unwrap();
        assert!(rep.all_targets_certified());
        assert_eq!(rep.certified.len(), 3);
        assert!(rep.steps.iter().all(|s| s.certified));
        assert!(rep.heuristic.is_empty());
    }

    #[test]
    fn explorer_rejects_wrong_position() {
        let a2 = cd("A2");
        let head = m(&a2, "1_0");
        let script = ExplorerScript {
            steps: vec![ExplorerStep { m: m(&a2, "2_3^-1"), node: 2 }],
            targets: vec![],
        };
        assert!(matches!(
            explore(&a2, &head, &script),
            Err(EngineError::ScriptMismatch { .. })
        ));
    }

    #[test]
    fn explorer_walks_l_of_kr_head() {
        let a2 = cd("A2");
        let head = m(&a2, "1_0 1_2");
        let script = ExplorerScript {
            steps: vec![
                ExplorerStep { m: head.clone(), node: 1 },
                ExplorerStep { m: m(&a2, "1_2^-1 1_4^-1 2_1 2_3"), node: 2 },
            ],
            targets: vec![m(&a2, "2_3^-1 2_5^-1")],
        };
        let rep = explore(&a2, &head, &script).unwrap();
        assert!(rep.steps.iter().all(|s| s.certified));
        assert!(rep.all_targets_certified());
        assert!(rep.certified.contains(&m(&a2, "1_0 1_4^-1 2_3")));
    }

    #[test]
    fn ancestor_candidates_find_containing_strings() {
        // The full flip of L_1(1_0 1_2) has the head among its node-1
        // ancestor candidates, and the head's string contains it; the
        // intermediate single lift 2_1 does not.
        let a2 = cd("A2");
        let head = m(&a2, "1_0 1_2");
        let mu = m(&a2, "1_2^-1 1_4^-1 2_1 2_3");
        let cands = ancestor_candidates(&a2, &head, &mu, 1, 0).unwrap();
        assert_eq!(cands, vec![m(&a2, "2_1"), head.clone()]);
        let contains = |anc: &Monomial| {
            expansion_terms(&a2, anc, 1)
                .unwrap()
                .iter()
                .any(|(t, _, _)| *t == mu)
        };
        assert!(!contains(&cands[0]));
        assert!(contains(&cands[1]));
        // On node 2 the factorization has no slots, so no candidates.
        assert!(ancestor_candidates(&a2, &head, &mu, 2, 0).unwrap().is_empty());
    }

    #[test]
    fn auto_explore_covers_small_characters() {
        let a2 = cd("A2");
        let head = m(&a2, "1_0");
        let rep = auto_explore(&a2, &head, &AutoExploreOptions::default()).unwrap();
        assert_eq!(rep.certified.len(), 3);
        assert!(rep.heuristic.is_empty());
        let full = fm_qchar(&a2, &head, &FmOptions::default()).unwrap();
        for (t, _) in full.chi.iter() {
            assert!(rep.certified.contains(t));
        }
    }

    #[test]
    fn script_json_round_trip() {
        let a2 = cd("A2");
        let s = script_from_json(
            &a2,
            r#"{"steps": [{"m": "1_0", "node": 1}], "targets": ["2_3^-1"]}"#,
        )
        .unwrap();
        assert_eq!(s.steps.len(), 1);
        assert_eq!(s.targets[0], m(&a2, "2_3^-1"));
        assert!(script_from_json(&a2, r#"{"steps": []}"#).unwrap().targets.is_empty());
        assert!(script_from_json(&a2, r#"{"steps": [{"m": "3_0", "node": 1}]}"#).is_err());
        assert!(script_from_json(&a2, r#"{"steps": 3}"#).is_err());
    }
}
