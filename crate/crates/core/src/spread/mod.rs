//! Spread semantics: challenge sets, mates, kill sets, exact spread for
//! small groups, and mateless-set search.
//!
//! Terminology: a *challenge set* `X` is a set of distinct nontrivial group
//! elements; `y` is a *mate* to `X` when `⟨x, y⟩ = G` for every `x ∈ X`; the
//! *kill set* of `y` collects the nontrivial `x` with `⟨x, y⟩ ≠ G` (so `y`
//! is a mate to `X` exactly when `X` avoids `y`'s kill set); the group has
//! spread `r` when every size-`r` challenge set has a mate, and the exact
//! spread is the largest such `r`.

mod hitting;
mod search;

pub use hitting::{HittingInstance, HittingSolution};
pub use search::{
    certify_mateless, exact_spread_small, greedy_mateless_search, spread_at_least_randomized,
    CertificateOutcome, FullScanFinder, GreedyReport, KillerHint, MateFinder, PairTable,
    RandomizedSpreadReport, SamplingBias, SearchStats,
};

use crate::generation::{generates_pair, GenerationConfig, GenerationError, PairResult};
use crate::group::{GroupError, GroupHandle};
use crate::perm::Permutation;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpreadError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error("challenge sets must not contain the identity")]
    IdentityInChallenge,
    #[error("challenge element #{index} is not a member of the group")]
    ElementNotInGroup { index: usize },
    #[error("group order {order} exceeds the budget {budget}")]
    BudgetExceeded { order: u64, budget: u64 },
    #[error("cannot sample {requested} distinct nontrivial elements from a group with {available}")]
    NotEnoughElements { requested: u64, available: u64 },
    #[error("mate strategy failed: {0}")]
    Strategy(String),
}

/// A validated set of distinct nontrivial elements of a fixed group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengeSet {
    degree: usize,
    elements: Vec<Permutation>,
}

impl ChallengeSet {
    /// An empty challenge set (legal; it vacuously has a mate).
    pub fn empty(degree: usize) -> Self {
        ChallengeSet {
            degree,
            elements: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Permutation> {
        self.elements.iter()
    }
}

/// Result of challenge-set validation: the cleaned set plus a count of
/// dropped duplicates (duplicates are a warning, not an error — a multiset
/// question collapses to its support).
#[derive(Debug, Clone)]
pub struct ValidatedChallenge {
    pub set: ChallengeSet,
    pub duplicates_removed: usize,
}

/// Deduplicates, rejects the identity, and checks membership of every
/// element in `group`.
pub fn validate_challenge(
    raw: &[Permutation],
    group: &GroupHandle,
) -> Result<ValidatedChallenge, SpreadError> {
    let mut elements: Vec<Permutation> = Vec::with_capacity(raw.len());
    let mut duplicates_removed = 0usize;
    for (index, p) in raw.iter().enumerate() {
        if p.is_identity() && p.degree() == group.degree() {
            return Err(SpreadError::IdentityInChallenge);
        }
        if !group.contains(p).map_err(SpreadError::Group)? {
            return Err(SpreadError::ElementNotInGroup { index });
        }
        if elements.contains(p) {
            duplicates_removed += 1;
            continue;
        }
        elements.push(p.clone());
    }
    Ok(ValidatedChallenge {
        set: ChallengeSet {
            degree: group.degree(),
            elements,
        },
        duplicates_removed,
    })
}

/// Per-pair evidence attached to a mate verdict.
#[derive(Debug, Clone)]
pub struct PairEvidence {
    /// Index into the challenge set.
    pub challenge_index: usize,
    pub result: PairResult,
}

/// Which branch of a mate search produced the candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MateOrigin {
    /// Deterministic full scan: candidates ordered by decreasing element
    /// order, then canonical rank.
    FullScan,
    /// Cover-guided: an uncovered Frobenius copy supplied an order-23 mate.
    UncoveredCopy { copy_index: u32 },
    /// Cover-guided: all copies were covered; an order-14 element was used.
    Order14Fallback,
}

impl std::fmt::Display for MateOrigin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MateOrigin::FullScan => write!(f, "full-scan"),
            MateOrigin::UncoveredCopy { copy_index } => {
                write!(f, "uncovered-copy:{copy_index}")
            }
            MateOrigin::Order14Fallback => write!(f, "order-14-fallback"),
        }
    }
}

/// Outcome of a mate search, always verified before being returned when a
/// mate is present.
#[derive(Debug, Clone)]
pub struct MateReport {
    pub mate: Option<Permutation>,
    /// True when every per-pair check of the returned mate passed.
    pub verified: bool,
    /// Per-pair evidence for the returned mate (one entry per challenge
    /// element, in challenge order).
    pub evidence: Vec<PairEvidence>,
    /// True when a complete scan proved that no mate exists.
    pub exhausted: bool,
    pub origin: Option<MateOrigin>,
    /// Candidates examined before the mate (or exhaustion).
    pub candidates_tried: u64,
    /// Pair tests answered by a pre-filter during the search.
    pub filter_hits: u64,
    /// Total pair tests performed.
    pub pair_tests: u64,
}

impl MateReport {
    pub fn no_mate(exhausted: bool) -> Self {
        MateReport {
            mate: None,
            verified: false,
            evidence: Vec::new(),
            exhausted,
            origin: None,
            candidates_tried: 0,
            filter_hits: 0,
            pair_tests: 0,
        }
    }
}

/// Tests whether `y` is a mate to `X`, with per-pair evidence. The scan
/// stops at the first failing pair; on success the evidence covers all of
/// `X` in challenge order.
pub fn is_mate(
    y: &Permutation,
    challenge: &ChallengeSet,
    group: &GroupHandle,
    cfg: &GenerationConfig,
) -> Result<(bool, Vec<PairEvidence>), SpreadError> {
    if !group.contains(y)? {
        return Err(SpreadError::Group(GroupError::NotInGroup));
    }
    let mut evidence = Vec::with_capacity(challenge.len());
    for (challenge_index, x) in challenge.iter().enumerate() {
        let result = generates_pair(x, y, group, cfg)?;
        let generates = result.generates;
        evidence.push(PairEvidence {
            challenge_index,
            result,
        });
        if !generates {
            return Ok((false, evidence));
        }
    }
    Ok((true, evidence))
}

/// Complete deterministic mate search. Candidates are every element of `G`
/// ordered by decreasing element order, then by canonical rank; if a mate
/// exists the first one in this order is found and verified.
pub fn find_mate_full_scan(
    challenge: &ChallengeSet,
    group: &GroupHandle,
    cfg: &GenerationConfig,
    budget: u64,
) -> Result<MateReport, SpreadError> {
    let order = group.order_u64()?;
    if order > budget {
        return Err(SpreadError::BudgetExceeded { order, budget });
    }
    let mut candidates: Vec<(u64, u64, Permutation)> = group
        .chain()
        .elements()
        .enumerate()
        .map(|(rank, g)| (g.order(), rank as u64, g))
        .collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut candidates_tried = 0u64;
    let mut filter_hits = 0u64;
    let mut pair_tests = 0u64;
    for (_, _, y) in candidates {
        candidates_tried += 1;
        let (ok, evidence) = is_mate(&y, challenge, group, cfg)?;
        pair_tests += evidence.len() as u64;
        filter_hits += evidence
            .iter()
            .filter(|e| e.result.filter_used != crate::generation::FilterKind::None)
            .count() as u64;
        if ok {
            return Ok(MateReport {
                mate: Some(y),
                verified: true,
                evidence,
                exhausted: false,
                origin: Some(MateOrigin::FullScan),
                candidates_tried,
                filter_hits,
                pair_tests,
            });
        }
    }
    Ok(MateReport {
        mate: None,
        verified: false,
        evidence: Vec::new(),
        exhausted: true,
        origin: Some(MateOrigin::FullScan),
        candidates_tried,
        filter_hits,
        pair_tests,
    })
}

/// The kill set of `y`: canonical ranks of all nontrivial `x` with
/// `⟨x, y⟩ ≠ G`. Stored as a sorted rank list into the canonical
/// enumeration, which keeps set operations cheap for the hitting-set solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KillSet {
    pub center: Permutation,
    pub killer_ranks: Vec<u64>,
}

impl KillSet {
    pub fn len(&self) -> usize {
        self.killer_ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.killer_ranks.is_empty()
    }

    pub fn contains_rank(&self, rank: u64) -> bool {
        self.killer_ranks.binary_search(&rank).is_ok()
    }
}

/// A structural shortcut for kill sets, registered by callers who can prove
/// a closed form (the M23 machinery registers one for order-23 centers).
pub trait KillSetShortcut: Sync {
    /// Returns `Some(sorted killer ranks)` when the shortcut applies to `y`.
    fn kill_ranks(
        &self,
        y: &Permutation,
        group: &GroupHandle,
    ) -> Option<Result<Vec<u64>, SpreadError>>;
}

/// Exact kill set of `y`, by exhaustive scan within `budget` or via a
/// registered structural shortcut.
pub fn kill_set(
    y: &Permutation,
    group: &GroupHandle,
    cfg: &GenerationConfig,
    budget: u64,
    shortcut: Option<&dyn KillSetShortcut>,
) -> Result<KillSet, SpreadError> {
    if !group.contains(y)? {
        return Err(SpreadError::Group(GroupError::NotInGroup));
    }
    if let Some(s) = shortcut {
        if let Some(ranks) = s.kill_ranks(y, group) {
            let mut killer_ranks = ranks?;
            killer_ranks.sort_unstable();
            killer_ranks.dedup();
            return Ok(KillSet {
                center: y.clone(),
                killer_ranks,
            });
        }
    }
    let order = group.order_u64()?;
    if order > budget {
        return Err(SpreadError::BudgetExceeded { order, budget });
    }
    let mut killer_ranks = Vec::new();
    for (rank, x) in group.chain().elements().enumerate() {
        if x.is_identity() {
            continue;
        }
        if !generates_pair(&x, y, group, cfg)?.generates {
            killer_ranks.push(rank as u64);
        }
    }
    Ok(KillSet {
        center: y.clone(),
        killer_ranks,
    })
}

/// Classification of a spread computation's outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadKind {
    /// Exact value with a mateless witness of size `value + 1` and an
    /// exhaustive certificate that all examined sets of size `value` have
    /// mates.
    Exact,
    LowerBound,
    UpperBound,
    /// Some kill set is empty: a universal mate exists, so every challenge
    /// set has a mate and the spread exceeds every `r`.
    Unbounded,
    /// The group is not 2-generated: every nonempty challenge set is
    /// mateless.
    Zero,
}

/// Result of a spread computation, with the witness and search log.
#[derive(Debug, Clone)]
pub struct SpreadResult {
    pub kind: SpreadKind,
    pub value: Option<u64>,
    /// Mateless witness of size `value + 1` (for `Exact`) or of the reported
    /// bound size (for `UpperBound`).
    pub witness: Option<ChallengeSet>,
    pub stats: SearchStats,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn p(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    #[test]
    fn validation_dedupes_and_rejects_identity() {
        let g = catalog::s3();
        let a = p("(1,2)", 3);
        let b = p("(1,2,3)", 3);
        let v = validate_challenge(&[a.clone(), a.clone(), b.clone()], &g).unwrap();
        assert_eq!(v.set.len(), 2);
        assert_eq!(v.duplicates_removed, 1);

        let err = validate_challenge(&[Permutation::identity(3)], &g).unwrap_err();
        assert!(matches!(err, SpreadError::IdentityInChallenge));

        let err = validate_challenge(&[p("(1,2)", 4)], &catalog::a4()).unwrap_err();
        assert!(matches!(err, SpreadError::ElementNotInGroup { index: 0 }));
    }

    #[test]
    fn mate_basics_on_s3() {
        let g = catalog::s3();
        let x = validate_challenge(&[p("(1,2)", 3)], &g).unwrap().set;
        let cfg = GenerationConfig::default();
        let (ok, ev) = is_mate(&p("(1,2,3)", 3), &x, &g, &cfg).unwrap();
        assert!(ok);
        assert_eq!(ev.len(), 1);
        let (ok, _) = is_mate(&p("(1,2)", 3), &x, &g, &cfg).unwrap();
        assert!(!ok);
        let (ok, _) = is_mate(&Permutation::identity(3), &x, &g, &cfg).unwrap();
        assert!(!ok);
    }

    #[test]
    fn empty_challenge_has_vacuous_mates() {
        let g = catalog::s3();
        let x = ChallengeSet::empty(3);
        let cfg = GenerationConfig::default();
        let (ok, ev) = is_mate(&p("(1,2)", 3), &x, &g, &cfg).unwrap();
        assert!(ok);
        assert!(ev.is_empty());
        // the full scan then returns its first candidate: a maximal-order
        // element, earliest in canonical order
        let report = find_mate_full_scan(&x, &g, &cfg, 1000).unwrap();
        let mate = report.mate.unwrap();
        assert_eq!(mate.order(), 3);
        assert!(report.verified);
    }

    #[test]
    fn full_scan_matches_spec_example_on_s3() {
        let g = catalog::s3();
        let cfg = GenerationConfig::default();
        let x = validate_challenge(&[p("(1,2)", 3)], &g).unwrap().set;
        let report = find_mate_full_scan(&x, &g, &cfg, 1000).unwrap();
        // first candidate group: order-3 elements in canonical order
        let mate = report.mate.unwrap();
        assert_eq!(mate, p("(1,2,3)", 3));
        assert!(report.verified);
        assert!(report.evidence.iter().all(|e| e.result.generates));
    }

    #[test]
    fn no_mate_in_non_two_generated_group() {
        let g = catalog::c2_c2_c2();
        let x = validate_challenge(&[p("(1,2)", 6)], &g).unwrap().set;
        let report = find_mate_full_scan(&x, &g, &GenerationConfig::default(), 1000).unwrap();
        assert!(report.mate.is_none());
        assert!(report.exhausted);
    }

    #[test]
    fn kill_sets_on_s3_and_c5() {
        let g = catalog::s3();
        let cfg = GenerationConfig::default();
        let ks = kill_set(&p("(1,2,3)", 3), &g, &cfg, 1000, None).unwrap();
        // exactly the two rotations kill a rotation
        assert_eq!(ks.len(), 2);
        let killers: Vec<Permutation> = ks
            .killer_ranks
            .iter()
            .map(|&r| g.chain().element_at(r).unwrap())
            .collect();
        assert!(killers.contains(&p("(1,2,3)", 3)));
        assert!(killers.contains(&p("(1,3,2)", 3)));

        // prime cyclic group: every nontrivial element generates alone
        let c5 = catalog::c5();
        let ks = kill_set(&p("(1,2,3,4,5)", 5), &c5, &cfg, 1000, None).unwrap();
        assert!(ks.is_empty());
    }

    #[test]
    fn transposition_kill_set_is_itself() {
        let g = catalog::s3();
        let t = p("(1,2)", 3);
        let ks = kill_set(&t, &g, &GenerationConfig::default(), 1000, None).unwrap();
        assert_eq!(ks.len(), 1);
        let killer = g.chain().element_at(ks.killer_ranks[0]).unwrap();
        assert_eq!(killer, t);
    }
}
