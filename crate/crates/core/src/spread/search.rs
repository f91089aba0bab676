//! Spread computation: exact solver, greedy mateless search, randomized
//! falsification, and mateless-certificate checking.

use super::hitting::{Bits, HittingInstance};
use super::{
    is_mate, ChallengeSet, MateReport, PairEvidence, SpreadError, SpreadKind, SpreadResult,
};
use crate::generation::{generates_pair, GenerationConfig};
use crate::group::GroupHandle;
use crate::perm::Permutation;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Search-effort log attached to spread results.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct SearchStats {
    pub pair_tests: u64,
    pub kill_sets_total: usize,
    pub kill_sets_distinct: usize,
    pub branch_nodes: u64,
    pub greedy_upper_bound: Option<u64>,
}

/// All pairwise generation answers for a small group, indexed by canonical
/// rank. The kill sets fall out as bitset columns.
pub struct PairTable {
    pub elements: Vec<Permutation>,
    pub identity_rank: usize,
    /// `kills[y]` = set of nontrivial `x` (by rank) with `⟨x, y⟩ ≠ G`.
    pub kills: Vec<Bits>,
    pub pair_tests: u64,
    pub two_generated: bool,
}

impl PairTable {
    /// Builds the full table with `order(G)²/2` generation tests.
    pub fn build(
        group: &GroupHandle,
        cfg: &GenerationConfig,
        budget: u64,
    ) -> Result<PairTable, SpreadError> {
        let order = group.order_u64()?;
        if order > budget {
            return Err(SpreadError::BudgetExceeded { order, budget });
        }
        let n = order as usize;
        let elements: Vec<Permutation> = group.chain().elements().collect();
        let identity_rank = elements
            .iter()
            .position(|g| g.is_identity())
            .expect("every group contains the identity");
        let mut kills: Vec<Bits> = (0..n).map(|_| Bits::new(n)).collect();
        let mut pair_tests = 0u64;
        let mut two_generated = false;
        for i in 0..n {
            for j in i..n {
                pair_tests += 1;
                let generates = generates_pair(&elements[i], &elements[j], group, cfg)?.generates;
                if generates {
                    two_generated = true;
                } else {
                    // x must be nontrivial to count as a killer
                    if i != identity_rank {
                        kills[j].set(i);
                    }
                    if j != identity_rank {
                        kills[i].set(j);
                    }
                }
            }
        }
        Ok(PairTable {
            elements,
            identity_rank,
            kills,
            pair_tests,
            two_generated,
        })
    }

    /// Number of kill sets each element appears in ("kill degree").
    pub fn kill_degrees(&self) -> Vec<usize> {
        let n = self.elements.len();
        let mut deg = vec![0usize; n];
        for ks in &self.kills {
            for e in ks.ones() {
                deg[e] += 1;
            }
        }
        deg
    }

    fn challenge_from_bits(&self, group: &GroupHandle, picks: &[usize]) -> ChallengeSet {
        let raw: Vec<Permutation> = picks.iter().map(|&i| self.elements[i].clone()).collect();
        super::validate_challenge(&raw, group)
            .expect("table elements are valid challenge members")
            .set
    }
}

/// Exact spread of a small group via kill sets and a minimal hitting set.
///
/// A challenge set is mateless exactly when it hits every kill set, so the
/// smallest mateless set is the minimum hitting set over
/// `{kill(y) : y ∈ G}` and the exact spread is one less than its size.
/// Degenerate cases are reported as their own kinds: an empty kill set means
/// a universal mate exists (`Unbounded`); a group with no generating pair at
/// all has mateless singletons (`Zero`).
pub fn exact_spread_small(
    group: &GroupHandle,
    budget: u64,
    parallel: bool,
) -> Result<SpreadResult, SpreadError> {
    let cfg = GenerationConfig::default();
    let table = PairTable::build(group, &cfg, budget)?;
    let n = table.elements.len();

    let mut stats = SearchStats {
        pair_tests: table.pair_tests,
        kill_sets_total: n,
        ..SearchStats::default()
    };

    if table.kills.iter().any(|k| k.is_empty()) {
        return Ok(SpreadResult {
            kind: SpreadKind::Unbounded,
            value: None,
            witness: None,
            stats,
        });
    }
    if !table.two_generated {
        return Ok(SpreadResult {
            kind: SpreadKind::Zero,
            value: Some(0),
            witness: None,
            stats,
        });
    }

    let instance = HittingInstance::reduce(n, table.kills.clone());
    stats.kill_sets_distinct = instance.family.len();
    let sol = instance.solve(parallel);
    stats.branch_nodes = sol.nodes;
    stats.greedy_upper_bound = Some(sol.greedy_size as u64);

    let witness = table.challenge_from_bits(group, &sol.hitting_set);
    Ok(SpreadResult {
        kind: SpreadKind::Exact,
        value: Some(sol.hitting_set.len() as u64 - 1),
        witness: Some(witness),
        stats,
    })
}

#[derive(Debug, Clone)]
pub struct GreedyReport {
    pub witness: Option<ChallengeSet>,
    /// Number of mate-absence checks performed during verification.
    pub verified_against: u64,
    pub attempts: u32,
}

/// Greedy mateless-set search: repeatedly picks the element that hits the
/// most still-unhit kill sets. The first attempt is fully deterministic;
/// if it exceeds `size_limit`, a few seeded randomized-tie-break retries
/// follow. A returned witness is verified mateless by an exhaustive scan of
/// all candidate mates.
pub fn greedy_mateless_search(
    group: &GroupHandle,
    size_limit: usize,
    seed: u64,
    budget: u64,
) -> Result<GreedyReport, SpreadError> {
    let cfg = GenerationConfig::default();
    let table = PairTable::build(group, &cfg, budget)?;
    if table.kills.iter().any(|k| k.is_empty()) {
        // a universal mate exists; no mateless set at all
        return Ok(GreedyReport {
            witness: None,
            verified_against: 0,
            attempts: 1,
        });
    }
    let n = table.elements.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: u32 = 4;
    for attempt in 0..ATTEMPTS {
        let picks = greedy_attempt(&table, n, size_limit, attempt, &mut rng);
        if let Some(picks) = picks {
            // verify mateless: every candidate mate y is killed by some pick
            let set = table.challenge_from_bits(group, &picks);
            let mut checks = 0u64;
            let mateless = table.elements.iter().all(|y| {
                checks += 1;
                set.iter().any(|x| {
                    !generates_pair(x, y, group, &cfg)
                        .expect("table elements are members")
                        .generates
                })
            });
            assert!(mateless, "greedy witness failed mate-absence verification");
            return Ok(GreedyReport {
                witness: Some(set),
                verified_against: checks,
                attempts: attempt + 1,
            });
        }
    }
    Ok(GreedyReport {
        witness: None,
        verified_against: 0,
        attempts: ATTEMPTS,
    })
}

fn greedy_attempt(
    table: &PairTable,
    n: usize,
    size_limit: usize,
    attempt: u32,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let mut unhit: Vec<usize> = (0..n).collect();
    let mut picks: Vec<usize> = Vec::new();
    while !unhit.is_empty() {
        if picks.len() >= size_limit {
            return None;
        }
        let mut gains = vec![0usize; n];
        for &y in &unhit {
            for e in table.kills[y].ones() {
                gains[e] += 1;
            }
        }
        let best_gain = *gains.iter().max().expect("universe nonempty");
        if best_gain == 0 {
            return None;
        }
        let pick = if attempt == 0 {
            // deterministic: lowest canonical rank among maximal-gain picks
            gains.iter().position(|&g| g == best_gain).unwrap()
        } else {
            let tied: Vec<usize> = (0..n).filter(|&e| gains[e] == best_gain).collect();
            *tied.choose(rng).unwrap()
        };
        picks.push(pick);
        unhit.retain(|&y| !table.kills[y].contains(pick));
    }
    picks.sort_unstable();
    Some(picks)
}

/// How randomized challenge sets are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingBias {
    Uniform,
    /// Adversarial: bias draws toward elements that appear in many kill sets
    /// (exact kill degrees when the group fits the budget, otherwise a
    /// sampled estimate).
    KillWeighted,
}

/// Pluggable mate-finding strategy for randomized spread testing; the M23
/// machinery supplies a cover-guided implementation.
pub trait MateFinder: Sync {
    fn find(&self, challenge: &ChallengeSet, group: &GroupHandle)
        -> Result<MateReport, SpreadError>;
    fn name(&self) -> &'static str;
}

/// The default complete strategy for small groups.
pub struct FullScanFinder {
    pub cfg: GenerationConfig,
    pub budget: u64,
}

impl MateFinder for FullScanFinder {
    fn find(
        &self,
        challenge: &ChallengeSet,
        group: &GroupHandle,
    ) -> Result<MateReport, SpreadError> {
        super::find_mate_full_scan(challenge, group, &self.cfg, self.budget)
    }

    fn name(&self) -> &'static str {
        "full-scan"
    }
}

#[derive(Debug, Clone)]
pub struct RandomizedSpreadReport {
    pub r: u64,
    pub trials_run: u64,
    /// A sampled challenge set with no mate, if one was found. This
    /// *disproves* spread `r`; its absence proves nothing.
    pub counterexample: Option<ChallengeSet>,
    pub mates_found: u64,
}

/// Randomized falsification of "spread at least r": samples challenge sets
/// of size `r` and hunts for one without a mate. Finding one disproves
/// spread `r`; finding none is only consistency, never a proof.
pub fn spread_at_least_randomized(
    group: &GroupHandle,
    r: u64,
    trials: u64,
    seed: u64,
    bias: SamplingBias,
    finder: &dyn MateFinder,
) -> Result<RandomizedSpreadReport, SpreadError> {
    let order = group.order_u64()?;
    if r > order.saturating_sub(1) {
        return Err(SpreadError::NotEnoughElements {
            requested: r,
            available: order.saturating_sub(1),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // exact kill degrees are affordable only for small groups
    const WEIGHT_BUDGET: u64 = 512;
    let weights: Option<Vec<usize>> = match bias {
        SamplingBias::Uniform => None,
        SamplingBias::KillWeighted if order <= WEIGHT_BUDGET => {
            let table = PairTable::build(group, &GenerationConfig::default(), WEIGHT_BUDGET)?;
            let deg = table.kill_degrees();
            // map rank -> weight; identity weight 0 so it is never drawn
            let mut w = deg;
            w[table.identity_rank] = 0;
            Some(w)
        }
        SamplingBias::KillWeighted => None, // estimated per trial below
    };

    let mut mates_found = 0u64;
    for _ in 0..trials {
        let challenge = match (&weights, bias) {
            (Some(w), _) => sample_weighted(group, r, w, &mut rng)?,
            (None, SamplingBias::Uniform) => sample_uniform(group, r, &mut rng)?,
            (None, SamplingBias::KillWeighted) => {
                sample_estimated_killers(group, r, &mut rng)?
            }
        };
        let report = finder.find(&challenge, group)?;
        match report.mate {
            Some(_) => mates_found += 1,
            None => {
                return Ok(RandomizedSpreadReport {
                    r,
                    trials_run: mates_found + 1,
                    counterexample: Some(challenge),
                    mates_found,
                });
            }
        }
    }
    Ok(RandomizedSpreadReport {
        r,
        trials_run: trials,
        counterexample: None,
        mates_found,
    })
}

fn sample_uniform(
    group: &GroupHandle,
    r: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ChallengeSet, SpreadError> {
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut raw = Vec::with_capacity(r as usize);
    while raw.len() < r as usize {
        let g = group.chain().random_element(rng);
        if g.is_identity() || seen.contains(&g) {
            continue;
        }
        seen.insert(g.clone());
        raw.push(g);
    }
    Ok(super::validate_challenge(&raw, group)?.set)
}

fn sample_weighted(
    group: &GroupHandle,
    r: u64,
    weights: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<ChallengeSet, SpreadError> {
    // weighted sampling without replacement; +1 smoothing keeps zero-kill
    // elements reachable (the identity keeps weight zero)
    let mut pool: Vec<(usize, u64)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (i, if w == 0 { 0 } else { w as u64 + 1 }))
        .collect();
    let mut picks = Vec::with_capacity(r as usize);
    for _ in 0..r {
        let total: u64 = pool.iter().map(|&(_, w)| w).sum();
        if total == 0 {
            return Err(SpreadError::NotEnoughElements {
                requested: r,
                available: picks.len() as u64,
            });
        }
        let mut t = rng.gen_range(0..total);
        let mut chosen = 0;
        for (idx, &(_, w)) in pool.iter().enumerate() {
            if t < w {
                chosen = idx;
                break;
            }
            t -= w;
        }
        picks.push(pool[chosen].0);
        pool.remove(chosen);
    }
    let raw: Vec<Permutation> = picks
        .iter()
        .map(|&i| group.chain().element_at(i as u64).expect("rank in range"))
        .collect();
    Ok(super::validate_challenge(&raw, group)?.set)
}

/// For groups too large for a pair table: draw a candidate pool and keep the
/// `r` elements with the highest sampled non-generation frequency.
fn sample_estimated_killers(
    group: &GroupHandle,
    r: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ChallengeSet, SpreadError> {
    const PROBES: usize = 4;
    let cfg = GenerationConfig::default();
    let pool_size = (r as usize).saturating_mul(2).max(16);
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut scored: Vec<(usize, usize, Permutation)> = Vec::with_capacity(pool_size);
    while scored.len() < pool_size {
        let g = group.chain().random_element(rng);
        if g.is_identity() || seen.contains(&g) {
            continue;
        }
        seen.insert(g.clone());
        let mut score = 0usize;
        for _ in 0..PROBES {
            let y = group.chain().random_element(rng);
            if !generates_pair(&g, &y, group, &cfg)?.generates {
                score += 1;
            }
        }
        scored.push((score, scored.len(), g));
    }
    // highest score first; stable on draw order for determinism
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let raw: Vec<Permutation> = scored
        .into_iter()
        .take(r as usize)
        .map(|(_, _, g)| g)
        .collect();
    Ok(super::validate_challenge(&raw, group)?.set)
}

/// A hint source that can name a killer for a given mate candidate without a
/// generation test (used by structure-aware certificate verifiers).
pub trait KillerHint: Sync {
    /// Returns the index into the challenge set of a known killer of `y`.
    fn quick_killer(&self, y: &Permutation) -> Option<usize>;
}

#[derive(Debug, Clone)]
pub enum CertificateOutcome {
    /// Every element of the group is killed by some challenge element; the
    /// counts record how the killers were found.
    ConfirmedMateless {
        scanned: u64,
        killers_by_hint: u64,
        killers_by_scan: u64,
    },
    /// The set has a mate after all, exhibited with full evidence.
    Refuted {
        mate: Permutation,
        mate_rank: u64,
        evidence: Vec<PairEvidence>,
    },
}

/// Checks a claimed mateless certificate by dispatching every element of the
/// group: each `y` must have a killer in `X`. Any survivor refutes the
/// certificate and is returned (verified) as a mate.
pub fn certify_mateless(
    group: &GroupHandle,
    challenge: &ChallengeSet,
    cfg: &GenerationConfig,
    hint: Option<&dyn KillerHint>,
) -> Result<CertificateOutcome, SpreadError> {
    let mut killers_by_hint = 0u64;
    let mut killers_by_scan = 0u64;
    let mut scanned = 0u64;
    for (rank, y) in group.chain().elements().enumerate() {
        scanned += 1;
        if let Some(h) = hint {
            if h.quick_killer(&y).is_some() {
                killers_by_hint += 1;
                continue;
            }
        }
        let mut killed = false;
        for x in challenge.iter() {
            if !generates_pair(x, &y, group, cfg)?.generates {
                killed = true;
                break;
            }
        }
        if killed {
            killers_by_scan += 1;
            continue;
        }
        // survivor: verify it really is a mate before refuting
        let (ok, evidence) = is_mate(&y, challenge, group, cfg)?;
        assert!(ok, "survivor failed re-verification");
        return Ok(CertificateOutcome::Refuted {
            mate: y,
            mate_rank: rank as u64,
            evidence,
        });
    }
    Ok(CertificateOutcome::ConfirmedMateless {
        scanned,
        killers_by_hint,
        killers_by_scan,
    })
}
