//! Ingredient verification and witness-certificate checking.
//!
//! Each verification exists in a sampled tier (seeded random spot checks)
//! and an exhaustive tier (a chunked, resumable scan over the canonical
//! enumeration). A failed check carries the concrete counterexample; a
//! failure here would falsify the structural facts the mate argument
//! depends on.

use super::mate::{proof_guided_mate, CopyKillerHint};
use super::tables::{cyclic_subgroup_key, key_of, perm_from_key, CoverMap, Key23, SylowTable};
use super::{M23Context, M23Error};
use crate::generation::{generates_pair, pair_subgroup_order, spectrum, GenerationConfig};
use crate::perm::Permutation;
use crate::scan::ChunkedScan;
use crate::spread::{is_mate, ChallengeSet, KillerHint, MateOrigin, PairEvidence};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

pub const SCAN_CHUNK_SIZE: u64 = 65_536;
/// Chunks dispatched between two checkpoint callbacks.
pub const SCAN_BATCH_CHUNKS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IngredientStatus {
    VerifiedExhaustive,
    VerifiedSampled { samples: u64 },
    Failed { detail: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct IngredientReport {
    pub ingredient: String,
    pub status: IngredientStatus,
    pub counts: BTreeMap<String, u64>,
    pub notes: Vec<String>,
    pub elapsed_ms: u128,
}

impl IngredientReport {
    pub fn passed(&self) -> bool {
        !matches!(self.status, IngredientStatus::Failed { .. })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum VerifyMode {
    Sampled { samples: u64, seed: u64 },
    Exhaustive,
}

// ---------------------------------------------------------------------------
// unique-maximal: the kill set of an order-23 element is exactly its copy
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniqueMaximalScanChunk {
    pub checked: u64,
    pub killer_ranks: Vec<u64>,
    pub violations: Vec<String>,
}

/// Fresh scan state for the exhaustive unique-maximal verification.
pub fn unique_maximal_scan() -> ChunkedScan<UniqueMaximalScanChunk> {
    ChunkedScan::new(super::M23_ORDER, SCAN_CHUNK_SIZE)
}

/// The deterministic order-23 representative used by the verifications: the
/// lex-least canonical Sylow key (copy 0's stored generator).
pub fn order23_representative(table: &SylowTable) -> Permutation {
    perm_from_key(table.key(0))
}

struct UniqueMaximalFixture {
    y: Permutation,
    copy_index: u32,
    member_keys: HashSet<Key23>,
    member_ranks: Vec<u64>,
}

fn unique_maximal_fixture(
    ctx: &M23Context,
    table: &SylowTable,
) -> Result<UniqueMaximalFixture, M23Error> {
    let y = order23_representative(table);
    let copy_index = table.copy_of_element(&y)?;
    let normalizer = table.normalizer(copy_index)?;
    let mut member_keys = HashSet::with_capacity(super::COPY_ORDER as usize);
    let mut member_ranks = Vec::with_capacity(super::COPY_ORDER as usize - 1);
    for h in normalizer.chain().elements() {
        member_keys.insert(key_of(&h));
        if !h.is_identity() {
            member_ranks.push(ctx.group().chain().rank_of(&h)?);
        }
    }
    member_ranks.sort_unstable();
    Ok(UniqueMaximalFixture {
        y,
        copy_index,
        member_keys,
        member_ranks,
    })
}

fn check_unique_maximal_element(
    fixture: &UniqueMaximalFixture,
    rank: u64,
    x: &Permutation,
    killers: &mut Vec<u64>,
    violations: &mut Vec<String>,
) {
    let pair_order = pair_subgroup_order(x, &fixture.y, super::M23_DEGREE);
    let inside = fixture.member_keys.contains(&key_of(x));
    let generates = pair_order == BigUint::from(super::M23_ORDER);
    if inside {
        killers.push(rank);
        let divides = (BigUint::from(super::COPY_ORDER) % &pair_order) == BigUint::from(0u32);
        if generates || !divides {
            violations.push(format!(
                "x = {x} inside the copy gives pair order {pair_order}"
            ));
        }
    } else if !generates {
        killers.push(rank);
        violations.push(format!(
            "x = {x} outside the copy fails to generate (pair order {pair_order})"
        ));
    }
}

/// Exhaustive tier: scans every nontrivial element of the group and checks
/// that the non-generators against the order-23 representative are exactly
/// the 252 nontrivial elements of its copy.
pub fn verify_unique_maximal_exhaustive(
    ctx: &M23Context,
    table: &SylowTable,
    scan: &mut ChunkedScan<UniqueMaximalScanChunk>,
    on_batch: impl FnMut(&ChunkedScan<UniqueMaximalScanChunk>),
) -> Result<IngredientReport, M23Error> {
    let start = Instant::now();
    let fixture = unique_maximal_fixture(ctx, table)?;
    let chain = ctx.group().chain();

    scan.run(
        SCAN_BATCH_CHUNKS,
        |_, range| {
            let mut chunk = UniqueMaximalScanChunk {
                checked: 0,
                killer_ranks: Vec::new(),
                violations: Vec::new(),
            };
            for (offset, x) in chain.elements_range(range.start, range.end).enumerate() {
                if x.is_identity() {
                    continue;
                }
                chunk.checked += 1;
                check_unique_maximal_element(
                    &fixture,
                    range.start + offset as u64,
                    &x,
                    &mut chunk.killer_ranks,
                    &mut chunk.violations,
                );
            }
            chunk
        },
        on_batch,
    );

    let mut counts = BTreeMap::new();
    let mut killer_ranks = Vec::new();
    let mut violations = Vec::new();
    let mut checked = 0u64;
    for chunk in scan.results.iter().flatten() {
        checked += chunk.checked;
        killer_ranks.extend_from_slice(&chunk.killer_ranks);
        violations.extend_from_slice(&chunk.violations);
    }
    killer_ranks.sort_unstable();
    counts.insert("elements_checked".into(), checked);
    counts.insert("killers_found".into(), killer_ranks.len() as u64);
    counts.insert("copy_index".into(), fixture.copy_index as u64);
    counts.insert(
        "expected_killers".into(),
        fixture.member_ranks.len() as u64,
    );

    let status = if violations.is_empty() && killer_ranks == fixture.member_ranks {
        IngredientStatus::VerifiedExhaustive
    } else {
        let detail = violations
            .first()
            .cloned()
            .unwrap_or_else(|| "kill set differs from the copy's nontrivial elements".into());
        IngredientStatus::Failed { detail }
    };
    Ok(IngredientReport {
        ingredient: "unique-maximal(order-23)".into(),
        status,
        counts,
        notes: vec![format!(
            "representative y = {} (copy {})",
            fixture.y, fixture.copy_index
        )],
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Sampled tier: all 252 elements inside the copy, plus `samples` seeded
/// random elements of the whole group.
pub fn verify_unique_maximal_sampled(
    ctx: &M23Context,
    table: &SylowTable,
    samples: u64,
    seed: u64,
) -> Result<IngredientReport, M23Error> {
    let start = Instant::now();
    let fixture = unique_maximal_fixture(ctx, table)?;
    let chain = ctx.group().chain();
    let mut violations = Vec::new();
    let mut killers = Vec::new();

    // the inside of the copy is checked exhaustively (it is tiny)
    for &rank in &fixture.member_ranks {
        let x = chain.element_at(rank)?;
        check_unique_maximal_element(&fixture, rank, &x, &mut killers, &mut violations);
    }
    let inside_killers = killers.len() as u64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outside_checked = 0u64;
    for _ in 0..samples {
        let x = chain.random_element(&mut rng);
        if x.is_identity() {
            continue;
        }
        let rank = chain.rank_of(&x)?;
        let before = violations.len();
        let mut sample_killers = Vec::new();
        check_unique_maximal_element(&fixture, rank, &x, &mut sample_killers, &mut violations);
        // a sampled killer must lie inside the copy
        if violations.len() == before
            && !sample_killers.is_empty()
            && !fixture.member_ranks.contains(&rank)
        {
            violations.push(format!("sampled x = {x} kills from outside the copy"));
        }
        outside_checked += 1;
    }

    let mut counts = BTreeMap::new();
    counts.insert("inside_checked".into(), fixture.member_ranks.len() as u64);
    counts.insert("inside_killers".into(), inside_killers);
    counts.insert("sampled".into(), outside_checked);
    counts.insert("copy_index".into(), fixture.copy_index as u64);

    let status = if violations.is_empty() && inside_killers == fixture.member_ranks.len() as u64 {
        IngredientStatus::VerifiedSampled {
            samples: outside_checked,
        }
    } else {
        IngredientStatus::Failed {
            detail: violations
                .first()
                .cloned()
                .unwrap_or_else(|| "copy interior produced a non-killer".into()),
        }
    };
    Ok(IngredientReport {
        ingredient: "unique-maximal(order-23)".into(),
        status,
        counts,
        notes: vec![format!(
            "representative y = {} (copy {})",
            fixture.y, fixture.copy_index
        )],
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Dispatcher matching the sampled/exhaustive mode switch (no persistence;
/// long runs should call the exhaustive variant with a checkpoint hook).
pub fn verify_unique_maximal(
    ctx: &M23Context,
    table: &SylowTable,
    mode: VerifyMode,
) -> Result<IngredientReport, M23Error> {
    match mode {
        VerifyMode::Sampled { samples, seed } => {
            verify_unique_maximal_sampled(ctx, table, samples, seed)
        }
        VerifyMode::Exhaustive => {
            let mut scan = unique_maximal_scan();
            verify_unique_maximal_exhaustive(ctx, table, &mut scan, |_| {})
        }
    }
}

// ---------------------------------------------------------------------------
// order-14 step: order-14 elements generate with every order-11 element
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Order14ScanChunk {
    pub checked: u64,
    pub failures: Vec<String>,
}

/// Fresh scan state for the exhaustive order-14 verification over `reps`
/// representatives (one full order-11 sweep per representative).
pub fn order14_scan(reps: usize) -> ChunkedScan<Order14ScanChunk> {
    ChunkedScan::new(reps as u64 * super::ORDER11_TOTAL, SCAN_CHUNK_SIZE)
}

/// Finds order-14 representatives with pairwise distinct cyclic subgroups by
/// seeded random search, sorted by canonical subgroup key. The scope of the
/// exhaustive verification is exactly these representatives.
pub fn find_order14_reps(
    ctx: &M23Context,
    count: usize,
    seed: u64,
) -> Result<Vec<Permutation>, M23Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_key: BTreeMap<Key23, Permutation> = BTreeMap::new();
    let mut budget = super::DEFAULT_SEARCH_BUDGET;
    while by_key.len() < count {
        if budget == 0 {
            return Err(M23Error::SearchBudget {
                target: format!("{count} order-14 representatives"),
                budget: super::DEFAULT_SEARCH_BUDGET,
            });
        }
        budget -= 1;
        let g = ctx.group().chain().random_element(&mut rng);
        if g.order() == 14 {
            by_key.entry(cyclic_subgroup_key(&g)).or_insert(g);
        }
    }
    Ok(by_key.into_values().collect())
}

/// Checks that all distinct order-14 powers of a representative generate the
/// same cyclic subgroup (so one sweep per representative covers them all).
pub fn order14_powers_share_subgroup(y: &Permutation) -> bool {
    let key = cyclic_subgroup_key(y);
    [3i64, 5, 9, 11, 13]
        .iter()
        .all(|&k| cyclic_subgroup_key(&y.power(k)) == key)
}

/// Exhaustive tier: for each representative, every order-11 element of the
/// group must generate with it.
pub fn verify_order14_exhaustive(
    cover: &CoverMap,
    reps: &[Permutation],
    scan: &mut ChunkedScan<Order14ScanChunk>,
    on_batch: impl FnMut(&ChunkedScan<Order14ScanChunk>),
) -> Result<IngredientReport, M23Error> {
    let start = Instant::now();
    if reps.is_empty() {
        return Err(M23Error::Data("no order-14 representatives supplied".into()));
    }
    for y in reps {
        if y.order() != 14 {
            return Err(M23Error::WrongElementOrder {
                expected: 14,
                found: y.order(),
            });
        }
    }
    let keys = cover.sorted_order11_keys();
    let per_rep = keys.len() as u64;

    scan.run(
        SCAN_BATCH_CHUNKS,
        |_, range| {
            let mut chunk = Order14ScanChunk {
                checked: 0,
                failures: Vec::new(),
            };
            for global in range {
                let rep = &reps[(global / per_rep) as usize];
                let x = perm_from_key(&keys[(global % per_rep) as usize]);
                chunk.checked += 1;
                let order = pair_subgroup_order(&x, rep, super::M23_DEGREE);
                if order != BigUint::from(super::M23_ORDER) {
                    chunk.failures.push(format!(
                        "⟨{x}, {rep}⟩ has order {order}, not the whole group"
                    ));
                }
            }
            chunk
        },
        on_batch,
    );

    let mut checked = 0u64;
    let mut failures = Vec::new();
    for chunk in scan.results.iter().flatten() {
        checked += chunk.checked;
        failures.extend_from_slice(&chunk.failures);
    }
    let mut counts = BTreeMap::new();
    counts.insert("pairs_checked".into(), checked);
    counts.insert("representatives".into(), reps.len() as u64);
    counts.insert("order11_elements".into(), per_rep);

    let status = if failures.is_empty() {
        IngredientStatus::VerifiedExhaustive
    } else {
        IngredientStatus::Failed {
            detail: failures[0].clone(),
        }
    };
    Ok(IngredientReport {
        ingredient: "order-14-step".into(),
        status,
        counts,
        notes: order14_scope_notes(reps),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Sampled tier: `samples` seeded random order-11 elements per
/// representative.
pub fn verify_order14_sampled(
    ctx: &M23Context,
    reps: &[Permutation],
    samples: u64,
    seed: u64,
) -> Result<IngredientReport, M23Error> {
    let start = Instant::now();
    if reps.is_empty() {
        return Err(M23Error::Data("no order-14 representatives supplied".into()));
    }
    let cfg = GenerationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for rep in reps {
        if rep.order() != 14 {
            return Err(M23Error::WrongElementOrder {
                expected: 14,
                found: rep.order(),
            });
        }
        for _ in 0..samples {
            let x = ctx.find_element_of_order(11, &mut rng, super::DEFAULT_SEARCH_BUDGET)?;
            checked += 1;
            let r = generates_pair(&x, rep, ctx.group(), &cfg)?;
            if !r.generates {
                failures.push(format!("⟨{x}, {rep}⟩ is proper"));
            }
        }
    }
    let mut counts = BTreeMap::new();
    counts.insert("pairs_checked".into(), checked);
    counts.insert("representatives".into(), reps.len() as u64);

    let status = if failures.is_empty() {
        IngredientStatus::VerifiedSampled { samples: checked }
    } else {
        IngredientStatus::Failed {
            detail: failures[0].clone(),
        }
    };
    Ok(IngredientReport {
        ingredient: "order-14-step".into(),
        status,
        counts,
        notes: order14_scope_notes(reps),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn order14_scope_notes(reps: &[Permutation]) -> Vec<String> {
    let mut notes = vec![format!(
        "scope: {} representative(s) with distinct cyclic subgroups found by seeded search; \
         coprime powers share each subgroup, so one sweep covers all their powers",
        reps.len()
    )];
    for y in reps {
        notes.push(format!(
            "representative {} (powers share subgroup: {})",
            y,
            order14_powers_share_subgroup(y)
        ));
    }
    notes
}

/// Dispatcher for the order-14 step; finds `rep_count` representatives by
/// seeded search first.
pub fn verify_order14_step(
    ctx: &M23Context,
    cover: &CoverMap,
    mode: VerifyMode,
    rep_count: usize,
    search_seed: u64,
) -> Result<IngredientReport, M23Error> {
    let reps = find_order14_reps(ctx, rep_count, search_seed)?;
    match mode {
        VerifyMode::Sampled { samples, seed } => {
            verify_order14_sampled(ctx, &reps, samples, seed)
        }
        VerifyMode::Exhaustive => {
            let mut scan = order14_scan(reps.len());
            verify_order14_exhaustive(cover, &reps, &mut scan, |_| {})
        }
    }
}

// ---------------------------------------------------------------------------
// spectra of the maximal copies
// ---------------------------------------------------------------------------

/// Verifies that 11 is in, and 14 out of, the spectrum of each maximal copy
/// containing order-11 elements (the M22 point stabilizer, the bundled M11
/// copy, and a 23:11 copy), and that M23 itself has order-14 elements.
pub fn verify_spectra(ctx: &M23Context, table: &SylowTable) -> Result<IngredientReport, M23Error> {
    let start = Instant::now();
    let mut counts = BTreeMap::new();
    let mut notes = Vec::new();
    let mut failures: Vec<String> = Vec::new();

    let mut check_copy = |name: &str,
                          handle: &crate::group::GroupHandle,
                          failures: &mut Vec<String>|
     -> Result<(), M23Error> {
        let spec = spectrum(handle, super::M22_ORDER)?;
        if !spec.contains(11) {
            failures.push(format!("{name}: 11 missing from spectrum {spec}"));
        }
        if spec.contains(14) {
            failures.push(format!("{name}: 14 present in spectrum {spec}"));
        }
        notes.push(format!("spectrum({name}) = {spec}"));
        Ok(())
    };

    check_copy("M22 copy", ctx.m22(), &mut failures)?;
    counts.insert("m22_order".into(), ctx.m22().order_u64()?);

    match ctx.m11() {
        Some(m11) => {
            check_copy("M11 copy", m11, &mut failures)?;
            counts.insert("m11_order".into(), m11.order_u64()?);
        }
        None => {
            notes.push(format!(
                "degraded scope: {}",
                ctx.m11_scope_note().unwrap_or("M11 data missing")
            ));
        }
    }

    let copy = table.normalizer(0)?;
    let copy_spec = spectrum(&copy, super::COPY_ORDER)?;
    let expected: std::collections::BTreeSet<u64> = [1u64, 11, 23].into_iter().collect();
    if copy_spec.orders() != &expected {
        failures.push(format!("23:11 copy spectrum is {copy_spec}, expected {{1, 11, 23}}"));
    }
    notes.push(format!("spectrum(23:11 copy) = {copy_spec}"));
    counts.insert("copy_order".into(), copy.order_u64()?);

    // 14 ∈ spectrum(M23): exhibit the canonical-first order-14 element
    let y14 = ctx.first_order14();
    let y14_rank = ctx.group().chain().rank_of(y14)?;
    counts.insert("first_order14_rank".into(), y14_rank);
    notes.push(format!("14 ∈ spectrum(M23): witness {y14}"));

    let status = if failures.is_empty() {
        IngredientStatus::VerifiedExhaustive
    } else {
        IngredientStatus::Failed {
            detail: failures[0].clone(),
        }
    };
    Ok(IngredientReport {
        ingredient: "copy-spectra".into(),
        status,
        counts,
        notes,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// witness-certificate checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertScanChunk {
    pub scanned: u64,
    pub killed_by_hint: u64,
    pub killed_by_scan: u64,
    pub survivor_rank: Option<u64>,
}

/// Fresh scan state for a full certificate sweep.
pub fn certificate_scan() -> ChunkedScan<CertScanChunk> {
    ChunkedScan::new(super::M23_ORDER, SCAN_CHUNK_SIZE)
}

#[derive(Debug, Clone)]
pub enum CertificateVerdict {
    /// Every element of the group has a recorded killer in the set.
    ConfirmedMateless {
        scanned: u64,
        killed_by_hint: u64,
        killed_by_scan: u64,
    },
    /// The set has a mate, exhibited with verified per-pair evidence.
    Refuted {
        mate: Permutation,
        origin: Option<MateOrigin>,
        evidence: Vec<PairEvidence>,
    },
}

impl CertificateVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, CertificateVerdict::Refuted { .. })
    }
}

/// Checks a claimed mateless certificate.
///
/// The cover-guided mate search runs first: for sets within the covering
/// bound it refutes immediately with a verified mate. Only when it yields no
/// mate (possible for oversized sets) does the full dispatch scan run: every
/// element of the group must be killed by some member of the set, with
/// shared-copy membership as the killer hint and a linear generation scan as
/// the fallback. Any survivor refutes the certificate.
pub fn verify_witness_certificate(
    ctx: &M23Context,
    table: &SylowTable,
    cover: &CoverMap,
    challenge: &ChallengeSet,
    scan: &mut ChunkedScan<CertScanChunk>,
    on_batch: impl FnMut(&ChunkedScan<CertScanChunk>),
) -> Result<CertificateVerdict, M23Error> {
    let guided = proof_guided_mate(ctx, table, cover, challenge, true)?;
    if let Some(mate) = guided.mate {
        return Ok(CertificateVerdict::Refuted {
            mate,
            origin: guided.origin,
            evidence: guided.evidence,
        });
    }

    let hint = CopyKillerHint::new(cover, challenge)?;
    let cfg = GenerationConfig::default();
    let group = ctx.group();
    let chain = group.chain();

    scan.run(
        SCAN_BATCH_CHUNKS,
        |_, range| {
            let mut chunk = CertScanChunk {
                scanned: 0,
                killed_by_hint: 0,
                killed_by_scan: 0,
                survivor_rank: None,
            };
            for (offset, y) in chain.elements_range(range.start, range.end).enumerate() {
                chunk.scanned += 1;
                if hint.quick_killer(&y).is_some() {
                    chunk.killed_by_hint += 1;
                    continue;
                }
                let killed = challenge.iter().any(|x| {
                    !generates_pair(x, &y, group, &cfg)
                        .expect("challenge elements are members")
                        .generates
                });
                if killed {
                    chunk.killed_by_scan += 1;
                } else {
                    chunk.survivor_rank = Some(range.start + offset as u64);
                    break;
                }
            }
            chunk
        },
        on_batch,
    );

    let mut scanned = 0u64;
    let mut killed_by_hint = 0u64;
    let mut killed_by_scan = 0u64;
    let mut survivor: Option<u64> = None;
    for chunk in scan.results.iter().flatten() {
        scanned += chunk.scanned;
        killed_by_hint += chunk.killed_by_hint;
        killed_by_scan += chunk.killed_by_scan;
        if let Some(rank) = chunk.survivor_rank {
            survivor = Some(survivor.map_or(rank, |r: u64| r.min(rank)));
        }
    }

    if let Some(rank) = survivor {
        let y = chain.element_at(rank)?;
        let (ok, evidence) = is_mate(&y, challenge, group, &cfg)?;
        if !ok {
            return Err(M23Error::Invariant(format!(
                "certificate survivor {y} failed mate re-verification"
            )));
        }
        return Ok(CertificateVerdict::Refuted {
            mate: y,
            origin: None,
            evidence,
        });
    }
    Ok(CertificateVerdict::ConfirmedMateless {
        scanned,
        killed_by_hint,
        killed_by_scan,
    })
}
