//! The M23 case: group construction, the table of Frobenius 23:11 copies,
//! the element-to-copies cover map, cover-guided mate finding for challenge
//! sets of up to 8,064 elements, and exhaustive verification of the
//! structural facts that the mate argument rests on.
//!
//! Core structure (all machine-verified here, never assumed):
//! - `|M23| = 10,200,960`, acting transitively on 23 points;
//! - the group has exactly 40,320 Sylow-23 subgroups, each with a
//!   normalizer of order 253 and spectrum `{1, 11, 23}` (the "copies");
//! - every element of order 23 lies in exactly one copy, every element of
//!   order 11 in exactly five, and elements of other orders in none;
//! - the point stabilizer (an M22 copy, order 443,520), the bundled M11
//!   copy (order 7,920), and the 23:11 copies all lack elements of order
//!   14, while M23 itself has them.
//!
//! Consequently a challenge set of at most `40,320 / 5 = 8,064` elements
//! either leaves some copy uncovered — and any order-23 element of that
//! copy is a mate — or consists of 8,064 order-11 elements covering all
//! copies, in which case any order-14 element is a mate.

mod mate;
mod tables;
mod verify;

pub use mate::{
    challenge_order_histogram, proof_guided_mate, CopyKillerHint, Order23KillShortcut,
    ProofGuidedFinder,
};
pub use tables::{copies_containing, cyclic_subgroup_key, perm_from_key, CoverMap, Key23, SylowTable};
pub use verify::{
    certificate_scan, order14_scan, unique_maximal_scan, verify_order14_step, verify_spectra,
    verify_unique_maximal, verify_witness_certificate, CertScanChunk, CertificateVerdict,
    IngredientReport, IngredientStatus, Order14ScanChunk, UniqueMaximalScanChunk, VerifyMode,
};

use crate::group::{GeneratorSet, GroupError, GroupHandle};
use crate::perm::Permutation;
use crate::spread::SpreadError;
use rand::Rng;
use std::path::Path;
use std::sync::OnceLock;
use thiserror::Error;

pub const M23_ORDER: u64 = 10_200_960;
pub const M23_DEGREE: usize = 23;
pub const M22_ORDER: u64 = 443_520;
pub const M11_ORDER: u64 = 7_920;
/// Order of a Sylow-23 normalizer (a Frobenius 23:11 copy).
pub const COPY_ORDER: u64 = 253;
/// Number of Sylow-23 subgroups, hence of 23:11 copies.
pub const COPY_COUNT: u32 = 40_320;
/// Order of the normalizer of a cyclic subgroup of order 11 (Frobenius 11:5).
pub const ORDER11_NORMALIZER_ORDER: u64 = 55;
/// Copies containing a fixed order-11 element.
pub const COPIES_PER_ORDER11: usize = 5;
/// Order-11 elements per copy (23 subgroups of order 11, 10 nontrivial each).
pub const ORDER11_PER_COPY: usize = 230;
/// Order-23 elements per copy (the normal Sylow subgroup minus identity).
pub const ORDER23_PER_COPY: usize = 22;
/// Total order-11 elements: 40,320 × 230 / 5.
pub const ORDER11_TOTAL: u64 = 1_854_720;
/// Total order-23 elements: 40,320 × 22.
pub const ORDER23_TOTAL: u64 = 887_040;
/// Largest challenge size for which the copy-covering argument guarantees a
/// mate: one element covers at most five of the 40,320 copies.
pub const GUARANTEED_CHALLENGE_SIZE: u64 = (COPY_COUNT as u64) / (COPIES_PER_ORDER11 as u64);

/// Bundled generator data (see `data/` for provenance notes).
pub const BUNDLED_GENERATORS: &str = include_str!("../../data/m23-generators.txt");
pub const BUNDLED_M11_WORDS: &str = include_str!("../../data/m23-m11-words.txt");

pub(crate) const DEFAULT_SEARCH_BUDGET: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum M23Error {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Spread(#[from] SpreadError),
    #[error(transparent)]
    Generation(#[from] crate::generation::GenerationError),
    #[error("validation failed [{check}]: expected {expected}, found {found}")]
    Validation {
        check: &'static str,
        expected: String,
        found: String,
    },
    #[error("data error: {0}")]
    Data(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("seeded search budget of {budget} exhausted while looking for {target}; retry with a different --seed")]
    SearchBudget { target: String, budget: u64 },
    #[error("invariant breach: {0}")]
    Invariant(String),
    #[error("element has order {found}, expected {expected}")]
    WrongElementOrder { expected: u64, found: u64 },
    #[error("the identity is not a valid input here")]
    IdentityInput,
}

/// Loaded and validated M23 data: the group, its maximal-copy witnesses,
/// and lazily cached canonical representatives. Build the Sylow table and
/// cover map separately via [`SylowTable::build`] and [`CoverMap::build`].
#[derive(Debug)]
pub struct M23Context {
    group: GroupHandle,
    m22: GroupHandle,
    m11: Option<GroupHandle>,
    m11_scope_note: Option<String>,
    generators_text: String,
    m11_words_text: Option<String>,
    first_order14: OnceLock<Permutation>,
}

impl M23Context {
    /// Loads the bundled generator data.
    pub fn load_default() -> Result<M23Context, M23Error> {
        Self::from_texts(BUNDLED_GENERATORS, Some(BUNDLED_M11_WORDS))
    }

    /// Loads `m23-generators.txt` (required) and `m23-m11-words.txt`
    /// (optional; its absence degrades the verification scope) from a
    /// directory.
    pub fn load_from_dir(dir: &Path) -> Result<M23Context, M23Error> {
        let gens_path = dir.join("m23-generators.txt");
        let gens_text = std::fs::read_to_string(&gens_path)
            .map_err(|e| M23Error::Io(format!("{}: {e}", gens_path.display())))?;
        let words_path = dir.join("m23-m11-words.txt");
        let words_text = match std::fs::read_to_string(&words_path) {
            Ok(t) => Some(t),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(M23Error::Io(format!("{}: {e}", words_path.display()))),
        };
        Self::from_texts(&gens_text, words_text.as_deref())
    }

    /// Builds and validates a context from file contents. The data is not
    /// trusted: the group order is recomputed from two independently based
    /// chains, transitivity is checked, and the M22/M11 copy orders are
    /// re-derived.
    pub fn from_texts(
        generators_text: &str,
        m11_words_text: Option<&str>,
    ) -> Result<M23Context, M23Error> {
        let gens = GeneratorSet::parse_file(generators_text)?;
        if gens.degree() != M23_DEGREE {
            return Err(M23Error::Validation {
                check: "degree",
                expected: M23_DEGREE.to_string(),
                found: gens.degree().to_string(),
            });
        }
        if gens.generators().len() != 2 {
            return Err(M23Error::Validation {
                check: "generator count (nontrivial, distinct)",
                expected: "2".into(),
                found: gens.generators().len().to_string(),
            });
        }
        let group = GroupHandle::from_generators(gens.clone());
        let natural_order = group.order_u64()?;
        // second, independently based chain must agree
        let reversed: Vec<u8> = (0..M23_DEGREE as u8).rev().collect();
        let alt = GroupHandle::with_base_hint(gens, Some(&reversed));
        let alt_order = alt.order_u64()?;
        if natural_order != alt_order {
            return Err(M23Error::Validation {
                check: "order (chain cross-check)",
                expected: natural_order.to_string(),
                found: alt_order.to_string(),
            });
        }
        if natural_order != M23_ORDER {
            return Err(M23Error::Validation {
                check: "order",
                expected: M23_ORDER.to_string(),
                found: natural_order.to_string(),
            });
        }
        if !group.is_transitive() {
            return Err(M23Error::Validation {
                check: "transitivity",
                expected: "transitive on 23 points".into(),
                found: "intransitive".into(),
            });
        }

        let m22 = group.point_stabilizer(0)?;
        let m22_order = m22.order_u64()?;
        if m22_order != M22_ORDER {
            return Err(M23Error::Validation {
                check: "point stabilizer order",
                expected: M22_ORDER.to_string(),
                found: m22_order.to_string(),
            });
        }

        let (m11, m11_scope_note) = match m11_words_text {
            None => (
                None,
                Some("m23-m11-words.txt missing: M11 copy checks skipped".to_string()),
            ),
            Some(text) => {
                let m11 = build_m11(&group, text)?;
                (Some(m11), None)
            }
        };

        Ok(M23Context {
            group,
            m22,
            m11,
            m11_scope_note,
            generators_text: generators_text.to_string(),
            m11_words_text: m11_words_text.map(|t| t.to_string()),
            first_order14: OnceLock::new(),
        })
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    /// The M22 maximal copy: stabilizer of point 0.
    pub fn m22(&self) -> &GroupHandle {
        &self.m22
    }

    /// The M11 maximal copy from the bundled generator words, when loaded.
    pub fn m11(&self) -> Option<&GroupHandle> {
        self.m11.as_ref()
    }

    pub fn m11_scope_note(&self) -> Option<&str> {
        self.m11_scope_note.as_deref()
    }

    pub fn generators_text(&self) -> &str {
        &self.generators_text
    }

    pub fn m11_words_text(&self) -> Option<&str> {
        self.m11_words_text.as_deref()
    }

    /// The canonical-first element of order 14 (lowest canonical rank).
    /// Computed once by scanning the canonical enumeration.
    pub fn first_order14(&self) -> &Permutation {
        self.first_order14.get_or_init(|| {
            self.group
                .chain()
                .elements()
                .find(|g| g.order() == 14)
                .expect("M23 contains elements of order 14")
        })
    }

    /// Seeded random search for an element of a given order.
    pub fn find_element_of_order<R: Rng + ?Sized>(
        &self,
        target: u64,
        rng: &mut R,
        budget: u64,
    ) -> Result<Permutation, M23Error> {
        for _ in 0..budget.max(1) {
            let g = self.group.chain().random_element(rng);
            if g.order() == target {
                return Ok(g);
            }
        }
        Err(M23Error::SearchBudget {
            target: format!("an element of order {target}"),
            budget: budget.max(1),
        })
    }
}

/// Evaluates a word over the letters `a`, `b`, `A`, `B` (inverses in upper
/// case), applied left to right, against the two group generators.
pub fn evaluate_word(
    word: &str,
    a: &Permutation,
    b: &Permutation,
) -> Result<Permutation, M23Error> {
    let a_inv = a.inverse();
    let b_inv = b.inverse();
    let mut acc = Permutation::identity(a.degree());
    for c in word.trim().chars() {
        let factor = match c {
            'a' => a,
            'b' => b,
            'A' => &a_inv,
            'B' => &b_inv,
            other => {
                return Err(M23Error::Data(format!(
                    "invalid letter {other:?} in generator word {word:?}"
                )))
            }
        };
        acc = acc.mul(factor);
    }
    Ok(acc)
}

fn build_m11(group: &GroupHandle, words_text: &str) -> Result<GroupHandle, M23Error> {
    let a = &group.generators()[0];
    let b = &group.generators()[1];
    let mut gens = Vec::new();
    for raw_line in words_text.lines() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        gens.push(evaluate_word(line, a, b)?);
    }
    if gens.is_empty() {
        return Err(M23Error::Data("m11 words file contains no words".into()));
    }
    let m11 = GroupHandle::from_generators(GeneratorSet::new(group.degree(), gens)?);
    let order = m11.order_u64()?;
    if order != M11_ORDER {
        return Err(M23Error::Validation {
            check: "M11 copy order",
            expected: M11_ORDER.to_string(),
            found: order.to_string(),
        });
    }
    Ok(m11)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_loads_and_validates() {
        let ctx = M23Context::load_default().unwrap();
        assert_eq!(ctx.group().order_u64().unwrap(), M23_ORDER);
        assert_eq!(ctx.m22().order_u64().unwrap(), M22_ORDER);
        assert_eq!(ctx.m11().unwrap().order_u64().unwrap(), M11_ORDER);
        assert!(ctx.group().is_transitive());
    }

    #[test]
    fn truncated_data_is_a_parse_error() {
        let err = M23Context::from_texts("degree 23\n(1,2", None).unwrap_err();
        assert!(matches!(err, M23Error::Group(GroupError::File { .. })));
    }

    #[test]
    fn wrong_group_is_a_validation_error() {
        // deliberately feed S4 generators (padded to degree 23): the order
        // check must name the failed check
        let text = "degree 23\n(1,2)\n(1,2,3,4)\n";
        let err = M23Context::from_texts(text, None).unwrap_err();
        match err {
            M23Error::Validation { check, .. } => assert_eq!(check, "order"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_m11_words_degrade_scope() {
        let ctx = M23Context::from_texts(BUNDLED_GENERATORS, None).unwrap();
        assert!(ctx.m11().is_none());
        assert!(ctx.m11_scope_note().is_some());
    }

    #[test]
    fn m11_copy_has_orbits_11_and_12() {
        let ctx = M23Context::load_default().unwrap();
        let m11 = ctx.m11().unwrap();
        let mut sizes = std::collections::HashMap::new();
        for &rep in m11.orbit_reps() {
            *sizes.entry(rep).or_insert(0usize) += 1;
        }
        let mut sizes: Vec<usize> = sizes.into_values().collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![11, 12]);
    }

    #[test]
    fn word_evaluation_conventions() {
        let ctx = M23Context::load_default().unwrap();
        let a = &ctx.group().generators()[0];
        let b = &ctx.group().generators()[1];
        assert_eq!(&evaluate_word("a", a, b).unwrap(), a);
        assert!(evaluate_word("aA", a, b).unwrap().is_identity());
        assert!(evaluate_word("xyz", a, b).is_err());
    }

    #[test]
    fn first_order14_is_canonical() {
        let ctx = M23Context::load_default().unwrap();
        let y = ctx.first_order14().clone();
        assert_eq!(y.order(), 14);
        let rank = ctx.group().chain().rank_of(&y).unwrap();
        // no earlier element has order 14
        for g in ctx.group().chain().elements_range(0, rank) {
            assert_ne!(g.order(), 14);
        }
    }
}
