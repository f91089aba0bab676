//! The Sylow-23 copy table and the element-to-copies cover map.

use super::{M23Context, M23Error};
use crate::group::{orbit_stabilizer, GeneratorSet, GroupHandle};
use crate::perm::Permutation;
use arrayvec::ArrayVec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Compact image-array key for degree-23 permutations.
pub type Key23 = [u8; 23];

pub(crate) fn key_of(p: &Permutation) -> Key23 {
    let mut k = [0u8; 23];
    k.copy_from_slice(p.images());
    k
}

pub fn perm_from_key(key: &Key23) -> Permutation {
    Permutation::from_images(key).expect("stored keys are valid permutations")
}

/// Canonical key of the cyclic subgroup `⟨p⟩`: the lexicographically least
/// image array among its generators (the powers `p^k` with `k` coprime to
/// the order; for prime order, all nontrivial powers).
pub fn cyclic_subgroup_key(p: &Permutation) -> Key23 {
    debug_assert_eq!(p.degree(), 23);
    let order = p.order();
    let mut best = key_of(p);
    let mut cur = p.clone();
    for k in 2..order {
        cur = cur.mul(p);
        if num_integer::gcd(k, order) == 1 {
            let ck = key_of(&cur);
            if ck < best {
                best = ck;
            }
        }
    }
    best
}

/// Canonical index of the 40,320 Sylow-23 subgroups of M23 (equivalently of
/// their normalizers, the Frobenius 23:11 copies).
///
/// The copy of index `i` is represented by `keys[i]`, the canonical key of
/// its Sylow subgroup; indices are assigned in lexicographic key order, so
/// the table is identical for every build seed. Normalizers are materialized
/// lazily by conjugating the base copy's normalizer.
pub struct SylowTable {
    keys: Vec<Key23>,
    index: HashMap<Key23, u32>,
    /// `conjugators[i]` carries the base copy to copy `i` under conjugation.
    conjugators: Vec<Permutation>,
    base_index: u32,
    base_normalizer: GroupHandle,
}

impl SylowTable {
    /// Finds one Sylow-23 subgroup by seeded random search and enumerates
    /// the conjugation orbit of its canonical key under the group
    /// generators. The orbit size must come out to 40,320 and the stabilizer
    /// (the normalizer) to order 253.
    pub fn build(ctx: &M23Context, seed: u64) -> Result<SylowTable, M23Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ctx.find_element_of_order(23, &mut rng, super::DEFAULT_SEARCH_BUDGET)?;
        let start = cyclic_subgroup_key(&p);
        let os = orbit_stabilizer(
            ctx.group(),
            start,
            |key, g| cyclic_subgroup_key(&perm_from_key(key).conj(g)),
            super::COPY_COUNT as usize + 1,
        )?;
        if os.orbit.len() != super::COPY_COUNT as usize {
            return Err(M23Error::Validation {
                check: "Sylow-23 subgroup count",
                expected: super::COPY_COUNT.to_string(),
                found: os.orbit.len().to_string(),
            });
        }
        let norm_order = os.stabilizer.order_u64()?;
        if norm_order != super::COPY_ORDER {
            return Err(M23Error::Validation {
                check: "Sylow-23 normalizer order",
                expected: super::COPY_ORDER.to_string(),
                found: norm_order.to_string(),
            });
        }

        // canonical indexing: sort keys lexicographically
        let mut positions: Vec<u32> = (0..os.orbit.len() as u32).collect();
        positions.sort_unstable_by_key(|&i| os.orbit[i as usize]);
        let mut keys = Vec::with_capacity(os.orbit.len());
        let mut conjugators = Vec::with_capacity(os.orbit.len());
        let mut index = HashMap::with_capacity(os.orbit.len());
        let mut base_index = 0u32;
        for (new_idx, &old_idx) in positions.iter().enumerate() {
            let key = os.orbit[old_idx as usize];
            if old_idx == 0 {
                base_index = new_idx as u32;
            }
            index.insert(key, new_idx as u32);
            keys.push(key);
            conjugators.push(os.transversal[old_idx as usize].clone());
        }

        Ok(SylowTable {
            keys,
            index,
            conjugators,
            base_index,
            base_normalizer: os.stabilizer,
        })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Canonical key of the copy's Sylow subgroup: its lex-least generator.
    pub fn key(&self, idx: u32) -> &Key23 {
        &self.keys[idx as usize]
    }

    pub fn index_of(&self, key: &Key23) -> Option<u32> {
        self.index.get(key).copied()
    }

    /// Index of the copy a given order-23 element belongs to.
    pub fn copy_of_element(&self, p: &Permutation) -> Result<u32, M23Error> {
        if p.order() != 23 {
            return Err(M23Error::WrongElementOrder {
                expected: 23,
                found: p.order(),
            });
        }
        self.index_of(&cyclic_subgroup_key(p)).ok_or_else(|| {
            M23Error::Invariant("order-23 element's Sylow subgroup missing from table".into())
        })
    }

    pub fn base_index(&self) -> u32 {
        self.base_index
    }

    pub fn base_normalizer(&self) -> &GroupHandle {
        &self.base_normalizer
    }

    /// Conjugator carrying the base copy to copy `idx`.
    pub fn conjugator(&self, idx: u32) -> &Permutation {
        &self.conjugators[idx as usize]
    }

    /// Normalizer of the indexed copy: the base normalizer conjugated by the
    /// stored transversal element. Validated to have order 253.
    pub fn normalizer(&self, idx: u32) -> Result<GroupHandle, M23Error> {
        let u = &self.conjugators[idx as usize];
        let gens: Vec<Permutation> = self
            .base_normalizer
            .generators()
            .iter()
            .map(|h| h.conj(u))
            .collect();
        let handle = GroupHandle::from_generators(GeneratorSet::new(23, gens)?);
        let order = handle.order_u64()?;
        if order != super::COPY_ORDER {
            return Err(M23Error::Validation {
                check: "copy normalizer order",
                expected: super::COPY_ORDER.to_string(),
                found: order.to_string(),
            });
        }
        Ok(handle)
    }
}

/// Element-to-copies membership index: every order-11 element maps to the
/// sorted list of exactly five copies containing it, every order-23 element
/// to its single copy. Elements of other orders belong to no copy, since
/// the copies have spectrum `{1, 11, 23}`.
pub struct CoverMap {
    order11: HashMap<Key23, ArrayVec<u32, { super::COPIES_PER_ORDER11 }>>,
    order23: HashMap<Key23, u32>,
}

impl CoverMap {
    /// Builds the map by enumerating each copy's 253 elements (the base
    /// normalizer's elements conjugated into place) and inverting the
    /// membership relation. Every stated count is asserted:
    /// 230 order-11 and 22 order-23 elements per copy, five copies per
    /// order-11 element overall, and the double-count totals.
    pub fn build(table: &SylowTable) -> Result<CoverMap, M23Error> {
        let base_elems: Vec<Permutation> = table
            .base_normalizer()
            .chain()
            .elements()
            .filter(|g| !g.is_identity())
            .collect();
        if base_elems.len() + 1 != super::COPY_ORDER as usize {
            return Err(M23Error::Invariant(format!(
                "base normalizer enumerates {} elements, expected {}",
                base_elems.len() + 1,
                super::COPY_ORDER
            )));
        }
        let base_orders: Vec<u64> = base_elems.iter().map(|g| g.order()).collect();
        let n11 = base_orders.iter().filter(|&&o| o == 11).count();
        let n23 = base_orders.iter().filter(|&&o| o == 23).count();
        if n11 != super::ORDER11_PER_COPY || n23 != super::ORDER23_PER_COPY {
            return Err(M23Error::Invariant(format!(
                "copy spectrum breakdown is {n11} order-11 and {n23} order-23 elements, \
                 expected {} and {}",
                super::ORDER11_PER_COPY,
                super::ORDER23_PER_COPY
            )));
        }

        let mut order11: HashMap<Key23, ArrayVec<u32, { super::COPIES_PER_ORDER11 }>> =
            HashMap::with_capacity(super::ORDER11_TOTAL as usize);
        let mut order23: HashMap<Key23, u32> =
            HashMap::with_capacity(super::ORDER23_TOTAL as usize);

        for idx in 0..table.len() as u32 {
            let u = table.conjugator(idx);
            for (h, &order) in base_elems.iter().zip(&base_orders) {
                let x = h.conj(u);
                match order {
                    11 => {
                        let entry = order11.entry(key_of(&x)).or_default();
                        if entry.try_push(idx).is_err() {
                            return Err(M23Error::Invariant(format!(
                                "order-11 element found in more than {} copies",
                                super::COPIES_PER_ORDER11
                            )));
                        }
                    }
                    23 => {
                        let key = key_of(&x);
                        if let Some(prev) = order23.insert(key, idx) {
                            if prev != idx {
                                return Err(M23Error::Invariant(
                                    "order-23 element found in two distinct copies".into(),
                                ));
                            }
                        }
                    }
                    other => {
                        return Err(M23Error::Invariant(format!(
                            "element of order {other} inside a 23:11 copy"
                        )))
                    }
                }
            }
        }

        if order11.len() as u64 != super::ORDER11_TOTAL {
            return Err(M23Error::Invariant(format!(
                "cover map holds {} order-11 elements, expected {}",
                order11.len(),
                super::ORDER11_TOTAL
            )));
        }
        if order23.len() as u64 != super::ORDER23_TOTAL {
            return Err(M23Error::Invariant(format!(
                "cover map holds {} order-23 elements, expected {}",
                order23.len(),
                super::ORDER23_TOTAL
            )));
        }
        for copies in order11.values_mut() {
            if copies.len() != super::COPIES_PER_ORDER11 {
                return Err(M23Error::Invariant(format!(
                    "an order-11 element lies in {} copies, expected {}",
                    copies.len(),
                    super::COPIES_PER_ORDER11
                )));
            }
            copies.sort_unstable();
        }
        // cross-check the order-23 side against the canonical subgroup keys
        for (key, &idx) in &order23 {
            let expected = table.index_of(&cyclic_subgroup_key(&perm_from_key(key)));
            if expected != Some(idx) {
                return Err(M23Error::Invariant(
                    "order-23 cover entry disagrees with its Sylow subgroup key".into(),
                ));
            }
        }

        Ok(CoverMap { order11, order23 })
    }

    pub fn order11_len(&self) -> usize {
        self.order11.len()
    }

    pub fn order23_len(&self) -> usize {
        self.order23.len()
    }

    pub fn copies_of_order11(&self, x: &Permutation) -> Option<&[u32]> {
        self.order11.get(&key_of(x)).map(|v| v.as_slice())
    }

    pub fn copy_of_order23(&self, x: &Permutation) -> Option<u32> {
        self.order23.get(&key_of(x)).copied()
    }

    /// Sorted order-11 element keys; the deterministic scan order for the
    /// exhaustive order-14 verification.
    pub fn sorted_order11_keys(&self) -> Vec<Key23> {
        let mut keys: Vec<Key23> = self.order11.keys().copied().collect();
        keys.sort_unstable();
        keys
    }
}

/// Copy indices containing an element: one for order 23, five for order 11,
/// none for every other order. The identity is rejected.
pub fn copies_containing(
    ctx: &M23Context,
    table: &SylowTable,
    cover: &CoverMap,
    x: &Permutation,
) -> Result<Vec<u32>, M23Error> {
    if x.is_identity() {
        return Err(M23Error::IdentityInput);
    }
    if !ctx.group().contains(x)? {
        return Err(M23Error::Group(crate::group::GroupError::NotInGroup));
    }
    match x.order() {
        11 => cover
            .copies_of_order11(x)
            .map(|s| s.to_vec())
            .ok_or_else(|| {
                M23Error::Invariant("order-11 element missing from cover map".into())
            }),
        23 => {
            let idx = cover.copy_of_order23(x).ok_or_else(|| {
                M23Error::Invariant("order-23 element missing from cover map".into())
            })?;
            debug_assert_eq!(table.copy_of_element(x).ok(), Some(idx));
            Ok(vec![idx])
        }
        _ => Ok(Vec::new()),
    }
}
