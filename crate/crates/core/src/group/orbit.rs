//! Orbit-stabilizer for arbitrary actions with hashable canonical keys.
//!
//! This is the normalizer workhorse: acting by conjugation on the canonical
//! key of a subgroup, the stabilizer of the key is the normalizer. Schreier
//! generators of the point stabilizer are sifted into a growing chain until
//! the order forced by the orbit-stabilizer theorem (`|G| / |orbit|`) is
//! reached, so the scan usually stops long before all edges are visited.

use super::{GeneratorSet, GroupError, GroupHandle};
use crate::perm::Permutation;
use num_bigint::BigUint;
use num_integer::Integer;
use std::collections::HashMap;
use std::hash::Hash;

#[derive(Debug)]
pub struct OrbitStabilizer<K> {
    /// Orbit keys in discovery order; `orbit[0]` is the start key.
    pub orbit: Vec<K>,
    /// `transversal[i]` maps the start key to `orbit[i]` under the action.
    pub transversal: Vec<Permutation>,
    /// Stabilizer of the start key.
    pub stabilizer: GroupHandle,
}

/// Computes the orbit of `start` under `group` for the action `act`
/// (which must satisfy `act(act(k, g), h) = act(k, g·h)`), together with the
/// stabilizer of `start`, via Schreier generators.
pub fn orbit_stabilizer<K, F>(
    group: &GroupHandle,
    start: K,
    act: F,
    orbit_budget: usize,
) -> Result<OrbitStabilizer<K>, GroupError>
where
    K: Eq + Hash + Clone,
    F: Fn(&K, &Permutation) -> K,
{
    let degree = group.degree();
    let gens = group.generators();
    let mut orbit: Vec<K> = vec![start.clone()];
    let mut index: HashMap<K, u32> = HashMap::new();
    index.insert(start, 0);
    let mut transversal: Vec<Permutation> = vec![Permutation::identity(degree)];

    let mut cursor = 0;
    while cursor < orbit.len() {
        for g in gens {
            let img = act(&orbit[cursor], g);
            if !index.contains_key(&img) {
                if orbit.len() >= orbit_budget {
                    return Err(GroupError::OrbitBudgetExceeded {
                        limit: orbit_budget,
                    });
                }
                index.insert(img.clone(), orbit.len() as u32);
                transversal.push(transversal[cursor].mul(g));
                orbit.push(img);
            }
        }
        cursor += 1;
    }

    // |Stab| = |G| / |orbit| exactly; collect Schreier generators until the
    // chain reaches it.
    let (target, rem) = group.order().div_rem(&BigUint::from(orbit.len()));
    debug_assert!(rem == BigUint::from(0u32), "orbit size must divide |G|");
    let mut stab_gens: Vec<Permutation> = Vec::new();
    let mut stabilizer = GroupHandle::from_generators(GeneratorSet::new(degree, Vec::new())?);
    'outer: for i in 0..orbit.len() {
        if stabilizer.order() == &target {
            break;
        }
        for g in gens {
            let img = act(&orbit[i], g);
            let j = index[&img] as usize;
            let schreier = transversal[i].mul(g).mul(&transversal[j].inverse());
            if schreier.is_identity() || stabilizer.contains(&schreier)? {
                continue;
            }
            stab_gens.push(schreier);
            stabilizer =
                GroupHandle::from_generators(GeneratorSet::new(degree, stab_gens.clone())?);
            if stabilizer.order() == &target {
                break 'outer;
            }
        }
    }
    debug_assert_eq!(stabilizer.order(), &target);

    Ok(OrbitStabilizer {
        orbit,
        transversal,
        stabilizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Point;

    fn p(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    #[test]
    fn point_action_recovers_point_stabilizer() {
        let gens =
            GeneratorSet::new(5, vec![p("(1,2,3,4,5)", 5), p("(1,2,3)", 5)]).unwrap();
        let g = GroupHandle::from_generators(gens);
        let os = orbit_stabilizer(&g, 0 as Point, |&k, perm| perm.image(k), 1 << 20).unwrap();
        assert_eq!(os.orbit.len(), 5);
        assert_eq!(os.stabilizer.order_u64().unwrap(), 12);
        // transversal entries really map the start key to their orbit key
        for (i, k) in os.orbit.iter().enumerate() {
            assert_eq!(os.transversal[i].image(0), *k);
        }
    }

    #[test]
    fn conjugation_action_gives_normalizer() {
        // N_{S4}(⟨(1,2,3,4)⟩) is the dihedral group of order 8
        let gens = GeneratorSet::new(4, vec![p("(1,2)", 4), p("(1,2,3,4)", 4)]).unwrap();
        let g = GroupHandle::from_generators(gens);
        let c4 = p("(1,2,3,4)", 4);
        let key = |q: &Permutation| -> Permutation {
            // canonical key of ⟨q⟩: lex-least image array among the powers
            let mut best = q.clone();
            let mut cur = q.clone();
            for _ in 2..q.order() {
                cur = cur.mul(q);
                if cur.order() == q.order() && cur < best {
                    best = cur.clone();
                }
            }
            best
        };
        let os = orbit_stabilizer(&g, key(&c4), |k, perm| key(&k.conj(perm)), 1 << 20).unwrap();
        assert_eq!(os.orbit.len(), 3);
        assert_eq!(os.stabilizer.order_u64().unwrap(), 8);
        assert!(os.stabilizer.contains(&c4).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let gens = GeneratorSet::new(5, vec![p("(1,2,3,4,5)", 5)]).unwrap();
        let g = GroupHandle::from_generators(gens);
        let err = orbit_stabilizer(&g, 0 as Point, |&k, perm| perm.image(k), 3).unwrap_err();
        assert!(matches!(err, GroupError::OrbitBudgetExceeded { limit: 3 }));
    }
}
