//! Deterministic Schreier–Sims stabilizer chains.

use super::{GeneratorSet, GroupError};
use crate::perm::{Permutation, Point};
use num_bigint::BigUint;
use rand::Rng;

pub(crate) struct TransversalEntry {
    /// Representative mapping the base point to the orbit point.
    pub u: Permutation,
    pub u_inv: Permutation,
}

pub(crate) struct Level {
    pub base_point: Point,
    /// Strong generators fixing all earlier base points. The per-level lists
    /// are nested: every generator stored at level `i+1` also appears at
    /// level `i`.
    pub gens: Vec<Permutation>,
    /// Orbit of the base point under this level's generators, in discovery
    /// order; `orbit[0]` is the base point itself.
    pub orbit: Vec<Point>,
    /// Indexed by point; `Some` exactly for orbit points.
    pub transversal: Vec<Option<TransversalEntry>>,
}

impl Level {
    fn new(base_point: Point, degree: usize) -> Self {
        let mut transversal: Vec<Option<TransversalEntry>> =
            (0..degree).map(|_| None).collect();
        let id = Permutation::identity(degree);
        transversal[base_point as usize] = Some(TransversalEntry {
            u: id.clone(),
            u_inv: id,
        });
        Level {
            base_point,
            gens: Vec::new(),
            orbit: vec![base_point],
            transversal,
        }
    }
}

/// Base, transversals, and strong generators of a permutation group.
///
/// Construction is deterministic: same generators and hint, same chain. The
/// product of the per-level orbit sizes is the group order, sifting decides
/// membership, and the chain induces a canonical enumeration order
/// (lexicographic by base-image tuple) with rank/unrank support.
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
    order: BigUint,
}

impl std::fmt::Debug for StabilizerChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StabilizerChain")
            .field("degree", &self.degree)
            .field("base", &self.base())
            .field("order", &self.order)
            .finish()
    }
}

impl Clone for StabilizerChain {
    fn clone(&self) -> Self {
        // Levels are immutable after construction; rebuilding the clones of
        // the stored permutations is cheap at the degrees in scope.
        let levels = self
            .levels
            .iter()
            .map(|l| Level {
                base_point: l.base_point,
                gens: l.gens.clone(),
                orbit: l.orbit.clone(),
                transversal: l
                    .transversal
                    .iter()
                    .map(|t| {
                        t.as_ref().map(|e| TransversalEntry {
                            u: e.u.clone(),
                            u_inv: e.u_inv.clone(),
                        })
                    })
                    .collect(),
            })
            .collect();
        StabilizerChain {
            degree: self.degree,
            levels,
            order: self.order.clone(),
        }
    }
}

struct Builder {
    degree: usize,
    levels: Vec<Level>,
}

impl Builder {
    fn new(degree: usize, base_hint: Option<&[Point]>) -> Self {
        let mut levels = Vec::new();
        if let Some(hint) = base_hint {
            let mut seen = [false; 256];
            for &pt in hint {
                if (pt as usize) < degree && !seen[pt as usize] {
                    seen[pt as usize] = true;
                    levels.push(Level::new(pt, degree));
                }
            }
        }
        Builder { degree, levels }
    }

    /// Registers a non-identity strong generator, extending the base when it
    /// fixes every current base point. Returns the deepest level it joins.
    fn insert_gen(&mut self, g: Permutation) -> usize {
        debug_assert!(!g.is_identity());
        let j = match self
            .levels
            .iter()
            .position(|lvl| g.image(lvl.base_point) != lvl.base_point)
        {
            Some(j) => j,
            None => {
                // Default base rule: first moved point in natural order.
                let pt = (0..self.degree as u8)
                    .find(|&p| g.image(p) != p)
                    .expect("non-identity permutation moves a point");
                self.levels.push(Level::new(pt, self.degree));
                self.levels.len() - 1
            }
        };
        for lvl in &mut self.levels[..=j] {
            lvl.gens.push(g.clone());
        }
        j
    }

    /// Extends the orbit and transversal at `level` under its current
    /// generator list (breadth-first, generators in list order).
    fn update_orbit(&mut self, level: usize) {
        let lvl = &mut self.levels[level];
        let mut idx = 0;
        while idx < lvl.orbit.len() {
            let from = lvl.orbit[idx];
            for g_idx in 0..lvl.gens.len() {
                let to = lvl.gens[g_idx].image(from);
                if lvl.transversal[to as usize].is_none() {
                    let u = lvl.transversal[from as usize]
                        .as_ref()
                        .expect("orbit point has a representative")
                        .u
                        .mul(&lvl.gens[g_idx]);
                    let u_inv = u.inverse();
                    lvl.transversal[to as usize] = Some(TransversalEntry { u, u_inv });
                    lvl.orbit.push(to);
                }
            }
            idx += 1;
        }
    }

    fn sift_from(&self, level: usize, p: Permutation) -> Permutation {
        let mut residue = p;
        for lvl in &self.levels[level..] {
            if residue.is_identity() {
                break;
            }
            let target = residue.image(lvl.base_point);
            match lvl.transversal[target as usize] {
                Some(ref entry) => residue = residue.mul(&entry.u_inv),
                None => return residue,
            }
        }
        residue
    }

    /// Establishes the strong-generation property at `level`, assuming it
    /// already holds below. Newly found strong generators are inserted and
    /// the affected deeper levels re-completed before the scan continues.
    fn complete_level(&mut self, level: usize) {
        self.update_orbit(level);
        let mut w = 0;
        while w < self.levels[level].orbit.len() {
            let omega = self.levels[level].orbit[w];
            let mut s_idx = 0;
            while s_idx < self.levels[level].gens.len() {
                let sg = {
                    let lvl = &self.levels[level];
                    let s = &lvl.gens[s_idx];
                    let to = s.image(omega);
                    let u = &lvl.transversal[omega as usize]
                        .as_ref()
                        .expect("orbit point has a representative")
                        .u;
                    let u_to_inv = &lvl.transversal[to as usize]
                        .as_ref()
                        .expect("orbit is closed under generators")
                        .u_inv;
                    u.mul(s).mul(u_to_inv)
                };
                if !sg.is_identity() {
                    let residue = self.sift_from(level + 1, sg);
                    if !residue.is_identity() {
                        let j = self.insert_gen(residue);
                        debug_assert!(j > level);
                        for l in ((level + 1)..=j).rev() {
                            self.complete_level(l);
                        }
                    }
                }
                s_idx += 1;
            }
            w += 1;
        }
    }
}

impl StabilizerChain {
    /// Deterministic Schreier–Sims. Hint points become the leading base
    /// entries (in hint order); further base points are chosen as the first
    /// point in natural order moved by the generator that needs one.
    pub fn build(gens: &GeneratorSet, base_hint: Option<&[Point]>) -> StabilizerChain {
        let degree = gens.degree();
        let mut builder = Builder::new(degree, base_hint);
        for g in gens.generators() {
            builder.insert_gen(g.clone());
        }
        for i in (0..builder.levels.len()).rev() {
            builder.complete_level(i);
        }
        let order = builder
            .levels
            .iter()
            .map(|l| BigUint::from(l.orbit.len()))
            .product();
        StabilizerChain {
            degree,
            levels: builder.levels,
            order,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Exact group order: the product of the per-level orbit sizes.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u64(&self) -> Result<u64, GroupError> {
        u64::try_from(&self.order).map_err(|_| GroupError::OrderTooLarge)
    }

    pub fn base(&self) -> Vec<Point> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub(crate) fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Per-level orbit sizes (the order factors).
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Sifts a permutation through the chain; the residue is the identity
    /// exactly for members.
    pub fn sift(&self, p: &Permutation) -> Result<Permutation, GroupError> {
        if p.degree() != self.degree {
            return Err(GroupError::Perm(crate::perm::PermError::DegreeMismatch {
                left: self.degree,
                right: p.degree(),
            }));
        }
        let mut residue = p.clone();
        for lvl in &self.levels {
            if residue.is_identity() {
                break;
            }
            let target = residue.image(lvl.base_point);
            match lvl.transversal[target as usize] {
                Some(ref entry) => residue = residue.mul(&entry.u_inv),
                None => return Ok(residue),
            }
        }
        Ok(residue)
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, GroupError> {
        Ok(self.sift(p)?.is_identity())
    }

    /// Strong generators fixing the first `prefix` base points. With
    /// `prefix = 1` this generates the stabilizer of the leading base point.
    pub fn strong_generators_fixing_prefix(&self, prefix: usize) -> Vec<Permutation> {
        match self.levels.get(prefix) {
            Some(lvl) => lvl.gens.clone(),
            None => Vec::new(),
        }
    }

    /// Uniform random element: one independent uniform transversal pick per
    /// level. Reproducible given the caller's seeded RNG.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let picks: Vec<&Permutation> = self
            .levels
            .iter()
            .map(|lvl| {
                let omega = lvl.orbit[rng.gen_range(0..lvl.orbit.len())];
                &lvl.transversal[omega as usize]
                    .as_ref()
                    .expect("orbit point has a representative")
                    .u
            })
            .collect();
        let mut acc = Permutation::identity(self.degree);
        for u in picks.into_iter().rev() {
            acc = acc.mul(u);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    fn chain_of(degree: usize, gens: &[&str]) -> StabilizerChain {
        let gens = GeneratorSet::new(
            degree,
            gens.iter().map(|t| p(t, degree)).collect(),
        )
        .unwrap();
        StabilizerChain::build(&gens, None)
    }

    #[test]
    fn trivial_group() {
        let chain = chain_of(4, &[]);
        assert_eq!(chain.order_u64().unwrap(), 1);
        assert!(chain.contains(&Permutation::identity(4)).unwrap());
        assert!(!chain.contains(&p("(1,2)", 4)).unwrap());
    }

    #[test]
    fn s4_order_and_membership() {
        let chain = chain_of(4, &["(1,2)", "(1,2,3,4)"]);
        assert_eq!(chain.order_u64().unwrap(), 24);
        assert!(chain.contains(&p("(1,2)", 4)).unwrap());
        assert!(chain.contains(&p("(2,4)", 4)).unwrap());
    }

    #[test]
    fn a5_order_and_parity_obstruction() {
        let chain = chain_of(5, &["(1,2,3,4,5)", "(1,2,3)"]);
        assert_eq!(chain.order_u64().unwrap(), 60);
        // odd permutation cannot lie in an alternating group
        assert!(!chain.contains(&p("(1,2)", 5)).unwrap());
        assert!(chain.contains(&p("(1,2)(3,4)", 5)).unwrap());
    }

    #[test]
    fn base_hint_changes_base_not_order() {
        let gens =
            GeneratorSet::new(4, vec![p("(1,2)", 4), p("(1,2,3,4)", 4)]).unwrap();
        let natural = StabilizerChain::build(&gens, None);
        let hinted = StabilizerChain::build(&gens, Some(&[3, 1]));
        assert_eq!(natural.order(), hinted.order());
        assert_eq!(hinted.base()[0], 3);
    }

    #[test]
    fn deterministic_rebuild() {
        let gens =
            GeneratorSet::new(5, vec![p("(1,2,3,4,5)", 5), p("(1,2,3)", 5)]).unwrap();
        let a = StabilizerChain::build(&gens, None);
        let b = StabilizerChain::build(&gens, None);
        assert_eq!(a.base(), b.base());
        assert_eq!(a.orbit_lengths(), b.orbit_lengths());
        for (la, lb) in a.levels().iter().zip(b.levels().iter()) {
            assert_eq!(la.gens, lb.gens);
            assert_eq!(la.orbit, lb.orbit);
        }
    }

    #[test]
    fn random_element_is_reproducible_and_member() {
        use rand::SeedableRng;
        let chain = chain_of(5, &["(1,2,3,4,5)", "(1,2,3)"]);
        let mut rng1 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = chain.random_element(&mut rng1);
            let b = chain.random_element(&mut rng2);
            assert_eq!(a, b);
            assert!(chain.contains(&a).unwrap());
        }
    }
}
