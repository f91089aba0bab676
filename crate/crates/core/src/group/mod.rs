//! Stabilizer-chain machinery: group order, membership, canonical
//! enumeration, uniform random elements, and point stabilizers.
//!
//! Chains are built by a deterministic Schreier–Sims procedure: identical
//! generator lists (and base hints) produce identical chains, so every
//! downstream scan order is reproducible.

mod chain;
mod enumerate;
mod orbit;

pub use chain::StabilizerChain;
pub use enumerate::Elements;
pub use orbit::{orbit_stabilizer, OrbitStabilizer};

use crate::perm::{ParseError, PermError, Permutation, Point, MAX_DEGREE};
use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("permutation is not a member of the group")]
    NotInGroup,
    #[error("group order exceeds the enumerable range (2^64)")]
    OrderTooLarge,
    #[error("rank {rank} out of range for group order {order}")]
    RankOutOfRange { rank: u64, order: u64 },
    #[error("orbit size exceeded the budget of {limit}")]
    OrbitBudgetExceeded { limit: usize },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
}

/// A deduplicated, identity-free list of generators sharing one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    degree: usize,
    generators: Vec<Permutation>,
}

impl GeneratorSet {
    /// Validates degrees, removes identity entries and duplicates (keeping
    /// first occurrences). An empty list describes the trivial group.
    pub fn new(degree: usize, raw: Vec<Permutation>) -> Result<Self, GroupError> {
        if degree > MAX_DEGREE {
            return Err(PermError::DegreeTooLarge(degree).into());
        }
        let mut generators: Vec<Permutation> = Vec::with_capacity(raw.len());
        for g in raw {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                }
                .into());
            }
            if g.is_identity() || generators.contains(&g) {
                continue;
            }
            generators.push(g);
        }
        Ok(GeneratorSet { degree, generators })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Parses the generator file format: optional `#` comments and blank
    /// lines, a `degree N` header, then one permutation per line in cycle or
    /// image-list notation. Errors carry 1-based line numbers.
    pub fn parse_file(text: &str) -> Result<Self, GroupError> {
        let (degree, perms) = parse_permutation_file(text)?;
        GeneratorSet::new(degree, perms)
    }

    /// Renders the generator file format (header plus one line per element).
    pub fn to_file_text(&self) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for g in &self.generators {
            out.push_str(&g.format_cycles());
            out.push('\n');
        }
        out
    }
}

/// Parses the shared permutation-file layout used by generator files and
/// challenge-set files: `degree N` header, one permutation per line.
pub fn parse_permutation_file(text: &str) -> Result<(usize, Vec<Permutation>), GroupError> {
    let mut degree: Option<usize> = None;
    let mut perms = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        match degree {
            None => {
                let rest = line.strip_prefix("degree").ok_or_else(|| GroupError::File {
                    line: line_no,
                    message: format!("expected 'degree N' header, found {line:?}"),
                })?;
                let n: usize = rest.trim().parse().map_err(|_| GroupError::File {
                    line: line_no,
                    message: format!("invalid degree in {line:?}"),
                })?;
                if n == 0 || n > MAX_DEGREE {
                    return Err(GroupError::File {
                        line: line_no,
                        message: format!("degree {n} out of range 1..={MAX_DEGREE}"),
                    });
                }
                degree = Some(n);
            }
            Some(n) => {
                let p = Permutation::parse(line, n).map_err(|e: ParseError| GroupError::File {
                    line: line_no,
                    message: e.to_string(),
                })?;
                perms.push(p);
            }
        }
    }
    let degree = degree.ok_or(GroupError::File {
        line: text.lines().count() + 1,
        message: "missing 'degree N' header".into(),
    })?;
    Ok((degree, perms))
}

/// A generator set together with its built stabilizer chain and cached
/// orbit data. Immutable after construction and freely shareable.
#[derive(Clone, Debug)]
pub struct GroupHandle {
    gens: GeneratorSet,
    chain: StabilizerChain,
    /// Minimum point of each point's orbit under the whole group.
    orbit_reps: Vec<Point>,
}

impl GroupHandle {
    pub fn from_generators(gens: GeneratorSet) -> Self {
        Self::with_base_hint(gens, None)
    }

    pub fn with_base_hint(gens: GeneratorSet, base_hint: Option<&[Point]>) -> Self {
        let chain = StabilizerChain::build(&gens, base_hint);
        let orbit_reps = orbit_representatives(&gens);
        GroupHandle {
            gens,
            chain,
            orbit_reps,
        }
    }

    pub fn degree(&self) -> usize {
        self.gens.degree()
    }

    pub fn generators(&self) -> &[Permutation] {
        self.gens.generators()
    }

    pub fn generator_set(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    pub fn order(&self) -> &BigUint {
        self.chain.order()
    }

    /// Group order as a `u64`; errors only for astronomically large groups.
    pub fn order_u64(&self) -> Result<u64, GroupError> {
        self.chain.order_u64()
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, GroupError> {
        self.chain.contains(p)
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree())
    }

    /// Orbit-partition representative (minimum point) for each point.
    pub fn orbit_reps(&self) -> &[Point] {
        &self.orbit_reps
    }

    pub fn is_transitive(&self) -> bool {
        self.degree() > 0 && self.orbit_reps.iter().all(|&r| r == 0)
    }

    /// Stabilizer of a point, as a group handle of the same degree.
    ///
    /// The chain is rebuilt with the point as the leading base entry; the
    /// strong generators fixing it generate the stabilizer by construction.
    pub fn point_stabilizer(&self, point: Point) -> Result<GroupHandle, GroupError> {
        if point as usize >= self.degree() {
            return Err(GroupError::PointOutOfRange {
                point: point as usize,
                degree: self.degree(),
            });
        }
        let based = StabilizerChain::build(&self.gens, Some(&[point]));
        let stab_gens = based.strong_generators_fixing_prefix(1);
        let gens = GeneratorSet::new(self.degree(), stab_gens)?;
        Ok(GroupHandle::from_generators(gens))
    }
}

fn orbit_representatives(gens: &GeneratorSet) -> Vec<Point> {
    let n = gens.degree();
    let mut rep: Vec<Point> = (0..n as u8).collect();
    // union-find with path halving; union by smaller representative
    fn find(rep: &mut [Point], mut x: usize) -> u8 {
        while rep[x] as usize != x {
            let parent = rep[x] as usize;
            rep[x] = rep[parent];
            x = rep[x] as usize;
        }
        x as u8
    }
    for g in gens.generators() {
        for i in 0..n {
            let a = find(&mut rep, i);
            let b = find(&mut rep, g.image(i as u8) as usize);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                rep[hi as usize] = lo;
            }
        }
    }
    for i in 0..n {
        let r = find(&mut rep, i);
        rep[i] = r;
    }
    rep
}

/// Orbit partition of `{0, …, n-1}` under a list of permutations, as the
/// minimum point of each point's orbit. Used by the transitivity pre-filter.
pub fn orbit_partition(degree: usize, perms: &[&Permutation]) -> Vec<Point> {
    let mut rep: Vec<Point> = (0..degree as u8).collect();
    fn find(rep: &mut [Point], mut x: usize) -> u8 {
        while rep[x] as usize != x {
            let parent = rep[x] as usize;
            rep[x] = rep[parent];
            x = rep[x] as usize;
        }
        x as u8
    }
    for g in perms {
        for i in 0..degree {
            let a = find(&mut rep, i);
            let b = find(&mut rep, g.image(i as u8) as usize);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                rep[hi as usize] = lo;
            }
        }
    }
    for i in 0..degree {
        let r = find(&mut rep, i);
        rep[i] = r;
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    #[test]
    fn generator_set_strips_identity_and_duplicates() {
        let gens = GeneratorSet::new(
            4,
            vec![
                Permutation::identity(4),
                p("(1,2)", 4),
                p("(1,2)", 4),
                p("(1,2,3,4)", 4),
            ],
        )
        .unwrap();
        assert_eq!(gens.generators().len(), 2);
    }

    #[test]
    fn generator_set_rejects_mixed_degree() {
        let err = GeneratorSet::new(4, vec![p("(1,2)", 3)]).unwrap_err();
        assert!(matches!(
            err,
            GroupError::Perm(PermError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn file_roundtrip_and_errors() {
        let text = "# symmetric group on four points\ndegree 4\n(1,2)\n(1,2,3,4) # a 4-cycle\n";
        let gens = GeneratorSet::parse_file(text).unwrap();
        assert_eq!(gens.degree(), 4);
        assert_eq!(gens.generators().len(), 2);
        let reparsed = GeneratorSet::parse_file(&gens.to_file_text()).unwrap();
        assert_eq!(reparsed, gens);

        let err = GeneratorSet::parse_file("degree 4\n(1,2\n").unwrap_err();
        assert!(matches!(err, GroupError::File { line: 2, .. }));
        let err = GeneratorSet::parse_file("(1,2)\n").unwrap_err();
        assert!(matches!(err, GroupError::File { line: 1, .. }));
    }

    #[test]
    fn orbit_partition_reflects_orbits() {
        let gens = GeneratorSet::new(5, vec![p("(1,2)", 5), p("(4,5)", 5)]).unwrap();
        let h = GroupHandle::from_generators(gens);
        assert_eq!(h.orbit_reps(), &[0, 0, 2, 3, 3]);
        assert!(!h.is_transitive());
    }
}
