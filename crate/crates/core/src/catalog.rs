//! Named small permutation groups used by tests, demos, and the spread
//! verification suites.

use crate::group::{GeneratorSet, GroupHandle};
use crate::perm::Permutation;

fn build(degree: usize, gens: &[&str]) -> GroupHandle {
    let gens = GeneratorSet::new(
        degree,
        gens.iter()
            .map(|t| Permutation::parse(t, degree).expect("catalog permutation parses"))
            .collect(),
    )
    .expect("catalog generator set is valid");
    GroupHandle::from_generators(gens)
}

/// Symmetric group on 3 points, order 6.
pub fn s3() -> GroupHandle {
    build(3, &["(1,2,3)", "(1,2)"])
}

/// Symmetric group on 4 points, order 24.
pub fn s4() -> GroupHandle {
    build(4, &["(1,2,3,4)", "(1,2)"])
}

/// Symmetric group on 5 points, order 120.
pub fn s5() -> GroupHandle {
    build(5, &["(1,2,3,4,5)", "(1,2)"])
}

/// Alternating group on 4 points, order 12.
pub fn a4() -> GroupHandle {
    build(4, &["(1,2,3)", "(2,3,4)"])
}

/// Alternating group on 5 points, order 60.
pub fn a5() -> GroupHandle {
    build(5, &["(1,2,3,4,5)", "(1,2,3)"])
}

/// Dihedral group of order 10 acting on 5 points.
pub fn d10() -> GroupHandle {
    build(5, &["(1,2,3,4,5)", "(2,5)(3,4)"])
}

/// Cyclic group of order 5.
pub fn c5() -> GroupHandle {
    build(5, &["(1,2,3,4,5)"])
}

/// Cyclic group of order 6, acting on 5 points as a 2-cycle times a 3-cycle.
pub fn c6() -> GroupHandle {
    build(5, &["(1,2)(3,4,5)"])
}

/// Cyclic group of order 7.
pub fn c7() -> GroupHandle {
    build(7, &["(1,2,3,4,5,6,7)"])
}

/// Klein four-group C2×C2 on 4 points.
pub fn c2_c2() -> GroupHandle {
    build(4, &["(1,2)", "(3,4)"])
}

/// Elementary abelian C2×C2×C2 on 6 points; rank 3, so not 2-generated.
pub fn c2_c2_c2() -> GroupHandle {
    build(6, &["(1,2)", "(3,4)", "(5,6)"])
}

/// The catalog used by the spread acceptance suite, with display names.
pub fn spread_catalog() -> Vec<(&'static str, GroupHandle)> {
    vec![
        ("S3", s3()),
        ("S4", s4()),
        ("A4", a4()),
        ("D10", d10()),
        ("A5", a5()),
        ("C6", c6()),
        ("C7", c7()),
        ("C2xC2", c2_c2()),
        ("C2xC2xC2", c2_c2_c2()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_orders() {
        for (name, h, want) in [
            ("S3", s3(), 6u64),
            ("S4", s4(), 24),
            ("S5", s5(), 120),
            ("A4", a4(), 12),
            ("A5", a5(), 60),
            ("D10", d10(), 10),
            ("C5", c5(), 5),
            ("C6", c6(), 6),
            ("C7", c7(), 7),
            ("C2xC2", c2_c2(), 4),
            ("C2xC2xC2", c2_c2_c2(), 8),
        ] {
            assert_eq!(h.order_u64().unwrap(), want, "order of {name}");
        }
    }
}
