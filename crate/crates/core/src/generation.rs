//! Two-generation tests (`⟨x, y⟩ = G`?) and element-order spectra.
//!
//! Pre-filters may only produce *negative* answers; a positive verdict always
//! comes from a full chain build of the pair, so claimed generation is never
//! heuristic. Every filter decision is audited against a full build in the
//! test suite.

use crate::group::{orbit_partition, GroupError, GroupHandle, StabilizerChain};
use crate::group::GeneratorSet;
use crate::perm::Permutation;
use num_bigint::BigUint;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerationError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("element is not a member of the ambient group")]
    ElementNotInGroup,
    #[error("subgroup order {order} exceeds the enumeration budget {budget}")]
    BudgetExceeded { order: u64, budget: u64 },
}

/// Which pre-filter, if any, produced the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    /// The pair's orbit partition is strictly finer than the group's.
    Transitivity,
    /// One element is a power of the other, so the pair group is cyclic of
    /// known order. (Order-based filter; negative answers only.)
    OrderLcm,
    /// No filter fired; the answer comes from a chain build.
    None,
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterKind::Transitivity => f.write_str("transitivity"),
            FilterKind::OrderLcm => f.write_str("order-lcm"),
            FilterKind::None => f.write_str("none"),
        }
    }
}

/// Outcome of a two-generation test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairResult {
    pub generates: bool,
    /// Exact order of `⟨x, y⟩` when it was computed (always on the chain
    /// path; also on the cyclic filter path). `None` only when the
    /// transitivity filter answered.
    pub subgroup_order: Option<BigUint>,
    pub filter_used: FilterKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationConfig {
    /// Cheap union-find orbit comparison before any chain build. Sound for
    /// negatives: a proper orbit partition refinement rules out generation.
    pub transitivity_filter: bool,
    /// Power-containment check (`y ∈ ⟨x⟩` or `x ∈ ⟨y⟩`). Off by default: at
    /// degree 23 the chain build is already cheap.
    pub order_lcm_filter: bool,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            transitivity_filter: true,
            order_lcm_filter: false,
        }
    }
}

impl GenerationConfig {
    /// No filters: every answer carries the exact subgroup order.
    pub fn exact() -> Self {
        GenerationConfig {
            transitivity_filter: false,
            order_lcm_filter: false,
        }
    }
}

/// Decides whether `⟨x, y⟩ = G`. Both elements must belong to `G`.
pub fn generates_pair(
    x: &Permutation,
    y: &Permutation,
    group: &GroupHandle,
    cfg: &GenerationConfig,
) -> Result<PairResult, GenerationError> {
    if !group.contains(x)? {
        return Err(GenerationError::ElementNotInGroup);
    }
    if !group.contains(y)? {
        return Err(GenerationError::ElementNotInGroup);
    }

    if cfg.transitivity_filter {
        let sub_partition = orbit_partition(group.degree(), &[x, y]);
        if sub_partition != group.orbit_reps() {
            return Ok(PairResult {
                generates: false,
                subgroup_order: None,
                filter_used: FilterKind::Transitivity,
            });
        }
    }

    if cfg.order_lcm_filter {
        if let Some(order) = cyclic_pair_order(x, y) {
            // ⟨x, y⟩ is cyclic of this exact order; only a negative verdict
            // may be emitted without a chain build.
            if &BigUint::from(order) != group.order() {
                return Ok(PairResult {
                    generates: false,
                    subgroup_order: Some(BigUint::from(order)),
                    filter_used: FilterKind::OrderLcm,
                });
            }
        }
    }

    let pair_order = pair_subgroup_order(x, y, group.degree());
    Ok(PairResult {
        generates: &pair_order == group.order(),
        subgroup_order: Some(pair_order),
        filter_used: FilterKind::None,
    })
}

/// Exact order of `⟨x, y⟩` by a chain build, with no ambient-group checks.
pub fn pair_subgroup_order(x: &Permutation, y: &Permutation, degree: usize) -> BigUint {
    let gens = GeneratorSet::new(degree, vec![x.clone(), y.clone()])
        .expect("pair elements share the ambient degree");
    StabilizerChain::build(&gens, None).order().clone()
}

/// When one element is a power of the other, the order of the (cyclic) pair
/// group. Capped so the power scan stays cheap.
fn cyclic_pair_order(x: &Permutation, y: &Permutation) -> Option<u64> {
    const MAX_SCAN: u64 = 1 << 14;
    let (ox, oy) = (x.order(), y.order());
    let (big, small, obig) = if ox >= oy { (x, y, ox) } else { (y, x, oy) };
    if obig > MAX_SCAN {
        return None;
    }
    let mut power = Permutation::identity(big.degree());
    for _ in 0..obig {
        if &power == small {
            return Some(obig);
        }
        power = power.mul(big);
    }
    None
}

/// Set of element orders present in a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    orders: BTreeSet<u64>,
}

impl Spectrum {
    pub fn orders(&self) -> &BTreeSet<u64> {
        &self.orders
    }

    pub fn contains(&self, order: u64) -> bool {
        self.orders.contains(&order)
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        write!(f, "{{{}}}", body.join(", "))
    }
}

/// Exact spectrum by full enumeration; refuses groups above the budget.
pub fn spectrum(group: &GroupHandle, budget: u64) -> Result<Spectrum, GenerationError> {
    let order = group.order_u64()?;
    if order > budget {
        return Err(GenerationError::BudgetExceeded { order, budget });
    }
    let orders = group.chain().elements().map(|g| g.order()).collect();
    Ok(Spectrum { orders })
}

/// Streamed membership query `target ∈ spectrum(group)` with early exit on
/// hits; absence still requires the full scan, bounded by `budget`.
pub fn spectrum_contains(
    group: &GroupHandle,
    target: u64,
    budget: u64,
) -> Result<bool, GenerationError> {
    let order = group.order_u64()?;
    if order > budget {
        return Err(GenerationError::BudgetExceeded { order, budget });
    }
    for g in group.chain().elements() {
        if g.order() == target {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn p(text: &str, degree: usize) -> Permutation {
        Permutation::parse(text, degree).unwrap()
    }

    #[test]
    fn s4_generating_pair() {
        let g = catalog::s4();
        let r = generates_pair(
            &p("(1,2)", 4),
            &p("(1,2,3,4)", 4),
            &g,
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(r.generates);
        assert_eq!(r.subgroup_order, Some(BigUint::from(24u32)));
    }

    #[test]
    fn equal_elements_never_generate_noncyclic_groups() {
        let g = catalog::s4();
        let x = p("(1,2,3,4)", 4);
        let r = generates_pair(&x, &x, &g, &GenerationConfig::default()).unwrap();
        assert!(!r.generates);
    }

    #[test]
    fn klein_pair_inside_s4() {
        let g = catalog::s4();
        let r = generates_pair(
            &p("(1,2)(3,4)", 4),
            &p("(1,3)(2,4)", 4),
            &g,
            &GenerationConfig::exact(),
        )
        .unwrap();
        assert!(!r.generates);
        assert_eq!(r.subgroup_order, Some(BigUint::from(4u32)));
    }

    #[test]
    fn membership_is_checked() {
        let g = catalog::a5();
        let err = generates_pair(
            &p("(1,2)", 5),
            &p("(1,2,3)", 5),
            &g,
            &GenerationConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err, GenerationError::ElementNotInGroup);
    }

    #[test]
    fn transitivity_filter_agrees_with_chain_build() {
        // exhaustive audit on S4: whenever the filter answers, the chain
        // build must agree
        let g = catalog::s4();
        let elements: Vec<_> = g.chain().elements().collect();
        for x in &elements {
            for y in &elements {
                let filtered =
                    generates_pair(x, y, &g, &GenerationConfig::default()).unwrap();
                let exact = generates_pair(x, y, &g, &GenerationConfig::exact()).unwrap();
                assert_eq!(filtered.generates, exact.generates);
                if filtered.filter_used == FilterKind::Transitivity {
                    assert!(!exact.generates);
                }
            }
        }
    }

    #[test]
    fn order_lcm_filter_agrees_with_chain_build() {
        let g = catalog::s4();
        let cfg = GenerationConfig {
            transitivity_filter: false,
            order_lcm_filter: true,
        };
        let elements: Vec<_> = g.chain().elements().collect();
        for x in &elements {
            for y in &elements {
                let filtered = generates_pair(x, y, &g, &cfg).unwrap();
                let exact = generates_pair(x, y, &g, &GenerationConfig::exact()).unwrap();
                assert_eq!(filtered.generates, exact.generates);
                if filtered.filter_used == FilterKind::OrderLcm {
                    assert_eq!(filtered.subgroup_order, exact.subgroup_order);
                }
            }
        }
        // the filter must not claim generation of a cyclic group on its own
        let c5 = catalog::c5();
        let x = p("(1,2,3,4,5)", 5);
        let r = generates_pair(&x, &x, &c5, &cfg).unwrap();
        assert!(r.generates);
        assert_eq!(r.filter_used, FilterKind::None);
    }

    #[test]
    fn identity_pairs() {
        let g = catalog::s3();
        let id = Permutation::identity(3);
        let r = generates_pair(&id, &id, &g, &GenerationConfig::default()).unwrap();
        assert!(!r.generates);
        // in a cyclic group a lone generator does generate with the identity
        let c5 = catalog::c5();
        let x = p("(1,2,3,4,5)", 5);
        let r = generates_pair(&x, &Permutation::identity(5), &c5, &GenerationConfig::default())
            .unwrap();
        assert!(r.generates);
    }

    #[test]
    fn spectra_of_small_groups() {
        let s = spectrum(&catalog::s3(), 1000).unwrap();
        assert_eq!(
            s.orders().iter().copied().collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        // Lagrange: every order divides the group order
        for (_, h) in catalog::spread_catalog() {
            let order = h.order_u64().unwrap();
            let spec = spectrum(&h, 10_000).unwrap();
            assert!(spec.contains(1));
            for o in spec.orders() {
                assert_eq!(order % o, 0);
            }
        }
    }

    #[test]
    fn spectrum_budget() {
        let err = spectrum(&catalog::s5(), 100).unwrap_err();
        assert!(matches!(
            err,
            GenerationError::BudgetExceeded {
                order: 120,
                budget: 100
            }
        ));
        assert!(spectrum_contains(&catalog::s5(), 6, 1000).unwrap());
        assert!(!spectrum_contains(&catalog::s5(), 7, 1000).unwrap());
    }
}
