//! Finite subsets of an ambient group and their additive statistics.

mod dense;
mod index;
mod table;

use std::collections::HashSet;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::par;

pub(crate) use dense::{autocorrelation, dense_window};
pub use index::ElemIndex;
pub(crate) use table::is_heavy;
pub use table::{
    energy_exact, energy_from_table, energy_oracle, energy_with, translate_heavy_set, DiffTable, EnergyPath,
    EnergyReport, ORACLE_CAP,
};

/// Largest table (group order, or integer window) the dense paths will allocate.
pub const DENSE_LIMIT: u64 = 1 << 24;

/// A deduplicated, sorted set of elements of one group.
///
/// Sets produced by [`FiniteSet::new`] are never empty; intermediate results
/// such as an empty slice `A[t]` may be.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    group: GroupSpec,
    elems: Vec<Elem>,
}

impl FiniteSet {
    /// Builds a set, validating and deduplicating the input. Empty input is rejected.
    pub fn new(group: GroupSpec, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let mut elems = elems.into_iter().map(|e| group.check(e)).collect::<Result<Vec<_>>>()?;
        if elems.is_empty() {
            return Err(Error::EmptySet);
        }
        elems.sort_unstable();
        elems.dedup();
        Ok(FiniteSet { group, elems })
    }

    /// `elems` must be sorted, deduplicated and valid in `group`.
    pub(crate) fn from_sorted(group: GroupSpec, elems: Vec<Elem>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        FiniteSet { group, elems }
    }

    pub(crate) fn from_unsorted(group: GroupSpec, mut elems: Vec<Elem>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        FiniteSet { group, elems }
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Elements in ascending encoding order.
    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.elems.binary_search(&e).is_ok()
    }

    pub fn min(&self) -> Option<Elem> {
        self.elems.first().copied()
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.group == other.group && self.elems.iter().all(|&e| other.contains(e))
    }

    /// `A + c`.
    pub fn translate(&self, c: Elem) -> Result<FiniteSet> {
        self.group.check(c)?;
        let elems = self.elems.iter().map(|&a| self.group.add_valid(a, c)).collect::<Result<Vec<_>>>()?;
        Ok(FiniteSet::from_unsorted(self.group, elems))
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }

    fn same_group(&self, other: &FiniteSet) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch(self.group, other.group))
        }
    }
}

/// `build_set`: validates, deduplicates and rejects empty input.
pub fn build_set(group: GroupSpec, elems: &[Elem]) -> Result<FiniteSet> {
    FiniteSet::new(group, elems.iter().copied())
}

/// Applies `op` to every pair and collects the distinct results.
fn pairwise_set(
    a: &FiniteSet,
    b: &FiniteSet,
    op: impl Fn(Elem, Elem) -> Result<Elem> + Sync + Send,
) -> Result<FiniteSet> {
    a.same_group(b)?;
    let group = a.group;
    let rows = par::chunk_ranges(a.len(), 256);
    let parts: Vec<Result<Vec<Elem>>> = par::map(&rows, |range| {
        let mut out = Vec::with_capacity(range.len() * b.len());
        for &x in &a.elems[range.clone()] {
            for &y in &b.elems {
                out.push(op(x, y)?);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    });
    let mut merged = Vec::new();
    for part in parts {
        merged.extend(part?);
    }
    Ok(FiniteSet::from_unsorted(group, merged))
}

/// `{a + b : a ∈ A, b ∈ B}`.
pub fn sum_set(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
    let g = a.group;
    pairwise_set(a, b, move |x, y| g.add_valid(x, y))
}

/// `{a - b : a ∈ A, b ∈ B}`.
pub fn diff_set(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
    let g = a.group;
    pairwise_set(a, b, move |x, y| g.sub_valid(x, y))
}

/// The slice `A[t] = (A + t) ∩ A`; its size is the number of pairs with `a - b = t`.
pub fn translate_intersect(a: &FiniteSet, t: Elem) -> Result<FiniteSet> {
    a.group.check(t)?;
    let mut out = Vec::new();
    for &x in &a.elems {
        // x ∈ A + t  ⟺  x - t ∈ A; an overflowing x - t cannot lie in A.
        match a.group.sub_valid(x, t) {
            Ok(y) if a.contains(y) => out.push(x),
            Ok(_) | Err(Error::Overflow) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(FiniteSet::from_sorted(a.group, out))
}

/// Sumset/difference-set sizes and the two doubling constants, all exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoublingStats {
    pub set_size: u64,
    pub sum_size: u64,
    pub diff_size: u64,
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub k_sum: Ratio<u64>,
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub k_diff: Ratio<u64>,
}

pub fn doubling_stats(a: &FiniteSet) -> Result<DoublingStats> {
    a.require_nonempty()?;
    let n = a.len() as u64;
    let sum_size = sum_set(a, a)?.len() as u64;
    let diff_size = diff_set(a, a)?.len() as u64;
    Ok(DoublingStats {
        set_size: n,
        sum_size,
        diff_size,
        k_sum: Ratio::new(sum_size, n),
        k_diff: Ratio::new(diff_size, n),
    })
}

/// Translate test: `A - min(A)` is closed under subtraction.
///
/// Holds exactly when `A` is a coset of a finite subgroup.
pub fn is_coset(a: &FiniteSet) -> Result<bool> {
    let base = a.min().ok_or(Error::EmptySet)?;
    let shifted: HashSet<Elem> = a.elems.iter().map(|&x| a.group.sub_valid(x, base)).collect::<Result<_>>()?;
    for &x in &shifted {
        for &y in &shifted {
            if !shifted.contains(&a.group.sub_valid(x, y)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
