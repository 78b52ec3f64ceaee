//! `U = A - A` with `r_A` aligned to it, plus the stabilizer
//! `P = {h : A + h = A}` and the partition of `U` into `P`-cosets.
//!
//! Every slice `A[t]`, every `A[t] - A` and every level set the pipeline
//! builds is a union of `P`-cosets, so the per-slice loops run over one
//! representative per coset and scale counts by `|P|`.

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::set::{DiffTable, ElemIndex, FiniteSet};

/// Largest `|A - A|` the pipeline will index.
pub const MAX_UNIVERSE: usize = 1 << 26;

pub(crate) struct Universe<'a> {
    pub set: &'a FiniteSet,
    pub group: GroupSpec,
    pub table: DiffTable,
    index: ElemIndex,
    set_index: ElemIndex,
    pub period: Vec<Elem>,
    /// Coset id of each element of `U`; ids follow the order of each coset's minimum.
    pub coset: Vec<u32>,
    pub coset_count: usize,
    /// Minimum of each `P`-coset contained in `A`, ascending.
    pub reps: Vec<Elem>,
}

impl<'a> Universe<'a> {
    pub fn new(set: &'a FiniteSet, table: DiffTable) -> Result<Self> {
        let group = set.group();
        let diff = table.support();
        if diff.len() > MAX_UNIVERSE {
            return Err(Error::Resource(format!("|A - A| = {} exceeds the supported {MAX_UNIVERSE}", diff.len())));
        }
        let n = set.len() as u64;
        let index = ElemIndex::new(group, diff);
        let set_index = ElemIndex::new(group, set.elems());
        let period: Vec<Elem> = table.iter().filter(|&(_, c)| c == n).map(|(t, _)| t).collect();

        let mut coset = vec![u32::MAX; diff.len()];
        let mut coset_count = 0usize;
        for i in 0..diff.len() {
            if coset[i] != u32::MAX {
                continue;
            }
            for &p in &period {
                let j = lookup(&index, group.add_valid(diff[i], p)?)?;
                coset[j] = coset_count as u32;
            }
            coset_count += 1;
        }

        let mut seen = vec![false; set.len()];
        let mut reps = Vec::with_capacity(set.len() / period.len());
        for (i, &a) in set.elems().iter().enumerate() {
            if seen[i] {
                continue;
            }
            reps.push(a);
            for &p in &period {
                seen[lookup(&set_index, group.add_valid(a, p)?)?] = true;
            }
        }

        Ok(Universe { set, group, table, index, set_index, period, coset, coset_count, reps })
    }

    pub fn n(&self) -> u64 {
        self.set.len() as u64
    }

    pub fn d(&self) -> u64 {
        self.table.support().len() as u64
    }

    pub fn period_len(&self) -> u64 {
        self.period.len() as u64
    }

    pub fn elems(&self) -> &[Elem] {
        self.table.support()
    }

    /// `r_A` at position `i` of `U`.
    pub fn r_at(&self, i: usize) -> u64 {
        self.table.counts()[i]
    }

    pub fn position(&self, x: Elem) -> Option<usize> {
        self.index.get(x).map(|i| i as usize)
    }

    pub fn in_set(&self, x: Elem) -> bool {
        self.set_index.get(x).is_some()
    }

    /// Position in `U` of `a - b` for `a, b ∈ A`.
    #[inline]
    pub fn diff_position(&self, a: Elem, b: Elem) -> Result<usize> {
        lookup(&self.index, self.group.sub_valid(a, b)?)
    }

    /// Representatives of the cosets making up `A[t] = (A + t) ∩ A`.
    pub fn slice_reps(&self, t: Elem) -> Result<Vec<Elem>> {
        let mut out = Vec::new();
        for &a in &self.reps {
            match self.group.sub_valid(a, t) {
                Ok(y) if self.in_set(y) => out.push(a),
                Ok(_) | Err(Error::Overflow) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// The full slice spanned by `reps`, ascending.
    pub fn expand(&self, reps: &[Elem]) -> Result<Vec<Elem>> {
        let mut out = Vec::with_capacity(reps.len() * self.period.len());
        for &a in reps {
            for &p in &self.period {
                out.push(self.group.add_valid(a, p)?);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Distinct coset ids of `{a - b : a ∈ left, b ∈ right}`; `left`, `right` ⊆ `A`.
    pub fn difference_cosets(&self, left: &[Elem], right: &[Elem], stamp: &mut Stamp) -> Result<Vec<u32>> {
        stamp.advance();
        let mut out = Vec::new();
        for &a in left {
            for &b in right {
                let c = self.coset[self.diff_position(a, b)?];
                if stamp.mark(c) {
                    out.push(c);
                }
            }
        }
        Ok(out)
    }

    /// Elements of `U` whose coset is flagged in `keep`.
    pub fn collect_cosets(&self, keep: &[bool]) -> FiniteSet {
        let elems = self.elems().iter().zip(&self.coset).filter(|&(_, &c)| keep[c as usize]).map(|(&x, _)| x).collect();
        FiniteSet::from_sorted(self.group, elems)
    }
}

fn lookup(index: &ElemIndex, x: Elem) -> Result<usize> {
    index
        .get(x)
        .map(|i| i as usize)
        .ok_or_else(|| Error::Internal(format!("element {} missing from an index that must contain it", x.0)))
}

/// Reusable "seen" marks over coset ids.
pub(crate) struct Stamp {
    marks: Vec<u32>,
    generation: u32,
}

impl Stamp {
    pub fn new(len: usize) -> Self {
        Stamp { marks: vec![0; len], generation: 0 }
    }

    pub fn advance(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.marks.fill(0);
            self.generation = 1;
        }
    }

    /// Marks `c`; true if it was unmarked in this generation.
    #[inline]
    pub fn mark(&mut self, c: u32) -> bool {
        let slot = &mut self.marks[c as usize];
        if *slot == self.generation {
            false
        } else {
            *slot = self.generation;
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_r_plus_h, RPlusHSpec};
    use crate::set::{diff_set, translate_intersect};

    #[test]
    fn stabilizer_of_r_plus_h_is_h() {
        let a = gen_r_plus_h(&RPlusHSpec { n: 10, dh: 3, r: 6, seed: 2 }).unwrap();
        let u = Universe::new(&a, DiffTable::build(&a).unwrap()).unwrap();
        assert_eq!(u.period, (0..8).map(Elem).collect::<Vec<_>>());
        assert_eq!(u.reps.len(), 6);
        assert_eq!(u.coset_count * 8, u.elems().len());
        for (i, &x) in u.elems().iter().enumerate() {
            assert_eq!(u.coset[i], u.coset[u.position(Elem(x.0 & !7)).unwrap()]);
        }
    }

    #[test]
    fn slices_and_spreads_match_direct_computation() {
        let a = gen_r_plus_h(&RPlusHSpec { n: 9, dh: 2, r: 7, seed: 5 }).unwrap();
        let u = Universe::new(&a, DiffTable::build(&a).unwrap()).unwrap();
        let mut stamp = Stamp::new(u.coset_count);
        for &t in u.elems().iter().step_by(7) {
            let reps = u.slice_reps(t).unwrap();
            let slice = translate_intersect(&a, t).unwrap();
            assert_eq!(u.expand(&reps).unwrap(), slice.elems());
            let spread = u.difference_cosets(&reps, &u.reps, &mut stamp).unwrap().len() as u64 * u.period_len();
            assert_eq!(spread, diff_set(&slice, &a).unwrap().len() as u64);
        }
    }

    #[test]
    fn integer_sets_have_trivial_stabilizer() {
        let a = FiniteSet::new(GroupSpec::Zint, [0, 1, 3].map(Elem)).unwrap();
        let u = Universe::new(&a, DiffTable::build(&a).unwrap()).unwrap();
        assert_eq!(u.period, vec![Elem(0)]);
        assert_eq!(u.coset, (0..7).collect::<Vec<u32>>());
        assert_eq!(u.reps, a.elems());
    }
}
