use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use serde::Serialize;

use super::{autocorrelation, dense_window, FiniteSet};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::par;

/// Default cap on `|A|` for [`energy_oracle`].
pub const ORACLE_CAP: usize = 64;

/// Which route computes the representation counts `r(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyPath {
    /// Dense transform when it applies and is cheaper than pair counting.
    Auto,
    /// Enumerate all ordered pairs.
    Counting,
    /// Fast transform over the group (or an integer window); errors if unavailable.
    Dense,
}

/// `t ↦ r(t) = |A[t]| = #{(a, b) ∈ A² : a - b = t}`, stored over its support `A - A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffTable {
    group: GroupSpec,
    set_len: usize,
    support: Vec<Elem>,
    counts: Vec<u64>,
}

impl DiffTable {
    pub fn build(a: &FiniteSet) -> Result<Self> {
        Self::build_with(a, EnergyPath::Auto)
    }

    pub fn build_with(a: &FiniteSet, path: EnergyPath) -> Result<Self> {
        a.require_nonempty()?;
        let use_dense = match path {
            EnergyPath::Counting => false,
            EnergyPath::Dense => {
                if dense_window(a).is_none() {
                    return Err(Error::Resource(format!(
                        "dense path unavailable for group `{}` at this size",
                        a.group()
                    )));
                }
                true
            }
            EnergyPath::Auto => match dense_window(a) {
                Some(window) => {
                    let pairs = (a.len() as u128).pow(2);
                    pairs >= window as u128 / 4
                }
                None => false,
            },
        };
        if use_dense {
            Self::dense(a)
        } else {
            Self::counting(a)
        }
    }

    fn counting(a: &FiniteSet) -> Result<Self> {
        let g = a.group();
        let elems = a.elems();
        let rows = par::chunk_ranges(elems.len(), 128);
        let parts: Vec<Result<HashMap<Elem, u64>>> = par::map(&rows, |range| {
            let mut local = HashMap::new();
            for &x in &elems[range.clone()] {
                for &y in elems {
                    *local.entry(g.sub_valid(x, y)?).or_insert(0) += 1;
                }
            }
            Ok(local)
        });
        let mut merged: HashMap<Elem, u64> = HashMap::new();
        for part in parts {
            for (t, c) in part? {
                *merged.entry(t).or_insert(0) += c;
            }
        }
        let mut entries: Vec<(Elem, u64)> = merged.into_iter().collect();
        entries.sort_unstable();
        let (support, counts) = entries.into_iter().unzip();
        Ok(DiffTable { group: g, set_len: a.len(), support, counts })
    }

    fn dense(a: &FiniteSet) -> Result<Self> {
        let dense = autocorrelation(a)?.ok_or_else(|| Error::Internal("dense window vanished".into()))?;
        let mut support = Vec::new();
        let mut counts = Vec::new();
        for (i, &c) in dense.counts.iter().enumerate() {
            if c > 0 {
                support.push(Elem(i as i64 + dense.offset));
                counts.push(c);
            }
        }
        Ok(DiffTable { group: a.group(), set_len: a.len(), support, counts })
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    /// `|A|` of the source set.
    pub fn set_len(&self) -> usize {
        self.set_len
    }

    /// `A - A` in ascending order.
    pub fn support(&self) -> &[Elem] {
        &self.support
    }

    /// Counts aligned with [`DiffTable::support`].
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `r(t)`; zero off the support.
    pub fn count(&self, t: Elem) -> u64 {
        self.support.binary_search(&t).map_or(0, |i| self.counts[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Elem, u64)> + '_ {
        self.support.iter().copied().zip(self.counts.iter().copied())
    }

    pub fn support_set(&self) -> FiniteSet {
        FiniteSet::from_sorted(self.group, self.support.clone())
    }

    /// `Σ_t r(t)²`, the number of quadruples with `a1 - a2 = a3 - a4`.
    pub fn quadruples(&self) -> u128 {
        self.counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
    }
}

/// Exact additive energy: `Q = Σ_t r(t)²` over `|A|³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyReport {
    pub quadruples: u128,
    pub cube: u128,
}

impl Serialize for EnergyReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EnergyReport", 3)?;
        st.serialize_field("quadruples", &self.quadruples)?;
        st.serialize_field("cube", &self.cube)?;
        st.serialize_field("value", &self.value())?;
        st.end()
    }
}

impl EnergyReport {
    pub fn new(quadruples: u128, set_len: usize) -> Self {
        EnergyReport { quadruples, cube: (set_len as u128).pow(3) }
    }

    /// `E` in lowest terms.
    pub fn ratio(&self) -> Ratio<u128> {
        Ratio::new(self.quadruples, self.cube)
    }

    pub fn value(&self) -> f64 {
        self.quadruples as f64 / self.cube as f64
    }

    pub fn is_one(&self) -> bool {
        self.quadruples == self.cube
    }
}

pub fn energy_from_table(table: &DiffTable) -> EnergyReport {
    EnergyReport::new(table.quadruples(), table.set_len())
}

/// Energy through the count table (dense transform when profitable).
pub fn energy_exact(a: &FiniteSet) -> Result<EnergyReport> {
    energy_with(a, EnergyPath::Auto)
}

pub fn energy_with(a: &FiniteSet, path: EnergyPath) -> Result<EnergyReport> {
    Ok(energy_from_table(&DiffTable::build_with(a, path)?))
}

/// Independent energy route: for every triple `(a1, a2, a3)` test whether
/// `a4 = a3 - a1 + a2` lies in `A`.
pub fn energy_oracle(a: &FiniteSet, cap: usize) -> Result<EnergyReport> {
    a.require_nonempty()?;
    if a.len() > cap {
        return Err(Error::OracleCap { size: a.len(), cap });
    }
    let g = a.group();
    let members: HashSet<Elem> = a.elems().iter().copied().collect();
    let mut q = 0u128;
    for &a1 in a.elems() {
        for &a2 in a.elems() {
            for &a3 in a.elems() {
                let a4 = match g.sub_valid(a3, a1).and_then(|d| g.add_valid(d, a2)) {
                    Ok(x) => x,
                    Err(Error::Overflow) => continue,
                    Err(e) => return Err(e),
                };
                if members.contains(&a4) {
                    q += 1;
                }
            }
        }
    }
    Ok(EnergyReport::new(q, a.len()))
}

fn check_rho(rho: Ratio<u64>) -> Result<()> {
    if *rho.numer() == 0 || rho > Ratio::from_integer(1) {
        return Err(Error::OutOfRange(format!("rho = {rho} must lie in (0, 1]")));
    }
    Ok(())
}

/// `{z : |(z + B) ∩ B| ≥ ρ|B|}`; always contains the identity.
pub fn translate_heavy_set(b: &FiniteSet, rho: Ratio<u64>) -> Result<FiniteSet> {
    check_rho(rho)?;
    let table = DiffTable::build(b)?;
    Ok(heavy_from_table(&table, rho))
}

pub(crate) fn heavy_from_table(table: &DiffTable, rho: Ratio<u64>) -> FiniteSet {
    let need = *rho.numer() as u128 * table.set_len() as u128;
    let elems = table.iter().filter(|&(_, c)| c as u128 * *rho.denom() as u128 >= need).map(|(t, _)| t).collect();
    FiniteSet::from_sorted(table.group(), elems)
}

pub(crate) fn is_heavy(table: &DiffTable, t: Elem, rho: Ratio<u64>) -> bool {
    table.count(t) as u128 * *rho.denom() as u128 >= *rho.numer() as u128 * table.set_len() as u128
}
