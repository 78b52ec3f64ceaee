use std::collections::HashMap;

use crate::group::{Elem, GroupSpec};

/// Position lookup for a sorted element list.
///
/// Small finite groups get a direct slot table indexed by the element
/// encoding; everything else falls back to a hash map.
#[derive(Debug, Clone)]
pub enum ElemIndex {
    Slots(Vec<u32>),
    Hashed(HashMap<Elem, u32>),
}

const ABSENT: u32 = u32::MAX;
const SLOT_LIMIT: u64 = 1 << 22;

impl ElemIndex {
    pub fn new(group: GroupSpec, elems: &[Elem]) -> Self {
        assert!(elems.len() < ABSENT as usize, "index capacity exceeded");
        match group.order() {
            Some(order) if order <= SLOT_LIMIT || order <= 16 * elems.len() as u64 => {
                let mut slots = vec![ABSENT; order as usize];
                for (i, e) in elems.iter().enumerate() {
                    slots[e.0 as usize] = i as u32;
                }
                ElemIndex::Slots(slots)
            }
            _ => ElemIndex::Hashed(elems.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect()),
        }
    }

    #[inline]
    pub fn get(&self, e: Elem) -> Option<u32> {
        match self {
            ElemIndex::Slots(slots) => match slots.get(e.0 as usize) {
                Some(&i) if i != ABSENT && e.0 >= 0 => Some(i),
                _ => None,
            },
            ElemIndex::Hashed(map) => map.get(&e).copied(),
        }
    }
}
