use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::pcgroup::{GroupError, PcGroup, Subgroup};

use super::{Entry, Filter, FilterError, MonoidIndex, Origin, Sign};

/// A prefilter stored by maximal indices: `pi_s` is the first stored
/// subgroup whose index is at least `s`, and trivial past the last entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prefilter {
    group: Arc<PcGroup>,
    d: usize,
    entries: Vec<Entry>,
}

impl Prefilter {
    /// Validates ascending indices, strictly descending nontrivial normal
    /// subgroups. No commutator condition is required.
    pub fn new(group: &Arc<PcGroup>, d: usize, entries: Vec<Entry>) -> Result<Self, FilterError> {
        let f = Filter::new(group, d, Sign::Max, entries)?;
        for (i, e) in f.entries.iter().enumerate() {
            if !e.subgroup.is_normal() {
                return Err(FilterError::NotNormal(e.subgroup.describe()));
            }
            if let Some(n) = f.entries.get(i + 1) {
                if !e.subgroup.contains_subgroup(&n.subgroup) || e.subgroup == n.subgroup {
                    return Err(FilterError::Malformed(format!("subgroups not strictly descending at {}", n.index)));
                }
            }
        }
        Ok(Self { group: group.clone(), d, entries: f.entries })
    }

    /// View a full filter as a prefilter.
    pub fn from_filter(f: &Filter) -> Result<Self, FilterError> {
        if f.sign != Sign::Max {
            return Err(FilterError::NotFull);
        }
        Ok(Self { group: f.group.clone(), d: f.d, entries: f.entries.clone() })
    }

    pub fn group(&self) -> &Arc<PcGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn evaluate(&self, s: &MonoidIndex) -> Result<Subgroup, FilterError> {
        self.as_filter().evaluate(s)
    }

    pub(crate) fn as_filter(&self) -> Filter {
        Filter { group: self.group.clone(), d: self.d, sign: Sign::Max, entries: self.entries.clone() }
    }
}

/// Refine a full filter by a single new subgroup strictly between the
/// boundary and the term at stored index `s`.
pub fn insert_subgroup(f: &Filter, h: &Subgroup, s: &MonoidIndex) -> Result<Prefilter, FilterError> {
    insert_subgroups(f, &[(h.clone(), Origin::Inserted)], s)
}

/// Re-index every stored `(m, K)` to `(m, 0)` and place the nested new
/// subgroups `h_1 > h_2 > ...` at `(s, 1), (s, 2), ...`.
pub fn insert_subgroups(f: &Filter, news: &[(Subgroup, Origin)], s: &MonoidIndex) -> Result<Prefilter, FilterError> {
    if f.sign != Sign::Max {
        return Err(FilterError::NotFull);
    }
    f.check_rank(s)?;
    let k = f
        .entries
        .iter()
        .position(|e| e.index == *s)
        .ok_or_else(|| FilterError::NotStoredIndex(s.clone()))?;
    let top = &f.entries[k].subgroup;
    let bottom = f.entries.get(k + 1).map_or_else(|| Subgroup::trivial(&f.group), |e| e.subgroup.clone());
    for (i, (h, _)) in news.iter().enumerate() {
        if !Arc::ptr_eq(h.group(), &f.group) {
            return Err(GroupError::MixedGroups.into());
        }
        if !h.is_normal() {
            return Err(FilterError::NotNormal(h.describe()));
        }
        let strict = top.contains_subgroup(h) && h != top && h.contains_subgroup(&bottom) && *h != bottom;
        if !strict {
            return Err(FilterError::NotBetween(h.describe(), s.clone()));
        }
        if i > 0 {
            let prev = &news[i - 1].0;
            if !prev.contains_subgroup(h) || prev == h {
                return Err(FilterError::Malformed(format!(
                    "inserted subgroups {} and {} are not strictly nested",
                    prev.describe(),
                    h.describe()
                )));
            }
        }
    }
    let mut entries = Vec::with_capacity(f.entries.len() + news.len());
    for (i, e) in f.entries.iter().enumerate() {
        entries.push(Entry::new(e.index.extend(0), e.subgroup.clone(), e.origin));
        if i == k {
            for (j, (h, origin)) in news.iter().enumerate() {
                entries.push(Entry::new(s.extend(j as u32 + 1), h.clone(), *origin));
            }
        }
    }
    Ok(Prefilter { group: f.group.clone(), d: f.d + 1, entries })
}

/// Work counters of one [`generate`] run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerateStats {
    /// Distinct commutator subgroups computed.
    pub commutator_calls: usize,
    /// Index pairs processed by the closure loop.
    pub pairs_processed: usize,
}

struct Slot {
    index: MonoidIndex,
    subgroup: Subgroup,
    origin: Origin,
    id: u64,
}

fn same(a: &Subgroup, b: &Subgroup) -> bool {
    a.order_log() == b.order_log() && a == b
}

/// Closure of a prefilter by transitive closure over commutators of stored
/// pairs, cheapest index sum first.
///
/// A pair is processed again whenever either of its entries has changed
/// index or subgroup since it was last processed; commutator subgroups
/// themselves are cached by subgroup pair, so `commutator_calls` counts
/// distinct subgroup pairs.
pub fn generate(pi: &Prefilter) -> (Filter, GenerateStats) {
    let mut next_id = 0u64;
    let mut fresh = || {
        next_id += 1;
        next_id
    };
    let mut slots: Vec<Slot> = pi
        .entries
        .iter()
        .map(|e| Slot { index: e.index.clone(), subgroup: e.subgroup.clone(), origin: e.origin, id: fresh() })
        .collect();
    let mut done: HashSet<(u64, u64)> = HashSet::new();
    let mut cache: HashMap<(Subgroup, Subgroup), Subgroup> = HashMap::new();
    let mut stats = GenerateStats::default();
    let trivial = Subgroup::trivial(&pi.group);

    loop {
        let mut best: Option<(MonoidIndex, usize, usize)> = None;
        for i in 0..slots.len() {
            for j in i..slots.len() {
                if done.contains(&(slots[i].id, slots[j].id)) {
                    continue;
                }
                let sum = slots[i].index.add(&slots[j].index);
                if best.as_ref().is_none_or(|(b, _, _)| sum < *b) {
                    best = Some((sum, i, j));
                }
            }
        }
        let Some((s, i, j)) = best else { break };
        done.insert((slots[i].id, slots[j].id));
        stats.pairs_processed += 1;

        let key = (slots[i].subgroup.clone(), slots[j].subgroup.clone());
        let c = match cache.get(&key) {
            Some(c) => c.clone(),
            None => {
                stats.commutator_calls += 1;
                let c = key.0.commutator(&key.1).expect("same group");
                cache.insert(key, c.clone());
                c
            }
        };
        if c.is_trivial() {
            continue;
        }
        let k = slots.partition_point(|e| e.index < s);
        let l = slots.get(k).map_or(&trivial, |e| &e.subgroup);
        let n = c.join(l).expect("same group");
        if same(&n, l) {
            continue;
        }
        if slots.get(k).is_some_and(|e| e.index == s) {
            slots[k].subgroup = n.clone();
            slots[k].origin = Origin::Generated;
            slots[k].id = fresh();
        } else {
            slots.insert(k, Slot { index: s, subgroup: n.clone(), origin: Origin::Generated, id: fresh() });
        }
        for e in &mut slots[..k] {
            let x = e.subgroup.join(&n).expect("same group");
            if !same(&x, &e.subgroup) {
                e.subgroup = x;
                e.origin = Origin::Generated;
                e.id = fresh();
            }
        }
        // equal neighbours: keep the larger index, and the older label
        let mut merged: Vec<Slot> = Vec::with_capacity(slots.len());
        for e in slots.drain(..) {
            if let Some(prev) = merged.last() {
                if same(&prev.subgroup, &e.subgroup) {
                    let prev = merged.pop().unwrap();
                    let origin = if e.origin == Origin::Generated { prev.origin } else { e.origin };
                    merged.push(Slot { origin, ..e });
                    continue;
                }
            }
            merged.push(e);
        }
        slots = merged;
    }

    let entries = slots.into_iter().map(|e| Entry::new(e.index, e.subgroup, e.origin)).collect();
    let f = Filter { group: pi.group.clone(), d: pi.d, sign: Sign::Max, entries };
    (f, stats)
}
