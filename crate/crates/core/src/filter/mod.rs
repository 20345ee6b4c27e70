//! Filters over `N^d` with the lexicographic order, stored as signed sets of
//! `(index, subgroup)` pairs.
//!
//! Sign `+1` stores the maximal index of each nontrivial image subgroup;
//! sign `-1` stores minimal indices and may end with a trivial entry that
//! marks where the trivial tail begins.

mod generate;
mod index;
mod json;
mod oracle;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::pcgroup::{exponent_p_central_series, lower_central_series, GroupError, PcGroup, Subgroup};

pub use generate::{generate, insert_subgroup, insert_subgroups, GenerateStats, Prefilter};
pub use index::{lex_cmp, MonoidIndex};
pub use json::{EntryJson, FilterJson};
pub use oracle::closure_oracle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FilterError {
    #[error("index ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("filter is not full")]
    NotFull,
    #[error("malformed filter: {0}")]
    Malformed(String),
    #[error("subgroup {0} is not normal")]
    NotNormal(String),
    #[error("{0} is not strictly between the boundary and the term at {1}")]
    NotBetween(String, MonoidIndex),
    #[error("{0} is not a stored maximal index")]
    NotStoredIndex(MonoidIndex),
    #[error("closure changes when the partition length grows past {0}")]
    BoundTooSmall(usize),
    #[error("invalid JSON filter: {0}")]
    Json(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Where a stored subgroup came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    InputSeries,
    /// `W J^k` pulled back from a radical chain.
    Radical(u32),
    Generated,
    Filled,
    Inserted,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::InputSeries => f.write_str("input-series"),
            Origin::Radical(1) => f.write_str("J"),
            Origin::Radical(k) => write!(f, "J^{k}"),
            Origin::Generated => f.write_str("generated"),
            Origin::Filled => f.write_str("filled"),
            Origin::Inserted => f.write_str("inserted"),
        }
    }
}

impl FromStr for Origin {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "input-series" => Origin::InputSeries,
            "J" => Origin::Radical(1),
            "generated" => Origin::Generated,
            "filled" => Origin::Filled,
            "inserted" => Origin::Inserted,
            _ => match s.strip_prefix("J^").and_then(|k| k.parse().ok()) {
                Some(k) => Origin::Radical(k),
                None => return Err(format!("unknown origin `{s}`")),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub index: MonoidIndex,
    pub subgroup: Subgroup,
    pub origin: Origin,
}

impl Entry {
    pub fn new(index: MonoidIndex, subgroup: Subgroup, origin: Origin) -> Self {
        Self { index, subgroup, origin }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Max,
    Min,
}

impl Sign {
    pub fn as_int(self) -> i32 {
        match self {
            Sign::Max => 1,
            Sign::Min => -1,
        }
    }
}

/// Interval `I_H` of one image subgroup: `[min, max]`, or unbounded above
/// within the lexicographic order when `max` is `None`.
#[derive(Debug, Clone)]
struct Interval {
    subgroup: Subgroup,
    origin: Origin,
    min: MonoidIndex,
    max: Option<MonoidIndex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    group: Arc<PcGroup>,
    d: usize,
    sign: Sign,
    entries: Vec<Entry>,
}

impl Filter {
    /// Build a filter from stored entries. Checks ranks and strict ordering
    /// of indices; descent and the commutator condition are left to
    /// [`verify_filter`].
    pub fn new(group: &Arc<PcGroup>, d: usize, sign: Sign, entries: Vec<Entry>) -> Result<Self, FilterError> {
        if d == 0 {
            return Err(FilterError::Malformed("rank must be at least 1".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.index.rank() != d {
                return Err(FilterError::RankMismatch(e.index.rank(), d));
            }
            if !Arc::ptr_eq(e.subgroup.group(), group) {
                return Err(GroupError::MixedGroups.into());
            }
            let last = i + 1 == entries.len();
            if e.subgroup.is_trivial() && !(sign == Sign::Min && last && i > 0) {
                return Err(FilterError::Malformed(format!("trivial subgroup stored at {}", e.index)));
            }
            if i > 0 {
                let prev = &entries[i - 1];
                if prev.index >= e.index {
                    return Err(FilterError::Malformed(format!(
                        "indices not strictly ascending at {}",
                        e.index
                    )));
                }
            }
        }
        if sign == Sign::Min && entries.first().is_some_and(|e| !e.index.is_zero()) {
            return Err(FilterError::Malformed("minimal-index filter must start at 0".into()));
        }
        Ok(Self { group: group.clone(), d, sign, entries })
    }

    /// Filter over `N` storing the terms of a descending series at indices
    /// `1, 2, ...`, so the first term also sits at 0.
    pub fn from_series(group: &Arc<PcGroup>, terms: Vec<Subgroup>) -> Result<Self, FilterError> {
        let entries = terms
            .into_iter()
            .enumerate()
            .map(|(i, h)| Entry::new(MonoidIndex::new(vec![i as u32 + 1]), h, Origin::InputSeries))
            .collect();
        Self::new(group, 1, Sign::Max, entries)
    }

    pub fn lower_central(group: &Arc<PcGroup>) -> Self {
        Self::from_series(group, lower_central_series(group)).expect("series is strictly descending")
    }

    pub fn exponent_p_central(group: &Arc<PcGroup>) -> Self {
        Self::from_series(group, exponent_p_central_series(group)).expect("series is strictly descending")
    }

    pub fn group(&self) -> &Arc<PcGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Number of nontrivial image subgroups.
    pub fn len(&self) -> usize {
        self.entries.iter().filter(|e| !e.subgroup.is_trivial()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_rank(&self, s: &MonoidIndex) -> Result<(), FilterError> {
        if s.rank() != self.d {
            return Err(FilterError::RankMismatch(s.rank(), self.d));
        }
        Ok(())
    }

    /// `phi_s`, by binary search over the stored indices.
    pub fn evaluate(&self, s: &MonoidIndex) -> Result<Subgroup, FilterError> {
        self.check_rank(s)?;
        Ok(self.evaluate_at(&s.widen()))
    }

    /// Evaluation at a point with wide coordinates, used to probe suprema of
    /// unbounded intervals.
    fn evaluate_at(&self, s: &[u64]) -> Subgroup {
        let cmp = |e: &Entry| index::cmp_wide(&e.index, s);
        match self.sign {
            Sign::Max => {
                let k = self.entries.partition_point(|e| cmp(e) == Ordering::Less);
                match self.entries.get(k) {
                    Some(e) => e.subgroup.clone(),
                    None => Subgroup::trivial(&self.group),
                }
            }
            Sign::Min => {
                let k = self.entries.partition_point(|e| cmp(e) != Ordering::Greater);
                match k.checked_sub(1) {
                    Some(i) => self.entries[i].subgroup.clone(),
                    None => self.entries.first().map_or_else(|| Subgroup::trivial(&self.group), |e| e.subgroup.clone()),
                }
            }
        }
    }

    /// Intervals of all image subgroups, including the trivial tail when it
    /// is nonempty.
    fn intervals(&self) -> Vec<Interval> {
        let mut out: Vec<Interval> = Vec::new();
        match self.sign {
            Sign::Max => {
                let mut lo = MonoidIndex::zero(self.d);
                for e in &self.entries {
                    out.push(Interval {
                        subgroup: e.subgroup.clone(),
                        origin: e.origin,
                        min: lo,
                        max: Some(e.index.clone()),
                    });
                    lo = e.index.successor();
                }
                out.push(Interval { subgroup: Subgroup::trivial(&self.group), origin: Origin::Generated, min: lo, max: None });
            }
            Sign::Min => {
                for (i, e) in self.entries.iter().enumerate() {
                    let max = self.entries.get(i + 1).and_then(|n| n.index.predecessor_if_last_nonzero());
                    out.push(Interval { subgroup: e.subgroup.clone(), origin: e.origin, min: e.index.clone(), max });
                }
            }
        }
        out
    }

    fn from_intervals(group: &Arc<PcGroup>, d: usize, ivs: Vec<Interval>) -> Self {
        let full = ivs.iter().all(|iv| iv.subgroup.is_trivial() || iv.max.is_some());
        let entries: Vec<Entry> = if full {
            ivs.into_iter()
                .filter(|iv| !iv.subgroup.is_trivial())
                .map(|iv| Entry::new(iv.max.unwrap(), iv.subgroup, iv.origin))
                .collect()
        } else {
            ivs.into_iter().map(|iv| Entry::new(iv.min, iv.subgroup, iv.origin)).collect()
        };
        let sign = if full { Sign::Max } else { Sign::Min };
        Self { group: group.clone(), d, sign, entries }
    }

    /// Boundary filter `s -> <phi_{s+t} : t > 0>`, always with sign `-1`.
    pub fn boundary(&self) -> Filter {
        let g = &self.group;
        let mut raw: Vec<(MonoidIndex, Subgroup, Origin)> = Vec::new();
        match self.sign {
            Sign::Max => {
                let top = self.entries.first().map_or_else(|| Subgroup::trivial(g), |e| e.subgroup.clone());
                let origin = self.entries.first().map_or(Origin::Generated, |e| e.origin);
                raw.push((MonoidIndex::zero(self.d), top, origin));
                for (i, e) in self.entries.iter().enumerate() {
                    let (next, origin) = match self.entries.get(i + 1) {
                        Some(n) => (n.subgroup.clone(), n.origin),
                        None => (Subgroup::trivial(g), Origin::Generated),
                    };
                    raw.push((e.index.clone(), next, origin));
                }
            }
            Sign::Min => {
                for (i, e) in self.entries.iter().enumerate() {
                    let idx = if i == 0 {
                        MonoidIndex::zero(self.d)
                    } else {
                        e.index.predecessor_if_last_nonzero().unwrap_or_else(|| e.index.clone())
                    };
                    raw.push((idx, e.subgroup.clone(), e.origin));
                }
            }
        }
        // an entry whose successor starts at the same index has an empty interval
        let mut entries: Vec<Entry> = Vec::new();
        for (idx, h, origin) in raw {
            if entries.last().is_some_and(|l| l.index == idx) {
                entries.pop();
            }
            entries.push(Entry::new(idx, h, origin));
        }
        if entries.len() == 1 && entries[0].subgroup.is_trivial() {
            entries.clear();
        }
        Filter { group: g.clone(), d: self.d, sign: Sign::Min, entries }
    }

    /// Whether every nontrivial image subgroup attains a maximal index: the
    /// next term must begin at an index whose last coordinate is nonzero.
    pub fn is_full(&self) -> bool {
        self.intervals().iter().all(|iv| iv.subgroup.is_trivial() || iv.max.is_some())
    }

    /// Fullness via orders: `|boundary_0|` equals the product of the layer
    /// orders `[phi_s : boundary_s]` over nonzero `s`.
    pub fn is_full_by_order(&self) -> bool {
        let bd0 = self.boundary().evaluate_at(&vec![0; self.d]);
        let ivs = self.intervals();
        let mut total = 0usize;
        for (i, iv) in ivs.iter().enumerate() {
            if let Some(m) = &iv.max {
                if !m.is_zero() && !iv.subgroup.is_trivial() {
                    let next = ivs.get(i + 1).map_or(0, |n| n.subgroup.order_log());
                    total += iv.subgroup.order_log() - next;
                }
            }
        }
        total == bd0.order_log()
    }

    /// Full filter with the same image: repeatedly give the largest subgroup
    /// without a maximal index the largest sum of earlier maxima lying in its
    /// interval (or its minimal index if there is none) as maximum.
    pub fn fill(&self) -> Filter {
        let mut ivs = self.intervals();
        while let Some(h) = ivs.iter().position(|iv| !iv.subgroup.is_trivial() && iv.max.is_none()) {
            let next_min = ivs.get(h + 1).map(|n| n.min.clone());
            let inside = |v: &MonoidIndex| *v >= ivs[h].min && next_min.as_ref().is_none_or(|n| v < n);
            let mut e: Option<MonoidIndex> = None;
            for x in 0..h {
                for y in x..h {
                    let v = ivs[x].max.as_ref().unwrap().add(ivs[y].max.as_ref().unwrap());
                    if inside(&v) && e.as_ref().is_none_or(|cur| v > *cur) {
                        e = Some(v);
                    }
                }
            }
            let e = e.unwrap_or_else(|| ivs[h].min.clone());
            let succ = e.successor();
            ivs[h].max = Some(e);
            ivs[h].origin = Origin::Filled;
            match ivs.get_mut(h + 1) {
                Some(n) => n.min = succ,
                None => ivs.push(Interval {
                    subgroup: Subgroup::trivial(&self.group),
                    origin: Origin::Generated,
                    min: succ,
                    max: None,
                }),
            }
        }
        Filter::from_intervals(&self.group, self.d, ivs)
    }

    /// Layer orders `log_p [phi_s : boundary_s]` at every stored maximal
    /// index, in entry order. Requires a full filter.
    pub fn layer_orders(&self) -> Result<Vec<(MonoidIndex, usize)>, FilterError> {
        if self.sign != Sign::Max {
            return Err(FilterError::NotFull);
        }
        Ok(self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let next = self.entries.get(i + 1).map_or(0, |n| n.subgroup.order_log());
                (e.index.clone(), e.subgroup.order_log() - next)
            })
            .collect())
    }
}

/// First violation found by [`verify_filter`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("entry {0} is not normal in the group")]
    NotNormal(MonoidIndex),
    #[error("entries {0} and {1} are not strictly descending")]
    NotDescending(MonoidIndex, MonoidIndex),
    #[error("[phi_{0}, phi_{1}] is not contained in phi_{2}")]
    Commutator(MonoidIndex, MonoidIndex, String),
}

/// Check the filter axioms on the stored data: normality, strict descent and
/// `[phi_s, phi_t] <= phi_{s+t}` at the extreme points of every pair of
/// intervals.
pub fn verify_filter(f: &Filter) -> Result<(), Violation> {
    for (i, e) in f.entries.iter().enumerate() {
        if !e.subgroup.is_normal() {
            return Err(Violation::NotNormal(e.index.clone()));
        }
        if let Some(n) = f.entries.get(i + 1) {
            if n.index <= e.index || !e.subgroup.contains_subgroup(&n.subgroup) || e.subgroup == n.subgroup {
                return Err(Violation::NotDescending(e.index.clone(), n.index.clone()));
            }
        }
    }
    let ivs = f.intervals();
    let sups: Vec<Vec<u64>> = ivs
        .iter()
        .enumerate()
        .map(|(i, iv)| match &iv.max {
            Some(m) => m.widen(),
            None => index::supremum_below(ivs.get(i + 1).map(|n| &n.min), f.d),
        })
        .collect();
    for i in 0..ivs.len() {
        if ivs[i].subgroup.is_trivial() {
            continue;
        }
        for j in i..ivs.len() {
            if ivs[j].subgroup.is_trivial() {
                continue;
            }
            let sum: Vec<u64> = sups[i].iter().zip(&sups[j]).map(|(a, b)| a + b).collect();
            let target = f.evaluate_at(&sum);
            let c = ivs[i].subgroup.commutator(&ivs[j].subgroup).expect("same group");
            if !target.contains_subgroup(&c) {
                let cite = |iv: &Interval| match f.sign {
                    Sign::Max => iv.max.clone().unwrap_or_else(|| iv.min.clone()),
                    Sign::Min => iv.min.clone(),
                };
                return Err(Violation::Commutator(
                    cite(&ivs[i]),
                    cite(&ivs[j]),
                    index::format_wide(&sum),
                ));
            }
        }
    }
    Ok(())
}
