use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FilterError;

/// Coordinate used to stand in for "arbitrarily large" when probing the
/// supremum of an interval without a maximum.
const BIG: u64 = 1 << 40;

/// Element of `N^d`. The derived ordering is lexicographic; use [`lex_cmp`]
/// when the ranks may differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidIndex(Vec<u32>);

impl MonoidIndex {
    pub fn new(coords: Vec<u32>) -> Self {
        assert!(!coords.is_empty(), "monoid rank must be at least 1");
        Self(coords)
    }

    pub fn zero(d: usize) -> Self {
        Self::new(vec![0; d])
    }

    /// Unit vector `e_i` (0-based position).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut c = vec![0; d];
        c[i] = 1;
        Self::new(c)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Coordinatewise sum; panics on rank mismatch.
    pub fn add(&self, other: &MonoidIndex) -> MonoidIndex {
        assert_eq!(self.rank(), other.rank(), "rank mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_add(&self, other: &MonoidIndex) -> Result<MonoidIndex, FilterError> {
        if self.rank() != other.rank() {
            return Err(FilterError::RankMismatch(self.rank(), other.rank()));
        }
        Ok(self.add(other))
    }

    /// Immediate lexicographic successor `s + e_d`.
    pub fn successor(&self) -> MonoidIndex {
        let mut c = self.0.clone();
        *c.last_mut().unwrap() += 1;
        Self(c)
    }

    /// `s - e_d` when the last coordinate is nonzero; this is the immediate
    /// predecessor, which otherwise does not exist.
    pub fn predecessor_if_last_nonzero(&self) -> Option<MonoidIndex> {
        let mut c = self.0.clone();
        let last = c.last_mut().unwrap();
        if *last == 0 {
            return None;
        }
        *last -= 1;
        Some(Self(c))
    }

    /// Append a coordinate.
    pub fn extend(&self, c: u32) -> MonoidIndex {
        let mut v = self.0.clone();
        v.push(c);
        Self(v)
    }

    pub(crate) fn widen(&self) -> Vec<u64> {
        self.0.iter().map(|&c| c as u64).collect()
    }
}

impl From<Vec<u32>> for MonoidIndex {
    fn from(v: Vec<u32>) -> Self {
        Self::new(v)
    }
}

impl fmt::Display for MonoidIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Lexicographic comparison of two indices of the same rank.
pub fn lex_cmp(s: &MonoidIndex, t: &MonoidIndex) -> Result<Ordering, FilterError> {
    if s.rank() != t.rank() {
        return Err(FilterError::RankMismatch(s.rank(), t.rank()));
    }
    Ok(s.0.cmp(&t.0))
}

pub(crate) fn cmp_wide(s: &MonoidIndex, t: &[u64]) -> Ordering {
    s.0.iter().map(|&c| c as u64).cmp(t.iter().copied())
}

/// A point above every element of the interval that ends just before `next`
/// (or above everything when `next` is `None`) but below `next` itself.
pub(crate) fn supremum_below(next: Option<&MonoidIndex>, d: usize) -> Vec<u64> {
    let Some(n) = next else { return vec![BIG; d] };
    let mut c = n.widen();
    match c.iter().rposition(|&x| x != 0) {
        Some(k) => {
            c[k] -= 1;
            for x in &mut c[k + 1..] {
                *x = BIG;
            }
            c
        }
        None => c,
    }
}

pub(crate) fn format_wide(c: &[u64]) -> String {
    let parts: Vec<String> = c.iter().map(|&x| if x >= BIG { "inf".into() } else { x.to_string() }).collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lexicographic() {
        let a = MonoidIndex::new(vec![2, 2]);
        let b = MonoidIndex::new(vec![3, 0]);
        assert_eq!(lex_cmp(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(lex_cmp(&a, &a).unwrap(), Ordering::Equal);
        let c = MonoidIndex::new(vec![1, 5]);
        let e = MonoidIndex::new(vec![1, 5, 0]);
        assert_eq!(lex_cmp(&c, &e), Err(FilterError::RankMismatch(2, 3)));
    }

    #[test]
    fn successor_and_predecessor() {
        let a = MonoidIndex::new(vec![1, 0]);
        assert_eq!(a.predecessor_if_last_nonzero(), None);
        assert_eq!(a.successor().predecessor_if_last_nonzero(), Some(a.clone()));
        assert_eq!(a.to_string(), "(1,0)");
        assert_eq!(MonoidIndex::new(vec![7]).to_string(), "7");
    }

    proptest! {
        #[test]
        fn translation_invariant(
            s in proptest::collection::vec(0u32..5, 3),
            t in proptest::collection::vec(0u32..5, 3),
            u in proptest::collection::vec(0u32..5, 3),
        ) {
            let (s, t, u) = (MonoidIndex::new(s), MonoidIndex::new(t), MonoidIndex::new(u));
            prop_assert_eq!(lex_cmp(&s, &t).unwrap(), lex_cmp(&s.add(&u), &t.add(&u)).unwrap());
        }
    }
}
