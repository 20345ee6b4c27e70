use std::collections::{BTreeSet, HashMap};

use crate::pcgroup::Subgroup;

use super::{Entry, Filter, FilterError, MonoidIndex, Origin, Prefilter, Sign};

struct Closure<'a> {
    pi: &'a Prefilter,
    trivial: Subgroup,
    memo: HashMap<(Subgroup, Vec<u32>, usize), Subgroup>,
    comms: HashMap<(Subgroup, Subgroup), Subgroup>,
}

/// Nonzero `v` with `v <= r` coordinatewise.
fn parts(r: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &c in r {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=c).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

impl Closure<'_> {
    fn pi_at(&self, v: &[u32]) -> Subgroup {
        self.pi.evaluate(&MonoidIndex::new(v.to_vec())).expect("rank checked")
    }

    /// Join of `[A, pi_{v_1}, ..., pi_{v_k}]` over all compositions
    /// `v_1 + ... + v_k = r` into nonzero parts with `k <= len`.
    fn extend(&mut self, a: Subgroup, r: Vec<u32>, len: usize) -> Subgroup {
        if r.iter().all(|&x| x == 0) {
            return a;
        }
        if len == 0 || a.is_trivial() {
            return self.trivial.clone();
        }
        let key = (a, r, len);
        if let Some(h) = self.memo.get(&key) {
            return h.clone();
        }
        let (a, r, len) = key;
        let mut acc = self.trivial.clone();
        for v in parts(&r) {
            let pv = self.pi_at(&v);
            if pv.is_trivial() {
                continue;
            }
            let b = match self.comms.get(&(a.clone(), pv.clone())) {
                Some(b) => b.clone(),
                None => {
                    let b = a.commutator(&pv).expect("same group");
                    self.comms.insert((a.clone(), pv), b.clone());
                    b
                }
            };
            let rest: Vec<u32> = r.iter().zip(&v).map(|(x, y)| x - y).collect();
            let h = self.extend(b, rest, len - 1);
            acc = acc.join(&h).expect("same group");
        }
        self.memo.insert((a, r, len), acc.clone());
        acc
    }

    fn value(&mut self, t: &[u32], bound: usize) -> Subgroup {
        if t.iter().all(|&x| x == 0) {
            return self.pi_at(t);
        }
        let mut acc = self.trivial.clone();
        for v in parts(t) {
            if self.pi_at(&v).is_trivial() {
                continue;
            }
            let rest: Vec<u32> = t.iter().zip(&v).map(|(x, y)| x - y).collect();
            let h = self.extend(self.pi_at(&v), rest, bound - 1);
            acc = acc.join(&h).expect("same group");
        }
        acc
    }
}

fn candidate_indices(pi: &Prefilter, bound: usize) -> BTreeSet<Vec<u32>> {
    let stored: Vec<&MonoidIndex> = pi.entries().iter().map(|e| &e.index).collect();
    let mut all = BTreeSet::new();
    all.insert(vec![0; pi.rank()]);
    let mut layer: BTreeSet<Vec<u32>> = BTreeSet::new();
    layer.insert(vec![0; pi.rank()]);
    for _ in 0..bound {
        let mut next = BTreeSet::new();
        for s in &layer {
            for m in &stored {
                next.insert(s.iter().zip(m.coords()).map(|(a, b)| a + b).collect::<Vec<u32>>());
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn closure_with_bound(pi: &Prefilter, bound: usize) -> Vec<(Vec<u32>, Subgroup)> {
    let mut c = Closure { pi, trivial: Subgroup::trivial(pi.group()), memo: HashMap::new(), comms: HashMap::new() };
    candidate_indices(pi, bound).into_iter().map(|t| {
        let h = c.value(&t, bound);
        (t, h)
    }).collect()
}

/// Closure of a prefilter by literal enumeration of compositions into at
/// most `length_bound` nonzero parts. Exponential; meant for testing.
///
/// The maximal index of each image subgroup is a sum of at most
/// `length_bound` stored indices, so the closure is evaluated at `0` and at
/// all such sums. Fails when allowing one more part changes the result.
pub fn closure_oracle(pi: &Prefilter, length_bound: usize) -> Result<Filter, FilterError> {
    if length_bound == 0 {
        return Err(FilterError::BoundTooSmall(0));
    }
    let f = filter_with_bound(pi, length_bound)?;
    if filter_with_bound(pi, length_bound + 1)? != f {
        return Err(FilterError::BoundTooSmall(length_bound));
    }
    Ok(f)
}

fn filter_with_bound(pi: &Prefilter, bound: usize) -> Result<Filter, FilterError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (t, h) in closure_with_bound(pi, bound) {
        if h.is_trivial() {
            continue;
        }
        let idx = MonoidIndex::new(t);
        match entries.last_mut() {
            Some(last) if last.subgroup == h => last.index = idx,
            _ => entries.push(Entry::new(idx, h, Origin::Generated)),
        }
    }
    Filter::new(pi.group(), pi.rank(), Sign::Max, entries)
}
