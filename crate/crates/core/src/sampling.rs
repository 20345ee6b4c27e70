//! Random subgroups, prefilters and sections, used as test and benchmark
//! tooling.

use std::sync::Arc;

use rand::Rng;

use crate::filter::{Entry, MonoidIndex, Origin, Prefilter};
use crate::pcgroup::{Element, GroupError, PcGroup, PcPresentation, Subgroup};

/// Uniformly random element of a subgroup.
pub fn random_element_of(h: &Subgroup, rng: &mut impl Rng) -> Element {
    let g = h.group();
    let p = g.p() as u64;
    h.igs().iter().fold(g.identity(), |acc, t| g.mul(&acc, &g.pow(t, rng.gen_range(0..p))))
}

/// Normal closure of one or two random elements of a normal subgroup `top`.
pub fn random_normal_below(top: &Subgroup, rng: &mut impl Rng) -> Subgroup {
    let k = rng.gen_range(1..=2);
    let gens: Vec<Element> = (0..k).map(|_| random_element_of(top, rng)).collect();
    Subgroup::normal_closure_of(top.group(), gens)
}

/// Strictly descending chain of nontrivial normal subgroups starting at the
/// whole group, at most `max_len` long.
pub fn random_normal_chain(g: &Arc<PcGroup>, max_len: usize, rng: &mut impl Rng) -> Vec<Subgroup> {
    let mut chain = vec![Subgroup::whole(g)];
    if g.n() == 0 {
        return Vec::new();
    }
    let mut attempts = 0;
    while chain.len() < max_len && attempts < 20 {
        attempts += 1;
        let top = chain.last().unwrap();
        let h = random_normal_below(top, rng);
        if h.is_trivial() {
            continue;
        }
        if h != *top {
            chain.push(h);
            attempts = 0;
        }
    }
    chain
}

/// Random prefilter over `N^d` with small ascending indices.
pub fn random_prefilter(g: &Arc<PcGroup>, d: usize, max_len: usize, rng: &mut impl Rng) -> Prefilter {
    let chain = random_normal_chain(g, max_len, rng);
    let mut idx = vec![0u32; d];
    idx[0] = rng.gen_range(0..=1);
    if idx[0] == 0 {
        idx[d - 1] = rng.gen_range(0..=1);
    }
    let mut entries = Vec::with_capacity(chain.len());
    for (i, h) in chain.into_iter().enumerate() {
        if i > 0 {
            if d == 1 || rng.gen_bool(0.5) {
                idx[d - 1] += rng.gen_range(1..=2);
            } else {
                let k = rng.gen_range(0..d - 1);
                idx[k] += 1;
                for c in &mut idx[k + 1..] {
                    *c = rng.gen_range(0..=1);
                }
            }
        }
        entries.push(Entry::new(MonoidIndex::new(idx.clone()), h, Origin::Inserted));
    }
    Prefilter::new(g, d, entries).expect("chain is descending and normal")
}

/// Exponents of `x` with respect to an induced sequence whose leading
/// exponents are all 1. `x` must lie in the subgroup it induces.
fn sift_exponents(g: &PcGroup, seq: &[Element], x: &Element) -> Vec<u32> {
    let mut x = x.clone();
    let mut out = Vec::with_capacity(seq.len());
    for s in seq {
        let d = s.depth().expect("nontrivial");
        let e = x.0[d];
        if e != 0 {
            x = g.mul(&g.pow(&g.inv(s), e as u64), &x);
        }
        out.push(e);
    }
    debug_assert!(x.is_identity(), "element not in the induced subgroup");
    out
}

/// Presentation of `u / n` for normal `n <= u`, on the igs elements of `u`
/// at depths not occupied by `n`.
pub fn quotient_presentation(u: &Subgroup, n: &Subgroup) -> Result<PcPresentation, GroupError> {
    if !u.contains_subgroup(n) || !n.is_normal_in(u) {
        return Err(GroupError::BadParameters("quotient needs a normal subgroup".into()));
    }
    let g = u.group();
    let n_depths = n.depths();
    let mut seq = Vec::new();
    let mut factor = Vec::new();
    for t in u.igs() {
        let d = t.depth().unwrap();
        match n_depths.iter().position(|&x| x == d) {
            Some(k) => seq.push(n.igs()[k].clone()),
            None => {
                factor.push(seq.len());
                seq.push(t.clone());
            }
        }
    }
    let project = |x: &Element| -> Element {
        let e = sift_exponents(g, &seq, x);
        Element(factor.iter().map(|&k| e[k]).collect())
    };
    let mut pres = PcPresentation::trivial(g.p(), factor.len())?;
    for (i, &a) in factor.iter().enumerate() {
        pres.set_power(i, project(&g.pow(&seq[a], g.p() as u64)))?;
        for (j, &b) in factor.iter().enumerate().skip(i + 1) {
            pres.set_commutator(j, i, project(&g.commutator(&seq[b], &seq[a])))?;
        }
    }
    Ok(pres)
}

/// Random section `U/N`: `U` generated by a few random elements, `N` the
/// normal closure in `U` of a few random elements of `U`.
pub fn random_section(g: &Arc<PcGroup>, rng: &mut impl Rng) -> Result<Arc<PcGroup>, GroupError> {
    let whole = Subgroup::whole(g);
    let k = rng.gen_range(2..=4);
    let u = Subgroup::generated(g, (0..k).map(|_| random_element_of(&whole, rng)));
    let m = rng.gen_range(0..=1);
    let n = Subgroup::generated(g, (0..m).map(|_| random_element_of(&u, rng))).normal_closure_in(&u)?;
    PcGroup::new_checked(quotient_presentation(&u, &n)?)
}
