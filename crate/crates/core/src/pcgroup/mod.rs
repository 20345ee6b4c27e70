//! Finite p-groups given by power-commutator presentations.
//!
//! A presentation on generators `g_1, ..., g_n` (zero-based internally) with
//! every relative order equal to `p` stores, for each generator, the normal
//! form of `g_i^p`, and for each pair `j > i` the normal form of
//! `[g_j, g_i]`. Both are words in generators of index greater than `j`, so
//! the series `G_i = <g_i, ..., g_n>` is central and every element has the
//! unique normal form `g_1^{e_1} ... g_n^{e_n}` with `0 <= e_i < p`.

mod builtin;
mod series;
mod subgroup;
mod text;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{
    elgo_group, elgo_presentation, sylow_symmetric, sylow_symmetric_points, ut_group, PortraitOracle,
    UtOracle,
};
pub use series::{exponent_p_central_series, lower_central_series, p_class};
pub use subgroup::Subgroup;
pub use text::{parse_presentation, parse_presentation_unchecked, print_presentation, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("generator index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("relation for {rel} uses generator g{gen}, which is not above g{bound}")]
    BadRelationWord { rel: String, gen: usize, bound: usize },
    #[error("presentation is inconsistent: {0}")]
    Inconsistent(String),
    #[error("elements or subgroups belong to different groups")]
    MixedGroups,
    #[error("invalid parameters: {0}")]
    BadParameters(String),
}

/// Exponent vector of a group element in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub Vec<u32>);

impl Element {
    pub fn identity(n: usize) -> Self {
        Element(vec![0; n])
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Element(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Index of the first nonzero exponent.
    pub fn depth(&self) -> Option<usize> {
        self.0.iter().position(|&e| e != 0)
    }

    fn len(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "g{}", i + 1)?;
            } else {
                write!(f, "g{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Power-commutator presentation with all relative orders `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcPresentation {
    p: u32,
    n: usize,
    powers: Vec<Element>,
    // comms[j * n + i] = [g_j, g_i] for j > i
    comms: Vec<Element>,
}

impl PcPresentation {
    /// Presentation with trivial power and commutator relations (elementary abelian).
    pub fn trivial(p: u32, n: usize) -> Result<Self, GroupError> {
        if !crate::gfp::is_prime(p as u64) || p as u64 >= (1 << 31) {
            return Err(GroupError::NotPrime(p as u64));
        }
        Ok(Self {
            p,
            n,
            powers: vec![Element::identity(n); n],
            comms: vec![Element::identity(n); n * n],
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn power(&self, i: usize) -> &Element {
        &self.powers[i]
    }

    /// `[g_j, g_i]` for `j > i`.
    pub fn commutator_rel(&self, j: usize, i: usize) -> &Element {
        debug_assert!(j > i);
        &self.comms[j * self.n + i]
    }

    fn check_word(&self, w: &Element, bound: usize, rel: &str) -> Result<(), GroupError> {
        if w.len() != self.n {
            return Err(GroupError::BadParameters(format!("relation {rel} has wrong length")));
        }
        for (k, &e) in w.0.iter().enumerate() {
            if e >= self.p {
                return Err(GroupError::BadParameters(format!(
                    "exponent {e} of g{} in {rel} not below p",
                    k + 1
                )));
            }
            if e != 0 && k <= bound {
                return Err(GroupError::BadRelationWord { rel: rel.into(), gen: k + 1, bound: bound + 1 });
            }
        }
        Ok(())
    }

    pub fn set_power(&mut self, i: usize, w: Element) -> Result<(), GroupError> {
        if i >= self.n {
            return Err(GroupError::IndexOutOfRange { index: i + 1, n: self.n });
        }
        self.check_word(&w, i, &format!("g{}^p", i + 1))?;
        self.powers[i] = w;
        Ok(())
    }

    pub fn set_commutator(&mut self, j: usize, i: usize, w: Element) -> Result<(), GroupError> {
        if j >= self.n || i >= j {
            return Err(GroupError::IndexOutOfRange { index: j.max(i) + 1, n: self.n });
        }
        self.check_word(&w, j, &format!("[g{},g{}]", j + 1, i + 1))?;
        self.comms[j * self.n + i] = w;
        Ok(())
    }
}

/// A presentation together with the collector tables it needs.
#[derive(Debug)]
pub struct PcGroup {
    pres: PcPresentation,
    // conj[i * n + j] = g_j^{g_i} for j > i
    conj: Vec<Element>,
}

impl PartialEq for PcGroup {
    fn eq(&self, other: &Self) -> bool {
        self.pres == other.pres
    }
}
impl Eq for PcGroup {}

impl PcGroup {
    /// Build without consistency checking.
    pub fn new(pres: PcPresentation) -> Arc<Self> {
        let n = pres.n;
        let mut conj = vec![Element::identity(n); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let mut w = pres.comms[j * n + i].clone();
                w.0[j] = 1;
                conj[i * n + j] = w;
            }
        }
        Arc::new(Self { pres, conj })
    }

    /// Build and run the standard consistency tests.
    pub fn new_checked(pres: PcPresentation) -> Result<Arc<Self>, GroupError> {
        let g = Self::new(pres);
        g.check_consistency()?;
        Ok(g)
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }
    pub fn p(&self) -> u32 {
        self.pres.p
    }
    pub fn n(&self) -> usize {
        self.pres.n
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.n())
    }

    pub fn generator(&self, i: usize) -> Element {
        Element::generator(self.n(), i)
    }

    pub fn element(&self, exps: Vec<u32>) -> Result<Element, GroupError> {
        if exps.len() != self.n() || exps.iter().any(|&e| e >= self.p()) {
            return Err(GroupError::BadParameters(format!("not a normal form: {exps:?}")));
        }
        Ok(Element(exps))
    }

    /// Normal form of a word given as signed one-based generator indices
    /// (`-3` stands for `g_3^{-1}`).
    pub fn collect(&self, word: &[i64]) -> Result<Element, GroupError> {
        let n = self.n();
        let mut acc = self.identity();
        for &l in word {
            let idx = l.unsigned_abs() as usize;
            if idx == 0 || idx > n {
                return Err(GroupError::IndexOutOfRange { index: idx, n });
            }
            let g = self.generator(idx - 1);
            let g = if l < 0 { self.inv(&g) } else { g };
            acc = self.mul(&acc, &g);
        }
        Ok(acc)
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let mut out = x.clone();
        self.mul_into(&mut out.0, &y.0, 0);
        out
    }

    /// `x <- x * y` where both are supported on generators `>= from`.
    fn mul_into(&self, x: &mut [u32], y: &[u32], from: usize) {
        let n = self.n();
        let p = self.p();
        let Some(i) = (from..n).find(|&k| y[k] != 0) else {
            return;
        };
        let a = y[i];
        // x = head * tail with tail in G_{i+1}; x*y = head*g_i^a * tail^{g_i^a} * y'
        let tail_nonzero = x[i + 1..].iter().any(|&e| e != 0);
        let mut rest = vec![0u32; n];
        if tail_nonzero {
            rest[i + 1..].copy_from_slice(&x[i + 1..]);
            for _ in 0..a {
                rest = self.conjugate_by_generator(&rest, i);
            }
            for e in x[i + 1..].iter_mut() {
                *e = 0;
            }
        }
        let s = x[i] + a;
        let mut carry = None;
        if s >= p {
            x[i] = s - p;
            carry = Some(&self.pres.powers[i]);
        } else {
            x[i] = s;
        }
        // tail part in G_{i+1}: carry * rest * y'
        let mut tail = vec![0u32; n];
        if let Some(c) = carry {
            tail.copy_from_slice(&c.0);
        }
        if tail_nonzero {
            self.mul_into(&mut tail, &rest, i + 1);
        }
        self.mul_into(&mut tail, y, i + 1);
        x[i + 1..n].copy_from_slice(&tail[i + 1..n]);
    }

    /// `t^{g_i}` for `t` supported on generators `> i`.
    fn conjugate_by_generator(&self, t: &[u32], i: usize) -> Vec<u32> {
        let n = self.n();
        let mut out = vec![0u32; n];
        for j in i + 1..n {
            let e = t[j];
            if e == 0 {
                continue;
            }
            let c = &self.conj[i * n + j].0;
            for _ in 0..e {
                self.mul_into(&mut out, c, j);
            }
        }
        out
    }

    pub fn inv(&self, x: &Element) -> Element {
        let p = self.p();
        let mut y = self.identity();
        let mut z = x.clone();
        while let Some(i) = z.depth() {
            let k = p - z.0[i];
            let mut step = vec![0u32; self.n()];
            step[i] = k;
            self.mul_into(&mut y.0, &step, 0);
            self.mul_into(&mut z.0, &step, 0);
        }
        y
    }

    pub fn pow(&self, x: &Element, mut e: u64) -> Element {
        let mut acc = self.identity();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `[x, y] = x^{-1} y^{-1} x y`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Element {
        let xi = self.inv(x);
        let yi = self.inv(y);
        let a = self.mul(&xi, &yi);
        let b = self.mul(&a, x);
        self.mul(&b, y)
    }

    /// `y^{-1} x y`.
    pub fn conjugate(&self, x: &Element, y: &Element) -> Element {
        let yi = self.inv(y);
        self.mul(&self.mul(&yi, x), y)
    }

    /// Standard consistency tests for presentations with relative orders `p`.
    pub fn check_consistency(&self) -> Result<(), GroupError> {
        let n = self.n();
        let p = self.p() as u64;
        let g = |i: usize| self.generator(i);
        let fail = |what: String| Err(GroupError::Inconsistent(what));
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let l = self.mul(&self.mul(&g(k), &g(j)), &g(i));
                    let r = self.mul(&g(k), &self.mul(&g(j), &g(i)));
                    if l != r {
                        return fail(format!("(g{} g{}) g{} != g{} (g{} g{})", k + 1, j + 1, i + 1, k + 1, j + 1, i + 1));
                    }
                }
            }
        }
        for j in 0..n {
            let pw = &self.pres.powers[j];
            for i in 0..j {
                // g_j^p g_i two ways
                let l = self.mul(&self.pow(&g(j), p - 1), &self.mul(&g(j), &g(i)));
                let r = self.mul(pw, &g(i));
                if l != r {
                    return fail(format!("g{}^p g{} collects two ways", j + 1, i + 1));
                }
                // g_j g_i^p two ways
                let l = self.mul(&self.mul(&g(j), &self.pow(&g(i), p - 1)), &g(i));
                let r = self.mul(&g(j), &self.pres.powers[i]);
                if l != r {
                    return fail(format!("g{} g{}^p collects two ways", j + 1, i + 1));
                }
            }
            let l = self.mul(&g(j), pw);
            let r = self.mul(pw, &g(j));
            if l != r {
                return fail(format!("g{} does not commute with g{}^p", j + 1, j + 1));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    pub(crate) fn random_element(g: &PcGroup, rng: &mut impl Rng) -> Element {
        Element((0..g.n()).map(|_| rng.gen_range(0..g.p())).collect())
    }

    #[test]
    fn empty_word_and_power_relation() {
        let g = ut_group(5, 3).unwrap();
        assert_eq!(g.collect(&[]).unwrap(), g.identity());
        let e = elgo_group(5).unwrap();
        assert_eq!(e.collect(&[1, 1, 1, 1, 1]).unwrap(), *e.presentation().power(0));
    }

    #[test]
    fn collect_rejects_bad_index() {
        let g = ut_group(3, 3).unwrap();
        assert!(matches!(g.collect(&[4]), Err(GroupError::IndexOutOfRange { index: 4, .. })));
        assert!(g.collect(&[0]).is_err());
    }

    #[test]
    fn heisenberg_commutator_is_central_generator() {
        let g = ut_group(3, 3).unwrap();
        let c = g.commutator(&g.generator(0), &g.generator(1));
        // I + E13 is g3 in level order, up to sign convention of the commutator
        assert_eq!(c.depth(), Some(2));
        let oracle = UtOracle::new(3, 3);
        let m = oracle.to_matrix(&c);
        assert_eq!(m.get(0, 2), c.0[2] as u64);
        assert_eq!(g.commutator(&c, &g.generator(0)), g.identity());
        assert_eq!(g.commutator(&g.generator(0), &g.identity()), g.identity());
    }

    #[test]
    fn ut_collection_matches_matrix_product() {
        let g = ut_group(5, 3).unwrap();
        let o = UtOracle::new(5, 3);
        // g2 * g1 against (I+E23)(I+E12)
        let x = g.collect(&[2, 1]).unwrap();
        let m = o.to_matrix(&g.generator(1)).mul(&o.to_matrix(&g.generator(0))).unwrap();
        assert_eq!(o.from_matrix(&m), x);
    }

    #[test]
    fn group_axioms_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for g in [ut_group(5, 3).unwrap(), sylow_symmetric(2, 4).unwrap(), elgo_group(3).unwrap()] {
            for _ in 0..300 {
                let x = random_element(&g, &mut rng);
                let y = random_element(&g, &mut rng);
                let z = random_element(&g, &mut rng);
                assert_eq!(g.mul(&g.inv(&x), &x), g.identity());
                assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
                assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
                assert_eq!(g.commutator(&x, &x), g.identity());
                assert_eq!(g.commutator(&x, &y), g.inv(&g.commutator(&y, &x)));
            }
        }
    }

    #[test]
    fn inverse_random_thousand() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let g = ut_group(6, 5).unwrap();
        for _ in 0..1000 {
            let x = random_element(&g, &mut rng);
            assert_eq!(g.mul(&g.inv(&x), &x), g.identity());
        }
    }

    #[test]
    fn builtins_are_consistent() {
        ut_group(4, 2).unwrap().check_consistency().unwrap();
        ut_group(5, 3).unwrap().check_consistency().unwrap();
        sylow_symmetric(2, 3).unwrap().check_consistency().unwrap();
        sylow_symmetric(3, 2).unwrap().check_consistency().unwrap();
        elgo_group(3).unwrap().check_consistency().unwrap();
    }

    #[test]
    fn inconsistent_presentation_detected() {
        // g2^p = g3 while g3 is not central: [g3, g1] = g4 ... breaks g2^p g1
        let mut pres = PcPresentation::trivial(3, 4).unwrap();
        pres.set_power(1, Element(vec![0, 0, 1, 0])).unwrap();
        pres.set_commutator(2, 0, Element(vec![0, 0, 0, 1])).unwrap();
        assert!(matches!(PcGroup::new_checked(pres), Err(GroupError::Inconsistent(_))));
    }

    #[test]
    fn relation_words_must_use_higher_generators() {
        let mut pres = PcPresentation::trivial(3, 3).unwrap();
        assert!(matches!(
            pres.set_commutator(2, 0, Element(vec![0, 1, 0])),
            Err(GroupError::BadRelationWord { .. })
        ));
        assert!(pres.set_power(0, Element(vec![0, 2, 1])).is_ok());
        assert!(pres.set_power(1, Element(vec![1, 0, 0])).is_err());
    }
}
