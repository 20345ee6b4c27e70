use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use super::{Element, GroupError, PcGroup};

/// A subgroup stored by its canonical induced generating sequence: one
/// element per leading index, leading exponent 1, and zero exponents at the
/// leading indices of the other elements.
#[derive(Clone)]
pub struct Subgroup {
    group: Arc<PcGroup>,
    igs: Vec<Element>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.igs == other.igs
    }
}
impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.igs.hash(state);
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(p^{} ", self.igs.len())?;
        f.debug_list().entries(self.igs.iter().map(|e| e.to_string())).finish()?;
        write!(f, ")")
    }
}

/// Sifting table used while closing a generating set.
struct Sifter<'a> {
    g: &'a PcGroup,
    // table[d] = element of depth d with leading exponent 1, plus its powers
    table: Vec<Option<Vec<Element>>>,
}

impl<'a> Sifter<'a> {
    fn new(g: &'a PcGroup) -> Self {
        Self { g, table: vec![None; g.n()] }
    }

    fn from_igs(g: &'a PcGroup, igs: &[Element]) -> Self {
        let mut s = Self::new(g);
        for t in igs {
            s.put(t.clone());
        }
        s
    }

    fn put(&mut self, t: Element) {
        let d = t.depth().expect("nontrivial");
        let p = self.g.p() as u64;
        // powers t^0 .. t^{p-1}
        let mut pows = Vec::with_capacity(p as usize);
        pows.push(self.g.identity());
        for k in 1..p as usize {
            let next = self.g.mul(&pows[k - 1], &t);
            pows.push(next);
        }
        self.table[d] = Some(pows);
    }

    /// Residue of `x` after dividing out table elements depth by depth.
    fn sift(&self, mut x: Element) -> Element {
        let p = self.g.p();
        let mut from = 0;
        while let Some(d) = x.0[from..].iter().position(|&e| e != 0).map(|k| k + from) {
            match &self.table[d] {
                Some(pows) => {
                    let k = (p - x.0[d]) as usize;
                    x = self.g.mul(&x, &pows[k]);
                    from = d + 1;
                }
                None => return x,
            }
        }
        x
    }

    /// Add `gens` and close under powers, commutators and, if given,
    /// conjugation by `normalizers`.
    fn close(&mut self, gens: impl IntoIterator<Item = Element>, normalizers: &[Element]) {
        let g = self.g;
        let p = g.p() as u64;
        let mut queue: Vec<Element> = gens.into_iter().collect();
        while let Some(y) = queue.pop() {
            let r = self.sift(y);
            let Some(d) = r.depth() else { continue };
            let a = r.0[d] as u64;
            let inv = crate::gfp::inv_mod(a, p);
            let t = g.pow(&r, inv);
            queue.push(g.pow(&t, p));
            for pows in self.table.iter().flatten() {
                queue.push(g.commutator(&t, &pows[1]));
            }
            for h in normalizers {
                queue.push(g.commutator(&t, h));
            }
            self.put(t);
        }
    }

    fn into_canonical(self) -> Vec<Element> {
        let g = self.g;
        let p = g.p();
        let depths: Vec<usize> = (0..g.n()).filter(|&d| self.table[d].is_some()).collect();
        let mut igs: Vec<Element> = depths
            .iter()
            .map(|&d| self.table[d].as_ref().unwrap()[1].clone())
            .collect();
        for a in 0..igs.len() {
            for b in a + 1..igs.len() {
                let e = igs[a].0[depths[b]];
                if e != 0 {
                    let pw = &self.table[depths[b]].as_ref().unwrap()[(p - e) as usize];
                    igs[a] = g.mul(&igs[a], pw);
                }
            }
        }
        igs
    }
}

impl Subgroup {
    pub fn trivial(group: &Arc<PcGroup>) -> Self {
        Self { group: group.clone(), igs: Vec::new() }
    }

    pub fn whole(group: &Arc<PcGroup>) -> Self {
        let igs = (0..group.n()).map(|i| group.generator(i)).collect();
        Self { group: group.clone(), igs }
    }

    /// Subgroup generated by `gens`.
    pub fn generated(group: &Arc<PcGroup>, gens: impl IntoIterator<Item = Element>) -> Self {
        let mut s = Sifter::new(group);
        s.close(gens, &[]);
        Self { group: group.clone(), igs: s.into_canonical() }
    }

    /// Rebuild from a stored igs (recanonicalising it).
    pub fn from_igs(group: &Arc<PcGroup>, igs: Vec<Element>) -> Result<Self, GroupError> {
        for e in &igs {
            if e.0.len() != group.n() || e.0.iter().any(|&x| x >= group.p()) {
                return Err(GroupError::BadParameters(format!("not a normal form: {:?}", e.0)));
            }
        }
        Ok(Self::generated(group, igs))
    }

    /// Smallest normal subgroup of the whole group containing `gens`.
    pub fn normal_closure_of(group: &Arc<PcGroup>, gens: impl IntoIterator<Item = Element>) -> Self {
        let normalizers: Vec<Element> = (0..group.n()).map(|i| group.generator(i)).collect();
        let mut s = Sifter::new(group);
        s.close(gens, &normalizers);
        Self { group: group.clone(), igs: s.into_canonical() }
    }

    pub fn group(&self) -> &Arc<PcGroup> {
        &self.group
    }

    pub fn igs(&self) -> &[Element] {
        &self.igs
    }

    /// `log_p` of the order.
    pub fn order_log(&self) -> usize {
        self.igs.len()
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.group.p()).pow(self.igs.len() as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.igs.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.igs.len() == self.group.n()
    }

    /// Leading indices of the igs.
    pub fn depths(&self) -> Vec<usize> {
        self.igs.iter().map(|e| e.depth().unwrap()).collect()
    }

    fn same_group(&self, other: &Self) -> Result<(), GroupError> {
        if Arc::ptr_eq(&self.group, &other.group) {
            Ok(())
        } else {
            Err(GroupError::MixedGroups)
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        Sifter::from_igs(&self.group, &self.igs).sift(x.clone()).is_identity()
    }

    /// `other <= self`.
    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        if other.igs.len() > self.igs.len() {
            return false;
        }
        let s = Sifter::from_igs(&self.group, &self.igs);
        other.igs.iter().all(|x| s.sift(x.clone()).is_identity())
    }

    pub fn normal_closure(&self) -> Subgroup {
        Self::normal_closure_of(&self.group, self.igs.iter().cloned())
    }

    /// Closure of `self` under conjugation by the elements of `parent`.
    pub fn normal_closure_in(&self, parent: &Subgroup) -> Result<Subgroup, GroupError> {
        self.same_group(parent)?;
        let mut s = Sifter::new(&self.group);
        s.close(self.igs.iter().cloned(), &parent.igs);
        Ok(Self { group: self.group.clone(), igs: s.into_canonical() })
    }

    pub fn is_normal(&self) -> bool {
        let s = Sifter::from_igs(&self.group, &self.igs);
        self.igs.iter().all(|t| {
            (0..self.group.n())
                .all(|i| s.sift(self.group.commutator(t, &self.group.generator(i))).is_identity())
        })
    }

    /// Whether `self` is normalised by every element of `parent`.
    pub fn is_normal_in(&self, parent: &Subgroup) -> bool {
        let s = Sifter::from_igs(&self.group, &self.igs);
        self.igs
            .iter()
            .all(|t| parent.igs.iter().all(|h| s.sift(self.group.commutator(t, h)).is_identity()))
    }

    /// Subgroup generated by both.
    pub fn join(&self, other: &Subgroup) -> Result<Subgroup, GroupError> {
        self.same_group(other)?;
        if self.contains_subgroup(other) {
            return Ok(self.clone());
        }
        if other.contains_subgroup(self) {
            return Ok(other.clone());
        }
        let mut s = Sifter::from_igs(&self.group, &self.igs);
        s.close(other.igs.iter().cloned(), &[]);
        Ok(Self { group: self.group.clone(), igs: s.into_canonical() })
    }

    /// `[X, Y]`: normal closure of the commutators of igs elements. Equals the
    /// commutator subgroup whenever both arguments are normal.
    pub fn commutator(&self, other: &Subgroup) -> Result<Subgroup, GroupError> {
        self.same_group(other)?;
        if self.is_trivial() || other.is_trivial() {
            return Ok(Self::trivial(&self.group));
        }
        let g = &self.group;
        let gens: Vec<Element> = self
            .igs
            .iter()
            .flat_map(|a| other.igs.iter().map(move |b| g.commutator(a, b)))
            .collect();
        Ok(Self::normal_closure_of(g, gens))
    }

    /// Subgroup generated by the p-th powers of the igs, normally closed.
    pub fn power_closure(&self) -> Subgroup {
        let p = self.group.p() as u64;
        Self::normal_closure_of(&self.group, self.igs.iter().map(|t| self.group.pow(t, p)))
    }

    /// Compact description, e.g. `<g1..g9, g11..g13>` when every igs element
    /// is a generator.
    pub fn describe(&self) -> String {
        if self.igs.is_empty() {
            return "<1>".into();
        }
        let pure: Option<Vec<usize>> = self
            .igs
            .iter()
            .map(|e| {
                let d = e.depth().unwrap();
                (e.0.iter().filter(|&&x| x != 0).count() == 1).then_some(d + 1)
            })
            .collect();
        let parts: Vec<String> = match pure {
            Some(idx) => {
                let mut runs: Vec<(usize, usize)> = Vec::new();
                for i in idx {
                    match runs.last_mut() {
                        Some((_, hi)) if *hi + 1 == i => *hi = i,
                        _ => runs.push((i, i)),
                    }
                }
                runs.into_iter()
                    .map(|(lo, hi)| match hi - lo {
                        0 => format!("g{lo}"),
                        1 => format!("g{lo}, g{hi}"),
                        _ => format!("g{lo}..g{hi}"),
                    })
                    .collect()
            }
            None => self.igs.iter().map(Element::to_string).collect(),
        };
        format!("<{}>", parts.join(", "))
    }
}
