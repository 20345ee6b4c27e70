//! Graded Lie ring of a full filter: layers `phi_s / boundary_s` as
//! GF(p)-spaces and graded brackets as structure-constant tensors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{Filter, MonoidIndex, Sign};
use crate::pcgroup::{Element, PcGroup, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("filter is not full; fill it first")]
    NotFull,
    #[error("layer at {index} is not elementary abelian: {witness}")]
    NotElementaryAbelian { index: MonoidIndex, witness: String },
    #[error("no layer at {0}")]
    NoLayer(MonoidIndex),
    #[error("element {0} does not lie in the layer's term")]
    NotInTerm(String),
    #[error("coordinate vector has length {got}, layer has dimension {dim}")]
    BadCoordinates { got: usize, dim: usize },
}

/// `L_s = phi_s / boundary_s` with chosen lifts of a basis.
#[derive(Debug, Clone)]
pub struct GradedLayer {
    index: MonoidIndex,
    top: Subgroup,
    bottom: Subgroup,
    lifts: Vec<Element>,
    /// igs of `top` built from the igs of `bottom` and the lifts, by depth
    seq: Vec<Element>,
    lift_pos: Vec<usize>,
}

impl GradedLayer {
    fn new(index: MonoidIndex, top: Subgroup, bottom: Subgroup) -> Result<Self, LieError> {
        let g = top.group().clone();
        let bottom_depths = bottom.depths();
        let mut seq = Vec::with_capacity(top.igs().len());
        let mut lifts = Vec::new();
        let mut lift_pos = Vec::new();
        for t in top.igs() {
            let d = t.depth().expect("igs elements are nontrivial");
            match bottom_depths.iter().position(|&x| x == d) {
                Some(k) => seq.push(bottom.igs()[k].clone()),
                None => {
                    lift_pos.push(seq.len());
                    lifts.push(t.clone());
                    seq.push(t.clone());
                }
            }
        }
        let p = g.p() as u64;
        for (i, a) in lifts.iter().enumerate() {
            let pw = g.pow(a, p);
            if !bottom.contains(&pw) {
                return Err(LieError::NotElementaryAbelian { index, witness: format!("({a})^{p} = {pw}") });
            }
            for b in &lifts[i + 1..] {
                let c = g.commutator(a, b);
                if !bottom.contains(&c) {
                    return Err(LieError::NotElementaryAbelian { index, witness: format!("[{a}, {b}] = {c}") });
                }
            }
        }
        Ok(Self { index, top, bottom, lifts, seq, lift_pos })
    }

    pub fn index(&self) -> &MonoidIndex {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.lifts.len()
    }

    /// `phi_s`.
    pub fn top(&self) -> &Subgroup {
        &self.top
    }

    /// `boundary_s`.
    pub fn bottom(&self) -> &Subgroup {
        &self.bottom
    }

    pub fn basis_lifts(&self) -> &[Element] {
        &self.lifts
    }

    fn group(&self) -> &PcGroup {
        self.top.group()
    }

    /// Coordinates of `x H^+` in the basis given by the lifts.
    pub fn project(&self, x: &Element) -> Result<Vec<u32>, LieError> {
        let g = self.group();
        let mut x = x.clone();
        let mut out = vec![0u32; self.dim()];
        let mut slot = 0;
        for (pos, s) in self.seq.iter().enumerate() {
            let d = s.depth().unwrap();
            if x.0[..d].iter().any(|&e| e != 0) {
                return Err(LieError::NotInTerm(x.to_string()));
            }
            let e = x.0[d];
            if slot < self.lift_pos.len() && self.lift_pos[slot] == pos {
                out[slot] = e;
                slot += 1;
            }
            if e != 0 {
                x = g.mul(&g.pow(&g.inv(s), e as u64), &x);
            }
        }
        if !x.is_identity() {
            return Err(LieError::NotInTerm(x.to_string()));
        }
        Ok(out)
    }

    /// `prod lift_i^{c_i}`.
    pub fn lift(&self, coords: &[u32]) -> Result<Element, LieError> {
        if coords.len() != self.dim() {
            return Err(LieError::BadCoordinates { got: coords.len(), dim: self.dim() });
        }
        let g = self.group();
        Ok(self
            .lifts
            .iter()
            .zip(coords)
            .fold(g.identity(), |acc, (t, &c)| g.mul(&acc, &g.pow(t, c as u64))))
    }

    /// Preimage in `phi_s` of a subspace of `L_s` given by coordinate
    /// vectors: `<boundary_s, lifts of the vectors>`.
    pub fn pullback(&self, vectors: &[Vec<u64>]) -> Subgroup {
        let g = self.top.group();
        let mut gens: Vec<Element> = self.bottom.igs().to_vec();
        for v in vectors {
            let c: Vec<u32> = v.iter().map(|&x| x as u32).collect();
            gens.push(self.lift(&c).expect("dimension checked by caller"));
        }
        Subgroup::generated(g, gens)
    }
}

/// Biadditive map `U x V -> W` over GF(p) by structure constants
/// `e_i o f_j = sum_k c_ijk h_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearMap {
    p: u64,
    dims: [usize; 3],
    c: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub p: u64,
    pub dims: [usize; 3],
    /// Nonzero constants as `[i, j, k, c]`.
    pub entries: Vec<[u64; 4]>,
}

impl BilinearMap {
    pub fn zero(p: u64, a: usize, b: usize, c: usize) -> Self {
        Self { p, dims: [a, b, c], c: vec![0; a * b * c] }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        let [_, b, c] = self.dims;
        self.c[(i * b + j) * c + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: u64) {
        let [_, b, c] = self.dims;
        self.c[(i * b + j) * c + k] = v % self.p;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// `u o v` for coordinate vectors.
    pub fn apply(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let [a, b, c] = self.dims;
        let mut w = vec![0u64; c];
        for i in 0..a {
            if u[i] == 0 {
                continue;
            }
            for j in 0..b {
                let uv = u[i] * v[j] % self.p;
                if uv == 0 {
                    continue;
                }
                for (k, wk) in w.iter_mut().enumerate() {
                    *wk = (*wk + uv * self.get(i, j, k)) % self.p;
                }
            }
        }
        w
    }

    pub fn is_alternating(&self) -> bool {
        let [a, b, c] = self.dims;
        a == b
            && (0..a).all(|i| {
                (0..c).all(|k| self.get(i, i, k) == 0)
                    && (0..a).all(|j| (0..c).all(|k| (self.get(i, j, k) + self.get(j, i, k)) % self.p == 0))
            })
    }

    pub fn to_json(&self) -> TensorJson {
        let [a, b, c] = self.dims;
        let mut entries = Vec::new();
        for i in 0..a {
            for j in 0..b {
                for k in 0..c {
                    let v = self.get(i, j, k);
                    if v != 0 {
                        entries.push([i as u64, j as u64, k as u64, v]);
                    }
                }
            }
        }
        TensorJson { p: self.p, dims: self.dims, entries }
    }

    pub fn from_json(j: &TensorJson) -> Self {
        let [a, b, c] = j.dims;
        let mut m = Self::zero(j.p, a, b, c);
        for &[i, jj, k, v] in &j.entries {
            m.set(i as usize, jj as usize, k as usize, v);
        }
        m
    }
}

/// Layers of a full filter, one per stored nonzero index.
#[derive(Debug, Clone)]
pub struct LieRing {
    layers: Vec<GradedLayer>,
}

impl LieRing {
    pub fn new(f: &Filter) -> Result<Self, LieError> {
        if f.sign() != Sign::Max {
            return Err(LieError::NotFull);
        }
        let entries = f.entries();
        let trivial = Subgroup::trivial(f.group());
        let mut layers = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            if e.index.is_zero() {
                // L is graded by the nonzero indices only
                continue;
            }
            let bottom = entries.get(i + 1).map_or_else(|| trivial.clone(), |n| n.subgroup.clone());
            layers.push(GradedLayer::new(e.index.clone(), e.subgroup.clone(), bottom)?);
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[GradedLayer] {
        &self.layers
    }

    pub fn layer(&self, s: &MonoidIndex) -> Option<&GradedLayer> {
        self.layers.iter().find(|l| l.index == *s)
    }

    /// `[,] : L_s x L_t -> L_{s+t}`. When no layer sits at `s+t` the target
    /// is zero and so is the map.
    pub fn bracket(&self, s: &MonoidIndex, t: &MonoidIndex) -> Result<BilinearMap, LieError> {
        let ls = self.layer(s).ok_or_else(|| LieError::NoLayer(s.clone()))?;
        let lt = self.layer(t).ok_or_else(|| LieError::NoLayer(t.clone()))?;
        let p = ls.group().p() as u64;
        let target = self.layer(&s.add(t));
        let c = target.map_or(0, GradedLayer::dim);
        let mut m = BilinearMap::zero(p, ls.dim(), lt.dim(), c);
        let Some(target) = target else { return Ok(m) };
        let g = ls.group();
        for (i, x) in ls.lifts.iter().enumerate() {
            for (j, y) in lt.lifts.iter().enumerate() {
                let w = target.project(&g.commutator(x, y))?;
                for (k, &v) in w.iter().enumerate() {
                    m.set(i, j, k, v as u64);
                }
            }
        }
        Ok(m)
    }

    /// Pairs of layer indices whose bracket is nonzero, in lexicographic
    /// order of `(s, t)` with `s <= t`.
    pub fn nontrivial_brackets(&self) -> Result<Vec<(MonoidIndex, MonoidIndex, BilinearMap)>, LieError> {
        let mut out = Vec::new();
        for (i, a) in self.layers.iter().enumerate() {
            for b in &self.layers[i..] {
                let m = self.bracket(&a.index, &b.index)?;
                if !m.is_zero() {
                    out.push((a.index.clone(), b.index.clone(), m));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::Filter;
    use crate::pcgroup::{elgo_group, sylow_symmetric, ut_group, PcGroup, PcPresentation};
    use crate::sampling::random_element_of;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn idx(c: &[u32]) -> MonoidIndex {
        MonoidIndex::new(c.to_vec())
    }

    #[test]
    fn ut5_layer_dims() {
        let g = ut_group(5, 3).unwrap();
        let l = LieRing::new(&Filter::lower_central(&g)).unwrap();
        let dims: Vec<usize> = l.layers().iter().map(GradedLayer::dim).collect();
        assert_eq!(dims, vec![4, 3, 2, 1]);
    }

    #[test]
    fn elementary_abelian_single_layer() {
        let g = PcGroup::new(PcPresentation::trivial(5, 4).unwrap());
        let l = LieRing::new(&Filter::lower_central(&g)).unwrap();
        assert_eq!(l.layers().len(), 1);
        assert_eq!(l.layers()[0].dim(), 4);
        assert!(l.nontrivial_brackets().unwrap().is_empty());
    }

    #[test]
    fn elgo_layers_and_bracket() {
        let g = elgo_group(3).unwrap();
        let l = LieRing::new(&Filter::lower_central(&g)).unwrap();
        let dims: Vec<usize> = l.layers().iter().map(GradedLayer::dim).collect();
        assert_eq!(dims, vec![10, 3]);
        let b = l.bracket(&idx(&[1]), &idx(&[1])).unwrap();
        assert_eq!(b.dims(), [10, 10, 3]);
        assert!(b.is_alternating() && !b.is_zero());
        assert!(l.bracket(&idx(&[2]), &idx(&[2])).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_form() {
        let g = ut_group(3, 3).unwrap();
        let l = LieRing::new(&Filter::lower_central(&g)).unwrap();
        let b = l.bracket(&idx(&[1]), &idx(&[1])).unwrap();
        assert_eq!(b.dims(), [2, 2, 1]);
        // [I + E12, I + E23] = I + E13
        assert_eq!(b.get(0, 1, 0), 1);
        assert_eq!(b.get(1, 0, 0), 2);
        assert_eq!(b.get(0, 0, 0), 0);
    }

    #[test]
    fn lcs_with_exponent_p_squared_layer_is_rejected() {
        // cyclic of order 4: the lcs has the single layer Z/4
        let mut pres = PcPresentation::trivial(2, 2).unwrap();
        pres.set_power(0, crate::pcgroup::Element(vec![0, 1])).unwrap();
        let g = PcGroup::new(pres);
        let err = LieRing::new(&Filter::lower_central(&g)).unwrap_err();
        assert!(matches!(err, LieError::NotElementaryAbelian { .. }));
        assert!(LieRing::new(&Filter::exponent_p_central(&g)).is_ok());
    }

    #[test]
    fn project_lift_and_homomorphism() {
        let g = sylow_symmetric(2, 4).unwrap();
        let f = Filter::exponent_p_central(&g);
        let l = LieRing::new(&f).unwrap();
        let total: usize = l.layers().iter().map(GradedLayer::dim).sum();
        assert_eq!(total, g.n());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for layer in l.layers() {
            for _ in 0..20 {
                let x = random_element_of(layer.top(), &mut rng);
                let y = random_element_of(layer.top(), &mut rng);
                let px = layer.project(&x).unwrap();
                let py = layer.project(&y).unwrap();
                let pxy = layer.project(&g.mul(&x, &y)).unwrap();
                let sum: Vec<u32> = px.iter().zip(&py).map(|(a, b)| (a + b) % 2).collect();
                assert_eq!(pxy, sum);
                assert_eq!(layer.project(&layer.lift(&px).unwrap()).unwrap(), px);
            }
        }
    }

    #[test]
    fn bracket_independent_of_lift_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for g in [ut_group(5, 3).unwrap(), elgo_group(5).unwrap(), sylow_symmetric(2, 4).unwrap()] {
            let f = Filter::exponent_p_central(&g);
            let l = LieRing::new(&f).unwrap();
            for (s, t, m) in l.nontrivial_brackets().unwrap() {
                let (ls, lt) = (l.layer(&s).unwrap(), l.layer(&t).unwrap());
                let target = l.layer(&s.add(&t)).unwrap();
                for (i, x) in ls.basis_lifts().iter().enumerate() {
                    for (j, y) in lt.basis_lifts().iter().enumerate() {
                        // shift both lifts by boundary elements
                        let x2 = g.mul(x, &random_element_of(ls.bottom(), &mut rng));
                        let y2 = g.mul(&random_element_of(lt.bottom(), &mut rng), y);
                        let w = target.project(&g.commutator(&x2, &y2)).unwrap();
                        for (k, &v) in w.iter().enumerate() {
                            assert_eq!(v as u64, m.get(i, j, k));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_json_roundtrip() {
        let g = elgo_group(3).unwrap();
        let l = LieRing::new(&Filter::lower_central(&g)).unwrap();
        let b = l.bracket(&idx(&[1]), &idx(&[1])).unwrap();
        let j = b.to_json();
        assert_eq!(j.entries.len(), 2 * 7);
        assert_eq!(BilinearMap::from_json(&j), b);
    }
}
