//! Built-in groups: unitriangular matrix groups, Sylow p-subgroups of
//! symmetric groups, and the class-2 example group on 13 generators.
//!
//! The first two carry a concrete oracle (matrices, leaf permutations) used
//! to derive their presentations and to cross-check the collector.

use std::sync::Arc;

use super::{Element, GroupError, PcGroup, PcPresentation};
use crate::gfp::{is_prime, FpMatrix};

fn check_prime(p: u32) -> Result<(), GroupError> {
    if !is_prime(p as u64) {
        return Err(GroupError::NotPrime(p as u64));
    }
    Ok(())
}

/// Unitriangular `n x n` matrices over GF(p) with generators `I + E_{i,i+l}`
/// ordered by superdiagonal level `l`, then by row.
#[derive(Debug, Clone)]
pub struct UtOracle {
    n: usize,
    p: u64,
    // (row, col) of each generator
    positions: Vec<(usize, usize)>,
}

impl UtOracle {
    pub fn new(n: usize, p: u32) -> Self {
        let positions = (1..n)
            .flat_map(|l| (0..n - l).map(move |i| (i, i + l)))
            .collect();
        Self { n, p: p as u64, positions }
    }

    pub fn generator_count(&self) -> usize {
        self.positions.len()
    }

    /// Generator indices lying on superdiagonal `level` (1-based level).
    pub fn level_generators(&self, level: usize) -> Vec<usize> {
        self.positions
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| j - i == level)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn to_matrix(&self, x: &Element) -> FpMatrix {
        let mut m = FpMatrix::identity(self.p, self.n);
        for (k, &(i, j)) in self.positions.iter().enumerate() {
            let e = x.0[k] as u64;
            if e != 0 {
                let mut f = FpMatrix::identity(self.p, self.n);
                f.set(i, j, e);
                m = m.mul(&f).expect("square");
            }
        }
        m
    }

    pub fn from_matrix(&self, m: &FpMatrix) -> Element {
        let mut cur = m.clone();
        let mut exps = vec![0u32; self.positions.len()];
        for level in 1..self.n {
            let mut f = FpMatrix::identity(self.p, self.n);
            for (k, &(i, j)) in self.positions.iter().enumerate() {
                if j - i == level {
                    let e = cur.get(i, j);
                    exps[k] = e as u32;
                    let mut g = FpMatrix::identity(self.p, self.n);
                    g.set(i, j, e);
                    f = f.mul(&g).expect("square");
                }
            }
            cur = unitriangular_inverse(&f).mul(&cur).expect("square");
        }
        debug_assert_eq!(cur, FpMatrix::identity(self.p, self.n));
        Element(exps)
    }
}

/// `(I + N)^{-1} = I - N + N^2 - ...` for strictly upper triangular `N`.
fn unitriangular_inverse(m: &FpMatrix) -> FpMatrix {
    let n = m.rows();
    let p = m.p();
    let id = FpMatrix::identity(p, n);
    let nil = m.sub(&id).expect("square");
    let mut acc = id.clone();
    let mut term = id;
    for k in 1..n {
        term = term.mul(&nil).expect("square");
        acc = if k % 2 == 1 { acc.sub(&term) } else { acc.add(&term) }.expect("square");
    }
    acc
}

/// The group of upper unitriangular `n x n` matrices over GF(p).
pub fn ut_group(n: usize, p: u32) -> Result<Arc<PcGroup>, GroupError> {
    check_prime(p)?;
    if n < 2 {
        return Err(GroupError::BadParameters(format!("ut_group needs n >= 2, got {n}")));
    }
    let o = UtOracle::new(n, p);
    let gens = o.generator_count();
    let mut pres = PcPresentation::trivial(p, gens)?;
    let mats: Vec<FpMatrix> = (0..gens).map(|k| o.to_matrix(&Element::generator(gens, k))).collect();
    let invs: Vec<FpMatrix> = mats.iter().map(unitriangular_inverse).collect();
    for j in 0..gens {
        for i in 0..j {
            let c = invs[j]
                .mul(&invs[i])
                .and_then(|a| a.mul(&mats[j]))
                .and_then(|a| a.mul(&mats[i]))
                .expect("square");
            pres.set_commutator(j, i, o.from_matrix(&c))?;
        }
    }
    Ok(PcGroup::new(pres))
}

/// Iterated wreath product of `k` copies of `C_p` acting on the `p^k` leaves
/// of a p-ary tree, i.e. a Sylow p-subgroup of `Sym(p^k)`.
///
/// Elements are leaf permutations; group multiplication is composition
/// `(x*y)(a) = x(y(a))`. Generators at tree level `j` have portrait
/// `a_{j+1} += m(a_1..a_j)` for monomials `m`, ordered by level and then by
/// descending weight, so every prefix of the generating sequence spans a
/// normal subgroup.
#[derive(Debug, Clone)]
pub struct PortraitOracle {
    p: u32,
    k: usize,
    // (level, monomial exponents c_1..c_level)
    gens: Vec<(usize, Vec<u32>)>,
    // inverse evaluation matrices per level: coefficients = inv * values
    interp: Vec<FpMatrix>,
}

impl PortraitOracle {
    pub fn new(p: u32, k: usize) -> Self {
        let mut gens = Vec::new();
        let mut interp = Vec::new();
        for level in 0..k {
            let size = (p as usize).pow(level as u32);
            for w in (0..size).rev() {
                gens.push((level, digits(w, p, level)));
            }
            // rows: addresses; columns: monomials indexed by weight
            let mut ev = FpMatrix::zeros(p as u64, size, size);
            for addr in 0..size {
                let a = address_digits(addr, p, level);
                for w in 0..size {
                    ev.set(addr, w, monomial(&a, &digits(w, p, level), p) as u64);
                }
            }
            interp.push(invert(&ev));
        }
        Self { p, k, gens, interp }
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    pub fn leaves(&self) -> usize {
        (self.p as usize).pow(self.k as u32)
    }

    fn leaf_digits(&self, leaf: usize) -> Vec<u32> {
        address_digits(leaf, self.p, self.k)
    }

    fn leaf_from_digits(&self, a: &[u32]) -> usize {
        a.iter().fold(0usize, |acc, &d| acc * self.p as usize + d as usize)
    }

    fn generator_perm(&self, g: usize, power: u32) -> Vec<usize> {
        let (level, ref c) = self.gens[g];
        (0..self.leaves())
            .map(|leaf| {
                let mut a = self.leaf_digits(leaf);
                let shift = monomial(&a[..level], c, self.p) * power % self.p;
                a[level] = (a[level] + shift) % self.p;
                self.leaf_from_digits(&a)
            })
            .collect()
    }

    pub fn to_perm(&self, x: &Element) -> Vec<usize> {
        // g_1^{e_1} o ... o g_n^{e_n}: apply the last factor first
        let mut perm: Vec<usize> = (0..self.leaves()).collect();
        for (g, &e) in x.0.iter().enumerate().rev() {
            if e != 0 {
                let gp = self.generator_perm(g, e);
                perm = perm.iter().map(|&l| gp[l]).collect();
            }
        }
        perm
    }

    pub fn from_perm(&self, perm: &[usize]) -> Element {
        let p = self.p;
        let mut cur = perm.to_vec();
        let mut exps = vec![0u32; self.gens.len()];
        let mut g = 0;
        for level in 0..self.k {
            let size = (p as usize).pow(level as u32);
            // portrait at this level: shift of digit `level` for each prefix
            let values: Vec<u64> = (0..size)
                .map(|addr| {
                    let mut a = address_digits(addr, p, level);
                    a.resize(self.k, 0);
                    let leaf = self.leaf_from_digits(&a);
                    let img = self.leaf_digits(cur[leaf]);
                    ((img[level] + p - a[level]) % p) as u64
                })
                .collect();
            let coeffs = self.interp[level].mul_vec(&values);
            // generators at this level are listed by descending weight
            for w in (0..size).rev() {
                exps[g] = coeffs[w] as u32;
                g += 1;
            }
            // peel: cur <- P^{-1} o cur, P(a)_{level} = a_{level} + f(a_<level)
            cur = cur
                .iter()
                .map(|&leaf| {
                    let mut a = self.leaf_digits(leaf);
                    let addr = self.leaf_from_digits(&a[..level]);
                    let f = values[addr] as u32;
                    a[level] = (a[level] + p - f) % p;
                    self.leaf_from_digits(&a)
                })
                .collect();
        }
        Element(exps)
    }
}

fn digits(mut w: usize, p: u32, len: usize) -> Vec<u32> {
    // least significant digit belongs to a_1
    (0..len)
        .map(|_| {
            let d = (w % p as usize) as u32;
            w /= p as usize;
            d
        })
        .collect()
}

fn address_digits(mut addr: usize, p: u32, len: usize) -> Vec<u32> {
    // most significant digit is a_1
    let mut a = vec![0u32; len];
    for slot in a.iter_mut().rev() {
        *slot = (addr % p as usize) as u32;
        addr /= p as usize;
    }
    a
}

fn monomial(a: &[u32], c: &[u32], p: u32) -> u32 {
    a.iter().zip(c).fold(1u64, |acc, (&x, &e)| {
        acc * crate::gfp::pow_mod(x as u64, e as u64, p as u64) % p as u64
    }) as u32
}

fn invert(m: &FpMatrix) -> FpMatrix {
    let n = m.rows();
    let p = m.p();
    let mut aug = FpMatrix::zeros(p, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let (r, piv) = aug.rref();
    assert_eq!(piv, (0..n).collect::<Vec<_>>(), "evaluation matrix is invertible");
    let mut inv = FpMatrix::zeros(p, n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, r.get(i, n + j));
        }
    }
    inv
}

fn compose(x: &[usize], y: &[usize]) -> Vec<usize> {
    y.iter().map(|&l| x[l]).collect()
}

fn perm_inverse(x: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; x.len()];
    for (i, &xi) in x.iter().enumerate() {
        inv[xi] = i;
    }
    inv
}

/// Sylow p-subgroup of `Sym(p^k)` of order `p^((p^k - 1)/(p - 1))`.
pub fn sylow_symmetric(p: u32, k: usize) -> Result<Arc<PcGroup>, GroupError> {
    check_prime(p)?;
    if k == 0 {
        return Err(GroupError::BadParameters("sylow_symmetric needs k >= 1".into()));
    }
    Ok(PcGroup::new(wreath_presentation(p, k)?))
}

fn wreath_presentation(p: u32, k: usize) -> Result<PcPresentation, GroupError> {
    let o = PortraitOracle::new(p, k);
    let n = o.generator_count();
    let mut pres = PcPresentation::trivial(p, n)?;
    let perms: Vec<Vec<usize>> = (0..n).map(|g| o.to_perm(&Element::generator(n, g))).collect();
    let invs: Vec<Vec<usize>> = perms.iter().map(|x| perm_inverse(x)).collect();
    for j in 0..n {
        for i in 0..j {
            let c = compose(&compose(&compose(&invs[j], &invs[i]), &perms[j]), &perms[i]);
            pres.set_commutator(j, i, o.from_perm(&c))?;
        }
    }
    Ok(pres)
}

/// Sylow p-subgroup of `Sym(points)`: the direct product of iterated wreath
/// products over the base-p digits of `points`, largest factor first.
pub fn sylow_symmetric_points(p: u32, points: usize) -> Result<Arc<PcGroup>, GroupError> {
    check_prime(p)?;
    let mut factors = Vec::new();
    let mut m = points;
    let mut level = 0;
    while m > 0 {
        let d = m % p as usize;
        for _ in 0..d {
            if level > 0 {
                factors.push(level);
            }
        }
        m /= p as usize;
        level += 1;
    }
    factors.reverse();
    let pres: Vec<PcPresentation> =
        factors.iter().map(|&k| wreath_presentation(p, k)).collect::<Result<_, _>>()?;
    let n: usize = pres.iter().map(PcPresentation::n).sum();
    let mut out = PcPresentation::trivial(p, n)?;
    let mut off = 0;
    for f in &pres {
        let embed = |w: &Element| {
            let mut e = vec![0u32; n];
            e[off..off + f.n()].copy_from_slice(&w.0);
            Element(e)
        };
        for i in 0..f.n() {
            out.set_power(off + i, embed(f.power(i)))?;
            for j in i + 1..f.n() {
                out.set_commutator(off + j, off + i, embed(f.commutator_rel(j, i)))?;
            }
        }
        off += f.n();
    }
    Ok(PcGroup::new(out))
}

/// The 13-generator group of exponent `p` and class 2 with
/// `[g10,g6]=g11`, `[g10,g7]=g12` and
/// `[g2,g1]=[g4,g3]=[g6,g5]=[g8,g7]=[g10,g9]=g13`.
pub fn elgo_presentation(p: u32) -> Result<PcPresentation, GroupError> {
    check_prime(p)?;
    if p == 2 {
        return Err(GroupError::BadParameters("the exponent-p class-2 example needs odd p".into()));
    }
    let n = 13;
    let mut pres = PcPresentation::trivial(p, n)?;
    let rels: [(usize, usize, usize); 7] =
        [(10, 6, 11), (10, 7, 12), (2, 1, 13), (4, 3, 13), (6, 5, 13), (8, 7, 13), (10, 9, 13)];
    for (j, i, k) in rels {
        pres.set_commutator(j - 1, i - 1, Element::generator(n, k - 1))?;
    }
    Ok(pres)
}

pub fn elgo_group(p: u32) -> Result<Arc<PcGroup>, GroupError> {
    Ok(PcGroup::new(elgo_presentation(p)?))
}
