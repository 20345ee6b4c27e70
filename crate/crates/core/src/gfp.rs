//! Dense exact linear algebra over a prime field GF(p).
//!
//! Matrices are row-major with residues stored as `u64`; the modulus is
//! limited to primes below 2^32 so products of two residues never overflow.
//! Subspaces are always kept in reduced row-echelon form, which makes
//! equality a plain comparison of basis rows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("modulus {0} is not a prime below 2^32")]
    BadModulus(u64),
    #[error("entry buffer has {got} values, expected {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("acted-on subspace is not invariant under the algebra")]
    NotInvariant,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_modulus(p: u64) -> Result<()> {
    if p >= (1u64 << 32) || !is_prime(p) {
        return Err(LinalgError::BadModulus(p));
    }
    Ok(())
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl FpMatrix {
    pub fn new(p: u64, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        check_modulus(p)?;
        if entries.len() != rows * cols {
            return Err(LinalgError::BadShape { rows, cols, got: entries.len() });
        }
        let entries = entries.into_iter().map(|e| e % p).collect();
        Ok(Self { p, rows, cols, entries })
    }

    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        Self { p, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1 % p;
        }
        m
    }

    /// Matrix with a single 1 at `(i, j)`.
    pub fn unit(p: u64, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        m.entries[i * n + j] = 1;
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(p, rows.len(), cols, rows.concat())
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(LinalgError::ModulusMismatch(self.p, other.p));
        }
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            p: self.p,
            rows: self.rows,
            cols: other.cols,
            entries: mul_raw(&self.entries, &other.entries, self.rows, self.cols, other.cols, self.p),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b, p| (a + b) % p)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b, p| (a + p - b) % p)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64, u64) -> u64) -> Result<Self> {
        if self.p != other.p {
            return Err(LinalgError::ModulusMismatch(self.p, other.p));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::DimensionMismatch("elementwise shapes differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b, self.p))
            .collect();
        Ok(Self { entries, ..*self })
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        Self {
            entries: self.entries.iter().map(|&e| e * c % self.p).collect(),
            ..*self
        }
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut ech = Echelon::new(self.p, self.cols);
        for i in 0..self.rows {
            ech.insert(self.row(i).to_vec());
        }
        let pivots = ech.pivots.clone();
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for r in &ech.rows {
            entries.extend_from_slice(r);
        }
        entries.resize(self.rows * self.cols, 0);
        (Self { entries, ..*self }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Right nullspace `{ v : m * v^T = 0 }`.
    pub fn nullspace(&self) -> FpSubspace {
        let (r, pivots) = self.rref();
        let p = self.p;
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut vecs = Vec::new();
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; n];
            v[free] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                let a = r.get(ri, free);
                v[pc] = (p - a) % p;
            }
            vecs.push(v);
        }
        FpSubspace::span(p, n, vecs)
    }

    /// Flattened row-major entries as a vector of the `rows*cols` space.
    pub fn flatten(&self) -> Vec<u64> {
        self.entries.clone()
    }

    pub fn from_flat(p: u64, n: usize, v: &[u64]) -> Self {
        Self { p, rows: n, cols: n, entries: v.to_vec() }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = (*o + a * self.get(i, j)) % self.p;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * b) % self.p)
            })
            .collect()
    }

    /// Block-diagonal matrix assembled from square blocks.
    pub fn block_diag(p: u64, blocks: &[FpMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(p, n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.entries[(off + i) * n + off + j] = b.get(i, j);
                }
            }
            off += b.rows;
        }
        m
    }

    /// Square sub-block starting at `(off, off)` of size `k`.
    pub fn diag_block(&self, off: usize, k: usize) -> Self {
        let mut m = Self::zeros(self.p, k, k);
        for i in 0..k {
            for j in 0..k {
                m.entries[i * k + j] = self.get(off + i, off + j);
            }
        }
        m
    }
}

fn mul_raw(a: &[u64], b: &[u64], n: usize, k: usize, m: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * m];
    // Lazy reduction is safe while k*(p-1)^2 fits in a u64.
    let lazy = (p - 1)
        .checked_mul(p - 1)
        .and_then(|sq| sq.checked_mul(k as u64 + 1))
        .is_some();
    for i in 0..n {
        let row = &mut out[i * m..(i + 1) * m];
        for l in 0..k {
            let x = a[i * k + l];
            if x == 0 {
                continue;
            }
            let brow = &b[l * m..(l + 1) * m];
            if lazy {
                for (o, &y) in row.iter_mut().zip(brow) {
                    *o += x * y;
                }
            } else {
                for (o, &y) in row.iter_mut().zip(brow) {
                    *o = (*o + x * y) % p;
                }
            }
        }
        if lazy {
            for o in row.iter_mut() {
                *o %= p;
            }
        }
    }
    out
}

/// Incremental reduced row-echelon basis.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    p: u64,
    n: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub(crate) fn new(p: u64, n: usize) -> Self {
        Self { p, n, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Reduce `v` against the basis in place; returns true when the residue is zero.
    pub(crate) fn reduce(&self, v: &mut [u64]) -> bool {
        let p = self.p;
        for (r, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                let f = p - c;
                for (x, &y) in v.iter_mut().zip(r) {
                    if y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// Insert a vector; returns true when it enlarged the span.
    pub(crate) fn insert(&mut self, mut v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.n);
        let p = self.p;
        for x in v.iter_mut() {
            *x %= p;
        }
        if self.reduce(&mut v) {
            return false;
        }
        let pc = v.iter().position(|&x| x != 0).unwrap();
        let s = inv_mod(v[pc], p);
        for x in v.iter_mut() {
            *x = *x * s % p;
        }
        for r in self.rows.iter_mut() {
            let c = r[pc];
            if c != 0 {
                let f = p - c;
                for (x, &y) in r.iter_mut().zip(&v) {
                    if y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < pc);
        self.pivots.insert(pos, pc);
        self.rows.insert(pos, v);
        true
    }

    pub(crate) fn into_subspace(self) -> FpSubspace {
        FpSubspace { p: self.p, ambient_dim: self.n, basis: self.rows }
    }
}

/// Subspace of GF(p)^n with an RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpSubspace {
    p: u64,
    ambient_dim: usize,
    basis: Vec<Vec<u64>>,
}

impl FpSubspace {
    pub fn zero(p: u64, n: usize) -> Self {
        Self { p, ambient_dim: n, basis: Vec::new() }
    }

    pub fn full(p: u64, n: usize) -> Self {
        Self::span(p, n, (0..n).map(|i| unit_vec(n, i)))
    }

    pub fn span(p: u64, n: usize, vecs: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let mut e = Echelon::new(p, n);
        for v in vecs {
            e.insert(v);
        }
        e.into_subspace()
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).unwrap())
            .collect()
    }

    fn echelon(&self) -> Echelon {
        Echelon {
            p: self.p,
            n: self.ambient_dim,
            pivots: self.pivots(),
            rows: self.basis.clone(),
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w: Vec<u64> = v.iter().map(|&x| x % self.p).collect();
        self.echelon().reduce(&mut w)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut e = self.echelon();
        for b in &other.basis {
            e.insert(b.clone());
        }
        e.into_subspace()
    }

    /// Coordinates of `v` with respect to the RREF basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots().iter().map(|&c| v[c] % self.p).collect())
    }
}

pub fn unit_vec(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Coordinates relative to an arbitrary independent list of vectors.
#[derive(Debug, Clone)]
pub(crate) struct SpanCoords {
    p: u64,
    k: usize,
    ech: Echelon,
    // combos[i] expresses ech.rows[i] in terms of the original vectors
    combos: Vec<Vec<u64>>,
}

impl SpanCoords {
    pub(crate) fn new(p: u64, n: usize, vecs: &[Vec<u64>]) -> Self {
        let k = vecs.len();
        let mut aug = Echelon::new(p, n + k);
        for (i, v) in vecs.iter().enumerate() {
            let mut row = v.clone();
            row.extend(unit_vec(k, i));
            aug.insert(row);
        }
        let mut ech = Echelon::new(p, n);
        let mut combos = Vec::new();
        for (row, &pc) in aug.rows.iter().zip(&aug.pivots) {
            if pc < n {
                ech.rows.push(row[..n].to_vec());
                ech.pivots.push(pc);
                combos.push(row[n..].to_vec());
            }
        }
        Self { p, k, ech, combos }
    }

    pub(crate) fn coords(&self, v: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|&x| x % p).collect();
        let mut out = vec![0u64; self.k];
        for ((r, &pc), combo) in self.ech.rows.iter().zip(&self.ech.pivots).zip(&self.combos) {
            let c = w[pc];
            if c != 0 {
                for (x, &y) in w.iter_mut().zip(r) {
                    *x = (*x + (p - c) * y) % p;
                }
                for (o, &y) in out.iter_mut().zip(combo) {
                    *o = (*o + c * y) % p;
                }
            }
        }
        w.iter().all(|&x| x == 0).then_some(out)
    }
}

/// A GF(p)-algebra of `deg x deg` matrices, stored by a basis in RREF of the
/// flattened matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatAlgebra {
    p: u64,
    deg: usize,
    basis: Vec<FpMatrix>,
    unital: bool,
}

impl MatAlgebra {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn deg(&self) -> usize {
        self.deg
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[FpMatrix] {
        &self.basis
    }
    pub fn unital(&self) -> bool {
        self.unital
    }

    pub fn space(&self) -> FpSubspace {
        FpSubspace {
            p: self.p,
            ambient_dim: self.deg * self.deg,
            basis: self.basis.iter().map(FpMatrix::flatten).collect(),
        }
    }

    pub fn contains(&self, m: &FpMatrix) -> bool {
        self.space().contains(m.entries())
    }

    /// Every product of two basis elements lies in the span.
    pub fn is_closed(&self) -> bool {
        let space = self.space();
        self.basis.iter().all(|a| {
            self.basis
                .iter()
                .all(|b| space.contains(a.mul(b).expect("same degree").entries()))
        })
    }

    /// Wrap a list of matrices already known to span a product-closed space.
    pub fn from_closed_span(p: u64, deg: usize, mats: Vec<FpMatrix>, unital: bool) -> Self {
        let sp = FpSubspace::span(p, deg * deg, mats.into_iter().map(|m| m.entries));
        Self {
            p,
            deg,
            basis: sp.basis.iter().map(|v| FpMatrix::from_flat(p, deg, v)).collect(),
            unital,
        }
    }
}

/// Smallest product-closed span containing `gens` (and the identity when `unital`).
pub fn algebra_close(p: u64, deg: usize, gens: &[FpMatrix], unital: bool) -> Result<MatAlgebra> {
    check_modulus(p)?;
    for g in gens {
        if g.p != p {
            return Err(LinalgError::ModulusMismatch(g.p, p));
        }
        if g.rows != deg || g.cols != deg {
            return Err(LinalgError::DimensionMismatch(format!(
                "generator is {}x{}, expected {deg}x{deg}",
                g.rows, g.cols
            )));
        }
    }
    let mut ech = Echelon::new(p, deg * deg);
    let mut basis: Vec<FpMatrix> = Vec::new();
    let mut seeds: Vec<FpMatrix> = gens.to_vec();
    if unital {
        seeds.push(FpMatrix::identity(p, deg));
    }
    for g in seeds {
        if ech.insert(g.entries.clone()) {
            basis.push(g);
        }
    }
    // Words in the generators: right-multiply every new element by each generator.
    let mut next = 0;
    while next < basis.len() {
        let b = basis[next].clone();
        next += 1;
        for g in gens {
            let prod = b.mul(g)?;
            if ech.insert(prod.entries.clone()) {
                basis.push(prod);
            }
        }
    }
    let space = ech.into_subspace();
    Ok(MatAlgebra {
        p,
        deg,
        basis: space.basis.iter().map(|v| FpMatrix::from_flat(p, deg, v)).collect(),
        unital,
    })
}

/// Integer matrix product modulo `m` (entries already reduced).
fn mul_mod_int(a: &[u64], b: &[u64], n: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for l in 0..n {
            let x = a[i * n + l];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = (out[i * n + j] + x * b[l * n + j]) % m;
            }
        }
    }
    out
}

/// `(Tr(z^(p^i)) mod p^(i+1)) / p^i` for the integer lift of `z`.
fn trace_functional(z: &FpMatrix, p: u64, i: u32) -> u64 {
    let n = z.rows;
    let pi = p.pow(i);
    let m = pi * p;
    let mut base = z.entries.clone();
    let mut acc = FpMatrix::identity(m.max(2), n).entries;
    let mut e = pi;
    let mut first = true;
    while e > 0 {
        if e & 1 == 1 {
            acc = if first { base.clone() } else { mul_mod_int(&acc, &base, n, m) };
            first = false;
        }
        e >>= 1;
        if e > 0 {
            base = mul_mod_int(&base, &base, n, m);
        }
    }
    let tr = (0..n).fold(0u64, |t, k| (t + acc[k * n + k]) % m);
    debug_assert_eq!(tr % pi, 0, "trace functional not divisible by p^i");
    (tr / pi) % p
}

/// Jacobson radical of a matrix algebra over GF(p), as a subspace of the
/// flattened `deg^2` space.
///
/// Iterated kernels of the p-power trace functionals: `I_{-1} = A` and
/// `I_i = { x in I_{i-1} : g_i(x y) = 0 for all y in A + GF(p)1 }` for
/// `p^i <= deg`; the last term is the radical.
pub fn jacobson_radical(a: &MatAlgebra) -> FpSubspace {
    let p = a.p;
    let n = a.deg;
    let mut ideal: Vec<FpMatrix> = a.basis.clone();
    let mut ys = a.basis.clone();
    ys.push(FpMatrix::identity(p, n));
    let mut i = 0u32;
    while !ideal.is_empty() && p.pow(i) <= n as u64 {
        let vals: Vec<Vec<u64>> = ideal
            .iter()
            .map(|x| {
                ys.iter()
                    .map(|y| trace_functional(&x.mul(y).expect("same degree"), p, i))
                    .collect()
            })
            .collect();
        // left kernel: coefficient vectors c with sum_b c_b vals[b][*] = 0
        let m = FpMatrix::from_rows(p, &vals).expect("rectangular");
        let ker = m.transpose().nullspace();
        ideal = ker
            .basis
            .iter()
            .map(|c| {
                let mut acc = FpMatrix::zeros(p, n, n);
                for (coef, x) in c.iter().zip(&ideal) {
                    if *coef != 0 {
                        acc = acc.add(&x.scale(*coef)).expect("same shape");
                    }
                }
                acc
            })
            .collect();
        i += 1;
    }
    FpSubspace::span(p, n * n, ideal.into_iter().map(|m| m.entries))
}

fn subspace_mats(s: &FpSubspace, deg: usize) -> Vec<FpMatrix> {
    s.basis.iter().map(|v| FpMatrix::from_flat(s.p, deg, v)).collect()
}

/// Span of all products `x * y` with `x` in `xs`, `y` in `ys` (flattened matrix spaces).
pub fn subspace_product(xs: &FpSubspace, ys: &FpSubspace, deg: usize) -> FpSubspace {
    let ym = subspace_mats(ys, deg);
    let prods = subspace_mats(xs, deg).into_iter().flat_map(|x| {
        ym.iter()
            .map(move |y| x.mul(y).expect("same degree").entries)
            .collect::<Vec<_>>()
    });
    FpSubspace::span(xs.p, deg * deg, prods)
}

/// Dimensions of `J, J^2, ...` down to the first zero power (excluded).
/// `None` if no power vanishes within `dim J + 1` steps.
pub fn radical_power_dims(j: &FpSubspace, deg: usize) -> Option<Vec<usize>> {
    let mut dims = Vec::new();
    let mut cur = j.clone();
    for _ in 0..=j.dim() + 1 {
        if cur.is_zero() {
            return Some(dims);
        }
        dims.push(cur.dim());
        cur = subspace_product(&cur, j, deg);
    }
    None
}

/// Whether `j` is a two-sided ideal of `a`.
pub fn is_two_sided_ideal(a: &MatAlgebra, j: &FpSubspace) -> bool {
    let deg = a.deg;
    let js = subspace_mats(j, deg);
    js.iter().all(|x| {
        a.basis.iter().all(|y| {
            j.contains(x.mul(y).unwrap().entries()) && j.contains(y.mul(x).unwrap().entries())
        })
    })
}

/// Left regular representation of the unital hull of `a / j`.
///
/// Faithful, so its radical is zero exactly when `a / j` is semisimple.
pub fn quotient_regular_rep(a: &MatAlgebra, j: &FpSubspace) -> MatAlgebra {
    let p = a.p;
    let deg = a.deg;
    let nn = deg * deg;
    let mut jech = Echelon::new(p, nn);
    for b in &j.basis {
        jech.insert(b.clone());
    }
    let mut reps: Vec<FpMatrix> = Vec::new();
    let mut probe = jech.clone();
    for b in &a.basis {
        if probe.insert(b.entries.clone()) {
            reps.push(b.clone());
        }
    }
    let m = reps.len();
    let mut all: Vec<Vec<u64>> = j.basis.clone();
    all.extend(reps.iter().map(|r| r.entries.clone()));
    let coords = SpanCoords::new(p, nn, &all);
    let jd = j.dim();
    let qcoords = |x: &FpMatrix| -> Vec<u64> {
        let c = coords.coords(x.entries()).expect("product stays in the algebra");
        c[jd..].to_vec()
    };
    // basis of the hull: index 0 is the adjoined identity, 1..=m the reps
    let size = m + 1;
    let mut gens = Vec::with_capacity(m);
    for x in &reps {
        let mut mat = FpMatrix::zeros(p, size, size);
        // x * 1 = x
        for (r, c) in qcoords(x).into_iter().enumerate() {
            mat.set(r + 1, 0, c);
        }
        for (col, y) in reps.iter().enumerate() {
            let prod = x.mul(y).expect("same degree");
            for (r, c) in qcoords(&prod).into_iter().enumerate() {
                mat.set(r + 1, col + 1, c);
            }
        }
        gens.push(mat);
    }
    algebra_close(p, size, &gens, true).expect("consistent generators")
}

/// Descending chain `act ⊇ act·J ⊇ act·J² ⊇ … ⊇ 0` for the right action of
/// matrices on row vectors. The final zero space is included unless `act`
/// itself is zero.
pub fn ideal_power_flag(a: &MatAlgebra, j: &FpSubspace, act: &FpSubspace) -> Result<Vec<FpSubspace>> {
    if act.ambient_dim != a.deg {
        return Err(LinalgError::DimensionMismatch(format!(
            "acted space has ambient {}, algebra degree {}",
            act.ambient_dim, a.deg
        )));
    }
    for b in &a.basis {
        if !act.basis.iter().all(|w| act.contains(&b.vec_mul(w))) {
            return Err(LinalgError::NotInvariant);
        }
    }
    let js = subspace_mats(j, a.deg);
    let mut chain = vec![act.clone()];
    if js.is_empty() {
        return Ok(chain);
    }
    loop {
        let cur = chain.last().unwrap();
        if cur.is_zero() {
            break;
        }
        let next = FpSubspace::span(
            a.p,
            a.deg,
            cur.basis.iter().flat_map(|w| js.iter().map(move |x| x.vec_mul(w))),
        );
        if next.dim() == cur.dim() {
            // J nilpotent forces strict descent; a non-radical input stalls here
            break;
        }
        chain.push(next);
    }
    Ok(chain)
}
