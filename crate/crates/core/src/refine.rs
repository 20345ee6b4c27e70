//! Refinement of full filters by Jacobson radicals of the adjoint, centroid,
//! derivation and scalar rings of graded brackets.
//!
//! Every ring is stored as block-diagonal matrices acting on row vectors,
//! with structure constants `e_i o f_j = sum_k c_ijk h_k`:
//!
//! * adjoint `diag(F, G)`: `(uF) o v = u o (Gv)`, `G` acting on columns;
//! * centroid `diag(F, G, H)`: `(uF) o v = u o (vG) = (u o v)H`;
//! * derivation `diag(F, G, H)`: `(uF) o v + u o (vG) = (u o v)H`;
//! * left scalar `diag(F, H)`: `(uF) o v = (u o v)H`, the transposes of the
//!   column operators, so products compose in the usual order;
//! * right scalar `diag(F, H)`: `u o (vF) = (u o v)H`.
//!
//! The first block acts on the layer that gets refined: `L_s` for all rings
//! except the right scalar ring, which acts on `L_t`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{generate, insert_subgroups, verify_filter, Filter, FilterError, MonoidIndex, Origin, Sign};
use crate::gfp::{algebra_close, ideal_power_flag, jacobson_radical, FpMatrix, FpSubspace, LinalgError, MatAlgebra};
use crate::liering::{BilinearMap, LieError, LieRing};
use crate::pcgroup::Subgroup;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("refined filter fails the axioms: {0}")]
    Axioms(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingChoice {
    Adjoint,
    Centroid,
    Derivation,
    LeftScalar,
    RightScalar,
}

impl RingChoice {
    pub const ALL: [RingChoice; 5] = [
        RingChoice::Adjoint,
        RingChoice::Derivation,
        RingChoice::Centroid,
        RingChoice::LeftScalar,
        RingChoice::RightScalar,
    ];
}

impl fmt::Display for RingChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingChoice::Adjoint => "adjoint",
            RingChoice::Centroid => "centroid",
            RingChoice::Derivation => "derivation",
            RingChoice::LeftScalar => "left-scalar",
            RingChoice::RightScalar => "right-scalar",
        })
    }
}

/// Solution space of a ring's defining equations, before closure.
#[derive(Debug, Clone)]
pub struct RingSpace {
    pub which: RingChoice,
    /// Sizes of the diagonal blocks; the first block acts on the refined layer.
    pub blocks: Vec<usize>,
    pub basis: Vec<FpMatrix>,
}

impl RingSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// The associative algebra whose radical is used: the solution space
    /// itself, or for derivations its unital enveloping algebra.
    pub fn algebra(&self, p: u64) -> Result<MatAlgebra, LinalgError> {
        match self.which {
            RingChoice::Derivation => algebra_close(p, self.degree(), &self.basis, true),
            _ => Ok(MatAlgebra::from_closed_span(p, self.degree(), self.basis.clone(), true)),
        }
    }
}

/// Dense homogeneous linear system in the entries of square diagonal blocks.
struct System {
    p: u64,
    offsets: Vec<usize>,
    blocks: Vec<usize>,
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl System {
    fn new(p: u64, blocks: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut n = 0;
        for &b in blocks {
            offsets.push(n);
            n += b * b;
        }
        Self { p, offsets, blocks: blocks.to_vec(), n, rows: Vec::new() }
    }

    fn var(&self, block: usize, r: usize, c: usize) -> usize {
        self.offsets[block] + r * self.blocks[block] + c
    }

    /// Add `coef * X_block[r][c]` to an equation row.
    fn add(&self, row: &mut [u64], block: usize, r: usize, c: usize, coef: u64, negate: bool) {
        if coef == 0 {
            return;
        }
        let v = self.var(block, r, c);
        let coef = if negate { (self.p - coef) % self.p } else { coef };
        row[v] = (row[v] + coef) % self.p;
    }

    fn push(&mut self, row: Vec<u64>) {
        if row.iter().any(|&x| x != 0) {
            self.rows.push(row);
        }
    }

    fn solve(self) -> Vec<FpMatrix> {
        let p = self.p;
        let kernel = if self.rows.is_empty() {
            FpSubspace::full(p, self.n)
        } else {
            FpMatrix::from_rows(p, &self.rows).expect("rectangular").nullspace()
        };
        kernel
            .basis()
            .iter()
            .map(|x| {
                let mats: Vec<FpMatrix> = self
                    .blocks
                    .iter()
                    .zip(&self.offsets)
                    .map(|(&b, &off)| FpMatrix::new(p, b, b, x[off..off + b * b].to_vec()).expect("shape"))
                    .collect();
                FpMatrix::block_diag(p, &mats)
            })
            .collect()
    }
}

/// Solve the defining equations of `which` for the bracket `b`.
pub fn compute_ring(b: &BilinearMap, which: RingChoice) -> RingSpace {
    let p = b.p();
    let [na, nb, nc] = b.dims();
    let blocks = match which {
        RingChoice::Adjoint => vec![na, nb],
        RingChoice::Centroid | RingChoice::Derivation => vec![na, nb, nc],
        RingChoice::LeftScalar => vec![na, nc],
        RingChoice::RightScalar => vec![nb, nc],
    };
    let mut sys = System::new(p, &blocks);
    for i in 0..na {
        for j in 0..nb {
            for k in 0..nc {
                let mut row = vec![0u64; sys.n];
                match which {
                    RingChoice::Adjoint => {
                        for l in 0..na {
                            sys.add(&mut row, 0, i, l, b.get(l, j, k), false);
                        }
                        for l in 0..nb {
                            sys.add(&mut row, 1, l, j, b.get(i, l, k), true);
                        }
                    }
                    RingChoice::Centroid => {
                        let mut row2 = vec![0u64; sys.n];
                        for l in 0..na {
                            sys.add(&mut row, 0, i, l, b.get(l, j, k), false);
                        }
                        for l in 0..nb {
                            sys.add(&mut row, 1, j, l, b.get(i, l, k), true);
                            sys.add(&mut row2, 1, j, l, b.get(i, l, k), false);
                        }
                        for l in 0..nc {
                            sys.add(&mut row2, 2, l, k, b.get(i, j, l), true);
                        }
                        sys.push(row2);
                    }
                    RingChoice::Derivation => {
                        for l in 0..na {
                            sys.add(&mut row, 0, i, l, b.get(l, j, k), false);
                        }
                        for l in 0..nb {
                            sys.add(&mut row, 1, j, l, b.get(i, l, k), false);
                        }
                        for l in 0..nc {
                            sys.add(&mut row, 2, l, k, b.get(i, j, l), true);
                        }
                    }
                    RingChoice::LeftScalar => {
                        for l in 0..na {
                            sys.add(&mut row, 0, i, l, b.get(l, j, k), false);
                        }
                        for l in 0..nc {
                            sys.add(&mut row, 1, l, k, b.get(i, j, l), true);
                        }
                    }
                    RingChoice::RightScalar => {
                        for l in 0..nb {
                            sys.add(&mut row, 0, j, l, b.get(i, l, k), false);
                        }
                        for l in 0..nc {
                            sys.add(&mut row, 1, l, k, b.get(i, j, l), true);
                        }
                    }
                }
                sys.push(row);
            }
        }
    }
    RingSpace { which, blocks, basis: sys.solve() }
}

/// Radical of a ring and the chain it cuts out of the acted-on layer.
#[derive(Debug, Clone)]
pub struct RadicalChain {
    pub which: RingChoice,
    pub ring_dim: usize,
    pub algebra_dim: usize,
    pub radical_dim: usize,
    /// `dim J^i` for `i = 1, 2, ...` until zero.
    pub radical_power_dims: Vec<usize>,
    /// Layer the chain lives in.
    pub layer: MonoidIndex,
    /// `dim W J^i` for `i = 0, 1, ...`, ending with 0.
    pub chain_dims: Vec<usize>,
    /// Pullbacks of the proper nonzero chain terms, strictly descending.
    pub subgroups: Vec<Subgroup>,
}

/// Compute the ring of the bracket `L_s x L_t -> L_{s+t}`, its radical and
/// the pulled-back chain `phi_s > pullback(L J) > pullback(L J^2) > ...`.
pub fn radical_refinement(
    lie: &LieRing,
    s: &MonoidIndex,
    t: &MonoidIndex,
    which: RingChoice,
) -> Result<RadicalChain, RefineError> {
    let b = lie.bracket(s, t)?;
    radical_refinement_of(lie, &b, s, t, which)
}

fn radical_refinement_of(
    lie: &LieRing,
    b: &BilinearMap,
    s: &MonoidIndex,
    t: &MonoidIndex,
    which: RingChoice,
) -> Result<RadicalChain, RefineError> {
    let p = b.p();
    let ring = compute_ring(b, which);
    let alg = ring.algebra(p)?;
    let j = jacobson_radical(&alg);
    let power_dims = crate::gfp::radical_power_dims(&j, alg.deg()).unwrap_or_default();
    let layer_idx = if which == RingChoice::RightScalar { t } else { s };
    let layer = lie.layer(layer_idx).ok_or_else(|| LieError::NoLayer(layer_idx.clone()))?;
    let k = ring.blocks[0];
    let deg = ring.degree();
    let act = FpSubspace::span(p, deg, (0..k).map(|i| crate::gfp::unit_vec(deg, i)));
    let flag = ideal_power_flag(&alg, &j, &act)?;
    let chain_dims: Vec<usize> = flag.iter().map(FpSubspace::dim).collect();
    let mut subgroups = Vec::new();
    for w in flag.iter().skip(1) {
        if w.is_zero() || w.dim() == k {
            continue;
        }
        let vecs: Vec<Vec<u64>> = w.basis().iter().map(|v| v[..k].to_vec()).collect();
        subgroups.push(layer.pullback(&vecs));
    }
    Ok(RadicalChain {
        which,
        ring_dim: ring.dim(),
        algebra_dim: alg.dim(),
        radical_dim: j.dim(),
        radical_power_dims: power_dims,
        layer: layer_idx.clone(),
        chain_dims,
        subgroups,
    })
}

/// How `refine_once` picks the bracket and ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Brackets in lexicographic order; per bracket adjoint, derivation,
    /// centroid, left scalar, right scalar.
    First,
    /// As `First` but each bracket tries adjoint and derivation in random
    /// order, then the other three in random order.
    Random,
    Adjoint,
    Derivation,
    /// Ring-major: every bracket with the adjoint ring, then every bracket
    /// with the derivation ring, and so on.
    Sweep,
}

impl FromStr for Policy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "first" => Policy::First,
            "random" => Policy::Random,
            "adjoint" => Policy::Adjoint,
            "derivation" => Policy::Derivation,
            "sweep" => Policy::Sweep,
            _ => return Err(format!("unknown policy `{s}` (first, random, adjoint, derivation, sweep)")),
        })
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::First => "first",
            Policy::Random => "random",
            Policy::Adjoint => "adjoint",
            Policy::Derivation => "derivation",
            Policy::Sweep => "sweep",
        })
    }
}

/// Seconds spent per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub lie_ring: f64,
    pub rings: f64,
    pub generate: f64,
    pub verify: f64,
}

impl PhaseTimes {
    pub fn total(&self) -> f64 {
        self.lie_ring + self.rings + self.generate + self.verify
    }

    fn absorb(&mut self, o: &PhaseTimes) {
        self.lie_ring += o.lie_ring;
        self.rings += o.rings;
        self.generate += o.generate;
        self.verify += o.verify;
    }
}

/// One successful refinement step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub s: MonoidIndex,
    pub t: MonoidIndex,
    pub ring: RingChoice,
    pub ring_dim: usize,
    pub radical_dim: usize,
    pub chain_dims: Vec<usize>,
    pub inserted: usize,
    pub length_after: usize,
    pub commutator_calls: usize,
}

/// Result of [`refine_once`].
#[derive(Debug, Clone)]
pub struct Refinement {
    pub filter: Filter,
    pub step: Option<StepRecord>,
    pub times: PhaseTimes,
}

fn candidate_order(
    brackets: &[(MonoidIndex, MonoidIndex, BilinearMap)],
    policy: Policy,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, RingChoice)> {
    use RingChoice::*;
    let n = brackets.len();
    match policy {
        Policy::First => (0..n).flat_map(|b| RingChoice::ALL.map(|r| (b, r))).collect(),
        Policy::Adjoint => (0..n).map(|b| (b, Adjoint)).collect(),
        Policy::Derivation => (0..n).map(|b| (b, Derivation)).collect(),
        Policy::Sweep => RingChoice::ALL.iter().flat_map(|&r| (0..n).map(move |b| (b, r))).collect(),
        Policy::Random => {
            let mut out = Vec::new();
            for b in 0..n {
                let mut head = [Adjoint, Derivation];
                head.shuffle(rng);
                let mut tail = [Centroid, LeftScalar, RightScalar];
                tail.shuffle(rng);
                out.extend(head.iter().chain(&tail).map(|&r| (b, r)));
            }
            out
        }
    }
}

/// One refinement: the first candidate (per `policy`) whose radical cuts a
/// proper nonzero chain is inserted at a new last coordinate, then the
/// prefilter is closed under commutators and filled. Returns the input
/// unchanged when no candidate refines.
pub fn refine_once(f: &Filter, policy: Policy, rng: &mut ChaCha8Rng) -> Result<Refinement, RefineError> {
    if f.sign() != Sign::Max {
        return Err(FilterError::NotFull.into());
    }
    let mut times = PhaseTimes::default();
    let clock = Instant::now();
    let lie = LieRing::new(f)?;
    let brackets = lie.nontrivial_brackets()?;
    times.lie_ring = clock.elapsed().as_secs_f64();

    for (bi, ring) in candidate_order(&brackets, policy, rng) {
        let (s, t, b) = &brackets[bi];
        let clock = Instant::now();
        let chain = radical_refinement_of(&lie, b, s, t, ring)?;
        times.rings += clock.elapsed().as_secs_f64();
        if chain.subgroups.is_empty() {
            continue;
        }
        let clock = Instant::now();
        let news: Vec<(Subgroup, Origin)> = chain
            .subgroups
            .iter()
            .enumerate()
            .map(|(i, h)| (h.clone(), Origin::Radical(i as u32 + 1)))
            .collect();
        let pi = insert_subgroups(f, &news, &chain.layer)?;
        let (mut g, stats) = generate(&pi);
        if !g.is_full() {
            g = g.fill();
        }
        times.generate = clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        verify_filter(&g).map_err(|v| RefineError::Axioms(v.to_string()))?;
        times.verify = clock.elapsed().as_secs_f64();
        let step = StepRecord {
            s: s.clone(),
            t: t.clone(),
            ring,
            ring_dim: chain.ring_dim,
            radical_dim: chain.radical_dim,
            chain_dims: chain.chain_dims.clone(),
            inserted: news.len(),
            length_after: g.len(),
            commutator_calls: stats.commutator_calls,
        };
        return Ok(Refinement { filter: g, step: Some(step), times });
    }
    Ok(Refinement { filter: f.clone(), step: None, times })
}

/// Summary of a [`refine_loop`] run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub policy: String,
    pub seed: u64,
    pub iterations: usize,
    pub subgroups_added: usize,
    pub initial_length: usize,
    pub final_length: usize,
    pub growth: f64,
    /// Stopped by the iteration cap rather than at a fixpoint.
    pub capped: bool,
    pub steps: Vec<StepRecord>,
    pub times: PhaseTimes,
    pub seconds: f64,
}

pub const CSV_HEADER: &str = "group,order_log_p,p,p_class,len_initial,len_final,growth,iterations,seconds";

impl RefinementReport {
    /// One row under [`CSV_HEADER`].
    pub fn csv_row(&self, group: &str, order_log_p: usize, p: u32, p_class: usize) -> String {
        format!(
            "{},{},{},{},{},{},{:.4},{},{:.3}",
            group,
            order_log_p,
            p,
            p_class,
            self.initial_length,
            self.final_length,
            self.growth,
            self.iterations,
            self.seconds
        )
    }
}

pub const DEFAULT_MAX_ITER: usize = 64;

/// Refine until no candidate ring refines (fixpoint) or `max_iter` steps.
/// Deterministic for a fixed seed.
pub fn refine_loop(f: &Filter, policy: Policy, seed: u64, max_iter: usize) -> Result<(Filter, RefinementReport), RefineError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = if f.is_full() { f.clone() } else { f.fill() };
    let initial_length = cur.len();
    let mut steps = Vec::new();
    let mut times = PhaseTimes::default();
    let mut capped = false;
    loop {
        if steps.len() == max_iter {
            capped = true;
            break;
        }
        let r = refine_once(&cur, policy, &mut rng)?;
        times.absorb(&r.times);
        match r.step {
            Some(step) => {
                debug_assert!(r.filter.len() >= cur.len());
                steps.push(step);
                cur = r.filter;
            }
            None => break,
        }
    }
    let final_length = cur.len();
    let report = RefinementReport {
        policy: policy.to_string(),
        seed,
        iterations: steps.len(),
        subgroups_added: final_length - initial_length,
        initial_length,
        final_length,
        growth: if initial_length == 0 { 1.0 } else { final_length as f64 / initial_length as f64 },
        capped,
        steps,
        times,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((cur, report))
}

#[cfg(test)]
mod tests;
