use super::*;
use crate::filter::{Filter, Sign};
use crate::pcgroup::{elgo_group, sylow_symmetric, ut_group, PcGroup};
use proptest::prelude::*;
use std::sync::Arc;

fn idx(c: &[u32]) -> MonoidIndex {
    MonoidIndex::new(c.to_vec())
}

fn gens(g: &Arc<PcGroup>, one_based: &[usize]) -> Subgroup {
    Subgroup::generated(g, one_based.iter().map(|&i| g.generator(i - 1)))
}

fn heisenberg(p: u64) -> BilinearMap {
    let mut b = BilinearMap::zero(p, 2, 2, 1);
    b.set(0, 1, 0, 1);
    b.set(1, 0, 0, p - 1);
    b
}

fn random_map(p: u64, a: usize, b: usize, c: usize, seed: u64) -> BilinearMap {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = BilinearMap::zero(p, a, b, c);
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                m.set(i, j, k, rng.gen_range(0..p));
            }
        }
    }
    m
}

/// Apply a block-diagonal ring element to the three sides of a bracket.
fn blocks(r: &RingSpace, x: &FpMatrix) -> Vec<FpMatrix> {
    let mut off = 0;
    r.blocks
        .iter()
        .map(|&k| {
            let m = x.diag_block(off, k);
            off += k;
            m
        })
        .collect()
}

fn unit(n: usize, i: usize) -> Vec<u64> {
    crate::gfp::unit_vec(n, i)
}

/// Check each defining identity directly on basis vectors.
fn identities_hold(b: &BilinearMap, r: &RingSpace) -> bool {
    let p = b.p();
    let [na, nb, _] = b.dims();
    let add = |x: &[u64], y: &[u64]| x.iter().zip(y).map(|(a, b)| (a + b) % p).collect::<Vec<_>>();
    r.basis.iter().all(|x| {
        let m = blocks(r, x);
        (0..na).all(|i| {
            (0..nb).all(|j| {
                let (u, v) = (unit(na, i), unit(nb, j));
                match r.which {
                    RingChoice::Adjoint => b.apply(&m[0].vec_mul(&u), &v) == b.apply(&u, &m[1].mul_vec(&v)),
                    RingChoice::Centroid => {
                        let l = b.apply(&m[0].vec_mul(&u), &v);
                        l == b.apply(&u, &m[1].vec_mul(&v)) && l == m[2].vec_mul(&b.apply(&u, &v))
                    }
                    RingChoice::Derivation => {
                        add(&b.apply(&m[0].vec_mul(&u), &v), &b.apply(&u, &m[1].vec_mul(&v)))
                            == m[2].vec_mul(&b.apply(&u, &v))
                    }
                    RingChoice::LeftScalar => b.apply(&m[0].vec_mul(&u), &v) == m[1].vec_mul(&b.apply(&u, &v)),
                    RingChoice::RightScalar => b.apply(&u, &m[0].vec_mul(&v)) == m[1].vec_mul(&b.apply(&u, &v)),
                }
            })
        })
    })
}

#[test]
fn zero_bracket_has_full_adjoint_ring() {
    let b = BilinearMap::zero(5, 3, 2, 2);
    let r = compute_ring(&b, RingChoice::Adjoint);
    assert_eq!(r.dim(), 9 + 4);
    assert_eq!(compute_ring(&b, RingChoice::Derivation).dim(), 9 + 4 + 4);
}

#[test]
fn heisenberg_rings() {
    for p in [2u64, 3, 7] {
        let b = heisenberg(p);
        assert_eq!(compute_ring(&b, RingChoice::Centroid).dim(), 1);
        // adjoint pairs of a nondegenerate form: {(F, adj F)} is all of M_2
        assert_eq!(compute_ring(&b, RingChoice::Adjoint).dim(), 4);
        let alg = compute_ring(&b, RingChoice::Adjoint).algebra(p).unwrap();
        assert_eq!(jacobson_radical(&alg).dim(), 0);
    }
}

#[test]
fn rings_are_closed_algebras() {
    for seed in 0..6 {
        let b = random_map(3, 3, 3, 2, seed);
        for which in RingChoice::ALL {
            let r = compute_ring(&b, which);
            assert!(identities_hold(&b, &r), "{which} seed {seed}");
            if which != RingChoice::Derivation {
                assert!(r.algebra(3).unwrap().is_closed(), "{which} seed {seed}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn ring_identities(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..3) {
        let m = random_map(5, a, b, c, seed);
        for which in RingChoice::ALL {
            let r = compute_ring(&m, which);
            prop_assert!(r.dim() >= 1);
            prop_assert!(identities_hold(&m, &r));
        }
    }
}

fn check_example(p: u32) {
    let g = elgo_group(p).unwrap();
    let f = Filter::lower_central(&g);
    let lie = LieRing::new(&f).unwrap();
    let b = lie.bracket(&idx(&[1]), &idx(&[1])).unwrap();
    assert_eq!(b.dims(), [10, 10, 3]);
    let chain = radical_refinement(&lie, &idx(&[1]), &idx(&[1]), RingChoice::Adjoint).unwrap();
    assert_eq!(chain.ring_dim, 53);
    assert_eq!(chain.radical_dim, 35);
    assert_eq!(chain.radical_power_dims, vec![35, 17, 5, 1]);
    assert_eq!(chain.chain_dims, vec![10, 9, 7, 3, 1, 0]);
    let orders: Vec<usize> = chain.subgroups.iter().map(Subgroup::order_log).collect();
    assert_eq!(orders, vec![12, 10, 6, 4]);
    assert_eq!(chain.subgroups[0], gens(&g, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 13]));
    assert_eq!(chain.subgroups[1], gens(&g, &[1, 2, 3, 4, 5, 8, 9, 11, 12, 13]));
    assert_eq!(chain.subgroups[2], gens(&g, &[5, 8, 9, 11, 12, 13]));
    assert_eq!(chain.subgroups[3], gens(&g, &[9, 11, 12, 13]));

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let r = refine_once(&f, Policy::Adjoint, &mut rng).unwrap();
    let step = r.step.unwrap();
    assert_eq!(step.ring, RingChoice::Adjoint);
    let h = &r.filter;
    assert_eq!(h.sign(), Sign::Max);
    assert_eq!(h.len(), 7);
    let got: Vec<(MonoidIndex, usize)> = h
        .entries()
        .iter()
        .filter(|e| !e.subgroup.is_trivial())
        .map(|e| (e.index.clone(), e.subgroup.order_log()))
        .collect();
    let want = vec![
        (idx(&[1, 0]), 13),
        (idx(&[1, 1]), 12),
        (idx(&[1, 2]), 10),
        (idx(&[1, 3]), 6),
        (idx(&[1, 4]), 4),
        (idx(&[2, 1]), 3),
        (idx(&[2, 4]), 1),
    ];
    assert_eq!(got, want);
    let last = h.entries().iter().find(|e| e.index == idx(&[2, 4])).unwrap();
    assert_eq!(last.subgroup, gens(&g, &[13]));
    assert_eq!(last.origin, Origin::Generated);
    verify_filter(h).unwrap();
}

#[test]
fn example_quotient_chain_p3() {
    check_example(3);
}

#[test]
fn example_quotient_chain_p5() {
    check_example(5);
}

#[test]
fn abelian_and_heisenberg_are_fixpoints() {
    let ab = ut_group(2, 7).unwrap();
    let (f, rep) = refine_loop(&Filter::lower_central(&ab), Policy::First, 0, 8).unwrap();
    assert_eq!((rep.iterations, f.len()), (0, 1));
    let heis = ut_group(3, 5).unwrap();
    let (f, rep) = refine_loop(&Filter::lower_central(&heis), Policy::Sweep, 0, 8).unwrap();
    assert_eq!((rep.iterations, f.len(), rep.capped), (0, 2, false));
}

#[test]
fn loop_on_sylow_2_of_sym16() {
    let g = sylow_symmetric(2, 4).unwrap();
    let f = Filter::exponent_p_central(&g);
    let (h, rep) = refine_loop(&f, Policy::First, 1, DEFAULT_MAX_ITER).unwrap();
    assert!(!rep.capped);
    assert!(rep.final_length >= rep.initial_length);
    assert_eq!(rep.iterations, rep.steps.len());
    verify_filter(&h).unwrap();
    assert!(h.is_full());
    // idempotent at the fixpoint
    let (h2, rep2) = refine_loop(&h, Policy::First, 1, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(rep2.iterations, 0);
    assert_eq!(h2.len(), h.len());
    let json = serde_json::to_string(&rep).unwrap();
    let back: RefinementReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rep);
    assert_eq!(rep.csv_row("x", 15, 2, 4).split(',').count(), CSV_HEADER.split(',').count());
}

#[test]
fn seeded_runs_repeat() {
    let g = sylow_symmetric(2, 3).unwrap();
    let f = Filter::exponent_p_central(&g);
    let a = refine_loop(&f, Policy::Random, 7, 16).unwrap().1;
    let b = refine_loop(&f, Policy::Random, 7, 16).unwrap().1;
    assert_eq!(a.steps, b.steps);
}
