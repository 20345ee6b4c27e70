//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so the
//! lines appear in order under `cargo test`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use pfilter::filter::{closure_oracle, generate, insert_subgroup, verify_filter, Filter, FilterError, MonoidIndex, Sign};
use pfilter::gfp::{jacobson_radical, quotient_regular_rep, radical_power_dims};
use pfilter::liering::LieRing;
use pfilter::pcgroup::{
    elgo_group, p_class, sylow_symmetric, sylow_symmetric_points, ut_group, PcGroup, Subgroup, UtOracle,
};
use pfilter::refine::{compute_ring, radical_refinement, refine_loop, refine_once, Policy, RingChoice};
use pfilter::sampling::{random_element_of, random_prefilter};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const EXAMPLE_LIMIT: Duration = Duration::from_secs(30);
const ORACLE_LIMIT: Duration = Duration::from_secs(300);
const ORACLE_CASES: usize = 120;
const KERNEL_PRODUCTS: usize = 10_000;
const SCALE_LIMIT: Duration = Duration::from_secs(600);
const SCALE_SEEDS: u64 = 4;
const STRETCH_ITERATIONS: usize = 2;

type Check = Result<String, String>;

/// Everything produced along the way, for the global criteria 4, 6 and 8.
#[derive(Default)]
struct Corpus {
    filters: Vec<Filter>,
    /// (log_p |G|, commutator calls of one generate run)
    generate_calls: Vec<(usize, usize)>,
}

fn idx(c: &[u32]) -> MonoidIndex {
    MonoidIndex::new(c.to_vec())
}

fn gens(g: &Arc<PcGroup>, one_based: &[usize]) -> Subgroup {
    Subgroup::generated(g, one_based.iter().map(|&i| g.generator(i - 1)))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || format!("took {:.2?}, limit {:.0?}", t.elapsed(), limit))
}

fn pairs(f: &Filter) -> Vec<(MonoidIndex, Subgroup)> {
    f.entries()
        .iter()
        .filter(|e| !e.subgroup.is_trivial())
        .map(|e| (e.index.clone(), e.subgroup.clone()))
        .collect()
}

fn golden(c: &mut Corpus) -> Check {
    let t = Instant::now();
    let g = ut_group(5, 3).map_err(|e| e.to_string())?;
    let lcs = Filter::lower_central(&g);
    let gamma = |k| lcs.evaluate(&idx(&[k])).unwrap();
    let h = gens(&g, &[1, 4]).join(&gamma(2)).unwrap();
    let pi = insert_subgroup(&lcs, &h, &idx(&[1])).map_err(|e| e.to_string())?;
    let (f, stats) = generate(&pi);
    within(t, GOLDEN_LIMIT)?;
    let x = Subgroup::whole(&g).commutator(&h).unwrap().join(&gamma(3)).unwrap();
    let want = vec![
        (idx(&[1, 0]), Subgroup::whole(&g)),
        (idx(&[1, 1]), h),
        (idx(&[2, 0]), gamma(2)),
        (idx(&[2, 1]), x),
        (idx(&[3, 1]), gamma(3)),
        (idx(&[4, 2]), gamma(4)),
    ];
    ensure(pairs(&f) == want, || format!("got {:?}", pairs(&f).iter().map(|(i, s)| (i.to_string(), s.order_log())).collect::<Vec<_>>()))?;
    c.generate_calls.push((g.n(), stats.commutator_calls));
    c.filters.push(f);
    Ok(format!("six stored pairs match in {:.2?}", t.elapsed()))
}

fn example(c: &mut Corpus, p: u32) -> Check {
    let t = Instant::now();
    let g = elgo_group(p).map_err(|e| e.to_string())?;
    let f = Filter::lower_central(&g);
    let lie = LieRing::new(&f).map_err(|e| e.to_string())?;
    let chain = radical_refinement(&lie, &idx(&[1]), &idx(&[1]), RingChoice::Adjoint).map_err(|e| e.to_string())?;
    ensure(chain.ring_dim == 53, || format!("dim Adj = {}", chain.ring_dim))?;
    ensure(chain.radical_dim == 35, || format!("dim J = {}", chain.radical_dim))?;
    let quotients: Vec<usize> = chain.chain_dims.windows(2).map(|w| w[0] - w[1]).collect();
    ensure(quotients == [1, 2, 4, 2, 1], || format!("chain quotients {quotients:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let r = refine_once(&f, Policy::Adjoint, &mut rng).map_err(|e| e.to_string())?;
    let got: Vec<(String, usize)> = pairs(&r.filter).iter().map(|(i, s)| (i.to_string(), s.order_log())).collect();
    let want: Vec<(String, usize)> = [("(1,0)", 13), ("(1,1)", 12), ("(1,2)", 10), ("(1,3)", 6), ("(1,4)", 4), ("(2,1)", 3), ("(2,4)", 1)]
        .iter()
        .map(|(i, k)| (i.to_string(), *k))
        .collect();
    ensure(got == want, || format!("final filter {got:?}"))?;
    within(t, EXAMPLE_LIMIT)?;
    if let Some(s) = &r.step {
        c.generate_calls.push((g.n(), s.commutator_calls));
    }
    c.filters.push(f);
    c.filters.push(r.filter);
    Ok(format!("Adj 53, J 35, quotients 1,2,4,2,1, length 7 in {:.2?}", t.elapsed()))
}

fn oracle(c: &mut Corpus) -> Check {
    let t = Instant::now();
    let groups = [ut_group(3, 3), ut_group(4, 2), ut_group(4, 3), sylow_symmetric(2, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    for case in 0..ORACLE_CASES {
        let g = groups[case % groups.len()].as_ref().map_err(|e| e.to_string())?;
        let d = 1 + case % 2;
        let pi = random_prefilter(g, d, 4, &mut rng);
        let (fast, stats) = generate(&pi);
        let mut bound = p_class(g) + 1;
        let slow = loop {
            match closure_oracle(&pi, bound) {
                Err(FilterError::BoundTooSmall(_)) => bound += 1,
                other => break other.map_err(|e| e.to_string())?,
            }
        };
        ensure(pairs(&fast) == pairs(&slow), || format!("case {case} differs"))?;
        c.generate_calls.push((g.n(), stats.commutator_calls));
        c.filters.push(fast);
        done += 1;
    }
    within(t, ORACLE_LIMIT)?;
    Ok(format!("{done} prefilters agree in {:.1?}", t.elapsed()))
}

fn axioms(c: &Corpus) -> Check {
    for (i, f) in c.filters.iter().enumerate() {
        verify_filter(f).map_err(|v| format!("filter {i}: {v}"))?;
        let full = if f.is_full() { f.clone() } else { f.fill() };
        let total: usize = full.layer_orders().map_err(|e| e.to_string())?.iter().map(|(_, k)| k).sum();
        ensure(full.sign() == Sign::Max && total == f.group().n(), || {
            format!("filter {i}: layers multiply to p^{total}, |G| = p^{}", f.group().n())
        })?;
    }
    Ok(format!("{} filters satisfy the axioms and the order identity", c.filters.len()))
}

fn kernel() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for p in [2u32, 3, 5] {
        for n in 2..=6 {
            let g = ut_group(n, p).map_err(|e| e.to_string())?;
            let oracle = UtOracle::new(n, p);
            let whole = Subgroup::whole(&g);
            for _ in 0..KERNEL_PRODUCTS / 15 + 1 {
                let x = random_element_of(&whole, &mut rng);
                let y = random_element_of(&whole, &mut rng);
                let m = oracle.to_matrix(&x).mul(&oracle.to_matrix(&y)).unwrap();
                ensure(oracle.from_matrix(&m) == g.mul(&x, &y), || format!("UT({n},{p}) product mismatch"))?;
                checked += 1;
            }
        }
    }
    ensure(checked >= KERNEL_PRODUCTS, || format!("only {checked} products"))?;
    Ok(format!("{checked} products agree with matrix multiplication"))
}

fn radicals(c: &Corpus) -> Check {
    let mut algebras = 0;
    for f in c.filters.iter().filter(|f| f.sign() == Sign::Max && f.is_full()) {
        let Ok(lie) = LieRing::new(f) else { continue };
        let brackets = lie.nontrivial_brackets().map_err(|e| e.to_string())?;
        for (s, t, b) in brackets.iter().take(2) {
            for which in RingChoice::ALL {
                let ring = compute_ring(b, which);
                let alg = ring.algebra(b.p()).map_err(|e| e.to_string())?;
                let j = jacobson_radical(&alg);
                let dims = radical_power_dims(&j, alg.deg())
                    .ok_or_else(|| format!("{which} on {s} x {t}: radical not nilpotent"))?;
                ensure(dims.len() <= j.dim() + 1, || format!("{which} on {s} x {t}: nilpotency {}", dims.len()))?;
                if alg.dim() <= 64 {
                    let q = quotient_regular_rep(&alg, &j);
                    ensure(jacobson_radical(&q).dim() == 0, || format!("{which} on {s} x {t}: A/J not semisimple"))?;
                }
                algebras += 1;
            }
        }
    }
    ensure(algebras > 0, || "no algebras computed".into())?;
    Ok(format!("{algebras} algebras: J nilpotent, A/J semisimple"))
}

fn scale(c: &mut Corpus) -> Check {
    let t = Instant::now();
    let g = sylow_symmetric(2, 6).map_err(|e| e.to_string())?;
    let f = Filter::exponent_p_central(&g);
    let mut growths = Vec::new();
    for seed in 0..SCALE_SEEDS {
        let (h, rep) = refine_loop(&f, Policy::Random, seed, 64).map_err(|e| e.to_string())?;
        ensure(rep.growth > 1.0, || format!("seed {seed}: growth {}", rep.growth))?;
        for s in &rep.steps {
            c.generate_calls.push((g.n(), s.commutator_calls));
        }
        growths.push(format!("{:.2}", rep.growth));
        c.filters.push(h);
    }
    within(t, SCALE_LIMIT)?;
    Ok(format!("2^63, {SCALE_SEEDS} seeds, growth {} in {:.1?}", growths.join("/"), t.elapsed()))
}

fn stretch(c: &mut Corpus) -> Check {
    let t = Instant::now();
    let g = sylow_symmetric_points(2, 100).map_err(|e| e.to_string())?;
    let f = Filter::exponent_p_central(&g);
    let initial = f.len();
    let (h, rep) = refine_loop(&f, Policy::First, 0, STRETCH_ITERATIONS).map_err(|e| e.to_string())?;
    ensure(p_class(&g) == 32, || format!("p-class {}", p_class(&g)))?;
    ensure(h.len() > initial, || format!("length stayed {initial}"))?;
    for s in &rep.steps {
        c.generate_calls.push((g.n(), s.commutator_calls));
    }
    c.filters.push(h.clone());
    Ok(format!("2^97, length {initial} -> {} after {} iterations in {:.1?}", h.len(), rep.iterations, t.elapsed()))
}

fn complexity(c: &Corpus) -> Check {
    let mut worst = 0.0f64;
    for &(n, calls) in &c.generate_calls {
        let bound = 4 * n * n;
        ensure(calls <= bound, || format!("{calls} commutator subgroups for log_p|G| = {n}"))?;
        worst = worst.max(calls as f64 / bound as f64);
    }
    Ok(format!("{} generate runs, worst {:.1}% of 4 log^2|G|", c.generate_calls.len(), 100.0 * worst))
}

fn main() {
    let mut corpus = Corpus::default();
    let mut failed = 0;
    let mut report = |name: &str, r: Check| {
        match &r {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}")
            }
        }
    };
    report("1 golden insertion trace, UT(5,3)", golden(&mut corpus));
    report("2 quotient chain example, p=3", example(&mut corpus, 3));
    report("2 quotient chain example, p=5", example(&mut corpus, 5));
    report("3 generate matches the closure oracle", oracle(&mut corpus));
    report("5 collection matches UT matrix products", kernel());
    report("7a Sylow 2-subgroup of Sym(64), seed sweep", scale(&mut corpus));
    report("7b Sylow 2-subgroup of Sym(100), stretch", stretch(&mut corpus));
    report("4 filter axioms across the corpus", axioms(&corpus));
    report("6 radical properties", radicals(&corpus));
    report("8 generate commutator-call guard", complexity(&corpus));
    if failed > 0 {
        println!("{failed} criterion line(s) failed");
        std::process::exit(1);
    }
}
