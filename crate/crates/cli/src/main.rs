//! `pfilter`: refine characteristic filters of p-groups from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pfilter::filter::{generate, insert_subgroups, verify_filter, Filter, FilterJson, MonoidIndex, Origin, Sign};
use pfilter::liering::LieError;
use pfilter::pcgroup::{
    elgo_group, parse_presentation, p_class, sylow_symmetric, sylow_symmetric_points, ut_group, PcGroup, Subgroup,
};
use pfilter::refine::{refine_loop, Policy, RefineError, RefinementReport, CSV_HEADER, DEFAULT_MAX_ITER};

#[derive(Parser)]
#[command(name = "pfilter", version, about = "Characteristic filters of finite p-groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a central series and refine it until no ring refines it further.
    Refine(RefineArgs),
    /// Check the filter axioms of an exported JSON filter.
    Verify(VerifyArgs),
    /// Refine every presentation file in a directory and write one CSV row each.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Series {
    /// Lower central series.
    Lcs,
    /// Exponent-p central series.
    Epcs,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "epcs")]
    series: Series,
    /// first, random, adjoint, derivation or sweep.
    #[arg(long, default_value = "first")]
    policy: Policy,
    #[arg(long)]
    seed: Option<u64>,
    /// Iteration cap. Defaults to 64, or to 0 when --insert is given.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct RefineArgs {
    /// ut:N,P | sylow-sym:P,K | sylow-sn:P,POINTS | elgo:P | path to a presentation file.
    #[arg(long)]
    group: String,
    #[command(flatten)]
    run: RunArgs,
    /// Insert a normal subgroup before refining, e.g. `g1,g4+gamma2@1`.
    /// `gammaK` is the K-th term of the chosen series.
    #[arg(long)]
    insert: Option<String>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Re-check all filter axioms on the result.
    #[arg(long)]
    verify: bool,
    /// Print timings to stderr.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Group to use when the file carries no presentation.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    corpus: PathBuf,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

const EXIT_CAPPED: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Refine(a) => cmd_refine(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn parse_params(s: &str, n: usize, what: &str) -> Result<Vec<u64>> {
    let v: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad parameters `{s}` for {what}"))?;
    if v.len() != n {
        bail!("{what} takes {n} parameter(s), got `{s}`");
    }
    Ok(v)
}

fn small<T: TryFrom<u64>>(x: u64) -> Result<T> {
    T::try_from(x).map_err(|_| anyhow!("parameter {x} out of range"))
}

fn load_group(spec: &str) -> Result<Arc<PcGroup>> {
    let builtin = |name: &str, params: &str| -> Result<Arc<PcGroup>> {
        let g = match name {
            "ut" => {
                let v = parse_params(params, 2, "ut")?;
                ut_group(small(v[0])?, small(v[1])?)
            }
            "sylow-sym" => {
                let v = parse_params(params, 2, "sylow-sym")?;
                sylow_symmetric(small(v[0])?, small(v[1])?)
            }
            "sylow-sn" => {
                let v = parse_params(params, 2, "sylow-sn")?;
                sylow_symmetric_points(small(v[0])?, small(v[1])?)
            }
            "elgo" => {
                let v = parse_params(params, 1, "elgo")?;
                elgo_group(small(v[0])?)
            }
            _ => unreachable!(),
        };
        Ok(g?)
    };
    if let Some((name, params)) = spec.split_once(':') {
        if matches!(name, "ut" | "sylow-sym" | "sylow-sn" | "elgo") {
            return builtin(name, params);
        }
    }
    let path = spec.strip_prefix("file:").unwrap_or(spec);
    load_presentation_file(Path::new(path))
}

fn load_presentation_file(path: &Path) -> Result<Arc<PcGroup>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_presentation(&text).with_context(|| format!("{}", path.display()))
}

fn series_filter(g: &Arc<PcGroup>, s: Series) -> Filter {
    match s {
        Series::Lcs => Filter::lower_central(g),
        Series::Epcs => Filter::exponent_p_central(g),
    }
}

fn parse_index(s: &str) -> Result<MonoidIndex> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let coords = inner
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad index `{s}`"))?;
    Ok(MonoidIndex::new(coords))
}

/// `g1,g4+gamma2@1`: generators and series terms joined with `+`, then the index.
fn parse_insert(spec: &str, f: &Filter) -> Result<(Subgroup, MonoidIndex)> {
    let (gens, at) = spec.rsplit_once('@').ok_or_else(|| anyhow!("--insert needs `@index`"))?;
    let g = f.group();
    let mut h = Subgroup::trivial(g);
    for part in gens.split('+') {
        let part = part.trim();
        if let Some(k) = part.strip_prefix("gamma") {
            let k: u32 = k.parse().with_context(|| format!("bad series term `{part}`"))?;
            let mut coords = vec![0; f.rank()];
            coords[0] = k;
            let idx = MonoidIndex::new(coords);
            h = h.join(&f.evaluate(&idx)?)?;
            continue;
        }
        let mut elems = Vec::new();
        for tok in part.split(',') {
            let i: usize = tok
                .trim()
                .strip_prefix('g')
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| anyhow!("bad generator `{tok}`"))?;
            if i == 0 || i > g.n() {
                bail!("generator g{i} out of range 1..={}", g.n());
            }
            elems.push(g.generator(i - 1));
        }
        h = h.join(&Subgroup::generated(g, elems))?;
    }
    if !h.is_normal() {
        bail!("inserted subgroup {} is not normal", h.describe());
    }
    Ok((h, parse_index(at)?))
}

fn format_order(p: u32, k: usize) -> String {
    match k {
        0 => "1".into(),
        1 => p.to_string(),
        _ => format!("{p}^{k}"),
    }
}

fn table(f: &Filter) -> String {
    let p = f.group().p();
    let rows: Vec<[String; 4]> = f
        .entries()
        .iter()
        .filter(|e| !e.subgroup.is_trivial())
        .map(|e| {
            [
                e.index.to_string(),
                e.origin.to_string(),
                format_order(p, e.subgroup.order_log()),
                e.subgroup.describe(),
            ]
        })
        .collect();
    let head = ["Maximal Index", "Origin", "Order", "Generators"];
    let mut w = head.map(str::len);
    for r in &rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.len());
        }
    }
    let line = |r: [&str; 4]| {
        format!("{:<a$} | {:<b$} | {:<c$} | {}", r[0], r[1], r[2], r[3], a = w[0], b = w[1], c = w[2])
            .trim_end()
            .to_string()
    };
    let mut out = line(head) + "\n";
    out += &format!("{}-+-{}-+-{}-+-{}\n", "-".repeat(w[0]), "-".repeat(w[1]), "-".repeat(w[2]), "-".repeat(w[3]));
    for r in &rows {
        out += &line([&r[0], &r[1], &r[2], &r[3]]);
        out.push('\n');
    }
    out
}

fn explain(e: RefineError) -> anyhow::Error {
    match e {
        RefineError::Lie(LieError::NotElementaryAbelian { .. }) => {
            anyhow!("{e}\nhint: graded layers must have exponent p; use --series epcs")
        }
        e => e.into(),
    }
}

/// Axioms plus the order check `prod [phi_s : boundary phi_s] = |G|`.
fn check(f: &Filter) -> Result<(), String> {
    verify_filter(f).map_err(|v| v.to_string())?;
    if f.sign() == Sign::Max && f.is_full() {
        let total: usize = f.layer_orders().map_err(|e| e.to_string())?.iter().map(|(_, k)| k).sum();
        if total != f.group().n() {
            return Err(format!("layer orders multiply to p^{total}, group has order p^{}", f.group().n()));
        }
    }
    Ok(())
}

fn seed_of(run: &RunArgs) -> Result<u64> {
    match (run.policy, run.seed) {
        (Policy::Random, None) => bail!("--policy random needs --seed"),
        (_, s) => Ok(s.unwrap_or(0)),
    }
}

fn write_csv(path: &Path, rows: &[String]) -> Result<()> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for r in rows {
        text += r;
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn report_row(name: &str, g: &Arc<PcGroup>, rep: &RefinementReport) -> String {
    rep.csv_row(name, g.n(), g.p(), p_class(g))
}

fn cmd_refine(a: RefineArgs) -> Result<u8> {
    let seed = seed_of(&a.run)?;
    let g = load_group(&a.group)?;
    let mut f = series_filter(&g, a.run.series);
    let max_iter = a.run.max_iter.unwrap_or(if a.insert.is_some() { 0 } else { DEFAULT_MAX_ITER });
    if let Some(spec) = &a.insert {
        let (h, at) = parse_insert(spec, &f)?;
        let pi = insert_subgroups(&f, &[(h, Origin::Inserted)], &at)?;
        let (h, _) = generate(&pi);
        f = if h.is_full() { h } else { h.fill() };
    }
    let (h, rep) = if max_iter == 0 {
        let (h, mut rep) = refine_loop(&f, a.run.policy, seed, 0).map_err(explain)?;
        rep.capped = false;
        (h, rep)
    } else {
        refine_loop(&f, a.run.policy, seed, max_iter).map_err(explain)?
    };

    print!("{}", table(&h));
    println!(
        "length {} -> {}, {} iteration(s){}",
        rep.initial_length,
        rep.final_length,
        rep.iterations,
        if rep.capped { ", stopped at the iteration cap" } else { "" }
    );
    for s in &rep.steps {
        println!(
            "  {} on L_{} x L_{}: ring dim {}, radical dim {}, chain {:?}",
            s.ring, s.s, s.t, s.ring_dim, s.radical_dim, s.chain_dims
        );
    }
    if a.verbose {
        eprintln!("times {:?}, total {:.3}s", rep.times, rep.seconds);
    }
    if let Some(path) = &a.out_json {
        let text = serde_json::to_string_pretty(&h.to_json(true))?;
        fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &a.out_csv {
        write_csv(path, &[report_row(&a.group, &g, &rep)])?;
    }
    if a.verify {
        check(&h).map_err(|v| anyhow!("filter axioms fail: {v}"))?;
        println!("verified");
    }
    Ok(if rep.capped { EXIT_CAPPED } else { 0 })
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let text = fs::read_to_string(&a.file).with_context(|| format!("cannot read {}", a.file.display()))?;
    let j: FilterJson = serde_json::from_str(&text).with_context(|| format!("{} is not a filter", a.file.display()))?;
    let g = a.group.as_deref().map(load_group).transpose()?;
    let f = Filter::from_json(&j, g.as_ref())?;
    match check(&f) {
        Ok(()) => {
            println!("ok: {} entries, {}", f.len(), if f.is_full() { "full" } else { "not full" });
            Ok(0)
        }
        Err(v) => {
            println!("violation: {v}");
            Ok(EXIT_VIOLATION)
        }
    }
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let seed = seed_of(&a.run)?;
    let max_iter = a.run.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let mut files: Vec<PathBuf> = fs::read_dir(&a.corpus)
        .with_context(|| format!("cannot read {}", a.corpus.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for path in &files {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let run = || -> Result<String> {
            let g = load_presentation_file(path)?;
            let f = series_filter(&g, a.run.series);
            let (_, rep) = refine_loop(&f, a.run.policy, seed, max_iter).map_err(explain)?;
            Ok(report_row(&name, &g, &rep))
        };
        match run() {
            Ok(row) => rows.push(row),
            Err(e) => eprintln!("skipping {}: {e:#}", path.display()),
        }
    }
    match &a.out_csv {
        Some(path) => write_csv(path, &rows)?,
        None => {
            println!("{CSV_HEADER}");
            for r in &rows {
                println!("{r}");
            }
        }
    }
    Ok(0)
}
