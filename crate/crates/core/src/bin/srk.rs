use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use srk::bench::{bench_comb, csv, log_slope};
use srk::dp::{solve_with, SolveOptions, SolveReport};
use srk::gadget::{build_hw_gadget, verify_realization, HwRelation};
use srk::gen::{gen_alloff, gen_comb, gen_grid, gen_random, gen_reflexive_alloff, random_cnf, CnfFormula};
use srk::graph::{heuristic_decomposition, make_nice, Graph, GraphWithPortals, TreeDecomposition};
use srk::oracle::{brute_force_sizes_capped, oracle_cap};
use srk::residue::{ProblemSpec, ResidueClass};
use srk::{Error, Result};

#[derive(Parser)]
#[command(name = "srk", version, about = "Residue-class dominating set solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve on a tree decomposition.
    Solve(SolveArgs),
    /// Solve by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Write generated instances.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Build or check weight-relation gadgets.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Time the solver across comb widths; CSV on stdout or --out.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Decide,
    Min,
    Max,
    AllSizes,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    gr: PathBuf,
    /// Residue class for selected vertices, as `a/m`.
    #[arg(long)]
    sigma: ResidueClass,
    /// Residue class for unselected vertices, as `a/m`.
    #[arg(long)]
    rho: ResidueClass,
    #[arg(long, value_enum, default_value = "all-sizes")]
    mode: Mode,
    /// Whitespace-separated per-vertex shifts.
    #[arg(long)]
    shifts: Option<PathBuf>,
    /// For decide: feasible at some size up to this.
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, conflicts_with = "heuristic_td")]
    td: Option<PathBuf>,
    /// Build a min-fill decomposition instead of reading one.
    #[arg(long)]
    heuristic_td: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Skip partial solutions larger than this.
    #[arg(long)]
    max_size: Option<usize>,
    /// Cross-check every join against the naive combination.
    #[arg(long)]
    debug_checks: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Vertex cap; defaults to SRK_ORACLE_CAP or the built-in cap.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Reflexive,
    Plain,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Grid graph with a width-min(rows, cols) path decomposition.
    Lightsout {
        rows: usize,
        cols: usize,
        #[arg(long, default_value = "lightsout")]
        out: PathBuf,
    },
    /// Reduction from a DIMACS CNF.
    Sat {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value = "reflexive")]
        variant: Variant,
        /// Clause width to pad to; defaults to the longest clause.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random CNF in DIMACS form.
    Cnf {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "random.cnf")]
        out: PathBuf,
    },
    /// G(n, p) graph with a min-fill decomposition.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "random")]
        out: PathBuf,
    },
    /// Comb benchmark instance of the given width.
    Comb {
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long)]
        w: usize,
        #[arg(long, default_value = "comb")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GadgetCmd {
    /// Write the gadget's .gr and .portals files.
    Build {
        #[arg(long)]
        sigma: ResidueClass,
        #[arg(long)]
        rho: ResidueClass,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "gadget")]
        out: PathBuf,
    },
    /// Exit 0 iff the graph realizes the weight relation exactly.
    Verify {
        #[arg(long)]
        gr: PathBuf,
        #[arg(long)]
        portals: PathBuf,
        #[arg(long)]
        sigma: ResidueClass,
        #[arg(long)]
        rho: ResidueClass,
        /// Accepted weights, comma separated; defaults to the relation the
        /// built gadget targets.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<usize>>,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 3)]
    m: u32,
    /// Inclusive width range `lo..hi`, or a single width.
    #[arg(long, default_value = "8..14")]
    w: String,
    /// Use all-pairs joins.
    #[arg(long)]
    naive: bool,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CliReport<'a> {
    mode: Mode,
    answer: serde_json::Value,
    #[serde(flatten)]
    report: &'a SolveReport,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn parse_shifts(text: &str) -> Result<Vec<u32>> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Invalid(format!("bad shift `{t}`"))))
        .collect()
}

fn load_problem(p: &ProblemArgs) -> Result<(Graph, ProblemSpec, Option<Vec<u32>>)> {
    let g = Graph::parse_gr(&read(&p.gr)?)?;
    let spec = ProblemSpec::new(p.sigma, p.rho)?;
    let shifts = match &p.shifts {
        Some(path) => Some(parse_shifts(&read(path)?)?),
        None => None,
    };
    Ok((g, spec, shifts))
}

/// Prints the report and maps the decision to an exit code.
fn emit(p: &ProblemArgs, report: &SolveReport) -> Result<u8> {
    let decision = match p.target {
        Some(t) => report.feasible_within(t),
        None => report.decision,
    };
    let answer = match p.mode {
        Mode::Decide => serde_json::json!(decision),
        Mode::Min => serde_json::json!(report.min),
        Mode::Max => serde_json::json!(report.max),
        Mode::AllSizes => serde_json::json!(report.feasible),
    };
    let json = serde_json::to_string(&CliReport {
        mode: p.mode,
        answer,
        report,
    })
    .expect("report serializes");
    match &p.out {
        Some(path) => write(path, &format!("{json}\n"))?,
        None => println!("{json}"),
    }
    Ok(if decision { 0 } else { 1 })
}

fn cmd_solve(a: &SolveArgs) -> Result<u8> {
    let (g, spec, shifts) = load_problem(&a.problem)?;
    let td = match (&a.td, a.heuristic_td) {
        (Some(path), _) => TreeDecomposition::parse_td(&read(path)?, &g)?,
        (None, true) => heuristic_decomposition(&g),
        (None, false) => return Err(Error::Invalid("no decomposition: pass --td or --heuristic-td".into())),
    };
    let nice = make_nice(&td);
    let opts = SolveOptions {
        max_size: a.max_size,
        threads: a.threads,
        debug_checks: a.debug_checks,
        naive_joins: false,
    };
    let report = solve_with(&g, &nice, spec, shifts.as_deref(), &opts, &mut ())?;
    let s = &report.stats;
    eprintln!(
        "n={} width={} nodes={} joins={} combinations={} max_states={} time={:.3}ms",
        g.n(),
        s.width,
        nice.len(),
        s.join.nodes,
        s.combinations,
        s.max_states,
        s.total_micros as f64 / 1000.0
    );
    emit(&a.problem, &report)
}

fn cmd_oracle(a: &OracleArgs) -> Result<u8> {
    let (g, spec, shifts) = load_problem(&a.problem)?;
    let cap = a.cap.unwrap_or_else(oracle_cap);
    let feasible = brute_force_sizes_capped(&g, spec, shifts.as_deref(), cap)?;
    eprintln!("n={} enumerated {} subsets", g.n(), 1u64 << g.n());
    emit(&a.problem, &SolveReport::from_feasible(feasible, Default::default()))
}

fn write_instance(prefix: &Path, g: &Graph, td: &TreeDecomposition, sidecar: &str) -> Result<()> {
    write(&with_ext(prefix, "gr"), &g.to_gr())?;
    write(&with_ext(prefix, "td"), &td.to_td(g.n()))?;
    write(&with_ext(prefix, "json"), &format!("{sidecar}\n"))?;
    eprintln!("wrote {}.{{gr,td,json}}: n={} width={}", prefix.display(), g.n(), td.width());
    Ok(())
}

fn simple_sidecar(value: serde_json::Value) -> String {
    serde_json::to_string_pretty(&value).expect("sidecar serializes")
}

fn cmd_gen(c: &GenCmd) -> Result<u8> {
    match c {
        GenCmd::Lightsout { rows, cols, out } => {
            let (g, td) = gen_grid(*rows, *cols)?;
            let side = serde_json::json!({"schema": 1, "kind": "lightsout", "rows": rows, "cols": cols});
            write_instance(out, &g, &td, &simple_sidecar(side))?;
        }
        GenCmd::Sat { cnf, variant, k, out } => {
            let phi = CnfFormula::parse_dimacs(&read(cnf)?)?;
            let red = match variant {
                Variant::Reflexive => gen_reflexive_alloff(&phi, *k)?,
                Variant::Plain => gen_alloff(&phi, *k)?,
            };
            let prefix = out.clone().unwrap_or_else(|| cnf.with_extension(""));
            write_instance(&prefix, &red.graph, &red.decomposition, &red.sidecar_json())?;
            eprintln!("target size {}", red.target_size);
        }
        GenCmd::Cnf { vars, clauses, k, seed, out } => {
            write(out, &random_cnf(*vars, *clauses, *k, *seed)?.to_dimacs())?;
        }
        GenCmd::Random { n, p, seed, out } => {
            let g = gen_random(*n, *p, *seed)?;
            let td = heuristic_decomposition(&g);
            let side = serde_json::json!({"schema": 1, "kind": "random", "n": n, "p": p, "seed": seed});
            write_instance(out, &g, &td, &simple_sidecar(side))?;
        }
        GenCmd::Comb { m, w, out } => {
            let (g, td) = gen_comb(*m, *w)?;
            let side = serde_json::json!({"schema": 1, "kind": "comb", "m": m, "w": w});
            write_instance(out, &g, &td, &simple_sidecar(side))?;
        }
    }
    Ok(0)
}

fn cmd_gadget(c: &GadgetCmd) -> Result<u8> {
    match c {
        GadgetCmd::Build { sigma, rho, k, out } => {
            let spec = ProblemSpec::new(*sigma, *rho)?;
            let gp = build_hw_gadget(spec, *k)?;
            write(&with_ext(out, "gr"), &gp.graph.to_gr())?;
            write(&with_ext(out, "portals"), &gp.portals_text())?;
            eprintln!(
                "wrote {}.{{gr,portals}}: {} vertices realizing {}",
                out.display(),
                gp.graph.n(),
                HwRelation::for_gadget(spec, *k)
            );
            Ok(0)
        }
        GadgetCmd::Verify { gr, portals, sigma, rho, weights } => {
            let spec = ProblemSpec::new(*sigma, *rho)?;
            let g = Graph::parse_gr(&read(gr)?)?;
            let gp = GraphWithPortals::parse_portals(&read(portals)?, g)?;
            let k = gp.portals.len();
            let rel = match weights {
                Some(w) => HwRelation::new(k, w.iter().copied()),
                None => HwRelation::for_gadget(spec, k),
            };
            let ok = verify_realization(&gp, &rel, spec)?;
            println!("{}", serde_json::json!({"schema": 1, "relation": rel.to_string(), "realized": ok}));
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Invalid(format!("bad width range `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        }
        None => num(s).map(|w| (w, w)),
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<u8> {
    let (lo, hi) = parse_range(&a.w)?;
    let mut rows = Vec::new();
    for w in lo..=hi {
        let row = bench_comb(a.m, w, a.naive, a.repeats)?;
        eprintln!("w={w} n={} max_states={} total={:.3}ms", row.n, row.max_states, row.total_ms);
        rows.push(row);
    }
    if rows.len() >= 2 {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.w as f64, r.total_ms.max(1e-3))).collect();
        eprintln!("slope of ln(total_ms) vs w: {:.4} (ln m = {:.4})", log_slope(&pts), (a.m as f64).ln());
    }
    let text = csv(&rows);
    match &a.out {
        Some(path) => write(path, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::Gen(c) => cmd_gen(c),
        Cmd::Gadget(c) => cmd_gadget(c),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("srk: {e}");
            ExitCode::from(2)
        }
    }
}
