//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use srk::bench::{bench_comb, log_slope};
use srk::combine::{combine_fast, combine_naive, CombineStats};
use srk::compress::{compress, decompress, SigmaDefiningSet};
use srk::dp::{solve_lights_out, solve_with, LightsOutVariant, Observer, SolveOptions};
use srk::gadget::{build_hw_gadget, verify_realization, HwRelation};
use srk::gen::{gen_alloff, gen_grid, gen_random, gen_reflexive_alloff, random_cnf, CnfFormula};
use srk::graph::{heuristic_decomposition, make_nice, Graph, GraphWithPortals, NiceNode};
use srk::lang::Language;
use srk::oracle::{brute_force_sizes, gf2_min_weight, gf2_solve, realized_language_stratified, Gf2System, DEFAULT_KERNEL_CAP};
use srk::residue::{Classification, ProblemSpec};

const RANDOM_GRAPHS: u64 = 500;
const MAX_N: usize = 12;
const EDGE_PROBS: [f64; 3] = [0.2, 0.4, 0.6];
const MODULI: [u32; 3] = [2, 3, 4];
const NODE_LEVEL_INSTANCES: u64 = 60;
const MIN_JOIN_PAIRS: usize = 200;
const JOIN_PAIR_CAP: usize = 1500;
const LANGUAGE_CAP: usize = 4000;
const LIGHTS_OUT_3: usize = 5;
const LIGHTS_OUT_5: usize = 15;
const GADGET_MODULI: [u32; 3] = [3, 4, 5];
const GADGET_MAX_ARITY: usize = 4;
const EXACTLY_ONE_MAX_ARITY: usize = 3;
const SAT_FORMULAS: u64 = 100;
const SAT_MAX_VARS: usize = 6;
const SAT_MAX_CLAUSES: usize = 6;
const REFLEXIVE_WIDTH_CAP: usize = 17;
const PLAIN_WIDTH_CAP: usize = 10;
const SCALING_M: u32 = 3;
const FAST_WIDTHS: std::ops::RangeInclusive<usize> = 8..=14;
const NAIVE_WIDTHS: std::ops::RangeInclusive<usize> = 8..=10;
const SLOPE_TOLERANCE: f64 = 0.20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn all_specs(m: u32) -> impl Iterator<Item = ProblemSpec> {
    (0..m).flat_map(move |a| (0..m).map(move |b| ProblemSpec::residues(a, b, m).unwrap()))
}

fn instance(seed: u64) -> Graph {
    let n = 2 + (seed as usize % (MAX_N - 1));
    let p = EDGE_PROBS[(seed / 11 % 3) as usize];
    gen_random(n, p, seed).unwrap()
}

/// Checks the state bound and keeps DP languages and join pairs for later
/// criteria.
#[derive(Default)]
struct Harvest {
    m: u32,
    nodes: usize,
    violations: usize,
    pairs_seen: usize,
    pairs: Vec<(Language, Language)>,
    languages: Vec<Language>,
}

impl Harvest {
    fn bound(&mut self, node: &NiceNode, row: &[Language]) {
        let cap = (self.m as u64).pow(node.bag.len() as u32);
        self.nodes += 1;
        self.violations += row.iter().filter(|l| l.len() as u64 > cap).count();
    }
}

impl Observer for Harvest {
    fn node_done(&mut self, _t: usize, node: &NiceNode, row: &[Language]) {
        self.bound(node, row);
        if self.languages.len() < LANGUAGE_CAP {
            self.languages.extend(row.iter().filter(|l| l.len() >= 2).take(2).cloned());
        }
    }

    fn join_pair(&mut self, _t: usize, left: &Language, right: &Language, _result: &Language, _stats: &CombineStats) {
        if left.is_empty() || right.is_empty() {
            return;
        }
        self.pairs_seen += 1;
        if self.pairs.len() < JOIN_PAIR_CAP && self.pairs_seen.is_multiple_of(5) {
            self.pairs.push((left.clone(), right.clone()));
        }
    }
}

struct NodeCheck<'a> {
    g: &'a Graph,
    subtree: Vec<Vec<usize>>,
    spec: ProblemSpec,
    mismatches: usize,
    comparisons: usize,
    harvest: &'a mut Harvest,
}

impl Observer for NodeCheck<'_> {
    fn node_done(&mut self, t: usize, node: &NiceNode, row: &[Language]) {
        self.harvest.bound(node, row);
        let vt = &self.subtree[t];
        let portals: Vec<usize> = node.bag.iter().map(|v| vt.binary_search(v).unwrap()).collect();
        let gp = GraphWithPortals::new(self.g.induced(vt), portals).unwrap();
        let want = realized_language_stratified(&gp, self.spec, None).unwrap();
        self.comparisons += want.len().max(row.len());
        if row.len() != want.len() {
            self.mismatches += 1;
            return;
        }
        self.mismatches += row.iter().zip(&want).filter(|(a, b)| a != b).count();
    }
}

fn criterion_1(h: &mut Harvest) -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    let mut bad = Vec::new();
    for seed in 0..RANDOM_GRAPHS {
        let g = instance(seed);
        let nice = make_nice(&heuristic_decomposition(&g));
        for m in MODULI {
            h.m = m;
            for spec in all_specs(m) {
                let dp = solve_with(&g, &nice, spec, None, &SolveOptions::default(), h).unwrap();
                let brute = brute_force_sizes(&g, spec, None).unwrap();
                runs += 1;
                if dp.feasible != brute {
                    bad.push(format!("seed {seed} {spec}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 300.0,
        format!(
            "{RANDOM_GRAPHS} graphs, {runs} spec runs, {} mismatches{}, {secs:.1}s",
            bad.len(),
            bad.first().map_or(String::new(), |b| format!(" (first: {b})"))
        ),
    )
}

fn criterion_2(h: &mut Harvest) -> Outcome {
    let mut mismatches = 0;
    let mut comparisons = 0;
    let mut nodes = 0;
    for seed in 0..NODE_LEVEL_INSTANCES {
        let g = instance(seed);
        let nice = make_nice(&heuristic_decomposition(&g));
        let m = MODULI[(seed % 3) as usize];
        let spec = ProblemSpec::residues((seed / 3 % m as u64) as u32, (seed / 7 % m as u64) as u32, m).unwrap();
        h.m = m;
        let mut check = NodeCheck {
            g: &g,
            subtree: nice.subtree_vertices(),
            spec,
            mismatches: 0,
            comparisons: 0,
            harvest: h,
        };
        let opts = SolveOptions {
            debug_checks: true,
            ..SolveOptions::default()
        };
        solve_with(&g, &nice, spec, None, &opts, &mut check).unwrap();
        mismatches += check.mismatches;
        comparisons += check.comparisons;
        nodes += nice.len();
    }
    outcome(
        mismatches == 0,
        format!("{NODE_LEVEL_INSTANCES} instances, {nodes} nodes, {comparisons} (node, size) languages, {mismatches} mismatches"),
    )
}

fn criterion_3(h: &Harvest) -> Outcome {
    outcome(
        h.violations == 0 && h.nodes > 0,
        format!("{} node tables checked against m^|X_t|, {} violations", h.nodes, h.violations),
    )
}

fn criterion_4(h: &Harvest) -> Outcome {
    let mut bad = 0;
    let mut biggest = 0;
    for (l, r) in &h.pairs {
        let fast = combine_fast(l, r).unwrap();
        let naive = combine_naive(l, r).unwrap();
        biggest = biggest.max(l.len() * r.len());
        if fast != naive {
            bad += 1;
        }
    }
    outcome(
        bad == 0 && h.pairs.len() >= MIN_JOIN_PAIRS,
        format!(
            "{} harvested pairs (of {} seen), largest |L1|·|L2| = {biggest}, {bad} mismatches",
            h.pairs.len(),
            h.pairs_seen
        ),
    )
}

fn round_trips(l: &Language) -> (usize, usize) {
    let p = l.packing();
    let m = l.modulus();
    let sds = SigmaDefiningSet::compute(l.string_len(), &l.sigma_masks());
    let (mut checked, mut failed) = (0, 0);
    for (_, group) in l.groups() {
        let mut vectors: Vec<Vec<u32>> = group.iter().map(|&w| p.unpack(w)).collect();
        vectors.sort();
        let o = &vectors[0];
        for u in &vectors {
            checked += 1;
            if decompress(&sds, m, &compress(&sds, u), o).unwrap() != *u {
                failed += 1;
            }
        }
    }
    (checked, failed)
}

fn criterion_5(h: &Harvest) -> Outcome {
    let mut checked = 0;
    let mut failed = 0;
    let mut langs = 0;
    let pair_langs = h.pairs.iter().flat_map(|(l, r)| [l, r]);
    for l in h.languages.iter().chain(pair_langs) {
        let (c, f) = round_trips(l);
        checked += c;
        failed += f;
        langs += 1;
    }
    outcome(
        failed == 0 && checked > 0,
        format!("{langs} languages, {checked} strings round-tripped, {failed} failures"),
    )
}

fn lights_out_min(rows: usize, cols: usize, brute: bool) -> (Option<usize>, Option<usize>, Option<Option<usize>>) {
    let (g, td) = gen_grid(rows, cols).unwrap();
    let sys = Gf2System::lights_out(&g, LightsOutVariant::Reflexive, vec![true; g.n()]).unwrap();
    let gf2 = gf2_solve(&sys).and_then(|s| gf2_min_weight(&s.particular, &s.kernel, DEFAULT_KERNEL_CAP));
    let dp = solve_lights_out(&g, &make_nice(&td), LightsOutVariant::Reflexive, None).unwrap().min;
    let bf = brute.then(|| {
        brute_force_sizes(&g, LightsOutVariant::Reflexive.spec(), None)
            .unwrap()
            .iter()
            .position(|&b| b)
    });
    (gf2, dp, bf)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (g3, d3, b3) = lights_out_min(3, 3, true);
    let (g5, d5, _) = lights_out_min(5, 5, false);
    let secs = start.elapsed().as_secs_f64();
    let pass = g3 == Some(LIGHTS_OUT_3)
        && d3 == g3
        && b3 == Some(g3)
        && g5 == Some(LIGHTS_OUT_5)
        && d5 == g5
        && secs < 10.0;
    outcome(
        pass,
        format!("3x3: gf2={g3:?} dp={d3:?} brute={:?}; 5x5: gf2={g5:?} dp={d5:?}; {secs:.2}s", b3.flatten()),
    )
}

fn criterion_7() -> Outcome {
    let mut specs = 0;
    let mut checks = 0;
    let mut failures = Vec::new();
    for m in GADGET_MODULI {
        for spec in all_specs(m) {
            if spec.classify().unwrap() != Classification::Difficult {
                continue;
            }
            specs += 1;
            for k in 1..=GADGET_MAX_ARITY {
                let gp = build_hw_gadget(spec, k).unwrap();
                let rel = HwRelation::for_gadget(spec, k);
                checks += 1;
                if !verify_realization(&gp, &rel, spec).unwrap() {
                    failures.push(format!("{spec} k={k} {rel}"));
                }
                if k <= EXACTLY_ONE_MAX_ARITY {
                    checks += 1;
                    if !verify_realization(&gp, &HwRelation::exactly_one(k), spec).unwrap() {
                        failures.push(format!("{spec} k={k} HW=1"));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty() && specs > 0,
        format!(
            "{specs} difficult specs, {checks} realizations (weights ≡ 1 mod m), {} failures{}",
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(" (first: {f})"))
        ),
    )
}

fn satisfiable(phi: &CnfFormula) -> bool {
    (0u32..1 << phi.vars()).any(|a| {
        phi.clauses().iter().all(|c| {
            c.iter().any(|&lit| {
                let value = a >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    })
}

fn reduction_agrees(phi: &CnfFormula, sat: bool, reflexive: bool) -> Result<usize, String> {
    let (red, spec, cap) = if reflexive {
        (gen_reflexive_alloff(phi, Some(3)), ProblemSpec::reflexive_all_off(), REFLEXIVE_WIDTH_CAP)
    } else {
        (gen_alloff(phi, Some(3)), ProblemSpec::all_off(), PLAIN_WIDTH_CAP)
    };
    let red = red.map_err(|e| e.to_string())?;
    let width = red.decomposition.width();
    let bound = if reflexive { (1 << 3) + 3 + phi.vars() } else { phi.vars() + 3 + 1 };
    if width > bound || width > cap {
        return Err(format!("width {width} over {bound}"));
    }
    let opts = SolveOptions {
        max_size: Some(red.target_size),
        ..SolveOptions::default()
    };
    let report = solve_with(&red.graph, &make_nice(&red.decomposition), spec, None, &opts, &mut ()).map_err(|e| e.to_string())?;
    if report.feasible_within(red.target_size) != sat {
        return Err(format!("sat={sat} but dp says {}", !sat));
    }
    Ok(width)
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut formulas: Vec<CnfFormula> = (0..SAT_FORMULAS)
        .map(|seed| {
            let vars = 2 + (seed as usize % (SAT_MAX_VARS - 1));
            let clauses = 1 + (seed as usize / 5 % SAT_MAX_CLAUSES);
            random_cnf(vars, clauses, 3, seed).unwrap()
        })
        .collect();
    // Short unsatisfiable formulas, padded to width 3 by the reduction.
    formulas.push(CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap());
    formulas.push(CnfFormula::new(2, vec![vec![1, 2], vec![1, -2], vec![-1, 2], vec![-1, -2]]).unwrap());
    formulas.push(CnfFormula::new(3, vec![vec![1], vec![-1, 2], vec![-2, 3], vec![-3]]).unwrap());
    let mut failures = Vec::new();
    let (mut sat_count, mut widths) = (0, [0usize; 2]);
    for (i, phi) in formulas.iter().enumerate() {
        let sat = satisfiable(phi);
        sat_count += usize::from(sat);
        for (j, reflexive) in [true, false].into_iter().enumerate() {
            match reduction_agrees(phi, sat, reflexive) {
                Ok(w) => widths[j] = widths[j].max(w),
                Err(e) => failures.push(format!("formula {i} {}: {e}", if reflexive { "reflexive" } else { "plain" })),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 600.0,
        format!(
            "{} formulas ({SAT_FORMULAS} random, {sat_count} satisfiable), max widths {}/{}, {} failures{}, {secs:.1}s",
            formulas.len(),
            widths[0],
            widths[1],
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(" (first: {f})"))
        ),
    )
}

fn sweep(widths: std::ops::RangeInclusive<usize>, naive: bool) -> (f64, bool, Vec<String>) {
    let mut pts = Vec::new();
    let mut within = true;
    let mut cells = Vec::new();
    for w in widths {
        let repeats = if w <= 11 { 3 } else { 2 };
        let row = bench_comb(SCALING_M, w, naive, repeats).unwrap();
        within &= row.max_states <= (SCALING_M as u64).pow(w as u32);
        cells.push(format!("{w}:{:.0}ms", row.total_ms));
        pts.push((w as f64, row.total_ms.max(1e-3)));
    }
    (log_slope(&pts), within, cells)
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let (fast, fast_ok, fast_cells) = sweep(FAST_WIDTHS, false);
    let (naive, naive_ok, naive_cells) = sweep(NAIVE_WIDTHS, true);
    let target = (SCALING_M as f64).ln();
    let secs = start.elapsed();
    let pass = fast_ok
        && naive_ok
        && (fast - target).abs() <= SLOPE_TOLERANCE * target
        && naive > fast
        && secs < Duration::from_secs(1800);
    outcome(
        pass,
        format!(
            "fast slope {fast:.3} vs ln 3 = {target:.3} (±{:.0}%), naive slope {naive:.3}, states ≤ 3^w: {}; fast [{}] naive [{}]; {:.1}s",
            SLOPE_TOLERANCE * 100.0,
            fast_ok && naive_ok,
            fast_cells.join(" "),
            naive_cells.join(" "),
            secs.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let mut harvest = Harvest::default();
    let mut results = Vec::new();
    let mut run = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let o = f();
        println!("{} {id} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push(o.pass);
    };
    run(1, "oracle-equivalence", &mut || criterion_1(&mut harvest));
    run(2, "node-languages", &mut || criterion_2(&mut harvest));
    run(3, "state-bound", &mut || criterion_3(&harvest));
    run(4, "fast-join", &mut || criterion_4(&harvest));
    run(5, "compression-round-trip", &mut || criterion_5(&harvest));
    run(6, "lights-out", &mut criterion_6);
    run(7, "gadgets", &mut criterion_7);
    run(8, "sat-reductions", &mut criterion_8);
    run(9, "scaling", &mut criterion_9);
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
