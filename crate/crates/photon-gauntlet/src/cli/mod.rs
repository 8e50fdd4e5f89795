//! The `photon-gauntlet` command line.
//!
//! Five subcommands over one scenario format:
//!
//! * `analytic`: closed-form statistics.
//! * `simulate`: seeded Monte Carlo with a per-cell z-gate against the
//!   closed forms.
//! * `oracle`: exact-enumeration cross-check (small instances only).
//! * `compare`: separate vs bunched emission on the same shells, with the
//!   amplification ratio; both simulation legs share the seed (common
//!   random numbers).
//! * `sweep`: the inequality verdict over a parameter grid, one CSV row per
//!   grid point.
//!
//! Output contract: with no `--out`, the value table goes to stdout as CSV.
//! With `--out PATH`, the CSV is written to PATH and a JSON document with
//! the structured sections lands next to it (extension swapped to `.json`;
//! pass a `.json` path to flip the roles). `sweep` writes its grid CSV
//! only. Verdict and notice lines go to stderr, never stdout, so piped CSV
//! stays parseable. Reports carry nothing machine- or time-dependent: a
//! rerun with the same scenario, seed, and flags is byte-identical at any
//! worker count.
//!
//! Seed resolution order: `--seed` flag, then the `PHOTON_SEED` environment
//! variable, then the scenario file. `analytic` and `oracle` ignore seeds
//! entirely.
//!
//! Exit codes: 0 success; 1 I/O failure; 2 invalid input (unreadable or
//! invalid scenario, bad flags or sweep specs, instance over the oracle
//! guards); 3 verification failure (simulate z-gate or oracle cross-check).

pub mod report;
pub mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::analytic::{
    absorb_probabilities, all_k_detect, bunched_detected_distribution,
    bunched_survivor_distribution, detect_probability, detect_probability_recurrent,
    inequality_report, m_of_k_distribution, reach_probability, CountDistribution,
    InequalityVerdict, COMPARISON_TOLERANCE,
};
use crate::montecarlo::{run_experiment, ExperimentResult};
use crate::oracle::{cross_check, enumerate_bunched, enumerate_separate};
use crate::scenario::{load_scenario, validate, Scenario, ScenarioError, ValidatedScenario};
use crate::stats::{
    amplification_from_tails, bunching_amplification, compare_to_analytic, summarize,
    wilson_interval, Amplification, ComparisonReport, SummaryStats, Z_95,
};

use report::{
    render_csv, LabeledComparison, LabeledSummary, Rows, RunReport, ScenarioEcho, ValuePath,
};
use sweep::{apply_point, cartesian, parse_axis, SweepAxis};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

/// Full pmfs can be wide; CSV reports carry at most this many cells per
/// distribution and a `*_truncated` flag beyond that. JSON sections are
/// never truncated.
const PMF_ROW_CAP: u32 = 32;

#[derive(Debug, Parser)]
#[command(
    name = "photon-gauntlet",
    version,
    about = "Photon counting through chains of single-capacity absorbers: \
             closed forms, exact oracle, seeded Monte Carlo"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form statistics for a scenario.
    Analytic {
        /// Scenario TOML file.
        #[arg(long, value_name = "FILE")]
        scenario: PathBuf,
        /// Write CSV here and a JSON twin next to it (stdout if absent).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run seeded trials and gate them against the closed forms.
    Simulate {
        #[arg(long, value_name = "FILE")]
        scenario: PathBuf,
        /// Trials to run (overrides the scenario file).
        #[arg(long)]
        trials: Option<u64>,
        /// RNG seed (overrides PHOTON_SEED and the scenario file).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 means all available. Never changes results.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Per-cell |z| gate for the verdict.
        #[arg(long = "tol-z", default_value_t = 3.0)]
        tol_z: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Cross-check the closed forms against exact enumeration.
    Oracle {
        #[arg(long, value_name = "FILE")]
        scenario: PathBuf,
        /// Largest tolerated |closed form - exact| gap.
        #[arg(long, default_value_t = COMPARISON_TOLERANCE)]
        tol: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Separate vs bunched emission on the same shells.
    Compare {
        #[arg(long, value_name = "FILE")]
        scenario: PathBuf,
        /// Trials per leg (overrides the scenario file); 0 skips simulation.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long = "tol-z", default_value_t = 3.0)]
        tol_z: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Evaluate the inequality verdict over a parameter grid.
    Sweep {
        #[arg(long, value_name = "FILE")]
        scenario: PathBuf,
        /// Axis spec `field=start:stop:step`; repeatable. Fields: q_<i>,
        /// q_d, k, a.
        #[arg(long = "sweep", value_name = "FIELD=START:STOP:STEP", required = true)]
        axes: Vec<String>,
        /// Write the grid CSV here (stdout if absent). No JSON twin.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// A command that cannot proceed: exit code plus a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn io(message: String) -> Self {
        Failure { code: EXIT_IO, message }
    }

    fn input(message: String) -> Self {
        Failure { code: EXIT_INPUT, message }
    }
}

/// Parse the real command line, run it, and exit with the contract code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Dispatch a parsed command; returns the exit code for successful runs.
pub fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analytic { scenario, out } => cmd_analytic(&scenario, out.as_deref()),
        Command::Simulate { scenario, trials, seed, workers, tol_z, out } => {
            cmd_simulate(&scenario, trials, seed, workers, tol_z, out.as_deref())
        }
        Command::Oracle { scenario, tol, out } => cmd_oracle(&scenario, tol, out.as_deref()),
        Command::Compare { scenario, trials, seed, workers, tol_z, out } => {
            cmd_compare(&scenario, trials, seed, workers, tol_z, out.as_deref())
        }
        Command::Sweep { scenario, axes, out } => cmd_sweep(&scenario, &axes, out.as_deref()),
    }
}

fn scenario_failure(err: &ScenarioError) -> Failure {
    let code = match err {
        ScenarioError::Io { .. } => EXIT_IO,
        _ => EXIT_INPUT,
    };
    Failure { code, message: err.to_string() }
}

fn load_base(path: &Path) -> Result<Scenario, Failure> {
    load_scenario(path).map_err(|e| scenario_failure(&e))
}

/// `--seed` beats `PHOTON_SEED`; an unset environment leaves the file value.
fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("PHOTON_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Failure::input(format!("PHOTON_SEED must be an unsigned integer, got `{raw}`"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Failure::input("PHOTON_SEED is not valid UTF-8".to_string()))
        }
    }
}

fn load_validated(
    path: &Path,
    trials: Option<u64>,
    seed: Option<u64>,
) -> Result<ValidatedScenario, Failure> {
    let mut scenario = load_base(path)?;
    if let Some(t) = trials {
        scenario.trials = t;
    }
    if let Some(s) = seed {
        scenario.seed = s;
    }
    validate(&scenario).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn twin_paths(path: &Path) -> (PathBuf, PathBuf) {
    let wants_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if wants_json {
        (path.with_extension("csv"), path.to_path_buf())
    } else {
        (path.to_path_buf(), path.with_extension("json"))
    }
}

fn write_outputs(out: Option<&Path>, csv: &str, report: &RunReport) -> Result<(), Failure> {
    let Some(path) = out else {
        print!("{csv}");
        return Ok(());
    };
    let (csv_path, json_path) = twin_paths(path);
    let mut json = serde_json::to_string_pretty(report)
        .expect("report serializes: no non-string map keys beyond integers");
    json.push('\n');
    std::fs::write(&csv_path, csv)
        .map_err(|e| Failure::io(format!("{}: {e}", csv_path.display())))?;
    std::fs::write(&json_path, json)
        .map_err(|e| Failure::io(format!("{}: {e}", json_path.display())))?;
    Ok(())
}

struct AnalyticBundle {
    rows: Rows,
    verdict: InequalityVerdict,
    amplification: Amplification,
    summaries: Vec<LabeledSummary>,
    separate: CountDistribution,
    bunched: CountDistribution,
}

fn summary_rows(rows: &mut Rows, prefix: &str, path: ValuePath, stats: &SummaryStats) {
    rows.float(format!("{prefix}mean"), path, stats.mean);
    rows.float(format!("{prefix}variance"), path, stats.variance);
    if let Some(fano) = stats.fano {
        rows.float(format!("{prefix}fano"), path, fano);
    }
    if let Some(q) = stats.mandel_q {
        rows.float(format!("{prefix}mandel_q"), path, q);
    }
}

fn analytic_bundle(v: &ValidatedScenario) -> AnalyticBundle {
    use ValuePath::Analytic as A;
    let qv = v.qv();
    let k = v.photons_k();
    let shells = qv.absorber_count();
    let mut rows = Rows::new();

    for (i, &q) in qv.absorber_qs().iter().enumerate() {
        rows.float(format!("q_{}", i + 1), A, q);
    }
    rows.float("q_d", A, qv.detector_q());
    for (i, &p) in absorb_probabilities(qv).iter().enumerate() {
        rows.float(format!("absorb_probability_{}", i + 1), A, p);
    }
    rows.float(
        "reach_detector",
        A,
        reach_probability(qv, shells + 1).expect("detector surface index is in range"),
    );
    let p_detect = detect_probability(qv);
    rows.float("detect_probability", A, p_detect);
    rows.float("detect_probability_recurrent", A, detect_probability_recurrent(qv));
    rows.float("all_k_detect", A, all_k_detect(qv, k));
    rows.int("photons_k", A, u64::from(k));

    let verdict = inequality_report(qv, k);
    rows.int("event_m", A, u64::from(verdict.event_m));

    let separate = m_of_k_distribution(p_detect, k);
    let survivors = bunched_survivor_distribution(qv, k);
    let bunched = bunched_detected_distribution(qv, k);
    rows.int("survivor_floor", A, u64::from(survivors.floor()));

    for m in 0..=k.min(PMF_ROW_CAP) {
        rows.float(format!("separate_pmf_{m}"), A, separate.pmf(m));
    }
    if k > PMF_ROW_CAP {
        rows.flag("separate_pmf_truncated", A, true);
    }
    let survivor_top = k.min(survivors.floor().saturating_add(PMF_ROW_CAP));
    for s in survivors.floor()..=survivor_top {
        rows.float(format!("survivor_pmf_{s}"), A, survivors.probability(s));
    }
    if survivor_top < k {
        rows.flag("survivor_pmf_truncated", A, true);
    }
    for m in 0..=k.min(PMF_ROW_CAP) {
        rows.float(format!("bunched_pmf_{m}"), A, bunched.pmf(m));
    }
    if k > PMF_ROW_CAP {
        rows.flag("bunched_pmf_truncated", A, true);
    }

    rows.float("p_separate", A, verdict.p_separate);
    rows.float("p_bunched", A, verdict.p_bunched);
    rows.float("p_vacuum", A, verdict.p_vacuum);
    rows.float("vacuum_power_bound", A, verdict.vacuum_power_bound);
    rows.flag("ordering_holds", A, verdict.ordering_holds);
    rows.flag("degenerate_vacuum", A, verdict.degenerate_vacuum);

    let amplification = bunching_amplification(&separate, &bunched, verdict.event_m)
        .expect("matching supports and event_m >= 1");
    if let Some(value) = amplification.value() {
        rows.float("amplification", A, value);
    }

    let separate_stats = summarize(&separate).expect("pmf has mass");
    let bunched_stats = summarize(&bunched).expect("pmf has mass");
    summary_rows(&mut rows, "separate_", A, &separate_stats);
    summary_rows(&mut rows, "bunched_", A, &bunched_stats);

    AnalyticBundle {
        rows,
        verdict,
        amplification,
        summaries: vec![
            LabeledSummary { label: "separate_analytic".to_string(), stats: separate_stats },
            LabeledSummary { label: "bunched_analytic".to_string(), stats: bunched_stats },
        ],
        separate,
        bunched,
    }
}

struct McSection {
    rows: Rows,
    comparison: ComparisonReport,
    result: ExperimentResult,
    summary: SummaryStats,
}

fn mc_section(
    v: &ValidatedScenario,
    expected: &CountDistribution,
    workers: usize,
    tol_z: f64,
    prefix: &str,
    event_m: u32,
) -> Result<McSection, Failure> {
    use ValuePath::Montecarlo as M;
    let result = run_experiment(v, workers).map_err(|e| Failure::input(e.to_string()))?;
    let comparison = compare_to_analytic(&result.detected, expected, tol_z)
        .map_err(|e| Failure::input(e.to_string()))?;
    let summary = summarize(&result.detected).map_err(|e| Failure::input(e.to_string()))?;

    let mut rows = Rows::new();
    let n = result.trials;
    for cell in &comparison.cells {
        let ci = wilson_interval(cell.observed, n, Z_95).expect("trials >= 1");
        rows.float_ci(
            format!("{prefix}detected_fraction_{}", cell.count),
            M,
            cell.observed_fraction,
            ci,
        );
    }
    let tail_tally: u64 = result
        .detected
        .counts()
        .range(event_m..)
        .map(|(_, &c)| c)
        .sum();
    let tail_ci = wilson_interval(tail_tally, n, Z_95).expect("trials >= 1");
    rows.float_ci(
        format!("{prefix}detected_at_least_{event_m}"),
        M,
        tail_tally as f64 / n as f64,
        tail_ci,
    );
    for (&s, &c) in result.survivors.counts() {
        rows.float(format!("{prefix}survivor_fraction_{s}"), M, c as f64 / n as f64);
    }
    rows.int(format!("{prefix}min_survivors"), M, u64::from(result.min_survivors));
    for (i, &captures) in result.absorbed_per_shell.iter().enumerate() {
        rows.float(
            format!("{prefix}absorbed_per_trial_{}", i + 1),
            M,
            captures as f64 / n as f64,
        );
    }
    rows.float(format!("{prefix}max_abs_z"), M, comparison.max_abs_z);
    rows.float(format!("{prefix}max_abs_deviation"), M, comparison.max_abs_deviation);
    rows.float(format!("{prefix}chi_square"), M, comparison.chi_square);
    rows.int(format!("{prefix}chi_square_df"), M, comparison.chi_square_df as u64);
    rows.flag(format!("{prefix}comparison_pass"), M, comparison.pass);
    summary_rows(&mut rows, &format!("{prefix}empirical_"), M, &summary);

    Ok(McSection { rows, comparison, result, summary })
}

fn cmd_analytic(path: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let v = load_validated(path, None, None)?;
    let bundle = analytic_bundle(&v);
    let mut report = RunReport::new("analytic", ScenarioEcho::from_validated(&v));
    report.inequality = Some(bundle.verdict);
    report.amplification = Some(bundle.amplification);
    report.summaries = bundle.summaries;
    report.values = bundle.rows.into_vec();
    let csv = render_csv(&report.values);
    write_outputs(out, &csv, &report)?;
    Ok(EXIT_OK)
}

fn cmd_simulate(
    path: &Path,
    trials: Option<u64>,
    seed: Option<u64>,
    workers: usize,
    tol_z: f64,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let seed = resolve_seed(seed)?;
    let v = load_validated(path, trials, seed)?;
    let bundle = analytic_bundle(&v);
    let expected = match v.emission_mode() {
        crate::scenario::EmissionMode::Separate => &bundle.separate,
        crate::scenario::EmissionMode::Bunched => &bundle.bunched,
    };
    let mc = mc_section(&v, expected, workers, tol_z, "", bundle.verdict.event_m)?;

    let mut rows = bundle.rows;
    rows.int("trials", ValuePath::Montecarlo, mc.result.trials);
    rows.int("seed", ValuePath::Montecarlo, v.seed());
    rows.int(
        "survivor_floor_observed",
        ValuePath::Montecarlo,
        u64::from(mc.result.min_survivors),
    );
    rows.extend(mc.rows);

    let mut report = RunReport::new("simulate", ScenarioEcho::from_validated(&v));
    report.inequality = Some(bundle.verdict);
    report.amplification = Some(bundle.amplification);
    report.summaries = bundle.summaries;
    report
        .summaries
        .push(LabeledSummary { label: "detected_empirical".to_string(), stats: mc.summary });
    report.comparisons.push(LabeledComparison {
        label: "detected_vs_analytic".to_string(),
        report: mc.comparison.clone(),
    });
    report.values = rows.into_vec();

    let csv = render_csv(&report.values);
    write_outputs(out, &csv, &report)?;
    let pass = mc.comparison.pass;
    eprintln!(
        "verdict: {} (max |z| = {:.4}, gate {})",
        if pass { "pass" } else { "fail" },
        mc.comparison.max_abs_z,
        tol_z
    );
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_oracle(path: &Path, tol: f64, out: Option<&Path>) -> Result<u8, Failure> {
    use ValuePath::Oracle as O;
    let v = load_validated(path, None, None)?;
    let k = v.photons_k();
    let qv = v.qv();
    let check = cross_check(qv, k, tol).map_err(|e| Failure::input(e.to_string()))?;
    let bundle = analytic_bundle(&v);

    let mut rows = bundle.rows;
    let exact_separate = enumerate_separate(qv, k).expect("guards already passed");
    let exact_bunched = enumerate_bunched(qv, k).expect("guards already passed");
    for (m, p) in exact_separate.to_f64_vec().into_iter().enumerate() {
        rows.float(format!("separate_pmf_{m}"), O, p);
    }
    for (s, p) in exact_bunched.survivors.to_f64_vec().into_iter().enumerate() {
        rows.float(format!("survivor_pmf_{s}"), O, p);
    }
    for (m, p) in exact_bunched.detected.to_f64_vec().into_iter().enumerate() {
        rows.float(format!("bunched_pmf_{m}"), O, p);
    }
    rows.int("event_m", O, u64::from(check.event_m));
    rows.float("p_separate", O, check.p_separate);
    rows.float("p_bunched", O, check.p_bunched);
    rows.float("p_vacuum", O, check.p_vacuum);
    rows.float("vacuum_power_bound", O, check.vacuum_power_bound);
    rows.flag("ordering_holds", O, check.ordering_holds_exact);
    rows.flag("degenerate_vacuum", O, check.degenerate_vacuum);
    rows.float("fate_deviation", O, check.fate_deviation);
    rows.float("separate_deviation", O, check.separate_deviation);
    rows.float("survivor_deviation", O, check.survivor_deviation);
    rows.float("detected_deviation", O, check.detected_deviation);
    rows.float("inequality_deviation", O, check.inequality_deviation);
    rows.float("max_abs_deviation", O, check.max_abs_deviation);
    rows.float("tol", O, tol);
    rows.flag("cross_check_pass", O, check.pass);

    let mut report = RunReport::new("oracle", ScenarioEcho::from_validated(&v));
    report.inequality = Some(bundle.verdict);
    report.amplification = Some(bundle.amplification);
    report.summaries = bundle.summaries;
    report.oracle = Some(check.clone());
    report.values = rows.into_vec();

    let csv = render_csv(&report.values);
    write_outputs(out, &csv, &report)?;
    eprintln!(
        "cross-check: {} (max deviation = {:e}, tol {:e})",
        if check.pass { "pass" } else { "fail" },
        check.max_abs_deviation,
        tol
    );
    Ok(if check.pass { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_compare(
    path: &Path,
    trials: Option<u64>,
    seed: Option<u64>,
    workers: usize,
    tol_z: f64,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let seed = resolve_seed(seed)?;
    let mut base = load_base(path)?;
    if let Some(t) = trials {
        base.trials = t;
    }
    if let Some(s) = seed {
        base.seed = s;
    }

    let mut separate_leg = base.clone();
    separate_leg.emission.mode = crate::scenario::EmissionMode::Separate;
    let mut bunched_leg = base;
    bunched_leg.emission.mode = crate::scenario::EmissionMode::Bunched;

    let v_separate = validate(&separate_leg)
        .map_err(|e| Failure::input(format!("{} (separate leg): {e}", path.display())))?;
    let v_bunched = validate(&bunched_leg)
        .map_err(|e| Failure::input(format!("{} (bunched leg): {e}", path.display())))?;

    let bundle = analytic_bundle(&v_bunched);
    let event_m = bundle.verdict.event_m;
    let mut rows = bundle.rows;
    let mut report = RunReport::new("compare", ScenarioEcho::from_validated(&v_bunched));

    let mut all_pass = true;
    if v_bunched.trials() > 0 {
        rows.int("trials", ValuePath::Montecarlo, v_bunched.trials());
        rows.int("seed", ValuePath::Montecarlo, v_bunched.seed());
        let mc_sep =
            mc_section(&v_separate, &bundle.separate, workers, tol_z, "separate_", event_m)?;
        let mc_bun =
            mc_section(&v_bunched, &bundle.bunched, workers, tol_z, "bunched_", event_m)?;
        let amp_empirical = amplification_from_tails(
            mc_sep.result.detected.tail_fraction_at_least(event_m),
            mc_bun.result.detected.tail_fraction_at_least(event_m),
        );
        rows.extend(mc_sep.rows);
        rows.extend(mc_bun.rows);
        if let Some(value) = amp_empirical.value() {
            rows.float("amplification_empirical", ValuePath::Montecarlo, value);
        }
        all_pass = mc_sep.comparison.pass && mc_bun.comparison.pass;
        eprintln!(
            "separate verdict: {} (max |z| = {:.4}, gate {})",
            if mc_sep.comparison.pass { "pass" } else { "fail" },
            mc_sep.comparison.max_abs_z,
            tol_z
        );
        eprintln!(
            "bunched verdict: {} (max |z| = {:.4}, gate {})",
            if mc_bun.comparison.pass { "pass" } else { "fail" },
            mc_bun.comparison.max_abs_z,
            tol_z
        );
        report.comparisons.push(LabeledComparison {
            label: "separate_vs_analytic".to_string(),
            report: mc_sep.comparison,
        });
        report.comparisons.push(LabeledComparison {
            label: "bunched_vs_analytic".to_string(),
            report: mc_bun.comparison,
        });
        report
            .summaries
            .push(LabeledSummary { label: "separate_empirical".to_string(), stats: mc_sep.summary });
        report
            .summaries
            .push(LabeledSummary { label: "bunched_empirical".to_string(), stats: mc_bun.summary });
        report.amplification_empirical = Some(amp_empirical);
    }

    let verdict = &bundle.verdict;
    let mut chain = format!(
        "p_separate={:.6} p_bunched={:.6} p_vacuum={:.6} bound={:.6} ordering_holds={}",
        verdict.p_separate,
        verdict.p_bunched,
        verdict.p_vacuum,
        verdict.vacuum_power_bound,
        verdict.ordering_holds
    );
    if let Some(value) = bundle.amplification.value() {
        chain.push_str(&format!(" amplification={value:.6}"));
    }
    eprintln!("{chain}");
    if verdict.degenerate_vacuum {
        eprintln!("note: degenerate vacuum (every shell has q = 0); the disciplines coincide");
    }

    report.inequality = Some(bundle.verdict);
    report.amplification = Some(bundle.amplification);
    let mut summaries = bundle.summaries;
    summaries.append(&mut report.summaries);
    report.summaries = summaries;
    report.values = rows.into_vec();

    let csv = render_csv(&report.values);
    write_outputs(out, &csv, &report)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY })
}

fn describe_point(axes: &[SweepAxis], point: &[f64]) -> String {
    axes.iter()
        .zip(point)
        .map(|(axis, &value)| format!("{}={}", axis.field.name(), value))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_sweep(path: &Path, axis_specs: &[String], out: Option<&Path>) -> Result<u8, Failure> {
    let base = load_base(path)?;
    let axes: Vec<SweepAxis> = axis_specs
        .iter()
        .map(|spec| parse_axis(spec).map_err(|e| Failure::input(e.to_string())))
        .collect::<Result<_, _>>()?;

    let mut csv = String::new();
    for axis in &axes {
        csv.push_str(&axis.field.name());
        csv.push(',');
    }
    csv.push_str("p_separate,p_bunched,p_vacuum,vacuum_power_bound,ordering_holds,amplification\n");

    for point in cartesian(&axes) {
        let scenario = apply_point(&base, &axes, &point)
            .map_err(|e| Failure::input(e.to_string()))?;
        let v = validate(&scenario).map_err(|e| {
            Failure::input(format!("grid point [{}]: {e}", describe_point(&axes, &point)))
        })?;
        let verdict = inequality_report(v.qv(), v.photons_k());
        for (axis, &value) in axes.iter().zip(&point) {
            if axis.field.is_integer() {
                csv.push_str(&format!("{}", value.round() as u64));
            } else {
                csv.push_str(&format!("{value:e}"));
            }
            csv.push(',');
        }
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{},",
            verdict.p_separate,
            verdict.p_bunched,
            verdict.p_vacuum,
            verdict.vacuum_power_bound,
            verdict.ordering_holds
        ));
        if let Some(value) =
            amplification_from_tails(verdict.p_separate, verdict.p_bunched).value()
        {
            csv.push_str(&format!("{value:e}"));
        }
        csv.push('\n');
    }

    match out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}
