use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use super::{
    AnalyticArgs, CliError, GofArgs, GofTarget, Outcome, ReplicateArgs, SimulateArgs, SymmetryArgs,
    EXIT_PASS, EXIT_STATISTICAL, SCHEMA_VERSION, TOOL_VERSION,
};
use crate::analytic::{bertrand_probability, AngularKind, AngularPdf, QFamily, QuadConfig};
use crate::geometry::{fall_turn, Circle};
use crate::montecarlo::{
    collect_chords, collect_trials, run_histogram, run_tally, uniform_edges, EngineConfig,
    EngineError, Estimate, RejectionCounts,
};
use crate::rng::derive_seed;
use crate::samplers::{spinner_angles, stick_release, Method};
use crate::stats::{self, binomial_quantile, StatsError, Z_95};
use crate::symmetry::{run_action, GroupAction, SymmetryError, SymmetryReport, SYMMETRY_THRESHOLD};

/// Bins of the radial goodness-of-fit histogram.
pub const GOF_RADIAL_BINS: usize = 50;
/// Cells per axis of the two-angle goodness-of-fit grid.
pub const GOF_GRID: usize = 8;

/// The hand-performed stick experiment.
pub const RECORDED_ATTEMPTS: u64 = 700;
pub const RECORDED_SUCCESSES: u64 = 363;
pub const RECORDED_LONG: u64 = 123;

const STICK_REPEAT_TAG: u64 = 0x571C_0000;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_n(n: u64) -> Result<(), CliError> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    Ok(())
}

fn circle_of(radius: f64) -> Result<Circle<f64>, CliError> {
    Circle::centered(radius).map_err(|e| usage(format!("--radius: {e}")))
}

fn engine_err(e: EngineError) -> CliError {
    match e {
        EngineError::InvalidConfig(m) => CliError::Usage(m),
        EngineError::Degenerate { .. } => CliError::Degenerate(e.to_string()),
    }
}

fn stats_err(e: StatsError) -> CliError {
    CliError::Degenerate(format!("{e}"))
}

fn to_doc<S: Serialize>(report: &S) -> serde_json::Value {
    serde_json::to_value(report).expect("report serializes")
}

#[derive(Serialize)]
struct EstimateOut {
    p_hat: f64,
    n_hits: u64,
    std_err: f64,
    ci95: [f64; 2],
}

impl From<Estimate> for EstimateOut {
    fn from(e: Estimate) -> Self {
        Self {
            p_hat: e.p_hat,
            n_hits: e.n_hits,
            std_err: e.std_err,
            ci95: [e.ci95.0, e.ci95.1],
        }
    }
}

#[derive(Serialize)]
struct HistogramOut {
    statistic: &'static str,
    bin_edges: Vec<f64>,
    counts: Vec<u64>,
    out_of_range: u64,
}

#[derive(Serialize)]
struct RunReport {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    method: Method,
    seed: u64,
    n_trials: u64,
    n_accepted: u64,
    radius: f64,
    acceptance_rate: f64,
    analytic_probability: String,
    analytic_value: f64,
    estimate: EstimateOut,
    rejections: RejectionCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<HistogramOut>,
}

pub(super) fn simulate(a: &SimulateArgs, seed: u64) -> Result<Outcome, CliError> {
    check_n(a.n)?;
    if a.hist_bins == Some(0) {
        return Err(usage("--hist-bins must be at least 1"));
    }
    let circle = circle_of(a.radius)?;
    let config = EngineConfig::new(a.method, a.n, seed)
        .with_workers(a.common.workers)
        .with_circle(circle);
    let tally = run_tally(&config, &a.method, |c| c.is_longer_than_side()).map_err(engine_err)?;
    let estimate = tally.estimate().map_err(engine_err)?;
    let histogram = match a.hist_bins {
        Some(bins) => {
            let radius = a.radius;
            Some(
                run_histogram(&config, |c| c.length() / radius, &uniform_edges(0.0, 2.0, bins))
                    .map_err(engine_err)?,
            )
        }
        None => None,
    };
    let exact = bertrand_probability(a.method);
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        command: "simulate",
        method: a.method,
        seed,
        n_trials: tally.n_trials,
        n_accepted: tally.n_accepted,
        radius: a.radius,
        acceptance_rate: tally.acceptance_rate(),
        analytic_probability: exact.to_string(),
        analytic_value: *exact.numer() as f64 / *exact.denom() as f64,
        estimate: estimate.into(),
        rejections: tally.rejections,
        histogram: histogram.as_ref().map(|h| HistogramOut {
            statistic: "chord_length_over_radius",
            bin_edges: h.bin_edges.clone(),
            counts: h.counts.clone(),
            out_of_range: h.out_of_range,
        }),
    };
    Ok(Outcome {
        doc: to_doc(&report),
        histogram,
        code: EXIT_PASS,
        notes: Vec::new(),
    })
}

#[derive(Serialize)]
struct GofTest {
    label: String,
    test: &'static str,
    statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dof: Option<usize>,
    p_value: f64,
    passed: bool,
}

impl GofTest {
    fn ks(label: &str, r: stats::KsResult) -> Self {
        Self {
            label: label.into(),
            test: "KS",
            statistic: r.statistic,
            dof: None,
            p_value: r.p_value,
            passed: r.p_value > SYMMETRY_THRESHOLD,
        }
    }

    fn chi(label: &str, r: stats::ChiSqResult) -> Self {
        Self {
            label: label.into(),
            test: "ChiSq",
            statistic: r.statistic,
            dof: Some(r.dof),
            p_value: r.p_value,
            passed: r.p_value > SYMMETRY_THRESHOLD,
        }
    }
}

#[derive(Serialize)]
struct GofReport {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    method: Method,
    target: &'static str,
    seed: u64,
    n_trials: u64,
    n_samples: u64,
    threshold: f64,
    passed: bool,
    tests: Vec<GofTest>,
    failures: Vec<String>,
}

fn resolve_target(method: Method, target: GofTarget) -> Result<GofTarget, CliError> {
    let resolved = match target {
        GofTarget::Auto => match method {
            Method::Straw | Method::RadiusPoint => GofTarget::Q1,
            Method::Dart => GofTarget::Q2,
            Method::Spinner => GofTarget::F1,
            Method::Stick => GofTarget::F2,
        },
        t => t,
    };
    match (resolved, method) {
        (GofTarget::F1, m) if m != Method::Spinner => {
            Err(usage(format!("target f1 is the spinner's (alpha, beta) density; got method {m}")))
        }
        (GofTarget::F2, m) if m != Method::Stick => {
            Err(usage(format!("target f2 is the stick's (psi, fall angle) density; got method {m}")))
        }
        _ => Ok(resolved),
    }
}

fn target_name(t: GofTarget) -> &'static str {
    match t {
        GofTarget::Q1 => "q1",
        GofTarget::Q2 => "q2",
        GofTarget::F1 => "f1",
        GofTarget::F2 => "f2",
        GofTarget::Auto => "auto",
    }
}

fn unit_counts(values: impl Iterator<Item = f64>, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for v in values {
        counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
    }
    counts
}

/// Uniformity of pairs already mapped into `[0, 1)²`: a grid test plus a KS
/// test per coordinate.
fn unit_square_tests(pairs: &[(f64, f64)], names: [&str; 2]) -> Result<Vec<GofTest>, CliError> {
    let mut grid = vec![0u64; GOF_GRID * GOF_GRID];
    for &(x, y) in pairs {
        let i = ((x * GOF_GRID as f64) as usize).min(GOF_GRID - 1);
        let j = ((y * GOF_GRID as f64) as usize).min(GOF_GRID - 1);
        grid[i * GOF_GRID + j] += 1;
    }
    let cells = GOF_GRID * GOF_GRID;
    let chi = stats::chi_square_gof(&grid, &vec![1.0 / cells as f64; cells]).map_err(stats_err)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let uniform = |x: f64| x.clamp(0.0, 1.0);
    Ok(vec![
        GofTest::chi("grid_uniform", chi),
        GofTest::ks(&format!("{}_uniform", names[0]), stats::ks_one_sample(&xs, uniform).map_err(stats_err)?),
        GofTest::ks(&format!("{}_uniform", names[1]), stats::ks_one_sample(&ys, uniform).map_err(stats_err)?),
    ])
}

pub(super) fn gof(a: &GofArgs, seed: u64) -> Result<Outcome, CliError> {
    check_n(a.n)?;
    let target = resolve_target(a.method, a.target)?;
    let circle = circle_of(a.radius)?;
    let config = EngineConfig::new(a.method, a.n, seed)
        .with_workers(a.common.workers)
        .with_circle(circle);
    let (n_samples, tests) = match target {
        GofTarget::Q1 | GofTarget::Q2 => {
            let q = if target == GofTarget::Q1 { 1.0 } else { 2.0 };
            let family = QFamily::new(q, 1.0).expect("q is positive");
            let x: Vec<f64> = collect_chords(&config, &a.method)
                .iter()
                .map(|c| c.relative_r())
                .collect();
            if x.is_empty() {
                return Err(CliError::Degenerate(format!("no accepted chords out of {}", a.n)));
            }
            let edges = uniform_edges(0.0, 1.0, GOF_RADIAL_BINS);
            let probs: Vec<f64> = edges
                .windows(2)
                .map(|w| family.radial_cdf(w[1]) - family.radial_cdf(w[0]))
                .collect();
            let counts = unit_counts(x.iter().copied(), GOF_RADIAL_BINS);
            let chi = stats::chi_square_gof(&counts, &probs).map_err(stats_err)?;
            let ks = stats::ks_one_sample(&x, |v| family.radial_cdf(v)).map_err(stats_err)?;
            (
                x.len() as u64,
                vec![GofTest::chi("radial_histogram", chi), GofTest::ks("radial_cdf", ks)],
            )
        }
        GofTarget::F1 => {
            let pairs: Vec<(f64, f64)> = collect_trials(seed, a.n, a.common.workers, |rng| {
                let (alpha, beta) = spinner_angles::<f64>(rng);
                (alpha / TAU, beta / TAU)
            });
            (pairs.len() as u64, unit_square_tests(&pairs, ["alpha", "beta"])?)
        }
        GofTarget::F2 => {
            let pairs: Vec<(f64, f64)> = collect_trials(seed, a.n, a.common.workers, |rng| {
                let (psi, fall) = stick_release::<f64>(rng);
                let turn = fall_turn(psi, fall);
                (turn.abs() < FRAC_PI_2).then(|| (psi / TAU, (turn + FRAC_PI_2) / PI))
            })
            .into_iter()
            .flatten()
            .collect();
            if pairs.is_empty() {
                return Err(CliError::Degenerate(format!("no successful falls out of {}", a.n)));
            }
            (pairs.len() as u64, unit_square_tests(&pairs, ["psi", "fall_angle"])?)
        }
        GofTarget::Auto => unreachable!("target resolved above"),
    };
    let failures: Vec<String> = tests.iter().filter(|t| !t.passed).map(|t| t.label.clone()).collect();
    let notes = tests
        .iter()
        .filter(|t| !t.passed)
        .map(|t| format!("FAIL {}: {} statistic {:.6}, p = {:.3e}", t.label, t.test, t.statistic, t.p_value))
        .collect();
    let report = GofReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        command: "gof",
        method: a.method,
        target: target_name(target),
        seed,
        n_trials: a.n,
        n_samples,
        threshold: SYMMETRY_THRESHOLD,
        passed: failures.is_empty(),
        tests,
        failures,
    };
    let code = if report.passed { EXIT_PASS } else { EXIT_STATISTICAL };
    Ok(Outcome {
        doc: to_doc(&report),
        histogram: None,
        code,
        notes,
    })
}

#[derive(Serialize)]
struct SymmetryDoc {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    seed: u64,
    n_trials: u64,
    radius: f64,
    reports: Vec<SymmetryReport>,
}

fn default_param(action: &str) -> f64 {
    match action {
        "concentric-scale" | "tangent-scale" => 0.5,
        "shared-lines" | "tangent-translation" => 0.3,
        "shared-points" => 0.4,
        _ => 1.0,
    }
}

pub(super) fn symmetry(a: &SymmetryArgs, seed: u64) -> Result<Outcome, CliError> {
    let param = a.param.unwrap_or_else(|| default_param(&a.action));
    let action = GroupAction::from_name(&a.action, param, a.param2).map_err(|e| usage(e.to_string()))?;
    if !action.applies_to(a.method) {
        return Err(usage(format!(
            "{} is not applicable to {}: {}",
            action.name(),
            a.method,
            action.applicability_rule()
        )));
    }
    check_n(a.n)?;
    let circle = circle_of(a.radius)?;
    let config = EngineConfig::new(a.method, a.n, seed)
        .with_workers(a.common.workers)
        .with_circle(circle);
    let report = run_action(a.method, action, &config).map_err(|e| match e {
        SymmetryError::NotApplicable { .. } | SymmetryError::Precondition(_) => usage(e.to_string()),
        SymmetryError::Engine(e) => engine_err(e),
        SymmetryError::Inconclusive { .. } | SymmetryError::Stats(_) => CliError::Degenerate(e.to_string()),
    })?;
    let code = if report.is_invariant() { EXIT_PASS } else { EXIT_STATISTICAL };
    let notes = if report.is_invariant() {
        Vec::new()
    } else {
        vec![format!("VIOLATED {} for {}", action.name(), a.method)]
    };
    let doc = SymmetryDoc {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        command: "symmetry",
        seed,
        n_trials: a.n,
        radius: a.radius,
        reports: vec![report],
    };
    Ok(Outcome {
        doc: to_doc(&doc),
        histogram: None,
        code,
        notes,
    })
}

#[derive(Serialize)]
struct MethodRow {
    method: Method,
    analytic: String,
    analytic_value: f64,
    n_trials: u64,
    n_accepted: u64,
    p_hat: Option<f64>,
    ci95: Option<[f64; 2]>,
    covers_analytic: Option<bool>,
}

#[derive(Serialize)]
struct SuccessRow {
    n_trials: u64,
    successes: u64,
    rate: f64,
    analytic: &'static str,
    ci95: [f64; 2],
}

/// Predictive checks of the hand-performed counts against one simulated
/// stick run of `n` attempts.
#[derive(Debug, Clone, Serialize)]
pub struct RecordedCheck {
    pub observed_attempts: u64,
    pub observed_successes: u64,
    pub observed_long: u64,
    /// 95% predictive interval for the success count of a fresh run of
    /// `observed_attempts`.
    pub success_interval: [f64; 2],
    pub success_consistent: bool,
    /// 95% predictive interval for the long proportion among
    /// `observed_successes` successes.
    pub long_interval: [f64; 2],
    pub long_consistent: bool,
}

/// Counts from one simulated stick run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StickCounts {
    pub attempts: u64,
    pub successes: u64,
    pub long: u64,
}

pub fn stick_counts(n: u64, seed: u64, workers: usize) -> Result<StickCounts, EngineError> {
    let config = EngineConfig::<f64>::new(Method::Stick, n, seed).with_workers(workers);
    let tally = run_tally(&config, &Method::Stick, |c| c.is_longer_than_side())?;
    Ok(StickCounts {
        attempts: tally.n_trials,
        successes: tally.n_accepted,
        long: tally.n_hits,
    })
}

/// Normal predictive intervals: for a future count `Y ~ Bin(m, p)` with `p`
/// estimated from `k` of `n`, `m p̂ ± z √(m p̂ (1 − p̂) (1 + m/n))`.
pub fn recorded_check(run: StickCounts) -> Option<RecordedCheck> {
    if run.successes == 0 {
        return None;
    }
    let m = RECORDED_ATTEMPTS as f64;
    let p = run.successes as f64 / run.attempts as f64;
    let half = Z_95 * (m * p * (1.0 - p) * (1.0 + m / run.attempts as f64)).sqrt();
    let success_interval = [m * p - half, m * p + half];
    let pl = run.long as f64 / run.successes as f64;
    let half_l = Z_95 * (pl * (1.0 - pl) * (1.0 / run.successes as f64 + 1.0 / RECORDED_SUCCESSES as f64)).sqrt();
    let long_interval = [pl - half_l, pl + half_l];
    let observed_long = RECORDED_LONG as f64 / RECORDED_SUCCESSES as f64;
    let inside = |iv: [f64; 2], x: f64| iv[0] <= x && x <= iv[1];
    Some(RecordedCheck {
        observed_attempts: RECORDED_ATTEMPTS,
        observed_successes: RECORDED_SUCCESSES,
        observed_long: RECORDED_LONG,
        success_interval,
        success_consistent: inside(success_interval, RECORDED_SUCCESSES as f64),
        long_interval,
        long_consistent: inside(long_interval, observed_long),
    })
}

#[derive(Serialize)]
struct ExactQuantiles {
    success_count_95: [u64; 2],
    long_count_95: [u64; 2],
    success_consistent: bool,
    long_consistent: bool,
}

#[derive(Serialize)]
struct Coverage {
    repetitions: u64,
    success_coverage: f64,
    long_coverage: f64,
}

#[derive(Serialize)]
struct ReplicateReport {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    seed: u64,
    n_trials: u64,
    methods: Vec<MethodRow>,
    stick_success: SuccessRow,
    recorded_check: Option<RecordedCheck>,
    exact_model_quantiles: ExactQuantiles,
    coverage: Coverage,
}

/// Seed of stick repetition `i`; repetition 0 is the table's stick row.
pub fn stick_seed(seed: u64, i: u64) -> u64 {
    derive_seed(seed, STICK_REPEAT_TAG + i)
}

fn method_seed(seed: u64, method: Method) -> u64 {
    match method {
        Method::Stick => stick_seed(seed, 0),
        m => derive_seed(seed, Method::ALL.iter().position(|&x| x == m).unwrap() as u64),
    }
}

pub(super) fn replicate(a: &ReplicateArgs, seed: u64) -> Result<Outcome, CliError> {
    check_n(a.n)?;
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let workers = a.common.workers;
    let mut methods = Vec::new();
    for m in Method::ALL {
        let exact = bertrand_probability(m);
        let value = *exact.numer() as f64 / *exact.denom() as f64;
        let config = EngineConfig::<f64>::new(m, a.n, method_seed(seed, m)).with_workers(workers);
        let tally = run_tally(&config, &m, |c| c.is_longer_than_side()).map_err(engine_err)?;
        let est = tally.estimate().ok();
        methods.push(MethodRow {
            method: m,
            analytic: exact.to_string(),
            analytic_value: value,
            n_trials: tally.n_trials,
            n_accepted: tally.n_accepted,
            p_hat: est.map(|e| e.p_hat),
            ci95: est.map(|e| [e.ci95.0, e.ci95.1]),
            covers_analytic: est.map(|e| e.covers(value)),
        });
    }
    let run = stick_counts(a.n, stick_seed(seed, 0), workers).map_err(engine_err)?;
    let rate = Estimate::from_counts(run.successes, run.attempts, run.attempts).map_err(engine_err)?;
    let q = |n: u64, p: f64, prob: f64| binomial_quantile(n, p, prob).expect("valid binomial");
    let success_q = [q(RECORDED_ATTEMPTS, 0.5, 0.025), q(RECORDED_ATTEMPTS, 0.5, 0.975)];
    let long_q = [
        q(RECORDED_SUCCESSES, 1.0 / 3.0, 0.025),
        q(RECORDED_SUCCESSES, 1.0 / 3.0, 0.975),
    ];
    let (mut success_hits, mut long_hits) = (0u64, 0u64);
    for i in 0..a.trials {
        let counts = if i == 0 {
            run
        } else {
            stick_counts(a.n, stick_seed(seed, i), workers).map_err(engine_err)?
        };
        if let Some(c) = recorded_check(counts) {
            success_hits += c.success_consistent as u64;
            long_hits += c.long_consistent as u64;
        }
    }
    let report = ReplicateReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        command: "replicate",
        seed,
        n_trials: a.n,
        methods,
        stick_success: SuccessRow {
            n_trials: run.attempts,
            successes: run.successes,
            rate: rate.p_hat,
            analytic: "1/2",
            ci95: [rate.ci95.0, rate.ci95.1],
        },
        recorded_check: recorded_check(run),
        exact_model_quantiles: ExactQuantiles {
            success_count_95: success_q,
            long_count_95: long_q,
            success_consistent: (success_q[0]..=success_q[1]).contains(&RECORDED_SUCCESSES),
            long_consistent: (long_q[0]..=long_q[1]).contains(&RECORDED_LONG),
        },
        coverage: Coverage {
            repetitions: a.trials,
            success_coverage: success_hits as f64 / a.trials as f64,
            long_coverage: long_hits as f64 / a.trials as f64,
        },
    };
    Ok(Outcome {
        doc: to_doc(&report),
        histogram: None,
        code: EXIT_PASS,
        notes: Vec::new(),
    })
}

#[derive(Serialize)]
struct ExactRow {
    method: Method,
    probability: String,
    value: f64,
}

#[derive(Serialize)]
struct AngularRow {
    density: &'static str,
    value: f64,
    total_mass: f64,
    long_chord_probability: f64,
}

#[derive(Serialize)]
struct FamilyRow {
    q: f64,
    long_chord_probability: f64,
}

#[derive(Serialize)]
struct AnalyticReport {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    methods: Vec<ExactRow>,
    angular: Vec<AngularRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_family: Option<FamilyRow>,
}

pub(super) fn analytic(a: &AnalyticArgs) -> Result<Outcome, CliError> {
    let methods = Method::ALL
        .iter()
        .map(|&m| {
            let p = bertrand_probability(m);
            ExactRow {
                method: m,
                probability: p.to_string(),
                value: *p.numer() as f64 / *p.denom() as f64,
            }
        })
        .collect();
    let quad = QuadConfig::default();
    let mut angular = Vec::new();
    for (name, kind) in [("f1", AngularKind::SpinnerF1), ("f2", AngularKind::StickF2)] {
        let pdf = AngularPdf::<f64>::new(kind);
        let err = |e: crate::analytic::AnalyticError| CliError::Degenerate(e.to_string());
        angular.push(AngularRow {
            density: name,
            value: pdf.value,
            total_mass: pdf.total_mass(quad).map_err(err)?,
            long_chord_probability: pdf.long_chord_probability(quad).map_err(err)?,
        });
    }
    let q_family = match a.q {
        Some(q) => {
            let f = QFamily::new(q, 1.0).map_err(|e| usage(format!("--q: {e}")))?;
            Some(FamilyRow {
                q,
                long_chord_probability: f.long_chord_probability(),
            })
        }
        None => None,
    };
    let report = AnalyticReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        command: "analytic",
        methods,
        angular,
        q_family,
    };
    Ok(Outcome {
        doc: to_doc(&report),
        histogram: None,
        code: EXIT_PASS,
        notes: Vec::new(),
    })
}
