//! Command-line front end: `trace`, `verify`, `surface` and `conics`.

use std::cmp::Ordering;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{concurrences, predictability, ConcurrenceSextet, Family};
use crate::angle::{parse_angle, parse_scalar, MixingAngle};
use crate::entanglement::{random_qubit_unitary, reduce, wootters_concurrence, QubitPair};
use crate::family::{FamilyRegistry, Oracle, StateFamily};
use crate::geometry::{
    common_death_window, detect_death_birth, locate_death_birth_coincidence, phi_conic_parameters,
    shell_bounds, surface_sample, CheckStatus, ConicDescriptor, DeathReport, RelationCheck,
    ShellBounds, ZeroInterval, LINE_TOL,
};
use crate::hilbert::{PropagatorRegistry, SpaceConfig, Subsystem};
use crate::table::{format_float, write_surface_csv, write_surface_json, TraceTable};

const PHI_SHELL_TOL: f64 = 1e-9;
const DELTA_TAU_TOL: f64 = 1e-6;
const WINDOW_ZERO_TOL: f64 = 1e-10;
const THRESHOLD_TOL: f64 = 1e-3;
const THRESHOLD_FOCUS_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-9;
const UNITARY_SAMPLES: usize = 10;
/// Death detection samples at least this many points per 2π.
const DEATH_SAMPLES_PER_PERIOD: f64 = 4096.0;

#[derive(Debug, Parser)]
#[command(name = "djcm", version, about = "Entanglement dynamics of two atom-cavity pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the six concurrences along one trajectory.
    Trace(RunArgs),
    /// Run every relation, bound, oracle and conic check and write a report.
    Verify(RunArgs),
    /// Sample the concurrence surface of one qubit over (alpha, gt).
    Surface(RunArgs),
    /// Compare closed-form conic parameters with those extracted geometrically.
    Conics(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// State family.
    #[arg(long, default_value = "psi")]
    pub family: String,
    /// Mixing angle in radians; accepts pi/4, 3*pi/10, atan(1/2). Repeatable.
    #[arg(long, value_parser = parse_angle)]
    pub alpha: Vec<MixingAngle>,
    /// Number of evenly spaced angles over [0, pi/2].
    #[arg(long, default_value_t = 65)]
    pub alpha_grid: usize,
    #[arg(long, default_value = "2*pi", value_parser = parse_scalar)]
    pub gt_max: f64,
    /// Number of gt samples over [0, gt-max], both ends included.
    #[arg(long, default_value_t = 257)]
    pub gt_steps: usize,
    /// Atom-field coupling.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Atomic and cavity frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Photon-number cutoff of each cavity.
    #[arg(long, default_value_t = 1)]
    pub nmax: usize,
    /// Overrides every relation and shell tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for the random local unitaries.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Qubit whose surface is sampled: A, B, a or b.
    #[arg(long, default_value = "A", value_parser = parse_qubit)]
    pub qubit: Subsystem,
    /// Numerical time evolver for the oracle.
    #[arg(long, default_value = "expm")]
    pub propagator: String,
    /// Allowed closed-form versus oracle deviation.
    #[arg(long, default_value_t = 1e-8)]
    pub oracle_tol: f64,
    /// Angles in the oracle grid.
    #[arg(long, default_value_t = 33)]
    pub oracle_alphas: usize,
    /// gt samples in the oracle grid.
    #[arg(long, default_value_t = 65)]
    pub oracle_gts: usize,
}

fn parse_qubit(s: &str) -> Result<Subsystem, String> {
    Subsystem::from_label(s).ok_or_else(|| format!("unknown qubit `{s}` (expected A, B, a or b)"))
}

/// Validated run parameters, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub family: Family,
    pub alphas: Vec<MixingAngle>,
    pub gt_max: f64,
    pub gt_steps: usize,
    pub g: f64,
    pub omega: f64,
    pub nmax: usize,
    pub tol: Option<f64>,
    pub seed: u64,
    pub propagator: String,
    pub oracle_tol: f64,
    pub oracle_alphas: usize,
    pub oracle_gts: usize,
    pub qubit: String,
}

/// `count` points over [0, max], both ends included.
pub fn phase_grid(max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|j| j as f64 * max / (count - 1) as f64).collect(),
    }
}

struct RunContext {
    cfg: RunConfig,
    family: Box<dyn StateFamily>,
    space: SpaceConfig,
    gts: Vec<f64>,
    format: Format,
    out: Option<PathBuf>,
}

fn prepare(args: &RunArgs, alphas: Vec<MixingAngle>, default_format: Format) -> Result<RunContext> {
    let family = FamilyRegistry::builtin().create(&args.family)?;
    if alphas.is_empty() {
        bail!("the angle grid is empty");
    }
    if args.gt_steps == 0 {
        bail!("--gt-steps must be at least 1");
    }
    if !(args.gt_max.is_finite() && args.gt_max >= 0.0) {
        bail!("--gt-max must be finite and non-negative");
    }
    if let Some(tol) = args.tol {
        if tol.is_nan() || tol <= 0.0 {
            bail!("--tol must be positive");
        }
    }
    if args.oracle_tol.is_nan() || args.oracle_tol <= 0.0 {
        bail!("--oracle-tol must be positive");
    }
    let space = SpaceConfig::new(args.nmax, args.omega, args.g)?;
    PropagatorRegistry::builtin().create(&args.propagator, &space)?;
    let cfg = RunConfig {
        family: family.family(),
        alphas,
        gt_max: args.gt_max,
        gt_steps: args.gt_steps,
        g: args.g,
        omega: args.omega,
        nmax: args.nmax,
        tol: args.tol,
        seed: args.seed,
        propagator: args.propagator.clone(),
        oracle_tol: args.oracle_tol,
        oracle_alphas: args.oracle_alphas,
        oracle_gts: args.oracle_gts,
        qubit: args.qubit.label().to_string(),
    };
    Ok(RunContext {
        gts: phase_grid(args.gt_max, args.gt_steps),
        family,
        space,
        format: args.format.unwrap_or(default_format),
        out: args.out.clone(),
        cfg,
    })
}

fn emit(out: &Option<PathBuf>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn trajectory(family: &dyn StateFamily, alpha: &MixingAngle, gts: &[f64]) -> Vec<ConcurrenceSextet> {
    gts.iter().map(|&gt| family.concurrences(alpha, gt)).collect()
}

/// Grid angles plus the branch points and any explicitly requested angles.
fn verification_angles(args: &RunArgs) -> Vec<MixingAngle> {
    let mut extra = MixingAngle::special_points().to_vec();
    extra.extend(args.alpha.iter().copied());
    MixingAngle::merge_grid(MixingAngle::uniform_grid(args.alpha_grid), &extra)
}

/// Runs a parsed command. Returns `false` when a hard check failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Trace(args) => cmd_trace(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Surface(args) => cmd_surface(&args),
        Command::Conics(args) => cmd_conics(&args),
    }
}

pub fn cmd_trace(args: &RunArgs) -> Result<bool> {
    let alpha = match args.alpha.as_slice() {
        [alpha] => *alpha,
        [] => bail!("trace needs one --alpha"),
        _ => bail!("trace takes a single --alpha"),
    };
    let ctx = prepare(args, vec![alpha], Format::Csv)?;
    let trace = trajectory(ctx.family.as_ref(), &alpha, &ctx.gts);
    let table = TraceTable::from_trace(&trace, ctx.cfg.family, &alpha, ctx.cfg.g, ctx.cfg.omega);
    emit(&ctx.out, |w| match ctx.format {
        Format::Csv => Ok(table.write_csv(w)?),
        Format::Json => Ok(table.write_json(w)?),
    })?;
    Ok(true)
}

pub fn cmd_surface(args: &RunArgs) -> Result<bool> {
    let alphas = if args.alpha.is_empty() {
        MixingAngle::uniform_grid(args.alpha_grid)
    } else {
        args.alpha.clone()
    };
    let ctx = prepare(args, alphas, Format::Csv)?;
    let mesh = surface_sample(ctx.cfg.family, args.qubit, &ctx.cfg.alphas, &ctx.gts);
    emit(&ctx.out, |w| match ctx.format {
        Format::Csv => Ok(write_surface_csv(&mesh, w)?),
        Format::Json => Ok(write_surface_json(&mesh, w)?),
    })?;
    Ok(true)
}

#[derive(Debug, Serialize)]
pub struct ConicsReport {
    pub family: Family,
    pub passed: bool,
    pub descriptors: Vec<ConicDescriptor>,
}

pub fn cmd_conics(args: &RunArgs) -> Result<bool> {
    let alphas = if args.alpha.is_empty() {
        verification_angles(args)
    } else {
        args.alpha.clone()
    };
    let ctx = prepare(args, alphas, Format::Json)?;
    let descriptors: Vec<ConicDescriptor> = ctx
        .cfg
        .alphas
        .iter()
        .flat_map(|a| ctx.family.conic_parameters(a))
        .collect();
    let passed = descriptors.iter().all(ConicDescriptor::passed);
    let report = ConicsReport {
        family: ctx.cfg.family,
        passed,
        descriptors,
    };
    emit(&ctx.out, |w| match ctx.format {
        Format::Json => write_json(w, &report),
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(w);
            writer.write_record([
                "id", "alpha", "quantity", "formula", "geometric", "difference", "tolerance", "agrees", "binding",
            ])?;
            for d in &report.descriptors {
                for c in &d.checks {
                    writer.write_record([
                        d.id.clone(),
                        format_float(d.alpha.radians()),
                        c.quantity.clone(),
                        format_float(c.formula),
                        format_float(c.geometric),
                        format_float(c.difference),
                        format_float(c.tolerance),
                        c.agrees.to_string(),
                        c.binding.to_string(),
                    ])?;
                }
            }
            writer.flush()?;
            Ok(())
        }
    })?;
    Ok(passed)
}

#[derive(Debug, Serialize)]
pub struct AngleRelations {
    pub alpha: MixingAngle,
    pub checks: Vec<RelationCheck>,
}

/// Worst case of one relation over all angles.
#[derive(Debug, Serialize)]
pub struct RelationSummary {
    pub id: String,
    pub max_residual: f64,
    pub worst_alpha: Option<f64>,
    pub evaluated: usize,
    pub total: usize,
    pub status: CheckStatus,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub propagator: String,
    pub nmax: usize,
    pub alpha_points: usize,
    pub gt_points: usize,
    pub max_deviation: f64,
    pub worst_alpha: f64,
    pub worst_gt: f64,
    pub worst_pair: String,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct DeathEntry {
    pub alpha: MixingAngle,
    pub reports: Vec<DeathReport>,
    /// First interval where AB, ab, Ab and aB all vanish.
    pub window: Option<ZeroInterval>,
    pub delta_tau: Option<f64>,
    pub expected_delta_tau: Option<f64>,
    pub difference: Option<f64>,
    pub window_clean: Option<bool>,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct ThresholdReport {
    pub located_alpha: Option<f64>,
    pub expected_alpha: f64,
    pub difference: Option<f64>,
    pub tolerance: f64,
    pub p0: f64,
    pub focal_formula: Option<f64>,
    pub focal_geometric: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct InvarianceReport {
    pub seed: u64,
    pub states: usize,
    pub unitaries_per_state: usize,
    pub max_variation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub family: Family,
    pub passed: bool,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    pub config: RunConfig,
    pub relation_summary: Vec<RelationSummary>,
    pub relations: Vec<AngleRelations>,
    pub shells: Vec<ShellBounds>,
    pub oracle: OracleReport,
    pub conics: Vec<ConicDescriptor>,
    pub death: Vec<DeathEntry>,
    pub threshold: Option<ThresholdReport>,
    pub local_unitary: InvarianceReport,
}

fn summarize(relations: &[AngleRelations]) -> Vec<RelationSummary> {
    let mut out: Vec<RelationSummary> = Vec::new();
    for entry in relations {
        for check in &entry.checks {
            let pos = match out.iter().position(|s| s.id == check.id) {
                Some(pos) => pos,
                None => {
                    out.push(RelationSummary {
                        id: check.id.clone(),
                        max_residual: 0.0,
                        worst_alpha: None,
                        evaluated: 0,
                        total: 0,
                        status: CheckStatus::SkippedDegenerate,
                    });
                    out.len() - 1
                }
            };
            let s = &mut out[pos];
            s.evaluated += check.evaluated;
            s.total += check.total;
            if check.evaluated > 0 && (s.worst_alpha.is_none() || check.max_residual > s.max_residual) {
                s.max_residual = check.max_residual;
                s.worst_alpha = Some(entry.alpha.radians());
            }
            s.status = match (s.status, check.status) {
                (CheckStatus::Fail, _) | (_, CheckStatus::Fail) => CheckStatus::Fail,
                (CheckStatus::Pass, _) | (_, CheckStatus::Pass) => CheckStatus::Pass,
                (CheckStatus::Vacuous, _) | (_, CheckStatus::Vacuous) => CheckStatus::Vacuous,
                _ => CheckStatus::SkippedDegenerate,
            };
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

fn run_oracle(ctx: &RunContext) -> Result<OracleReport> {
    let propagator = PropagatorRegistry::builtin().create(&ctx.cfg.propagator, &ctx.space)?;
    let oracle = Oracle::new(ctx.space, propagator);
    let alphas = MixingAngle::uniform_grid(ctx.cfg.oracle_alphas);
    let gts = phase_grid(ctx.cfg.gt_max, ctx.cfg.oracle_gts);
    let mut worst = (0.0, 0.0, 0.0, String::from("-"));
    for alpha in &alphas {
        for &gt in &gts {
            let numeric = oracle.sextet(ctx.family.as_ref(), alpha, gt)?;
            let closed = ctx.family.concurrences(alpha, gt);
            for (pair, (n, c)) in QubitPair::ALL.iter().zip(numeric.values().iter().zip(closed.values())) {
                let d = (n - c).abs();
                if d > worst.0 {
                    worst = (d, alpha.radians(), gt, pair.label());
                }
            }
        }
    }
    Ok(OracleReport {
        propagator: oracle.propagator_name().to_string(),
        nmax: ctx.cfg.nmax,
        alpha_points: alphas.len(),
        gt_points: gts.len(),
        max_deviation: worst.0,
        worst_alpha: worst.1,
        worst_gt: worst.2,
        worst_pair: worst.3,
        tolerance: ctx.cfg.oracle_tol,
        passed: worst.0 <= ctx.cfg.oracle_tol,
    })
}

fn death_entry(family: Family, alpha: &MixingAngle, gts: &[f64]) -> DeathEntry {
    let reports: Vec<DeathReport> = QubitPair::ALL
        .iter()
        .map(|&pair| detect_death_birth(family, alpha, pair, gts))
        .collect();
    let quartet: Vec<DeathReport> = reports
        .iter()
        .filter(|r| r.pair != QubitPair::ARM_A && r.pair != QubitPair::ARM_B)
        .cloned()
        .collect();
    let window = common_death_window(&quartet).first().copied();
    let applies = family == Family::Phi && alpha.is_interior() && alpha.cmp_tan_ratio(1, 2) == Ordering::Less;
    let expected = applies.then(|| {
        let t = alpha.tan().sqrt();
        t.acos() - t.asin()
    });
    let delta_tau = window.map(|w| w.length());
    let difference = match (delta_tau, expected) {
        (Some(d), Some(e)) => Some((d - e).abs()),
        _ => None,
    };
    let window_clean = window.map(|w| {
        let mid = concurrences(family, alpha, 0.5 * (w.start + w.end));
        let v = mid.values();
        [0, 1, 4, 5].iter().all(|&k| v[k] < WINDOW_ZERO_TOL) && v[2] > 0.0 && v[3] > 0.0
    });
    let passed = !applies || (difference.is_some_and(|d| d <= DELTA_TAU_TOL) && window_clean == Some(true));
    DeathEntry {
        alpha: *alpha,
        reports,
        window,
        delta_tau,
        expected_delta_tau: expected,
        difference,
        window_clean,
        passed,
    }
}

fn threshold_report() -> ThresholdReport {
    use std::f64::consts::PI;
    let expected = 0.5f64.atan();
    let gts = phase_grid(PI, 1025);
    let located = locate_death_birth_coincidence(PI / 12.0, PI / 5.0, &gts, 1e-10);
    let difference = located.map(|a| (a - expected).abs());
    let alpha0 = MixingAngle::atan_half();
    let p0 = predictability(Family::Phi, &alpha0).p0;
    let ellipse = phi_conic_parameters(&alpha0)
        .into_iter()
        .find(|d| d.id == "phi.ellipse_arm");
    let focal = ellipse.as_ref().and_then(|d| d.check_named("focal_distance"));
    let focal_formula = focal.map(|c| c.formula);
    let focal_geometric = focal.map(|c| c.geometric);
    let passed = difference.is_some_and(|d| d <= THRESHOLD_TOL)
        && (p0 - 0.6).abs() <= 1e-12
        && focal_formula.is_some_and(|f| f.abs() <= THRESHOLD_FOCUS_TOL)
        && focal_geometric.is_some_and(|f| f.abs() <= THRESHOLD_FOCUS_TOL);
    ThresholdReport {
        located_alpha: located,
        expected_alpha: expected,
        difference,
        tolerance: THRESHOLD_TOL,
        p0,
        focal_formula,
        focal_geometric,
        passed,
    }
}

/// Largest change of any pair concurrence under random local unitaries.
pub fn local_unitary_variation(
    family: &dyn StateFamily,
    space: &SpaceConfig,
    points: &[(MixingAngle, f64)],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for (alpha, gt) in points {
        let state = family.state(alpha, *gt, space);
        for pair in QubitPair::ALL {
            let rho = reduce(&state, pair, space)?;
            let base = wootters_concurrence(&rho)?;
            for _ in 0..samples {
                let u1 = random_qubit_unitary(&mut rng);
                let u2 = random_qubit_unitary(&mut rng);
                let c = wootters_concurrence(&rho.conjugate_by(&u1, &u2)?)?;
                worst = worst.max((c - base).abs());
            }
        }
    }
    Ok(worst)
}

pub fn verify(args: &RunArgs) -> Result<VerifyReport> {
    let ctx = prepare(args, verification_angles(args), Format::Json)?;
    let family = ctx.family.as_ref();
    let fam = ctx.cfg.family;
    let mut failures = Vec::new();
    let mut warnings = Vec::new();

    let mut relations = Vec::new();
    let mut shells = Vec::new();
    let shell_tol = ctx.cfg.tol.unwrap_or(match fam {
        Family::Psi => LINE_TOL,
        Family::Phi => PHI_SHELL_TOL,
    });
    for alpha in &ctx.cfg.alphas {
        let trace = trajectory(family, alpha, &ctx.gts);
        let checks = family.relation_residuals(&trace, alpha, ctx.cfg.tol);
        for c in checks.iter().filter(|c| !c.passed()) {
            failures.push(format!("relation {} at alpha={alpha}: residual {:e}", c.id, c.max_residual));
        }
        relations.push(AngleRelations { alpha: *alpha, checks });
        let shell = shell_bounds(&trace, fam, alpha, shell_tol);
        if !shell.contained {
            failures.push(format!(
                "shell at alpha={alpha}: observed [{:e}, {:e}] outside [{:e}, {:e}]",
                shell.observed_min, shell.observed_max, shell.lower, shell.upper
            ));
        }
        shells.push(shell);
    }

    let oracle = run_oracle(&ctx)?;
    if !oracle.passed {
        failures.push(format!(
            "oracle: deviation {:e} at alpha={}, gt={}, pair {}",
            oracle.max_deviation, oracle.worst_alpha, oracle.worst_gt, oracle.worst_pair
        ));
    }

    let conics: Vec<ConicDescriptor> = ctx.cfg.alphas.iter().flat_map(|a| family.conic_parameters(a)).collect();
    for d in &conics {
        for c in d.checks.iter().filter(|c| !c.agrees) {
            let msg = format!(
                "conic {} {} at alpha={}: formula {:e}, geometric {:e}",
                d.id, c.quantity, d.alpha, c.formula, c.geometric
            );
            if c.binding {
                failures.push(msg);
            } else {
                warnings.push(msg);
            }
        }
    }

    let mut death = Vec::new();
    let mut threshold = None;
    if family.has_sudden_death() {
        let periods = (ctx.cfg.gt_max / std::f64::consts::TAU).max(1.0);
        let samples = ctx.cfg.gt_steps.max((DEATH_SAMPLES_PER_PERIOD * periods).ceil() as usize + 1);
        let dense = phase_grid(ctx.cfg.gt_max, samples);
        for alpha in &ctx.cfg.alphas {
            let entry = death_entry(fam, alpha, &dense);
            if !entry.passed {
                failures.push(format!(
                    "death window at alpha={alpha}: detected {:?}, expected {:?}",
                    entry.delta_tau, entry.expected_delta_tau
                ));
            }
            death.push(entry);
        }
        let t = threshold_report();
        if !t.passed {
            failures.push(format!("death/birth threshold: located {:?}", t.located_alpha));
        }
        threshold = Some(t);
    }

    let probe: Vec<(MixingAngle, f64)> = [
        MixingAngle::atan_third(),
        MixingAngle::from_radians(std::f64::consts::PI / 5.0),
        MixingAngle::from_radians(1.2),
    ]
    .into_iter()
    .flat_map(|a| [0.4, 1.1, 2.3].map(|gt| (a, gt)))
    .collect();
    let variation = local_unitary_variation(family, &ctx.space, &probe, UNITARY_SAMPLES, ctx.cfg.seed)?;
    let local_unitary = InvarianceReport {
        seed: ctx.cfg.seed,
        states: probe.len(),
        unitaries_per_state: UNITARY_SAMPLES,
        max_variation: variation,
        tolerance: UNITARY_TOL,
        passed: variation <= UNITARY_TOL,
    };
    if !local_unitary.passed {
        failures.push(format!("local unitary invariance: variation {variation:e}"));
    }

    Ok(VerifyReport {
        family: fam,
        passed: failures.is_empty(),
        failures,
        warnings,
        relation_summary: summarize(&relations),
        relations,
        shells,
        oracle,
        conics,
        death,
        threshold,
        local_unitary,
        config: ctx.cfg,
    })
}

pub fn cmd_verify(args: &RunArgs) -> Result<bool> {
    let report = verify(args)?;
    if matches!(args.format, Some(Format::Csv)) {
        bail!("verify writes JSON only");
    }
    emit(&args.out, |w| write_json(w, &report))?;
    for failure in &report.failures {
        eprintln!("FAILED {failure}");
    }
    Ok(report.passed)
}

