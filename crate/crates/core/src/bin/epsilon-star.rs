//! Command-line front end. Exit status: 0 on success, 2 for input errors
//! (flags, files, parameters), 3 for numerical failures on valid input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use epsilon_star::epsilon::{audit_detailed, Method};
use epsilon_star::goodness_of_fit::{fit_quality_sweep, sweep_to_csv};
use epsilon_star::io::{
    default_out_dir, header_kind, read_loss_file, to_json_pretty, write_atomic, AuditConfig, AuditReport,
    DeltaPolicy, LossFileKind, Manifest, MechanismDocument, Provenance,
};
use epsilon_star::landscape::{
    aggregate_strategies, emit_landscape, marginals_by_dp, pareto_frontier, FrontierObjective, InstanceScore,
    LandscapeFormat,
};
use epsilon_star::loss_model::{LossRole, LossSet, DEFAULT_ALPHA};
use epsilon_star::mechanism::{default_t_grid, mechanism_audit, EnsembleRates};
use epsilon_star::simulation::{run_shift_experiment, SimConfig};
use epsilon_star::{Error, ErrorClass, Result};

#[derive(Parser)]
#[command(name = "epsilon-star", version, about = "Empirical privacy auditing from model loss samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Epsilon* of one model from training and population loss files.
    Audit(AuditArgs),
    /// Known-Gamma simulation comparing the true, empirical and parametric estimates.
    Simulate(SimulateArgs),
    /// Mechanism-level bound over the model instances listed in a manifest.
    Mechanism(MechanismArgs),
    /// Hold-out Kolmogorov-Smirnov check of Gaussian-mixture fits to a loss file.
    Ksfit(KsfitArgs),
    /// Privacy-utility landscape and frontier over the strategies in a manifest.
    Landscape(LandscapeArgs),
}

#[derive(Args)]
struct CommonAudit {
    /// Probability in [0, 1) or `auto` for 1 / (n ln n).
    #[arg(long, default_value = "auto")]
    delta: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Parametric)]
    method: MethodArg,
    /// Thresholds for the ecdf method.
    #[arg(long, default_value_t = epsilon_star::epsilon::DEFAULT_GRID_SIZE)]
    grid_size: usize,
    /// Shift added after normalizing losses to [0, 1].
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Reject saturated predictions instead of clipping them.
    #[arg(long)]
    no_clip: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Parametric,
    Ecdf,
    Discrete,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Parametric => Method::Parametric,
            MethodArg::Ecdf => Method::Ecdf,
            MethodArg::Discrete => Method::Discrete,
        }
    }
}

impl CommonAudit {
    fn config(&self) -> Result<AuditConfig> {
        let cfg = AuditConfig {
            delta: self.delta.parse::<DeltaPolicy>()?,
            method: self.method.into(),
            grid_size: self.grid_size,
            alpha_shift: self.alpha,
            clip_predictions: !self.no_clip,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    pop: PathBuf,
    #[command(flatten)]
    common: CommonAudit,
    /// Require files with a `loss` column.
    #[arg(long, conflicts_with = "predictions")]
    losses: bool,
    /// Require files with prediction columns and a label.
    #[arg(long)]
    predictions: bool,
    /// Report path; defaults to audit.json in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 2.0)]
    k1: f64,
    #[arg(long, default_value_t = 5.0)]
    theta1: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    d_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Upper limit on the ecdf threshold grid.
    #[arg(long, default_value_t = epsilon_star::epsilon::DEFAULT_GRID_SIZE)]
    ecdf_grid_cap: usize,
    /// Also write simulation.svg.
    #[arg(long)]
    svg: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct MechanismArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Probability in [0, 1) or `auto` (from the smallest training set).
    #[arg(long, default_value = "auto")]
    delta: String,
    /// Shared false positive rate levels in [0.001, 0.999].
    #[arg(long, default_value_t = 1000)]
    grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    no_clip: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KsfitArgs {
    /// Loss file to fit.
    #[arg(long)]
    losses: PathBuf,
    /// Component counts: a list `1,2,5` or a range `1..5` (inclusive).
    #[arg(long, default_value = "1..5")]
    components: String,
    /// Hold-out sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "500")]
    samples: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_clip: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LandscapeArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    common: CommonAudit,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Mean)]
    objective: ObjectiveArg,
    /// Output formats, comma separated: json, csv, svg.
    #[arg(long, value_delimiter = ',', default_value = "json,csv,svg")]
    format: Vec<String>,
    #[arg(long, default_value_t = 128)]
    kde_points: usize,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Mean,
    Max,
}

fn out_path(explicit: &Option<PathBuf>, name: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| default_out_dir().join(name))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn read_checked(path: &Path, role: LossRole, clip: bool, want: Option<bool>) -> Result<LossSet> {
    if let Some(want_losses) = want {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        let is_losses = matches!(header_kind(&text), Some(LossFileKind::Losses));
        if is_losses != want_losses {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                message: if want_losses {
                    "--losses expects a `loss` header".into()
                } else {
                    "--predictions expects a `prediction,label` or `p_0,...,label` header".into()
                },
            });
        }
    }
    read_loss_file(path, role, clip)
}

fn audit(a: AuditArgs) -> Result<()> {
    let cfg = a.common.config()?;
    let want = match (a.losses, a.predictions) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    };
    let train = read_checked(&a.train, LossRole::Training, cfg.clip_predictions, want)?;
    let pop = read_checked(&a.pop, LossRole::Population, cfg.clip_predictions, want)?;
    let outcome = audit_detailed(&train, &pop, &cfg)?;
    let prov = Provenance::new(
        &cfg,
        vec![cfg.seed],
        vec![a.train.display().to_string(), a.pop.display().to_string()],
    )?;
    let report = AuditReport::new(outcome, prov);
    println!("{}", report.epsilon_star());
    write_text(&out_path(&a.out, "audit.json"), &to_json_pretty(&report)?)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let cfg = SimConfig {
        k1: a.k1,
        theta1: a.theta1,
        d_values: a.d_list,
        n_values: a.n_list,
        repeats: a.repeats,
        delta: a.delta,
        seed: a.seed,
        ecdf_grid_cap: a.ecdf_grid_cap,
    };
    let result = run_shift_experiment(&cfg)?;
    let dir = a.out_dir.unwrap_or_else(default_out_dir);
    write_text(&dir.join("simulation.csv"), &result.to_csv())?;
    write_text(&dir.join("simulation_summary.json"), &(result.summary_json()? + "\n"))?;
    if a.svg {
        write_text(&dir.join("simulation.svg"), &result.to_svg())?;
    }
    Ok(())
}

fn load_pairs(manifest: &Manifest, clip: bool) -> Result<Vec<(LossSet, LossSet)>> {
    manifest.check_paths()?;
    manifest
        .entries
        .par_iter()
        .map(|e| {
            Ok((
                read_loss_file(&manifest.resolve(&e.train), LossRole::Training, clip)?,
                read_loss_file(&manifest.resolve(&e.pop), LossRole::Population, clip)?,
            ))
        })
        .collect()
}

fn mechanism(a: MechanismArgs) -> Result<()> {
    let manifest = Manifest::load(&a.manifest)?;
    let pairs = load_pairs(&manifest, !a.no_clip)?;
    let policy: DeltaPolicy = a.delta.parse()?;
    let n_min = pairs.iter().map(|(tr, _)| tr.len()).min().unwrap_or(0);
    let delta = policy.resolve(n_min)?;
    if a.grid_points == 0 {
        return Err(Error::Domain("--grid-points must be positive".into()));
    }
    let ensemble = EnsembleRates::from_loss_sets(default_t_grid(a.grid_points), &pairs, a.alpha)?;
    let report = mechanism_audit(&ensemble, delta)?;
    println!("{}", report.epsilon_bar);
    let config = serde_json::json!({
        "delta": policy,
        "delta_resolved": delta,
        "grid_points": a.grid_points,
        "alpha_shift": a.alpha,
        "clip_predictions": !a.no_clip,
    });
    let inputs = vec![a.manifest.display().to_string()];
    let doc = MechanismDocument::new(
        manifest.entries.iter().map(|e| e.model_id.clone()).collect(),
        report,
        Provenance::new(&config, vec![], inputs)?,
    );
    write_text(&out_path(&a.out, "mechanism.json"), &to_json_pretty(&doc)?)
}

fn parse_components(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Domain(format!("--components must be a list like 1,2,5 or a range like 1..5, got `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi): (usize, usize) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
    }
}

fn ksfit(a: KsfitArgs) -> Result<()> {
    let losses = read_loss_file(&a.losses, LossRole::Population, !a.no_clip)?;
    let components = parse_components(&a.components)?;
    let reports = fit_quality_sweep(losses.values(), &components, &a.samples, a.seed)?;
    let passing = reports.iter().filter(|r| r.passes_alpha).count();
    for r in reports.iter().filter(|r| r.floored) {
        eprintln!(
            "warning: {} components on {} samples hit the variance floor",
            r.n_components, r.n_samples
        );
    }
    println!("{passing}/{} fits pass at alpha = 0.05", reports.len());
    write_text(&out_path(&a.out, "ksfit.csv"), &sweep_to_csv(&reports))
}

fn landscape(a: LandscapeArgs) -> Result<()> {
    let formats = a
        .format
        .iter()
        .map(|f| f.parse::<LandscapeFormat>())
        .collect::<Result<Vec<_>>>()?;
    let cfg = a.common.config()?;
    let manifest = Manifest::load(&a.manifest)?;
    for e in &manifest.entries {
        if e.utility.is_none() {
            return Err(Error::Manifest(format!("model `{}` has no utility", e.model_id)));
        }
    }
    let pairs = load_pairs(&manifest, cfg.clip_predictions)?;
    let eps = pairs
        .par_iter()
        .map(|(tr, po)| Ok(audit_detailed(tr, po, &cfg)?.result.epsilon_star))
        .collect::<Result<Vec<f64>>>()?;
    let instances: Vec<InstanceScore> = manifest
        .entries
        .iter()
        .zip(eps)
        .map(|(e, eps)| InstanceScore {
            strategy: e.strategy_id().to_string(),
            utility: e.utility.unwrap_or_default(),
            epsilon_star: eps,
            tags: e.tags.clone(),
        })
        .collect();
    let points = aggregate_strategies(&instances)?;
    let objective = match a.objective {
        ObjectiveArg::Mean => FrontierObjective::Mean,
        ObjectiveArg::Max => FrontierObjective::Max,
    };
    let frontier = pareto_frontier(&points, objective)?;
    let marginals = marginals_by_dp(&points, a.kde_points);
    println!("frontier: {}", frontier.dominance_set.join(" "));
    let dir = a.out_dir.unwrap_or_else(default_out_dir);
    for f in formats {
        let text = emit_landscape(&points, &frontier, &marginals, f)?;
        write_text(&dir.join(format!("landscape.{}", f.extension())), &text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Audit(a) => audit(a),
        Command::Simulate(a) => simulate(a),
        Command::Mechanism(a) => mechanism(a),
        Command::Ksfit(a) => ksfit(a),
        Command::Landscape(a) => landscape(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Numeric => 3,
            })
        }
    }
}
