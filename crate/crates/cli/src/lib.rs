//! Command dispatch for the `effortlab` binary. [`run`] is pure apart from
//! file I/O, which keeps the binary testable in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use effortlab::dataset::{builtin_dataset, load_dataset, recorded_split, DataSource, Dataset, Feature};
use effortlab::fuzzy::{evaluate_config, parse_fis, parse_grid, serialize_fis, tune_fis, InputBinding, Mamdani};
use effortlab::metrics::{evaluate, PredictionPair};
use effortlab::neural::{
    grnn_predict, parse_model, predict_sequence, serialize_model, train, GrnnModel, Network, NetworkKind, NetworkSpec,
    NeuralError, TrainConfig,
};
use effortlab::render::{render_dataset, render_report, Format, ReportBundle};
use effortlab::replay::{
    comparison_report, replay_table1, replay_table2, replay_table4, tables::MAMDANI_LABEL, AuditNote, Verdict,
};

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    /// 0 success, 1 usage or validation error, 2 numeric or audit failure.
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

impl From<NeuralError> for CliError {
    fn from(e: NeuralError) -> Self {
        match e {
            NeuralError::NonFinite(_) => CliError::Numeric(e.to_string()),
            other => invalid(other),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "effortlab",
    version,
    about = "Software effort estimation: replay, fuzzy inference and neural baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect, validate or export the project dataset.
    Data {
        #[command(subcommand)]
        action: DataAction,
    },
    /// Recompute a recorded results table and audit its printed figures.
    Replay {
        table: ReplayTable,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Mamdani fuzzy inference.
    Fis {
        #[command(subcommand)]
        action: FisAction,
    },
    /// Backpropagation networks.
    Nn {
        #[command(subcommand)]
        action: NnAction,
    },
    /// Generalized regression network.
    Grnn {
        #[command(subcommand)]
        action: GrnnAction,
    },
    /// Combine saved JSON reports.
    Report {
        #[command(subcommand)]
        action: ReportAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReplayTable {
    Table1,
    Table2,
    Table4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Subset {
    All,
    Test,
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with header serial,tcoe,tcoa,tcor,cgpa,rde. Defaults to the embedded dataset.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand)]
enum DataAction {
    Show(DataArgs),
    Validate(DataArgs),
    Export(DataArgs),
}

#[derive(Subcommand)]
enum FisAction {
    /// Predict the effort of one project.
    Infer {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tcoe: Option<f64>,
        #[arg(long)]
        cgpa: Option<f64>,
        #[arg(long)]
        tcoa: Option<f64>,
        #[arg(long)]
        tcor: Option<f64>,
    },
    /// Score a configuration on the dataset.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Subset::All)]
        subset: Subset,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Grid-search a configuration and write the best one.
    Tune {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum NnAction {
    /// Train on serials 1-31 and write a model file.
    Train {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        epochs: usize,
        #[arg(long, default_value_t = 0.01)]
        lr: f64,
        #[arg(long, default_value = "5")]
        hidden: String,
        #[arg(long, default_value = "tcoe,tcoa,tcor,cgpa")]
        features: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a saved model.
    Eval {
        #[arg(long = "model-file")]
        model_file: PathBuf,
        #[arg(long, value_enum, default_value_t = Subset::Test)]
        subset: Subset,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum GrnnAction {
    /// Fit on serials 1-31 and score.
    Eval {
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_enum, default_value_t = Subset::Test)]
        subset: Subset,
        #[arg(long, default_value = "tcoe,tcoa,tcor,cgpa")]
        features: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum ReportAction {
    /// Rank the models of one or more JSON reports by MMRE.
    Compare {
        /// Comma-separated JSON report files written with `--format json`.
        #[arg(long, value_delimiter = ',', required = true)]
        from: Vec<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Default)]
struct Output {
    stdout: String,
    stderr: String,
    /// Set when the command completed but found a numeric or audit failure.
    failed: bool,
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandOutcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut out = Output::default();
    match dispatch(cli.command, &mut out) {
        Ok(()) => CommandOutcome {
            code: if out.failed { 2 } else { 0 },
            stdout: out.stdout,
            stderr: out.stderr,
        },
        Err(e) => {
            let (CliError::Invalid(msg) | CliError::Numeric(msg)) = &e;
            out.stderr.push_str(&format!("error: {msg}\n"));
            CommandOutcome {
                code: e.code(),
                stdout: out.stdout,
                stderr: out.stderr,
            }
        }
    }
}

fn dispatch(command: Command, out: &mut Output) -> Result<(), CliError> {
    match command {
        Command::Data { action } => data(action, out),
        Command::Replay { table, format } => replay(table, format.into(), out),
        Command::Fis { action } => fis(action, out),
        Command::Nn { action } => nn(action, out),
        Command::Grnn { action } => grnn(action, out),
        Command::Report { action } => report(action, out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(bundle: &ReportBundle, format: Format, out: &mut Output) -> Result<(), CliError> {
    out.stdout.push_str(&render_report(bundle, format).map_err(invalid)?);
    Ok(())
}

fn features(list: &str) -> Result<Vec<Feature>, CliError> {
    Feature::parse_list(list).ok_or_else(|| invalid(format!("bad feature list `{list}`; use tcoe,tcoa,tcor,cgpa")))
}

fn subset_of(data: &Dataset, subset: Subset) -> Result<Dataset, CliError> {
    match subset {
        Subset::All => Ok(data.clone()),
        Subset::Test => Ok(recorded_split(data).map_err(invalid)?.1),
    }
}

fn data(action: DataAction, out: &mut Output) -> Result<(), CliError> {
    let (args, default_format) = match &action {
        DataAction::Show(a) | DataAction::Validate(a) => (a, FormatArg::Text),
        DataAction::Export(a) => (a, FormatArg::Csv),
    };
    let data = match &args.file {
        Some(path) => load_dataset(&read(path)?, DataSource::File(path.display().to_string()))
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?,
        None => builtin_dataset(),
    };
    let format: Format = args.format.unwrap_or(default_format).into();
    match action {
        DataAction::Validate(_) => {
            let _ = writeln!(out.stdout, "ok: {} records ({})", data.len(), data.source);
        }
        DataAction::Show(_) | DataAction::Export(_) => {
            out.stdout.push_str(&render_dataset(&data, format).map_err(invalid)?);
        }
    }
    Ok(())
}

fn audit_outcome(audit: &[AuditNote], out: &mut Output) {
    for note in audit.iter().filter(|n| n.is_failure()) {
        let _ = writeln!(out.stderr, "error: audit failure: {}", note.line());
        out.failed = true;
    }
    for note in audit
        .iter()
        .filter(|n| n.known && !n.is_failure() && n.verdict == Verdict::Irreconcilable)
    {
        let _ = writeln!(out.stderr, "warning: {}", note.line());
    }
}

fn replay(table: ReplayTable, format: Format, out: &mut Output) -> Result<(), CliError> {
    let bundle = match table {
        ReplayTable::Table1 => {
            let t1 = replay_table1();
            let t2 = replay_table2();
            let t4 = replay_table4();
            let mut reports = t2.reports;
            reports.push(t4.full);
            reports.push(t4.subset);
            ReportBundle {
                reports,
                comparisons: vec![t1.comparison, t1.subset_comparison],
                audit: t1.audit,
            }
        }
        ReplayTable::Table2 => {
            let t = replay_table2();
            ReportBundle {
                reports: t.reports,
                comparisons: vec![],
                audit: t.audit,
            }
        }
        ReplayTable::Table4 => {
            let t = replay_table4();
            ReportBundle {
                reports: vec![t.full, t.subset],
                comparisons: vec![],
                audit: t.audit,
            }
        }
    };
    emit(&bundle, format, out)?;
    audit_outcome(&bundle.audit, out);
    Ok(())
}

fn fis(action: FisAction, out: &mut Output) -> Result<(), CliError> {
    match action {
        FisAction::Infer {
            config,
            tcoe,
            cgpa,
            tcoa,
            tcor,
        } => {
            let cfg = parse_fis(&read(&config)?).map_err(invalid)?;
            let bindings = InputBinding::by_name(&cfg).map_err(invalid)?;
            let mut inputs = Vec::new();
            for b in &bindings {
                let value = match b.feature {
                    Feature::Tcoe => tcoe,
                    Feature::Tcoa => tcoa,
                    Feature::Tcor => tcor,
                    Feature::Cgpa => cgpa,
                };
                let value = value.ok_or_else(|| invalid(format!("input `{}` needs --{}", b.variable, b.feature)))?;
                inputs.push((b.variable.as_str(), value));
            }
            let engine = Mamdani::new(&cfg).map_err(invalid)?;
            let inf = engine.infer(&inputs).map_err(invalid)?;
            for (var, given, used) in &inf.diagnostics.clamped {
                let _ = writeln!(
                    out.stderr,
                    "warning: {var} = {given} is outside its universe; using {used}"
                );
            }
            if inf.diagnostics.no_rule_fired {
                let _ = writeln!(out.stderr, "warning: no rule fired; output is the universe midpoint");
            }
            let _ = writeln!(out.stdout, "{:.1}", inf.output);
            Ok(())
        }
        FisAction::Eval { config, subset, format } => {
            let cfg = parse_fis(&read(&config)?).map_err(invalid)?;
            let data = subset_of(&builtin_dataset(), subset)?;
            let bindings = InputBinding::by_name(&cfg).map_err(invalid)?;
            let pairs = evaluate_config(&cfg, &data, &bindings).map_err(invalid)?;
            let report = evaluate(&format!("{MAMDANI_LABEL} ({})", cfg.name), &pairs).map_err(invalid)?;
            emit(
                &ReportBundle {
                    reports: vec![report],
                    ..Default::default()
                },
                format.into(),
                out,
            )
        }
        FisAction::Tune {
            config,
            grid,
            out: out_path,
            format,
        } => {
            let template = parse_fis(&read(&config)?).map_err(invalid)?;
            let grid = parse_grid(&read(&grid)?).map_err(invalid)?;
            let data = builtin_dataset();
            let outcome = tune_fis(&template, &grid, &data).map_err(invalid)?;
            write(&out_path, &serialize_fis(&outcome.best))?;
            let bindings = grid.resolve_bindings(&outcome.best).map_err(invalid)?;
            let pairs = evaluate_config(&outcome.best, &data, &bindings).map_err(invalid)?;
            let report = evaluate(&format!("{MAMDANI_LABEL} ({})", outcome.best.name), &pairs)
                .map_err(invalid)?
                .with_note(format!(
                    "grid point {} of {} (0-based)",
                    outcome.best_index,
                    grid.point_count()
                ));
            emit(
                &ReportBundle {
                    reports: vec![report],
                    ..Default::default()
                },
                format.into(),
                out,
            )
        }
    }
}

fn parse_hidden(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|w| {
            w.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("bad hidden width `{w}`")))
        })
        .collect()
}

fn pairs_for(data: &Dataset, predicted: &[f64]) -> Vec<PredictionPair> {
    data.records()
        .iter()
        .zip(predicted)
        .map(|(r, p)| PredictionPair::new(r.serial, r.rde, *p))
        .collect()
}

fn nn(action: NnAction, out: &mut Output) -> Result<(), CliError> {
    match action {
        NnAction::Train {
            model,
            seed,
            epochs,
            lr,
            hidden,
            features: feature_list,
            out: out_path,
        } => {
            let kind: NetworkKind = model.parse().map_err(CliError::Invalid)?;
            let spec = NetworkSpec::new(kind, features(&feature_list)?, parse_hidden(&hidden)?)?;
            let net = Network::init(spec, seed)?;
            let (train_set, _) = recorded_split(&builtin_dataset()).map_err(invalid)?;
            let config = TrainConfig {
                learning_rate: lr,
                epochs,
            };
            let (trained, trace) = train(net, &train_set, &config)?;
            write(&out_path, &serialize_model(&trained))?;
            let first = trace[0];
            let last = *trace.last().expect("trace holds the initial loss");
            let _ = writeln!(out.stdout, "model: {} ({})", kind.name(), kind.acronym());
            let _ = writeln!(out.stdout, "parameters: {}", trained.network.param_count());
            let _ = writeln!(out.stdout, "epochs: {epochs}");
            let _ = writeln!(out.stdout, "initial mse: {first:.6e}");
            let _ = writeln!(out.stdout, "final mse: {last:.6e}");
            let _ = writeln!(out.stdout, "written: {}", out_path.display());
            Ok(())
        }
        NnAction::Eval {
            model_file,
            subset,
            format,
        } => {
            let model = parse_model(&read(&model_file)?)?;
            let data = subset_of(&builtin_dataset(), subset)?;
            let predicted = predict_sequence(&model, data.records())?;
            let report = evaluate(model.network.spec.kind.acronym(), &pairs_for(&data, &predicted)).map_err(invalid)?;
            emit(
                &ReportBundle {
                    reports: vec![report],
                    ..Default::default()
                },
                format.into(),
                out,
            )
        }
    }
}

fn grnn(action: GrnnAction, out: &mut Output) -> Result<(), CliError> {
    let GrnnAction::Eval {
        sigma,
        subset,
        features: feature_list,
        format,
    } = action;
    let full = builtin_dataset();
    let (train_set, _) = recorded_split(&full).map_err(invalid)?;
    let model = GrnnModel::fit(&train_set, &features(&feature_list)?, sigma)?;
    let data = subset_of(&full, subset)?;
    let predicted: Vec<f64> = data.records().iter().map(|r| grnn_predict(&model, r)).collect();
    if predicted.iter().any(|p| !p.is_finite()) {
        return Err(CliError::Numeric("GRNN produced a non-finite prediction".into()));
    }
    let report = evaluate("GRNN", &pairs_for(&data, &predicted))
        .map_err(invalid)?
        .with_note(format!("sigma = {sigma}"));
    emit(
        &ReportBundle {
            reports: vec![report],
            ..Default::default()
        },
        format.into(),
        out,
    )
}

fn report(action: ReportAction, out: &mut Output) -> Result<(), CliError> {
    let ReportAction::Compare { from, svg, format } = action;
    let mut reports = Vec::new();
    for path in &from {
        let bundle = ReportBundle::from_json(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        reports.extend(bundle.reports);
    }
    let comparison = comparison_report("Models by MMRE", &reports).map_err(invalid)?;
    let bundle = ReportBundle {
        reports: vec![],
        comparisons: vec![comparison],
        audit: vec![],
    };
    emit(&bundle, format.into(), out)?;
    if let Some(path) = svg {
        write(&path, &render_report(&bundle, Format::Svg).map_err(invalid)?)?;
    }
    Ok(())
}
