//! Batch CLI: decide, per input time series, whether it is plausibly drawn
//! from a Gaussian stationary process.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tsgauss::pipeline::{
    analyze_files, emit_report, fetch_station, format_utc, ReportFormat, UreqClient,
};
use tsgauss::series::RawRecord;
use tsgauss::synth::{generate, GeneratorKind, GeneratorSpec};

#[derive(Parser)]
#[command(
    name = "tsgauss",
    version,
    about = "Gaussian-process plausibility tests for time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full decision pipeline over CSV inputs and emit a report.
    Analyze(AnalyzeArgs),
    /// Download one station's displacement record as standard CSV.
    Fetch(FetchArgs),
    /// Generate a synthetic series as standard CSV.
    Synth(SynthArgs),
    /// Translate UTC seconds to GMT nomenclature.
    Utc { seconds: i64 },
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Input CSV files or directories of CSV files.
    #[arg(long, num_args = 1.., value_name = "PATH")]
    input: Vec<PathBuf>,
    /// Plain-text key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict each record to its first N stored time points.
    #[arg(long, value_name = "N")]
    n_max: Option<usize>,
    /// Rejection level for every stage.
    #[arg(long)]
    alpha: Option<f64>,
    /// Ljung-Box lag count.
    #[arg(long, value_name = "H")]
    lb_h: Option<usize>,
    /// Master seed; per-station streams derive from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random projections per station (p-values FDR-combined).
    #[arg(long, value_name = "K")]
    rp_projections: Option<usize>,
    /// Clip adjusted FDR values at 1.
    #[arg(long)]
    cap_fdr: bool,
    /// Independent-case FDR (c(m) = 1) instead of the dependent-case factor.
    #[arg(long)]
    fdr_independent: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for the batch (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Md,
}

impl FormatArg {
    fn as_report(self) -> ReportFormat {
        match self {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Md => ReportFormat::Markdown,
        }
    }

    fn parse(name: &str) -> Option<Self> {
        match name {
            "csv" => Some(FormatArg::Csv),
            "json" => Some(FormatArg::Json),
            "md" | "markdown" => Some(FormatArg::Md),
            _ => None,
        }
    }
}

#[derive(clap::Args)]
struct FetchArgs {
    #[arg(long)]
    station: String,
    #[arg(long)]
    base_url: String,
    /// Source fill value to treat as missing (NaN and empty always are).
    #[arg(long)]
    fill_value: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// AR coefficients for gaussian-arma, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ar: Vec<f64>,
    /// MA coefficients for gaussian-arma, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ma: Vec<f64>,
    /// Clayton dependence parameter for copula-markov.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    IidGaussian,
    GaussianArma,
    CenteredExponential,
    CopulaMarkov,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Utc { seconds } => {
            println!("{}", format_utc(seconds));
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth(args) => run_synth(args),
        Command::Fetch(args) => run_fetch(args),
        Command::Analyze(args) => run_analyze(args),
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<ExitCode, String> {
    let file_cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            config::parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => config::FileConfig::default(),
    };
    let flags = config::FlagOverrides {
        n_max: args.n_max,
        alpha: args.alpha,
        lb_h: args.lb_h,
        seed: args.seed,
        rp_projections: args.rp_projections,
        cap_fdr: args.cap_fdr,
        fdr_independent: args.fdr_independent,
    };
    let run_cfg = config::merge_run_config(&file_cfg, &flags);
    if !(run_cfg.alpha > 0.0 && run_cfg.alpha < 1.0) {
        return Err(format!("alpha must lie in (0, 1), got {}", run_cfg.alpha));
    }
    if run_cfg.n_max < 2 {
        return Err(format!("n-max must be at least 2, got {}", run_cfg.n_max));
    }
    if run_cfg.rp_num_projections == 0 {
        return Err("rp-projections must be at least 1".into());
    }
    let format = if args.format == FormatArg::Csv {
        // a file-config format applies only when the flag was left at default
        file_cfg
            .format
            .as_deref()
            .map(|f| FormatArg::parse(f).ok_or_else(|| format!("unknown format {f:?}")))
            .transpose()?
            .unwrap_or(args.format)
    } else {
        args.format
    };

    let mut roots = args.input.clone();
    roots.extend(file_cfg.inputs.clone());
    if roots.is_empty() {
        return Err("no inputs: pass --input or an input= config line".into());
    }
    let files = expand_inputs(&roots)?;
    if files.is_empty() {
        return Err("no CSV files found under the given inputs".into());
    }

    let workers = args.workers.or(file_cfg.workers);
    let reports = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| e.to_string())?
            .install(|| analyze_files(&files, &run_cfg)),
        None => analyze_files(&files, &run_cfg),
    };

    let bytes = emit_report(&reports, format.as_report(), &run_cfg);
    write_output(args.output.as_deref(), &bytes)?;

    let partial = reports.iter().any(|r| r.error.is_some());
    Ok(if partial {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn expand_inputs(roots: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut files = Vec::new();
    for root in roots {
        if root.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(root)
                .map_err(|e| format!("reading {}: {e}", root.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(root.clone());
        }
    }
    Ok(files)
}

fn run_fetch(args: FetchArgs) -> Result<ExitCode, String> {
    let raw = fetch_station(&args.station, &args.base_url, &UreqClient, args.fill_value)
        .map_err(|e| e.to_string())?;
    let bytes = raw_to_csv(&raw);
    write_output(args.output.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn run_synth(args: SynthArgs) -> Result<ExitCode, String> {
    let kind = match args.kind {
        KindArg::IidGaussian => GeneratorKind::IidGaussian,
        KindArg::GaussianArma => GeneratorKind::GaussianArma {
            ar: args.ar,
            ma: args.ma,
        },
        KindArg::CenteredExponential => GeneratorKind::CenteredExponential,
        KindArg::CopulaMarkov => GeneratorKind::CopulaMarkovGaussianMarginal {
            theta: args.theta.ok_or("copula-markov needs --theta")?,
        },
    };
    let spec = GeneratorSpec {
        kind,
        n: args.n,
        seed: args.seed,
    };
    let series = generate(&spec).map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    writeln!(bytes, "utc_seconds,displacement_m").unwrap();
    for (t, v) in series.timestamps().iter().zip(series.values()) {
        writeln!(bytes, "{t},{v}").unwrap();
    }
    write_output(args.output.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn raw_to_csv(raw: &RawRecord) -> Vec<u8> {
    let mut bytes = Vec::new();
    writeln!(bytes, "utc_seconds,displacement_m").unwrap();
    for (t, v) in &raw.samples {
        match v {
            Some(x) => writeln!(bytes, "{t},{x}").unwrap(),
            None => writeln!(bytes, "{t},").unwrap(),
        }
    }
    bytes
}

fn write_output(path: Option<&std::path::Path>, bytes: &[u8]) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| e.to_string())?;
            Ok(())
        }
    }
}
