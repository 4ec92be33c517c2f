use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;

use nlft_core::daisy::{assemble_h, divergence_scan, finalize_f, growth_table, OscillationTable, ScanSummary};
use nlft_core::formats::{parse_gamma, parse_sequence, sequence_json, write_growth_csv, DaisyConfig, PairFile, SequenceFile};
use nlft_core::harmonic::{plancherel_residual, RealGridFunction};
use nlft_core::inverse::inverse_halfline;
use nlft_core::nlft::{forward, su11_residual};
use nlft_core::opuc::{connection_residual, ortho_series_partials, schur_grid, szego_states, wall_ratio_residual, weight_from_schur};
use nlft_core::verify::run_suite;
use nlft_core::{Execution, NlftError};

#[derive(Parser, Debug)]
#[command(name = "nlft", version, about = "SU(1,1) nonlinear Fourier transform pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Circle grid size (power of two).
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,

    /// Seed for every random draw; echoed into reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward transform of a sequence file -> nlft_out.json.
    Forward {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Seeded identity sweeps -> <suite>_report.json.
    Verify {
        #[arg(long, default_value = "identities")]
        suite: String,
    },
    /// Recover a half-line sequence from the samples of its b -> invert_out.json.
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of coefficients to recover (default: the input's last index).
        #[arg(long)]
        len: Option<usize>,
    },
    /// Daisy pipeline -> report.json, growth_table.csv, oscillation.csv.
    Daisy {
        #[arg(long)]
        config: PathBuf,
    },
    /// Verblunsky coefficients -> opuc_report.json, w.csv, phi_osc.csv.
    Opuc {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Prefix-truncation oscillation of a sequence -> oscillation.csv, scan_summary.json.
    Scan {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// A certification failure; exits with status 1.
#[derive(Debug)]
struct Uncertified(String);

impl std::fmt::Display for Uncertified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Uncertified {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlft: {e:#}");
            if is_certification_failure(&e) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_certification_failure(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<Uncertified>().is_some()
            || matches!(c.downcast_ref::<NlftError>(), Some(NlftError::DaisyCertification { .. }))
    })
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("NLFT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execution() -> Execution {
    match std::env::var("NLFT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    nlft_core::fft::check_grid(cli.grid)?;
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    match &cli.command {
        Command::Forward { input } => cmd_forward(cli, input),
        Command::Verify { suite } => cmd_verify(cli, suite),
        Command::Invert { input, len } => cmd_invert(cli, input, *len),
        Command::Daisy { config } => cmd_daisy(cli, config),
        Command::Opuc { input } => cmd_opuc(cli, input),
        Command::Scan { input } => cmd_scan(cli, input),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("writing {}", path.display()))?))
}

#[derive(Serialize)]
struct ForwardReport {
    seed: u64,
    grid: usize,
    input: SequenceFile,
    #[serde(flatten)]
    pair: PairFile,
    su11_residual: f64,
    plancherel_residual: f64,
    max_ratio: f64,
}

fn cmd_forward(cli: &Cli, input: &Path) -> anyhow::Result<()> {
    let f = parse_sequence(&read(input)?)?;
    let p = forward(&f)?;
    let report = ForwardReport {
        seed: cli.seed,
        grid: cli.grid,
        input: (&f).into(),
        pair: (&p).into(),
        su11_residual: su11_residual(&p),
        plancherel_residual: plancherel_residual(&f, cli.grid)?,
        max_ratio: p.ratio_on_grid(cli.grid)?.max_abs(),
    };
    write_json(&cli.out.join("nlft_out.json"), &report)
}

fn cmd_verify(cli: &Cli, suite: &str) -> anyhow::Result<()> {
    let report = run_suite(suite, cli.seed)?;
    write_json(&cli.out.join(format!("{suite}_report.json")), &report)?;
    if !report.passed {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(Uncertified(format!("suite {suite} failed: {}", failed.join(", "))).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct InvertReport {
    seed: u64,
    grid: usize,
    len: usize,
    recovered: SequenceFile,
    max_error: f64,
}

fn cmd_invert(cli: &Cli, input: &Path, len: Option<usize>) -> anyhow::Result<()> {
    let f = parse_sequence(&read(input)?)?;
    if let Some((lo, _)) = f.support() {
        anyhow::ensure!(lo >= 1, "input must be supported on n >= 1, starts at {lo}");
    }
    let len = len.unwrap_or_else(|| f.support().map_or(1, |(_, hi)| hi as usize));
    let b = forward(&f)?.b.sample_on_grid(cli.grid)?;
    let g = inverse_halfline(&b, len)?;
    let max_error = (1..=len as i64).map(|n| (f.get(n) - g.get(n)).norm()).fold(0.0, f64::max);
    let report = InvertReport { seed: cli.seed, grid: cli.grid, len, recovered: (&g).into(), max_error };
    write_json(&cli.out.join("invert_out.json"), &report)
}

#[derive(Serialize)]
struct DaisyRun {
    seed: u64,
    config: DaisyConfig,
    h: nlft_core::daisy::HReport,
    growth: Option<nlft_core::daisy::GrowthTable>,
    scan: ScanSummary,
    /// `0.25 m(nu_0)` against the smallest arg oscillation.
    scan_threshold: f64,
    scan_covered: bool,
}

fn cmd_daisy(cli: &Cli, config: &Path) -> anyhow::Result<()> {
    let cfg = DaisyConfig::parse(&read(config)?)?;
    let schedule = cfg.schedule()?;
    let exec = execution();
    let h = assemble_h(&schedule, cfg.grid.certify, exec)?;
    let f = finalize_f(&h.seq, schedule.mu)?;
    fs::write(cli.out.join("sequence.json"), sequence_json(&f) + "\n")?;
    let (table, summary) = divergence_scan(&f, cfg.grid.scan, exec)?;
    table.write_csv(create(&cli.out.join("oscillation.csv"))?)?;

    let growth = match &cfg.growth {
        Some(g) => Some(growth_table(g.delta, &g.nu, g.grid, exec)?),
        None => None,
    };
    let rows: Vec<_> = match &growth {
        Some(g) => g.rows.clone(),
        None => h.report.levels.iter().flat_map(|l| l.growth.iter().copied()).collect(),
    };
    write_growth_csv(&rows, create(&cli.out.join("growth_table.csv"))?)?;

    let threshold = 0.25 * h.report.levels[0].min_growth;
    let run = DaisyRun {
        seed: cli.seed,
        config: cfg,
        scan_covered: summary.min_arg_osc >= threshold,
        scan_threshold: threshold,
        h: h.report,
        growth,
        scan: summary,
    };
    write_json(&cli.out.join("report.json"), &run)?;
    if !run.h.cauchy_ok || run.scan.var_violations > 0 {
        return Err(Uncertified("Cauchy or variation bound violated; see report.json".into()).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct OpucReport {
    seed: u64,
    grid: usize,
    degree: usize,
    sum_sq: f64,
    sequence: SequenceFile,
    connection_residual: f64,
    wall_residual: f64,
    series_residual: f64,
    weight_min: f64,
    weight_max: f64,
}

fn cmd_opuc(cli: &Cli, input: &Path) -> anyhow::Result<()> {
    let gamma = parse_gamma(&read(input)?)?;
    anyhow::ensure!(!gamma.is_empty(), "no Verblunsky coefficients in {}", input.display());
    let n = gamma.len();
    let seq = gamma.to_sequence();
    let w = weight_from_schur(&schur_grid(&seq, cli.grid)?)?;
    w.write_csv(create(&cli.out.join("w.csv"))?)?;

    let states = szego_states(&gamma, n, cli.grid)?;
    let osc = (0..cli.grid)
        .map(|k| {
            let (mut re, mut im) = ((f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY));
            for s in &states {
                let v = s.phi_star.values()[k];
                re = (re.0.min(v.re), re.1.max(v.re));
                im = (im.0.min(v.im), im.1.max(v.im));
            }
            (re.1 - re.0).max(im.1 - im.0)
        })
        .collect();
    RealGridFunction::new(osc)?.write_csv(create(&cli.out.join("phi_osc.csv"))?)?;

    let report = OpucReport {
        seed: cli.seed,
        grid: cli.grid,
        degree: n,
        sum_sq: gamma.sum_sq(),
        sequence: (&seq).into(),
        connection_residual: connection_residual(&gamma, n, cli.grid)?,
        wall_residual: wall_ratio_residual(&gamma, n - 1, cli.grid)?,
        series_residual: ortho_series_partials(&gamma, n, cli.grid)?,
        weight_min: w.values().iter().cloned().fold(f64::INFINITY, f64::min),
        weight_max: w.values().iter().cloned().fold(0.0, f64::max),
    };
    write_json(&cli.out.join("opuc_report.json"), &report)
}

#[derive(Serialize)]
struct ScanReport<'a> {
    seed: u64,
    summary: &'a ScanSummary,
}

fn cmd_scan(cli: &Cli, input: &Path) -> anyhow::Result<()> {
    let f = parse_sequence(&read(input)?)?;
    let (table, summary): (OscillationTable, ScanSummary) = divergence_scan(&f, cli.grid, execution())?;
    table.write_csv(create(&cli.out.join("oscillation.csv"))?)?;
    write_json(&cli.out.join("scan_summary.json"), &ScanReport { seed: cli.seed, summary: &summary })
}
