use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use eit_core::spectrum::{sweep_coupling, SweepOptions};
use eit_core::{broaden, dressed_state_frequencies, scan_probe, SpectrumError};
use log::info;

use crate::config::{parse_config, SimulationConfig};
use crate::csv::{format_number, write_dressed, write_spectrum, write_summary};
use crate::validate::run_checks;

pub const EXIT_OK: i32 = 0;
/// Usage, parse, validation and I/O errors.
pub const EXIT_USAGE: i32 = 1;
/// Numerical failure (no unique steady state).
pub const EXIT_NUMERICAL: i32 = 2;

pub const THREADS_ENV: &str = "EIT_SIM_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "eit-sim",
    version,
    about = "Probe absorption and dispersion spectra of a five-level cascade EIT system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single probe spectrum as CSV.
    Scan(CommonArgs),
    /// Dressed-state (expected peak) positions.
    Dressed(CommonArgs),
    /// Coupling-strength series: one CSV per Ω_c plus summary.csv.
    Sweep(CommonArgs),
    /// Run the invariant checks on the config.
    Validate(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Config file (key = value).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output file (directory for `sweep`); defaults to standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Gaussian broadening FWHM in MHz; overrides the config.
    #[arg(long, value_name = "FWHM")]
    broaden: Option<f64>,
    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

/// Failure classified by exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<SpectrumError> for Failure {
    fn from(e: SpectrumError) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
        Self { code, message: e.to_string() }
    }
}

fn load_config(args: &CommonArgs) -> Result<SimulationConfig, Failure> {
    let text =
        fs::read_to_string(&args.config).map_err(|e| Failure::usage(format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| Failure::usage(format!("{}: {e}", args.config.display())))?;
    if let Some(fwhm) = args.broaden {
        if !(fwhm >= 0.0 && fwhm.is_finite()) {
            return Err(Failure::usage(format!("--broaden must be >= 0, got {fwhm}")));
        }
        cfg.broadening_fwhm = Some(fwhm);
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    Ok(cfg)
}

fn write_target<F>(path: Option<&Path>, stdout: &mut (dyn Write + Send), body: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            body(&mut buf).map_err(|e| Failure::usage(e.to_string()))?;
            fs::write(p, buf).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
        }
        None => body(stdout).map_err(|e| Failure::usage(format!("<stdout>: {e}"))),
    }
}

fn cmd_scan(cfg: &SimulationConfig, stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    let mut spectrum = scan_probe(&cfg.scheme, &cfg.drives(), &cfg.window)?;
    if let Some(fwhm) = cfg.broadening_fwhm {
        spectrum = broaden(&spectrum, fwhm)?;
    }
    info!("scanned {} points over [{}, {}] MHz", spectrum.len(), cfg.window.min, cfg.window.max);
    write_target(cfg.output.as_deref(), stdout, |w| write_spectrum(&spectrum, w))
}

fn cmd_dressed(cfg: &SimulationConfig, stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    cfg.drives().validate().map_err(|e| Failure::usage(e.to_string()))?;
    let freqs = dressed_state_frequencies(&cfg.scheme, &cfg.drives());
    write_target(cfg.output.as_deref(), stdout, |w| write_dressed(&freqs, w))
}

/// File name for the spectrum at one coupling strength.
pub fn sweep_file_name(omega_c: f64) -> String {
    format!("spectrum_omega_c_{}.csv", format_number(omega_c))
}

fn cmd_sweep(cfg: &SimulationConfig, stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    let list =
        cfg.omega_c_sweep.clone().ok_or_else(|| Failure::usage("`sweep` needs `omega_c_sweep_mhz` in the config"))?;
    let options = SweepOptions { prominence_floor: cfg.prominence_floor, broadening_fwhm: cfg.broadening_fwhm };
    let sweep = sweep_coupling(&cfg.scheme, &cfg.drives(), &list, &cfg.window, &options)?;

    match cfg.output.as_deref() {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            for entry in &sweep.entries {
                let path = dir.join(sweep_file_name(entry.omega_c));
                write_target(Some(&path), stdout, |w| write_spectrum(&entry.spectrum, w))?;
            }
            write_target(Some(&dir.join("summary.csv")), stdout, |w| write_summary(&sweep.summary, w))?;
            info!("wrote {} spectra and summary.csv to {}", sweep.entries.len(), dir.display());
            Ok(())
        }
        None => {
            info!("no --out directory given; writing only the summary to standard output");
            write_target(None, stdout, |w| write_summary(&sweep.summary, w))
        }
    }
}

fn cmd_validate(cfg: &SimulationConfig, stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    let results = run_checks(cfg);
    let passed = results.iter().filter(|r| r.passed).count();
    let report = |w: &mut dyn Write| -> std::io::Result<()> {
        for r in &results {
            writeln!(w, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail)?;
        }
        writeln!(w, "{passed} passed, {} failed", results.len() - passed)
    };
    write_target(cfg.output.as_deref(), stdout, report)?;
    if passed == results.len() {
        Ok(())
    } else {
        Err(Failure::usage(format!("{} invariant check(s) failed", results.len() - passed)))
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Failure::usage(format!("{THREADS_ENV} must be an integer >= 1, got `{raw}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Failure::usage(e.to_string()))
}

type Action = fn(&SimulationConfig, &mut (dyn Write + Send)) -> Result<(), Failure>;

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };

    let (args, action): (&CommonArgs, Action) = match &cli.command {
        Command::Scan(a) => (a, cmd_scan),
        Command::Dressed(a) => (a, cmd_dressed),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::Validate(a) => (a, cmd_validate),
    };
    if !args.quiet {
        let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
            .format_timestamp(None)
            .try_init();
    }

    let outcome =
        load_config(args).and_then(|cfg| thread_pool().and_then(|pool| pool.install(|| action(&cfg, stdout))));
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
