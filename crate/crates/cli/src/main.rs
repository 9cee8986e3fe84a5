use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gofcal::presets::{Case, PUBLISHED_PROBS};
use gofcal::sample_file::{read_samples, write_samples};
use gofcal::{
    density_export, fit_gamma, run_calibration, run_calibration_with_threads, CalibrationConfig, CalibrationResult,
    GammaParams, MomentAccumulator,
};

mod config;

use config::{ConfigFile, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "gofcal", version, about = "Gamma-approximated critical values for the Pearson goodness-of-fit statistic")]
struct Cli {
    /// Worker threads for the simulation (results do not depend on it).
    #[arg(long, global = true, env = "GOF_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a calibration described by a JSON config (or a previous run's manifest).
    Calibrate {
        /// Config file, or the manifest.json of an earlier run.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run one of the reference cases and compare with its published values.
    ReproduceCase {
        /// A1, A2, B, C, D, E or F.
        case: String,
        #[command(flatten)]
        run: RunArgs,
        /// Also write all outputs and comparison.txt to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print Gamma quantiles, optionally beside chi-square reference quantiles.
    Quantiles {
        /// Gamma shape.
        #[arg(long)]
        alpha: f64,
        /// Gamma rate.
        #[arg(long)]
        lambda: f64,
        /// Degrees of freedom for a chi-square comparison column.
        #[arg(long)]
        dof: Option<u32>,
        /// Probabilities in (0, 1).
        #[arg(required = true, num_args = 1..)]
        probs: Vec<f64>,
    },
    /// Export a smoothed histogram of stored statistics beside the fitted Gamma density.
    Density {
        /// samples.bin written by calibrate or reproduce-case.
        #[arg(long)]
        samples: PathBuf,
        /// Number of grid points.
        #[arg(long, default_value_t = 512)]
        grid_size: usize,
        /// CSV file to write.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured number of trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Keep every simulated statistic (writes samples.bin).
    #[arg(long, overrides_with = "no_retain")]
    retain: bool,
    /// Keep only moments and a reservoir subsample.
    #[arg(long = "no-retain", overrides_with = "retain")]
    no_retain: bool,
}

impl RunArgs {
    fn apply(&self, cfg: &mut ConfigFile) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if self.retain {
            cfg.retain_samples = true;
        }
        if self.no_retain {
            cfg.retain_samples = false;
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<gofcal::Error> for CliError {
    fn from(e: gofcal::Error) -> Self {
        use gofcal::Error::*;
        let code = match e {
            Integrity { .. } | DegenerateMoments { .. } | NoConvergence(_) => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gofcal: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let threads = cli.threads;
    match cli.command {
        Command::Calibrate { config, run, out } => {
            let mut file = config::load(&config)?;
            run.apply(&mut file);
            let cfg = file.resolve()?;
            let res = calibrate(&cfg, threads)?;
            let written = write_outputs(&out, &cfg, &res)?;
            print!("{}", summary(&res));
            eprintln!("wrote {}", written.join(", "));
            Ok(())
        }
        Command::ReproduceCase { case, run, out } => {
            let case: Case = case.parse()?;
            let mut file = ConfigFile::from_calibration(&case.config(1_000_000, 42)?);
            run.apply(&mut file);
            let cfg = file.resolve()?;
            let res = calibrate(&cfg, threads)?;
            let table = comparison_table(case, &res);
            print!("{table}");
            if let Some(out) = out {
                write_outputs(&out, &cfg, &res)?;
                write_file(&out.join("comparison.txt"), table.as_bytes())?;
            }
            Ok(())
        }
        Command::Quantiles { alpha, lambda, dof, probs } => {
            print!("{}", quantile_table(alpha, lambda, dof, &probs)?);
            Ok(())
        }
        Command::Density { samples, grid_size, out } => {
            let csv = density_csv(&samples, grid_size)?;
            write_file(&out, csv.as_bytes())
        }
    }
}

fn calibrate(cfg: &CalibrationConfig, threads: Option<usize>) -> Result<CalibrationResult, CliError> {
    Ok(match threads {
        Some(t) => run_calibration_with_threads(cfg, t)?,
        None => run_calibration(cfg)?,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn write_outputs(dir: &Path, cfg: &CalibrationConfig, res: &CalibrationResult) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let mut outputs = vec!["result.json".to_string(), "quantiles.csv".to_string()];

    let json = serde_json::to_string_pretty(res).map_err(|e| CliError::io(e.to_string()))?;
    write_file(&dir.join("result.json"), format!("{json}\n").as_bytes())?;
    write_file(&dir.join("quantiles.csv"), quantiles_csv(res).as_bytes())?;

    if let Some(samples) = &res.samples {
        let path = dir.join("samples.bin");
        let f = fs::File::create(&path).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        write_samples(BufWriter::new(f), samples).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        outputs.push("samples.bin".into());
    }

    let manifest = RunManifest {
        tool: "gofcal".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        created: chrono::Utc::now().to_rfc3339(),
        config: ConfigFile::from_calibration(cfg),
        outputs: outputs.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::io(e.to_string()))?;
    write_file(&dir.join("manifest.json"), format!("{json}\n").as_bytes())?;
    outputs.push("manifest.json".into());
    Ok(outputs)
}

/// f64 `Display` is the shortest representation that parses back to the
/// same value, so the CSV is lossless.
fn quantiles_csv(res: &CalibrationResult) -> String {
    let mut s = String::from("probability,sample,gamma,chi_square\n");
    for i in 0..res.quantile_probs.len() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            res.quantile_probs[i], res.sample_quantiles[i], res.gamma_quantiles[i], res.chisq_quantiles[i]
        );
    }
    s
}

fn summary(res: &CalibrationResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trials completed {} rejected {}", res.trials_completed, res.trials_rejected);
    let _ = writeln!(s, "mean {:.6}  variance {:.6}", res.mean_x2, res.var_x2);
    let _ = writeln!(s, "alpha {:.7}  lambda {:.7}", res.gamma.alpha, res.gamma.lambda);
    let _ = writeln!(s, "{:>8} {:>12} {:>12} {:>12}", "p", "sample", "gamma", format!("chisq({})", res.chisq_dof));
    for i in 0..res.quantile_probs.len() {
        let _ = writeln!(
            s,
            "{:>8} {:>12.6} {:>12.6} {:>12.6}",
            res.quantile_probs[i], res.sample_quantiles[i], res.gamma_quantiles[i], res.chisq_quantiles[i]
        );
    }
    s
}

fn comparison_table(case: Case, res: &CalibrationResult) -> String {
    let published = case.published();
    let mut rows: Vec<(String, f64, Option<f64>)> = vec![
        ("mean".into(), res.mean_x2, Some(published.mean)),
        ("variance".into(), res.var_x2, Some(published.variance)),
        ("alpha".into(), res.gamma.alpha, published.alpha),
        ("lambda".into(), res.gamma.lambda, published.lambda),
    ];
    for (i, p) in res.quantile_probs.iter().enumerate() {
        let at = PUBLISHED_PROBS.iter().position(|q| q == p);
        rows.push((format!("sample q{p}"), res.sample_quantiles[i], at.map(|j| published.sample_quantiles[j])));
    }
    for (i, p) in res.quantile_probs.iter().enumerate() {
        let at = PUBLISHED_PROBS.iter().position(|q| q == p);
        let want = at.and_then(|j| published.gamma_quantiles.map(|g| g[j]));
        rows.push((format!("gamma q{p}"), res.gamma_quantiles[i], want));
    }
    for (i, p) in res.quantile_probs.iter().enumerate() {
        rows.push((format!("chisq({}) q{p}", res.chisq_dof), res.chisq_quantiles[i], None));
    }

    let mut s = String::new();
    let _ = writeln!(s, "case {case}: {}", case.description());
    let _ = writeln!(
        s,
        "trials {} (completed {}, rejected {}), seed reproducible",
        res.trials_requested, res.trials_completed, res.trials_rejected
    );
    let _ = writeln!(s, "{:<16} {:>12} {:>12} {:>12}", "quantity", "computed", "published", "abs diff");
    for (name, got, want) in rows {
        match want {
            Some(w) => {
                let _ = writeln!(s, "{name:<16} {got:>12.6} {w:>12.6} {:>12.6}", (got - w).abs());
            }
            None => {
                let _ = writeln!(s, "{name:<16} {got:>12.6} {:>12} {:>12}", "-", "-");
            }
        }
    }
    s
}

fn quantile_table(alpha: f64, lambda: f64, dof: Option<u32>, probs: &[f64]) -> Result<String, CliError> {
    let gamma = GammaParams::new(alpha, lambda)?;
    let chisq = dof.map(GammaParams::chi_square).transpose()?;
    let mut s = String::new();
    match dof {
        Some(k) => {
            let _ = writeln!(s, "{:>10} {:>14} {:>14}", "p", "gamma", format!("chisq({k})"));
        }
        None => {
            let _ = writeln!(s, "{:>10} {:>14}", "p", "gamma");
        }
    }
    for &p in probs {
        let q = gamma.quantile(p)?;
        match &chisq {
            Some(c) => {
                let _ = writeln!(s, "{p:>10} {q:>14.6} {:>14.6}", c.quantile(p)?);
            }
            None => {
                let _ = writeln!(s, "{p:>10} {q:>14.6}");
            }
        }
    }
    Ok(s)
}

fn density_csv(samples: &Path, grid_size: usize) -> Result<String, CliError> {
    let file = fs::File::open(samples).map_err(|e| CliError::usage(format!("cannot read {}: {e}", samples.display())))?;
    let values = read_samples(std::io::BufReader::new(file))
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", samples.display())))?;
    let est = density_export(&values, grid_size)?;
    let acc: MomentAccumulator = values.iter().copied().collect();
    let gamma = fit_gamma(acc.mean(), acc.variance().unwrap_or(0.0))?;
    let mut s = String::from("grid_x,empirical_density,fitted_gamma_density\n");
    for (&x, &d) in est.grid.iter().zip(&est.density) {
        let _ = writeln!(s, "{x},{d},{}", gamma.pdf(x));
    }
    Ok(s)
}
