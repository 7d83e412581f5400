use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equivariant_forms::cli::{self, Config, EquivarianceArgs, OutputFormat, Report};
use equivariant_forms::Result;

#[derive(Parser)]
#[command(
    name = "mforms",
    version,
    about = "Modular forms, equivariant functions and their zeros"
)]
struct Opts {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// key=value file with truncation_override, tolerance, seed, y_min, output_format
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json or csv
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    y_min: Option<f64>,
    /// Fixed truncation order, or "auto"; overrides MF_TRUNCATION
    #[arg(long, global = true)]
    truncation: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Value of a form with a truncation bound
    Eval {
        #[arg(long)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Class, trace invariant and fixed points of a matrix a,b,c,d
    Classify {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Certified zeros in a box re_min,re_max,im_min,im_max
    Zeros {
        /// A registry form, a closed form, or perturb:RULE
        #[arg(long)]
        function: String,
        #[arg(long = "box", allow_hyphen_values = true)]
        search_box: String,
        #[arg(long, default_value_t = 1000)]
        max: usize,
    },
    /// Certified zeros of the derivative in a box
    CriticalPoints {
        #[arg(long)]
        function: String,
        #[arg(long = "box", allow_hyphen_values = true)]
        search_box: String,
        #[arg(long, default_value_t = 1000)]
        max: usize,
    },
    /// Runs the identity catalog at seeded points
    CheckIdentities {
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Also compare residuals at N and 2N terms
        #[arg(long)]
        doubling: bool,
    },
    /// Randomized equivariance report for h = z + k f/f'
    Equivariance {
        /// A registry form, z+1 or identity
        #[arg(long, default_value = "Delta")]
        form: String,
        #[arg(long)]
        k: Option<f64>,
        /// modular ({S, T}) or form (the form's multiplier generators)
        #[arg(long, default_value = "form")]
        group: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        word_len: usize,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long = "tol", default_value_t = 1e-7)]
        tol: f64,
    },
    /// Fundamental-domain representative of a point
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Exact q-expansion coefficients
    Coeffs {
        #[arg(long)]
        series: String,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
}

fn config(g: &Global) -> Result<Config> {
    let mut cfg = match &g.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    cfg = cfg.with_env_truncation(std::env::var(cli::TRUNCATION_ENV).ok().as_deref())?;
    if let Some(t) = &g.truncation {
        cfg.set("truncation_override", t)?;
    }
    if let Some(f) = &g.format {
        cfg.output_format = OutputFormat::parse(f)?;
    }
    if let Some(t) = g.tolerance {
        cfg.tolerance = t;
    }
    if let Some(y) = g.y_min {
        cfg.y_min = y;
    }
    cfg.validate()
}

fn seed(cfg: &Config, text: &Option<String>) -> Result<Option<u64>> {
    text.as_ref()
        .map(|s| {
            let mut c = cfg.clone();
            c.set("seed", s).map(|_| c.seed)
        })
        .transpose()
}

fn run(opts: Opts) -> Result<(Report, OutputFormat)> {
    let cfg = config(&opts.global)?;
    let report = match opts.command {
        Command::Eval { form, z } => cli::cmd_eval(&cfg, &form, &z)?,
        Command::Classify { matrix } => cli::cmd_classify(&cfg, &matrix)?,
        Command::Zeros {
            function,
            search_box,
            max,
        } => cli::cmd_zeros(&cfg, &function, &search_box, max)?,
        Command::CriticalPoints {
            function,
            search_box,
            max,
        } => cli::cmd_critical_points(&cfg, &function, &search_box, max)?,
        Command::CheckIdentities {
            only,
            seed: s,
            n,
            doubling,
        } => {
            let s = seed(&cfg, &s)?;
            cli::cmd_check_identities(&cfg, only.as_deref(), s, n, doubling)?
        }
        Command::Equivariance {
            form,
            k,
            group,
            samples,
            word_len,
            seed: s,
            tol,
        } => {
            let args = EquivarianceArgs {
                function: form,
                k,
                group,
                samples,
                word_len,
                seed: seed(&cfg, &s)?,
                tolerance: tol,
            };
            cli::cmd_equivariance(&cfg, &args)?
        }
        Command::Reduce { z } => cli::cmd_reduce(&cfg, &z)?,
        Command::Coeffs { series, n } => cli::cmd_coeffs(&cfg, &series, n)?,
    };
    Ok((report, cfg.output_format))
}

fn main() -> ExitCode {
    let opts = match Opts::try_parse() {
        Ok(o) => o,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::INPUT_ERROR_EXIT as u8 } else { 0 });
        }
    };
    match run(opts) {
        Ok((report, format)) => {
            print!("{}", report.render(format));
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprint!("{}", cli::error_json(&e));
            ExitCode::from(cli::INPUT_ERROR_EXIT as u8)
        }
    }
}
