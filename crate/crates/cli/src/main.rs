use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pdelum::{EnhanceParams, StopPolicy};
use pdelum_cli::config::{self, InputSource, RunConfig};
use pdelum_cli::{bench, plot, BatchOutcome, THREADS_ENV};

/// Log-free PDE illumination correction for PPM images.
#[derive(Parser)]
#[command(name = "pdelum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance images and write the result, its trace and its metrics.
    Enhance {
        #[command(flatten)]
        run: RunArgs,
        /// PPM files or `synth:<ramp|lowlight|checker>:<W>x<H>`.
        #[arg(required = true)]
        inputs: Vec<String>,
    },
    /// Compare the baselines and the flow on each input.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(required = true)]
        inputs: Vec<String>,
    },
    /// Time every algorithm on synthetic square images.
    Bench {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Render a trace CSV as SVG.
    TracePlot {
        trace: PathBuf,
        /// Output file; defaults to the trace path with an .svg extension.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Iteration to mark instead of the maximum-entropy row.
        #[arg(long)]
        chosen: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = EnhanceParams::default().lambda)]
    lambda: f64,
    #[arg(long, default_value_t = EnhanceParams::default().beta)]
    beta: f64,
    #[arg(long, default_value_t = EnhanceParams::default().k)]
    k: f64,
    #[arg(long, default_value_t = EnhanceParams::default().hp_weight)]
    hp_weight: f64,
    #[arg(long, default_value_t = EnhanceParams::default().dt)]
    dt: f64,
    #[arg(long, default_value_t = StopPolicy::default().max_iters)]
    max_iters: usize,
    #[arg(long, default_value_t = StopPolicy::default().patience)]
    patience: usize,
    /// `hsi` or `rgb`.
    #[arg(long, default_value = "hsi")]
    mode: String,
    /// `entropy` or `fixed:N`.
    #[arg(long, default_value = "entropy")]
    stop: String,
    /// Comma list of ghe, lcs[:lo:hi], goc[:gain:offset], gamma[:g],
    /// shf[:gh:gl]; or `all` / `none`.
    #[arg(long, default_value = "all")]
    baselines: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for synthetic inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bench side lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
}

impl RunArgs {
    fn into_config(self, inputs: &[String]) -> Result<RunConfig> {
        let cfg = RunConfig {
            inputs: inputs
                .iter()
                .map(|s| InputSource::parse(s))
                .collect::<Result<_>>()?,
            out: self.out,
            params: EnhanceParams {
                lambda: self.lambda,
                beta: self.beta,
                k: self.k,
                hp_weight: self.hp_weight,
                dt: self.dt,
                ..EnhanceParams::default()
            },
            stop: StopPolicy {
                mode: config::parse_stop(&self.stop)?,
                max_iters: self.max_iters,
                patience: self.patience,
            },
            mode: config::parse_mode(&self.mode)?,
            baselines: config::parse_baselines(&self.baselines)?,
            seed: self.seed,
            sizes: self.sizes,
            repeats: self.repeats,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .with_context(|| format!("{THREADS_ENV}={v} is not a count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn report(outcome: &BatchOutcome) -> ExitCode {
    for (label, result) in &outcome.results {
        match result {
            Ok(o) => println!(
                "{label}: chosen iteration {}, wrote {} files",
                o.chosen_iteration,
                o.files.len()
            ),
            Err(e) => eprintln!("{label}: error: {e:#}"),
        }
    }
    if outcome.failures() == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "{} of {} inputs failed",
            outcome.failures(),
            outcome.results.len()
        );
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_threads()?;
    match cli.command {
        Command::Enhance { run, inputs } => {
            Ok(report(&pdelum_cli::enhance(&run.into_config(&inputs)?)?))
        }
        Command::Compare { run, inputs } => {
            Ok(report(&pdelum_cli::compare(&run.into_config(&inputs)?)?))
        }
        Command::Bench { run } => {
            let rep = bench::bench(&run.into_config(&[])?)?;
            for r in &rep.rows {
                println!("{:>6} {:>9} px {:>10.3} ms", r.algo, r.pixels, r.median_ms);
            }
            let growth = bench::growth_per_pixel_doubling(&rep.steps);
            for (s, g) in rep.steps.iter().skip(1).zip(growth) {
                println!(
                    "  step {:>9} px {:>10.3} ms  x{g:.2} per pixel doubling",
                    s.pixels, s.median_ms
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::TracePlot { trace, out, chosen } => {
            let text = std::fs::read_to_string(&trace)
                .with_context(|| format!("reading {}", trace.display()))?;
            let svg = plot::trace_plot(&text, chosen)
                .with_context(|| format!("plotting {}", trace.display()))?;
            let out = out.unwrap_or_else(|| trace.with_extension("svg"));
            std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
