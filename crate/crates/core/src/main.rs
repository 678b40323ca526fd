use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mash::harness::{
    run_sweep, run_trial_with, run_verify, with_redundancy, write_atomic, CodebookSource, RunConfig, SweepPlan,
    VerifyOptions,
};
use mash::jammers::JammerKind;
use mash::receivers::{LmmseForm, ReceiverKind};

#[derive(Parser)]
#[command(name = "mash", version, about = "MASH jammer-mitigation link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER/MER sweep written as CSV.
    Sweep(SweepArgs),
    /// Property checks of the codebook and jammer models.
    Verify(VerifyArgs),
    /// One trial with per-stage matrix norms.
    Trial(TrialArgs),
}

#[derive(Args)]
struct Common {
    /// Flat key/value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rho_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lmmse_form: Option<LmmseForm>,
}

impl Common {
    fn load(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(r) = self.rho_db {
            cfg.system.rho_db = r;
        }
        if let Some(s) = self.seed {
            cfg.system.master_seed = s;
        }
        if let Some(f) = self.lmmse_form {
            cfg.receiver.lmmse_form = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated jammer names, `none`, or `all`.
    #[arg(long, default_value = "all")]
    jammers: String,
    /// Comma-separated receiver names or `all`.
    #[arg(long, default_value = "mash-l,baseline-lmmse,jammerless,unmitigated")]
    receivers: String,
    /// Comma-separated values or `start:stop:step`.
    #[arg(long, default_value = "-10:15:5", allow_hyphen_values = true)]
    snr: String,
    #[arg(long, default_value_t = 200)]
    frames: usize,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Output CSV path; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodebookArg {
    Secret,
    Permutation,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 2000)]
    draws: usize,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, value_enum, default_value = "secret")]
    codebook: CodebookArg,
    /// Overrides the redundancy `R`.
    #[arg(long)]
    redundancy: Option<usize>,
}

#[derive(Args)]
struct TrialArgs {
    #[command(flatten)]
    common: Common,
    /// Jammer name or `none`.
    #[arg(long, default_value = "barrage")]
    jammer: String,
    #[arg(long, default_value = "mash-l")]
    receiver: ReceiverKind,
    /// SNR in dB; `inf` for a noiseless frame.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    snr: f64,
    #[arg(long, default_value_t = 0)]
    index: u64,
}

fn parse_snr(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>()?;
        let (start, stop, step) = (v[0], v[1], v[2]);
        if !(step > 0.0) || stop < start {
            bail!("SNR range {text} needs step > 0 and stop >= start");
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|k| start + k as f64 * step).collect());
    }
    text.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad SNR value '{p}'")))
        .collect()
}

fn parse_jammer(cfg: &RunConfig, name: &str) -> anyhow::Result<Option<mash::jammers::JammerSpec>> {
    if name.trim() == "none" {
        return Ok(None);
    }
    Ok(Some(cfg.jammer_spec(name.parse::<JammerKind>()?)))
}

fn parse_list<T>(text: &str, all: &[T], parse: impl Fn(&str) -> anyhow::Result<T>) -> anyhow::Result<Vec<T>>
where
    T: Clone,
{
    if text.trim() == "all" {
        return Ok(all.to_vec());
    }
    text.split(',').map(|p| parse(p.trim())).collect()
}

fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let cfg = args.common.load()?;
    let all_jammers: Vec<_> = JammerKind::ALL.iter().map(|&k| Some(cfg.jammer_spec(k))).collect();
    let jammers = parse_list(&args.jammers, &all_jammers, |s| parse_jammer(&cfg, s))?;
    let receivers = parse_list(&args.receivers, &ReceiverKind::ALL, |s| Ok(s.parse::<ReceiverKind>()?))?;
    let plan = SweepPlan {
        config: cfg,
        snr_points_db: parse_snr(&args.snr)?,
        jammers,
        receivers,
        frames_per_point: args.frames,
    };
    let threads = args
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = run_sweep(&plan, threads)?;
    match &args.out {
        Some(path) => write_atomic(path, &out.csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", out.csv),
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let mut cfg = args.common.load()?;
    if let Some(r) = args.redundancy {
        cfg = with_redundancy(&cfg, r);
        cfg.validate()?;
    }
    let codebook = match args.codebook {
        CodebookArg::Secret => CodebookSource::Secret,
        CodebookArg::Permutation => CodebookSource::Permutation,
    };
    let report = run_verify(&VerifyOptions { config: cfg, draws: args.draws, instances: args.instances, codebook })?;
    println!("{report}");
    Ok(report.all_pass())
}

fn trial(args: &TrialArgs) -> anyhow::Result<()> {
    let cfg = args.common.load()?;
    let spec = parse_jammer(&cfg, &args.jammer)?;
    let rx = args.receiver.build::<f64>(cfg.receiver);
    let (result, trace) = run_trial_with(&cfg, spec.as_ref(), rx.as_ref(), args.snr, args.index)?;
    for (name, value) in &trace {
        println!("{name:<8} {value:.6e}");
    }
    println!(
        "bit_errors={} bits_total={} mer_percent={:.4} est_rank={}",
        result.bit_errors,
        result.bits_total,
        100.0 * (result.mer_num / result.mer_den),
        result.est_rank
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Trial(a) => trial(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
