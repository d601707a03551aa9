use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use fabnet::config::{
    load_config, parse_subsets, Access, AnchorSpec, IntRange, LocConfig, MacConfig, NlosEvalConfig, NlosGenConfig,
    PhyBerConfig, Point, RealRange, Sched,
};
use fabnet::manifest::{Outputs, RunManifest, VERSION};
use fabnet::run::Job;
use fabnet::{exit_code, usage, UsageError};

#[derive(Parser)]
#[command(name = "fabnet", version, about = "Industrial wireless simulation toolkit", arg_required_else_help = true)]
struct Cli {
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for relative output paths.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML or JSON configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Latency of safety and AR traffic over a range of AR station counts.
    MacSim(MacArgs),
    /// GFDM link simulation.
    #[command(subcommand)]
    Phy(PhyCmd),
    /// Localization by two-way ranging.
    #[command(subcommand)]
    Loc(LocCmd),
    /// LOS/NLOS identification from channel impulse responses.
    #[command(subcommand)]
    Nlos(NlosCmd),
    /// Figure sweeps and manifest reruns.
    #[command(subcommand)]
    Repro(ReproCmd),
}

#[derive(Args)]
struct MacArgs {
    #[arg(long, value_enum)]
    access: Option<Access>,
    #[arg(long, value_enum)]
    scheduler: Option<Sched>,
    /// `A..B[:step]` or a single count.
    #[arg(long)]
    n_ar: Option<IntRange>,
    /// Safety maximum service interval, ms.
    #[arg(long)]
    safety_msi: Option<f64>,
    /// Simulated time per point, s.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long, default_value = "mac.csv")]
    out: PathBuf,
    /// Event trace TSV; needs a single `--n-ar` value.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PhyCmd {
    /// Uncoded bit error rate over an Eb/N0 range.
    Ber(BerArgs),
}

#[derive(Args)]
struct BerArgs {
    /// Eb/N0 in dB, `A..B[:step]` or a single value.
    #[arg(long)]
    snr_db: Option<RealRange>,
    /// Minimum bits per point; `1e6` is accepted.
    #[arg(long, value_parser = parse_count)]
    bits: Option<u64>,
    #[arg(long, default_value = "ber.csv")]
    out: PathBuf,
    /// Received samples of the first frame, interleaved f64 I/Q.
    #[arg(long)]
    dump_iq: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LocCmd {
    /// Two-way ranging and trilateration rounds.
    Sim(LocArgs),
}

#[derive(Args)]
struct LocArgs {
    /// JSON array of `{id, x, y, z}`.
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// JSON array of `{x, y, z}` mobile positions, located in order.
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long)]
    sigma_d: Option<f64>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long, default_value = "fixes.csv")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum NlosCmd {
    /// Synthetic labelled CIR set.
    Gen(GenArgs),
    /// Random-forest accuracy per feature subset.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator parameters; same as `--config`.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value = "cirs.bin")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    /// Comma-separated, e.g. `s1,s2,s3,s4`.
    #[arg(long)]
    subsets: Option<String>,
    #[arg(long, default_value = "acc.csv")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ReproCmd {
    /// DCF, PCF and HCCA sweeps, one CSV per method.
    FigDelay,
    /// Reference and EDF HCCA schedulers with a 24 ms safety interval.
    FigScheduler,
    /// CIR set and subset accuracies with default parameters.
    FigNlos,
    /// Reruns a manifest; with `--out-dir` the outputs go there instead.
    Manifest { file: PathBuf },
}

fn parse_count(s: &str) -> Result<u64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a whole count"))
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

struct Ctx {
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    config: Option<PathBuf>,
}

impl Ctx {
    fn config<T: DeserializeOwned + Default>(&self) -> Result<T> {
        match &self.config {
            Some(p) => load_config(p).map_err(usage),
            None => Ok(T::default()),
        }
    }

    fn out(&self, p: &Path) -> Result<PathBuf> {
        let p = match &self.out_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        };
        Ok(std::path::absolute(p)?)
    }

    fn outputs(&self, main: &Path, dump: Option<&Path>) -> Result<Outputs> {
        Ok(Outputs {
            main: self.out(main)?,
            dump: dump.map(|d| self.out(d)).transpose()?,
        })
    }
}

fn run_job(job: Job, out: Outputs) -> Result<()> {
    job.execute(&out)?;
    for p in out.all() {
        println!("{}", p.display());
    }
    Ok(())
}

fn mac_job(ctx: &Ctx, a: &MacArgs) -> Result<(Job, Outputs)> {
    let mut c: MacConfig = ctx.config()?;
    c.access = a.access.unwrap_or(c.access);
    c.scheduler = a.scheduler.unwrap_or(c.scheduler);
    c.n_ar = a.n_ar.unwrap_or(c.n_ar);
    c.safety_msi_ms = a.safety_msi.unwrap_or(c.safety_msi_ms);
    c.duration_s = a.duration.unwrap_or(c.duration_s);
    c.seed = ctx.seed.unwrap_or(c.seed);
    c.scenario().map_err(usage)?;
    Ok((Job::MacSim(c), ctx.outputs(&a.out, a.trace.as_deref())?))
}

fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        seed: cli.seed,
        out_dir: cli.out_dir,
        config: cli.config,
    };
    match cli.cmd {
        Cmd::MacSim(a) => {
            let (job, out) = mac_job(&ctx, &a)?;
            run_job(job, out)
        }
        Cmd::Phy(PhyCmd::Ber(a)) => {
            let mut c: PhyBerConfig = ctx.config()?;
            c.snr_db = a.snr_db.unwrap_or(c.snr_db);
            c.bits = a.bits.unwrap_or(c.bits);
            c.seed = ctx.seed.unwrap_or(c.seed);
            c.gfdm().map_err(usage)?;
            run_job(Job::PhyBer(c), ctx.outputs(&a.out, a.dump_iq.as_deref())?)
        }
        Cmd::Loc(LocCmd::Sim(a)) => {
            let mut c: LocConfig = ctx.config()?;
            if let Some(p) = &a.anchors {
                c.anchors = read_json::<Vec<AnchorSpec>>(p)?;
            }
            if let Some(p) = &a.path {
                c.path = Some(read_json::<Vec<Point>>(p)?);
            }
            c.sigma_d = a.sigma_d.unwrap_or(c.sigma_d);
            c.trials = a.trials.unwrap_or(c.trials);
            c.seed = ctx.seed.unwrap_or(c.seed);
            run_job(Job::LocSim(c), ctx.outputs(&a.out, None)?)
        }
        Cmd::Nlos(NlosCmd::Gen(a)) => {
            let mut c: NlosGenConfig = match &a.params {
                Some(p) => load_config(p).map_err(usage)?,
                None => ctx.config()?,
            };
            c.seed = ctx.seed.unwrap_or(c.seed);
            run_job(Job::NlosGen(c), ctx.outputs(&a.out, None)?)
        }
        Cmd::Nlos(NlosCmd::Eval(a)) => {
            let mut c: NlosEvalConfig = ctx.config()?;
            c.data = std::path::absolute(a.data.unwrap_or(c.data))?;
            if let Some(s) = &a.subsets {
                c.subsets = parse_subsets(s).map_err(usage)?;
            }
            c.seed = ctx.seed.unwrap_or(c.seed);
            run_job(Job::NlosEval(c), ctx.outputs(&a.out, None)?)
        }
        Cmd::Repro(r) => repro(&ctx, r),
    }
}

fn repro(ctx: &Ctx, r: ReproCmd) -> Result<()> {
    let mac_base = || -> Result<MacConfig> {
        let mut c: MacConfig = ctx.config()?;
        c.seed = ctx.seed.unwrap_or(c.seed);
        Ok(c)
    };
    match r {
        ReproCmd::FigDelay => {
            let base = mac_base()?;
            for (access, name) in [(Access::Dcf, "dcf"), (Access::Pcf, "pcf"), (Access::Hcca, "hcca")] {
                let c = MacConfig { access, ..base.clone() };
                run_job(Job::MacSim(c), ctx.outputs(Path::new(&format!("delay_{name}.csv")), None)?)?;
            }
            Ok(())
        }
        ReproCmd::FigScheduler => {
            let base = MacConfig {
                access: Access::Hcca,
                safety_msi_ms: 24.0,
                ..mac_base()?
            };
            for (scheduler, name) in [(Sched::Ref, "ref"), (Sched::Edf, "edf")] {
                let c = MacConfig { scheduler, ..base.clone() };
                run_job(Job::MacSim(c), ctx.outputs(Path::new(&format!("scheduler_{name}.csv")), None)?)?;
            }
            Ok(())
        }
        ReproCmd::FigNlos => {
            let seed = ctx.seed.unwrap_or(1);
            let gen = NlosGenConfig {
                seed,
                ..Default::default()
            };
            let data = ctx.out(Path::new("nlos_cirs.bin"))?;
            run_job(Job::NlosGen(gen), Outputs::new(&data))?;
            let eval = NlosEvalConfig {
                data,
                seed,
                ..Default::default()
            };
            run_job(Job::NlosEval(eval), ctx.outputs(Path::new("nlos_acc.csv"), None)?)
        }
        ReproCmd::Manifest { file } => {
            if ctx.seed.is_some() || ctx.config.is_some() {
                return Err(UsageError("a manifest fixes the seed and configuration".into()).into());
            }
            let m = RunManifest::read(&file)?;
            if m.version != VERSION {
                eprintln!("warning: manifest written by version {}, running {VERSION}", m.version);
            }
            let out = match &ctx.out_dir {
                Some(d) => m.outputs.moved_to(&std::path::absolute(d)?),
                None => m.outputs,
            };
            run_job(m.job, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
