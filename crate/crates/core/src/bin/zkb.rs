use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zkb_core::audit::Identity;
use zkb_core::config::RunConfig;
use zkb_core::experiments::{
    cmd_audit, cmd_decay, cmd_linear_verify, cmd_picard, cmd_simulate, ExitStatus, Outcome, Profile,
};
use zkb_core::Error;

#[derive(Parser)]
#[command(name = "zkb", version, about = "Zakharov-Kuznetsov-Burgers strip solver and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form, semigroup and Duhamel checks of the linear propagator.
    LinearVerify(Common),
    /// Run a simulation and write diagnostics and snapshots.
    Simulate(Common),
    /// Audit energy identities with a dt-halving refinement study.
    Audit {
        #[command(flatten)]
        common: Common,
        /// Identities to audit: mass, h1, combined, h2.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "mass,h1,combined,h2"
        )]
        identities: Vec<String>,
    },
    /// Fit decay rates of the H^s norms.
    Decay(Common),
    /// Fixed-point contraction study over t0.
    Picard(Common),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t-end")]
    t_end: Option<String>,
    /// etd2 or picard.
    #[arg(long)]
    scheme: Option<String>,
    /// Flux cutoff, or `none` for the unregularized flux.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "tolerance-profile", default_value = "strict")]
    tolerance_profile: String,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, Profile), Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let overrides: Vec<(&str, &str)> = [
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("scheme", &self.scheme),
            ("h", &self.h),
            ("seed", &self.seed),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect();
        cfg.apply(overrides)?;
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok((cfg, self.tolerance_profile.parse()?))
    }
}

fn report(outcome: &Outcome) {
    let s = &outcome.summary;
    for c in &s.checks {
        let mark = if c.passed { "pass" } else { "FAIL" };
        println!("[{mark}] {}: {:.3e} (limit {:.3e})", c.name, c.value, c.limit);
    }
    for note in &s.notes {
        println!("note: {note}");
    }
    match outcome.status {
        ExitStatus::Pass => println!("{}: all checks passed", s.experiment),
        _ => {
            if let Some(c) = s.first_failure() {
                eprintln!("{}: first failing check `{}`", s.experiment, c.name);
            } else {
                eprintln!("{}: failed", s.experiment);
            }
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::LinearVerify(c) => {
            let (cfg, p) = c.load()?;
            cmd_linear_verify(&cfg, p, &cfg.out_dir)
        }
        Command::Simulate(c) => {
            let (cfg, p) = c.load()?;
            cmd_simulate(&cfg, p, &cfg.out_dir)
        }
        Command::Audit { common, identities } => {
            let (cfg, p) = common.load()?;
            let ids = identities
                .iter()
                .map(|s| s.parse::<Identity>())
                .collect::<Result<Vec<_>, _>>()?;
            cmd_audit(&cfg, &ids, p, &cfg.out_dir)
        }
        Command::Decay(c) => {
            let (cfg, p) = c.load()?;
            cmd_decay(&cfg, p, &cfg.out_dir)
        }
        Command::Picard(c) => {
            let (cfg, p) = c.load()?;
            cmd_picard(&cfg, p, &cfg.out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; help and version are not
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::ConfigError as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            report(&outcome);
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::of_error(&e) as u8)
        }
    }
}
