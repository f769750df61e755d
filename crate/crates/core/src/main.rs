//! Command-line front end: sampling, pruning, annihilation, formula
//! evaluation, and the Monte Carlo verification suites.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on verification
//! failure, 64 on bad usage. The resolved configuration (including the
//! defaulted seed) is printed to stderr for reproducibility.

use clap::{Args, Parser, Subcommand, ValueEnum};
use prunetree::annihilation::{evolve, shock_tree, simulate_sinks, Potential};
use prunetree::gw::{self, GwParams};
use prunetree::pruning::{prune, prune_mass_equipped, PhiKind};
use prunetree::verify::{
    verify_all, verify_annihilation_equivalence, verify_invariance, verify_random_sink,
    verify_reciprocity, verify_theorem8, McConfig, Report,
};
use prunetree::io;
use std::io::{Read, Write};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "prunetree", version, about = "Dynamical pruning of random trees and 1-D ballistic annihilation", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// RNG seed (PRUNETREE_SEED overrides the default of 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

impl Common {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            std::env::var("PRUNETREE_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(0)
        })
    }
    fn write(&self, text: &str) -> std::io::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PhiArg {
    Height,
    Horton,
    Length,
    Leaves,
}

impl From<PhiArg> for PhiKind {
    fn from(p: PhiArg) -> PhiKind {
        match p {
            PhiArg::Height => PhiKind::Height,
            PhiArg::Horton => PhiKind::HortonOrder,
            PhiArg::Length => PhiKind::Length,
            PhiArg::Leaves => PhiKind::LeafCount,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    /// tree-length density
    Ell,
    /// survival probability, length pruning
    PLength,
    /// survival probability, height pruning
    PHeight,
    /// survival probability, Horton pruning
    PHorton,
    /// growth probability of a random sink
    Xi,
    /// sink mass density (continuous part; the atom is printed separately)
    Mu,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Potential,
    Masstree,
    Trajectories,
    ShocktreeSvg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Invariance,
    Theorem8,
    Sink,
    Equivalence,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Sample exponential critical Galton-Watson trees as JSON lines
    SampleGw {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Node cap per tree (the size law is heavy tailed)
        #[arg(long, default_value_t = gw::DEFAULT_NODE_CAP)]
        cap: usize,
        /// Output format
        #[arg(long, default_value = "json", value_parser = ["json", "newick"])]
        format: String,
        #[command(flatten)]
        common: Common,
    },
    /// Prune a tree (JSON on stdin or --input) by a pruning function
    Prune {
        #[arg(long, value_enum)]
        phi: PhiArg,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        input: Option<std::path::PathBuf>,
        /// File for the cut-set side channel (JSON)
        #[arg(long)]
        cuts: Option<std::path::PathBuf>,
        /// Attach removed-subtree masses (length pruning only)
        #[arg(long, default_value_t = false)]
        masses: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Evolve a ballistic-annihilation potential and emit the state
    Annihilate {
        /// Potential JSON file, or "sample:lambda=<l>" for a random one
        #[arg(long)]
        potential: String,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, value_enum, default_value = "potential")]
        emit: Emit,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a closed-form formula; prints one value, or a CSV sweep
    Eval {
        #[arg(long, value_enum)]
        formula: Formula,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Evaluation point (t, delta, or x depending on the formula)
        #[arg(long)]
        t: Option<f64>,
        /// Sweep: start
        #[arg(long)]
        from: Option<f64>,
        /// Sweep: end
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Mass argument for the mu formula
        #[arg(long)]
        a: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the Monte Carlo verification suites; JSON report
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Pruning function for the invariance suite
        #[arg(long, value_enum, default_value = "length")]
        phi: PhiArg,
        #[command(flatten)]
        common: Common,
    },
    /// Harris path and level-set tree reciprocity property run
    Roundtrip {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1_000)]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &Option<std::path::PathBuf>) -> Result<String, String> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| e.to_string())?;
            Ok(buf)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::SampleGw {
            lambda,
            n,
            cap,
            format,
            common,
        } => {
            let seed = common.seed();
            eprintln!("sample-gw: lambda={lambda} n={n} seed={seed} cap={cap} format={format}");
            let mut out = String::new();
            for i in 0..n {
                let tree = gw::sample_gw(&GwParams::new(lambda, seed).stream(i).cap(cap))
                    .map_err(|e| e.to_string())?;
                match format.as_str() {
                    "newick" => out.push_str(&io::tree_to_newick(&tree)),
                    _ => out.push_str(&io::tree_to_json_string(&tree)),
                }
                out.push('\n');
            }
            common.write(&out).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Prune {
            phi,
            t,
            input,
            cuts,
            masses,
            common,
        } => {
            let seed = common.seed();
            let kind: PhiKind = phi.into();
            eprintln!("prune: phi={} t={t} seed={seed}", kind.name());
            let tree = io::tree_from_json_str(&read_input(&input)?).map_err(|e| e.to_string())?;
            if masses {
                if kind != PhiKind::Length {
                    return Err("mass-equipped pruning is defined for --phi length".into());
                }
                let mt = prune_mass_equipped(&tree, t).map_err(|e| e.to_string())?;
                let j = io::mass_tree_to_json(&mt, t);
                common
                    .write(&serde_json::to_string_pretty(&j).unwrap())
                    .map_err(|e| e.to_string())?;
                return Ok(ExitCode::SUCCESS);
            }
            let (pruned, cutset) = prune(&tree, &kind.into(), t).map_err(|e| e.to_string())?;
            if let Some(path) = cuts {
                let j = io::cuts_to_json(&cutset, &pruned);
                std::fs::write(&path, serde_json::to_string_pretty(&j).unwrap())
                    .map_err(|e| e.to_string())?;
            }
            common
                .write(&io::tree_to_json_string(&pruned))
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Annihilate {
            potential,
            t,
            emit,
            common,
        } => {
            let seed = common.seed();
            eprintln!("annihilate: potential={potential} t={t} seed={seed}");
            let pot = if let Some(spec) = potential.strip_prefix("sample:") {
                let lambda: f64 = spec
                    .strip_prefix("lambda=")
                    .and_then(|v| v.parse().ok())
                    .ok_or("expected sample:lambda=<positive real>")?;
                Potential::sample_exp(&GwParams::new(lambda, seed).cap(100_000), 0.0)
                    .map_err(|e| e.to_string())?
            } else {
                let text =
                    std::fs::read_to_string(&potential).map_err(|e| format!("{potential}: {e}"))?;
                let j: io::PotentialJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
                io::potential_from_json(&j).map_err(|e| e.to_string())?
            };
            if t > pot.t_max() {
                return Err(format!("t = {t} exceeds t_max = {}", pot.t_max()));
            }
            let text = match emit {
                Emit::Potential => {
                    let ep = evolve(&pot, t).map_err(|e| e.to_string())?;
                    serde_json::to_string_pretty(&io::evolved_to_json(&ep)).unwrap()
                }
                Emit::Masstree => {
                    let tree = prunetree::harris::level_set_tree(pot.excursion())
                        .map_err(|e| e.to_string())?;
                    let mt = prune_mass_equipped(&tree, t).map_err(|e| e.to_string())?;
                    serde_json::to_string_pretty(&io::mass_tree_to_json(&mt, t)).unwrap()
                }
                Emit::Trajectories => {
                    let trajs = simulate_sinks(&pot).map_err(|e| e.to_string())?;
                    io::trajectories_to_csv(&trajs)
                }
                Emit::ShocktreeSvg => {
                    let st = shock_tree(&pot).map_err(|e| e.to_string())?;
                    io::shock_tree_svg(&pot, &st)
                }
            };
            common.write(&text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            formula,
            lambda,
            t,
            from,
            to,
            steps,
            a,
            common,
        } => {
            eprintln!("eval: lambda={lambda}");
            let f: Box<dyn Fn(f64) -> Result<f64, String>> = match formula {
                Formula::Ell => {
                    Box::new(move |x| gw::length_pdf(x, lambda).map_err(|e| e.to_string()))
                }
                Formula::PLength => Box::new(move |d| {
                    gw::survival_prob(PhiKind::Length, lambda, d).map_err(|e| e.to_string())
                }),
                Formula::PHeight => Box::new(move |d| {
                    gw::survival_prob(PhiKind::Height, lambda, d).map_err(|e| e.to_string())
                }),
                Formula::PHorton => Box::new(move |d| {
                    gw::survival_prob(PhiKind::HortonOrder, lambda, d).map_err(|e| e.to_string())
                }),
                Formula::Xi => Box::new(move |tt| {
                    gw::growth_probability(tt, lambda).map_err(|e| e.to_string())
                }),
                Formula::Mu => {
                    let tt = t.ok_or("mu needs --t")?;
                    Box::new(move |aa| {
                        gw::sink_mass_pdf(aa, tt, lambda)
                            .map(|r| r.density)
                            .map_err(|e| e.to_string())
                    })
                }
            };
            let text = match (formula, t, a, from, to) {
                (Formula::Mu, Some(tt), Some(aa), _, _) => {
                    let r = gw::sink_mass_pdf(aa, tt, lambda).map_err(|e| e.to_string())?;
                    format!(
                        "{}\natom_at,{}\natom_weight,{}\n",
                        r.density, r.atom_at, r.atom_weight
                    )
                }
                (Formula::Mu, Some(tt), None, None, None) => {
                    let mut s = String::from("a,density\n");
                    for k in 0..=steps {
                        let aa = 2.0 * tt * k as f64 / steps as f64;
                        s.push_str(&format!("{aa},{}\n", gw::sink_mass_density(aa, tt, lambda)));
                    }
                    s.push_str(&format!(
                        "atom,{}\n",
                        gw::growth_probability(tt, lambda).map_err(|e| e.to_string())?
                    ));
                    s
                }
                (_, Some(x), _, _, _) => format!("{}\n", f(x)?),
                (_, None, _, Some(lo), Some(hi)) => {
                    let mut s = String::from("x,value\n");
                    for k in 0..=steps {
                        let x = lo + (hi - lo) * k as f64 / steps as f64;
                        s.push_str(&format!("{x},{}\n", f(x.max(1e-12))?));
                    }
                    s
                }
                _ => return Err("eval needs --t (single value) or --from/--to (CSV sweep)".into()),
            };
            common.write(&text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            lambda,
            t,
            n,
            workers,
            phi,
            common,
        } => {
            let seed = common.seed();
            let mut cfg = McConfig::new(lambda, t, n, seed);
            cfg.workers = workers;
            eprintln!(
                "verify: suite={} lambda={lambda} t={t} n={n} seed={seed} alpha={} cap={}",
                match suite {
                    Suite::Invariance => "invariance",
                    Suite::Theorem8 => "theorem8",
                    Suite::Sink => "sink",
                    Suite::Equivalence => "equivalence",
                    Suite::All => "all",
                },
                cfg.alpha,
                cfg.node_cap
            );
            let reports: Vec<Report> = match suite {
                Suite::Invariance => vec![verify_invariance(&cfg, phi.into())],
                Suite::Theorem8 => vec![verify_theorem8(&cfg)],
                Suite::Sink => vec![verify_random_sink(&cfg)],
                Suite::Equivalence => vec![verify_annihilation_equivalence(&cfg)],
                Suite::All => verify_all(&cfg),
            };
            for r in &reports {
                eprint!("{}", r.render_text());
            }
            common
                .write(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&reports).unwrap()
                ))
                .map_err(|e| e.to_string())?;
            if reports.iter().all(|r| r.passed) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Roundtrip { lambda, n, common } => {
            let seed = common.seed();
            eprintln!("roundtrip: lambda={lambda} n={n} seed={seed}");
            let cfg = McConfig::new(lambda, 0.0, n, seed);
            let report = verify_reciprocity(&cfg);
            eprint!("{}", report.render_text());
            common
                .write(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report).unwrap()
                ))
                .map_err(|e| e.to_string())?;
            if report.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
    }
}
