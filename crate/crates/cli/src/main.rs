//! `srd`: sandwiched Rényi divergence toolkit.
//!
//! Exit codes: 0 success, 1 suite failure, 2 parse error, 3 precondition
//! violation.

mod io;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use srd_core::divergences::{d_max, qre, rre, srd, RenyiOrder};
use srd_core::dpi::{dpi_check, dpi_violation_search, equality_residual_with, petz_recovery, AdjointRoute, SearchFamily, ViolationSearchOptions};
use srd_core::entanglement::{araki_lieb_renyi, eof_lower_bound, fe_equality_check, reof_lower_bound, reof_minimize, ReofOptions};
use srd_core::entropy::{conditional_renyi, ConditionalRenyiOptions};
use srd_core::tolerances::EQ_TOL;

use io::{num, read_bipartite, read_channel, read_positive, read_state, CliError, CliResult, MatrixFile, MatrixKind};

#[derive(Parser)]
#[command(name = "srd", version, about = "Sandwiched Renyi divergences, data-processing equality and recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DivergenceKind {
    Srd,
    Rre,
    Qre,
    Dmax,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Kraus,
    Stinespring,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    General,
    Commuting,
}

#[derive(Subcommand)]
enum Command {
    /// Divergence of a state from a positive operator.
    Divergence {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = DivergenceKind::Srd)]
        kind: DivergenceKind,
    },
    /// DPI gap and equality certificate for a channel.
    Equality {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Route::Kraus)]
        route: Route,
        /// Only `eq_tol` is recognized.
        #[arg(long, value_parser = parse_key_val)]
        tolerance: Vec<(String, f64)>,
    },
    /// Petz recovery map of `sigma` through a channel, optionally applied to `omega`.
    Recover {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        omega: Option<PathBuf>,
    },
    /// Whether the Petz map of `sigma` recovers `rho`.
    Sufficiency {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_parser = parse_key_val)]
        tolerance: Vec<(String, f64)>,
    },
    /// Sandwiched conditional Renyi entropy S_alpha(A|B).
    ConditionalEntropy {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Renyi Araki-Lieb bounds of a bipartite state.
    ArakiLieb {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Entanglement of formation bounds; with `--alpha > 1` also the Renyi version.
    Eof {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gaussian restarts of the ensemble search.
        #[arg(long, default_value_t = 2)]
        trials: usize,
    },
    /// Entanglement fidelity and its fidelity bound.
    EntanglementFidelity {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        channel: PathBuf,
    },
    /// Run a seeded property suite; `srd suite list` names them.
    Suite {
        name: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated dimensions, meaning depends on the suite.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_parser = parse_key_val)]
        tolerance: Vec<(String, f64)>,
    },
    /// Random two-qubit search for the most negative DPI gap under tr_B.
    ViolationSearch {
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Family::General)]
        family: Family,
    },
}

fn parse_key_val(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VAL, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|e| format!("{k}: {e}"))?;
    if !v.is_finite() || v < 0.0 {
        return Err(format!("{k}: tolerance must be finite and non-negative"));
    }
    Ok((k.to_string(), v))
}

fn eq_tol(overrides: &[(String, f64)]) -> CliResult<f64> {
    let mut tol = EQ_TOL;
    for (k, v) in overrides {
        if k != "eq_tol" {
            return Err(CliError::Parse(format!("unknown tolerance {k:?}; known: eq_tol")));
        }
        tol = *v;
    }
    Ok(tol)
}

fn order(alpha: f64) -> CliResult<RenyiOrder> {
    Ok(RenyiOrder::new(alpha)?)
}

/// Report value and whether it counts as a pass.
fn execute(command: Command) -> CliResult<(Value, bool)> {
    let value = match command {
        Command::Divergence { rho, sigma, alpha, kind } => {
            let (rho, sigma) = (read_state(&rho)?, read_positive(&sigma)?);
            let v = match kind {
                DivergenceKind::Srd => srd(&rho, &sigma, order(alpha)?)?,
                DivergenceKind::Rre => rre(&rho, &sigma, order(alpha)?)?,
                DivergenceKind::Qre => qre(&rho, &sigma)?,
                DivergenceKind::Dmax => d_max(&rho, &sigma)?,
            };
            serde_json::to_value(v).expect("serializable")
        }
        Command::Equality { rho, sigma, channel, alpha, route, tolerance } => {
            let tol = eq_tol(&tolerance)?;
            let (rho, sigma, ch) = (read_state(&rho)?, read_positive(&sigma)?, read_channel(&channel)?);
            let route = match route {
                Route::Kraus => AdjointRoute::Kraus,
                Route::Stinespring => AdjointRoute::Stinespring,
            };
            let report = dpi_check(&rho, &sigma, &ch, order(alpha)?)?;
            let cert = equality_residual_with(&rho, &sigma, &ch, order(alpha)?, route, tol)?;
            json!({
                "alpha": alpha,
                "lhs": report.lhs,
                "rhs": report.rhs,
                "gap": num(report.gap),
                "residual": num(cert.residual),
                "threshold": num(cert.threshold),
                "verdict": cert.verdict,
            })
        }
        Command::Recover { sigma, channel, omega } => {
            let (sigma, ch) = (read_positive(&sigma)?, read_channel(&channel)?);
            let r = petz_recovery(&sigma, &ch)?;
            let anchor = r.recover(&ch.apply(&sigma)?)?.max_diff(sigma.matrix());
            let mut v = json!({
                "channel": MatrixFile::channel(&r.channel),
                "trace_preservation_deviation": num(r.channel.trace_preservation_deviation()),
                "anchor_error": num(anchor),
            });
            if let Some(path) = omega {
                let out = r.recover(&read_positive(&path)?)?;
                v["recovered"] = serde_json::to_value(MatrixFile::square(MatrixKind::Positive, out.matrix())).expect("serializable");
            }
            v
        }
        Command::Sufficiency { rho, sigma, channel, tolerance } => {
            let tol = eq_tol(&tolerance)?;
            let (rho, sigma, ch) = (read_state(&rho)?, read_positive(&sigma)?, read_channel(&channel)?);
            let err = srd_core::dpi::recovery_error(&rho, &sigma, &ch)?;
            json!({ "sufficient": err <= tol, "recovery_error": num(err), "eq_tol": tol })
        }
        Command::ConditionalEntropy { rho, alpha, seed } => {
            let rho = read_bipartite(&rho)?;
            let opts = ConditionalRenyiOptions { seed, ..Default::default() };
            let c = conditional_renyi(&rho, order(alpha)?, &opts)?;
            json!({
                "alpha": alpha,
                "value": num(c.value),
                "optimizer": MatrixFile::square(MatrixKind::State, c.optimizer.matrix()),
            })
        }
        Command::ArakiLieb { rho, alpha, seed } => {
            let rho = read_bipartite(&rho)?;
            let opts = ConditionalRenyiOptions { seed, ..Default::default() };
            serde_json::to_value(araki_lieb_renyi(&rho, order(alpha)?, &opts)?).expect("serializable")
        }
        Command::Eof { rho, alpha, seed, trials } => {
            let rho = read_bipartite(&rho)?;
            let mut v = json!({ "eof_lower_bound": num(eof_lower_bound(&rho)?) });
            if let Some(a) = alpha {
                let a = order(a)?;
                let copts = ConditionalRenyiOptions { seed, ..Default::default() };
                let ropts = ReofOptions { seed, restarts: trials, ..Default::default() };
                let min = reof_minimize(&rho, a, &ropts)?;
                v["alpha"] = json!(a.alpha());
                v["reof_lower_bound"] = num(reof_lower_bound(&rho, a, &copts)?);
                v["reof_upper_bound"] = num(min.value);
                v["ensemble_weights"] = min.ensemble.weights.iter().map(|&w| num(w)).collect();
            }
            v
        }
        Command::EntanglementFidelity { rho, channel } => {
            let (rho, ch) = (read_state(&rho)?, read_channel(&channel)?);
            serde_json::to_value(fe_equality_check(&rho, &ch)?).expect("serializable")
        }
        Command::Suite { name, .. } if name == "list" => {
            suites::SUITES.iter().map(|s| (s.name.to_string(), Value::from(s.about))).collect::<serde_json::Map<_, _>>().into()
        }
        Command::Suite { name, seed, trials, dims, alpha, tolerance } => {
            let spec = suites::find(&name).ok_or_else(|| {
                CliError::Parse(format!("unknown suite {name:?}; known: {}", suites::names().join(", ")))
            })?;
            let report = suites::run(spec, seed, trials, dims, alpha, &tolerance)?;
            let passed = report.passed;
            return Ok((serde_json::to_value(report).expect("serializable"), passed));
        }
        Command::ViolationSearch { alpha, trials, seed, family } => {
            let opts = ViolationSearchOptions {
                trials,
                seed,
                family: match family {
                    Family::General => SearchFamily::General,
                    Family::Commuting => SearchFamily::Commuting,
                },
                ..Default::default()
            };
            let best = dpi_violation_search(alpha, &opts)?;
            json!({
                "alpha": alpha,
                "trials": trials,
                "seed": seed,
                "family": opts.family,
                "gap": num(best.gap),
                "sampled_gap": num(best.sampled_gap),
                "trial": best.trial,
                "rho_ab": MatrixFile::bipartite(&best.rho_ab),
                "sigma_ab": MatrixFile::bipartite(&best.sigma_ab),
            })
        }
    };
    Ok((value, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Format::Json = cli.format;
    match execute(cli.command) {
        Ok((value, passed)) => {
            let text = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("srd: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("srd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
