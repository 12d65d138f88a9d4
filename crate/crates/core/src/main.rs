//! Command-line harness over the pricing library.
//!
//! Exit codes: 0 success, 1 domain/config error, 2 resource/io limit,
//! 64 usage error.

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qpricer::asian::{asian_exact_expectation, asian_quantum_price, AsianSpec};
use qpricer::bench;
use qpricer::bsm::{bsm_call_price, bsm_call_variance};
use qpricer::config::ExperimentConfig;
use qpricer::error::Error;
use qpricer::mc::{chebyshev_samples, mc_price_european};
use qpricer::qae::QaeConfig;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "qpricer",
    about = "Derivative pricing by classical Monte Carlo and simulated quantum amplitude estimation",
    disable_help_subcommand = true
)]
struct Cli {
    /// TOML config file with experiment overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; every run is deterministic given the seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format for artifacts.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Price the European call through the quantum pipeline.
    PriceEuro,
    /// Price the Asian call through the quantum pipeline.
    PriceAsian,
    /// Classical Monte Carlo price with Chebyshev sample accounting.
    Mc {
        /// Sample count.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Amplitude estimation of the payoff expectation (no discounting).
    Qae,
    /// Sample real-world stock paths (CSV).
    Fig1,
    /// Classical-vs-quantum error scaling experiment (CSV).
    Fig2,
    /// Strike sweep of the scaling-exponent ratio (CSV).
    Fig3,
    /// Run the fast invariant suite.
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version with success; everything else is a
            // usage error.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Domain(_) | Error::Config(_) => ExitCode::from(1),
                Error::Resource(_) | Error::Io(_) => ExitCode::from(2),
            }
        }
    }
}

fn load_config(cli: &Cli) -> qpricer::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_writer(dir: &Path, name: &str) -> qpricer::Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn run(cli: &Cli) -> qpricer::Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::PriceEuro => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let result = bench::price_european_quantum(&cfg, &mut rng)?;
            println!("European call, quantum amplitude estimation");
            println!(
                "  grid qubits n = {}, phase bits m = {}, repetitions D = {}",
                result.grid_qubits, result.phase_bits, result.repetitions
            );
            println!("  payoff cap v_max   = {:.6}", result.v_max);
            println!("  mu_hat             = {:.9}", result.mu_hat);
            println!("  theta_hat          = {:.9}", result.theta_hat);
            println!("  price estimate     = {:.6}", result.pi_hat);
            println!("  analytic price     = {:.6}", result.pi_analytic);
            println!(
                "  |estimate - exact| = {:.6}",
                (result.pi_hat - result.pi_analytic).abs()
            );
            println!("  eps bound (phase)  = {:.6}", result.eps_bound);
            println!("  nu (discretization)= {:.6}", result.nu_est);
            println!("  k_Q total          = {}", result.k_q_total);
            if let Some(dir) = &cli.out {
                let mut w = out_writer(dir, "trace.csv")?;
                bench::write_euro_trace_csv(&result, &mut w)?;
                w.flush()?;
                println!("  trace written to {}", dir.join("trace.csv").display());
            }
            Ok(())
        }
        Command::PriceAsian => {
            let spec = AsianSpec::new(
                cfg.market,
                cfg.asian.periods,
                cfg.asian.period_qubits,
                cfg.asian.kind,
                cfg.grid.cutoff,
            )?;
            let qae = QaeConfig {
                seed: cfg.seed,
                ..cfg.qae
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let result = asian_quantum_price(&spec, cfg.asian.payoff_bits, &qae, &mut rng)?;
            let discount = (-cfg.market.rate * cfg.market.maturity).exp();
            let reference = discount * result.v_max * result.exact_mu;
            println!(
                "Asian call ({}), quantum amplitude estimation",
                spec.kind.label()
            );
            println!(
                "  periods L = {}, qubits/period = {}, phase bits m = {}, D = {}",
                spec.periods, spec.period_qubits, qae.phase_bits, qae.repetitions
            );
            println!("  payoff cap v_max   = {:.6}", result.v_max);
            println!("  mu_hat             = {:.9}", result.mu_hat);
            println!("  price estimate     = {:.6}", result.price);
            println!("  enumeration price  = {:.6}", reference);
            println!(
                "  |estimate - exact| = {:.6}",
                (result.price - reference).abs()
            );
            println!("  eps bound (phase)  = {:.6}", result.eps_bound);
            println!("  k_Q total          = {}", result.k_q_total);
            if let Some(dir) = &cli.out {
                let mut w = out_writer(dir, "asian_trace.csv")?;
                bench::write_asian_trace_csv(
                    &spec,
                    &result,
                    qae.phase_bits,
                    qae.repetitions,
                    &mut w,
                )?;
                w.flush()?;
                println!(
                    "  trace written to {}",
                    dir.join("asian_trace.csv").display()
                );
            }
            Ok(())
        }
        Command::Mc { samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let est = mc_price_european(&cfg.market, *samples, &mut rng)?;
            let quote = bsm_call_price(&cfg.market);
            let lambda = bsm_call_variance(&cfg.market).sqrt();
            println!("European call, classical Monte Carlo");
            println!("  samples k          = {}", est.samples);
            println!("  price estimate     = {:.6}", est.mean);
            println!("  standard error     = {:.6}", est.std_error);
            println!("  analytic price     = {:.6}", quote.price);
            println!("  payoff std bound λ = {:.6}", lambda);
            println!(
                "  Chebyshev k(ε=0.1, δ=0.01) = {}",
                chebyshev_samples(lambda, 0.1, 0.01)?
            );
            Ok(())
        }
        Command::Qae => {
            use qpricer::dist::gaussian_grid;
            use qpricer::payoff::{euro_payoff, quantize_payoff};
            use qpricer::statevec::{exact_mu, prepare_chi};

            let dist = gaussian_grid(cfg.market.maturity, cfg.grid.qubits, cfg.grid.cutoff)?;
            let payoff = euro_payoff(&cfg.market);
            let v_max = payoff(dist.grid.x_max).max(1.0);
            let q = quantize_payoff(&payoff, dist.grid, cfg.grid.payoff_bits, v_max)?;
            let chi = prepare_chi(&dist, &q)?;
            let mu = exact_mu(&chi);
            let sampler = qpricer::qae::QaeSampler::new(&chi, cfg.qae.phase_bits)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut estimates = Vec::new();
            for _ in 0..cfg.qae.repetitions {
                estimates.push(sampler.estimate_once(&mut rng));
            }
            estimates.sort_by(|a, b| a.a_hat.total_cmp(&b.a_hat));
            let median = estimates[(estimates.len() - 1) / 2];
            println!("Amplitude estimation of mu = E[v]");
            println!("  exact mu     = {:.9}", mu);
            println!("  mu_hat       = {:.9}", median.a_hat);
            println!("  theta_hat    = {:.9}", median.phase.theta_hat);
            println!("  |mu_hat - mu|= {:.3e}", (median.a_hat - mu).abs());
            println!("  k_Q per run  = {}", median.phase.unitary_applications);
            println!("  U uses / run = {}", median.u_applications);
            if let Some(dir) = &cli.out {
                // Debug dump of |chi> behind the --out flag.
                let mut w = out_writer(dir, "state.csv")?;
                qpricer::statevec::write_state_csv(&chi, &mut w)?;
                w.flush()?;
                println!(
                    "  state dump written to {}",
                    dir.join("state.csv").display()
                );
            }
            Ok(())
        }
        Command::Fig1 => {
            let rows = bench::fig1_paths(&cfg)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let mut w = out_writer(&dir, "fig1.csv")?;
            bench::write_fig1_csv(&rows, &mut w)?;
            w.flush()?;
            println!(
                "wrote {} path samples to {}",
                rows.len(),
                dir.join("fig1.csv").display()
            );
            Ok(())
        }
        Command::Fig2 => {
            let out = bench::fig2_experiment(&cfg)?;
            println!("Error scaling (power-law fits Error = a k^zeta)");
            println!(
                "  classical: zeta_C = {:.4} (amplitude {:.4}, residual {:.4})",
                out.classical_fit.exponent, out.classical_fit.amplitude, out.classical_fit.residual
            );
            println!(
                "  quantum:   zeta_Q = {:.4} (amplitude {:.4}, residual {:.4})",
                out.quantum_fit.exponent, out.quantum_fit.amplitude, out.quantum_fit.residual
            );
            println!(
                "  ratio zeta_Q / zeta_C = {:.4}",
                out.quantum_fit.exponent / out.classical_fit.exponent
            );
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let mut w = out_writer(&dir, "fig2.csv")?;
            bench::write_fig2_csv(&out, &mut w)?;
            w.flush()?;
            println!("  data written to {}", dir.join("fig2.csv").display());
            Ok(())
        }
        Command::Fig3 => {
            let rows = bench::fig3_experiment(&cfg)?;
            println!("Scaling-exponent ratio by strike (zeta_C fixed at -0.5)");
            for r in &rows {
                println!(
                    "  K = {:>8.2}: zeta_Q = {:.4}, ratio = {:.4}",
                    r.strike, r.zeta_q, r.ratio
                );
            }
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let mut w = out_writer(&dir, "fig3.csv")?;
            bench::write_fig3_csv(&rows, &mut w)?;
            w.flush()?;
            println!("  data written to {}", dir.join("fig3.csv").display());
            Ok(())
        }
        Command::Selftest => {
            let report = bench::selftest(&cfg)?;
            print!("{report}");
            // The Asian reduction is cheap enough to verify here too.
            let spec = AsianSpec::new(cfg.market, 2, 3, cfg.asian.kind, cfg.grid.cutoff)?;
            let v_max = qpricer::asian::default_v_max(&spec)?;
            let mu = asian_exact_expectation(&spec, cfg.asian.payoff_bits, v_max)?;
            let state = qpricer::asian::asian_composite_state(&spec, cfg.asian.payoff_bits, v_max)?;
            let dev = (qpricer::statevec::exact_mu(&state) - mu).abs();
            if dev > 1e-12 {
                println!("FAIL asian_state_identity (dev {dev:.2e})");
                return Err(Error::domain(
                    "selftest failed at asian_state_identity".to_string(),
                ));
            }
            println!("PASS asian_state_identity (dev {dev:.2e})");
            println!("selftest ok");
            Ok(())
        }
    }
}
