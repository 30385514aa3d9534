use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ris_wpc::analytic::{outage_closed_form, outage_reference};
use ris_wpc::montecarlo::{estimate_outage, McConfig};
use ris_wpc::params::{derive, validate, SystemParams};
use ris_wpc::sweepcli::{
    parse_config, parse_values, run_sweep, validate_command, write_records, Config, Engine, Fault,
    Format, SweepAxis, SweepSpec, ValidateOptions,
};

#[derive(Parser)]
#[command(
    name = "ris-wpc",
    version,
    about = "Outage probability of an energy-harvesting user served through an active RIS",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form outage probability.
    Analytic {
        #[command(flatten)]
        params: ParamArgs,
        /// Also evaluate the adaptive reference integral at this tolerance.
        #[arg(long)]
        reference_tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo outage estimate.
    Mc {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long)]
        json: bool,
    },
    /// Sweep one parameter and write CSV or JSON records.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Parameter to vary: m, rho_db, p_ps_dbm, alpha, r_rate or k_nodes.
        #[arg(long)]
        axis: Option<SweepAxis>,
        /// Values as `a,b,c`, `start:end` or `start:end:step`.
        #[arg(long)]
        values: Option<String>,
        /// Comma-separated engines: analytic, mc.
        #[arg(long, value_delimiter = ',')]
        engines: Option<Vec<Engine>>,
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Output file; standard output when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Compare closed form and simulation on the built-in grid; exit 1 on failure.
    Validate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Also report the single-element points (not graded).
        #[arg(long)]
        include_m1: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
        #[arg(long)]
        json: bool,
    },
}

/// Every system parameter as an optional override of the config file.
#[derive(Args)]
struct ParamArgs {
    /// JSON configuration file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tau_c: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    p_ps_dbm: Option<f64>,
    #[arg(long)]
    zeta1_db: Option<f64>,
    #[arg(long)]
    zeta2_db: Option<f64>,
    #[arg(long)]
    rho_db: Option<f64>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    sigma_b_dbm: Option<f64>,
    #[arg(long)]
    sigma_r_dbm: Option<f64>,
    #[arg(long)]
    r_rate: Option<f64>,
    #[arg(long)]
    k_nodes: Option<i64>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

impl ParamArgs {
    fn load(&self) -> CliResult<Config> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                parse_config(&text)?
            }
            None => Config {
                params: SystemParams::default(),
                sweep: None,
                mc: None,
            },
        };
        let p = &mut config.params;
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { p.$field = v; })*
            };
        }
        apply!(
            alpha,
            tau_c,
            eta,
            p_ps_dbm,
            zeta1_db,
            zeta2_db,
            rho_db,
            m,
            sigma_b_dbm,
            sigma_r_dbm,
            r_rate,
            k_nodes
        );
        let report = validate(p);
        if !report.is_ok() {
            return Err(format!("invalid parameters: {report}").into());
        }
        if let Some(s) = config.sweep.as_mut() {
            s.fixed = config.params;
        }
        Ok(config)
    }
}

impl McArgs {
    fn resolve(&self, base: Option<McConfig>) -> McConfig {
        let base = base.unwrap_or_default();
        McConfig {
            trials: self.trials.unwrap_or(base.trials),
            seed: self.seed.unwrap_or(base.seed),
            workers: self.workers.unwrap_or(base.workers),
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Analytic {
            params,
            reference_tol,
            json,
        } => {
            let config = params.load()?;
            let p = config.params;
            let d = derive(&p)?;
            let result = outage_closed_form(&p, &d)?;
            if !(-1e-6..=1.0 + 1e-6).contains(&result.p_raw) {
                eprintln!(
                    "warning: p_raw = {:e} lies outside [0, 1]; K = {} is too small to resolve \
                     the cascade density at m = {}, increase --k-nodes",
                    result.p_raw, result.k_used, p.m
                );
            }
            let reference = reference_tol
                .map(|tol| outage_reference(&p, &d, tol))
                .transpose()?;
            if json {
                print_json(&serde_json::json!({
                    "params": p,
                    "derived": d,
                    "closed_form": result,
                    "reference": reference,
                }))?;
            } else {
                println!("p_out          {:.10e}", result.p_out);
                println!("p_raw          {:.10e}", result.p_raw);
                println!("k_nodes        {}", result.k_used);
                println!("terms_skipped  {}", result.terms_skipped);
                println!("threshold_t    {:.10e}", d.threshold_t);
                println!("gamma shape    {:.6}", d.v_shape);
                if let Some(r) = reference {
                    println!("reference      {r:.10e}");
                }
            }
        }
        Command::Mc { params, mc, json } => {
            let config = params.load()?;
            let p = config.params;
            let d = derive(&p)?;
            let est = estimate_outage(&p, &d, &mc.resolve(config.mc))?;
            if json {
                print_json(&est)?;
            } else {
                println!("p_hat    {:.10e}", est.p_hat);
                println!("stderr   {:.4e}", est.stderr);
                println!("ci95     [{:.6e}, {:.6e}]", est.ci95_lo, est.ci95_hi);
                println!("trials   {}", est.trials);
                println!("seed     {}", est.seed);
            }
        }
        Command::Sweep {
            params,
            mc,
            axis,
            values,
            engines,
            format,
            output,
        } => {
            let config = params.load()?;
            let from_file = config.sweep.clone();
            let axis = axis
                .or(from_file.as_ref().map(|s| s.axis))
                .ok_or("sweep needs --axis (or a `sweep` section in --config)")?;
            let values = match values {
                Some(text) => parse_values(&text)?,
                None => from_file
                    .as_ref()
                    .map(|s| s.values.clone())
                    .ok_or("sweep needs --values (or a `sweep` section in --config)")?,
            };
            let engines: BTreeSet<Engine> = match engines {
                Some(list) => list.into_iter().collect(),
                None => from_file
                    .as_ref()
                    .map(|s| s.engines.clone())
                    .unwrap_or_else(|| BTreeSet::from([Engine::Analytic])),
            };
            let spec = SweepSpec {
                axis,
                values,
                fixed: config.params,
                engines,
                mc: Some(mc.resolve(config.mc)),
            };
            let records = run_sweep(&spec)?;
            for (i, r) in records.iter().enumerate() {
                if let Some(e) = &r.error {
                    eprintln!("point {i} ({axis} = {}): {e}", spec.values[i]);
                }
            }
            match output {
                Some(path) => {
                    let mut file = io::BufWriter::new(
                        fs::File::create(&path)
                            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                    );
                    write_records(&records, format, &mut file)?;
                    file.flush()?;
                }
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    write_records(&records, format, &mut lock)?;
                }
            }
        }
        Command::Validate {
            params,
            trials,
            seed,
            workers,
            include_m1,
            inject_fault,
            json,
        } => {
            let config = params.load()?;
            let defaults = ValidateOptions::default();
            let opts = ValidateOptions {
                base: config.params,
                trials,
                seed,
                workers: workers.unwrap_or(defaults.workers),
                k_nodes: params.k_nodes.unwrap_or(defaults.k_nodes),
                include_informational: include_m1,
                fault: inject_fault,
            };
            let report = validate_command(&opts)?;
            if json {
                print_json(&report)?;
            } else {
                println!("{report}");
            }
            return Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
