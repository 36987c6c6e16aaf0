//! Command-line front end for the BD-RIS toolkit: single-shot optimization,
//! Monte Carlo sweeps, circuit-complexity tables, and headless property
//! validation.

mod validate;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use bdris_core::harness::{complexity_table, run_realization, run_sweep, ArchSpec, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "bdris",
    version,
    about = "Model, optimize, and evaluate beyond-diagonal RIS architectures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one seeded channel realization and emit the result as JSON.
    Optimize {
        /// Scenario config file (JSON). The first entries of n_list, m_list,
        /// and rician_k_db select the realization.
        #[arg(long)]
        config: PathBuf,
        /// Architecture: single|tridiagonal|arrowhead|tree|fully|forest:G|group:G.
        #[arg(long)]
        arch: String,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the Monte Carlo sweep over the config grid and write CSV output.
    Sweep {
        /// Scenario config file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; a `<out>.meta.json` sidecar is written next to it.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit the tunable-admittance-component table as CSV.
    Complexity {
        /// Largest port count; rows cover the multiples of lcm(group sizes).
        #[arg(long)]
        n_max: usize,
        /// Comma-separated group sizes for the grouped architectures.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        group_sizes: Vec<usize>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a property suite headlessly and report pass/fail per check.
    Validate {
        /// Suite name: props (all), graph, network, optimize, or channel.
        #[arg(long, default_value = "props")]
        suite: String,
    },
}

fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("failed to read config file `{}`", path.display()))?;
    let config: ScenarioConfig = serde_json::from_str(&text)
        .with_context(|| format!("config file `{}` violates the schema", path.display()))?;
    config
        .validate()
        .with_context(|| format!("config file `{}` is invalid", path.display()))?;
    Ok(config)
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn cmd_optimize(config_path: &Path, arch: &str, seed: Option<u64>) -> Result<()> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let spec = ArchSpec::parse(arch)?;
    let n = config.n_list[0];
    let m = config.m_list[0];
    let k_db = config.rician_k_db[0];
    if let Some(g) = spec.group_size() {
        if g == 0 || n % g != 0 {
            bail!("group size {g} does not divide n={n}");
        }
    }
    let result = run_realization(&spec, n, m, k_db, &config, 0)
        .with_context(|| format!("optimization of `{arch}` failed"))?;
    let mut json = result.to_json(config.p_t_mw * 1e-3);
    json["arch"] = serde_json::json!(spec.label());
    json["group_size"] = serde_json::json!(spec.group_size());
    json["n"] = serde_json::json!(n);
    json["m"] = serde_json::json!(m);
    json["rician_k_db"] = serde_json::json!(k_db);
    json["seed"] = serde_json::json!(config.seed);
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

fn cmd_sweep(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let result = run_sweep(&config)?;
    std::fs::write(out, result.to_csv())
        .with_context(|| format!("failed to write `{}`", out.display()))?;
    let sidecar = out.with_extension(match out.extension() {
        Some(ext) => format!("{}.meta.json", ext.to_string_lossy()),
        None => "meta.json".to_string(),
    });
    std::fs::write(
        &sidecar,
        serde_json::to_string_pretty(&result.metadata_json(&config))?,
    )
    .with_context(|| format!("failed to write `{}`", sidecar.display()))?;
    eprintln!(
        "wrote {} rows to {} (metadata: {})",
        result.rows.len(),
        out.display(),
        sidecar.display()
    );
    Ok(())
}

fn cmd_complexity(n_max: usize, group_sizes: &[usize], out: Option<&Path>) -> Result<()> {
    if n_max == 0 {
        bail!("--n-max must be at least 1");
    }
    let step = group_sizes.iter().copied().fold(1, lcm);
    let n_values: Vec<usize> = (1..=n_max).filter(|n| n % step == 0).collect();
    if n_values.is_empty() {
        bail!("no port count up to {n_max} is divisible by all group sizes {group_sizes:?}");
    }
    let table = complexity_table(&n_values, group_sizes)?;
    match out {
        Some(path) => std::fs::write(path, table.to_csv())
            .with_context(|| format!("failed to write `{}`", path.display()))?,
        None => print!("{}", table.to_csv()),
    }
    Ok(())
}

fn cmd_validate(suite: &str) -> Result<()> {
    let checks = match suite {
        "props" => validate::all_suites(),
        "graph" => validate::graph_suite(),
        "network" => validate::network_suite(),
        "optimize" => validate::optimize_suite(),
        "channel" => validate::channel_suite(),
        other => bail!("unknown suite `{other}` (expected props|graph|network|optimize|channel)"),
    };
    let mut failures = 0;
    for check in checks {
        match (check.run)() {
            Ok(detail) => println!("[PASS] {}: {detail}", check.name),
            Err(err) => {
                failures += 1;
                println!("[FAIL] {}: {err}", check.name);
            }
        }
    }
    if failures > 0 {
        bail!("{failures} validation check(s) failed");
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Optimize { config, arch, seed } => cmd_optimize(&config, &arch, seed),
        Command::Sweep { config, out, seed } => cmd_sweep(&config, &out, seed),
        Command::Complexity {
            n_max,
            group_sizes,
            out,
        } => cmd_complexity(n_max, &group_sizes, out.as_deref()),
        Command::Validate { suite } => cmd_validate(&suite),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
