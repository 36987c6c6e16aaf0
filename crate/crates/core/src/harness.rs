//! Experiment harness: seeded Monte Carlo sweeps over architectures and
//! channel configurations, circuit-complexity tables, and CSV emission.
//!
//! Trials are embarrassingly parallel; every trial derives its own named RNG
//! substreams from `(seed, trial)` and results are reduced in trial order, so
//! output is bit-identical across runs and thread counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::architecture::{Architecture, ArchitectureError, ArchitectureKind, TreeShape};
use crate::channel::{
    sample_channels, ChannelError, Geometry, PathLossParams, RngStreams, STREAM_PRECODER,
};
use crate::network::DEFAULT_Z0;
use crate::optimize::{
    forest_optimize, group_optimize, single_optimize, tree_optimize, OptimizationResult,
    OptimizeError, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

/// Identifier of the line-of-sight construction used by the channel module,
/// recorded in sweep metadata so alternates can be distinguished.
pub const LOS_MODEL: &str = "ula-half-wavelength-rank-one";

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV_VAR: &str = "BDRIS_THREADS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Architecture(#[from] ArchitectureError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// Architecture selector in a scenario config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArchSpec {
    Single,
    Tridiagonal,
    Arrowhead,
    Tree,
    Forest {
        group_size: usize,
        #[serde(default)]
        inner: TreeShape,
    },
    Group {
        group_size: usize,
    },
    Fully,
}

impl ArchSpec {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Single => "single",
            Self::Tridiagonal => "tridiagonal",
            Self::Arrowhead => "arrowhead",
            Self::Tree => "tree",
            Self::Forest { .. } => "forest",
            Self::Group { .. } => "group",
            Self::Fully => "fully",
        }
    }

    pub fn group_size(&self) -> Option<usize> {
        match self {
            Self::Forest { group_size, .. } | Self::Group { group_size } => Some(*group_size),
            _ => None,
        }
    }

    /// Parses CLI-style labels: `single`, `tree`, `forest:8`, `group:4`, ...
    pub fn parse(label: &str) -> Result<Self, HarnessError> {
        let (kind, group) = match label.split_once(':') {
            Some((k, g)) => {
                let size: usize = g.parse().map_err(|_| {
                    HarnessError::InvalidConfig(format!("invalid group size in `{label}`"))
                })?;
                (k, Some(size))
            }
            None => (label, None),
        };
        match (kind, group) {
            ("single", None) => Ok(Self::Single),
            ("tridiagonal", None) => Ok(Self::Tridiagonal),
            ("arrowhead", None) => Ok(Self::Arrowhead),
            ("tree", None) => Ok(Self::Tree),
            ("fully", None) => Ok(Self::Fully),
            ("forest", Some(g)) => Ok(Self::Forest {
                group_size: g,
                inner: TreeShape::default(),
            }),
            ("group", Some(g)) => Ok(Self::Group { group_size: g }),
            _ => Err(HarnessError::InvalidConfig(format!(
                "unknown architecture `{label}` (expected single|tridiagonal|arrowhead|tree|fully|forest:G|group:G)"
            ))),
        }
    }
}

/// Scenario description consumed by [`run_sweep`]; serializes as the JSON
/// config document of the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub geometry: Geometry,
    pub path_loss: PathLossParams,
    /// Rician factors of the transmitter-to-RIS link, dB; one grid axis.
    pub rician_k_db: Vec<f64>,
    /// Transmit power in milliwatts.
    pub p_t_mw: f64,
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    /// Monte Carlo realizations per grid point.
    pub trials: usize,
    pub seed: u64,
    pub architectures: Vec<ArchSpec>,
}

impl ScenarioConfig {
    /// Scenario used throughout the evaluation: transmitter at the origin,
    /// receiver at (52, 0) m, RIS at (50, 2) m, 10 mW transmit power,
    /// Rician factors 0 and 10 dB.
    pub fn default_scenario() -> Self {
        Self {
            geometry: Geometry::default(),
            path_loss: PathLossParams::default(),
            rician_k_db: vec![0.0, 10.0],
            p_t_mw: 10.0,
            n_list: vec![8, 16, 24, 32, 40, 48, 56, 64],
            m_list: vec![2, 8],
            trials: 1000,
            seed: 1,
            architectures: vec![
                ArchSpec::Single,
                ArchSpec::Forest {
                    group_size: 2,
                    inner: TreeShape::Tridiagonal,
                },
                ArchSpec::Forest {
                    group_size: 4,
                    inner: TreeShape::Tridiagonal,
                },
                ArchSpec::Forest {
                    group_size: 8,
                    inner: TreeShape::Tridiagonal,
                },
                ArchSpec::Group { group_size: 8 },
                ArchSpec::Tree,
                ArchSpec::Fully,
            ],
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.n_list.is_empty() {
            return fail("n_list must not be empty".into());
        }
        if self.m_list.is_empty() {
            return fail("m_list must not be empty".into());
        }
        if self.rician_k_db.is_empty() {
            return fail("rician_k_db must not be empty".into());
        }
        if self.architectures.is_empty() {
            return fail("architectures must not be empty".into());
        }
        if self.trials == 0 {
            return fail("trials must be positive".into());
        }
        if self.p_t_mw <= 0.0 {
            return fail("p_t_mw must be positive".into());
        }
        if self.n_list.contains(&0) || self.m_list.contains(&0) {
            return fail("n_list and m_list entries must be at least 1".into());
        }
        self.geometry.validate()?;
        self.path_loss.validate()?;
        for &n in &self.n_list {
            for arch in &self.architectures {
                if let Some(g) = arch.group_size() {
                    if g == 0 || n % g != 0 {
                        return fail(format!(
                            "group size {g} of `{}` does not divide n={n}",
                            arch.label()
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub arch: String,
    pub n: usize,
    pub m: usize,
    pub group_size: Option<usize>,
    pub k_db: f64,
    pub trials: usize,
    pub mean_power_w: f64,
    pub stderr_w: f64,
    pub mean_iters: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub seed: u64,
    pub config_hash: String,
    pub code_version: String,
    pub los_model: String,
}

/// Full sweep output: one row per grid point, in `n → m → k → architecture`
/// order, plus reproducibility metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    /// Fixed-column CSV: `arch,n,m,group_size,k_db,trials,mean_power_w,stderr_w,mean_iters`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("arch,n,m,group_size,k_db,trials,mean_power_w,stderr_w,mean_iters\n");
        for row in &self.rows {
            let group = row.group_size.map(|g| g.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{:e},{:e},{}\n",
                row.arch,
                row.n,
                row.m,
                group,
                row.k_db,
                row.trials,
                row.mean_power_w,
                row.stderr_w,
                row.mean_iters
            ));
        }
        out
    }

    /// Sidecar JSON with the seed, the full config, and version info.
    pub fn metadata_json(&self, config: &ScenarioConfig) -> serde_json::Value {
        serde_json::json!({
            "seed": self.metadata.seed,
            "config": config,
            "config_hash": self.metadata.config_hash,
            "code_version": self.metadata.code_version,
            "los_model": self.metadata.los_model,
        })
    }
}

/// Optimizes one seeded channel realization of a grid point; powers in the
/// result are at unit transmit power.
pub fn run_realization(
    spec: &ArchSpec,
    n: usize,
    m: usize,
    k_db: f64,
    config: &ScenarioConfig,
    trial: u64,
) -> Result<OptimizationResult, HarnessError> {
    let streams = RngStreams::new(config.seed, trial);
    let channels = sample_channels(n, m, &config.geometry, &config.path_loss, k_db, &streams)?;
    let mut precoder_rng = streams.stream(STREAM_PRECODER);
    let result = match *spec {
        ArchSpec::Single => single_optimize(
            &channels.h_ri,
            &channels.h_it,
            DEFAULT_TOL,
            DEFAULT_MAX_ITER,
            &mut precoder_rng,
        )?,
        ArchSpec::Tridiagonal => tree_optimize(
            &channels.h_ri,
            &channels.h_it,
            &Architecture::tridiagonal(n)?,
            DEFAULT_Z0,
        )?,
        ArchSpec::Arrowhead => tree_optimize(
            &channels.h_ri,
            &channels.h_it,
            &Architecture::arrowhead(n)?,
            DEFAULT_Z0,
        )?,
        ArchSpec::Tree => tree_optimize(
            &channels.h_ri,
            &channels.h_it,
            &Architecture::build(ArchitectureKind::Tree, n)?,
            DEFAULT_Z0,
        )?,
        // A complete graph contains a spanning tree whose closed-form
        // optimum already attains the upper bound, so the fully-connected
        // optimum is realized inside a tree support.
        ArchSpec::Fully => tree_optimize(
            &channels.h_ri,
            &channels.h_it,
            &Architecture::build(ArchitectureKind::Tree, n)?,
            DEFAULT_Z0,
        )?,
        ArchSpec::Forest { group_size, inner } => forest_optimize(
            &channels.h_ri,
            &channels.h_it,
            &Architecture::forest(n, group_size, inner)?,
            DEFAULT_Z0,
            DEFAULT_TOL,
            DEFAULT_MAX_ITER,
            &mut precoder_rng,
        )?,
        ArchSpec::Group { group_size } => group_optimize(
            &channels.h_ri,
            &channels.h_it,
            group_size,
            DEFAULT_TOL,
            DEFAULT_MAX_ITER,
            &mut precoder_rng,
        )?,
    };
    Ok(result)
}

/// Runs the full Monte Carlo sweep described by `config`.
///
/// Parallelism is capped by the `BDRIS_THREADS` environment variable when
/// set; results do not depend on the thread count.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult, HarnessError> {
    let threads = match std::env::var(THREADS_ENV_VAR) {
        Ok(v) => Some(v.parse::<usize>().map_err(|_| {
            HarnessError::InvalidConfig(format!("{THREADS_ENV_VAR} must be a positive integer"))
        })?),
        Err(_) => None,
    };
    run_sweep_with_threads(config, threads)
}

/// As [`run_sweep`] with an explicit thread cap (`None` uses the default).
pub fn run_sweep_with_threads(
    config: &ScenarioConfig,
    threads: Option<usize>,
) -> Result<SweepResult, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::InvalidConfig(format!("thread pool: {e}")))?;

    let p_t_w = config.p_t_mw * 1e-3;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        for &m in &config.m_list {
            for &k_db in &config.rician_k_db {
                for spec in &config.architectures {
                    // Per-trial results are collected in trial order so the
                    // reduction below is schedule-independent.
                    let per_trial: Result<Vec<(f64, usize)>, HarnessError> = pool.install(|| {
                        (0..config.trials as u64)
                            .into_par_iter()
                            .map(|trial| {
                                run_realization(spec, n, m, k_db, config, trial)
                                    .map(|r| (p_t_w * r.power, r.iterations))
                            })
                            .collect()
                    });
                    let per_trial = per_trial?;
                    let count = per_trial.len() as f64;
                    let mean_power = per_trial.iter().map(|&(p, _)| p).sum::<f64>() / count;
                    let stderr = if per_trial.len() > 1 {
                        let var = per_trial
                            .iter()
                            .map(|&(p, _)| (p - mean_power).powi(2))
                            .sum::<f64>()
                            / (count - 1.0);
                        (var / count).sqrt()
                    } else {
                        0.0
                    };
                    let mean_iters =
                        per_trial.iter().map(|&(_, it)| it as f64).sum::<f64>() / count;
                    rows.push(SweepRow {
                        arch: spec.label().to_string(),
                        n,
                        m,
                        group_size: spec.group_size(),
                        k_db,
                        trials: config.trials,
                        mean_power_w: mean_power,
                        stderr_w: stderr,
                        mean_iters,
                    });
                }
            }
        }
    }

    Ok(SweepResult {
        rows,
        metadata: SweepMetadata {
            seed: config.seed,
            config_hash: config.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            los_model: LOS_MODEL.to_string(),
        },
    })
}

/// One line of the complexity table: tunable admittance-component counts per
/// architecture at a given `N`. Grouped columns follow the order of the
/// requested group sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub fully: usize,
    pub group: Vec<usize>,
    pub tree: usize,
    pub forest: Vec<usize>,
    pub single: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityTable {
    pub group_sizes: Vec<usize>,
    pub rows: Vec<ComplexityRow>,
}

impl ComplexityTable {
    pub fn to_csv(&self) -> String {
        let mut header = String::from("n,fully");
        for g in &self.group_sizes {
            header.push_str(&format!(",group_{g}"));
        }
        header.push_str(",tree");
        for g in &self.group_sizes {
            header.push_str(&format!(",forest_{g}"));
        }
        header.push_str(",single\n");
        let mut out = header;
        for row in &self.rows {
            out.push_str(&format!("{},{}", row.n, row.fully));
            for c in &row.group {
                out.push_str(&format!(",{c}"));
            }
            out.push_str(&format!(",{}", row.tree));
            for c in &row.forest {
                out.push_str(&format!(",{c}"));
            }
            out.push_str(&format!(",{}\n", row.single));
        }
        out
    }
}

/// Exact tunable-component counts for every requested architecture and `N`.
///
/// Every group size must divide every `N`; a violation is an error rather
/// than a blank cell.
pub fn complexity_table(
    n_values: &[usize],
    group_sizes: &[usize],
) -> Result<ComplexityTable, HarnessError> {
    if n_values.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "n_values must not be empty".into(),
        ));
    }
    let rows = n_values
        .iter()
        .map(|&n| {
            let group = group_sizes
                .iter()
                .map(|&g| Ok(Architecture::group(n, g)?.admittance_count()))
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let forest = group_sizes
                .iter()
                .map(
                    |&g| Ok(Architecture::forest(n, g, TreeShape::Tridiagonal)?.admittance_count()),
                )
                .collect::<Result<Vec<_>, HarnessError>>()?;
            Ok(ComplexityRow {
                n,
                fully: Architecture::fully(n)?.admittance_count(),
                group,
                tree: Architecture::tridiagonal(n)?.admittance_count(),
                forest,
                single: Architecture::single(n)?.admittance_count(),
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(ComplexityTable {
        group_sizes: group_sizes.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ScenarioConfig {
        ScenarioConfig {
            rician_k_db: vec![0.0],
            n_list: vec![4],
            m_list: vec![2],
            trials: 8,
            seed: 7,
            architectures: vec![ArchSpec::Single, ArchSpec::Tree, ArchSpec::Fully],
            ..ScenarioConfig::default_scenario()
        }
    }

    #[test]
    fn complexity_reference_values() {
        let table = complexity_table(&[64], &[8]).unwrap();
        let row = &table.rows[0];
        assert_eq!(row.fully, 2080);
        assert_eq!(row.tree, 127);
        assert_eq!(row.group, vec![288]);
        assert_eq!(row.forest, vec![120]);
        assert_eq!(row.single, 64);
        assert!((row.fully as f64 / row.tree as f64 - 16.377_952_755_905_51).abs() < 1e-12);
        assert!((row.group[0] as f64 / row.forest[0] as f64 - 2.4).abs() < 1e-15);
    }

    #[test]
    fn complexity_trivial_and_errors() {
        let table = complexity_table(&[1], &[1]).unwrap();
        let row = &table.rows[0];
        assert_eq!(
            (row.fully, row.tree, row.single, row.group[0], row.forest[0]),
            (1, 1, 1, 1, 1)
        );
        assert!(complexity_table(&[], &[2]).is_err());
        assert!(complexity_table(&[10], &[4]).is_err());
    }

    #[test]
    fn complexity_csv_layout() {
        let table = complexity_table(&[8, 64], &[2, 8]).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,fully,group_2,group_8,tree,forest_2,forest_8,single"
        );
        assert_eq!(lines.nth(1).unwrap(), "64,2080,96,288,127,96,120,64");
    }

    #[test]
    fn sweep_grid_coverage_and_determinism() {
        let config = tiny_config();
        let a = run_sweep_with_threads(&config, Some(1)).unwrap();
        assert_eq!(
            a.rows.len(),
            config.n_list.len()
                * config.m_list.len()
                * config.rician_k_db.len()
                * config.architectures.len()
        );
        let b = run_sweep_with_threads(&config, Some(3)).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let c = run_sweep_with_threads(&config, Some(1)).unwrap();
        assert_eq!(a.to_csv(), c.to_csv());
    }

    #[test]
    fn sweep_tree_matches_fully() {
        let result = run_sweep_with_threads(&tiny_config(), None).unwrap();
        let tree = result.rows.iter().find(|r| r.arch == "tree").unwrap();
        let fully = result.rows.iter().find(|r| r.arch == "fully").unwrap();
        assert!((tree.mean_power_w / fully.mean_power_w - 1.0).abs() < 1e-9);
        let single = result.rows.iter().find(|r| r.arch == "single").unwrap();
        assert!(single.mean_power_w <= tree.mean_power_w);
    }

    #[test]
    fn config_validation_errors() {
        let mut config = tiny_config();
        config.architectures.clear();
        assert!(matches!(
            run_sweep_with_threads(&config, None),
            Err(HarnessError::InvalidConfig(_))
        ));

        let mut config = tiny_config();
        config.architectures = vec![ArchSpec::Forest {
            group_size: 3,
            inner: TreeShape::Tridiagonal,
        }];
        assert!(run_sweep_with_threads(&config, None).is_err());

        let mut config = tiny_config();
        config.trials = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn arch_spec_parsing() {
        assert_eq!(ArchSpec::parse("single").unwrap(), ArchSpec::Single);
        assert_eq!(
            ArchSpec::parse("forest:8").unwrap(),
            ArchSpec::Forest {
                group_size: 8,
                inner: TreeShape::Tridiagonal
            }
        );
        assert_eq!(
            ArchSpec::parse("group:4").unwrap(),
            ArchSpec::Group { group_size: 4 }
        );
        assert!(ArchSpec::parse("mesh").is_err());
        assert!(ArchSpec::parse("forest").is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let config = ScenarioConfig::default_scenario();
        let json = serde_json::to_string_pretty(&config).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.hash(), config.hash());
    }

    #[test]
    fn csv_schema() {
        let result = run_sweep_with_threads(&tiny_config(), None).unwrap();
        let csv = result.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "arch,n,m,group_size,k_db,trials,mean_power_w,stderr_w,mean_iters"
        );
        for line in lines {
            assert_eq!(line.split(',').count(), 9);
        }
    }
}
