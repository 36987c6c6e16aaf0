//! Headless property suites for `bdris validate`. Each check exercises a
//! documented invariant through the public API and reports a one-line
//! summary, so a failed deployment can be diagnosed without the test harness.

use bdris_core::architecture::{Architecture, TreeShape};
use bdris_core::channel::{sample_channels, Geometry, PathLossParams, RngStreams};
use bdris_core::graph::RisGraph;
use bdris_core::network::{
    admittance_from_components, components_from_admittance, scattering_from_susceptance,
    ScatteringMatrix, SusceptanceMatrix, DEFAULT_Z0,
};
use bdris_core::optimize::{
    build_linear_system, dominant_left_singular_vector, forest_optimize_traced, numerical_rank,
    tree_optimize, DEFAULT_MAX_ITER, DEFAULT_TOL, RANK_REL_TOL,
};
use bdris_core::{Complex64, ComplexMatrix, ComplexRow, RealMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub name: &'static str,
    pub run: fn() -> Result<String, String>,
}

pub fn graph_suite() -> Vec<Check> {
    vec![
        Check {
            name: "graph/random-trees",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(1);
                for _ in 0..200 {
                    let n = rng.random_range(1..=64);
                    let tree =
                        RisGraph::random_spanning_tree(n, &mut rng).map_err(|e| e.to_string())?;
                    if !tree.is_tree() || tree.edge_count() != n - 1 {
                        return Err(format!("sampled graph on {n} vertices is not a tree"));
                    }
                }
                Ok("200 random spanning trees satisfy the tree predicate".into())
            },
        },
        Check {
            name: "graph/components-partition",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(2);
                for _ in 0..200 {
                    let n = rng.random_range(1..=20);
                    let edges: Vec<(usize, usize)> = (1..=n)
                        .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
                        .filter(|_| rng.random_bool(0.2))
                        .collect();
                    let g = RisGraph::new(n, edges).map_err(|e| e.to_string())?;
                    let mut seen: Vec<usize> =
                        g.connected_components().into_iter().flatten().collect();
                    seen.sort_unstable();
                    if seen != (1..=n).collect::<Vec<_>>() {
                        return Err(format!("components do not partition 1..={n}"));
                    }
                    if g.is_tree() != (g.is_connected() && g.is_acyclic()) {
                        return Err("tree predicate inconsistent".into());
                    }
                }
                Ok("components partition the vertex set on 200 random graphs".into())
            },
        },
        Check {
            name: "graph/generators",
            run: || {
                let path = RisGraph::path_graph(8).map_err(|e| e.to_string())?;
                let star = RisGraph::star_graph(5, 1).map_err(|e| e.to_string())?;
                let full = RisGraph::complete_graph(6).map_err(|e| e.to_string())?;
                if path.edge_count() != 7 || !path.is_tree() {
                    return Err("path graph malformed".into());
                }
                if star.degree(1).unwrap() != 4 || !star.is_tree() {
                    return Err("star graph malformed".into());
                }
                if full.edge_count() != 15 {
                    return Err("complete graph malformed".into());
                }
                Ok("path, star, and complete generators have the expected shapes".into())
            },
        },
    ]
}

fn random_symmetric_on(arch: &Architecture, rng: &mut ChaCha8Rng) -> RealMatrix {
    let n = arch.n();
    let mut b = RealMatrix::zeros(n, n);
    for &(i, j) in &arch.susceptance_support() {
        if i <= j {
            let x: f64 = rng.random_range(-0.05..0.05);
            b[(i - 1, j - 1)] = x;
            b[(j - 1, i - 1)] = x;
        }
    }
    b
}

pub fn network_suite() -> Vec<Check> {
    vec![
        Check {
            name: "network/scattering-invariants",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(3);
                let mut worst = 0.0f64;
                for trial in 0..200 {
                    let n = 2 + trial % 10;
                    let arch = match trial % 3 {
                        0 => Architecture::fully(n),
                        1 => Architecture::tridiagonal(n),
                        _ => Architecture::single(n),
                    }
                    .map_err(|e| e.to_string())?;
                    let b = SusceptanceMatrix::new(random_symmetric_on(&arch, &mut rng))
                        .map_err(|e| e.to_string())?;
                    let theta =
                        scattering_from_susceptance(&b, DEFAULT_Z0).map_err(|e| e.to_string())?;
                    worst = worst
                        .max(ScatteringMatrix::symmetry_defect(theta.matrix()))
                        .max(ScatteringMatrix::unitarity_defect(theta.matrix()));
                }
                if worst > 1e-10 {
                    return Err(format!("defect {worst:.3e} exceeds 1e-10"));
                }
                Ok(format!(
                    "200 susceptance matrices map to symmetric unitary scattering \
                     (worst defect {worst:.3e})"
                ))
            },
        },
        Check {
            name: "network/block-structure",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(4);
                let arch =
                    Architecture::forest(8, 4, TreeShape::Arrowhead).map_err(|e| e.to_string())?;
                let b =
                    SusceptanceMatrix::with_support(random_symmetric_on(&arch, &mut rng), &arch)
                        .map_err(|e| e.to_string())?;
                let theta =
                    scattering_from_susceptance(&b, DEFAULT_Z0).map_err(|e| e.to_string())?;
                for i in 0..8 {
                    for j in 0..8 {
                        if i / 4 != j / 4 && theta.matrix()[(i, j)] != Complex64::ZERO {
                            return Err(format!("off-block entry ({i}, {j}) is nonzero"));
                        }
                    }
                }
                Ok("block-diagonal susceptance yields block-diagonal scattering".into())
            },
        },
        Check {
            name: "network/component-round-trip",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(5);
                for _ in 0..200 {
                    let arch = Architecture::group(8, 4).map_err(|e| e.to_string())?;
                    let mut y = ComplexMatrix::zeros(8, 8);
                    for &(i, j) in &arch.susceptance_support() {
                        if i <= j {
                            let re = rng.random_range(-128i32..=128) as f64 / 1024.0;
                            let im = rng.random_range(-128i32..=128) as f64 / 1024.0;
                            y[(i - 1, j - 1)] = Complex64::new(re, im);
                            y[(j - 1, i - 1)] = Complex64::new(re, im);
                        }
                    }
                    let c = components_from_admittance(&y, &arch).map_err(|e| e.to_string())?;
                    if admittance_from_components(&c) != y {
                        return Err("dyadic round trip not exact".into());
                    }
                }
                Ok("component mapping round-trips exactly on 200 dyadic matrices".into())
            },
        },
    ]
}

fn random_channels(n: usize, m: usize, rng: &mut ChaCha8Rng) -> (ComplexRow, ComplexMatrix) {
    use rand_distr::StandardNormal;
    let h_ri = ComplexRow::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h_it = ComplexMatrix::from_fn(n, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (h_ri, h_it)
}

pub fn optimize_suite() -> Vec<Check> {
    vec![
        Check {
            name: "optimize/tree-bound",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(6);
                let mut worst: f64 = 1.0;
                for _ in 0..100 {
                    let n = rng.random_range(2..=16);
                    let tree = Architecture::tree(
                        RisGraph::random_spanning_tree(n, &mut rng).map_err(|e| e.to_string())?,
                    )
                    .map_err(|e| e.to_string())?;
                    let (h_ri, h_it) = random_channels(n, 2, &mut rng);
                    let result = tree_optimize(&h_ri, &h_it, &tree, DEFAULT_Z0)
                        .map_err(|e| e.to_string())?;
                    worst = worst.min(result.power / result.bound);
                }
                if worst < 1.0 - 1e-9 {
                    return Err(format!("worst bound ratio {worst} below 1 - 1e-9"));
                }
                Ok(format!(
                    "100 tree-connected optimizations achieve the bound (worst ratio {worst:.12})"
                ))
            },
        },
        Check {
            name: "optimize/system-rank",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                for _ in 0..100 {
                    let n = rng.random_range(2..=24);
                    let tree = Architecture::tree(
                        RisGraph::random_spanning_tree(n, &mut rng).map_err(|e| e.to_string())?,
                    )
                    .map_err(|e| e.to_string())?;
                    let (h_ri, h_it) = random_channels(n, 2, &mut rng);
                    let u = dominant_left_singular_vector(&h_it).map_err(|e| e.to_string())?;
                    let sys = build_linear_system(&tree, &h_ri, &u, DEFAULT_Z0)
                        .map_err(|e| e.to_string())?;
                    if numerical_rank(sys.a_matrix(), RANK_REL_TOL) != 2 * n - 1
                        || numerical_rank(&sys.augmented(), RANK_REL_TOL) != 2 * n - 1
                    {
                        return Err(format!("rank defect at n={n}"));
                    }
                    let x = sys.solve_least_squares().map_err(|e| e.to_string())?;
                    let x_ne = sys.solve_normal_equations().map_err(|e| e.to_string())?;
                    let residual = (sys.a_matrix() * &x - sys.b_vector()).norm();
                    if residual > 1e-9 * sys.b_vector().norm() {
                        return Err(format!("inconsistent system at n={n}"));
                    }
                    for (a, b) in x.iter().zip(x_ne.iter()) {
                        if (a - b).abs() > 1e-6 * a.abs().max(b.abs()).max(1e-300) {
                            return Err(format!("solver routes disagree at n={n}"));
                        }
                    }
                }
                Ok("rank, consistency, and solver agreement hold on 100 systems".into())
            },
        },
        Check {
            name: "optimize/forest-alternation",
            run: || {
                let mut rng = ChaCha8Rng::seed_from_u64(8);
                for _ in 0..20 {
                    let (h_ri, h_it) = random_channels(8, 2, &mut rng);
                    let forest = Architecture::forest(8, 4, TreeShape::Tridiagonal)
                        .map_err(|e| e.to_string())?;
                    let (result, records) = forest_optimize_traced(
                        &h_ri,
                        &h_it,
                        &forest,
                        DEFAULT_Z0,
                        DEFAULT_TOL,
                        DEFAULT_MAX_ITER,
                        &mut rng,
                    )
                    .map_err(|e| e.to_string())?;
                    for pair in result.objective_history.windows(2) {
                        if pair[1] < pair[0] * (1.0 - 1e-12) {
                            return Err("objective decreased".into());
                        }
                    }
                    for rec in &records {
                        let gap =
                            (rec.power_after_b_update - rec.group_bound).abs() / rec.group_bound;
                        if gap > 1e-9 {
                            return Err(format!(
                                "B-update missed the partition bound by {gap:.3e}"
                            ));
                        }
                    }
                    if result.power > result.bound * (1.0 + 1e-12) {
                        return Err("objective exceeded the spectral bound".into());
                    }
                }
                Ok("20 forest runs are monotone and hit the partition bound per update".into())
            },
        },
    ]
}

pub fn channel_suite() -> Vec<Check> {
    vec![
        Check {
            name: "channel/determinism",
            run: || {
                let streams = RngStreams::new(11, 4);
                let geometry = Geometry::default();
                let params = PathLossParams::default();
                let a = sample_channels(8, 2, &geometry, &params, 0.0, &streams)
                    .map_err(|e| e.to_string())?;
                let b = sample_channels(8, 2, &geometry, &params, 0.0, &streams)
                    .map_err(|e| e.to_string())?;
                if a != b {
                    return Err("same seed produced different realizations".into());
                }
                Ok("identical seeds give bit-identical realizations".into())
            },
        },
        Check {
            name: "channel/stream-independence",
            run: || {
                let streams = RngStreams::new(12, 9);
                let geometry = Geometry::default();
                let params = PathLossParams::default();
                let narrow = sample_channels(6, 1, &geometry, &params, 0.0, &streams)
                    .map_err(|e| e.to_string())?;
                let wide = sample_channels(6, 8, &geometry, &params, 0.0, &streams)
                    .map_err(|e| e.to_string())?;
                if narrow.h_ri != wide.h_ri {
                    return Err("consuming more transmit draws perturbed h_RI".into());
                }
                Ok("named substreams do not interfere".into())
            },
        },
        Check {
            name: "channel/energy-normalization",
            run: || {
                let geometry = Geometry::default();
                let params = PathLossParams::default();
                let l_it = bdris_core::channel::path_loss(
                    geometry.d_it(),
                    &params,
                    bdris_core::channel::Link::TransmitterToRis,
                )
                .map_err(|e| e.to_string())?;
                let (n, m, trials) = (8, 4, 10_000);
                let mut sum = 0.0;
                for trial in 0..trials {
                    let streams = RngStreams::new(77, trial);
                    let c = sample_channels(n, m, &geometry, &params, 0.0, &streams)
                        .map_err(|e| e.to_string())?;
                    sum += c.h_it.norm_squared() / (n * m) as f64;
                }
                let mean = sum / trials as f64;
                let rel = (mean - l_it).abs() / l_it;
                if rel > 0.02 {
                    return Err(format!("mean energy off by {:.1}%", rel * 100.0));
                }
                Ok(format!(
                    "mean per-entry energy matches the large-scale gain within {:.2}%",
                    rel * 100.0
                ))
            },
        },
    ]
}

pub fn all_suites() -> Vec<Check> {
    let mut checks = graph_suite();
    checks.extend(network_suite());
    checks.extend(optimize_suite());
    checks.extend(channel_suite());
    checks
}
