//! Optimization of BD-RIS scattering matrices for MISO received power.
//!
//! For tree-connected architectures the optimum is closed-form: the condition
//! `Θ u_IT = ĥ_RIᴴ` reduces to a consistent linear system `A x = b` in the
//! `2N−1` free susceptance entries, where `A ∈ ℝ^{2N×(2N−1)}` has full column
//! rank for almost every channel. Forest-connected architectures alternate
//! per-group closed-form solves with maximum-ratio-transmission precoder
//! updates. The single-connected (diagonal) baseline alternates exact
//! co-phasing with MRT.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::architecture::{Architecture, ArchitectureError, ArchitectureKind};
use crate::graph::RisGraph;
use crate::network::{
    group_upper_bound, received_power, scattering_from_susceptance, upper_bound, NetworkError,
    ScatteringMatrix, SusceptanceMatrix, DEFAULT_Z0,
};
use crate::{ComplexMatrix, ComplexRow, ComplexVector, RealMatrix, RealVector};

/// Default relative objective-change tolerance for iterative optimizers.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default iteration cap for iterative optimizers.
pub const DEFAULT_MAX_ITER: usize = 100;
/// Relative singular-value threshold declaring the coefficient matrix
/// numerically rank-deficient.
pub const RANK_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Architecture(#[from] ArchitectureError),
    #[error("architecture graph is not a tree (n={n}, edges={edges})")]
    NotTreeConnected { n: usize, edges: usize },
    #[error("architecture is not forest- or tree-connected")]
    NotForestConnected,
    #[error("channel is zero")]
    ZeroChannel,
    #[error("vector must have unit norm, got {norm}")]
    NonUnitVector { norm: f64 },
    #[error(
        "degenerate channel: coefficient matrix is numerically rank-deficient \
         (min pivot {min_pivot:.3e}, max pivot {max_pivot:.3e})"
    )]
    DegenerateChannel { min_pivot: f64, max_pivot: f64 },
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),
}

/// The real linear system `A x = b` whose solution is the optimal
/// tree-connected susceptance.
///
/// `x` collects the `N` diagonal entries of `B` followed by the `N−1` edge
/// entries in the tree's canonical edge order.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: RealMatrix,
    b: RealVector,
    layout: Vec<(usize, usize)>,
}

impl LinearSystem {
    /// Coefficient matrix `A ∈ ℝ^{2N×(2N−1)}`.
    pub fn a_matrix(&self) -> &RealMatrix {
        &self.a
    }

    /// Right-hand side `b ∈ ℝ^{2N}`.
    pub fn b_vector(&self) -> &RealVector {
        &self.b
    }

    /// Mapping from positions of `x` to 1-based `B` entries: `(i, i)` for the
    /// first `N` positions, then the edge pairs.
    pub fn unknown_layout(&self) -> &[(usize, usize)] {
        &self.layout
    }

    /// The augmented matrix `[A | b] ∈ ℝ^{2N×2N}`.
    pub fn augmented(&self) -> RealMatrix {
        let mut aug = RealMatrix::zeros(self.a.nrows(), self.a.ncols() + 1);
        aug.view_mut((0, 0), (self.a.nrows(), self.a.ncols()))
            .copy_from(&self.a);
        aug.set_column(self.a.ncols(), &self.b);
        aug
    }

    /// Least-squares solution through an orthogonal factorization
    /// (column-pivoted QR): with `A P = Q R`, `x = P R⁻¹ Qᵀ b`.
    ///
    /// Errors with [`OptimizeError::DegenerateChannel`] when the
    /// rank-revealing diagonal of `R` collapses below [`RANK_REL_TOL`] times
    /// its largest pivot, which happens only on a measure-zero set of
    /// channels.
    pub fn solve_least_squares(&self) -> Result<RealVector, OptimizeError> {
        let qr = self.a.clone().col_piv_qr();
        let r = qr.r();
        let max_pivot = r.diagonal().amax();
        let min_pivot = r
            .diagonal()
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if max_pivot == 0.0 || min_pivot <= RANK_REL_TOL * max_pivot {
            return Err(OptimizeError::DegenerateChannel {
                min_pivot,
                max_pivot,
            });
        }
        let mut x = qr.q().transpose() * &self.b;
        if !r.solve_upper_triangular_mut(&mut x) {
            return Err(OptimizeError::DegenerateChannel {
                min_pivot,
                max_pivot,
            });
        }
        qr.p().inv_permute_rows(&mut x);
        Ok(x)
    }

    /// Least-squares solution through the normal equations
    /// `x = (AᵀA)⁻¹Aᵀb`. Retained as an independent cross-check of
    /// [`LinearSystem::solve_least_squares`].
    pub fn solve_normal_equations(&self) -> Result<RealVector, OptimizeError> {
        let at = self.a.transpose();
        let gram = &at * &self.a;
        let rhs = &at * &self.b;
        gram.lu()
            .solve(&rhs)
            .ok_or(OptimizeError::DegenerateChannel {
                min_pivot: 0.0,
                max_pivot: f64::NAN,
            })
    }

    /// Scatters a solution vector back into a susceptance matrix following
    /// the unknown layout. Entries off the tree support stay exactly zero.
    pub fn assemble_susceptance(&self, x: &RealVector) -> SusceptanceMatrix {
        let n = self.layout.len().div_ceil(2);
        let mut b = RealMatrix::zeros(n, n);
        for (pos, &(i, j)) in self.layout.iter().enumerate() {
            b[(i - 1, j - 1)] = x[pos];
            b[(j - 1, i - 1)] = x[pos];
        }
        SusceptanceMatrix::new(b).expect("assembled susceptance is symmetric")
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub susceptance: SusceptanceMatrix,
    pub scattering: ScatteringMatrix,
    /// Unit-norm precoder, `M×1`.
    pub precoder: ComplexVector,
    /// Received power at unit transmit power, watts.
    pub power: f64,
    /// Received-power upper bound at unit transmit power, watts.
    pub bound: f64,
    /// Number of optimizer iterations (1 for the closed-form solver).
    pub iterations: usize,
    /// Objective value after each optimizer update, nondecreasing.
    pub objective_history: Vec<f64>,
}

impl OptimizationResult {
    /// `power / bound`; 1 within solver precision for tree-connected runs.
    pub fn bound_ratio(&self) -> f64 {
        self.power / self.bound
    }

    /// JSON view with matrices as row-major arrays of `[re, im]` pairs.
    /// Powers are scaled by the transmit power `p_t` (watts).
    pub fn to_json(&self, p_t: f64) -> serde_json::Value {
        serde_json::json!({
            "b": real_matrix_json(self.susceptance.matrix()),
            "theta": complex_matrix_json(self.scattering.matrix()),
            "w": self.precoder.iter().map(|c| vec![c.re, c.im]).collect::<Vec<_>>(),
            "power_w": p_t * self.power,
            "bound_w": p_t * self.bound,
            "power_over_bound": self.bound_ratio(),
            "iterations": self.iterations,
            "objective_history_w": self.objective_history.iter().map(|p| p_t * p).collect::<Vec<_>>(),
        })
    }
}

/// Objective snapshot taken inside the alternating forest optimizer, right
/// after a susceptance update.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    /// Received power (unit transmit power) with the freshly optimized `B`
    /// and the precoder it was optimized for.
    pub power_after_b_update: f64,
    /// Block-partition upper bound for that same precoder.
    pub group_bound: f64,
}

fn real_matrix_json(m: &RealMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|i| serde_json::json!((0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>()))
            .collect(),
    )
}

fn complex_matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|i| {
                serde_json::json!((0..m.ncols())
                    .map(|j| vec![m[(i, j)].re, m[(i, j)].im])
                    .collect::<Vec<_>>())
            })
            .collect(),
    )
}

/// Number of singular values exceeding `rel_tol` times the largest one.
pub fn numerical_rank(m: &RealMatrix, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let sigma_max = sv.iter().cloned().fold(0.0f64, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * sigma_max).count()
}

fn fix_phase(v: &mut ComplexVector) {
    if let Some(pivot) = v.iter().find(|c| c.norm() > 1e-12) {
        let rot = Complex64::from_polar(1.0, -pivot.arg());
        for entry in v.iter_mut() {
            *entry *= rot;
        }
    }
}

/// Unit-norm left singular vector of `h` for its largest singular value.
///
/// The phase is fixed so that the first entry with modulus above 1e-12 is
/// real positive, making outputs reproducible; any phase choice leads to the
/// same optimized power.
pub fn dominant_left_singular_vector(h: &ComplexMatrix) -> Result<ComplexVector, OptimizeError> {
    let (u, _) = dominant_singular_pair(h)?;
    Ok(u)
}

/// Unit-norm right singular vector of `h` for its largest singular value,
/// i.e. the maximum-ratio-transmission precoder. Same phase convention as
/// [`dominant_left_singular_vector`].
pub fn dominant_right_singular_vector(h: &ComplexMatrix) -> Result<ComplexVector, OptimizeError> {
    let (_, v) = dominant_singular_pair(h)?;
    Ok(v)
}

fn dominant_singular_pair(
    h: &ComplexMatrix,
) -> Result<(ComplexVector, ComplexVector), OptimizeError> {
    if h.iter().all(|c| *c == Complex64::ZERO) {
        return Err(OptimizeError::ZeroChannel);
    }
    let svd = h.clone().svd(true, true);
    let idx = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonzero matrix has singular values");
    let u_mat = svd
        .u
        .ok_or_else(|| OptimizeError::DecompositionFailed("missing U factor".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| OptimizeError::DecompositionFailed("missing V factor".into()))?;
    let mut u = ComplexVector::from_column_slice(u_mat.column(idx).as_slice());
    let mut v = ComplexVector::from_iterator(v_t.ncols(), v_t.row(idx).iter().map(|c| c.conj()));
    // Unit norm up to roundoff; renormalize so downstream norm checks hold.
    let (nu, nv) = (u.norm(), v.norm());
    u.unscale_mut(nu);
    v.unscale_mut(nv);
    fix_phase(&mut u);
    fix_phase(&mut v);
    Ok((u, v))
}

fn assemble_system(
    alpha: &ComplexVector,
    beta: &ComplexVector,
    edges: &[(usize, usize)],
) -> (RealMatrix, RealVector) {
    let n = alpha.nrows();
    let cols = n + edges.len();
    let mut a = RealMatrix::zeros(2 * n, cols);
    for i in 0..n {
        a[(i, i)] = alpha[i].re;
        a[(n + i, i)] = alpha[i].im;
    }
    for (idx, &(u, v)) in edges.iter().enumerate() {
        let col = n + idx;
        // The edge unknown B[u,v] multiplies alpha[v] in row u and alpha[u]
        // in row v of the complex system B*alpha = beta.
        a[(u - 1, col)] = alpha[v - 1].re;
        a[(v - 1, col)] = alpha[u - 1].re;
        a[(n + u - 1, col)] = alpha[v - 1].im;
        a[(n + v - 1, col)] = alpha[u - 1].im;
    }
    let mut b = RealVector::zeros(2 * n);
    for i in 0..n {
        b[i] = beta[i].re;
        b[n + i] = beta[i].im;
    }
    (a, b)
}

/// Builds the real `2N×(2N−1)` system whose solution is the tree-connected
/// susceptance satisfying `Θ u_IT = ĥ_RIᴴ`.
///
/// `u_it` must be unit norm; `ĥ_RI` is normalized internally.
pub fn build_linear_system(
    tree: &Architecture,
    h_ri: &ComplexRow,
    u_it: &ComplexVector,
    z0: f64,
) -> Result<LinearSystem, OptimizeError> {
    let graph = tree.graph();
    if !graph.is_tree() {
        return Err(OptimizeError::NotTreeConnected {
            n: graph.n(),
            edges: graph.edge_count(),
        });
    }
    let n = graph.n();
    if h_ri.ncols() != n || u_it.nrows() != n {
        return Err(OptimizeError::Network(NetworkError::DimensionMismatch(
            format!(
                "h_ri 1x{}, u_it {}x1, architecture has {n} ports",
                h_ri.ncols(),
                u_it.nrows()
            ),
        )));
    }
    let h_norm = h_ri.norm();
    if h_norm == 0.0 {
        return Err(OptimizeError::ZeroChannel);
    }
    let u_norm = u_it.norm();
    if (u_norm - 1.0).abs() > 1e-9 {
        return Err(OptimizeError::NonUnitVector { norm: u_norm });
    }
    let h_hat_conj = h_ri.adjoint().unscale(h_norm);
    let j_z0 = Complex64::new(0.0, z0);
    let alpha: ComplexVector = (u_it + &h_hat_conj) * j_z0;
    let beta: ComplexVector = u_it - &h_hat_conj;
    let (a, b) = assemble_system(&alpha, &beta, graph.edges());
    let mut layout: Vec<(usize, usize)> = (1..=n).map(|i| (i, i)).collect();
    layout.extend_from_slice(graph.edges());
    Ok(LinearSystem { a, b, layout })
}

/// Closed-form global optimization of a tree-connected architecture.
///
/// Computes the unique susceptance matrix whose scattering matrix maps the
/// dominant transmit direction onto the receive channel, paired with the MRT
/// precoder; the result achieves the received-power upper bound.
pub fn tree_optimize(
    h_ri: &ComplexRow,
    h_it: &ComplexMatrix,
    tree: &Architecture,
    z0: f64,
) -> Result<OptimizationResult, OptimizeError> {
    let (u_it, w) = dominant_singular_pair(h_it)?;
    let system = build_linear_system(tree, h_ri, &u_it, z0)?;
    let x = system.solve_least_squares()?;
    let susceptance = system.assemble_susceptance(&x);
    let scattering = scattering_from_susceptance(&susceptance, z0)?;
    let power = received_power(h_ri, &scattering, h_it, &w, 1.0)?;
    let bound = upper_bound(h_ri, h_it, 1.0);
    Ok(OptimizationResult {
        susceptance,
        scattering,
        precoder: w,
        power,
        bound,
        iterations: 1,
        objective_history: vec![power],
    })
}

fn random_unit_precoder<R: Rng + ?Sized>(m: usize, rng: &mut R) -> ComplexVector {
    loop {
        let w = ComplexVector::from_fn(m, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = w.norm();
        if norm > 0.0 {
            return w.unscale(norm);
        }
    }
}

/// Port partition an alternating optimizer should operate on: the group
/// partition for forests, all ports as one group for tree kinds.
fn alternating_partition(arch: &Architecture) -> Result<Vec<Vec<usize>>, OptimizeError> {
    match arch.kind() {
        ArchitectureKind::Forest { .. } => Ok(arch.group_partition().to_vec()),
        ArchitectureKind::Tree | ArchitectureKind::Tridiagonal | ArchitectureKind::Arrowhead => {
            Ok(vec![(1..=arch.n()).collect()])
        }
        _ => Err(OptimizeError::NotForestConnected),
    }
}

/// Per-group tree architectures with vertices relabeled to `1..=N_G`.
fn local_trees(
    arch: &Architecture,
    partition: &[Vec<usize>],
) -> Result<Vec<Architecture>, OptimizeError> {
    partition
        .iter()
        .map(|group| {
            let local_index =
                |v: usize| group.iter().position(|&g| g == v).expect("vertex in group") + 1;
            let edges: Vec<(usize, usize)> = arch
                .graph()
                .edges()
                .iter()
                .filter(|&&(u, v)| group.contains(&u) && group.contains(&v))
                .map(|&(u, v)| (local_index(u), local_index(v)))
                .collect();
            let graph = RisGraph::new(group.len(), edges).map_err(ArchitectureError::from)?;
            Ok(Architecture::tree(graph)?)
        })
        .collect()
}

/// Alternating optimization of a forest-connected architecture, returning
/// per-iteration records of the susceptance-update objective against the
/// block-partition bound it achieves.
pub fn forest_optimize_traced<R: Rng + ?Sized>(
    h_ri: &ComplexRow,
    h_it: &ComplexMatrix,
    forest: &Architecture,
    z0: f64,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<(OptimizationResult, Vec<IterationRecord>), OptimizeError> {
    let partition = alternating_partition(forest)?;
    let n = forest.n();
    if h_ri.ncols() != n || h_it.nrows() != n {
        return Err(OptimizeError::Network(NetworkError::DimensionMismatch(
            format!(
                "h_ri 1x{}, h_it {}x{}, architecture has {n} ports",
                h_ri.ncols(),
                h_it.nrows(),
                h_it.ncols()
            ),
        )));
    }

    // A single group degenerates to the closed-form tree solution.
    if partition.len() == 1 {
        let result = tree_optimize(h_ri, h_it, forest, z0)?;
        let h_eff = h_it * &result.precoder;
        let group_bound = group_upper_bound(h_ri, &h_eff, &partition, 1.0)?;
        let record = IterationRecord {
            power_after_b_update: result.power,
            group_bound,
        };
        return Ok((result, vec![record]));
    }

    let locals = local_trees(forest, &partition)?;
    let mut w = random_unit_precoder(h_it.ncols(), rng);
    let mut history = Vec::new();
    let mut records = Vec::new();
    let mut iterations = 0;
    let mut previous: Option<f64> = None;
    let (mut susceptance, mut scattering) = (SusceptanceMatrix::zeros(n), None);

    // At least one update pass runs even with max_iter = 0.
    let max_iter = max_iter.max(1);
    while iterations < max_iter {
        iterations += 1;
        let h_eff = h_it * &w;

        // Per-group closed-form susceptance update for the fixed precoder.
        // Each block solves Theta_g * (h_eff,g / ||h_eff,g||) = h_hat_RI,g^H
        // with the effective channel's own phase, so every group contributes
        // a real positive term ||h_RI,g|| ||h_eff,g|| and the sum over groups
        // is coherent.
        let mut b_global = RealMatrix::zeros(n, n);
        let mut theta_global = ComplexMatrix::zeros(n, n);
        for (group, local) in partition.iter().zip(&locals) {
            let h_ri_g = ComplexRow::from_iterator(group.len(), group.iter().map(|&v| h_ri[v - 1]));
            let h_eff_g =
                ComplexVector::from_iterator(group.len(), group.iter().map(|&v| h_eff[v - 1]));
            let eff_norm = h_eff_g.norm();
            if eff_norm == 0.0 {
                return Err(OptimizeError::ZeroChannel);
            }
            let u_g = h_eff_g.unscale(eff_norm);
            let system = build_linear_system(local, &h_ri_g, &u_g, z0)?;
            let x = system.solve_least_squares()?;
            let b_g = system.assemble_susceptance(&x);
            let theta_g = scattering_from_susceptance(&b_g, z0)?;
            for (li, &gi) in group.iter().enumerate() {
                for (lj, &gj) in group.iter().enumerate() {
                    b_global[(gi - 1, gj - 1)] = b_g.matrix()[(li, lj)];
                    theta_global[(gi - 1, gj - 1)] = theta_g.matrix()[(li, lj)];
                }
            }
        }
        susceptance = SusceptanceMatrix::new(b_global)?;
        let theta = ScatteringMatrix::new(theta_global)?;
        let power_b = received_power(h_ri, &theta, h_it, &w, 1.0)?;
        let group_bound = group_upper_bound(h_ri, &h_eff, &partition, 1.0)?;
        records.push(IterationRecord {
            power_after_b_update: power_b,
            group_bound,
        });
        history.push(power_b);

        // MRT precoder update for the fixed scattering matrix.
        let row = h_ri * theta.matrix() * h_it;
        let row_norm = row.norm();
        if row_norm == 0.0 {
            return Err(OptimizeError::ZeroChannel);
        }
        w = row.adjoint().unscale(row_norm);
        let power_w = row_norm * row_norm;
        history.push(power_w);
        scattering = Some(theta);

        if let Some(prev) = previous {
            if (power_w - prev).abs() <= tol * prev.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        previous = Some(power_w);
    }

    let scattering = scattering.expect("at least one iteration ran");
    let power = *history.last().expect("history nonempty");
    let bound = upper_bound(h_ri, h_it, 1.0);
    Ok((
        OptimizationResult {
            susceptance,
            scattering,
            precoder: w,
            power,
            bound,
            iterations,
            objective_history: history,
        },
        records,
    ))
}

/// Alternating optimization of a forest-connected architecture.
///
/// Alternates (i) per-group closed-form susceptance updates against the
/// effective channel `H_IT w` and (ii) MRT precoder updates, starting from a
/// random unit precoder, until the relative objective change drops below
/// `tol` or `max_iter` is reached.
pub fn forest_optimize<R: Rng + ?Sized>(
    h_ri: &ComplexRow,
    h_it: &ComplexMatrix,
    forest: &Architecture,
    z0: f64,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<OptimizationResult, OptimizeError> {
    forest_optimize_traced(h_ri, h_it, forest, z0, tol, max_iter, rng).map(|(result, _)| result)
}

/// Alternating optimization of the single-connected (diagonal) baseline:
/// exact co-phasing of each port for the fixed precoder, then MRT.
pub fn single_optimize<R: Rng + ?Sized>(
    h_ri: &ComplexRow,
    h_it: &ComplexMatrix,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<OptimizationResult, OptimizeError> {
    let n = h_ri.ncols();
    if h_it.nrows() != n {
        return Err(OptimizeError::Network(NetworkError::DimensionMismatch(
            format!("h_ri 1x{n}, h_it {}x{}", h_it.nrows(), h_it.ncols()),
        )));
    }
    if h_ri.norm() == 0.0 || h_it.iter().all(|c| *c == Complex64::ZERO) {
        return Err(OptimizeError::ZeroChannel);
    }

    let mut w = random_unit_precoder(h_it.ncols(), rng);
    let mut phases = vec![0.0f64; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut previous: Option<f64> = None;

    let max_iter = max_iter.max(1);
    while iterations < max_iter {
        iterations += 1;
        let h_eff = h_it * &w;

        // Co-phasing is the exact optimum of the diagonal subproblem.
        let mut coherent = 0.0;
        for i in 0..n {
            let product = h_ri[i] * h_eff[i];
            phases[i] = -product.arg();
            coherent += product.norm();
        }
        history.push(coherent * coherent);

        let rotated = ComplexRow::from_iterator(
            n,
            (0..n).map(|i| h_ri[i] * Complex64::from_polar(1.0, phases[i])),
        );
        let row = rotated * h_it;
        let row_norm = row.norm();
        if row_norm == 0.0 {
            return Err(OptimizeError::ZeroChannel);
        }
        w = row.adjoint().unscale(row_norm);
        let power_w = row_norm * row_norm;
        history.push(power_w);

        if let Some(prev) = previous {
            if (power_w - prev).abs() <= tol * prev.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        previous = Some(power_w);
    }

    let theta = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        n,
        phases.iter().map(|&t| Complex64::from_polar(1.0, t)),
    ));
    // Diagonal phase e^{j*theta} corresponds to B_nn = tan(-theta/2)/Z0.
    let b = RealMatrix::from_diagonal(&RealVector::from_iterator(
        n,
        phases.iter().map(|&t| (-t / 2.0).tan() / DEFAULT_Z0),
    ));
    let power = *history.last().expect("history nonempty");
    Ok(OptimizationResult {
        susceptance: SusceptanceMatrix::new(b)?,
        scattering: ScatteringMatrix::new(theta)?,
        precoder: w,
        power,
        bound: upper_bound(h_ri, h_it, 1.0),
        iterations,
        objective_history: history,
    })
}

/// Optimization of a group-connected architecture with the given group size.
///
/// Each group's arbitrary-symmetric block can be realized by a tree on the
/// same ports without loss, so this delegates to the forest optimizer; only
/// the reported architecture label differs for complexity accounting.
pub fn group_optimize<R: Rng + ?Sized>(
    h_ri: &ComplexRow,
    h_it: &ComplexMatrix,
    group_size: usize,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<OptimizationResult, OptimizeError> {
    let forest = Architecture::forest(h_ri.ncols(), group_size, Default::default())?;
    forest_optimize(h_ri, h_it, &forest, DEFAULT_Z0, tol, max_iter, rng)
}
