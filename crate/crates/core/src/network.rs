//! Multiport network conversions and received-power evaluation.
//!
//! A purely susceptive N-port network has admittance matrix `Y = jB` with `B`
//! real symmetric, and scattering matrix `Θ = (I + jZ₀B)⁻¹(I − jZ₀B)`, which
//! is complex symmetric and unitary. This module provides the conversions
//! between `B`, `Y`, per-component admittance values, and `Θ`, plus the
//! received-power objective and its upper bounds.

use num_complex::Complex64;
use thiserror::Error;

use crate::architecture::Architecture;
use crate::{ComplexMatrix, ComplexRow, ComplexVector, RealMatrix};

/// Reference impedance for scattering parameters, in ohms.
pub const DEFAULT_Z0: f64 = 50.0;

/// Relative tolerance for the symmetry and unitarity invariants of a
/// scattering matrix in double precision.
pub const SCATTERING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("scattering matrix fails the unitarity invariant (defect {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("entry ({i}, {j}) is outside the architecture's susceptance support")]
    SupportViolation { i: usize, j: usize },
    #[error("I + Z0*Y is singular")]
    SingularConversion,
    #[error("precoder must have unit norm, got {norm}")]
    NonUnitPrecoder { norm: f64 },
    #[error("partition does not cover ports 1..={n} exactly")]
    InvalidPartition { n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Real symmetric susceptance matrix `B` (siemens), with off-diagonal support
/// restricted to the owning architecture's graph edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptanceMatrix(RealMatrix);

impl SusceptanceMatrix {
    /// Wraps a matrix after checking it is square and exactly symmetric.
    pub fn new(matrix: RealMatrix) -> Result<Self, NetworkError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(NetworkError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        for i in 0..matrix.nrows() {
            for j in i + 1..matrix.ncols() {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(NetworkError::NotSymmetric);
                }
            }
        }
        Ok(Self(matrix))
    }

    /// As [`SusceptanceMatrix::new`], additionally checking that every
    /// nonzero off-diagonal entry lies on an edge of `arch`.
    pub fn with_support(matrix: RealMatrix, arch: &Architecture) -> Result<Self, NetworkError> {
        let b = Self::new(matrix)?;
        let support = arch.susceptance_support();
        for i in 0..b.n() {
            for j in 0..b.n() {
                if b.0[(i, j)] != 0.0 && !support.contains(&(i + 1, j + 1)) {
                    return Err(NetworkError::SupportViolation { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(b)
    }

    pub fn zeros(n: usize) -> Self {
        Self(RealMatrix::zeros(n, n))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// Complex symmetric unitary scattering matrix `Θ` of a lossless reciprocal
/// network.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix(ComplexMatrix);

impl ScatteringMatrix {
    /// Wraps a matrix after validating the symmetry and unitarity invariants
    /// at [`SCATTERING_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self, NetworkError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(NetworkError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let sym = Self::symmetry_defect(&matrix);
        if sym > SCATTERING_TOL {
            return Err(NetworkError::NotSymmetric);
        }
        let defect = Self::unitarity_defect(&matrix);
        if defect > SCATTERING_TOL {
            return Err(NetworkError::NotUnitary { defect });
        }
        Ok(Self(matrix))
    }

    /// `‖Θ − Θᵀ‖ / ‖Θ‖` in the Frobenius norm.
    pub fn symmetry_defect(matrix: &ComplexMatrix) -> f64 {
        let norm = matrix.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (matrix - matrix.transpose()).norm() / norm
    }

    /// `‖ΘᴴΘ − I‖ / √N` in the Frobenius norm (note `‖I‖ = √N`).
    pub fn unitarity_defect(matrix: &ComplexMatrix) -> f64 {
        let n = matrix.nrows();
        let gram = matrix.adjoint() * matrix;
        (gram - ComplexMatrix::identity(n, n)).norm() / (n as f64).sqrt()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// Tunable admittance values realizing an admittance matrix: one grounded
/// admittance per port and one interconnecting admittance per graph edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentValues {
    /// Grounded admittance `Y_n` per port, in siemens.
    pub grounded: Vec<Complex64>,
    /// Interconnecting admittance `Y_{n,m}` per edge `(n, m)` with `n < m`,
    /// 1-based, in siemens.
    pub interconnecting: std::collections::BTreeMap<(usize, usize), Complex64>,
}

impl ComponentValues {
    pub fn n(&self) -> usize {
        self.grounded.len()
    }
}

/// Scattering matrix of a purely susceptive network:
/// `Θ = (I + jZ₀B)⁻¹(I − jZ₀B)`.
///
/// The inverse is applied through an LU factorization with partial pivoting;
/// `I + jZ₀B` is always invertible for real symmetric `B`.
pub fn scattering_from_susceptance(
    b: &SusceptanceMatrix,
    z0: f64,
) -> Result<ScatteringMatrix, NetworkError> {
    let y = b.matrix().map(|x| Complex64::new(0.0, x));
    let theta = cayley_from_admittance(&y, z0)?;
    ScatteringMatrix::new(theta)
}

/// Scattering matrix of a general admittance matrix:
/// `Θ = (I + Z₀Y)⁻¹(I − Z₀Y)`.
///
/// The result is symmetric when `Y` is symmetric but unitary only when `Y`
/// is purely imaginary, so it is returned as a plain matrix.
pub fn scattering_from_admittance(
    y: &ComplexMatrix,
    z0: f64,
) -> Result<ComplexMatrix, NetworkError> {
    if y.nrows() != y.ncols() {
        return Err(NetworkError::NotSquare {
            rows: y.nrows(),
            cols: y.ncols(),
        });
    }
    cayley_from_admittance(y, z0)
}

fn cayley_from_admittance(y: &ComplexMatrix, z0: f64) -> Result<ComplexMatrix, NetworkError> {
    let n = y.nrows();
    let identity = ComplexMatrix::identity(n, n);
    let plus = &identity + y * Complex64::new(z0, 0.0);
    let minus = &identity - y * Complex64::new(z0, 0.0);
    plus.lu()
        .solve(&minus)
        .ok_or(NetworkError::SingularConversion)
}

/// Splits a symmetric admittance matrix into per-component values:
/// `Y_{n,m} = −[Y]_{n,m}` on each edge and `Y_n = Σ_k [Y]_{n,k}`.
///
/// Every nonzero off-diagonal entry must lie on an edge of `arch`.
pub fn components_from_admittance(
    y: &ComplexMatrix,
    arch: &Architecture,
) -> Result<ComponentValues, NetworkError> {
    let n = arch.n();
    if y.nrows() != n || y.ncols() != n {
        return Err(NetworkError::DimensionMismatch(format!(
            "admittance is {}x{}, architecture has {n} ports",
            y.nrows(),
            y.ncols()
        )));
    }
    for i in 0..n {
        for j in i + 1..n {
            if y[(i, j)] != y[(j, i)] {
                return Err(NetworkError::NotSymmetric);
            }
            if y[(i, j)] != Complex64::ZERO && !arch.graph().contains_edge(i + 1, j + 1) {
                return Err(NetworkError::SupportViolation { i: i + 1, j: j + 1 });
            }
        }
    }
    let grounded = (0..n).map(|i| (0..n).map(|k| y[(i, k)]).sum()).collect();
    let interconnecting = arch
        .graph()
        .edges()
        .iter()
        .map(|&(u, v)| ((u, v), -y[(u - 1, v - 1)]))
        .collect();
    Ok(ComponentValues {
        grounded,
        interconnecting,
    })
}

/// Rebuilds the admittance matrix from component values: off-diagonals are
/// `−Y_{n,m}`, diagonals are `Y_n + Σ_{k≠n} Y_{n,k}`.
pub fn admittance_from_components(c: &ComponentValues) -> ComplexMatrix {
    let n = c.n();
    let mut y = ComplexMatrix::zeros(n, n);
    for (&(u, v), &adm) in &c.interconnecting {
        y[(u - 1, v - 1)] = -adm;
        y[(v - 1, u - 1)] = -adm;
        y[(u - 1, u - 1)] += adm;
        y[(v - 1, v - 1)] += adm;
    }
    for i in 0..n {
        y[(i, i)] += c.grounded[i];
    }
    y
}

/// Received signal power `P_T · |h_RI Θ H_IT w|²` in watts.
///
/// `w` must be a unit-norm precoder (within 1e-12).
pub fn received_power(
    h_ri: &ComplexRow,
    theta: &ScatteringMatrix,
    h_it: &ComplexMatrix,
    w: &ComplexVector,
    p_t: f64,
) -> Result<f64, NetworkError> {
    let norm = w.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(NetworkError::NonUnitPrecoder { norm });
    }
    if h_ri.ncols() != theta.n() || theta.n() != h_it.nrows() || h_it.ncols() != w.nrows() {
        return Err(NetworkError::DimensionMismatch(format!(
            "h_ri 1x{}, theta {0}x{0}, h_it {1}x{2}, w {3}x1",
            h_ri.ncols(),
            h_it.nrows(),
            h_it.ncols(),
            w.nrows()
        )));
    }
    let gain = (h_ri * theta.matrix() * h_it * w)[(0, 0)];
    Ok(p_t * gain.norm_sqr())
}

/// Received-power upper bound `P_T · ‖h_RI‖² · σ_max(H_IT)²`, where the
/// matrix norm is the spectral norm.
pub fn upper_bound(h_ri: &ComplexRow, h_it: &ComplexMatrix, p_t: f64) -> f64 {
    let sigma_max = h_it
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    p_t * h_ri.norm_squared() * sigma_max * sigma_max
}

/// Received-power upper bound for a block-diagonal scattering matrix over the
/// given port partition: `P_T (Σ_g ‖h_RI,g‖ ‖h_IT,g^eff‖)²`.
pub fn group_upper_bound(
    h_ri: &ComplexRow,
    h_it_eff: &ComplexVector,
    partition: &[Vec<usize>],
    p_t: f64,
) -> Result<f64, NetworkError> {
    let n = h_ri.ncols();
    if h_it_eff.nrows() != n {
        return Err(NetworkError::DimensionMismatch(format!(
            "h_ri has {n} ports, h_it_eff has {}",
            h_it_eff.nrows()
        )));
    }
    let mut seen: Vec<usize> = partition.iter().flatten().copied().collect();
    seen.sort_unstable();
    if seen != (1..=n).collect::<Vec<_>>() {
        return Err(NetworkError::InvalidPartition { n });
    }
    let mut sum = 0.0;
    for group in partition {
        let ri: f64 = group.iter().map(|&v| h_ri[v - 1].norm_sqr()).sum();
        let eff: f64 = group.iter().map(|&v| h_it_eff[v - 1].norm_sqr()).sum();
        sum += (ri * eff).sqrt();
    }
    Ok(p_t * sum * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::architecture::TreeShape;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> RealMatrix {
        let mut m = RealMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.sample(StandardNormal);
                m[(i, j)] = x * 0.02;
                m[(j, i)] = x * 0.02;
            }
        }
        m
    }

    /// Independent scattering oracle through the eigendecomposition of the
    /// real symmetric susceptance: B = QΛQᵀ gives
    /// Θ = Q diag((1 − jZ₀λ)/(1 + jZ₀λ)) Qᵀ.
    fn scattering_by_eigen(b: &RealMatrix, z0: f64) -> ComplexMatrix {
        let eig = nalgebra::SymmetricEigen::new(b.clone());
        let n = b.nrows();
        let q = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let d = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            n,
            eig.eigenvalues
                .iter()
                .map(|&lam| (Complex64::new(1.0, -z0 * lam)) / (Complex64::new(1.0, z0 * lam))),
        ));
        &q * d * q.transpose()
    }

    #[test]
    fn scattering_identity_cases() {
        let b = SusceptanceMatrix::zeros(3);
        let theta = scattering_from_susceptance(&b, DEFAULT_Z0).unwrap();
        assert_relative_eq!(
            (theta.matrix() - ComplexMatrix::identity(3, 3)).norm(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn scattering_scalar_case() {
        // B = [0.02] at Z0 = 50 gives (1 - j)/(1 + j) = -j.
        let b = SusceptanceMatrix::new(RealMatrix::from_element(1, 1, 0.02)).unwrap();
        let theta = scattering_from_susceptance(&b, 50.0).unwrap();
        assert_relative_eq!(theta.matrix()[(0, 0)].re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(theta.matrix()[(0, 0)].im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn scattering_matches_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_symmetric(6, &mut rng);
            let b = SusceptanceMatrix::new(m.clone()).unwrap();
            let theta = scattering_from_susceptance(&b, DEFAULT_Z0).unwrap();
            let oracle = scattering_by_eigen(&m, DEFAULT_Z0);
            assert!((theta.matrix() - &oracle).norm() <= 1e-12 * oracle.norm().max(1.0));
            assert!(ScatteringMatrix::unitarity_defect(theta.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn admittance_variants() {
        let y = ComplexMatrix::zeros(3, 3);
        let theta = scattering_from_admittance(&y, DEFAULT_Z0).unwrap();
        assert_relative_eq!((theta - ComplexMatrix::identity(3, 3)).norm(), 0.0);

        // Y = jB agrees with the susceptance route.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_symmetric(4, &mut rng);
        let b = SusceptanceMatrix::new(m.clone()).unwrap();
        let via_b = scattering_from_susceptance(&b, DEFAULT_Z0).unwrap();
        let via_y =
            scattering_from_admittance(&m.map(|x| Complex64::new(0.0, x)), DEFAULT_Z0).unwrap();
        assert!((via_b.matrix() - via_y).norm() < 1e-14);

        // Matched termination Y = (1/Z0) I gives Theta = 0.
        let matched = ComplexMatrix::identity(2, 2) * Complex64::new(1.0 / DEFAULT_Z0, 0.0);
        let theta = scattering_from_admittance(&matched, DEFAULT_Z0).unwrap();
        assert_relative_eq!(theta.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn component_mapping_hand_example() {
        // Y = [[2j, -1j], [-1j, 3j]] over a single edge (1,2).
        let arch = Architecture::tridiagonal(2).unwrap();
        let y = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 2.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 3.0),
            ],
        );
        let c = components_from_admittance(&y, &arch).unwrap();
        assert_eq!(c.interconnecting[&(1, 2)], Complex64::new(0.0, 1.0));
        assert_eq!(c.grounded[0], Complex64::new(0.0, 1.0));
        assert_eq!(c.grounded[1], Complex64::new(0.0, 2.0));
        assert_eq!(admittance_from_components(&c), y);
    }

    #[test]
    fn component_mapping_diagonal_and_zero() {
        let arch = Architecture::single(3).unwrap();
        let y = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            Complex64::new(0.0, 0.5),
            Complex64::new(0.0, -0.25),
            Complex64::new(0.0, 1.5),
        ]));
        let c = components_from_admittance(&y, &arch).unwrap();
        assert!(c.interconnecting.is_empty());
        assert_eq!(c.grounded[1], Complex64::new(0.0, -0.25));
        assert_eq!(admittance_from_components(&c), y);

        let zero = ComplexMatrix::zeros(3, 3);
        let c = components_from_admittance(&zero, &arch).unwrap();
        assert!(c.grounded.iter().all(|&g| g == Complex64::ZERO));
    }

    #[test]
    fn component_mapping_rejects_support_violation() {
        let arch = Architecture::single(2).unwrap();
        let y = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::ZERO,
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 1.0),
                Complex64::ZERO,
            ],
        );
        assert!(matches!(
            components_from_admittance(&y, &arch),
            Err(NetworkError::SupportViolation { i: 1, j: 2 })
        ));
    }

    #[test]
    fn component_round_trip_exact_on_dyadic_entries() {
        // Dyadic entries keep every float sum exact, so the linear
        // bookkeeping round-trips bit-for-bit.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let arch = Architecture::group(8, 4).unwrap();
            let support = arch.susceptance_support();
            let mut y = ComplexMatrix::zeros(8, 8);
            for &(i, j) in &support {
                if i <= j {
                    let re = rng.random_range(-64i32..=64) as f64 / 256.0;
                    let im = rng.random_range(-64i32..=64) as f64 / 256.0;
                    y[(i - 1, j - 1)] = Complex64::new(re, im);
                    y[(j - 1, i - 1)] = Complex64::new(re, im);
                }
            }
            let c = components_from_admittance(&y, &arch).unwrap();
            assert_eq!(admittance_from_components(&c), y);
        }
    }

    #[test]
    fn received_power_identity_case() {
        let theta = ScatteringMatrix::new(ComplexMatrix::identity(2, 2)).unwrap();
        let h_ri = ComplexRow::from_vec(vec![Complex64::ONE, Complex64::ZERO]);
        let h_it = ComplexMatrix::identity(2, 2);
        let w = ComplexVector::from_vec(vec![Complex64::ONE, Complex64::ZERO]);
        let p = received_power(&h_ri, &theta, &h_it, &w, 1.0).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn received_power_rejects_non_unit_precoder() {
        let theta = ScatteringMatrix::new(ComplexMatrix::identity(2, 2)).unwrap();
        let h_ri = ComplexRow::from_vec(vec![Complex64::ONE, Complex64::ZERO]);
        let h_it = ComplexMatrix::identity(2, 2);
        let w = ComplexVector::from_vec(vec![Complex64::ONE, Complex64::ONE]);
        assert!(matches!(
            received_power(&h_ri, &theta, &h_it, &w, 1.0),
            Err(NetworkError::NonUnitPrecoder { .. })
        ));
    }

    #[test]
    fn upper_bound_examples() {
        let h_ri = ComplexRow::from_vec(vec![Complex64::ONE, Complex64::ZERO]);
        let h_it = ComplexMatrix::identity(2, 2);
        assert_relative_eq!(upper_bound(&h_ri, &h_it, 1.0), 1.0, epsilon = 1e-14);

        let h_ri = ComplexRow::from_vec(vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)]);
        let h_it = ComplexMatrix::identity(2, 2) * Complex64::new(2.0, 0.0);
        assert_relative_eq!(upper_bound(&h_ri, &h_it, 1.0), 100.0, epsilon = 1e-12);
    }

    #[test]
    fn upper_bound_matches_hermitian_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 8;
        let m = 4;
        let h_it = ComplexMatrix::from_fn(n, m, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let h_ri = ComplexRow::from_fn(n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        // sigma_max^2 equals the largest eigenvalue of the Gram matrix.
        let gram = h_it.adjoint() * &h_it;
        let lam_max = nalgebra::SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        let expected = h_ri.norm_squared() * lam_max;
        assert_relative_eq!(
            upper_bound(&h_ri, &h_it, 1.0),
            expected,
            max_relative = 1e-10
        );
    }

    #[test]
    fn group_bound_examples() {
        // Single group reduces to the global bound with M = 1.
        let h_ri = ComplexRow::from_vec(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)]);
        let h_eff =
            ComplexVector::from_vec(vec![Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.0)]);
        let single_group = vec![vec![1, 2]];
        let as_matrix = ComplexMatrix::from_column_slice(2, 1, h_eff.as_slice());
        assert_relative_eq!(
            group_upper_bound(&h_ri, &h_eff, &single_group, 1.0).unwrap(),
            upper_bound(&h_ri, &as_matrix, 1.0),
            max_relative = 1e-12
        );

        let ones_ri = ComplexRow::from_vec(vec![Complex64::ONE, Complex64::ONE]);
        let ones_eff = ComplexVector::from_vec(vec![Complex64::ONE, Complex64::ONE]);
        let singletons = vec![vec![1], vec![2]];
        assert_relative_eq!(
            group_upper_bound(&ones_ri, &ones_eff, &singletons, 1.0).unwrap(),
            4.0,
            epsilon = 1e-14
        );

        assert!(matches!(
            group_upper_bound(&ones_ri, &ones_eff, &[vec![1]], 1.0),
            Err(NetworkError::InvalidPartition { n: 2 })
        ));
    }

    #[test]
    fn partitioned_bound_below_global_bound() {
        // Appendix-style chain: a disconnected partition's bound never
        // exceeds the global one when the precoder is the dominant right
        // singular vector.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let n = 8;
            let m = 3;
            let h_it = ComplexMatrix::from_fn(n, m, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let h_ri = ComplexRow::from_fn(n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let w = crate::optimize::dominant_right_singular_vector(&h_it).unwrap();
            let h_eff = &h_it * &w;
            let partition = vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]];
            let grouped = group_upper_bound(&h_ri, &h_eff, &partition, 1.0).unwrap();
            let global = upper_bound(&h_ri, &h_it, 1.0);
            assert!(grouped <= global * (1.0 + 1e-12));
        }
    }

    #[test]
    fn received_power_never_exceeds_upper_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..50 {
            let (n, m) = (6, 3);
            let b = SusceptanceMatrix::new(random_symmetric(n, &mut rng)).unwrap();
            let theta = scattering_from_susceptance(&b, DEFAULT_Z0).unwrap();
            let h_it = ComplexMatrix::from_fn(n, m, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let h_ri = ComplexRow::from_fn(n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let w_raw = ComplexVector::from_fn(m, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let w = w_raw.clone().unscale(w_raw.norm());
            let p = received_power(&h_ri, &theta, &h_it, &w, 2.5).unwrap();
            assert!(p <= upper_bound(&h_ri, &h_it, 2.5) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn diagonal_susceptance_gives_diagonal_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 5;
        let diag = RealMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
            let x: f64 = rng.sample(StandardNormal);
            0.02 * x
        }));
        let theta = scattering_from_susceptance(&SusceptanceMatrix::new(diag).unwrap(), DEFAULT_Z0)
            .unwrap();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert_eq!(theta.matrix()[(i, j)], Complex64::ZERO);
                } else {
                    assert_relative_eq!(theta.matrix()[(i, i)].norm(), 1.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn group_bound_dominates_feasible_block_scatterings() {
        // Any susceptance on the partition's support stays below the
        // partition bound for the effective channel.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let arch = Architecture::forest(8, 4, TreeShape::Tridiagonal).unwrap();
        let partition: Vec<Vec<usize>> = arch.group_partition().to_vec();
        for _ in 0..50 {
            let support = arch.susceptance_support();
            let mut m = RealMatrix::zeros(8, 8);
            for &(i, j) in &support {
                if i <= j {
                    let x: f64 = rng.sample(StandardNormal);
                    m[(i - 1, j - 1)] = 0.02 * x;
                    m[(j - 1, i - 1)] = 0.02 * x;
                }
            }
            let theta = scattering_from_susceptance(
                &SusceptanceMatrix::with_support(m, &arch).unwrap(),
                DEFAULT_Z0,
            )
            .unwrap();
            let h_it = ComplexMatrix::from_fn(8, 2, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let h_ri = ComplexRow::from_fn(8, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let w_raw = ComplexVector::from_fn(2, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let w = w_raw.clone().unscale(w_raw.norm());
            let h_eff = &h_it * &w;
            let p = received_power(&h_ri, &theta, &h_it, &w, 1.0).unwrap();
            let bound = group_upper_bound(&h_ri, &h_eff, &partition, 1.0).unwrap();
            assert!(p <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn block_diagonal_susceptance_gives_block_diagonal_scattering() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let arch = Architecture::forest(6, 3, TreeShape::Tridiagonal).unwrap();
        let support = arch.susceptance_support();
        let mut m = RealMatrix::zeros(6, 6);
        for &(i, j) in &support {
            if i <= j {
                let x: f64 = rng.sample(StandardNormal);
                m[(i - 1, j - 1)] = 0.01 * x;
                m[(j - 1, i - 1)] = 0.01 * x;
            }
        }
        let theta = scattering_from_susceptance(
            &SusceptanceMatrix::with_support(m, &arch).unwrap(),
            DEFAULT_Z0,
        )
        .unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let same_block = (i < 3) == (j < 3);
                if !same_block {
                    assert!(theta.matrix()[(i, j)].norm() < 1e-14);
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn scattering_symmetric_unitary(seed: u64, n in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = SusceptanceMatrix::new(random_symmetric(n, &mut rng)).unwrap();
            let theta = scattering_from_susceptance(&b, DEFAULT_Z0).unwrap();
            proptest::prop_assert!(
                ScatteringMatrix::symmetry_defect(theta.matrix()) <= SCATTERING_TOL
            );
            proptest::prop_assert!(
                ScatteringMatrix::unitarity_defect(theta.matrix()) <= SCATTERING_TOL
            );
        }

        #[test]
        fn round_trip_close_for_general_reals(seed: u64) {
            // With arbitrary real entries the map is still linear
            // bookkeeping; float rounding keeps it within a few ulps of the
            // row magnitudes.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let arch = Architecture::fully(5).unwrap();
            let mut y = ComplexMatrix::zeros(5, 5);
            for i in 0..5 {
                for j in i..5 {
                    let v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                    y[(i, j)] = v;
                    y[(j, i)] = v;
                }
            }
            let c = components_from_admittance(&y, &arch).unwrap();
            let back = admittance_from_components(&c);
            proptest::prop_assert!((back - &y).norm() <= 1e-13 * y.norm().max(1.0));
        }
    }
}
