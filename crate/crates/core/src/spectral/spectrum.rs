//! Spectrum of the discretized flux operator and the state attaining its
//! lowest eigenvalue.

use super::eigen::Tridiagonal;
use super::kernel::FluxKernel;
use super::operator::{build_operator, DiscretizedOperator};
use crate::error::{invalid, BackflowError, Result};
use crate::numerics::MomentumGrid;
use crate::scalar::Real;
use crate::states::MomentumState;

/// Magnitude of the most negative eigenvalue of the sharp flux operator.
pub const C_BM: f64 = 0.038452;

/// Default slack for [`spectrum_bounds_check`], absorbing discretization error.
pub const DEFAULT_BOUNDS_TOL: f64 = 2e-3;

#[derive(Debug, Clone)]
pub struct SpectralResult<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    pub lowest: T,
    /// Normalized eigenfunction of `lowest`, positive at the smallest node.
    pub phi_max: MomentumState<T>,
    pub a: T,
}

/// Full spectrum plus the eigenfunction of the lowest eigenvalue.
pub fn eigen_decompose<T: Real>(op: &DiscretizedOperator<T>) -> Result<SpectralResult<T>> {
    let tri = Tridiagonal::reduce(op.matrix().clone());
    let eigenvalues = tri.eigenvalues()?;
    let lowest = eigenvalues[0];
    let mut v = tri.eigenvector(lowest);
    if v.iter().any(|x| !x.is_finite()) {
        return Err(BackflowError::Domain(
            "eigenvector iteration produced non-finite values".into(),
        ));
    }
    if v[0] < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let grid = op.grid().clone();
    let phi: Vec<T> = v
        .iter()
        .zip(grid.weights())
        .map(|(&x, &w)| x / w.sqrt())
        .collect();
    let phi_max = MomentumState::tabulated(grid, phi)?;
    Ok(SpectralResult {
        eigenvalues,
        lowest,
        phi_max,
        a: op.smearing(),
    })
}

/// Lowest eigenvalue only.
pub fn lowest_eigenvalue<T: Real>(op: &DiscretizedOperator<T>) -> Result<T> {
    Ok(Tridiagonal::reduce(op.matrix().clone()).eigenvalues()?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsViolation<T> {
    pub index: usize,
    pub value: T,
    pub side: BoundSide,
}

/// Eigenvalues outside `[-c_bm - tol, 1 + tol]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport<T> {
    pub lower: T,
    pub upper: T,
    pub tol: T,
    pub violations: Vec<BoundsViolation<T>>,
}

impl<T: Real> BoundsReport<T> {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn spectrum_bounds_check<T: Real>(result: &SpectralResult<T>, tol: T) -> BoundsReport<T> {
    let lower = -T::lit(C_BM) - tol;
    let upper = T::one() + tol;
    let violations = result
        .eigenvalues
        .iter()
        .enumerate()
        .filter_map(|(index, &value)| {
            if value < lower {
                Some(BoundsViolation {
                    index,
                    value,
                    side: BoundSide::Below,
                })
            } else if value > upper {
                Some(BoundsViolation {
                    index,
                    value,
                    side: BoundSide::Above,
                })
            } else {
                None
            }
        })
        .collect();
    BoundsReport {
        lower: -T::lit(C_BM),
        upper: T::one(),
        tol,
        violations,
    }
}

/// `(a, λ_min(a))` for each smearing, sorted by `a`.
pub fn lambda_sweep<T: Real>(a_values: &[T], grid: &MomentumGrid<T>) -> Result<Vec<(T, T)>> {
    if let Some(bad) = a_values.iter().find(|a| !(**a >= T::zero()) || !a.is_finite()) {
        return Err(invalid(format!(
            "smearing must be finite and non-negative, got {bad}"
        )));
    }
    let mut sorted = a_values.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite smearing"));
    sorted
        .into_iter()
        .map(|a| {
            let kernel = FluxKernel::smeared(a)?;
            let op = build_operator(grid, &kernel)?;
            let lambda = lowest_eigenvalue(&op)?;
            log::info!("a = {a}: lambda_min = {lambda:e}");
            Ok((a, lambda))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::operator::DenseMatrix;

    fn small_op() -> DiscretizedOperator<f64> {
        let grid = MomentumGrid::oscillatory(4, 12, 8, 6.0).unwrap();
        build_operator(&grid, &FluxKernel::sharp()).unwrap()
    }

    #[test]
    fn phi_max_is_normalized_with_positive_start() {
        let r = eigen_decompose(&small_op()).unwrap();
        assert!((r.phi_max.norm_sq().unwrap() - 1.0).abs() < 1e-10);
        assert!(r.phi_max.samples()[0] > 0.0);
        assert_eq!(r.lowest, r.eigenvalues[0]);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn bounds_check_flags_scaled_operator() {
        let op = small_op();
        let ok = spectrum_bounds_check(&eigen_decompose(&op).unwrap(), DEFAULT_BOUNDS_TOL);
        assert!(ok.is_ok(), "{ok:?}");
        let bad = spectrum_bounds_check(&eigen_decompose(&op.scaled(2.0)).unwrap(), DEFAULT_BOUNDS_TOL);
        assert!(!bad.is_ok());
    }

    #[test]
    fn identity_matrix_has_no_violation() {
        let grid = MomentumGrid::composite(1, 3, 1.0f64).unwrap();
        let op = DiscretizedOperator::new(grid, DenseMatrix::identity(3), 0.0).unwrap();
        let r = eigen_decompose(&op).unwrap();
        assert!(r.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-14));
        assert!(spectrum_bounds_check(&r, DEFAULT_BOUNDS_TOL).is_ok());
    }

    #[test]
    fn sweep_is_sorted_and_validated() {
        let grid = MomentumGrid::oscillatory(4, 12, 8, 6.0).unwrap();
        let out = lambda_sweep(&[2.0, 0.0, 1.0], &grid).unwrap();
        assert_eq!(out.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert!(out.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(lambda_sweep(&[-1.0], &grid).is_err());
    }
}
