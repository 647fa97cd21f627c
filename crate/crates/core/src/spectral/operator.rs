use rayon::prelude::*;

use super::kernel::FluxKernel;
use crate::error::{invalid, Result};
use crate::numerics::MomentumGrid;
use crate::scalar::Real;

/// Dense square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn from_rows(n: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(invalid("matrix data must hold n*n entries with n >= 1"));
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub(crate) fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn max_asymmetry(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * k).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }
}

/// Symmetric Nyström matrix `M_ij = √w_i K(u_i, u_j) √w_j` of the flux kernel.
///
/// Eigenvectors `v` of `M` map to state samples through `φ(u_i) = v_i / √w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator<T> {
    grid: MomentumGrid<T>,
    matrix: DenseMatrix<T>,
    a: T,
}

const SYMMETRY_TOL: f64 = 1e-13;

impl<T: Real> DiscretizedOperator<T> {
    /// Wraps an explicit matrix; it must be symmetric and match the grid size.
    pub fn new(grid: MomentumGrid<T>, matrix: DenseMatrix<T>, a: T) -> Result<Self> {
        if matrix.dim() != grid.len() {
            return Err(invalid(format!(
                "matrix is {0}x{0} but the grid has {1} nodes",
                matrix.dim(),
                grid.len()
            )));
        }
        if matrix.max_asymmetry() > T::lit(SYMMETRY_TOL) {
            return Err(invalid("operator matrix is not symmetric"));
        }
        Ok(Self { grid, matrix, a })
    }

    pub fn grid(&self) -> &MomentumGrid<T> {
        &self.grid
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn smearing(&self) -> T {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            grid: self.grid.clone(),
            matrix: self.matrix.scaled(k),
            a: self.a,
        }
    }

    /// Nyström action `(Kφ)(u_i) = Σ_j w_j K(u_i, u_j) φ(u_j)` on node samples.
    pub fn apply(&self, phi: &[T]) -> Result<Vec<T>> {
        if phi.len() != self.dim() {
            return Err(invalid("sample count does not match the operator"));
        }
        let sw: Vec<T> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        let scaled: Vec<T> = phi.iter().zip(&sw).map(|(&p, &s)| p * s).collect();
        Ok(self
            .matrix
            .mul_vec(&scaled)
            .into_iter()
            .zip(&sw)
            .map(|(y, &s)| y / s)
            .collect())
    }
}

pub fn build_operator<T: Real>(
    grid: &MomentumGrid<T>,
    kernel: &FluxKernel<T>,
) -> Result<DiscretizedOperator<T>> {
    let n = grid.len();
    let nodes = grid.nodes();
    let sw: Vec<T> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let mut data = vec![T::zero(); n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for j in 0..=i {
            row[j] = sw[i] * kernel.value_unchecked(nodes[i], nodes[j]) * sw[j];
        }
    });
    // Mirror the lower triangle so the matrix is symmetric bit for bit.
    for i in 0..n {
        for j in 0..i {
            data[j * n + i] = data[i * n + j];
        }
    }
    Ok(DiscretizedOperator {
        grid: grid.clone(),
        matrix: DenseMatrix { n, data },
        a: kernel.a(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn one_node_operator() {
        let grid = MomentumGrid::composite(1, 1, 1.0).unwrap();
        let op = build_operator(&grid, &FluxKernel::sharp()).unwrap();
        let (u, w) = (grid.nodes()[0], grid.weights()[0]);
        assert_eq!(op.dim(), 1);
        assert_abs_diff_eq!(op.matrix().get(0, 0), w * 2.0 * u / PI, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_by_construction() {
        let grid = MomentumGrid::oscillatory(4, 20, 8, 10.0).unwrap();
        for &a in &[0.0, 0.7] {
            let op = build_operator(&grid, &FluxKernel::smeared(a).unwrap()).unwrap();
            assert!(op.matrix().max_asymmetry() <= 1e-13);
        }
    }

    #[test]
    fn action_matches_direct_quadrature() {
        let grid = MomentumGrid::composite(2, 2, 1.5).unwrap();
        let kernel = FluxKernel::smeared(0.4).unwrap();
        let op = build_operator(&grid, &kernel).unwrap();
        let f = |u: f64| (-u).exp() * (1.0 + u);
        let samples: Vec<f64> = grid.nodes().iter().map(|&u| f(u)).collect();
        let action = op.apply(&samples).unwrap();
        for (i, &ui) in grid.nodes().iter().enumerate() {
            let direct: f64 = grid
                .nodes()
                .iter()
                .zip(grid.weights())
                .map(|(&v, &w)| {
                    let d = ui - v;
                    let k = if d == 0.0 {
                        2.0 * ui / PI
                    } else {
                        (ui * ui - v * v).sin() / d / PI
                    };
                    w * k * (-0.16 * d * d).exp() * f(v)
                })
                .sum();
            assert_abs_diff_eq!(action[i], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_or_asymmetric_matrices() {
        let grid = MomentumGrid::composite(1, 2, 1.0).unwrap();
        assert!(DiscretizedOperator::new(grid.clone(), DenseMatrix::identity(3), 0.0).is_err());
        let m = DenseMatrix::from_rows(2, vec![1.0, 0.5, 0.4, 1.0]).unwrap();
        assert!(DiscretizedOperator::new(grid, m, 0.0).is_err());
    }
}
