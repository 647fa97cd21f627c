//! Dense symmetric eigensolver: Householder reduction to tridiagonal form,
//! implicit QL for the eigenvalues and inverse iteration for selected
//! eigenvectors.

use rayon::prelude::*;

use super::operator::DenseMatrix;
use crate::error::{BackflowError, Result};
use crate::scalar::Real;

const MAX_QL_ITERATIONS: usize = 60;
const PARALLEL_THRESHOLD: usize = 192;

/// Householder factorisation `A = Q T Qᵀ` with `T` tridiagonal.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    n: usize,
    diag: Vec<T>,
    /// `off[i]` couples rows `i - 1` and `i`; `off[0]` is unused.
    off: Vec<T>,
    /// Householder vectors, row `i` holds the reflector for step `i` in its first `i` entries.
    reflectors: Vec<T>,
    betas: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn reduce(matrix: DenseMatrix<T>) -> Self {
        let n = matrix.dim();
        let mut a = matrix.into_vec();
        let mut off = vec![T::zero(); n];
        let mut betas = vec![T::zero(); n];
        let mut p = vec![T::zero(); n];

        for i in (1..n).rev() {
            let (head, tail) = a.split_at_mut(i * n);
            let x = &mut tail[..i];
            let scale: T = x.iter().map(|v| v.abs()).sum();
            if i == 1 || scale == T::zero() {
                off[i] = x[i - 1];
                continue;
            }
            let norm = scale * x.iter().map(|&v| (v / scale) * (v / scale)).sum::<T>().sqrt();
            let alpha = if x[i - 1] > T::zero() { -norm } else { norm };
            off[i] = alpha;
            x[i - 1] = x[i - 1] - alpha;
            let vtv: T = x.iter().map(|&v| v * v).sum();
            if vtv == T::zero() {
                continue;
            }
            let beta = T::lit(2.0) / vtv;
            betas[i] = beta;
            let v: &[T] = x;

            // p = β A v on the leading i×i block.
            let block = &head[..i * n];
            let p = &mut p[..i];
            let matvec = |(r, out): (usize, &mut T)| {
                let row = &block[r * n..r * n + i];
                *out = beta * row.iter().zip(v).map(|(&a, &b)| a * b).sum::<T>();
            };
            if i >= PARALLEL_THRESHOLD {
                p.par_iter_mut().enumerate().for_each(matvec);
            } else {
                p.iter_mut().enumerate().for_each(matvec);
            }
            let k = T::lit(0.5) * beta * v.iter().zip(p.iter()).map(|(&a, &b)| a * b).sum::<T>();
            for (pr, &vr) in p.iter_mut().zip(v) {
                *pr = *pr - k * vr;
            }
            let q: &[T] = p;

            // A ← A - v qᵀ - q vᵀ.
            let update = |(r, row): (usize, &mut [T])| {
                let (vr, qr) = (v[r], q[r]);
                for ((a, &qc), &vc) in row[..i].iter_mut().zip(q).zip(v) {
                    *a = *a - vr * qc - qr * vc;
                }
            };
            let block = &mut head[..i * n];
            if i >= PARALLEL_THRESHOLD {
                block.par_chunks_mut(n).enumerate().for_each(update);
            } else {
                block.chunks_mut(n).enumerate().for_each(update);
            }
        }
        let diag = (0..n).map(|i| a[i * n + i]).collect();
        Self {
            n,
            diag,
            off,
            reflectors: a,
            betas,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let mut d = self.diag.clone();
        let mut e: Vec<T> = (0..self.n)
            .map(|i| {
                if i + 1 < self.n {
                    self.off[i + 1]
                } else {
                    T::zero()
                }
            })
            .collect();
        implicit_ql(&mut d, &mut e)?;
        d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        Ok(d)
    }

    /// Unit eigenvector of the original matrix for the (simple) eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: T) -> Vec<T> {
        let n = self.n;
        let norm_t = self
            .diag
            .iter()
            .zip(&self.off)
            .map(|(d, e)| d.abs() + e.abs())
            .fold(T::zero(), T::max)
            .max(T::min_positive_value());
        let shift = lambda - norm_t * T::epsilon() * T::lit(16.0);
        let mut y: Vec<T> = (0..n)
            .map(|k| T::one() + T::lit(0.1) * T::from_usize_lossy(k % 7).sin())
            .collect();
        normalize(&mut y);
        for _ in 0..4 {
            y = solve_shifted(&self.diag, &self.off, shift, &y, norm_t);
            normalize(&mut y);
        }
        // Back-transform: apply H_1, H_2, ..., H_{n-1}.
        for i in 1..n {
            let beta = self.betas[i];
            if beta == T::zero() {
                continue;
            }
            let v = &self.reflectors[i * n..i * n + i];
            let dot: T = v.iter().zip(&y[..i]).map(|(&a, &b)| a * b).sum();
            let k = beta * dot;
            for (yr, &vr) in y[..i].iter_mut().zip(v) {
                *yr = *yr - k * vr;
            }
        }
        normalize(&mut y);
        y
    }
}

fn normalize<T: Real>(y: &mut [T]) {
    let norm = y.iter().map(|&v| v * v).sum::<T>().sqrt();
    if norm > T::zero() {
        for v in y.iter_mut() {
            *v = *v / norm;
        }
    }
}

/// Solves `(T - σ I) x = b` for the tridiagonal `T` by Gaussian elimination
/// with partial pivoting; exactly singular pivots are nudged.
fn solve_shifted<T: Real>(diag: &[T], off: &[T], shift: T, b: &[T], scale: T) -> Vec<T> {
    let n = diag.len();
    if n == 1 {
        let piv = diag[0] - shift;
        let piv = if piv == T::zero() {
            scale * T::epsilon()
        } else {
            piv
        };
        return vec![b[0] / piv];
    }
    // Row i of U keeps (d, du, du2) after pivoting.
    let dl: Vec<T> = (0..n).map(|i| if i > 0 { off[i] } else { T::zero() }).collect();
    let mut d: Vec<T> = diag.iter().map(|&x| x - shift).collect();
    let mut du: Vec<T> = (0..n)
        .map(|i| if i + 1 < n { off[i + 1] } else { T::zero() })
        .collect();
    let mut du2 = vec![T::zero(); n];
    let mut x = b.to_vec();
    let tiny = scale * T::epsilon();
    for i in 0..n - 1 {
        let sub = dl[i + 1];
        if d[i].abs() >= sub.abs() {
            let piv = if d[i] == T::zero() { tiny } else { d[i] };
            d[i] = piv;
            let m = sub / piv;
            d[i + 1] = d[i + 1] - m * du[i];
            x[i + 1] = x[i + 1] - m * x[i];
        } else {
            let m = d[i] / sub;
            d[i] = sub;
            let tmp = d[i + 1];
            d[i + 1] = du[i] - m * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du2[i];
            }
            du[i] = tmp;
            x.swap(i, i + 1);
            x[i + 1] = x[i + 1] - m * x[i];
        }
    }
    if d[n - 1] == T::zero() {
        d[n - 1] = tiny;
    }
    x[n - 1] = x[n - 1] / d[n - 1];
    x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

/// Implicit QL with Wilkinson shifts on `(d, e)`, `e[i]` coupling `i` and `i + 1`.
fn implicit_ql<T: Real>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let eps = T::epsilon();
    // Off-diagonals below eps·‖T‖ are negligible in absolute terms, which
    // matters for the cluster of near-zero eigenvalues.
    let floor = eps
        * d.iter()
            .zip(e.iter())
            .map(|(a, b)| a.abs() + b.abs())
            .fold(T::zero(), T::max);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(BackflowError::ConvergenceFailure {
                    index: l,
                    iterations: iter - 1,
                    off_diagonal: e[l].to_f64_lossy(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (T::lit(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::lit(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Real>(matrix: DenseMatrix<T>) -> Result<Vec<T>> {
    Tridiagonal::reduce(matrix).eigenvalues()
}
