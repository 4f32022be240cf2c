//! Direct solve of the stationary-profile system for an arbitrary kernel.

use super::ProfileError;
use crate::walk::InteractionKernel;

/// Solves `Δ_1 = ... = Δ_L = 0`, `l_1 + ... + l_{L+1} = 1` for the edge
/// weights `l_1..l_{L+1}` of the interval `{0, ..., L+1}`, with zero weight
/// on every edge outside it.
///
/// The stream rows are banded (half-width `k` for a `k`-coefficient kernel)
/// but the normalization row is dense, so this uses LU with partial
/// pivoting on the full `(L+1) x (L+1)` matrix followed by one step of
/// iterative refinement.
pub fn solve_profile_system(
    kernel: &InteractionKernel,
    interior: usize,
) -> Result<Vec<f64>, ProfileError> {
    if interior == 0 {
        return Err(ProfileError::InvalidLength(0));
    }
    let a = profile_matrix(kernel, interior);
    let size = interior + 1;
    let mut rhs = vec![0.0; size];
    rhs[interior] = 1.0;
    let lu = Lu::factor(a.clone(), size)?;
    let mut x = lu.solve(&rhs);
    // One refinement pass against the unfactored matrix.
    let r: Vec<f64> = (0..size)
        .map(|i| rhs[i] - (0..size).map(|j| a[i * size + j] * x[j]).sum::<f64>())
        .collect();
    let dx = lu.solve(&r);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok(x)
}

/// Row-major system matrix: rows `0..L` are the streams at sites `1..=L`,
/// row `L` is the normalization.
pub fn profile_matrix(kernel: &InteractionKernel, interior: usize) -> Vec<f64> {
    let size = interior + 1;
    let mut a = vec![0.0; size * size];
    for site in 1..=interior as i64 {
        let row = (site - 1) as usize;
        for (i, &c) in kernel.coefficients().iter().enumerate() {
            let i = i as i64;
            for (edge, coef) in [(site - i, c), (site + i + 1, -c)] {
                if (1..=size as i64).contains(&edge) {
                    a[row * size + (edge - 1) as usize] += coef;
                }
            }
        }
    }
    for j in 0..size {
        a[interior * size + j] = 1.0;
    }
    a
}

struct Lu {
    size: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, size: usize) -> Result<Self, ProfileError> {
        let norm_inf = (0..size)
            .map(|i| (0..size).map(|j| a[i * size + j].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut perm: Vec<usize> = (0..size).collect();
        for k in 0..size {
            let (p, pivot) = (k..size)
                .map(|i| (i, a[i * size + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= 1e-13 * norm_inf {
                return Err(ProfileError::Singular {
                    size,
                    condition_estimate: if pivot > 0.0 {
                        norm_inf / pivot
                    } else {
                        f64::INFINITY
                    },
                });
            }
            if p != k {
                for j in 0..size {
                    a.swap(k * size + j, p * size + j);
                }
                perm.swap(k, p);
            }
            let akk = a[k * size + k];
            for i in k + 1..size {
                let f = a[i * size + k] / akk;
                a[i * size + k] = f;
                if f != 0.0 {
                    for j in k + 1..size {
                        a[i * size + j] -= f * a[k * size + j];
                    }
                }
            }
        }
        Ok(Self { size, lu: a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.size;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * y[j]).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[i * n + i];
        }
        y
    }
}
