//! One-sided Jacobi SVD for small complex matrices.
//!
//! The linear-algebra dependency's complex SVD can return factors that do
//! not multiply back to the input when the matrix has exactly degenerate or
//! zero singular values (orthonormal U and V, wrong pairing). Tensor splits
//! feed it precisely such matrices, so everything that needs singular
//! vectors goes through this implementation instead. Hestenes rotations,
//! quadratic convergence; fine for the block sizes we see.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub struct Svd {
    /// m x k, orthonormal columns (zero columns only for zero input).
    pub u: DMatrix<Complex64>,
    /// Descending.
    pub sigma: Vec<f64>,
    /// k x n, orthonormal rows.
    pub v_h: DMatrix<Complex64>,
}

const PAIR_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

pub fn svd_jacobi(a: &DMatrix<Complex64>) -> Svd {
    if a.ncols() > a.nrows() {
        let t = svd_jacobi(&a.adjoint());
        return Svd {
            u: t.v_h.adjoint(),
            sigma: t.sigma,
            v_h: t.u.adjoint(),
        };
    }
    let (m, n) = (a.nrows(), a.ncols());
    let mut w = a.clone();
    let mut p = DMatrix::<Complex64>::identity(n, n);
    // columns at roundoff level get skipped, otherwise noise pairs rotate forever
    let floor = w.iter().map(|z| z.norm_sqr()).sum::<f64>() * 1e-30;

    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let mut alpha = 0.0f64;
                let mut beta = 0.0f64;
                let mut gamma = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    alpha += w[(r, i)].norm_sqr();
                    beta += w[(r, j)].norm_sqr();
                    gamma += w[(r, i)].conj() * w[(r, j)];
                }
                let g = gamma.norm();
                if alpha <= floor || beta <= floor || g <= PAIR_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // J = [[c, -s], [s/phase, c/phase]] diagonalizes the 2x2 Gram
                let (cs, ss) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                let pc = phase.conj();
                for r in 0..m {
                    let (wi, wj) = (w[(r, i)], w[(r, j)]);
                    w[(r, i)] = cs * wi + ss * pc * wj;
                    w[(r, j)] = -ss * wi + cs * pc * wj;
                }
                for r in 0..n {
                    let (pi, pj) = (p[(r, i)], p[(r, j)]);
                    p[(r, i)] = cs * pi + ss * pc * pj;
                    p[(r, j)] = -ss * pi + cs * pc * pj;
                }
            }
        }
        if !rotated {
            break;
        }
        assert!(sweep + 1 < MAX_SWEEPS, "jacobi sweep limit hit");
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = DMatrix::<Complex64>::zeros(m, n);
    let mut v = DMatrix::<Complex64>::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > 0.0 {
            let inv = Complex64::new(1.0 / s, 0.0);
            for r in 0..m {
                u[(r, k)] = w[(r, j)] * inv;
            }
        }
        for r in 0..n {
            v[(r, k)] = p[(r, j)];
        }
    }
    Svd {
        u,
        sigma,
        v_h: v.adjoint(),
    }
}
