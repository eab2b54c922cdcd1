//! Implicit QL iteration for symmetric tridiagonal matrices, tracking only
//! the first row of the eigenvector matrix.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues (ascending) and squared first eigenvector components of the
/// symmetric tridiagonal matrix with the given diagonal and off-diagonal.
pub(crate) fn eigen_first_components(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    debug_assert_eq!(offdiag.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Numerical {
                    message: format!("tridiagonal QL did not converge for eigenvalue {l}"),
                    dump: format!("diag={diag:?} offdiag={offdiag:?}"),
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let weights = order.iter().map(|&k| z[k] * z[k]).collect();
    Ok((values, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diag.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn matches_dense_eigensolver() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 3, 7, 30] {
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let off: Vec<f64> = (1..n).map(|_| rng.gen_range(0.1..2.0)).collect();
            let (vals, w) = eigen_first_components(&diag, &off).unwrap();
            let eig = dense(&diag, &off).symmetric_eigen();
            let mut pairs: Vec<(f64, f64)> = (0..n)
                .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            for k in 0..n {
                assert!((vals[k] - pairs[k].0).abs() < 1e-12 * (1.0 + vals[k].abs()));
                assert!((w[k] - pairs[k].1).abs() < 1e-12);
            }
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn decoupled_blocks() {
        let (vals, w) = eigen_first_components(&[1.0, 5.0, -2.0], &[0.0, 1.0]).unwrap();
        assert_eq!(w.iter().filter(|&&x| x > 0.5).count(), 1);
        let k = w.iter().position(|&x| x > 0.5).unwrap();
        assert_eq!(vals[k], 1.0);
    }
}
