//! Deterministic sampling helpers: Halton low-discrepancy sequences and a
//! tiny Jacobi eigensolver for the PCA rank estimates.

use crate::scalar::{r, Real};

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Van der Corput radical inverse in the given base.
pub fn halton(mut index: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut f = 1.0;
    let mut out = 0.0;
    while index > 0 {
        f /= b;
        out += f * (index % base as u64) as f64;
        index /= base as u64;
    }
    out
}

/// Point `index` of the Halton sequence scaled into the box. Index 0 is
/// skipped internally (it would sit on a corner).
pub fn halton_point<R: Real>(index: u64, bounds: &[(R, R)]) -> Vec<R> {
    bounds
        .iter()
        .enumerate()
        .map(|(d, &(lo, hi))| {
            let u = halton(index + 1, PRIMES[d % PRIMES.len()]);
            lo + (hi - lo) * r(u)
        })
        .collect()
}

/// Deterministic direction on the unit sphere from the Halton sequence
/// (Box-Muller on consecutive pairs).
pub fn halton_direction<R: Real>(index: u64, dim: usize) -> Vec<R> {
    let mut v = Vec::with_capacity(dim);
    let mut k = 0;
    while v.len() < dim {
        let u1 = halton(index + 1, PRIMES[(2 * k) % PRIMES.len()]).max(1e-12);
        let u2 = halton(index + 1, PRIMES[(2 * k + 1) % PRIMES.len()]);
        let r0 = (-2.0 * u1.ln()).sqrt();
        v.push(r0 * (2.0 * std::f64::consts::PI * u2).cos());
        if v.len() < dim {
            v.push(r0 * (2.0 * std::f64::consts::PI * u2).sin());
        }
        k += 1;
    }
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-30);
    v.iter().map(|&a| r(a / norm)).collect()
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in descending order with matching
/// eigenvectors (as rows).
pub fn sym_eigen(mat: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = mat.len();
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| v[i].clone()).collect();
    (values, vectors)
}

/// PCA rank of a point cloud: number of singular values above
/// `rel_cutoff` times the largest and above the absolute noise floor
/// `abs_floor` (witness positions are only resolved to the residual
/// tolerance).
pub fn pca_rank(points: &[Vec<f64>], rel_cutoff: f64, abs_floor: f64) -> usize {
    if points.is_empty() {
        return 0;
    }
    let n = points[0].len();
    let m = points.len() as f64;
    let mean: Vec<f64> = (0..n)
        .map(|d| points.iter().map(|p| p[d]).sum::<f64>() / m)
        .collect();
    let mut cov = vec![vec![0.0; n]; n];
    for p in points {
        for i in 0..n {
            for j in 0..n {
                cov[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]) / m;
            }
        }
    }
    let (vals, _) = sym_eigen(&cov);
    let sigma_max = vals[0].max(0.0).sqrt();
    let floor = (rel_cutoff * sigma_max).max(abs_floor);
    vals.iter()
        .filter(|&&l| l.max(0.0).sqrt() > floor)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_covers_unit_interval() {
        let xs: Vec<f64> = (0..64).map(|i| halton(i + 1, 2)).collect();
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mean = xs.iter().sum::<f64>() / 64.0;
        assert!((mean - 0.5).abs() < 0.05);
    }

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let (vals, vecs) = sym_eigen(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let v = &vecs[0];
        assert!((v[0].abs() - v[1].abs()).abs() < 1e-10);
    }

    #[test]
    fn pca_rank_of_degenerate_clouds() {
        let line: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 * 0.1, 0.0]).collect();
        assert_eq!(pca_rank(&line, 1e-3, 1e-4), 1);
        let point: Vec<Vec<f64>> = (0..30).map(|_| vec![0.7, -0.2]).collect();
        assert_eq!(pca_rank(&point, 1e-3, 1e-4), 0);
        let plane: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![halton(i + 1, 2), halton(i + 1, 3), 0.0])
            .collect();
        assert_eq!(pca_rank(&plane, 1e-3, 1e-4), 2);
    }

    #[test]
    fn directions_are_unit() {
        for i in 0..20 {
            let d: Vec<f64> = halton_direction(i, 3);
            let n: f64 = d.iter().map(|a| a * a).sum::<f64>();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }
}
