//! Small dense complex linear algebra: singular values and Hermitian
//! eigenvalues by Jacobi iteration. Desk-scale only; no external LAPACK.
//!
//! Singular values use one-sided Jacobi on the columns, which keeps tiny
//! singular values at the `~1e-16` level instead of the `~1e-8` floor a
//! Gram-matrix route would give. Schmidt-rank thresholds at `1e-10` depend
//! on that.

use num_complex::Complex64;

const SWEEP_LIMIT: usize = 64;
const ORTHO_EPS: f64 = 1e-13;

/// Singular values of a `rows x cols` row-major complex matrix, descending.
pub fn singular_values(rows: usize, cols: usize, entries: &[Complex64]) -> Vec<f64> {
    assert_eq!(entries.len(), rows * cols, "entry count mismatch");
    // Work on whichever side has fewer columns; singular values are shared
    // between M and its conjugate transpose.
    let mut columns: Vec<Vec<Complex64>> = if cols <= rows {
        (0..cols)
            .map(|j| (0..rows).map(|i| entries[i * cols + j]).collect())
            .collect()
    } else {
        (0..rows)
            .map(|i| (0..cols).map(|j| entries[i * cols + j].conj()).collect())
            .collect()
    };

    let k = columns.len();
    for _ in 0..SWEEP_LIMIT {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                if orthogonalize_pair(&mut columns, p, q) {
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = columns.iter().map(|c| norm(c)).collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sigma
}

/// One Jacobi step on columns p and q. Returns true if a rotation was applied.
fn orthogonalize_pair(columns: &mut [Vec<Complex64>], p: usize, q: usize) -> bool {
    let (head, tail) = columns.split_at_mut(q);
    let (col_p, col_q) = (&mut head[p], &mut tail[0]);

    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = Complex64::new(0.0, 0.0);
    for (u, v) in col_p.iter().zip(col_q.iter()) {
        alpha += u.norm_sqr();
        beta += v.norm_sqr();
        gamma += u.conj() * v;
    }

    let gnorm = gamma.norm();
    if gnorm <= ORTHO_EPS * (alpha * beta).sqrt() || gnorm == 0.0 {
        return false;
    }

    // Phase-rotate column q so the inner product becomes real positive, then
    // a real Jacobi rotation zeroes it.
    let phase = gamma / gnorm;

    let zeta = (beta - alpha) / (2.0 * gnorm);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;

    for (up, vq) in col_p.iter_mut().zip(col_q.iter_mut()) {
        let u = *up;
        let v = *vq * phase.conj();
        *up = c * u - s * v;
        *vq = s * u + c * v;
    }
    true
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a Hermitian `dim x dim` row-major matrix, descending.
/// Classic two-sided Jacobi with a phase factored out of each pivot.
pub fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    assert_eq!(entries.len(), dim * dim, "entry count mismatch");
    let mut a = entries.to_vec();

    for _ in 0..SWEEP_LIMIT {
        let mut off = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p * dim + q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * frobenius(dim, &a).max(1.0) {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate_hermitian(&mut a, dim, p, q);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..dim).map(|i| a[i * dim + i].re).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    eigs
}

fn frobenius(dim: usize, a: &[Complex64]) -> f64 {
    a.iter().take(dim * dim).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rotate_hermitian(a: &mut [Complex64], dim: usize, p: usize, q: usize) {
    let apq = a[p * dim + q];
    let gnorm = apq.norm();
    if gnorm == 0.0 {
        return;
    }
    let phase = apq / gnorm; // a_pq = phase * |a_pq|
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;

    let zeta = (aqq - app) / (2.0 * gnorm);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;

    // Unitary J embeds [[c, s*phase], [-s*phase.conj(), c]] on (p, q);
    // apply A <- J^dagger A J.
    for i in 0..dim {
        let aip = a[i * dim + p];
        let aiq = a[i * dim + q];
        a[i * dim + p] = c * aip - s * phase.conj() * aiq;
        a[i * dim + q] = s * phase * aip + c * aiq;
    }
    for j in 0..dim {
        let apj = a[p * dim + j];
        let aqj = a[q * dim + j];
        a[p * dim + j] = c * apj - s * phase * aqj;
        a[q * dim + j] = s * phase.conj() * apj + c * aqj;
    }
}
