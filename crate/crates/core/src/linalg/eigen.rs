use super::DenseMatrix;

/// Result of a cyclic Jacobi run.
#[derive(Debug, Clone)]
pub struct JacobiOutcome {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Frobenius norm of the remaining off-diagonal part.
    pub off_residual: f64,
    pub sweeps: usize,
    pub converged: bool,
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Above this order the tridiagonal route is used.
const JACOBI_MAX_ORDER: usize = 64;

fn off_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix.
pub fn jacobi_eigenvalues(mut a: DenseMatrix) -> JacobiOutcome {
    assert!(a.is_square(), "matrix must be square");
    let n = a.rows();
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off > JACOBI_TOL * scale && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
        off = off_norm(&a);
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    JacobiOutcome {
        values,
        off_residual: off,
        sweeps,
        converged: off <= JACOBI_TOL * scale,
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
///
/// Returns the diagonal and the subdiagonal (`e[i]` couples `i` and `i+1`).
/// Both triangles are updated; all products run over contiguous rows.
fn tridiagonalize(mut a: DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let data = a.data_mut();
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let mut norm2 = 0.0;
        for i in lo..n {
            let x = data[i * n + k];
            norm2 += x * x;
        }
        d[k] = data[k * n + k];
        if norm2 == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = data[lo * n + k];
        let alpha = if x0 >= 0.0 { -norm2.sqrt() } else { norm2.sqrt() };
        e[k] = alpha;
        // v = (x - alpha e1) / |x - alpha e1|
        let mut vn2 = 0.0;
        for i in lo..n {
            let x = data[i * n + k] - if i == lo { alpha } else { 0.0 };
            v[i] = x;
            vn2 += x * x;
        }
        let inv = 1.0 / vn2.sqrt();
        for vi in &mut v[lo..n] {
            *vi *= inv;
        }
        // w = A22 v
        for i in lo..n {
            w[i] = dot(&data[i * n + lo..(i + 1) * n], &v[lo..n]);
        }
        let kdot = dot(&v[lo..n], &w[lo..n]);
        for i in lo..n {
            w[i] = 2.0 * (w[i] - kdot * v[i]);
        }
        // A22 -= v w^T + w v^T
        for i in lo..n {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut data[i * n + lo..(i + 1) * n];
            for ((aij, &vj), &wj) in row.iter_mut().zip(&v[lo..n]).zip(&w[lo..n]) {
                *aij -= vi * wj + wi * vj;
            }
        }
    }
    if n >= 2 {
        d[n - 2] = data[(n - 2) * n + n - 2];
        d[n - 1] = data[(n - 1) * n + n - 1];
        e[n - 2] = data[(n - 1) * n + n - 2];
    } else if n == 1 {
        d[0] = data[0];
    }
    (d, e)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson-type shifts. Returned in descending order.
pub fn tridiagonal_eigenvalues(diag: &[f64], sub: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..sub.len()].copy_from_slice(sub);
    let scale = (0..n).fold(0.0f64, |w, i| w.max(d[i].abs() + e[i].abs()));
    let floor = f64::EPSILON * scale;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 200, "implicit QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
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
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|x, y| y.total_cmp(x));
    d
}

/// Eigenvalues of a symmetric matrix in descending order.
///
/// Small matrices go through cyclic Jacobi; larger ones through Householder
/// tridiagonalization followed by implicit QL.
pub fn symmetric_eigenvalues(a: DenseMatrix) -> Vec<f64> {
    assert!(a.is_square(), "matrix must be square");
    if a.rows() <= JACOBI_MAX_ORDER {
        let out = jacobi_eigenvalues(a.clone());
        if out.converged {
            return out.values;
        }
    }
    let (d, e) = tridiagonalize(a);
    tridiagonal_eigenvalues(&d, &e)
}
