//! Dense symmetric eigendecomposition.
//!
//! Two solvers share one post-processing step:
//!
//! * cyclic Jacobi rotations, used for small and moderate matrices;
//! * Householder tridiagonalization followed by implicit QL, used once the
//!   matrix is large enough that Jacobi's per-sweep `O(n^3)` cost with a large
//!   sweep count dominates.
//!
//! Whichever solver runs, eigenvalues come back in descending order and the
//! eigenvectors are put in a canonical form:
//!
//! 1. Inside a cluster of (numerically) equal eigenvalues the basis is
//!    replaced by one that depends only on the eigenspace, not on the rotation
//!    sequence that produced it. The basis is built greedily from projections
//!    of standard unit vectors onto the eigenspace.
//! 2. Each eigenvector is signed so that its largest-magnitude entry (lowest
//!    index among near-ties) is positive.
//!
//! The result is bit-deterministic for a fixed input and insensitive to which
//! solver was used, up to rounding.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Absolute symmetry tolerance (relative to `max(1, |m_ij|)`) accepted on input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the input's Frobenius norm.
pub const JACOBI_OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;

/// Sweep budget for the Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Matrices at or below this order use Jacobi under [`EigenMethod::Auto`].
pub const AUTO_JACOBI_MAX_ORDER: usize = 128;

const QL_MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Clusters larger than this keep the solver's basis.
const MAX_CANONICAL_CLUSTER: usize = 64;

/// Which algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    /// Jacobi up to [`AUTO_JACOBI_MAX_ORDER`], tridiagonal QL above.
    #[default]
    Auto,
    Jacobi,
    TridiagonalQl,
}

/// Full spectrum of a real symmetric matrix.
///
/// `eigenvalues` is non-increasing and column `i` of `eigenvectors` is the
/// unit eigenvector belonging to `eigenvalues[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest eigenvalue magnitude, zero for an empty spectrum.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0_f64, |acc, l| acc.max(l.abs()))
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }
}

/// Decomposes `m` with [`EigenMethod::Auto`].
pub fn symmetric_eigendecomposition(m: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    symmetric_eigendecomposition_with(m, EigenMethod::Auto)
}

pub fn symmetric_eigendecomposition_with(
    m: &DMatrix<f64>,
    method: EigenMethod,
) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NonSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    check_symmetric(m)?;
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }

    // Work on the exactly symmetric part so both solvers see the same input.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            };
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }

    let use_jacobi = match method {
        EigenMethod::Jacobi => true,
        EigenMethod::TridiagonalQl => false,
        EigenMethod::Auto => n <= AUTO_JACOBI_MAX_ORDER,
    };
    // `vt` holds eigenvectors as rows.
    let (values, vt) = if use_jacobi {
        jacobi(a, n)?
    } else {
        tridiagonal_ql(a, n)?
    };
    Ok(finish(values, vt, n))
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let x = m[(i, j)];
            if !x.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if j > i {
                let y = m[(j, i)];
                if (x - y).abs() > SYMMETRY_TOLERANCE * x.abs().max(1.0) {
                    return Err(Error::NotSymmetric);
                }
            }
        }
    }
    Ok(())
}

/// Cyclic Jacobi on a row-major full symmetric matrix.
fn jacobi(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_OFF_DIAGONAL_TOLERANCE * frob;

    let mut converged = false;
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if (2.0 * off).sqrt() <= target {
            converged = true;
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Element is below the resolution of both diagonal entries.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }

                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[p * n + k];
                    let akq = a[q * n + k];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[p * n + k] = new_p;
                    a[k * n + p] = new_p;
                    a[q * n + k] = new_q;
                    a[k * n + q] = new_q;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                let (head, tail) = vt.split_at_mut(q * n);
                let row_p = &mut head[p * n..(p + 1) * n];
                let row_q = &mut tail[..n];
                for (vp, vq) in row_p.iter_mut().zip(row_q.iter_mut()) {
                    let x = *vp;
                    let y = *vq;
                    *vp = c * x - s * y;
                    *vq = s * x + c * y;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: JACOBI_MAX_SWEEPS,
        });
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, vt))
}

/// Householder reduction to tridiagonal form followed by the implicit QL
/// algorithm (the EISPACK `tred2`/`tql2` pair). Vectors are stored
/// transposed, `w[j * n + k] = V[k][j]`, so inner loops run over contiguous
/// memory.
fn tridiagonal_ql(a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut w = a; // symmetric, so the transpose is itself
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let at = |j: usize, k: usize| j * n + k; // V[k][j]

    // tred2
    for j in 0..n {
        d[j] = w[at(j, n - 1)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[at(j, i - 1)];
                w[at(j, i)] = 0.0;
                w[at(i, j)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                w[at(i, j)] = f;
                g = e[j] + w[at(j, j)] * f;
                for k in (j + 1)..i {
                    let vkj = w[at(j, k)];
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let col = &mut w[at(j, 0)..at(j, 0) + n];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = col[i - 1];
                col[i] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        w[at(i, n - 1)] = w[at(i, i)];
        w[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = w[at(i + 1, k)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += w[at(i + 1, k)] * w[at(j, k)];
                }
                for k in 0..=i {
                    w[at(j, k)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            w[at(i + 1, k)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = w[at(j, n - 1)];
        w[at(j, n - 1)] = 0.0;
    }
    w[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;

    // tql2
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITERATIONS_PER_EIGENVALUE {
                    return Err(Error::NoConvergence {
                        iterations: QL_MAX_ITERATIONS_PER_EIGENVALUE,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[(l + 2)..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (head, tail) = w.split_at_mut(at(i + 1, 0));
                    let col_i = &mut head[at(i, 0)..];
                    let col_next = &mut tail[..n];
                    for (vi, vn) in col_i.iter_mut().zip(col_next.iter_mut()) {
                        let hk = *vn;
                        *vn = s * *vi + c * hk;
                        *vi = c * *vi - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok((d, w))
}

fn finish(values: Vec<f64>, vt: Vec<f64>, n: usize) -> SpectralDecomposition {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = vt[src * n + k];
        }
    }

    let radius = eigenvalues.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && same_cluster(eigenvalues[end - 1], eigenvalues[end], radius) {
            end += 1;
        }
        if end - start > 1 && end - start <= MAX_CANONICAL_CLUSTER {
            canonicalize_cluster(&mut vectors, start, end);
        }
        start = end;
    }
    for col in 0..n {
        fix_sign(&mut vectors, col);
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    }
}

fn same_cluster(a: f64, b: f64, radius: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()) + 1e-12 * radius
}

/// Replaces columns `start..end` with a basis determined by their span alone.
fn canonicalize_cluster(vectors: &mut DMatrix<f64>, start: usize, end: usize) {
    let n = vectors.nrows();
    let c = end - start;
    // Row i of the cluster block is the coordinate vector of P e_i.
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (start..end).map(|j| vectors[(i, j)]).collect())
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(c);
    for _ in 0..c {
        let residuals: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let mut res = r.clone();
                for q in &basis {
                    let dot: f64 = res.iter().zip(q).map(|(x, y)| x * y).sum();
                    for (x, y) in res.iter_mut().zip(q) {
                        *x -= dot * y;
                    }
                }
                res
            })
            .collect();
        let norms: Vec<f64> = residuals
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>())
            .collect();
        let best = norms.iter().cloned().fold(0.0_f64, f64::max);
        if best <= 0.0 {
            return;
        }
        let pick = norms
            .iter()
            .position(|&v| v >= 0.5 * best)
            .expect("maximum exists");
        let norm = norms[pick].sqrt();
        basis.push(residuals[pick].iter().map(|x| x / norm).collect());
    }
    let block: Vec<Vec<f64>> = rows;
    for (k, q) in basis.iter().enumerate() {
        for i in 0..n {
            vectors[(i, start + k)] = block[i].iter().zip(q).map(|(x, y)| x * y).sum();
        }
    }
}

fn fix_sign(vectors: &mut DMatrix<f64>, col: usize) {
    let n = vectors.nrows();
    let max = (0..n).fold(0.0_f64, |acc, i| acc.max(vectors[(i, col)].abs()));
    if max == 0.0 {
        return;
    }
    let lead = (0..n)
        .find(|&i| vectors[(i, col)].abs() >= max * (1.0 - 1e-8))
        .expect("maximum exists");
    if vectors[(lead, col)] < 0.0 {
        for i in 0..n {
            vectors[(i, col)] = -vectors[(i, col)];
        }
    }
}
