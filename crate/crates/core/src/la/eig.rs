//! Eigenvalues of small dense nonsymmetric matrices: Householder reduction to
//! Hessenberg form followed by Francis double-shift QR, all in real
//! arithmetic. Derived from the EISPACK `orthes`/`hqr2` procedures by way of
//! the public-domain JAMA translation.

use num_complex::Complex64;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Largest matrix the dense eigensolver accepts by default.
pub const DEFAULT_EIG_CAP: usize = 512;

const MAX_SWEEPS_PER_VALUE: usize = 100;

/// Eigenvalues with real eigenvectors in the packed EISPACK layout.
///
/// For a real eigenvalue at index `i`, column `i` is its eigenvector. For a
/// conjugate pair stored at `(i, i+1)` with positive imaginary part first,
/// columns `i` and `i+1` hold the real and imaginary parts of the eigenvector
/// belonging to `values[i]`.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<Complex64>,
    pub vectors: DenseMatrix,
}

impl EigenPairs {
    /// Real and imaginary parts of the eigenvector belonging to `values[i]`.
    pub fn vector(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.values.len();
        let im = self.values[i].im;
        if im == 0.0 {
            (self.vectors.col(i).to_vec(), vec![0.0; n])
        } else if im > 0.0 {
            (self.vectors.col(i).to_vec(), self.vectors.col(i + 1).to_vec())
        } else {
            let re = self.vectors.col(i - 1).to_vec();
            let imv = self.vectors.col(i).iter().map(|v| -v).collect();
            (re, imv)
        }
    }
}

/// Eigenvalues of a general real `k × k` matrix, sorted by ascending real
/// part with conjugate pairs adjacent (positive imaginary part first).
pub fn eig_small_dense(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    eig_small_dense_capped(m, DEFAULT_EIG_CAP)
}

pub fn eig_small_dense_capped(m: &DenseMatrix, cap: usize) -> Result<Vec<Complex64>> {
    if m.rows() > cap {
        return Err(Error::InvalidArgument(format!(
            "matrix of order {} exceeds the dense eigensolver cap {cap}",
            m.rows()
        )));
    }
    let mut values = decompose(m, false)?.values;
    sort_spectrum(&mut values);
    Ok(values)
}

/// Full decomposition, values in solver order (pairs adjacent).
pub fn eig_with_vectors(m: &DenseMatrix) -> Result<EigenPairs> {
    decompose(m, true)
}

/// Ascending real part, then ascending |imag|, positive imaginary part first.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        a.re.total_cmp(&b.re)
            .then(a.im.abs().total_cmp(&b.im.abs()))
            .then(b.im.total_cmp(&a.im))
    });
}

fn decompose(a: &DenseMatrix, want_vectors: bool) -> Result<EigenPairs> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("eigenproblem needs a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenPairs {
            values: Vec::new(),
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let mut h = a.clone();
    let mut v = DenseMatrix::identity(n);
    orthes(&mut h, &mut v);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    hqr2(&mut h, &mut v, &mut d, &mut e, want_vectors)?;
    let values = d
        .iter()
        .zip(&e)
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    Ok(EigenPairs { values, vectors: v })
}

fn orthes(h: &mut DenseMatrix, v: &mut DenseMatrix) {
    let n = h.rows();
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }

    for m in (1..high).rev() {
        if h[(m, m - 1)] != 0.0 {
            for i in m + 1..=high {
                ort[i] = h[(i, m - 1)];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[(i, j)];
                }
                g = (g / ort[m]) / h[(m, m - 1)];
                for i in m..=high {
                    v[(i, j)] += g * ort[i];
                }
            }
        }
    }
    for j in 0..n {
        for i in j + 2..n {
            h[(i, j)] = 0.0;
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

#[allow(clippy::many_single_char_names, unused_assignments)]
fn hqr2(
    h: &mut DenseMatrix,
    v: &mut DenseMatrix,
    d: &mut [f64],
    e: &mut [f64],
    want_vectors: bool,
) -> Result<()> {
    let nn = h.rows();
    let low: isize = 0;
    let high = nn - 1;
    let eps = f64::EPSILON;
    // subdiagonal deflation threshold: 64 unit roundoffs
    let defl = 32.0 * f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut t, mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while n >= low {
        let nu = n as usize;
        // look for a single small subdiagonal element
        let mut l = n;
        while l > low {
            let lu = l as usize;
            s = h[(lu - 1, lu - 1)].abs() + h[(lu, lu)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(lu, lu - 1)].abs() <= defl * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root
            h[(nu, nu)] += exshift;
            d[nu] = h[(nu, nu)];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;
            x = h[(nu, nu)];

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
                x = h[(nu, nu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in nu - 1..nn {
                    z = h[(nu - 1, j)];
                    h[(nu - 1, j)] = q * z + p * h[(nu, j)];
                    h[(nu, j)] = q * h[(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[(i, nu - 1)];
                    h[(i, nu - 1)] = q * z + p * h[(i, nu)];
                    h[(i, nu)] = q * h[(i, nu)] - p * z;
                }
                for i in 0..=high {
                    z = v[(i, nu - 1)];
                    v[(i, nu - 1)] = q * z + p * v[(i, nu)];
                    v[(i, nu)] = q * v[(i, nu)] - p * z;
                }
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            let lu = l as usize;
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }

            // Wilkinson's exceptional shift
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            // second exceptional shift
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total += 1;
            if iter > MAX_SWEEPS_PER_VALUE {
                return Err(Error::NoConvergence(total));
            }

            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == lu {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..n, columns m..n
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if lu != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                    for i in 0..=high {
                        p = x * v[(i, k)] + y * v[(i, k + 1)];
                        if notlast {
                            p += z * v[(i, k + 2)];
                            v[(i, k + 2)] -= p * r;
                        }
                        v[(i, k)] -= p;
                        v[(i, k + 1)] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if !want_vectors || norm == 0.0 {
        return Ok(());
    }

    // back-substitute to find vectors of the upper triangular form
    for nu in (0..nn).rev() {
        p = d[nu];
        q = e[nu];
        if q == 0.0 {
            let mut l = nu;
            h[(nu, nu)] = 1.0;
            for i in (0..nu).rev() {
                w = h[(i, i)] - p;
                r = 0.0;
                for j in l..=nu {
                    r += h[(i, j)] * h[(j, nu)];
                }
                if e[i] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        h[(i, nu)] = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = h[(i, i + 1)];
                        y = h[(i + 1, i)];
                        q = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        t = (x * s - z * r) / q;
                        h[(i, nu)] = t;
                        h[(i + 1, nu)] = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    t = h[(i, nu)].abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=nu {
                            h[(j, nu)] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            let mut l = nu - 1;
            if h[(nu, nu - 1)].abs() > h[(nu - 1, nu)].abs() {
                h[(nu - 1, nu - 1)] = q / h[(nu, nu - 1)];
                h[(nu - 1, nu)] = -(h[(nu, nu)] - p) / h[(nu, nu - 1)];
            } else {
                let (cr, ci) = cdiv(0.0, -h[(nu - 1, nu)], h[(nu - 1, nu - 1)] - p, q);
                h[(nu - 1, nu - 1)] = cr;
                h[(nu - 1, nu)] = ci;
            }
            h[(nu, nu - 1)] = 0.0;
            h[(nu, nu)] = 1.0;
            for i in (0..nu - 1).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=nu {
                    ra += h[(i, j)] * h[(j, nu - 1)];
                    sa += h[(i, j)] * h[(j, nu)];
                }
                w = h[(i, i)] - p;
                if e[i] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h[(i, nu - 1)] = cr;
                        h[(i, nu)] = ci;
                    } else {
                        x = h[(i, i + 1)];
                        y = h[(i + 1, i)];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[(i, nu - 1)] = cr;
                        h[(i, nu)] = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h[(i + 1, nu - 1)] = (-ra - w * h[(i, nu - 1)] + q * h[(i, nu)]) / x;
                            h[(i + 1, nu)] = (-sa - w * h[(i, nu)] - q * h[(i, nu - 1)]) / x;
                        } else {
                            let (cr, ci) =
                                cdiv(-r - y * h[(i, nu - 1)], -s - y * h[(i, nu)], z, q);
                            h[(i + 1, nu - 1)] = cr;
                            h[(i + 1, nu)] = ci;
                        }
                    }
                    t = h[(i, nu - 1)].abs().max(h[(i, nu)].abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=nu {
                            h[(j, nu - 1)] /= t;
                            h[(j, nu)] /= t;
                        }
                    }
                }
            }
        }
    }

    // back transformation
    for j in (0..nn).rev() {
        for i in 0..=high {
            z = 0.0;
            for k in 0..=j.min(high) {
                z += v[(i, k)] * h[(k, j)];
            }
            v[(i, j)] = z;
        }
    }
    Ok(())
}
