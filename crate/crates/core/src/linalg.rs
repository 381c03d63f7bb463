//! Dense linear-algebra kernels: complex Schur form, triangular Sylvester
//! solves, factored Lyapunov solves and rank utilities.

use nalgebra::{Complex, DMatrix, DVector, Schur, SVD};

use crate::error::{NetError, Result};

pub type C64 = Complex<f64>;

/// Rank threshold `factor * n * eps * sigma_max`.
pub fn rank_threshold(n: usize, sigma_max: f64, factor: f64) -> f64 {
    factor * (n.max(1) as f64) * f64::EPSILON * sigma_max
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let mut s = match accurate_svd(a) {
        Some((_, s, _)) => s,
        None => SVD::try_new(
            a.clone(),
            false,
            false,
            5.0 * f64::EPSILON,
            svd_iterations(a),
        )
        .map(|svd| svd.singular_values)
        .unwrap_or_else(|| DVector::from_element(a.nrows().min(a.ncols()), f64::NAN)),
    };
    s.as_mut_slice()
        .sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn numerical_rank(a: &DMatrix<f64>, factor: f64) -> usize {
    let s = singular_values(a);
    if s.is_empty() {
        return 0;
    }
    let tol = rank_threshold(a.nrows().max(a.ncols()), s[0], factor);
    s.iter().filter(|&&x| x > tol).count()
}

/// Number of singular values above `factor * n * eps * scale`, for a rank
/// decision against an external scale (e.g. the norms of the factors of a
/// product) rather than the matrix's own largest singular value.
pub fn rank_against(a: &DMatrix<f64>, scale: f64, factor: f64) -> usize {
    let s = singular_values(a);
    let tol = rank_threshold(a.nrows().max(a.ncols()), scale, factor);
    s.iter().filter(|&&x| x > tol).count()
}

/// Full SVD of a square matrix with singular values sorted descending.
pub struct SquareSvd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub fn square_svd(a: &DMatrix<f64>) -> Result<SquareSvd> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(NetError::DimensionMismatch {
            what: format!("expected a square matrix, got {}x{}", n, a.ncols()),
        });
    }
    if n == 0 {
        return Ok(SquareSvd {
            u: DMatrix::zeros(0, 0),
            s: DVector::zeros(0),
            v: DMatrix::zeros(0, 0),
        });
    }
    let (u, s, vt) = accurate_svd(a).ok_or_else(|| NetError::Numerical {
        reason: "SVD did not converge to an accurate factorization".into(),
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    let u = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(n, n, |r, c| vt[(order[c], r)]);
    let s = DVector::from_fn(n, |i, _| s[order[i]]);
    Ok(SquareSvd { u, s, v })
}

fn svd_iterations(a: &DMatrix<f64>) -> usize {
    100 * a.nrows().max(a.ncols()).max(10)
}

fn verified_svd(a: &DMatrix<f64>) -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let svd = SVD::try_new(a.clone(), true, true, 5.0 * f64::EPSILON, svd_iterations(a))?;
    let (u, s, vt) = (svd.u?, svd.singular_values, svd.v_t?);
    let rec = &u * DMatrix::from_diagonal(&s) * &vt;
    let scale = a.norm().max(f64::MIN_POSITIVE);
    ((rec - a).norm() <= 1e-12 * (a.nrows() as f64).max(1.0) * scale).then_some((u, s, vt))
}

/// Thin SVD `(u, s, v^T)`. nalgebra's bidiagonal SVD occasionally returns an
/// inaccurate factorization for rank-deficient input; such results are
/// detected by reconstruction and replaced by a one-sided Jacobi SVD.
fn accurate_svd(a: &DMatrix<f64>) -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    verified_svd(a).or_else(|| {
        if a.nrows() >= a.ncols() {
            jacobi_svd(a)
        } else {
            jacobi_svd(&a.transpose()).map(|(u, s, vt)| (vt.transpose(), s, u.transpose()))
        }
    })
}

/// One-sided (Hestenes) Jacobi SVD of a matrix with at least as many rows
/// as columns.
fn jacobi_svd(a: &DMatrix<f64>) -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = (m as f64) * f64::EPSILON;
    let negligible = (tol * a.norm()).powi(2);
    let mut converged = false;
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0
                    || gamma.abs() <= tol * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for k in 0..mat.nrows() {
                        let (xp, xq) = (mat[(k, p)], mat[(k, q)]);
                        mat[(k, p)] = c * xp - s * xq;
                        mat[(k, q)] = s * xp + c * xq;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let sigma = DVector::from_fn(n, |j, _| w.column(j).norm());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        sigma[j]
            .partial_cmp(&sigma[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let s = DVector::from_fn(n, |i, _| sigma[order[i]]);
    let v = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let dirs = DMatrix::from_fn(m, n, |r, c| {
        let sc = s[c];
        if sc > 0.0 {
            w[(r, order[c])] / sc
        } else {
            0.0
        }
    });
    // Householder QR keeps the span of the leading (nonzero) columns and
    // completes them to an orthonormal set.
    let mut u = dirs.clone().qr().q();
    for c in 0..n {
        if u.column(c).dot(&dirs.column(c)) < 0.0 {
            u.column_mut(c).neg_mut();
        }
    }
    Some((u, s, v.transpose()))
}

/// Moore-Penrose pseudo-inverse with the standard rank threshold.
pub fn pseudo_inverse(a: &DMatrix<f64>, factor: f64) -> DMatrix<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DMatrix::zeros(a.ncols(), a.nrows());
    }
    let Some((u, s, vt)) = accurate_svd(a) else {
        return DMatrix::zeros(a.ncols(), a.nrows());
    };
    let smax = s.max();
    let tol = rank_threshold(a.nrows().max(a.ncols()), smax, factor);
    let inv = s.map(|x| if x > tol { 1.0 / x } else { 0.0 });
    vt.transpose() * DMatrix::from_diagonal(&inv) * u.transpose()
}

/// Induced 2-norm.
pub fn norm2(a: &DMatrix<f64>) -> f64 {
    let s = singular_values(a);
    if s.is_empty() {
        0.0
    } else {
        s[0]
    }
}

pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let s = singular_values(a);
    if s.is_empty() {
        return 1.0;
    }
    let smin = s[s.len() - 1];
    if smin == 0.0 {
        f64::INFINITY
    } else {
        s[0] / smin
    }
}

pub fn to_complex(a: &DMatrix<f64>) -> DMatrix<C64> {
    a.map(|x| C64::new(x, 0.0))
}

fn split(a: &DMatrix<C64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

fn join(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<C64> {
    re.zip_map(im, C64::new)
}

/// Complex product through real matrix products.
pub fn cmatmul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// Real times complex.
pub fn rcmatmul(a: &DMatrix<f64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (br, bi) = split(b);
    join(&(a * &br), &(a * &bi))
}

/// Complex times real.
pub fn crmatmul(a: &DMatrix<C64>, b: &DMatrix<f64>) -> DMatrix<C64> {
    let (ar, ai) = split(a);
    join(&(&ar * b), &(&ai * b))
}

/// Unitary similarity `a = z t z^H` with `t` upper triangular.
#[derive(Debug, Clone)]
pub struct ComplexSchur {
    pub z: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

impl ComplexSchur {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Ok(Self {
                z: DMatrix::zeros(0, 0),
                t: DMatrix::zeros(0, 0),
            });
        }
        if a.amax() == 0.0 {
            return Ok(Self {
                z: DMatrix::identity(n, n),
                t: DMatrix::zeros(n, n),
            });
        }
        let eps = [f64::EPSILON, 5.0 * f64::EPSILON, 1e-14];
        if let Some(s) = eps.iter().find_map(|&e| Self::attempt(a, e)) {
            return Ok(s);
        }
        // Stalled shifts are retried on a reflected copy with the same spectrum.
        let v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.7548776662466927).fract());
        let q = DMatrix::identity(n, n) - &v * v.transpose() * (2.0 / v.norm_squared());
        let b = &q * a * &q;
        eps.iter()
            .find_map(|&e| Self::attempt(&b, e))
            .map(|s| Self {
                z: to_complex(&q) * s.z,
                t: s.t,
            })
            .ok_or_else(|| NetError::Numerical {
                reason: "real Schur iteration did not converge to an accurate factorization".into(),
            })
    }

    fn attempt(a: &DMatrix<f64>, eps: f64) -> Option<Self> {
        let n = a.nrows();
        let schur = Schur::try_new(a.clone(), eps, 200 * n.max(20))?;
        let (q, t) = schur.unpack();
        let mut z = to_complex(&q);
        let mut t = to_complex(&t);
        for j in 0..n {
            for i in (j + 2)..n {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        for m in (1..n).rev() {
            let sub = t[(m, m - 1)];
            if sub.norm() == 0.0 {
                continue;
            }
            let a11 = t[(m - 1, m - 1)];
            let a12 = t[(m - 1, m)];
            let a22 = t[(m, m)];
            let half = (a11 - a22) * 0.5;
            let disc = (half * half + a12 * sub).sqrt();
            let lambda = (a11 + a22) * 0.5 + disc;
            let mu = lambda - a22;
            let r = (mu.norm_sqr() + sub.norm_sqr()).sqrt();
            let c = mu / r;
            let s = sub / r;
            // g = [[conj(c), conj(s)], [-s, c]]
            let (g11, g12, g21, g22) = (c.conj(), s.conj(), -s, c);
            for col in (m - 1)..n {
                let x = t[(m - 1, col)];
                let y = t[(m, col)];
                t[(m - 1, col)] = g11 * x + g12 * y;
                t[(m, col)] = g21 * x + g22 * y;
            }
            // right multiplication by g^H = [[c, -conj(s)], [s, conj(c)]]
            let (h11, h12, h21, h22) = (g11.conj(), g21.conj(), g12.conj(), g22.conj());
            for row in 0..=m {
                let x = t[(row, m - 1)];
                let y = t[(row, m)];
                t[(row, m - 1)] = x * h11 + y * h21;
                t[(row, m)] = x * h12 + y * h22;
            }
            for row in 0..n {
                let x = z[(row, m - 1)];
                let y = z[(row, m)];
                z[(row, m - 1)] = x * h11 + y * h21;
                z[(row, m)] = x * h12 + y * h22;
            }
            t[(m, m - 1)] = C64::new(0.0, 0.0);
        }
        for j in 0..n {
            for i in (j + 1)..n {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        let rec = cmatmul(&cmatmul(&z, &t), &z.adjoint());
        let err = (rec - to_complex(a)).norm();
        (err <= 1e-10 * a.norm().max(f64::MIN_POSITIVE)).then_some(Self { z, t })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Solves `op1(t1) y + y op2(t2) = c` for upper-triangular `t1`, `t2`,
/// where `op(t)` is `t` or its plain transpose.
pub fn triangular_sylvester(
    t1: &DMatrix<C64>,
    trans1: bool,
    t2: &DMatrix<C64>,
    trans2: bool,
    c: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    let m = t1.nrows();
    let n = t2.nrows();
    if c.nrows() != m || c.ncols() != n {
        return Err(NetError::DimensionMismatch {
            what: format!(
                "sylvester right-hand side {}x{} vs {}x{}",
                c.nrows(),
                c.ncols(),
                m,
                n
            ),
        });
    }
    let scale = t1
        .iter()
        .chain(t2.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<C64>::zeros(m, n);
    let order: Vec<usize> = if trans2 {
        (0..n).rev().collect()
    } else {
        (0..n).collect()
    };
    let mut rhs = vec![C64::new(0.0, 0.0); m];
    for &k in &order {
        for i in 0..m {
            rhs[i] = c[(i, k)];
        }
        if trans2 {
            for j in (k + 1)..n {
                let w = t2[(k, j)];
                if w.norm() != 0.0 {
                    for i in 0..m {
                        rhs[i] -= y[(i, j)] * w;
                    }
                }
            }
        } else {
            for j in 0..k {
                let w = t2[(j, k)];
                if w.norm() != 0.0 {
                    for i in 0..m {
                        rhs[i] -= y[(i, j)] * w;
                    }
                }
            }
        }
        let d = t2[(k, k)];
        if trans1 {
            for i in 0..m {
                let mut acc = rhs[i];
                for l in 0..i {
                    acc -= t1[(l, i)] * y[(l, k)];
                }
                let piv = t1[(i, i)] + d;
                if piv.norm() <= tiny {
                    return Err(singular_sylvester());
                }
                y[(i, k)] = acc / piv;
            }
        } else {
            for i in (0..m).rev() {
                let mut acc = rhs[i];
                for l in (i + 1)..m {
                    acc -= t1[(i, l)] * y[(l, k)];
                }
                let piv = t1[(i, i)] + d;
                if piv.norm() <= tiny {
                    return Err(singular_sylvester());
                }
                y[(i, k)] = acc / piv;
            }
        }
    }
    Ok(y)
}

fn singular_sylvester() -> NetError {
    NetError::LyapunovSolveFailure {
        reason: "operators share an eigenvalue pair summing to zero".into(),
    }
}

/// Solves `op1(a1) x + x op2(a2) = c` for real `a1`, `a2` given by their
/// complex Schur forms; returns the real part of the solution.
pub fn solve_sylvester(
    s1: &ComplexSchur,
    trans1: bool,
    s2: &ComplexSchur,
    trans2: bool,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (m, n) = (s1.dim(), s2.dim());
    if m == 0 || n == 0 {
        return Ok(DMatrix::zeros(m, n));
    }
    // op(a) = w op(t) w^{-1} with w = z (plain) or conj(z) (transposed).
    let w1 = if trans1 {
        s1.z.map(|v| v.conj())
    } else {
        s1.z.clone()
    };
    let w2 = if trans2 {
        s2.z.map(|v| v.conj())
    } else {
        s2.z.clone()
    };
    let w1_inv = w1.adjoint();
    let w2_inv = w2.adjoint();
    let cc = cmatmul(&cmatmul(&w1_inv, &to_complex(c)), &w2);
    let y = triangular_sylvester(&s1.t, trans1, &s2.t, trans2, &cc)?;
    let x = cmatmul(&cmatmul(&w1, &y), &w2_inv);
    Ok(x.map(|v| v.re))
}

/// Upper-triangular `r` with `t y + y t^H + b b^H = 0`, `y = r r^H`,
/// for upper-triangular `t` whose diagonal lies in the open left half-plane.
pub fn lyapunov_factor_triangular(t: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let k = t.nrows();
    let p = b.ncols();
    let mut bw = b.clone();
    let mut r = DMatrix::<C64>::zeros(k, k);
    let mut rhs = vec![C64::new(0.0, 0.0); k];
    for idx in (0..k).rev() {
        let tau = t[(idx, idx)];
        if tau.re >= 0.0 {
            return Err(NetError::LyapunovSolveFailure {
                reason: format!("eigenvalue {} is not in the open left half-plane", tau),
            });
        }
        let brow: Vec<C64> = (0..p).map(|c| bw[(idx, c)]).collect();
        let nb = brow.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let alpha = nb / (-2.0 * tau.re).sqrt();
        r[(idx, idx)] = C64::new(alpha, 0.0);
        if idx == 0 || alpha == 0.0 {
            continue;
        }
        for i in 0..idx {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..p {
                acc += bw[(i, c)] * brow[c].conj();
            }
            rhs[i] = -acc - t[(i, idx)] * (alpha * alpha);
        }
        let shift = tau.conj();
        let mut w = vec![C64::new(0.0, 0.0); idx];
        for i in (0..idx).rev() {
            let mut acc = rhs[i];
            for l in (i + 1)..idx {
                acc -= t[(i, l)] * w[l];
            }
            w[i] = acc / (t[(i, i)] + shift);
        }
        for i in 0..idx {
            let u = w[i] / alpha;
            r[(i, idx)] = u;
            for c in 0..p {
                let delta = u * brow[c] / alpha;
                bw[(i, c)] -= delta;
            }
        }
    }
    Ok(r)
}

/// Square-root factor of a real positive semidefinite matrix, `x = g g^H`.
#[derive(Debug, Clone)]
pub struct ComplexFactor {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl ComplexFactor {
    pub fn from_complex(g: &DMatrix<C64>) -> Self {
        let (re, im) = split(g);
        Self { re, im }
    }

    pub fn nrows(&self) -> usize {
        self.re.nrows()
    }

    /// `g g^H` (real up to rounding; the imaginary part is discarded).
    pub fn dense(&self) -> DMatrix<f64> {
        &self.re * self.re.transpose() + &self.im * self.im.transpose()
    }

    pub fn left_mul(&self, a: &DMatrix<f64>) -> Self {
        Self {
            re: a * &self.re,
            im: a * &self.im,
        }
    }

    /// `trace(c g g^H c^T)` computed as a squared Frobenius norm.
    pub fn weighted_trace(&self, c: &DMatrix<f64>) -> f64 {
        (c * &self.re).norm_squared() + (c * &self.im).norm_squared()
    }
}

/// Factor `g` with `a y + y a^T + b b^T = 0`, `y = g g^H`, for Hurwitz `a`
/// given by its complex Schur form.
pub fn lyapunov_factor(s: &ComplexSchur, b: &DMatrix<f64>) -> Result<ComplexFactor> {
    let k = s.dim();
    if k == 0 {
        return Ok(ComplexFactor {
            re: DMatrix::zeros(0, 0),
            im: DMatrix::zeros(0, 0),
        });
    }
    let bt = cmatmul(&s.z.adjoint(), &to_complex(b));
    let r = lyapunov_factor_triangular(&s.t, &bt)?;
    Ok(ComplexFactor::from_complex(&cmatmul(&s.z, &r)))
}

/// Factor `g` with `a^T y + y a + c^T c = 0`, `y = g g^H`.
pub fn lyapunov_factor_dual(s: &ComplexSchur, c: &DMatrix<f64>) -> Result<ComplexFactor> {
    let k = s.dim();
    if k == 0 {
        return Ok(ComplexFactor {
            re: DMatrix::zeros(0, 0),
            im: DMatrix::zeros(0, 0),
        });
    }
    // t^H y + y t + (c z)^H (c z) = 0; reversing the index order turns t^H
    // into an upper-triangular matrix.
    let cz = cmatmul(&s.z.adjoint(), &to_complex(&c.transpose()));
    let flip = |i: usize| k - 1 - i;
    let tf = DMatrix::from_fn(k, k, |i, j| s.t[(flip(j), flip(i))].conj());
    let bf = DMatrix::from_fn(k, cz.ncols(), |i, j| cz[(flip(i), j)]);
    let rf = lyapunov_factor_triangular(&tf, &bf)?;
    let r = DMatrix::from_fn(k, k, |i, j| rf[(flip(i), j)]);
    Ok(ComplexFactor::from_complex(&cmatmul(&s.z, &r)))
}
