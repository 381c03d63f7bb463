//! Semistable systems: consensus/transient splitting, pseudo Gramians,
//! H2 norms, energies and structural tests.

use nalgebra::{DMatrix, DVector};

use crate::error::{NetError, Result};
use crate::linalg::{
    condition_number, lyapunov_factor, lyapunov_factor_dual, norm2, numerical_rank, pseudo_inverse,
    rank_against, rank_threshold, singular_values, square_svd, ComplexFactor, ComplexSchur,
};
use crate::tolerances::Tolerances;

/// Splitting `a = u 0 v^T + u_bar a_bar v_bar^T` of a semistable matrix.
///
/// `u`, `v` span the right and left null spaces with `v^T u = I`; `u_bar` is
/// an orthonormal basis of the range of `a`; `[v v_bar]^T` inverts
/// `[u u_bar]`; `a_bar` is Hurwitz.
#[derive(Debug, Clone)]
pub struct SemistableDecomposition {
    pub a: DMatrix<f64>,
    pub m: usize,
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub u_bar: DMatrix<f64>,
    pub v_bar: DMatrix<f64>,
    pub a_bar: DMatrix<f64>,
    /// Consensus projector `lim e^{a t} = u v^T`.
    pub projector: DMatrix<f64>,
    pub schur: ComplexSchur,
    pub tolerances: Tolerances,
}

fn not_semistable(reason: impl Into<String>) -> NetError {
    NetError::NotSemistable {
        reason: reason.into(),
    }
}

pub fn decompose(a: &DMatrix<f64>, tol: &Tolerances) -> Result<SemistableDecomposition> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(NetError::DimensionMismatch {
            what: format!("system matrix is {}x{}", n, a.ncols()),
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(NetError::Numerical {
            reason: "system matrix has non-finite entries".into(),
        });
    }
    let svd = square_svd(a)?;
    let smax = if n == 0 { 0.0 } else { svd.s[0] };
    let r = if smax == 0.0 {
        0
    } else {
        let tau = rank_threshold(n, smax, tol.rank);
        svd.s.iter().filter(|&&x| x > tau).count()
    };
    let m = n - r;
    if r > 0 && m > 0 {
        let a2 = a * a;
        let s2 = singular_values(&a2);
        let tau2 = rank_threshold(n, s2[0], tol.rank);
        let r2 = s2.iter().filter(|&&x| x > tau2).count();
        if r2 < r {
            return Err(not_semistable(format!(
                "zero eigenvalue is not semisimple (dim ker A = {m}, dim ker A^2 = {})",
                n - r2
            )));
        }
    }
    let u0 = svd.v.columns(r, m).into_owned();
    let v0 = svd.u.columns(r, m).into_owned();
    let u_bar = svd.u.columns(0, r).into_owned();
    let w = v0.transpose() * &u0;
    let cond = condition_number(&w);
    if cond > tol.max_condition {
        return Err(not_semistable(format!(
            "left and right null spaces are nearly orthogonal (condition {cond:e})"
        )));
    }
    let v = if m == 0 {
        DMatrix::zeros(n, 0)
    } else {
        let w_inv = w
            .clone()
            .try_inverse()
            .ok_or_else(|| not_semistable("null-space pairing is singular"))?;
        &v0 * w_inv.transpose()
    };
    let mut basis = DMatrix::zeros(n, n);
    basis.columns_mut(0, m).copy_from(&u0);
    basis.columns_mut(m, r).copy_from(&u_bar);
    let inv = basis
        .try_inverse()
        .ok_or_else(|| not_semistable("null space and range are not complementary"))?;
    let v_bar = inv.rows(m, r).transpose();
    let a_bar = v_bar.transpose() * a * &u_bar;
    let schur = ComplexSchur::new(&a_bar)?;
    if r > 0 {
        if let Some(bad) = schur.eigenvalues().into_iter().find(|z| z.re >= 0.0) {
            return Err(not_semistable(format!(
                "eigenvalue {bad} is not in the open left half-plane"
            )));
        }
    }
    let projector = &u0 * v.transpose();
    Ok(SemistableDecomposition {
        a: a.clone(),
        m,
        u: u0,
        v,
        u_bar,
        v_bar,
        a_bar,
        projector,
        schur,
        tolerances: *tol,
    })
}

impl SemistableDecomposition {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// `I - J`.
    pub fn transient_projector(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n(), self.n()) - &self.projector
    }
}

#[derive(Debug, Clone)]
pub struct PseudoGramians {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

fn check_rows(dec: &SemistableDecomposition, rows: usize, what: &str) -> Result<()> {
    if rows != dec.n() {
        return Err(NetError::DimensionMismatch {
            what: format!("{what} has {rows} state rows, system has {}", dec.n()),
        });
    }
    Ok(())
}

/// Square-root factor of the pseudo controllability Gramian of `(a, b)`.
pub fn controllability_factor(
    dec: &SemistableDecomposition,
    b: &DMatrix<f64>,
) -> Result<ComplexFactor> {
    check_rows(dec, b.nrows(), "input matrix")?;
    let b_bar = dec.v_bar.transpose() * b;
    Ok(lyapunov_factor(&dec.schur, &b_bar)?.left_mul(&dec.u_bar))
}

/// Square-root factor of the pseudo observability Gramian of `(c, a)`.
pub fn observability_factor(
    dec: &SemistableDecomposition,
    c: &DMatrix<f64>,
) -> Result<ComplexFactor> {
    check_rows(dec, c.ncols(), "output matrix")?;
    let c_bar = c * &dec.u_bar;
    Ok(lyapunov_factor_dual(&dec.schur, &c_bar)?.left_mul(&dec.v_bar))
}

/// Relative residual of `a p + p a^T + (I-J) b b^T (I-J)^T = 0`.
pub fn controllability_residual(
    dec: &SemistableDecomposition,
    b: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> f64 {
    let pb = dec.transient_projector() * b;
    let rhs = &pb * pb.transpose();
    let res = &dec.a * p + p * dec.a.transpose() + &rhs;
    res.norm() / (2.0 * dec.a.norm() * p.norm() + rhs.norm()).max(f64::MIN_POSITIVE)
}

/// Relative residual of `a^T q + q a + (I-J)^T c^T c (I-J) = 0`.
pub fn observability_residual(
    dec: &SemistableDecomposition,
    c: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> f64 {
    let cp = c * dec.transient_projector();
    let rhs = cp.transpose() * &cp;
    let res = dec.a.transpose() * q + q * &dec.a + &rhs;
    res.norm() / (2.0 * dec.a.norm() * q.norm() + rhs.norm()).max(f64::MIN_POSITIVE)
}

fn checked(residual: f64, tol: &Tolerances, what: &str) -> Result<()> {
    if residual.is_finite() && residual <= tol.residual {
        Ok(())
    } else {
        Err(NetError::LyapunovSolveFailure {
            reason: format!("{what} residual {residual:e} exceeds {:e}", tol.residual),
        })
    }
}

pub fn pseudo_controllability_gramian(
    dec: &SemistableDecomposition,
    b: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let p = controllability_factor(dec, b)?.dense();
    let p = (&p + p.transpose()) * 0.5;
    checked(
        controllability_residual(dec, b, &p),
        &dec.tolerances,
        "controllability Gramian",
    )?;
    Ok(p)
}

pub fn pseudo_observability_gramian(
    dec: &SemistableDecomposition,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let q = observability_factor(dec, c)?.dense();
    let q = (&q + q.transpose()) * 0.5;
    checked(
        observability_residual(dec, c, &q),
        &dec.tolerances,
        "observability Gramian",
    )?;
    Ok(q)
}

pub fn pseudo_gramians(
    dec: &SemistableDecomposition,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
) -> Result<PseudoGramians> {
    Ok(PseudoGramians {
        p: pseudo_controllability_gramian(dec, b)?,
        q: pseudo_observability_gramian(dec, c)?,
    })
}

/// Maps any solution of the controllability Lyapunov-like equation to the
/// pseudo Gramian, `p - J p J^T`.
pub fn particular_solution_projection(
    dec: &SemistableDecomposition,
    b: &DMatrix<f64>,
    p_any: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    checked(
        controllability_residual(dec, b, p_any),
        &dec.tolerances,
        "supplied solution",
    )?;
    let j = &dec.projector;
    Ok(p_any - j * p_any * j.transpose())
}

/// `|c J b|` relative to `|c| |J| |b|`.
pub fn h2_mismatch(dec: &SemistableDecomposition, b: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let cjb = c * &dec.projector * b;
    let scale = c.norm() * dec.projector.norm() * b.norm();
    if scale == 0.0 {
        0.0
    } else {
        cjb.norm() / scale
    }
}

pub fn h2_membership(dec: &SemistableDecomposition, b: &DMatrix<f64>, c: &DMatrix<f64>) -> bool {
    h2_mismatch(dec, b, c) <= dec.tolerances.residual
}

/// H2 norm of `(a, b, c)` computed from a square-root factor of the pseudo
/// controllability Gramian.
pub fn h2_norm(dec: &SemistableDecomposition, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<f64> {
    if c.ncols() != dec.n() {
        return Err(NetError::DimensionMismatch {
            what: format!(
                "output matrix has {} columns, system has {}",
                c.ncols(),
                dec.n()
            ),
        });
    }
    if !h2_membership(dec, b, c) {
        return Err(NetError::NotInH2 {
            residual: (c * &dec.projector * b).norm(),
        });
    }
    Ok(controllability_factor(dec, b)?.weighted_trace(c).sqrt())
}

/// Every transient state is reachable: `rank P = n - m` and `v^T b` has
/// full row rank.
pub fn controllability_test(dec: &SemistableDecomposition, b: &DMatrix<f64>) -> Result<bool> {
    let p = pseudo_controllability_gramian(dec, b)?;
    let vb = dec.v.transpose() * b;
    Ok(numerical_rank(&p, dec.tolerances.rank) == dec.n() - dec.m
        && rank_against(&vb, norm2(&dec.v) * norm2(b), dec.tolerances.rank) == dec.m)
}

/// Dual of [`controllability_test`].
pub fn observability_test(dec: &SemistableDecomposition, c: &DMatrix<f64>) -> Result<bool> {
    let q = pseudo_observability_gramian(dec, c)?;
    let cu = c * &dec.u;
    Ok(numerical_rank(&q, dec.tolerances.rank) == dec.n() - dec.m
        && rank_against(&cu, norm2(c) * norm2(&dec.u), dec.tolerances.rank) == dec.m)
}

fn check_initial_state(dec: &SemistableDecomposition, x0: &DVector<f64>) -> Result<()> {
    if x0.len() != dec.n() {
        return Err(NetError::DimensionMismatch {
            what: format!(
                "initial state has length {}, system has {}",
                x0.len(),
                dec.n()
            ),
        });
    }
    let component = (dec.v.transpose() * x0).norm();
    if component > dec.tolerances.residual * dec.v.norm().max(1.0) * x0.norm() {
        return Err(NetError::InvalidInitialState { component });
    }
    Ok(())
}

/// Minimal input energy `x0^T P^+ x0` steering the origin to `x0`; infinite
/// when `x0` leaves the range of `P`. Requires `v^T x0 = 0`.
pub fn input_energy(
    dec: &SemistableDecomposition,
    p: &DMatrix<f64>,
    x0: &DVector<f64>,
) -> Result<f64> {
    check_initial_state(dec, x0)?;
    let pinv = pseudo_inverse(p, dec.tolerances.rank);
    let y = &pinv * x0;
    let back = p * &y;
    if (&back - x0).norm() > 1e-6 * x0.norm() {
        return Ok(f64::INFINITY);
    }
    Ok(x0.dot(&y))
}

/// Output energy `x0^T Q x0` released from `x0`. Requires `v^T x0 = 0`.
pub fn output_energy(
    dec: &SemistableDecomposition,
    q: &DMatrix<f64>,
    x0: &DVector<f64>,
) -> Result<f64> {
    check_initial_state(dec, x0)?;
    Ok(x0.dot(&(q * x0)))
}
