//! H2 error between a network system and a clustering-based reduction.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{NetError, Result};
use crate::linalg::{solve_sylvester, ComplexFactor};
use crate::network::NetworkSystem;
use crate::reduction::ReducedNetwork;
use crate::semistable::{
    controllability_factor, controllability_residual, decompose, h2_mismatch, observability_factor,
    SemistableDecomposition,
};
use crate::tolerances::Tolerances;

/// A full-order network system together with the quantities every error
/// evaluation against it reuses.
#[derive(Debug, Clone)]
pub struct ReferenceModel {
    pub system: NetworkSystem,
    pub dec: SemistableDecomposition,
    pub p_factor: ComplexFactor,
    pub q_factor: ComplexFactor,
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub tolerances: Tolerances,
}

impl ReferenceModel {
    pub fn new(system: NetworkSystem, tol: &Tolerances) -> Result<Self> {
        let dec = system.decompose(tol)?;
        Self::with_decomposition(system, dec, tol)
    }

    pub fn with_decomposition(
        system: NetworkSystem,
        dec: SemistableDecomposition,
        tol: &Tolerances,
    ) -> Result<Self> {
        let p_factor = controllability_factor(&dec, &system.input)?;
        let q_factor = observability_factor(&dec, &system.output)?;
        let p = p_factor.dense();
        let q = q_factor.dense();
        Ok(Self {
            system,
            dec,
            p_factor,
            q_factor,
            p,
            q,
            tolerances: *tol,
        })
    }
}

/// Which Sylvester equation defines the cross Gramian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossTermVariant {
    /// `L_hat X + X L^T - (I - J_hat) F_hat F^T (I - J)^T = 0`.
    #[default]
    Reduced,
    /// The same equation with `L_hat^T` in place of `L_hat`; kept for
    /// comparison only.
    ReducedTransposed,
}

fn serialize_error<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str("unbounded"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    /// `None` when the error is unbounded.
    #[serde(serialize_with = "serialize_error")]
    pub h2_error: Option<f64>,
    pub bounded: bool,
    pub method: String,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub cross_gramian: Option<DMatrix<f64>>,
}

impl ErrorReport {
    pub fn unbounded(method: &str, mismatch: f64, tol: &Tolerances) -> Self {
        Self {
            h2_error: None,
            bounded: false,
            method: method.to_string(),
            residuals: BTreeMap::from([("consensus_mismatch".to_string(), mismatch)]),
            tolerances: *tol,
            cross_gramian: None,
        }
    }
}

fn reduced_decomposition(
    reduced: &ReducedNetwork,
    tol: &Tolerances,
) -> Result<SemistableDecomposition> {
    decompose(&(-&reduced.laplacian), tol)
}

/// `|J - Pi J_hat Pi^+|` relative to `|J|`.
pub fn consensus_mismatch(reference: &ReferenceModel, reduced: &ReducedNetwork) -> Result<f64> {
    let dec_r = reduced_decomposition(reduced, &reference.tolerances)?;
    Ok(mismatch_with(reference, reduced, &dec_r))
}

fn mismatch_with(
    reference: &ReferenceModel,
    reduced: &ReducedNetwork,
    dec_r: &SemistableDecomposition,
) -> f64 {
    let j = &reference.dec.projector;
    let lifted = &reduced.pi * &dec_r.projector * &reduced.pi_pinv;
    (j - lifted).norm() / j.norm().max(1.0)
}

/// Whether the reduction error is finite, i.e. the consensus projectors of
/// the two models agree.
pub fn boundedness_test(reference: &ReferenceModel, reduced: &ReducedNetwork) -> Result<bool> {
    Ok(consensus_mismatch(reference, reduced)? <= reference.tolerances.residual)
}

fn check_dims(reference: &ReferenceModel, reduced: &ReducedNetwork) -> Result<()> {
    if reduced.pi.nrows() != reference.system.n() {
        return Err(NetError::DimensionMismatch {
            what: format!(
                "reduction is defined on {} vertices, reference has {}",
                reduced.pi.nrows(),
                reference.system.n()
            ),
        });
    }
    Ok(())
}

fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    // trace(a b^T)
    a.component_mul(b).sum()
}

/// H2 error from the pseudo Gramians of both models and their cross
/// Gramian, cross-checked against the dual observability expression.
pub fn h2_error_gramian(
    reference: &ReferenceModel,
    reduced: &ReducedNetwork,
    variant: CrossTermVariant,
) -> Result<ErrorReport> {
    check_dims(reference, reduced)?;
    let tol = reference.tolerances;
    let dec = &reference.dec;
    let dec_r = reduced_decomposition(reduced, &tol)?;
    let mismatch = mismatch_with(reference, reduced, &dec_r);
    if mismatch > tol.residual {
        return Err(NetError::UnboundedError { mismatch });
    }
    let sys = &reference.system;
    let (f, h) = (&sys.input, &sys.output);
    let (f_hat, h_hat) = (&reduced.input, &reduced.output);
    let (pi, pi_pinv) = (&reduced.pi, &reduced.pi_pinv);
    let (l, l_hat) = (&sys.laplacian, &reduced.laplacian);
    let j = &dec.projector;
    let i_j = dec.transient_projector();
    let i_jhat = dec_r.transient_projector();
    let j_lift = pi_pinv * j * pi;

    let p_r = controllability_factor(&dec_r, f_hat)?.dense();
    let q_r = observability_factor(&dec_r, h_hat)?.dense();

    // Cross Gramian on the input side.
    let (f_in, f_hat_in) = (&i_j * f, &i_jhat * f_hat);
    let rhs = &f_hat_in * f_in.transpose();
    let (x_tilde, lhs_op) = match variant {
        CrossTermVariant::Reduced => {
            let c = -(dec_r.v_bar.transpose() * &rhs * &dec.v_bar);
            let xb = solve_sylvester(&dec_r.schur, false, &dec.schur, true, &c)?;
            (&dec_r.u_bar * xb * dec.u_bar.transpose(), l_hat.clone())
        }
        CrossTermVariant::ReducedTransposed => {
            let c = -(dec_r.u_bar.transpose() * &rhs * &dec.v_bar);
            let xb = solve_sylvester(&dec_r.schur, true, &dec.schur, true, &c)?;
            (&dec_r.v_bar * xb * dec.u_bar.transpose(), l_hat.transpose())
        }
    };
    let res = &lhs_op * &x_tilde + &x_tilde * l.transpose() - &rhs;
    let sylvester_residual = res.norm()
        / ((lhs_op.norm() + l.norm()) * x_tilde.norm()
            + f_hat_in.norm() * f_in.norm()
            + f_hat.norm() * f.norm())
        .max(f64::MIN_POSITIVE);
    let p_x = &x_tilde - &j_lift * &x_tilde * j.transpose();

    // The Gramians vanish on the consensus subspaces, so the transient parts
    // of the output matrices give the same traces without rounding leaking in
    // from the consensus directions.
    let h_t = h * &i_j;
    let h_hat_t = h_hat * &i_jhat;
    let t_full = reference.p_factor.weighted_trace(h);
    let t_red = trace_product(&(&h_hat_t * &p_r), &h_hat_t);
    let t_cross = trace_product(&(&h_hat_t * &p_x), &h_t);
    // Upper bound on every term of the trace formula, projected or not.
    let scale = t_full
        + t_red
        + 2.0 * h_hat_t.norm() * p_x.norm() * h_t.norm()
        + h.norm_squared() * reference.p.norm()
        + h_hat.norm_squared() * p_r.norm();
    let e2 = t_full + t_red - 2.0 * t_cross;

    // Dual expression on the output side.
    let rhs_d = h_t.transpose() * &h_hat_t;
    let cd = -(dec.u_bar.transpose() * &rhs_d * &dec_r.u_bar);
    let yb = solve_sylvester(&dec.schur, true, &dec_r.schur, false, &cd)?;
    let y_tilde = &dec.v_bar * yb * dec_r.v_bar.transpose();
    let res_d = l.transpose() * &y_tilde + &y_tilde * l_hat - &rhs_d;
    let dual_residual = res_d.norm()
        / ((l.norm() + l_hat.norm()) * y_tilde.norm()
            + h_t.norm() * h_hat_t.norm()
            + h.norm() * h_hat.norm())
        .max(f64::MIN_POSITIVE);
    let q_x = &y_tilde - j.transpose() * &y_tilde * &j_lift;
    let f_t = f_in.transpose();
    let f_hat_t = f_hat_in.transpose();
    let td_full = reference.q_factor.weighted_trace(&f.transpose());
    let td_red = trace_product(&(&f_hat_t * &q_r), &f_hat_t);
    let td_cross = trace_product(&(&f_t * &q_x), &f_hat_t);
    let e2_dual = td_full + td_red - 2.0 * td_cross;

    let mut residuals = BTreeMap::new();
    residuals.insert("consensus_mismatch".to_string(), mismatch);
    residuals.insert("cross_sylvester".to_string(), sylvester_residual);
    residuals.insert("dual_cross_sylvester".to_string(), dual_residual);
    residuals.insert(
        "dual_gap".to_string(),
        (e2 - e2_dual).abs() / scale.max(f64::MIN_POSITIVE),
    );
    residuals.insert("error_squared".to_string(), e2);
    residuals.insert("energy_scale".to_string(), scale);
    let floor = 8.0 * f64::EPSILON * scale;
    residuals.insert("rounding_floor".to_string(), floor);
    Ok(ErrorReport {
        h2_error: Some(if e2 <= floor { 0.0 } else { e2.sqrt() }),
        bounded: true,
        method: "cross-gramian".to_string(),
        residuals,
        tolerances: tol,
        cross_gramian: Some(p_x),
    })
}

/// H2 norm of the error system `(blkdiag(-L, -L_hat), [F; F_hat], [H, -H_hat])`,
/// evaluated from a square-root factor of its pseudo Gramian so that exact
/// reductions return an error at rounding level.
pub fn h2_error_direct(
    reference: &ReferenceModel,
    reduced: &ReducedNetwork,
) -> Result<ErrorReport> {
    check_dims(reference, reduced)?;
    let tol = reference.tolerances;
    let mismatch = consensus_mismatch(reference, reduced)?;
    if mismatch > tol.residual {
        return Err(NetError::UnboundedError { mismatch });
    }
    let sys = &reference.system;
    let mut residuals = BTreeMap::from([("consensus_mismatch".to_string(), mismatch)]);
    let e2 = stacked_error_squared(
        (&sys.laplacian, &sys.input, &sys.output),
        (&reduced.laplacian, &reduced.input, &reduced.output),
        &tol,
        &mut residuals,
    )?;
    Ok(ErrorReport {
        h2_error: Some(e2.sqrt()),
        bounded: true,
        method: "direct".to_string(),
        residuals,
        tolerances: tol,
        cross_gramian: None,
    })
}

/// H2 distance between two networks with the same inputs and outputs, such
/// as a network and its minimal realization. Reported unbounded when the
/// two models do not share the same steady-state response.
pub fn h2_distance(a: &NetworkSystem, b: &NetworkSystem, tol: &Tolerances) -> Result<ErrorReport> {
    if a.input.ncols() != b.input.ncols() || a.output.nrows() != b.output.nrows() {
        return Err(NetError::DimensionMismatch {
            what: format!(
                "models have {}/{} and {}/{} inputs/outputs",
                a.input.ncols(),
                a.output.nrows(),
                b.input.ncols(),
                b.output.nrows()
            ),
        });
    }
    let mut residuals = BTreeMap::new();
    match stacked_error_squared(
        (&a.laplacian, &a.input, &a.output),
        (&b.laplacian, &b.input, &b.output),
        tol,
        &mut residuals,
    ) {
        Ok(e2) => Ok(ErrorReport {
            h2_error: Some(e2.sqrt()),
            bounded: true,
            method: "direct".to_string(),
            residuals,
            tolerances: *tol,
            cross_gramian: None,
        }),
        Err(NetError::NotInH2 { .. }) => {
            let mut report = ErrorReport::unbounded("direct", residuals["output_consensus"], tol);
            report.residuals = residuals;
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

type Model<'a> = (&'a DMatrix<f64>, &'a DMatrix<f64>, &'a DMatrix<f64>);

/// Squared H2 norm of `(blkdiag(-L1, -L2), [F1; F2], [H1, -H2])` from a
/// square-root factor of its pseudo Gramian.
fn stacked_error_squared(
    (l1, f1, h1): Model<'_>,
    (l2, f2, h2): Model<'_>,
    tol: &Tolerances,
    residuals: &mut BTreeMap<String, f64>,
) -> Result<f64> {
    let (n, r) = (l1.nrows(), l2.nrows());
    let mut a = DMatrix::zeros(n + r, n + r);
    a.view_mut((0, 0), (n, n)).copy_from(&(-l1));
    a.view_mut((n, n), (r, r)).copy_from(&(-l2));
    let mut b = DMatrix::zeros(n + r, f1.ncols());
    b.rows_mut(0, n).copy_from(f1);
    b.rows_mut(n, r).copy_from(f2);
    let mut c = DMatrix::zeros(h1.nrows(), n + r);
    c.columns_mut(0, n).copy_from(h1);
    c.columns_mut(n, r).copy_from(&(-h2));
    let dec = decompose(&a, tol)?;
    let membership = h2_mismatch(&dec, &b, &c);
    residuals.insert("output_consensus".to_string(), membership);
    if membership > tol.residual {
        return Err(NetError::NotInH2 {
            residual: (&c * &dec.projector * &b).norm(),
        });
    }
    let factor = controllability_factor(&dec, &b)?;
    let e2 = factor.weighted_trace(&c);
    residuals.insert(
        "lyapunov".to_string(),
        controllability_residual(&dec, &b, &factor.dense()),
    );
    residuals.insert("error_squared".to_string(), e2);
    Ok(e2)
}
