//! Kalman-Yakubovich-Popov machinery: the KYP matrix, feasibility tests,
//! extremal solutions and passivity decisions.
//!
//! For a system `(A, B, C, D)` the KYP matrix is
//!
//! ```text
//! W(X) = [[-A'X - XA,  C' - XB],
//!         [ C  - B'X,  D + D' ]]
//! ```
//!
//! and the feasible set collects the symmetric positive definite `X` with
//! `W(X)` positive semidefinite. Every feasible `X` induces a pH
//! factorization. For minimal stable systems the set is an order interval
//! `[X_min, X_max]` whose endpoints are the stabilizing and
//! anti-stabilizing solutions of the passivity Riccati equation.

use crate::numkernels::{
    min_sym_eigenvalue, solve_are_extremal, solve_lyapunov, sym_eig, symmetrize, Extremal,
};
use crate::systems::LtiSystem;
use crate::{Error, Mat, Result};

/// A KYP solution candidate with diagnostics.
#[derive(Debug, Clone)]
pub struct KypCertificate {
    pub x: Mat,
    /// Smallest eigenvalue of `X`.
    pub min_eig_x: f64,
    /// Smallest eigenvalue of `W(X)`.
    pub min_eig_w: f64,
    /// Relative Riccati residual when `X` came from an ARE solve.
    pub are_residual_rel: Option<f64>,
    /// Set when the controllability Gramian of the system is numerically
    /// rank deficient; extremal solutions are only extremal for minimal
    /// systems, so callers should run a minimal realization first.
    pub minimality_warning: bool,
    /// Feedthrough regularization added before solving, if any.
    pub feedthrough_eps: Option<f64>,
}

impl KypCertificate {
    /// Feasibility claim at tolerance `tol`: `W(X)` positive semidefinite
    /// within `tol` and `X` positive definite beyond `tol`.
    pub fn is_feasible_at(&self, tol: f64) -> bool {
        self.min_eig_w >= -tol && self.min_eig_x > tol
    }
}

/// Default feasibility tolerance, `1e-8 * |W|`. Extremal solutions make
/// `W` rank deficient, so exact boundary points must pass.
pub fn default_feasibility_tol(w: &Mat) -> f64 {
    1e-8 * w.norm().max(1.0)
}

/// Assembles the KYP matrix `W(X)`.
pub fn kyp_matrix(sys: &LtiSystem, x: &Mat) -> Mat {
    let n = sys.order();
    let m = sys.inputs();
    let mut w = Mat::zeros(n + m, n + m);
    let xs = symmetrize(x);
    let block11 = -(sys.a.transpose() * &xs) - &xs * &sys.a;
    let block12 = sys.c.transpose() - &xs * &sys.b;
    let block22 = &sys.d + sys.d.transpose();
    w.view_mut((0, 0), (n, n)).copy_from(&block11);
    w.view_mut((0, n), (n, m)).copy_from(&block12);
    w.view_mut((n, 0), (m, n)).copy_from(&block12.transpose());
    w.view_mut((n, n), (m, m)).copy_from(&block22);
    w
}

/// Feasibility test: `true` iff the smallest eigenvalue of `W(X)` is at
/// least `-tol` and `X` is positive definite at `tol`. Also returns the
/// smallest eigenvalue of `W(X)`.
pub fn is_feasible(sys: &LtiSystem, x: &Mat, tol: f64) -> (bool, f64) {
    let w = kyp_matrix(sys, x);
    let min_w = min_sym_eigenvalue(&w);
    let min_x = min_sym_eigenvalue(x);
    (min_w >= -tol && min_x > tol, min_w)
}

fn certificate_from(sys: &LtiSystem, x: Mat, residual: Option<f64>, eps: Option<f64>) -> KypCertificate {
    let w = kyp_matrix(sys, &x);
    let min_eig_w = min_sym_eigenvalue(&w);
    let min_eig_x = min_sym_eigenvalue(&x);
    KypCertificate {
        x,
        min_eig_x,
        min_eig_w,
        are_residual_rel: residual,
        minimality_warning: false,
        feedthrough_eps: eps,
    }
}

/// Computes the extremal KYP solutions `(X_min, X_max)` through the
/// passivity Riccati equation.
///
/// Expects a stable system with nonsingular `D + D'`; minimality is not
/// enforced, but a rank-deficient controllability Gramian raises the
/// `minimality_warning` flag on both certificates.
pub fn extremal_solutions(sys: &LtiSystem) -> Result<(KypCertificate, KypCertificate)> {
    extremal_solutions_with_eps(sys, None)
}

fn extremal_solutions_with_eps(
    sys: &LtiSystem,
    eps: Option<f64>,
) -> Result<(KypCertificate, KypCertificate)> {
    let abscissa = sys.spectral_abscissa()?;
    if abscissa >= 0.0 {
        return Err(Error::Unstable(abscissa));
    }
    let min_sol = solve_are_extremal(&sys.a, &sys.b, &sys.c, &sys.d, Extremal::Min)?;
    let max_sol = solve_are_extremal(&sys.a, &sys.b, &sys.c, &sys.d, Extremal::Max)?;

    let mut cert_min = certificate_from(sys, min_sol.x, Some(min_sol.report.residual_rel), eps);
    let mut cert_max = certificate_from(sys, max_sol.x, Some(max_sol.report.residual_rel), eps);

    // Minimality probe on the controllability Gramian.
    let (p_gram, _) = solve_lyapunov(&sys.a, &(&sys.b * sys.b.transpose()))?;
    let (vals, _) = sym_eig(&p_gram);
    let n = sys.order();
    let max_val = vals[n - 1].max(0.0);
    let rank_tol = n as f64 * f64::EPSILON * max_val.max(f64::MIN_POSITIVE);
    let deficient = vals.iter().any(|&v| v < rank_tol);
    cert_min.minimality_warning = deficient;
    cert_max.minimality_warning = deficient;
    Ok((cert_min, cert_max))
}

/// Passivity decision.
#[derive(Debug, Clone)]
pub struct PassivityVerdict {
    pub passive: bool,
    pub certificate: Option<KypCertificate>,
    pub reason: String,
}

/// Decides passivity of a stable system by attempting the extremal KYP
/// solutions. Singular `D + D'` is regularized with an artificial
/// feedthrough `1e-6 * I` first (recorded in the certificate). Returns
/// `false` with diagnostics instead of erroring.
pub fn is_passive(sys: &LtiSystem) -> PassivityVerdict {
    let abscissa = match sys.spectral_abscissa() {
        Ok(a) => a,
        Err(e) => {
            return PassivityVerdict {
                passive: false,
                certificate: None,
                reason: format!("eigenvalue computation failed: {e}"),
            }
        }
    };
    if abscissa >= 0.0 {
        return PassivityVerdict {
            passive: false,
            certificate: None,
            reason: format!("not asymptotically stable (abscissa {abscissa:.3e})"),
        };
    }
    let dsum = &sys.d + sys.d.transpose();
    let needs_eps = sys.inputs() > 0 && min_sym_eigenvalue(&dsum).abs() < 1e-12;
    let (work, eps) = if needs_eps {
        (sys.with_feedthrough_shift(1e-6), Some(1e-6))
    } else {
        (sys.clone(), None)
    };
    match extremal_solutions_with_eps(&work, eps) {
        Ok((cert_min, _)) => {
            let tol = 1e-8 * cert_min.x.norm().max(1.0);
            let psd = cert_min.min_eig_x >= -tol;
            PassivityVerdict {
                passive: psd,
                reason: if psd {
                    "minimal KYP solution exists and is positive semidefinite".into()
                } else {
                    format!("minimal KYP solution indefinite ({:.3e})", cert_min.min_eig_x)
                },
                certificate: Some(cert_min),
            }
        }
        Err(e) => PassivityVerdict {
            passive: false,
            certificate: None,
            reason: format!("extremal solutions unavailable: {e}"),
        },
    }
}
