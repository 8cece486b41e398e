//! Raising and lowering operators from the closed operator set
//! X = (σ⁺a, σ⁻a†, σ_z, 1).
//!
//! Commuting H through X gives HX = XG with a 4×4 matrix G whose entries
//! are functions of H. Diagonalizing G as RΛR⁻¹ and rescaling the columns
//! of R (S = R·M) yields b (eigenvalue λ₃) and b† (eigenvalue λ₄). The
//! scale α(H) of the b† column is fixed by requiring b† to be the adjoint
//! of b: α(H) = β(1 + 2g²/T(H)).
//!
//! Operator-valued coefficients always multiply the elementary operators
//! from the right, matching the row-vector form X·S.

use nalgebra::{Matrix4, Vector4};

use crate::error::{JcmError, Result};
use crate::model::{build_charge, JcmParams};
use crate::operator::{commutator, elementary_operators, hermitian_eig, Eigen, Operator};
use crate::report::{Check, ResidualReport};

/// Default tolerance for the ladder relations and adjointness.
pub const LADDER_TOLERANCE: f64 = 1e-10;

/// g⁴ + 4g²Eω + ω²δ².
pub fn t_radicand(energy: f64, params: &JcmParams) -> f64 {
    let g2 = params.g() * params.g();
    let w = params.omega();
    let d = params.detuning();
    g2 * g2 + 4.0 * g2 * energy * w + w * w * d * d
}

/// T(E) = √(g⁴ + 4g²Eω + ω²δ²).
pub fn t_of(energy: f64, params: &JcmParams) -> Result<f64> {
    let radicand = t_radicand(energy, params);
    if radicand < 0.0 {
        return Err(JcmError::NegativeRadicand { energy, radicand });
    }
    Ok(radicand.sqrt())
}

/// λ₃(E) = (g² + Eω − T)/ω.
pub fn lambda3(energy: f64, params: &JcmParams) -> f64 {
    let t = t_radicand(energy, params).sqrt();
    (params.g() * params.g() + energy * params.omega() - t) / params.omega()
}

/// λ₄(E) = (g² + Eω + T)/ω.
pub fn lambda4(energy: f64, params: &JcmParams) -> f64 {
    let t = t_radicand(energy, params).sqrt();
    (params.g() * params.g() + energy * params.omega() + t) / params.omega()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GEigenvalues {
    pub lambdas: [f64; 4],
    pub t: f64,
}

/// Closed-form eigenvalues of G with H replaced by the scalar E.
pub fn g_eigenvalues(energy: f64, params: &JcmParams) -> Result<GEigenvalues> {
    let t = t_of(energy, params)?;
    let g2 = params.g() * params.g();
    let w = params.omega();
    Ok(GEigenvalues {
        lambdas: [
            energy,
            energy,
            (g2 + energy * w - t) / w,
            (g2 + energy * w + t) / w,
        ],
        t,
    })
}

/// The G matrix at a scalar energy, with its closed-form spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GScalar {
    pub energy: f64,
    pub entries: Matrix4<f64>,
    pub lambdas: [f64; 4],
    pub t: f64,
}

impl GScalar {
    pub fn new(energy: f64, params: &JcmParams) -> Result<Self> {
        let GEigenvalues { lambdas, t } = g_eigenvalues(energy, params)?;
        let (w, g, d) = (params.omega(), params.g(), params.detuning());
        let g2w = g * g / w;
        #[rustfmt::skip]
        let entries = Matrix4::new(
            energy - d + g2w,     -g2w,                 -2.0 * g, 0.0,
            -g2w,                 energy + d + g2w,     2.0 * g,  0.0,
            -g * energy / w,      g * energy / w,       energy,   0.0,
            -g * d / (2.0 * w),   g * d / (2.0 * w),    0.0,      energy,
        );
        Ok(Self {
            energy,
            entries,
            lambdas,
            t,
        })
    }

    /// Eigenvalues from a general (Schur) eigensolve, ascending by real
    /// part. Imaginary parts are dropped; G has a real spectrum whenever
    /// T is real.
    pub fn numeric_eigenvalues(&self) -> [f64; 4] {
        let ev = self.entries.complex_eigenvalues();
        let mut out = [ev[0].re, ev[1].re, ev[2].re, ev[3].re];
        out.sort_by(f64::total_cmp);
        out
    }

    /// det(G − λI).
    pub fn characteristic(&self, lambda: f64) -> f64 {
        (self.entries - Matrix4::identity() * lambda).determinant()
    }

    /// The eigenvector matrix R, columns ordered as `lambdas`.
    pub fn eigenvector_matrix(&self, params: &JcmParams) -> Matrix4<f64> {
        let (w, g, d) = (params.omega(), params.g(), params.detuning());
        let g2 = g * g;
        let t = self.t;
        let gamma = -2.0 * g * self.energy;
        Matrix4::from_columns(&[
            Vector4::new(0.0, 0.0, 0.0, 1.0),
            Vector4::new(2.0 * g, 2.0 * g, -d, 0.0),
            Vector4::new(g2 - w * d - t, -g2 - w * d + t, gamma, -g * d),
            Vector4::new(g2 - w * d + t, -g2 - w * d - t, gamma, -g * d),
        ])
    }
}

/// Scalar entry functions of S = R·M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SEntryFunctions {
    pub params: JcmParams,
    pub beta: f64,
}

impl SEntryFunctions {
    pub fn new(params: JcmParams, beta: f64) -> Self {
        Self { params, beta }
    }

    fn t(&self, e: f64) -> f64 {
        t_radicand(e, &self.params).sqrt()
    }

    fn g2(&self) -> f64 {
        self.params.g() * self.params.g()
    }

    fn wd(&self) -> f64 {
        self.params.omega() * self.params.detuning()
    }

    pub fn gamma(&self, e: f64) -> f64 {
        -2.0 * self.params.g() * e
    }

    pub fn xi(&self, e: f64) -> f64 {
        self.g2() - self.wd() - self.t(e)
    }

    pub fn tau(&self, e: f64) -> f64 {
        -self.g2() - self.wd() + self.t(e)
    }

    pub fn kappa(&self, e: f64) -> f64 {
        -self.g2() - self.wd() - self.t(e)
    }

    pub fn eta(&self, e: f64) -> f64 {
        self.g2() - self.wd() + self.t(e)
    }

    /// α(E) = β(1 + 2g²/T(E)).
    pub fn alpha(&self, e: f64) -> f64 {
        self.beta * (1.0 + 2.0 * self.g2() / self.t(e))
    }
}

/// The constructed lowering operator b and raising operator b†, together
/// with the eigendecomposition of H used to build their coefficients.
#[derive(Debug, Clone)]
pub struct ShiftPair {
    pub b: Operator,
    pub b_dag: Operator,
    pub beta: f64,
    pub params: JcmParams,
    pub spectral: Eigen,
}

impl ShiftPair {
    /// Non-guard eigenpairs of H.
    pub fn physical_mask(&self) -> Vec<bool> {
        self.spectral.guard_mask().into_iter().map(|g| !g).collect()
    }

    /// f(H) on the non-guard spectrum.
    pub fn function_of_h(&self, f: impl Fn(f64) -> f64) -> Result<Operator> {
        let mask = self.physical_mask();
        self.spectral.apply_where(f, |k| mask[k])
    }
}

pub fn build_shift_pair(h: &Operator, params: &JcmParams, beta: f64) -> Result<ShiftPair> {
    if !(beta.is_finite() && beta != 0.0) {
        return Err(JcmError::InvalidParameter(format!(
            "beta must be a finite nonzero real, got {beta}"
        )));
    }
    let spectral = hermitian_eig(h)?;
    let guard = spectral.guard_mask();
    for (k, &e) in spectral.values.iter().enumerate() {
        if guard[k] {
            continue;
        }
        if t_of(e, params)? == 0.0 {
            return Err(JcmError::SingularAlpha { energy: e });
        }
    }
    let keep = |k: usize| !guard[k];
    let s = SEntryFunctions::new(*params, beta);
    let fh = |f: &dyn Fn(f64) -> f64| spectral.apply_where(f, keep);

    let el = elementary_operators(h.space());
    let sp_a = &el.sigma_plus * &el.a;
    let sm_ad = &el.sigma_minus * &el.a_dag;
    let gd = params.g() * params.detuning();

    let b = {
        let xi = fh(&|e| s.xi(e) * beta)?;
        let tau = fh(&|e| s.tau(e) * beta)?;
        let gamma = fh(&|e| s.gamma(e) * beta)?;
        let terms = [&sp_a * &xi, &sm_ad * &tau, &el.sigma_z * &gamma];
        &(&(&terms[0] + &terms[1]) + &terms[2]) - &el.identity.scale(gd * beta)
    };
    let b_dag = {
        let eta = fh(&|e| s.eta(e) * s.alpha(e))?;
        let kappa = fh(&|e| s.kappa(e) * s.alpha(e))?;
        let gamma = fh(&|e| s.gamma(e) * s.alpha(e))?;
        let alpha = fh(&|e| s.alpha(e))?;
        let terms = [&sp_a * &eta, &sm_ad * &kappa, &el.sigma_z * &gamma];
        &(&(&terms[0] + &terms[1]) + &terms[2]) - &alpha.scale(gd)
    };
    Ok(ShiftPair {
        b,
        b_dag,
        beta,
        params: *params,
        spectral,
    })
}

/// ‖P·x·P‖_F / ‖P·scale·P‖_F with P removing the guard state.
pub(crate) fn relative_residual(x: &Operator, scale: &Operator) -> f64 {
    let num = x.without_guard().frobenius_norm();
    let den = scale.without_guard().frobenius_norm();
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Residuals of the ladder relations, adjointness and charge conservation.
pub fn ladder_residuals(h: &Operator, pair: &ShiftPair) -> Result<ResidualReport> {
    let params = &pair.params;
    let l3 = pair.function_of_h(|e| lambda3(e, params))?;
    let l4 = pair.function_of_h(|e| lambda4(e, params))?;
    let charge = build_charge(h.space());

    let lower = &commutator(h, &pair.b)? - &(&pair.b * &(&l3 - h));
    let raise = &commutator(h, &pair.b_dag)? - &(&pair.b_dag * &(&l4 - h));
    let adjoint = &pair.b_dag.adjoint() - &pair.b;

    let mut report = ResidualReport::new();
    report.push(Check::gated(
        "ladder.lowering",
        relative_residual(&lower, &pair.b),
        LADDER_TOLERANCE,
    ));
    report.push(Check::gated(
        "ladder.raising",
        relative_residual(&raise, &pair.b_dag),
        LADDER_TOLERANCE,
    ));
    report.push(Check::gated(
        "ladder.adjoint",
        relative_residual(&adjoint, &pair.b),
        LADDER_TOLERANCE,
    ));
    report.push(Check::gated(
        "ladder.charge_lowering",
        commutator(&charge, &pair.b)?.without_guard().frobenius_norm(),
        0.0,
    ));
    report.push(Check::gated(
        "ladder.charge_raising",
        commutator(&charge, &pair.b_dag)?.without_guard().frobenius_norm(),
        0.0,
    ));
    Ok(report)
}
