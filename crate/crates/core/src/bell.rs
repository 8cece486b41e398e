//! CHSH tests on the dressed states.
//!
//! The atom is measured with the ordinary Pauli triple and the field with a
//! pseudo-spin triple on the two Fock levels {|n⟩, |n+1⟩} that carry
//! |ψ_n^±⟩:
//!
//!   s_x = |n⟩⟨n+1| + |n+1⟩⟨n|
//!   s_y = i(|n+1⟩⟨n| − |n⟩⟨n+1|)
//!   s_z = |n⟩⟨n| − |n+1⟩⟨n+1|
//!
//! which obeys the Pauli algebra on the pair and vanishes off it.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::{JcmError, Result};
use crate::model::JcmParams;
use crate::operator::{atom_identity, pauli, Operator, SpaceSpec, StateVector, C64};
use crate::par::Execution;
use crate::spectrum::excited_pair;

/// Local-hidden-variable bound.
pub const CLASSICAL_BOUND: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings {
    pub a: [f64; 3],
    pub a_prime: [f64; 3],
    pub b: [f64; 3],
    pub b_prime: [f64; 3],
}

impl MeasurementSettings {
    pub fn vectors(&self) -> [[f64; 3]; 4] {
        [self.a, self.a_prime, self.b, self.b_prime]
    }

    /// Reflect the atom-side directions through the z axis, (x, y, z) →
    /// (−x, −y, z). This is the frame change induced by σ_z conjugation,
    /// which maps the g < 0 model onto g > 0.
    pub fn reflect_atom_xy(&self) -> Self {
        let r = |v: [f64; 3]| [-v[0], -v[1], v[2]];
        Self {
            a: r(self.a),
            a_prime: r(self.a_prime),
            ..*self
        }
    }
}

/// θ* = π/2 + arctan(1/sin 2θ);
/// a = (0,0,−1), a′ = (1,0,0), b = (−sin θ*, 0, cos θ*), b′ = (sin θ*, 0, cos θ*).
pub fn paper_settings(theta: f64) -> Result<MeasurementSettings> {
    let s2 = (2.0 * theta).sin();
    if s2 == 0.0 || !s2.is_finite() {
        return Err(JcmError::Degenerate(format!(
            "sin(2 theta) = 0 at theta = {theta}: product state, settings undefined"
        )));
    }
    Ok(settings_at(FRAC_PI_2 + (1.0 / s2).atan()))
}

fn settings_at(theta_star: f64) -> MeasurementSettings {
    let (s, c) = theta_star.sin_cos();
    MeasurementSettings {
        a: [0.0, 0.0, -1.0],
        a_prime: [1.0, 0.0, 0.0],
        b: [-s, 0.0, c],
        b_prime: [s, 0.0, c],
    }
}

/// Limit of [`paper_settings`] as sin 2θ → 0⁺ (θ* → π).
pub fn limiting_settings() -> MeasurementSettings {
    settings_at(PI)
}

#[derive(Debug, Clone)]
pub struct PseudoSpinTriple {
    pub sx: Operator,
    pub sy: Operator,
    pub sz: Operator,
    pub pair_n: usize,
}

impl PseudoSpinTriple {
    pub fn components(&self) -> [&Operator; 3] {
        [&self.sx, &self.sy, &self.sz]
    }

    /// Projector onto atom ⊗ span{|n⟩, |n+1⟩}.
    pub fn pair_projector(&self) -> Operator {
        &self.sz * &self.sz
    }
}

pub fn pseudo_spin_pair(n: usize, space: SpaceSpec) -> Result<PseudoSpinTriple> {
    if n + 1 > space.fock_cutoff() {
        return Err(JcmError::IndexOutOfRange {
            n,
            max: space.fock_cutoff() - 1,
        });
    }
    let fd = space.fock_dim();
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut sx = DMatrix::zeros(fd, fd);
    let mut sy = DMatrix::zeros(fd, fd);
    let mut sz = DMatrix::zeros(fd, fd);
    sx[(n, n + 1)] = one;
    sx[(n + 1, n)] = one;
    sy[(n + 1, n)] = i;
    sy[(n, n + 1)] = -i;
    sz[(n, n)] = one;
    sz[(n + 1, n + 1)] = -one;
    let id = atom_identity();
    Ok(PseudoSpinTriple {
        sx: Operator::tensor(space, &id, &sx),
        sy: Operator::tensor(space, &id, &sy),
        sz: Operator::tensor(space, &id, &sz),
        pair_n: n,
    })
}

fn atom_paulis(space: SpaceSpec) -> [Operator; 3] {
    let id = DMatrix::identity(space.fock_dim(), space.fock_dim());
    [0, 1, 2].map(|k| Operator::tensor(space, &pauli(k), &id))
}

fn dot(ops: [&Operator; 3], v: [f64; 3]) -> Operator {
    let mut out = ops[0].scale(v[0]);
    out = &out + &ops[1].scale(v[1]);
    &out + &ops[2].scale(v[2])
}

/// The CHSH operator (σ·a)⊗(s·b) + (σ·a)⊗(s·b′) + (σ·a′)⊗(s·b) − (σ·a′)⊗(s·b′).
pub fn chsh_operator(space: SpaceSpec, settings: &MeasurementSettings, n: usize) -> Result<Operator> {
    let spin = pseudo_spin_pair(n, space)?;
    let atom = atom_paulis(space);
    let atom_refs = [&atom[0], &atom[1], &atom[2]];
    let a = dot(atom_refs, settings.a);
    let ap = dot(atom_refs, settings.a_prime);
    let b = dot(spin.components(), settings.b);
    let bp = dot(spin.components(), settings.b_prime);
    Ok(&(&a * &(&b + &bp)) + &(&ap * &(&b - &bp)))
}

pub fn chsh_expectation(state: &StateVector, settings: &MeasurementSettings, n: usize) -> Result<f64> {
    Ok(chsh_operator(state.space(), settings, n)?.expectation(state).re)
}

/// T_ij = ⟨σ_i ⊗ s_j⟩.
pub fn correlation_matrix(state: &StateVector, n: usize) -> Result<Matrix3<f64>> {
    let space = state.space();
    let spin = pseudo_spin_pair(n, space)?;
    let atom = atom_paulis(space);
    let comps = spin.components();
    Ok(Matrix3::from_fn(|i, j| (&atom[i] * comps[j]).expectation(state).re))
}

/// Maximum CHSH value over all settings: 2√(s₁² + s₂²) with s₁ ≥ s₂ the two
/// largest singular values of the correlation matrix.
pub fn chsh_max(state: &StateVector, n: usize) -> Result<f64> {
    let t = correlation_matrix(state, n)?;
    let mut s: Vec<f64> = t.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt())
}

/// 2√(1 + sin²2θ).
pub fn chsh_closed_form(theta: f64) -> f64 {
    2.0 * (1.0 + (2.0 * theta).sin().powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellResult {
    pub n: usize,
    pub theta: f64,
    pub chsh_paper: f64,
    pub chsh_closed_form: f64,
    pub chsh_max: f64,
    pub violated: bool,
}

/// CHSH value of |ψ_n^−⟩ at the angle-adapted settings for each n.
pub fn bell_scan(
    ns: &[usize],
    params: &JcmParams,
    space: SpaceSpec,
    exec: Execution,
) -> Result<Vec<BellResult>> {
    if ns.is_empty() {
        return Err(JcmError::EmptyRange);
    }
    exec.try_map(ns, |&n| {
        let pair = excited_pair(n, params, space)?;
        let mut settings = match paper_settings(pair.theta) {
            Ok(s) => s,
            Err(JcmError::Degenerate(_)) => limiting_settings(),
            Err(e) => return Err(e),
        };
        if params.g() < 0.0 {
            settings = settings.reflect_atom_xy();
        }
        let value = chsh_expectation(&pair.psi_minus, &settings, n)?;
        Ok(BellResult {
            n,
            theta: pair.theta,
            chsh_paper: value,
            chsh_closed_form: chsh_closed_form(pair.theta),
            chsh_max: chsh_max(&pair.psi_minus, n)?,
            violated: value > CLASSICAL_BOUND + 1e-12,
        })
    })
}

pub fn unit_norm(v: [f64; 3]) -> f64 {
    Vector3::from(v).norm()
}
