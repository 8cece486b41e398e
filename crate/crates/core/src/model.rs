//! The Jaynes-Cummings Hamiltonian, its conserved charge and the exact
//! charge-block decomposition used as the spectrum oracle.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{JcmError, Result};
use crate::operator::{elementary_operators, Atom, Operator, SpaceSpec, StateVector, C64};

/// Physical parameters: mode frequency ω, coupling g and half level
/// splitting Δ (the atomic splitting is 2Δ). The detuning δ = ω − 2Δ is
/// always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JcmParams {
    omega: f64,
    g: f64,
    #[serde(rename = "Delta")]
    half_splitting: f64,
}

impl JcmParams {
    pub fn new(omega: f64, g: f64, half_splitting: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(JcmError::InvalidParameter(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !g.is_finite() || !half_splitting.is_finite() {
            return Err(JcmError::InvalidParameter(
                "g and Delta must be finite".into(),
            ));
        }
        Ok(Self {
            omega,
            g,
            half_splitting,
        })
    }

    /// Build from ω, g and the detuning δ; Δ = (ω − δ)/2.
    pub fn from_detuning(omega: f64, g: f64, detuning: f64) -> Result<Self> {
        Self::new(omega, g, 0.5 * (omega - detuning))
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn half_splitting(&self) -> f64 {
        self.half_splitting
    }

    /// δ = ω − 2Δ.
    pub fn detuning(&self) -> f64 {
        self.omega - 2.0 * self.half_splitting
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..*self }
    }
}

/// States sharing one eigenvalue c − 1/2 of the conserved charge:
/// `members` lists |g,c⟩ then, for c ≥ 1, |e,c−1⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeBlock {
    pub c: usize,
    pub members: Vec<usize>,
}

impl ChargeBlock {
    pub fn charge_value(&self) -> f64 {
        self.c as f64 - 0.5
    }
}

/// H = ω(a†a + 1/2) + g(σ⁺a + σ⁻a†) + Δσ_z.
pub fn build_hamiltonian(params: &JcmParams, space: SpaceSpec) -> Operator {
    let e = elementary_operators(space);
    let number = &e.a_dag * &e.a;
    let field = (&number + &e.identity.scale(0.5)).scale(params.omega);
    let coupling =
        (&(&e.sigma_plus * &e.a) + &(&e.sigma_minus * &e.a_dag)).scale(params.g);
    let atom = e.sigma_z.scale(params.half_splitting);
    &(&field + &coupling) + &atom
}

/// C = a†a + σ_z/2.
pub fn build_charge(space: SpaceSpec) -> Operator {
    let diag = (0..space.dim()).map(|i| {
        let s = space.state(i);
        let half = match s.atom {
            Atom::Excited => 0.5,
            Atom::Ground => -0.5,
        };
        s.n as f64 + half
    });
    Operator::diagonal(space, diag)
}

/// Blocks c = 0..=N, sorted by c. The guard |e,N⟩ is left out.
pub fn block_decompose(space: SpaceSpec) -> Vec<ChargeBlock> {
    (0..=space.fock_cutoff())
        .map(|c| {
            let mut members = vec![space.index(Atom::Ground, c)];
            if c >= 1 {
                members.push(space.index(Atom::Excited, c - 1));
            }
            ChargeBlock { c, members }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SpectrumRow {
    pub energy: f64,
    pub state: StateVector,
    pub block: usize,
}

/// Eigenpairs obtained block by block, ascending within each block.
#[derive(Debug, Clone)]
pub struct NumericSpectrum {
    pub rows: Vec<SpectrumRow>,
}

impl NumericSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    pub fn block(&self, c: usize) -> Vec<&SpectrumRow> {
        self.rows.iter().filter(|r| r.block == c).collect()
    }
}

/// Diagonalizes each 1×1 or 2×2 charge block in closed form. Does not
/// touch the dense eigensolver.
pub fn numeric_spectrum(h: &Operator, blocks: &[ChargeBlock]) -> NumericSpectrum {
    let space = h.space();
    let mut rows = Vec::with_capacity(2 * blocks.len());
    for block in blocks {
        match block.members.as_slice() {
            &[i] => rows.push(SpectrumRow {
                energy: h.entry(i, i).re,
                state: StateVector::basis(space, i),
                block: block.c,
            }),
            &[i, j] => {
                for (energy, v) in two_level_eigenpairs(h.entry(i, i).re, h.entry(j, j).re, h.entry(i, j)) {
                    let mut amp = DVector::zeros(space.dim());
                    amp[i] = v[0];
                    amp[j] = v[1];
                    rows.push(SpectrumRow {
                        energy,
                        state: StateVector::from_amplitudes(space, amp)
                            .expect("block eigenvector is finite"),
                        block: block.c,
                    });
                }
            }
            other => panic!("charge block with {} members", other.len()),
        }
    }
    NumericSpectrum { rows }
}

/// Eigenpairs of [[a, b], [b*, d]], lower first.
fn two_level_eigenpairs(a: f64, d: f64, b: C64) -> [(f64, [C64; 2]); 2] {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let radius = half.hypot(b.norm());
    let mut out = [(mean - radius, [C64::new(0.0, 0.0); 2]), (mean + radius, [C64::new(0.0, 0.0); 2])];
    if radius == 0.0 {
        out[0].1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        out[1].1 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        return out;
    }
    for (lambda, vec) in out.iter_mut() {
        // (A − λ)v = 0: v ∝ (b, λ − a) or (λ − d, b*); take the better-conditioned one.
        let u1 = [b, C64::new(*lambda - a, 0.0)];
        let u2 = [C64::new(*lambda - d, 0.0), b.conj()];
        let n1 = (u1[0].norm_sqr() + u1[1].norm_sqr()).sqrt();
        let n2 = (u2[0].norm_sqr() + u2[1].norm_sqr()).sqrt();
        let (u, n) = if n1 >= n2 { (u1, n1) } else { (u2, n2) };
        *vec = [u[0] / n, u[1] / n];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::commutator;
    use approx::assert_abs_diff_eq;

    fn pstar() -> JcmParams {
        JcmParams::new(1.0, 0.2, 0.4).unwrap()
    }

    #[test]
    fn detuning_is_derived() {
        let p = pstar();
        assert_abs_diff_eq!(p.detuning(), 0.2, epsilon = 1e-15);
        let q = JcmParams::from_detuning(1.0, 0.2, 0.2).unwrap();
        assert_abs_diff_eq!(q.half_splitting(), 0.4, epsilon = 1e-15);
        assert!(JcmParams::new(0.0, 0.2, 0.4).is_err());
        assert!(JcmParams::new(1.0, f64::NAN, 0.4).is_err());
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let s = SpaceSpec::new(4).unwrap();
        let p = JcmParams::new(1.0, 0.0, 0.5).unwrap();
        let h = build_hamiltonian(&p, s);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                if i != j {
                    assert_eq!(h.entry(i, j), C64::new(0.0, 0.0));
                }
            }
            let st = s.state(i);
            let sign = if st.atom == Atom::Excited { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(h.entry(i, i).re, st.n as f64 + 0.5 + sign * 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn hamiltonian_matrix_elements() {
        let s = SpaceSpec::new(8).unwrap();
        let h = build_hamiltonian(&pstar(), s);
        let g0 = s.index(Atom::Ground, 0);
        assert_abs_diff_eq!(h.entry(g0, g0).re, 0.1, epsilon = 1e-15);
        let g2 = s.index(Atom::Ground, 2);
        let e1 = s.index(Atom::Excited, 1);
        assert_abs_diff_eq!(h.entry(g2, e1).re, 0.2 * 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(h.entry(e1, g2).re, 0.282_842_712_474_619, epsilon = 1e-15);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn charge_values_and_conservation() {
        let s = SpaceSpec::new(12).unwrap();
        let c = build_charge(s);
        assert_eq!(c.entry(s.index(Atom::Ground, 0), s.index(Atom::Ground, 0)).re, -0.5);
        assert_eq!(c.entry(s.index(Atom::Excited, 0), s.index(Atom::Excited, 0)).re, 0.5);
        let h = build_hamiltonian(&pstar(), s);
        assert_eq!(commutator(&h, &c).unwrap().frobenius_norm(), 0.0);
        for block in block_decompose(s) {
            for &i in &block.members {
                assert_eq!(c.entry(i, i).re, block.charge_value());
            }
        }
    }

    #[test]
    fn blocks_partition_the_space() {
        let s = SpaceSpec::new(2).unwrap();
        let blocks = block_decompose(s);
        let sizes: Vec<_> = blocks.iter().map(|b| b.members.len()).collect();
        assert_eq!(sizes, vec![1, 2, 2]);
        assert_eq!(sizes.iter().sum::<usize>() + 1, s.dim());
        let mut all: Vec<usize> = blocks.iter().flat_map(|b| b.members.clone()).collect();
        all.push(s.guard_index());
        all.sort();
        assert_eq!(all, (0..s.dim()).collect::<Vec<_>>());
    }

    #[test]
    fn hamiltonian_has_no_cross_block_elements() {
        let s = SpaceSpec::new(6).unwrap();
        let h = build_hamiltonian(&JcmParams::new(1.3, -0.7, 0.2).unwrap(), s);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                if s.charge_block_of(i) != s.charge_block_of(j) {
                    assert_eq!(h.entry(i, j), C64::new(0.0, 0.0), "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn block_oracle_values() {
        let s = SpaceSpec::new(8).unwrap();
        let h = build_hamiltonian(&pstar(), s);
        let spec = numeric_spectrum(&h, &block_decompose(s));
        let b2: Vec<f64> = spec.block(2).iter().map(|r| r.energy).collect();
        assert_abs_diff_eq!(b2[0], 1.7, epsilon = 1e-15);
        assert_abs_diff_eq!(b2[1], 2.3, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.block(0)[0].energy, 0.1, epsilon = 1e-16);
        for row in &spec.rows {
            let hv = h.apply(&row.state);
            let ev = row.state.scale_complex(C64::new(row.energy, 0.0));
            assert!(hv.distance(&ev) < 1e-14);
        }
    }

    #[test]
    fn decoupled_block_energies() {
        let s = SpaceSpec::new(5).unwrap();
        let p = JcmParams::new(1.0, 0.0, 0.3).unwrap();
        let spec = numeric_spectrum(&build_hamiltonian(&p, s), &block_decompose(s));
        for c in 1..=5 {
            let e: Vec<f64> = spec.block(c).iter().map(|r| r.energy).collect();
            // |g,c⟩ at c + 1/2 − Δ, |e,c−1⟩ at c − 1/2 + Δ
            let base = c as f64;
            assert_abs_diff_eq!(e[0], base - 0.2, epsilon = 1e-14);
            assert_abs_diff_eq!(e[1], base + 0.2, epsilon = 1e-14);
        }
    }
}
