//! Batch evaluation over randomized parameter draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ladder::{build_shift_pair, lambda3, lambda4, ladder_residuals};
use crate::model::{block_decompose, build_hamiltonian, numeric_spectrum, JcmParams};
use crate::operator::{hermitian_eig, SpaceSpec};
use crate::par::Execution;
use crate::report::ResidualReport;
use crate::spectrum::{analytic_spectrum, dressed_energies, ground_state};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawRanges {
    pub omega: (f64, f64),
    pub g: (f64, f64),
    pub half_splitting: (f64, f64),
}

impl Default for DrawRanges {
    fn default() -> Self {
        Self {
            omega: (0.5, 2.0),
            g: (-1.0, 1.0),
            half_splitting: (-1.0, 1.0),
        }
    }
}

/// Reproducible uniform draws from `ranges`.
pub fn draw_params(seed: u64, count: usize, ranges: &DrawRanges) -> Vec<JcmParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let omega = rng.random_range(ranges.omega.0..=ranges.omega.1);
            let g = rng.random_range(ranges.g.0..=ranges.g.1);
            let half = rng.random_range(ranges.half_splitting.0..=ranges.half_splitting.1);
            JcmParams::new(omega, g, half).expect("draw ranges give valid parameters")
        })
        .collect()
}

/// |a − b| / max(1, |a|, |b|).
pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn max_sorted_difference(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra differ in size");
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| relative_difference(*x, *y))
        .fold(0.0, f64::max)
}

/// Agreement of the closed-form spectrum with both numeric routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumAgreement {
    pub params: JcmParams,
    /// Closed forms vs the per-block 2×2 oracle.
    pub block_oracle: f64,
    /// Closed forms vs Jacobi diagonalization of the full H (guard removed).
    pub dense: f64,
    /// |E₀ − ⟨g,0|H|g,0⟩|.
    pub ground: f64,
    /// max over n of λ₄(E_n^−) vs E_n^+ and λ₃(E_n^+) vs E_n^−.
    pub energy_mapping: f64,
}

pub fn spectrum_agreement(params: &JcmParams, space: SpaceSpec) -> Result<SpectrumAgreement> {
    let h = build_hamiltonian(params, space);
    let blocks = block_decompose(space);
    let oracle = numeric_spectrum(&h, &blocks);
    let analytic = analytic_spectrum(params, space);

    let eig = hermitian_eig(&h)?;
    let guard = eig.guard_mask();
    let dense: Vec<f64> = eig
        .values
        .iter()
        .zip(&guard)
        .filter(|(_, &g)| !g)
        .map(|(&e, _)| e)
        .collect();

    let c0 = oracle.block(0)[0].energy;
    let ground = (ground_state(params, space).energy - c0).abs();

    let energy_mapping = (0..space.fock_cutoff())
        .map(|n| {
            let (lo, hi) = dressed_energies(n, params);
            relative_difference(lambda4(lo, params), hi).max(relative_difference(lambda3(hi, params), lo))
        })
        .fold(0.0, f64::max);

    Ok(SpectrumAgreement {
        params: *params,
        block_oracle: max_sorted_difference(analytic.clone(), oracle.energies()),
        dense: max_sorted_difference(analytic, dense),
        ground,
        energy_mapping,
    })
}

pub fn spectrum_sweep(
    draws: &[JcmParams],
    space: SpaceSpec,
    exec: Execution,
) -> Result<Vec<SpectrumAgreement>> {
    exec.try_map(draws, |p| spectrum_agreement(p, space))
}

/// Shift-operator construction and ladder residuals for every draw.
pub fn ladder_sweep(
    draws: &[JcmParams],
    space: SpaceSpec,
    beta: f64,
    exec: Execution,
) -> Result<Vec<ResidualReport>> {
    exec.try_map(draws, |p| {
        let h = build_hamiltonian(p, space);
        let pair = build_shift_pair(&h, p, beta)?;
        ladder_residuals(&h, &pair)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_in_range() {
        let r = DrawRanges::default();
        let a = draw_params(7, 50, &r);
        let b = draw_params(7, 50, &r);
        assert_eq!(a, b);
        for p in &a {
            assert!((0.5..=2.0).contains(&p.omega()));
            assert!((-1.0..=1.0).contains(&p.g()));
            assert!((-1.0..=1.0).contains(&p.half_splitting()));
        }
        assert_ne!(a, draw_params(8, 50, &r));
    }

    #[test]
    fn sweep_modes_agree() {
        let draws = draw_params(1, 12, &DrawRanges::default());
        let space = SpaceSpec::new(6).unwrap();
        let seq = spectrum_sweep(&draws, space, Execution::Sequential).unwrap();
        let par = spectrum_sweep(&draws, space, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        for a in &seq {
            assert!(a.block_oracle <= 1e-12 && a.dense <= 1e-12, "{a:?}");
        }
    }

    #[test]
    fn relative_difference_floors_at_unit_scale() {
        assert_eq!(relative_difference(1e-20, 0.0), 1e-20);
        assert_eq!(relative_difference(200.0, 100.0), 0.5);
    }
}
