//! Dense complex operators on the truncated qubit ⊗ Fock space.
//!
//! Basis layout is atom-major: index = slot·(N+1) + n, with slot 0 the
//! excited atomic level |e⟩ (upper spinor component) and slot 1 the ground
//! level |g⟩. The single state |e, N⟩ is the truncation guard: its partner
//! |g, N+1⟩ in the conserved-charge block lies outside the space.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{JcmError, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative tolerance used by the Hermiticity precondition.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Atomic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Excited,
    Ground,
}

impl Atom {
    fn slot(self) -> usize {
        match self {
            Atom::Excited => 0,
            Atom::Ground => 1,
        }
    }

    pub fn label(self) -> char {
        match self {
            Atom::Excited => 'e',
            Atom::Ground => 'g',
        }
    }
}

/// A product basis state |atom, n⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub atom: Atom,
    pub n: usize,
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.atom.label(), self.n)
    }
}

/// Truncated qubit ⊗ Fock space with photon numbers 0..=fock_cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    fock_cutoff: usize,
}

impl SpaceSpec {
    pub fn new(fock_cutoff: usize) -> Result<Self> {
        if fock_cutoff == 0 {
            return Err(JcmError::InvalidParameter(
                "fock cutoff must be at least 1".into(),
            ));
        }
        Ok(Self { fock_cutoff })
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_dim()
    }

    /// Basis index of |atom, n⟩. Panics if `n` exceeds the cutoff.
    pub fn index(&self, atom: Atom, n: usize) -> usize {
        assert!(n <= self.fock_cutoff, "photon number {n} above cutoff");
        atom.slot() * self.fock_dim() + n
    }

    pub fn state(&self, index: usize) -> BasisState {
        assert!(index < self.dim(), "basis index {index} out of range");
        let atom = if index < self.fock_dim() {
            Atom::Excited
        } else {
            Atom::Ground
        };
        BasisState {
            atom,
            n: index % self.fock_dim(),
        }
    }

    /// Index of |e, N⟩.
    pub fn guard_index(&self) -> usize {
        self.index(Atom::Excited, self.fock_cutoff)
    }

    pub fn guard_states(&self) -> [usize; 1] {
        [self.guard_index()]
    }

    /// Conserved-charge block label c of a basis state (|g,c⟩ and |e,c−1⟩
    /// share block c). The guard state belongs to no complete block.
    pub fn charge_block_of(&self, index: usize) -> Option<usize> {
        if index == self.guard_index() {
            return None;
        }
        let s = self.state(index);
        Some(match s.atom {
            Atom::Ground => s.n,
            Atom::Excited => s.n + 1,
        })
    }

    fn check_same(&self, other: &SpaceSpec) -> Result<()> {
        if self != other {
            return Err(JcmError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// A dense operator on a [`SpaceSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: SpaceSpec,
    entries: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(space: SpaceSpec, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != space.dim() || entries.ncols() != space.dim() {
            return Err(JcmError::DimensionMismatch {
                left: space.dim(),
                right: entries.nrows().max(entries.ncols()),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(JcmError::InvalidParameter(
                "operator entries must be finite".into(),
            ));
        }
        Ok(Self { space, entries })
    }

    pub fn zeros(space: SpaceSpec) -> Self {
        Self {
            space,
            entries: DMatrix::zeros(space.dim(), space.dim()),
        }
    }

    pub fn identity(space: SpaceSpec) -> Self {
        Self {
            space,
            entries: DMatrix::identity(space.dim(), space.dim()),
        }
    }

    /// Real diagonal operator.
    pub fn diagonal(space: SpaceSpec, diag: impl IntoIterator<Item = f64>) -> Self {
        let d: Vec<C64> = diag.into_iter().map(|x| C64::new(x, 0.0)).collect();
        assert_eq!(d.len(), space.dim());
        Self {
            space,
            entries: DMatrix::from_diagonal(&DVector::from_vec(d)),
        }
    }

    /// atom ⊗ fock, with `atom` 2×2 in (e, g) order.
    pub fn tensor(space: SpaceSpec, atom: &DMatrix<C64>, fock: &DMatrix<C64>) -> Self {
        assert_eq!(atom.shape(), (2, 2));
        assert_eq!(fock.shape(), (space.fock_dim(), space.fock_dim()));
        Self {
            space,
            entries: atom.kronecker(fock),
        }
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            space: self.space,
            entries: self.entries.map(|z| z * factor),
        }
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            space: self.space,
            entries: self.entries.map(|z| z * factor),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Copy with the guard row and column zeroed.
    pub fn without_guard(&self) -> Self {
        let g = self.space.guard_index();
        let mut entries = self.entries.clone();
        entries.row_mut(g).fill(ZERO);
        entries.column_mut(g).fill(ZERO);
        Self {
            space: self.space,
            entries,
        }
    }

    /// Restriction to the listed basis indices, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
            self.entries[(indices[i], indices[j])]
        })
    }

    pub fn hermitian_deviation(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * self.max_abs()
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.space, state.space, "space mismatch in apply");
        StateVector {
            space: self.space,
            amplitudes: &self.entries * &state.amplitudes,
        }
    }

    /// ⟨ψ|A|ψ⟩.
    pub fn expectation(&self, state: &StateVector) -> C64 {
        state.inner(&self.apply(state))
    }

    pub fn try_add(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check_same(&rhs.space)?;
        Ok(self + rhs)
    }

    pub fn try_mul(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check_same(&rhs.space)?;
        Ok(self * rhs)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "space mismatch in add");
        Operator {
            space: self.space,
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "space mismatch in sub");
        Operator {
            space: self.space,
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "space mismatch in mul");
        Operator {
            space: self.space,
            entries: &self.entries * &rhs.entries,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

/// A column vector of amplitudes on a [`SpaceSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceSpec,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn from_amplitudes(space: SpaceSpec, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(JcmError::DimensionMismatch {
                left: space.dim(),
                right: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(JcmError::InvalidParameter(
                "state amplitudes must be finite".into(),
            ));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn basis(space: SpaceSpec, index: usize) -> Self {
        let mut amplitudes = DVector::zeros(space.dim());
        amplitudes[index] = ONE;
        Self { space, amplitudes }
    }

    /// Real superposition of basis states.
    pub fn from_real_components(space: SpaceSpec, components: &[(usize, f64)]) -> Self {
        let mut amplitudes = DVector::zeros(space.dim());
        for &(i, x) in components {
            amplitudes[i] += C64::new(x, 0.0);
        }
        Self { space, amplitudes }
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            space: self.space,
            amplitudes: self.amplitudes.map(|z| z / n),
        }
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            space: self.space,
            amplitudes: self.amplitudes.map(|z| z * factor),
        }
    }

    /// ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.space, other.space, "space mismatch in inner product");
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.amplitudes - &other.amplitudes)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// The elementary operators a, a†, σ⁺, σ⁻, σ_z and the identity.
#[derive(Debug, Clone)]
pub struct Elementary {
    pub a: Operator,
    pub a_dag: Operator,
    pub sigma_plus: Operator,
    pub sigma_minus: Operator,
    pub sigma_z: Operator,
    pub identity: Operator,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub(crate) fn atom_identity() -> DMatrix<C64> {
    DMatrix::identity(2, 2)
}

pub(crate) fn pauli(axis: usize) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    match axis {
        0 => DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        1 => DMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        2 => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("Pauli axis must be 0, 1 or 2"),
    }
}

fn annihilation(fock_dim: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(fock_dim, fock_dim);
    for n in 1..fock_dim {
        a[(n - 1, n)] = real((n as f64).sqrt());
    }
    a
}

pub fn elementary_operators(space: SpaceSpec) -> Elementary {
    let fd = space.fock_dim();
    let id_f = DMatrix::<C64>::identity(fd, fd);
    let id_a = atom_identity();
    let a_f = annihilation(fd);
    // σ⁺ = |e⟩⟨g|
    let sp = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let a = Operator::tensor(space, &id_a, &a_f);
    Elementary {
        a_dag: a.adjoint(),
        a,
        sigma_minus: Operator::tensor(space, &sp.adjoint(), &id_f),
        sigma_plus: Operator::tensor(space, &sp, &id_f),
        sigma_z: Operator::tensor(space, &pauli(2), &id_f),
        identity: Operator::identity(space),
    }
}

/// AB − BA.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.space.check_same(&b.space)?;
    Ok(&(a * b) - &(b * a))
}

/// Spectral decomposition A = V·diag(values)·V† with ascending values.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl Eigen {
    pub fn space(&self) -> SpaceSpec {
        self.vectors.space
    }

    pub fn vector(&self, k: usize) -> StateVector {
        StateVector {
            space: self.vectors.space,
            amplitudes: self.vectors.entries.column(k).into_owned(),
        }
    }

    /// V·diag(f(λ))·V†. Fails on the first eigenvalue where f is not finite.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<Operator> {
        self.apply_where(f, |_| true)
    }

    /// As [`Eigen::apply`], but only eigenpairs with `keep(k)` contribute;
    /// the rest are mapped to zero and `f` is not evaluated on them.
    pub fn apply_where(
        &self,
        f: impl Fn(f64) -> f64,
        keep: impl Fn(usize) -> bool,
    ) -> Result<Operator> {
        let mut weights = Vec::with_capacity(self.values.len());
        for (k, &lambda) in self.values.iter().enumerate() {
            if !keep(k) {
                weights.push(0.0);
                continue;
            }
            let w = f(lambda);
            if !w.is_finite() {
                return Err(JcmError::FunctionDomain {
                    eigenvalue: lambda,
                    value: w,
                });
            }
            weights.push(w);
        }
        Ok(self.synthesize(&weights))
    }

    pub(crate) fn synthesize(&self, weights: &[f64]) -> Operator {
        let v = &self.vectors.entries;
        let mut scaled = v.clone();
        for (k, &w) in weights.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w);
        }
        let m = &scaled * v.adjoint();
        let herm = (&m + m.adjoint()).map(|z| z * 0.5);
        Operator {
            space: self.vectors.space,
            entries: herm,
        }
    }

    /// Eigenvector indices supported on the guard state.
    pub fn guard_mask(&self) -> Vec<bool> {
        let g = self.space().guard_index();
        (0..self.values.len())
            .map(|k| self.vectors.entries[(g, k)].norm() > 0.5)
            .collect()
    }

    /// Charge block of eigenvector `k`, read off its first supported basis
    /// state. Meaningful when the decomposed operator commutes exactly with
    /// the charge, which the Jacobi solver preserves.
    pub fn block_of(&self, k: usize) -> Option<usize> {
        let col = self.vectors.entries.column(k);
        let (idx, _) = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
        self.space().charge_block_of(idx)
    }
}

const MAX_SWEEPS: usize = 64;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Rotations only touch pairs with a nonzero off-diagonal entry, so exact
/// zeros of a block-diagonal input survive into the eigenvectors.
pub fn hermitian_eig(op: &Operator) -> Result<Eigen> {
    let tolerance = HERMITIAN_TOLERANCE * op.max_abs();
    let deviation = op.hermitian_deviation();
    if deviation > tolerance {
        return Err(JcmError::NonHermitian {
            deviation,
            tolerance,
        });
    }
    let n = op.space.dim();
    let mut a = op.entries.clone();
    for i in 0..n {
        a[(i, i)] = real(a[(i, i)].re);
    }
    let mut v = DMatrix::<C64>::identity(n, n);
    let scale = op.frobenius_norm();

    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off == 0.0 || off <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if sweep > 3 && app.abs() + 100.0 * r == app.abs() && aqq.abs() + 100.0 * r == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, r, app, aqq);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigen {
        values,
        vectors: Operator {
            space: op.space,
            entries: vectors,
        },
    })
}

fn off_diagonal_norm(a: &DMatrix<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// Unitary W = diag(1, e^{-iφ})·[[c, s], [-s, c]] acting on columns p, q;
// A ← W†AW, V ← VW.
#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut DMatrix<C64>,
    v: &mut DMatrix<C64>,
    p: usize,
    q: usize,
    apq: C64,
    r: f64,
    app: f64,
    aqq: f64,
) {
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let wpp = real(c);
    let wpq = real(s);
    let wqp = -phase.conj() * s;
    let wqq = phase.conj() * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * wpp + akq * wqp;
        a[(k, q)] = akp * wpq + akq * wqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = wpp.conj() * apk + wqp.conj() * aqk;
        a[(q, k)] = wpq.conj() * apk + wqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = real(a[(p, p)].re);
    a[(q, q)] = real(a[(q, q)].re);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * wpp + vkq * wqp;
        v[(k, q)] = vkp * wpq + vkq * wqq;
    }
}

/// f(A) for Hermitian A through its eigendecomposition.
pub fn operator_function(op: &Operator, f: impl Fn(f64) -> f64) -> Result<Operator> {
    hermitian_eig(op)?.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn space(n: usize) -> SpaceSpec {
        SpaceSpec::new(n).unwrap()
    }

    fn assert_op_close(a: &Operator, b: &Operator, tol: f64) {
        let d = (a - b).max_abs();
        assert!(d <= tol, "max deviation {d:e} > {tol:e}");
    }

    #[test]
    fn space_layout_and_guard() {
        let s = space(3);
        assert_eq!(s.dim(), 8);
        assert_eq!(s.guard_states(), [3]);
        assert_eq!(s.index(Atom::Ground, 0), 4);
        for i in 0..s.dim() {
            let b = s.state(i);
            assert_eq!(s.index(b.atom, b.n), i);
        }
        assert_eq!(s.charge_block_of(s.index(Atom::Ground, 2)), Some(2));
        assert_eq!(s.charge_block_of(s.index(Atom::Excited, 1)), Some(2));
        assert_eq!(s.charge_block_of(s.guard_index()), None);
        assert!(SpaceSpec::new(0).is_err());
    }

    #[test]
    fn truncated_boson_commutator() {
        let s = space(1);
        let e = elementary_operators(s);
        let c = commutator(&e.a, &e.a_dag).unwrap();
        // diag(1, -1) on the Fock factor, for each atomic level
        let expect = Operator::diagonal(s, [1.0, -1.0, 1.0, -1.0]);
        assert_eq!(c, expect);
    }

    #[test]
    fn pauli_algebra() {
        let s = space(4);
        let e = elementary_operators(s);
        let anti = &(&e.sigma_plus * &e.sigma_minus) + &(&e.sigma_minus * &e.sigma_plus);
        assert_eq!(anti, e.identity);
        assert_eq!(commutator(&e.sigma_plus, &e.sigma_minus).unwrap(), e.sigma_z);
        let ze = commutator(&e.sigma_plus, &e.sigma_z).unwrap();
        assert_eq!(ze, e.sigma_plus.scale(-2.0));
    }

    #[test]
    fn identity_commutes() {
        let s = space(3);
        let e = elementary_operators(s);
        assert_eq!(commutator(&e.identity, &e.a).unwrap(), Operator::zeros(s));
    }

    #[test]
    fn commutator_rejects_mismatch() {
        let a = Operator::identity(space(2));
        let b = Operator::identity(space(3));
        assert!(matches!(
            commutator(&a, &b),
            Err(JcmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eig_of_diagonal() {
        let s = space(1);
        let op = Operator::diagonal(s, [3.0, 1.0, 2.0, 0.5]);
        let eig = hermitian_eig(&op).unwrap();
        assert_eq!(eig.values, vec![0.5, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_of_sigma_x() {
        let s = space(1);
        let e = elementary_operators(s);
        let sx = &e.sigma_plus + &e.sigma_minus;
        let eig = hermitian_eig(&sx).unwrap();
        for (i, expect) in [-1.0, -1.0, 1.0, 1.0].iter().enumerate() {
            assert_abs_diff_eq!(eig.values[i], expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let s = space(1);
        let e = elementary_operators(s);
        assert!(matches!(
            hermitian_eig(&e.a),
            Err(JcmError::NonHermitian { .. })
        ));
    }

    #[test]
    fn eig_of_complex_hermitian_reconstructs() {
        let s = space(2);
        let e = elementary_operators(s);
        let i = C64::new(0.0, 1.0);
        let y = &e.a.scale_complex(-i) + &e.a_dag.scale_complex(i);
        let op = &(&y + &e.sigma_z.scale(0.3)) + &(&e.sigma_plus + &e.sigma_minus).scale(0.7);
        let eig = hermitian_eig(&op).unwrap();
        let back = eig.apply(|x| x).unwrap();
        assert_op_close(&back, &op, 1e-13);
        let vv = &eig.vectors.adjoint() * &eig.vectors;
        assert_op_close(&vv, &Operator::identity(s), 1e-13);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn function_identity_and_constant() {
        let s = space(3);
        let e = elementary_operators(s);
        let op = &(&e.a + &e.a_dag) + &e.sigma_z;
        assert_op_close(&operator_function(&op, |x| x).unwrap(), &op, 1e-13);
        assert_op_close(
            &operator_function(&op, |_| 1.0).unwrap(),
            &Operator::identity(s),
            1e-13,
        );
    }

    #[test]
    fn function_domain_error_names_eigenvalue() {
        let s = space(1);
        let op = Operator::diagonal(s, [1.0, -2.0, 3.0, 4.0]);
        match operator_function(&op, f64::sqrt) {
            Err(JcmError::FunctionDomain { eigenvalue, .. }) => assert_eq!(eigenvalue, -2.0),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_preserves_exact_zeros() {
        let s = space(2);
        let e = elementary_operators(s);
        // block diagonal in the charge: σ⁺a + σ⁻a† plus diagonal terms
        let op = &(&(&e.sigma_plus * &e.a) + &(&e.sigma_minus * &e.a_dag)).scale(0.3)
            + &(&(&e.a_dag * &e.a) + &e.sigma_z.scale(0.4));
        let eig = hermitian_eig(&op).unwrap();
        for k in 0..s.dim() {
            let v = eig.vector(k);
            let blocks: std::collections::BTreeSet<_> = (0..s.dim())
                .filter(|&i| v.amplitude(i) != C64::new(0.0, 0.0))
                .map(|i| s.charge_block_of(i))
                .collect();
            assert_eq!(blocks.len(), 1, "eigenvector {k} spans blocks {blocks:?}");
        }
    }
}
