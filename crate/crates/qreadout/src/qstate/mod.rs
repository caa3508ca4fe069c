//! Dense pure-state and density-matrix simulation core.
//!
//! Qubit ordering convention: **qubit 0 is the most significant bit** of the
//! amplitude index, so a basis index of an `n`-qubit state reads as the bit
//! string `q0 q1 ... q(n-1)`. All kernels, the QFT and the partial trace use
//! this convention.

mod gate;
mod observable;
mod qft;

pub use gate::{GateKind, GateOp};
pub use observable::{Observable, Pauli, PauliString};
pub use qft::{inverse_qft_gates, qft_gates};

pub(crate) use gate::apply_kind_raw;

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for the unit-norm invariant of [`PureState`].
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("qubit index {index} out of range for {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("gate targets must be distinct")]
    DuplicateTargets,
    #[error("{kind:?} gate carries the wrong number of angles")]
    AngleArity { kind: GateKind },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("keep set is empty")]
    EmptyKeepSet,
    #[error("duplicate qubit {0} in keep set")]
    DuplicateKeep(usize),
    #[error("amplitude vector length {len} is not a power of two")]
    BadAmplitudeLength { len: usize },
    #[error("state norm {norm} is not 1 within {NORM_TOL}")]
    NotNormalized { norm: f64 },
    #[error("registers must be disjoint, ordered and cover all {n_qubits} qubits")]
    BadRegisterLayout { n_qubits: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A named contiguous range of qubits inside a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.start..self.start + self.len
    }
}

/// Bit mask of qubit `q` in an `n`-qubit index (qubit 0 = MSB).
#[inline(always)]
pub(crate) fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Dense complex amplitude vector over an n-qubit register with named
/// sub-registers.
#[derive(Debug, Clone)]
pub struct PureState {
    amps: Vec<Complex64>,
    n_qubits: usize,
    registers: Vec<Register>,
}

/// Maximum supported register width. Dense vectors beyond this are rejected
/// rather than silently exhausting memory.
pub const MAX_QUBITS: usize = 24;

impl PureState {
    /// |0...0⟩ on `n` qubits, in a single register named `x`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::zero_with_registers(&[("x", n_qubits)]).expect("single register layout is valid")
    }

    /// |0...0⟩ with the given `(name, width)` register layout.
    pub fn zero_with_registers(layout: &[(&str, usize)]) -> Result<Self, StateError> {
        let n_qubits: usize = layout.iter().map(|(_, w)| w).sum();
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(StateError::BadRegisterLayout { n_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        let mut registers = Vec::with_capacity(layout.len());
        let mut start = 0;
        for (name, width) in layout {
            registers.push(Register {
                name: (*name).to_string(),
                start,
                len: *width,
            });
            start += width;
        }
        Ok(Self {
            amps,
            n_qubits,
            registers,
        })
    }

    /// Builds a state from normalized amplitudes, validating the unit-norm
    /// invariant and the register layout.
    pub fn from_amplitudes(
        amps: Vec<Complex64>,
        registers: Vec<Register>,
    ) -> Result<Self, StateError> {
        let len = amps.len();
        if !len.is_power_of_two() || len == 1 {
            return Err(StateError::BadAmplitudeLength { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(StateError::BadRegisterLayout { n_qubits });
        }
        let mut cursor = 0;
        for reg in &registers {
            if reg.start != cursor || reg.len == 0 {
                return Err(StateError::BadRegisterLayout { n_qubits });
            }
            cursor += reg.len;
        }
        if cursor != n_qubits {
            return Err(StateError::BadRegisterLayout { n_qubits });
        }
        let state = Self {
            amps,
            n_qubits,
            registers,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies a gate in place. Norm is preserved by unitarity.
    pub fn apply(&mut self, gate: &GateOp) -> Result<(), StateError> {
        gate.validate(self.n_qubits)?;
        let (q0, q1) = gate.target_pair();
        apply_kind_raw(
            &mut self.amps,
            self.n_qubits,
            gate.kind,
            q0,
            q1,
            gate.angle.unwrap_or(0.0),
        );
        Ok(())
    }

    /// Applies the quantum Fourier transform to the named register only.
    ///
    /// The circuit includes the final bit-reversal swaps so the register's
    /// sub-amplitudes transform exactly by the unitary DFT matrix with
    /// entries `ω^{jk}/√N`, `ω = exp(2πi/N)`.
    pub fn apply_qft(&mut self, register: &str) -> Result<(), StateError> {
        let reg = self
            .register(register)
            .ok_or_else(|| StateError::UnknownRegister(register.to_string()))?;
        let qubits: Vec<usize> = reg.qubits().collect();
        for gate in qft_gates(&qubits) {
            self.apply(&gate)?;
        }
        Ok(())
    }

    /// Inverse of [`PureState::apply_qft`] on the named register.
    pub fn apply_inverse_qft(&mut self, register: &str) -> Result<(), StateError> {
        let reg = self
            .register(register)
            .ok_or_else(|| StateError::UnknownRegister(register.to_string()))?;
        let qubits: Vec<usize> = reg.qubits().collect();
        for gate in inverse_qft_gates(&qubits) {
            self.apply(&gate)?;
        }
        Ok(())
    }

    /// Reduced density matrix over the kept qubits (ascending order: the
    /// smallest kept qubit index becomes the most significant bit of the
    /// reduced index).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState, StateError> {
        if keep.is_empty() {
            return Err(StateError::EmptyKeepSet);
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        for w in kept.windows(2) {
            if w[0] == w[1] {
                return Err(StateError::DuplicateKeep(w[0]));
            }
        }
        for &q in &kept {
            if q >= self.n_qubits {
                return Err(StateError::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let n = self.n_qubits;
        let discarded: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
        let k = kept.len();
        let kd = 1usize << k;

        // Precompute the placement of reduced / discarded sub-indices into
        // the full index.
        let spread = |qubits: &[usize], sub: usize| -> usize {
            let w = qubits.len();
            let mut full = 0usize;
            for (r, &q) in qubits.iter().enumerate() {
                let bit = (sub >> (w - 1 - r)) & 1;
                full |= bit << (n - 1 - q);
            }
            full
        };
        let keep_spread: Vec<usize> = (0..kd).map(|a| spread(&kept, a)).collect();
        let disc_dim = 1usize << discarded.len();
        let disc_spread: Vec<usize> = (0..disc_dim).map(|d| spread(&discarded, d)).collect();

        let mut rho = vec![Complex64::new(0.0, 0.0); kd * kd];
        for &dfull in &disc_spread {
            for (a, &afull) in keep_spread.iter().enumerate() {
                let va = self.amps[afull | dfull];
                if va.norm_sqr() == 0.0 {
                    continue;
                }
                let row = &mut rho[a * kd..(a + 1) * kd];
                for (b, &bfull) in keep_spread.iter().enumerate() {
                    row[b] += va * self.amps[bfull | dfull].conj();
                }
            }
        }
        Ok(MixedState {
            matrix: rho,
            m_qubits: k,
        })
    }

    /// ⟨ψ|O|ψ⟩. The imaginary residual of the raw sum is discarded; it is
    /// bounded by rounding error for Hermitian observables.
    pub fn expectation(&self, obs: &Observable) -> Result<f64, StateError> {
        obs.validate(self.n_qubits)?;
        let mut total = Complex64::new(0.0, 0.0);
        for (coeff, string) in obs.terms() {
            let action = string.compiled(self.n_qubits);
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, &amp) in self.amps.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                acc += self.amps[idx ^ action.flip_mask].conj() * action.phase(idx) * amp;
            }
            total += *coeff * acc;
        }
        debug_assert!(total.im.abs() <= 1e-10, "non-Hermitian expectation residual");
        Ok(total.re)
    }
}

/// Density matrix over `m` qubits, stored row-major.
#[derive(Debug, Clone)]
pub struct MixedState {
    matrix: Vec<Complex64>,
    m_qubits: usize,
}

impl MixedState {
    /// |ψ⟩⟨ψ| of a pure state.
    pub fn from_pure(state: &PureState) -> Self {
        let dim = state.dim();
        let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &a) in state.amplitudes().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, &b) in state.amplitudes().iter().enumerate() {
                matrix[i * dim + j] = a * b.conj();
            }
        }
        Self {
            matrix,
            m_qubits: state.n_qubits(),
        }
    }

    pub fn from_matrix(matrix: Vec<Complex64>, m_qubits: usize) -> Result<Self, StateError> {
        let dim = 1usize << m_qubits;
        if matrix.len() != dim * dim {
            return Err(StateError::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        Ok(Self { matrix, m_qubits })
    }

    pub fn m_qubits(&self) -> usize {
        self.m_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.m_qubits
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut [Complex64] {
        &mut self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[i * self.dim() + j]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.matrix[i * dim + i]).sum()
    }

    /// Largest entrywise deviation from ρ = ρ†.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let d = (self.matrix[i * dim + j] - self.matrix[j * dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Real eigenvalues sorted ascending (the matrix is Hermitian up to
    /// rounding).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let dim = self.dim();
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, &self.matrix);
        let mut vals: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Spectral decomposition ρ = Σ p |v⟩⟨v|, dropping weights below
    /// `cutoff`. Eigenvectors come out unit-norm; descending weight order.
    pub fn eigen_decomposition(&self, cutoff: f64) -> Vec<(f64, Vec<Complex64>)> {
        let dim = self.dim();
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, &self.matrix);
        let eig = m.symmetric_eigen();
        let mut parts: Vec<(f64, Vec<Complex64>)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > cutoff)
            .map(|(c, &p)| (p, eig.eigenvectors.column(c).iter().copied().collect()))
            .collect();
        parts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        parts
    }

    /// Tr(ρO). The imaginary residual is discarded as in
    /// [`PureState::expectation`].
    pub fn expectation(&self, obs: &Observable) -> Result<f64, StateError> {
        obs.validate(self.m_qubits)?;
        let dim = self.dim();
        let mut total = Complex64::new(0.0, 0.0);
        for (coeff, string) in obs.terms() {
            let action = string.compiled(self.m_qubits);
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                // Tr(ρO) = Σ_a c(a) ρ[a, a ⊕ flip]
                acc += action.phase(a) * self.matrix[a * dim + (a ^ action.flip_mask)];
            }
            total += *coeff * acc;
        }
        debug_assert!(total.im.abs() <= 1e-10, "non-Hermitian expectation residual");
        Ok(total.re)
    }

    /// Checks trace-1, Hermiticity and positive semidefiniteness within the
    /// given tolerances.
    pub fn validate_density(&self, trace_tol: f64, herm_tol: f64, psd_tol: f64) -> bool {
        (self.trace().re - 1.0).abs() <= trace_tol
            && self.trace().im.abs() <= trace_tol
            && self.hermiticity_error() <= herm_tol
            && self.min_eigenvalue() >= -psd_tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = PureState::zero(1);
        s.apply(&GateOp::h(0)).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn ry_pi_flips_zero() {
        let mut s = PureState::zero(1);
        s.apply(&GateOp::ry(0, PI)).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cnot_prepares_bell() {
        let mut s = PureState::zero(2);
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cnot(0, 1)).unwrap();
        // qubit 0 is the MSB: |00⟩ -> index 0, |11⟩ -> index 3
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[3].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[1].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[2].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gate_rejects_bad_targets() {
        let mut s = PureState::zero(2);
        assert!(matches!(
            s.apply(&GateOp::h(5)),
            Err(StateError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply(&GateOp::cnot(1, 1)),
            Err(StateError::DuplicateTargets)
        ));
    }

    #[test]
    fn gate_rejects_angle_mismatch() {
        let mut s = PureState::zero(1);
        let mut g = GateOp::h(0);
        g.angle = Some(0.3);
        assert!(matches!(s.apply(&g), Err(StateError::AngleArity { .. })));
        let mut g = GateOp::ry(0, 0.3);
        g.angle = None;
        assert!(matches!(s.apply(&g), Err(StateError::AngleArity { .. })));
    }

    #[test]
    fn qft_one_qubit_is_hadamard() {
        let mut s = PureState::zero(1);
        s.apply_qft("x").unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        let mut s = PureState::zero(4);
        s.apply_qft("x").unwrap();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn qft_unknown_register() {
        let mut s = PureState::zero(2);
        assert!(matches!(
            s.apply_qft("nope"),
            Err(StateError::UnknownRegister(_))
        ));
    }

    #[test]
    fn partial_trace_of_product_state() {
        // |0⟩ ⊗ |φ⟩ with φ = (0.6, 0.8); keep the φ qubit.
        let amps = vec![c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let s = PureState::from_amplitudes(
            amps,
            vec![Register {
                name: "x".into(),
                start: 0,
                len: 2,
            }],
        )
        .unwrap();
        let rho = s.partial_trace(&[1]).unwrap();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.36, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.entry(0, 1).re, 0.48, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.entry(1, 0).re, 0.48, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.entry(1, 1).re, 0.64, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let mut s = PureState::zero(2);
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cnot(0, 1)).unwrap();
        let rho = s.partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.entry(1, 1).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.entry(0, 1).norm(), 0.0, epsilon = 1e-12);
        assert!(rho.validate_density(1e-10, 1e-12, 1e-10));
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let s = PureState::zero(3);
        assert!(matches!(s.partial_trace(&[]), Err(StateError::EmptyKeepSet)));
        assert!(matches!(
            s.partial_trace(&[0, 0]),
            Err(StateError::DuplicateKeep(0))
        ));
        assert!(matches!(
            s.partial_trace(&[7]),
            Err(StateError::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn expectation_z_on_zero() {
        let s = PureState::zero(1);
        assert_abs_diff_eq!(s.expectation(&Observable::z(0)).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_x_on_plus() {
        let mut s = PureState::zero(1);
        s.apply(&GateOp::h(0)).unwrap();
        assert_abs_diff_eq!(s.expectation(&Observable::x(0)).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_rejects_out_of_range() {
        let s = PureState::zero(1);
        assert!(s.expectation(&Observable::z(3)).is_err());
    }

    #[test]
    fn mixed_expectation_matches_pure() {
        let mut s = PureState::zero(2);
        s.apply(&GateOp::ry(0, 0.7)).unwrap();
        s.apply(&GateOp::cnot(0, 1)).unwrap();
        let rho = MixedState::from_pure(&s);
        let obs = Observable::z(0);
        assert_abs_diff_eq!(
            rho.expectation(&obs).unwrap(),
            s.expectation(&obs).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn from_amplitudes_validates_norm() {
        let amps = vec![c(1.0, 0.0), c(1.0, 0.0)];
        let reg = vec![Register {
            name: "x".into(),
            start: 0,
            len: 1,
        }];
        assert!(matches!(
            PureState::from_amplitudes(amps, reg),
            Err(StateError::NotNormalized { .. })
        ));
    }
}
