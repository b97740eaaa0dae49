//! Two-qubit X-states and their exact evolution under collective dephasing
//! with an arbitrary pulse schedule.
//!
//! The collective coupling `σ_z^(1) + σ_z^(2)` annihilates |01⟩ and |10⟩, so
//! the inner coherence ⟨01|ρ|10⟩ lives in a decoherence-free subspace and
//! never decays; populations are constants of the motion (pulses permute
//! them); only the outer coherence ⟨00|ρ|11⟩ picks up the factor `e^{-Γ(t)}`.
//!
//! Evolution is always computed from t = 0 with the full applied schedule via
//! the filter function — never by caching intermediate states — because the
//! bath keeps phase memory across pulse segments.

use crate::bath::{decoherence_exponent, BathSpec, PulseSchedule, QuadratureSpec};
use crate::error::{Error, Result};
use nalgebra::Matrix4;
use num_complex::Complex64;

/// Trace and positivity slack for X-state validation.
const X_STATE_TOL: f64 = 1e-12;

/// Two-qubit X-state in the basis {|00⟩, |01⟩, |10⟩, |11⟩}: four populations
/// plus the two anti-diagonal coherences. Closed under collective dephasing
/// and simultaneous spin flips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitXState {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    /// ⟨00|ρ|11⟩
    pub c_outer: Complex64,
    /// ⟨01|ρ|10⟩
    pub c_inner: Complex64,
}

impl TwoQubitXState {
    pub fn new(
        p00: f64,
        p01: f64,
        p10: f64,
        p11: f64,
        c_outer: Complex64,
        c_inner: Complex64,
    ) -> Result<Self> {
        let state = Self {
            p00,
            p01,
            p10,
            p11,
            c_outer,
            c_inner,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn trace(&self) -> f64 {
        self.p00 + self.p01 + self.p10 + self.p11
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p00", self.p00),
            ("p01", self.p01),
            ("p10", self.p10),
            ("p11", self.p11),
        ] {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::Domain(format!(
                    "population {name} must be nonnegative, got {p}"
                )));
            }
        }
        if (self.trace() - 1.0).abs() > X_STATE_TOL {
            return Err(Error::Domain(format!(
                "populations must sum to 1 within {X_STATE_TOL:.0e}, got {}",
                self.trace()
            )));
        }
        let outer_cap = (self.p00 * self.p11).sqrt();
        if self.c_outer.norm() > outer_cap * (1.0 + X_STATE_TOL) + X_STATE_TOL {
            return Err(Error::Domain(format!(
                "|c_outer| = {} exceeds sqrt(p00 p11) = {outer_cap}",
                self.c_outer.norm()
            )));
        }
        let inner_cap = (self.p01 * self.p10).sqrt();
        if self.c_inner.norm() > inner_cap * (1.0 + X_STATE_TOL) + X_STATE_TOL {
            return Err(Error::Domain(format!(
                "|c_inner| = {} exceeds sqrt(p01 p10) = {inner_cap}",
                self.c_inner.norm()
            )));
        }
        Ok(())
    }

    /// The full 4×4 density matrix.
    pub fn to_density_matrix(&self) -> Matrix4<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        Matrix4::new(
            re(self.p00),
            z,
            z,
            self.c_outer,
            z,
            re(self.p01),
            self.c_inner,
            z,
            z,
            self.c_inner.conj(),
            re(self.p10),
            z,
            self.c_outer.conj(),
            z,
            z,
            re(self.p11),
        )
    }

    /// Reads an X-state back from a 4×4 density matrix, rejecting matrices
    /// with off-X structure above `tol`.
    pub fn from_density_matrix(rho: &Matrix4<Complex64>, tol: f64) -> Result<Self> {
        let x_mask = [
            [true, false, false, true],
            [false, true, true, false],
            [false, true, true, false],
            [true, false, false, true],
        ];
        for i in 0..4 {
            for j in 0..4 {
                if !x_mask[i][j] && rho[(i, j)].norm() > tol {
                    return Err(Error::Domain(format!(
                        "matrix element ({i}, {j}) = {} is not X-form within {tol:.0e}",
                        rho[(i, j)]
                    )));
                }
            }
            if rho[(i, i)].im.abs() > tol {
                return Err(Error::Domain(format!(
                    "diagonal element {i} has imaginary part {}",
                    rho[(i, i)].im
                )));
            }
        }
        if (rho[(0, 3)] - rho[(3, 0)].conj()).norm() > tol
            || (rho[(1, 2)] - rho[(2, 1)].conj()).norm() > tol
        {
            return Err(Error::Domain("matrix is not Hermitian on the anti-diagonal".into()));
        }
        Self::new(
            rho[(0, 0)].re,
            rho[(1, 1)].re,
            rho[(2, 2)].re,
            rho[(3, 3)].re,
            rho[(0, 3)],
            rho[(1, 2)],
        )
    }
}

/// Maximally entangled initial state `(|00⟩ + |11⟩)/√2`.
pub fn initial_state_bell() -> TwoQubitXState {
    TwoQubitXState {
        p00: 0.5,
        p01: 0.0,
        p10: 0.0,
        p11: 0.5,
        c_outer: Complex64::new(0.5, 0.0),
        c_inner: Complex64::new(0.0, 0.0),
    }
}

/// Partially entangled mixed state `0.3 (|00⟩+|11⟩)(⟨00|+⟨11|) +
/// 0.2 (|01⟩⟨01| + |10⟩⟨10|)`, whose free evolution shows entanglement
/// sudden death.
pub fn initial_state_mixed() -> TwoQubitXState {
    TwoQubitXState {
        p00: 0.3,
        p01: 0.2,
        p10: 0.2,
        p11: 0.3,
        c_outer: Complex64::new(0.3, 0.0),
        c_inner: Complex64::new(0.0, 0.0),
    }
}

/// A complete evolution problem: initial state, bath, pulse schedule, time
/// horizon, quadrature settings, and the qubit frequency ω₀ (which enters
/// only pulse phases and cancels from every observable).
#[derive(Debug, Clone)]
pub struct EvolutionScenario {
    pub initial: TwoQubitXState,
    pub bath: BathSpec,
    pub schedule: PulseSchedule,
    pub horizon: f64,
    pub quad: QuadratureSpec,
    pub omega0: f64,
}

impl EvolutionScenario {
    pub fn new(
        initial: TwoQubitXState,
        bath: BathSpec,
        schedule: PulseSchedule,
        horizon: f64,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        initial.validate()?;
        bath.validate()?;
        quad.validate()?;
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        schedule.ensure_within(horizon)?;
        Ok(Self {
            initial,
            bath,
            schedule,
            horizon,
            quad,
            omega0: 1.0,
        })
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }
}

/// Applies the state map of collective dephasing for a known exponent Γ:
/// populations permuted once per pulse (p00 ↔ p11, p01 ↔ p10), coherences
/// conjugated with the pulse phase `e^{4iω₀t_p}` (outer) per flip, and the
/// outer coherence scaled by `e^{-Γ}`.
///
/// Pure state bookkeeping — Γ itself must come from the full applied
/// schedule (continuum quadrature or a discrete-mode sum).
pub fn apply_collective_dephasing(
    initial: &TwoQubitXState,
    applied: &PulseSchedule,
    gamma: f64,
    omega0: f64,
) -> TwoQubitXState {
    let mut c_outer = initial.c_outer;
    let mut c_inner = initial.c_inner;
    for &t_p in applied.times() {
        c_outer = Complex64::from_polar(1.0, 4.0 * omega0 * t_p) * c_outer.conj();
        c_inner = c_inner.conj();
    }
    c_outer *= (-gamma).exp();

    let odd = applied.len() % 2 == 1;
    let (p00, p01, p10, p11) = if odd {
        (initial.p11, initial.p10, initial.p01, initial.p00)
    } else {
        (initial.p00, initial.p01, initial.p10, initial.p11)
    };
    TwoQubitXState {
        p00,
        p01,
        p10,
        p11,
        c_outer,
        c_inner,
    }
}

/// Exact reduced state at time `t ∈ [0, horizon]`. Pulses scheduled at or
/// after `t` have not fired and are ignored.
pub fn evolve(scenario: &EvolutionScenario, t: f64) -> Result<TwoQubitXState> {
    if t < 0.0 || t > scenario.horizon || !t.is_finite() {
        return Err(Error::Precondition(format!(
            "evolution time {t} outside [0, {}]",
            scenario.horizon
        )));
    }
    if t == 0.0 {
        return Ok(scenario.initial);
    }
    let applied = scenario.schedule.applied_before(t);
    let gamma = decoherence_exponent(&scenario.bath, t, &applied, &scenario.quad)?;
    Ok(apply_collective_dephasing(
        &scenario.initial,
        &applied,
        gamma,
        scenario.omega0,
    ))
}
