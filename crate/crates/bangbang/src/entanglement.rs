//! Concurrence, entanglement-sudden-death detection, and revival analysis.
//!
//! Two routes to the concurrence are kept deliberately independent: the
//! X-state fast path (closed form in the populations and anti-diagonal
//! coherences) and the general Wootters eigenvalue construction on the full
//! 4×4 density matrix. They must agree on every valid X-state.

use crate::dynamics::{evolve, EvolutionScenario, TwoQubitXState};
use crate::error::{Error, Result};
use crate::numeric::bisect;
use nalgebra::Matrix4;
use num_complex::Complex64;

/// Absolute time tolerance for root-finding on concurrence zeros.
const ESD_TIME_TOL: f64 = 1e-8;

/// Peak concurrence below which a zero-touching excursion is treated as
/// quadrature noise rather than a revival.
const TANGENCY_TOL: f64 = 1e-12;

/// Hermiticity / trace / positivity slack accepted by the Wootters oracle.
const WOOTTERS_TOL: f64 = 1e-10;

/// Signed concurrence excess of an X-state:
/// `2 max(|c_inner| - sqrt(p00 p11), |c_outer| - sqrt(p01 p10))`.
///
/// Negative values measure how far the state is from the entanglement
/// boundary; the concurrence is its positive part. Exposed because root
/// finding on the sign change is how death and revival times are located.
pub fn concurrence_excess_x(state: &TwoQubitXState) -> f64 {
    let inner = state.c_inner.norm() - (state.p00 * state.p11).sqrt();
    let outer = state.c_outer.norm() - (state.p01 * state.p10).sqrt();
    2.0 * inner.max(outer)
}

/// Concurrence of an X-state, in [0, 1].
pub fn concurrence_x(state: &TwoQubitXState) -> Result<f64> {
    state.validate()?;
    Ok(concurrence_excess_x(state).clamp(0.0, 1.0))
}

/// Wootters concurrence of a general two-qubit density matrix:
/// `max(0, λ₁ - λ₂ - λ₃ - λ₄)` with λ_i the decreasing square roots of the
/// eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
///
/// Implemented through Hermitian eigendecompositions only: with
/// `M = √ρ · (σ_y⊗σ_y) · (√ρ)*`, the λ_i are the square roots of the
/// eigenvalues of the Hermitian product `M M†`.
pub fn concurrence_wootters(rho: &Matrix4<Complex64>) -> Result<f64> {
    // Physicality checks: Hermitian, unit trace, positive semidefinite.
    let herm_dev = (rho - rho.adjoint()).norm();
    if herm_dev > WOOTTERS_TOL {
        return Err(Error::Domain(format!(
            "density matrix is not Hermitian: deviation {herm_dev:.3e}"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > WOOTTERS_TOL || tr.im.abs() > WOOTTERS_TOL {
        return Err(Error::Domain(format!("density matrix trace is {tr}, not 1")));
    }
    let eig = rho.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&v| v < -WOOTTERS_TOL) {
        return Err(Error::Domain(format!(
            "density matrix has a negative eigenvalue {:.3e}",
            eig.eigenvalues.min()
        )));
    }

    let sqrt_vals = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0));
    let sqrt_rho = &eig.eigenvectors
        * Matrix4::from_diagonal(&sqrt_vals)
        * eig.eigenvectors.adjoint();

    let spin_flip = {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Matrix4::new(
            z, z, z, -one, //
            z, z, one, z, //
            z, one, z, z, //
            -one, z, z, z,
        )
    };

    let m = sqrt_rho * spin_flip * sqrt_rho.conjugate();
    let gram = &m * m.adjoint();
    let mut lambdas: Vec<f64> = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Sampled concurrence trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceTrace {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ConcurrenceTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Domain(format!(
                "trace arrays differ in length: {} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("trace times must be strictly increasing".into()));
        }
        if values.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            return Err(Error::Domain("concurrence values must lie in [0, 1]".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Concurrence sampled on `samples` points spanning [0, horizon].
pub fn concurrence_trace(scenario: &EvolutionScenario, samples: usize) -> Result<ConcurrenceTrace> {
    if samples < 2 {
        return Err(Error::Precondition(format!(
            "a trace needs at least 2 samples, got {samples}"
        )));
    }
    let mut times = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = scenario.horizon * k as f64 / (samples - 1) as f64;
        times.push(t);
        values.push(concurrence_x(&evolve(scenario, t)?)?);
    }
    ConcurrenceTrace::new(times, values)
}

/// A maximal span of positive concurrence after the first death. `truncated`
/// marks intervals still open at the horizon (end = horizon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalInterval {
    pub start: f64,
    pub end: f64,
    pub truncated: bool,
}

/// Death time and revival intervals of a scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EsdReport {
    /// First time the concurrence reaches zero; absent if it never does.
    pub esd_time: Option<f64>,
    pub revival_intervals: Vec<RevivalInterval>,
}

/// Scans the concurrence excess on a `bracket_step` grid, bisects every sign
/// change to 10⁻⁸ in time, and assembles death/revival events.
///
/// A state that never dies yields `esd_time: None` and no intervals — a valid
/// report. Zero-touching excursions with peak concurrence below tolerance are
/// discarded as numerical tangency.
pub fn esd_time(scenario: &EvolutionScenario, bracket_step: f64) -> Result<EsdReport> {
    if !(bracket_step > 0.0) || !bracket_step.is_finite() {
        return Err(Error::Precondition(format!(
            "bracket step must be positive, got {bracket_step}"
        )));
    }

    let excess_at = |t: f64| -> Result<f64> { Ok(concurrence_excess_x(&evolve(scenario, t)?)) };

    // Grid including both endpoints.
    let mut grid = Vec::new();
    let mut t = 0.0;
    while t < scenario.horizon {
        grid.push(t);
        t += bracket_step;
    }
    grid.push(scenario.horizon);

    let mut crossings = Vec::new(); // (time, now_positive)
    let mut prev_t = grid[0];
    let mut prev_s = excess_at(prev_t)?;
    let initially_alive = prev_s > 0.0;
    for &t in &grid[1..] {
        let s = excess_at(t)?;
        if (prev_s > 0.0) != (s > 0.0) {
            let root = bisect(excess_at, prev_t, t, ESD_TIME_TOL, 200)?;
            crossings.push((root, s > 0.0));
        }
        prev_t = t;
        prev_s = s;
    }
    let finally_alive = prev_s > 0.0;

    let mut report = EsdReport::default();
    if !initially_alive {
        report.esd_time = Some(0.0);
    }
    let mut open_start: Option<f64> = None;
    for (time, now_positive) in crossings {
        if now_positive {
            if report.esd_time.is_some() {
                open_start = Some(time);
            }
        } else {
            match (report.esd_time, open_start.take()) {
                (None, _) => report.esd_time = Some(time),
                (Some(_), Some(start)) => report.revival_intervals.push(RevivalInterval {
                    start,
                    end: time,
                    truncated: false,
                }),
                (Some(_), None) => {} // spurious double-death; grid noise
            }
        }
    }
    if let Some(start) = open_start {
        if finally_alive {
            report.revival_intervals.push(RevivalInterval {
                start,
                end: scenario.horizon,
                truncated: true,
            });
        }
    }

    // Tangency filter: drop revivals whose peak concurrence is below noise.
    let step = bracket_step.min(scenario.horizon / 64.0);
    let mut kept = Vec::with_capacity(report.revival_intervals.len());
    for interval in report.revival_intervals.drain(..) {
        let mut peak: f64 = 0.0;
        let mut t = interval.start;
        while t <= interval.end {
            peak = peak.max(excess_at(t)?);
            t += step;
        }
        peak = peak.max(excess_at(interval.end)?);
        if peak > TANGENCY_TOL {
            kept.push(interval);
        }
    }
    report.revival_intervals = kept;
    Ok(report)
}
