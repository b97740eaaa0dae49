//! Brute-force validators, independent of the analytic evolution path:
//! discrete-mode bath sums, truncated-Fock thermal displacement traces, and
//! the exact joint qubit⊗modes evolution with pulse operators.
//!
//! These exist to be slow and transparent. The joint oracle builds the
//! conditional-displacement propagator segment by segment on the full
//! `4 × (n_max+1)^K` space, applies every pulse as an explicit matrix, and
//! partial-traces the modes at the end — no filter functions anywhere.

use crate::bath::{coth_half_ratio, spectral_density, BathSpec, FilterEvaluator, PulseSchedule};
use crate::dynamics::TwoQubitXState;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

/// Maximum thermal occupation mass allowed above the Fock cutoff.
const THERMAL_TAIL_LIMIT: f64 = 1e-12;

/// Hard cap on the joint bath dimension `(n_max+1)^K`.
const JOINT_DIM_BUDGET: usize = 1024;

/// The joint oracle is for few-mode cross-checks only.
const MAX_JOINT_MODES: usize = 3;

/// A finite set of bath modes `(ω_k, g_k²)` whose weighted sum approximates
/// `∫ I(ω) f(ω) dω`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    mode_frequencies: Vec<f64>,
    couplings_sq: Vec<f64>,
}

impl DiscreteBath {
    pub fn new(mode_frequencies: Vec<f64>, couplings_sq: Vec<f64>) -> Result<Self> {
        if mode_frequencies.len() != couplings_sq.len() {
            return Err(Error::Domain(format!(
                "{} frequencies vs {} couplings",
                mode_frequencies.len(),
                couplings_sq.len()
            )));
        }
        for (i, &w) in mode_frequencies.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Domain(format!(
                    "mode frequencies must be positive, got {w} at index {i}"
                )));
            }
            if i > 0 && mode_frequencies[i - 1] >= w {
                return Err(Error::Domain(
                    "mode frequencies must be strictly increasing".into(),
                ));
            }
        }
        if couplings_sq.iter().any(|&g2| !(g2 >= 0.0) || !g2.is_finite()) {
            return Err(Error::Domain("squared couplings must be nonnegative".into()));
        }
        Ok(Self {
            mode_frequencies,
            couplings_sq,
        })
    }

    /// Midpoint discretization of a continuum bath: `modes` uniform cells on
    /// `[0, omega_max]` with `g_k² = I(ω_k) Δω`.
    pub fn from_spectral_density(bath: &BathSpec, modes: usize, omega_max: f64) -> Result<Self> {
        if modes == 0 || !(omega_max > 0.0) {
            return Err(Error::Domain(format!(
                "need modes > 0 and omega_max > 0, got {modes} and {omega_max}"
            )));
        }
        let dw = omega_max / modes as f64;
        let mut freqs = Vec::with_capacity(modes);
        let mut g2 = Vec::with_capacity(modes);
        for k in 0..modes {
            let w = (k as f64 + 0.5) * dw;
            freqs.push(w);
            g2.push(spectral_density(bath, w)? * dw);
        }
        Self::new(freqs, g2)
    }

    pub fn single_mode(omega: f64, coupling_sq: f64) -> Result<Self> {
        Self::new(vec![omega], vec![coupling_sq])
    }

    /// No modes at all; every oracle built on it is the identity.
    pub fn empty() -> Self {
        Self {
            mode_frequencies: Vec::new(),
            couplings_sq: Vec::new(),
        }
    }

    pub fn mode_frequencies(&self) -> &[f64] {
        &self.mode_frequencies
    }

    pub fn couplings_sq(&self) -> &[f64] {
        &self.couplings_sq
    }

    pub fn len(&self) -> usize {
        self.mode_frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mode_frequencies.is_empty()
    }
}

/// Highest Fock level retained per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    pub n_max: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Thermal occupation mass above `n_max` at the given mode: `q^(n_max+1)`
    /// with `q = e^{-ω/T}`.
    pub fn thermal_tail(&self, omega: f64, temperature: f64) -> f64 {
        (-omega / temperature).exp().powi(self.n_max as i32 + 1)
    }

    pub fn ensure_thermal(&self, omega: f64, temperature: f64) -> Result<()> {
        let tail = self.thermal_tail(omega, temperature);
        if tail >= THERMAL_TAIL_LIMIT {
            return Err(Error::Truncation {
                tail,
                limit: THERMAL_TAIL_LIMIT,
            });
        }
        Ok(())
    }
}

/// Discrete-mode decoherence exponent
/// `Σ_k 8 g_k² coth(ω_k/2T) F(ω_k, t; schedule)`.
///
/// Converges to [`crate::bath::decoherence_exponent`] as the mode grid
/// refines; this is the sum that pins the continuum quadrature.
pub fn discrete_bath_exponent(
    db: &DiscreteBath,
    t: f64,
    schedule: &PulseSchedule,
    temperature: f64,
) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if t < 0.0 {
        return Err(Error::Precondition(format!("need t >= 0, got {t}")));
    }
    if t == 0.0 || db.is_empty() {
        return Ok(0.0);
    }
    let filter = FilterEvaluator::new(t, schedule)?;
    let mut total = 0.0;
    for (&w, &g2) in db.mode_frequencies.iter().zip(&db.couplings_sq) {
        total += 8.0 * g2 * coth_half_ratio(w, temperature) * filter.evaluate(w);
    }
    Ok(total)
}

/// Displacement operator `D(β) = e^{β a† - β* a}` truncated to `dim` Fock
/// levels, built from the associated-Laguerre recurrence (no factorial
/// ratios, stable into the hundreds of levels):
///
/// ```text
/// ⟨n+a | D(β) | n⟩ = e^{-|β|²/2} β^a sqrt(n!/(n+a)!) L_n^{(a)}(|β|²)
/// ⟨n | D(β) | n+a⟩ = e^{-|β|²/2} (-β*)^a sqrt(n!/(n+a)!) L_n^{(a)}(|β|²)
/// ```
pub fn displacement_matrix(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let x = beta.norm_sqr();
    let gauss = (-0.5 * x).exp();
    let mut d = DMatrix::zeros(dim, dim);

    // scale_lower = β^a / sqrt(a!), scale_upper the same with -β*.
    let mut scale_lower = Complex64::new(gauss, 0.0);
    let mut scale_upper = Complex64::new(gauss, 0.0);
    for a in 0..dim {
        if a > 0 {
            let root = (a as f64).sqrt();
            scale_lower *= beta / root;
            scale_upper *= -beta.conj() / root;
        }
        // Associated Laguerre L_n^{(a)}(x) via the three-term recurrence,
        // together with the running prefactor sqrt(n!/(n+a)!) ratio.
        let mut l_prev = 0.0;
        let mut l_curr = 1.0;
        let mut pref = 1.0;
        for n in 0..dim - a {
            if n > 0 {
                let nf = n as f64;
                let l_next = ((2.0 * nf - 1.0 + a as f64 - x) * l_curr
                    - (nf - 1.0 + a as f64) * l_prev)
                    / nf;
                l_prev = l_curr;
                l_curr = l_next;
                pref *= (nf / (nf + a as f64)).sqrt();
            }
            let magnitude = pref * l_curr;
            d[(n + a, n)] = scale_lower * magnitude;
            if a > 0 {
                d[(n, n + a)] = scale_upper * magnitude;
            }
        }
    }
    d
}

/// Thermal occupation weights `(1-q) q^n` for one mode.
fn thermal_weights(omega: f64, temperature: f64, dim: usize) -> Vec<f64> {
    let q = (-omega / temperature).exp();
    let mut w = Vec::with_capacity(dim);
    let mut p = 1.0 - q;
    for _ in 0..dim {
        w.push(p);
        p *= q;
    }
    w
}

/// Numerical `Tr[ρ_thermal(ω, T) · D(β)]` in the truncated Fock basis.
///
/// Must reproduce the closed form `exp(-|β|² coth(ω/2T) / 2)`; the comparison
/// is the validation, so no part of that formula appears here.
pub fn fock_displacement_trace(
    omega: f64,
    temperature: f64,
    beta: Complex64,
    trunc: &FockTruncation,
) -> Result<Complex64> {
    if !(omega > 0.0) || !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "thermal displacement trace needs omega > 0 and T > 0, got {omega}, {temperature}"
        )));
    }
    trunc.ensure_thermal(omega, temperature)?;
    let dim = trunc.dim();
    let d = displacement_matrix(beta, dim);
    let weights = thermal_weights(omega, temperature, dim);
    let mut tr = Complex64::new(0.0, 0.0);
    for n in 0..dim {
        tr += weights[n] * d[(n, n)];
    }
    Ok(tr)
}

/// The two-qubit pulse operator at time `t_p`: simultaneous spin flips with
/// the interaction-picture phases, `exp(iω₀σ_z t_p) σ_x` on each qubit.
pub fn system_pulse_matrix(omega0: f64, t_p: f64) -> Matrix4<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let up = Complex64::from_polar(1.0, 2.0 * omega0 * t_p);
    let mut p = Matrix4::zeros();
    p[(3, 0)] = up.conj();
    p[(2, 1)] = one;
    p[(1, 2)] = one;
    p[(0, 3)] = up;
    p
}

/// Joint-evolution result plus unitarity diagnostics taken before the
/// partial trace.
#[derive(Debug, Clone)]
pub struct JointEvolutionOutcome {
    pub state: TwoQubitXState,
    pub joint_trace: f64,
    pub joint_purity: f64,
    pub initial_purity: f64,
}

/// Exact evolution of `initial ⊗ ρ_thermal(T)` on the joint
/// `4 × (n_max+1)^K` space: conditional displacements per free segment,
/// explicit pulse matrices in between, `U ρ U†` throughout, modes traced out
/// at the end.
pub fn joint_evolution_oracle(
    db: &DiscreteBath,
    trunc: &FockTruncation,
    initial: &TwoQubitXState,
    schedule: &PulseSchedule,
    t: f64,
    omega0: f64,
    temperature: f64,
) -> Result<TwoQubitXState> {
    Ok(joint_evolution_detailed(db, trunc, initial, schedule, t, omega0, temperature)?.state)
}

/// As [`joint_evolution_oracle`], also reporting joint trace and purity.
pub fn joint_evolution_detailed(
    db: &DiscreteBath,
    trunc: &FockTruncation,
    initial: &TwoQubitXState,
    schedule: &PulseSchedule,
    t: f64,
    omega0: f64,
    temperature: f64,
) -> Result<JointEvolutionOutcome> {
    initial.validate()?;
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Precondition(format!("need t >= 0, got {t}")));
    }
    if t > 0.0 {
        schedule.ensure_within(t)?;
    } else if !schedule.is_empty() {
        return Err(Error::Precondition(
            "no pulse can fire strictly inside (0, 0)".into(),
        ));
    }
    if db.len() > MAX_JOINT_MODES {
        return Err(Error::Resource(format!(
            "joint oracle supports at most {MAX_JOINT_MODES} modes, got {}",
            db.len()
        )));
    }
    let bath_dim = trunc.dim().checked_pow(db.len() as u32).unwrap_or(usize::MAX);
    if bath_dim > JOINT_DIM_BUDGET {
        return Err(Error::Resource(format!(
            "joint bath dimension {bath_dim} exceeds the budget {JOINT_DIM_BUDGET}"
        )));
    }
    for &w in db.mode_frequencies() {
        trunc.ensure_thermal(w, temperature)?;
    }

    // Joint thermal weights: Kronecker product of per-mode geometric weights,
    // renormalized so the truncated state has unit trace.
    let mut weights = vec![1.0f64];
    for &w in db.mode_frequencies() {
        let per_mode = thermal_weights(w, temperature, trunc.dim());
        let mut next = Vec::with_capacity(weights.len() * per_mode.len());
        for &a in &weights {
            for &b in &per_mode {
                next.push(a * b);
            }
        }
        weights = next;
    }
    let norm: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= norm;
    }
    debug_assert_eq!(weights.len(), bath_dim);

    let rho_s = initial.to_density_matrix();
    let mut blocks: Vec<Vec<DMatrix<Complex64>>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let mut b = DMatrix::zeros(bath_dim, bath_dim);
                    if rho_s[(i, j)].norm() > 0.0 {
                        for (n, &wn) in weights.iter().enumerate() {
                            b[(n, n)] = rho_s[(i, j)] * wn;
                        }
                    }
                    b
                })
                .collect()
        })
        .collect();

    let initial_purity = {
        let sys: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (rho_s[(i, j)] * rho_s[(j, i)]).re)
            .sum();
        let bath: f64 = weights.iter().map(|w| w * w).sum();
        sys * bath
    };

    // Segment boundaries 0 = t_0 < t_1 < ... < t_N < t_{N+1} = t.
    let mut prev = 0.0;
    let pulse_times = schedule.times().to_vec();
    for (step, &edge) in pulse_times.iter().chain(std::iter::once(&t)).enumerate() {
        if edge > prev {
            let d_plus = joint_displacement(db, trunc, prev, edge);
            let d_minus = d_plus.adjoint();
            apply_conditional_displacement(&mut blocks, &d_plus, &d_minus);
        }
        let is_pulse = step < pulse_times.len();
        if is_pulse {
            apply_pulse(&mut blocks, omega0, edge);
        }
        prev = edge;
    }

    let mut joint_trace = 0.0;
    let mut joint_purity = 0.0;
    for i in 0..4 {
        joint_trace += blocks[i][i].diagonal().iter().map(|z| z.re).sum::<f64>();
        for j in 0..4 {
            let a = &blocks[i][j];
            let b = &blocks[j][i];
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..bath_dim {
                for n in 0..bath_dim {
                    acc += a[(m, n)] * b[(n, m)];
                }
            }
            joint_purity += acc.re;
        }
    }

    let mut reduced = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            reduced[(i, j)] = blocks[i][j].diagonal().sum();
        }
    }
    let state = TwoQubitXState::from_density_matrix(&reduced, 1e-9)?;

    Ok(JointEvolutionOutcome {
        state,
        joint_trace,
        joint_purity,
        initial_purity,
    })
}

/// `⊗_k D(α_k)` for the free segment `[a, b]`, with per-mode amplitude
/// `α_k = 2 g_k (e^{iω_k a} - e^{iω_k b}) / ω_k`.
fn joint_displacement(db: &DiscreteBath, trunc: &FockTruncation, a: f64, b: f64) -> DMatrix<Complex64> {
    let mut joint = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for (&w, &g2) in db.mode_frequencies().iter().zip(db.couplings_sq()) {
        let g = g2.sqrt();
        let alpha = 2.0 * g
            * (Complex64::from_polar(1.0, w * a) - Complex64::from_polar(1.0, w * b))
            / w;
        let d = displacement_matrix(alpha, trunc.dim());
        joint = joint.kronecker(&d);
    }
    joint
}

fn apply_conditional_displacement(
    blocks: &mut [Vec<DMatrix<Complex64>>],
    d_plus: &DMatrix<Complex64>,
    d_minus: &DMatrix<Complex64>,
) {
    let left = |i: usize| -> Option<&DMatrix<Complex64>> {
        match i {
            0 => Some(d_plus),
            3 => Some(d_minus),
            _ => None,
        }
    };
    for i in 0..4 {
        for j in 0..4 {
            if let Some(l) = left(i) {
                blocks[i][j] = l * &blocks[i][j];
            }
            if let Some(r) = left(j) {
                blocks[i][j] = &blocks[i][j] * r.adjoint();
            }
        }
    }
}

fn apply_pulse(blocks: &mut [Vec<DMatrix<Complex64>>], omega0: f64, t_p: f64) {
    // Column phases of the pulse matrix: |i⟩ -> phase(i) |flip(i)⟩.
    let phase = [
        Complex64::from_polar(1.0, -2.0 * omega0 * t_p),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, 2.0 * omega0 * t_p),
    ];
    let flip = [3usize, 2, 1, 0];
    let dim = blocks[0][0].nrows();
    let mut next: Vec<Vec<DMatrix<Complex64>>> = (0..4)
        .map(|_| (0..4).map(|_| DMatrix::zeros(dim, dim)).collect())
        .collect();
    for i in 0..4 {
        for j in 0..4 {
            let factor = phase[i] * phase[j].conj();
            next[flip[i]][flip[j]] = &blocks[i][j] * factor;
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            blocks[i][j] = std::mem::replace(&mut next[i][j], DMatrix::zeros(0, 0));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{decoherence_exponent, QuadratureSpec};
    use crate::dynamics::{apply_collective_dephasing, initial_state_bell, initial_state_mixed};
    use approx::assert_relative_eq;

    fn fig_bath() -> BathSpec {
        BathSpec::new(0.25, 100.0).unwrap()
    }

    #[test]
    fn empty_bath_contributes_nothing() {
        let g = discrete_bath_exponent(&DiscreteBath::empty(), 0.01, &PulseSchedule::free(), 1.0)
            .unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn full_period_mode_contributes_nothing() {
        let t = 0.01;
        let omega = std::f64::consts::TAU / t;
        let db = DiscreteBath::single_mode(omega, 1.0).unwrap();
        let g = discrete_bath_exponent(&db, t, &PulseSchedule::free(), 1.0).unwrap();
        assert!(g.abs() < 1e-22, "got {g}");
    }

    #[test]
    fn discrete_sum_approaches_continuum_quadrature() {
        let bath = fig_bath();
        let quad = QuadratureSpec::default();
        let schedule = PulseSchedule::from_times(vec![0.01]).unwrap();
        let exact = decoherence_exponent(&bath, 0.02, &schedule, &quad).unwrap();
        let mut prev_err = f64::INFINITY;
        for &modes in &[2_000usize, 8_000, 32_000] {
            let db = DiscreteBath::from_spectral_density(&bath, modes, 20.0 * bath.omega_c)
                .unwrap();
            let approx_g = discrete_bath_exponent(&db, 0.02, &schedule, 1.0).unwrap();
            let err = (approx_g - exact).abs();
            assert!(err < prev_err, "refinement did not shrink the error");
            prev_err = err;
        }
        assert!(prev_err / exact < 1e-6);
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = displacement_matrix(Complex64::new(0.0, 0.0), 8);
        for i in 0..8 {
            for j in 0..8 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(d[(i, j)].re, expected, epsilon = 1e-15);
                assert_eq!(d[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn displacement_matrix_is_unitary_well_inside_truncation() {
        let beta = Complex64::new(0.7, -0.4);
        let dim = 60;
        let d = displacement_matrix(beta, dim);
        let gram = d.adjoint() * &d;
        // unitarity defect only near the truncation edge; check the core
        for i in 0..40 {
            for j in 0..40 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[(i, j)] - Complex64::new(expected, 0.0)).norm() < 1e-12,
                    "gram[({i},{j})] = {}",
                    gram[(i, j)]
                );
            }
        }
    }

    #[test]
    fn displacement_ground_state_column_is_coherent() {
        // |⟨n|D(β)|0⟩|² must be Poissonian with mean |β|².
        let beta = Complex64::new(0.9, 0.3);
        let x = beta.norm_sqr();
        let d = displacement_matrix(beta, 30);
        let mut factorial = 1.0;
        for n in 0..12 {
            if n > 0 {
                factorial *= n as f64;
            }
            let expected = (-x).exp() * x.powi(n as i32) / factorial;
            assert_relative_eq!(d[(n, 0)].norm_sqr(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn fock_trace_examples() {
        let trunc = FockTruncation::new(200).unwrap();
        // beta = 0: unit trace.
        let tr = fock_displacement_trace(2.0, 1.0, Complex64::new(0.0, 0.0), &trunc).unwrap();
        assert_relative_eq!(tr.re, 1.0, epsilon = 1e-13);
        assert!(tr.im.abs() < 1e-15);

        // near-vacuum: e^{-1/2}
        let tr = fock_displacement_trace(2.0, 0.02, Complex64::new(1.0, 0.0), &trunc).unwrap();
        assert_relative_eq!(tr.re, (-0.5f64).exp(), max_relative = 1e-10);

        // omega = 2, T = 1: e^{-coth(1)/2}
        let tr = fock_displacement_trace(2.0, 1.0, Complex64::new(1.0, 0.0), &trunc).unwrap();
        assert_relative_eq!(tr.re, (-0.5 / 1.0f64.tanh()).exp(), max_relative = 1e-10);
        assert!(tr.im.abs() < 1e-12);
    }

    #[test]
    fn fock_trace_rejects_insufficient_truncation() {
        let trunc = FockTruncation::new(5).unwrap();
        let err =
            fock_displacement_trace(0.5, 1.0, Complex64::new(1.0, 0.0), &trunc).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn joint_oracle_without_modes_is_identity() {
        let out = joint_evolution_oracle(
            &DiscreteBath::empty(),
            &FockTruncation::new(1).unwrap(),
            &initial_state_mixed(),
            &PulseSchedule::free(),
            0.3,
            1.0,
            1.0,
        )
        .unwrap();
        let expected = initial_state_mixed();
        assert_relative_eq!(out.c_outer.re, expected.c_outer.re, epsilon = 1e-14);
        assert_relative_eq!(out.p01, expected.p01, epsilon = 1e-14);
    }

    #[test]
    fn joint_oracle_matches_analytic_single_mode_free_decay() {
        let db = DiscreteBath::single_mode(5.0, 4.0).unwrap();
        let trunc = FockTruncation::new(120).unwrap();
        let t = 0.1;
        let joint = joint_evolution_oracle(
            &db,
            &trunc,
            &initial_state_bell(),
            &PulseSchedule::free(),
            t,
            1.0,
            1.0,
        )
        .unwrap();
        let gamma = discrete_bath_exponent(&db, t, &PulseSchedule::free(), 1.0).unwrap();
        let analytic =
            apply_collective_dephasing(&initial_state_bell(), &PulseSchedule::free(), gamma, 1.0);
        assert!((joint.c_outer - analytic.c_outer).norm() < 1e-9);
        assert!((joint.p00 - analytic.p00).abs() < 1e-12);
    }

    #[test]
    fn joint_oracle_matches_analytic_single_mode_echo() {
        let db = DiscreteBath::single_mode(5.0, 4.0).unwrap();
        let trunc = FockTruncation::new(120).unwrap();
        let schedule = PulseSchedule::from_times(vec![0.06]).unwrap();
        let t = 0.1;
        let omega0 = 1.7;
        let joint =
            joint_evolution_oracle(&db, &trunc, &initial_state_bell(), &schedule, t, omega0, 1.0)
                .unwrap();
        let gamma = discrete_bath_exponent(&db, t, &schedule, 1.0).unwrap();
        let analytic =
            apply_collective_dephasing(&initial_state_bell(), &schedule, gamma, omega0);
        assert!(
            (joint.c_outer - analytic.c_outer).norm() < 1e-9,
            "joint {} vs analytic {}",
            joint.c_outer,
            analytic.c_outer
        );
    }

    #[test]
    fn joint_oracle_preserves_trace_and_purity() {
        let db = DiscreteBath::single_mode(5.0, 4.0).unwrap();
        let trunc = FockTruncation::new(100).unwrap();
        let schedule = PulseSchedule::from_times(vec![0.04]).unwrap();
        let out = joint_evolution_detailed(
            &db,
            &trunc,
            &initial_state_mixed(),
            &schedule,
            0.08,
            1.0,
            1.0,
        )
        .unwrap();
        assert!((out.joint_trace - 1.0).abs() < 1e-10);
        assert!(
            (out.joint_purity - out.initial_purity).abs() < 1e-10,
            "purity drifted: {} -> {}",
            out.initial_purity,
            out.joint_purity
        );
    }

    #[test]
    fn pulse_pair_with_zero_gap_is_identity() {
        let p = system_pulse_matrix(3.1, 0.007);
        let pair = p * p;
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((pair[(i, j)] - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rapid_pulse_pair_preserves_the_joint_state() {
        // Two pulses Δt = 1e-6 apart: U ≈ identity, reduced state ≈ initial.
        let db = DiscreteBath::single_mode(5.0, 4.0).unwrap();
        let trunc = FockTruncation::new(60).unwrap();
        let dt = 1e-6;
        let schedule = PulseSchedule::from_times(vec![dt, 2.0 * dt]).unwrap();
        let t = 2.0 * dt + 1e-9;
        let out = joint_evolution_oracle(
            &db,
            &trunc,
            &initial_state_bell(),
            &schedule,
            t,
            1.0,
            1.0,
        )
        .unwrap();
        let initial = initial_state_bell();
        assert!((out.c_outer - initial.c_outer).norm() < 1e-4);
        assert!((out.p00 - initial.p00).abs() < 1e-6);
    }

    #[test]
    fn joint_oracle_enforces_budgets() {
        let db = DiscreteBath::new(vec![1.0, 2.0], vec![0.1, 0.1]).unwrap();
        let err = joint_evolution_oracle(
            &db,
            &FockTruncation::new(200).unwrap(),
            &initial_state_bell(),
            &PulseSchedule::free(),
            0.1,
            1.0,
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Resource(_)));

        let four = DiscreteBath::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.1; 4]).unwrap();
        let err = joint_evolution_oracle(
            &four,
            &FockTruncation::new(2).unwrap(),
            &initial_state_bell(),
            &PulseSchedule::free(),
            0.1,
            1.0,
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn two_mode_joint_oracle_matches_analytic() {
        let db = DiscreteBath::new(vec![4.0, 9.0], vec![1.5, 2.0]).unwrap();
        let trunc = FockTruncation::new(30).unwrap();
        let t = 0.12;
        let joint = joint_evolution_oracle(
            &db,
            &trunc,
            &initial_state_bell(),
            &PulseSchedule::free(),
            t,
            1.0,
            1.0,
        )
        .unwrap();
        let gamma = discrete_bath_exponent(&db, t, &PulseSchedule::free(), 1.0).unwrap();
        let analytic =
            apply_collective_dephasing(&initial_state_bell(), &PulseSchedule::free(), gamma, 1.0);
        assert!((joint.c_outer - analytic.c_outer).norm() < 1e-8);
    }
}
