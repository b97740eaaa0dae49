//! Shared numerical machinery: adaptive Gauss–Kronrod quadrature and
//! bracketed bisection.
//!
//! The quadrature driver keeps a max-heap of segments ordered by local error
//! and repeatedly splits the worst one, which handles the oscillatory
//! integrands produced by long pulse trains without hand-tuned panels.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// 15-point Kronrod abscissae on [-1, 1] (positive half, descending; last is 0).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Embedded 7-point Gauss weights (nodes are XGK[1], XGK[3], XGK[5], center).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// Gauss–Kronrod 7/15 rule on [a, b]; returns (integral, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    // Odd Kronrod indices coincide with the embedded Gauss nodes.
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = ((res_kronrod - res_gauss) * half).abs();
    (
        res_kronrod * half,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    )
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Result of an adaptive quadrature run that met its tolerance.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOutcome {
    pub value: f64,
    /// Local error estimate plus any caller-supplied external error (tail bound).
    pub error_estimate: f64,
    /// Number of interval splits performed.
    pub refinements: usize,
}

/// Adaptively integrate `f` over [a, b] to `max(abs_tol, rel_tol * |I|)`.
///
/// `seed_intervals` controls the initial uniform subdivision (useful when the
/// integrand oscillates on a known scale), and `external_error` is added to
/// the achieved error estimate before the tolerance test so truncated-tail
/// bounds participate in the convergence decision.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_refinements: usize,
    seed_intervals: usize,
    external_error: f64,
) -> Result<QuadratureOutcome> {
    if !(b > a) {
        return Err(Error::Precondition(format!(
            "integration bounds must satisfy a < b, got [{a}, {b}]"
        )));
    }

    let seeds = seed_intervals.max(1);
    let mut heap = BinaryHeap::with_capacity(seeds + max_refinements + 1);
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    let mut frozen_error = 0.0;

    let width = (b - a) / seeds as f64;
    for k in 0..seeds {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == seeds { b } else { lo + width };
        let (v, e) = qk15(&f, lo, hi);
        total_value += v;
        total_error += e;
        heap.push(Segment {
            err: e,
            a: lo,
            b: hi,
            value: v,
        });
    }

    let tolerance = |value: f64| abs_tol.max(rel_tol * value.abs());

    let mut refinements = 0;
    while total_error + frozen_error + external_error > tolerance(total_value) {
        if refinements >= max_refinements {
            return Err(Error::Convergence {
                achieved: total_error + frozen_error + external_error,
                required: tolerance(total_value),
                refinements,
            });
        }
        let worst = match heap.pop() {
            Some(seg) => seg,
            None => break, // every segment frozen; fall through to final check
        };

        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot split further in f64; its error is irreducible.
            frozen_error += worst.err;
            total_error -= worst.err;
            continue;
        }

        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.err;
        heap.push(Segment {
            err: e1,
            a: worst.a,
            b: mid,
            value: v1,
        });
        heap.push(Segment {
            err: e2,
            a: mid,
            b: worst.b,
            value: v2,
        });
        refinements += 1;
    }

    let achieved = total_error + frozen_error + external_error;
    if achieved > tolerance(total_value) {
        return Err(Error::Convergence {
            achieved,
            required: tolerance(total_value),
            refinements,
        });
    }

    Ok(QuadratureOutcome {
        value: total_value,
        error_estimate: achieved,
        refinements,
    })
}

/// Bracketed bisection to absolute abscissa tolerance `x_tol`.
///
/// `f` may fail (e.g. when each evaluation runs a quadrature); failures
/// propagate. Requires a sign change on [lo, hi].
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::Precondition(format!(
            "bisection bracket must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Precondition(format!(
            "no sign change on bracket [{lo}, {hi}]: f(lo)={f_lo:.6e}, f(hi)={f_hi:.6e}"
        )));
    }

    let (mut lo, mut hi, mut f_lo) = (lo, hi, f_lo);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol {
            return Ok(mid);
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
