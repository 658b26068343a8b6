//! Globally adaptive Gauss–Kronrod (7/15) integration on finite intervals.
//!
//! Used as the independent validation path for the recursions in
//! [`crate::special_fn`] and for the remainder integrals of the exact
//! oracle. The interval with the largest error estimate is bisected until the
//! summed error estimate meets the tolerance or the interval budget runs out.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute error target.
    pub abs: f64,
    /// Relative error target; the effective target is `max(abs, rel * |I|)`.
    pub rel: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_intervals: 2000,
        }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel = rel;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    // True when the error estimate sits at the round-off floor, so bisecting
    // the segment cannot improve it.
    at_floor: bool,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    // The embedded Gauss rule gives a pessimistic error bound; floor it at the
    // round-off level of the segment.
    let raw = ((kronrod - gauss) * half).abs();
    let floor = 50.0 * f64::EPSILON * value.abs();
    Segment {
        lo,
        hi,
        value,
        error: raw.max(floor),
        at_floor: raw <= floor,
    }
}

/// Integrate `f` over `[lo, hi]`. A reversed interval yields the negated
/// integral; an empty interval yields zero.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Quadrature> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if lo == hi {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    if hi < lo {
        let q = integrate(f, hi, lo, tol)?;
        return Ok(Quadrature {
            value: -q.value,
            ..q
        });
    }

    let mut segments = vec![gk15(&f, lo, hi)];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(Error::Numerical(format!(
                "integrand not finite on [{lo}, {hi}]"
            )));
        }
        let target = tol.abs.max(tol.rel * total.abs());
        if err <= target {
            return Ok(Quadrature {
                value: total,
                error_estimate: err,
                intervals: segments.len(),
            });
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature on [{lo}, {hi}] did not converge: estimate {total:e}, \
                 error {err:e} > target {target:e} after {} intervals",
                segments.len()
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("non-empty");
        if segments[worst].at_floor {
            return Ok(Quadrature {
                value: total,
                error_estimate: err,
                intervals: segments.len(),
            });
        }
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            return Err(Error::Numerical(format!(
                "quadrature on [{lo}, {hi}] exhausted floating-point resolution near {mid}"
            )));
        }
        segments.push(gk15(&f, seg.lo, mid));
        segments.push(gk15(&f, mid, seg.hi));
    }
}
