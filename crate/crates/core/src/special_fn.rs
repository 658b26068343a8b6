//! Special functions on integer arguments: `ψ(n)`, `E_1(x)`, `g_n(a)`,
//! `G_n(a) = ψ(n) + g_n(a)` and `G_n = G_n(1)`.
//!
//! Everything is evaluated by recursion. `ψ(n)` and `g_n(1)` are memoized in
//! process-wide tables (grown on demand, guarded by a lock); `g_n(a)` for
//! other values of `a` is recomputed on every call.
//!
//! The convention throughout is
//!
//! ```text
//! g_n(a) = (-1)^n ∫_0^a x^(n-1) / (x + 1) dx
//! g_1(a) = -ln(1 + a),   g_(n+1)(a) = g_n(a) + (-1)^(n+1) a^n / n
//! ```
//!
//! The recursion is the one implied by the integral definition; it is checked
//! against [`quadrature_g`] in the tests.

use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `n` for which `ψ(n)` and `g_n(1)` are tabulated. Above it `ψ` is
/// evaluated by its asymptotic series and `g_n(1)` by direct recursion.
const TABLE_CAP: usize = 1 << 20;

/// Tunables for the special-function kernels.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpecialFnConfig {
    /// Absolute tolerance of the validation integrator. Integrals larger than
    /// one in magnitude are held to the same tolerance relative to their size.
    pub quadrature_abs_tol: f64,
    /// `E_1` uses its power series up to this argument and a continued
    /// fraction above it.
    pub e1_switch_point: f64,
}

impl Default for SpecialFnConfig {
    fn default() -> Self {
        SpecialFnConfig {
            quadrature_abs_tol: 1e-12,
            e1_switch_point: 1.0,
        }
    }
}

impl SpecialFnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quadrature_abs_tol > 0.0) {
            return Err(Error::domain("quadrature_abs_tol must be > 0"));
        }
        if !(self.e1_switch_point > 0.0) {
            return Err(Error::domain("e1_switch_point must be > 0"));
        }
        Ok(())
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn new(start: f64) -> Self {
        Compensated {
            sum: start,
            carry: 0.0,
        }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

struct PsiTable {
    // values[k] = ψ(k + 1)
    values: Vec<f64>,
    acc: Compensated,
}

static PSI: RwLock<PsiTable> = RwLock::new(PsiTable {
    values: Vec::new(),
    acc: Compensated {
        sum: -EULER_GAMMA,
        carry: 0.0,
    },
});

fn extend_psi(table: &mut PsiTable, len: usize) {
    while table.values.len() < len {
        let k = table.values.len();
        if k > 0 {
            table.acc.add(1.0 / k as f64);
        }
        table.values.push(table.acc.value());
    }
}

fn psi_asymptotic(n: u64) -> f64 {
    let x = n as f64;
    let inv2 = 1.0 / (x * x);
    x.ln()
        - 0.5 / x
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)))
}

/// Digamma function at a positive integer, `ψ(n) = H_(n-1) - γ`.
pub fn digamma(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("digamma requires n >= 1"));
    }
    let idx = (n - 1) as usize;
    if n as usize > TABLE_CAP {
        return Ok(psi_asymptotic(n));
    }
    {
        let table = PSI.read().expect("psi table poisoned");
        if let Some(&v) = table.values.get(idx) {
            return Ok(v);
        }
    }
    let mut table = PSI.write().expect("psi table poisoned");
    let want = (n as usize)
        .max(2 * table.values.len())
        .clamp(64, TABLE_CAP);
    extend_psi(&mut table, want);
    Ok(table.values[idx])
}

/// Exponential integral `E_1(x) = ∫_1^∞ e^(-xt)/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    exp_integral_e1_with(x, &SpecialFnConfig::default())
}

pub fn exp_integral_e1_with(x: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::domain(format!("E_1 requires x > 0, got {x}")));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x <= cfg.e1_switch_point {
        Ok(e1_series(x))
    } else {
        e1_continued_fraction(x)
    }
}

fn e1_series(x: f64) -> f64 {
    // E_1(x) = -γ - ln x + Σ_{k≥1} (-1)^(k+1) x^k / (k·k!)
    let mut sum = Compensated::new(0.0);
    let mut fact_term = 1.0; // (-1)^(k+1) x^k / k!
    for k in 1..200u32 {
        fact_term *= if k == 1 { x } else { -x / k as f64 };
        let term = fact_term / k as f64;
        sum.add(term);
        if term.abs() < 1e-18 * sum.value().abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum.value()
}

fn e1_continued_fraction(x: f64) -> Result<f64> {
    // Modified Lentz evaluation of e^x E_1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))).
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000u32 {
        let an = -((i as f64) * (i as f64));
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(h * (-x).exp());
        }
    }
    Err(Error::Numerical(format!(
        "E_1 continued fraction did not converge at x = {x}"
    )))
}

/// Successive values `g_1(a), g_2(a), ...` of the recursion.
///
/// Yields `Err(GOverflow)` once the value is no longer a finite double and
/// stops afterwards.
#[derive(Debug, Clone)]
pub struct GSeries {
    a: f64,
    next_n: u64,
    acc: Compensated,
    done: bool,
}

impl GSeries {
    pub fn new(a: f64) -> Result<Self> {
        check_a(a)?;
        Ok(GSeries {
            a,
            next_n: 1,
            acc: Compensated::new(0.0),
            done: false,
        })
    }
}

impl Iterator for GSeries {
    type Item = Result<f64>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let n = self.next_n;
        if n == 1 {
            self.acc = Compensated::new(-self.a.ln_1p() + 0.0);
        } else {
            let k = n - 1;
            let power = if k <= i32::MAX as u64 {
                self.a.powi(k as i32)
            } else {
                self.a.powf(k as f64)
            };
            let magnitude = power / k as f64;
            self.acc
                .add(if k % 2 == 1 { magnitude } else { -magnitude });
        }
        self.next_n += 1;
        let v = self.acc.value();
        if v.is_finite() {
            Some(Ok(v))
        } else {
            self.done = true;
            Some(Err(Error::GOverflow { n, a: self.a }))
        }
    }
}

fn check_a(a: f64) -> Result<()> {
    if a >= 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "parameter a must be finite and >= 0, got {a}"
        )))
    }
}

struct UnitGTable {
    values: Vec<f64>,
    series: GSeries,
}

static UNIT_G: RwLock<Option<UnitGTable>> = RwLock::new(None);

fn unit_g(n: u64) -> f64 {
    let idx = (n - 1) as usize;
    {
        let guard = UNIT_G.read().expect("g table poisoned");
        if let Some(v) = guard.as_ref().and_then(|t| t.values.get(idx)) {
            return *v;
        }
    }
    let mut guard = UNIT_G.write().expect("g table poisoned");
    let table = guard.get_or_insert_with(|| UnitGTable {
        values: Vec::new(),
        series: GSeries::new(1.0).expect("a = 1 is valid"),
    });
    let want = (n as usize)
        .max(2 * table.values.len())
        .clamp(64, TABLE_CAP);
    while table.values.len() < want {
        // |g_n(1)| <= ln 2, so the unit series never overflows.
        let v = table.series.next().expect("unbounded").expect("finite");
        table.values.push(v);
    }
    table.values[idx]
}

/// `g_n(a) = (-1)^n ∫_0^a x^(n-1)/(x+1) dx` by recursion.
pub fn g_signed(n: u64, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("g_n requires n >= 1"));
    }
    check_a(a)?;
    if a == 1.0 && n as usize <= TABLE_CAP {
        return Ok(unit_g(n));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let mut series = GSeries::new(a)?;
    let mut last = 0.0;
    for _ in 0..n {
        last = series.next().expect("series yields until overflow")?;
    }
    Ok(last)
}

/// `G_n(a) = ψ(n) + g_n(a)`.
pub fn big_g_a(n: u64, a: f64) -> Result<f64> {
    let psi = digamma(n)?;
    let g = g_signed(n, a)?;
    Ok(psi + g)
}

/// Grassberger's `G_n = G_n(1)`.
pub fn big_g(n: u64) -> Result<f64> {
    big_g_a(n, 1.0)
}

/// `G_1(a), ..., G_nmax(a)`; entries past the first overflow are `+∞`.
///
/// Each entry is bit-identical to [`big_g_a`] at the same `(n, a)`.
pub(crate) fn big_g_a_table(a: f64, n_max: u64) -> Result<Vec<f64>> {
    check_a(a)?;
    let mut out = Vec::with_capacity(n_max as usize);
    if a == 1.0 || a == 0.0 {
        for n in 1..=n_max {
            out.push(big_g_a(n, a)?);
        }
        return Ok(out);
    }
    let mut series = GSeries::new(a)?;
    for n in 1..=n_max {
        match series.next() {
            Some(Ok(g)) => out.push(digamma(n)? + g),
            _ => {
                out.resize(n_max as usize, f64::INFINITY);
                break;
            }
        }
    }
    Ok(out)
}

/// `g_n(a)` by adaptive quadrature of its defining integral, independent of
/// the recursion.
pub fn quadrature_g(n: u64, a: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("g_n requires n >= 1"));
    }
    check_a(a)?;
    cfg.validate()?;
    let power = (n - 1) as i32;
    let tol = Tolerance::absolute(cfg.quadrature_abs_tol).with_rel(cfg.quadrature_abs_tol);
    let q = integrate(|x| x.powi(power) / (x + 1.0), 0.0, a, tol)?;
    Ok(if n.is_multiple_of(2) {
        q.value
    } else {
        -q.value
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn digamma_small_values() {
        assert_eq!(digamma(1).unwrap(), -EULER_GAMMA);
        assert!((digamma(2).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        // Σ_{k=1}^{9} 1/k − γ
        let h9: f64 = (1..=9).map(|k| 1.0 / k as f64).sum();
        assert!((digamma(10).unwrap() - (h9 - EULER_GAMMA)).abs() < 1e-14);
        assert!((digamma(10).unwrap() - 2.251_752_589_066_721).abs() < 1e-12);
    }

    #[test]
    fn digamma_rejects_zero() {
        assert!(matches!(digamma(0), Err(Error::Domain(_))));
    }

    #[test]
    fn digamma_asymptotic_joins_table() {
        let n = TABLE_CAP as u64;
        let tabulated = digamma(n).unwrap();
        let asym = psi_asymptotic(n);
        assert!((tabulated - asym).abs() < 1e-13, "{tabulated} vs {asym}");
        let above = digamma(n + 1).unwrap();
        assert!((above - tabulated - 1.0 / n as f64).abs() < 1e-14);
    }

    #[test]
    fn e1_domain_and_limits() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(exp_integral_e1(f64::NAN).is_err());
        assert_eq!(exp_integral_e1(f64::INFINITY).unwrap(), 0.0);
        assert!(exp_integral_e1(700.0).unwrap() < 1e-300);
    }

    #[test]
    fn e1_branches_agree_at_switch() {
        let cfg_series = SpecialFnConfig {
            e1_switch_point: 3.0,
            ..Default::default()
        };
        for &x in &[0.5, 1.0, 1.5, 2.0, 2.9] {
            let a = exp_integral_e1_with(x, &cfg_series).unwrap();
            let b = e1_continued_fraction(x).unwrap();
            assert!((a - b).abs() < 1e-13, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn g_signed_reference_values() {
        assert!((g_signed(1, 1.0).unwrap() + LN2).abs() < 1e-15);
        assert!((g_signed(2, 1.0).unwrap() - (1.0 - LN2)).abs() < 1e-15);
        for n in 1..20 {
            assert_eq!(g_signed(n, 0.0).unwrap(), 0.0);
        }
        assert!(g_signed(0, 1.0).is_err());
        assert!(g_signed(3, -0.1).is_err());
    }

    #[test]
    fn big_g_reference_values() {
        assert!((big_g_a(1, 1.0).unwrap() - (-EULER_GAMMA - LN2)).abs() < 1e-15);
        assert!((big_g(2).unwrap() - (2.0 - EULER_GAMMA - LN2)).abs() < 1e-15);
        assert!((big_g(2).unwrap() - 0.729_637_154_5).abs() < 1e-10);
        assert_eq!(big_g(3).unwrap(), big_g(2).unwrap());
        assert!((big_g(4).unwrap() - big_g(2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let expected = (1.0 - EULER_GAMMA) + (3.0 - 4f64.ln());
        assert!((big_g_a(2, 3.0).unwrap() - expected).abs() < 1e-14);
        for n in 1..30 {
            assert_eq!(big_g_a(n, 0.0).unwrap(), digamma(n).unwrap());
        }
    }

    #[test]
    fn overflow_is_signalled() {
        let err = g_signed(2000, 3.0).unwrap_err();
        assert!(matches!(err, Error::GOverflow { a, .. } if a == 3.0));
        let table = big_g_a_table(3.0, 2000).unwrap();
        assert!(table[10].is_finite());
        assert!(table[1999].is_infinite());
    }

    #[test]
    fn table_matches_pointwise() {
        for &a in &[0.0, 0.25, 1.0, 3.0, 7.0] {
            let t = big_g_a_table(a, 50).unwrap();
            for (i, v) in t.iter().enumerate() {
                assert_eq!(*v, big_g_a(i as u64 + 1, a).unwrap(), "a={a} n={}", i + 1);
            }
        }
    }

    #[test]
    fn quadrature_g_matches_closed_forms() {
        let cfg = SpecialFnConfig::default();
        assert!((quadrature_g(1, 1.0, &cfg).unwrap() + LN2).abs() < 1e-12);
        assert_eq!(quadrature_g(4, 0.0, &cfg).unwrap(), 0.0);
        let r = g_signed(5, 2.0).unwrap();
        let q = quadrature_g(5, 2.0, &cfg).unwrap();
        assert!((r - q).abs() < 1e-10, "{r} vs {q}");
    }

    #[test]
    fn config_validation() {
        let bad = SpecialFnConfig {
            quadrature_abs_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SpecialFnConfig {
            e1_switch_point: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
