//! Special functions: harmonic-oscillator basis functions, the scaled
//! parabolic cylinder integral 𝔇(ν, x), Hermite overlap integrals and the
//! regularized confluent hypergeometric polynomial.

use std::f64::consts::PI;

use statrs::function::factorial::ln_factorial;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Harmonic-oscillator level `n`. Indexes rows and columns of density matrices.
pub type BasisIndex = usize;

/// Largest Hermite order accepted by [`hermite_fn`].
pub const HERMITE_ORDER_CAP: usize = 512;

/// Largest order accepted by the unnormalized [`hermite_overlap`]; beyond this the
/// value leaves the range of `f64`.
pub const OVERLAP_ORDER_CAP: usize = 150;

/// Above this order [`ScriptD`] reports its value as log-scaled.
pub const SCRIPT_D_LOG_THRESHOLD: f64 = 30.0;

fn check_order(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::OrderTooLarge { order: n, cap })
    } else {
        Ok(())
    }
}

/// Normalized Hermite function `h_n(x) = (√π 2ⁿ n!)^{-1/2} H_n(x) e^{-x²/2}`.
pub fn hermite_fn(n: BasisIndex, x: f64) -> Result<f64> {
    check_order(n, HERMITE_ORDER_CAP)?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x must be finite, got {x}")));
    }
    Ok(hermite_fn_unchecked(n, x))
}

pub(crate) fn hermite_fn_unchecked(n: BasisIndex, x: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * x * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `h_0(x), …, h_{n_max}(x)` from the normalized three-term recurrence.
pub fn hermite_fns(n_max: BasisIndex, x: f64) -> Result<Vec<f64>> {
    check_order(n_max, HERMITE_ORDER_CAP)?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x must be finite, got {x}")));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if n_max == 0 {
        return Ok(out);
    }
    out.push(std::f64::consts::SQRT_2 * x * h0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    Ok(out)
}

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `1/Γ(x)`, exactly zero at the poles `x = 0, -1, -2, …`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `₁F̃₁(-n; b; z) = Σ_{s=0}^{n} (-n)_s z^s / (s! Γ(b+s))`.
///
/// Terms whose `Γ(b+s)` sits on a pole vanish, which keeps the value finite for
/// non-positive integer `b`.
pub fn regularized_1f1_neg_int(n: usize, b: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    // (-n)_s z^s / s!, built incrementally
    let mut coef = 1.0;
    for s in 0..=n {
        if s > 0 {
            let sf = s as f64;
            coef *= (sf - 1.0 - n as f64) * z / sf;
        }
        sum += coef * reciprocal_gamma(b + s as f64);
    }
    sum
}

/// `∫ e^{-z²/2 - (z-ζ)²/2} H_n(z) H_p(z-ζ) dz` over the real line.
///
/// For `p ≥ n` this is the tabulated closed form
/// `√π e^{-ζ²/4} 2ⁿ p! (-ζ)^{p-n} ₁F̃₁(-n; p-n+1; ζ²/2)`. For `p < n` the
/// identity `I(n, p, ζ) = (-1)^{n+p} I(p, n, ζ)` keeps the power of ζ
/// non-negative. Normalizing by `(√π 2ⁿ n!)^{-1/2} (√π 2ᵖ p!)^{-1/2}` gives
/// `∫ h_n(u + ζ) h_p(u) du`.
pub fn hermite_overlap(n: BasisIndex, p: BasisIndex, zeta: f64) -> Result<f64> {
    check_order(n.max(p), OVERLAP_ORDER_CAP)?;
    if !zeta.is_finite() {
        return Err(Error::InvalidArgument(format!("zeta must be finite, got {zeta}")));
    }
    if p < n {
        let sign = if (n + p) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * hermite_overlap(p, n, zeta)?);
    }
    let ln_prefactor = 0.5 * PI.ln() - 0.25 * zeta * zeta + n as f64 * std::f64::consts::LN_2 + ln_factorial(p as u64);
    let power = (-zeta).powi((p - n) as i32);
    let series = regularized_1f1_neg_int(n, (p - n + 1) as f64, 0.5 * zeta * zeta);
    Ok(ln_prefactor.exp() * power * series)
}

/// One monomial `coef · z^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub power: usize,
    pub coef: f64,
}

/// Polynomial part of the normalized shifted overlap:
/// `∫ h_n(u + z) h_p(u) du = e^{-z²/4} Σ coef · z^power`.
///
/// Expanding the closed form of [`hermite_overlap`] term by term gives
/// `coef_s = (-1)^{s+p-n} √(2^{n-p} n! p!) / (2^s s! (n-s)! (p-n+s)!)` at power
/// `2s + p - n`, for the `s` where `p - n + s ≥ 0`.
pub fn shifted_overlap_polynomial(n: BasisIndex, p: BasisIndex) -> Vec<Monomial> {
    let ln2 = std::f64::consts::LN_2;
    let base = 0.5 * ((n as f64 - p as f64) * ln2 + ln_factorial(n as u64) + ln_factorial(p as u64));
    let s_min = n.saturating_sub(p);
    (s_min..=n)
        .map(|s| {
            let shift = p + s - n;
            let ln_mag = base
                - s as f64 * ln2
                - ln_factorial(s as u64)
                - ln_factorial((n - s) as u64)
                - ln_factorial(shift as u64);
            let sign = if shift % 2 == 0 { 1.0 } else { -1.0 };
            Monomial {
                power: s + shift,
                coef: sign * ln_mag.exp(),
            }
        })
        .collect()
}

/// Product of two monomial lists, combined by power and sorted ascending.
pub fn multiply_polynomials(a: &[Monomial], b: &[Monomial]) -> Vec<Monomial> {
    let max_power = a.iter().map(|m| m.power).max().unwrap_or(0) + b.iter().map(|m| m.power).max().unwrap_or(0);
    let mut dense = vec![0.0; max_power + 1];
    let mut used = vec![false; max_power + 1];
    for x in a {
        for y in b {
            dense[x.power + y.power] += x.coef * y.coef;
            used[x.power + y.power] = true;
        }
    }
    dense
        .into_iter()
        .enumerate()
        .filter(|(r, _)| used[*r])
        .map(|(power, coef)| Monomial { power, coef })
        .collect()
}

/// The scaled parabolic cylinder function
/// `𝔇(ν, x) = Γ(ν) e^{x²/4} D_{-ν}(x) = ∫₀^∞ t^{ν-1} e^{-t²/2 - x t} dt`.
///
/// Values grow factorially in ν, so for `ν > 30` the value is carried in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptD {
    pub nu: f64,
    pub x: f64,
    value: f64,
    log_scaled: bool,
}

impl ScriptD {
    pub fn new(nu: f64, x: f64) -> Result<Self> {
        let ln = ln_script_d(nu, x)?;
        let log_scaled = nu > SCRIPT_D_LOG_THRESHOLD;
        Ok(Self {
            nu,
            x,
            value: if log_scaled { ln } else { ln.exp() },
            log_scaled,
        })
    }

    pub fn is_log_scaled(&self) -> bool {
        self.log_scaled
    }

    /// Raw value; may be `inf` for very large ν.
    pub fn value(&self) -> f64 {
        if self.log_scaled {
            self.value.exp()
        } else {
            self.value
        }
    }

    pub fn ln_value(&self) -> f64 {
        if self.log_scaled {
            self.value
        } else {
            self.value.ln()
        }
    }
}

/// `𝔇(ν, x)`; see [`ScriptD`].
pub fn script_d(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_script_d(nu, x)?.exp())
}

/// `ln 𝔇(ν, x)`, computed by adaptive quadrature of the defining integral with
/// the integrand scaled by its maximum.
pub fn ln_script_d(nu: f64, x: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "𝔇(ν, x) needs ν > 0 (the defining integral diverges at t = 0), got ν = {nu}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x must be finite, got {x}")));
    }
    let tol = Tolerance::new(0.0, 1e-14).with_max_intervals(500);

    if nu < 1.0 {
        // t = s^{1/ν} removes the t^{ν-1} singularity at the origin
        let t_peak = (-x).max(0.0);
        let phi_max = -0.5 * t_peak * t_peak - x * t_peak;
        let t_max = decay_point(
            |t| -0.5 * t * t - x * t - phi_max,
            t_peak,
            1.0 / (x.max(0.0) + 1.0),
            1.0,
        );
        let inv = 1.0 / nu;
        let f = |s: f64| {
            let t = s.powf(inv);
            (-0.5 * t * t - x * t - phi_max).exp()
        };
        let est = quadrature::integrate(f, 0.0, t_max.powf(nu), tol)?;
        return Ok(phi_max + (est.value / nu).ln());
    }

    let a = nu - 1.0;
    let t_peak = 0.5 * (-x + (x * x + 4.0 * a).sqrt());
    let phi = |t: f64| {
        let log_part = if a == 0.0 { 0.0 } else { a * t.ln() };
        log_part - 0.5 * t * t - x * t
    };
    let phi_peak = if t_peak > 0.0 { phi(t_peak) } else { 0.0 };
    let rel = |t: f64| {
        if t <= 0.0 {
            if a == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            phi(t) - phi_peak
        }
    };
    // natural scale: curvature at an interior peak, slope at the origin otherwise
    let width = if t_peak > 0.0 {
        1.0 / (a / (t_peak * t_peak) + 1.0).sqrt()
    } else {
        1.0 / (x.max(0.0) + 1.0)
    };
    let hi = decay_point(rel, t_peak, width, 1.0);
    let lo = if t_peak > 0.0 {
        decay_point(rel, t_peak, width, -1.0)
    } else {
        0.0
    };
    let f = |t: f64| rel(t).exp();
    let breaks: Vec<f64> = if t_peak > lo {
        vec![lo, t_peak, hi]
    } else {
        vec![lo, hi]
    };
    let est = quadrature::integrate_with_breaks(f, &breaks, tol)?;
    Ok(phi_peak + est.value.ln())
}

/// First point, stepping from `start` in direction `dir` with doubling steps,
/// where the log-integrand `rel` has dropped below −45 (clamped at t = 0).
fn decay_point<F: Fn(f64) -> f64>(rel: F, start: f64, width: f64, dir: f64) -> f64 {
    let mut step = width;
    loop {
        let t = start + dir * step;
        if t <= 0.0 {
            return 0.0;
        }
        if rel(t) < -45.0 || step > 1e6 {
            return t;
        }
        step *= 2.0;
    }
}

/// `𝔇(ν, x)` tabulated at integer orders `ν = 1, …, nu_max` for one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptDTable {
    x: f64,
    ln_values: Vec<f64>,
}

impl ScriptDTable {
    pub fn new(x: f64, nu_max: usize) -> Result<Self> {
        let ln_values = (1..=nu_max.max(1))
            .map(|nu| ln_script_d(nu as f64, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { x, ln_values })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn nu_max(&self) -> usize {
        self.ln_values.len()
    }

    /// Grow the table so it covers `nu_max`.
    pub fn extend_to(&mut self, nu_max: usize) -> Result<()> {
        for nu in self.ln_values.len() + 1..=nu_max {
            self.ln_values.push(ln_script_d(nu as f64, self.x)?);
        }
        Ok(())
    }

    /// `ln 𝔇(ν, x)`. Panics if `ν` is zero or outside the table.
    pub fn ln(&self, nu: usize) -> f64 {
        self.ln_values[nu - 1]
    }

    pub fn get(&self, nu: usize) -> f64 {
        self.ln(nu).exp()
    }

    /// Test hook: scale the stored `𝔇(ν, x)` by `factor`.
    pub fn perturb(&mut self, nu: usize, factor: f64) {
        self.ln_values[nu - 1] += factor.ln();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_ground_state_and_parity() {
        let h0 = hermite_fn(0, 0.0).unwrap();
        assert!((h0 - PI.powf(-0.25)).abs() < 1e-15);
        assert!((h0 - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(hermite_fn(1, 0.0).unwrap(), 0.0);
        for n in 0..12 {
            let a = hermite_fn(n, 0.83).unwrap();
            let b = hermite_fn(n, -0.83).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - sign * b).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_rejects_large_order() {
        assert_eq!(hermite_fn(513, 0.0), Err(Error::OrderTooLarge { order: 513, cap: 512 }));
        assert!(hermite_fn(512, 3.0).unwrap().is_finite());
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7;
        assert!((laguerre(2, 0.0, x) - 0.5 * (x * x - 4.0 * x + 2.0)).abs() < 1e-15);
        assert!((laguerre(1, 3.0, x) - (4.0 - x)).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_gamma_poles() {
        assert_eq!(reciprocal_gamma(0.0), 0.0);
        assert_eq!(reciprocal_gamma(-3.0), 0.0);
        assert!((reciprocal_gamma(4.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn one_f_one_trivial_cases() {
        let g = gamma(2.5);
        assert!((regularized_1f1_neg_int(0, 2.5, 7.0) - 1.0 / g).abs() < 1e-15);
        assert!(regularized_1f1_neg_int(1, 1.0, 1.0).abs() < 1e-15);
    }

    #[test]
    fn script_d_trivial_values() {
        assert!((script_d(1.0, 0.0).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-14);
        assert!((script_d(2.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(script_d(0.0, 1.0).is_err());
        assert!(script_d(-1.0, 1.0).is_err());
    }

    #[test]
    fn script_d_log_scaling_switch() {
        let small = ScriptD::new(5.0, 1.0).unwrap();
        assert!(!small.is_log_scaled());
        let big = ScriptD::new(80.0, 1.0).unwrap();
        assert!(big.is_log_scaled());
        assert!((big.ln_value() - ln_script_d(80.0, 1.0).unwrap()).abs() < 1e-15);
        assert!((small.value().ln() - small.ln_value()).abs() < 1e-14);
    }

    #[test]
    fn table_matches_direct_values() {
        let mut table = ScriptDTable::new(0.9, 4).unwrap();
        table.extend_to(9).unwrap();
        assert_eq!(table.nu_max(), 9);
        for nu in 1..=9 {
            let direct = script_d(nu as f64, 0.9).unwrap();
            assert!((table.get(nu) / direct - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn overlap_polynomial_ground_row() {
        // ∫ h_m(u + z) h_0(u) du = z^m e^{-z²/4} / √(2^m m!)
        for m in 0..8 {
            let poly = shifted_overlap_polynomial(m, 0);
            assert_eq!(poly.len(), 1);
            assert_eq!(poly[0].power, m);
            let expect = 1.0 / ((2f64).powi(m as i32) * statrs::function::factorial::factorial(m as u64)).sqrt();
            assert!((poly[0].coef - expect).abs() < 1e-15);
        }
    }
}
