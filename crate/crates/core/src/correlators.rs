//! Vacuum four-point functions of smeared anyon fields.
//!
//! With Hermite smearing functions the correlator
//! `⟨0|Ψ_{h_m} Ψ_{h_k} Ψ†_{h_j} Ψ†_{h_i}|0⟩` reduces to
//!
//! ```text
//! δ_kj δ_mi + δ_ki δ_mj − 2η ∫₀^∞ e^{−ηz} G_jm(z) G_ki(z) dz,
//! G_ab(z) = ∫ h_a(u + z) h_b(u) du,
//! ```
//!
//! because the double integral over the two positions factorizes. The
//! z-integral is done either by expanding both overlaps into Gaussian-weighted
//! polynomials and integrating term by term (each monomial yields one
//! `𝔇(r + 1, η)`), or by direct adaptive quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::special_fns::{
    hermite_fn_unchecked, laguerre, multiply_polynomials, shifted_overlap_polynomial, BasisIndex, Monomial,
    ScriptDTable,
};

/// Largest index accepted by [`four_point_oracle`].
pub const ORACLE_INDEX_CAP: usize = 12;

/// Relative cancellation tolerated in the term-by-term series before it is
/// reported as unreliable.
const SERIES_LOSS_TOL: f64 = 1e-9;

/// The exchange-statistics parameter η: 0 is bosonic, ∞ fermionic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StatisticsParameter(f64);

impl StatisticsParameter {
    pub fn new(eta: f64) -> Result<Self> {
        if eta.is_finite() && eta >= 0.0 {
            Ok(Self(eta))
        } else {
            Err(Error::InvalidArgument(format!(
                "statistics parameter must be finite and non-negative, got {eta}"
            )))
        }
    }

    pub fn bosonic() -> Self {
        Self(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_bosonic(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for StatisticsParameter {
    type Error = Error;
    fn try_from(eta: f64) -> Result<Self> {
        Self::new(eta)
    }
}

impl From<StatisticsParameter> for f64 {
    fn from(eta: StatisticsParameter) -> f64 {
        eta.0
    }
}

/// Momentum-space exchange factor `e^{iφ_η(Δk)} = (Δk + iη)/(Δk − iη)`.
///
/// Equals 1 at η = 0 for every Δk, −1 at Δk = 0 for η ≠ 0, and −1 for η = ±∞.
pub fn exchange_phase(delta_k: f64, eta: f64) -> Complex64 {
    if eta == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if eta.is_infinite() {
        return Complex64::new(-1.0, 0.0);
    }
    let num = Complex64::new(delta_k, eta);
    // unit modulus: divide by the conjugate as num / conj = num² / |num|²
    let sq = num * num;
    sq / num.norm_sqr()
}

/// Phase angle `φ_η(Δk) = 2 arctan(η/Δk)`, with `φ = π·sgn(η)` at Δk = 0.
pub fn exchange_angle(delta_k: f64, eta: f64) -> f64 {
    if eta == 0.0 {
        0.0
    } else if delta_k == 0.0 {
        std::f64::consts::PI.copysign(eta)
    } else {
        2.0 * (eta / delta_k).atan()
    }
}

/// Shifted overlap `G_ab(z) = ∫ h_a(u + z) h_b(u) du`.
///
/// Evaluated through the associated Laguerre form
/// `G_ab(z) = e^{−z²/4} (−z/√2)^{b−a} √(a!/b!) L_a^{(b−a)}(z²/2)` for `a ≤ b`
/// (and `G_ab(z) = G_ba(−z)`), which is the normalized Hermite overlap
/// integral and stays stable for large indices.
pub fn overlap_kernel(a: BasisIndex, b: BasisIndex, z: f64) -> f64 {
    let (lo, hi, arg) = if a <= b { (a, b, -z) } else { (b, a, z) };
    let diff = hi - lo;
    let x = 0.5 * z * z;
    let lag = laguerre(lo, diff as f64, x);
    if diff > 0 && arg == 0.0 {
        return 0.0;
    }
    let power = if diff > 0 {
        diff as f64 * (arg.abs() / std::f64::consts::SQRT_2).ln()
    } else {
        0.0
    };
    let ln_mag = power + 0.5 * (ln_factorial(lo as u64) - ln_factorial(hi as u64)) - 0.25 * z * z;
    let sign = if arg < 0.0 && diff % 2 == 1 { -1.0 } else { 1.0 };
    sign * ln_mag.exp() * lag
}

/// Index tuple for `⟨0|Ψ_{h_m} Ψ_{h_k} Ψ†_{h_j} Ψ†_{h_i}|0⟩` at statistics η.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPointSpec {
    pub m: BasisIndex,
    pub k: BasisIndex,
    pub j: BasisIndex,
    pub i: BasisIndex,
    pub eta: StatisticsParameter,
}

impl FourPointSpec {
    pub fn new(m: BasisIndex, k: BasisIndex, j: BasisIndex, i: BasisIndex, eta: StatisticsParameter) -> Self {
        Self { m, k, j, i, eta }
    }

    /// The two δ-terms, i.e. the bosonic value.
    pub fn contact_term(&self) -> f64 {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        d(self.k, self.j) * d(self.m, self.i) + d(self.k, self.i) * d(self.m, self.j)
    }

    fn max_index(&self) -> usize {
        self.m.max(self.k).max(self.j).max(self.i)
    }
}

/// How the z-integral of the four-point kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourPointMethod {
    /// Term-by-term integration of the overlap polynomials into 𝔇 values.
    #[default]
    Series,
    /// Adaptive quadrature of `e^{−ηz} G_jm(z) G_ki(z)`.
    Quadrature,
}

/// Evaluates four-point functions at a fixed η, holding the 𝔇 table.
///
/// Immutable after construction, so one evaluator can be shared by worker threads.
#[derive(Debug, Clone)]
pub struct FourPointEvaluator {
    eta: StatisticsParameter,
    method: FourPointMethod,
    table: Option<ScriptDTable>,
    max_index: usize,
}

impl FourPointEvaluator {
    /// Evaluator for all index tuples with entries `≤ max_index`.
    pub fn new(eta: StatisticsParameter, max_index: usize, method: FourPointMethod) -> Result<Self> {
        let table = if eta.is_bosonic() || method == FourPointMethod::Quadrature {
            None
        } else {
            Some(ScriptDTable::new(eta.value(), 4 * max_index + 1)?)
        };
        Ok(Self {
            eta,
            method,
            table,
            max_index,
        })
    }

    /// Series evaluator using a caller-supplied 𝔇 table (e.g. a perturbed one).
    pub fn with_table(eta: StatisticsParameter, table: ScriptDTable) -> Result<Self> {
        if table.x() != eta.value() {
            return Err(Error::InvalidArgument(format!(
                "table argument {} does not match η = {}",
                table.x(),
                eta.value()
            )));
        }
        let max_index = table.nu_max().saturating_sub(1) / 4;
        Ok(Self {
            eta,
            method: FourPointMethod::Series,
            table: Some(table),
            max_index,
        })
    }

    pub fn eta(&self) -> StatisticsParameter {
        self.eta
    }

    pub fn method(&self) -> FourPointMethod {
        self.method
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn eval(&self, m: BasisIndex, k: BasisIndex, j: BasisIndex, i: BasisIndex) -> Result<f64> {
        let spec = FourPointSpec::new(m, k, j, i, self.eta);
        if spec.max_index() > self.max_index {
            return Err(Error::OrderTooLarge {
                order: spec.max_index(),
                cap: self.max_index,
            });
        }
        let contact = spec.contact_term();
        if self.eta.is_bosonic() {
            return Ok(contact);
        }
        let kernel = match self.method {
            FourPointMethod::Series => self.kernel_series(&spec)?,
            FourPointMethod::Quadrature => kernel_quadrature(&spec)?,
        };
        Ok(contact - kernel)
    }

    /// `2η Σ_r q_r 𝔇(r + 1, η)` where `Σ_r q_r z^r` is the overlap product.
    fn kernel_series(&self, spec: &FourPointSpec) -> Result<f64> {
        let table = self.table.as_ref().expect("series evaluator carries a table");
        let poly = kernel_polynomial(spec);
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for term in &poly {
            if term.coef == 0.0 {
                continue;
            }
            let t = term.coef.signum() * (term.coef.abs().ln() + table.ln(term.power + 1)).exp();
            sum += t;
            abs_sum += t.abs();
        }
        let eta = self.eta.value();
        let loss = 2.0 * eta * abs_sum * f64::EPSILON * poly.len() as f64;
        if loss > SERIES_LOSS_TOL {
            return Err(Error::SeriesNotConverged {
                terms: poly.len(),
                tail: loss,
            });
        }
        Ok(2.0 * eta * sum)
    }
}

/// Polynomial `q(z)` with `G_jm(z) G_ki(z) = e^{−z²/2} q(z)`.
pub fn kernel_polynomial(spec: &FourPointSpec) -> Vec<Monomial> {
    multiply_polynomials(
        &shifted_overlap_polynomial(spec.j, spec.m),
        &shifted_overlap_polynomial(spec.k, spec.i),
    )
}

/// Radius beyond which `h_n` is negligible at double precision.
pub(crate) fn support_radius(n: usize) -> f64 {
    (2.0 * n as f64 + 1.0).sqrt() + 9.0
}

fn z_cutoff(spec: &FourPointSpec) -> f64 {
    let overlap = |a: usize, b: usize| support_radius(a) + support_radius(b) - 4.0;
    let geometric = overlap(spec.j, spec.m).min(overlap(spec.k, spec.i));
    geometric.min(45.0 / spec.eta.value())
}

fn kernel_quadrature(spec: &FourPointSpec) -> Result<f64> {
    let eta = spec.eta.value();
    let f = |z: f64| (-eta * z).exp() * overlap_kernel(spec.j, spec.m, z) * overlap_kernel(spec.k, spec.i, z);
    let est = quadrature::integrate(f, 0.0, z_cutoff(spec), Tolerance::new(1e-15, 1e-13))?;
    Ok(2.0 * eta * est.value)
}

/// Four-point function by the series route.
pub fn four_point(spec: FourPointSpec) -> Result<f64> {
    four_point_with(spec, FourPointMethod::Series)
}

pub fn four_point_with(spec: FourPointSpec, method: FourPointMethod) -> Result<f64> {
    FourPointEvaluator::new(spec.eta, spec.max_index(), method)?.eval(spec.m, spec.k, spec.j, spec.i)
}

/// Brute-force four-point function: nested adaptive quadrature over z and
/// both positions using only pointwise Hermite functions.
pub fn four_point_oracle(spec: FourPointSpec) -> Result<f64> {
    if spec.max_index() > ORACLE_INDEX_CAP {
        return Err(Error::OrderTooLarge {
            order: spec.max_index(),
            cap: ORACLE_INDEX_CAP,
        });
    }
    let contact = spec.contact_term();
    if spec.eta.is_bosonic() {
        return Ok(contact);
    }
    let eta = spec.eta.value();
    let outer = |z: f64| -> Result<f64> {
        // ∫ dy h_m(y − z) h_j(y)
        let y_part = brute_force_overlap(spec.m, spec.j, z)?;
        // ∫ dx h_k(x) h_i(x − z)
        let x_part = brute_force_overlap(spec.i, spec.k, z)?;
        Ok((-eta * z).exp() * y_part * x_part)
    };
    let est = quadrature::try_integrate(outer, 0.0, z_cutoff(&spec), Tolerance::new(1e-14, 1e-12))?;
    Ok(contact - 2.0 * eta * est.value)
}

/// `∫ h_a(y − z) h_b(y) dy` by adaptive quadrature.
pub(crate) fn brute_force_overlap(a: BasisIndex, b: BasisIndex, z: f64) -> Result<f64> {
    let ra = support_radius(a);
    let rb = support_radius(b);
    let lo = (-rb).max(z - ra);
    let hi = rb.min(z + ra);
    if lo >= hi {
        return Ok(0.0);
    }
    let f = |y: f64| hermite_fn_unchecked(a, y - z) * hermite_fn_unchecked(b, y);
    Ok(quadrature::integrate(f, lo, hi, Tolerance::new(1e-15, 1e-13))?.value)
}

/// `|Σ_{m,k<cap} ⟨0|Ψ_m Ψ_k Ψ†_j Ψ†_i|0⟩² − 2 ⟨0|Ψ_i Ψ_j Ψ†_j Ψ†_i|0⟩|`.
///
/// The first sum is `⟨Φ|n̂|Φ⟩` for the unnormalized state `Ψ†_j Ψ†_i|0⟩`
/// once `Ψ_k Ψ†_j Ψ†_i|0⟩` is expanded in the Hermite basis; `[N̂, Ψ†] = Ψ†`
/// requires it to equal twice the squared norm.
pub fn number_commutator_check(j: BasisIndex, i: BasisIndex, eta: StatisticsParameter, cap: usize) -> Result<f64> {
    let eval = FourPointEvaluator::new(eta, cap.max(j + 1).max(i + 1), FourPointMethod::Series)?;
    let mut total = 0.0;
    for m in 0..cap {
        for k in 0..cap {
            let v = eval.eval(m, k, j, i)?;
            total += v * v;
        }
    }
    let norm = eval.eval(i, j, j, i)?;
    Ok((total - 2.0 * norm).abs())
}

/// The two orderings of the creation-operator exchange relation, projected on
/// `⟨0|Ψ_{h_m} Ψ_{h_k}` and applied to `h_j ⊗ h_i`:
///
/// ```text
/// first  = −2η ∫ dz e^{−ηz} ⟨0|Ψ_m Ψ_k Ψ†[h_i(·−z)] Ψ†[h_j(·+z)]|0⟩
/// second = +2η ∫ dz e^{−ηz} ⟨0|Ψ_m Ψ_k Ψ†[h_j(·−z)] Ψ†[h_i(·+z)]|0⟩
/// ```
///
/// The shifted smearing functions are expanded in the Hermite basis up to
/// `basis_cap`. Returns `(first, second)`.
pub fn creation_exchange_forms(spec: FourPointSpec, basis_cap: usize) -> Result<(f64, f64)> {
    let eta = spec.eta.value();
    if spec.eta.is_bosonic() {
        return Ok((0.0, 0.0));
    }
    let eval = FourPointEvaluator::new(spec.eta, basis_cap.max(spec.max_index() + 1), FourPointMethod::Series)?;
    let mut corr = vec![vec![0.0; basis_cap]; basis_cap];
    for (a, row) in corr.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = eval.eval(spec.m, spec.k, a, b)?;
        }
    }
    // h_f(u − z) = Σ_a G_{a f}(z) h_a(u) and h_g(u + z) = Σ_b G_{g b}(z) h_b(u)
    let contract = |left: usize, right: usize, z: f64| {
        let mut s = 0.0;
        for (a, row) in corr.iter().enumerate() {
            let ca = overlap_kernel(a, left, z);
            if ca == 0.0 {
                continue;
            }
            for (b, v) in row.iter().enumerate() {
                s += ca * overlap_kernel(right, b, z) * v;
            }
        }
        s
    };
    let cutoff = (support_radius(spec.i) + support_radius(spec.j)).min(45.0 / eta);
    let tol = Tolerance::new(1e-13, 1e-11);
    let first = quadrature::integrate(|z| (-eta * z).exp() * contract(spec.i, spec.j, z), 0.0, cutoff, tol)?;
    let second = quadrature::integrate(|z| (-eta * z).exp() * contract(spec.j, spec.i, z), 0.0, cutoff, tol)?;
    Ok((-2.0 * eta * first.value, 2.0 * eta * second.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(v: f64) -> StatisticsParameter {
        StatisticsParameter::new(v).unwrap()
    }

    #[test]
    fn statistics_parameter_validation() {
        assert!(StatisticsParameter::new(-0.1).is_err());
        assert!(StatisticsParameter::new(f64::NAN).is_err());
        assert!(StatisticsParameter::new(f64::INFINITY).is_err());
        assert!(StatisticsParameter::new(0.0).unwrap().is_bosonic());
    }

    #[test]
    fn exchange_phase_limits() {
        assert_eq!(exchange_phase(0.7, 0.0), Complex64::new(1.0, 0.0));
        assert!((exchange_phase(0.0, 2.0) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((exchange_phase(1e-300, 2.0) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((exchange_phase(1.0, 1.0) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let angle = exchange_angle(1.0, 1.0);
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((exchange_phase(-2.3, 0.4) - Complex64::from_polar(1.0, exchange_angle(-2.3, 0.4))).norm() < 1e-14);
    }

    #[test]
    fn overlap_kernel_ground_state() {
        for &z in &[0.0, 0.4, 1.7, -2.2] {
            assert!((overlap_kernel(0, 0, z) - (-0.25 * z * z).exp()).abs() < 1e-15);
        }
        assert_eq!(overlap_kernel(0, 1, 0.0), 0.0);
        assert!((overlap_kernel(3, 3, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_kernel_matches_polynomial_form() {
        for a in 0..7 {
            for b in 0..7 {
                let poly = shifted_overlap_polynomial(a, b);
                for &z in &[-1.3f64, 0.2, 2.9] {
                    let p: f64 = poly.iter().map(|t| t.coef * z.powi(t.power as i32)).sum();
                    let direct = (-0.25 * z * z).exp() * p;
                    assert!((overlap_kernel(a, b, z) - direct).abs() < 1e-13, "{a} {b} {z}");
                }
            }
        }
    }

    #[test]
    fn bosonic_four_point_is_contact_term() {
        assert_eq!(four_point(FourPointSpec::new(0, 0, 0, 0, eta(0.0))).unwrap(), 2.0);
        assert_eq!(four_point(FourPointSpec::new(0, 1, 1, 0, eta(0.0))).unwrap(), 1.0);
        assert_eq!(four_point(FourPointSpec::new(2, 1, 1, 0, eta(0.0))).unwrap(), 0.0);
    }

    #[test]
    fn ground_norm_closed_form() {
        // 2 − 2η 𝔇(1, η)
        let e = 1.0;
        let v = four_point(FourPointSpec::new(0, 0, 0, 0, eta(e))).unwrap();
        let d1 = crate::special_fns::script_d(1.0, e).unwrap();
        assert!((v - (2.0 - 2.0 * e * d1)).abs() < 1e-14);
    }

    #[test]
    fn evaluator_index_cap() {
        let ev = FourPointEvaluator::new(eta(1.0), 3, FourPointMethod::Series).unwrap();
        assert!(matches!(ev.eval(4, 0, 0, 0), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn oracle_index_cap() {
        let spec = FourPointSpec::new(13, 0, 0, 0, eta(1.0));
        assert!(four_point_oracle(spec).is_err());
    }

    #[test]
    fn bosonic_number_residual() {
        assert!(number_commutator_check(0, 0, eta(0.0), 8).unwrap() <= 1e-10);
        assert!(number_commutator_check(1, 0, eta(0.0), 8).unwrap() <= 1e-10);
    }
}
