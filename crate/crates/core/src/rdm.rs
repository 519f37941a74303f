//! One-particle reduced density matrix of the two-anyon state
//! `|Φ_{j,i}⟩ ∝ Ψ†_{h_j} Ψ†_{h_i}|0⟩`.
//!
//! Matrix elements are
//!
//! ```text
//! ρ_mn = Σ_k C(m,k) C(n,k) / (2 C(i,j)),   C(m,k) = ⟨0|Ψ_m Ψ_k Ψ†_j Ψ†_i|0⟩,
//! ```
//!
//! where the denominator is `⟨Φ|n̂|Φ⟩` for the unnormalized state. The generic
//! route truncates the partial trace at `K` basis functions; for the states
//! (0,0) and (1,0) the k-sum can be done in closed form, leaving a single
//! series over products of 𝔇 values.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::correlators::{
    brute_force_overlap, four_point_oracle, support_radius, FourPointEvaluator, FourPointMethod, FourPointSpec,
    StatisticsParameter,
};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::special_fns::{BasisIndex, ScriptDTable};

/// States whose squared norm falls below this are rejected as un-normalizable.
pub const NORM_THRESHOLD: f64 = 1e-8;

/// Eigenvalues below `-PSD_TOLERANCE` abort matrix assembly.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Truncation of the infinite sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    /// Matrix dimension `M`.
    pub basis_dim: usize,
    /// Number of basis functions `K` kept in the partial trace.
    pub trace_cap: usize,
    /// Maximum number of terms `L` of the closed-form series.
    pub series_len: usize,
    pub quad_tol: f64,
    /// Largest tolerated tail of the closed-form series.
    pub series_tol: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            basis_dim: 32,
            trace_cap: 40,
            series_len: 40,
            quad_tol: 1e-12,
            series_tol: 1e-7,
        }
    }
}

impl TruncationConfig {
    pub fn new(basis_dim: usize, trace_cap: usize, series_len: usize) -> Result<Self> {
        let cfg = Self {
            basis_dim,
            trace_cap,
            series_len,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.basis_dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "basis dimension must be at least 2, got {}",
                self.basis_dim
            )));
        }
        if self.trace_cap < self.basis_dim {
            return Err(Error::InvalidArgument(format!(
                "trace cap K = {} must be at least the basis dimension M = {}",
                self.trace_cap, self.basis_dim
            )));
        }
        if self.series_len == 0 {
            return Err(Error::InvalidArgument("series length must be at least 1".into()));
        }
        if !(self.quad_tol > 0.0 && self.series_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `Ψ†_{h_j} Ψ†_{h_i}|0⟩` at statistics η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAnyonState {
    pub j: BasisIndex,
    pub i: BasisIndex,
    pub eta: StatisticsParameter,
}

impl TwoAnyonState {
    pub fn new(j: BasisIndex, i: BasisIndex, eta: StatisticsParameter) -> Self {
        Self { j, i, eta }
    }

    /// `⟨0|Ψ_i Ψ_j Ψ†_j Ψ†_i|0⟩`.
    pub fn norm_squared(&self) -> Result<f64> {
        FourPointEvaluator::new(self.eta, self.j.max(self.i), FourPointMethod::Series)?
            .eval(self.i, self.j, self.j, self.i)
    }

    fn checked_norm(&self, norm: f64) -> Result<f64> {
        if norm < NORM_THRESHOLD {
            Err(Error::NormCollapse {
                j: self.j,
                i: self.i,
                norm,
                threshold: NORM_THRESHOLD,
            })
        } else {
            Ok(norm)
        }
    }
}

/// Which route assembles the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RdmMethod {
    /// Partial trace truncated at `K`, from four-point functions.
    #[default]
    Generic,
    /// k-summed series; states (0,0) and (1,0) only.
    ClosedForm,
}

impl std::fmt::Display for RdmMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RdmMethod::Generic => f.write_str("generic"),
            RdmMethod::ClosedForm => f.write_str("closed_form"),
        }
    }
}

/// A trace-one, symmetric, truncated one-particle density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    pub state: TwoAnyonState,
    pub method: RdmMethod,
    pub config: TruncationConfig,
    /// `|trace − 1|` before renormalization.
    pub trace_error: f64,
    entries: DMatrix<f64>,
}

impl ReducedDensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// `max |ρ_mn − ρ_nm|`.
    pub fn asymmetry(&self) -> f64 {
        let t = self.entries.transpose();
        (&self.entries - t).amax()
    }

    /// Row-major entries.
    pub fn row_major(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| self.entries[(r, c)])
            .collect()
    }

    pub fn to_dump(&self) -> MatrixDump {
        MatrixDump {
            state: [self.state.j, self.state.i],
            eta: self.state.eta.value(),
            basis_dim: self.dim(),
            trace_cap: self.config.trace_cap,
            series_len: self.config.series_len,
            entries: self.row_major(),
            trace_error: self.trace_error,
            method: self.method,
        }
    }

    pub fn from_dump(dump: &MatrixDump) -> Result<Self> {
        let n = dump.basis_dim;
        if dump.entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for M = {n}, found {}",
                n * n,
                dump.entries.len()
            )));
        }
        let config = TruncationConfig {
            basis_dim: n,
            trace_cap: dump.trace_cap,
            series_len: dump.series_len,
            ..TruncationConfig::default()
        };
        Ok(Self {
            state: TwoAnyonState::new(dump.state[0], dump.state[1], StatisticsParameter::new(dump.eta)?),
            method: dump.method,
            config,
            trace_error: dump.trace_error,
            entries: DMatrix::from_row_slice(n, n, &dump.entries),
        })
    }

    /// Build directly from entries, e.g. for tests or loaded data.
    pub fn from_entries(
        state: TwoAnyonState,
        method: RdmMethod,
        config: TruncationConfig,
        entries: DMatrix<f64>,
    ) -> Self {
        Self {
            state,
            method,
            config,
            trace_error: 0.0,
            entries,
        }
    }
}

/// JSON form of a [`ReducedDensityMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub state: [usize; 2],
    pub eta: f64,
    #[serde(rename = "M")]
    pub basis_dim: usize,
    #[serde(rename = "K")]
    pub trace_cap: usize,
    #[serde(rename = "L")]
    pub series_len: usize,
    pub entries: Vec<f64>,
    pub trace_error: f64,
    pub method: RdmMethod,
}

/// Four-point values `C(m, k)` for `m < M`, `k < K`, plus the norm `C(i, j)`.
struct CorrelatorTable {
    rows: Vec<Vec<f64>>,
    norm: f64,
}

impl CorrelatorTable {
    fn build(state: &TwoAnyonState, config: &TruncationConfig) -> Result<Self> {
        let max_index = config.basis_dim.max(config.trace_cap).max(state.j + 1).max(state.i + 1);
        let eval = FourPointEvaluator::new(state.eta, max_index, FourPointMethod::Series)?;
        let norm = state.checked_norm(eval.eval(state.i, state.j, state.j, state.i)?)?;
        let rows = (0..config.basis_dim)
            .into_par_iter()
            .map(|m| {
                (0..config.trace_cap)
                    .map(|k| eval.eval(m, k, state.j, state.i))
                    .collect()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(Self { rows, norm })
    }

    fn element(&self, m: usize, n: usize) -> f64 {
        let dot: f64 = self.rows[m].iter().zip(&self.rows[n]).map(|(a, b)| a * b).sum();
        dot / (2.0 * self.norm)
    }
}

/// `ρ_mn` from four-point functions with the partial trace cut at `K`.
pub fn rdm_element_generic(
    m: BasisIndex,
    n: BasisIndex,
    state: &TwoAnyonState,
    config: &TruncationConfig,
) -> Result<f64> {
    config.validate()?;
    check_element(m, n, config)?;
    let max_index = m.max(n).max(config.trace_cap).max(state.j + 1).max(state.i + 1);
    let eval = FourPointEvaluator::new(state.eta, max_index, FourPointMethod::Series)?;
    let norm = state.checked_norm(eval.eval(state.i, state.j, state.j, state.i)?)?;
    let mut dot = 0.0;
    for k in 0..config.trace_cap {
        dot += eval.eval(m, k, state.j, state.i)? * eval.eval(n, k, state.j, state.i)?;
    }
    Ok(dot / (2.0 * norm))
}

fn check_element(m: usize, n: usize, config: &TruncationConfig) -> Result<()> {
    if m >= config.basis_dim || n >= config.basis_dim {
        Err(Error::InvalidArgument(format!(
            "element ({m},{n}) outside the {}×{} matrix",
            config.basis_dim, config.basis_dim
        )))
    } else {
        Ok(())
    }
}

/// k-summed closed forms for the states (0,0) and (1,0).
///
/// Writing `A_m(z) = ∫ h_m(y − z) h_j(y) dy`, the completeness of the Hermite
/// basis turns the k-sum of the kernel products into
/// `4η² ∫∫ e^{−η(z+z')} A_m(z) A_n(z') e^{−(z−z')²/4}` (for i = 0), and
/// expanding `e^{zz'/2}` gives a series over `l` whose terms are products of
/// 𝔇 values.
#[derive(Debug, Clone)]
pub struct ClosedFormSeries {
    eta: f64,
    table: Option<ScriptDTable>,
    /// `⟨Φ|n̂|Φ⟩ = 2 ⟨0|Ψ_i Ψ_j Ψ†_j Ψ†_i|0⟩`.
    denominator: f64,
    state: (usize, usize),
    series_len: usize,
    series_tol: f64,
}

impl ClosedFormSeries {
    pub fn new(state: &TwoAnyonState, config: &TruncationConfig) -> Result<Self> {
        config.validate()?;
        let key = (state.j, state.i);
        if key != (0, 0) && key != (1, 0) {
            return Err(Error::ClosedFormUnavailable { j: state.j, i: state.i });
        }
        let norm = state.checked_norm(state.norm_squared()?)?;
        let eta = state.eta.value();
        let table = if state.eta.is_bosonic() {
            None
        } else {
            Some(ScriptDTable::new(eta, config.basis_dim + config.series_len + 3)?)
        };
        Ok(Self {
            eta,
            table,
            denominator: 2.0 * norm,
            state: key,
            series_len: config.series_len,
            series_tol: config.series_tol,
        })
    }

    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    pub fn element(&self, m: usize, n: usize) -> Result<f64> {
        let numerator = match self.state {
            (0, 0) => self.numerator_00(m, n)?,
            _ => self.numerator_10(m, n)?,
        };
        Ok(numerator / self.denominator)
    }

    fn d(&self, nu: usize) -> f64 {
        self.table.as_ref().map_or(0.0, |t| t.get(nu))
    }

    fn ln_d(&self, nu: usize) -> f64 {
        self.table.as_ref().expect("η > 0").ln(nu)
    }

    fn numerator_00(&self, m: usize, n: usize) -> Result<f64> {
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut num = 4.0 * delta(m, 0) * delta(n, 0);
        if self.eta == 0.0 {
            return Ok(num);
        }
        let eta = self.eta;
        // k = 0 kernel against a ground-state partner: −2η (−1)^n 𝔇(n+1) / √(2ⁿ n!)
        let single = |p: usize| -2.0 * eta * parity(p) * self.d(p + 1) / ln_norm(p).exp();
        num += 2.0 * delta(m, 0) * single(n) + 2.0 * delta(n, 0) * single(m);

        let ln_pref = 2.0 * eta.ln() + 4f64.ln() - ln_norm(m) - ln_norm(n);
        let series = self.sum_series(parity(m + n) * ln_pref.exp(), |l| {
            (self.ln_d(m + l + 1) + self.ln_d(n + l + 1)).exp()
        })?;
        num += series;
        Ok(num)
    }

    fn numerator_10(&self, m: usize, n: usize) -> Result<f64> {
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut num = delta(m, 0) * delta(n, 0) + delta(m, 1) * delta(n, 1);
        if self.eta == 0.0 {
            return Ok(num);
        }
        let eta = self.eta;
        // kernels with k = 1 and k = 0 respectively
        let with_k1 = |p: usize| {
            let lead = if p > 0 { 2.0 * p as f64 * self.d(p + 1) } else { 0.0 };
            eta * parity(p) * (lead - self.d(p + 3)) / ln_norm(p).exp()
        };
        let with_k0 = |p: usize| {
            let lead = if p > 0 { 2.0 * p as f64 * self.d(p) } else { 0.0 };
            std::f64::consts::SQRT_2 * eta * parity(p) * (lead - self.d(p + 2)) / ln_norm(p).exp()
        };
        num += delta(m, 0) * with_k1(n) + delta(m, 1) * with_k0(n);
        num += delta(n, 0) * with_k1(m) + delta(n, 1) * with_k0(m);

        // F_p(l) = 2p 𝔇(p + l) − 𝔇(p + l + 2)
        let f = |p: usize, l: usize| {
            let lead = if p > 0 { 2.0 * p as f64 * self.d(p + l) } else { 0.0 };
            lead - self.d(p + l + 2)
        };
        let pref = 2.0 * eta * eta * parity(m + n) / (ln_norm(m) + ln_norm(n)).exp();
        num += self.sum_series(pref, |l| f(m, l) * f(n, l))?;
        Ok(num)
    }

    /// `pref · Σ_l term(l) / (2^l l!)`, stopping once terms drop below 1e-14
    /// of the sum.
    fn sum_series<F: Fn(usize) -> f64>(&self, pref: f64, term: F) -> Result<f64> {
        let mut sum = 0.0;
        let mut mags = Vec::with_capacity(self.series_len);
        for l in 0..self.series_len {
            let weight = -(l as f64) * std::f64::consts::LN_2 - ln_factorial(l as u64);
            let t = term(l) * weight.exp();
            sum += t;
            mags.push(t.abs());
            if l >= 2 && mags[l] <= 1e-14 * sum.abs() && mags[l - 1] <= 1e-13 * sum.abs() {
                return Ok(pref * sum);
            }
        }
        // terms may change sign, so estimate the decay from the envelope of
        // neighbouring pairs
        let n = mags.len();
        let tail = if n >= 4 {
            let recent = mags[n - 1].max(mags[n - 2]);
            let earlier = mags[n - 3].max(mags[n - 4]);
            if recent == 0.0 {
                0.0
            } else {
                let ratio = (recent / earlier).sqrt();
                if ratio < 1.0 {
                    recent * ratio / (1.0 - ratio)
                } else {
                    f64::INFINITY
                }
            }
        } else {
            f64::INFINITY
        };
        let tail = (pref * tail / self.denominator).abs();
        if !(tail <= self.series_tol) {
            return Err(Error::SeriesNotConverged {
                terms: self.series_len,
                tail,
            });
        }
        Ok(pref * sum)
    }
}

fn parity(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `ln √(2^p p!)`.
fn ln_norm(p: usize) -> f64 {
    0.5 * (p as f64 * std::f64::consts::LN_2 + ln_factorial(p as u64))
}

/// Closed-form `ρ_mn` for `|Φ_{0,0}⟩`.
pub fn rdm_closed_form_00(
    m: BasisIndex,
    n: BasisIndex,
    eta: StatisticsParameter,
    config: &TruncationConfig,
) -> Result<f64> {
    check_element(m, n, config)?;
    ClosedFormSeries::new(&TwoAnyonState::new(0, 0, eta), config)?.element(m, n)
}

/// Closed-form `ρ_mn` for `|Φ_{1,0}⟩`.
pub fn rdm_closed_form_10(
    m: BasisIndex,
    n: BasisIndex,
    eta: StatisticsParameter,
    config: &TruncationConfig,
) -> Result<f64> {
    check_element(m, n, config)?;
    ClosedFormSeries::new(&TwoAnyonState::new(1, 0, eta), config)?.element(m, n)
}

/// All `ρ_mn`, `m, n < M`, by the generic route, before trace renormalization.
pub fn generic_elements(state: &TwoAnyonState, config: &TruncationConfig) -> Result<DMatrix<f64>> {
    config.validate()?;
    let dim = config.basis_dim;
    let table = CorrelatorTable::build(state, config)?;
    let mut raw = DMatrix::<f64>::zeros(dim, dim);
    for m in 0..dim {
        for n in m..dim {
            let v = table.element(m, n);
            raw[(m, n)] = v;
            raw[(n, m)] = v;
        }
    }
    Ok(raw)
}

/// Assemble, symmetrize and renormalize the `M × M` matrix.
pub fn build_rdm(state: &TwoAnyonState, config: &TruncationConfig, method: RdmMethod) -> Result<ReducedDensityMatrix> {
    config.validate()?;
    let dim = config.basis_dim;
    let mut raw = DMatrix::<f64>::zeros(dim, dim);
    match method {
        RdmMethod::Generic => raw = generic_elements(state, config)?,
        RdmMethod::ClosedForm => {
            let series = ClosedFormSeries::new(state, config)?;
            let rows = (0..dim)
                .into_par_iter()
                .map(|m| (0..dim).map(|n| series.element(m, n)).collect())
                .collect::<Result<Vec<Vec<f64>>>>()?;
            for m in 0..dim {
                for n in 0..dim {
                    raw[(m, n)] = 0.5 * (rows[m][n] + rows[n][m]);
                }
            }
        }
    }
    let trace = raw.trace();
    let trace_error = (trace - 1.0).abs();
    let entries = raw / trace;

    let eig = nalgebra::SymmetricEigen::try_new(entries.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigensolver("symmetric eigensolver did not converge".into()))?;
    let min = eig.eigenvalues.min();
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
            tolerance: PSD_TOLERANCE,
        });
    }
    Ok(ReducedDensityMatrix {
        state: *state,
        method,
        config: *config,
        trace_error,
        entries,
    })
}

/// Brute-force `ρ_mn` with the partial trace summed to infinity.
///
/// The single-kernel terms use [`four_point_oracle`]; the kernel-squared term
/// is the double integral
/// `4η² ∫∫ e^{−η(z+z')} A_m(z) A_n(z') B(z − z') dz dz'` with
/// `A_m(z) = ∫ h_m(y − z) h_j(y) dy` and `B(s) = ∫ h_i(x − s) h_i(x) dx`, all
/// evaluated by nested adaptive quadrature of pointwise Hermite functions.
pub fn rdm_element_oracle(m: BasisIndex, n: BasisIndex, state: &TwoAnyonState) -> Result<f64> {
    let (j, i) = (state.j, state.i);
    let eta = state.eta;
    let e = eta.value();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let fp = |a, b, c, d| four_point_oracle(FourPointSpec::new(a, b, c, d, eta));
    let norm = state.checked_norm(fp(i, j, j, i)?)?;

    // Σ_k contact(m,k) contact(n,k)
    let mut num = delta(m, i) * delta(n, i)
        + delta(i, j) * delta(m, i) * delta(n, j)
        + delta(j, i) * delta(m, j) * delta(n, i)
        + delta(m, j) * delta(n, j);
    if eta.is_bosonic() {
        return Ok(num / (2.0 * norm));
    }
    let kernel = |a: usize, k: usize| -> Result<f64> {
        let spec = FourPointSpec::new(a, k, j, i, eta);
        Ok(fp(a, k, j, i)? - spec.contact_term())
    };
    num += delta(m, i) * kernel(n, j)? + delta(m, j) * kernel(n, i)?;
    num += delta(n, i) * kernel(m, j)? + delta(n, j) * kernel(m, i)?;

    let cutoff = (support_radius(m.max(n)) + support_radius(j) - 4.0).min(45.0 / e);
    let tol = Tolerance::new(1e-13, 1e-11);
    let inner = |z: f64| -> Result<f64> {
        let g = |zp: f64| -> Result<f64> {
            Ok((-e * zp).exp() * brute_force_overlap(n, j, zp)? * brute_force_overlap(i, i, z - zp)?)
        };
        let est = quadrature::try_integrate(g, 0.0, cutoff, tol)?;
        Ok((-e * z).exp() * brute_force_overlap(m, j, z)? * est.value)
    };
    let outer = quadrature::try_integrate(inner, 0.0, cutoff, tol)?;
    num += 4.0 * e * e * outer.value;
    Ok(num / (2.0 * norm))
}

/// Normalizations in the form they are often quoted, kept for comparison
/// with the correlator-derived values.
pub mod quoted {
    use super::*;
    use crate::special_fns::script_d;

    /// `4(1 − η𝔇(−1, η))`: the order −1 lies outside the domain of 𝔇, so
    /// this always fails; the correlator gives `4(1 − η𝔇(1, η))`.
    pub fn normalization_00(eta: f64) -> Result<f64> {
        Ok(4.0 * (1.0 - eta * script_d(-1.0, eta)?))
    }

    /// `2(1 + (η/2)𝔇(3, η))`; the correlator gives `2(1 − η𝔇(3, η))`.
    pub fn normalization_10(eta: f64) -> Result<f64> {
        if eta == 0.0 {
            return Ok(2.0);
        }
        Ok(2.0 * (1.0 + 0.5 * eta * script_d(3.0, eta)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(v: f64) -> StatisticsParameter {
        StatisticsParameter::new(v).unwrap()
    }

    fn small() -> TruncationConfig {
        TruncationConfig::new(8, 12, 30).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(TruncationConfig::new(1, 4, 4).is_err());
        assert!(TruncationConfig::new(8, 4, 4).is_err());
        assert!(TruncationConfig::new(8, 8, 0).is_err());
        assert!(TruncationConfig::default().validate().is_ok());
    }

    #[test]
    fn bosonic_ground_pair() {
        let st = TwoAnyonState::new(0, 0, eta(0.0));
        let cfg = small();
        for m in 0..3 {
            for n in 0..3 {
                let want = if m == 0 && n == 0 { 1.0 } else { 0.0 };
                assert_eq!(rdm_element_generic(m, n, &st, &cfg).unwrap(), want);
                assert_eq!(rdm_closed_form_00(m, n, eta(0.0), &cfg).unwrap(), want);
            }
        }
    }

    #[test]
    fn bosonic_excited_pair() {
        let st = TwoAnyonState::new(1, 0, eta(0.0));
        let cfg = small();
        assert_eq!(rdm_element_generic(0, 0, &st, &cfg).unwrap(), 0.5);
        assert_eq!(rdm_element_generic(1, 1, &st, &cfg).unwrap(), 0.5);
        assert_eq!(rdm_element_generic(0, 1, &st, &cfg).unwrap(), 0.0);
        assert_eq!(rdm_closed_form_10(1, 1, eta(0.0), &cfg).unwrap(), 0.5);
        assert_eq!(rdm_closed_form_10(0, 1, eta(0.0), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_rejects_other_states() {
        let st = TwoAnyonState::new(2, 0, eta(1.0));
        assert!(matches!(
            build_rdm(&st, &small(), RdmMethod::ClosedForm),
            Err(Error::ClosedFormUnavailable { j: 2, i: 0 })
        ));
    }

    #[test]
    fn element_outside_matrix() {
        let st = TwoAnyonState::new(1, 0, eta(1.0));
        assert!(rdm_element_generic(8, 0, &st, &small()).is_err());
    }

    #[test]
    fn collapsed_norm_is_rejected() {
        // |Φ_{0,0}⟩ at very large η: 2 − 2η𝔇(1,η) ≈ 2/η²
        let st = TwoAnyonState::new(0, 0, eta(1e5));
        assert!(matches!(
            build_rdm(&st, &small(), RdmMethod::Generic),
            Err(Error::NormCollapse { .. })
        ));
    }

    #[test]
    fn bosonic_matrices() {
        let cfg = small();
        let r = build_rdm(&TwoAnyonState::new(0, 0, eta(0.0)), &cfg, RdmMethod::Generic).unwrap();
        assert_eq!(r.get(0, 0), 1.0);
        assert_eq!(r.matrix().iter().filter(|v| **v != 0.0).count(), 1);
        let r = build_rdm(&TwoAnyonState::new(1, 0, eta(0.0)), &cfg, RdmMethod::Generic).unwrap();
        assert_eq!(r.get(0, 0), 0.5);
        assert_eq!(r.get(1, 1), 0.5);
        assert_eq!(r.trace_error, 0.0);
    }

    #[test]
    fn dump_round_trip() {
        let cfg = small();
        let r = build_rdm(&TwoAnyonState::new(0, 0, eta(1.0)), &cfg, RdmMethod::Generic).unwrap();
        let json = serde_json::to_string(&r.to_dump()).unwrap();
        let back: MatrixDump = serde_json::from_str(&json).unwrap();
        let r2 = ReducedDensityMatrix::from_dump(&back).unwrap();
        assert_eq!(r2.row_major(), r.row_major());
        assert_eq!(r2.trace_error, r.trace_error);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["state", "eta", "M", "entries", "trace_error", "method"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn quoted_normalizations() {
        assert!(quoted::normalization_00(1.0).is_err());
        assert_eq!(quoted::normalization_10(0.0).unwrap(), 2.0);
        let st = TwoAnyonState::new(1, 0, eta(1.0));
        let from_correlator = 2.0 * st.norm_squared().unwrap();
        assert!((quoted::normalization_10(1.0).unwrap() - from_correlator).abs() > 0.1);
    }
}
