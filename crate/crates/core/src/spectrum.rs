//! Spectra and von Neumann entropies of reduced density matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlators::StatisticsParameter;
use crate::error::{Error, Result};
use crate::rdm::{build_rdm, RdmMethod, ReducedDensityMatrix, TruncationConfig, TwoAnyonState};

/// Eigenvalues in `[-CLAMP_TOLERANCE, 0)` are treated as roundoff and set to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    fn ln_scale(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogBase::Two => f.write_str("2"),
            LogBase::E => f.write_str("e"),
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(Error::InvalidArgument(format!(
                "log base must be 2 or e, got {other:?}"
            ))),
        }
    }
}

fn check_square_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidArgument(format!(
            "expected a non-empty square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let asym = (m - m.transpose()).amax();
    let scale = m.amax().max(1.0);
    if asym > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!(
            "matrix is not symmetric (max deviation {asym:e})"
        )));
    }
    Ok(())
}

fn clamp_and_sort(mut values: Vec<f64>) -> Vec<f64> {
    for v in &mut values {
        if *v < 0.0 && *v >= -CLAMP_TOLERANCE {
            *v = 0.0;
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Eigenvalues of a real symmetric matrix, descending, with tiny negative
/// roundoff clamped to zero.
pub fn eigenvalues_sym(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_square_symmetric(matrix)?;
    let eig = nalgebra::SymmetricEigen::try_new(matrix.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigensolver("symmetric QR iteration did not converge".into()))?;
    Ok(clamp_and_sort(eig.eigenvalues.iter().copied().collect()))
}

/// Eigenvalues of a density matrix.
pub fn rdm_eigenvalues(rho: &ReducedDensityMatrix) -> Result<Vec<f64>> {
    eigenvalues_sym(rho.matrix())
}

/// Cyclic Jacobi rotations; slow but independent of the QR-based solver.
pub fn jacobi_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_square_symmetric(matrix)?;
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let norm = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-16 * norm {
            return Ok(clamp_and_sort((0..n).map(|i| a[(i, i)]).collect()));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::Eigensolver("Jacobi sweeps did not converge".into()))
}

/// `−Σ λ log λ` over the spectrum, with `0 log 0 = 0`.
pub fn von_neumann_entropy(eigenvalues: &[f64], base: LogBase) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if !l.is_finite() || l < -CLAMP_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue {l:e} is not a valid probability"
            )));
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s / base.ln_scale())
}

/// Entropy of a density matrix.
pub fn rdm_entropy(rho: &ReducedDensityMatrix, base: LogBase) -> Result<f64> {
    von_neumann_entropy(&rdm_eigenvalues(rho)?, base)
}

/// One point of an entropy curve. Failed points keep `entropy = NaN` and the
/// error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySample {
    pub eta: f64,
    pub entropy: f64,
    pub eigenvalues: Vec<f64>,
    pub trace_error: f64,
    #[serde(rename = "M")]
    pub basis_dim: usize,
    #[serde(rename = "K")]
    pub trace_cap: usize,
    #[serde(rename = "L")]
    pub series_len: usize,
    pub error: Option<String>,
}

impl EntropySample {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    fn failed(eta: f64, config: &TruncationConfig, err: &Error) -> Self {
        Self {
            eta,
            entropy: f64::NAN,
            eigenvalues: Vec::new(),
            trace_error: f64::NAN,
            basis_dim: config.basis_dim,
            trace_cap: config.trace_cap,
            series_len: config.series_len,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub state: [usize; 2],
    pub method: RdmMethod,
    pub log_base: LogBase,
    pub config: TruncationConfig,
    pub samples: Vec<EntropySample>,
}

impl EntropyCurve {
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| !s.is_ok()).count()
    }
}

/// Entropy and spectrum of `|Φ_{j,i}⟩` at one η.
pub fn entropy_at(
    state: &TwoAnyonState,
    config: &TruncationConfig,
    method: RdmMethod,
    base: LogBase,
) -> Result<EntropySample> {
    let rho = build_rdm(state, config, method)?;
    let eigenvalues = rdm_eigenvalues(&rho)?;
    Ok(EntropySample {
        eta: state.eta.value(),
        entropy: von_neumann_entropy(&eigenvalues, base)?,
        eigenvalues,
        trace_error: rho.trace_error,
        basis_dim: config.basis_dim,
        trace_cap: config.trace_cap,
        series_len: config.series_len,
        error: None,
    })
}

/// Entropy over a strictly increasing grid of η. Points are independent and computed in
/// parallel; the output order follows the grid.
pub fn entropy_sweep(
    state: (usize, usize),
    grid: &[f64],
    config: &TruncationConfig,
    method: RdmMethod,
    base: LogBase,
) -> Result<EntropyCurve> {
    config.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("η grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("η grid must be strictly increasing".into()));
    }
    let params = grid
        .iter()
        .map(|&e| StatisticsParameter::new(e))
        .collect::<Result<Vec<_>>>()?;
    let samples = params
        .par_iter()
        .map(|&eta| {
            let st = TwoAnyonState::new(state.0, state.1, eta);
            entropy_at(&st, config, method, base).unwrap_or_else(|e| EntropySample::failed(eta.value(), config, &e))
        })
        .collect();
    Ok(EntropyCurve {
        state: [state.0, state.1],
        method,
        log_base: base,
        config: *config,
        samples,
    })
}

/// Evenly spaced grid `[min, max]` with `steps` points, linear or logarithmic.
pub fn eta_grid(min: f64, max: f64, steps: usize, log: bool) -> Result<Vec<f64>> {
    if steps == 0 || !(min.is_finite() && max.is_finite()) || min < 0.0 || max < min {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ min ≤ max and at least one step, got {min}:{max}:{steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    if log {
        if min <= 0.0 {
            return Err(Error::InvalidArgument("a logarithmic grid needs min > 0".into()));
        }
        let (a, b) = (min.ln(), max.ln());
        Ok((0..steps)
            .map(|k| (a + (b - a) * k as f64 / (steps - 1) as f64).exp())
            .collect())
    } else {
        Ok((0..steps)
            .map(|k| min + (max - min) * k as f64 / (steps - 1) as f64)
            .collect())
    }
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub config: TruncationConfig,
    pub entropy: f64,
    pub trace_error: f64,
    /// Entropy change relative to the previous row.
    pub delta: Option<f64>,
}

/// Entropy at one η for each truncation in turn.
pub fn convergence_report(
    state: &TwoAnyonState,
    configs: &[TruncationConfig],
    method: RdmMethod,
    base: LogBase,
) -> Result<Vec<ConvergenceRow>> {
    let samples = configs
        .par_iter()
        .map(|cfg| entropy_at(state, cfg, method, base))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(samples.len());
    let mut prev: Option<f64> = None;
    for (cfg, s) in configs.iter().zip(samples) {
        rows.push(ConvergenceRow {
            config: *cfg,
            entropy: s.entropy,
            trace_error: s.trace_error,
            delta: prev.map(|p| s.entropy - p),
        });
        prev = Some(s.entropy);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_of_pure_and_mixed() {
        assert_eq!(von_neumann_entropy(&[1.0, 0.0, 0.0], LogBase::Two).unwrap(), 0.0);
        assert!((von_neumann_entropy(&[0.5, 0.5], LogBase::Two).unwrap() - 1.0).abs() < 1e-15);
        assert!((von_neumann_entropy(&[0.5, 0.5], LogBase::E).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(von_neumann_entropy(&[0.5, -0.1], LogBase::Two).is_err());
        assert_eq!(von_neumann_entropy(&[1.0, -1e-12], LogBase::Two).unwrap(), 0.0);
    }

    #[test]
    fn solvers_agree_on_known_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let expect = [2.0 + 2f64.sqrt(), 2.0, 2.0 - 2f64.sqrt()];
        for solver in [eigenvalues_sym, jacobi_eigenvalues] {
            let ev = solver(&m).unwrap();
            for (a, b) in ev.iter().zip(expect) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_matrices() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(eigenvalues_sym(&m).is_err());
        assert!(eigenvalues_sym(&DMatrix::zeros(2, 3)).is_err());
        assert!(jacobi_eigenvalues(&DMatrix::from_element(2, 2, f64::NAN)).is_err());
    }

    #[test]
    fn roundoff_negatives_clamped() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -5e-11]);
        assert_eq!(eigenvalues_sym(&m).unwrap(), vec![1.0, 0.0]);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-9]);
        assert_eq!(eigenvalues_sym(&m).unwrap()[1], -1e-9);
    }

    #[test]
    fn grids() {
        assert_eq!(eta_grid(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        let g = eta_grid(0.1, 10.0, 3, true).unwrap();
        assert!((g[1] - 1.0).abs() < 1e-15);
        assert!(eta_grid(0.0, 1.0, 3, true).is_err());
        assert!(eta_grid(2.0, 1.0, 3, false).is_err());
    }

    #[test]
    fn log_base_parsing() {
        assert_eq!("2".parse::<LogBase>().unwrap(), LogBase::Two);
        assert_eq!("e".parse::<LogBase>().unwrap(), LogBase::E);
        assert!("10".parse::<LogBase>().is_err());
    }

    #[test]
    fn sweep_records_failures_in_place() {
        let cfg = TruncationConfig::new(6, 8, 20).unwrap();
        let curve = entropy_sweep((0, 0), &[0.0, 1e5], &cfg, RdmMethod::Generic, LogBase::Two).unwrap();
        assert!(curve.samples[0].is_ok());
        assert!(!curve.samples[1].is_ok());
        assert!(curve.samples[1].entropy.is_nan());
        assert_eq!(curve.failures(), 1);
    }
}
