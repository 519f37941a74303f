//! Self-check battery: closed forms against brute-force oracles, special
//! function identities, boundary conditions and density-matrix sanity.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlators::{
    creation_exchange_forms, four_point_oracle, number_commutator_check, FourPointEvaluator, FourPointSpec,
    StatisticsParameter,
};
use crate::error::Result;
use crate::quadrature::{self, Tolerance};
use crate::rdm::{
    build_rdm, generic_elements, rdm_element_oracle, ClosedFormSeries, RdmMethod, TruncationConfig, TwoAnyonState,
};
use crate::special_fns::{hermite_fn, hermite_overlap, script_d, ScriptDTable};
use crate::spectrum::{eigenvalues_sym, jacobi_eigenvalues};
use crate::wavefunction::{
    adjacent_transpositions, fock_consistency_residual, permutation_phase_with, robin_residual,
    robin_residual_wrong_phase, Decomposition, NParticleWavefunction, Permutation, TwoParticleState,
};

/// Knobs for [`run_battery`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ValidationOptions {
    /// Smaller grids; finishes in well under a minute.
    pub quick: bool,
    /// Scale `𝔇(1, η)` by `1 + 1e-3` inside the series evaluator. The
    /// oracle check must then fail.
    pub perturb_script_d: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    /// Passes when `measured ≤ tolerance`.
    fn at_most(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail: detail.into(),
        }
    }

    /// Passes when `measured ≥ tolerance`; for negative controls.
    fn at_least(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured >= tolerance,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, err: &crate::Error) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

fn wrap(name: &str, r: Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::failed(name, &e))
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn eta(v: f64) -> StatisticsParameter {
    StatisticsParameter::new(v).expect("literal η is valid")
}

pub fn hermite_orthonormality(n_max: usize) -> Result<f64> {
    let pairs: Vec<(usize, usize)> = (0..=n_max).flat_map(|m| (m..=n_max).map(move |n| (m, n))).collect();
    let errs = pairs
        .par_iter()
        .map(|&(m, n)| {
            let r = (2.0 * n_max as f64 + 1.0).sqrt() + 10.0;
            let f = |x: f64| hermite_fn(m, x).unwrap_or(f64::NAN) * hermite_fn(n, x).unwrap_or(f64::NAN);
            let v = quadrature::integrate_with_breaks(f, &[-r, 0.0, r], Tolerance::new(1e-14, 1e-13))?.value;
            Ok((v - if m == n { 1.0 } else { 0.0 }).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(max_of(errs))
}

/// Max relative residual of `𝔇(ν+2) = ν𝔇(ν) − x𝔇(ν+1)` on the grid.
pub fn script_d_recurrence(nus: &[f64], xs: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &nu in nus {
        for &x in xs {
            let d0 = script_d(nu, x)?;
            let d1 = script_d(nu + 1.0, x)?;
            let d2 = script_d(nu + 2.0, x)?;
            worst = worst.max(((d2 - nu * d0 + x * d1) / d2).abs());
        }
    }
    Ok(worst)
}

/// Max |closed form − quadrature| of the Hermite overlap integral, both
/// divided by `√π (2ⁿ n! 2ᵖ p!)^{1/2}` so the comparison is on the scale of
/// the normalized overlap (raw values reach ~10⁹ at n = p = 10).
pub fn hermite_overlap_vs_quadrature(n_max: usize, zetas: &[f64]) -> Result<f64> {
    let cases: Vec<(usize, usize, f64)> = (0..=n_max)
        .flat_map(|n| (0..=n_max).flat_map(move |p| zetas.iter().map(move |&z| (n, p, z))))
        .collect();
    let errs = cases
        .par_iter()
        .map(|&(n, p, zeta)| {
            let closed = hermite_overlap(n, p, zeta)?;
            // H_n(z) e^{−z²/2} = (√π 2ⁿ n!)^{1/2} h_n(z)
            let ln_norm =
                |k: usize| k as f64 * std::f64::consts::LN_2 + statrs::function::factorial::ln_factorial(k as u64);
            let scale = std::f64::consts::PI.sqrt() * (0.5 * (ln_norm(n) + ln_norm(p))).exp();
            let r = (2.0 * n_max as f64 + 1.0).sqrt() + 10.0;
            let f = |z: f64| hermite_fn(n, z).unwrap_or(f64::NAN) * hermite_fn(p, z - zeta).unwrap_or(f64::NAN);
            let brute =
                quadrature::integrate_with_breaks(f, &[-r, 0.5 * zeta, r + zeta], Tolerance::new(1e-15, 1e-13))?.value;
            Ok((closed / scale - brute).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(max_of(errs))
}

/// Max |series − oracle| over all index tuples with entries `≤ max_index`.
pub fn four_point_oracle_gap(max_index: usize, etas: &[f64], perturb: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &e in etas {
        let eta = StatisticsParameter::new(e)?;
        let eval = if perturb && !eta.is_bosonic() {
            let mut table = ScriptDTable::new(e, 4 * max_index + 1)?;
            table.perturb(1, 1.0 + 1e-3);
            FourPointEvaluator::with_table(eta, table)?
        } else {
            FourPointEvaluator::new(eta, max_index, Default::default())?
        };
        let n = max_index + 1;
        let tuples: Vec<(usize, usize, usize, usize)> = (0..n * n * n * n)
            .map(|t| (t / (n * n * n), (t / (n * n)) % n, (t / n) % n, t % n))
            .collect();
        let gaps = tuples
            .par_iter()
            .map(|&(m, k, j, i)| {
                let series = eval.eval(m, k, j, i)?;
                let oracle = four_point_oracle(FourPointSpec::new(m, k, j, i, eta))?;
                Ok((series - oracle).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        worst = worst.max(max_of(gaps));
    }
    Ok(worst)
}

/// Max |closed-form ρ_mn − brute-force ρ_mn| for `m ≤ n ≤ max_index`.
pub fn rdm_oracle_gap(state: (usize, usize), max_index: usize, etas: &[f64]) -> Result<f64> {
    let cfg = TruncationConfig::new(max_index + 1, max_index + 1, 40)?;
    let mut worst: f64 = 0.0;
    for &e in etas {
        let st = TwoAnyonState::new(state.0, state.1, StatisticsParameter::new(e)?);
        let series = ClosedFormSeries::new(&st, &cfg)?;
        let pairs: Vec<(usize, usize)> = (0..=max_index)
            .flat_map(|m| (m..=max_index).map(move |n| (m, n)))
            .collect();
        let gaps = pairs
            .par_iter()
            .map(|&(m, n)| Ok((series.element(m, n)? - rdm_element_oracle(m, n, &st)?).abs()))
            .collect::<Result<Vec<f64>>>()?;
        worst = worst.max(max_of(gaps));
    }
    Ok(worst)
}

/// Max |generic − closed form| over elements `m, n ≤ max_index` at the
/// default `K` and `L`.
pub fn method_gap(state: (usize, usize), max_index: usize, etas: &[f64]) -> Result<f64> {
    let defaults = TruncationConfig::default();
    let cfg = TruncationConfig {
        basis_dim: max_index + 1,
        ..defaults
    };
    let mut worst: f64 = 0.0;
    for &e in etas {
        let st = TwoAnyonState::new(state.0, state.1, StatisticsParameter::new(e)?);
        let series = ClosedFormSeries::new(&st, &cfg)?;
        let generic = generic_elements(&st, &cfg)?;
        for m in 0..=max_index {
            for n in 0..=max_index {
                worst = worst.max((generic[(m, n)] - series.element(m, n)?).abs());
            }
        }
    }
    Ok(worst)
}

/// Momentum pairs and diagonal used by the boundary-condition checks.
pub fn robin_grids() -> (Vec<(f64, f64)>, Vec<f64>) {
    let ks = [-2.1, -0.6, 0.4, 1.3, 2.9];
    let pairs = ks
        .iter()
        .flat_map(|&a| ks.iter().map(move |&b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let diagonal = (0..50).map(|s| -10.0 + 20.0 * s as f64 / 49.0).collect();
    (pairs, diagonal)
}

/// `(max residual, min wrong-phase residual)` over the grids.
pub fn robin_check(etas: &[f64]) -> Result<(f64, f64)> {
    let (pairs, diagonal) = robin_grids();
    let mut worst: f64 = 0.0;
    let mut control = f64::INFINITY;
    for &e in etas {
        for &(k1, k2) in &pairs {
            worst = worst.max(robin_residual(&TwoParticleState::new(k1, k2, e)?, &diagonal)?);
            control = control.min(robin_residual_wrong_phase(k1, k2, e, &diagonal)?);
        }
    }
    Ok((worst, control))
}

/// Sample points `(x, y, rest…)` for the Fock check, deterministic.
pub fn fock_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|s| {
            (0..n)
                .map(|a| {
                    let t = (s * n + a) as f64;
                    2.5 * (0.7 * t + 0.3).sin() + 0.4 * (1.9 * t).cos()
                })
                .collect()
        })
        .collect()
}

pub fn fock_check(ns: &[usize], etas: &[f64], points: usize) -> Result<f64> {
    let momenta = [0.5, 1.7, -0.9];
    let mut worst: f64 = 0.0;
    for &n in ns {
        for &e in etas {
            let psi = NParticleWavefunction::new(&momenta[..n], e)?;
            worst = worst.max(fock_consistency_residual(&psi, &fock_points(n, points))?);
        }
    }
    Ok(worst)
}

/// Max phase difference between the two decompositions over all of S_N.
pub fn braid_consistency(n: usize, eta: f64) -> Result<f64> {
    let k: Vec<f64> = (0..n).map(|a| 0.3 + 0.83 * a as f64 * (1.0 + 0.1 * a as f64)).collect();
    let mut worst: f64 = 0.0;
    for p in Permutation::all(n) {
        let a = permutation_phase_with(&k, &p, eta, Decomposition::Bubble)?;
        let b = permutation_phase_with(&k, &p, eta, Decomposition::Insertion)?;
        debug_assert_eq!(
            adjacent_transpositions(&p, Decomposition::Bubble).len(),
            adjacent_transpositions(&p, Decomposition::Insertion).len()
        );
        worst = worst.max((a.coefficient() - b.coefficient()).norm());
    }
    Ok(worst)
}

/// `(trace error, asymmetry, most negative eigenvalue)` worst case over the states.
pub fn matrix_sanity(states: &[(usize, usize, f64)], config: &TruncationConfig) -> Result<(f64, f64, f64)> {
    let mut worst = (0.0f64, 0.0f64, f64::INFINITY);
    for &(j, i, e) in states {
        let rho = build_rdm(&TwoAnyonState::new(j, i, eta(e)), config, RdmMethod::Generic)?;
        let ev = eigenvalues_sym(rho.matrix())?;
        worst.0 = worst.0.max((rho.trace() - 1.0).abs());
        worst.1 = worst.1.max(rho.asymmetry());
        worst.2 = worst.2.min(*ev.last().expect("non-empty"));
    }
    Ok(worst)
}

/// Run every check and return one row per check.
pub fn run_battery(opts: ValidationOptions) -> Vec<CheckResult> {
    let q = opts.quick;
    let mut out = Vec::new();
    let etas: &[f64] = if q { &[1.0] } else { &[0.25, 1.0, 4.0] };

    out.push(wrap(
        "hermite orthonormality",
        hermite_orthonormality(if q { 8 } else { 20 }).map(|v| {
            CheckResult::at_most(
                "hermite orthonormality",
                v,
                1e-10,
                format!("m, n ≤ {}", if q { 8 } else { 20 }),
            )
        }),
    ));

    let nus: Vec<f64> = (1..=if q { 5 } else { 20 })
        .map(|k| 0.5 * k as f64 * if q { 4.0 } else { 1.0 })
        .filter(|v| *v <= 10.0)
        .collect();
    let xs: Vec<f64> = (0..=16)
        .step_by(if q { 4 } else { 1 })
        .map(|k| 0.5 * k as f64)
        .collect();
    out.push(wrap(
        "𝔇 recurrence",
        script_d_recurrence(&nus, &xs)
            .map(|v| CheckResult::at_most("𝔇 recurrence", v, 1e-9, "ν ∈ [0.5, 10], x ∈ [0, 8]")),
    ));

    let zetas: Vec<f64> = (0..=8).step_by(if q { 4 } else { 1 }).map(|k| 0.5 * k as f64).collect();
    out.push(wrap(
        "hermite overlap vs quadrature",
        hermite_overlap_vs_quadrature(if q { 5 } else { 10 }, &zetas).map(|v| {
            CheckResult::at_most(
                "hermite overlap vs quadrature",
                v,
                1e-8,
                format!("n, p ≤ {}, ζ ∈ [0, 4]", if q { 5 } else { 10 }),
            )
        }),
    ));

    let idx = if q { 3 } else { 6 };
    out.push(wrap(
        "four-point vs oracle",
        four_point_oracle_gap(idx, etas, opts.perturb_script_d).map(|v| {
            let detail = if opts.perturb_script_d {
                "𝔇(1) perturbed by 1e-3".to_string()
            } else {
                format!("indices ≤ {idx}, η ∈ {etas:?}")
            };
            CheckResult::at_most("four-point vs oracle", v, 1e-6, detail)
        }),
    ));

    let rho_idx = if q { 2 } else { 6 };
    for state in [(0usize, 0usize), (1, 0)] {
        let name = format!("ρ{}{} closed form vs oracle", state.0, state.1);
        let r = rdm_oracle_gap(state, rho_idx, etas)
            .map(|v| CheckResult::at_most(&name, v, 1e-6, format!("m, n ≤ {rho_idx}")));
        out.push(wrap(&name, r));
        let name = format!("ρ{}{} generic vs closed form", state.0, state.1);
        let r =
            method_gap(state, 6, etas).map(|v| CheckResult::at_most(&name, v, 1e-6, "m, n ≤ 6, default truncation"));
        out.push(wrap(&name, r));
    }

    let cap = if q { 40 } else { 64 };
    let r = [(0usize, 0usize), (1, 0)]
        .iter()
        .map(|&(j, i)| number_commutator_check(j, i, eta(1.0), cap))
        .collect::<Result<Vec<f64>>>()
        .map(|v| CheckResult::at_most("number operator", max_of(v), 1e-5, format!("η = 1, K = {cap}")));
    out.push(wrap("number operator", r));

    if !q {
        let r = [(0usize, 1usize, 1usize, 0usize), (2, 0, 1, 3), (1, 1, 2, 0)]
            .iter()
            .map(|&(m, k, j, i)| {
                let (a, b) = creation_exchange_forms(FourPointSpec::new(m, k, j, i, eta(1.0)), 60)?;
                Ok((a - b).abs())
            })
            .collect::<Result<Vec<f64>>>()
            .map(|v| CheckResult::at_most("exchange forms agree", max_of(v), 1e-7, "basis cap 60"));
        out.push(wrap("exchange forms agree", r));
    }

    match robin_check(&[0.5, 2.0]) {
        Ok((res, control)) => {
            out.push(CheckResult::at_most(
                "robin residual",
                res,
                1e-12,
                "5×5 momenta, 50-point diagonal",
            ));
            out.push(CheckResult::at_least(
                "robin wrong-phase control",
                control,
                0.1,
                "conjugate coefficient",
            ));
        }
        Err(e) => out.push(CheckResult::failed("robin residual", &e)),
    }

    out.push(wrap(
        "fock consistency",
        fock_check(&[2, 3], if q { &[1.0] } else { &[0.5, 1.0, 2.0] }, 10)
            .map(|v| CheckResult::at_most("fock consistency", v, 1e-7, "N ∈ {2, 3}, 10 points")),
    ));

    let r = (|| Ok(braid_consistency(3, 1.0)?.max(braid_consistency(4, 0.7)?)))()
        .map(|v| CheckResult::at_most("braid consistency", v, 1e-12, "all of S₃ and S₄"));
    out.push(wrap("braid consistency", r));

    let cfg = if q {
        TruncationConfig::new(12, 24, 40).expect("valid")
    } else {
        TruncationConfig::default()
    };
    let states = [
        (0, 0, 0.0),
        (1, 0, 0.0),
        (0, 0, 1.0),
        (1, 0, 1.0),
        (1, 0, 4.0),
        (2, 1, 1.0),
    ];
    match matrix_sanity(&states, &cfg) {
        Ok((tr, asym, min)) => {
            out.push(CheckResult::at_most("ρ trace", tr, 1e-8, ""));
            out.push(CheckResult::at_most("ρ symmetry", asym, 1e-12, ""));
            out.push(CheckResult::at_most(
                "ρ positivity",
                (-min).max(0.0),
                1e-10,
                "negative part of the smallest eigenvalue",
            ));
        }
        Err(e) => out.push(CheckResult::failed("ρ sanity", &e)),
    }

    let r = build_rdm(&TwoAnyonState::new(0, 0, eta(1.0)), &cfg, RdmMethod::Generic).and_then(|rho| {
        let a = eigenvalues_sym(rho.matrix())?;
        let b = jacobi_eigenvalues(rho.matrix())?;
        Ok(CheckResult::at_most(
            "dual eigensolver",
            max_of(a.iter().zip(&b).map(|(x, y)| (x - y).abs())),
            1e-9,
            "QR vs Jacobi",
        ))
    });
    out.push(wrap("dual eigensolver", r));
    out
}
