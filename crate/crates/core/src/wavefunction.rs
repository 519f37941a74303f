//! Coordinate-space Bethe wavefunctions of anyons with a contact exchange
//! phase.
//!
//! On the ordered region `x_1 ≤ … ≤ x_N` the wavefunction is a sum of plane
//! waves over all permutations of the momenta,
//!
//! ```text
//! ψ(x) = Σ_P e^{iθ_P} exp(i Σ_a (Pk)_a x_a),
//! ```
//!
//! where swapping the neighbouring momenta `(a, b) → (b, a)` multiplies the
//! coefficient by `exchange_phase(b − a, η)`. That rule makes the two-particle
//! component obey `(∂_{a+1} − ∂_a)ψ = ηψ` on every coincidence plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::{exchange_angle, exchange_phase};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Largest particle number handled by [`NParticleWavefunction`] (N! terms).
pub const MAX_PARTICLES: usize = 6;

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite")))
    }
}

/// `e^{i(k_1x_1 + k_2x_2)} + c e^{i(k_2x_1 + k_1x_2)}` with `c = exchange_phase(k_2 − k_1, η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParticleState {
    pub k1: f64,
    pub k2: f64,
    pub eta: f64,
    pub coefficient: Complex64,
}

impl TwoParticleState {
    pub fn new(k1: f64, k2: f64, eta: f64) -> Result<Self> {
        check_finite(&[k1, k2, eta], "momenta and η")?;
        if eta < 0.0 {
            return Err(Error::InvalidArgument(
                "scattering states need η ≥ 0; use bound_state_psi for η < 0".into(),
            ));
        }
        if k1 == k2 && eta != 0.0 {
            // the two plane waves cancel identically
            return Err(Error::InvalidArgument(
                "coincident momenta give a null state for η > 0".into(),
            ));
        }
        Ok(Self {
            k1,
            k2,
            eta,
            coefficient: exchange_phase(k2 - k1, eta),
        })
    }

    /// The plane-wave sum, at any point (the physical region is `x1 ≤ x2`).
    pub fn value(&self, x1: f64, x2: f64) -> Complex64 {
        let direct = Complex64::from_polar(1.0, self.k1 * x1 + self.k2 * x2);
        let swapped = Complex64::from_polar(1.0, self.k2 * x1 + self.k1 * x2);
        direct + self.coefficient * swapped
    }

    /// `(−∂_1 + ∂_2)ψ`.
    pub fn relative_derivative(&self, x1: f64, x2: f64) -> Complex64 {
        let i = Complex64::i();
        let direct = Complex64::from_polar(1.0, self.k1 * x1 + self.k2 * x2) * (self.k2 - self.k1);
        let swapped = Complex64::from_polar(1.0, self.k2 * x1 + self.k1 * x2) * (self.k1 - self.k2);
        i * (direct + self.coefficient * swapped)
    }
}

/// ψ(x1, x2) on the ordered region.
pub fn two_particle_psi(k1: f64, k2: f64, eta: f64, x1: f64, x2: f64) -> Result<Complex64> {
    check_finite(&[x1, x2], "positions")?;
    if x1 > x2 {
        return Err(Error::InvalidArgument(format!("expected x1 ≤ x2, got {x1} > {x2}")));
    }
    Ok(TwoParticleState::new(k1, k2, eta)?.value(x1, x2))
}

/// `max |(−∂_1 + ∂_2 − η)ψ|` over the diagonal points `x_1 = x_2 = s`.
pub fn robin_residual(state: &TwoParticleState, diagonal: &[f64]) -> Result<f64> {
    check_finite(diagonal, "diagonal points")?;
    Ok(diagonal
        .iter()
        .map(|&s| (state.relative_derivative(s, s) - state.value(s, s) * state.eta).norm())
        .fold(0.0, f64::max))
}

/// The same residual with the conjugate exchange coefficient; used as a
/// negative control.
pub fn robin_residual_wrong_phase(k1: f64, k2: f64, eta: f64, diagonal: &[f64]) -> Result<f64> {
    let mut st = TwoParticleState::new(k1, k2, eta)?;
    st.coefficient = st.coefficient.conj();
    robin_residual(&st, diagonal)
}

/// Two-particle bound state for η < 0:
/// `e^{iK(x_1 + x_2)/2} e^{(η/2)(x_2 − x_1)}` on `x_1 ≤ x_2`.
pub fn bound_state_psi(eta: f64, total_momentum: f64, x1: f64, x2: f64) -> Result<Complex64> {
    check_finite(&[eta, total_momentum, x1, x2], "arguments")?;
    if eta >= 0.0 {
        return Err(Error::InvalidArgument(format!("bound states need η < 0, got {eta}")));
    }
    if x1 > x2 {
        return Err(Error::InvalidArgument(format!("expected x1 ≤ x2, got {x1} > {x2}")));
    }
    let phase = Complex64::from_polar(1.0, 0.5 * total_momentum * (x1 + x2));
    Ok(phase * (0.5 * eta * (x2 - x1)).exp())
}

/// Squared norm of the relative part, `∫_0^∞ e^{ηr} dr = 1/|η|`.
pub fn bound_state_relative_norm(eta: f64) -> Result<f64> {
    if !(eta < 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bound states need finite η < 0, got {eta}"
        )));
    }
    Ok(1.0 / eta.abs())
}

/// A permutation of `0..n` in one-line notation: position `a` holds `perm[a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
    }
}

/// How a permutation is written as adjacent transpositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decomposition {
    /// Bubble the identity towards the target, left to right.
    #[default]
    Bubble,
    /// Bring each target entry into place from the right end, one swap at a time.
    Insertion,
}

/// Positions `a` of the adjacent swaps `(a, a + 1)` that take the identity
/// arrangement to `perm`, applied in order.
pub fn adjacent_transpositions(perm: &Permutation, how: Decomposition) -> Vec<usize> {
    let target = perm.as_slice();
    let n = target.len();
    let mut cur: Vec<usize> = (0..n).collect();
    let mut swaps = Vec::new();
    match how {
        Decomposition::Bubble => {
            for pos in 0..n {
                let from = cur.iter().position(|&v| v == target[pos]).expect("valid permutation");
                for a in (pos..from).rev() {
                    cur.swap(a, a + 1);
                    swaps.push(a);
                }
            }
        }
        Decomposition::Insertion => {
            for pos in (0..n).rev() {
                let from = cur.iter().position(|&v| v == target[pos]).expect("valid permutation");
                for a in from..pos {
                    cur.swap(a, a + 1);
                    swaps.push(a);
                }
            }
        }
    }
    debug_assert_eq!(cur, target);
    swaps
}

/// Phase `θ_P` of the plane wave with momenta `(k_{P(0)}, …, k_{P(N−1)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationPhase {
    pub permutation: Permutation,
    pub theta: f64,
}

impl PermutationPhase {
    pub fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Accumulate `θ_P` along a chain of adjacent swaps; each swap of the
/// neighbours `(a, b)` adds `exchange_angle(b − a, η)`.
pub fn permutation_phase_with(k: &[f64], perm: &Permutation, eta: f64, how: Decomposition) -> Result<PermutationPhase> {
    check_finite(k, "momenta")?;
    check_finite(&[eta], "η")?;
    if k.len() != perm.len() {
        return Err(Error::InvalidArgument(format!(
            "{} momenta for a permutation of {} elements",
            k.len(),
            perm.len()
        )));
    }
    let mut cur: Vec<f64> = k.to_vec();
    let mut theta = 0.0;
    for a in adjacent_transpositions(perm, how) {
        theta += exchange_angle(cur[a + 1] - cur[a], eta);
        cur.swap(a, a + 1);
    }
    Ok(PermutationPhase {
        permutation: perm.clone(),
        theta,
    })
}

pub fn permutation_phase(k: &[f64], perm: &Permutation, eta: f64) -> Result<PermutationPhase> {
    permutation_phase_with(k, perm, eta, Decomposition::Bubble)
}

/// N-particle Bethe wavefunction with every plane-wave term precomputed.
#[derive(Debug, Clone)]
pub struct NParticleWavefunction {
    pub momenta: Vec<f64>,
    pub eta: f64,
    terms: Vec<(Vec<f64>, Complex64)>,
}

impl NParticleWavefunction {
    pub fn new(momenta: &[f64], eta: f64) -> Result<Self> {
        let n = momenta.len();
        if n == 0 || n > MAX_PARTICLES {
            return Err(Error::InvalidArgument(format!(
                "particle number must be in 1..={MAX_PARTICLES}, got {n}"
            )));
        }
        if eta < 0.0 {
            return Err(Error::InvalidArgument("scattering states need η ≥ 0".into()));
        }
        let terms = Permutation::all(n)
            .into_iter()
            .map(|p| {
                let phase = permutation_phase(momenta, &p, eta)?;
                let k: Vec<f64> = p.as_slice().iter().map(|&a| momenta[a]).collect();
                Ok((k, phase.coefficient()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            momenta: momenta.to_vec(),
            eta,
            terms,
        })
    }

    pub fn particles(&self) -> usize {
        self.momenta.len()
    }

    /// The plane-wave sum at any point; only the ordered region is physical.
    pub fn value(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, k.iter().zip(x).map(|(a, b)| a * b).sum()))
            .sum()
    }
}

/// ψ(x) for strictly ordered `x_1 < … < x_N`.
pub fn n_particle_psi(momenta: &[f64], eta: f64, x: &[f64]) -> Result<Complex64> {
    check_finite(x, "positions")?;
    if x.len() != momenta.len() {
        return Err(Error::InvalidArgument("one position per momentum is required".into()));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "positions must be strictly increasing, got {x:?}"
        )));
    }
    Ok(NParticleWavefunction::new(momenta, eta)?.value(x))
}

/// `max |ψ(y, x, …) − ψ(x, y, …) − 2η ∫_0^∞ e^{−ηz} ψ(y + z, x − z, …) dz|`
/// over the sample points `(x, y, rest…)`.
///
/// The wavefunction is continued off the ordered region by its plane-wave
/// sum; the integral is cut at `z = 40/η`.
pub fn fock_consistency_residual(psi: &NParticleWavefunction, points: &[Vec<f64>]) -> Result<f64> {
    let n = psi.particles();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "the exchange relation needs two particles".into(),
        ));
    }
    let eta = psi.eta;
    let mut worst: f64 = 0.0;
    for p in points {
        check_finite(p, "sample point")?;
        if p.len() != n {
            return Err(Error::InvalidArgument(format!(
                "sample point {p:?} has the wrong length"
            )));
        }
        let (x, y) = (p[0], p[1]);
        let swapped: Vec<f64> = [y, x].iter().chain(&p[2..]).copied().collect();
        let mut residual = psi.value(&swapped) - psi.value(p);
        if eta != 0.0 {
            let shifted = |z: f64| {
                let mut q = swapped.clone();
                q[0] += z;
                q[1] -= z;
                psi.value(&q) * (-eta * z).exp()
            };
            let cutoff = 40.0 / eta;
            let tol = Tolerance::new(1e-12, 1e-12).with_max_intervals(20_000);
            let re = quadrature::integrate(|z| shifted(z).re, 0.0, cutoff, tol)?;
            let im = quadrature::integrate(|z| shifted(z).im, 0.0, cutoff, tol)?;
            residual -= Complex64::new(re.value, im.value) * (2.0 * eta);
        }
        worst = worst.max(residual.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bosonic_two_particle_is_symmetric() {
        let st = TwoParticleState::new(0.3, 1.1, 0.0).unwrap();
        assert_eq!(st.coefficient, Complex64::new(1.0, 0.0));
        let a = st.value(0.2, 0.9);
        let b = st.value(0.9, 0.2);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn coincident_momenta_rejected() {
        assert!(TwoParticleState::new(0.5, 0.5, 1.0).is_err());
        assert!(TwoParticleState::new(0.5, 0.5, 0.0).is_ok());
        assert!(two_particle_psi(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn robin_and_control() {
        let st = TwoParticleState::new(-0.4, 1.3, 0.7).unwrap();
        let grid = [-2.0, 0.0, 0.5, 3.0];
        assert!(robin_residual(&st, &grid).unwrap() < 1e-13);
        assert!(robin_residual_wrong_phase(-0.4, 1.3, 0.7, &grid).unwrap() > 0.1);
    }

    #[test]
    fn bound_state_values() {
        let v = bound_state_psi(-2.0, 0.0, 0.0, 1.0).unwrap();
        assert!((v.re - (-1f64).exp()).abs() < 1e-15);
        assert!(bound_state_psi(1.0, 0.0, 0.0, 1.0).is_err());
        assert_eq!(bound_state_relative_norm(-4.0).unwrap(), 0.25);
    }

    #[test]
    fn permutations_enumerated() {
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert_eq!(
            adjacent_transpositions(&Permutation::new(vec![1, 0]).unwrap(), Decomposition::Bubble),
            vec![0]
        );
    }

    #[test]
    fn decompositions_reach_target() {
        for p in Permutation::all(4) {
            for how in [Decomposition::Bubble, Decomposition::Insertion] {
                let mut cur: Vec<usize> = (0..4).collect();
                for a in adjacent_transpositions(&p, how) {
                    cur.swap(a, a + 1);
                }
                assert_eq!(cur, p.as_slice());
            }
        }
    }

    #[test]
    fn two_particle_matches_general_form() {
        let psi = NParticleWavefunction::new(&[0.2, 0.9], 1.5).unwrap();
        let st = TwoParticleState::new(0.2, 0.9, 1.5).unwrap();
        assert!((psi.value(&[0.1, 0.4]) - st.value(0.1, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn particle_cap() {
        assert!(NParticleWavefunction::new(&[0.0; 7], 1.0).is_err());
        assert!(n_particle_psi(&[0.1, 0.2], 1.0, &[0.5, 0.5]).is_err());
    }
}
