//! Brute-force search over measure-and-prepare schemes for two pure inputs.
//!
//! Everything lives in the real two-dimensional span of `|ψ±⟩`. POVM elements
//! are rank-one vectors in the x–z plane of the Bloch sphere (the ensemble
//! operators have no σ_y component), labelled by their angle `φ_k` measured
//! from the direction `φ0` of the bias operator `Δ = p₊ψ₊ − p₋ψ₋`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::criterion::fc;
use crate::error::{check_unit, Error, Result};
use crate::numeric::grid_then_golden;

/// Completeness residual accepted by [`mep_fidelity`].
pub const COMPLETENESS_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_RESOLUTION: usize = 4096;

/// `P`, `G` and `φ0` for a prior and input overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    /// `P = p₊ − p₋`.
    pub bias: f64,
    /// `G = √(P²γ² + 1 − γ²)`, the Bloch length of `Δ`.
    pub g: f64,
    pub phi0: f64,
}

pub fn ensemble_params(gamma: f64, p_plus: f64) -> EnsembleParams {
    let bias = 2.0 * p_plus - 1.0;
    let s = (1.0 - gamma * gamma).max(0.0).sqrt();
    let g = (bias * bias * gamma * gamma + s * s).sqrt();
    // atan2 keeps φ0 defined at G = 0 (γ = 1, p₊ = 1/2), where it is π/2
    let phi0 = if g > 0.0 { s.atan2(bias * gamma) } else { FRAC_PI_2 };
    EnsembleParams { bias, g, phi0 }
}

/// One POVM element `M_k` with `Tr M_k = weight` pointing at `φ_k + φ0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeElement {
    pub weight: f64,
    pub angle: f64,
}

/// Finite measure-and-prepare scheme; each outcome prepares the top
/// eigenvector of its `A_k`, which is optimal for that outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CQScheme {
    pub elements: Vec<SchemeElement>,
}

impl CQScheme {
    /// Projective measurement along `φ` and `φ + π`.
    pub fn projective(angle: f64) -> Self {
        Self {
            elements: vec![
                SchemeElement { weight: 1.0, angle: angle.rem_euclid(TAU) },
                SchemeElement { weight: 1.0, angle: (angle + PI).rem_euclid(TAU) },
            ],
        }
    }

    /// `(Σw − 2, Σw·cos(φ+φ0), Σw·sin(φ+φ0))`, all zero for a valid POVM.
    pub fn completeness_residual(&self, phi0: f64) -> [f64; 3] {
        self.elements.iter().fold([-2.0, 0.0, 0.0], |[t, c, s], e| {
            let x = e.angle + phi0;
            [t + e.weight, c + e.weight * x.cos(), s + e.weight * x.sin()]
        })
    }

    fn check(&self, phi0: f64) -> Result<()> {
        if let Some(e) = self.elements.iter().find(|e| !(e.weight >= 0.0) || !e.angle.is_finite()) {
            return Err(Error::invalid(format!("bad scheme element {e:?}")));
        }
        let r = self.completeness_residual(phi0);
        if r.iter().any(|v| v.abs() > COMPLETENESS_TOLERANCE) {
            return Err(Error::Completeness(format!(
                "trace/moment residuals {:.3e}, {:.3e}, {:.3e}",
                r[0], r[1], r[2]
            )));
        }
        Ok(())
    }
}

/// Operator norm of `A_k` from `ρ_k = Tr M_k ρ` and `Δ_k = Tr M_k Δ`.
pub fn norm_a_k(rho_k: f64, delta_k: f64, gamma_prime: f64) -> Result<f64> {
    if !(rho_k >= delta_k.abs()) {
        return Err(Error::invalid(format!("need rho_k >= |delta_k|, got {rho_k}, {delta_k}")));
    }
    let gp2 = gamma_prime * gamma_prime;
    Ok(0.5 * (rho_k + (rho_k * rho_k * gp2 + delta_k * delta_k * (1.0 - gp2)).sqrt()))
}

/// `f(φ)`; `√f(φ_k)·w_k/2` is the norm excess `‖A_k‖ − ρ_k/2` contributed by
/// an element at angle `φ_k`.
pub fn f_phi(ep: &EnsembleParams, gamma: f64, gamma_prime: f64, phi: f64) -> f64 {
    let EnsembleParams { bias: p, g, phi0 } = *ep;
    let gp2 = gamma_prime * gamma_prime;
    if g == 0.0 {
        // γ = 1, P = 0: Δ vanishes and ρ is the common pure input
        let r = 1.0 + (phi + phi0).cos();
        return gp2 * r * r;
    }
    let s = (1.0 - gamma * gamma).max(0.0).sqrt();
    let d = p + g * phi.cos();
    let r = g + p * phi.cos() - (1.0 - p * p) * gamma * s * phi.sin();
    (1.0 - gp2) * d * d + gp2 / (g * g) * r * r
}

/// `K = √(γ'² + (1 − γ'²)G²)`.
pub fn tangent_height(ep: &EnsembleParams, gamma_prime: f64) -> f64 {
    let gp2 = gamma_prime * gamma_prime;
    (gp2 + (1.0 - gp2) * ep.g * ep.g).sqrt()
}

/// Plane `g(φ)` touching `√f` at `φ = 0` and `φ = π`. Requires `G > 0`.
pub fn g_phi(ep: &EnsembleParams, gamma: f64, gamma_prime: f64, phi: f64) -> f64 {
    let EnsembleParams { bias: p, g, .. } = *ep;
    debug_assert!(g > 0.0);
    let k = tangent_height(ep, gamma_prime);
    let s = (1.0 - gamma * gamma).max(0.0).sqrt();
    k + (k * k * p * phi.cos() - gamma_prime * gamma_prime * (1.0 - p * p) * gamma * s * phi.sin()) / (g * k)
}

/// Closed form of `g(φ)² − f(φ)`: `R·sin²φ` with
/// `R = (1−γ'²)(1−P²)(1−γ²)·[(1−γ'²)G² + γ'²(1−(1−P²)γ²)] / K²`.
pub fn tangent_residual(ep: &EnsembleParams, gamma: f64, gamma_prime: f64, phi: f64) -> f64 {
    let p2 = ep.bias * ep.bias;
    let gp2 = gamma_prime * gamma_prime;
    let g2 = gamma * gamma;
    let k2 = gp2 + (1.0 - gp2) * ep.g * ep.g;
    let r = (1.0 - gp2) * (1.0 - p2) * (1.0 - g2) * ((1.0 - gp2) * ep.g * ep.g + gp2 * (1.0 - (1.0 - p2) * g2)) / k2;
    r * phi.sin().powi(2)
}

fn validate_task(gamma: f64, gamma_prime: f64, p_plus: f64) -> Result<()> {
    check_unit("gamma", gamma)?;
    check_unit("gamma_prime", gamma_prime)?;
    check_unit("p_plus", p_plus)
}

/// Best average fidelity reachable with the scheme's measurement:
/// `(1 + Σ_k (w_k/2)·√f(φ_k)) / 2`.
pub fn mep_fidelity(scheme: &CQScheme, gamma: f64, gamma_prime: f64, p_plus: f64) -> Result<f64> {
    validate_task(gamma, gamma_prime, p_plus)?;
    let ep = ensemble_params(gamma, p_plus);
    scheme.check(ep.phi0)?;
    Ok(scheme_value(&scheme.elements, &ep, gamma, gamma_prime))
}

fn scheme_value(elements: &[SchemeElement], ep: &EnsembleParams, gamma: f64, gamma_prime: f64) -> f64 {
    let excess: f64 =
        elements.iter().map(|e| 0.5 * e.weight * f_phi(ep, gamma, gamma_prime, e.angle).max(0.0).sqrt()).sum();
    0.5 * (1.0 + excess)
}

/// Same quantity as [`mep_fidelity`] computed straight from the definition:
/// builds `ψ±`, `ψ±'`, every `M_k` as a 2×2 matrix, forms
/// `A_k = Σ_i p_i ⟨ψ_i|M_k|ψ_i⟩ |ψ_i'⟩⟨ψ_i'|` and sums the largest eigenvalues.
pub fn scheme_fidelity_direct(scheme: &CQScheme, gamma: f64, gamma_prime: f64, p_plus: f64) -> Result<f64> {
    validate_task(gamma, gamma_prime, p_plus)?;
    let ep = ensemble_params(gamma, p_plus);
    scheme.check(ep.phi0)?;
    let half_pair = |ov: f64| [((1.0 + ov) / 2.0).sqrt(), ((1.0 - ov) / 2.0).max(0.0).sqrt()];
    let [u, v] = half_pair(gamma);
    let inputs = [[u, v], [u, -v]];
    let [tu, tv] = half_pair(gamma_prime);
    let targets = [[tu, tv], [tu, -tv]];
    let priors = [p_plus, 1.0 - p_plus];
    let mut total = 0.0;
    for e in &scheme.elements {
        let x = e.angle + ep.phi0;
        let (c, s) = (x.cos(), x.sin());
        // M = (w/2)(I + cσz + sσx)
        let m = [[0.5 * e.weight * (1.0 + c), 0.5 * e.weight * s], [0.5 * e.weight * s, 0.5 * e.weight * (1.0 - c)]];
        let mut a = [[0.0; 2]; 2];
        for i in 0..2 {
            let psi = inputs[i];
            let prob = psi[0] * (m[0][0] * psi[0] + m[0][1] * psi[1]) + psi[1] * (m[1][0] * psi[0] + m[1][1] * psi[1]);
            let t = targets[i];
            for r in 0..2 {
                for q in 0..2 {
                    a[r][q] += priors[i] * prob * t[r] * t[q];
                }
            }
        }
        let tr = a[0][0] + a[1][1];
        let disc = ((a[0][0] - a[1][1]).powi(2) + 4.0 * a[0][1] * a[1][0]).sqrt();
        total += 0.5 * (tr + disc);
    }
    Ok(total)
}

/// Search settings for [`optimize_mp_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpSearch {
    pub resolution: usize,
    pub random_schemes: usize,
    pub max_elements: usize,
    pub seed: u64,
}

impl Default for MpSearch {
    fn default() -> Self {
        Self { resolution: DEFAULT_RESOLUTION, random_schemes: 256, max_elements: 6, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpOptimum {
    pub scheme: CQScheme,
    pub fidelity: f64,
    pub best_projective: f64,
    /// `None` when no random draw survived the constraint projection.
    pub best_random: Option<f64>,
    pub random_accepted: usize,
}

pub fn optimize_mp(gamma: f64, gamma_prime: f64, p_plus: f64, resolution: usize) -> Result<MpOptimum> {
    optimize_mp_with(gamma, gamma_prime, p_plus, MpSearch { resolution, ..MpSearch::default() })
}

/// Numerical supremum over measure-and-prepare schemes.
///
/// Scans the projective family `{φ, φ+π}` over a full period and refines the
/// best grid cell, then samples random schemes with 3 to `max_elements`
/// outcomes whose weights are projected onto the completeness constraints.
pub fn optimize_mp_with(gamma: f64, gamma_prime: f64, p_plus: f64, search: MpSearch) -> Result<MpOptimum> {
    validate_task(gamma, gamma_prime, p_plus)?;
    if search.resolution < 16 {
        return Err(Error::invalid(format!("resolution {} < 16", search.resolution)));
    }
    let ep = ensemble_params(gamma, p_plus);
    let projective = |phi: f64| {
        let a = f_phi(&ep, gamma, gamma_prime, phi).max(0.0).sqrt();
        let b = f_phi(&ep, gamma, gamma_prime, phi + PI).max(0.0).sqrt();
        0.5 * (1.0 + 0.5 * (a + b))
    };
    let (phi_best, best_projective) = grid_then_golden(projective, -FRAC_PI_2, FRAC_PI_2, search.resolution);

    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut best_random: Option<(f64, Vec<SchemeElement>)> = None;
    let mut accepted = 0;
    let max_k = search.max_elements.max(3);
    for _ in 0..search.random_schemes * 8 {
        if accepted == search.random_schemes {
            break;
        }
        let k = rng.gen_range(3..=max_k);
        let Some(elements) = random_scheme(&mut rng, k, ep.phi0) else { continue };
        accepted += 1;
        let v = scheme_value(&elements, &ep, gamma, gamma_prime);
        if best_random.as_ref().map_or(true, |(b, _)| v > *b) {
            best_random = Some((v, elements));
        }
    }

    let (fidelity, scheme) = match best_random {
        Some((v, ref els)) if v > best_projective => (v, CQScheme { elements: els.clone() }),
        _ => (best_projective, CQScheme::projective(phi_best)),
    };
    Ok(MpOptimum {
        scheme,
        fidelity,
        best_projective,
        best_random: best_random.map(|(v, _)| v),
        random_accepted: accepted,
    })
}

/// Random angles and weights; the first two weights are re-solved so that the
/// Bloch moments vanish, then all weights are rescaled to sum to 2.
fn random_scheme(rng: &mut ChaCha8Rng, k: usize, phi0: f64) -> Option<Vec<SchemeElement>> {
    let abs_angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
    let mut w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let (mut rc, mut rs) = (0.0, 0.0);
    for j in 2..k {
        rc += w[j] * abs_angles[j].cos();
        rs += w[j] * abs_angles[j].sin();
    }
    let (c0, s0, c1, s1) = (abs_angles[0].cos(), abs_angles[0].sin(), abs_angles[1].cos(), abs_angles[1].sin());
    let det = c0 * s1 - c1 * s0;
    if det.abs() < 1e-6 {
        return None;
    }
    w[0] = (-rc * s1 + rs * c1) / det;
    w[1] = (-c0 * rs + s0 * rc) / det;
    if w[0] < 0.0 || w[1] < 0.0 {
        return None;
    }
    let total: f64 = w.iter().sum();
    Some(
        abs_angles
            .iter()
            .zip(&w)
            .map(|(&x, &wi)| SchemeElement { weight: 2.0 * wi / total, angle: (x - phi0).rem_euclid(TAU) })
            .collect(),
    )
}

/// Closed-form bound evaluated at the task's `B` for comparison with the search.
pub fn closed_form_bound(gamma: f64, gamma_prime: f64, p_plus: f64) -> f64 {
    let b = (1.0 - gamma_prime * gamma_prime) * gamma * gamma;
    fc(b, p_plus)
}
