//! Cross-validation suites run by `qdverify oracle-check`: each closed form
//! against its brute-force or Fock-space counterpart.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criterion::{qd_criterion, qd_criterion_numeric, FidelityPair};
use crate::error::Result;
use crate::fock::{self, FockDensity};
use crate::gaussian::{rotate_cov, uhlmann_fidelity_gaussian, CovMat2, GaussianState};
use crate::mp_oracle::{self, MpSearch};
use crate::quadrature::{squeezed_vacuum_bound, QuadratureMoments};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: usize,
    /// Largest observed violation (deviation or excess), compared with `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &str, samples: usize, worst: f64, tolerance: f64) -> Self {
        Self { name: name.to_owned(), samples, worst, tolerance, passed: worst <= tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub seed: u64,
    pub mp_resolution: usize,
    pub mp_random_schemes: usize,
    pub random_draws: usize,
    pub fock_pairs: usize,
    pub fock_dim: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            seed: 0,
            mp_resolution: mp_oracle::DEFAULT_RESOLUTION,
            mp_random_schemes: 64,
            random_draws: 10_000,
            fock_pairs: 10,
            fock_dim: fock::DEFAULT_DIM,
        }
    }
}

const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Numerical supremum over measure-and-prepare schemes vs the closed-form
/// bound on the 9×9×9 grid of `(γ, γ', p₊)`. Returns the deviation check and
/// the random-scheme excess check.
pub fn check_mp_bound(s: &OracleSettings) -> Result<[CheckOutcome; 2]> {
    let mut worst_dev: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut n = 0;
    for &g in &GRID {
        for &gp in &GRID {
            for &p in &GRID {
                let search = MpSearch {
                    resolution: s.mp_resolution,
                    random_schemes: s.mp_random_schemes,
                    seed: s.seed.wrapping_add(n as u64),
                    ..MpSearch::default()
                };
                let opt = mp_oracle::optimize_mp_with(g, gp, p, search)?;
                let exact = mp_oracle::closed_form_bound(g, gp, p);
                worst_dev = worst_dev.max((opt.fidelity - exact).abs());
                if let Some(r) = opt.best_random {
                    worst_excess = worst_excess.max(r - exact);
                }
                n += 1;
            }
        }
    }
    Ok([
        CheckOutcome::new("mp_oracle_vs_closed_form", n, worst_dev, 1e-6),
        CheckOutcome::new("random_schemes_below_bound", n, worst_excess.max(0.0), 1e-9),
    ])
}

/// `g(φ)² − f(φ)` against its closed-form residual on random draws.
pub fn check_tangent_plane(s: &OracleSettings) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x7a4e);
    let mut worst: f64 = 0.0;
    for _ in 0..s.random_draws {
        let (g, gp, p, phi) = (
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let ep = mp_oracle::ensemble_params(g, p);
        let gv = mp_oracle::g_phi(&ep, g, gp, phi);
        let diff = gv * gv - mp_oracle::f_phi(&ep, g, gp, phi);
        let closed = mp_oracle::tangent_residual(&ep, g, gp, phi);
        worst = worst.max((diff - closed).abs()).max(-diff - 1e-12);
    }
    CheckOutcome::new("tangent_plane_residual", s.random_draws, worst, 1e-10)
}

/// Closed-form and numeric verdicts on random `(a, b, B)` away from the boundary.
pub fn check_criterion_equivalence(s: &OracleSettings) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xc817);
    let mut mismatches = 0usize;
    let mut used = 0usize;
    while used < s.random_draws {
        let f = FidelityPair::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))?;
        let b = rng.gen_range(0.0..1.0);
        let closed = qd_criterion(f, b)?;
        if closed.degenerate.is_none() && (closed.lhs - closed.rhs).abs() < 1e-6 {
            continue;
        }
        used += 1;
        if closed.is_quantum_domain != qd_criterion_numeric(f, b)?.is_quantum_domain {
            mismatches += 1;
        }
    }
    Ok(CheckOutcome::new("criterion_closed_vs_numeric", used, mismatches as f64, 0.0))
}

/// Random zero-mean squeezed-thermal covariance parameters: `r ≤ 6 dB`, `n̄ ≤ 1`.
pub fn random_squeezed_thermal(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let r_max = 0.25 * 10f64.ln() * 0.6; // e^{2r} ≤ 10^{0.6}
    (rng.gen_range(0.0..r_max), rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::PI))
}

pub fn gaussian_of(r: f64, nbar: f64, theta: f64) -> GaussianState {
    GaussianState::centered(rotate_cov(&CovMat2::squeezed_thermal(r, nbar), theta))
}

/// Gaussian Uhlmann formula vs Fock-space eigendecomposition.
pub fn check_gaussian_fidelity(s: &OracleSettings) -> Result<[CheckOutcome; 2]> {
    let dim = s.fock_dim;
    let p = fock::coherent_fock(Complex64::from(1.0), dim)?;
    let q = fock::coherent_fock(Complex64::from(-1.0), dim)?;
    let coh_fock = fock::uhlmann_fock(&p, &q)?;
    let coh_gauss = uhlmann_fidelity_gaussian(&GaussianState::coherent(1.0, 0.0), &GaussianState::coherent(-1.0, 0.0))?;
    let coherent = CheckOutcome::new("coherent_pair_fidelity", 1, (coh_fock - coh_gauss).abs(), 1e-6);

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x9a55);
    let mut worst: f64 = 0.0;
    for _ in 0..s.fock_pairs {
        let (r1, n1, t1) = random_squeezed_thermal(&mut rng);
        let (r2, n2, t2) = random_squeezed_thermal(&mut rng);
        let f =
            fock::uhlmann_fock(&fock::squeezed_thermal(r1, n1, t1, dim)?, &fock::squeezed_thermal(r2, n2, t2, dim)?)?;
        let g = uhlmann_fidelity_gaussian(&gaussian_of(r1, n1, t1), &gaussian_of(r2, n2, t2))?;
        worst = worst.max((f - g).abs());
    }
    Ok([coherent, CheckOutcome::new("squeezed_thermal_fidelity", s.fock_pairs, worst, 1e-4)])
}

/// The homodyne moment bound never exceeds the true projection onto
/// `S(r)|0⟩`; returns the largest excess over a few states and squeezings.
pub fn check_quadrature_bound(s: &OracleSettings) -> Result<CheckOutcome> {
    let dim = s.fock_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x0a1a);
    let mut worst = f64::NEG_INFINITY;
    let states = s.fock_pairs.max(1);
    let rs: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.7..0.7)).collect();
    let kets: Vec<_> = rs.iter().map(|&r| fock::squeezed_vacuum_ket(r, dim)).collect();
    for _ in 0..states {
        let (r, n, t) = random_squeezed_thermal(&mut rng);
        let rho = fock::squeezed_thermal(r, n, t, dim)?;
        worst = worst.max(bound_excess(&rho, &rs, &kets)?);
    }
    Ok(CheckOutcome::new("quadrature_bound_soundness", states * rs.len(), worst.max(0.0), 1e-10))
}

/// Largest `bound − true projection` over the given squeezings.
pub fn bound_excess(rho: &FockDensity, rs: &[f64], kets: &[fock::CVector]) -> Result<f64> {
    let m = fock::quadrature_moments_fock(rho);
    let q = QuadratureMoments::new(0.0, 0.0, m.v11, m.v22)?;
    let mut worst = f64::NEG_INFINITY;
    for (r, ket) in rs.iter().zip(kets) {
        worst = worst.max(squeezed_vacuum_bound(&q, *r)? - rho.projection(ket)?);
    }
    Ok(worst)
}

/// Every suite at the given settings.
pub fn run_all(s: &OracleSettings) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    out.extend(check_mp_bound(s)?);
    out.push(check_tangent_plane(s));
    out.push(check_criterion_equivalence(s)?);
    out.extend(check_gaussian_fidelity(s)?);
    out.push(check_quadrature_bound(s)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let s = OracleSettings { random_draws: 500, fock_pairs: 2, fock_dim: 60, ..OracleSettings::default() };
        for c in [check_tangent_plane(&s), check_criterion_equivalence(&s).unwrap()] {
            assert!(c.passed, "{c:?}");
        }
        for c in check_gaussian_fidelity(&s).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        assert!(check_quadrature_bound(&s).unwrap().passed);
    }
}
