//! Single-mode Gaussian states with covariance matrices scaled so that the
//! vacuum is the identity (`C_ij = 4·(sym. second moment − mean·mean)` for
//! `x̂1 = (â+â†)/2`, `x̂2 = (â−â†)/2i`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on the uncertainty relation `det C ≥ 1`.
pub const PHYSICAL_TOLERANCE: f64 = 1e-9;
/// `det C − 1` at or below this counts as a pure state.
pub const PURE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovMat2 {
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
}

impl CovMat2 {
    pub const VACUUM: CovMat2 = CovMat2 { c11: 1.0, c12: 0.0, c22: 1.0 };

    pub fn diag(x: f64, y: f64) -> Self {
        Self { c11: x, c12: 0.0, c22: y }
    }

    /// Covariance of `S(r)` acting on a thermal state with `n̄`.
    pub fn squeezed_thermal(r: f64, nbar: f64) -> Self {
        let s = 2.0 * nbar + 1.0;
        Self::diag(s * (2.0 * r).exp(), s * (-2.0 * r).exp())
    }

    pub fn det(&self) -> f64 {
        self.c11 * self.c22 - self.c12 * self.c12
    }

    pub fn trace(&self) -> f64 {
        self.c11 + self.c22
    }

    fn add(&self, o: &Self) -> Self {
        Self { c11: self.c11 + o.c11, c12: self.c12 + o.c12, c22: self.c22 + o.c22 }
    }

    pub fn is_physical(&self) -> bool {
        self.c11 > 0.0 && self.c22 > 0.0 && self.det() >= 1.0 - PHYSICAL_TOLERANCE
    }

    pub fn check_physical(&self) -> Result<()> {
        if [self.c11, self.c12, self.c22].iter().all(|v| v.is_finite()) && self.is_physical() {
            Ok(())
        } else {
            Err(Error::domain(format!("covariance {self:?} violates det C >= 1 (det = {})", self.det())))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    /// `(⟨x̂1⟩, ⟨x̂2⟩)`; a coherent state `|α⟩` has mean `(Re α, Im α)`.
    pub mean: [f64; 2],
    pub cov: CovMat2,
}

impl GaussianState {
    pub fn centered(cov: CovMat2) -> Self {
        Self { mean: [0.0, 0.0], cov }
    }

    pub fn coherent(re: f64, im: f64) -> Self {
        Self { mean: [re, im], cov: CovMat2::VACUUM }
    }

    /// Pure squeezed vacuum with covariance `diag(e^{2r}, e^{−2r})`.
    pub fn squeezed_vacuum(r: f64) -> Self {
        Self::centered(CovMat2::squeezed_thermal(r, 0.0))
    }

    pub fn rotated(&self, theta: f64) -> Self {
        let (c, s) = (theta.cos(), theta.sin());
        let [m1, m2] = self.mean;
        // means transform with the same R(−θ) as the covariance
        Self { mean: [c * m1 + s * m2, -s * m1 + c * m2], cov: rotate_cov(&self.cov, theta) }
    }
}

/// Input/output squeezing in dB as quoted by experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingRecord {
    pub squeezing_db: f64,
    pub antisqueezing_db: f64,
}

impl SqueezingRecord {
    pub fn linear(&self) -> (f64, f64) {
        (db_to_linear(self.squeezing_db), db_to_linear(self.antisqueezing_db))
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        let (x, y) = self.linear();
        x * y >= 1.0 - tol
    }
}

/// Power-ratio conversion `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `R(−θ)·C·R(θ)` with `R(θ) = [[cos θ, −sin θ], [sin θ, cos θ]]`.
pub fn rotate_cov(c: &CovMat2, theta: f64) -> CovMat2 {
    let (cs, sn) = (theta.cos(), theta.sin());
    let (cc, ss, cx) = (cs * cs, sn * sn, cs * sn);
    CovMat2 {
        c11: cc * c.c11 + 2.0 * cx * c.c12 + ss * c.c22,
        c12: (cc - ss) * c.c12 + cx * (c.c22 - c.c11),
        c22: ss * c.c11 - 2.0 * cx * c.c12 + cc * c.c22,
    }
}

/// `det C − 1`, snapped to zero within [`PURE_TOLERANCE`].
fn mixedness(c: &CovMat2) -> f64 {
    snap_pure(c.det() - 1.0)
}

fn snap_pure(e: f64) -> f64 {
    if e <= PURE_TOLERANCE {
        0.0
    } else {
        e
    }
}

/// Unsquared Uhlmann fidelity `Tr√(√ρ1 ρ2 √ρ1)` of two Gaussian states:
/// `√(2 / (√(Δ+δ) − √δ)) · exp(−Λᵀ(C1+C2)⁻¹Λ)`.
pub fn uhlmann_fidelity_gaussian(g1: &GaussianState, g2: &GaussianState) -> Result<f64> {
    g1.cov.check_physical()?;
    g2.cov.check_physical()?;
    let sum = g1.cov.add(&g2.cov);
    let big = sum.det();
    let small = mixedness(&g1.cov) * mixedness(&g2.cov);
    // √(Δ+δ) − √δ without cancellation
    let denom = big / ((big + small).sqrt() + small.sqrt());
    let l = [g1.mean[0] - g2.mean[0], g1.mean[1] - g2.mean[1]];
    let quad = (sum.c22 * l[0] * l[0] - 2.0 * sum.c12 * l[0] * l[1] + sum.c11 * l[1] * l[1]) / big;
    Ok((2.0 / denom).sqrt() * (-quad).exp())
}

/// The `γ` to use in the criterion when the two inputs are mixed Gaussian states.
pub fn mixed_input_gamma(g1: &GaussianState, g2: &GaussianState) -> Result<f64> {
    uhlmann_fidelity_gaussian(g1, g2)
}

fn check_output(xp: f64, yp: f64) -> Result<()> {
    if !(xp > 0.0 && yp > 0.0) || xp * yp < 1.0 - PHYSICAL_TOLERANCE {
        return Err(Error::domain(format!("variances ({xp}, {yp}) are unphysical")));
    }
    Ok(())
}

/// `⟨ψ'|ρ|ψ'⟩` for a centred Gaussian `ρ` with covariance `diag(X', Y')` and
/// the squeezed-vacuum target of covariance `diag(e^{2r}, e^{−2r})`.
pub fn pure_target_projection(xp: f64, yp: f64, r: f64) -> Result<f64> {
    check_output(xp, yp)?;
    Ok(2.0 / ((2.0 * r).exp() * yp + (-2.0 * r).exp() * xp + xp * yp + 1.0).sqrt())
}

/// `r = ln(X'/Y')/4`, the target squeezing that maximizes the projection.
pub fn optimal_target_squeezing(xp: f64, yp: f64) -> Result<f64> {
    if !(xp > 0.0 && yp > 0.0) {
        return Err(Error::invalid(format!("variances ({xp}, {yp}) must be positive")));
    }
    Ok(0.25 * (xp / yp).ln())
}

/// `2 / (1 + √(X'Y'))`, the projection at the optimal target squeezing.
pub fn optimal_projection(xp: f64, yp: f64) -> Result<f64> {
    check_output(xp, yp)?;
    Ok(2.0 / (1.0 + (xp * yp).sqrt()))
}

fn rotation_term(x: f64, y: f64, theta: f64) -> f64 {
    0.5 * ((x + y).powi(2) - (x - y).powi(2) * (2.0 * theta).cos())
}

/// Squared Uhlmann fidelity between `diag(X, Y)` and its rotation by `θ`.
pub fn input_overlap_sq(x: f64, y: f64, theta: f64) -> Result<f64> {
    check_output(x, y)?;
    let xy = x * y;
    // same cancellation-free ordering as the general formula
    let small = snap_pure(xy - 1.0).powi(2);
    let big = 2.0 * xy + rotation_term(x, y, theta);
    Ok(2.0 / (big / ((big + small).sqrt() + small.sqrt())))
}

/// `γ'² = 2 / √(2 + ½[(X'+Y')² − (X'−Y')² cos 2θ])`, the squared overlap of two
/// pure targets with covariance entries `(X', Y')` rotated by `θ`.
///
/// Only pure targets (`X'Y' = 1`) make this an overlap; other entries are
/// accepted so the literal reading of experimental tables can be evaluated.
pub fn target_overlap_sq(xt: f64, yt: f64, theta: f64) -> Result<f64> {
    if !(xt > 0.0 && yt > 0.0) {
        return Err(Error::invalid(format!("target entries ({xt}, {yt}) must be positive")));
    }
    Ok(2.0 / (2.0 + rotation_term(xt, yt, theta)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn db_examples() {
        assert!(close(db_to_linear(-2.0), 0.631, 5e-4));
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!(close(db_to_linear(6.0), 3.981, 5e-4));
        assert!(close(linear_to_db(db_to_linear(-6.2)), -6.2, 1e-12));
    }

    #[test]
    fn rotation_examples() {
        let id = rotate_cov(&CovMat2::VACUUM, 0.77);
        assert!(close(id.c11, 1.0, 1e-15) && close(id.c12, 0.0, 1e-15) && close(id.c22, 1.0, 1e-15));
        let sw = rotate_cov(&CovMat2::diag(2.0, 0.5), FRAC_PI_2);
        assert!(close(sw.c11, 0.5, 1e-15) && close(sw.c22, 2.0, 1e-15) && close(sw.c12, 0.0, 1e-15));
        let q = rotate_cov(&CovMat2::diag(2.0, 0.5), FRAC_PI_4);
        assert!(close(q.c11, 1.25, 1e-15) && close(q.c22, 1.25, 1e-15) && close(q.c12.abs(), 0.75, 1e-15));
    }

    #[test]
    fn uhlmann_examples() {
        let s = GaussianState::squeezed_vacuum(0.3);
        assert!(close(uhlmann_fidelity_gaussian(&s, &s).unwrap(), 1.0, 1e-14));
        let f =
            uhlmann_fidelity_gaussian(&GaussianState::coherent(1.0, 0.0), &GaussianState::coherent(-1.0, 0.0)).unwrap();
        assert!(close(f, (-2.0f64).exp(), 1e-15));
    }

    #[test]
    fn uhlmann_rejects_unphysical() {
        let bad = GaussianState::centered(CovMat2::diag(0.5, 0.5));
        assert!(matches!(uhlmann_fidelity_gaussian(&bad, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn mixed_identical_inputs_have_unit_gamma() {
        let m = GaussianState::centered(CovMat2::squeezed_thermal(0.4, 0.7));
        assert!(close(mixed_input_gamma(&m, &m).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn projection_examples() {
        assert!(close(pure_target_projection(1.0, 1.0, 0.0).unwrap(), 1.0, 1e-15));
        let (xp, yp) = (0.984, 1.119);
        let r = optimal_target_squeezing(xp, yp).unwrap();
        assert!(close(r, -0.032_141_2, 1e-7));
        let v = pure_target_projection(xp, yp, r).unwrap();
        assert!(close(v, 2.0 / (1.0 + (xp * yp).sqrt()), 1e-14));
        assert!(close(v, optimal_projection(xp, yp).unwrap(), 1e-14));
        assert!(pure_target_projection(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn optimal_squeezing_is_stationary() {
        let (xp, yp) = (2.3, 0.7);
        let r = optimal_target_squeezing(xp, yp).unwrap();
        let h = 1e-5;
        let d = (pure_target_projection(xp, yp, r + h).unwrap() - pure_target_projection(xp, yp, r - h).unwrap())
            / (2.0 * h);
        assert!(d.abs() < 1e-8);
        assert_eq!(optimal_target_squeezing(1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn overlap_examples() {
        assert!(close(input_overlap_sq(0.631, 3.981, 0.0).unwrap(), 1.0, 1e-14));
        for x in [1.0, 1.7, 3.0] {
            for th in [0.3, 1.2] {
                assert!(close(input_overlap_sq(x, x, th).unwrap(), 1.0, 1e-14));
            }
        }
        let r = 0.4f64;
        assert!(close(target_overlap_sq((2.0 * r).exp(), (-2.0 * r).exp(), 0.0).unwrap(), 1.0, 1e-14));
        assert!(input_overlap_sq(0.5, 1.0, 0.2).is_err());
        assert!(target_overlap_sq(0.0, 1.0, 0.2).is_err());
    }

    #[test]
    fn input_overlap_matches_uhlmann_squared() {
        let (x, y) = (db_to_linear(-2.0), db_to_linear(6.0));
        let s = GaussianState::centered(CovMat2::diag(x, y));
        for th in [0.0, 0.4, 1.1, FRAC_PI_2] {
            let u = uhlmann_fidelity_gaussian(&s, &s.rotated(th)).unwrap();
            assert!(close(input_overlap_sq(x, y, th).unwrap(), u * u, 1e-10));
        }
        let g2 = input_overlap_sq(x, y, FRAC_PI_2).unwrap();
        assert!(close(mixed_input_gamma(&s, &s.rotated(FRAC_PI_2)).unwrap(), g2.sqrt(), 1e-12));
    }

    #[test]
    fn pure_target_projection_is_squared_uhlmann() {
        let out = GaussianState::centered(CovMat2::diag(1.4, 0.9));
        for r in [-0.5, 0.0, 0.2, 0.6] {
            let u = uhlmann_fidelity_gaussian(&out, &GaussianState::squeezed_vacuum(r)).unwrap();
            assert!(close(pure_target_projection(1.4, 0.9, r).unwrap(), u * u, 1e-10));
        }
    }
}
