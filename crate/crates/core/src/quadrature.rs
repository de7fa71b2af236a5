//! Lower bounds on projection probabilities from homodyne moments.
//!
//! For any state, `⟨ψ_r|ρ|ψ_r⟩ ≥ 1 − Tr(ρ S n̂ S†)` where `|ψ_r⟩ = S(r)|0⟩` is
//! the squeezed vacuum with covariance `diag(e^{2r}, e^{−2r})`. Expanding the
//! squeezed number operator in quadratures gives
//! `3/2 − ⟨x̂1²⟩·e^{−2r} − ⟨x̂2²⟩·e^{2r}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest first moment treated as zero.
pub const CENTERING_TOLERANCE: f64 = 1e-9;

/// Quadrature moments: means and raw second moments `⟨x̂1²⟩`, `⟨x̂2²⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    pub m1: f64,
    pub m2: f64,
    pub s1: f64,
    pub s2: f64,
}

impl QuadratureMoments {
    pub fn new(m1: f64, m2: f64, s1: f64, s2: f64) -> Result<Self> {
        let q = Self { m1, m2, s1, s2 };
        if ![m1, m2, s1, s2].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("quadrature moments must be finite"));
        }
        if s1 < m1 * m1 || s2 < m2 * m2 {
            return Err(Error::invalid(format!("second moments below squared means: {q:?}")));
        }
        Ok(q)
    }

    pub fn centered(s1: f64, s2: f64) -> Result<Self> {
        Self::new(0.0, 0.0, s1, s2)
    }

    pub fn is_centered(&self) -> bool {
        self.m1.abs() <= CENTERING_TOLERANCE && self.m2.abs() <= CENTERING_TOLERANCE
    }

    pub fn variances(&self) -> (f64, f64) {
        (self.s1 - self.m1 * self.m1, self.s2 - self.m2 * self.m2)
    }

    /// Heisenberg product of the variances is at least 1/16. Data breaking
    /// this usually carries a calibration error; it is reported, not rejected.
    pub fn satisfies_uncertainty(&self) -> bool {
        let (v1, v2) = self.variances();
        v1 * v2 >= 1.0 / 16.0 - 1e-12
    }

    /// Moments of `D(−t) ρ D(−t)†`, i.e. the state shifted so that `t` moves
    /// to the origin.
    pub fn displaced(&self, t: (f64, f64)) -> Self {
        Self {
            m1: self.m1 - t.0,
            m2: self.m2 - t.1,
            s1: self.s1 - 2.0 * t.0 * self.m1 + t.0 * t.0,
            s2: self.s2 - 2.0 * t.1 * self.m2 + t.1 * t.1,
        }
    }
}

/// `3/2 − s1·e^{−2r} − s2·e^{2r}`, a lower bound on the projection onto the
/// squeezed vacuum `S(r)|0⟩`. Unclipped: values ≤ 0 say nothing.
pub fn squeezed_vacuum_bound(q: &QuadratureMoments, r: f64) -> Result<f64> {
    if !q.is_centered() {
        return Err(Error::invalid(format!(
            "moments have mean ({}, {}); displace them to the target centre first",
            q.m1, q.m2
        )));
    }
    Ok(1.5 - q.s1 * (-2.0 * r).exp() - q.s2 * (2.0 * r).exp())
}

/// `r = ln(s1/s2)/4`, where the bound peaks at `3/2 − 2√(s1·s2)`.
pub fn optimal_bound_squeezing(q: &QuadratureMoments) -> Result<f64> {
    if !(q.s1 > 0.0 && q.s2 > 0.0) {
        return Err(Error::invalid("second moments must be positive"));
    }
    Ok(0.25 * (q.s1 / q.s2).ln())
}

/// Bound on the projection onto the coherent state centred at `target_mean`,
/// from raw (uncentred) moments: `3/2 − ⟨(x̂1−t1)²⟩ − ⟨(x̂2−t2)²⟩`.
pub fn coherent_bound(q_raw: &QuadratureMoments, target_mean: (f64, f64)) -> f64 {
    let d = q_raw.displaced(target_mean);
    1.5 - d.s1 - d.s2
}
