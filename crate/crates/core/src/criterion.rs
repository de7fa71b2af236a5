//! Classical fidelity benchmark for two-state transformation tasks and the
//! quantum-domain criterion built from it.
//!
//! A task sends the pair `|ψ±⟩` (overlap `γ`) to the targets `|ψ±'⟩`
//! (overlap `γ'`). Every measure-and-prepare channel obeys
//! `p₊·b + p₋·a ≤ F_c(p₊)`; a measured pair `(a, b)` that violates this for
//! some prior certifies that the channel is not entanglement breaking.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{check_unit, Error, Result};
use crate::numeric::grid_then_golden;

/// Default width of the band around the criterion boundary flagged as marginal.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Input and target overlaps of a two-state transformation task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapPair {
    pub gamma: f64,
    pub gamma_prime: f64,
}

impl OverlapPair {
    pub fn new(gamma: f64, gamma_prime: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        check_unit("gamma_prime", gamma_prime)?;
        Ok(Self { gamma, gamma_prime })
    }

    /// `B > 0`, i.e. the task can certify anything at all.
    pub fn is_useful(&self) -> bool {
        self.gamma > 0.0 && self.gamma_prime < 1.0
    }

    pub fn total_nonorthogonality(&self) -> f64 {
        total_nonorthogonality(self)
    }
}

/// Prior of the `|ψ+⟩` input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorEnsemble {
    pub p_plus: f64,
}

impl PriorEnsemble {
    pub fn new(p_plus: f64) -> Result<Self> {
        check_unit("p_plus", p_plus)?;
        Ok(Self { p_plus })
    }

    pub fn uniform() -> Self {
        Self { p_plus: 0.5 }
    }

    pub fn p_minus(&self) -> f64 {
        1.0 - self.p_plus
    }

    /// `P = p₊ − p₋`.
    pub fn bias(&self) -> f64 {
        2.0 * self.p_plus - 1.0
    }
}

/// Measured projection probabilities: `a = ⟨ψ−'|ρ−|ψ−'⟩`, `b = ⟨ψ+'|ρ+|ψ+'⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityPair {
    pub a: f64,
    pub b: f64,
}

impl FidelityPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_unit("a", a)?;
        check_unit("b", b)?;
        Ok(Self { a, b })
    }

    pub fn symmetric(f: f64) -> Result<Self> {
        Self::new(f, f)
    }

    pub fn slope(&self) -> f64 {
        self.b - self.a
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Average fidelity `p₊·b + p₋·a` under the given prior.
    pub fn average(&self, prior: PriorEnsemble) -> f64 {
        prior.p_plus * self.b + prior.p_minus() * self.a
    }

    fn validate(&self) -> Result<()> {
        check_unit("a", self.a)?;
        check_unit("b", self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    NumericSup,
}

/// Why a verdict was decided without a tangency point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Degeneracy {
    /// `B = 0`: the benchmark is identically 1.
    NoNonorthogonality,
    /// `|b − a|` reaches the largest slope of `F_c` on `[0, 1]`, which is `B`.
    SlopeExceedsBenchmarkRange { slope: f64, max_slope: f64 },
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::NoNonorthogonality => {
                write!(f, "total non-orthogonality B is zero; the classical bound equals 1")
            }
            Degeneracy::SlopeExceedsBenchmarkRange { slope, max_slope } => write!(
                f,
                "slope |b-a| = {} exceeds benchmark slope range {}; no prior beats the bound",
                slope.abs(),
                max_slope
            ),
        }
    }
}

/// Outcome of the quantum-domain test for one `(a, b, B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub is_quantum_domain: bool,
    /// `(a + b) / 2`.
    pub lhs: f64,
    /// Boundary value the mean has to exceed at the observed slope.
    pub rhs: f64,
    pub method: Method,
    pub degenerate: Option<Degeneracy>,
    /// `|lhs − rhs|` within the configured tolerance.
    pub marginal: bool,
    /// Inputs arrived with `a > b` and were relabelled.
    pub labels_swapped: bool,
}

impl Verdict {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// `B = (1 − γ'²)·γ²`.
pub fn total_nonorthogonality(t: &OverlapPair) -> f64 {
    (1.0 - t.gamma_prime * t.gamma_prime) * t.gamma * t.gamma
}

/// `F_c(p₊) = (1 + √(B·P² + 1 − B)) / 2`, the best average fidelity any
/// measure-and-prepare scheme attains.
pub fn classical_fidelity_bound(b: f64, prior: PriorEnsemble) -> f64 {
    fc(b, prior.p_plus)
}

pub(crate) fn fc(b: f64, p_plus: f64) -> f64 {
    let bias = 2.0 * p_plus - 1.0;
    0.5 * (1.0 + (b * bias * bias + 1.0 - b).max(0.0).sqrt())
}

/// `∂F_c/∂p₊ = B·P / K`.
pub fn classical_bound_slope(b: f64, p_plus: f64) -> f64 {
    let bias = 2.0 * p_plus - 1.0;
    let k = (b * bias * bias + 1.0 - b).sqrt();
    if k == 0.0 {
        return 0.0;
    }
    b * bias / k
}

/// Prior at which `F_c` has the given slope.
///
/// Defined for `slope² < B`; the result lies inside `[0, 1]` only when
/// `|slope| ≤ B`.
pub fn tangency_prior(b: f64, slope: f64) -> Result<f64> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::domain(format!("B = {b} must lie in (0, 1]")));
    }
    if slope * slope >= b {
        return Err(Error::domain(format!("slope {slope} has slope^2 >= B = {b}; no interior tangency")));
    }
    Ok(0.5 * (1.0 + slope * ((1.0 - b) / (b * (b - slope * slope))).sqrt()))
}

/// Convex conjugate of `F_c` restricted to `p₊ ∈ [1/2, 1]`:
/// `F_c*(λ) = max (λ·p₊ − F_c(p₊))`, so that `−F_c*(s)` is the intercept of
/// the tangent line of slope `s`.
pub fn legendre_conjugate(b: f64, lambda: f64) -> Result<f64> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::domain(format!("B = {b} must lie in (0, 1]")));
    }
    let objective = |p: f64| lambda * p - fc(b, p);
    let p_star = if lambda <= 0.0 {
        0.5
    } else if lambda >= b {
        1.0
    } else {
        tangency_prior(b, lambda)?.clamp(0.5, 1.0)
    };
    Ok(objective(p_star))
}

/// Closed-form criterion boundary `(1 + √((1−B)(B−s²)/B)) / 2` for `|s| < B`.
fn closed_form_rhs(b: f64, slope: f64) -> f64 {
    0.5 * (1.0 + ((1.0 - b) * (b - slope * slope) / b).max(0.0).sqrt())
}

fn degeneracy(b: f64, slope: f64) -> Option<Degeneracy> {
    if b <= 0.0 {
        Some(Degeneracy::NoNonorthogonality)
    } else if slope.abs() >= b {
        Some(Degeneracy::SlopeExceedsBenchmarkRange { slope, max_slope: b })
    } else {
        None
    }
}

fn check_b(b: f64) -> Result<()> {
    check_unit("B", b)
}

/// Relabels `±` so that `a ≤ b`; the criterion is invariant under the swap.
fn oriented(f: FidelityPair) -> (FidelityPair, bool) {
    if f.a > f.b {
        (FidelityPair { a: f.b, b: f.a }, true)
    } else {
        (f, false)
    }
}

pub fn qd_criterion(f: FidelityPair, b: f64) -> Result<Verdict> {
    qd_criterion_with_tolerance(f, b, DEFAULT_TOLERANCE)
}

/// Closed-form quantum-domain test: `(a+b)/2 > (1 + √((1−B)(B−(b−a)²)/B)) / 2`.
///
/// When `|b − a| ≥ B` (or `B = 0`) the verdict is `false` with a degeneracy
/// reason and `rhs = 1`, which no mean of probabilities can exceed.
pub fn qd_criterion_with_tolerance(f: FidelityPair, b: f64, tolerance: f64) -> Result<Verdict> {
    f.validate()?;
    check_b(b)?;
    let (f, labels_swapped) = oriented(f);
    let slope = f.slope();
    let lhs = f.mean();
    let degenerate = degeneracy(b, slope);
    let rhs = if degenerate.is_some() { 1.0 } else { closed_form_rhs(b, slope) };
    Ok(Verdict {
        is_quantum_domain: degenerate.is_none() && lhs > rhs,
        lhs,
        rhs,
        method: Method::ClosedForm,
        degenerate,
        marginal: (lhs - rhs).abs() <= tolerance,
        labels_swapped,
    })
}

pub fn qd_criterion_numeric(f: FidelityPair, b: f64) -> Result<Verdict> {
    qd_criterion_numeric_with_tolerance(f, b, DEFAULT_TOLERANCE)
}

/// Largest excess `max_{p₊ ∈ [0,1]} (p₊·b + p₋·a − F_c(p₊))` of the chord over
/// the classical bound, with the maximizing prior.
pub fn chord_excess(f: FidelityPair, b: f64) -> (f64, f64) {
    let excess = |p: f64| p * f.b + (1.0 - p) * f.a - fc(b, p);
    grid_then_golden(excess, 0.0, 1.0, 1025)
}

/// Direct evaluation of the chord-above-bound condition by maximizing over
/// the prior. Shares no algebra with [`qd_criterion`].
pub fn qd_criterion_numeric_with_tolerance(f: FidelityPair, b: f64, tolerance: f64) -> Result<Verdict> {
    f.validate()?;
    check_b(b)?;
    let (f, labels_swapped) = oriented(f);
    let (_, excess) = chord_excess(f, b);
    let lhs = f.mean();
    // shifting a and b together by d shifts the excess by d
    let rhs = lhs - excess;
    Ok(Verdict {
        is_quantum_domain: excess > 0.0,
        lhs,
        rhs,
        method: Method::NumericSup,
        degenerate: degeneracy(b, f.slope()),
        marginal: excess.abs() <= tolerance,
        labels_swapped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub a: f64,
    pub b: f64,
}

/// Points `(a, b)` on the classical/quantum boundary for a fixed `B`.
///
/// The slope `s = b − a` runs over `[−B, B]`; the ends land on the edges of
/// the unit square at `(1, 1−B)` and `(1−B, 1)`. The symmetric point
/// `a = b = (1 + √(1−B))/2` is always included for `n_points ≥ 3`.
pub fn boundary_curve(b: f64, n_points: usize) -> Result<Vec<BoundaryPoint>> {
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::invalid(format!("B = {b} must lie in (0, 1)")));
    }
    if n_points < 2 {
        return Err(Error::invalid("boundary needs at least 2 points"));
    }
    let mid = n_points / 2;
    let slopes = (0..n_points).map(|i| {
        if i <= mid {
            -b + b * i as f64 / mid as f64
        } else {
            b * (i - mid) as f64 / (n_points - 1 - mid) as f64
        }
    });
    Ok(slopes
        .map(|s| {
            let m = closed_form_rhs(b, s);
            BoundaryPoint { a: (m - 0.5 * s).clamp(0.0, 1.0), b: (m + 0.5 * s).clamp(0.0, 1.0) }
        })
        .collect())
}
