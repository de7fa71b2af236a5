//! Truncated Fock-space reference implementation.
//!
//! States are built as dense density matrices and fidelities are computed
//! straight from eigendecompositions, so every Gaussian closed form in
//! [`crate::gaussian`] has an independent check. Operators are exponentiated
//! in a padded space and cropped, so the cropped trace measures how much
//! weight the truncation discards.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CovMat2;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const DEFAULT_DIM: usize = 120;
/// Minimum retained trace before a state is refused.
pub const TRUNCATION_TRACE: f64 = 1.0 - 1e-6;
/// Most negative eigenvalue tolerated before clipping to zero.
pub const EIGEN_FLOOR: f64 = -1e-10;
/// Eigenvalues below this fraction of the largest are rounding noise.
const RELATIVE_CUTOFF: f64 = 1e-14;

const FLUSH_RELATIVE: f64 = 1e-40;

fn check_finite(vals: &[f64]) -> Result<()> {
    match vals.iter().any(|v| !v.is_finite()) {
        true => Err(Error::domain("eigendecomposition produced non-finite values")),
        false => Ok(()),
    }
}

fn clipped_roots(vals: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let top = vals.iter().copied().fold(0.0, f64::max);
    vals.iter().map(move |&v| if v > RELATIVE_CUTOFF * top { v.sqrt() } else { 0.0 })
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn padded(dim: usize) -> usize {
    dim + (dim / 2).max(40)
}

/// Density matrix in the number basis `|0⟩ … |dim−1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    matrix: CMatrix,
}

impl FockDensity {
    /// Wraps a matrix after checking it is square and Hermitian within 1e-12.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: matrix.ncols() });
        }
        let skew = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if skew > 1e-12 {
            return Err(Error::invalid(format!("density matrix not Hermitian (skew {skew:.2e})")));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn pure(ket: &CVector) -> Self {
        Self { matrix: ket * ket.adjoint() }
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn projection(&self, ket: &CVector) -> Result<f64> {
        if ket.len() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: ket.len() });
        }
        Ok(ket.dotc(&(&self.matrix * ket)).re)
    }

    /// Convex combination; weights are renormalized.
    pub fn mixture(parts: &[(f64, &FockDensity)]) -> Result<Self> {
        let dim = parts.first().map(|(_, d)| d.dim()).ok_or_else(|| Error::invalid("empty mixture"))?;
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, d) in parts {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: d.dim() });
            }
            m += &d.matrix * Complex64::from(*w / total);
        }
        Ok(Self { matrix: m })
    }

    fn cropped(big: &CMatrix, dim: usize) -> Result<Self> {
        let matrix = big.view((0, 0), (dim, dim)).into_owned();
        let trace: f64 = matrix.diagonal().iter().map(|z| z.re).sum();
        if trace < TRUNCATION_TRACE {
            return Err(Error::Truncation { dim, trace, required: TRUNCATION_TRACE });
        }
        let matrix = (&matrix + matrix.adjoint()) * Complex64::from(0.5);
        Ok(Self { matrix })
    }
}

/// Annihilation operator `â` truncated to `dim` levels.
pub fn annihilation(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { Complex64::from((j as f64).sqrt()) } else { ZERO })
}

/// Eigenvalues (ascending order not guaranteed) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    // products of tiny entries underflow inside the QR sweeps and come back as NaN
    let top = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = top * FLUSH_RELATIVE;
    let flushed = m.map(|z| if z.norm() < floor { ZERO } else { z });
    let eig = nalgebra::SymmetricEigen::new(flushed);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `exp(−iH)` for Hermitian `H`.
fn unitary_from_hermitian(h: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let phases = CVector::from_iterator(vals.len(), vals.iter().map(|&l| (-I * l).exp()));
    &vecs * CMatrix::from_diagonal(&phases) * vecs.adjoint()
}

/// Squeeze operator `exp(r(â†² − â²)/2)`, which maps the vacuum covariance to
/// `diag(e^{2r}, e^{−2r})`.
pub fn squeeze_matrix(r: f64, dim: usize) -> CMatrix {
    let a = annihilation(dim);
    let a2 = &a * &a;
    let gen = (a2.adjoint() - a2) * Complex64::from(0.5 * r);
    // exp(G) with G anti-Hermitian: G = −iH, H = iG
    unitary_from_hermitian(&(gen * I))
}

/// Displacement `exp(α â† − α* â)`.
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> CMatrix {
    let a = annihilation(dim);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    unitary_from_hermitian(&(gen * I))
}

/// Phase rotation `exp(−iθ n̂)`, taking covariance `C` to `R(−θ) C R(θ)`.
pub fn rotation_matrix(theta: f64, dim: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(dim, (0..dim).map(|n| (-I * (theta * n as f64)).exp())))
}

/// Coherent-state ket from its number-basis amplitudes.
pub fn coherent_ket(alpha: Complex64, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut c = Complex64::from((-0.5 * alpha.norm_sqr()).exp());
    for n in 0..dim {
        v[n] = c;
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    v
}

pub fn coherent_fock(alpha: Complex64, dim: usize) -> Result<FockDensity> {
    let big = coherent_ket(alpha, padded(dim));
    FockDensity::cropped(&(&big * big.adjoint()), dim)
}

pub fn thermal_fock(nbar: f64, dim: usize) -> Result<FockDensity> {
    if !(nbar >= 0.0) {
        return Err(Error::invalid(format!("mean photon number {nbar} < 0")));
    }
    let n = padded(dim);
    let q = nbar / (1.0 + nbar);
    let diag = CVector::from_iterator(n, (0..n).map(|k| Complex64::from(q.powi(k as i32) / (1.0 + nbar))));
    FockDensity::cropped(&CMatrix::from_diagonal(&diag), dim)
}

/// `U(θ) S(r) ρ_th(n̄) S(r)† U(θ)†`, with covariance
/// `(2n̄+1)·R(−θ)·diag(e^{2r}, e^{−2r})·R(θ)`.
pub fn squeezed_thermal(r: f64, nbar: f64, theta: f64, dim: usize) -> Result<FockDensity> {
    if !(nbar >= 0.0) {
        return Err(Error::invalid(format!("mean photon number {nbar} < 0")));
    }
    let n = padded(dim);
    let q = nbar / (1.0 + nbar);
    let th = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        (0..n).map(|k| Complex64::from(q.powi(k as i32) / (1.0 + nbar))),
    ));
    let u = rotation_matrix(theta, n) * squeeze_matrix(r, n);
    FockDensity::cropped(&(&u * th * u.adjoint()), dim)
}

/// `S(r)|0⟩` with covariance `diag(e^{2r}, e^{−2r})`.
///
/// Number-basis amplitudes `c_{2k} = tanh(r)^k √((2k)!) / (2^k k! √cosh r)`.
pub fn squeezed_vacuum_ket(r: f64, dim: usize) -> CVector {
    let t = r.tanh();
    let mut v = CVector::zeros(dim);
    let mut c = 1.0 / r.cosh().sqrt();
    for k in 0..dim.div_ceil(2) {
        v[2 * k] = Complex64::from(c);
        c *= t * ((2 * k + 1) as f64 / (2 * k + 2) as f64).sqrt();
    }
    v
}

fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(m);
    check_finite(&vals)?;
    if let Some(v) = vals.iter().find(|&&v| v < EIGEN_FLOOR) {
        return Err(Error::domain(format!("matrix has eigenvalue {v:.3e} below {EIGEN_FLOOR:.0e}")));
    }
    let roots = CVector::from_iterator(vals.len(), clipped_roots(&vals).map(Complex64::from));
    Ok(&vecs * CMatrix::from_diagonal(&roots) * vecs.adjoint())
}

/// `Tr√(√ρ1 ρ2 √ρ1)` by eigendecomposition.
pub fn uhlmann_fock(r1: &FockDensity, r2: &FockDensity) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch { left: r1.dim(), right: r2.dim() });
    }
    let s = psd_sqrt(&r1.matrix)?;
    let inner = &s * &r2.matrix * &s;
    let inner = (&inner + inner.adjoint()) * Complex64::from(0.5);
    let (vals, _) = hermitian_eigen(&inner);
    check_finite(&vals)?;
    if let Some(v) = vals.iter().find(|&&v| v < EIGEN_FLOOR) {
        return Err(Error::domain(format!("√ρ1ρ2√ρ1 has eigenvalue {v:.3e}")));
    }
    Ok(clipped_roots(&vals).sum())
}

/// First and raw second moments of `x̂1 = (â+â†)/2`, `x̂2 = (â−â†)/2i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub m1: f64,
    pub m2: f64,
    pub v11: f64,
    pub v22: f64,
    /// `⟨x̂1x̂2 + x̂2x̂1⟩ / 2`.
    pub v12: f64,
}

impl FockMoments {
    /// Covariance in the vacuum-is-identity convention.
    pub fn covariance(&self) -> CovMat2 {
        CovMat2 {
            c11: 4.0 * (self.v11 - self.m1 * self.m1),
            c12: 4.0 * (self.v12 - self.m1 * self.m2),
            c22: 4.0 * (self.v22 - self.m2 * self.m2),
        }
    }
}

pub fn quadrature_moments_fock(r: &FockDensity) -> FockMoments {
    let dim = r.dim();
    let a = annihilation(dim);
    let ad = a.adjoint();
    let x1 = (&a + &ad) * Complex64::from(0.5);
    let x2 = (&a - &ad) * (-I * 0.5);
    let expect = |op: &CMatrix| (&r.matrix * op).trace().re;
    let sym = (&x1 * &x2 + &x2 * &x1) * Complex64::from(0.5);
    FockMoments {
        m1: expect(&x1),
        m2: expect(&x2),
        v11: expect(&(&x1 * &x1)),
        v22: expect(&(&x2 * &x2)),
        v12: expect(&sym),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_defect(u: &CMatrix, keep: usize) -> f64 {
        let p = u.adjoint() * u;
        let mut worst: f64 = 0.0;
        for i in 0..keep {
            for j in 0..keep {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - Complex64::from(target)).norm());
            }
        }
        worst
    }

    #[test]
    fn vacuum_from_zero_temperature() {
        let v = thermal_fock(0.0, 10).unwrap();
        assert!((v.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((v.trace() - 1.0).abs() < 1e-15);
        assert!(matches!(thermal_fock(-0.1, 10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn coherent_normalization() {
        let c = coherent_fock(Complex64::from(1.0), 40).unwrap();
        assert!(1.0 - c.trace() < 1e-10);
    }

    #[test]
    fn truncation_is_refused() {
        assert!(matches!(thermal_fock(5.0, 20), Err(Error::Truncation { .. })));
        assert!(matches!(coherent_fock(Complex64::from(6.0), 10), Err(Error::Truncation { .. })));
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let alpha = Complex64::new(0.8, -0.3);
        let d = displacement_matrix(alpha, 80);
        let ket = d.column(0).into_owned();
        let exact = coherent_ket(alpha, 80);
        for n in 0..40 {
            assert!((ket[n] - exact[n]).norm() < 1e-12, "level {n}");
        }
    }

    #[test]
    fn operators_unitary_away_from_cutoff() {
        assert!(unitarity_defect(&squeeze_matrix(0.5, 80), 40) < 1e-10);
        assert!(unitarity_defect(&displacement_matrix(Complex64::new(1.0, 0.5), 80), 40) < 1e-10);
    }

    #[test]
    fn squeezed_vacuum_amplitudes() {
        // S(r)|0⟩ = sech^{1/2} r · Σ (tanh r)^n √((2n)!)/(2^n n!) |2n⟩
        let r: f64 = 0.4;
        let ket = squeezed_vacuum_ket(r, 60);
        let mut c = 1.0 / r.cosh().sqrt();
        for n in 0..20 {
            assert!((ket[2 * n] - Complex64::from(c)).norm() < 1e-12, "n = {n}");
            assert!(ket[2 * n + 1].norm() < 1e-12);
            c *= r.tanh() * (((2 * n + 1) * (2 * n + 2)) as f64).sqrt() / (2.0 * (n + 1) as f64);
        }
    }

    #[test]
    fn moments_of_reference_states() {
        let vac = thermal_fock(0.0, 30).unwrap();
        let m = quadrature_moments_fock(&vac);
        assert!(m.m1.abs() < 1e-15 && m.m2.abs() < 1e-15);
        assert!((m.v11 - 0.25).abs() < 1e-14 && (m.v22 - 0.25).abs() < 1e-14);

        let coh = coherent_fock(Complex64::from(1.0), 60).unwrap();
        let m = quadrature_moments_fock(&coh);
        assert!((m.m1 - 1.0).abs() < 1e-12 && m.m2.abs() < 1e-12);
        assert!((m.v11 - 1.25).abs() < 1e-10 && (m.v22 - 0.25).abs() < 1e-10);

        let th = thermal_fock(0.1, 60).unwrap();
        let m = quadrature_moments_fock(&th);
        assert!((m.v11 - 0.3).abs() < 1e-12 && (m.v22 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn squeezed_thermal_covariance_matches_closed_form() {
        let (r, nbar, theta) = (0.6, 0.4, 0.7);
        let st = squeezed_thermal(r, nbar, theta, 100).unwrap();
        let m = quadrature_moments_fock(&st);
        let expect = crate::gaussian::rotate_cov(&CovMat2::squeezed_thermal(r, nbar), theta);
        let c = m.covariance();
        assert!((c.c11 - expect.c11).abs() < 1e-6, "{c:?} vs {expect:?}");
        assert!((c.c12 - expect.c12).abs() < 1e-6);
        assert!((c.c22 - expect.c22).abs() < 1e-6);
        // θ = 0: ⟨x1²⟩ = (2n̄+1) e^{2r} / 4
        let m0 = quadrature_moments_fock(&squeezed_thermal(r, nbar, 0.0, 100).unwrap());
        assert!((m0.v11 - (2.0 * nbar + 1.0) * (2.0 * r).exp() / 4.0).abs() < 1e-6);
    }

    #[test]
    fn uhlmann_pure_and_coherent() {
        let c = coherent_fock(Complex64::from(0.7), 30).unwrap();
        assert!((uhlmann_fock(&c, &c).unwrap() - 1.0).abs() < 1e-8);
        let p = coherent_fock(Complex64::from(1.0), 40).unwrap();
        let q = coherent_fock(Complex64::from(-1.0), 40).unwrap();
        let f = uhlmann_fock(&p, &q).unwrap();
        assert!((f - 0.135335).abs() < 1e-6);
        assert!((f - uhlmann_fock(&q, &p).unwrap()).abs() < 1e-9);
        let small = thermal_fock(0.1, 10).unwrap();
        assert!(matches!(uhlmann_fock(&p, &small), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pure_fidelity_is_overlap_modulus() {
        let a = squeezed_vacuum_ket(0.3, 40);
        let b = coherent_ket(Complex64::new(0.2, 0.4), 40);
        let f = uhlmann_fock(&FockDensity::pure(&a), &FockDensity::pure(&b)).unwrap();
        assert!((f - a.dotc(&b).norm()).abs() < 1e-7);
    }

    #[test]
    fn mixture_and_projection() {
        let p = coherent_fock(Complex64::from(0.5), 30).unwrap();
        let q = coherent_fock(Complex64::from(-0.5), 30).unwrap();
        let mix = FockDensity::mixture(&[(1.0, &p), (1.0, &q)]).unwrap();
        assert!((mix.trace() - 1.0).abs() < 1e-12);
        let m = quadrature_moments_fock(&mix);
        assert!(m.m1.abs() < 1e-14);
        let vac = coherent_ket(Complex64::from(0.0), 30);
        assert!((mix.projection(&vac).unwrap() - (-0.25f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn coherent_pair_at_full_dimension() {
        for dim in [120, 200] {
            let p = coherent_fock(Complex64::from(1.0), dim).unwrap();
            let q = coherent_fock(Complex64::from(-1.0), dim).unwrap();
            assert!((uhlmann_fock(&p, &q).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn squeezed_ket_matches_operator() {
        for r in [-0.7, -0.2, 0.0, 0.3, 0.7] {
            let ket = squeezed_vacuum_ket(r, 60);
            let s = squeeze_matrix(r, 120);
            for n in 0..60 {
                assert!((ket[n] - s[(n, 0)]).norm() < 1e-12, "r={r} n={n}");
            }
        }
    }
}
