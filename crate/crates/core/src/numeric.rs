//! Small one-dimensional maximization helpers shared by the oracles.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    // endpoints of the final bracket can beat the midpoint on a plateau edge
    [(x, fx), (x1, f1), (x2, f2)].into_iter().fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Evaluates `f` on `n` evenly spaced points of `[lo, hi]`, then refines the
/// best point by golden-section search inside its neighbouring cells.
pub fn grid_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let (best_i, best_f) =
        (0..n)
            .map(|i| (i, f(lo + step * i as f64)))
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let a = (lo + step * (best_i as f64 - 1.0)).max(lo);
    let b = (lo + step * (best_i as f64 + 1.0)).min(hi);
    let (x, fx) = golden_max(&f, a, b, 1e-13 * (hi - lo).abs().max(1.0));
    // rounding-level gains do not move the answer off a grid point
    if fx > best_f + 1e-15 * best_f.abs().max(1.0) {
        (x, fx)
    } else {
        (lo + step * best_i as f64, best_f)
    }
}

/// Round half away from zero to `digits` decimal places.
pub fn round_half_away(x: f64, digits: u32) -> f64 {
    let scale = 10f64.powi(digits as i32);
    let y = x * scale;
    let r = y.abs().floor() + if y.abs().fract() >= 0.5 { 1.0 } else { 0.0 };
    r.copysign(y) / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_handles_endpoint_maximum() {
        let (x, fx) = grid_then_golden(|x| x, 0.0, 1.0, 16);
        assert!((x - 1.0).abs() < 1e-9);
        assert!((fx - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grid_handles_multimodal() {
        let f = |x: f64| (6.0 * x).sin() + 0.1 * x;
        let (x, _) = grid_then_golden(f, 0.0, 4.0, 200);
        // global max near the third hump
        let (best_on_fine, _) = (0..400_001)
            .map(|i| i as f64 * 1e-5)
            .map(|x| (x, f(x)))
            .fold((0.0, f64::NEG_INFINITY), |a, c| if c.1 > a.1 { c } else { a });
        assert!((x - best_on_fine).abs() < 1e-4);
    }

    #[test]
    fn rounding_half_away() {
        assert_eq!(round_half_away(0.7737, 2), 0.77);
        assert_eq!(round_half_away(0.8368, 2), 0.84);
        assert_eq!(round_half_away(-0.125, 2), -0.13);
        assert_eq!(round_half_away(0.99385, 3), 0.994);
    }
}
