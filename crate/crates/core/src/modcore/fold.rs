use crate::error::{invalid, Result};

/// Largest |x/Δ| for which the folding index is exactly representable.
const MAX_FOLDS: f64 = 4_503_599_627_370_496.0; // 2^52

/// Centered modulo `x - Δ⌊x/Δ + 1/2⌋`, folding into `[-Δ/2, Δ/2)`.
pub fn fold(x: f64, delta: f64) -> Result<f64> {
    fold_with_index(x, delta).map(|(r, _)| r)
}

/// Folding index `⌊x/Δ + 1/2⌋`, so that `x = n·Δ + fold(x, Δ)`.
pub fn folding_index(x: f64, delta: f64) -> Result<i64> {
    fold_with_index(x, delta).map(|(_, n)| n)
}

/// Residue and folding index from one evaluation of the floor expression.
pub fn fold_with_index(x: f64, delta: f64) -> Result<(f64, i64)> {
    if !x.is_finite() {
        return Err(invalid(format!("fold input must be finite, got {x}")));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid(format!("dynamic range must be positive, got {delta}")));
    }
    if (x / delta).abs() >= MAX_FOLDS {
        return Err(invalid(format!("{x} is too large to fold by {delta}")));
    }
    Ok(fold_raw(x, delta))
}

/// Unchecked fold for validated inputs.
///
/// The floor is taken of the rounded quotient, so the remainder can land a
/// rounding error outside the half-open cell. The two fix-ups move `(r, n)`
/// together and keep `x = n·Δ + r`.
#[inline]
pub(crate) fn fold_raw(x: f64, delta: f64) -> (f64, i64) {
    let n = (x / delta + 0.5).floor();
    let mut r = (-n).mul_add(delta, x);
    let mut n = n as i64;
    let half = 0.5 * delta;
    if r >= half {
        r -= delta;
        n += 1;
    } else if r < -half {
        r += delta;
        n -= 1;
    }
    (r, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn in_range_is_fixed_point() {
        assert_eq!(fold(100.0, 300.0).unwrap(), 100.0);
        assert_eq!(folding_index(100.0, 300.0).unwrap(), 0);
    }

    #[test]
    fn upper_boundary_wraps() {
        assert_eq!(fold(150.0, 300.0).unwrap(), -150.0);
        assert_eq!(folding_index(150.0, 300.0).unwrap(), 1);
        assert_eq!(fold(-150.0, 300.0).unwrap(), -150.0);
    }

    #[test]
    fn large_input() {
        // 22000 = 73·300 + 100, checked in exact integer arithmetic
        assert_eq!(22000 - 73 * 300, 100);
        assert_eq!(fold(22000.0, 300.0).unwrap(), 100.0);
        assert_eq!(folding_index(22000.0, 300.0).unwrap(), 73);
    }

    #[test]
    fn reference_indices() {
        let (r, n) = fold_with_index(1000.0, 281.25).unwrap();
        assert_eq!(n, 4);
        assert_eq!(r, -125.0);
        assert_eq!(4.0 * 281.25 + r, 1000.0);
        assert_eq!(folding_index(-2250.0, 281.25).unwrap(), -8);
        assert_eq!(fold(-2250.0, 281.25).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(fold(f64::NAN, 1.0).is_err());
        assert!(fold(f64::INFINITY, 1.0).is_err());
        assert!(fold(1.0, 0.0).is_err());
        assert!(fold(1.0, -3.0).is_err());
        assert!(folding_index(1e300, 1.0).is_err());
    }

    /// Exact-rational oracle: with x = p/q and Δ = r/s as small integers the
    /// index is ⌊(2ps + qr) / (2qr)⌋, computed in i128.
    #[test]
    fn matches_rational_oracle() {
        for p in -4000i128..=4000 {
            for (r, s) in [(300i128, 1i128), (1125, 4), (3, 1), (7, 2)] {
                let q = 4i128;
                let num = 2 * p * s + q * r;
                let den = 2 * q * r;
                let n = num.div_euclid(den);
                let x = p as f64 / q as f64;
                let delta = r as f64 / s as f64;
                let (res, idx) = fold_with_index(x, delta).unwrap();
                assert_eq!(idx as i128, n, "x={x} delta={delta}");
                let expect = (p * s - n * q * r) as f64 / (q * s) as f64;
                assert_eq!(res, expect);
            }
        }
    }

    proptest! {
        #[test]
        fn fold_in_cell(x in -1.0e9f64..1.0e9, delta in 1.0e-3f64..1.0e4) {
            let (r, n) = fold_with_index(x, delta).unwrap();
            prop_assert!(r >= -delta / 2.0 && r < delta / 2.0);
            let recon = n as f64 * delta + r;
            prop_assert!((recon - x).abs() <= 1e-9 * x.abs().max(delta));
        }

        #[test]
        fn periodic(x in -1.0e3f64..1.0e3, m in -1_000_000i64..=1_000_000, delta in 0.5f64..500.0) {
            let base = fold(x, delta).unwrap();
            let shifted = fold(x + m as f64 * delta, delta).unwrap();
            let diff = (base - shifted).abs();
            // agree up to round-off, or sit on opposite ends of the same cell boundary
            let tol = 1e-9 * (m as f64 * delta).abs().max(1.0);
            prop_assert!(diff <= tol || (delta - diff).abs() <= tol);
        }
    }
}
