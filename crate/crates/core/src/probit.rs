//! Standard normal CDF Φ and its inverse, accurate enough to move accuracy
//! pairs into probit coordinates and back without visible error.
//!
//! Φ is evaluated through the error function: a Taylor series near the
//! origin and a continued fraction in the tail, both good to ~1e-14. The
//! inverse starts from a rational-polynomial approximation and applies two
//! Halley refinement steps against Φ itself, leaving |Φ(z) − p| well below
//! the 1e-9 target across the clipped domain.

use crate::error::{Error, Result};

/// Probabilities are clipped into `[PROBIT_CLIP_LO, PROBIT_CLIP_HI]` before
/// inversion; the inverse diverges at 0 and 1.
pub const PROBIT_CLIP_LO: f64 = 1e-7;
pub const PROBIT_CLIP_HI: f64 = 1.0 - 1e-7;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// erf(z) by Taylor series, for |z| < 2.5.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..=150 {
        term *= -z2 / n as f64;
        let contrib = term / (2.0 * n as f64 + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum * 2.0 / SQRT_PI
}

/// erfc(z) by the Lentz continued-fraction evaluation, for z ≥ 2.5:
/// `erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))`.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f: f64 = TINY;
    let mut c: f64 = f;
    let mut d: f64 = 0.0;
    for j in 1..=300 {
        let a = if j == 1 { 1.0 } else { (j - 1) as f64 / 2.0 };
        d = z + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = z + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    f * (-z * z).exp() / SQRT_PI
}

fn erfc(z: f64) -> f64 {
    if z < 0.0 {
        2.0 - erfc(-z)
    } else if z < 2.5 {
        1.0 - erf_series(z)
    } else {
        erfc_continued_fraction(z)
    }
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Rational-polynomial first guess for the inverse (central + tail forms).
fn inverse_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |p: f64| {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail(p)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(1.0 - p)
    }
}

/// Clips a probability into the invertible range, reporting whether clipping
/// occurred.
pub fn clip_probability(p: f64) -> (f64, bool) {
    let clipped = p.clamp(PROBIT_CLIP_LO, PROBIT_CLIP_HI);
    (clipped, clipped != p)
}

/// Inverse standard normal CDF. Inputs are validated to lie in [0, 1] and
/// clipped (with a warning) into `[1e-7, 1 - 1e-7]`.
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "probability must lie in [0, 1], found {p}"
        )));
    }
    let (p, clipped) = clip_probability(p);
    if clipped {
        log::warn!("probability clipped to {p} before probit inversion");
    }
    let mut x = inverse_guess(p);
    for _ in 0..2 {
        // Halley's step for Φ(x) − p = 0; the correction uses the density
        // φ(x) = e^{-x²/2}/√(2π) and φ'(x) = −x·φ(x).
        let err = normal_cdf(x) - p;
        let u = err * SQRT_2PI * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent inversion of Φ by bisection, the test oracle.
    pub fn inverse_by_bisection(p: f64) -> f64 {
        let (mut lo, mut hi) = (-9.0f64, 9.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if normal_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn known_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_abs_diff_eq!(normal_cdf(1.0), 0.8413447460685429, epsilon = 1e-13);
        assert_abs_diff_eq!(normal_cdf(2.0), 0.9772498680518208, epsilon = 1e-13);
        assert_abs_diff_eq!(normal_cdf(3.0), 0.9986501019683699, epsilon = 1e-13);
        assert_abs_diff_eq!(normal_cdf(-1.0), 1.0 - 0.8413447460685429, epsilon = 1e-13);
        assert_abs_diff_eq!(
            normal_cdf(1.959963984540054),
            0.975,
            epsilon = 1e-13
        );
        // Deep tail goes through the continued fraction.
        assert_abs_diff_eq!(normal_cdf(-5.0), 2.866515718791939e-7, epsilon = 1e-17);
    }

    #[test]
    fn inverse_reference_points() {
        assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(
            inverse_normal_cdf(0.975).unwrap(),
            1.959964,
            epsilon = 1e-5
        );
        assert_abs_diff_eq!(
            inverse_normal_cdf(0.8413447460685429).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn antisymmetry() {
        for i in 1..50 {
            let p = i as f64 / 50.0 * 0.5;
            let plus = inverse_normal_cdf(1.0 - p).unwrap();
            let minus = inverse_normal_cdf(p).unwrap();
            assert_abs_diff_eq!(plus, -minus, epsilon = 1e-11);
        }
    }

    #[test]
    fn round_trip_within_1e9() {
        for i in 0..=10_000 {
            let p = PROBIT_CLIP_LO + (PROBIT_CLIP_HI - PROBIT_CLIP_LO) * i as f64 / 10_000.0;
            let z = inverse_normal_cdf(p).unwrap();
            assert!(
                (normal_cdf(z) - p).abs() <= 1e-9,
                "round trip failed at p = {p}"
            );
        }
    }

    #[test]
    fn matches_bisection_oracle() {
        for i in 0..1000 {
            let p = PROBIT_CLIP_LO + (PROBIT_CLIP_HI - PROBIT_CLIP_LO) * i as f64 / 999.0;
            let direct = inverse_normal_cdf(p).unwrap();
            let oracle = inverse_by_bisection(p);
            assert_abs_diff_eq!(direct, oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn clips_out_of_range_inputs() {
        let z_lo = inverse_normal_cdf(0.0).unwrap();
        assert_eq!(z_lo, inverse_normal_cdf(PROBIT_CLIP_LO).unwrap());
        let z_hi = inverse_normal_cdf(1.0).unwrap();
        assert_eq!(z_hi, inverse_normal_cdf(PROBIT_CLIP_HI).unwrap());
        assert!(inverse_normal_cdf(-0.1).is_err());
        assert!(inverse_normal_cdf(1.1).is_err());
        assert!(inverse_normal_cdf(f64::NAN).is_err());
    }
}
