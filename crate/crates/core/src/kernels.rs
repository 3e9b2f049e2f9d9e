//! Normal-family kernels: density, CDF, quantile and their log-space variants.
//!
//! The error function follows the FreeBSD `s_erf.c` rational approximations
//! (better than one ulp in double precision). All special-function work happens
//! in `f64`; the generic wrappers convert at the boundary.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

const ERX: f64 = 8.45062911510467529297e-01;

const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

const VERY_TINY: f64 = 2.848094538889218e-306;
const SMALL: f64 = 3.725290298461914e-9; // 2^-28
const TINY: f64 = 1.3877787807814457e-17; // 2^-56

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[inline]
fn small_ratio(z: f64) -> f64 {
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

#[inline]
fn near_one_ratio(s: f64) -> f64 {
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// `erfc(x)` for `x >= 1.25`, computed without cancellation.
#[inline]
fn erfc_tail(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, q) = if x < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s * (SA1 + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // x truncated to 32 significant bits so that z*z is exact
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / q).exp() / x
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 0.84375 {
        if ax < SMALL {
            if ax < VERY_TINY {
                0.125 * (8.0 * ax + EFX8 * ax)
            } else {
                ax + EFX * ax
            }
        } else {
            ax + ax * small_ratio(ax * ax)
        }
    } else if ax < 1.25 {
        ERX + near_one_ratio(ax - 1.0)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - erfc_tail(ax)
    };
    value.copysign(x)
}

/// Complementary error function, accurate deep into the upper tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        let t = if ax < TINY {
            ax
        } else {
            let y = small_ratio(ax * ax);
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if negative { 1.0 + t } else { 1.0 - t };
    }
    if ax < 1.25 {
        let pq = near_one_ratio(ax - 1.0);
        return if negative { 1.0 + ERX + pq } else { 1.0 - ERX - pq };
    }
    if ax < 28.0 {
        if negative && ax > 6.0 {
            return 2.0;
        }
        let tail = erfc_tail(ax);
        return if negative { 2.0 - tail } else { tail };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}

fn check_variance<T: Real>(variance: T) -> Result<T> {
    if variance > T::zero() && variance.is_finite() {
        Ok(variance.sqrt())
    } else {
        Err(Error::Domain(format!("variance must be positive and finite, got {variance}")))
    }
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf<T: Real>(z: T) -> T {
    let z = z.as_f64();
    T::lit((-0.5 * z * z - LN_SQRT_2PI).exp())
}

/// Standard normal CDF, `Φ(z)`.
#[inline]
pub fn std_normal_cdf<T: Real>(z: T) -> T {
    T::lit(0.5 * erfc(-z.as_f64() / std::f64::consts::SQRT_2))
}

/// Standard normal survival function, `1 − Φ(z)`, without cancellation.
#[inline]
pub fn std_normal_sf<T: Real>(z: T) -> T {
    T::lit(0.5 * erfc(z.as_f64() / std::f64::consts::SQRT_2))
}

/// `ln Φ(z)`, finite for every finite `z`.
pub fn std_normal_log_cdf<T: Real>(z: T) -> T {
    let z = z.as_f64();
    let value = if z > 0.0 {
        (-0.5 * erfc(z / std::f64::consts::SQRT_2)).ln_1p()
    } else if z > -35.0 {
        (0.5 * erfc(-z / std::f64::consts::SQRT_2)).ln()
    } else {
        // Mills-ratio asymptotic series; relative error below 1e-15 for z < -35
        let w = 1.0 / (z * z);
        let series = 1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)));
        -0.5 * z * z - LN_SQRT_2PI - (-z).ln() + series.ln()
    };
    T::lit(value)
}

/// `ln(1 − Φ(z))`.
#[inline]
pub fn std_normal_log_sf<T: Real>(z: T) -> T {
    std_normal_log_cdf(-z)
}

/// Density of `N(mean, variance)` at `x`.
pub fn normal_pdf<T: Real>(x: T, mean: T, variance: T) -> Result<T> {
    let sd = check_variance(variance)?;
    Ok(std_normal_pdf((x - mean) / sd) / sd)
}

/// Log-density of `N(mean, variance)` at `x`.
pub fn normal_log_pdf<T: Real>(x: T, mean: T, variance: T) -> Result<T> {
    check_variance(variance)?;
    let d = (x - mean).as_f64();
    let v = variance.as_f64();
    Ok(T::lit(-0.5 * d * d / v - 0.5 * v.ln() - LN_SQRT_2PI))
}

/// CDF of `N(mean, variance)` at `x`.
pub fn normal_cdf<T: Real>(x: T, mean: T, variance: T) -> Result<T> {
    let sd = check_variance(variance)?;
    Ok(std_normal_cdf((x - mean) / sd))
}

/// `ln P(X ≤ x)` for `X ~ N(mean, variance)`.
pub fn normal_log_cdf<T: Real>(x: T, mean: T, variance: T) -> Result<T> {
    let sd = check_variance(variance)?;
    Ok(std_normal_log_cdf((x - mean) / sd))
}

// Acklam's rational approximation to the probit, relative error ~1.15e-9.
const ACKLAM_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const ACKLAM_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const ACKLAM_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const ACKLAM_D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        let [c0, c1, c2, c3, c4, c5] = ACKLAM_C;
        let [d0, d1, d2, d3] = ACKLAM_D;
        (((((c0 * q + c1) * q + c2) * q + c3) * q + c4) * q + c5) / ((((d0 * q + d1) * q + d2) * q + d3) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        let [a0, a1, a2, a3, a4, a5] = ACKLAM_A;
        let [b0, b1, b2, b3, b4] = ACKLAM_B;
        (((((a0 * r + a1) * r + a2) * r + a3) * r + a4) * r + a5) * q
            / (((((b0 * r + b1) * r + b2) * r + b3) * r + b4) * r + 1.0)
    } else {
        -acklam(1.0 - p)
    }
}

/// Lower-tail probit for `p ≤ 0.5`, refined with Halley steps against `Φ`.
fn lower_probit(p: f64) -> f64 {
    let mut x = acklam(p);
    for _ in 0..2 {
        let e = 0.5 * erfc(-x / std::f64::consts::SQRT_2) - p;
        let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Standard normal quantile, `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn std_normal_quantile<T: Real>(p: T) -> Result<T> {
    let pf = p.as_f64();
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let x = if pf <= 0.5 { lower_probit(pf) } else { -lower_probit(1.0 - pf) };
    Ok(T::lit(x))
}

/// Quantile of `N(mean, variance)`.
pub fn normal_quantile<T: Real>(p: T, mean: T, variance: T) -> Result<T> {
    let sd = check_variance(variance)?;
    Ok(mean + sd * std_normal_quantile(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // reference values from mpmath at 50 digits
    const ERFC_REF: [(f64, f64); 8] = [
        (-1.0, 1.842_700_792_949_714_9),
        (0.1, 0.887_537_083_981_715_1),
        (0.5, 0.479_500_122_186_953_46),
        (1.0, 0.157_299_207_050_285_13),
        (2.0, 0.004_677_734_981_047_265_8),
        (5.0, 1.537_459_794_428_034_9e-12),
        (10.0, 2.088_487_583_762_544_8e-45),
        (20.0, 5.395_865_611_607_901e-176),
    ];

    #[test]
    fn erfc_matches_reference() {
        for (x, r) in ERFC_REF {
            let got = erfc(x);
            assert!(((got - r) / r).abs() < 1e-14, "erfc({x}) = {got}, want {r}");
        }
        assert_eq!(erfc(f64::INFINITY), 0.0);
        assert_eq!(erfc(f64::NEG_INFINITY), 2.0);
        assert_eq!(erf(0.0), 0.0);
        assert_abs_diff_eq!(erf(1.0), 0.842_700_792_949_714_9, epsilon = 1e-16);
        assert_abs_diff_eq!(erf(-0.3), -0.328_626_759_459_127_4, epsilon = 1e-16);
    }

    #[test]
    fn pdf_examples() {
        assert_abs_diff_eq!(normal_pdf(0.0, 0.0, 1.0).unwrap(), 0.398_942_280_401_432_7, epsilon = 1e-15);
        // exp(-1.645^2/2)/sqrt(2 pi), mpmath
        assert_abs_diff_eq!(normal_pdf(1.645, 0.0, 1.0).unwrap(), 0.103_110_811_091_981_4, epsilon = 1e-15);
        let v = 0.37;
        assert_abs_diff_eq!(
            normal_pdf(2.5, 2.5, v).unwrap(),
            1.0 / (2.0 * std::f64::consts::PI * v).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(normal_cdf(0.0, 0.0, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(normal_cdf(1.645, 0.0, 1.0).unwrap(), 0.95, epsilon = 5e-4);
        assert_abs_diff_eq!(1.0 - normal_cdf(2.575, 0.0, 1.0).unwrap(), 0.005, epsilon = 5e-5);
        // Φ(1.645), mpmath
        assert_abs_diff_eq!(normal_cdf(1.645, 0.0, 1.0).unwrap(), 0.950_015_094_460_878_6, epsilon = 1e-12);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(normal_quantile(0.5, 0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(normal_quantile(0.90, 0.0, 1.0).unwrap(), 1.282, epsilon = 5e-4);
        assert_abs_diff_eq!(normal_quantile(0.98, 0.0, 1.0).unwrap(), 2.054, epsilon = 5e-4);
        assert_abs_diff_eq!(normal_quantile(0.975, 0.0, 1.0).unwrap(), 1.959_963_984_540_054, epsilon = 1e-13);
        assert_abs_diff_eq!(normal_quantile(1e-300_f64, 0.0, 1.0).unwrap(), -37.047_096_299_361_2, epsilon = 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(normal_pdf(0.0, 0.0, 0.0).is_err());
        assert!(normal_cdf(0.0, 0.0, -1.0).is_err());
        assert!(normal_quantile(0.0, 0.0, 1.0).is_err());
        assert!(normal_quantile(1.0, 0.0, 1.0).is_err());
        assert!(std_normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn log_cdf_deep_tail() {
        // ln Φ(-40), mpmath
        assert_abs_diff_eq!(std_normal_log_cdf(-40.0_f64), -804.608_442_013_754_4, epsilon = 1e-9);
        assert_abs_diff_eq!(std_normal_log_cdf(-20.0_f64), (std_normal_cdf(-20.0_f64)).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(std_normal_log_cdf(-34.9_f64), std_normal_log_cdf(-35.1_f64) + 7.0, epsilon = 0.1);
        assert!(std_normal_log_sf(50.0_f64).is_finite());
        assert_abs_diff_eq!(std_normal_log_cdf(3.0_f64), (0.998_650_101_968_369_9_f64).ln(), epsilon = 1e-15);
    }

    #[test]
    fn f32_kernels() {
        assert!((normal_cdf(1.645_f32, 0.0, 1.0).unwrap() - 0.95).abs() < 5e-4);
        assert!((normal_quantile(0.9_f32, 0.0, 1.0).unwrap() - 1.2816).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn cdf_is_monotone(x in -10.0..10.0f64, dx in 0.0..1.0f64, m in -3.0..3.0f64, v in 0.01..10.0f64) {
            prop_assert!(normal_cdf(x, m, v).unwrap() <= normal_cdf(x + dx, m, v).unwrap());
        }

        #[test]
        fn pdf_is_cdf_derivative(x in -6.0..6.0f64, m in -2.0..2.0f64, v in 0.1..4.0f64) {
            let h = 1e-5 * x.abs().max(1.0);
            let fd = (normal_cdf(x + h, m, v).unwrap() - normal_cdf(x - h, m, v).unwrap()) / (2.0 * h);
            prop_assert!((fd - normal_pdf(x, m, v).unwrap()).abs() < 1e-6);
        }

        #[test]
        fn quantile_round_trip(x in -8.0..5.5f64) {
            let p = std_normal_cdf(x);
            prop_assert!((std_normal_quantile(p).unwrap() - x).abs() <= 1e-8);
        }

        #[test]
        fn cdf_of_quantile(p in 1e-12..(1.0 - 1e-12f64)) {
            let x = std_normal_quantile(p).unwrap();
            prop_assert!((std_normal_cdf(x) - p).abs() <= 1e-10);
        }

        #[test]
        fn shift_scale_equivariance(x in -5.0..5.0f64, m in -3.0..3.0f64, v in 0.01..10.0f64) {
            let z = (x - m) / v.sqrt();
            prop_assert_eq!(normal_cdf(x, m, v).unwrap(), normal_cdf(z, 0.0, 1.0).unwrap());
        }
    }
}
