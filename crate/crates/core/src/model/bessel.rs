//! Bessel functions of the first kind for small integer orders.
//!
//! Three regimes, all accurate to a few ulps in `f64`:
//!
//! * `|x| <= 8`: ascending power series (cancellation costs at most ~2 digits);
//! * `8 < |x| <= 25`: Miller backward recurrence normalised by
//!   `J0 + 2 (J2 + J4 + ...) = 1`;
//! * `|x| > 25`: Hankel asymptotic expansion, whose smallest term there is
//!   below `1e-20`.

use crate::{Error, Result, Scalar};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Location of the global maximum of `|J1|`.
pub const J1_ARGMAX: f64 = 1.841_183_781_340_659_3;
/// `max |J1(x)|` over the real line.
pub const J1_ABS_MAX: f64 = 0.581_865_224_281_596_4;
/// First positive zero of `J1`.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512_3;

/// `J1(x)`; rejects non-finite arguments.
pub fn bessel_j1<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j1 of non-finite {x}")));
    }
    Ok(j1(x))
}

/// `J0(x)`; rejects non-finite arguments.
pub fn bessel_j0<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j0 of non-finite {x}")));
    }
    Ok(jn(0, x))
}

/// Derivative `J1'(x) = J0(x) - J1(x)/x`, with `J1'(0) = 1/2`.
pub fn bessel_j1_prime<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j1' of non-finite {x}")));
    }
    if x == T::zero() {
        return Ok(T::lit(0.5));
    }
    // J1' = (J0 - J2) / 2 avoids the 1/x cancellation near the origin.
    Ok((jn(0, x) - jn(2, x)) * T::lit(0.5))
}

#[inline]
pub(crate) fn j1<T: Scalar>(x: T) -> T {
    jn(1, x)
}

/// `J_n(x)` for `n` in `0..=8`, evaluated in double precision whatever
/// `T` is. Non-finite input gives NaN.
pub(crate) fn jn<T: Scalar>(order: u32, x: T) -> T {
    debug_assert!(order <= 8);
    let x = x.as_f64();
    if !x.is_finite() {
        return T::nan();
    }
    let ax = x.abs();
    let value = if ax <= SERIES_LIMIT {
        series(order, ax)
    } else if ax <= ASYMPTOTIC_LIMIT {
        miller(order, ax)
    } else {
        hankel(order, ax)
    };
    T::lit(if x < 0.0 && order % 2 == 1 { -value } else { value })
}

fn series<T: Scalar>(order: u32, x: T) -> T {
    let half = x * T::lit(0.5);
    let q = -half * half;
    // leading term (x/2)^n / n!
    let mut term = T::one();
    for k in 1..=order {
        term = term * half / T::lit(k as f64);
    }
    let mut sum = term;
    let tiny = T::epsilon() * T::lit(1e-3);
    for m in 1..60u32 {
        term = term * q / T::lit((m * (m + order)) as f64);
        sum += term;
        if term.abs() <= tiny * sum.abs().max(T::min_positive_value()) {
            break;
        }
    }
    sum
}

fn miller<T: Scalar>(order: u32, x: T) -> T {
    let xf = x.as_f64();
    let mut start = (xf + 40.0 + (40.0 * xf).sqrt()) as u32;
    start += start % 2;
    let big = T::max_value().sqrt();
    let rescale = T::one() / big;
    let two_over_x = T::lit(2.0) / x;

    let mut above = T::zero(); // J_{k+1}
    let mut current = T::min_positive_value().sqrt(); // J_k, arbitrary seed
    let mut norm = T::zero();
    let mut wanted = T::zero();
    for k in (1..=start).rev() {
        let below = T::of_usize(k as usize) * two_over_x * current - above;
        above = current;
        current = below;
        let idx = k - 1;
        if idx == order {
            wanted = current;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += current + current;
        }
        if current.abs() > big {
            current *= rescale;
            above *= rescale;
            norm *= rescale;
            wanted *= rescale;
        }
    }
    norm += current;
    wanted / norm
}

fn hankel<T: Scalar>(order: u32, x: T) -> T {
    let mu = T::lit(4.0 * (order * order) as f64);
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..80u32 {
        let odd = T::lit((2 * k - 1) as f64);
        term = term * (mu - odd * odd) / (T::lit(k as f64) * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // signs alternate in pairs: +q, -p, -q, +p, ...
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    let phase = x - (T::lit(order as f64) * T::lit(0.5) + T::lit(0.25)) * T::PI();
    let amp = (T::lit(2.0) / (T::PI() * x)).sqrt();
    amp * (p * phase.cos() - q * phase.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent oracle: Bessel's integral `(1/pi) int_0^pi cos(n t - x sin t) dt`
    /// evaluated by the trapezoid rule, which is spectrally accurate for this
    /// periodic integrand.
    fn integral_oracle(order: u32, x: f64) -> f64 {
        let n = 4096;
        let h = std::f64::consts::PI / n as f64;
        let f = |t: f64| (order as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(std::f64::consts::PI));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        s * h / std::f64::consts::PI
    }

    /// Truncated power series, 40 terms.
    fn series_oracle(x: f64) -> f64 {
        let mut s = 0.0;
        let mut fact_m = 1.0;
        for m in 0..40 {
            if m > 0 {
                fact_m *= m as f64;
            }
            let denom = fact_m * fact_m * (m as f64 + 1.0);
            s += (-1f64).powi(m) * (x / 2.0).powi(2 * m + 1) / denom;
        }
        s
    }

    #[test]
    fn special_values() {
        assert_eq!(bessel_j1(0.0f64).unwrap(), 0.0);
        assert_abs_diff_eq!(bessel_j1(1.0f64).unwrap(), 0.440_050_585_744_933_5, epsilon = 1e-15);
        assert_abs_diff_eq!(bessel_j1(3.831_705_970_2f64).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(bessel_j0(0.0f64).unwrap(), 1.0, epsilon = 1e-16);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(bessel_j1(f64::NAN), Err(Error::Domain(_))));
        assert!(bessel_j1(f64::INFINITY).is_err());
    }

    #[test]
    fn matches_power_series_within_ten() {
        for i in -2000..=2000 {
            let x = i as f64 * 0.005;
            let got = bessel_j1(x).unwrap();
            assert!((got - series_oracle(x)).abs() <= 1e-10, "x = {x}");
        }
    }

    #[test]
    fn matches_integral_representation_to_fifty() {
        for order in 0..=2 {
            for i in 0..=5000 {
                let x = i as f64 * 0.01;
                let got = jn::<f64>(order, x);
                let want = integral_oracle(order, x);
                assert!((got - want).abs() <= 1e-12, "J{order}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn regimes_join_continuously() {
        for order in 0..=2 {
            let (a, b) = (series(order, SERIES_LIMIT), miller(order, SERIES_LIMIT));
            assert!((a - b).abs() < 1e-14, "J{order}(8): {a} vs {b}");
            let (a, b) = (miller(order, ASYMPTOTIC_LIMIT), hankel(order, ASYMPTOTIC_LIMIT));
            assert!((a - b).abs() < 1e-14, "J{order}(25): {a} vs {b}");
        }
    }

    #[test]
    fn first_zero_by_bisection_on_series() {
        let (mut lo, mut hi) = (3.0, 4.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if series_oracle(lo) * series_oracle(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert_abs_diff_eq!(lo, J1_FIRST_ZERO, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j1(lo).unwrap(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn global_maximum_by_golden_section() {
        let (mut a, mut b) = (1.0f64, 3.0f64);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if series_oracle(c) > series_oracle(d) {
                b = d;
            } else {
                a = c;
            }
        }
        assert_abs_diff_eq!(series_oracle(a), J1_ABS_MAX, epsilon = 1e-14);
        assert_abs_diff_eq!(a, J1_ARGMAX, epsilon = 1e-6);
        for i in 0..20000 {
            assert!(j1(i as f64 * 0.01).abs() <= J1_ABS_MAX + 1e-15);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for i in 0..400 {
            let x = -20.0 + i as f64 * 0.1;
            let h = 1e-5;
            let fd = (j1(x + h) - j1(x - h)) / (2.0 * h);
            assert!((bessel_j1_prime(x).unwrap() - fd).abs() < 1e-9);
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        for i in 0..600 {
            let x = i as f64 * 0.1;
            let lo = j1(x as f32) as f64;
            assert!((lo - j1(x)).abs() < 2e-6, "x = {x}");
        }
    }

    proptest::proptest! {
        #[test]
        fn odd_symmetry(x in -200.0f64..200.0) {
            proptest::prop_assert_eq!(bessel_j1(-x).unwrap(), -bessel_j1(x).unwrap());
        }
    }
}
