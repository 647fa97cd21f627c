//! Fresnel integrals and the sine/cosine integrals.
//!
//! Both use a power series near the origin and a complex continued fraction
//! (modified Lentz) beyond it; the continued fraction converges for every
//! argument past the switch point, which a truncated asymptotic series
//! does not do at double precision.

use num_complex::Complex;

use crate::scalar::Real;

const MAX_ITER: usize = 300;

/// Switch point, in the `cos(π t²/2)` convention.
const FRESNEL_SERIES_LIMIT: f64 = 1.5;
const CISI_SERIES_LIMIT: f64 = 2.0;

/// `(C(t), S(t))` with `C(t) = ∫₀^t cos(π x²/2) dx`, plus the complementary
/// integral `∫_t^∞ exp(iπx²/2) dx`, for `t ≥ 0`.
fn fresnel_pi_half<T: Real>(t: T) -> (T, T, Complex<T>) {
    debug_assert!(t >= T::zero());
    let half = T::lit(0.5);
    let corner = Complex::new(half, half);
    let eps = T::epsilon();
    if t == T::zero() {
        return (T::zero(), T::zero(), corner);
    }
    if t <= T::lit(FRESNEL_SERIES_LIMIT) {
        // Alternating series for cos and sin interleaved in one sweep.
        let fact = T::FRAC_PI_2() * t * t;
        let mut sum_c = t;
        let mut sum_s = T::zero();
        let mut sum = T::zero();
        let mut sign = T::one();
        let mut term = t;
        let mut odd = true;
        let mut n = T::lit(3.0);
        for k in 1..MAX_ITER {
            term = term * fact / T::from_usize_lossy(k);
            sum = sum + sign * term / n;
            let test = sum.abs() * eps;
            if odd {
                sign = -sign;
                sum_s = sum;
                sum = sum_c;
            } else {
                sum_c = sum;
                sum = sum_s;
            }
            if term < test {
                break;
            }
            odd = !odd;
            n = n + T::lit(2.0);
        }
        let tail = corner - Complex::new(sum_c, sum_s);
        return (sum_c, sum_s, tail);
    }
    let pix2 = T::PI() * t * t;
    let one = Complex::new(T::one(), T::zero());
    let tiny = T::min_positive_value() / eps;
    let mut b = Complex::new(T::one(), -pix2);
    let mut c = Complex::new(T::one() / tiny, T::zero());
    let mut d = one / b;
    let mut h = d;
    let mut n = -T::one();
    for _ in 2..MAX_ITER {
        n = n + T::lit(2.0);
        let a = -n * (n + T::one());
        b = b + Complex::new(T::lit(4.0), T::zero());
        d = one / (d * a + b);
        c = b + Complex::new(a, T::zero()) / c;
        let del = c * d;
        h = h * del;
        if (del.re - T::one()).abs() + del.im.abs() < eps {
            break;
        }
    }
    h = Complex::new(t, -t) * h;
    let phase = Complex::new((half * pix2).cos(), (half * pix2).sin());
    let tail = corner * phase * h;
    let cs = corner - tail;
    (cs.re, cs.im, tail)
}

/// Normalized Fresnel cosine integral `C(u) = √(2/π) ∫₀^u cos(x²) dx`.
///
/// Odd in `u`; tends to `1/2` as `u → ∞`.
pub fn fresnel_c<T: Real>(u: T) -> T {
    let scale = (T::lit(2.0) / T::PI()).sqrt();
    let (c, _, _) = fresnel_pi_half(u.abs() * scale);
    if u < T::zero() {
        -c
    } else {
        c
    }
}

/// `(∫₀^u cos(x²) dx, ∫₀^u sin(x²) dx)`, both odd in `u`.
pub fn fresnel_integrals<T: Real>(u: T) -> (T, T) {
    let scale = (T::lit(2.0) / T::PI()).sqrt();
    let back = T::one() / scale;
    let (c, s, _) = fresnel_pi_half(u.abs() * scale);
    let (c, s) = (c * back, s * back);
    if u < T::zero() {
        (-c, -s)
    } else {
        (c, s)
    }
}

/// `∫_x^∞ exp(i t²) dt` for `x ≥ 0`, computed without cancellation for large `x`.
pub fn fresnel_tail<T: Real>(x: T) -> Complex<T> {
    assert!(x >= T::zero(), "fresnel_tail needs a non-negative lower limit");
    let scale = (T::lit(2.0) / T::PI()).sqrt();
    let (_, _, tail) = fresnel_pi_half(x * scale);
    tail / scale
}

/// `E₁(i y) = ∫_y^∞ exp(-i t)/t dt` for `y > 0`.
pub fn exp_integral_imag<T: Real>(y: T) -> Complex<T> {
    assert!(y > T::zero(), "E1(iy) needs y > 0");
    let eps = T::epsilon();
    if y > T::lit(CISI_SERIES_LIMIT) {
        let one = Complex::new(T::one(), T::zero());
        let tiny = T::min_positive_value() / eps;
        let mut b = Complex::new(T::one(), y);
        let mut c = Complex::new(T::one() / tiny, T::zero());
        let mut d = one / b;
        let mut h = d;
        for i in 2..MAX_ITER {
            let k = T::from_usize_lossy(i - 1);
            let a = -k * k;
            b = b + Complex::new(T::lit(2.0), T::zero());
            d = one / (d * a + b);
            c = b + Complex::new(a, T::zero()) / c;
            let del = c * d;
            h = h * del;
            if (del.re - T::one()).abs() + del.im.abs() < eps {
                break;
            }
        }
        return Complex::new(y.cos(), -y.sin()) * h;
    }
    let (si, ci) = series_si_ci(y);
    Complex::new(-ci, si - T::FRAC_PI_2())
}

/// Sine and cosine integrals `(Si(x), Ci(x))` for `x > 0`.
pub fn sine_cosine_integrals<T: Real>(x: T) -> (T, T) {
    assert!(x > T::zero(), "Si/Ci need x > 0");
    if x > T::lit(CISI_SERIES_LIMIT) {
        let e1 = exp_integral_imag(x);
        (T::FRAC_PI_2() + e1.im, -e1.re)
    } else {
        series_si_ci(x)
    }
}

fn series_si_ci<T: Real>(t: T) -> (T, T) {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let eps = T::epsilon();
    let mut sum = T::zero();
    let mut sum_s = T::zero();
    let mut sum_c = T::zero();
    let mut sign = T::one();
    let mut fact = T::one();
    let mut odd = true;
    for k in 1..MAX_ITER {
        let kf = T::from_usize_lossy(k);
        fact = fact * t / kf;
        let term = fact / kf;
        sum = sum + sign * term;
        let err = term / sum.abs();
        if odd {
            sign = -sign;
            sum_s = sum;
            sum = sum_c;
        } else {
            sum_c = sum;
            sum = sum_s;
        }
        if err < eps {
            break;
        }
        odd = !odd;
    }
    (sum_s, sum_c + t.ln() + T::lit(EULER_GAMMA))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Adaptive Simpson, used only as an independent oracle.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn step(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        step(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    #[test]
    fn fresnel_c_at_zero() {
        assert_eq!(fresnel_c(0.0f64), 0.0);
    }

    #[test]
    fn fresnel_c_matches_adaptive_quadrature() {
        let k = (2.0 / std::f64::consts::PI).sqrt();
        for &u in &[0.1, 0.5, 1.0, 1.7, 1.88, 2.5, 3.3, 4.0] {
            let oracle = k * adaptive_simpson(&|x: f64| (x * x).cos(), 0.0, u, 1e-14);
            assert_abs_diff_eq!(fresnel_c(u), oracle, epsilon = 1e-10);
            let s_oracle = adaptive_simpson(&|x: f64| (x * x).sin(), 0.0, u, 1e-14);
            assert_abs_diff_eq!(fresnel_integrals(u).1, s_oracle, epsilon = 1e-10);
        }
    }

    #[test]
    fn fresnel_c_large_argument() {
        assert!((fresnel_c(50.0f64) - 0.5).abs() < 2e-2);
        assert!((fresnel_c(1e4f64) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn fresnel_c_is_odd() {
        for &u in &[0.3f64, 1.2, 1.9, 2.1, 7.5, 31.0] {
            assert!((fresnel_c(-u) + fresnel_c(u)).abs() <= 1e-12);
        }
    }

    #[test]
    fn tail_complements_the_full_integral() {
        let half = 0.5 * (std::f64::consts::PI / 2.0).sqrt();
        for &x in &[0.0, 0.4, 1.2, 1.9, 3.0, 10.0] {
            let (c, s) = fresnel_integrals(x);
            let tail = fresnel_tail(x);
            assert_abs_diff_eq!(c + tail.re, half, epsilon = 1e-13);
            assert_abs_diff_eq!(s + tail.im, half, epsilon = 1e-13);
        }
        // Leading asymptotics i exp(i x²)/(2x).
        let x = 40.0f64;
        let lead = Complex::new(0.0, 1.0) * Complex::new((x * x).cos(), (x * x).sin()) / (2.0 * x);
        assert!((fresnel_tail(x) - lead).norm() < 1e-5);
    }

    #[test]
    fn sine_cosine_integrals_reference_values() {
        // Si(1), Ci(1), Si(5), Ci(5) to 15 digits.
        let (si, ci) = sine_cosine_integrals(1.0f64);
        assert_abs_diff_eq!(si, 0.946_083_070_367_183, epsilon = 1e-13);
        assert_abs_diff_eq!(ci, 0.337_403_922_900_968, epsilon = 1e-13);
        let (si, ci) = sine_cosine_integrals(5.0f64);
        assert_abs_diff_eq!(si, 1.549_931_244_944_674, epsilon = 1e-13);
        assert_abs_diff_eq!(ci, -0.190_029_749_656_644, epsilon = 1e-13);
    }

    #[test]
    fn exp_integral_consistent_across_branch_switch() {
        // d/dy E1(iy) = -exp(-iy)/y; check by central differences either side of 2.
        for &y in &[1.9f64, 2.0, 2.1] {
            let h = 1e-5;
            let d = (exp_integral_imag(y + h) - exp_integral_imag(y - h)) / (2.0 * h);
            let exact = -Complex::new(y.cos(), -y.sin()) / y;
            assert!((d - exact).norm() < 1e-8);
        }
    }

    #[test]
    fn single_precision_fresnel() {
        let c = fresnel_c(1.0f32);
        assert!((c as f64 - fresnel_c(1.0f64)).abs() < 1e-6);
    }
}
