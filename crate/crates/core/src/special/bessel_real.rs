//! Real-order Bessel functions I_nu (complex argument, Re x > 0) and
//! J_nu (nonnegative real argument), power series with an asymptotic
//! switchover at large |x|.

use super::gamma::gamma_real;
use num_complex::Complex64;

const SERIES_SWITCH_I: f64 = 30.0;
const SERIES_SWITCH_J: f64 = 9.0;

/// I_nu(x) by ascending series; all-positive terms for real positive x.
fn besseli_series(nu: f64, x: Complex64) -> Complex64 {
    let q = x * x * 0.25;
    let mut term = (0.5 * x).powf(nu) / gamma_real(nu + 1.0);
    let mut sum = term;
    for k in 0..400 {
        term *= q / ((k as f64 + 1.0) * (nu + k as f64 + 1.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Hankel asymptotic coefficients a_k(nu) / x^k accumulated on the fly.
fn besseli_asymptotic(nu: f64, x: Complex64) -> Complex64 {
    let mu4 = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut p_plus = term; // sum (-1)^k a_k / x^k
    let mut p_minus = term; // sum a_k / x^k
    let mut best = f64::INFINITY;
    for k in 0..40 {
        let num = mu4 - (2.0 * k as f64 + 1.0).powi(2);
        term = term * num / (8.0 * (k as f64 + 1.0)) / x;
        if term.norm() > best {
            break;
        }
        best = term.norm();
        if (k + 1) % 2 == 1 {
            p_plus -= term;
            p_minus += term;
        } else {
            p_plus += term;
            p_minus += term;
        }
        if term.norm() < 1e-17 {
            break;
        }
    }
    let pref = (2.0 * std::f64::consts::PI * x).sqrt().inv();
    // reflected exponential with phase by the side of the real axis
    let sgn = if x.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, sgn * (nu + 0.5) * std::f64::consts::PI).exp();
    pref * (x.exp() * p_plus + phase * (-x).exp() * p_minus)
}

pub(crate) fn besseli(nu: f64, x: Complex64) -> Complex64 {
    if x.norm() == 0.0 {
        return if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    if x.norm() <= SERIES_SWITCH_I {
        besseli_series(nu, x)
    } else {
        besseli_asymptotic(nu, x)
    }
}

fn besselj_series(nu: f64, x: f64) -> f64 {
    let q = -x * x * 0.25;
    let mut term = (0.5 * x).powf(nu) / gamma_real(nu + 1.0);
    let mut sum = term;
    for k in 0..200 {
        term *= q / ((k as f64 + 1.0) * (nu + k as f64 + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn besselj_asymptotic(nu: f64, x: f64) -> f64 {
    let mu4 = 4.0 * nu * nu;
    let mut ak = 1.0f64;
    let mut p = 1.0f64;
    let mut q = 0.0f64;
    let mut best = f64::INFINITY;
    for k in 0..40 {
        ak *= (mu4 - (2.0 * k as f64 + 1.0).powi(2)) / (8.0 * (k as f64 + 1.0) * x);
        if ak.abs() > best {
            break;
        }
        best = ak.abs();
        let m = k + 1; // a_m / x^m accumulated in ak
        match m % 4 {
            1 => q += ak,
            2 => p -= ak,
            3 => q -= ak,
            _ => p += ak,
        }
        if ak.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

pub(crate) fn besselj(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_SWITCH_J.max(nu) {
        besselj_series(nu, x)
    } else {
        besselj_asymptotic(nu, x)
    }
}
