use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos coefficients for g = 7, n = 9 (GSL / numerical recipes lineage).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma function for complex argument, Lanczos approximation with
/// reflection for Re z < 1/2. Accurate to ~1e-13 relative on the strip
/// |Re z| <= 4 used by the kernel layer.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi_c = Complex64::new(PI, 0.0);
        return pi_c / ((pi_c * z).sin() * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_P[0], 0.0);
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let sqrt_two_pi = (2.0 * PI).sqrt();
    sqrt_two_pi * t.powc(zm1 + 0.5) * (-t).exp() * acc
}

/// Gamma function restricted to real argument.
pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_values() {
        assert_relative_eq!(gamma_real(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_real(1.5), 0.5 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_real(5.0), 24.0, max_relative = 1e-14);
    }

    #[test]
    fn reflection_consistency() {
        for &x in &[0.1, 0.3, 0.7, 0.9] {
            let lhs = gamma_real(x) * gamma_real(1.0 - x);
            assert_relative_eq!(lhs, PI / (PI * x).sin(), max_relative = 1e-13);
        }
    }

    #[test]
    fn complex_conjugation() {
        let z = Complex64::new(0.8, 1.3);
        let g = gamma(z);
        let gc = gamma(z.conj());
        assert_relative_eq!(g.re, gc.re, max_relative = 1e-13);
        assert_relative_eq!(g.im, -gc.im, max_relative = 1e-13);
    }

    #[test]
    fn known_complex_value() {
        // |Gamma(1 + i)|^2 = pi / sinh(pi)
        let g = gamma(Complex64::new(1.0, 1.0));
        assert_relative_eq!(g.norm_sqr(), PI / PI.sinh(), max_relative = 1e-13);
    }
}
