//! Complex-branch arithmetic and modified Bessel functions, including the
//! Macdonald function at complex order.

mod bessel_real;
mod gamma;
pub(crate) mod macdonald;

pub use gamma::{gamma, gamma_real};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Default relative tolerance of the special-function layer.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Supported order strip |Re mu| < 2; all orders arising from the kernel
/// algebra satisfy |Re mu| <= 1, the margin covers intermediate shifts.
pub const ORDER_STRIP: f64 = 2.0;

/// Arguments with Re x below this are refused; the decaying branch of the
/// kernel algebra degenerates as Re sqrt(-z) -> 0.
pub const MIN_RE_ARG: f64 = 1e-8;

/// Spectral parameter z off the positive half-axis together with the
/// canonical branch kappa = sqrt(-z), Re kappa > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    z: Complex64,
    kappa: Complex64,
}

impl Energy {
    pub fn new(z: Complex64) -> Result<Self> {
        Ok(Self { z, kappa: kappa(z)? })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    /// Energy at the conjugate spectral parameter.
    pub fn conj(&self) -> Self {
        Self { z: self.z.conj(), kappa: self.kappa.conj() }
    }

    /// Principal power kappa^p (unambiguous since Re kappa > 0).
    pub fn kappa_pow(&self, p: f64) -> Complex64 {
        self.kappa.powf(p)
    }
}

/// The branch sqrt(-z) with strictly positive real part, continuous on the
/// plane cut along [0, +inf).
pub fn kappa(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::SpectralParameterOnCut);
    }
    let k = (-z).sqrt();
    debug_assert!(k.re > 0.0);
    Ok(k)
}

/// Complex order restricted to the supported strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(Complex64);

impl BesselOrder {
    pub fn new(mu: Complex64) -> Result<Self> {
        if mu.re.abs() >= ORDER_STRIP {
            return Err(Error::OrderOutOfStrip(mu.re));
        }
        Ok(Self(mu))
    }

    pub fn get(&self) -> Complex64 {
        self.0
    }
}

impl TryFrom<Complex64> for BesselOrder {
    type Error = Error;
    fn try_from(mu: Complex64) -> Result<Self> {
        Self::new(mu)
    }
}

fn check_argument(x: Complex64) -> Result<()> {
    if x.re < MIN_RE_ARG {
        return Err(Error::ArgumentLeftHalfPlane(x.re));
    }
    Ok(())
}

/// Macdonald function K_mu(x), Re x > 0, |Re mu| < 2.
pub fn bessel_k(mu: BesselOrder, x: Complex64) -> Result<Complex64> {
    bessel_k_tol(mu, x, DEFAULT_TOL)
}

/// K_mu(x) at an explicit relative tolerance.
pub fn bessel_k_tol(mu: BesselOrder, x: Complex64, rel_tol: f64) -> Result<Complex64> {
    check_argument(x)?;
    Ok(macdonald::kv(mu.get(), x, rel_tol))
}

/// Unchecked fast path used by the kernel layer (orders already validated).
pub(crate) fn kv_unchecked(mu: Complex64, x: Complex64, rel_tol: f64) -> Complex64 {
    macdonald::kv(mu, x, rel_tol)
}

/// Half-lattice profile K_{nu + i j h}(x), j = 0..=n_half (see macdonald).
pub(crate) fn kv_profile_half(
    nu: f64,
    x: Complex64,
    h_tau: f64,
    n_half: usize,
    rel_tol: f64,
) -> Vec<Complex64> {
    macdonald::kv_profile_half(nu, x, h_tau, n_half, rel_tol)
}

/// K at the ladder of real orders nu0, nu0+1, ..., nu0+count-1 by the
/// (upward-stable) three-term recurrence K_{v+1} = K_{v-1} + (2v/x) K_v,
/// seeded by two in-strip evaluations. Used for partial-wave sums whose
/// orders leave the |Re mu| < 2 strip.
pub(crate) fn k_real_ladder(nu0: f64, x: Complex64, count: usize, rel_tol: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(macdonald::kv(Complex64::new(nu0, 0.0), x, rel_tol));
    if count == 1 {
        return out;
    }
    out.push(macdonald::kv(Complex64::new(nu0 + 1.0, 0.0), x, rel_tol));
    for m in 2..count {
        let nu = nu0 + (m - 1) as f64;
        let next = out[m - 2] + 2.0 * nu / x * out[m - 1];
        out.push(next);
    }
    out
}

/// Modified Bessel function of the first kind, real order, Re x > 0.
pub fn bessel_i(nu: f64, x: Complex64) -> Result<Complex64> {
    if x.norm() > 0.0 {
        check_argument(x)?;
    }
    if nu < 0.0 {
        return Err(Error::OrderOutOfStrip(nu));
    }
    Ok(bessel_real::besseli(nu, x))
}

/// Bessel function of the first kind, nonnegative real order and argument.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if nu < 0.0 {
        return Err(Error::OrderOutOfStrip(nu));
    }
    if x < 0.0 {
        return Err(Error::ArgumentLeftHalfPlane(x));
    }
    Ok(bessel_real::besselj(nu, x))
}

/// Coefficients of (x/2)^{-nu} and (x/2)^{+nu} in the small-argument
/// expansion K_nu(x) = Gamma(nu)/2 (x/2)^{-nu} - Gamma(1-nu)/(2nu) (x/2)^{nu} + O(x^{2-nu}).
pub fn k_small_x_coefficients(nu: f64) -> Result<(f64, f64)> {
    if !(0.0 < nu && nu < 1.0) {
        return Err(Error::OrderOutOfStrip(nu));
    }
    Ok((0.5 * gamma_real(nu), -0.5 * gamma_real(1.0 - nu) / nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn kappa_branch_examples() {
        assert_eq!(kappa(Complex64::new(-1.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let k = kappa(Complex64::new(0.0, 1.0)).unwrap();
        let want = Complex64::from_polar(1.0, -PI / 4.0);
        assert_relative_eq!(k.re, want.re, max_relative = 1e-15);
        assert_relative_eq!(k.im, want.im, max_relative = 1e-15);
        assert_eq!(kappa(Complex64::new(4.0, 0.0)), Err(Error::SpectralParameterOnCut));
        assert_eq!(kappa(Complex64::new(0.0, 0.0)), Err(Error::SpectralParameterOnCut));
    }

    #[test]
    fn kappa_positive_real_part_everywhere() {
        for k in 0..64 {
            let arg = -PI + (k as f64 + 0.5) * (2.0 * PI / 64.0);
            if arg.abs() < 1e-9 {
                continue;
            }
            let z = Complex64::from_polar(2.3, arg);
            if z.im == 0.0 && z.re >= 0.0 {
                continue;
            }
            let ka = kappa(z).unwrap();
            assert!(ka.re > 0.0);
            assert_relative_eq!((ka * ka + z).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bessel_k_domain_errors() {
        let mu = BesselOrder::new(Complex64::new(0.3, 0.0)).unwrap();
        assert!(matches!(
            bessel_k(mu, Complex64::new(-1.0, 0.5)),
            Err(Error::ArgumentLeftHalfPlane(_))
        ));
        assert!(matches!(
            bessel_k(mu, Complex64::new(1e-9, 0.5)),
            Err(Error::ArgumentLeftHalfPlane(_))
        ));
        assert!(matches!(
            BesselOrder::new(Complex64::new(2.0, 1.0)),
            Err(Error::OrderOutOfStrip(_))
        ));
    }

    #[test]
    fn bessel_k_half_order_closed_form() {
        let mu = BesselOrder::new(Complex64::new(0.5, 0.0)).unwrap();
        let got = bessel_k(mu, Complex64::new(1.0, 0.0)).unwrap();
        let want = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert_relative_eq!(got.re, want, max_relative = 1e-12);
    }

    #[test]
    fn order_symmetry() {
        let x = Complex64::new(0.9, 0.4);
        for &(a, b) in &[(0.4, 0.8), (-1.1, 2.5), (0.0, 7.0)] {
            let mu = Complex64::new(a, b);
            let p = kv_unchecked(mu, x, 1e-13);
            let m = kv_unchecked(-mu, x, 1e-13);
            assert_relative_eq!(p.re, m.re, max_relative = 1e-11, epsilon = 1e-290);
            assert_relative_eq!(p.im, m.im, max_relative = 1e-11, epsilon = 1e-290);
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let x = Complex64::new(0.8, -0.6);
        for &(a, b) in &[(0.4, 0.8), (0.9, 4.0)] {
            let mu = Complex64::new(a, b);
            let lhs = kv_unchecked(mu, x, 1e-13).conj();
            let rhs = kv_unchecked(mu.conj(), x.conj(), 1e-13);
            assert_relative_eq!(lhs.re, rhs.re, max_relative = 1e-11, epsilon = 1e-290);
            assert_relative_eq!(lhs.im, rhs.im, max_relative = 1e-11, epsilon = 1e-290);
        }
    }

    #[test]
    fn small_x_coefficients() {
        let (c_neg, c_pos) = k_small_x_coefficients(0.5).unwrap();
        assert_relative_eq!(c_neg, PI.sqrt() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(c_pos, -PI.sqrt(), max_relative = 1e-14);
        // reflection: c_neg * c_pos = -pi / (4 nu sin(pi nu))
        for &nu in &[0.17, 1.0 / 3.0, 0.5, 0.82] {
            let (cn, cp) = k_small_x_coefficients(nu).unwrap();
            assert_relative_eq!(
                cn * cp,
                -PI / (4.0 * nu * (PI * nu).sin()),
                max_relative = 1e-12
            );
        }
        assert!(k_small_x_coefficients(1.0).is_err());
    }

    #[test]
    fn small_x_coefficients_slope_fit() {
        // K_{1/3}(x) - [c_neg (x/2)^{-1/3} + c_pos (x/2)^{1/3}] = O(x^{5/3});
        // Richardson slope over x = 1e-2, 1e-3.
        let nu = 1.0 / 3.0;
        let (cn, cp) = k_small_x_coefficients(nu).unwrap();
        let rem = |x: f64| {
            let k = kv_unchecked(Complex64::new(nu, 0.0), Complex64::new(x, 0.0), 1e-13).re;
            (k - cn * (0.5 * x).powf(-nu) - cp * (0.5 * x).powf(nu)).abs()
        };
        let (r1, r2) = (rem(1e-2), rem(1e-3));
        let slope = (r1 / r2).log10();
        assert!((slope - 5.0 / 3.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn imaginary_order_envelope_decay() {
        // |K_{i tau}(a)| oscillates through zeros, so monotone decay holds for
        // the local envelope: windowed suprema over tau windows of width 2.
        for &a in &[0.5, 1.0, 2.0] {
            let xc = Complex64::new(a, 0.0);
            let sup = |center: f64| {
                let mut m = 0.0f64;
                let mut t = center - 1.0;
                while t <= center + 1.0 {
                    m = m.max(kv_unchecked(Complex64::new(0.0, t), xc, 1e-11).norm());
                    t += 0.1;
                }
                m
            };
            let mut prev = sup(6.0);
            for k in 1..10 {
                let cur = sup(6.0 + 2.0 * k as f64);
                assert!(cur < prev, "envelope not decaying at a={a}, window {k}");
                prev = cur;
            }
        }
    }
}
