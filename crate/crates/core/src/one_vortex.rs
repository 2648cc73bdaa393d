//! Single-vortex spinless Green function in three angular branches, its
//! partial-wave and R(s)-integral oracles, the two deficiency functions, and
//! the resolvent-mapping residual.

use crate::error::{Error, Result};
use crate::geometry::{polar_single_vortex, winding_single_vortex, PlanePoint, VORTEX_EPS};
use crate::quadrature::{flux_factor, integrate_line, integrate_square, LineDomain, TauGrid};
use crate::special::{bessel_i, k_real_ladder, kv_unchecked, Energy};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which deficiency channel of the single vortex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeficiencyIndex {
    /// psi_{-1,z} = K_{1-alpha}(kappa r) e^{i(alpha-1) theta}
    MinusOne,
    /// psi_{0,z} = K_alpha(kappa r) e^{i alpha theta}
    Zero,
}

impl DeficiencyIndex {
    pub fn nu(self, alpha: f64) -> f64 {
        match self {
            DeficiencyIndex::MinusOne => alpha - 1.0,
            DeficiencyIndex::Zero => alpha,
        }
    }
}

/// Angular branch of the separated Green-function form, fixed by the
/// winding classification of the point pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularBranch {
    Central,
    Upper,
    Lower,
}

impl AngularBranch {
    pub fn from_eta(eta: f64) -> Self {
        if eta > 1.0 {
            AngularBranch::Upper
        } else if eta < -1.0 {
            AngularBranch::Lower
        } else {
            AngularBranch::Central
        }
    }

    pub fn prefactor(self, alpha: f64) -> Complex64 {
        let eta = match self {
            AngularBranch::Central => 0.0,
            AngularBranch::Upper => 2.0 * PI,
            AngularBranch::Lower => -2.0 * PI,
        };
        Complex64::new(0.0, alpha * eta).exp()
    }
}

/// Cached first-argument data of the Green function.
#[derive(Debug, Clone)]
pub struct SourcePoint {
    point: PlanePoint,
    th: f64,
    prof: Vec<Complex64>,
}

/// Single-vortex evaluator holding the spectral lattice for its flux.
#[derive(Debug, Clone)]
pub struct OneVortex {
    z: Energy,
    alpha: f64,
    tol: f64,
    grid: TauGrid,
}

impl OneVortex {
    pub fn new(z: Energy, alpha: f64, tol: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::FluxOutOfRange(alpha));
        }
        let grid = TauGrid::build(z, 1.0, &[alpha], tol)?;
        Ok(Self { z, alpha, tol, grid })
    }

    pub fn z(&self) -> Energy {
        self.z
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn degenerate(&self) -> bool {
        self.alpha.min(1.0 - self.alpha) < crate::geometry::DEGENERATE_FLUX_EPS
    }

    /// Separated-form Green function; branch dispatch through the winding
    /// classification of the segment, never through float comparison of the
    /// raw angle difference with +-pi.
    pub fn green(&self, x: &PlanePoint, x0: &PlanePoint) -> Result<Complex64> {
        let src = self.source(x)?;
        self.green_from_source(&src, x0)
    }

    /// First-argument data cached for repeated evaluation against many
    /// second arguments (quadrature sweeps).
    pub fn source(&self, x: &PlanePoint) -> Result<SourcePoint> {
        let (r, th) = polar_single_vortex(x)?;
        let prof = if self.degenerate() { Vec::new() } else { self.grid.point_profile(r, 0.0) };
        let _ = r;
        Ok(SourcePoint { point: *x, th, prof })
    }

    /// G_z(src, x0) with the first-argument profile reused.
    pub fn green_from_source(&self, src: &SourcePoint, x0: &PlanePoint) -> Result<Complex64> {
        let (r0, th0) = polar_single_vortex(x0)?;
        if src.point.dist(x0) < VORTEX_EPS {
            return Err(Error::CoincidentPoints);
        }
        let (_, eta) = winding_single_vortex(&src.point, x0, self.alpha)?;
        let kap = self.z.kappa();
        let dist = src.point.dist(x0);
        let free = kv_unchecked(Complex64::new(0.0, 0.0), kap * dist, self.tol * 1e-2) / (2.0 * PI);
        let pref = Complex64::new(0.0, self.alpha * eta).exp();
        if self.degenerate() {
            return Ok(pref * free);
        }
        let pr0 = self.grid.point_profile(r0, 0.0);
        let de = src.th - th0 - eta;
        let mut corr = Complex64::new(0.0, 0.0);
        for j in 0..self.grid.len() {
            let t = self.grid.nodes()[j];
            corr += self.grid.weights()[j] * src.prof[j] * pr0[j] * (de * t).exp()
                * flux_factor(self.alpha, t);
        }
        Ok(pref * (free - corr / (2.0 * PI)))
    }

    /// Green function from polar data and an explicit branch shift.
    pub fn green_polar(&self, r: f64, th: f64, r0: f64, th0: f64, eta: f64) -> Complex64 {
        let kap = self.z.kappa();
        let dist = (r * r + r0 * r0 - 2.0 * r * r0 * (th - th0).cos()).sqrt();
        let free = kv_unchecked(Complex64::new(0.0, 0.0), kap * dist, self.tol * 1e-2) / (2.0 * PI);
        let pref = Complex64::new(0.0, self.alpha * eta).exp();
        if self.degenerate() {
            return pref * free;
        }
        let pr = self.grid.point_profile(r, 0.0);
        let pr0 = self.grid.point_profile(r0, 0.0);
        let de = th - th0 - eta;
        let mut corr = Complex64::new(0.0, 0.0);
        for j in 0..self.grid.len() {
            let t = self.grid.nodes()[j];
            corr += self.grid.weights()[j] * pr[j] * pr0[j] * (de * t).exp()
                * flux_factor(self.alpha, t);
        }
        // flux_factor carries sin(pi a)/(pi sin(..)); the display wants
        // sin(pi a)/(2 pi^2 sin(..)) so divide by 2 pi.
        pref * (free - corr / (2.0 * PI))
    }

    /// Partial-wave sum over angular momenta: I_{|n+a|}(kappa r_<)
    /// K_{|n+a|}(kappa r_>) with phase e^{i(n+a)(theta-theta_0)}. Truncation
    /// stops after three consecutive terms below 1e-14 of the running sum.
    pub fn green_oracle(&self, x: &PlanePoint, x0: &PlanePoint, n_max: usize) -> Result<Complex64> {
        let (r, th) = polar_single_vortex(x)?;
        let (r0, th0) = polar_single_vortex(x0)?;
        if x.dist(x0) < VORTEX_EPS {
            return Err(Error::CoincidentPoints);
        }
        let kap = self.z.kappa();
        let (rlt, rgt) = (r.min(r0), r.max(r0));
        let dth = th - th0;
        let a = self.alpha;
        let n_max = n_max.min(120);
        // K ladders at orders a+m and (1-a)+m; I by series per order.
        let k_pos = k_real_ladder(a, kap * rgt, n_max + 1, self.tol * 1e-2);
        let k_neg = k_real_ladder(1.0 - a, kap * rgt, n_max + 1, self.tol * 1e-2);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut small_run = 0usize;
        for n in 0..=(n_max as i64) {
            let mut layer = Complex64::new(0.0, 0.0);
            // +n term
            let nu_p = n as f64 + a;
            let term_p = bessel_i(nu_p, kap * rlt)?
                * k_pos[n as usize]
                * Complex64::new(0.0, nu_p * dth).exp();
            layer += term_p;
            if n > 0 {
                let nu_m = n as f64 - a;
                let term_m = bessel_i(nu_m, kap * rlt)?
                    * k_neg[(n - 1) as usize]
                    * Complex64::new(0.0, -nu_m * dth).exp();
                layer += term_m;
            }
            sum += layer;
            if layer.norm() < 1e-14 * sum.norm().max(1e-300) {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        Ok(sum / (2.0 * PI))
    }

    /// Second independent oracle: the R(s) integral form with
    /// R(s)^2 = r^2 + r0^2 + 2 r r0 cosh s.
    pub fn green_rs_oracle(&self, x: &PlanePoint, x0: &PlanePoint) -> Result<Complex64> {
        let (r, th) = polar_single_vortex(x)?;
        let (r0, th0) = polar_single_vortex(x0)?;
        if x.dist(x0) < VORTEX_EPS {
            return Err(Error::CoincidentPoints);
        }
        let (zeta, _) = winding_single_vortex(x, x0, self.alpha)?;
        let kap = self.z.kappa();
        let dist = x.dist(x0);
        let free = kv_unchecked(Complex64::new(0.0, 0.0), kap * dist, 1e-13) / (2.0 * PI);
        if self.degenerate() {
            return Ok(zeta * free);
        }
        let a = self.alpha;
        let dth = th - th0;
        let phase = Complex64::new(0.0, a * dth).exp();
        let integrand = |s: f64| {
            let big_r = (r * r + r0 * r0 + 2.0 * r * r0 * s.cosh()).sqrt();
            let k0 = kv_unchecked(Complex64::new(0.0, 0.0), kap * big_r, 1e-11);
            let den = 1.0 + (Complex64::new(-s, dth)).exp();
            k0 * (-a * s).exp() * phase / den
        };
        let integral = integrate_line(integrand, LineDomain::FullLine, self.tol.max(1e-11))?;
        Ok(zeta * free - (a * PI).sin() / (2.0 * PI * PI) * integral.value)
    }

    /// Deficiency-channel function value.
    pub fn deficiency(&self, which: DeficiencyIndex, x: &PlanePoint) -> Result<Complex64> {
        let (r, th) = polar_single_vortex(x)?;
        let nu = which.nu(self.alpha);
        let kap = self.z.kappa();
        Ok(kv_unchecked(Complex64::new(nu.abs(), 0.0), kap * r, self.tol * 1e-2)
            * Complex64::new(0.0, nu * th).exp())
    }

    /// Residual of psi_w + (z-w)(H-z)^{-1} psi_w = (kappa_z/kappa_w)^{|nu|} psi_z
    /// on the truncated plane |y| <= radius.
    pub fn resolvent_map_check(
        &self,
        which: DeficiencyIndex,
        w: Energy,
        x: &PlanePoint,
        radius: f64,
        quad_tol: f64,
    ) -> Result<f64> {
        let other = OneVortex::new(w, self.alpha, self.tol)?;
        let nu_abs = which.nu(self.alpha).abs();
        let scale = (self.z.kappa() / w.kappa()).powf(nu_abs);
        let psi_w_x = other.deficiency(which, x)?;
        let psi_z_x = self.deficiency(which, x)?;
        if (self.z.z() - w.z()).norm() < 1e-15 {
            return Ok((psi_w_x - scale * psi_z_x).norm());
        }
        // tail certificate: both factors decay exponentially
        let decay = self.z.kappa().re + w.kappa().re;
        let margin = radius - (x.x1 * x.x1 + x.x2 * x.x2).sqrt() - 1.0;
        let tail = 8.0 * (-decay * margin).exp();
        if tail > quad_tol {
            return Err(Error::TailNotNegligible { tail, tol: quad_tol });
        }
        let src = self.source(x)?;
        let f = |y1: f64, y2: f64| {
            let y = PlanePoint::new(y1, y2);
            let g = self.green_from_source(&src, &y).unwrap_or_else(|_| {
                let yn = PlanePoint::new(y1 + 1e-12, y2 + 1e-12);
                self.green_from_source(&src, &yn).unwrap_or(Complex64::new(0.0, 0.0))
            });
            let psi = other.deficiency(which, &y).unwrap_or(Complex64::new(0.0, 0.0));
            g * psi
        };
        let (integral, _err) = integrate_square(&f, radius, quad_tol, 1e-5, 400_000)?;
        let lhs = (self.z.z() - w.z()) * integral + psi_w_x - scale * psi_z_x;
        Ok(lhs.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ov(zr: f64, zi: f64, alpha: f64) -> OneVortex {
        OneVortex::new(Energy::new(Complex64::new(zr, zi)).unwrap(), alpha, 1e-10).unwrap()
    }

    #[test]
    fn degenerate_flux_reduces_to_free_kernel() {
        let v = ov(0.0, 1.0, 0.0);
        let x = PlanePoint::new(1.0, 0.4);
        let x0 = PlanePoint::new(0.3, -0.2);
        let g = v.green(&x, &x0).unwrap();
        let kap = v.z().kappa();
        let want = kv_unchecked(Complex64::new(0.0, 0.0), kap * x.dist(&x0), 1e-13) / (2.0 * PI);
        assert_relative_eq!(g.re, want.re, max_relative = 1e-12);
        assert_relative_eq!(g.im, want.im, max_relative = 1e-12);
    }

    #[test]
    fn coincident_points_rejected() {
        let v = ov(-1.0, 0.0, 0.5);
        let x = PlanePoint::new(0.5, 0.5);
        assert!(matches!(v.green(&x, &x), Err(Error::CoincidentPoints)));
        assert!(matches!(
            v.green(&PlanePoint::new(0.0, 0.0), &x),
            Err(Error::AtVortex(_))
        ));
    }

    #[test]
    fn branch_continuity_at_pi() {
        // limits of the central and upper branches at dtheta = pi agree
        // through the kernel-product identity
        let v = ov(0.0, 1.0, 1.0 / 3.0);
        let central = v.green_polar(1.0, PI, 0.7, 0.0, 0.0);
        let upper = v.green_polar(1.0, PI, 0.7, 0.0, 2.0 * PI);
        assert!(
            (central - upper).norm() < 1e-8,
            "branch mismatch {}",
            (central - upper).norm()
        );
        // and at dtheta = -pi with the lower branch
        let central2 = v.green_polar(1.0, -PI, 0.7, 0.0, 0.0);
        let lower = v.green_polar(1.0, -PI, 0.7, 0.0, -2.0 * PI);
        assert!((central2 - lower).norm() < 1e-8);
    }

    #[test]
    fn deficiency_values_and_cut_jump() {
        let v = ov(-1.0, 0.0, 1.0 / 3.0);
        let x = PlanePoint::new(1.0, 0.0);
        let got = v.deficiency(DeficiencyIndex::Zero, &x).unwrap();
        let want = kv_unchecked(Complex64::new(1.0 / 3.0, 0.0), Complex64::new(1.0, 0.0), 1e-13);
        assert_relative_eq!(got.re, want.re, max_relative = 1e-11);

        // phase jump across the cut: psi(pi) = e^{2 pi i alpha} psi(-pi)
        let up = PlanePoint::with_side(-0.8, 0.0, crate::geometry::CutSide::Upper);
        let dn = PlanePoint::with_side(-0.8, 0.0, crate::geometry::CutSide::Lower);
        for which in [DeficiencyIndex::MinusOne, DeficiencyIndex::Zero] {
            let vu = v.deficiency(which, &up).unwrap();
            let vd = v.deficiency(which, &dn).unwrap();
            let jump = Complex64::new(0.0, 2.0 * PI * v.alpha()).exp();
            assert!((vu - jump * vd).norm() < 1e-12 * vu.norm());
        }
    }

    #[test]
    fn deficiency_square_integrable() {
        // radial quadrature of |K_a(kappa r)|^2 r converges
        let v = ov(0.0, 1.0, 1.0 / 3.0);
        let kap = v.z().kappa();
        let f = |r: f64| {
            if r < 1e-12 {
                return Complex64::new(0.0, 0.0);
            }
            let k = kv_unchecked(Complex64::new(v.alpha(), 0.0), kap * r, 1e-10);
            Complex64::new(k.norm_sqr() * r, 0.0)
        };
        let q = integrate_line(f, LineDomain::HalfLine, 1e-9).unwrap();
        assert!(q.value.re.is_finite() && q.value.re > 0.0);
    }

    #[test]
    fn resolvent_map_identity_case() {
        let v = ov(0.0, 1.0, 1.0 / 3.0);
        let x = PlanePoint::new(0.8, 0.3);
        let res = v
            .resolvent_map_check(DeficiencyIndex::Zero, v.z(), &x, 25.0, 1e-4)
            .unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn resolvent_scale_exponent() {
        // the scaling prefactor for the -1 channel is (kz/kw)^{1-alpha}
        let alpha = 1.0 / 3.0;
        let nu = DeficiencyIndex::MinusOne.nu(alpha);
        assert_relative_eq!(nu.abs(), 1.0 - alpha, max_relative = 1e-15);
    }
}
