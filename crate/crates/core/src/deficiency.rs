//! The four deficiency-basis functions of the two-vortex problem, evaluated
//! either as truncated chain series or through the resummed compact form,
//! plus the asymptotic matrices built from the same kernel algebra and the
//! numerical verification of the cut conditions and near-vortex expansions.

use crate::error::{Error, Result};
use crate::geometry::{polar_about, CutSide, PlanePoint, Vortex, VortexPair};
use crate::quadrature::{dot, ChainAlgebra};
use crate::special::{gamma_real, kv_unchecked, Energy};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which of the two orders a channel carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuKind {
    /// nu = omega - 1 (the stronger singularity)
    Lower,
    /// nu = omega
    Upper,
}

/// One of the four deficiency channels, with the flat enumeration
/// (a, alpha-1), (a, alpha), (b, beta-1), (b, beta).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelIndex {
    pub vortex: Vortex,
    pub kind: NuKind,
}

impl ChannelIndex {
    pub const ALL: [ChannelIndex; 4] = [
        ChannelIndex { vortex: Vortex::A, kind: NuKind::Lower },
        ChannelIndex { vortex: Vortex::A, kind: NuKind::Upper },
        ChannelIndex { vortex: Vortex::B, kind: NuKind::Lower },
        ChannelIndex { vortex: Vortex::B, kind: NuKind::Upper },
    ];

    /// Flat index 0..4 in the fixed enumeration above.
    pub fn flat(&self) -> usize {
        let base = match self.vortex {
            Vortex::A => 0,
            Vortex::B => 2,
        };
        base + match self.kind {
            NuKind::Lower => 0,
            NuKind::Upper => 1,
        }
    }

    pub fn from_flat(j: usize) -> Self {
        Self::ALL[j]
    }

    pub fn omega(&self, cfg: &VortexPair) -> f64 {
        cfg.flux(self.vortex)
    }

    pub fn nu(&self, cfg: &VortexPair) -> f64 {
        match self.kind {
            NuKind::Lower => self.omega(cfg) - 1.0,
            NuKind::Upper => self.omega(cfg),
        }
    }
}

/// Evaluation method for the channel functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// direct sum of the chain series up to S_{n_max}
    Series(usize),
    /// compact resummed form through the Neumann solution
    Resummed,
}

struct ChannelData {
    /// solved (I - K D_u K D_v)^{-1} g_nu
    y_hat: Vec<Complex64>,
    /// D_u K D_v y
    w1: Vec<Complex64>,
    /// D_v y
    w2: Vec<Complex64>,
}

/// Evaluator for the deficiency subspace at fixed (z, cfg).
pub struct Deficiency {
    z: Energy,
    cfg: VortexPair,
    tol: f64,
    pub alg: ChainAlgebra,
    channels: [ChannelData; 4],
}

impl Deficiency {
    pub fn new(z: Energy, cfg: &VortexPair, tol: f64) -> Result<Self> {
        let alg = ChainAlgebra::new(z, cfg, tol)?;
        let mut channels = Vec::with_capacity(4);
        for ch in ChannelIndex::ALL {
            let nu = ch.nu(cfg);
            let u = ch.vortex;
            let v = u.other();
            let g = alg.g_hat(nu);
            let y_hat = alg.solve_chain(u, &g, tol * 1e-2)?;
            let w2 = alg.diag(v).apply(&y_hat);
            let w1 = alg.diag(u).apply(&alg.conv.apply(&w2));
            channels.push(ChannelData { y_hat, w1, w2 });
        }
        let channels: [ChannelData; 4] = match channels.try_into() {
            Ok(c) => c,
            Err(_) => unreachable!(),
        };
        Ok(Self { z, cfg: *cfg, tol, alg, channels })
    }

    pub fn z(&self) -> Energy {
        self.z
    }

    pub fn cfg(&self) -> VortexPair {
        self.cfg
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn leading(&self, ch: ChannelIndex, r_u: f64, th_u: f64) -> Complex64 {
        let nu = ch.nu(&self.cfg);
        kv_unchecked(
            Complex64::new(nu.abs(), 0.0),
            self.z.kappa() * r_u,
            self.tol * 1e-2,
        ) * Complex64::new(0.0, nu * th_u).exp()
    }

    /// Channel function value. The point may coincide with the
    /// complementary vortex, where the delta-limit of the contraction
    /// replaces the divergent profile.
    pub fn psi(&self, ch: ChannelIndex, x: &PlanePoint, method: Method) -> Result<Complex64> {
        let u = ch.vortex;
        let v = u.other();
        let (cu, _) = self.cfg.center(u);
        let _ = cu;
        let (cvx, cvy) = self.cfg.center(v);
        let at_complementary = ((x.x1 - cvx).powi(2) + (x.x2 - cvy).powi(2)).sqrt() < 1e-9;
        match method {
            Method::Resummed => {
                let data = &self.channels[ch.flat()];
                let (r_u, th_u) = polar_about(x, u, &self.cfg)?;
                let lead = self.leading(ch, r_u, th_u);
                let u_hat_u = self.alg.u_hat_polar(r_u, th_u);
                let t1 = dot(&u_hat_u, &data.w1);
                let t2 = if at_complementary {
                    self.alg.at_zero(&data.y_hat)
                } else {
                    let u_hat_v = self.alg.u_hat(x, v)?;
                    dot(&u_hat_v, &data.w2)
                };
                Ok(lead + t1 - t2)
            }
            Method::Series(n_max) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 0..=n_max {
                    acc += self.s_term(n, ch, x)?;
                }
                Ok(acc)
            }
        }
    }

    /// Individual chain summand S_n(u, nu, z; x); S_0 is the leading
    /// Macdonald term.
    pub fn s_term(&self, n: usize, ch: ChannelIndex, x: &PlanePoint) -> Result<Complex64> {
        self.s_term_with_order(n, ch, ch.nu(&self.cfg), x)
    }

    /// S_n with an explicit order nu (used by the sign-flip identity).
    pub fn s_term_with_order(
        &self,
        n: usize,
        ch: ChannelIndex,
        nu: f64,
        x: &PlanePoint,
    ) -> Result<Complex64> {
        let u = ch.vortex;
        let v = u.other();
        if n == 0 {
            let (r_u, th_u) = polar_about(x, u, &self.cfg)?;
            return Ok(kv_unchecked(
                Complex64::new(nu.abs(), 0.0),
                self.z.kappa() * r_u,
                self.tol * 1e-2,
            ) * Complex64::new(0.0, nu * th_u).exp());
        }
        let g = self.alg.g_hat(nu);
        // (K D_u K D_v)^{m-1} g built by repeated application
        let m = n.div_ceil(2);
        let mut pow = g;
        for _ in 1..m {
            pow = self.alg.double_link(u, &pow);
        }
        if n % 2 == 1 {
            // S_{2m-1} = - f_v^T (...)^{m-1} g
            let (cvx, cvy) = self.cfg.center(v);
            let at_v = ((x.x1 - cvx).powi(2) + (x.x2 - cvy).powi(2)).sqrt() < 1e-9;
            let dv_pow = self.alg.diag(v).apply(&pow);
            if at_v {
                // delta limit: f_v^T y -> y(0)
                return Ok(-self.alg.at_zero(&pow));
            }
            let u_hat_v = self.alg.u_hat(x, v)?;
            Ok(-dot(&u_hat_v, &dv_pow))
        } else {
            // S_{2m} = f_u^T K D_v (...)^{m-1} g
            let w = self.alg.diag(u).apply(&self.alg.conv.apply(&self.alg.diag(v).apply(&pow)));
            let (r_u, th_u) = polar_about(x, u, &self.cfg)?;
            let u_hat_u = self.alg.u_hat_polar(r_u, th_u);
            Ok(dot(&u_hat_u, &w))
        }
    }

    /// T matrix entry: leading pi/(2 sin(pi sigma_own)) delta plus the
    /// odd-length closed chains; `own` is the vortex whose flux appears
    /// first in the argument pair.
    pub fn cal_t(&self, own: Vortex, omega: f64, nu: f64) -> Result<Complex64> {
        let other = own.other();
        let sigma_own = self.cfg.flux(own);
        let g_nu = self.alg.g_hat(nu);
        let y = self.alg.solve_chain(own, &g_nu, self.tol * 1e-2)?;
        let dy = self.alg.diag(other).apply(&y);
        let g_om = self.alg.g_hat(omega);
        let mut value = dot(&g_om, &dy);
        if (omega - nu).abs() < 1e-14 {
            value += PI / (2.0 * (PI * sigma_own).sin());
        }
        Ok(value)
    }

    /// S matrix entry: leading K_{omega-nu}(kappa rho) plus the even-length
    /// closed chains; `first` is the vortex whose flux appears first.
    pub fn cal_s(&self, first: Vortex, omega: f64, nu: f64) -> Result<Complex64> {
        let second = first.other();
        let g_nu = self.alg.g_hat(nu);
        let rhs = self.alg.conv.apply(&self.alg.diag(second).apply(&g_nu));
        let y = self.alg.solve_chain(second, &rhs, self.tol * 1e-2)?;
        let dy = self.alg.diag(first).apply(&y);
        let g_om = self.alg.g_hat(omega);
        let lead = kv_unchecked(
            Complex64::new(omega - nu, 0.0),
            self.z.kappa() * self.cfg.rho(),
            self.tol * 1e-2,
        );
        Ok(lead + dot(&g_om, &dy))
    }

    /// Worst relative residual of the four cut conditions (value and radial
    /// derivative on both cuts) for one channel, measured at the given radii
    /// from each vortex.
    pub fn verify_cut_conditions(&self, ch: ChannelIndex, radii: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1e-300;
        for &r in radii {
            // cut L_a: theta_a = +-pi at (-r, 0); phase alpha
            let up = PlanePoint::with_side(-r, 0.0, CutSide::Upper);
            let dn = PlanePoint::with_side(-r, 0.0, CutSide::Lower);
            let (ju, jd) = (
                Complex64::new(0.0, -PI * self.cfg.alpha()).exp(),
                Complex64::new(0.0, PI * self.cfg.alpha()).exp(),
            );
            let vu = self.psi(ch, &up, Method::Resummed)?;
            let vd = self.psi(ch, &dn, Method::Resummed)?;
            worst = worst.max((ju * vu - jd * vd).norm());
            scale = scale.max(vu.norm());
            // radial derivative with one Richardson level
            let dr = 1e-5 * r;
            let deriv = |p: f64, side: CutSide| -> Result<Complex64> {
                let f = |rr: f64| self.psi(ch, &PlanePoint::with_side(-rr, 0.0, side), Method::Resummed);
                let d1 = (f(p + dr)? - f(p - dr)?) / (2.0 * dr);
                let d2 = (f(p + 0.5 * dr)? - f(p - 0.5 * dr)?) / dr;
                Ok((4.0 * d2 - d1) / 3.0)
            };
            let du = deriv(r, CutSide::Upper)?;
            let dd = deriv(r, CutSide::Lower)?;
            worst = worst.max((ju * du - jd * dd).norm() / (1.0 + du.norm()));

            // cut L_b: theta_b = pi on the lower side at (rho + r, 0)
            let upb = PlanePoint::with_side(self.cfg.rho() + r, 0.0, CutSide::Upper);
            let dnb = PlanePoint::with_side(self.cfg.rho() + r, 0.0, CutSide::Lower);
            let (jub, jdb) = (
                Complex64::new(0.0, -PI * self.cfg.beta()).exp(),
                Complex64::new(0.0, PI * self.cfg.beta()).exp(),
            );
            let bu = self.psi(ch, &upb, Method::Resummed)?;
            let bd = self.psi(ch, &dnb, Method::Resummed)?;
            // theta_b = pi is the lower side: the display pairs
            // e^{-i beta pi} psi|_{theta_b=pi} with e^{+i beta pi} psi|_{theta_b=-pi}
            worst = worst.max((jub * bd - jdb * bu).norm());
            scale = scale.max(bu.norm());
            let derivb = |side: CutSide| -> Result<Complex64> {
                let f = |rr: f64| {
                    self.psi(
                        ch,
                        &PlanePoint::with_side(self.cfg.rho() + rr, 0.0, side),
                        Method::Resummed,
                    )
                };
                let d1 = (f(r + dr)? - f(r - dr)?) / (2.0 * dr);
                let d2 = (f(r + 0.5 * dr)? - f(r - 0.5 * dr)?) / dr;
                Ok((4.0 * d2 - d1) / 3.0)
            };
            let dbu = derivb(CutSide::Upper)?;
            let dbd = derivb(CutSide::Lower)?;
            worst = worst.max((jub * dbd - jdb * dbu).norm() / (1.0 + dbu.norm()));
        }
        Ok(worst / scale.max(1.0))
    }
}

/// Two-radius power fit of the angular modes of a channel function near a
/// vortex, compared against the closed-form coefficients.
#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    /// relative error of the fitted singular coefficient vs Gamma(|nu|)/2 (kappa/2)^{-|nu|}
    pub singular_rel_err: f64,
    /// relative errors of the own-vortex subleading coefficients vs the T entries
    pub t_rel_err: [f64; 2],
    /// relative errors of the other-vortex coefficients vs the S entries
    pub s_rel_err: [f64; 2],
    /// fitted singular coefficient itself
    pub singular_coeff: Complex64,
}

impl Deficiency {
    /// Angular Fourier mode of the gauge-framed channel function on a circle.
    fn circle_mode(
        &self,
        ch: ChannelIndex,
        about: Vortex,
        r: f64,
        mode: i32,
        n_samples: usize,
    ) -> Result<Complex64> {
        let sigma = self.cfg.flux(about);
        let (cx, cy) = self.cfg.center(about);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n_samples {
            let th = -PI + (k as f64 + 0.5) * 2.0 * PI / n_samples as f64;
            // build the point from the polar angle in this vortex frame
            let (dx, dy) = match about {
                Vortex::A => (r * th.cos(), r * th.sin()),
                // theta_b measured from the direction toward a
                Vortex::B => (-r * th.cos(), -r * th.sin()),
            };
            let x = PlanePoint::new(cx + dx, cy + dy);
            let (_, th_chk) = polar_about(&x, about, &self.cfg)?;
            let v = self.psi(ch, &x, Method::Resummed)?;
            // gauge-frame: divide the sigma-fractional phase out
            acc += v * Complex64::new(0.0, -(sigma + mode as f64) * th_chk).exp();
        }
        Ok(acc / n_samples as f64)
    }

    /// Complex least squares with explicit power columns over the radii.
    fn power_lsq(radii: &[f64], values: &[Complex64], powers: &[f64]) -> Vec<Complex64> {
        let n = powers.len();
        let mut g = vec![0.0f64; n * n];
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for (&r, &v) in radii.iter().zip(values.iter()) {
            let cols: Vec<f64> = powers.iter().map(|&p| r.powf(p)).collect();
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] += cols[i] * cols[j];
                }
                b[i] += cols[i] * v;
            }
        }
        // equilibrated Gauss-Jordan
        let scale: Vec<f64> = (0..n).map(|i| g[i * n + i].sqrt().max(1e-300)).collect();
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = g[i * n + j] / (scale[i] * scale[j]);
            }
            b[i] /= scale[i];
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))
                .unwrap();
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r * n + col] / a[col * n + col];
                    for j in 0..n {
                        a[r * n + j] -= f * a[col * n + j];
                    }
                    b[r] = b[r] - f * b[col];
                }
            }
        }
        (0..n).map(|i| b[i] / a[i * n + i] / scale[i]).collect()
    }

    /// Fit the near-vortex expansion at both vortices and compare with the
    /// S/T coefficients. `radii` are the outer and inner fitting radii; a
    /// geometric midpoint provides the third sample that pins the r^{2-e}
    /// curvature correction of the Macdonald terms.
    pub fn asymptotic_check(&self, ch: ChannelIndex, radii: (f64, f64)) -> Result<AsymptoticReport> {
        let (r1, r2) = radii;
        if !(r1 > r2 && r2 > 0.0 && r1 / r2 >= 2.0) {
            return Err(Error::FitIllConditioned("radii must decrease by 2x+".into()));
        }
        let rs = [r1, (r1 * r2).sqrt(), r2];
        let u = ch.vortex;
        let v = u.other();
        let cfg = &self.cfg;
        let nu = ch.nu(cfg);
        let omega_u = ch.omega(cfg);
        let kap = self.z.kappa();
        let n_samp = 64;

        // own vortex: modes nu and mu_other relative to the gauge frame
        let mode_of = |order: f64| -> i32 { (order - omega_u).round() as i32 };
        let m_nu = mode_of(nu);
        let mu_other = if nu == omega_u { omega_u - 1.0 } else { omega_u };
        let m_mu = mode_of(mu_other);

        let e = nu.abs();
        if e < 0.02 || (1.0 - e) < 0.02 {
            return Err(Error::FitIllConditioned("power exponent too small".into()));
        }
        let mut vals = Vec::new();
        for &r in &rs {
            vals.push(self.circle_mode(ch, u, r, m_nu, n_samp)?);
        }
        let sol = Self::power_lsq(&rs, &vals, &[-e, e, 2.0 - e]);
        let (c_minus, c_plus) = (sol[0], sol[1]);
        let singular_want = 0.5 * gamma_real(e) * (kap / 2.0).powf(-e);
        let singular_rel_err = (c_minus - singular_want).norm() / singular_want.norm();

        // own-vortex subleading in the nu-mode is the T_{nu,nu} term
        let t_nn = self.cal_t(u, nu, nu)?;
        let coeff_t_nn = -(PI * e).sin() / PI * gamma_real(1.0 - e) / e * (kap / 2.0).powf(e) * t_nn;
        let t_err_diag = (c_plus - coeff_t_nn).norm() / coeff_t_nn.norm().max(1e-12);

        // own-vortex other mode: power r^{|mu|} with its curvature column
        let em = mu_other.abs();
        let mut qvals = Vec::new();
        for &r in &rs {
            qvals.push(self.circle_mode(ch, u, r, m_mu, n_samp)?);
        }
        let qsol = Self::power_lsq(&rs, &qvals, &[em, 2.0 - em]);
        let t_mn = self.cal_t(u, mu_other, nu)?;
        let coeff_t_mn = -(PI * em).sin() / PI * gamma_real(1.0 - em) / em * (kap / 2.0).powf(em) * t_mn;
        let t_err_off = (qsol[0] - coeff_t_mn).norm() / coeff_t_mn.norm().max(1e-12);

        // other vortex: both modes are single powers with S coefficients
        let omega_v = cfg.flux(v);
        let mut s_rel_err = [0.0f64; 2];
        for (slot, mu) in [(0usize, omega_v - 1.0), (1usize, omega_v)] {
            let m = (mu - omega_v).round() as i32;
            let mut svals = Vec::new();
            for &r in &rs {
                svals.push(self.circle_mode(ch, v, r, m, n_samp)?);
            }
            let ee = mu.abs();
            let ssol = Self::power_lsq(&rs, &svals, &[ee, 2.0 - ee]);
            let s_entry = self.cal_s(u, mu, nu)?;
            let want = (PI * ee).sin() / PI * gamma_real(1.0 - ee) / ee * (kap / 2.0).powf(ee) * s_entry;
            s_rel_err[slot] = (ssol[0] - want).norm() / want.norm().max(1e-12);
        }

        Ok(AsymptoticReport {
            singular_rel_err,
            t_rel_err: [t_err_diag, t_err_off],
            s_rel_err,
            singular_coeff: c_minus,
        })
    }

    /// 4x4 matrix of fitted singular coefficients (rows: channels, columns:
    /// the four singular slots), the numerical witness of dim N(z) = 4.
    /// Returns the matrix and an estimate of its condition number.
    pub fn independence_matrix(&self, r_fit: (f64, f64)) -> Result<([[Complex64; 4]; 4], f64)> {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        let (r1, r2) = r_fit;
        for ch in ChannelIndex::ALL {
            let row = ch.flat();
            for (col_base, about) in [(0usize, Vortex::A), (2usize, Vortex::B)] {
                let omega = self.cfg.flux(about);
                for (off, mu) in [(0usize, omega - 1.0), (1usize, omega)] {
                    let mode = (mu - omega).round() as i32;
                    let e = mu.abs();
                    let p1 = self.circle_mode(ch, about, r1, mode, 48)?;
                    let p2 = self.circle_mode(ch, about, r2, mode, 48)?;
                    let det = r1.powf(-e) * r2.powf(e) - r2.powf(-e) * r1.powf(e);
                    let c_minus = (p1 * r2.powf(e) - p2 * r1.powf(e)) / det;
                    m[row][col_base + off] = c_minus;
                }
            }
        }
        // condition estimate through the 4x4 inverse
        let inv = crate::krein::invert4(&m).ok_or(Error::KreinMatrixSingular { det: 0.0 })?;
        let norm = |a: &[[Complex64; 4]; 4]| -> f64 {
            a.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
        };
        Ok((m, norm(&m) * norm(&inv)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> Deficiency {
        let z = Energy::new(Complex64::new(0.0, 1.0)).unwrap();
        let cfg = VortexPair::new(1.0 / 3.0, 2.0 / 3.0, 1.0).unwrap();
        Deficiency::new(z, &cfg, 1e-10).unwrap()
    }

    #[test]
    fn series_matches_resummed() {
        let d = setup();
        let x = PlanePoint::new(0.3, 0.2);
        for ch in ChannelIndex::ALL {
            let series = d.psi(ch, &x, Method::Series(12)).unwrap();
            let closed = d.psi(ch, &x, Method::Resummed).unwrap();
            assert!(
                (series - closed).norm() < 1e-8,
                "{:?}: {}",
                ch,
                (series - closed).norm()
            );
        }
    }

    #[test]
    fn vanishes_at_complementary_vortex() {
        let d = setup();
        let b = PlanePoint::new(1.0, 0.0);
        let a = PlanePoint::new(0.0, 0.0);
        for ch in ChannelIndex::ALL {
            let other = match ch.vortex {
                Vortex::A => &b,
                Vortex::B => &a,
            };
            let v = d.psi(ch, other, Method::Resummed).unwrap();
            assert!(v.norm() < 1e-8, "{:?}: |psi| = {}", ch, v.norm());
        }
    }

    #[test]
    fn own_vortex_rejected() {
        let d = setup();
        let a = PlanePoint::new(0.0, 0.0);
        let ch = ChannelIndex { vortex: Vortex::A, kind: NuKind::Lower };
        assert!(matches!(
            d.psi(ch, &a, Method::Resummed),
            Err(Error::AtVortex(_))
        ));
    }

    #[test]
    fn neighbor_vortex_delta_limit_consistency() {
        // S_1(a, nu, z; b) = -S_0(a, nu, z; b) through the delta limit
        let d = setup();
        let b = PlanePoint::new(1.0, 0.0);
        let ch = ChannelIndex { vortex: Vortex::A, kind: NuKind::Lower };
        let s0 = d.s_term(0, ch, &b).unwrap();
        let s1 = d.s_term(1, ch, &b).unwrap();
        assert!(
            (s0 + s1).norm() < 1e-8 * s0.norm(),
            "{}",
            (s0 + s1).norm() / s0.norm()
        );
    }

    #[test]
    fn geometric_tail() {
        let d = setup();
        let x = PlanePoint::new(0.3, 0.2);
        let ch = ChannelIndex { vortex: Vortex::A, kind: NuKind::Upper };
        let q = (-2.0 * d.z().kappa().re * d.cfg().rho()).exp();
        let s2 = d.s_term(2, ch, &x).unwrap().norm();
        let s4 = d.s_term(4, ch, &x).unwrap().norm();
        let s6 = d.s_term(6, ch, &x).unwrap().norm();
        assert!(s4 / s2 <= q * 1.05, "{} vs {}", s4 / s2, q);
        assert!(s6 / s4 <= q * 1.05);
    }
}
