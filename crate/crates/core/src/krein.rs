//! Rescaled deficiency basis, inner-product matrix, the 2x2 correction
//! matrices for both spin components, and the spin-1/2 Green functions
//! assembled from the spinless one by a rank-two update.

use crate::deficiency::{ChannelIndex, Deficiency, Method, NuKind};
use crate::error::{Error, Result};
use crate::geometry::{PlanePoint, Vortex, VortexPair, VORTEX_EPS};
use crate::quadrature::integrate_square;
use crate::special::Energy;
use crate::two_vortex::{ChainSource, TruncationPolicy, TwoVortex};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Spin projection of the Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Plus,
    Minus,
}

/// Tables of the asymptotic matrix entries at one spectral parameter.
/// Index convention: 0 = lower order (omega - 1), 1 = upper (omega).
#[derive(Debug, Clone)]
pub struct StTables {
    /// T_{mu,nu}(alpha, beta; z); both indices alpha-type
    pub t_a: [[Complex64; 2]; 2],
    /// T_{mu,nu}(beta, alpha; z); both indices beta-type
    pub t_b: [[Complex64; 2]; 2],
    /// S_{omega,nu}(alpha, beta; z); rows beta-type, cols alpha-type
    pub s_ab: [[Complex64; 2]; 2],
    /// S_{omega,nu}(beta, alpha; z); rows alpha-type, cols beta-type
    pub s_ba: [[Complex64; 2]; 2],
}

impl Deficiency {
    /// All sixteen asymptotic-matrix entries, reusing the channel solves.
    pub fn st_tables(&self) -> Result<StTables> {
        let cfg = self.cfg();
        let orders = |v: Vortex| [cfg.flux(v) - 1.0, cfg.flux(v)];
        let mut t_a = [[Complex64::new(0.0, 0.0); 2]; 2];
        let mut t_b = t_a;
        let mut s_ab = t_a;
        let mut s_ba = t_a;
        for (i, &mu) in orders(Vortex::A).iter().enumerate() {
            for (j, &nu) in orders(Vortex::A).iter().enumerate() {
                t_a[i][j] = self.cal_t(Vortex::A, mu, nu)?;
            }
        }
        for (i, &mu) in orders(Vortex::B).iter().enumerate() {
            for (j, &nu) in orders(Vortex::B).iter().enumerate() {
                t_b[i][j] = self.cal_t(Vortex::B, mu, nu)?;
            }
        }
        for (i, &om) in orders(Vortex::B).iter().enumerate() {
            for (j, &nu) in orders(Vortex::A).iter().enumerate() {
                s_ab[i][j] = self.cal_s(Vortex::A, om, nu)?;
            }
        }
        for (i, &om) in orders(Vortex::A).iter().enumerate() {
            for (j, &nu) in orders(Vortex::B).iter().enumerate() {
                s_ba[i][j] = self.cal_s(Vortex::B, om, nu)?;
            }
        }
        Ok(StTables { t_a, t_b, s_ab, s_ba })
    }
}

/// 2x2 reduced correction matrix with its embedding into the flat 4x4.
#[derive(Debug, Clone)]
pub struct KreinMatrix {
    pub spin: Spin,
    pub m_red: [[Complex64; 2]; 2],
}

impl KreinMatrix {
    /// Flat indices the reduced block occupies.
    pub fn embedding(&self) -> [usize; 2] {
        match self.spin {
            Spin::Plus => [0, 2],
            Spin::Minus => [1, 3],
        }
    }

    /// Full 4x4 matrix with the complementary rows and columns zero.
    pub fn full(&self) -> [[Complex64; 4]; 4] {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        let e = self.embedding();
        for i in 0..2 {
            for j in 0..2 {
                m[e[i]][e[j]] = self.m_red[i][j];
            }
        }
        m
    }
}

/// 4x4 Gram matrix of the rescaled basis.
#[derive(Debug, Clone)]
pub struct InnerProductMatrix {
    pub p: [[Complex64; 4]; 4],
}

pub fn invert2(m: &[[Complex64; 2]; 2]) -> Result<([[Complex64; 2]; 2], f64)> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-14 * scale * scale {
        return Err(Error::KreinMatrixSingular { det: det.norm() });
    }
    let inv = [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ];
    Ok((inv, det.norm()))
}

/// Gauss-Jordan inverse of a 4x4 complex matrix with partial pivoting.
pub fn invert4(m: &[[Complex64; 4]; 4]) -> Option<[[Complex64; 4]; 4]> {
    let mut a = *m;
    let mut inv = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if a[r][col].norm() > a[piv][col].norm() {
                piv = r;
            }
        }
        if a[piv][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..4 {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for j in 0..4 {
                    a[r][j] = a[r][j] - f * a[col][j];
                    inv[r][j] = inv[r][j] - f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

pub fn mat4_mul(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, bk) in b.iter().enumerate() {
                acc += a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat4_fro(a: &[[Complex64; 4]; 4]) -> f64 {
    a.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Reduced-matrix builder from the tables at one spectral parameter.
fn m_red_from_tables(
    spin: Spin,
    kap: Complex64,
    cfg: &VortexPair,
    t: &StTables,
) -> Result<KreinMatrix> {
    let (alpha, beta) = (cfg.alpha(), cfg.beta());
    let a = match spin {
        Spin::Plus => {
            let p11 = kap.powf(2.0 - 2.0 * alpha) * t.t_a[0][0];
            let p12 = -kap.powf(2.0 - alpha - beta) * t.s_ab[0][0];
            let p21 = -kap.powf(2.0 - alpha - beta) * t.s_ba[0][0];
            let p22 = kap.powf(2.0 - 2.0 * beta) * t.t_b[0][0];
            [[p11, p12], [p21, p22]]
        }
        Spin::Minus => {
            let p11 = kap.powf(2.0 * alpha) * t.t_a[1][1];
            let p12 = -kap.powf(alpha + beta) * t.s_ab[1][1];
            let p21 = -kap.powf(alpha + beta) * t.s_ba[1][1];
            let p22 = kap.powf(2.0 * beta) * t.t_b[1][1];
            [[p11, p12], [p21, p22]]
        }
    };
    let (inv, _det) = invert2(&a)?;
    let m_red = [
        [inv[0][0] / (2.0 * PI), inv[0][1] / (2.0 * PI)],
        [inv[1][0] / (2.0 * PI), inv[1][1] / (2.0 * PI)],
    ];
    Ok(KreinMatrix { spin, m_red })
}

/// Krein-layer evaluator: deficiency data at z and conj(z), the spinless
/// Green function, and the asymptotic tables at both parameters.
pub struct Krein {
    z: Energy,
    cfg: VortexPair,
    tol: f64,
    pub def: Deficiency,
    pub def_bar: Deficiency,
    pub tables: StTables,
    pub tables_bar: StTables,
    pub tv: TwoVortex,
}

impl Krein {
    pub fn new(z: Energy, cfg: &VortexPair, tol: f64) -> Result<Self> {
        let def = Deficiency::new(z, cfg, tol)?;
        let def_bar = Deficiency::new(z.conj(), cfg, tol)?;
        let tables = def.st_tables()?;
        let tables_bar = def_bar.st_tables()?;
        let tv = TwoVortex::new(z, cfg, tol)?;
        Ok(Self { z, cfg: *cfg, tol, def, def_bar, tables, tables_bar, tv })
    }

    pub fn z(&self) -> Energy {
        self.z
    }

    pub fn cfg(&self) -> VortexPair {
        self.cfg
    }

    /// Reduced correction matrix at z.
    pub fn m_red(&self, spin: Spin) -> Result<KreinMatrix> {
        m_red_from_tables(spin, self.z.kappa(), &self.cfg, &self.tables)
    }

    /// Reduced correction matrix at conj(z) (for the adjoint relation).
    pub fn m_red_bar(&self, spin: Spin) -> Result<KreinMatrix> {
        m_red_from_tables(spin, self.z.conj().kappa(), &self.cfg, &self.tables_bar)
    }

    /// Rescaled basis exponents |nu_j| in the flat order.
    pub fn exponents(&self) -> [f64; 4] {
        let mut e = [0.0; 4];
        for ch in ChannelIndex::ALL {
            e[ch.flat()] = ch.nu(&self.cfg).abs();
        }
        e
    }

    /// f_z^j(x) = kappa^{|nu_j|} psi_j(x).
    pub fn basis_value(&self, j: usize, x: &PlanePoint) -> Result<Complex64> {
        let ch = ChannelIndex::from_flat(j);
        let e = ch.nu(&self.cfg).abs();
        Ok(self.z.kappa_pow(e) * self.def.psi(ch, x, Method::Resummed)?)
    }

    /// conj(f_{conj z}^k(x0)) used by the Green-function assembly.
    pub fn basis_value_bar_conj(&self, k: usize, x0: &PlanePoint) -> Result<Complex64> {
        let ch = ChannelIndex::from_flat(k);
        let e = ch.nu(&self.cfg).abs();
        let v = self.def_bar.psi(ch, x0, Method::Resummed)?;
        Ok((self.z.conj().kappa_pow(e) * v).conj())
    }

    /// Pauli Green function for one spin component.
    pub fn pauli_green(
        &self,
        spin: Spin,
        x: &PlanePoint,
        x0: &PlanePoint,
        pol: TruncationPolicy,
    ) -> Result<Complex64> {
        let g = self.tv.green(x, x0, pol)?;
        let m = self.m_red(spin)?;
        let idx = m.embedding();
        let mut corr = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                corr += m.m_red[i][j]
                    * self.basis_value(idx[i], x)?
                    * self.basis_value_bar_conj(idx[j], x0)?;
            }
        }
        Ok(g + corr)
    }

    /// Pauli Green evaluation against a cached x0 side (grid sweeps).
    pub fn pauli_green_from_source(
        &self,
        spin: Spin,
        x: &PlanePoint,
        src: &ChainSource,
        basis_bar_at_x0: &[Complex64; 4],
    ) -> Result<Complex64> {
        let g = self.tv.green_from_source(x, src)?;
        let m = self.m_red(spin)?;
        let idx = m.embedding();
        let mut corr = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                corr += m.m_red[i][j] * self.basis_value(idx[i], x)? * basis_bar_at_x0[idx[j]];
            }
        }
        Ok(g + corr)
    }

    /// Norm squared of psi_j from the closed T formula.
    pub fn psi_norm_sq(&self, ch: ChannelIndex) -> Result<f64> {
        let im_z = self.z.z().im;
        if im_z == 0.0 {
            return Err(Error::RealSpectralParameter);
        }
        let e = ch.nu(&self.cfg).abs();
        let t = match (ch.vortex, ch.kind) {
            (Vortex::A, NuKind::Lower) => self.tables.t_a[0][0],
            (Vortex::A, NuKind::Upper) => self.tables.t_a[1][1],
            (Vortex::B, NuKind::Lower) => self.tables.t_b[0][0],
            (Vortex::B, NuKind::Upper) => self.tables.t_b[1][1],
        };
        let kap = self.z.kappa();
        let ratio = (kap / kap.conj()).powf(e);
        Ok(-(2.0 * PI / im_z) * (ratio * t).im)
    }
}

/// Exponent table for the kappa powers of P(z, w), in the flat order.
fn p_exponents(cfg: &VortexPair) -> [f64; 4] {
    [
        1.0 - cfg.alpha(),
        cfg.alpha(),
        1.0 - cfg.beta(),
        cfg.beta(),
    ]
}

/// X table lookup for the entry (j, k) of the P display: the same-vortex
/// blocks carry T, the cross blocks carry S with a minus sign.
fn p_entry_tables(
    cfg: &VortexPair,
    tabs: &StTables,
    j: usize,
    k: usize,
) -> (Complex64, f64) {
    let _ = cfg;
    let (row_v, ri) = (j / 2, j % 2);
    let (col_v, ci) = (k / 2, k % 2);
    match (row_v, col_v) {
        (0, 0) => (tabs.t_a[ri][ci], 1.0),
        (1, 1) => (tabs.t_b[ri][ci], 1.0),
        // row a, col b: S_{nu_col(b-type), mu_row(a-type)}(alpha, beta)
        (0, 1) => (tabs.s_ab[ci][ri], -1.0),
        // row b, col a: S_{nu_col(a-type), mu_row(b-type)}(beta, alpha)
        _ => (tabs.s_ba[ci][ri], -1.0),
    }
}

/// Inner-product matrix P(z, w)^{jk} = <f_z^j, f_w^k> from the closed-form
/// display; `kz` is the Krein data at z, `kw` at w.
pub fn p_matrix(kz: &Krein, kw: &Krein) -> Result<InnerProductMatrix> {
    let zbar = kz.z().z().conj();
    let w = kw.z().z();
    let diff = zbar - w;
    if diff.norm() < 1e-12 {
        return Err(Error::CoincidentSpectralParameters(diff.norm()));
    }
    let kap_zbar = kz.z().conj().kappa();
    let kap_w = kw.z().kappa();
    let e = p_exponents(&kz.cfg());
    let mut p = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (j, pj) in p.iter_mut().enumerate() {
        for (k, pjk) in pj.iter_mut().enumerate() {
            let (x_zbar, sign) = p_entry_tables(&kz.cfg(), &kz.tables_bar, j, k);
            let (x_w, _) = p_entry_tables(&kw.cfg(), &kw.tables, j, k);
            let pow = e[j] + e[k];
            let term = kap_zbar.powf(pow) * x_zbar - kap_w.powf(pow) * x_w;
            *pjk = -2.0 * PI * sign * term / diff;
        }
    }
    Ok(InnerProductMatrix { p })
}

/// Gram matrix P(z, z): diagonal from the norm formula, off-diagonal from
/// the closed form at w = z (conj z != z off the real axis).
pub fn p_matrix_diag(kz: &Krein) -> Result<InnerProductMatrix> {
    if kz.z().z().im == 0.0 {
        return Err(Error::RealSpectralParameter);
    }
    let mut p = p_matrix(kz, kz)?;
    let kap = kz.z().kappa();
    for ch in ChannelIndex::ALL {
        let j = ch.flat();
        let e = ch.nu(&kz.cfg()).abs();
        let fac = kap.powf(e).norm_sqr();
        p.p[j][j] = Complex64::new(fac * kz.psi_norm_sq(ch)?, 0.0);
    }
    Ok(p)
}

/// Closed-form zero mode of the Pauli operator.
pub fn zero_mode(spin: Spin, cfg: &VortexPair, x: &PlanePoint) -> Result<Complex64> {
    let (alpha, beta, rho) = (cfg.alpha(), cfg.beta(), cfg.rho());
    let zeta = Complex64::new(x.x1, x.x2);
    let zmb = zeta - rho;
    if zeta.norm() < VORTEX_EPS || zmb.norm() < VORTEX_EPS {
        return Err(Error::AtVortex(zeta.norm().min(zmb.norm())));
    }
    match spin {
        Spin::Plus => {
            if alpha + beta >= 1.0 {
                return Err(Error::FluxSumIncompatible);
            }
            Ok(zeta.norm().powf(alpha) * zmb.norm().powf(beta) / (zeta * zmb))
        }
        Spin::Minus => {
            if alpha + beta <= 1.0 {
                return Err(Error::FluxSumIncompatible);
            }
            Ok(Complex64::new(
                1.0 / (zeta.norm().powf(alpha) * zmb.norm().powf(beta)),
                0.0,
            ))
        }
    }
}

impl Krein {
    /// Residual of f_w + (z-w) integral G_z(x,y) f_w(y) dy = f_z at x, with
    /// the y side evaluated through the conjugate-parameter source.
    pub fn resolvent_identity_check(
        &self,
        ch: ChannelIndex,
        kw: &Krein,
        x: &PlanePoint,
        radius: f64,
        quad_tol: f64,
    ) -> Result<f64> {
        let j = ch.flat();
        let f_w_x = kw.basis_value(j, x)?;
        let f_z_x = self.basis_value(j, x)?;
        if (self.z.z() - kw.z().z()).norm() < 1e-15 {
            return Ok((f_w_x - f_z_x).norm());
        }
        let decay = self.z.kappa().re + kw.z().kappa().re;
        let margin = radius - (x.x1 * x.x1 + x.x2 * x.x2).sqrt() - self.cfg.rho() - 1.0;
        let tail = 8.0 * (-decay * margin).exp();
        if tail > quad_tol {
            return Err(Error::TailNotNegligible { tail, tol: quad_tol });
        }
        // G_z(x, y) = conj(G_{conj z}(y, x)); cache the x side at conj z.
        let tv_bar = TwoVortex::new(self.z.conj(), &self.cfg, self.tol)?;
        let src = tv_bar.source(x, TruncationPolicy::Adaptive { tail_tol: self.tol })?;
        let f = |y1: f64, y2: f64| {
            let y = PlanePoint::new(y1, y2);
            let g = tv_bar
                .green_from_source(&y, &src)
                .or_else(|_| {
                    tv_bar.green_from_source(&PlanePoint::new(y1 + 1e-12, y2 + 1e-12), &src)
                })
                .map(|v| v.conj())
                .unwrap_or(Complex64::new(0.0, 0.0));
            let fv = kw.basis_value(j, &y).unwrap_or(Complex64::new(0.0, 0.0));
            g * fv
        };
        let (integral, _) = integrate_square(&f, radius, quad_tol, 1e-5, 400_000)?;
        let lhs = f_w_x + (self.z.z() - kw.z().z()) * integral - f_z_x;
        Ok(lhs.norm())
    }
}
