//! Shared spectral lattice on the imaginary-order line, Nystrom
//! discretization of the convolution operator K_{i(omega-mu)}(kappa rho) and
//! the diagonal flux operators, and the geometrically convergent resummation
//! of operator chains.
//!
//! The lattice is uniform with trapezoid weights: every integrand here is
//! analytic in a strip whose half-width is set by the poles of
//! 1/sin(pi(sigma + i tau)), so the trapezoid rule converges geometrically,
//! and the convolution kernel becomes Toeplitz (one Macdonald evaluation per
//! lattice offset instead of per matrix entry).

mod adaptive;
pub mod cache;
pub mod disk;

pub use adaptive::{integrate_line, LineDomain, QuadResult};
pub use disk::integrate_square;

use crate::error::{Error, Result};
use crate::geometry::{polar_about, PlanePoint, Vortex, VortexPair};
use crate::special::{kv_profile_half, Energy};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Hard cap on the lattice size.
pub const DEFAULT_GRID_CAP: usize = 4096;

/// sin(pi(sigma + i tau)) without overflow for |tau| within the lattice.
fn sin_pi_shifted(sigma: f64, tau: f64) -> Complex64 {
    let (s, c) = (PI * sigma).sin_cos();
    Complex64::new(s * (PI * tau).cosh(), c * (PI * tau).sinh())
}

/// Diagonal flux factor sin(pi sigma) / (pi sin(pi(sigma + i tau))).
pub fn flux_factor(sigma: f64, tau: f64) -> Complex64 {
    (PI * sigma).sin() / (PI * sin_pi_shifted(sigma, tau))
}

/// Uniform symmetric lattice on [-T, T] with trapezoid weights.
#[derive(Debug, Clone)]
pub struct TauGrid {
    z: Energy,
    rho: f64,
    tol: f64,
    half_width: f64,
    step: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    sqrt_w: Vec<f64>,
    zero_idx: usize,
}

impl TauGrid {
    /// Lattice sized for the given spectral parameter, separation and flux
    /// set: the step resolves the closest diagonal-factor pole, the
    /// half-width reaches the decay floor of the Macdonald envelope.
    pub fn build(z: Energy, rho: f64, fluxes: &[f64], tol: f64) -> Result<Self> {
        Self::build_with_cap(z, rho, fluxes, tol, DEFAULT_GRID_CAP)
    }

    pub fn build_with_cap(
        z: Energy,
        rho: f64,
        fluxes: &[f64],
        tol: f64,
        cap: usize,
    ) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::DegenerateSeparation);
        }
        if !(tol > 0.0) {
            return Err(Error::NonConvergent(f64::NAN));
        }
        // pole distance of the diagonal factors, ignoring removed vortices
        let mut d_pole: f64 = 0.5;
        for &s in fluxes {
            let d = s.min(1.0 - s);
            if d >= crate::geometry::DEGENERATE_FLUX_EPS {
                d_pole = d_pole.min(d);
            }
        }
        // K_{i tau}(kappa r) envelope decay rate
        let kap = z.kappa();
        let rate = PI / 2.0 - kap.im.atan2(kap.re).abs();
        let digits = (1.0 / tol).ln();
        let step = 2.0 * PI * (0.95 * d_pole) / (digits + 9.0);
        let half_width = (digits + 13.0) / rate;
        let m = (half_width / step).ceil() as usize;
        let n = 2 * m + 1;
        if n > cap {
            return Err(Error::GridBudgetExceeded { needed: n, cap });
        }
        Ok(Self::from_lattice(z, rho, tol, step, m))
    }

    /// Explicit lattice (step h, nodes at j*h for |j| <= m); used by the
    /// operator-norm study which needs a much wider window than the chains.
    pub fn from_lattice(z: Energy, rho: f64, tol: f64, step: f64, m: usize) -> Self {
        let n = 2 * m + 1;
        let half_width = step * m as f64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            nodes.push((j as f64 - m as f64) * step);
            let w = if j == 0 || j == n - 1 { 0.5 * step } else { step };
            weights.push(w);
        }
        let sqrt_w = weights.iter().map(|w| w.sqrt()).collect();
        Self {
            z,
            rho,
            tol,
            half_width,
            step,
            nodes,
            weights,
            sqrt_w,
            zero_idx: m,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sqrt_w(&self) -> &[f64] {
        &self.sqrt_w
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn z(&self) -> Energy {
        self.z
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Index of the tau = 0 node.
    pub fn zero_idx(&self) -> usize {
        self.zero_idx
    }

    fn profile_tol(&self) -> f64 {
        (self.tol * 1e-2).max(1e-13)
    }

    /// Fingerprint for compatibility checks between grids and kernels.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut eat = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x100000001b3);
        };
        eat(self.z.z().re.to_bits());
        eat(self.z.z().im.to_bits());
        eat(self.rho.to_bits());
        eat(self.step.to_bits());
        eat(self.nodes.len() as u64);
        h
    }

    /// Profile K_{nu + i tau_j}(x) over the whole lattice. The negative half
    /// comes from the evenness K_{nu - i tau} = K_{-nu + i tau}.
    pub fn order_profile(&self, nu: f64, x: Complex64) -> Vec<Complex64> {
        let m = self.zero_idx;
        let tol = self.profile_tol();
        let pos = kv_profile_half(nu, x, self.step, m, tol);
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        if nu == 0.0 {
            for (j, node) in out.iter_mut().enumerate() {
                let k = j.abs_diff(m);
                *node = pos[k];
            }
        } else {
            let neg = kv_profile_half(-nu, x, self.step, m, tol);
            for (j, node) in out.iter_mut().enumerate() {
                if j >= m {
                    *node = pos[j - m];
                } else {
                    *node = neg[m - j];
                }
            }
        }
        out
    }

    /// Profile K_{i tau_j}(kappa r) e^{theta tau_j} about a point with polar
    /// data (r, theta).
    pub fn point_profile(&self, r: f64, theta: f64) -> Vec<Complex64> {
        let x = self.z.kappa() * r;
        let mut prof = self.order_profile(0.0, x);
        for (p, &t) in prof.iter_mut().zip(self.nodes.iter()) {
            *p *= (theta * t).exp();
        }
        prof
    }

    /// Hatted (sqrt-weight scaled) copy of a plain nodal vector.
    pub fn hat(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().zip(self.sqrt_w.iter()).map(|(a, w)| a * *w).collect()
    }
}

/// Kind tag for a discretized operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// convolution kernel K_{i(omega - mu)}(kappa rho)
    Convolution,
    /// diagonal flux factor attached to a vortex
    Diagonal(Vortex),
}

/// Discretized operator on the lattice. The convolution kernel is stored by
/// Toeplitz offsets of the symmetrized matrix sqrt(w_j) K sqrt(w_k); the
/// diagonal operator by its entries.
#[derive(Debug, Clone)]
pub struct DiscreteKernel {
    kind: KernelKind,
    fingerprint: u64,
    n: usize,
    /// Toeplitz offsets m = 0..n-1 for the convolution kind
    offsets: Vec<Complex64>,
    /// diagonal entries for the diagonal kind
    diag: Vec<Complex64>,
    sqrt_w: Vec<Complex64>,
}

impl DiscreteKernel {
    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub(crate) fn offsets(&self) -> &[Complex64] {
        &self.offsets
    }

    /// Matrix entry (j, k) of the symmetrized discretization.
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        match self.kind {
            KernelKind::Convolution => {
                self.sqrt_w[j] * self.offsets[j.abs_diff(k)] * self.sqrt_w[k]
            }
            KernelKind::Diagonal(_) => {
                if j == k {
                    self.diag[j]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Diagonal entries (diagonal kind only).
    pub fn diagonal(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn matches(&self, grid: &TauGrid) -> bool {
        self.fingerprint == grid.fingerprint() && self.n == grid.len()
    }

    /// y = A x.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        match self.kind {
            KernelKind::Diagonal(_) => {
                x.iter().zip(self.diag.iter()).map(|(a, d)| a * d).collect()
            }
            KernelKind::Convolution => {
                let n = self.n;
                let mut scaled: Vec<Complex64> = Vec::with_capacity(n);
                for k in 0..n {
                    scaled.push(self.sqrt_w[k] * x[k]);
                }
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (j, o) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, s) in scaled.iter().enumerate() {
                        acc += self.offsets[j.abs_diff(k)] * s;
                    }
                    *o = acc * self.sqrt_w[j];
                }
                out
            }
        }
    }

    /// Upper bound for the lattice operator norm of the convolution kind:
    /// the maximum modulus of the discrete Fourier symbol
    /// h * sum_m t_m e^{i m h x} over the Brillouin window.
    pub fn symbol_norm_upper(&self, grid: &TauGrid) -> f64 {
        assert_eq!(self.kind, KernelKind::Convolution);
        let h = grid.step();
        // offsets decay like e^{-pi m h / 2}; find the live band
        let mut band = self.offsets.len();
        for (m, t) in self.offsets.iter().enumerate() {
            if m > 4 && t.norm() < 1e-22 * self.offsets[0].norm().max(1e-300) {
                band = m;
                break;
            }
        }
        let samples = 4096;
        let mut best = 0.0f64;
        for q in 0..=samples {
            let x = PI / h * q as f64 / samples as f64;
            let mut sym = self.offsets[0];
            for m in 1..band {
                sym += 2.0 * self.offsets[m] * (m as f64 * h * x).cos();
            }
            best = best.max((h * sym).norm());
        }
        best
    }

    /// Rayleigh-quotient lower bound for the operator norm using the
    /// half-cosine window, the widest smooth vector the lattice supports.
    pub fn rayleigh_norm_lower(&self, grid: &TauGrid) -> f64 {
        assert_eq!(self.kind, KernelKind::Convolution);
        let t = grid.half_width();
        let v: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&tau| Complex64::new((PI * tau / (2.0 * t)).cos(), 0.0))
            .collect();
        let av = self.apply(&v);
        l2_norm(&av) / l2_norm(&v)
    }
}

/// Discretize one of the two operator kinds on the given grid.
pub fn discretize(kind: KernelKind, cfg: &VortexPair, grid: &TauGrid) -> Result<DiscreteKernel> {
    let n = grid.len();
    let sqrt_w: Vec<Complex64> = grid.sqrt_w().iter().map(|&w| Complex64::new(w, 0.0)).collect();
    match kind {
        KernelKind::Convolution => {
            let x = grid.z().kappa() * grid.rho();
            if x.re < crate::special::MIN_RE_ARG {
                return Err(Error::ArgumentLeftHalfPlane(x.re));
            }
            // K_{i m h}(kappa rho), m = 0..n-1; even in the offset.
            let offsets = kv_profile_half(0.0, x, grid.step(), n - 1, grid.tol() * 1e-2);
            Ok(DiscreteKernel {
                kind,
                fingerprint: grid.fingerprint(),
                n,
                offsets,
                diag: Vec::new(),
                sqrt_w,
            })
        }
        KernelKind::Diagonal(v) => {
            let sigma = cfg.flux(v);
            let diag = if cfg.is_degenerate(v) {
                vec![Complex64::new(0.0, 0.0); n]
            } else {
                grid.nodes().iter().map(|&t| flux_factor(sigma, t)).collect()
            };
            Ok(DiscreteKernel {
                kind,
                fingerprint: grid.fingerprint(),
                n,
                offsets: Vec::new(),
                diag,
                sqrt_w,
            })
        }
    }
}

/// The vectors contracted against operator chains: the point-side vector
/// f_{u}(x) (flux factor included) and the separation-side vector g_nu.
#[derive(Debug, Clone)]
pub struct KernelVectors {
    pub f_vec: Vec<Complex64>,
    pub g_vec: Vec<Complex64>,
}

/// Hatted kernel vectors for the channel (u, nu) at the point x.
pub fn kernel_vectors(
    u: Vortex,
    nu: f64,
    x: &PlanePoint,
    cfg: &VortexPair,
    grid: &TauGrid,
) -> Result<KernelVectors> {
    let (r, theta) = polar_about(x, u, cfg)?;
    let sigma = cfg.flux(u);
    let mut f = grid.point_profile(r, theta);
    for (v, &t) in f.iter_mut().zip(grid.nodes().iter()) {
        *v *= flux_factor(sigma, t);
    }
    let g = grid.order_profile(nu, grid.z().kappa() * grid.rho());
    Ok(KernelVectors { f_vec: grid.hat(&f), g_vec: grid.hat(&g) })
}

pub fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Per-(z, cfg) kernel algebra: the convolution kernel, both diagonal
/// operators, and the Neumann resummation with its geometric certificate.
#[derive(Debug, Clone)]
pub struct ChainAlgebra {
    pub grid: TauGrid,
    pub conv: DiscreteKernel,
    pub d_a: DiscreteKernel,
    pub d_b: DiscreteKernel,
    pub cfg: VortexPair,
    /// certified contraction ratio of one double link K D K D
    pub q: f64,
}

impl ChainAlgebra {
    pub fn new(z: Energy, cfg: &VortexPair, tol: f64) -> Result<Self> {
        let fluxes = [cfg.alpha(), cfg.beta()];
        let grid = TauGrid::build(z, cfg.rho(), &fluxes, tol)?;
        Self::on_grid(grid, cfg)
    }

    pub fn on_grid(grid: TauGrid, cfg: &VortexPair) -> Result<Self> {
        let conv = discretize(KernelKind::Convolution, cfg, &grid)?;
        let d_a = discretize(KernelKind::Diagonal(Vortex::A), cfg, &grid)?;
        let d_b = discretize(KernelKind::Diagonal(Vortex::B), cfg, &grid)?;
        let q = (-2.0 * grid.z().kappa().re * grid.rho()).exp();
        Ok(Self { grid, conv, d_a, d_b, cfg: *cfg, q })
    }

    pub fn diag(&self, v: Vortex) -> &DiscreteKernel {
        match v {
            Vortex::A => &self.d_a,
            Vortex::B => &self.d_b,
        }
    }

    /// One double link: y = K D_u K D_v x with v complementary to u.
    pub fn double_link(&self, u: Vortex, x: &[Complex64]) -> Vec<Complex64> {
        let v = u.other();
        let t = self.diag(v).apply(x);
        let t = self.conv.apply(&t);
        let t = self.diag(u).apply(&t);
        self.conv.apply(&t)
    }

    /// Neumann solution of (I - K D_u K D_v) y = rhs with a certified tail:
    /// the iteration stops once the geometric bound on the dropped tail is
    /// below tol * |y|.
    pub fn solve_chain(&self, u: Vortex, rhs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
        if self.q >= 0.999 {
            return Err(Error::ResummationDiverges(self.q));
        }
        let mut y = rhs.to_vec();
        let mut p = rhs.to_vec();
        let cap = 4000usize;
        for _ in 0..cap {
            p = self.double_link(u, &p);
            for (yi, pi) in y.iter_mut().zip(p.iter()) {
                *yi += pi;
            }
            let tail = l2_norm(&p) * self.q / (1.0 - self.q);
            if tail <= tol * l2_norm(&y).max(1e-300) {
                return Ok(y);
            }
        }
        Err(Error::NonConvergent(l2_norm(&p)))
    }

    /// Hatted separation-side vector g_nu.
    pub fn g_hat(&self, nu: f64) -> Vec<Complex64> {
        let g = self
            .grid
            .order_profile(nu, self.grid.z().kappa() * self.grid.rho());
        self.grid.hat(&g)
    }

    /// Hatted point-side profile about a vortex (no flux factor).
    pub fn u_hat(&self, x: &PlanePoint, v: Vortex) -> Result<Vec<Complex64>> {
        let (r, theta) = polar_about(x, v, &self.cfg)?;
        Ok(self.u_hat_polar(r, theta))
    }

    pub fn u_hat_polar(&self, r: f64, theta: f64) -> Vec<Complex64> {
        let prof = self.grid.point_profile(r, theta);
        self.grid.hat(&prof)
    }

    /// Value of a plain (unhatted) continuum vector at tau = 0 given its
    /// hatted samples: used by the delta-limit evaluation at a vortex.
    pub fn at_zero(&self, hatted: &[Complex64]) -> Complex64 {
        let j = self.grid.zero_idx();
        hatted[j] / self.grid.sqrt_w()[j]
    }
}
