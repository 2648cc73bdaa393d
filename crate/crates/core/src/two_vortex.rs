//! Two-vortex spinless Green function: free term with winding phases, one
//! correction integral per vortex, and the alternating chain sum evaluated
//! as matrix chains on the shared lattice. Also the near-vortex coefficient
//! series built from the same chains.

use crate::error::{Error, Result};
use crate::geometry::{polar_about, winding_factors, PlanePoint, Vortex, VortexPair, VORTEX_EPS};
use crate::quadrature::{dot, flux_factor, l2_norm, ChainAlgebra};
use crate::special::{kv_unchecked, Energy};
use num_complex::Complex64;
use std::f64::consts::PI;

/// One alternating chain: length n >= 2 and the letter at the evaluation
/// point (c_n); the x0-side letter c_1 follows from the alternation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainSpec {
    pub n: usize,
    pub start: Vortex,
}

impl ChainSpec {
    pub fn new(n: usize, start: Vortex) -> Result<Self> {
        if n < 2 {
            return Err(Error::IncompatibleGrid);
        }
        Ok(Self { n, start })
    }

    /// Letter at the x0 end (c_1).
    pub fn end(&self) -> Vortex {
        if self.n % 2 == 1 {
            self.start
        } else {
            self.start.other()
        }
    }
}

/// How the chain series is truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationPolicy {
    /// sum chains of length <= n_max
    Fixed(usize),
    /// stop once the geometric tail bound drops below tol * leading scale
    Adaptive { tail_tol: f64 },
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy::Adaptive { tail_tol: 1e-10 }
    }
}

/// Cached x0-side data: the grown chain vectors and the point profiles used
/// by the single-vortex correction terms.
#[derive(Debug, Clone)]
pub struct ChainSource {
    point: PlanePoint,
    /// q vectors per family (index 0 = family ending at A, 1 = B); q[m-1] is
    /// the order-m vector
    q: [Vec<Vec<Complex64>>; 2],
    /// x0 profiles about each vortex with the e^{-theta tau} factor folded
    prof_neg: [Vec<Complex64>; 2],
    theta0: [f64; 2],
    /// geometric bound on the dropped chain tail (per unit point profile)
    tail_bound: f64,
}

impl ChainSource {
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }
}

/// Two-vortex evaluator: owns the kernel algebra for (z, cfg).
#[derive(Debug, Clone)]
pub struct TwoVortex {
    z: Energy,
    cfg: VortexPair,
    tol: f64,
    pub alg: ChainAlgebra,
}

impl TwoVortex {
    pub fn new(z: Energy, cfg: &VortexPair, tol: f64) -> Result<Self> {
        let alg = ChainAlgebra::new(z, cfg, tol)?;
        Ok(Self { z, cfg: *cfg, tol, alg })
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

    fn vortex_index(v: Vortex) -> usize {
        match v {
            Vortex::A => 0,
            Vortex::B => 1,
        }
    }

    /// Letter of the order-m vector in the family ending at `e`.
    fn letter(e: Vortex, m: usize) -> Vortex {
        if m % 2 == 1 {
            e
        } else {
            e.other()
        }
    }

    /// Grow the x0-side chain vectors up to the policy's horizon.
    pub fn source(&self, x0: &PlanePoint, pol: TruncationPolicy) -> Result<ChainSource> {
        let mut prof_neg: [Vec<Complex64>; 2] = [Vec::new(), Vec::new()];
        let mut theta0 = [0.0f64; 2];
        for v in [Vortex::A, Vortex::B] {
            let (r, th) = polar_about(x0, v, &self.cfg)?;
            theta0[Self::vortex_index(v)] = th;
            prof_neg[Self::vortex_index(v)] = self.alg.grid.point_profile(r, -th);
        }
        let q_link = (-self.z.kappa().re * self.cfg.rho()).exp();
        let (n_cap, tail_tol) = match pol {
            TruncationPolicy::Fixed(n) => (n, 0.0),
            TruncationPolicy::Adaptive { tail_tol } => (400usize, tail_tol),
        };
        let mut q: [Vec<Vec<Complex64>>; 2] = [Vec::new(), Vec::new()];
        let mut tail_bound = f64::INFINITY;
        for e in [Vortex::A, Vortex::B] {
            let ei = Self::vortex_index(e);
            let seed_plain = self.alg.diag(e).apply(&self.alg.grid.hat(&prof_neg[ei]));
            q[ei].push(seed_plain);
            let mut m = 1usize;
            loop {
                if m >= n_cap {
                    break;
                }
                let next_letter = Self::letter(e, m + 1);
                let kq = self.alg.conv.apply(&q[ei][m - 1]);
                let nq = self.alg.diag(next_letter).apply(&kq);
                q[ei].push(nq);
                m += 1;
                // geometric certificate: one K D link contracts by q_link
                let level = l2_norm(&q[ei][m - 1]);
                let bound = level * q_link / (1.0 - q_link);
                if matches!(pol, TruncationPolicy::Adaptive { .. }) && bound <= tail_tol {
                    tail_bound = bound.min(tail_bound);
                    break;
                }
                if m >= n_cap {
                    tail_bound = bound.min(tail_bound);
                    break;
                }
            }
            if matches!(pol, TruncationPolicy::Fixed(_)) {
                let level = l2_norm(q[ei].last().unwrap());
                tail_bound = tail_bound.min(level * q_link / (1.0 - q_link));
            }
        }
        Ok(ChainSource { point: *x0, q, prof_neg, theta0, tail_bound })
    }

    /// Full Green function.
    pub fn green(&self, x: &PlanePoint, x0: &PlanePoint, pol: TruncationPolicy) -> Result<Complex64> {
        let src = self.source(x0, pol)?;
        self.green_from_source(x, &src)
    }

    /// Green function against a cached x0 side.
    pub fn green_from_source(&self, x: &PlanePoint, src: &ChainSource) -> Result<Complex64> {
        if x.dist(&src.point) < VORTEX_EPS {
            return Err(Error::CoincidentPoints);
        }
        let w = winding_factors(x, &src.point, &self.cfg)?;
        let kap = self.z.kappa();
        let dist = x.dist(&src.point);
        let free = kv_unchecked(Complex64::new(0.0, 0.0), kap * dist, self.tol * 1e-2) / (2.0 * PI);
        let mut value = w.zeta_a * w.zeta_b * free;

        // single-vortex correction integrals
        for v in [Vortex::A, Vortex::B] {
            if self.cfg.is_degenerate(v) {
                continue;
            }
            let vi = Self::vortex_index(v);
            let sigma = self.cfg.flux(v);
            let (zeta, eta) = match v {
                Vortex::A => (w.zeta_a, w.eta_a),
                Vortex::B => (w.zeta_b, w.eta_b),
            };
            let (r, th) = polar_about(x, v, &self.cfg)?;
            let px = self.alg.grid.point_profile(r, th);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.alg.grid.len() {
                let t = self.alg.grid.nodes()[j];
                acc += self.alg.grid.weights()[j]
                    * px[j]
                    * src.prof_neg[vi][j]
                    * (-eta * t).exp()
                    * flux_factor(sigma, t);
            }
            // flux_factor already carries sin(pi sigma)/pi; the display's
            // sin(pi sigma)/(2 pi^2) leaves a single 1/(2 pi) here.
            value -= zeta * acc / (2.0 * PI);
        }

        // chain sum
        let u_hat_a = self.alg.u_hat(x, Vortex::A)?;
        let u_hat_b = self.alg.u_hat(x, Vortex::B)?;
        for e in [Vortex::A, Vortex::B] {
            let ei = Self::vortex_index(e);
            for (mi, qm) in src.q[ei].iter().enumerate() {
                let n = mi + 1;
                if n < 2 {
                    continue;
                }
                let u = match Self::letter(e, n) {
                    Vortex::A => &u_hat_a,
                    Vortex::B => &u_hat_b,
                };
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                value += sign / (2.0 * PI) * dot(u, qm);
            }
        }
        Ok(value)
    }

    /// A single chain contribution (the n-dimensional integral for one
    /// alternating sequence), via n-1 matrix applications.
    pub fn chain_term(
        &self,
        spec: ChainSpec,
        x: &PlanePoint,
        x0: &PlanePoint,
    ) -> Result<Complex64> {
        let src = self.source(x0, TruncationPolicy::Fixed(spec.n))?;
        let e = spec.end();
        let ei = Self::vortex_index(e);
        if src.q[ei].len() < spec.n {
            return Err(Error::NonConvergent(0.0));
        }
        let u = self.alg.u_hat(x, spec.start)?;
        debug_assert_eq!(Self::letter(e, spec.n), spec.start);
        let sign = if spec.n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign / (2.0 * PI) * dot(&u, &src.q[ei][spec.n - 1]))
    }

    /// Near-vortex coefficient series L_nu(x0) for nu in {alpha-1, alpha}:
    /// leading Macdonald term plus all chains whose evaluation-point letter
    /// is `a`, with the first kernel order shifted by nu.
    pub fn l_coefficient(
        &self,
        nu: f64,
        x0: &PlanePoint,
        pol: TruncationPolicy,
    ) -> Result<Complex64> {
        let src = self.source(x0, pol)?;
        self.l_coefficient_from_source(nu, &src)
    }

    pub fn l_coefficient_from_source(&self, nu: f64, src: &ChainSource) -> Result<Complex64> {
        let kap = self.z.kappa();
        let (r0a, th0a) = (
            src.point.dist(&PlanePoint::new(0.0, 0.0)),
            src.theta0[0],
        );
        let mut value = kv_unchecked(Complex64::new(nu.abs(), 0.0), kap * r0a, self.tol * 1e-2)
            * Complex64::new(0.0, -nu * th0a).exp();
        let g_hat = self.alg.g_hat(nu);
        for e in [Vortex::A, Vortex::B] {
            let ei = Self::vortex_index(e);
            for (mi, qm) in src.q[ei].iter().enumerate() {
                let m = mi + 1;
                // chains with c_n = a have the adjacent letter b at position m = n-1
                if Self::letter(e, m) != Vortex::B {
                    continue;
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                value += sign * dot(&g_hat, qm);
            }
        }
        Ok(value)
    }
}
