//! Plane geometry for the two-vortex configuration: dual polar coordinates
//! with cuts L_a = (-inf,0)x{0} and L_b = (rho,+inf)x{0}, and the winding
//! phase factors attached to a pair of points.
//!
//! Angle conventions. theta_a is the standard polar angle about a = (0,0),
//! so its branch jump lies on L_a. theta_b is measured from the direction
//! pointing from b toward a, increasing counterclockwise, so its branch jump
//! lies on L_b; the upper side of L_b carries theta_b = -pi, the lower side
//! +pi. With these choices every spectral integrand carries an exponent
//! theta_u - theta_0u - eta_u confined to (-pi, pi) and the correction
//! integrals converge.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Distance below which a point counts as sitting at a vortex.
pub const VORTEX_EPS: f64 = 1e-14;
/// Band around cut endpoints inside which segment classification is refused.
pub const CUT_BAND: f64 = 1e-12;
/// Fluxes closer to {0, 1} than this are treated as removed vortices.
pub const DEGENERATE_FLUX_EPS: f64 = 1e-6;

/// Which vortex a quantity is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Vortex {
    A,
    B,
}

impl Vortex {
    pub fn other(self) -> Self {
        match self {
            Vortex::A => Vortex::B,
            Vortex::B => Vortex::A,
        }
    }
}

/// Side tag for points lying exactly on a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutSide {
    Upper,
    Lower,
}

/// Flux pair and vortex separation; a = (0,0), b = (rho, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VortexPair {
    alpha: f64,
    beta: f64,
    rho: f64,
}

impl VortexPair {
    pub fn new(alpha: f64, beta: f64, rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::FluxOutOfRange(alpha));
        }
        if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
            return Err(Error::FluxOutOfRange(beta));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::DegenerateSeparation);
        }
        Ok(Self { alpha, beta, rho })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn flux(&self, v: Vortex) -> f64 {
        match v {
            Vortex::A => self.alpha,
            Vortex::B => self.beta,
        }
    }

    pub fn center(&self, v: Vortex) -> (f64, f64) {
        match v {
            Vortex::A => (0.0, 0.0),
            Vortex::B => (self.rho, 0.0),
        }
    }

    /// Flux sin(pi sigma) = 0 up to the degeneracy band: the vortex is
    /// effectively removed and its diagonal kernel is the zero operator.
    pub fn is_degenerate(&self, v: Vortex) -> bool {
        let s = self.flux(v);
        s.min(1.0 - s) < DEGENERATE_FLUX_EPS
    }
}

/// Cartesian point with an optional side tag for on-cut evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    pub x1: f64,
    pub x2: f64,
    side: Option<CutSide>,
}

impl PlanePoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2, side: None }
    }

    pub fn with_side(x1: f64, x2: f64, side: CutSide) -> Self {
        Self { x1, x2, side: Some(side) }
    }

    pub fn side(&self) -> Option<CutSide> {
        self.side
    }

    pub fn dist(&self, other: &PlanePoint) -> f64 {
        ((self.x1 - other.x1).powi(2) + (self.x2 - other.x2).powi(2)).sqrt()
    }

    fn on_axis(&self) -> bool {
        self.x2 == 0.0
    }

    fn on_cut(&self, cfg: &VortexPair) -> Option<Vortex> {
        if !self.on_axis() {
            return None;
        }
        if self.x1 < 0.0 {
            Some(Vortex::A)
        } else if self.x1 > cfg.rho() {
            Some(Vortex::B)
        } else {
            None
        }
    }

    /// Signed side of the real axis, resolving exact zeros through the tag.
    /// Points on the closed segment between the vortices count as "no side"
    /// (0); a tagged zero elsewhere uses its tag.
    fn axis_sign(&self, cfg: &VortexPair) -> Result<f64> {
        if self.x2 > 0.0 {
            return Ok(1.0);
        }
        if self.x2 < 0.0 {
            return Ok(-1.0);
        }
        match (self.on_cut(cfg), self.side) {
            (Some(_), Some(CutSide::Upper)) => Ok(1.0),
            (Some(_), Some(CutSide::Lower)) => Ok(-1.0),
            (Some(_), None) => Err(Error::DegenerateSegment),
            (None, _) => Ok(0.0),
        }
    }
}

/// Polar coordinates (r, theta) about the requested vortex with the cut
/// conventions described at module level.
pub fn polar_about(x: &PlanePoint, center: Vortex, cfg: &VortexPair) -> Result<(f64, f64)> {
    let (cx, cy) = cfg.center(center);
    let dx = x.x1 - cx;
    let dy = x.x2 - cy;
    let r = (dx * dx + dy * dy).sqrt();
    if r < VORTEX_EPS {
        return Err(Error::AtVortex(r));
    }
    let theta = match center {
        Vortex::A => {
            if x.on_cut(cfg) == Some(Vortex::A) {
                match x.side {
                    Some(CutSide::Upper) => PI,
                    Some(CutSide::Lower) => -PI,
                    None => return Err(Error::DegenerateSegment),
                }
            } else {
                dy.atan2(dx)
            }
        }
        Vortex::B => {
            if x.on_cut(cfg) == Some(Vortex::B) {
                match x.side {
                    Some(CutSide::Upper) => -PI,
                    Some(CutSide::Lower) => PI,
                    None => return Err(Error::DegenerateSegment),
                }
            } else {
                let phi = dy.atan2(dx);
                if phi > 0.0 {
                    phi - PI
                } else if phi < 0.0 {
                    phi + PI
                } else {
                    // phi = +-pi (direction toward a) maps to 0
                    0.0
                }
            }
        }
    };
    Ok((r, theta))
}

/// Winding phases for the pair (x, x0): which cut the segment crosses and
/// from which side, mapped to (zeta, eta) with zeta = e^{i flux eta}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingFactors {
    pub zeta_a: Complex64,
    pub zeta_b: Complex64,
    pub eta_a: f64,
    pub eta_b: f64,
}

impl WindingFactors {
    fn none() -> Self {
        Self {
            zeta_a: Complex64::new(1.0, 0.0),
            zeta_b: Complex64::new(1.0, 0.0),
            eta_a: 0.0,
            eta_b: 0.0,
        }
    }
}

pub fn winding_factors(x: &PlanePoint, x0: &PlanePoint, cfg: &VortexPair) -> Result<WindingFactors> {
    let s1 = x.axis_sign(cfg)?;
    let s0 = x0.axis_sign(cfg)?;

    if s0 * s1 >= 0.0 {
        // Same half-plane, or at least one endpoint on the closed segment
        // between the vortices: no cut is crossed. Both endpoints exactly on
        // the axis off the segment was already rejected by axis_sign unless
        // tagged; tagged same-side pairs are fine.
        if s0 == 0.0 && s1 == 0.0 && (x.on_axis() && x0.on_axis()) {
            // both strictly inside the neutral segment: no crossing
            return Ok(WindingFactors::none());
        }
        return Ok(WindingFactors::none());
    }

    // Opposite sides: the segment crosses the real axis exactly once.
    if (x.x2 - x0.x2).abs() == 0.0 {
        return Err(Error::DegenerateSegment);
    }
    // Crossing abscissa; tagged zeros contribute their untagged coordinate.
    let t = -x0.x2 / (x.x2 - x0.x2);
    let xc = x0.x1 + t * (x.x1 - x0.x1);
    if (xc - 0.0).abs() < CUT_BAND || (xc - cfg.rho()).abs() < CUT_BAND {
        return Err(Error::DegenerateSegment);
    }

    let mut w = WindingFactors::none();
    if xc < 0.0 {
        // crosses L_a; sign by x0's half-plane (lower -> +2pi)
        w.eta_a = if s0 < 0.0 { 2.0 * PI } else { -2.0 * PI };
        w.zeta_a = Complex64::new(0.0, cfg.alpha() * w.eta_a).exp();
    } else if xc > cfg.rho() {
        // crosses L_b; sign by x0's half-plane (upper -> +2pi)
        w.eta_b = if s0 > 0.0 { 2.0 * PI } else { -2.0 * PI };
        w.zeta_b = Complex64::new(0.0, cfg.beta() * w.eta_b).exp();
    }
    Ok(w)
}

/// Polar coordinates about the origin for the single-vortex configuration
/// (cut along the negative axis, tag resolution on it).
pub fn polar_single_vortex(x: &PlanePoint) -> Result<(f64, f64)> {
    let r = (x.x1 * x.x1 + x.x2 * x.x2).sqrt();
    if r < VORTEX_EPS {
        return Err(Error::AtVortex(r));
    }
    let theta = if x.x2 == 0.0 && x.x1 < 0.0 {
        match x.side() {
            Some(CutSide::Upper) => PI,
            Some(CutSide::Lower) => -PI,
            None => return Err(Error::DegenerateSegment),
        }
    } else {
        x.x2.atan2(x.x1)
    };
    Ok((r, theta))
}

/// Winding classification for the single-vortex cut (the negative axis):
/// (zeta, eta) with zeta = e^{i alpha eta}, eta in {0, 2pi, -2pi}.
pub fn winding_single_vortex(
    x: &PlanePoint,
    x0: &PlanePoint,
    alpha: f64,
) -> Result<(Complex64, f64)> {
    let sign = |p: &PlanePoint| -> Result<f64> {
        if p.x2 > 0.0 {
            Ok(1.0)
        } else if p.x2 < 0.0 {
            Ok(-1.0)
        } else if p.x1 < 0.0 {
            match p.side() {
                Some(CutSide::Upper) => Ok(1.0),
                Some(CutSide::Lower) => Ok(-1.0),
                None => Err(Error::DegenerateSegment),
            }
        } else {
            Ok(0.0)
        }
    };
    let s1 = sign(x)?;
    let s0 = sign(x0)?;
    if s0 * s1 >= 0.0 {
        return Ok((Complex64::new(1.0, 0.0), 0.0));
    }
    if (x.x2 - x0.x2).abs() == 0.0 {
        return Err(Error::DegenerateSegment);
    }
    let t = -x0.x2 / (x.x2 - x0.x2);
    let xc = x0.x1 + t * (x.x1 - x0.x1);
    if xc.abs() < CUT_BAND {
        return Err(Error::DegenerateSegment);
    }
    if xc < 0.0 {
        let eta = if s0 < 0.0 { 2.0 * PI } else { -2.0 * PI };
        Ok((Complex64::new(0.0, alpha * eta).exp(), eta))
    } else {
        Ok((Complex64::new(1.0, 0.0), 0.0))
    }
}
