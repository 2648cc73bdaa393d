//! Numerical extraction of the four boundary functionals near a vortex,
//! singular-coefficient fits of the local expansion, and classification of
//! self-adjoint boundary conditions by matrix pairs.

use crate::error::{Error, Result};
use crate::geometry::{PlanePoint, Vortex, VortexPair};
use num_complex::Complex64;
use std::f64::consts::PI;

/// The four functional values (Phi_1^{-1}, Phi_2^{-1}, Phi_1^0, Phi_2^0)
/// with fit diagnostics.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub phi_1_m1: Complex64,
    pub phi_2_m1: Complex64,
    pub phi_1_0: Complex64,
    pub phi_2_0: Complex64,
    /// radii used by the fit
    pub radii: Vec<f64>,
    /// worst cross-radius fit residual, relative to the data scale
    pub residual: f64,
    pub reliable: bool,
}

/// Coefficients of the local expansion
/// c0 r^{-a} + d0 r^{a} + (c_m1 r^{-1+a} + d_m1 r^{1-a}) e^{-i theta}.
#[derive(Debug, Clone)]
pub struct SingularCoefficients {
    pub c0: Complex64,
    pub d0: Complex64,
    pub c_m1: Complex64,
    pub d_m1: Complex64,
    pub residual: f64,
}

/// Boundary-condition pair (A1, A2) with D = diag(1-a, a).
#[derive(Debug, Clone)]
pub struct ExtensionSpec {
    pub a1: [[Complex64; 2]; 2],
    pub a2: [[Complex64; 2]; 2],
    pub alpha: f64,
}

/// Result of validating an extension spec.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Valid,
    Invalid(String),
}

const N_THETA: usize = 256;

/// Angular Fourier mode of f on the circle of radius r about the vortex:
/// mean of f(r, theta) e^{-i mode theta}. The angle is the vortex-frame
/// angle (theta_a standard, theta_b measured toward a).
fn circle_mode<F>(
    f: &F,
    vortex: Vortex,
    cfg: &VortexPair,
    r: f64,
    mode: i32,
) -> Result<Complex64>
where
    F: Fn(&PlanePoint) -> Result<Complex64>,
{
    let (cx, cy) = cfg.center(vortex);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..N_THETA {
        let th = -PI + (k as f64 + 0.5) * 2.0 * PI / N_THETA as f64;
        let (dx, dy) = match vortex {
            Vortex::A => (r * th.cos(), r * th.sin()),
            Vortex::B => (-r * th.cos(), -r * th.sin()),
        };
        let x = PlanePoint::new(cx + dx, cy + dy);
        acc += f(&x)? * Complex64::new(0.0, -(mode as f64) * th).exp();
    }
    Ok(acc / N_THETA as f64)
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::RadiiTooCoarse);
    }
    let max = radii.iter().cloned().fold(0.0f64, f64::max);
    let min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || max / min < 10.0 {
        return Err(Error::RadiiTooCoarse);
    }
    Ok(())
}

/// Least-squares fit of mode values m(r) = A r^{-p} + B r^{p} + C r^{q}
/// over the radii; the third column absorbs the leading smooth contaminant
/// (a constant for the 0 mode, a linear term for the -1 mode), so regular
/// functions report clean zeros. Returns (A, B, absolute residual).
fn power_fit(
    radii: &[f64],
    values: &[Complex64],
    p: f64,
    q: f64,
) -> Result<(Complex64, Complex64, f64)> {
    if p < 0.02 || (p - q).abs() < 0.02 || (p + q).abs() < 0.02 {
        return Err(Error::FitIllConditioned(format!("exponents {p}, {q} not separated")));
    }
    let cols = |r: f64| [r.powf(-p), r.powf(p), r.powf(q)];
    // normal equations for the 3-column design
    let mut g = [[0.0f64; 3]; 3];
    let mut b = [Complex64::new(0.0, 0.0); 3];
    for (&r, &v) in radii.iter().zip(values.iter()) {
        let c = cols(r);
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += c[i] * c[j];
            }
            b[i] += c[i] * v;
        }
    }
    // scale-equilibrated Gaussian elimination
    let mut scale_d = [0.0f64; 3];
    for i in 0..3 {
        scale_d[i] = g[i][i].sqrt().max(1e-300);
    }
    let mut a = [[0.0f64; 3]; 3];
    let mut rhs = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = g[i][j] / (scale_d[i] * scale_d[j]);
        }
        rhs[i] = b[i] / scale_d[i];
    }
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-13 {
            return Err(Error::FitIllConditioned("powers not separated by radii".into()));
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for j in 0..3 {
                    a[r][j] -= f * a[col][j];
                }
                rhs[r] = rhs[r] - f * rhs[col];
            }
        }
    }
    let sol = [
        rhs[0] / a[0][0] / scale_d[0],
        rhs[1] / a[1][1] / scale_d[1],
        rhs[2] / a[2][2] / scale_d[2],
    ];
    let mut resid: f64 = 0.0;
    for (&r, &v) in radii.iter().zip(values.iter()) {
        let c = cols(r);
        let model = sol[0] * c[0] + sol[1] * c[1] + sol[2] * c[2];
        resid = resid.max((v - model).norm());
    }
    Ok((sol[0], sol[1], resid))
}

/// Boundary functionals of a point-evaluable function near a vortex. The
/// function must be single-valued near the vortex (gauge frame), so the
/// circle projections are spectrally accurate.
pub fn phi_functionals<F>(
    f: &F,
    vortex: Vortex,
    flux: f64,
    cfg: &VortexPair,
    radii: &[f64],
) -> Result<BoundaryData>
where
    F: Fn(&PlanePoint) -> Result<Complex64>,
{
    check_radii(radii)?;
    let mut m0 = Vec::with_capacity(radii.len());
    let mut m_m1 = Vec::with_capacity(radii.len());
    for &r in radii {
        m0.push(circle_mode(f, vortex, cfg, r, 0)?);
        m_m1.push(circle_mode(f, vortex, cfg, r, -1)?);
    }
    let (phi_1_0, phi_2_0, r0) = power_fit(radii, &m0, flux, 0.0)?;
    let (phi_1_m1, phi_2_m1, r1) = power_fit(radii, &m_m1, 1.0 - flux, 1.0)?;
    // reliability relative to the data scale across both modes
    let scale = m0
        .iter()
        .chain(m_m1.iter())
        .map(|v| v.norm())
        .fold(1e-300, f64::max);
    let r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let norm = scale * r_min.powf(-flux.max(1.0 - flux)).max(1.0);
    let residual = (r0.max(r1)) / norm;
    Ok(BoundaryData {
        phi_1_m1,
        phi_2_m1,
        phi_1_0,
        phi_2_0,
        radii: radii.to_vec(),
        residual,
        reliable: residual < 1e-3,
    })
}

/// Lemma-form coefficients of a cut-respecting function psi near a vortex:
/// the gauge phase e^{i flux theta} is divided out first, then the same
/// two-power machinery runs on the modes 0 and -1.
pub fn fit_singular_coefficients<F>(
    psi: &F,
    vortex: Vortex,
    flux: f64,
    cfg: &VortexPair,
    radii: &[f64],
) -> Result<SingularCoefficients>
where
    F: Fn(&PlanePoint) -> Result<Complex64>,
{
    check_radii(radii)?;
    // gauge-framed function in the vortex frame
    let framed = |x: &PlanePoint| -> Result<Complex64> {
        let (_, th) = crate::geometry::polar_about(x, vortex, cfg)?;
        Ok(psi(x)? * Complex64::new(0.0, -flux * th).exp())
    };
    let mut m0 = Vec::with_capacity(radii.len());
    let mut m_m1 = Vec::with_capacity(radii.len());
    for &r in radii {
        m0.push(circle_mode(&framed, vortex, cfg, r, 0)?);
        m_m1.push(circle_mode(&framed, vortex, cfg, r, -1)?);
    }
    let (c0, d0, r0) = power_fit(radii, &m0, flux, 0.0)?;
    let (c_m1, d_m1, r1) = power_fit(radii, &m_m1, 1.0 - flux, 1.0)?;
    let scale = m0
        .iter()
        .chain(m_m1.iter())
        .map(|v| v.norm())
        .fold(1e-300, f64::max);
    Ok(SingularCoefficients { c0, d0, c_m1, d_m1, residual: r0.max(r1) / scale })
}

fn mat_scale(m: &[[Complex64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
}

/// rank of the 2x4 block (A1, A2) through the Gram eigenvalues.
fn rank_2x4(a1: &[[Complex64; 2]; 2], a2: &[[Complex64; 2]; 2], tol: f64) -> usize {
    // rows of the 2x4 matrix
    let rows = [
        [a1[0][0], a1[0][1], a2[0][0], a2[0][1]],
        [a1[1][0], a1[1][1], a2[1][0], a2[1][1]],
    ];
    let g00: f64 = rows[0].iter().map(|v| v.norm_sqr()).sum();
    let g11: f64 = rows[1].iter().map(|v| v.norm_sqr()).sum();
    let g01: Complex64 = rows[0]
        .iter()
        .zip(rows[1].iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    // eigenvalues of [[g00, g01],[conj g01, g11]]
    let tr = g00 + g11;
    let det = g00 * g11 - g01.norm_sqr();
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let (l1, l2) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let scale = l1.max(1e-300);
    (l1 > tol * scale) as usize + (l2 > tol * scale) as usize
}

impl ExtensionSpec {
    pub fn new(a1: [[Complex64; 2]; 2], a2: [[Complex64; 2]; 2], alpha: f64) -> Result<Self> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(Error::FluxOutOfRange(alpha));
        }
        Ok(Self { a1, a2, alpha })
    }

    fn d_inv(&self) -> [f64; 2] {
        [1.0 / (1.0 - self.alpha), 1.0 / self.alpha]
    }

    /// A D^{-1} B^* for 2x2 blocks.
    fn sandwich(&self, a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let d = self.d_inv();
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &dk) in d.iter().enumerate() {
                    acc += a[i][k] * dk * b[j][k].conj();
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

/// Validate the two structural conditions: rank (A1, A2) = 2 and
/// A1 D^{-1} A2^* = A2 D^{-1} A1^*.
pub fn classify_extension(spec: &ExtensionSpec) -> Classification {
    let rank = rank_2x4(&spec.a1, &spec.a2, 1e-12);
    if rank < 2 {
        return Classification::Invalid(format!("rank(A1,A2) = {rank}"));
    }
    let lhs = spec.sandwich(&spec.a1, &spec.a2);
    let rhs = spec.sandwich(&spec.a2, &spec.a1);
    let mut resid: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            resid = resid.max((lhs[i][j] - rhs[i][j]).norm());
        }
    }
    let scale = mat_scale(&spec.a1).max(mat_scale(&spec.a2)).powi(2) + 1e-300;
    if resid > 1e-10 * scale.max(1.0) {
        return Classification::Invalid(format!("symmetry residual {resid:.3e}"));
    }
    Classification::Valid
}

/// Do two specs define the same boundary condition? Exactly when the row
/// spaces of the 2x4 blocks coincide, i.e. stacking them stays rank 2.
pub fn same_condition(s1: &ExtensionSpec, s2: &ExtensionSpec) -> bool {
    let rows = |s: &ExtensionSpec| {
        [
            [s.a1[0][0], s.a1[0][1], s.a2[0][0], s.a2[0][1]],
            [s.a1[1][0], s.a1[1][1], s.a2[1][0], s.a2[1][1]],
        ]
    };
    let mut stack: Vec<[Complex64; 4]> = Vec::new();
    stack.extend_from_slice(&rows(s1));
    stack.extend_from_slice(&rows(s2));
    // Gram-Schmidt rank of the 4x4 stack
    let mut basis: Vec<[Complex64; 4]> = Vec::new();
    for row in stack {
        let mut v = row;
        for b in &basis {
            let proj: Complex64 = b.iter().zip(v.iter()).map(|(a, x)| a.conj() * x).sum();
            for k in 0..4 {
                v[k] -= proj * b[k];
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    basis.len() == 2
}

/// Which extension a boundary-data vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedExtension {
    H0,
    HPlus,
    HMinus,
}

/// Membership report: the two relevant functional residuals.
#[derive(Debug, Clone)]
pub struct Membership {
    pub is_in: bool,
    pub residuals: [f64; 2],
}

pub fn check_domain_membership(
    bd: &BoundaryData,
    which: NamedExtension,
    tol: f64,
) -> Result<Membership> {
    if !bd.reliable {
        return Err(Error::UnreliableBoundaryData(bd.residual));
    }
    let pair = match which {
        NamedExtension::H0 => [bd.phi_1_m1, bd.phi_1_0],
        NamedExtension::HPlus => [bd.phi_2_m1, bd.phi_1_0],
        NamedExtension::HMinus => [bd.phi_1_m1, bd.phi_2_0],
    };
    let scale = [
        bd.phi_1_m1.norm(),
        bd.phi_2_m1.norm(),
        bd.phi_1_0.norm(),
        bd.phi_2_0.norm(),
        1.0,
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    let residuals = [pair[0].norm() / scale, pair[1].norm() / scale];
    Ok(Membership { is_in: residuals[0] < tol && residuals[1] < tol, residuals })
}
