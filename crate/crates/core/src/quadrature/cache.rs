//! Optional binary cache for (grid, convolution kernel) pairs keyed by
//! (z, rho, tol, N). A corrupted file is detected by checksum and reported
//! as a miss so the caller rebuilds; it can never produce wrong numbers.

use super::{DiscreteKernel, KernelKind, TauGrid};
use crate::geometry::VortexPair;
use crate::special::Energy;
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"ABKR";
const VERSION: u32 = 1;

fn key_name(z: Energy, rho: f64, tol: f64, n: usize) -> String {
    let mut h = Sha256::new();
    h.update(z.z().re.to_le_bytes());
    h.update(z.z().im.to_le_bytes());
    h.update(rho.to_le_bytes());
    h.update(tol.to_le_bytes());
    h.update((n as u64).to_le_bytes());
    let d = h.finalize();
    format!("kernel-{:02x}{:02x}{:02x}{:02x}{:02x}{:02x}{:02x}{:02x}.bin",
        d[0], d[1], d[2], d[3], d[4], d[5], d[6], d[7])
}

fn payload(grid: &TauGrid, kernel: &DiscreteKernel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&grid.z().z().re.to_le_bytes());
    out.extend_from_slice(&grid.z().z().im.to_le_bytes());
    out.extend_from_slice(&grid.rho().to_le_bytes());
    out.extend_from_slice(&grid.tol().to_le_bytes());
    out.extend_from_slice(&grid.step().to_le_bytes());
    out.extend_from_slice(&(grid.len() as u64).to_le_bytes());
    for t in kernel.offsets() {
        out.extend_from_slice(&t.re.to_le_bytes());
        out.extend_from_slice(&t.im.to_le_bytes());
    }
    out
}

/// Write the kernel for the given grid into `dir`.
pub fn store(dir: &Path, grid: &TauGrid, kernel: &DiscreteKernel) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let body = payload(grid, kernel);
    let mut hasher = Sha256::new();
    hasher.update(&body);
    let digest = hasher.finalize();
    let path = dir.join(key_name(grid.z(), grid.rho(), grid.tol(), grid.len()));
    let mut f = std::fs::File::create(&path)?;
    f.write_all(MAGIC)?;
    f.write_all(&VERSION.to_le_bytes())?;
    f.write_all(&(body.len() as u64).to_le_bytes())?;
    f.write_all(&digest)?;
    f.write_all(&body)?;
    Ok(path)
}

/// Try to load a cached (grid, kernel) pair. Returns None on any mismatch,
/// version change, or checksum failure.
pub fn load(
    dir: &Path,
    z: Energy,
    cfg: &VortexPair,
    tol: f64,
    n: usize,
) -> Option<(TauGrid, DiscreteKernel)> {
    let path = dir.join(key_name(z, cfg.rho(), tol, n));
    let mut f = std::fs::File::open(path).ok()?;
    let mut head = [0u8; 4];
    f.read_exact(&mut head).ok()?;
    if &head != MAGIC {
        return None;
    }
    let mut v4 = [0u8; 4];
    f.read_exact(&mut v4).ok()?;
    if u32::from_le_bytes(v4) != VERSION {
        return None;
    }
    let mut len8 = [0u8; 8];
    f.read_exact(&mut len8).ok()?;
    let body_len = u64::from_le_bytes(len8) as usize;
    let mut digest = [0u8; 32];
    f.read_exact(&mut digest).ok()?;
    let mut body = vec![0u8; body_len];
    f.read_exact(&mut body).ok()?;
    let mut hasher = Sha256::new();
    hasher.update(&body);
    if hasher.finalize().as_slice() != digest {
        return None;
    }

    let rd_f64 = |b: &[u8], at: usize| f64::from_le_bytes(b[at..at + 8].try_into().unwrap());
    if body.len() < 48 {
        return None;
    }
    let z_re = rd_f64(&body, 0);
    let z_im = rd_f64(&body, 8);
    let rho = rd_f64(&body, 16);
    let tol_s = rd_f64(&body, 24);
    let step = rd_f64(&body, 32);
    let n_s = u64::from_le_bytes(body[40..48].try_into().unwrap()) as usize;
    if z_re != z.z().re || z_im != z.z().im || rho != cfg.rho() || tol_s != tol || n_s != n {
        return None;
    }
    if body.len() != 48 + 16 * n {
        return None;
    }
    let energy = Energy::new(Complex64::new(z_re, z_im)).ok()?;
    let grid = TauGrid::from_lattice(energy, rho, tol_s, step, (n - 1) / 2);
    let mut offsets = Vec::with_capacity(n);
    for m in 0..n {
        let at = 48 + 16 * m;
        offsets.push(Complex64::new(rd_f64(&body, at), rd_f64(&body, at + 8)));
    }
    let kernel = DiscreteKernel {
        kind: KernelKind::Convolution,
        fingerprint: grid.fingerprint(),
        n,
        offsets,
        diag: Vec::new(),
        sqrt_w: grid.sqrt_w().iter().map(|&w| Complex64::new(w, 0.0)).collect(),
    };
    Some((grid, kernel))
}
