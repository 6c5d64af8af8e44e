//! Jacobi elliptic functions for real argument and modulus `0 ≤ ρ ≤ 1`.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// `sn`, `cn`, `dn` by descending Landen transformation.
pub fn jacobi_elliptic(z: f64, rho: f64) -> Result<JacobiTriple> {
    if !(0.0..=1.0).contains(&rho) || !z.is_finite() {
        return Err(invalid(format!(
            "jacobi_elliptic needs finite z and 0 <= rho <= 1, got z={z}, rho={rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(JacobiTriple {
            sn: z.sin(),
            cn: z.cos(),
            dn: 1.0,
        });
    }
    let kp0 = ((1.0 - rho) * (1.0 + rho)).sqrt();
    if kp0 == 0.0 {
        let sech = 1.0 / z.cosh();
        return Ok(JacobiTriple {
            sn: z.tanh(),
            cn: sech,
            dn: sech,
        });
    }
    let mut ks = Vec::with_capacity(8);
    let mut k = rho;
    let mut kp = kp0;
    let mut zz = z;
    while k > 1e-15 && ks.len() < 64 {
        let k1 = (1.0 - kp) / (1.0 + kp);
        kp = 2.0 * kp.sqrt() / (1.0 + kp);
        zz /= 1.0 + k1;
        ks.push(k1);
        k = k1;
    }
    let (mut sn, mut cn) = zz.sin_cos();
    let mut dn = 1.0 - 0.5 * k * k * sn * sn;
    for &k1 in ks.iter().rev() {
        let s2 = sn * sn;
        let den = 1.0 + k1 * s2;
        let sn_next = (1.0 + k1) * sn / den;
        cn = cn * dn / den;
        dn = (1.0 - k1 * s2) / den;
        sn = sn_next;
    }
    Ok(JacobiTriple { sn, cn, dn })
}

pub fn jacobi_sn(z: f64, rho: f64) -> Result<f64> {
    jacobi_elliptic(z, rho).map(|t| t.sn)
}

/// Carlson symmetric integral `R_F(x, y, z)` by duplication.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..100 {
        let mu = (x + y + z) / 3.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let l = sx * (sy + sz) + sy * sz;
        x = (x + l) / 4.0;
        y = (y + l) / 4.0;
        z = (z + l) / 4.0;
    }
    f64::NAN
}

/// Incomplete elliptic integral of the first kind `F(φ, ρ)` for `|φ| ≤ π/2`.
pub fn elliptic_f(phi: f64, rho: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    s * carlson_rf(c * c, 1.0 - rho * rho * s * s, 1.0)
}

/// Real `z ∈ [0, K]` with `sn²(z, ρ) = ξ`, for `0 ≤ ξ ≤ 1`.
pub fn z_from_xi(xi: f64, rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) || !(0.0..1.0).contains(&rho) {
        return Err(invalid(format!(
            "z_from_xi needs 0 <= xi <= 1 and 0 <= rho < 1, got xi={xi}, rho={rho}"
        )));
    }
    Ok(elliptic_f(xi.sqrt().asin(), rho))
}
