//! Gauss–Jacobi rules on (0, 1) and trapezoidal contour integrals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, LameError, Result};

/// Nodes and weights for `∫₀¹ (1-t)^a t^b f(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobiRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `P_n^{(a,b)}(x)` and its derivative by the three-term recurrence.
fn jacobi_and_derivative(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c0 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let p2 = (c1 * p1 - c2 * p0) / c0;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let s = 2.0 * nf + a + b;
    let dp = (nf * ((a - b) - s * x) * p1 + 2.0 * (nf + a) * (nf + b) * p0) / (s * (1.0 - x * x));
    (p1, dp)
}

impl GaussJacobiRule {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Gauss–Jacobi rule needs at least one node"));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(invalid(format!(
                "Gauss–Jacobi exponents must exceed -1, got a={a}, b={b}"
            )));
        }
        // Golub–Welsch on [-1, 1] for the weight (1-x)^a (1+x)^b.
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let s = 2.0 * kf + a + b;
            jm[(k, k)] = if k == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                (b * b - a * a) / (s * (s + 2.0))
            };
            if k + 1 < n {
                let j = kf + 1.0;
                let s = 2.0 * j + a + b;
                let off2 = if k == 0 {
                    // (j+a+b)/(s-1) = 1 at j = 1
                    4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0))
                } else {
                    4.0 * j * (j + a) * (j + b) * (j + a + b) / (s * s * (s + 1.0) * (s - 1.0))
                };
                let off = off2.sqrt();
                jm[(k, k + 1)] = off;
                jm[(k + 1, k)] = off;
            }
        }
        let eig = SymmetricEigen::new(jm);
        let mut xs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        xs.sort_by(|p, q| p.total_cmp(q));
        let mut raw = Vec::with_capacity(n);
        for x in xs.iter_mut() {
            for _ in 0..4 {
                let (p, dp) = jacobi_and_derivative(n, a, b, *x);
                let step = p / dp;
                *x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = jacobi_and_derivative(n, a, b, *x);
            raw.push(1.0 / ((1.0 - *x * *x) * dp * dp));
        }
        let total: f64 = raw.iter().sum();
        let mu0 = if a == 0.0 {
            1.0 / (b + 1.0)
        } else {
            statrs::function::beta::beta(a + 1.0, b + 1.0)
        };
        let nodes = xs.iter().map(|x| 0.5 * (1.0 + x)).collect();
        let weights = raw.iter().map(|w| w * mu0 / total).collect();
        Ok(Self { a, b, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Points on the circle `|v| = radius` used by [`contour_integral`].
pub fn contour_nodes(m: usize, radius: f64) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / m as f64))
        .collect()
}

/// `(1/2πi) ∮_{|v|=radius} f(v) dv` by the M-point trapezoidal rule.
pub fn contour_integral<F: Fn(Complex64) -> Complex64>(f: F, m: usize, radius: f64) -> Result<Complex64> {
    if m == 0 || !(radius > 0.0) {
        return Err(invalid("contour integral needs M > 0 and a positive radius"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for v in contour_nodes(m, radius) {
        let fv = f(v);
        if !(fv.re.is_finite() && fv.im.is_finite()) {
            return Err(LameError::NonFinite("contour integrand"));
        }
        acc += fv * v;
    }
    Ok(acc / m as f64)
}

/// Radius for a contour that encloses the same poles as the unit circle.
///
/// Returns 1 unless a pole lies within 1e-6 of the unit circle, in which case
/// 0.9 or 1.1 is used, keeping each pole on the side it lies on.
pub fn contour_radius(poles: &[Complex64]) -> Result<f64> {
    const GAP: f64 = 1e-6;
    if poles.iter().all(|p| (p.norm() - 1.0).abs() > GAP) {
        return Ok(1.0);
    }
    for r in [0.9, 1.1] {
        let ok = poles.iter().all(|p| {
            let m = p.norm();
            (m - r).abs() > GAP && ((m < 1.0) == (m < r))
        });
        if ok {
            return Ok(r);
        }
    }
    Err(LameError::PoleOnContour(format!(
        "poles {poles:?} cannot be separated from |v| = 1"
    )))
}

/// One level's pair of rules: `t^{(L-5/2+λ)/2}` and `u^{(L-2+λ)/2}` on (0, 1).
#[derive(Debug, Clone)]
pub struct LevelRule {
    pub t: GaussJacobiRule,
    pub u: GaussJacobiRule,
}

/// Quadrature for the nested level integrals, shared by every evaluation.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub lambda: f64,
    pub nq: usize,
    pub contour_m: usize,
    levels: Vec<LevelRule>,
}

impl QuadratureGrid {
    pub const MIN_NODES: usize = 16;
    pub const MIN_CONTOUR: usize = 128;

    pub fn new(lambda: f64, n_levels: usize, nq: usize, contour_m: usize) -> Result<Self> {
        if nq < Self::MIN_NODES || contour_m < Self::MIN_CONTOUR {
            return Err(invalid(format!(
                "quadrature needs at least {} Gauss nodes and {} contour nodes, got {nq} and {contour_m}",
                Self::MIN_NODES,
                Self::MIN_CONTOUR
            )));
        }
        let levels = (1..=n_levels)
            .map(|l| {
                let lf = l as f64;
                Ok(LevelRule {
                    t: GaussJacobiRule::new(nq, 0.0, (lf - 2.5 + lambda) / 2.0)?,
                    u: GaussJacobiRule::new(nq, 0.0, (lf - 2.0 + lambda) / 2.0)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            lambda,
            nq,
            contour_m,
            levels,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Rule for level `l` (1-based).
    pub fn level(&self, l: usize) -> Result<&LevelRule> {
        l.checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .ok_or_else(|| LameError::IndexOutOfRange(format!("level {l} of {}", self.levels.len())))
    }
}
