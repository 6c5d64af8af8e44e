//! Frobenius series of the Lamé equation in Weierstrass form.
//!
//! With `ξ = sn²(z, ρ)` and `a = ρ⁻²` the equation
//! `y'' = (α(α+1)ρ²sn²z - h) y` becomes
//! `y'' + ½(1/ξ + 1/(ξ-1) + 1/(ξ-a)) y' + (-α(α+1)ξ + h a)/(4ξ(ξ-1)(ξ-a)) y = 0`
//! in `ξ`, with indicial exponents 0 and ½ at the origin.

use log::warn;
use serde::Serialize;

use crate::elliptic::{jacobi_elliptic, z_from_xi};
use crate::error::{invalid, LameError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LameParams {
    pub rho: f64,
    pub alpha: f64,
    pub h: f64,
}

impl LameParams {
    pub fn new(rho: f64, alpha: f64, h: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(invalid(format!("rho must lie in (0, 1), got {rho}")));
        }
        if !alpha.is_finite() || !h.is_finite() {
            return Err(invalid("alpha and h must be finite"));
        }
        Ok(Self { rho, alpha, h })
    }

    /// Singular point `a = ρ⁻²` of the algebraic form.
    pub fn a(&self) -> f64 {
        1.0 / (self.rho * self.rho)
    }
}

/// Exponent of the Frobenius solution about `ξ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IndicialExponent {
    Zero,
    Half,
}

impl IndicialExponent {
    /// `"first kind"` for `λ = 0`, `"second kind"` for `λ = ½`.
    pub fn kind(self) -> &'static str {
        match self {
            Self::Zero => "first kind",
            Self::Half => "second kind",
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Half => 0.5,
        }
    }

    pub fn from_value(lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            Ok(Self::Zero)
        } else if lambda == 0.5 {
            Ok(Self::Half)
        } else {
            Err(invalid(format!("lambda must be 0 or 1/2, got {lambda}")))
        }
    }
}

/// Point of evaluation in the variables `ξ = sn²z`, `μ = -ρ²ξ`, `η = -ρ²ξ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationPoint {
    pub xi: f64,
    pub mu: f64,
    pub eta: f64,
    pub z: Option<f64>,
}

impl EvaluationPoint {
    pub fn from_xi(xi: f64, rho: f64) -> Result<Self> {
        if !xi.is_finite() || xi < 0.0 {
            return Err(invalid(format!("xi must be finite and non-negative, got {xi}")));
        }
        let r2 = rho * rho;
        Ok(Self {
            xi,
            mu: -r2 * xi,
            eta: -r2 * xi * xi,
            z: None,
        })
    }

    pub fn from_z(z: f64, rho: f64) -> Result<Self> {
        let s = jacobi_elliptic(z, rho)?.sn;
        Ok(Self {
            z: Some(z),
            ..Self::from_xi(s * s, rho)?
        })
    }
}

/// Coefficients of `c_{n+1} = A_n c_n + B_n c_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCoeffs {
    pub a: f64,
    pub b: f64,
}

/// Numerator of `B_n`: `α(α+1) - 2(n-1+λ)(2(n+λ)-1)`.
pub fn b_numerator(params: &LameParams, lambda: f64, n: f64) -> f64 {
    params.alpha * (params.alpha + 1.0) - 2.0 * (n - 1.0 + lambda) * (2.0 * (n + lambda) - 1.0)
}

pub fn recurrence_coeffs(params: &LameParams, lambda: f64, n: usize) -> Result<RecurrenceCoeffs> {
    let a = params.a();
    let nl = n as f64 + lambda;
    let d = 2.0 * a * (nl + 1.0) * (2.0 * nl + 1.0);
    if d == 0.0 {
        return Err(LameError::SingularPoint(format!(
            "recurrence denominator vanishes at n={n}"
        )));
    }
    Ok(RecurrenceCoeffs {
        a: (4.0 * (1.0 + a) * nl * nl - params.h * a) / d,
        b: b_numerator(params, lambda, n as f64) / d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// The family `α = 2(2α_i + i + λ)` (plus) or `α = -2(2α_i + i + λ) - 1` (minus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TerminationFamily {
    pub i: usize,
    pub alpha_i: usize,
    pub branch: Branch,
}

impl TerminationFamily {
    /// Index `n = 2α_i + i + 1` at which `B_n` vanishes.
    pub fn index(&self) -> usize {
        2 * self.alpha_i + self.i + 1
    }
}

pub fn termination_alpha(fam: &TerminationFamily, lambda: f64) -> f64 {
    let base = 2.0 * (2.0 * fam.alpha_i as f64 + fam.i as f64 + lambda);
    match fam.branch {
        Branch::Plus => base,
        Branch::Minus => -base - 1.0,
    }
}

/// Both exponents of the indicial equation `λ(λ-1) + λ/2 = 0` at `ξ = 0`.
pub fn indicial_exponents(_params: &LameParams) -> [IndicialExponent; 2] {
    [IndicialExponent::Zero, IndicialExponent::Half]
}

/// Truncated Frobenius series `ξ^λ Σ_{n≤N} c_n ξ^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSeries {
    pub params: LameParams,
    pub lambda: f64,
    pub coeffs: Vec<f64>,
}

pub fn build_series(params: &LameParams, lambda: f64, n_terms: usize, c0: f64) -> Result<FrobeniusSeries> {
    IndicialExponent::from_value(lambda)?;
    let mut coeffs = Vec::with_capacity(n_terms + 1);
    coeffs.push(c0);
    for n in 0..n_terms {
        let r = recurrence_coeffs(params, lambda, n)?;
        let prev = if n == 0 { 0.0 } else { coeffs[n - 1] };
        coeffs.push(r.a * coeffs[n] + r.b * prev);
    }
    Ok(FrobeniusSeries {
        params: *params,
        lambda,
        coeffs,
    })
}

impl FrobeniusSeries {
    pub fn n_terms(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn check_domain(&self, xi: f64) -> Result<()> {
        if !xi.is_finite() || xi < 0.0 {
            return Err(invalid(format!("series needs finite xi >= 0, got {xi}")));
        }
        if xi > 0.5 {
            warn!("xi = {xi} is close to the radius of convergence 1");
        }
        Ok(())
    }

    /// Value of the series at `ξ`.
    pub fn eval(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * xi + c);
        Ok(xi.powf(self.lambda) * poly)
    }

    /// Value, first and second `ξ`-derivatives, summed term by term.
    pub fn eval_with_derivatives(&self, xi: f64) -> Result<(f64, f64, f64)> {
        self.check_domain(xi)?;
        if xi == 0.0 && self.lambda != 0.0 {
            return Err(LameError::SingularPoint(
                "derivatives of the xi^(1/2) solution at xi = 0".into(),
            ));
        }
        let (mut y, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (n, &c) in self.coeffs.iter().enumerate() {
            let p = n as f64 + self.lambda;
            if p == 0.0 {
                y += c;
                continue;
            }
            y += c * xi.powf(p);
            d1 += c * p * xi.powf(p - 1.0);
            if p != 1.0 {
                d2 += c * p * (p - 1.0) * xi.powf(p - 2.0);
            }
        }
        Ok((y, d1, d2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeForm {
    Algebraic,
    Weierstrass,
}

/// Residual together with the size of the terms that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }
}

/// Residual of the algebraic form for given `(y, y', y'')` at `ξ`.
pub fn algebraic_residual(params: &LameParams, xi: f64, y: f64, dy: f64, d2y: f64) -> Result<Residual> {
    let a = params.a();
    if xi == 0.0 || xi == 1.0 || xi == a {
        return Err(LameError::SingularPoint(format!("xi = {xi} is a singular point")));
    }
    let p = 0.5 * (1.0 / xi + 1.0 / (xi - 1.0) + 1.0 / (xi - a));
    let q = (-params.alpha * (params.alpha + 1.0) * xi + params.h * a) / (4.0 * xi * (xi - 1.0) * (xi - a));
    let terms = [d2y, p * dy, q * y];
    Ok(Residual {
        value: terms.iter().sum(),
        scale: terms.iter().map(|t| t.abs()).fold(0.0, f64::max),
    })
}

/// Residual of `y_zz - (α(α+1)ρ²sn²z - h) y` for given `(y, y_z, y_zz)`.
pub fn weierstrass_residual(params: &LameParams, z: f64, y: f64, d2y: f64) -> Result<Residual> {
    let sn = jacobi_elliptic(z, params.rho)?.sn;
    let pot = (params.alpha * (params.alpha + 1.0) * params.rho * params.rho * sn * sn - params.h) * y;
    Ok(Residual {
        value: d2y - pot,
        scale: d2y.abs().max(pot.abs()),
    })
}

/// Residual of the truncated series in the requested form.
///
/// The Weierstrass form takes `z` from the point, or inverts `ξ = sn²z` on
/// `[0, K]` when the point was given in `ξ`.
pub fn ode_residual(series: &FrobeniusSeries, pt: &EvaluationPoint, form: OdeForm) -> Result<Residual> {
    let params = &series.params;
    match form {
        OdeForm::Algebraic => {
            let (y, d1, d2) = series.eval_with_derivatives(pt.xi)?;
            algebraic_residual(params, pt.xi, y, d1, d2)
        }
        OdeForm::Weierstrass => {
            let z = match pt.z {
                Some(z) => z,
                None => z_from_xi(pt.xi, params.rho)?,
            };
            let t = jacobi_elliptic(z, params.rho)?;
            let xi = t.sn * t.sn;
            let (y, d1, d2) = series.eval_with_derivatives(xi)?;
            let r2 = params.rho * params.rho;
            let xi_z = 2.0 * t.sn * t.cn * t.dn;
            let xi_zz = 2.0 * (t.cn * t.cn * t.dn * t.dn - t.sn * t.sn * t.dn * t.dn - r2 * t.sn * t.sn * t.cn * t.cn);
            let parts = [d2 * xi_z * xi_z, d1 * xi_zz];
            let mut r = weierstrass_residual(params, z, y, parts[0] + parts[1])?;
            // y_zz may cancel between its two chain-rule terms
            r.scale = parts.iter().fold(r.scale, |m, p| m.max(p.abs()));
            Ok(r)
        }
    }
}

/// Parameters of Heun's equation
/// `y'' + (γ/x + δ/(x-1) + ε/(x-a)) y' + (αβx - q)/(x(x-1)(x-a)) y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunParams {
    pub a: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
}

/// Heun parameters whose equation coincides with the algebraic Lamé form.
pub fn heun_correspondence(params: &LameParams) -> HeunParams {
    HeunParams {
        a: params.a(),
        q: -params.h * params.a() / 4.0,
        alpha: (params.alpha + 1.0) / 2.0,
        beta: -params.alpha / 2.0,
        gamma: 0.5,
        delta: 0.5,
        epsilon: 0.5,
    }
}

pub fn heun_residual(heun: &HeunParams, x: f64, y: f64, dy: f64, d2y: f64) -> Result<Residual> {
    if x == 0.0 || x == 1.0 || x == heun.a {
        return Err(LameError::SingularPoint(format!("x = {x} is a singular point")));
    }
    let p = heun.gamma / x + heun.delta / (x - 1.0) + heun.epsilon / (x - heun.a);
    let q = (heun.alpha * heun.beta * x - heun.q) / (x * (x - 1.0) * (x - heun.a));
    let terms = [d2y, p * dy, q * y];
    Ok(Residual {
        value: terms.iter().sum(),
        scale: terms.iter().map(|t| t.abs()).fold(0.0, f64::max),
    })
}
