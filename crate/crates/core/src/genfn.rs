//! Generating functions of the Frobenius solutions over chains of α indices.
//!
//! The left side sums `(γ)_{α₀}/α₀! s₀^{α₀} Π_m s_m^{α_m} y_n(α-chain)` over
//! non-decreasing chains truncated at `A_max`. The right side resums the
//! chain: order 0 in closed form, higher orders through nested level
//! integrals whose kernels come from the residue at the interior pole.
//! Infinite chains `s_{a,∞}` are read as `s_{a,K}` over the supplied weights.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, LameError, Result};
use crate::integral::{
    apply_multipliers, level_polynomial, pole_locations, radical, w_tilde_value, y0_coefficients, OperatorPower,
    SParameters,
};
use crate::lame::{EvaluationPoint, IndicialExponent, LameParams};
use crate::quadrature::{contour_integral, contour_nodes, contour_radius, QuadratureGrid};

type C = Complex64;

/// Number of samples used to recover Taylor coefficients of analytic kernels.
const TAYLOR_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GFWeights {
    pub gamma: f64,
    pub s: SParameters,
    pub a_max: usize,
    pub c0: f64,
}

impl GFWeights {
    pub fn new(gamma: f64, s: SParameters, a_max: usize, c0: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(invalid(format!("gamma must be positive, got {gamma}")));
        }
        if a_max == 0 {
            return Err(invalid("A_max must be at least 1"));
        }
        if c0 == 0.0 || !c0.is_finite() {
            return Err(invalid("c0 must be finite and non-zero"));
        }
        Ok(Self { gamma, s, a_max, c0 })
    }

    pub fn k(&self) -> usize {
        self.s.k()
    }
}

/// `(γ)_n / n!` for `n = 0..=a_max`.
pub fn gamma_weights(gamma: f64, a_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(a_max + 1);
    let mut c = 1.0;
    for n in 0..=a_max {
        out.push(c);
        c *= (gamma + n as f64) / (n as f64 + 1.0);
    }
    out
}

fn powers(s: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = 1.0;
    for _ in 0..=n {
        out.push(p);
        p *= s;
    }
    out
}

fn horner(coeffs: &[C], x: C) -> C {
    coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Coefficients of `x^i` in `Υ(λ; s; x)` truncated at `α₀ ≤ A_max`,
/// including the factor `c_0 ξ^λ`.
pub fn upsilon_coefficients(
    lambda: f64,
    gamma: f64,
    s_eff: f64,
    pt: &EvaluationPoint,
    a_max: usize,
    c0: f64,
) -> Vec<C> {
    let w = gamma_weights(gamma, a_max);
    let sp = powers(s_eff, a_max);
    let pre = c0 * pt.xi.powf(lambda);
    let mut out = vec![C::new(0.0, 0.0); a_max + 1];
    for a0 in 0..=a_max {
        let f = pre * w[a0] * sp[a0];
        for (i, c) in y0_coefficients(a0, lambda).into_iter().enumerate() {
            out[i] += f * c;
        }
    }
    out
}

/// `Υ(λ; s; x) = Σ_{α₀ ≤ A_max} (γ)_{α₀}/α₀! s^{α₀} c_0 ξ^λ Σ_i (y0 coefficients) x^i`.
pub fn upsilon(lambda: f64, gamma: f64, s_eff: f64, x: C, pt: &EvaluationPoint, a_max: usize, c0: f64) -> C {
    let w = gamma_weights(gamma, a_max);
    let sp = powers(s_eff, a_max);
    let inner: C = (0..=a_max)
        .map(|a0| {
            w[a0]
                * sp[a0]
                * horner(
                    &y0_coefficients(a0, lambda).into_iter().map(C::from).collect::<Vec<_>>(),
                    x,
                )
        })
        .sum();
    c0 * pt.xi.powf(lambda) * inner
}

fn nonzero(r: C, what: &'static str) -> Result<C> {
    if r.norm() == 0.0 {
        Err(LameError::SingularRadicand(what))
    } else {
        Ok(r)
    }
}

/// `A(s; x) = (1-s+R)^{1/4} (1+s+R)^{1/2} / R`.
pub fn kernel_a(s: f64, x: C) -> Result<C> {
    let r = nonzero(radical(s, x), "kernel_a")?;
    Ok((1.0 - s + r).powf(0.25) * (1.0 + s + r).sqrt() / r)
}

/// `B(s; x) = (1-s+R)^{-1/4} (1+s+R)^{1/2} / R`.
pub fn kernel_b(s: f64, x: C) -> Result<C> {
    let r = nonzero(radical(s, x), "kernel_b")?;
    Ok((1.0 - s + r).powf(-0.25) * (1.0 + s + r).sqrt() / r)
}

fn level_kernel_with_exponent(e: f64, s: f64, t: f64, u: f64, x: C) -> Result<C> {
    let r = nonzero(radical(s, x * (1.0 - t) * (1.0 - u)), "level kernel")?;
    Ok(((1.0 + s + r) / 2.0).powf(-e) / r)
}

/// Residue kernel at level `L = n - k` for the first-kind family,
/// `((1+s+R)/2)^{-(L-3/4)} / R`.
pub fn kernel_gamma(level_n: usize, k_offset: usize, s_eff: f64, t: f64, u: f64, x: C) -> Result<C> {
    let level = level_n
        .checked_sub(k_offset)
        .filter(|&l| l >= 1)
        .ok_or_else(|| LameError::IndexOutOfRange(format!("level {level_n} - {k_offset} is below 1")))?;
    level_kernel_with_exponent(level as f64 - 0.75, s_eff, t, u, x)
}

/// Second-kind analogue of [`kernel_gamma`], exponent `L - 1/4`.
pub fn kernel_psi(level_n: usize, k_offset: usize, s_eff: f64, t: f64, u: f64, x: C) -> Result<C> {
    let level = level_n
        .checked_sub(k_offset)
        .filter(|&l| l >= 1)
        .ok_or_else(|| LameError::IndexOutOfRange(format!("level {level_n} - {k_offset} is below 1")))?;
    level_kernel_with_exponent(level as f64 - 0.25, s_eff, t, u, x)
}

/// Residue kernel for general `λ`: `((1+s+R)/2)^{-(L-3/4+λ)} / R`.
pub fn level_kernel(level: usize, lambda: f64, s_eff: f64, t: f64, u: f64, x: C) -> Result<C> {
    level_kernel_with_exponent(level as f64 - 0.75 + lambda, s_eff, t, u, x)
}

/// Unit-circle quadrature of `-(1-ηTv)^{-(1/4+λ)} / (ηTv² + (s-1)v - s)`.
pub fn residue_contour(s: f64, t: f64, u: f64, eta: f64, lambda: f64, m: usize) -> Result<C> {
    let xt = eta * (1.0 - t) * (1.0 - u);
    let e = 0.25 + lambda;
    contour_integral(|v| -(1.0 - xt * v).powf(-e) / (xt * v * v + (s - 1.0) * v - s), m, 1.0)
}

/// Residue of the same integrand at `v_in`: `((1+s+R)/2)^{-(1/4+λ)} / R`.
pub fn residue_closed(s: f64, t: f64, u: f64, eta: f64, lambda: f64) -> Result<C> {
    level_kernel_with_exponent(0.25 + lambda, s, t, u, C::new(eta, 0.0))
}

/// Taylor coefficients of `f` about 0 from `n` samples on `|x| = radius`.
pub(crate) fn taylor_coefficients<F>(f: F, radius: f64, n: usize) -> Result<Vec<C>>
where
    F: Fn(C) -> Result<C>,
{
    let nodes = contour_nodes(n, radius);
    let samples = nodes.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|j| {
            let s: C = samples
                .iter()
                .enumerate()
                .map(|(k, fk)| fk * C::from_polar(1.0, -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64))
                .sum();
            s / (n as f64 * radius.powi(j as i32))
        })
        .collect())
}

/// Sampling radius well inside the branch point `x = -(1-s)²/(4s)` of the kernels.
fn sampling_radius(s: f64) -> f64 {
    let s = s.abs();
    if s == 0.0 {
        0.25
    } else {
        (0.5 * (1.0 - s) * (1.0 - s) / (4.0 * s)).min(0.25)
    }
}

/// `Π_{k=from}^{K} (1 - s_{k,K})^{-1}`.
fn chain_prefactor(s: &SParameters, from: usize) -> f64 {
    (from..=s.k()).map(|k| 1.0 / (1.0 - s.tail_product(k))).product()
}

/// Nested right-side levels `1..=n` applied to the Taylor series `f0`.
///
/// Level `L` evaluates `∫∫ kernel(L, s_L, t, u, W) [Op_L F_{L-1}](w̃(s_L, t, u, W))`;
/// inner levels are turned back into Taylor series by sampling in `W`.
fn nested_levels<K>(
    params: &LameParams,
    grid: &QuadratureGrid,
    op_power: OperatorPower,
    f0: Vec<C>,
    s_levels: &[f64],
    eta: f64,
    kernel: K,
) -> Result<C>
where
    K: Fn(usize, f64, f64, f64, C) -> Result<C> + Sync,
{
    let n = s_levels.len();
    let mut f = f0;
    for level in 1..=n {
        let s = s_levels[level - 1];
        let g = apply_multipliers(params, level, grid.lambda, op_power, &f);
        let rule = grid.level(level)?;
        let eval = |w: C| -> Result<C> {
            let mut acc = C::new(0.0, 0.0);
            for (&t, &wt) in rule.t.nodes.iter().zip(&rule.t.weights) {
                for (&u, &wu) in rule.u.nodes.iter().zip(&rule.u.weights) {
                    let k = kernel(level, s, t, u, w)?;
                    acc += wt * wu * k * horner(&g, w_tilde_value(s, t, u, w)?);
                }
            }
            Ok(acc)
        };
        if level == n {
            return eval(C::new(eta, 0.0));
        }
        f = taylor_coefficients(eval, sampling_radius(s), TAYLOR_SAMPLES)?;
    }
    Err(invalid("nested right side needs at least one level"))
}

fn check_order(weights: &GFWeights, grid: &QuadratureGrid, lambda: f64, order_n: usize) -> Result<()> {
    if order_n > weights.k() {
        return Err(invalid(format!(
            "order {order_n} exceeds chain length K = {}",
            weights.k()
        )));
    }
    if order_n > 0 {
        if grid.n_levels() < order_n {
            return Err(invalid(format!(
                "grid has {} levels, order {order_n} needs more",
                grid.n_levels()
            )));
        }
        if grid.lambda != lambda {
            return Err(invalid("quadrature grid was built for a different lambda"));
        }
    }
    Ok(())
}

/// Right side of the generating-function identity at order `n`.
pub fn gf_rhs_order(
    params: &LameParams,
    lambda: IndicialExponent,
    weights: &GFWeights,
    pt: &EvaluationPoint,
    order_n: usize,
    grid: &QuadratureGrid,
    op_power: OperatorPower,
) -> Result<C> {
    let lam = lambda.value();
    check_order(weights, grid, lam, order_n)?;
    let s = &weights.s;
    if order_n == 0 {
        let u = upsilon(
            lam,
            weights.gamma,
            s.tail_product(0),
            C::new(pt.eta, 0.0),
            pt,
            weights.a_max,
            weights.c0,
        );
        return Ok(chain_prefactor(s, 1) * u);
    }
    let f0 = upsilon_coefficients(lam, weights.gamma, s.get(0), pt, weights.a_max, weights.c0);
    let s_levels: Vec<f64> = (1..=order_n)
        .map(|l| if l == order_n { s.tail_product(l) } else { s.get(l) })
        .collect();
    let v = nested_levels(params, grid, op_power, f0, &s_levels, pt.eta, |l, s, t, u, x| {
        level_kernel(l, lam, s, t, u, x)
    })?;
    Ok(chain_prefactor(s, order_n + 1) * pt.mu.powi(order_n as i32) * v)
}

/// `Σ_{α ≥ α_n} … Σ_{α_K ≤ A} Π_{m>n} s_m^{α_m}` for each `α_n = 0..=A`.
fn trailing_chain_sums(s: &SParameters, n: usize, a_max: usize) -> Vec<f64> {
    let mut g = vec![1.0; a_max + 1];
    for m in (n + 1..=s.k()).rev() {
        let sp = powers(s.get(m), a_max);
        let mut next = vec![0.0; a_max + 1];
        let mut acc = 0.0;
        for a in (0..=a_max).rev() {
            acc += sp[a] * g[a];
            next[a] = acc;
        }
        g = next;
    }
    g
}

/// Left side at order `n`: the truncated chain sum of `y_n` terms.
///
/// Each level integral is linear in the polynomial it acts on, so the sum over
/// `α_{L-1} ≤ α_L` is taken before integrating level `L`.
pub fn gf_lhs_order(
    params: &LameParams,
    lambda: IndicialExponent,
    weights: &GFWeights,
    pt: &EvaluationPoint,
    order_n: usize,
    grid: &QuadratureGrid,
    op_power: OperatorPower,
) -> Result<C> {
    let lam = lambda.value();
    check_order(weights, grid, lam, order_n)?;
    let a_max = weights.a_max;
    let s = &weights.s;
    let w0 = gamma_weights(weights.gamma, a_max);
    let s0 = powers(s.get(0), a_max);
    let tau = trailing_chain_sums(s, order_n, a_max);
    let pre = weights.c0 * pt.xi.powf(lam);
    if order_n == 0 {
        let total: f64 = (0..=a_max)
            .map(|a0| w0[a0] * s0[a0] * tau[a0] * crate::integral::y0_term(lam, a0, pt, weights.c0))
            .sum();
        return Ok(C::new(total, 0.0));
    }
    // phi[α] is the polynomial carried out of the previous level for index α.
    let mut phi: Vec<Vec<C>> = (0..=a_max)
        .map(|a0| {
            y0_coefficients(a0, lam)
                .into_iter()
                .map(|c| C::from(w0[a0] * s0[a0] * c))
                .collect()
        })
        .collect();
    for level in 1..=order_n {
        let mut acc: Vec<C> = Vec::new();
        let mut grouped = Vec::with_capacity(a_max + 1);
        for (a, p) in phi.iter().enumerate() {
            acc.resize(a + 1, C::new(0.0, 0.0));
            for (x, y) in acc.iter_mut().zip(p) {
                *x += y;
            }
            grouped.push((a, apply_multipliers(params, level, lam, op_power, &acc)));
        }
        let sp = powers(s.get(level), a_max);
        if level < order_n {
            phi = grouped
                .into_iter()
                .map(|(a, g)| {
                    Ok(level_polynomial(grid, level, a, &g)?
                        .into_iter()
                        .map(|c| c * sp[a])
                        .collect())
                })
                .collect::<Result<Vec<_>>>()?;
        } else {
            let eta = C::new(pt.eta, 0.0);
            let mut total = C::new(0.0, 0.0);
            for (a, g) in &grouped {
                total += horner(&level_polynomial(grid, level, *a, g)?, eta) * sp[*a] * tau[*a];
            }
            return Ok(pre * pt.mu.powi(order_n as i32) * total);
        }
    }
    unreachable!("loop returns at the outermost level")
}

/// Order-one right side before the residue step: the α-resummed integrand
/// integrated over the whole unit circle, which encloses both `v_in` and the
/// pole of order `α₀ - i` at `v = 0`.
pub fn gf_order1_contour_form(
    params: &LameParams,
    lambda: IndicialExponent,
    weights: &GFWeights,
    pt: &EvaluationPoint,
    grid: &QuadratureGrid,
    op_power: OperatorPower,
) -> Result<C> {
    let lam = lambda.value();
    check_order(weights, grid, lam, 1)?;
    let a_max = weights.a_max;
    let s = &weights.s;
    let s1 = s.tail_product(1);
    let w0 = gamma_weights(weights.gamma, a_max);
    let s0k = powers(s.tail_product(0), a_max);
    let coef: Vec<Vec<C>> = (0..=a_max)
        .map(|a0| {
            let p: Vec<C> = y0_coefficients(a0, lam)
                .into_iter()
                .map(|c| C::from(w0[a0] * s0k[a0] * c))
                .collect();
            apply_multipliers(params, 1, lam, op_power, &p)
        })
        .collect();
    let rule = grid.level(1)?;
    let e = 1.25 + lam;
    let eta = C::new(pt.eta, 0.0);
    let mut total = C::new(0.0, 0.0);
    for (&t, &wt) in rule.t.nodes.iter().zip(&rule.t.weights) {
        for (&u, &wu) in rule.u.nodes.iter().zip(&rule.u.weights) {
            let tt = (1.0 - t) * (1.0 - u);
            let mut poles = vec![1.0 / (eta * tt)];
            if s1 != 0.0 {
                let pp = pole_locations(s1, t, u, eta)?;
                poles.extend([pp.v_in, pp.v_out]);
            }
            let radius = contour_radius(&poles)?;
            let m = grid.contour_m;
            let mut acc = C::new(0.0, 0.0);
            let mut qp = vec![C::new(0.0, 0.0); a_max + 1];
            let mut xp = vec![C::new(0.0, 0.0); a_max + 1];
            for v in contour_nodes(m, radius) {
                let one_minus = 1.0 - eta * tt * v;
                let p = 1.0 / one_minus;
                let q = (v - 1.0) * p / v;
                let x = eta * t * u * p * p;
                qp[0] = C::new(1.0, 0.0);
                xp[0] = C::new(1.0, 0.0);
                for k in 1..=a_max {
                    qp[k] = qp[k - 1] * q;
                    xp[k] = xp[k - 1] * x;
                }
                let inner: C = coef
                    .iter()
                    .enumerate()
                    .map(|(a0, g)| g.iter().enumerate().map(|(j, gj)| gj * xp[j] * qp[a0 - j]).sum::<C>())
                    .sum();
                acc += one_minus.powf(-e) / (1.0 - s1 * q) * inner;
            }
            total += wt * wu * acc / m as f64;
        }
    }
    Ok(chain_prefactor(s, 2) * weights.c0 * pt.xi.powf(lam) * pt.mu * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionKind {
    First,
    Second,
}

impl SolutionKind {
    pub fn lambda(self) -> IndicialExponent {
        match self {
            Self::First => IndicialExponent::Zero,
            Self::Second => IndicialExponent::Half,
        }
    }

    pub fn gamma(self) -> f64 {
        match self {
            Self::First => 0.75,
            Self::Second => 1.25,
        }
    }
}

/// Sum of orders `0..=n_max` of the first- or second-kind generating function
/// written with the closed kernels `A`/`Γ` or `B`/`Ψ` (`c_0 = 1`).
pub fn gf_remark(
    kind: SolutionKind,
    params: &LameParams,
    s: &SParameters,
    pt: &EvaluationPoint,
    grid: &QuadratureGrid,
    n_max: usize,
    op_power: OperatorPower,
) -> Result<C> {
    if n_max > 2 || n_max > s.k() {
        return Err(invalid(format!(
            "remark assembly supports n_max <= min(2, K), got {n_max}"
        )));
    }
    let lam = kind.lambda().value();
    if n_max > 0 && (grid.lambda != lam || grid.n_levels() < n_max) {
        return Err(invalid("quadrature grid does not match the requested solution kind"));
    }
    let (pre, k0): (f64, fn(f64, C) -> Result<C>) = match kind {
        SolutionKind::First => (2f64.powf(-0.75), kernel_a),
        SolutionKind::Second => ((pt.xi * pt.xi / 2.0).powf(0.25), kernel_b),
    };
    let eta = C::new(pt.eta, 0.0);
    let mut total = chain_prefactor(s, 1) * pre * k0(s.tail_product(0), eta)?;
    if n_max == 0 {
        return Ok(total);
    }
    let s0 = s.get(0);
    let f0 = taylor_coefficients(|x| Ok(pre * k0(s0, x)?), sampling_radius(s0), TAYLOR_SAMPLES)?;
    for n in 1..=n_max {
        let s_levels: Vec<f64> = (1..=n)
            .map(|l| if l == n { s.tail_product(l) } else { s.get(l) })
            .collect();
        let v = nested_levels(
            params,
            grid,
            op_power,
            f0.clone(),
            &s_levels,
            pt.eta,
            |l, s, t, u, x| match kind {
                SolutionKind::First => kernel_gamma(l, 0, s, t, u, x),
                SolutionKind::Second => kernel_psi(l, 0, s, t, u, x),
            },
        )?;
        total += chain_prefactor(s, n + 1) * pt.mu.powi(n as i32) * v;
    }
    Ok(total)
}

/// Outcome of one order-by-order comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GFOrderReport {
    pub order_n: usize,
    pub lhs: C,
    pub rhs: C,
    pub gap: f64,
    pub truncation_estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub error: Option<String>,
}

/// Last retained `α₀` term times `A_max`.
pub fn truncation_estimate(lambda: f64, weights: &GFWeights, pt: &EvaluationPoint) -> f64 {
    let a = weights.a_max;
    let w = gamma_weights(weights.gamma, a)[a];
    weights.a_max as f64 * (w * weights.s.get(0).abs().powi(a as i32) * weights.c0 * pt.xi.powf(lambda)).abs()
}

#[allow(clippy::too_many_arguments)]
pub fn gf_verify_order(
    params: &LameParams,
    lambda: IndicialExponent,
    weights: &GFWeights,
    pt: &EvaluationPoint,
    order_n: usize,
    grid: &QuadratureGrid,
    op_power: OperatorPower,
    tolerance: f64,
) -> GFOrderReport {
    let truncation = truncation_estimate(lambda.value(), weights, pt);
    let sides = gf_lhs_order(params, lambda, weights, pt, order_n, grid, op_power)
        .and_then(|l| Ok((l, gf_rhs_order(params, lambda, weights, pt, order_n, grid, op_power)?)));
    match sides {
        Ok((lhs, rhs)) => {
            let gap = (lhs - rhs).norm();
            GFOrderReport {
                order_n,
                lhs,
                rhs,
                gap,
                truncation_estimate: truncation,
                tolerance,
                pass: gap < tolerance + truncation,
                error: None,
            }
        }
        Err(e) => GFOrderReport {
            order_n,
            lhs: C::new(f64::NAN, f64::NAN),
            rhs: C::new(f64::NAN, f64::NAN),
            gap: f64::NAN,
            truncation_estimate: truncation,
            tolerance,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> EvaluationPoint {
        EvaluationPoint::from_xi(0.1, 0.5).unwrap()
    }

    #[test]
    fn upsilon_reductions() {
        let p = pt();
        let v = upsilon(0.5, 1.25, 0.0, C::new(0.3, 0.0), &p, 20, 2.0);
        assert!((v.re - 2.0 * 0.1f64.sqrt()).abs() < 1e-15);
        let v = upsilon(0.0, 0.75, 0.3, C::new(0.0, 0.0), &p, 80, 1.0);
        assert!((v.re - 0.7f64.powf(-0.75)).abs() < 1e-12);
        let x = C::new(-0.01, 0.0);
        let direct = upsilon(0.5, 1.25, 0.2, x, &p, 30, 1.0);
        let viacoef = horner(&upsilon_coefficients(0.5, 1.25, 0.2, &p, 30, 1.0), x);
        assert!((direct - viacoef).norm() < 1e-15);
    }

    #[test]
    fn kernel_reductions() {
        let z = C::new(0.0, 0.0);
        assert!((kernel_a(0.0, C::new(-0.1, 0.0)).unwrap().re - 2f64.powf(0.75)).abs() < 1e-15);
        assert!((kernel_b(0.0, C::new(-0.1, 0.0)).unwrap().re - 2f64.powf(0.25)).abs() < 1e-15);
        let s: f64 = 0.3;
        assert!((kernel_a(s, z).unwrap().re - 2f64.powf(0.75) * (1.0 - s).powf(-0.75)).abs() < 1e-14);
        assert!((kernel_b(s, z).unwrap().re - 2f64.powf(0.25) * (1.0 - s).powf(-1.25)).abs() < 1e-14);
        let g = kernel_gamma(1, 0, s, 0.3, 0.4, z).unwrap();
        assert!((g.re - 1.0 / (1.0 - s)).abs() < 1e-15);
        assert!((kernel_gamma(2, 0, 0.0, 0.3, 0.4, C::new(-0.2, 0.0)).unwrap().re - 1.0).abs() < 1e-15);
        let x = C::new(-0.1, 0.0);
        let at_one = kernel_psi(1, 0, s, 1.0, 0.4, x).unwrap();
        let near = kernel_psi(1, 0, s, 1.0 - 1e-9, 0.4, x).unwrap();
        assert!((at_one - near).norm() < 1e-9);
        assert!((at_one.re - (1.0 - s).powf(-1.0)).abs() < 1e-15);
        assert!(kernel_gamma(1, 1, s, 0.3, 0.4, x).is_err());
        for k in [
            kernel_a(s, x).unwrap(),
            kernel_b(s, x).unwrap(),
            kernel_gamma(2, 0, s, 0.2, 0.3, x).unwrap(),
        ] {
            assert!(k.re > 0.0 && k.im == 0.0);
        }
    }

    #[test]
    fn taylor_sampling_recovers_coefficients() {
        let c = taylor_coefficients(|x| Ok(1.0 / (1.0 - x / 2.0)), 0.5, 32).unwrap();
        for (j, cj) in c.iter().enumerate().take(10) {
            assert!((cj - 0.5f64.powi(j as i32)).norm() < 1e-13 * 2f64.powi(j as i32));
        }
    }

    #[test]
    fn trailing_sums_match_loops() {
        let s = SParameters::new(vec![0.3, 0.2, 0.1]).unwrap();
        let a = 6;
        let tau = trailing_chain_sums(&s, 0, a);
        for a0 in 0..=a {
            let mut want = 0.0;
            for a1 in a0..=a {
                for a2 in a1..=a {
                    want += 0.2f64.powi(a1 as i32) * 0.1f64.powi(a2 as i32);
                }
            }
            assert!((tau[a0] - want).abs() < 1e-15);
        }
        assert!(trailing_chain_sums(&s, 2, a).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn zero_weights_leave_the_seed() {
        let par = LameParams::new(0.5, 0.0, 1.0).unwrap();
        let s = SParameters::new(vec![0.0, 0.0]).unwrap();
        let w = GFWeights::new(0.75, s.clone(), 10, 1.0).unwrap();
        let grid = QuadratureGrid::new(0.0, 1, 16, 128).unwrap();
        let p = pt();
        let l = gf_lhs_order(&par, IndicialExponent::Zero, &w, &p, 0, &grid, OperatorPower::Squared).unwrap();
        let r = gf_rhs_order(&par, IndicialExponent::Zero, &w, &p, 0, &grid, OperatorPower::Squared).unwrap();
        assert_eq!(l, C::new(1.0, 0.0));
        assert_eq!(r, C::new(1.0, 0.0));
        let first = gf_remark(SolutionKind::First, &par, &s, &p, &grid, 0, OperatorPower::Squared).unwrap();
        assert!((first.re - 1.0).abs() < 1e-15);
        let second = gf_remark(SolutionKind::Second, &par, &s, &p, &grid, 0, OperatorPower::Squared).unwrap();
        assert!((second.re - 0.1f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weights_validation() {
        let s = SParameters::new(vec![0.3]).unwrap();
        assert!(GFWeights::new(0.0, s.clone(), 10, 1.0).is_err());
        assert!(GFWeights::new(0.75, s.clone(), 0, 1.0).is_err());
        assert!(GFWeights::new(0.75, s, 10, 0.0).is_err());
    }
}
