//! Nested integral representation of the Frobenius solution.
//!
//! The order-`n` term is an `n`-fold nest of levels. Level `L` integrates over
//! `t, u ∈ (0, 1)` with weights `t^{(L-5/2+λ)/2} u^{(L-2+λ)/2}` and over a
//! contour in `v`; the function it acts on is a polynomial in
//! `↔w_L = ↔w_{L+1} v t u / ((v-1)(1 - ↔w_{L+1} v T))`, `T = (1-t)(1-u)`,
//! after the diagonal operator `-(1+ρ⁻²) w^{-a}(w∂_w)^p w^{a} + h/(16ρ²)`
//! with `a = (L-1+λ)/2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, LameError, Result};
use crate::lame::{EvaluationPoint, IndicialExponent, LameParams};
use crate::quadrature::{contour_nodes, contour_radius, LevelRule, QuadratureGrid};

type C = Complex64;

/// Expansion weights `s_0..s_K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SParameters {
    values: Vec<f64>,
}

impl SParameters {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("at least one s parameter is required"));
        }
        if let Some(s) = values.iter().find(|s| !(s.abs() < 1.0)) {
            return Err(invalid(format!("|s| must be below 1, got {s}")));
        }
        Ok(Self { values })
    }

    /// Parses a comma-separated list such as `"0.3,0.2,0.1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("bad s value {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    /// Index of the last weight.
    pub fn k(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// `s_{a,K} = s_a s_{a+1} ⋯ s_K`.
    pub fn tail_product(&self, a: usize) -> f64 {
        self.values.iter().skip(a).product()
    }
}

/// `s_a s_{a+1} ⋯ s_b`, with `b` clipped to the last supplied weight.
pub fn s_partial_product(s: &SParameters, a: usize, b: usize) -> Result<f64> {
    if a > b {
        return Err(LameError::IndexOutOfRange(format!(
            "partial product needs a <= b, got {a} > {b}"
        )));
    }
    if a > s.k() {
        return Err(LameError::IndexOutOfRange(format!(
            "index {a} beyond chain length {}",
            s.k()
        )));
    }
    Ok(s.values[a..=b.min(s.k())].iter().product())
}

/// Summation indices `α_0 ≤ α_1 ≤ ⋯ ≤ α_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaChain(Vec<usize>);

impl AlphaChain {
    pub fn new(alphas: Vec<usize>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid("alpha chain must not be empty"));
        }
        if alphas.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid(format!("alpha chain must be non-decreasing, got {alphas:?}")));
        }
        Ok(Self(alphas))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `↔w_{i,j}`: `η` when `i > j`, else `inner v t u / ((v-1)(1 - inner v (1-t)(1-u)))`.
pub fn w_arrow(i: usize, j: usize, v: C, t: f64, u: f64, inner: C, eta: f64) -> Result<C> {
    if i > j {
        return Ok(C::new(eta, 0.0));
    }
    let den = (v - 1.0) * (1.0 - inner * v * (1.0 - t) * (1.0 - u));
    if den.norm() == 0.0 {
        return Err(LameError::PoleOnContour(format!("w_arrow is singular at v = {v}")));
    }
    Ok(inner * v * t * u / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolePair {
    pub v_in: C,
    pub v_out: C,
}

/// Roots of `x T v² + (s-1) v - s = 0`, `T = (1-t)(1-u)`.
///
/// `v_in` is the root that tends to `-s` as `s → 0`; it is computed as
/// `-2s / ((1-s) + √((1-s)² + 4xTs))` to avoid cancellation.
pub fn pole_locations(s: f64, t: f64, u: f64, x: C) -> Result<PolePair> {
    let xt = x * (1.0 - t) * (1.0 - u);
    if xt.norm() == 0.0 {
        return Err(LameError::DegenerateQuadratic("x(1-t)(1-u) = 0".into()));
    }
    let root = ((1.0 - s) * (1.0 - s) + 4.0 * xt * s).sqrt();
    let plus = (1.0 - s) + root;
    let v_out = plus / (2.0 * xt);
    let v_in = if plus.norm() > 0.0 {
        -2.0 * s / plus
    } else {
        ((1.0 - s) - root) / (2.0 * xt)
    };
    Ok(PolePair { v_in, v_out })
}

/// `w̃_{i,j}` together with its level indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WChainValue {
    pub value: C,
    pub level_i: usize,
    pub level_j: usize,
}

/// `R = √(s² - 2(1 - 2x)s + 1)`.
pub(crate) fn radical(s: f64, x: C) -> C {
    (s * s - 2.0 * (1.0 - 2.0 * x) * s + 1.0).sqrt()
}

/// Closed form of `w̃` in the cancellation-free arrangement
/// `2 s x t u / (1 + s(s + 2xT) + (1+s)R)`, `R = √(s² - 2(1-2xT)s + 1)`.
pub fn w_tilde_value(s: f64, t: f64, u: f64, inner: C) -> Result<C> {
    let xt = inner * (1.0 - t) * (1.0 - u);
    let den = 1.0 + s * (s + 2.0 * xt) + (1.0 + s) * radical(s, xt);
    if den.norm() == 0.0 {
        return Err(LameError::SingularPoint("w_tilde denominator vanishes".into()));
    }
    Ok(2.0 * s * inner * t * u / den)
}

/// The same quantity in the form
/// `x t u {1 + (s + 2xT)s - (1+s)R} / (2(1 - xT)² s)`.
pub fn w_tilde_direct(s: f64, t: f64, u: f64, inner: C) -> Result<C> {
    let xt = inner * (1.0 - t) * (1.0 - u);
    let den = 2.0 * (1.0 - xt) * (1.0 - xt) * s;
    if den.norm() == 0.0 {
        return Err(LameError::SingularPoint(
            "w_tilde_direct needs s != 0 and xT != 1".into(),
        ));
    }
    Ok(inner * t * u * (1.0 + (s + 2.0 * xt) * s - (1.0 + s) * radical(s, xt)) / den)
}

pub fn w_tilde(i: usize, j: usize, s_eff: f64, t: f64, u: f64, inner: C) -> Result<WChainValue> {
    if i > j {
        return Err(LameError::IndexOutOfRange(format!(
            "w_tilde needs i <= j, got {i} > {j}"
        )));
    }
    Ok(WChainValue {
        value: w_tilde_value(s_eff, t, u, inner)?,
        level_i: i,
        level_j: j,
    })
}

/// Power of `w∂_w` in the level operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OperatorPower {
    Linear,
    #[default]
    Squared,
}

impl OperatorPower {
    pub fn exponent(self) -> i32 {
        match self {
            Self::Linear => 1,
            Self::Squared => 2,
        }
    }

    pub fn from_exponent(p: i64) -> Result<Self> {
        match p {
            1 => Ok(Self::Linear),
            2 => Ok(Self::Squared),
            _ => Err(invalid(format!("operator power must be 1 or 2, got {p}"))),
        }
    }
}

/// `m_i = -(1+ρ⁻²)(i+a)^p + h/(16ρ²)`, the action of the level operator on `w^i`.
pub fn diag_operator_multipliers(params: &LameParams, a: f64, power: OperatorPower, i_max: usize) -> Vec<f64> {
    let r2 = params.rho * params.rho;
    let c = 1.0 + 1.0 / r2;
    let h = params.h / (16.0 * r2);
    (0..=i_max)
        .map(|i| -c * (i as f64 + a).powi(power.exponent()) + h)
        .collect()
}

/// Shift `a = (L-1+λ)/2` of the operator at level `L`.
pub fn operator_shift(level: usize, lambda: f64) -> f64 {
    (level as f64 - 1.0 + lambda) / 2.0
}

pub(crate) fn apply_multipliers(
    params: &LameParams,
    level: usize,
    lambda: f64,
    power: OperatorPower,
    g: &[C],
) -> Vec<C> {
    let m = diag_operator_multipliers(params, operator_shift(level, lambda), power, g.len().saturating_sub(1));
    g.iter().zip(m).map(|(c, m)| c * m).collect()
}

/// Coefficients of `x^i` in the terminating series
/// `Σ_i (-α₀)_i (α₀+1/4+λ)_i / ((1+λ/2)_i (3/4+λ/2)_i) x^i`.
pub fn y0_coefficients(alpha0: usize, lambda: f64) -> Vec<f64> {
    let a0 = alpha0 as f64;
    let mut out = Vec::with_capacity(alpha0 + 1);
    let mut c = 1.0;
    for i in 0..=alpha0 {
        out.push(c);
        let fi = i as f64;
        c *= (fi - a0) * (a0 + 0.25 + lambda + fi) / ((1.0 + lambda / 2.0 + fi) * (0.75 + lambda / 2.0 + fi));
    }
    out
}

/// `(e)_k / k!` for `k = 0..n`.
fn rising_over_factorial(e: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    for k in 0..=n {
        out.push(c);
        c *= (e + k as f64) / (k as f64 + 1.0);
    }
    out
}

/// Sum over the `(t, u)` nodes of a level, in parallel over `t` and with a
/// fixed reduction order.
fn sum_over_nodes<F>(rule: &LevelRule, width: usize, f: F) -> Result<Vec<C>>
where
    F: Fn(f64, f64, &mut [C]) -> Result<()> + Sync,
{
    let partials: Vec<Result<Vec<C>>> = rule
        .t
        .nodes
        .par_iter()
        .zip(rule.t.weights.par_iter())
        .map(|(&t, &wt)| {
            let mut row = vec![C::new(0.0, 0.0); width];
            let mut cell = vec![C::new(0.0, 0.0); width];
            for (&u, &wu) in rule.u.nodes.iter().zip(&rule.u.weights) {
                cell.iter_mut().for_each(|c| *c = C::new(0.0, 0.0));
                f(t, u, &mut cell)?;
                for (r, c) in row.iter_mut().zip(&cell) {
                    *r += wt * wu * c;
                }
            }
            Ok(row)
        })
        .collect();
    let mut total = vec![C::new(0.0, 0.0); width];
    for p in partials {
        for (acc, v) in total.iter_mut().zip(p?) {
            *acc += v;
        }
    }
    Ok(total)
}

/// Exponent `L + 1/4 + λ` of `(1 - ↔w_{L+1} v T)^{-1}` at level `L`.
fn level_exponent(level: usize, lambda: f64) -> f64 {
    level as f64 + 0.25 + lambda
}

/// Level `L` applied to polynomials `g` (already carrying the operator
/// multipliers) for several `α_L`, at a numerical outer variable `w`.
///
/// For each item `(α, g)` returns
/// `∫∫ (1/2πi)∮ Σ_j g_j (w t u)^j (v-1)^{α-j} v^{j-α-1} (1 - w T v)^{-(e+α+j)} dv`.
pub(crate) fn level_at_point(grid: &QuadratureGrid, level: usize, items: &[(usize, Vec<C>)], w: C) -> Result<Vec<C>> {
    let rule = grid.level(level)?;
    let e = level_exponent(level, grid.lambda);
    let m = grid.contour_m;
    let max_alpha = items.iter().map(|(a, _)| *a).max().unwrap_or(0);
    let max_deg = items.iter().map(|(_, g)| g.len()).max().unwrap_or(0);
    for (a, g) in items {
        if g.len() > a + 1 {
            return Err(invalid(format!(
                "level polynomial of degree {} exceeds alpha {a}",
                g.len() - 1
            )));
        }
    }
    sum_over_nodes(rule, items.len(), |t, u, out| {
        let tt = (1.0 - t) * (1.0 - u);
        let pole = if (w * tt).norm() > 0.0 {
            vec![1.0 / (w * tt)]
        } else {
            vec![]
        };
        let radius = contour_radius(&pole)?;
        let mut qp = vec![C::new(0.0, 0.0); max_alpha + 1];
        let mut xp = vec![C::new(0.0, 0.0); max_deg.max(1)];
        for v in contour_nodes(m, radius) {
            let one_minus = 1.0 - w * tt * v;
            let p = 1.0 / one_minus;
            let base = one_minus.powf(-e);
            let q = (v - 1.0) * p / v;
            let x = w * t * u * p * p;
            qp[0] = C::new(1.0, 0.0);
            for k in 1..qp.len() {
                qp[k] = qp[k - 1] * q;
            }
            xp[0] = C::new(1.0, 0.0);
            for k in 1..xp.len() {
                xp[k] = xp[k - 1] * x;
            }
            for (slot, (alpha, g)) in out.iter_mut().zip(items) {
                let s: C = g.iter().enumerate().map(|(j, gj)| gj * xp[j] * qp[alpha - j]).sum();
                *slot += base * s;
            }
        }
        let scale = 1.0 / m as f64;
        out.iter_mut().for_each(|c| *c *= scale);
        if out.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(LameError::NonFinite("level integrand"));
        }
        Ok(())
    })
}

/// Level `L` applied to `g` with a symbolic outer variable `W`: the result is
/// a polynomial in `W` of degree `α`.
///
/// Expanding `(1 - W T v)^{-(e+α+j)}` in `W`, the coefficient of `W^d` is a
/// Laurent polynomial in `v` whose contour integral picks out the `v^{α-d}`
/// coefficient of `(v-1)^{α-j}`, namely `C(α-j, d-j)(-1)^{d-j}`.
pub(crate) fn level_polynomial(grid: &QuadratureGrid, level: usize, alpha: usize, g: &[C]) -> Result<Vec<C>> {
    if g.len() > alpha + 1 {
        return Err(invalid(format!(
            "level polynomial of degree {} exceeds alpha {alpha}",
            g.len() - 1
        )));
    }
    let rule = grid.level(level)?;
    let e = level_exponent(level, grid.lambda);
    // kappa[j][k] = (e+α+j)_k/k! · C(α-j, k) (-1)^k
    let kappa: Vec<Vec<f64>> = (0..g.len())
        .map(|j| {
            let r = rising_over_factorial(e + (alpha + j) as f64, alpha - j);
            let mut binom = 1.0;
            (0..=alpha - j)
                .map(|k| {
                    let v = r[k] * binom * if k % 2 == 0 { 1.0 } else { -1.0 };
                    binom = binom * (alpha - j - k) as f64 / (k + 1) as f64;
                    v
                })
                .collect()
        })
        .collect();
    sum_over_nodes(rule, alpha + 1, |t, u, out| {
        let tt = (1.0 - t) * (1.0 - u);
        let tu = t * u;
        let mut tup = 1.0;
        for (j, gj) in g.iter().enumerate() {
            let mut tp = 1.0;
            for d in j..=alpha {
                out[d] += gj * (tup * tp * kappa[j][d - j]);
                tp *= tt;
            }
            tup *= tu;
        }
        Ok(())
    })
}

/// `c_0 ξ^λ Σ_i (y0 coefficients) η^i`.
pub fn y0_term(lambda: f64, alpha0: usize, pt: &EvaluationPoint, c0: f64) -> f64 {
    let poly = y0_coefficients(alpha0, lambda);
    c0 * pt.xi.powf(lambda) * poly.iter().rev().fold(0.0, |acc, c| acc * pt.eta + c)
}

/// Order-`n` term of the integral representation for one α-chain.
pub fn y_n_term(
    params: &LameParams,
    lambda: IndicialExponent,
    n: usize,
    chain: &AlphaChain,
    pt: &EvaluationPoint,
    grid: &QuadratureGrid,
    op_power: OperatorPower,
    c0: f64,
) -> Result<f64> {
    let lam = lambda.value();
    let alphas = chain.as_slice();
    if alphas.len() < n + 1 {
        return Err(LameError::IndexOutOfRange(format!(
            "order {n} needs {} chain entries, got {}",
            n + 1,
            alphas.len()
        )));
    }
    if n == 0 {
        return Ok(y0_term(lam, alphas[0], pt, c0));
    }
    if grid.lambda != lam {
        return Err(invalid("quadrature grid was built for a different lambda"));
    }
    let mut poly: Vec<C> = y0_coefficients(alphas[0], lam).into_iter().map(C::from).collect();
    for level in 1..n {
        let g = apply_multipliers(params, level, lam, op_power, &poly);
        poly = level_polynomial(grid, level, alphas[level], &g)?;
    }
    let g = apply_multipliers(params, n, lam, op_power, &poly);
    let value = level_at_point(grid, n, &[(alphas[n], g)], C::new(pt.eta, 0.0))?[0];
    Ok(c0 * pt.xi.powf(lam) * pt.mu.powi(n as i32) * value.re)
}

/// `Σ_{n ≤ n_max} y_n` with one chain per order.
pub fn y_total(
    params: &LameParams,
    lambda: IndicialExponent,
    chains: &[AlphaChain],
    pt: &EvaluationPoint,
    n_max: usize,
    grid: &QuadratureGrid,
    op_power: OperatorPower,
    c0: f64,
) -> Result<f64> {
    if chains.len() < n_max + 1 {
        return Err(LameError::IndexOutOfRange(format!(
            "need {} chains, got {}",
            n_max + 1,
            chains.len()
        )));
    }
    (0..=n_max)
        .map(|n| y_n_term(params, lambda, n, &chains[n], pt, grid, op_power, c0))
        .sum()
}
