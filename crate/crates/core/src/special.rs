//! Hypergeometric and Jacobi-polynomial kernels.

use num_complex::Complex64;

use crate::error::{invalid, LameError, Result};

pub type ComplexValue = Complex64;

/// Stopping rule for infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_terms: 200,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        if max_terms == 0 {
            return Err(invalid("max_terms must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_terms,
        })
    }
}

/// Returns `Some(n)` when `z` is the non-positive integer `-n` (within 1e-12).
pub fn nonpositive_integer(z: Complex64) -> Option<usize> {
    let r = z.re.round();
    if z.im.abs() < 1e-12 && (z.re - r).abs() < 1e-12 && r <= 0.0 {
        Some((-r) as usize)
    } else {
        None
    }
}

/// Rising factorial `(x)_n`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

pub fn pochhammer_c(x: Complex64, n: usize) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (x + k as f64))
}

/// Gauss hypergeometric series `2F1(a, b; c; x)`.
///
/// Terminates exactly when `a` or `b` is a non-positive integer; otherwise
/// requires `|x| < 1` and sums until the running term drops below tolerance.
pub fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, x: Complex64, tol: &ToleranceConfig) -> Result<Complex64> {
    let limit = match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(m), Some(n)) => Some(m.min(n)),
        (m, n) => m.or(n),
    };
    if let Some(n) = nonpositive_integer(c) {
        if limit.map_or(true, |m| m >= n) {
            return Err(invalid(format!("2F1 lower parameter c = {c} is a pole")));
        }
    }
    if limit.is_none() && x.norm() >= 1.0 {
        return Err(LameError::NonConvergence(format!(
            "2F1 with |x| = {} outside the unit disk",
            x.norm()
        )));
    }
    if let Some(m) = limit {
        if [a, b, c, x].iter().all(|z| z.im == 0.0) {
            return Ok(Complex64::new(terminating_2f1_real(a.re, b.re, c.re, x.re, m), 0.0));
        }
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = sum;
    let mut k = 0usize;
    loop {
        match limit {
            Some(m) if k == m => break,
            None if k >= tol.max_terms => {
                return Err(LameError::NonConvergence(format!(
                    "2F1 needed more than {} terms",
                    tol.max_terms
                )))
            }
            _ => {}
        }
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        k += 1;
        if limit.is_none() && term.norm() <= tol.abs_tol.max(tol.rel_tol * sum.norm()) {
            break;
        }
    }
    if !(sum.re.is_finite() && sum.im.is_finite()) {
        return Err(LameError::NonFinite("2F1"));
    }
    Ok(sum)
}

/// Double-double value `hi + lo`.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        quick_two_sum(s.0, s.1 + self.1 + o.1)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        quick_two_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.0 / o.0;
        let r = self.add(o.mul(Dd(-q1, 0.0)));
        let q2 = r.0 / o.0;
        let r = r.add(o.mul(Dd(-q2, 0.0)));
        let q3 = r.0 / o.0;
        quick_two_sum(q1, q2).add(Dd(q3, 0.0))
    }
}

/// Real terminating series summed in double-double, since its terms
/// can cancel by several orders of magnitude.
fn terminating_2f1_real(a: f64, b: f64, c: f64, x: f64, m: usize) -> f64 {
    let mut sum = Dd(1.0, 0.0);
    let mut term = Dd(1.0, 0.0);
    for k in 0..m {
        let kf = k as f64;
        let num = two_sum(a, kf).mul(two_sum(b, kf)).mul(Dd(x, 0.0));
        let den = two_sum(c, kf).mul(Dd(kf + 1.0, 0.0));
        term = term.mul(num).div(den);
        sum = sum.add(term);
    }
    sum.0 + sum.1
}

/// Jacobi polynomial `P_n^{(a,b)}(x)`.
///
/// Uses the three-term recurrence, falling back to the finite sum
/// `Σ_m C(n+a, n-m) C(n+b, m) ((x-1)/2)^m ((x+1)/2)^{n-m}` (written with
/// Pochhammer products, so never singular) when a recurrence denominator
/// vanishes.
pub fn jacobi_polynomial(n: usize, a: f64, b: f64, x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if n == 0 {
        return one;
    }
    let degenerate = (2..=n).any(|k| {
        let kf = k as f64;
        (kf + a + b) * (2.0 * kf + a + b - 2.0) == 0.0
    });
    if degenerate {
        return jacobi_binomial_sum(n, a, b, x);
    }
    let mut p0 = one;
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
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
    p1
}

pub(crate) fn jacobi_binomial_sum(n: usize, a: f64, b: f64, x: Complex64) -> Complex64 {
    let ym = (x - 1.0) * 0.5;
    let yp = (x + 1.0) * 0.5;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..=n {
        let c = pochhammer(a + m as f64 + 1.0, n - m) / pochhammer(1.0, n - m)
            * pochhammer(b + (n - m) as f64 + 1.0, m)
            / pochhammer(1.0, m);
        sum += c * ym.powu(m as u32) * yp.powu((n - m) as u32);
    }
    sum
}

/// Closed form of `Σ_n P_n^{(a,b)}(x) w^n`:
/// `2^{a+b} R^{-1} (1 - w + R)^{-a} (1 + w + R)^{-b}` with
/// `R = sqrt(1 - 2 x w + w²)` on the principal branch.
pub fn jacobi_gf_closed(a: f64, b: f64, x: Complex64, w: Complex64) -> Result<Complex64> {
    let r = (1.0 - 2.0 * x * w + w * w).sqrt();
    if r.norm() == 0.0 {
        return Err(LameError::SingularRadicand("jacobi_gf_closed"));
    }
    let one = Complex64::new(1.0, 0.0);
    let p = one - w + r;
    let q = one + w + r;
    if (a != 0.0 && p.norm() == 0.0) || (b != 0.0 && q.norm() == 0.0) {
        return Err(LameError::SingularRadicand("jacobi_gf_closed"));
    }
    Ok(2f64.powf(a + b) / r * p.powf(-a) * q.powf(-b))
}

/// Both sides of the terminating-hypergeometric generating function identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Report {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
}

/// Compares `Σ_{n≤N} (γ)_n/n! w^n 2F1(-n, n+A; γ; x)` with
/// `2^{A-1} (1-w+R)^{1-γ} (1+w+R)^{γ-A} / R`, `R = √(w² - 2(1-2x)w + 1)`.
pub fn lemma1_identity(gamma: f64, big_a: f64, w: Complex64, x: Complex64, n: usize) -> Result<Lemma1Report> {
    let tol = ToleranceConfig::default();
    let g = Complex64::new(gamma, 0.0);
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut coef = 1.0;
    let mut wp = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        let kf = k as f64;
        let f = gauss_2f1(Complex64::new(-kf, 0.0), Complex64::new(kf + big_a, 0.0), g, x, &tol)?;
        lhs += coef * wp * f;
        coef *= (gamma + kf) / (kf + 1.0);
        wp *= w;
    }
    let rhs = jacobi_gf_closed(gamma - 1.0, big_a - gamma, 1.0 - 2.0 * x, w)?;
    Ok(Lemma1Report {
        lhs,
        rhs,
        gap: (lhs - rhs).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn pochhammer_basics() {
        assert_eq!(pochhammer(3.0, 0), 1.0);
        assert_eq!(pochhammer(1.0, 5), 120.0);
        assert_eq!(pochhammer(-2.0, 3), 0.0);
    }

    #[test]
    fn two_f1_terminating_is_exact() {
        // 2F1(-2, b; c; x) = 1 - 2bx/c + b(b+1)x²/(c(c+1))
        let tol = ToleranceConfig::default();
        let (b, cc, x) = (1.5, 0.75, 0.37);
        let v = gauss_2f1(c(-2.0), c(b), c(cc), c(x), &tol).unwrap();
        let expect = 1.0 - 2.0 * b * x / cc + b * (b + 1.0) * x * x / (cc * (cc + 1.0));
        assert!((v.re - expect).abs() < 1e-15);
        // termination through b as well
        let v2 = gauss_2f1(c(b), c(-2.0), c(cc), c(x), &tol).unwrap();
        assert!((v - v2).norm() < 1e-15);
        // terminating series do not need |x| < 1
        assert!(gauss_2f1(c(-3.0), c(2.0), c(1.0), c(5.0), &tol).is_ok());
    }

    #[test]
    fn two_f1_elementary_cases() {
        let tol = ToleranceConfig {
            abs_tol: 1e-17,
            rel_tol: 1e-17,
            max_terms: 5000,
        };
        // 2F1(1,1;2;x) = -ln(1-x)/x
        let x = 0.4;
        let v = gauss_2f1(c(1.0), c(1.0), c(2.0), c(x), &tol).unwrap();
        assert!((v.re + (1.0 - x).ln() / x).abs() < 1e-14);
        // 2F1(a,b;b;x) = (1-x)^{-a}
        let v = gauss_2f1(c(0.3), c(1.7), c(1.7), c(-0.6), &tol).unwrap();
        assert!((v.re - 1.6f64.powf(-0.3)).abs() < 1e-14);
    }

    #[test]
    fn two_f1_errors() {
        let tol = ToleranceConfig::default();
        assert!(matches!(
            gauss_2f1(c(0.5), c(0.5), c(1.0), c(1.2), &tol),
            Err(LameError::NonConvergence(_))
        ));
        assert!(matches!(
            gauss_2f1(c(0.5), c(0.5), c(-1.0), c(0.2), &tol),
            Err(LameError::InvalidParameter(_))
        ));
        let tight = ToleranceConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_terms: 10,
        };
        assert!(matches!(
            gauss_2f1(c(0.5), c(0.5), c(1.0), c(0.9), &tight),
            Err(LameError::NonConvergence(_))
        ));
    }

    #[test]
    fn jacobi_polynomial_low_orders() {
        let (a, b) = (0.3, -0.4);
        let x = c(0.7);
        assert!((jacobi_polynomial(0, a, b, x) - 1.0).norm() < 1e-15);
        let p1 = (a + 1.0) + (a + b + 2.0) * (0.7 - 1.0) / 2.0;
        assert!((jacobi_polynomial(1, a, b, x).re - p1).abs() < 1e-15);
        // a + b = -2 forces the finite-sum path
        // P_2 = ½[(a+1)(a+2) + 2(a+2)(a+b+3)y + (a+b+3)(a+b+4)y²], y = (x-1)/2
        let (aa, bb) = (-0.5, -1.5);
        let y = (0.7 - 1.0) / 2.0;
        let p2 = 0.5
            * ((aa + 1.0) * (aa + 2.0)
                + 2.0 * (aa + 2.0) * (aa + bb + 3.0) * y
                + (aa + bb + 3.0) * (aa + bb + 4.0) * y * y);
        assert!((jacobi_polynomial(2, aa, bb, x).re - p2).abs() < 1e-15);
        // Legendre P_3
        let l3 = 0.5 * (5.0 * 0.7f64.powi(3) - 3.0 * 0.7);
        assert!((jacobi_polynomial(3, 0.0, 0.0, x).re - l3).abs() < 1e-14);
        // P_n^{(a,b)}(1) = (a+1)_n / n!
        let v = jacobi_polynomial(5, a, b, c(1.0)).re;
        assert!((v - pochhammer(a + 1.0, 5) / 120.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_polynomial_matches_three_term_recurrence() {
        let (a, b, x) = (0.5f64, 1.25f64, 0.31f64);
        let mut p = vec![1.0, (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0];
        for n in 2..15usize {
            let nf = n as f64;
            let s = 2.0 * nf + a + b;
            let lhs = 2.0 * nf * (nf + a + b) * (s - 2.0);
            let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
            let c2 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s;
            p.push((c1 * p[n - 1] - c2 * p[n - 2]) / lhs);
        }
        for (n, &pn) in p.iter().enumerate() {
            let err = (jacobi_polynomial(n, a, b, c(x)).re - pn).abs();
            assert!(err < 1e-13 * pn.abs().max(1.0), "n={n} err={err:e}");
            let err = (jacobi_binomial_sum(n, a, b, c(x)).re - pn).abs();
            assert!(err < 1e-12 * pn.abs().max(1.0), "n={n} err={err:e}");
        }
    }

    #[test]
    fn jacobi_relates_to_terminating_2f1() {
        // 2F1(-n, n+a+b+1; a+1; x) = n!/(a+1)_n P_n^{(a,b)}(1-2x)
        let tol = ToleranceConfig::default();
        let (a, b, x) = (0.25, 0.5, 0.2);
        for n in 0..8usize {
            let nf = n as f64;
            let f = gauss_2f1(c(-nf), c(nf + a + b + 1.0), c(a + 1.0), c(x), &tol).unwrap();
            let p = jacobi_polynomial(n, a, b, c(1.0 - 2.0 * x));
            let g = pochhammer(1.0, n) / pochhammer(a + 1.0, n) * p;
            assert!((f - g).norm() < 1e-13);
        }
    }

    #[test]
    fn jacobi_gf_closed_matches_partial_sums() {
        let (a, b) = (0.4, -0.3);
        let x = Complex64::new(0.2, 0.1);
        let w = Complex64::new(0.15, -0.05);
        let mut s = Complex64::new(0.0, 0.0);
        let mut wp = Complex64::new(1.0, 0.0);
        for n in 0..80 {
            s += jacobi_polynomial(n, a, b, x) * wp;
            wp *= w;
        }
        let g = jacobi_gf_closed(a, b, x, w).unwrap();
        assert!((s - g).norm() < 1e-13);
        assert!(jacobi_gf_closed(a, b, c(1.0), c(1.0)).is_err());
    }

    #[test]
    fn lemma1_trivial_cases() {
        // w = 0: both sides are 1
        let r = lemma1_identity(0.75, 1.25, c(0.0), c(0.3), 10).unwrap();
        assert!(r.gap < 1e-15);
        // x = 0: Σ (γ)_n/n! w^n = (1-w)^{-γ}
        let r = lemma1_identity(0.75, 1.25, c(0.2), c(0.0), 60).unwrap();
        assert!(r.gap < 1e-15, "{}", r.gap);
        let r = lemma1_identity(0.75, 0.25, c(0.2), c(-0.3), 60).unwrap();
        assert!(r.gap < 1e-9, "{}", r.gap);
    }
}
