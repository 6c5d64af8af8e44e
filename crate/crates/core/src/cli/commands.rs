//! Individual commands.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::output::{Field, Record, Report};
use super::{CliError, PointSpec, RunConfig, VerifyTarget};
use crate::elliptic::{jacobi_elliptic, z_from_xi};
use crate::genfn::{
    gamma_weights, gf_order1_contour_form, gf_verify_order, kernel_a, kernel_b, kernel_gamma, kernel_psi,
    residue_closed, residue_contour, upsilon, GFWeights,
};
use crate::integral::{pole_locations, w_arrow, w_tilde_value};
use crate::lame::{build_series, heun_correspondence, ode_residual, EvaluationPoint, OdeForm};
use crate::quadrature::QuadratureGrid;
use crate::special::lemma1_identity;
use crate::Complex64 as C;

type Params = BTreeMap<String, Field>;

fn base_params(cfg: &RunConfig, pt: &EvaluationPoint) -> Params {
    let mut p = Params::new();
    p.insert("rho".into(), cfg.rho.into());
    p.insert("h".into(), cfg.h.into());
    p.insert("alpha".into(), cfg.alpha.into());
    p.insert("lambda".into(), cfg.lambda.value().into());
    p.insert("xi".into(), pt.xi.into());
    if let Some(z) = pt.z {
        p.insert("z".into(), z.into());
    }
    p
}

fn gf_params(cfg: &RunConfig, pt: &EvaluationPoint, order: usize, a_max: usize) -> Params {
    let mut p = base_params(cfg, pt);
    p.insert("order".into(), order.into());
    p.insert("gamma".into(), cfg.gamma.into());
    p.insert("k".into(), cfg.s.k().into());
    for (i, s) in cfg.s.values().iter().enumerate() {
        p.insert(format!("s_{i}"), (*s).into());
    }
    p.insert("a_max".into(), a_max.into());
    if order > 0 {
        p.insert("nq".into(), cfg.nq.into());
        p.insert("contour_m".into(), cfg.contour_m.into());
        p.insert("op_power".into(), (cfg.op_power.exponent() as usize).into());
    }
    p
}

pub fn eval_series(cfg: &RunConfig) -> Result<Record, CliError> {
    let params = cfg.params()?;
    let pt = cfg.point()?;
    let n = cfg.n_terms.unwrap_or(40);
    let series = build_series(&params, cfg.lambda.value(), n, cfg.c0)?;
    let y = series.eval(pt.xi)?;
    let (d1, d2) = match series.eval_with_derivatives(pt.xi) {
        Ok((_, d1, d2)) => (d1, d2),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let mut r = Record::default();
    r.push("rho", cfg.rho);
    r.push("h", cfg.h);
    r.push("alpha", cfg.alpha);
    r.push("lambda", cfg.lambda.value());
    if let Some(z) = pt.z {
        r.push("z", z);
    }
    r.push("xi", pt.xi);
    r.push("n_terms", n);
    r.push("y", y);
    r.push("dy_dxi", d1);
    r.push("d2y_dxi2", d2);
    Ok(r)
}

pub fn eval_sn(cfg: &RunConfig) -> Result<Record, CliError> {
    let z = match cfg.point {
        PointSpec::Z(z) => z,
        PointSpec::Xi(xi) => z_from_xi(xi, cfg.rho)?,
    };
    let j = jacobi_elliptic(z, cfg.rho)?;
    let mut r = Record::default();
    r.push("rho", cfg.rho);
    r.push("z", z);
    r.push("sn", j.sn);
    r.push("cn", j.cn);
    r.push("dn", j.dn);
    r.push("xi", j.sn * j.sn);
    Ok(r)
}

pub fn heun_map(cfg: &RunConfig) -> Result<Record, CliError> {
    let hp = heun_correspondence(&cfg.params()?);
    let mut r = Record::default();
    r.push("rho", cfg.rho);
    r.push("h", cfg.h);
    r.push("alpha", cfg.alpha);
    r.push("heun_a", hp.a);
    r.push("heun_q", hp.q);
    r.push("heun_alpha", hp.alpha);
    r.push("heun_beta", hp.beta);
    r.push("heun_gamma", hp.gamma);
    r.push("heun_delta", hp.delta);
    r.push("heun_epsilon", hp.epsilon);
    Ok(r)
}

pub fn verify(cfg: &RunConfig, target: VerifyTarget) -> Result<Vec<Report>, CliError> {
    match target {
        VerifyTarget::Lemma1 => lemma1(cfg),
        VerifyTarget::Ode => ode(cfg),
        VerifyTarget::Residue => residue(cfg),
        VerifyTarget::GfOrder0 => gf_order(cfg, 0),
        VerifyTarget::GfOrder1 => gf_order(cfg, 1),
        VerifyTarget::GfOrder2 => gf_order(cfg, 2),
        VerifyTarget::Kernels => kernels(cfg),
    }
}

pub const LEMMA1_GRID: [(f64, f64); 3] = [(0.75, 0.25), (1.25, 0.75), (1.3, 0.6)];
pub const LEMMA1_W: [f64; 4] = [-0.3, -0.1, 0.1, 0.3];
pub const LEMMA1_X: [f64; 3] = [-0.4, 0.0, 0.3];

fn lemma1(cfg: &RunConfig) -> Result<Vec<Report>, CliError> {
    let n = cfg.n_terms.unwrap_or(60);
    let tol = cfg.tol.unwrap_or(1e-9);
    let mut out = Vec::new();
    for &(g, a) in &LEMMA1_GRID {
        for &w in &LEMMA1_W {
            for &x in &LEMMA1_X {
                let mut p = Params::new();
                p.insert("gamma".into(), g.into());
                p.insert("big_a".into(), a.into());
                p.insert("w".into(), w.into());
                p.insert("x".into(), x.into());
                p.insert("n".into(), n.into());
                let (wc, xc) = (C::new(w, 0.0), C::new(x, 0.0));
                let rep = lemma1_identity(g, a, wc, xc, n).and_then(|r| {
                    let prev = lemma1_identity(g, a, wc, xc, n.saturating_sub(1))?;
                    Ok((r, (r.lhs - prev.lhs).norm()))
                });
                out.push(match rep {
                    Ok((r, tail)) => Report::new("verify lemma1", p, r.lhs, r.rhs, r.gap, tail, tol),
                    Err(e) => Report::failed("verify lemma1", p, &e),
                });
            }
        }
    }
    Ok(out)
}

pub fn ode(cfg: &RunConfig) -> Result<Vec<Report>, CliError> {
    let params = cfg.params()?;
    let pt = cfg.point()?;
    let n = cfg.n_terms.unwrap_or(40);
    let series = build_series(&params, cfg.lambda.value(), n, cfg.c0)?;
    let tail = (series.coeffs[n] * pt.xi.powf(n as f64 + cfg.lambda.value())).abs();
    let zero = C::new(0.0, 0.0);
    let mut out = Vec::new();
    for (form, name, default_tol) in [
        (OdeForm::Algebraic, "algebraic", 1e-12),
        (OdeForm::Weierstrass, "weierstrass", 1e-8),
    ] {
        let mut p = base_params(cfg, &pt);
        p.insert("form".into(), name.into());
        p.insert("n_terms".into(), n.into());
        let tol = cfg.tol.unwrap_or(default_tol);
        out.push(match ode_residual(&series, &pt, form) {
            Ok(r) => Report::new("verify ode", p, C::new(r.value, 0.0), zero, r.relative(), tail, tol),
            Err(e) => Report::failed("verify ode", p, &e),
        });
    }
    Ok(out)
}

/// Sample box of the residue checks: `s ∈ (0.01, 0.35)`, `t, u ∈ (0, 1)`,
/// `η ∈ [-0.2, -0.01]`.
pub fn residue_samples(seed: u64, n: usize) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            [
                rng.gen_range(0.01..0.35),
                rng.gen_range(1e-6..1.0 - 1e-6),
                rng.gen_range(1e-6..1.0 - 1e-6),
                rng.gen_range(-0.2..=-0.01),
            ]
        })
        .collect()
}

fn residue(cfg: &RunConfig) -> Result<Vec<Report>, CliError> {
    let lam = cfg.lambda.value();
    let mut out = Vec::new();
    for [s, t, u, eta] in residue_samples(cfg.seed, cfg.samples) {
        let mut p = Params::new();
        p.insert("s".into(), s.into());
        p.insert("t".into(), t.into());
        p.insert("u".into(), u.into());
        p.insert("eta".into(), eta.into());
        p.insert("lambda".into(), lam.into());
        p.insert("contour_m".into(), cfg.contour_m.into());
        let mut pk = p.clone();
        pk.insert("check".into(), "kernel".into());
        let kernel =
            residue_contour(s, t, u, eta, lam, cfg.contour_m).and_then(|l| Ok((l, residue_closed(s, t, u, eta, lam)?)));
        out.push(match kernel {
            Ok((l, r)) => Report::new(
                "verify residue",
                pk,
                l,
                r,
                (l - r).norm(),
                0.0,
                cfg.tol.unwrap_or(1e-10),
            ),
            Err(e) => Report::failed("verify residue", pk, &e),
        });
        let mut pw = p;
        pw.insert("check".into(), "w_tilde".into());
        let x = C::new(eta, 0.0);
        let wt = w_tilde_value(s, t, u, x).and_then(|l| {
            let v_in = pole_locations(s, t, u, x)?.v_in;
            Ok((l, w_arrow(1, 1, v_in, t, u, x, eta)?))
        });
        out.push(match wt {
            Ok((l, r)) => Report::new(
                "verify residue",
                pw,
                l,
                r,
                (l - r).norm(),
                0.0,
                cfg.tol.unwrap_or(1e-12),
            ),
            Err(e) => Report::failed("verify residue", pw, &e),
        });
    }
    Ok(out)
}

fn gf_order(cfg: &RunConfig, order: usize) -> Result<Vec<Report>, CliError> {
    let params = cfg.params()?;
    let pt = cfg.point()?;
    let a_max = cfg.a_max.unwrap_or(if order == 0 { 60 } else { 30 });
    let weights = GFWeights::new(cfg.gamma, cfg.s.clone(), a_max, cfg.c0).map_err(super::usage)?;
    let grid = if order == 0 {
        QuadratureGrid::new(cfg.lambda.value(), 0, 16, 128)?
    } else {
        QuadratureGrid::new(cfg.lambda.value(), order, cfg.nq, cfg.contour_m)?
    };
    let tol = cfg.tol.unwrap_or(match order {
        0 => 1e-8,
        _ => 1e-6,
    });
    let command = format!("verify gf-order{order}");
    let p = gf_params(cfg, &pt, order, a_max);
    let rep = gf_verify_order(&params, cfg.lambda, &weights, &pt, order, &grid, cfg.op_power, tol);
    let mut out = vec![match &rep.error {
        None => Report::new(
            &command,
            p.clone(),
            rep.lhs,
            rep.rhs,
            rep.gap,
            rep.truncation_estimate,
            tol,
        ),
        Some(msg) => Report::failed(&command, p.clone(), &crate::LameError::NonConvergence(msg.clone())),
    }];
    if order == 1 && rep.error.is_none() {
        // the same integrand over the full unit circle, before the residue step
        let mut pc = p;
        pc.insert("check".into(), "contour_form".into());
        out.push(
            match gf_order1_contour_form(&params, cfg.lambda, &weights, &pt, &grid, cfg.op_power) {
                Ok(c) => Report::new(
                    &command,
                    pc,
                    rep.lhs,
                    c,
                    (rep.lhs - c).norm(),
                    rep.truncation_estimate,
                    tol,
                ),
                Err(e) => Report::failed(&command, pc, &e),
            },
        );
    }
    Ok(out)
}

pub const KERNEL_S: [f64; 7] = [-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3];
pub const KERNEL_X: [f64; 3] = [-0.2, -0.1, 0.0];

fn kernels(cfg: &RunConfig) -> Result<Vec<Report>, CliError> {
    let a_max = cfg.a_max.unwrap_or(120);
    let tol_sum = cfg.tol.unwrap_or(1e-9);
    let tol_red = cfg.tol.unwrap_or(1e-14);
    // ξ = 1 removes the ξ^λ factor carried by Υ
    let unit = EvaluationPoint::from_xi(1.0, cfg.rho).map_err(super::usage)?;
    let mut out = Vec::new();
    for (name, lam, gamma, pre, k) in [
        (
            "a",
            0.0,
            0.75,
            2f64.powf(-0.75),
            kernel_a as fn(f64, C) -> crate::Result<C>,
        ),
        ("b", 0.5, 1.25, 2f64.powf(-0.25), kernel_b),
    ] {
        for &s in &KERNEL_S {
            for &x in &KERNEL_X {
                let mut p = Params::new();
                p.insert("kernel".into(), name.into());
                p.insert("s".into(), s.into());
                p.insert("x".into(), x.into());
                p.insert("a_max".into(), a_max.into());
                let xc = C::new(x, 0.0);
                let lhs = upsilon(lam, gamma, s, xc, &unit, a_max, 1.0);
                let tail = (gamma_weights(gamma, a_max)[a_max] * s.abs().powi(a_max as i32)) * a_max as f64;
                out.push(match k(s, xc) {
                    Ok(v) => Report::new(
                        "verify kernels",
                        p.clone(),
                        lhs,
                        pre * v,
                        (lhs - pre * v).norm(),
                        tail,
                        tol_sum,
                    ),
                    Err(e) => Report::failed("verify kernels", p.clone(), &e),
                });
                if s == 0.0 {
                    let mut pr = p;
                    pr.insert("check".into(), "s_zero".into());
                    pr.remove("a_max");
                    let one = C::new(1.0, 0.0);
                    out.push(match k(0.0, xc) {
                        Ok(v) => Report::new("verify kernels", pr, pre * v, one, (pre * v - one).norm(), 0.0, tol_red),
                        Err(e) => Report::failed("verify kernels", pr, &e),
                    });
                }
            }
        }
    }
    let (t, u) = (0.3, 0.6);
    for level in 1..=cfg.n_max {
        for (name, k) in [
            (
                "gamma",
                kernel_gamma as fn(usize, usize, f64, f64, f64, C) -> crate::Result<C>,
            ),
            ("psi", kernel_psi),
        ] {
            for &x in &KERNEL_X {
                let mut p = Params::new();
                p.insert("kernel".into(), name.into());
                p.insert("level".into(), level.into());
                p.insert("x".into(), x.into());
                p.insert("check".into(), "s_zero".into());
                let one = C::new(1.0, 0.0);
                out.push(match k(level, 0, 0.0, t, u, C::new(x, 0.0)) {
                    Ok(v) => Report::new("verify kernels", p, v, one, (v - one).norm(), 0.0, tol_red),
                    Err(e) => Report::failed("verify kernels", p, &e),
                });
            }
        }
    }
    Ok(out)
}
