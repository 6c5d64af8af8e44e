//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lame3trf::genfn::{
    gf_lhs_order, gf_order1_contour_form, gf_remark, gf_verify_order, kernel_a, kernel_b, residue_closed,
    residue_contour, GFWeights, SolutionKind,
};
use lame3trf::integral::{w_arrow, w_tilde_value, OperatorPower, SParameters};
use lame3trf::lame::{
    algebraic_residual, b_numerator, build_series, heun_correspondence, heun_residual, ode_residual, termination_alpha,
    Branch, EvaluationPoint, IndicialExponent, LameParams, OdeForm, TerminationFamily,
};
use lame3trf::quadrature::QuadratureGrid;
use lame3trf::special::{gauss_2f1, lemma1_identity, pochhammer, ToleranceConfig};
use lame3trf::Complex64 as C;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Runs `f`, then folds the runtime limit into the verdict.
fn criterion(id: u32, name: &str, limit_s: Option<f64>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let secs = start.elapsed().as_secs_f64();
    let in_time = limit_s.map_or(true, |l| secs < l);
    let pass = o.pass && in_time;
    let limit = limit_s.map_or(String::new(), |l| format!(" (limit {l} s)"));
    println!(
        "{} C{id:<2} {name}: {}; {secs:.3} s{limit}",
        if pass { "PASS" } else { "FAIL" },
        o.detail
    );
    pass
}

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

fn c1_lemma1() -> Outcome {
    let mut worst = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut failures = 0;
    for &(g, a) in &[(0.75, 0.25), (1.25, 0.75), (1.3, 0.6)] {
        for &w in &[-0.3, -0.1, 0.1, 0.3] {
            for &x in &[-0.4, 0.0, 0.3] {
                let gap = lemma1_identity(g, a, c(w), c(x), 60)
                    .map(|r| r.gap)
                    .unwrap_or(f64::INFINITY);
                if !(gap < 1e-9) {
                    failures += 1;
                }
                if !(gap <= worst.0) {
                    worst = (gap, g, a, w, x);
                }
            }
        }
    }
    let (gap, g, a, w, x) = worst;
    outcome(
        failures == 0,
        format!("{failures}/36 grid points over 1e-9; max gap {gap:.3e} at (γ,A,w,x)=({g},{a},{w},{x})"),
    )
}

fn c2_recurrence() -> Outcome {
    let mut worst: f64 = 0.0;
    for h in [0.0, 1.0] {
        for alpha in [0.0, 3.0, 7.0] {
            for lam in [0.0, 0.5] {
                let par = LameParams::new(0.5, alpha, h).unwrap();
                let series = build_series(&par, lam, 40, 1.0).unwrap();
                let pt = EvaluationPoint::from_xi(0.1, 0.5).unwrap();
                let r = ode_residual(&series, &pt, OdeForm::Algebraic).unwrap().relative();
                worst = worst.max(r);
            }
        }
    }
    outcome(
        worst < 1e-12,
        format!("max relative residual {worst:.3e} (tol 1e-12) over 12 parameter sets"),
    )
}

fn c3_weierstrass() -> Outcome {
    let mut worst: f64 = 0.0;
    for h in [0.0, 1.0] {
        for alpha in [0.0, 3.0, 7.0] {
            for lam in [0.0, 0.5] {
                let par = LameParams::new(0.5, alpha, h).unwrap();
                let series = build_series(&par, lam, 40, 1.0).unwrap();
                let pt = EvaluationPoint::from_xi(0.1, 0.5).unwrap();
                let r = ode_residual(&series, &pt, OdeForm::Weierstrass).unwrap().relative();
                worst = worst.max(r);
            }
        }
    }
    outcome(worst < 1e-8, format!("max relative residual {worst:.3e} (tol 1e-8)"))
}

fn c4_termination() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=10usize {
        for lam in [0.0, 0.5] {
            let nl = n as f64 - 1.0 + lam;
            for alpha in [2.0 * nl, -2.0 * nl - 1.0] {
                let par = LameParams::new(0.5, alpha, 1.0).unwrap();
                let scale = (alpha * (alpha + 1.0)).abs().max(1.0);
                worst = worst.max(b_numerator(&par, lam, n as f64).abs() / scale);
            }
        }
    }
    // the same zeros through the termination families
    for i in 0..4 {
        for alpha_i in 0..4 {
            for branch in [Branch::Plus, Branch::Minus] {
                for lam in [0.0, 0.5] {
                    let fam = TerminationFamily { i, alpha_i, branch };
                    let alpha = termination_alpha(&fam, lam);
                    let par = LameParams::new(0.5, alpha, 1.0).unwrap();
                    let scale = (alpha * (alpha + 1.0)).abs().max(1.0);
                    worst = worst.max(b_numerator(&par, lam, fam.index() as f64).abs() / scale);
                }
            }
        }
    }
    outcome(
        worst < 1e-14,
        format!("max relative B numerator {worst:.3e} (tol 1e-14)"),
    )
}

fn samples() -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..100)
        .map(|_| {
            [
                rng.gen_range(0.01..0.35),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(-0.2..=-0.01),
            ]
        })
        .collect()
}

fn c5_residue() -> Outcome {
    let m = 512;
    let mut worst: f64 = 0.0;
    for [s, t, u, eta] in samples() {
        for lam in [0.0, 0.5] {
            let xt = eta * (1.0 - t) * (1.0 - u);
            let e = 0.25 + lam;
            // trapezoid rule on |v| = 1 for (1/2πi)∮ f dv
            let quad: C = (0..m)
                .map(|k| {
                    let v = C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
                    v * -(1.0 - xt * v).powf(-e) / (xt * v * v + (s - 1.0) * v - s)
                })
                .sum::<C>()
                / m as f64;
            let closed = residue_closed(s, t, u, eta, lam).unwrap();
            let lib = residue_contour(s, t, u, eta, lam, m).unwrap();
            worst = worst.max((quad - closed).norm()).max((lib - closed).norm());
        }
    }
    outcome(
        worst < 1e-10,
        format!("max |quadrature - residue| {worst:.3e} (tol 1e-10) on 100 samples × λ∈{{0,1/2}}"),
    )
}

fn c6_w_tilde() -> Outcome {
    let mut worst: f64 = 0.0;
    for [s, t, u, eta] in samples() {
        let tt = (1.0 - t) * (1.0 - u);
        let xt = eta * tt;
        // smaller root of ηT v² + (s-1) v - s, product form, one Newton step
        let mut v_in = -2.0 * s / ((1.0 - s) + ((1.0 - s) * (1.0 - s) + 4.0 * xt * s).sqrt());
        v_in -= (xt * v_in * v_in + (s - 1.0) * v_in - s) / (2.0 * xt * v_in + s - 1.0);
        let direct = v_in / (v_in - 1.0) * eta * t * u / (1.0 - eta * v_in * tt);
        let wt = w_tilde_value(s, t, u, c(eta)).unwrap();
        let lib = w_arrow(1, 1, c(v_in), t, u, c(eta), eta).unwrap();
        let scale = direct.abs().max(1e-300);
        worst = worst
            .max((wt - direct).norm() / scale)
            .max((lib - direct).norm() / scale);
    }
    outcome(
        worst < 1e-12,
        format!("max relative |w̃ - ↔w(v_in)| {worst:.3e} (tol 1e-12)"),
    )
}

fn standard_box() -> (LameParams, EvaluationPoint, SParameters) {
    (
        LameParams::new(0.5, 3.0, 1.0).unwrap(),
        EvaluationPoint::from_xi(0.1, 0.5).unwrap(),
        SParameters::new(vec![0.3, 0.2, 0.1]).unwrap(),
    )
}

fn c7_order0() -> Outcome {
    let (par, pt, s) = standard_box();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for gamma in [0.75, 1.25] {
        for lam in [IndicialExponent::Zero, IndicialExponent::Half] {
            let w = GFWeights::new(gamma, s.clone(), 60, 1.0).unwrap();
            let g = QuadratureGrid::new(lam.value(), 0, 16, 128).unwrap();
            let rep = gf_verify_order(&par, lam, &w, &pt, 0, &g, OperatorPower::Squared, 1e-8);
            worst = worst.max(rep.gap);
            parts.push(format!("(γ={gamma},λ={}) {:.1e}", lam.value(), rep.gap));
        }
    }
    // closed kernels for the two solution kinds
    for kind in [SolutionKind::First, SolutionKind::Second] {
        let w = GFWeights::new(kind.gamma(), s.clone(), 60, 1.0).unwrap();
        let g = QuadratureGrid::new(kind.lambda().value(), 0, 16, 128).unwrap();
        let lhs = gf_lhs_order(&par, kind.lambda(), &w, &pt, 0, &g, OperatorPower::Squared).unwrap();
        let closed = gf_remark(kind, &par, &s, &pt, &g, 0, OperatorPower::Squared).unwrap();
        worst = worst.max((lhs - closed).norm());
    }
    outcome(
        worst < 1e-8,
        format!("max gap {worst:.3e} (tol 1e-8); {}", parts.join(", ")),
    )
}

fn c8_order1() -> Outcome {
    let (par, pt, s) = standard_box();
    let lam = IndicialExponent::Zero;
    let grid = QuadratureGrid::new(lam.value(), 1, 64, 512).unwrap();
    let w = GFWeights::new(0.75, s, 30, 1.0).unwrap();
    let mut passing = Vec::new();
    let mut parts = Vec::new();
    for power in [OperatorPower::Linear, OperatorPower::Squared] {
        let rep = gf_verify_order(&par, lam, &w, &pt, 1, &grid, power, 1e-6);
        if rep.pass {
            passing.push(power.exponent());
        }
        let contour = gf_order1_contour_form(&par, lam, &w, &pt, &grid, power)
            .map(|c| format!("{:.1e}", (c - rep.lhs).norm()))
            .unwrap_or_else(|e| e.to_string());
        parts.push(format!(
            "power {}: gap {:.3e}, full-circle contour vs lhs {contour}",
            power.exponent(),
            rep.gap
        ));
    }
    let verdict = match passing.as_slice() {
        [p] => format!("power {p} passes"),
        [] => "no power passes".to_string(),
        _ => "both powers pass".to_string(),
    };
    outcome(
        passing.len() == 1,
        format!("{verdict} (tol 1e-6); {}", parts.join("; ")),
    )
}

fn c9_kernels() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut worst: f64 = 0.0;
    for &s in &[-0.3, -0.15, 0.0, 0.15, 0.3f64] {
        for &x in &[-0.2, -0.1, 0.0] {
            let (mut sa, mut sb) = (c(0.0), c(0.0));
            for n in 0..=120usize {
                let nf = n as f64;
                let fa = gauss_2f1(c(-nf), c(nf + 0.25), c(0.75), c(x), &tol).unwrap();
                let fb = gauss_2f1(c(-nf), c(nf + 0.75), c(1.25), c(x), &tol).unwrap();
                let sp = s.powi(n as i32) / pochhammer(1.0, n);
                sa += pochhammer(0.75, n) * sp * fa;
                sb += pochhammer(1.25, n) * sp * fb;
            }
            worst = worst
                .max((sa - 2f64.powf(-0.75) * kernel_a(s, c(x)).unwrap()).norm())
                .max((sb - 2f64.powf(-0.25) * kernel_b(s, c(x)).unwrap()).norm());
        }
    }
    let mut red: f64 = 0.0;
    for &x in &[-0.2, -0.1, 0.0] {
        red = red
            .max((2f64.powf(-0.75) * kernel_a(0.0, c(x)).unwrap() - 1.0).norm())
            .max((2f64.powf(-0.25) * kernel_b(0.0, c(x)).unwrap() - 1.0).norm());
    }
    outcome(
        worst < 1e-9 && red < 1e-14,
        format!("max series gap {worst:.3e} (tol 1e-9); s=0 reduction {red:.3e} (tol 1e-14)"),
    )
}

fn c10_heun() -> Outcome {
    let mut exact = true;
    for &(rho, h, alpha) in &[(0.5, 2.0, 3.0), (0.25, 1.0, 7.0), (0.5, 0.0, 0.0)] {
        let par = LameParams::new(rho, alpha, h).unwrap();
        let hp = heun_correspondence(&par);
        exact &= hp.gamma == 0.5 && hp.delta == 0.5 && hp.epsilon == 0.5;
        exact &= hp.a == 1.0 / (rho * rho) && hp.q == -h / (4.0 * rho * rho);
        exact &= hp.alpha * hp.beta == -alpha * (alpha + 1.0) / 4.0;
        exact &= hp.alpha + hp.beta + 1.0 == hp.gamma + hp.delta + hp.epsilon;
    }
    let par = LameParams::new(0.5, 3.0, 1.0).unwrap();
    let hp = heun_correspondence(&par);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ratios: Vec<f64> = (0..10)
        .map(|k| {
            let x = 0.05 + 0.09 * k as f64;
            let (y, dy, d2y) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            heun_residual(&hp, x, y, dy, d2y).unwrap().value / algebraic_residual(&par, x, y, dy, d2y).unwrap().value
        })
        .collect();
    let spread = ratios.iter().map(|r| (r - ratios[0]).abs()).fold(0.0, f64::max);
    outcome(
        exact && spread < 1e-10,
        format!(
            "map exact: {exact}; residual ratio {:.12} with spread {spread:.3e} (tol 1e-10) at 10 points",
            ratios[0]
        ),
    )
}

fn c11_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lame3trf");
    let dir = std::env::temp_dir().join(format!("lame3trf-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let runs: &[&[&str]] = &[
        &["eval-series", "--xi", "0.2", "--alpha", "7", "--lambda", "0.5"],
        &["eval-sn", "--z", "0.7", "--format", "json"],
        &[
            "heun-map", "--rho", "0.5", "--h", "2", "--alpha", "3", "--format", "json",
        ],
        &["verify", "residue", "--format", "json"],
        &["verify", "gf-order0", "--gamma", "1.25", "--lambda", "0.5"],
        &[
            "verify",
            "gf-order1",
            "--nq",
            "16",
            "--contour-m",
            "128",
            "--amax",
            "10",
            "--format",
            "json",
        ],
        &[
            "sweep",
            "--target",
            "gf-order0",
            "--grid",
            "s0=0.1,0.2,0.3",
            "--format",
            "json",
        ],
        &["sweep", "--target", "eval-series", "--grid", "h=0:2:3;xi=0.1,0.3"],
    ];
    let mut identical = 0;
    let mut notes = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|k| {
                let path: PathBuf = dir.join(format!("run{i}_{k}"));
                Command::new(bin).args(*args).arg("--out").arg(&path).output().unwrap();
                fs::read(&path).unwrap_or_default()
            })
            .collect();
        if !outs[0].is_empty() && outs[0] == outs[1] {
            identical += 1;
        } else {
            notes.push(args.join(" "));
        }
    }
    let _ = fs::remove_dir_all(&dir);
    outcome(
        identical == runs.len(),
        format!(
            "{identical}/{} commands byte-identical across two runs{}",
            runs.len(),
            if notes.is_empty() {
                String::new()
            } else {
                format!("; differing: {}", notes.join(" | "))
            }
        ),
    )
}

fn main() {
    let results = [
        criterion(1, "Lemma 1 generating function, N=60", Some(1.0), c1_lemma1),
        criterion(2, "recurrence satisfies the algebraic form", Some(1.0), c2_recurrence),
        criterion(3, "series satisfies the Weierstrass form", Some(1.0), c3_weierstrass),
        criterion(4, "B numerator vanishes at terminating α", Some(0.1), c4_termination),
        criterion(5, "contour quadrature equals residue, M=512", Some(5.0), c5_residue),
        criterion(6, "w̃ equals ↔w at the interior pole", Some(1.0), c6_w_tilde),
        criterion(7, "order-0 generating identity, K=2, A=60", Some(5.0), c7_order0),
        criterion(
            8,
            "order-1 generating identity, A=30, 64×64, M=512",
            Some(60.0),
            c8_order1,
        ),
        criterion(9, "kernel resummation and s=0 reductions", Some(1.0), c9_kernels),
        criterion(10, "Heun map and residual proportionality", Some(1.0), c10_heun),
        criterion(11, "CLI output is byte-identical across runs", None, c11_determinism),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
