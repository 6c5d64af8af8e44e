//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

/// `y_n` for one α-chain as a finite sum over recurrence paths.
///
/// Starting from `c_0` at index 0, level `L` takes up to `α_L` (cumulative)
/// two-index steps `c_{p+2} = B_{p+1} c_p` with the Lamé parameter
/// `α = 2(2α_L + L + λ)`; consecutive levels are joined by one step
/// `c_{p+1} = A_p c_p`. Each path contributes `amp · ξ^{p+λ}`.
pub fn path_sum(rho: f64, h: f64, lambda: f64, chain: &[usize], xi: f64, c0: f64) -> f64 {
    let a = 1.0 / (rho * rho);
    let d = |k: f64| 2.0 * a * (k + 1.0 + lambda) * (2.0 * k + 2.0 * lambda + 1.0);
    let big_a = |k: f64| (4.0 * (1.0 + a) * (k + lambda) * (k + lambda) - h * a) / d(k);
    let big_b = |k: f64, al: f64| (al * (al + 1.0) - 2.0 * (k - 1.0 + lambda) * (2.0 * (k + lambda) - 1.0)) / d(k);
    // (index, cumulative B steps, amplitude)
    let mut states = vec![(0usize, 0usize, c0)];
    for (level, &al) in chain.iter().enumerate() {
        let lam_alpha = 2.0 * (2.0 * al as f64 + level as f64 + lambda);
        let mut next = Vec::new();
        for &(p0, used0, amp0) in &states {
            let (mut p, mut used, mut amp) = (p0, used0, amp0);
            next.push((p, used, amp));
            while used < al {
                amp *= big_b(p as f64 + 1.0, lam_alpha);
                p += 2;
                used += 1;
                next.push((p, used, amp));
            }
            assert!(big_b(p as f64 + 1.0, lam_alpha).abs() < 1e-12 || used < al || used0 > al);
        }
        if level + 1 < chain.len() {
            states = next
                .into_iter()
                .map(|(p, used, amp)| (p + 1, used, amp * big_a(p as f64)))
                .collect();
        } else {
            states = next;
        }
    }
    states.iter().map(|&(p, _, amp)| amp * xi.powf(p as f64 + lambda)).sum()
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
