//! The verification suite: one check per documented acceptance criterion,
//! shared by the `verify` subcommand and the integration tests.

use serde::{Deserialize, Serialize};

use tsd_core::bias::{bias_moment, BiasDistribution};
use tsd_core::bounds::{
    bound_h3_two_tsd, m_alpha, m_alpha_closed_form, rate_sweep, SweepSpec,
};
use tsd_core::charfn::{psi_tempered, psi_tempered_quadrature, CharFn};
use tsd_core::distance::{kolmogorov, smooth_h3_lower_laws};
use tsd_core::error::Error;
use tsd_core::inversion::NumericLaw;
use tsd_core::model::StableParams;
use tsd_core::sampling::{sample_batch, sample_tempered, RngStream};
use tsd_core::special::{normal_cdf, upper_incomplete_gamma};
use tsd_core::stein::{
    expectation_of, solve_stein, stein_apply, stein_identity_residual,
    verify_derivative_bounds_on, TestFunction,
};
use tsd_core::{Result, TsdParams};

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:02} {}: {} — {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

fn result(id: u32, name: &str, passed: bool, details: String) -> CheckResult {
    CheckResult { id, name: name.to_string(), passed, details }
}

fn failure(id: u32, name: &str, err: &Error) -> CheckResult {
    result(id, name, false, format!("computation failed: {err}"))
}

/// The default property-test parameter grid: 27 laws spanning low- and
/// high-activity regimes, BGD corners, and asymmetric tails (the second
/// tail takes the mirrored intensity and tempering values).
pub fn default_grid() -> Vec<TsdParams> {
    let ms = [0.5, 1.0, 2.0];
    let als = [0.0, 0.3, 0.7];
    let las = [0.5, 1.0, 3.0];
    let mut grid = Vec::with_capacity(27);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                grid.push(
                    TsdParams::new(ms[i], als[j], las[k], ms[2 - i], als[j], las[2 - k])
                        .expect("grid parameters are valid"),
                );
            }
        }
    }
    grid
}

/// Criterion 1: closed-form cumulants against the quadrature oracle on the
/// full grid, orders 1..=4, tolerance `max(1e-8, 1e-8 |value|)`.
pub fn check_01_cumulants() -> CheckResult {
    const NAME: &str = "cumulant closed form vs quadrature oracle";
    let mut worst = 0.0_f64;
    let mut worst_at = String::new();
    for p in default_grid() {
        for n in 1..=4u32 {
            let closed = p.cumulant(n);
            let quad = match p.cumulant_quadrature(n, 1e-10) {
                Ok(v) => v,
                Err(e) => return failure(1, NAME, &e),
            };
            let tol = 1e-8_f64.max(1e-8 * closed.abs());
            let excess = (closed - quad).abs() / tol;
            if excess > worst {
                worst = excess;
                worst_at = format!("{p:?} n={n}");
            }
        }
    }
    result(
        1,
        NAME,
        worst <= 1.0,
        format!("worst |closed - quadrature| at {:.3} of tolerance ({worst_at})", worst),
    )
}

/// Criterion 2: tempered cf against the exponent-quadrature oracle
/// (relative 1e-6 at z in {±0.1, ±1, ±10}), and the SVGD closed form
/// against the general tempered evaluation (1e-10).
pub fn check_02_charfn() -> CheckResult {
    const NAME: &str = "characteristic function oracles";
    let zs = [0.1, -0.1, 1.0, -1.0, 10.0, -10.0];
    let mut worst_rel = 0.0_f64;
    for p in default_grid() {
        for &z in &zs {
            let closed = psi_tempered(&p, z).exp();
            let quad = match psi_tempered_quadrature(&p, z, 1e-8) {
                Ok(v) => v.exp(),
                Err(e) => return failure(2, NAME, &e),
            };
            worst_rel = worst_rel.max((closed - quad).norm() / closed.norm());
        }
    }
    let mut worst_svgd = 0.0_f64;
    for &m in &[0.5, 1.0, 2.0] {
        for &lam in &[0.5, 1.0, 3.0] {
            let p = TsdParams::svgd(m, lam).expect("valid svgd");
            for &z in &zs {
                let a = CharFn::Svgd { m, lambda: lam }.eval(z);
                let b = CharFn::Tempered(p).eval(z);
                worst_svgd = worst_svgd.max((a - b).norm());
            }
        }
    }
    result(
        2,
        NAME,
        worst_rel <= 1e-6 && worst_svgd <= 1e-10,
        format!("worst tempered rel err {worst_rel:.3e} (tol 1e-6), worst svgd gap {worst_svgd:.3e} (tol 1e-10)"),
    )
}

/// Criterion 3: Stein-identity residual below 1e-4 for two fixed test
/// functions on six grid laws.
pub fn check_03_stein_identity() -> CheckResult {
    const NAME: &str = "Stein identity residual";
    let grid = default_grid();
    let picks = [0usize, 4, 9, 13, 18, 26];
    let mut worst = 0.0_f64;
    for &i in &picks {
        let p = &grid[i];
        let cases: [(fn(f64) -> f64, fn(f64) -> f64); 2] = [
            (|x| (-x * x / 2.0).exp(), |x| -x * (-x * x / 2.0).exp()),
            (
                |x| x.sin() * (-x * x / 4.0).exp(),
                |x| (x.cos() - 0.5 * x * x.sin()) * (-x * x / 4.0).exp(),
            ),
        ];
        for (f, df) in cases {
            match stein_identity_residual(p, f, df, 1e-7) {
                Ok(r) => worst = worst.max(r.abs()),
                Err(e) => return failure(3, NAME, &e),
            }
        }
    }
    result(3, NAME, worst < 1e-4, format!("worst residual {worst:.3e} (tol 1e-4)"))
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

/// Criterion 4: the covariance identity
/// `Cov(X, f(X)) = Var(X) E f'(X + Y)` with `Y` the non-zero bias
/// variable, within four combined standard errors at 1e6 samples,
/// for two test functions on three laws.
pub fn check_04_covariance_identity(seed: u64) -> CheckResult {
    const NAME: &str = "covariance identity via bias sampling";
    const N: usize = 1_000_000;
    let params = [
        TsdParams::bgd(1.0, 1.0, 1.0, 2.0),
        TsdParams::new(1.0, 0.3, 1.5, 0.8, 0.2, 2.0),
        TsdParams::new(2.0, 0.0, 3.0, 0.5, 0.7, 1.0),
    ];
    let cases: [(fn(f64) -> f64, fn(f64) -> f64); 2] = [
        (|x| x.tanh(), |x| 1.0 / x.cosh().powi(2)),
        (|x| x.sin(), |x| x.cos()),
    ];
    let mut worst_sigma = 0.0_f64;
    for (pi, pr) in params.into_iter().enumerate() {
        let p = match pr {
            Ok(p) => p,
            Err(e) => return failure(4, NAME, &e),
        };
        let bias = match BiasDistribution::new(&p, 1e-8) {
            Ok(b) => b,
            Err(e) => return failure(4, NAME, &e),
        };
        let base_stream = 10 * pi as u64;
        let xs = match sample_batch(N, seed, base_stream, |r| sample_tempered(&p, r)) {
            Ok(b) => b.values,
            Err(e) => return failure(4, NAME, &e),
        };
        let xs2 = match sample_batch(N, seed, base_stream + 1, |r| sample_tempered(&p, r)) {
            Ok(b) => b.values,
            Err(e) => return failure(4, NAME, &e),
        };
        let mut rng = RngStream::new(seed, base_stream + 2);
        let ys: Vec<f64> = (0..N).map(|_| bias.sample(&mut rng)).collect();
        let c2 = p.cumulant(2);
        for (f, df) in cases.iter() {
            let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let (mx, _) = mean_sd(&xs);
            let (mf, _) = mean_sd(&fx);
            let w: Vec<f64> = xs.iter().zip(&fx).map(|(&x, &v)| (x - mx) * (v - mf)).collect();
            let (cov, sd_w) = mean_sd(&w);
            let se_cov = sd_w / (N as f64).sqrt();
            let dfv: Vec<f64> = xs2.iter().zip(&ys).map(|(&x, &y)| df(x + y)).collect();
            let (mdf, sd_df) = mean_sd(&dfv);
            let rhs = c2 * mdf;
            let se_rhs = c2 * sd_df / (N as f64).sqrt();
            let sigma = (cov - rhs).abs() / se_cov.hypot(se_rhs);
            if sigma > worst_sigma {
                worst_sigma = sigma;
            }
        }
    }
    result(
        4,
        NAME,
        worst_sigma <= 4.0,
        format!("worst |lhs - rhs| at {worst_sigma:.2} combined SE (limit 4) with 1e6 samples"),
    )
}

/// Bias-density moment by direct quadrature of the tail-mass density, as
/// an oracle for the closed form `C_{n+2} / ((n+1) C_2)`.
fn bias_moment_quadrature(p: &TsdParams, n: u32) -> Result<f64> {
    let side = |m: f64, a: f64, l: f64| -> Result<f64> {
        tsd_core::quad::integrate(
            |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                u.powi(n as i32)
                    * m
                    * l.powf(a - 1.0)
                    * upper_incomplete_gamma(1.0 - a, l * u).unwrap_or(0.0)
            },
            0.0,
            60.0 / l,
            1e-12,
        )
    };
    let plus = side(p.m1, p.alpha1, p.lambda1)?;
    let minus = side(p.m2, p.alpha2, p.lambda2)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok((plus + sign * minus) / p.cumulant(2))
}

/// Criterion 5: bias-density moments match `C_{n+2}/((n+1) C_2)` within
/// 1e-6 for n in {1, 2} on the full grid.
pub fn check_05_bias_moments() -> CheckResult {
    const NAME: &str = "bias distribution moments";
    let mut worst = 0.0_f64;
    for p in default_grid() {
        for n in 1..=2u32 {
            let closed = bias_moment(&p, n);
            let quad = match bias_moment_quadrature(&p, n) {
                Ok(v) => v,
                Err(e) => return failure(5, NAME, &e),
            };
            worst = worst.max((closed - quad).abs());
        }
    }
    result(5, NAME, worst < 1e-6, format!("worst moment gap {worst:.3e} (tol 1e-6)"))
}

/// Criterion 6: the Stein-equation solution satisfies
/// `A f_h(x) = h(x) - E h(X)` within 1e-3 at x in {-2, 0, 2} for two
/// (law, test function) pairs.
pub fn check_06_stein_solution() -> CheckResult {
    const NAME: &str = "Stein equation solution residual";
    let pairs = [
        (TsdParams::bgd(1.0, 1.0, 1.0, 2.0), TestFunction::tanh()),
        (TsdParams::new(1.0, 0.3, 1.5, 0.8, 0.2, 2.0), TestFunction::sin(1.0)),
    ];
    let mut worst = 0.0_f64;
    for (pr, h) in pairs {
        let p = match pr {
            Ok(p) => p,
            Err(e) => return failure(6, NAME, &e),
        };
        let sol = match solve_stein(&p, &h, 1e-6) {
            Ok(s) => s,
            Err(e) => return failure(6, NAME, &e),
        };
        let eh = match expectation_of(&p, |x| h.h(x), |x| h.d1(x), 1e-8) {
            Ok(v) => v,
            Err(e) => return failure(6, NAME, &e),
        };
        for &x in &[-2.0, 0.0, 2.0] {
            let af = match stein_apply(&p, &|y| sol.eval(y), x, 1e-7) {
                Ok(v) => v,
                Err(e) => return failure(6, NAME, &e),
            };
            worst = worst.max((af - (h.h(x) - eh)).abs());
        }
    }
    result(6, NAME, worst < 1e-3, format!("worst residual {worst:.3e} (tol 1e-3)"))
}

/// Criterion 7: solution derivative bounds
/// `|f_h^(r)| <= ||h^(r+1)||/(r+1)` for r in {0, 1} plus the Lipschitz
/// bound `||h^(3)||/3`, slack 1e-3, over the test-function dictionary.
pub fn check_07_derivative_bounds() -> CheckResult {
    const NAME: &str = "Stein solution derivative bounds";
    let p = match TsdParams::bgd(1.0, 1.0, 1.0, 2.0) {
        Ok(p) => p,
        Err(e) => return failure(7, NAME, &e),
    };
    let mut lines = Vec::new();
    let mut all = true;
    for h in TestFunction::stein_dictionary() {
        let sol = match solve_stein(&p, &h, 1e-6) {
            Ok(s) => s,
            Err(e) => return failure(7, NAME, &e),
        };
        for r in 0..=1u32 {
            let rep = match verify_derivative_bounds_on(&sol, r) {
                Ok(r) => r,
                Err(e) => return failure(7, NAME, &e),
            };
            if !rep.passes() {
                all = false;
                lines.push(format!(
                    "{h:?} r={r}: observed {:.6} vs bound {:.6} (lip {:?} vs {:?})",
                    rep.max_observed, rep.bound, rep.lipschitz_observed, rep.lipschitz_bound
                ));
            }
        }
    }
    let details = if all {
        "all dictionary members satisfy the r=0,1 and Lipschitz bounds with slack 1e-3".into()
    } else {
        lines.join("; ")
    };
    result(7, NAME, all, details)
}

/// Criterion 8: compound-Poisson Kolmogorov distances at
/// n in {1, 2, 4, ..., 256} are nonincreasing with log-log slope <= -0.15.
pub fn check_08_cpd_rate() -> CheckResult {
    const NAME: &str = "compound-Poisson convergence rate";
    let p = match TsdParams::bgd(1.0, 1.0, 1.0, 2.0) {
        Ok(p) => p,
        Err(e) => return failure(8, NAME, &e),
    };
    let spec = SweepSpec::Cpd { params: p, ns: vec![1, 2, 4, 8, 16, 32, 64, 128, 256] };
    match rate_sweep(&spec, 1e-7) {
        Ok(rep) => {
            let slope = rep.slope.unwrap_or(f64::NAN);
            let passed = rep.is_complete() && rep.verdict_nonincreasing && rep.verdict_slope;
            result(
                8,
                NAME,
                passed,
                format!(
                    "slope {slope:.4} (need <= -0.15), nonincreasing: {}, complete: {}",
                    rep.verdict_nonincreasing,
                    rep.is_complete()
                ),
            )
        }
        Err(e) => failure(8, NAME, &e),
    }
}

/// Criterion 9: the stable-approximation sweep at alpha = 0.3 must show a
/// log-log Kolmogorov slope of at least alpha + 1/2 - 0.1 = 0.7 in the
/// tempering rate. The measured decay is far slower (the distance is
/// dominated by tail mass of order lambda^alpha), so this check reports
/// the observed slope and fails.
pub fn check_09_stable_rate() -> CheckResult {
    const NAME: &str = "stable approximation rate";
    let sp = match StableParams::new(1.0, 0.3, 1.0) {
        Ok(s) => s,
        Err(e) => return failure(9, NAME, &e),
    };
    let spec = SweepSpec::Stable { stable: sp, lambdas: vec![0.4, 0.2, 0.1, 0.05] };
    match rate_sweep(&spec, 1e-7) {
        Ok(rep) => {
            let slope = rep.slope.unwrap_or(f64::NAN);
            let ds: Vec<String> =
                rep.points.iter().map(|pt| format!("{:.4e}@{}", pt.distance, pt.x)).collect();
            result(
                9,
                NAME,
                rep.is_complete() && rep.verdict_slope,
                format!(
                    "measured log-log slope {slope:.4} vs required >= 0.7; distances [{}]; the Kolmogorov distance between the tempered law and its stable limit decays like lambda^alpha here, not lambda^(alpha+1/2)",
                    ds.join(", ")
                ),
            )
        }
        Err(e) => failure(9, NAME, &e),
    }
}

/// Criterion 10: the constant `M(alpha)` matches its closed form within
/// 1e-6 relative on {0.1, 0.2, 0.3, 0.4} and reports divergence on
/// {0.5, 0.6}.
pub fn check_10_m_alpha() -> CheckResult {
    const NAME: &str = "M(alpha) quadrature vs closed form";
    let mut worst = 0.0_f64;
    for &a in &[0.1, 0.2, 0.3, 0.4] {
        let q = match m_alpha(a, 1e-10) {
            Ok(v) => v,
            Err(e) => return failure(10, NAME, &e),
        };
        let c = match m_alpha_closed_form(a) {
            Ok(v) => v,
            Err(e) => return failure(10, NAME, &e),
        };
        worst = worst.max((q - c).abs() / c.abs());
    }
    let diverges = [0.5, 0.6]
        .iter()
        .all(|&a| matches!(m_alpha(a, 1e-8), Err(Error::Divergent(_))));
    result(
        10,
        NAME,
        worst <= 1e-6 && diverges,
        format!("worst relative gap {worst:.3e} (tol 1e-6); divergence reported for 0.5, 0.6: {diverges}"),
    )
}

/// Criterion 11: the smooth-Wasserstein dictionary lower bound stays below
/// the two-law cumulant bound on ten law pairs with cumulant gaps >= 0.1;
/// cumulant-matched pairs are excluded and logged.
pub fn check_11_h3_consistency() -> CheckResult {
    const NAME: &str = "two-law smooth-Wasserstein bound consistency";
    let sqrt2 = 2f64.sqrt();
    let mk = |r: Result<TsdParams>| r.expect("valid pair parameters");
    let pairs: Vec<(TsdParams, TsdParams)> = vec![
        (mk(TsdParams::bgd(1.0, 1.0, 1.0, 2.0)), mk(TsdParams::bgd(1.0, 1.0, 1.0, 1.0))),
        (
            mk(TsdParams::new(1.0, 0.3, 1.5, 0.8, 0.2, 2.0)),
            mk(TsdParams::new(1.0, 0.3, 1.5, 0.8, 0.2, 1.0)),
        ),
        // cumulant-matched pair: must be excluded and logged
        (mk(TsdParams::svgd(1.0, sqrt2)), mk(TsdParams::svgd(4.0, 2.0 * sqrt2))),
        (mk(TsdParams::svgd(1.0, 1.0)), mk(TsdParams::svgd(1.0, 1.5))),
        (mk(TsdParams::vgd(1.0, 1.0, 2.0)), mk(TsdParams::vgd(1.0, 1.0, 3.0))),
        (mk(TsdParams::cgmy(1.0, 0.3, 1.0, 2.0)), mk(TsdParams::cgmy(1.0, 0.3, 1.0, 1.0))),
        (mk(TsdParams::bgd(2.0, 1.0, 0.5, 1.0)), mk(TsdParams::bgd(0.5, 1.0, 2.0, 1.0))),
        (
            mk(TsdParams::new(0.5, 0.7, 1.0, 0.5, 0.7, 1.0)),
            mk(TsdParams::new(0.5, 0.7, 2.0, 0.5, 0.7, 2.0)),
        ),
        (mk(TsdParams::bgd(1.0, 0.5, 1.0, 0.5)), mk(TsdParams::bgd(1.0, 1.0, 1.0, 1.0))),
        (mk(TsdParams::svgd(2.0, 1.0)), mk(TsdParams::svgd(2.0, 2.0))),
        (
            mk(TsdParams::new(1.0, 0.0, 1.0, 1.0, 0.3, 1.0)),
            mk(TsdParams::new(1.0, 0.0, 1.0, 1.0, 0.5, 1.0)),
        ),
        // identical pair: zero gap, excluded and logged
        (mk(TsdParams::bgd(1.0, 1.0, 1.0, 2.0)), mk(TsdParams::bgd(1.0, 1.0, 1.0, 2.0))),
    ];
    let mut tested = 0usize;
    let mut excluded = Vec::new();
    let mut violations = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        let gap = (1..=3u32)
            .map(|n| (a.cumulant(n) - b.cumulant(n)).abs())
            .fold(0.0_f64, f64::max);
        if gap < 0.1 {
            excluded.push(format!("pair {i} (cumulant gap {gap:.3e}, bound uninformative)"));
            continue;
        }
        let la = match NumericLaw::from_charfn(&CharFn::Tempered(*a), 1e-7) {
            Ok(l) => l,
            Err(e) => return failure(11, NAME, &e),
        };
        let lb = match NumericLaw::from_charfn(&CharFn::Tempered(*b), 1e-7) {
            Ok(l) => l,
            Err(e) => return failure(11, NAME, &e),
        };
        let lower = match smooth_h3_lower_laws(&la, &lb, 1e-7) {
            Ok(d) => d,
            Err(e) => return failure(11, NAME, &e),
        };
        let bound = bound_h3_two_tsd(a, b);
        tested += 1;
        if lower.value > bound + lower.error_bar {
            violations.push(format!(
                "pair {i}: lower {:.4e} exceeds bound {:.4e}",
                lower.value, bound
            ));
        }
    }
    let passed = tested >= 10 && violations.is_empty();
    result(
        11,
        NAME,
        passed,
        format!(
            "{tested} informative pairs all satisfy lower <= bound{}; excluded: [{}]",
            if violations.is_empty() { String::new() } else { format!("; VIOLATIONS: {}", violations.join("; ")) },
            excluded.join(", ")
        ),
    )
}

/// Criterion 12: the matched symmetric variance gamma approaches
/// `N(0, 1)` in Kolmogorov distance as its shape grows, below 1e-2 at
/// m = 1e4.
pub fn check_12_normal_limit() -> CheckResult {
    const NAME: &str = "normal limit of matched SVGD";
    let mut last = f64::INFINITY;
    let mut ds = Vec::new();
    for &m in &[1.0, 10.0, 100.0, 1e4] {
        let p = match TsdParams::svgd_matching_normal(m, 1.0) {
            Ok(p) => p,
            Err(e) => return failure(12, NAME, &e),
        };
        let law = match NumericLaw::from_charfn(&CharFn::Tempered(p), 1e-8) {
            Ok(l) => l,
            Err(e) => return failure(12, NAME, &e),
        };
        let d = match kolmogorov(
            |x| Ok(law.cdf(x)),
            |x| Ok(normal_cdf(x, 1.0)),
            -8.0,
            8.0,
            &[],
            1e-8,
        ) {
            Ok(d) => d.value,
            Err(e) => return failure(12, NAME, &e),
        };
        if d >= last {
            return result(12, NAME, false, format!("not decreasing at m={m}: {d:.3e} >= {last:.3e}"));
        }
        last = d;
        ds.push(format!("{d:.4e}@m={m}"));
    }
    result(
        12,
        NAME,
        last < 1e-2,
        format!("d_K decreasing [{}], final {last:.3e} (tol 1e-2)", ds.join(", ")),
    )
}

/// Criterion 13: parameter continuity — laws at parameter distance ~1/k
/// from a target approach it strictly, below 1e-2 at k = 16.
pub fn check_13_continuity() -> CheckResult {
    const NAME: &str = "parameter continuity of the law";
    let target = match TsdParams::new(1.0, 0.3, 2.0, 1.0, 0.3, 2.0) {
        Ok(p) => p,
        Err(e) => return failure(13, NAME, &e),
    };
    let spec = SweepSpec::Continuity { target, ks: vec![1, 2, 4, 8, 16] };
    match rate_sweep(&spec, 1e-7) {
        Ok(rep) => {
            if !rep.is_complete() {
                return result(13, NAME, false, format!("partial sweep: {:?}", rep.notes));
            }
            let ds: Vec<f64> = rep.points.iter().map(|p| p.distance).collect();
            let strictly = ds.windows(2).all(|w| w[1] < w[0]);
            let last = *ds.last().unwrap();
            result(
                13,
                NAME,
                strictly && last < 1e-2,
                format!(
                    "distances {:?}, strictly decreasing: {strictly}, final {last:.3e} (tol 1e-2)",
                    ds.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()
                ),
            )
        }
        Err(e) => failure(13, NAME, &e),
    }
}

/// IDs of all library-level checks (criterion 14, CLI reproducibility, is
/// exercised by running the binary twice and comparing reports).
pub const ALL_CHECKS: [u32; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13];

/// Run the selected checks in order. `seed` feeds the sampling-based
/// checks; everything else is deterministic.
pub fn run_checks(ids: &[u32], seed: u64) -> Vec<CheckResult> {
    ids.iter()
        .map(|&id| match id {
            1 => check_01_cumulants(),
            2 => check_02_charfn(),
            3 => check_03_stein_identity(),
            4 => check_04_covariance_identity(seed),
            5 => check_05_bias_moments(),
            6 => check_06_stein_solution(),
            7 => check_07_derivative_bounds(),
            8 => check_08_cpd_rate(),
            9 => check_09_stable_rate(),
            10 => check_10_m_alpha(),
            11 => check_11_h3_consistency(),
            12 => check_12_normal_limit(),
            13 => check_13_continuity(),
            other => result(other, "unknown check", false, "no such check id".into()),
        })
        .collect()
}
