//! Approximation-bound calculators and rate sweeps: the compound-Poisson
//! Kolmogorov bound, the stable-approximation bound and its constant
//! `M(alpha)`, the two-law smooth-Wasserstein bound, the normal and
//! variance-gamma example bounds, and log-log rate fits that confront the
//! theoretical exponents with empirical distances.

use rayon::prelude::*;

use crate::charfn::CharFn;
use crate::distance::{kolmogorov, kolmogorov_laws};
use crate::error::{Error, Result};
use crate::inversion::{cpd_bgd_cdf, invert_cdf, tsd_bgd_cdf, NumericLaw};
use crate::model::{StableParams, TsdParams};
use crate::special::gamma;

/// Which rate statement a sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Compound-Poisson approximant, Kolmogorov rate `n^{-1/5}`.
    Cpd,
    /// Stable approximation, rate `lambda^{alpha + 1/2}`.
    Stable,
    /// Parameter-continuity: laws converge when all six coordinates do.
    Continuity,
}

/// One sweep point: the varying parameter, the measured distance, and the
/// theoretical bound evaluated with the fitted constant.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    /// Value of the varying parameter (`n`, `lambda`, or `1/k`).
    pub x: f64,
    pub distance: f64,
    pub error_bar: f64,
    /// Bound value, when the theorem provides a closed rate form.
    pub bound: Option<f64>,
    pub method: String,
    pub seed: Option<u64>,
    /// Set when this point's computation failed; the point is excluded
    /// from the fit and the report is marked partial.
    pub failure: Option<String>,
}

/// Result of a rate sweep: empirical distances, fitted constants, the
/// log-log slope with a confidence interval, and verdicts that are pure
/// functions of the stored numbers.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub rate_form: String,
    pub fitted_constants: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub slope: Option<f64>,
    /// Half-width of a ~95% confidence interval on the slope.
    pub slope_ci: Option<f64>,
    /// Distances nonincreasing along the sweep, within error bars.
    pub verdict_nonincreasing: bool,
    /// Slope criterion for the theorem (see [`rate_sweep`]).
    pub verdict_slope: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    /// True when every sweep point was computed.
    pub fn is_complete(&self) -> bool {
        self.points.iter().all(|p| p.failure.is_none())
    }
}

/// Compound-Poisson Kolmogorov bound `c (|C1| + |C2|)^{2/5} n^{-1/5}`.
///
/// The constant `c` is not specified by the theory; it is calibrated at a
/// sweep's smallest `n` and then held fixed.
pub fn bound_cpd(p: &TsdParams, n: u32, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("bound_cpd needs n >= 1".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("bound_cpd needs c > 0, got {c}")));
    }
    let scale = p.cumulant(1).abs() + p.cumulant(2).abs();
    Ok(c * scale.powf(0.4) * (n as f64).powf(-0.2))
}

/// Closed form for `M(alpha)`, valid for `alpha` in `(0, 1/2)`:
/// `Gamma(-(1+2 alpha)) (2^{1+2 alpha} - 2)`.
pub fn m_alpha_closed_form(alpha: f64) -> Result<f64> {
    check_m_alpha_domain(alpha)?;
    let beta = 1.0 + 2.0 * alpha;
    // Gamma(-beta) by the recurrence; positive for beta in (1, 2)
    let g = gamma(1.0 - 2.0 * alpha) / (beta * (beta - 1.0));
    Ok(g * (2f64.powf(beta) - 2.0))
}

/// The stable-theorem constant `M(alpha) = int_0^inf ((e^{-u}-1)/u^{1+alpha})^2 du`
/// by adaptive quadrature.
///
/// The integrand behaves like `u^{-2 alpha}` at the origin, so the
/// integral diverges for `alpha >= 1/2` and a divergence error is
/// returned there.
pub fn m_alpha(alpha: f64, tol: f64) -> Result<f64> {
    check_m_alpha_domain(alpha)?;
    let head = crate::quad::integrate_power_singularity(
        |u: f64| {
            let d = (-u).exp_m1();
            d * d * u.powf(-2.0 - 2.0 * alpha)
        },
        1.0,
        2.0 * alpha,
        tol * 0.5,
    )?;
    // tail via u = 1/v, which removes the infinite range
    let tail = crate::quad::integrate(
        |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let d = (-1.0 / v).exp_m1();
            d * d * v.powf(2.0 * alpha)
        },
        0.0,
        1.0,
        tol * 0.5,
    )?;
    Ok(head + tail)
}

fn check_m_alpha_domain(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!(
            "M(alpha) needs alpha in (0,1), got {alpha}"
        )));
    }
    if alpha >= 0.5 {
        return Err(Error::Divergent(format!(
            "M(alpha) diverges for alpha >= 1/2 (integrand ~ u^{{-{}}} at 0)",
            2.0 * alpha
        )));
    }
    Ok(())
}

/// Stable-approximation bound `C1 lambda1^{alpha+1/2} + C2 lambda2^{alpha+1/2}`.
///
/// Only defined on the KoBol sub-family (equal stability indices); the
/// constants are fitted empirically since the theoretical ones involve the
/// unknown Stein solution.
pub fn bound_stable(p: &TsdParams, c1: f64, c2: f64) -> Result<f64> {
    if p.alpha1 != p.alpha2 {
        return Err(Error::InvalidParams(format!(
            "bound_stable needs equal stability indices, got {} and {}",
            p.alpha1, p.alpha2
        )));
    }
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidParams("bound_stable needs positive constants".into()));
    }
    let e = p.alpha1 + 0.5;
    Ok(c1 * p.lambda1.powf(e) + c2 * p.lambda2.powf(e))
}

/// Smooth-Wasserstein (`d_{H3}`) upper bound between two tempered stable
/// laws, from their closed-form cumulants:
/// `|dC1| + |dC2|/2 + C2(X)/6 * | |C3(Xn)|/C2(Xn) - |C3(X)|/C2(X) |`.
///
/// Note the asymmetry: the second argument is the reference law whose
/// variance weights the third term. The bound vanishes on cumulant-matched
/// pairs even when the laws differ.
pub fn bound_h3_two_tsd(xn: &TsdParams, x: &TsdParams) -> f64 {
    let d1 = (xn.cumulant(1) - x.cumulant(1)).abs();
    let d2 = (xn.cumulant(2) - x.cumulant(2)).abs();
    let r_n = xn.cumulant(3).abs() / xn.cumulant(2);
    let r_x = x.cumulant(3).abs() / x.cumulant(2);
    d1 + 0.5 * d2 + x.cumulant(2) / 6.0 * (r_n - r_x).abs()
}

/// Normal-limit example bound against `N(0, lam^2)`:
/// `|C1| + |C2 - lam^2|/2 + lam^2 |C3| / (6 C2)`.
pub fn bound_normal_example(p: &TsdParams, lam: f64) -> Result<f64> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::InvalidParams(format!("bound_normal_example needs lam > 0, got {lam}")));
    }
    let c1 = p.cumulant(1);
    let c2 = p.cumulant(2);
    let c3 = p.cumulant(3);
    Ok(c1.abs() + 0.5 * (c2 - lam * lam).abs() + lam * lam * c3.abs() / (6.0 * c2))
}

/// Variance-gamma example bound: the two-law bound with the VG reference
/// cumulants `C1 = m(1/l1 - 1/l2)`, `C2 = m(1/l1^2 + 1/l2^2)`,
/// `C3 = 2m(1/l1^3 - 1/l2^3)` substituted in closed form.
pub fn bound_vg_example(p: &TsdParams, m: f64, lam1: f64, lam2: f64) -> Result<f64> {
    if !(m > 0.0 && lam1 > 0.0 && lam2 > 0.0) {
        return Err(Error::InvalidParams(
            "bound_vg_example needs positive m, lam1, lam2".into(),
        ));
    }
    let vc1 = m * (1.0 / lam1 - 1.0 / lam2);
    let vc2 = m * (1.0 / (lam1 * lam1) + 1.0 / (lam2 * lam2));
    let vc3 = 2.0 * m * (1.0 / lam1.powi(3) - 1.0 / lam2.powi(3));
    let d1 = (p.cumulant(1) - vc1).abs();
    let d2 = (p.cumulant(2) - vc2).abs();
    let rn = p.cumulant(3).abs() / p.cumulant(2);
    let rv = vc3.abs() / vc2;
    Ok(d1 + 0.5 * d2 + vc2 / 6.0 * (rn - rv).abs())
}

/// Least-squares fit of `ln d = a + slope * ln x`, returning the slope and
/// a ~95% confidence half-width from the residual scatter.
pub fn fit_loglog(xs: &[f64], ds: &[f64]) -> Option<(f64, f64)> {
    let pairs: Vec<(f64, f64)> = xs
        .iter()
        .zip(ds)
        .filter(|(&x, &d)| x > 0.0 && d > 0.0 && d.is_finite())
        .map(|(&x, &d)| (x.ln(), d.ln()))
        .collect();
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return None;
    }
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = pairs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    let sxy = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    if pairs.len() == 2 {
        return Some((slope, 0.0));
    }
    let ss_res = pairs
        .iter()
        .map(|p| {
            let r = p.1 - my - slope * (p.0 - mx);
            r * r
        })
        .sum::<f64>();
    let se = (ss_res / (n - 2.0) / sxx).sqrt();
    Some((slope, 2.0 * se))
}

/// Sweep specification for [`rate_sweep`].
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum SweepSpec {
    /// Compound-Poisson sweep over approximant orders `ns` for a bilateral
    /// gamma target (both indices zero, so exact CDFs are available).
    Cpd { params: TsdParams, ns: Vec<u32> },
    /// Stable sweep: tempered laws with shrinking tempering rates against
    /// their common stable limit.
    Stable { stable: StableParams, lambdas: Vec<f64> },
    /// Continuity sweep: perturbed parameter vectors at distance `~1/k`
    /// from the target, `k` in `ks`.
    Continuity { target: TsdParams, ks: Vec<u32> },
}

/// Run a rate sweep: empirical Kolmogorov distances at every sweep point
/// (points run in parallel, aggregated in sweep order), a log-log slope
/// fit, and the theorem's verdicts.
///
/// Verdicts: (a) distances nonincreasing within error bars; (b) CPD slope
/// `<= -0.15`; (c) stable slope `>= alpha + 1/2 - 0.1`; continuity: the
/// distance must grow with the perturbation size (positive slope in
/// `x = 1/k`). Failed points are flagged and excluded from the fit.
pub fn rate_sweep(spec: &SweepSpec, tol: f64) -> Result<BoundReport> {
    match spec {
        SweepSpec::Cpd { params, ns } => sweep_cpd(params, ns, tol),
        SweepSpec::Stable { stable, lambdas } => sweep_stable(stable, lambdas, tol),
        SweepSpec::Continuity { target, ks } => sweep_continuity(target, ks, tol),
    }
}

fn run_points<F>(xs: &[f64], eval: F) -> Vec<SweepPoint>
where
    F: Fn(usize, f64) -> Result<(f64, f64, String)> + Sync,
{
    xs.par_iter()
        .enumerate()
        .map(|(i, &x)| match eval(i, x) {
            Ok((distance, error_bar, method)) => SweepPoint {
                index: i,
                x,
                distance,
                error_bar,
                bound: None,
                method,
                seed: None,
                failure: None,
            },
            Err(e) => SweepPoint {
                index: i,
                x,
                distance: f64::NAN,
                error_bar: f64::NAN,
                bound: None,
                method: String::new(),
                seed: None,
                failure: Some(e.to_string()),
            },
        })
        .collect()
}

fn nonincreasing_within_bars(points: &[SweepPoint]) -> bool {
    points
        .iter()
        .filter(|p| p.failure.is_none())
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1].distance <= w[0].distance + w[0].error_bar + w[1].error_bar)
}

fn finish_report(
    theorem: TheoremId,
    rate_form: &str,
    fitted_constants: Vec<f64>,
    mut points: Vec<SweepPoint>,
    slope_ok: impl Fn(f64) -> bool,
    mut notes: Vec<String>,
) -> BoundReport {
    points.sort_by_key(|p| p.index);
    let ok: Vec<&SweepPoint> = points.iter().filter(|p| p.failure.is_none()).collect();
    let xs: Vec<f64> = ok.iter().map(|p| p.x).collect();
    let ds: Vec<f64> = ok.iter().map(|p| p.distance).collect();
    let fit = fit_loglog(&xs, &ds);
    for p in &points {
        if let Some(f) = &p.failure {
            notes.push(format!("point {} (x = {}) failed: {f}", p.index, p.x));
        }
    }
    BoundReport {
        theorem,
        rate_form: rate_form.to_string(),
        fitted_constants,
        verdict_nonincreasing: nonincreasing_within_bars(&points),
        verdict_slope: fit.map(|(s, _)| slope_ok(s)).unwrap_or(false),
        slope: fit.map(|f| f.0),
        slope_ci: fit.map(|f| f.1),
        points,
        notes,
    }
}

/// Kolmogorov distance between the order-`n` compound-Poisson approximant
/// and its bilateral gamma target, both by exact CDF formulas.
pub fn cpd_distance(p: &TsdParams, n: u32, tol: f64) -> Result<f64> {
    let sigma = p.variance().sqrt();
    let lo = p.mean() - 12.0 * sigma;
    let hi = p.mean() + 12.0 * sigma;
    let d = kolmogorov(
        |x| cpd_bgd_cdf(p, n, x, tol),
        |x| tsd_bgd_cdf(p, x, tol),
        lo,
        hi,
        &[0.0],
        tol,
    )?;
    Ok(d.value)
}

fn sweep_cpd(p: &TsdParams, ns: &[u32], tol: f64) -> Result<BoundReport> {
    if p.alpha1 != 0.0 || p.alpha2 != 0.0 {
        return Err(Error::Domain(
            "the CPD sweep uses exact bilateral gamma CDFs and needs both indices zero".into(),
        ));
    }
    if ns.is_empty() {
        return Err(Error::InvalidParams("empty sweep".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let mut points = run_points(&xs, |_, x| {
        let d = cpd_distance(p, x as u32, tol)?;
        Ok((d, 5.0 * tol, "exact Poisson-mixture CDF vs exact bilateral gamma CDF".into()))
    });
    // calibrate c so the bound is tight at the smallest n, then hold it
    let scale = (p.cumulant(1).abs() + p.cumulant(2).abs()).powf(0.4);
    let c = points
        .iter()
        .find(|pt| pt.failure.is_none())
        .map(|pt| pt.distance / (scale * pt.x.powf(-0.2)))
        .unwrap_or(1.0);
    for pt in &mut points {
        pt.bound = bound_cpd(p, pt.x as u32, c).ok();
    }
    Ok(finish_report(
        TheoremId::Cpd,
        "c (|C1|+|C2|)^{2/5} n^{-1/5}",
        vec![c],
        points,
        |s| s <= -0.15,
        vec![],
    ))
}

fn sweep_stable(sp: &StableParams, lambdas: &[f64], tol: f64) -> Result<BoundReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParams("empty sweep".into()));
    }
    let e = sp.alpha + 0.5;
    let stable_cf = CharFn::Stable(*sp);
    let mut points = run_points(lambdas, |_, lam| {
        let p = sp.tempered(lam)?;
        let cf_t = CharFn::Tempered(p);
        // The stable law is too heavy-tailed to tabulate (its 1e-4
        // quantile sits at lambda-independent astronomical distance), so
        // both CDFs are evaluated pointwise. Beyond the tempered law's
        // effective support the gap equals the stable survival function,
        // which is decreasing, so the sup lies inside +-100/lambda.
        let w = 100.0 / lam;
        let d = kolmogorov(
            |x| invert_cdf(&cf_t, x, tol),
            |x| invert_cdf(&stable_cf, x, tol),
            -w,
            w,
            &[],
            tol,
        )?;
        Ok((d.value, d.error_bar, "pointwise Gil-Pelaez inversion of both laws".into()))
    });
    let c = points
        .iter()
        .find(|pt| pt.failure.is_none())
        .map(|pt| pt.distance / (2.0 * pt.x.powf(e)))
        .unwrap_or(1.0);
    for pt in &mut points {
        if let Ok(p) = sp.tempered(pt.x) {
            pt.bound = bound_stable(&p, c, c).ok();
        }
    }
    let slope_floor = sp.alpha + 0.5 - 0.1;
    Ok(finish_report(
        TheoremId::Stable,
        "C1 lambda1^{alpha+1/2} + C2 lambda2^{alpha+1/2}",
        vec![c, c],
        points,
        move |s| s >= slope_floor,
        vec![format!("slope criterion: >= alpha + 1/2 - 0.1 = {slope_floor}")],
    ))
}

/// The perturbed parameter vector used by the continuity sweep: every
/// coordinate moved by a fixed direction scaled by `delta` (the stability
/// indices by `delta/2` to stay inside `[0, 1)`).
pub fn perturbed_params(target: &TsdParams, delta: f64) -> Result<TsdParams> {
    TsdParams::new(
        target.m1 + delta,
        target.alpha1 + 0.5 * delta,
        target.lambda1 + delta,
        target.m2 + delta,
        target.alpha2 + 0.5 * delta,
        target.lambda2 + delta,
    )
}

fn sweep_continuity(target: &TsdParams, ks: &[u32], tol: f64) -> Result<BoundReport> {
    if ks.is_empty() {
        return Err(Error::InvalidParams("empty sweep".into()));
    }
    let target_law = NumericLaw::from_charfn(&CharFn::Tempered(*target), tol)?;
    let xs: Vec<f64> = ks.iter().map(|&k| 1.0 / k as f64).collect();
    let points = run_points(&xs, |_, delta| {
        let p = perturbed_params(target, delta)?;
        let law = NumericLaw::from_charfn(&CharFn::Tempered(p), tol)?;
        let d = kolmogorov_laws(&law, &target_law, tol)?;
        Ok((d.value, d.error_bar, "cf inversion of perturbed law vs target".into()))
    });
    Ok(finish_report(
        TheoremId::Continuity,
        "d_K -> 0 as the parameter distance 1/k -> 0 (no closed rate)",
        vec![],
        points,
        |s| s > 0.0,
        vec!["x is the perturbation scale 1/k; distances are listed from coarse to fine".into()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_alpha_matches_closed_form() {
        for &a in &[0.1, 0.2, 0.25, 0.3, 0.4] {
            let q = m_alpha(a, 1e-10).unwrap();
            let c = m_alpha_closed_form(a).unwrap();
            assert!((q - c).abs() <= 1e-6 * c.abs(), "alpha={a}: {q} vs {c}");
        }
        // increasing on (0, 1/2)
        assert!(m_alpha(0.4, 1e-10).unwrap() > m_alpha(0.1, 1e-10).unwrap());
    }

    #[test]
    fn m_alpha_divergence() {
        for &a in &[0.5, 0.6, 0.9] {
            assert!(matches!(m_alpha(a, 1e-8), Err(Error::Divergent(_))), "alpha={a}");
        }
        assert!(m_alpha(0.0, 1e-8).is_err());
    }

    #[test]
    fn bound_cpd_rate_and_value() {
        let p = TsdParams::bgd(1.0, 1.0, 1.0, 2.0).unwrap();
        // (|C1| + |C2|)^{2/5} = (1/2 + 5/4)^{2/5} at c = 1, n = 1
        let expect = (p.cumulant(1).abs() + p.cumulant(2).abs()).powf(0.4);
        assert!((expect - 1.75f64.powf(0.4)).abs() < 1e-14);
        assert!((bound_cpd(&p, 1, 1.0).unwrap() - expect).abs() < 1e-14);
        let r = bound_cpd(&p, 2, 1.0).unwrap() / bound_cpd(&p, 1, 1.0).unwrap();
        assert!((r - 2f64.powf(-0.2)).abs() < 1e-14);
        assert!(bound_cpd(&p, 0, 1.0).is_err());
    }

    #[test]
    fn bound_stable_rate_and_domain() {
        let p = TsdParams::new(1.0, 0.3, 0.2, 1.0, 0.3, 0.1).unwrap();
        let b = bound_stable(&p, 1.0, 1.0).unwrap();
        assert!((b - (0.2f64.powf(0.8) + 0.1f64.powf(0.8))).abs() < 1e-14);
        let half = TsdParams::new(1.0, 0.3, 0.1, 1.0, 0.3, 0.05).unwrap();
        let r = bound_stable(&half, 1.0, 1.0).unwrap() / b;
        assert!((r - 2f64.powf(-0.8)).abs() < 1e-12);
        let bad = TsdParams::new(1.0, 0.3, 1.0, 1.0, 0.4, 1.0).unwrap();
        assert!(bound_stable(&bad, 1.0, 1.0).is_err());
    }

    #[test]
    fn h3_bound_examples() {
        let a = TsdParams::bgd(1.0, 1.0, 1.0, 2.0).unwrap();
        assert!(bound_h3_two_tsd(&a, &a) == 0.0);
        // cumulant-matched symmetric pair: bound vanishes though laws differ
        let s1 = TsdParams::svgd(1.0, 2f64.sqrt()).unwrap();
        let s2 = TsdParams::svgd(4.0, 2.0 * 2f64.sqrt()).unwrap();
        assert!(bound_h3_two_tsd(&s1, &s2).abs() < 1e-14);
        // worked arithmetic case: C(A) = (1/2, 5/4, 7/4), C(B) = (0, 2, 0)
        let b = TsdParams::bgd(1.0, 1.0, 1.0, 1.0).unwrap();
        let expect = 0.5 + 0.375 + 7.0 / 15.0;
        assert!((bound_h3_two_tsd(&a, &b) - expect).abs() < 1e-12);
    }

    #[test]
    fn normal_and_vg_examples() {
        let b = TsdParams::bgd(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((bound_normal_example(&b, 1.0).unwrap() - 0.5).abs() < 1e-14);
        // SVGD matched to N(0, lam^2) zeroes the first two terms exactly
        let lam = 1.3;
        let s = TsdParams::svgd_matching_normal(7.0, lam).unwrap();
        assert!(bound_normal_example(&s, lam).unwrap() < 1e-14);
        // BGD(1,1,1,2) is the VG(1,1,2) law itself
        let a = TsdParams::bgd(1.0, 1.0, 1.0, 2.0).unwrap();
        assert!(bound_vg_example(&a, 1.0, 1.0, 2.0).unwrap() < 1e-12);
        // equal tempering rates reduce to the symmetric two-term form
        let sym = bound_vg_example(&b, 1.0, 1.0, 1.0).unwrap();
        let direct = (b.cumulant(2) - 2.0).abs() * 0.5;
        assert!((sym - direct).abs() < 1e-12);
    }

    #[test]
    fn loglog_fit_recovers_slope() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ds: Vec<f64> = xs.iter().map(|&x: &f64| 3.0 * x.powf(-0.2)).collect();
        let (s, ci) = fit_loglog(&xs, &ds).unwrap();
        assert!((s + 0.2).abs() < 1e-12);
        assert!(ci < 1e-10);
    }

    #[test]
    fn cpd_sweep_small() {
        let p = TsdParams::bgd(1.0, 1.0, 1.0, 2.0).unwrap();
        let spec = SweepSpec::Cpd { params: p, ns: vec![1, 2, 4, 8] };
        let rep = rate_sweep(&spec, 1e-7).unwrap();
        assert!(rep.is_complete());
        assert!(rep.verdict_nonincreasing, "{:?}", rep.points);
        assert!(rep.slope.unwrap() <= -0.15, "slope {:?}", rep.slope);
        // bound calibrated at n=1 holds at later points (faster-than-rate decay)
        for pt in &rep.points[1..] {
            assert!(pt.distance <= pt.bound.unwrap() + 1e-12);
        }
    }

    #[test]
    fn continuity_sweep_small() {
        let t = TsdParams::new(1.0, 0.3, 2.0, 1.0, 0.3, 2.0).unwrap();
        let spec = SweepSpec::Continuity { target: t, ks: vec![1, 2, 4] };
        let rep = rate_sweep(&spec, 1e-7).unwrap();
        assert!(rep.is_complete());
        let d: Vec<f64> = rep.points.iter().map(|p| p.distance).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }
}
