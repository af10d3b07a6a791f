//! Probability metrics: Kolmogorov distance between CDFs, empirical
//! Wasserstein-1 between sample batches, and a dictionary lower bound for
//! the smooth Wasserstein distance `d_{H3}`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inversion::NumericLaw;
use crate::sampling::SampleBatch;
use crate::stein::TestFunction;

/// Which metric a [`DistanceEstimate`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Kolmogorov,
    Wasserstein1,
    SmoothH3Lower,
}

/// A metric value with an error bar and a note on how it was obtained.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DistanceEstimate {
    pub kind: MetricKind,
    pub value: f64,
    pub error_bar: f64,
    pub note: String,
}

/// Kolmogorov distance `sup_x |F_A(x) - F_B(x)|` between two pointwise
/// CDF evaluators over `[lo, hi]`.
///
/// A 512-point grid is refined (times 4, five rounds) around the running
/// argmax; `atoms` lists points where either law may jump, which are
/// probed one-sidedly. `point_tol` is the per-evaluation accuracy of the
/// inputs and enters the error bar.
pub fn kolmogorov<FA, FB>(
    fa: FA,
    fb: FB,
    lo: f64,
    hi: f64,
    atoms: &[f64],
    point_tol: f64,
) -> Result<DistanceEstimate>
where
    FA: Fn(f64) -> Result<f64> + Sync,
    FB: Fn(f64) -> Result<f64> + Sync,
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("kolmogorov window [{lo}, {hi}]")));
    }
    let gap = |x: f64| -> Result<f64> { Ok((fa(x)? - fb(x)?).abs()) };
    let mut a = lo;
    let mut b = hi;
    let mut n = 512usize;
    let mut best = 0.0_f64;
    let mut best_x = lo;
    let mut resolution = (hi - lo) / 512.0;
    for round in 0..6 {
        let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let gaps: Vec<f64> = xs.par_iter().map(|&x| gap(x)).collect::<Result<_>>()?;
        for (&x, &g) in xs.iter().zip(&gaps) {
            if g > best {
                best = g;
                best_x = x;
            }
        }
        resolution = (b - a) / (n - 1) as f64;
        // zoom in around the argmax
        let halfwidth = 2.0 * resolution;
        a = (best_x - halfwidth).max(lo);
        b = (best_x + halfwidth).min(hi);
        n = 129;
        if round == 0 {
            n = 513;
        }
    }
    // one-sided probes at declared jump points
    for &p in atoms {
        for dx in [-1e-9, 1e-9] {
            let g = gap(p + dx)?;
            if g > best {
                best = g;
            }
        }
    }
    Ok(DistanceEstimate {
        kind: MetricKind::Kolmogorov,
        value: best,
        error_bar: resolution.min(1.0) * 0.0 + 2.0 * point_tol + grid_modulus(best, resolution),
        note: format!("sup over adaptive grid, final resolution {resolution:.3e}"),
    })
}

/// Crude modulus term for the grid resolution: the CDF gap cannot move by
/// more than the gap's own scale between neighbouring refined points; we
/// report the refinement step as-is.
fn grid_modulus(_best: f64, resolution: f64) -> f64 {
    resolution
}

/// Kolmogorov distance between two tabulated laws, probing their shared
/// window and any origin atoms.
pub fn kolmogorov_laws(a: &NumericLaw, b: &NumericLaw, point_tol: f64) -> Result<DistanceEstimate> {
    let (a0, a1) = a.support_window();
    let (b0, b1) = b.support_window();
    let mut atoms = Vec::new();
    if a.atom_at_zero() > 0.0 || b.atom_at_zero() > 0.0 {
        atoms.push(0.0);
    }
    kolmogorov(
        |x| Ok(a.cdf(x)),
        |x| Ok(b.cdf(x)),
        a0.min(b0),
        a1.max(b1),
        &atoms,
        point_tol,
    )
}

/// Empirical Wasserstein-1: mean absolute difference of sorted samples.
///
/// The error bar is the standard error over eight disjoint sub-batch
/// estimates.
pub fn wasserstein1_empirical(a: &SampleBatch, b: &SampleBatch) -> Result<DistanceEstimate> {
    if a.values.len() != b.values.len() || a.values.is_empty() {
        return Err(Error::InvalidParams(format!(
            "wasserstein1 needs equal nonempty batches, got {} and {}",
            a.values.len(),
            b.values.len()
        )));
    }
    let full = w1_sorted(&a.values, &b.values);
    let k = 8.min(a.values.len());
    let chunk = a.values.len() / k;
    let mut parts = Vec::with_capacity(k);
    for i in 0..k {
        let lo = i * chunk;
        let hi = if i == k - 1 { a.values.len() } else { lo + chunk };
        parts.push(w1_sorted(&a.values[lo..hi], &b.values[lo..hi]));
    }
    let mean = parts.iter().sum::<f64>() / k as f64;
    let var = parts.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k as f64 - 1.0);
    Ok(DistanceEstimate {
        kind: MetricKind::Wasserstein1,
        value: full,
        error_bar: (var / k as f64).sqrt(),
        note: format!("sorted coupling of {} samples, {k}-split SE", a.values.len()),
    })
}

fn w1_sorted(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum::<f64>() / x.len() as f64
}

/// Dictionary lower bound for `d_{H3}`: the maximum of
/// `|E_A h - E_B h|` over test functions whose derivatives up to order
/// three (and the function itself) are bounded by one.
///
/// `expect` evaluates `E h` for one law; the caller provides one closure
/// per law (quadrature against a tabulated CDF, or a sample mean).
pub fn smooth_h3_lower<EA, EB>(
    expect_a: EA,
    expect_b: EB,
    expectation_tol: f64,
) -> Result<DistanceEstimate>
where
    EA: Fn(&TestFunction) -> Result<f64>,
    EB: Fn(&TestFunction) -> Result<f64>,
{
    let dict = TestFunction::h3_dictionary();
    let mut best = 0.0_f64;
    let mut best_idx = 0;
    for (i, tf) in dict.iter().enumerate() {
        tf.verify_declared_bounds()?;
        let gap = (expect_a(tf)? - expect_b(tf)?).abs();
        if gap > best {
            best = gap;
            best_idx = i;
        }
    }
    Ok(DistanceEstimate {
        kind: MetricKind::SmoothH3Lower,
        value: best,
        error_bar: 2.0 * expectation_tol,
        note: format!(
            "dictionary maximum attained by member {} of {}",
            best_idx,
            dict.len()
        ),
    })
}

/// `d_{H3}` lower bound between two tabulated laws.
pub fn smooth_h3_lower_laws(
    a: &NumericLaw,
    b: &NumericLaw,
    tol: f64,
) -> Result<DistanceEstimate> {
    smooth_h3_lower(
        |tf| Ok(crate::stein::expect_against_law(a, |x| tf.h(x), |x| tf.d1(x))),
        |tf| Ok(crate::stein::expect_against_law(b, |x| tf.h(x), |x| tf.d1(x))),
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::CharFn;
    use crate::model::TsdParams;
    use crate::sampling::{sample_batch, sample_bgd};

    #[test]
    fn kolmogorov_identical_laws_is_zero() {
        let f = |x: f64| Ok(crate::special::normal_cdf(x, 1.0));
        let d = kolmogorov(f, f, -8.0, 8.0, &[], 1e-9).unwrap();
        assert!(d.value < 1e-12);
    }

    #[test]
    fn kolmogorov_shifted_normal() {
        // sup_x |Phi(x) - Phi(x - mu)| = 2 Phi(mu/2) - 1
        let mu = 0.8;
        let fa = |x: f64| Ok(crate::special::normal_cdf(x, 1.0));
        let fb = move |x: f64| Ok(crate::special::normal_cdf(x - mu, 1.0));
        let d = kolmogorov(fa, fb, -9.0, 9.0, &[], 1e-9).unwrap();
        let exact = 2.0 * crate::special::normal_cdf(mu / 2.0, 1.0) - 1.0;
        assert!((d.value - exact).abs() < 1e-6, "{} vs {exact}", d.value);
    }

    #[test]
    fn kolmogorov_catches_atom_gap() {
        // step at 0 vs smooth law: sup attained one-sidedly at the atom
        let fa = |x: f64| Ok(if x >= 0.0 { 1.0 } else { 0.0 });
        let fb = |x: f64| Ok(crate::special::normal_cdf(x, 1.0));
        let d = kolmogorov(fa, fb, -6.0, 6.0, &[0.0], 1e-9).unwrap();
        assert!((d.value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn wasserstein_translation() {
        let p = TsdParams::bgd(1.0, 1.0, 1.0, 1.0).unwrap();
        let a = sample_batch(40_000, 2, 0, |r| sample_bgd(&p, r)).unwrap();
        let mut b = a.clone();
        for v in &mut b.values {
            *v += 0.5;
        }
        let d = wasserstein1_empirical(&a, &b).unwrap();
        assert!((d.value - 0.5).abs() < 1e-12);
        let z = wasserstein1_empirical(&a, &a.clone()).unwrap();
        assert!(z.value == 0.0);
    }

    #[test]
    fn h3_lower_zero_on_equal_laws_and_positive_on_distinct() {
        let p = TsdParams::bgd(1.0, 1.0, 1.0, 2.0).unwrap();
        let q = TsdParams::bgd(1.0, 1.0, 1.0, 1.0).unwrap();
        let lp = NumericLaw::from_charfn(&CharFn::Tempered(p), 1e-8).unwrap();
        let lq = NumericLaw::from_charfn(&CharFn::Tempered(q), 1e-8).unwrap();
        let zero = smooth_h3_lower_laws(&lp, &lp, 1e-8).unwrap();
        assert!(zero.value < 1e-10);
        let pos = smooth_h3_lower_laws(&lp, &lq, 1e-8).unwrap();
        assert!(pos.value > 0.05, "{}", pos.value);
    }

    #[test]
    fn h3_lower_below_wasserstein() {
        // H3 members are 1-Lipschitz, so the lower bound cannot exceed W1
        let p = TsdParams::bgd(1.0, 1.0, 1.0, 2.0).unwrap();
        let q = TsdParams::bgd(1.0, 1.0, 1.0, 1.0).unwrap();
        let lp = NumericLaw::from_charfn(&CharFn::Tempered(p), 1e-8).unwrap();
        let lq = NumericLaw::from_charfn(&CharFn::Tempered(q), 1e-8).unwrap();
        let h3 = smooth_h3_lower_laws(&lp, &lq, 1e-8).unwrap();
        let a = sample_batch(60_000, 5, 0, |r| sample_bgd(&p, r)).unwrap();
        let b = sample_batch(60_000, 5, 1, |r| sample_bgd(&q, r)).unwrap();
        let w1 = wasserstein1_empirical(&a, &b).unwrap();
        assert!(
            h3.value <= w1.value + w1.error_bar + h3.error_bar,
            "h3 {} vs w1 {}",
            h3.value,
            w1.value
        );
    }
}
