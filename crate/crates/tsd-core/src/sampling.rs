//! Exact and approximate samplers for the tempered stable family.
//!
//! - bilateral gamma: difference of two gamma variables;
//! - one-sided stable: Kanter's representation;
//! - one-sided tempered stable: exponential tilting of the stable sampler
//!   by rejection;
//! - small-jump truncation sampler: compound Poisson of the jumps above a
//!   cutoff plus the mean of the removed small jumps;
//! - compound-Poisson approximant: `Poisson(n)` independent copies of the
//!   `1/n`-fraction law.
//!
//! All randomness flows through [`RngStream`], a counter-based ChaCha
//! generator addressed by `(seed, stream)` so that parallel workers get
//! non-overlapping, reproducible streams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::model::TsdParams;
use crate::special::{gamma, upper_incomplete_gamma};

/// Reproducible random stream: ChaCha12 keyed by `seed` with the stream
/// counter set to `stream`, so distinct streams never overlap.
pub struct RngStream(ChaCha12Rng);

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream(rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// A batch of draws together with the stream coordinates that produced it.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub seed: u64,
    pub stream: u64,
    pub values: Vec<f64>,
}

/// One draw of a positive stable variable with Laplace transform
/// `exp(-m Gamma(1-alpha)/alpha * s^alpha)` (Lévy density `m u^{-1-alpha}`),
/// via Kanter's representation scaled appropriately.
pub fn sample_one_sided_stable<R: Rng + ?Sized>(m: f64, alpha: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let w: f64 = Exp1.sample(rng);
    let pi_u = std::f64::consts::PI * u;
    let a = ((1.0 - alpha) * pi_u).sin() * (alpha * pi_u).sin().powf(alpha / (1.0 - alpha))
        / pi_u.sin().powf(1.0 / (1.0 - alpha));
    let standard = (a / w).powf((1.0 - alpha) / alpha);
    let scale = (m * gamma(1.0 - alpha) / alpha).powf(1.0 / alpha);
    scale * standard
}

/// Acceptance probability of the exponential-tilting rejection step.
pub fn tilting_acceptance_rate(m: f64, alpha: f64, lambda: f64) -> f64 {
    (-m * gamma(1.0 - alpha) * lambda.powf(alpha) / alpha).exp()
}

/// One draw of the positive tempered stable variable with Lévy density
/// `m u^{-1-alpha} e^{-lambda u}` (`alpha` in `(0,1)`), by rejection:
/// accept a stable draw `S` with probability `e^{-lambda S}`.
///
/// Fails with [`Error::SamplerDegenerate`] when the overall acceptance
/// rate `exp(-m Gamma(1-alpha) lambda^alpha / alpha)` drops below 1e-4.
pub fn sample_one_sided_tempered<R: Rng + ?Sized>(
    m: f64,
    alpha: f64,
    lambda: f64,
    rng: &mut R,
) -> Result<f64> {
    let rate = tilting_acceptance_rate(m, alpha, lambda);
    if rate < 1e-4 {
        return Err(Error::SamplerDegenerate(format!(
            "tilting acceptance rate {rate:.3e} below 1e-4 (m={m}, alpha={alpha}, lambda={lambda})"
        )));
    }
    loop {
        let s = sample_one_sided_stable(m, alpha, rng);
        let u: f64 = rng.gen();
        if u < (-lambda * s).exp() {
            return Ok(s);
        }
    }
}

/// One draw of a gamma variable with shape `m` and *rate* `lambda`.
fn sample_gamma<R: Rng + ?Sized>(m: f64, lambda: f64, rng: &mut R) -> Result<f64> {
    let g = Gamma::new(m, 1.0 / lambda)
        .map_err(|e| Error::InvalidParams(format!("gamma sampler: {e}")))?;
    Ok(g.sample(rng))
}

/// One draw of a bilateral gamma variable (both stability indices zero).
pub fn sample_bgd<R: Rng + ?Sized>(p: &TsdParams, rng: &mut R) -> Result<f64> {
    if p.alpha1 != 0.0 || p.alpha2 != 0.0 {
        return Err(Error::Domain(
            "sample_bgd requires both stability indices to be zero".into(),
        ));
    }
    Ok(sample_gamma(p.m1, p.lambda1, rng)? - sample_gamma(p.m2, p.lambda2, rng)?)
}

/// One draw of the two-sided tempered stable law, composing one-sided
/// samplers tail by tail (gamma when the index is zero, tilted stable
/// otherwise).
pub fn sample_tempered<R: Rng + ?Sized>(p: &TsdParams, rng: &mut R) -> Result<f64> {
    let side = |m: f64, a: f64, l: f64, rng: &mut R| -> Result<f64> {
        if a == 0.0 {
            sample_gamma(m, l, rng)
        } else if tilting_acceptance_rate(m, a, l) >= 1e-4 {
            sample_one_sided_tempered(m, a, l, rng)
        } else {
            // heavy tempering: rejection would stall, route to the
            // small-jump truncation representation instead
            sample_truncated_side(m, a, l, 1e-3, rng)
        }
    };
    let right = side(p.m1, p.alpha1, p.lambda1, rng)?;
    let left = side(p.m2, p.alpha2, p.lambda2, rng)?;
    Ok(right - left)
}

/// Compound-Poisson jump representation of one Lévy tail with jumps below
/// `eps` removed and replaced by their mean:
/// `sum of Poisson(mass(eps)) jumps from nu restricted to [eps, inf)`,
/// plus `int_0^eps u nu(du)`.
fn sample_truncated_side<R: Rng + ?Sized>(
    m: f64,
    alpha: f64,
    lambda: f64,
    eps: f64,
    rng: &mut R,
) -> Result<f64> {
    // Lévy mass above the cutoff: m lambda^alpha Gamma(-alpha, lambda eps)
    let mass = m * lambda.powf(alpha) * upper_incomplete_gamma(-alpha, lambda * eps)?;
    // mean of the removed small jumps
    let small_mean = m * lambda.powf(alpha - 1.0)
        * (gamma(1.0 - alpha) - upper_incomplete_gamma(1.0 - alpha, lambda * eps)?);
    let count = Poisson::new(mass)
        .map_err(|e| Error::SamplerDegenerate(format!("poisson rate {mass}: {e}")))?
        .sample(rng) as u64;
    let mut total = small_mean;
    for _ in 0..count {
        total += sample_jump_above(alpha, lambda, eps, rng);
    }
    Ok(total)
}

/// One jump from the normalized density proportional to
/// `u^{-1-alpha} e^{-lambda u}` on `[eps, inf)`, by rejection from a
/// two-piece proposal: Pareto on `[eps, 1/lambda)` and a shifted
/// exponential beyond.
fn sample_jump_above<R: Rng + ?Sized>(alpha: f64, lambda: f64, eps: f64, rng: &mut R) -> f64 {
    let knee = (1.0 / lambda).max(eps * (1.0 + 1e-12));
    // proposal weights proportional to upper bounds of the target on each piece
    let w_head = if alpha == 0.0 {
        (knee / eps).ln()
    } else {
        (eps.powf(-alpha) - knee.powf(-alpha)) / alpha
    };
    let w_tail = knee.powf(-1.0 - alpha) * (-(lambda * knee)).exp() / lambda;
    loop {
        let u: f64 = rng.gen();
        let (x, proposal) = if u * (w_head + w_tail) < w_head {
            // Pareto piece: density proportional to x^{-1-alpha}
            let v: f64 = rng.gen();
            let x = if alpha == 0.0 {
                eps * (knee / eps).powf(v)
            } else {
                (eps.powf(-alpha) * (1.0 - v) + knee.powf(-alpha) * v).powf(-1.0 / alpha)
            };
            (x, x.powf(-1.0 - alpha))
        } else {
            // exponential tail piece
            let e: f64 = Exp1.sample(rng);
            let x = knee + e / lambda;
            (x, knee.powf(-1.0 - alpha) * (-lambda * x).exp())
        };
        let target = x.powf(-1.0 - alpha) * (-lambda * x).exp();
        let acc: f64 = rng.gen();
        if acc * proposal <= target {
            return x;
        }
    }
}

/// One draw of the truncation approximant: both tails replaced by their
/// compound-Poisson parts above `eps` plus the small-jump means.
pub fn sample_truncated<R: Rng + ?Sized>(p: &TsdParams, eps: f64, rng: &mut R) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "truncation level must be positive, got {eps}"
        )));
    }
    let right = sample_truncated_side(p.m1, p.alpha1, p.lambda1, eps, rng)?;
    let left = sample_truncated_side(p.m2, p.alpha2, p.lambda2, eps, rng)?;
    Ok(right - left)
}

/// One draw of the compound-Poisson approximant: a `Poisson(n)` number of
/// independent draws of `TSD(m1/n, a1, l1, m2/n, a2, l2)`.
pub fn sample_cpd_approximant<R: Rng + ?Sized>(p: &TsdParams, n: u32, rng: &mut R) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("approximant order n must be positive".into()));
    }
    let nf = n as f64;
    let frac = TsdParams::new(p.m1 / nf, p.alpha1, p.lambda1, p.m2 / nf, p.alpha2, p.lambda2)?;
    let count = Poisson::new(nf)
        .map_err(|e| Error::SamplerDegenerate(format!("poisson rate {nf}: {e}")))?
        .sample(rng) as u64;
    let mut total = 0.0;
    for _ in 0..count {
        total += sample_tempered(&frac, rng)?;
    }
    Ok(total)
}

/// Draw `count` i.i.d. copies of the law on stream `(seed, stream)`.
pub fn sample_batch<F>(count: usize, seed: u64, stream: u64, mut draw: F) -> Result<SampleBatch>
where
    F: FnMut(&mut RngStream) -> Result<f64>,
{
    let mut rng = RngStream::new(seed, stream);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(draw(&mut rng)?);
    }
    Ok(SampleBatch { seed, stream, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, var)
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(7, 3);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(7, 3);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = RngStream::new(7, 4);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bgd_moments() {
        let p = TsdParams::bgd(1.5, 2.0, 0.7, 3.0).unwrap();
        let batch = sample_batch(200_000, 11, 0, |r| sample_bgd(&p, r)).unwrap();
        let (m, v) = mean_var(&batch.values);
        assert!((m - p.mean()).abs() < 0.01, "mean {m} vs {}", p.mean());
        assert!((v - p.variance()).abs() < 0.02, "var {v} vs {}", p.variance());
    }

    #[test]
    fn stable_sampler_laplace_transform() {
        // E e^{-s X} = exp(-m Gamma(1-a)/a s^a)
        let (m, alpha, s) = (0.8, 0.6, 1.3);
        let batch =
            sample_batch(200_000, 5, 1, |r| Ok(sample_one_sided_stable(m, alpha, r))).unwrap();
        let emp: f64 =
            batch.values.iter().map(|&x| (-s * x as f64).exp()).sum::<f64>() / 200_000.0;
        let exact = (-m * gamma(1.0 - alpha) / alpha * s.powf(alpha)).exp();
        assert!((emp - exact).abs() < 3e-3, "{emp} vs {exact}");
    }

    #[test]
    fn tempered_sampler_matches_cumulants() {
        let p = TsdParams::new(0.9, 0.4, 1.5, 0.6, 0.3, 2.0).unwrap();
        let batch = sample_batch(150_000, 42, 2, |r| sample_tempered(&p, r)).unwrap();
        let (m, v) = mean_var(&batch.values);
        assert!((m - p.mean()).abs() < 0.02, "mean {m} vs {}", p.mean());
        assert!((v - p.variance()).abs() < 0.05, "var {v} vs {}", p.variance());
    }

    #[test]
    fn degenerate_tilting_rejected() {
        // huge lambda with alpha near 1 drives the acceptance rate to zero
        let mut r = RngStream::new(1, 0);
        let e = sample_one_sided_tempered(5.0, 0.9, 50.0, &mut r);
        assert!(matches!(e, Err(Error::SamplerDegenerate(_))));
    }

    #[test]
    fn truncation_sampler_moments() {
        let p = TsdParams::new(0.9, 0.4, 1.5, 0.6, 0.3, 2.0).unwrap();
        let eps = 1e-4;
        let batch = sample_batch(60_000, 9, 5, |r| sample_truncated(&p, eps, r)).unwrap();
        let (m, _) = mean_var(&batch.values);
        // truncation preserves the mean exactly (small jumps replaced by
        // their mean), so only Monte Carlo error remains
        assert!((m - p.mean()).abs() < 0.05, "mean {m} vs {}", p.mean());
    }

    #[test]
    fn cpd_sampler_moments() {
        let p = TsdParams::bgd(1.0, 1.0, 1.0, 2.0).unwrap();
        let batch = sample_batch(120_000, 3, 7, |r| sample_cpd_approximant(&p, 64, r)).unwrap();
        let (m, v) = mean_var(&batch.values);
        assert!((m - p.mean()).abs() < 0.03);
        // approximant variance converges to C2 at rate 1/n
        assert!((v - p.variance()).abs() < 0.08);
    }
}
