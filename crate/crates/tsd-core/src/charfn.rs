//! Closed-form characteristic functions for the tempered stable family,
//! its stable limit, the compound-Poisson approximant, the symmetric
//! variance gamma and the self-decomposability ratio.
//!
//! All complex powers and logarithms are taken on the principal branch;
//! the tempered exponents only ever raise arguments with positive real
//! part, so no branch crossing occurs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{StableParams, TsdParams};
use crate::special::gamma;

/// A characteristic function this crate can evaluate pointwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharFn {
    /// Two-sided tempered stable.
    Tempered(TsdParams),
    /// Two-sided strictly stable with common index in (0, 1).
    Stable(StableParams),
    /// Compound-Poisson approximant `exp(n (e^{psi/n} - 1))`.
    CompoundPoisson { params: TsdParams, n: u32 },
    /// Symmetric variance gamma `(1 + z^2 / lambda^2)^{-m}` (closed form,
    /// used to cross-check the general tempered evaluation).
    Svgd { m: f64, lambda: f64 },
    /// Increment of the self-decomposition `X =d s X + X_t`, `s = e^{-t}`:
    /// `exp(psi(z) - psi(s z))`.
    Ratio { params: TsdParams, t: f64 },
}

/// Exponent contribution of a single Lévy tail.
///
/// `sign = -1` gives the right-tail term in `(lambda - i z)`, `sign = +1`
/// the mirrored left-tail term in `(lambda + i z)`.
fn side_psi(m: f64, alpha: f64, lambda: f64, z: f64, sign: f64) -> Complex64 {
    let w = Complex64::new(lambda, sign * z);
    if alpha == 0.0 {
        m * (Complex64::new(lambda, 0.0) / w).ln()
    } else {
        // Gamma(-alpha) via the recurrence; negative for alpha in (0, 1)
        let g_neg = gamma(1.0 - alpha) / (-alpha);
        m * g_neg * (w.powf(alpha) - Complex64::new(lambda.powf(alpha), 0.0))
    }
}

/// Characteristic exponent `psi(z) = log phi(z)` of a tempered stable law.
pub fn psi_tempered(p: &TsdParams, z: f64) -> Complex64 {
    side_psi(p.m1, p.alpha1, p.lambda1, z, -1.0) + side_psi(p.m2, p.alpha2, p.lambda2, z, 1.0)
}

/// Characteristic exponent of the strictly stable limit:
/// `m1 Gamma(-a) (-i z)^a + m2 Gamma(-a) (i z)^a` with
/// `(+-i z)^a = |z|^a e^{+-i a pi/2 sign(z)}`.
pub fn psi_stable(p: &StableParams, z: f64) -> Complex64 {
    if z == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = p.alpha;
    let g_neg = gamma(1.0 - a) / (-a);
    let mag = z.abs().powf(a);
    let phase = a * std::f64::consts::FRAC_PI_2 * z.signum();
    let minus_iz = mag * Complex64::new(phase.cos(), -phase.sin());
    let plus_iz = mag * Complex64::new(phase.cos(), phase.sin());
    g_neg * (p.m1 * minus_iz + p.m2 * plus_iz)
}

/// Slow oracle: the characteristic exponent by direct quadrature of
/// `int (e^{izu} - 1) nu(du)` (absolutely convergent for indices below 1).
pub fn psi_tempered_quadrature(p: &TsdParams, z: f64, tol: f64) -> Result<Complex64> {
    let side = |m: f64, a: f64, l: f64, sign: f64| -> Result<Complex64> {
        let part = |re: bool| {
            let f = move |u: f64| {
                let w = Complex64::new(0.0, sign * z * u).exp() - 1.0;
                let nu = m * u.powf(-1.0 - a) * (-l * u).exp();
                if re {
                    w.re * nu
                } else {
                    w.im * nu
                }
            };
            // the integrand vanishes like u^{-a} * zu near zero
            let head = crate::quad::integrate_power_singularity(f, 1.0, a, tol * 0.5)?;
            let tail = crate::quad::integrate_exp_tail(f, 1.0, l, tol * 0.5)?;
            Ok::<f64, Error>(head + tail)
        };
        Ok(Complex64::new(part(true)?, part(false)?))
    };
    Ok(side(p.m1, p.alpha1, p.lambda1, 1.0)? + side(p.m2, p.alpha2, p.lambda2, -1.0)?)
}

impl CharFn {
    /// Evaluate the characteristic function at a real argument.
    pub fn eval(&self, z: f64) -> Complex64 {
        match self {
            CharFn::Tempered(p) => psi_tempered(p, z).exp(),
            CharFn::Stable(p) => psi_stable(p, z).exp(),
            CharFn::CompoundPoisson { params, n } => {
                let nf = *n as f64;
                // exponent division, never an n-th root of phi
                let jump_cf = (psi_tempered(params, z) / nf).exp();
                (nf * (jump_cf - 1.0)).exp()
            }
            CharFn::Svgd { m, lambda } => {
                let r = 1.0 + z * z / (lambda * lambda);
                Complex64::new(r.powf(-m), 0.0)
            }
            CharFn::Ratio { params, t } => {
                let s = (-t).exp();
                (psi_tempered(params, z) - psi_tempered(params, s * z)).exp()
            }
        }
    }

    /// Mass of the atom at zero, if the law has one.
    ///
    /// The tempered, stable and SVGD laws are absolutely continuous. The
    /// compound-Poisson approximant has the no-jump atom `e^{-n}`. The
    /// ratio increment is atomic exactly when both stability indices are
    /// zero, with mass `e^{-(m1 + m2) t}`.
    pub fn atom_at_zero(&self) -> f64 {
        match self {
            CharFn::Tempered(_) | CharFn::Stable(_) | CharFn::Svgd { .. } => 0.0,
            CharFn::CompoundPoisson { n, .. } => (-(*n as f64)).exp(),
            CharFn::Ratio { params, t } => {
                if params.alpha1 == 0.0 && params.alpha2 == 0.0 {
                    (-(params.m1 + params.m2) * t).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Construct the ratio characteristic function, validating `t > 0`.
    pub fn ratio(params: TsdParams, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParams(format!(
                "ratio time must be positive and finite, got {t}"
            )));
        }
        Ok(CharFn::Ratio { params, t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cdist(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn unit_at_zero_and_hermitian() {
        let p = TsdParams::new(0.9, 0.4, 1.2, 1.3, 0.6, 2.1).unwrap();
        let cases = [
            CharFn::Tempered(p),
            CharFn::Stable(StableParams::new(0.7, 0.5, 1.1).unwrap()),
            CharFn::CompoundPoisson { params: p, n: 8 },
            CharFn::Svgd { m: 2.0, lambda: 1.5 },
            CharFn::ratio(p, 0.4).unwrap(),
        ];
        for cf in cases {
            assert!(cdist(cf.eval(0.0), Complex64::new(1.0, 0.0)) < 1e-13, "{cf:?}");
            for &z in &[0.3, 1.7, 9.0] {
                let a = cf.eval(-z);
                let b = cf.eval(z).conj();
                assert!(cdist(a, b) < 1e-12, "{cf:?} at z={z}");
                assert!(cf.eval(z).norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn svgd_closed_form_matches_general() {
        let m = 2.3;
        let l = 1.7;
        let p = TsdParams::svgd(m, l).unwrap();
        let general = CharFn::Tempered(p);
        let closed = CharFn::Svgd { m, lambda: l };
        for &z in &[0.1, 0.9, 3.0, 12.0] {
            assert!(cdist(general.eval(z), closed.eval(z)) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn second_log_derivative_is_minus_variance() {
        let p = TsdParams::new(0.8, 0.3, 1.0, 1.2, 0.5, 1.6).unwrap();
        let h = 1e-4;
        let lp = psi_tempered(&p, h);
        let l0 = psi_tempered(&p, 0.0);
        let lm = psi_tempered(&p, -h);
        let d2 = (lp - 2.0 * l0 + lm) / (h * h);
        assert!((d2.re + p.variance()).abs() < 1e-5);
        assert!(d2.im.abs() < 1e-5);
        // first derivative: i C_1
        let d1 = (lp - lm) / (2.0 * h);
        assert!((d1.im - p.mean()).abs() < 1e-6);
    }

    #[test]
    fn compound_poisson_converges_to_tempered() {
        let p = TsdParams::new(1.0, 0.2, 1.5, 0.6, 0.2, 2.0).unwrap();
        let target = CharFn::Tempered(p);
        let z = 2.5;
        let mut prev = f64::INFINITY;
        for n in [4u32, 16, 64, 256, 1024] {
            let cp = CharFn::CompoundPoisson { params: p, n };
            let d = cdist(cp.eval(z), target.eval(z));
            assert!(d < prev, "not improving at n={n}");
            prev = d;
        }
        // first-order error is |psi|^2 / (2 n)
        assert!(prev < 5e-3);
    }

    #[test]
    fn ratio_factorizes_the_law() {
        // phi(z) = phi(s z) * phi_ratio(z)
        let p = TsdParams::new(0.8, 0.4, 1.1, 1.0, 0.3, 1.9).unwrap();
        let t = 0.7;
        let s = (-t as f64).exp();
        let ratio = CharFn::ratio(p, t).unwrap();
        for &z in &[0.4, 2.2, 7.5] {
            let lhs = CharFn::Tempered(p).eval(z);
            let rhs = CharFn::Tempered(p).eval(s * z) * ratio.eval(z);
            assert!(cdist(lhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn exponent_quadrature_oracle() {
        let p = TsdParams::new(0.9, 0.4, 1.2, 1.3, 0.6, 2.1).unwrap();
        for &z in &[0.1, -1.0, 10.0] {
            let closed = psi_tempered(&p, z);
            let quad = psi_tempered_quadrature(&p, z, 1e-10).unwrap();
            assert!(
                (closed - quad).norm() < 1e-7 * (1.0 + closed.norm()),
                "z={z}: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn stable_is_small_lambda_limit() {
        let sp = StableParams::new(0.9, 0.45, 1.2).unwrap();
        let z = 1.3;
        let stable = CharFn::Stable(sp).eval(z);
        let tempered = CharFn::Tempered(sp.tempered(1e-8).unwrap()).eval(z);
        assert!(cdist(stable, tempered) < 1e-5);
    }
}
