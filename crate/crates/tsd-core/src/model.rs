//! Parameterizations of the two-sided tempered stable family and its
//! nested sub-families, with Lévy densities and cumulants.
//!
//! `TSD(m1, a1, l1, m2, a2, l2)` has Lévy density
//!
//! ```text
//! nu(u) = m1 u^{-1-a1} e^{-l1 u}          (u > 0)
//!         m2 |u|^{-1-a2} e^{-l2 |u|}      (u < 0)
//! ```
//!
//! with stability indices `a1, a2` in `[0, 1)` and positive `m_i, l_i`.
//! All cumulants are finite:
//!
//! ```text
//! C_n = Gamma(n - a1) m1 / l1^{n - a1}  +  (-1)^n Gamma(n - a2) m2 / l2^{n - a2}.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::special::gamma;

/// Parameters of a two-sided tempered stable distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsdParams {
    pub m1: f64,
    pub alpha1: f64,
    pub lambda1: f64,
    pub m2: f64,
    pub alpha2: f64,
    pub lambda2: f64,
}

/// Nested sub-families, ordered from most general to most special.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubFamily {
    /// General six-parameter tempered stable.
    General,
    /// KoBol: equal stability indices.
    KoBol,
    /// CGMY: equal indices and equal intensities.
    Cgmy,
    /// Bilateral gamma: both indices zero.
    Bgd,
    /// Variance gamma: bilateral gamma with equal intensities.
    Vgd,
    /// Symmetric variance gamma: variance gamma with equal tilts.
    Svgd,
}

impl std::fmt::Display for SubFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SubFamily::General => "general",
            SubFamily::KoBol => "kobol",
            SubFamily::Cgmy => "cgmy",
            SubFamily::Bgd => "bgd",
            SubFamily::Vgd => "vgd",
            SubFamily::Svgd => "svgd",
        };
        f.write_str(s)
    }
}

impl TsdParams {
    pub fn new(
        m1: f64,
        alpha1: f64,
        lambda1: f64,
        m2: f64,
        alpha2: f64,
        lambda2: f64,
    ) -> Result<Self> {
        let p = TsdParams {
            m1,
            alpha1,
            lambda1,
            m2,
            alpha2,
            lambda2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Bilateral gamma `BGD(m1, l1, m2, l2)`: both stability indices zero.
    pub fn bgd(m1: f64, lambda1: f64, m2: f64, lambda2: f64) -> Result<Self> {
        Self::new(m1, 0.0, lambda1, m2, 0.0, lambda2)
    }

    /// Variance gamma `VGD(m, l1, l2)`: bilateral gamma with equal intensities.
    pub fn vgd(m: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(m, 0.0, lambda1, m, 0.0, lambda2)
    }

    /// Symmetric variance gamma `SVGD(m, l)`.
    pub fn svgd(m: f64, lambda: f64) -> Result<Self> {
        Self::new(m, 0.0, lambda, m, 0.0, lambda)
    }

    /// Symmetric variance gamma whose variance matches `N(0, sigma^2)`:
    /// `SVGD(m, sqrt(2 m) / sigma)`.
    pub fn svgd_matching_normal(m: f64, sigma: f64) -> Result<Self> {
        if sigma <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "normal scale must be positive, got {sigma}"
            )));
        }
        Self::svgd(m, (2.0 * m).sqrt() / sigma)
    }

    /// CGMY with equal intensities `m` and equal index `alpha`; the tilts
    /// are ordered right tail `lambda1`, left tail `lambda2`.
    pub fn cgmy(m: f64, alpha: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(m, alpha, lambda1, m, alpha, lambda2)
    }

    pub fn validate(&self) -> Result<()> {
        let check_side = |tag: &str, m: f64, a: f64, l: f64| -> Result<()> {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidParams(format!("{tag}: intensity m = {m} must be positive")));
            }
            if !(a.is_finite() && (0.0..1.0).contains(&a)) {
                return Err(Error::InvalidParams(format!(
                    "{tag}: stability index alpha = {a} must lie in [0, 1)"
                )));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParams(format!("{tag}: tilt lambda = {l} must be positive")));
            }
            Ok(())
        };
        check_side("right tail", self.m1, self.alpha1, self.lambda1)?;
        check_side("left tail", self.m2, self.alpha2, self.lambda2)
    }

    /// Most specific sub-family the parameters fall into.
    pub fn sub_family(&self) -> SubFamily {
        let eq = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        if !eq(self.alpha1, self.alpha2) {
            return SubFamily::General;
        }
        if self.alpha1 == 0.0 {
            if !eq(self.m1, self.m2) {
                return SubFamily::Bgd;
            }
            if eq(self.lambda1, self.lambda2) {
                SubFamily::Svgd
            } else {
                SubFamily::Vgd
            }
        } else if eq(self.m1, self.m2) {
            SubFamily::Cgmy
        } else {
            SubFamily::KoBol
        }
    }

    /// Is the Lévy measure symmetric about the origin?
    pub fn is_symmetric(&self) -> bool {
        self.sub_family() == SubFamily::Svgd
            || (self.m1 == self.m2 && self.alpha1 == self.alpha2 && self.lambda1 == self.lambda2)
    }

    /// Lévy density at `u != 0`.
    pub fn levy_density(&self, u: f64) -> f64 {
        if u > 0.0 {
            self.m1 * u.powf(-1.0 - self.alpha1) * (-self.lambda1 * u).exp()
        } else if u < 0.0 {
            let v = -u;
            self.m2 * v.powf(-1.0 - self.alpha2) * (-self.lambda2 * v).exp()
        } else {
            f64::INFINITY
        }
    }

    /// Contribution of one tail to the n-th cumulant:
    /// `Gamma(n - a) m / l^{n - a}`.
    fn cumulant_side(n: u32, m: f64, a: f64, l: f64) -> f64 {
        let nf = n as f64;
        gamma(nf - a) * m * l.powf(a - nf)
    }

    /// n-th cumulant in closed form, `n >= 1`.
    pub fn cumulant(&self, n: u32) -> f64 {
        assert!(n >= 1, "cumulants are defined for n >= 1");
        let right = Self::cumulant_side(n, self.m1, self.alpha1, self.lambda1);
        let left = Self::cumulant_side(n, self.m2, self.alpha2, self.lambda2);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        right + sign * left
    }

    /// One-sided absolute cumulant contributions `(right, left)`:
    /// both are `int u^n` of the respective tail density, taken positive.
    pub fn cumulant_sides(&self, n: u32) -> (f64, f64) {
        (
            Self::cumulant_side(n, self.m1, self.alpha1, self.lambda1),
            Self::cumulant_side(n, self.m2, self.alpha2, self.lambda2),
        )
    }

    /// n-th cumulant by direct quadrature of `int u^n nu(du)`; slow oracle
    /// used to cross-check the closed form.
    pub fn cumulant_quadrature(&self, n: u32, tol: f64) -> Result<f64> {
        assert!(n >= 1);
        let nf = n as f64;
        let side = |m: f64, a: f64, l: f64| -> Result<f64> {
            // integrand u^{n-1-a} m e^{-l u}; singular at 0 only if n=1, a>0
            let f = |u: f64| m * u.powf(nf - 1.0 - a) * (-l * u).exp();
            let head = if nf - 1.0 - a < 0.0 {
                quad::integrate_power_singularity(f, 1.0, a + 1.0 - nf, tol * 0.5)?
            } else {
                quad::integrate(f, 0.0, 1.0, tol * 0.5)?
            };
            let tail = quad::integrate_exp_tail(f, 1.0, l, tol * 0.5)?;
            Ok(head + tail)
        };
        let right = side(self.m1, self.alpha1, self.lambda1)?;
        let left = side(self.m2, self.alpha2, self.lambda2)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(right + sign * left)
    }

    /// Mean `C_1`.
    pub fn mean(&self) -> f64 {
        self.cumulant(1)
    }

    /// Variance `C_2` (always positive).
    pub fn variance(&self) -> f64 {
        self.cumulant(2)
    }
}

/// Parameters of a (non-tempered) two-sided strictly stable distribution
/// with common index `alpha` in `(0, 1)`: the `lambda -> 0` limit of the
/// KoBol family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableParams {
    pub m1: f64,
    pub alpha: f64,
    pub m2: f64,
}

impl StableParams {
    pub fn new(m1: f64, alpha: f64, m2: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParams(format!(
                "stable index must lie in (0, 1), got {alpha}"
            )));
        }
        if !(m1 > 0.0 && m2 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "stable intensities must be positive, got m1 = {m1}, m2 = {m2}"
            )));
        }
        Ok(StableParams { m1, alpha, m2 })
    }

    /// Tempered stable with these tail intensities and a common tilt.
    pub fn tempered(&self, lambda: f64) -> Result<TsdParams> {
        TsdParams::new(self.m1, self.alpha, lambda, self.m2, self.alpha, lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + b.abs())
    }

    #[test]
    fn cumulant_matches_quadrature() {
        let p = TsdParams::new(0.8, 0.4, 1.3, 1.1, 0.6, 2.0).unwrap();
        for n in 1..=6 {
            let cf = p.cumulant(n);
            let cq = p.cumulant_quadrature(n, 1e-11).unwrap();
            assert!(rel(cf, cq) < 1e-9, "n={n}: closed {cf} vs quad {cq}");
        }
    }

    #[test]
    fn bgd_cumulants_are_gamma_differences() {
        // BGD = Gamma(m1, rate l1) - Gamma(m2, rate l2); cumulants
        // (n-1)! m / l^n with alternating sign for the subtracted part.
        let p = TsdParams::bgd(1.5, 2.0, 0.7, 3.0).unwrap();
        for n in 1u32..=5 {
            let fact: f64 = (1..n).map(|k| k as f64).product();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let expect = fact * 1.5 / 2.0f64.powi(n as i32) + sign * fact * 0.7 / 3.0f64.powi(n as i32);
            assert!(rel(p.cumulant(n), expect) < 1e-12);
        }
    }

    #[test]
    fn symmetric_odd_cumulants_vanish() {
        let p = TsdParams::svgd(2.0, 1.5).unwrap();
        assert!(p.cumulant(1).abs() < 1e-13);
        assert!(p.cumulant(3).abs() < 1e-13);
        assert!(p.cumulant(2) > 0.0);
    }

    #[test]
    fn svgd_matches_normal_variance() {
        let sigma = 0.8;
        let p = TsdParams::svgd_matching_normal(3.0, sigma).unwrap();
        assert!(rel(p.variance(), sigma * sigma) < 1e-12);
    }

    #[test]
    fn classification() {
        assert_eq!(
            TsdParams::new(1.0, 0.3, 1.0, 2.0, 0.5, 1.0).unwrap().sub_family(),
            SubFamily::General
        );
        assert_eq!(
            TsdParams::new(1.0, 0.3, 1.0, 2.0, 0.3, 1.5).unwrap().sub_family(),
            SubFamily::KoBol
        );
        assert_eq!(
            TsdParams::cgmy(1.0, 0.3, 1.0, 1.5).unwrap().sub_family(),
            SubFamily::Cgmy
        );
        assert_eq!(
            TsdParams::bgd(1.0, 1.0, 2.0, 1.5).unwrap().sub_family(),
            SubFamily::Bgd
        );
        assert_eq!(TsdParams::vgd(1.0, 1.0, 1.5).unwrap().sub_family(), SubFamily::Vgd);
        assert_eq!(TsdParams::svgd(1.0, 1.0).unwrap().sub_family(), SubFamily::Svgd);
    }

    #[test]
    fn json_round_trip_rejects_unknown_fields() {
        let p = TsdParams::new(1.0, 0.2, 1.0, 1.0, 0.2, 1.0).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: TsdParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let bad = r#"{"m1":1,"alpha1":0,"lambda1":1,"m2":1,"alpha2":0,"lambda2":1,"extra":5}"#;
        assert!(serde_json::from_str::<TsdParams>(bad).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TsdParams::new(-1.0, 0.2, 1.0, 1.0, 0.2, 1.0).is_err());
        assert!(TsdParams::new(1.0, 1.0, 1.0, 1.0, 0.2, 1.0).is_err());
        assert!(TsdParams::new(1.0, 0.2, 0.0, 1.0, 0.2, 1.0).is_err());
        assert!(StableParams::new(1.0, 1.0, 1.0).is_err());
    }
}
