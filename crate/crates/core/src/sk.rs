//! Scalar Gaussian key-rate kernel.
//!
//! A single jointly Gaussian triple (X, Y, Z) is summarised by the two
//! correlations it carries, `rho_xy` between the terminals and `rho_xz`
//! towards the eavesdropper. The key-rate curve depends on them only through
//!
//! ```text
//! beta = (rho_xy^2 - rho_xz^2) / (1 - rho_xy^2)
//! R(r) = 1/2 log2(1 + beta+ - beta+ 2^(-2r))
//! ```
//!
//! All rates are in bits.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Correlation parameters of one scalar Gaussian source component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussTriple<T> {
    rho_xy: T,
    rho_xz: T,
}

impl<T: Real> GaussTriple<T> {
    /// Signs are accepted and ignored; only squares enter the key rate.
    pub fn new(rho_xy: T, rho_xz: T) -> Result<Self> {
        for rho in [rho_xy, rho_xz] {
            if !rho.is_finite() || rho.abs() > T::one() {
                return Err(Error::CorrelationOutOfRange(rho.as_f64()));
            }
        }
        if rho_xy.abs() == T::one() {
            return Err(Error::DegenerateCorrelation);
        }
        Ok(Self { rho_xy, rho_xz })
    }

    /// A triple without an eavesdropper (`rho_xz = 0`).
    pub fn without_eavesdropper(rho_xy: T) -> Result<Self> {
        Self::new(rho_xy, T::zero())
    }

    pub fn rho_xy(&self) -> T {
        self.rho_xy
    }

    pub fn rho_xz(&self) -> T {
        self.rho_xz
    }

    /// `Var(Y | X, Z) / Var(Y | Z)` for a degraded triple X - Y - Z.
    pub fn sigma_y_given_xz(&self) -> T {
        let (a, c) = (self.rho_xy * self.rho_xy, self.rho_xz * self.rho_xz);
        (T::one() - a) / (T::one() - c)
    }

    /// Reference scale for [`Self::sigma_y_given_xz`]; always one.
    pub fn sigma_y_given_z(&self) -> T {
        T::one()
    }
}

/// Per-component efficiency parameter and its positive part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta<T> {
    beta: T,
    beta_plus: T,
}

impl<T: Real> Beta<T> {
    /// Wrap a raw beta value. Negative values clamp to `beta_plus = 0`.
    pub fn new(beta: T) -> Result<Self> {
        if beta.is_nan() || beta.is_infinite() {
            return Err(Error::InvalidArgument(format!("beta must be finite, got {beta}")));
        }
        Ok(Self { beta, beta_plus: beta.max(T::zero()) })
    }

    pub fn value(&self) -> T {
        self.beta
    }

    pub fn plus(&self) -> T {
        self.beta_plus
    }
}

/// `beta = (rho_xy^2 - rho_xz^2) / (1 - rho_xy^2)`.
pub fn beta_of<T: Real>(triple: &GaussTriple<T>) -> Beta<T> {
    let a = triple.rho_xy * triple.rho_xy;
    let c = triple.rho_xz * triple.rho_xz;
    let beta = (a - c) / (T::one() - a);
    Beta { beta, beta_plus: beta.max(T::zero()) }
}

/// `1 - 2^(-2r)`, accurate for small `r`.
#[inline]
pub(crate) fn one_minus_pow2<T: Real>(r: T) -> T {
    -(-(T::two() * r * T::LN_2())).exp_m1()
}

fn check_rate<T: Real>(r: T) -> Result<()> {
    if r.is_nan() || r < T::zero() {
        return Err(Error::NegativeRate(r.as_f64()));
    }
    if r.is_infinite() {
        return Err(Error::InvalidArgument(
            "rate must be finite; use scalar_asymptote for the r -> infinity limit".into(),
        ));
    }
    Ok(())
}

/// Key rate `R(r) = 1/2 log2(1 + beta+ (1 - 2^(-2r)))` in bits.
pub fn scalar_key_rate<T: Real>(beta: Beta<T>, r: T) -> Result<T> {
    check_rate(r)?;
    Ok(key_rate_unchecked(beta.beta_plus, r))
}

#[inline]
pub(crate) fn key_rate_unchecked<T: Real>(beta_plus: T, r: T) -> T {
    T::half() * (beta_plus * one_minus_pow2(r)).ln_1p() / T::LN_2()
}

/// Slope `dR/dr` of the scalar curve at `r`, in bits of key per bit of
/// communication. Equals `beta+` at `r = 0`.
pub fn scalar_slope<T: Real>(beta: Beta<T>, r: T) -> Result<T> {
    check_rate(r)?;
    let b = beta.beta_plus;
    let decay = (-(T::two() * r * T::LN_2())).exp();
    Ok(b * decay / (T::one() + b * one_minus_pow2(r)))
}

/// Key rate from the conditional-variance form
/// `1/2 log2((s_xz 2^(-2r) + s_z (1 - 2^(-2r))) / s_xz)` for degraded sources.
pub fn scalar_key_rate_degraded_form<T: Real>(
    sigma_y_given_xz: T,
    sigma_y_given_z: T,
    r: T,
) -> Result<T> {
    if !(sigma_y_given_xz > T::zero()
        && sigma_y_given_xz <= sigma_y_given_z
        && sigma_y_given_z.is_finite())
    {
        return Err(Error::InvalidVariance {
            given_xz: sigma_y_given_xz.as_f64(),
            given_z: sigma_y_given_z.as_f64(),
        });
    }
    check_rate(r)?;
    let shrink = one_minus_pow2(r);
    let kept = T::one() - shrink;
    let ratio = (sigma_y_given_xz * kept + sigma_y_given_z * shrink) / sigma_y_given_xz;
    Ok(T::half() * ratio.log2())
}

/// `lim_{r -> inf} R(r) = 1/2 log2(1 + beta+)`.
pub fn scalar_asymptote<T: Real>(beta: Beta<T>) -> T {
    T::half() * beta.beta_plus.ln_1p() / T::LN_2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn b(rho_xy: f64, rho_xz: f64) -> Beta<f64> {
        beta_of(&GaussTriple::new(rho_xy, rho_xz).unwrap())
    }

    #[test]
    fn beta_examples() {
        assert_relative_eq!(b(0.8, 0.6).value(), 0.28 / 0.36, epsilon = 1e-15);
        assert_eq!(b(0.0, 0.0).value(), 0.0);
        let neg = b(0.5, 0.7);
        assert_relative_eq!(neg.value(), -0.32, epsilon = 1e-15);
        assert_eq!(neg.plus(), 0.0);
    }

    #[test]
    fn signs_are_ignored() {
        assert_eq!(b(-0.8, 0.6), b(0.8, -0.6));
    }

    #[test]
    fn unit_correlation_rejected() {
        assert_eq!(GaussTriple::new(1.0, 0.2), Err(Error::DegenerateCorrelation));
        assert_eq!(GaussTriple::new(-1.0, 0.0), Err(Error::DegenerateCorrelation));
        assert!(matches!(GaussTriple::new(1.2, 0.0), Err(Error::CorrelationOutOfRange(_))));
        assert!(matches!(GaussTriple::new(0.2, f64::NAN), Err(Error::CorrelationOutOfRange(_))));
    }

    #[test]
    fn key_rate_edges() {
        let one = Beta::new(1.0).unwrap();
        assert_eq!(scalar_key_rate(one, 0.0).unwrap(), 0.0);
        assert_relative_eq!(scalar_asymptote(one), 0.5, epsilon = 1e-15);
        assert_relative_eq!(scalar_key_rate(one, 60.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(scalar_key_rate(b(0.5, 0.7), 3.0).unwrap(), 0.0);
        assert!(matches!(scalar_key_rate(one, -1e-3), Err(Error::NegativeRate(_))));
        assert!(scalar_key_rate(one, f64::INFINITY).is_err());
    }

    #[test]
    fn conditional_variance_form_matches() {
        // rho_xy^2 = 0.5, no eavesdropper: s_y|xz = 0.5, s_y|z = 1.
        let beta = b(0.5f64.sqrt(), 0.0);
        let direct = scalar_key_rate(beta, 0.5).unwrap();
        let degraded = scalar_key_rate_degraded_form(0.5, 1.0, 0.5).unwrap();
        assert_relative_eq!(direct, degraded, epsilon = 1e-14);
        assert_relative_eq!(direct, 0.5 * (1.5f64).log2(), epsilon = 1e-14);
    }

    #[test]
    fn degraded_form_edges() {
        assert_eq!(scalar_key_rate_degraded_form(0.7, 0.7, 2.0).unwrap(), 0.0);
        assert_relative_eq!(
            scalar_key_rate_degraded_form(0.5, 1.0, 80.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(matches!(
            scalar_key_rate_degraded_form(1.0, 0.5, 1.0),
            Err(Error::InvalidVariance { .. })
        ));
        assert!(scalar_key_rate_degraded_form(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn triple_variances_reproduce_beta() {
        let t = GaussTriple::new(0.9, 0.4).unwrap();
        let beta = beta_of(&t);
        for r in [0.0, 0.1, 1.0, 4.0] {
            let a = scalar_key_rate(beta, r).unwrap();
            let c =
                scalar_key_rate_degraded_form(t.sigma_y_given_xz(), t.sigma_y_given_z(), r).unwrap();
            assert_relative_eq!(a, c, epsilon = 1e-13);
        }
    }

    #[test]
    fn slope_at_origin_is_beta_plus() {
        let beta = Beta::new(0.7).unwrap();
        assert_relative_eq!(scalar_slope(beta, 0.0).unwrap(), 0.7, epsilon = 1e-15);
        let h = 1e-6;
        let fd = scalar_key_rate(beta, h).unwrap() / h;
        assert_relative_eq!(fd, 0.7, max_relative = 1e-4);
    }

    #[test]
    fn single_precision_works() {
        let beta = beta_of(&GaussTriple::new(0.8f32, 0.6).unwrap());
        assert!((beta.value() - 0.777_777_8).abs() < 1e-5);
        let r = scalar_key_rate(beta, 1.0f32).unwrap();
        assert!(r > 0.0 && r < scalar_asymptote(beta));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn concave_and_increasing(beta in 0.0f64..20.0, r1 in 0.0f64..8.0, r2 in 0.0f64..8.0, lam in 0.01f64..0.99) {
                let beta = Beta::new(beta).unwrap();
                let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
                let f = |r| scalar_key_rate(beta, r).unwrap();
                prop_assert!(f(hi) >= f(lo));
                let mid = lam * lo + (1.0 - lam) * hi;
                prop_assert!(f(mid) >= lam * f(lo) + (1.0 - lam) * f(hi) - 1e-12);
            }

            #[test]
            fn strictly_increasing_when_positive(beta in 1e-3f64..10.0, r in 0.0f64..4.0) {
                let beta = Beta::new(beta).unwrap();
                prop_assert!(scalar_key_rate(beta, r + 0.01).unwrap() > scalar_key_rate(beta, r).unwrap());
            }
        }
    }
}
