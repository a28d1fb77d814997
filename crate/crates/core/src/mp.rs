//! Marčenko–Pastur spectral functionals.
//!
//! `δ₀(x)` is `c` times the Stieltjes transform of the Marčenko–Pastur law
//! `μ_c` evaluated at `-x`, i.e. the deterministic equivalent of
//! `(1/K) tr (HHᴴ/K + x I)⁻¹` for an `N × K` matrix `H` with i.i.d. `CN(0,1)`
//! entries and `c = N/K`. It is the positive root of
//!
//! ```text
//! x δ² + (1 − c + x) δ − c = 0.
//! ```
//!
//! The higher-order functions `δ_t`, `γ_t` are the deterministic equivalents of
//! `(1/K) tr Q(x) Q(σ²)^t` and `(1/K) tr Q(x) Q(σ²)^t HHᴴ/K`, generated by a
//! linear recursion anchored at a base noise level `σ²`.

use std::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};

/// A spectral argument `x > 0` together with the aspect ratio `c = N/K > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpPoint {
    x: f64,
    c: f64,
}

impl MpPoint {
    pub fn new(x: f64, c: f64) -> Result<Self> {
        ensure_positive("x", x)?;
        ensure_positive("c", c)?;
        Ok(Self { x, c })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Positive root of the Marčenko–Pastur quadratic, `0 < δ₀ < c/x`.
pub fn delta0(p: MpPoint) -> f64 {
    delta0_raw(p.x, p.c)
}

/// Derivative of [`delta0`] with respect to `x`; always negative.
pub fn delta0_prime(p: MpPoint) -> f64 {
    let d = delta0_raw(p.x, p.c);
    delta0_prime_from(p.x, p.c, d)
}

// Both branches are free of subtractive cancellation: with b = 1 − c + x the
// positive root is (√D − b)/(2x) = 2c/(b + √D), and we pick whichever form
// adds like-signed terms.
pub(crate) fn delta0_raw(x: f64, c: f64) -> f64 {
    let b = 1.0 - c + x;
    let disc = (b * b + 4.0 * c * x).sqrt();
    if b >= 0.0 {
        2.0 * c / (b + disc)
    } else {
        (disc - b) / (2.0 * x)
    }
}

pub(crate) fn delta0_prime_from(x: f64, c: f64, d: f64) -> f64 {
    -d * (1.0 + d) / (1.0 - c + x * (1.0 + 2.0 * d))
}

/// `δ_0 … δ_T` and `γ_0 … γ_T` at a point `x`, anchored at `base_noise = σ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaGammaTable {
    pub x: f64,
    pub base_noise: f64,
    pub c: f64,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl DeltaGammaTable {
    pub fn order(&self) -> usize {
        self.delta.len() - 1
    }
}

/// Builds the `δ_t`/`γ_t` tables up to `order` at `x` for base noise `σ²`.
///
/// ```text
/// δ_t(x) = [δ_{t−1}(x)(1+δ₀(σ²)) + Σ_{k=1}^{t−1} (δ_{k−1}(x) − σ²δ_k(x)) δ_{t−k}(σ²)]
///          / [1 − c + σ²(1+δ₀(σ²)) + x δ₀(x)]
/// γ₀(x)  = δ₀(x)/(1+δ₀(x)),   γ_t(x) = δ_{t−1}(x) − σ² δ_t(x)
/// ```
pub fn delta_gamma_tables(
    x: f64,
    base_noise: f64,
    c: f64,
    order: usize,
) -> Result<DeltaGammaTable> {
    ensure_positive("x", x)?;
    ensure_positive("base_noise", base_noise)?;
    ensure_positive("c", c)?;

    let at_base = delta_recursion(base_noise, base_noise, c, order, None)?;
    let delta = if x == base_noise {
        at_base
    } else {
        delta_recursion(x, base_noise, c, order, Some(&at_base))?
    };

    let mut gamma = Vec::with_capacity(order + 1);
    gamma.push(delta[0] / (1.0 + delta[0]));
    for t in 1..=order {
        gamma.push(delta[t - 1] - base_noise * delta[t]);
    }

    Ok(DeltaGammaTable {
        x,
        base_noise,
        c,
        delta,
        gamma,
    })
}

fn delta_recursion(
    x: f64,
    sigma2: f64,
    c: f64,
    order: usize,
    at_base: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let d0x = delta0_raw(x, c);
    let d0s = at_base.map_or_else(|| delta0_raw(sigma2, c), |b| b[0]);
    let denom = 1.0 - c + sigma2 * (1.0 + d0s) + x * d0x;
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::InternalConsistency(format!(
            "recursion denominator {denom:e} is not positive at x={x:e}, σ²={sigma2:e}, c={c}"
        )));
    }

    let mut delta = Vec::with_capacity(order + 1);
    delta.push(d0x);
    for t in 1..=order {
        // δ_{t−k}(σ²) with k ≥ 1 only reaches indices already computed.
        let base = |i: usize| at_base.map_or(delta[i], |b| b[i]);
        let mut num = delta[t - 1] * (1.0 + d0s);
        for k in 1..t {
            num += (delta[k - 1] - sigma2 * delta[k]) * base(t - k);
        }
        delta.push(num / denom);
    }
    Ok(delta)
}

/// Lower and upper edges of the continuous part of `μ_c`.
pub fn mp_support(c: f64) -> (f64, f64) {
    let s = c.sqrt();
    ((1.0 - s).powi(2), (1.0 + s).powi(2))
}

/// Integrates `f` against the Marčenko–Pastur law `μ_c`.
///
/// The continuous part has density `√((b−t)(t−a)) / (2π c t)` on `[a, b]`;
/// for `c > 1` an atom of mass `1 − 1/c` sits at zero. The substitution
/// `t = a + (b − a) sin²φ` removes the square-root behaviour at both edges.
pub fn mp_measure_integral<F: Fn(f64) -> f64>(f: F, c: f64, spec: &QuadratureSpec) -> Result<f64> {
    ensure_positive("c", c)?;
    let (a, b) = mp_support(c);
    let width = b - a;
    let scale = width * width / (PI * c);

    let integrand = |phi: f64| {
        let (s, co) = phi.sin_cos();
        let s2 = s * s;
        let t = a + width * s2;
        if t <= 0.0 {
            return 0.0;
        }
        f(t) * scale * s2 * co * co / t
    };
    let continuous = integrate(integrand, 0.0, 0.5 * PI, spec)?;
    let atom = (1.0 - 1.0 / c).max(0.0);
    Ok(continuous + if atom > 0.0 { atom * f(0.0) } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn newton_root(x: f64, c: f64) -> f64 {
        // Newton on q(δ) = xδ² + (1−c+x)δ − c from the upper bound c/x, where
        // q > 0 and q is convex, so iterates decrease monotonically to the root.
        let mut d = c / x;
        for _ in 0..200 {
            let q = x * d * d + (1.0 - c + x) * d - c;
            let dq = 2.0 * x * d + (1.0 - c + x);
            let next = d - q / dq;
            if (next - d).abs() <= 1e-17 * d.abs() {
                break;
            }
            d = next;
        }
        d
    }

    #[test]
    fn closed_form_at_unit_ratio() {
        let d = delta0(MpPoint::new(4.0, 1.0).unwrap());
        assert!((d - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_x_against_newton() {
        let d = delta0(MpPoint::new(0.1, 2.0).unwrap());
        assert!(d > 0.0 && d < 20.0);
        assert!((0.1 * d * d + (0.1 - 1.0) * d - 2.0).abs() < 1e-12);
        assert!((d - newton_root(0.1, 2.0)).abs() < 1e-12 * d);
    }

    #[test]
    fn large_x_approaches_c_over_x() {
        let d = delta0(MpPoint::new(1000.0, 2.0).unwrap());
        assert!(((d - 0.002) / 0.002).abs() < 0.01);
        assert!(d < 0.002);
    }

    #[test]
    fn stable_form_matches_newton_over_a_wide_range() {
        for &c in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            for i in 0..=60 {
                let x = 10f64.powf(-6.0 + 0.2 * i as f64);
                let d = delta0_raw(x, c);
                let oracle = newton_root(x, c);
                assert!(((d - oracle) / oracle).abs() < 1e-13, "x={x} c={c}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        let p = MpPoint::new(4.0, 1.0).unwrap();
        let fd = (delta0_raw(4.0 + h, 1.0) - delta0_raw(4.0 - h, 1.0)) / (2.0 * h);
        assert!((delta0_prime(p) - fd).abs() < 1e-6);
        for &c in &[0.1, 1.0, 10.0] {
            for &x in &[1e-3, 0.3, 7.0, 900.0] {
                assert!(delta0_prime(MpPoint::new(x, c).unwrap()) < 0.0);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(MpPoint::new(0.0, 1.0).is_err());
        assert!(MpPoint::new(1.0, -2.0).is_err());
        assert!(MpPoint::new(f64::NAN, 1.0).is_err());
        assert!(delta_gamma_tables(-1.0, 1.0, 1.0, 2).is_err());
        assert!(delta_gamma_tables(1.0, 0.0, 1.0, 2).is_err());
    }

    #[test]
    fn gamma0_forms_agree() {
        for &c in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            for &x in &[1e-3, 0.2, 1.0, 30.0, 1e3] {
                let t = delta_gamma_tables(x, 0.7, c, 0).unwrap();
                assert!((t.gamma[0] - (c - x * t.delta[0])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_order_term_is_minus_derivative_at_base() {
        let t = delta_gamma_tables(0.1, 0.1, 2.0, 3).unwrap();
        let p = MpPoint::new(0.1, 2.0).unwrap();
        assert!((t.delta[1] + delta0_prime(p)).abs() < 1e-10);
        assert!(t.gamma[1] > 0.0);
    }

    #[test]
    fn hand_unrolled_second_order_step() {
        let (x, c) = (1.0, 1.0);
        let t = delta_gamma_tables(x, x, c, 2).unwrap();
        let d0 = delta0_raw(x, c);
        let d1 = -delta0_prime(MpPoint::new(x, c).unwrap());
        let denom = 1.0 - c + x * (1.0 + d0) + x * d0;
        let d2 = (d1 * (1.0 + d0) + (d0 - x * d1) * d1) / denom;
        assert!((t.delta[1] - d1).abs() < 1e-14);
        assert!((t.delta[2] - d2).abs() < 1e-14);
        assert_eq!(t.order(), 2);
    }

    #[test]
    fn off_base_table_uses_base_anchor() {
        let (x, s2, c) = (2.5, 0.3, 2.0);
        let t = delta_gamma_tables(x, s2, c, 2).unwrap();
        let d0x = delta0_raw(x, c);
        let d0s = delta0_raw(s2, c);
        let d1s = -delta0_prime_from(s2, c, d0s);
        let denom = 1.0 - c + s2 * (1.0 + d0s) + x * d0x;
        let d1x = d0x * (1.0 + d0s) / denom;
        let d2x = (d1x * (1.0 + d0s) + (d0x - s2 * d1x) * d1s) / denom;
        assert!((t.delta[1] - d1x).abs() < 1e-15);
        assert!((t.delta[2] - d2x).abs() < 1e-15);
        assert!((t.gamma[2] - (d1x - s2 * d2x)).abs() < 1e-15);
    }

    #[test]
    fn measure_moments() {
        let spec = QuadratureSpec::default();
        for &c in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            let mass = mp_measure_integral(|_| 1.0, c, &spec).unwrap();
            let mean = mp_measure_integral(|t| t, c, &spec).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "c={c} mass={mass}");
            assert!((mean - 1.0).abs() < 1e-10, "c={c} mean={mean}");
            // Second moment of the law is 1 + c.
            let m2 = mp_measure_integral(|t| t * t, c, &spec).unwrap();
            assert!((m2 - (1.0 + c)).abs() < 1e-9, "c={c} m2={m2}");
        }
    }

    #[test]
    fn stieltjes_transform() {
        let spec = QuadratureSpec::default();
        let (x, c) = (0.1, 2.0);
        let m = mp_measure_integral(|t| 1.0 / (t + x), c, &spec).unwrap();
        assert!((m - delta0_raw(x, c) / c).abs() < 1e-6);
    }
}
