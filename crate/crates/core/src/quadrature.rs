//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature on finite intervals,
//! plus a semi-infinite wrapper based on the inversion `u = lower / v`.

use crate::error::{ensure_positive, Error, Result};

/// Tolerances and subdivision budget for an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("abs_tol", self.abs_tol)?;
        ensure_positive("rel_tol", self.rel_tol)?;
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

// Kronrod abscissae (descending; last entry is the centre) and weights.
// Odd-indexed abscissae are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_453,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = WGK[10] * f_center;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    if !value.is_finite() {
        return Err(Error::domain(format!(
            "integrand is not finite on [{a:e}, {b:e}]"
        )));
    }
    let error = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// error estimate falls below `max(abs_tol, rel_tol * |I|)`. Exhausting the
/// subdivision budget yields [`Error::Convergence`] with the best estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }

    let mut panels = vec![gk21(&f, a, b)?];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: total,
                error,
                subdivisions: panels.len(),
            });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            // Interval collapsed to adjacent floats; nothing left to refine.
            return Err(Error::Convergence {
                estimate: total,
                error,
                subdivisions: panels.len() + 1,
            });
        }
        panels.push(gk21(&f, p.a, mid)?);
        panels.push(gk21(&f, mid, p.b)?);
    }
}

/// Integrates `g` over `[lower, ∞)`.
///
/// The part beyond `max(lower, 1)` is mapped onto `(0, 1]` by `u = pivot / v`.
/// For `lower < 1` the stretch `[lower, 1]` is integrated in `log u`, which
/// keeps integrands varying on a logarithmic scale near a small `lower` from
/// exhausting the subdivision budget.
///
/// `g` should decay at least like `u⁻²`; slower decay shows up as a
/// [`Error::Convergence`] failure rather than a silently wrong value.
pub fn tail_quadrature<G: Fn(f64) -> f64>(g: G, lower: f64, spec: &QuadratureSpec) -> Result<f64> {
    ensure_positive("lower", lower)?;
    let pivot = lower.max(1.0);
    let mapped = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let u = pivot / v;
        if !u.is_finite() {
            return 0.0;
        }
        let gu = g(u);
        if gu == 0.0 {
            0.0
        } else {
            gu * (pivot / v) / v
        }
    };
    let tail = integrate(mapped, 0.0, 1.0, spec)?;
    if lower >= pivot {
        return Ok(tail);
    }
    let head = integrate(
        |s: f64| {
            let u = s.exp();
            g(u) * u
        },
        lower.ln(),
        0.0,
        spec,
    )?;
    Ok(head + tail)
}
