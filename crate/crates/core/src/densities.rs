//! Double-precision densities and CDFs for the Beta, arcsine and power
//! semicircle families.
//!
//! Exact rational parameters are converted to `f64` once, at the boundary of
//! this module; everything below works in floating point.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::BetaParams;

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients). Relative
// error of Γ is below 2e-15 on the positive axis.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    // Exact small factorials keep ln Γ(1) = ln Γ(2) = 0 on the nose.
    if x.fract() == 0.0 && x <= 30.0 {
        let mut acc = 1.0f64;
        for t in 2..(x as u32) {
            acc *= t as f64;
        }
        return acc.ln();
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

fn shapes(p: &BetaParams) -> (f64, f64) {
    p.to_f64()
}

/// Beta density; zero outside the open interval `(0, 1)`.
pub fn beta_pdf(p: &BetaParams, x: f64) -> f64 {
    let (a, b) = shapes(p);
    beta_pdf_f64(a, b, x)
}

pub(crate) fn beta_pdf_f64(a: f64, b: f64, x: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) {
        return 0.0;
    }
    let ln_b = ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b);
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp()
}

/// Regularized incomplete beta `I_x(n, m)`, clamped to `[0, 1]` outside the
/// support.
pub fn beta_cdf(p: &BetaParams, x: f64) -> f64 {
    let (a, b) = shapes(p);
    regularized_incomplete_beta(a, b, x)
}

const CF_EPS: f64 = 1e-14;
const CF_MAX_ITER: usize = 500;
const CF_TINY: f64 = 1e-300;

/// `I_x(a, b)` by the modified Lentz continued fraction, evaluated on
/// whichever side of `(a+1)/(a+b+2)` converges fastest.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_gamma_unchecked(a) - ln_gamma_unchecked(b)
        + ln_gamma_unchecked(a + b);
    let front = ln_front.exp();
    let v = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    };
    v.clamp(0.0, 1.0)
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let guard = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / guard(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        // Even step.
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        h *= d * c;
        // Odd step.
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Shape `λ` and half-width `a` of the power semicircle law on `(-a, a)`,
/// density proportional to `(a² - x²)^{λ - 1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSemicircleParams {
    lambda: f64,
    a: f64,
}

impl PowerSemicircleParams {
    pub fn new(lambda: f64, a: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::contract(format!(
                "lambda must be >= 0, got {lambda}"
            )));
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::contract(format!(
                "half-width a must be > 0, got {a}"
            )));
        }
        Ok(Self { lambda, a })
    }

    /// The law of an `r`-term arcsine average: `λ = (r - 1) / 2`.
    pub fn from_component_count(r: usize, a: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::contract("r must be at least 1"));
        }
        Self::new((r as f64 - 1.0) / 2.0, a)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Shape `c = λ + 1/2` of the symmetric Beta law of `(X + a) / (2a)`.
    pub fn beta_shape(&self) -> f64 {
        self.lambda + 0.5
    }
}

/// `f(x; λ) = Γ(λ+1) / (√π a^{2λ} Γ(λ+1/2)) · (a² - x²)^{λ-1/2}` for `|x| < a`.
pub fn power_semicircle_pdf(ps: &PowerSemicircleParams, x: f64) -> f64 {
    let (lambda, a) = (ps.lambda, ps.a);
    if x.is_nan() || x.abs() >= a {
        return 0.0;
    }
    let ln_const = ln_gamma_unchecked(lambda + 1.0)
        - ln_gamma_unchecked(lambda + 0.5)
        - 0.5 * PI.ln()
        - 2.0 * lambda * a.ln();
    let gap = (a - x) * (a + x);
    (ln_const + (lambda - 0.5) * gap.ln()).exp()
}

/// CDF through the affine pullback onto `Beta(λ+1/2, λ+1/2)` on `(0, 1)`.
pub fn power_semicircle_cdf(ps: &PowerSemicircleParams, x: f64) -> f64 {
    let a = ps.a;
    if x <= -a {
        return 0.0;
    }
    if x >= a {
        return 1.0;
    }
    let c = ps.beta_shape();
    regularized_incomplete_beta(c, c, (x + a) / (2.0 * a))
}

/// `1 / (π √(a² - x²))` inside `(-a, a)`, zero elsewhere.
pub fn arcsin_pdf(a: f64, x: f64) -> f64 {
    if x.is_nan() || x.abs() >= a {
        return 0.0;
    }
    1.0 / (PI * ((a - x) * (a + x)).sqrt())
}

/// `1/2 + arcsin(x/a) / π`, clamped outside the support.
pub fn arcsin_cdf(a: f64, x: f64) -> f64 {
    if x <= -a {
        0.0
    } else if x >= a {
        1.0
    } else {
        0.5 + (x / a).asin() / PI
    }
}

/// One row of a density table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub x: f64,
    pub pdf: f64,
    pub cdf: f64,
}

/// `points` equally spaced interior abscissae of `(lo, hi)`:
/// `lo + (hi - lo) i / (points + 1)` for `i = 1..=points`.
pub fn interior_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points as f64 + 1.0);
    (1..=points).map(|i| lo + step * i as f64).collect()
}

pub fn power_semicircle_table(ps: &PowerSemicircleParams, points: usize) -> Vec<DensityRow> {
    interior_grid(-ps.a, ps.a, points)
        .into_iter()
        .map(|x| DensityRow {
            x,
            pdf: power_semicircle_pdf(ps, x),
            cdf: power_semicircle_cdf(ps, x),
        })
        .collect()
}

pub fn beta_table(p: &BetaParams, points: usize) -> Vec<DensityRow> {
    interior_grid(0.0, 1.0, points)
        .into_iter()
        .map(|x| DensityRow {
            x,
            pdf: beta_pdf(p, x),
            cdf: beta_cdf(p, x),
        })
        .collect()
}

/// Writes `#`-prefixed metadata lines, then an `x,pdf,cdf` table.
pub fn write_density_csv<W: Write>(
    mut w: W,
    metadata: &[(&str, String)],
    rows: &[DensityRow],
) -> std::io::Result<()> {
    for (key, value) in metadata {
        writeln!(w, "# {key}: {value}")?;
    }
    writeln!(w, "x,pdf,cdf")?;
    for row in rows {
        writeln!(w, "{},{},{}", row.x, row.pdf, row.cdf)?;
    }
    Ok(())
}
