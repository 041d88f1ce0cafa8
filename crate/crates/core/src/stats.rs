//! Empirical moment checks, Kolmogorov–Smirnov tests and histograms.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{to_f64, Rational};
use crate::moments::{beta_closed_form_moment, RwaSpec};
use crate::sampling::{RngStream, RwaSampler};

/// Default |z| bound for moment tests.
pub const DEFAULT_Z_THRESHOLD: f64 = 5.0;
/// Default KS significance level.
pub const DEFAULT_KS_ALPHA: f64 = 0.001;
/// Smallest sample size accepted by [`moment_identity_test`].
pub const MIN_MOMENT_TEST_N: usize = 1000;

/// Sample mean of `X^k` and the sample standard deviation of `X^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMoment {
    pub k: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub n: usize,
}

impl EmpiricalMoment {
    pub fn standard_error(&self) -> f64 {
        self.std_dev / (self.n as f64).sqrt()
    }
}

/// Raw moments of orders `1..=k_max`, each with its own spread, accumulated
/// in one pass with Welford updates.
pub fn empirical_moments(values: &[f64], k_max: usize) -> Result<Vec<EmpiricalMoment>> {
    if values.is_empty() {
        return Err(Error::contract("empirical moments of an empty batch"));
    }
    if k_max == 0 {
        return Err(Error::contract("k_max must be positive"));
    }
    let mut mean = vec![0.0; k_max];
    let mut m2 = vec![0.0; k_max];
    for (i, &x) in values.iter().enumerate() {
        let count = (i + 1) as f64;
        let mut power = 1.0;
        for k in 0..k_max {
            power *= x;
            let delta = power - mean[k];
            mean[k] += delta / count;
            m2[k] += delta * (power - mean[k]);
        }
    }
    let n = values.len();
    Ok((0..k_max)
        .map(|k| EmpiricalMoment {
            k: k + 1,
            mean: mean[k],
            std_dev: if n > 1 {
                (m2[k] / (n - 1) as f64).max(0.0).sqrt()
            } else {
                0.0
            },
            n,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTestResult {
    pub k: usize,
    pub empirical: f64,
    pub exact: f64,
    /// Exact target as `p/q`.
    pub exact_rational: String,
    pub standard_error: f64,
    pub z_score: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Compares empirical moments against exact targets; `targets[k - 1]` is the
/// order-`k` target.
pub fn moment_test(
    values: &[f64],
    targets: &[Rational],
    z_threshold: f64,
) -> Result<Vec<MomentTestResult>> {
    let emp = empirical_moments(values, targets.len())?;
    Ok(emp
        .iter()
        .zip(targets)
        .map(|(e, target)| {
            let exact = to_f64(target);
            let se = e.standard_error();
            let diff = e.mean - exact;
            let z_score = if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            };
            MomentTestResult {
                k: e.k,
                empirical: e.mean,
                exact,
                exact_rational: crate::exact::format_rational(target),
                standard_error: se,
                z_score,
                threshold: z_threshold,
                pass: z_score.abs() <= z_threshold,
            }
        })
        .collect())
}

/// Samples `n` draws of `Z` and tests orders `1..=k_max` against the moments
/// of the Beta target `Beta(Σ n_j, Σ m_j)`.
pub fn moment_identity_test(
    spec: &RwaSpec,
    k_max: usize,
    n: usize,
    stream: &RngStream,
    z_threshold: f64,
) -> Result<Vec<MomentTestResult>> {
    if !spec.is_theorem_mode() {
        return Err(Error::contract(
            "moment identity test needs coupled weights",
        ));
    }
    if n < MIN_MOMENT_TEST_N {
        return Err(Error::contract(format!(
            "moment identity test needs n >= {MIN_MOMENT_TEST_N}, got {n}"
        )));
    }
    let (n_total, m_total) = spec.target_shapes();
    let targets: Vec<Rational> = (1..=k_max)
        .map(|k| beta_closed_form_moment(&n_total, &m_total, k))
        .collect();
    let mut sampler = RwaSampler::new(spec, stream);
    let values: Vec<f64> = (0..n).map(|_| sampler.sample()).collect();
    moment_test(&values, &targets, z_threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// Supremum distance `D`.
    pub statistic: f64,
    /// Size of the (first) sample.
    pub n: usize,
    /// Size of the second sample for two-sample tests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_reference: Option<usize>,
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample statistic `max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)`.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let xs = sorted(values);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

const KS_TERM_EPS: f64 = 1e-12;

/// Asymptotic two-sided p-value `Q(D√n)` of the Kolmogorov distribution.
///
/// `n` may be fractional (effective two-sample size).
pub fn ks_pvalue(d: f64, n: f64) -> f64 {
    let t = d * n.sqrt();
    if t.is_nan() || t <= 0.0 {
        return 1.0;
    }
    let p = if t < 1.18 {
        // Jacobi-transformed series for the CDF; converges fast for small t.
        let factor = (2.0 * std::f64::consts::PI).sqrt() / t;
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * t * t);
        let mut cdf = 0.0;
        for j in 1..=100 {
            let odd = (2 * j - 1) as f64;
            let term = (-odd * odd * c).exp();
            cdf += term;
            if term < KS_TERM_EPS {
                break;
            }
        }
        1.0 - factor * cdf
    } else {
        let mut sum = 0.0;
        for j in 1..=100 {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * t * t).exp();
            sum += if j % 2 == 1 { term } else { -term };
            if term < KS_TERM_EPS {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// One-sample KS test against `cdf` at level `alpha`.
pub fn ks_test<F: Fn(f64) -> f64>(values: &[f64], cdf: F, alpha: f64) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::contract("KS test on an empty batch"));
    }
    let statistic = ks_statistic(values, cdf);
    let p_value = ks_pvalue(statistic, values.len() as f64);
    Ok(KsResult {
        statistic,
        n: values.len(),
        n_reference: None,
        p_value,
        alpha,
        pass: p_value >= alpha,
    })
}

/// Two-sample statistic `sup |F_a - F_b|` over the pooled sample.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let xa = sorted(a);
    let xb = sorted(b);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::contract("two-sample KS needs two non-empty batches"));
    }
    let statistic = ks_two_sample_statistic(a, b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let p_value = ks_pvalue(statistic, na * nb / (na + nb));
    Ok(KsResult {
        statistic,
        n: a.len(),
        n_reference: Some(b.len()),
        p_value,
        alpha,
        pass: p_value >= alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub center: f64,
    pub count: usize,
    /// `count / (N · width)` with `N` the full batch size.
    pub density: f64,
}

/// Equal-width bins over `[lo, hi]`; the right edge belongs to the last bin.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Vec<HistogramBin>> {
    if bins == 0 {
        return Err(Error::contract("histogram needs at least one bin"));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::contract(format!(
            "histogram range [{lo}, {hi}] is empty"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v >= lo && v <= hi {
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
    }
    let total = values.len().max(1) as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            center: lo + width * (i as f64 + 0.5),
            count,
            density: count as f64 / (total * width),
        })
        .collect())
}

pub fn write_histogram_csv<W: Write>(
    mut w: W,
    metadata: &[(&str, String)],
    bins: &[HistogramBin],
) -> std::io::Result<()> {
    for (key, value) in metadata {
        writeln!(w, "# {key}: {value}")?;
    }
    writeln!(w, "bin_center,count,density")?;
    for b in bins {
        writeln!(w, "{},{},{}", b.center, b.count, b.density)?;
    }
    Ok(())
}
