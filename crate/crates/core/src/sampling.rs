//! Reproducible variate generation for the Gamma, Beta, Dirichlet, arcsine
//! and power semicircle laws and for randomly weighted averages.
//!
//! Every sampler draws from an [`RngStream`], a ChaCha8 generator addressed
//! by `(seed, stream_id)`. ChaCha output is specified bit-for-bit, so a batch
//! replays identically on every platform.

use std::io::Write;

use rand::distr::{Distribution, Open01};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::densities::PowerSemicircleParams;
use crate::error::{Error, Result};
use crate::moments::{BetaParams, DirichletParams, RwaSpec};

/// Recorded in batch metadata so a reader knows how to replay a run.
pub const GENERATOR: &str =
    "ChaCha8 (rand_chacha 0.9); key = seed_from_u64(seed) or splitmix64(seed, substream); stream = stream_id";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A single-owner random stream.
///
/// Streams with the same seed and different `stream_id`s use the same ChaCha
/// key and disjoint nonces, so they never overlap. Parallel workers should
/// each take their own `stream_id`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    substream: Option<u64>,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            substream: None,
            rng,
        }
    }

    /// A fresh stream keyed by `(seed, offset)` on the same `stream_id`,
    /// independent of `self` and of every other offset.
    pub fn substream(&self, offset: u64) -> Self {
        let key = splitmix64(self.seed ^ splitmix64(offset.wrapping_add(1)));
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.set_stream(self.stream_id);
        Self {
            seed: self.seed,
            stream_id: self.stream_id,
            substream: Some(offset),
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn substream_offset(&self) -> Option<u64> {
        self.substream
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        Open01.sample(&mut self.rng)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Marsaglia–Tsang squeeze/rejection for `Gamma(shape, 1)`. Shapes below one
/// are boosted: `G(shape) = G(shape + 1) · U^{1/shape}`.
#[derive(Debug, Clone, Copy)]
pub struct GammaSampler {
    shape: f64,
    d: f64,
    c: f64,
}

impl GammaSampler {
    pub fn new(shape: f64) -> Result<Self> {
        if !shape.is_finite() || shape <= 0.0 {
            return Err(Error::contract(format!(
                "gamma shape must be > 0, got {shape}"
            )));
        }
        let boosted = if shape < 1.0 { shape + 1.0 } else { shape };
        let d = boosted - 1.0 / 3.0;
        Ok(Self {
            shape,
            d,
            c: 1.0 / (9.0 * d).sqrt(),
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        let g = loop {
            let x = stream.standard_normal();
            let v = 1.0 + self.c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = stream.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + self.d * (1.0 - v + v.ln()) {
                break self.d * v;
            }
        };
        if self.shape < 1.0 {
            g * stream.uniform().powf(1.0 / self.shape)
        } else {
            g
        }
    }
}

pub fn sample_gamma(shape: f64, stream: &mut RngStream) -> Result<f64> {
    Ok(GammaSampler::new(shape)?.sample(stream))
}

/// `Beta(n, m)` as `G_n / (G_n + G_m)`.
#[derive(Debug, Clone, Copy)]
pub struct BetaSampler {
    first: GammaSampler,
    second: GammaSampler,
}

impl BetaSampler {
    pub fn new(n: f64, m: f64) -> Result<Self> {
        Ok(Self {
            first: GammaSampler::new(n)?,
            second: GammaSampler::new(m)?,
        })
    }

    pub fn from_params(p: &BetaParams) -> Self {
        let (n, m) = p.to_f64();
        Self::new(n, m).expect("BetaParams are positive")
    }

    /// One draw in the open interval `(0, 1)`; exact 0 or 1 is redrawn.
    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        loop {
            let g1 = self.first.sample(stream);
            let g2 = self.second.sample(stream);
            let x = g1 / (g1 + g2);
            if x > 0.0 && x < 1.0 {
                return x;
            }
        }
    }
}

pub fn sample_beta(p: &BetaParams, stream: &mut RngStream) -> f64 {
    BetaSampler::from_params(p).sample(stream)
}

/// Dirichlet vectors by normalized independent Gammas.
#[derive(Debug, Clone)]
pub struct DirichletSampler {
    gammas: Vec<GammaSampler>,
}

impl DirichletSampler {
    pub fn new(alpha: &[f64]) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::contract("Dirichlet needs at least one parameter"));
        }
        let gammas = alpha
            .iter()
            .map(|&a| GammaSampler::new(a))
            .collect::<Result<_>>()?;
        Ok(Self { gammas })
    }

    pub fn from_params(d: &DirichletParams) -> Self {
        Self::new(&d.to_f64()).expect("DirichletParams are positive")
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Fills `out` with one point of the simplex. For `r >= 2` every entry is
    /// strictly inside `(0, 1)`.
    pub fn sample_into(&self, stream: &mut RngStream, out: &mut [f64]) {
        assert_eq!(out.len(), self.gammas.len());
        if out.len() == 1 {
            out[0] = 1.0;
            return;
        }
        loop {
            let mut total = 0.0;
            for (slot, g) in out.iter_mut().zip(&self.gammas) {
                *slot = g.sample(stream);
                total += *slot;
            }
            if !total.is_finite() || total <= 0.0 {
                continue;
            }
            for slot in out.iter_mut() {
                *slot /= total;
            }
            if out.iter().all(|&w| w > 0.0 && w < 1.0) {
                return;
            }
        }
    }

    pub fn sample(&self, stream: &mut RngStream) -> Vec<f64> {
        let mut out = vec![0.0; self.gammas.len()];
        self.sample_into(stream, &mut out);
        out
    }
}

pub fn sample_dirichlet(d: &DirichletParams, stream: &mut RngStream) -> Vec<f64> {
    DirichletSampler::from_params(d).sample(stream)
}

/// `Dirichlet(1, ..., 1)` as the spacings of `r - 1` sorted uniforms on
/// `(0, 1)`, padded by 0 and 1.
pub fn sample_dirichlet_ones_spacings(r: usize, stream: &mut RngStream) -> Result<Vec<f64>> {
    if r == 0 {
        return Err(Error::contract("spacings need r >= 1"));
    }
    let mut out = vec![0.0; r];
    spacings_into(stream, &mut out);
    Ok(out)
}

fn spacings_into(stream: &mut RngStream, out: &mut [f64]) {
    let r = out.len();
    if r == 1 {
        out[0] = 1.0;
        return;
    }
    let mut cuts = vec![0.0; r - 1];
    loop {
        for c in cuts.iter_mut() {
            *c = stream.uniform();
        }
        cuts.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for (slot, &c) in out.iter_mut().zip(&cuts) {
            *slot = c - prev;
            prev = c;
        }
        out[r - 1] = 1.0 - prev;
        // Ties between uniforms would put a zero on the simplex boundary.
        if out.iter().all(|&w| w > 0.0) {
            return;
        }
    }
}

/// How the weight vector of an arcsine average is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// Normalized `Gamma(1)` variates.
    Gamma,
    /// Uniform order-statistic spacings.
    Spacings,
}

/// One realization of `Z = Σ W_j X_j`, with its parts.
#[derive(Debug, Clone, PartialEq)]
pub struct RwaDraw {
    pub weights: Vec<f64>,
    pub components: Vec<f64>,
    pub value: f64,
}

/// Sampler for `Z = Σ W_j X_j` under an [`RwaSpec`].
///
/// `X_j` reads from sub-stream `j` of the base stream and `W` from sub-stream
/// `r`, so the weights are independent of every component by construction.
#[derive(Debug, Clone)]
pub struct RwaSampler {
    components: Vec<BetaSampler>,
    weights: DirichletSampler,
    component_streams: Vec<RngStream>,
    weight_stream: RngStream,
    w_buf: Vec<f64>,
}

impl RwaSampler {
    pub fn new(spec: &RwaSpec, base: &RngStream) -> Self {
        let r = spec.r();
        Self {
            components: spec
                .components()
                .iter()
                .map(BetaSampler::from_params)
                .collect(),
            weights: DirichletSampler::from_params(spec.weights()),
            component_streams: (0..r as u64).map(|j| base.substream(j)).collect(),
            weight_stream: base.substream(r as u64),
            w_buf: vec![0.0; r],
        }
    }

    pub fn sample(&mut self) -> f64 {
        loop {
            self.weights
                .sample_into(&mut self.weight_stream, &mut self.w_buf);
            let mut z = 0.0;
            for ((w, x), s) in self
                .w_buf
                .iter()
                .zip(&self.components)
                .zip(&mut self.component_streams)
            {
                z += w * x.sample(s);
            }
            if z > 0.0 && z < 1.0 {
                return z;
            }
        }
    }

    pub fn sample_parts(&mut self) -> RwaDraw {
        loop {
            self.weights
                .sample_into(&mut self.weight_stream, &mut self.w_buf);
            let components: Vec<f64> = self
                .components
                .iter()
                .zip(&mut self.component_streams)
                .map(|(x, s)| x.sample(s))
                .collect();
            let value: f64 = self.w_buf.iter().zip(&components).map(|(w, x)| w * x).sum();
            if value > 0.0 && value < 1.0 {
                return RwaDraw {
                    weights: self.w_buf.clone(),
                    components,
                    value,
                };
            }
        }
    }
}

fn check_half_width(a: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::contract(format!(
            "half-width a must be > 0, got {a}"
        )));
    }
    Ok(())
}

// Maps a (0, 1) draw onto (-a, a); callers redraw when rounding lands on ±a.
fn to_symmetric(b: f64, a: f64) -> f64 {
    2.0 * a * b - a
}

/// Arcsine variate on `(-a, a)` as `2aB - a` with `B ~ Beta(1/2, 1/2)`.
pub fn sample_arcsin(a: f64, stream: &mut RngStream) -> Result<f64> {
    check_half_width(a)?;
    let beta = BetaSampler::new(0.5, 0.5)?;
    Ok(symmetric_draw(&beta, a, stream))
}

fn symmetric_draw(beta: &BetaSampler, a: f64, stream: &mut RngStream) -> f64 {
    loop {
        let x = to_symmetric(beta.sample(stream), a);
        if x.abs() < a {
            return x;
        }
    }
}

/// Power semicircle variate as `2aB - a` with `B ~ Beta(λ+1/2, λ+1/2)`.
pub fn sample_power_semicircle(ps: &PowerSemicircleParams, stream: &mut RngStream) -> f64 {
    let c = ps.beta_shape();
    let beta = BetaSampler::new(c, c).expect("lambda >= 0 gives a positive shape");
    symmetric_draw(&beta, ps.a(), stream)
}

/// `Σ W_j X_j` with `X_j` i.i.d. arcsine on `(-a, a)` and
/// `W ~ Dirichlet(1, ..., 1)`.
#[derive(Debug, Clone)]
pub struct ArcsinRwaSampler {
    a: f64,
    scheme: WeightScheme,
    arcsine: BetaSampler,
    flat: DirichletSampler,
    component_streams: Vec<RngStream>,
    weight_stream: RngStream,
    w_buf: Vec<f64>,
}

/// Paired draw on both scales: `unit_components` are the `(0, 1)`-scale
/// Beta(1/2, 1/2) variates and `components = 2a·unit - a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcsinRwaDraw {
    pub weights: Vec<f64>,
    pub unit_components: Vec<f64>,
    pub components: Vec<f64>,
    pub unit_value: f64,
    pub value: f64,
}

impl ArcsinRwaSampler {
    pub fn new(r: usize, a: f64, scheme: WeightScheme, base: &RngStream) -> Result<Self> {
        if r == 0 {
            return Err(Error::contract("r must be at least 1"));
        }
        check_half_width(a)?;
        Ok(Self {
            a,
            scheme,
            arcsine: BetaSampler::new(0.5, 0.5)?,
            flat: DirichletSampler::new(&vec![1.0; r])?,
            component_streams: (0..r as u64).map(|j| base.substream(j)).collect(),
            weight_stream: base.substream(r as u64),
            w_buf: vec![0.0; r],
        })
    }

    /// `λ = (r - 1) / 2` and the same half-width.
    pub fn target(&self) -> PowerSemicircleParams {
        PowerSemicircleParams::from_component_count(self.w_buf.len(), self.a)
            .expect("validated at construction")
    }

    fn draw_weights(&mut self) {
        match self.scheme {
            WeightScheme::Gamma => self
                .flat
                .sample_into(&mut self.weight_stream, &mut self.w_buf),
            WeightScheme::Spacings => spacings_into(&mut self.weight_stream, &mut self.w_buf),
        }
    }

    pub fn sample(&mut self) -> f64 {
        loop {
            self.draw_weights();
            let mut z = 0.0;
            for (w, s) in self.w_buf.iter().zip(&mut self.component_streams) {
                z += w * symmetric_draw(&self.arcsine, self.a, s);
            }
            if z.abs() < self.a {
                return z;
            }
        }
    }

    pub fn sample_parts(&mut self) -> ArcsinRwaDraw {
        loop {
            self.draw_weights();
            let unit_components: Vec<f64> = self
                .component_streams
                .iter_mut()
                .map(|s| loop {
                    let b = self.arcsine.sample(s);
                    if to_symmetric(b, self.a).abs() < self.a {
                        break b;
                    }
                })
                .collect();
            let components: Vec<f64> = unit_components
                .iter()
                .map(|&b| to_symmetric(b, self.a))
                .collect();
            let dot = |xs: &[f64]| -> f64 { self.w_buf.iter().zip(xs).map(|(w, x)| w * x).sum() };
            let unit_value = dot(&unit_components);
            let value = dot(&components);
            if value.abs() < self.a {
                return ArcsinRwaDraw {
                    weights: self.w_buf.clone(),
                    unit_components,
                    components,
                    unit_value,
                    value,
                };
            }
        }
    }
}

/// A reproducible batch of draws with enough metadata to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub description: String,
    pub seed: u64,
    pub stream_id: u64,
    pub generator: String,
    pub n: usize,
    pub support: (f64, f64),
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn collect(
        description: impl Into<String>,
        stream: &RngStream,
        support: (f64, f64),
        n: usize,
        mut draw: impl FnMut() -> f64,
    ) -> Self {
        let values: Vec<f64> = (0..n).map(|_| draw()).collect();
        Self {
            description: description.into(),
            seed: stream.seed(),
            stream_id: stream.stream_id(),
            generator: GENERATOR.to_string(),
            n,
            support,
            values,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Metadata as `#` comment lines, then a `value` column.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# description: {}", self.description)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# stream_id: {}", self.stream_id)?;
        writeln!(w, "# generator: {}", self.generator)?;
        writeln!(w, "# support: ({}, {})", self.support.0, self.support.1)?;
        writeln!(w, "# n: {}", self.n)?;
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }
}

/// `n` draws of `Z` for `spec` on `(0, 1)`.
pub fn rwa_batch(spec: &RwaSpec, n: usize, stream: &RngStream) -> SampleBatch {
    let mut sampler = RwaSampler::new(spec, stream);
    SampleBatch::collect(spec.describe(), stream, (0.0, 1.0), n, || sampler.sample())
}

/// `n` draws of the arcsine average on `(-a, a)`.
pub fn arcsin_rwa_batch(
    r: usize,
    a: f64,
    scheme: WeightScheme,
    n: usize,
    stream: &RngStream,
) -> Result<SampleBatch> {
    let mut sampler = ArcsinRwaSampler::new(r, a, scheme, stream)?;
    let description = format!(
        "arcsine average r={r} a={a} weights=Dirichlet(1,...,1) via {}",
        match scheme {
            WeightScheme::Gamma => "gamma",
            WeightScheme::Spacings => "spacings",
        }
    );
    Ok(SampleBatch::collect(
        description,
        stream,
        (-a, a),
        n,
        || sampler.sample(),
    ))
}

pub fn power_semicircle_batch(
    ps: &PowerSemicircleParams,
    n: usize,
    stream: &RngStream,
) -> SampleBatch {
    let mut s = stream.clone();
    let description = format!("power semicircle lambda={} a={}", ps.lambda(), ps.a());
    SampleBatch::collect(description, stream, (-ps.a(), ps.a()), n, || {
        sample_power_semicircle(ps, &mut s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::beta_int;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn streams_replay_and_differ() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let mut c = RngStream::new(7, 4);
        let xa: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..16).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        let base = RngStream::new(7, 3);
        let mut s0 = base.substream(0);
        let mut s1 = base.substream(1);
        assert_ne!(s0.next_u64(), s1.next_u64());
        assert_eq!(base.substream(1).substream_offset(), Some(1));
    }

    // Pins the generator: if these change, every recorded batch is invalid.
    #[test]
    fn generator_output_is_pinned() {
        let mut s = RngStream::new(1, 0);
        assert_eq!(s.next_u64(), 7_424_550_030_962_593_201);
        assert_eq!(s.uniform(), 0.080_383_708_929_781_97);
        let mut sub = RngStream::new(1, 0).substream(2);
        assert_eq!(sub.next_u64(), 9_846_545_016_091_128_067);
    }

    #[test]
    fn gamma_rejects_bad_shape() {
        assert!(GammaSampler::new(0.0).is_err());
        assert!(GammaSampler::new(-1.0).is_err());
        assert!(GammaSampler::new(f64::INFINITY).is_err());
        let mut s = RngStream::new(1, 0);
        assert!(sample_gamma(-2.0, &mut s).is_err());
    }

    #[test]
    fn gamma_mean_shape_two() {
        let mut s = RngStream::new(11, 0);
        let g = GammaSampler::new(2.0).unwrap();
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| g.sample(&mut s)).collect();
        let band = 5.0 * 2f64.sqrt() / 1000.0;
        assert!((mean(&xs) - 2.0).abs() < band, "{}", mean(&xs));
        assert!(xs.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn gamma_small_shape_mean() {
        let mut s = RngStream::new(12, 0);
        let g = GammaSampler::new(0.3).unwrap();
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| g.sample(&mut s)).collect();
        let se = (0.3f64 / n as f64).sqrt();
        assert!((mean(&xs) - 0.3).abs() < 5.0 * se);
    }

    #[test]
    fn samplers_are_deterministic() {
        let spec = RwaSpec::corollary1(3).unwrap();
        let a = rwa_batch(&spec, 500, &RngStream::new(5, 2));
        let b = rwa_batch(&spec, 500, &RngStream::new(5, 2));
        assert_eq!(a, b);
        let c = rwa_batch(&spec, 500, &RngStream::new(6, 2));
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn beta_support_and_mean() {
        let mut s = RngStream::new(3, 0);
        let p = beta_int(2, 2);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_beta(&p, &mut s)).collect();
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        // Var Beta(2,2) = 1/20
        let se = (0.05f64 / n as f64).sqrt();
        assert!((mean(&xs) - 0.5).abs() < 5.0 * se);
    }

    #[test]
    fn dirichlet_on_simplex() {
        let d = DirichletParams::new(vec![
            crate::exact::ratio(1, 2),
            crate::exact::integer(2),
            crate::exact::integer(3),
        ])
        .unwrap();
        let mut s = RngStream::new(9, 1);
        for _ in 0..10_000 {
            let w = sample_dirichlet(&d, &mut s);
            assert_eq!(w.len(), 3);
            assert!(w.iter().all(|&x| x > 0.0 && x < 1.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn dirichlet_first_coordinate_mean() {
        let d = DirichletParams::new(vec![crate::exact::integer(2); 2]).unwrap();
        let mut s = RngStream::new(4, 0);
        let n = 1_000_000;
        let w1: Vec<f64> = (0..n).map(|_| sample_dirichlet(&d, &mut s)[0]).collect();
        // W_1 ~ Beta(2,2)
        assert!((mean(&w1) - 0.5).abs() < 5.0 * (0.05f64 / n as f64).sqrt());
    }

    #[test]
    fn spacings_on_simplex() {
        let mut s = RngStream::new(2, 0);
        assert_eq!(
            sample_dirichlet_ones_spacings(1, &mut s).unwrap(),
            vec![1.0]
        );
        assert!(sample_dirichlet_ones_spacings(0, &mut s).is_err());
        for _ in 0..10_000 {
            let w = sample_dirichlet_ones_spacings(5, &mut s).unwrap();
            assert!(w.iter().all(|&x| x > 0.0 && x < 1.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_component_rwa_is_the_component() {
        let spec = RwaSpec::coupled(vec![beta_int(2, 5)]).unwrap();
        let base = RngStream::new(8, 0);
        let mut rwa = RwaSampler::new(&spec, &base);
        // With r = 1 the weight is identically 1, and X_1 reads sub-stream 0.
        let mut direct = base.substream(0);
        let beta = BetaSampler::from_params(&spec.components()[0]);
        for _ in 0..1000 {
            assert_eq!(rwa.sample(), beta.sample(&mut direct));
        }
    }

    #[test]
    fn rwa_parts_recombine() {
        let spec = RwaSpec::corollary1(4).unwrap();
        let mut sampler = RwaSampler::new(&spec, &RngStream::new(1, 0));
        for _ in 0..1000 {
            let d = sampler.sample_parts();
            let z: f64 = d
                .weights
                .iter()
                .zip(&d.components)
                .map(|(w, x)| w * x)
                .sum();
            assert_eq!(z, d.value);
            assert!(d.value > 0.0 && d.value < 1.0);
        }
    }

    #[test]
    fn arcsin_support_and_errors() {
        let mut s = RngStream::new(1, 0);
        assert!(sample_arcsin(0.0, &mut s).is_err());
        assert!(sample_arcsin(-1.0, &mut s).is_err());
        for _ in 0..100_000 {
            let x = sample_arcsin(1.0, &mut s).unwrap();
            assert!(x > -1.0 && x < 1.0);
        }
    }

    #[test]
    fn arcsin_moments() {
        let mut s = RngStream::new(21, 0);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_arcsin(1.0, &mut s).unwrap())
            .collect();
        // Var = 1/2, E(X^4) = 3/8 so Var(X^2) = 3/8 - 1/4 = 1/8.
        assert!(mean(&xs).abs() < 5.0 * (0.5f64 / n as f64).sqrt());
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!((mean(&sq) - 0.5).abs() < 5.0 * (0.125f64 / n as f64).sqrt());
    }

    #[test]
    fn power_semicircle_lambda_zero_is_arcsin() {
        // Same stream, same Beta(1/2,1/2) sampler underneath.
        let ps = PowerSemicircleParams::new(0.0, 1.0).unwrap();
        let mut s1 = RngStream::new(3, 3);
        let mut s2 = RngStream::new(3, 3);
        for _ in 0..1000 {
            assert_eq!(
                sample_power_semicircle(&ps, &mut s1),
                sample_arcsin(1.0, &mut s2).unwrap()
            );
        }
    }

    #[test]
    fn wigner_variance() {
        let ps = PowerSemicircleParams::new(1.0, 1.0).unwrap();
        let mut s = RngStream::new(17, 0);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_power_semicircle(&ps, &mut s))
            .collect();
        // E(X^2) = 1/4, E(X^4) = 1/8, so Var(X^2) = 1/16.
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!((mean(&sq) - 0.25).abs() < 5.0 * (1.0 / 16.0 / n as f64).sqrt());
        assert!(xs.iter().all(|x| x.abs() < 1.0));
    }

    #[test]
    fn affine_equivariance_per_draw() {
        for &scheme in &[WeightScheme::Gamma, WeightScheme::Spacings] {
            for &a in &[0.5, 1.0, 2.0, 3.0] {
                let mut sampler =
                    ArcsinRwaSampler::new(3, a, scheme, &RngStream::new(4, 1)).unwrap();
                for _ in 0..5000 {
                    let d = sampler.sample_parts();
                    let pulled = 2.0 * a * d.unit_value - a;
                    assert!(
                        (pulled - d.value).abs() <= 8.0 * f64::EPSILON * a,
                        "{pulled} vs {}",
                        d.value
                    );
                    for (u, x) in d.unit_components.iter().zip(&d.components) {
                        assert_eq!(2.0 * a * u - a, *x);
                    }
                    assert!(d.value.abs() < a);
                }
            }
        }
    }

    #[test]
    fn batch_csv_layout() {
        let batch = rwa_batch(&RwaSpec::corollary1(2).unwrap(), 3, &RngStream::new(1, 0));
        let mut buf = Vec::new();
        batch.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
        assert_eq!(header.len(), 6);
        assert!(text.contains("# seed: 1\n"));
        let body: Vec<&str> = text.lines().skip_while(|l| l.starts_with('#')).collect();
        assert_eq!(body[0], "value");
        assert_eq!(body.len(), 4);
        for (line, v) in body[1..].iter().zip(batch.values()) {
            assert_eq!(line.parse::<f64>().unwrap(), *v);
        }
    }
}
