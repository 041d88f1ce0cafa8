//! Exact moments of Beta and Dirichlet laws and of the randomly weighted
//! average `Z = Σ W_j X_j`.
//!
//! Two independent routes to `E(Z^k)` live here:
//!
//! * [`rwa_moment_direct`] expands `(Σ W_j X_j)^k` over all weak compositions
//!   of `k` and uses independence of `W` and the `X_j`;
//! * [`beta_closed_form_moment`] is the `k`-th moment of
//!   `Beta(Σ n_j, Σ m_j)`.
//!
//! [`verify_theorem`] compares the two sequences exactly when the weights are
//! coupled to the components as `α_j = n_j + m_j`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    compositions, format_rational, integer, multinomial, pochhammer, pochhammer_table, ratio,
    MultiIndex, Rational,
};

/// Default highest order checked by [`verify_theorem`] front ends.
///
/// The direct route sums over `C(k+r-1, r-1)` compositions at order `k`, so
/// the total work up to `k_max` is `C(k_max+r, r)` terms.
pub const DEFAULT_K_MAX: usize = 12;

/// Shape pair `(n, m)` of a `Beta(n, m)` law on `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaParams {
    n: Rational,
    m: Rational,
}

impl BetaParams {
    pub fn new(n: Rational, m: Rational) -> Result<Self> {
        if !n.is_positive() || !m.is_positive() {
            return Err(Error::contract(format!(
                "Beta shapes must be positive, got ({}, {})",
                format_rational(&n),
                format_rational(&m)
            )));
        }
        Ok(Self { n, m })
    }

    /// Uniform `(0, 1)`.
    pub fn uniform() -> Self {
        Self {
            n: Rational::one(),
            m: Rational::one(),
        }
    }

    /// Arcsine law on `(0, 1)`.
    pub fn arcsine() -> Self {
        Self {
            n: ratio(1, 2),
            m: ratio(1, 2),
        }
    }

    pub fn n(&self) -> &Rational {
        &self.n
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn total(&self) -> Rational {
        &self.n + &self.m
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (crate::exact::to_f64(&self.n), crate::exact::to_f64(&self.m))
    }
}

impl std::fmt::Display for BetaParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Beta({},{})",
            format_rational(&self.n),
            format_rational(&self.m)
        )
    }
}

/// Dirichlet parameters `(α_1, ..., α_r)`, all positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletParams {
    alpha: Vec<Rational>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<Rational>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::contract("Dirichlet needs at least one parameter"));
        }
        if let Some(bad) = alpha.iter().find(|a| !a.is_positive()) {
            return Err(Error::contract(format!(
                "Dirichlet parameters must be positive, got {}",
                format_rational(bad)
            )));
        }
        Ok(Self { alpha })
    }

    /// `Dirichlet(c, ..., c)` with `r` entries.
    pub fn symmetric(c: Rational, r: usize) -> Result<Self> {
        Self::new(vec![c; r])
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.alpha.iter().sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(crate::exact::to_f64).collect()
    }
}

/// Components `X_1, ..., X_r` and the Dirichlet law of the weights `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RwaSpec {
    components: Vec<BetaParams>,
    weights: DirichletParams,
    theorem_mode: bool,
}

impl RwaSpec {
    /// Arbitrary weights. The spec is in theorem mode exactly when
    /// `α_j = n_j + m_j` for every `j`.
    pub fn new(components: Vec<BetaParams>, weights: DirichletParams) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::contract("RWA spec needs at least one component"));
        }
        if components.len() != weights.len() {
            return Err(Error::contract(format!(
                "{} components but {} Dirichlet parameters",
                components.len(),
                weights.len()
            )));
        }
        let theorem_mode = components
            .iter()
            .zip(weights.alpha())
            .all(|(p, a)| p.total() == *a);
        Ok(Self {
            components,
            weights,
            theorem_mode,
        })
    }

    /// Weights coupled to the components as `α_j = n_j + m_j`.
    pub fn coupled(components: Vec<BetaParams>) -> Result<Self> {
        let alpha = components.iter().map(BetaParams::total).collect();
        Self::new(components, DirichletParams::new(alpha)?)
    }

    /// `r` uniform components with `Dirichlet(2, ..., 2)` weights.
    pub fn corollary1(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::contract("r must be at least 1"));
        }
        Self::coupled(vec![BetaParams::uniform(); r])
    }

    /// `r` arcsine components on `(0, 1)` with `Dirichlet(1, ..., 1)` weights.
    pub fn corollary2(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::contract("r must be at least 1"));
        }
        Self::coupled(vec![BetaParams::arcsine(); r])
    }

    pub fn components(&self) -> &[BetaParams] {
        &self.components
    }

    pub fn weights(&self) -> &DirichletParams {
        &self.weights
    }

    pub fn r(&self) -> usize {
        self.components.len()
    }

    pub fn is_theorem_mode(&self) -> bool {
        self.theorem_mode
    }

    /// `(Σ n_j, Σ m_j)`, the shapes of the Beta target.
    pub fn target_shapes(&self) -> (Rational, Rational) {
        let n = self.components.iter().map(|p| p.n.clone()).sum();
        let m = self.components.iter().map(|p| p.m.clone()).sum();
        (n, m)
    }

    pub fn target(&self) -> BetaParams {
        let (n, m) = self.target_shapes();
        BetaParams { n, m }
    }

    pub fn describe(&self) -> String {
        let comps: Vec<String> = self.components.iter().map(|p| p.to_string()).collect();
        let alpha: Vec<String> = self.weights.alpha.iter().map(format_rational).collect();
        format!(
            "components=[{}] dirichlet=({})",
            comps.join(","),
            alpha.join(",")
        )
    }
}

/// `E(X^k) = (n)_k / (n+m)_k` for `X ~ Beta(n, m)`.
pub fn beta_moment(p: &BetaParams, k: usize) -> Rational {
    pochhammer(&p.n, k) / pochhammer(&p.total(), k)
}

/// `E(W_1^{i_1} ... W_r^{i_r}) = Π (α_j)_{i_j} / (Σ α)_k`.
pub fn dirichlet_mixed_moment(d: &DirichletParams, idx: &MultiIndex) -> Result<Rational> {
    if idx.len() != d.len() {
        return Err(Error::contract(format!(
            "multi-index {idx} has {} parts, Dirichlet has {}",
            idx.len(),
            d.len()
        )));
    }
    let num: Rational = d
        .alpha
        .iter()
        .zip(idx.parts())
        .map(|(a, &i)| pochhammer(a, i))
        .product();
    Ok(num / pochhammer(&d.total(), idx.order()))
}

/// `E(Z^k)` by brute-force expansion over compositions of `k`.
///
/// Does not require theorem mode.
pub fn rwa_moment_direct(spec: &RwaSpec, k: usize) -> Rational {
    let r = spec.r();
    let alpha = spec.weights.alpha();
    // Per-component tables indexed by the exponent i_j.
    let weight_rising: Vec<Vec<Rational>> = alpha.iter().map(|a| pochhammer_table(a, k)).collect();
    let component_moments: Vec<Vec<Rational>> = spec
        .components
        .iter()
        .map(|p| (0..=k).map(|i| beta_moment(p, i)).collect())
        .collect();

    let mut sum = Rational::zero();
    for idx in compositions(k, r).expect("spec has r >= 1") {
        let coeff = multinomial(k, &idx).expect("composition order is k");
        let mut term = Rational::from_integer(BigInt::from(coeff));
        for (j, &i) in idx.parts().iter().enumerate() {
            term *= &weight_rising[j][i];
            term *= &component_moments[j][i];
        }
        sum += term;
    }
    sum / pochhammer(&spec.weights.total(), k)
}

/// `k`-th moment of `Beta(n_total, m_total)`.
pub fn beta_closed_form_moment(n_total: &Rational, m_total: &Rational, k: usize) -> Rational {
    pochhammer(n_total, k) / pochhammer(&(n_total + m_total), k)
}

/// Order-by-order comparison of the direct and closed-form moment sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentReport {
    pub k_max: usize,
    #[serde(with = "crate::exact::serde_rational::vec")]
    pub direct: Vec<Rational>,
    #[serde(with = "crate::exact::serde_rational::vec")]
    pub closed_form: Vec<Rational>,
    pub equal: Vec<bool>,
    pub overall_pass: bool,
}

pub fn verify_theorem(spec: &RwaSpec, k_max: usize) -> Result<MomentReport> {
    if !spec.is_theorem_mode() {
        return Err(Error::contract(format!(
            "weights are not coupled as alpha_j = n_j + m_j: {}",
            spec.describe()
        )));
    }
    if k_max == 0 {
        return Err(Error::contract("k_max must be positive"));
    }
    let (n_total, m_total) = spec.target_shapes();
    let direct: Vec<Rational> = (0..=k_max).map(|k| rwa_moment_direct(spec, k)).collect();
    let closed_form: Vec<Rational> = (0..=k_max)
        .map(|k| beta_closed_form_moment(&n_total, &m_total, k))
        .collect();
    let equal: Vec<bool> = direct
        .iter()
        .zip(&closed_form)
        .map(|(a, b)| a == b)
        .collect();
    let overall_pass = equal.iter().all(|&e| e);
    Ok(MomentReport {
        k_max,
        direct,
        closed_form,
        equal,
        overall_pass,
    })
}

/// Checks `Σ_{|i|=k} multinomial(k, i) Π (n_j)_{i_j} = (Σ n_j)_k` exactly.
pub fn vandermonde_check(shapes: &[Rational], k: usize) -> Result<bool> {
    if shapes.is_empty() {
        return Err(Error::contract(
            "vandermonde_check needs at least one shape",
        ));
    }
    if let Some(bad) = shapes.iter().find(|s| !s.is_positive()) {
        return Err(Error::contract(format!(
            "shapes must be positive, got {}",
            format_rational(bad)
        )));
    }
    // Sum over the common denominator Π q_j^k in integers: with s = p/q,
    // (s)_i · q^k = p (p+q) ⋯ (p+(i-1)q) · q^(k-i).
    let mut denominator = BigInt::one();
    let tables: Vec<Vec<BigInt>> = shapes
        .iter()
        .map(|s| {
            let (p, q) = (s.numer(), s.denom());
            let q_pow: Vec<BigInt> = (0..=k).map(|e| num_traits::pow(q.clone(), e)).collect();
            denominator *= &q_pow[k];
            let mut rising = BigInt::one();
            (0..=k)
                .map(|i| {
                    let entry = &rising * &q_pow[k - i];
                    rising *= p + q * BigInt::from(i);
                    entry
                })
                .collect()
        })
        .collect();
    let mut numerator = BigInt::zero();
    for idx in compositions(k, shapes.len())? {
        let mut term = BigInt::from(multinomial(k, &idx)?);
        for (j, &i) in idx.parts().iter().enumerate() {
            term *= &tables[j][i];
        }
        numerator += term;
    }
    let total: Rational = shapes.iter().sum();
    Ok(Rational::new(numerator, denominator) == pochhammer(&total, k))
}

/// Convenience for `Beta(n, m)` with integer shapes.
pub fn beta_int(n: i64, m: i64) -> BetaParams {
    BetaParams::new(integer(n), integer(m)).expect("positive integer shapes")
}
