//! Exact arithmetic kernels: rationals, rising factorials, multinomial
//! coefficients and weak compositions.
//!
//! Every Gamma-function ratio that shows up in a moment of a Beta or
//! Dirichlet law with rational parameters is a rising factorial, so the whole
//! moment engine stays inside `Q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always held in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num / den` in canonical form. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if s.contains('/') {
            return Err(Error::Parse(format!("cannot mix '.' and '/' in {s:?}")));
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if frac_part.is_empty() && int_digits.is_empty()
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::Parse(format!("invalid decimal {s:?}")));
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(Rational::new(num, den));
    }
    if let Some((_, den)) = s.split_once('/') {
        if den.trim().trim_start_matches('+').chars().all(|c| c == '0') {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
    }
    Rational::from_str(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Canonical `p/q` (or `p` when `q = 1`) rendering.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..k {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// All rising factorials `(a)_0, ..., (a)_k_max`, sharing the running product.
pub fn pochhammer_table(a: &Rational, k_max: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut acc = Rational::one();
    let mut term = a.clone();
    out.push(acc.clone());
    for _ in 0..k_max {
        acc *= &term;
        term += Rational::one();
        out.push(acc.clone());
    }
    out
}

/// `C(n, k)` by the multiplicative formula; every partial product is itself a
/// binomial coefficient so the division is always exact.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for t in 0..k {
        acc *= n - t;
        acc /= t + 1;
    }
    acc
}

/// A weak composition `(i_1, ..., i_r)` of its order `k = Σ i_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    parts: Vec<usize>,
    order: usize,
}

impl MultiIndex {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::contract("multi-index must have at least one part"));
        }
        let order = parts.iter().sum();
        Ok(Self { parts, order })
    }

    /// The all-zero index of length `r`.
    pub fn zeros(r: usize) -> Result<Self> {
        Self::new(vec![0; r])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, p) in self.parts.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Multinomial coefficient `k! / (i_1! ... i_r!)`, built as the running product
/// `Π_j C(i_1 + ... + i_j, i_j)`.
pub fn multinomial(k: usize, idx: &MultiIndex) -> Result<BigUint> {
    if idx.order() != k {
        return Err(Error::contract(format!(
            "multinomial order mismatch: k = {k} but parts {idx} sum to {}",
            idx.order()
        )));
    }
    let mut acc = BigUint::one();
    let mut prefix = 0u64;
    for &part in idx.parts() {
        prefix += part as u64;
        acc *= binomial(prefix, part as u64);
    }
    Ok(acc)
}

/// Odometer over the weak compositions of `k` into `r` parts, in
/// lexicographically decreasing order: `(k,0,...,0)` first, `(0,...,0,k)`
/// last.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<usize>,
    done: bool,
}

impl Compositions {
    pub fn new(k: usize, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::contract("compositions need r >= 1"));
        }
        let mut current = vec![0; r];
        current[0] = k;
        Ok(Self {
            current,
            done: false,
        })
    }

    fn advance(&mut self) {
        let r = self.current.len();
        let tail = std::mem::take(&mut self.current[r - 1]);
        match (0..r - 1).rev().find(|&j| self.current[j] > 0) {
            Some(j) => {
                self.current[j] -= 1;
                self.current[j + 1] = tail + 1;
            }
            None => self.done = true,
        }
    }
}

impl Iterator for Compositions {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        if self.done {
            return None;
        }
        let order = self.current.iter().sum();
        let item = MultiIndex {
            parts: self.current.clone(),
            order,
        };
        self.advance();
        Some(item)
    }
}

/// Every weak composition of `k` into `r` parts; there are `C(k+r-1, r-1)`.
pub fn compositions(k: usize, r: usize) -> Result<Compositions> {
    Compositions::new(k, r)
}

/// Serde adapters that store rationals as `"p/q"` strings.
pub mod serde_rational {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

        use super::super::{format_rational, parse_rational, Rational};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| parse_rational(s).map_err(D::Error::custom))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&integer(2), 3), integer(24));
        assert_eq!(pochhammer(&ratio(1, 2), 2), ratio(3, 4));
        assert_eq!(pochhammer(&ratio(-7, 3), 0), integer(1));
        assert_eq!(pochhammer(&integer(1), 5), integer(120));
    }

    #[test]
    fn pochhammer_table_matches_pointwise() {
        let a = ratio(5, 3);
        let table = pochhammer_table(&a, 9);
        for (k, v) in table.iter().enumerate() {
            assert_eq!(*v, pochhammer(&a, k));
        }
    }

    #[test]
    fn multinomial_examples() {
        let m = |parts: Vec<usize>| {
            let idx = MultiIndex::new(parts).unwrap();
            multinomial(idx.order(), &idx).unwrap()
        };
        assert_eq!(m(vec![1, 1]), BigUint::from(2u32));
        assert_eq!(m(vec![2, 1]), BigUint::from(3u32));
        assert_eq!(m(vec![7]), BigUint::from(1u32));
        assert_eq!(m(vec![2, 3, 4]), BigUint::from(1260u32));
    }

    #[test]
    fn multinomial_rejects_order_mismatch() {
        let idx = MultiIndex::new(vec![1, 2]).unwrap();
        assert!(matches!(
            multinomial(4, &idx),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn multi_index_rejects_empty() {
        assert!(MultiIndex::new(vec![]).is_err());
    }

    #[test]
    fn compositions_two_into_two() {
        let got: Vec<Vec<usize>> = compositions(2, 2)
            .unwrap()
            .map(|c| c.parts().to_vec())
            .collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn compositions_counts() {
        assert_eq!(compositions(4, 3).unwrap().count(), 15);
        let zero: Vec<_> = compositions(0, 4).unwrap().collect();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].parts(), &[0, 0, 0, 0]);
        assert_eq!(compositions(5, 1).unwrap().count(), 1);
        assert!(compositions(3, 0).is_err());
    }

    #[test]
    fn compositions_are_strictly_decreasing_and_sum_to_k() {
        for r in 1..=6 {
            for k in 0..=12 {
                let all: Vec<_> = compositions(k, r).unwrap().collect();
                let expected = binomial((k + r - 1) as u64, (r - 1) as u64);
                assert_eq!(BigUint::from(all.len()), expected, "k={k} r={r}");
                for c in &all {
                    assert_eq!(c.order(), k);
                    assert_eq!(c.len(), r);
                }
                for pair in all.windows(2) {
                    assert!(pair[0].parts() > pair[1].parts());
                }
            }
        }
    }

    #[test]
    fn multinomial_row_sums_to_power() {
        for r in 1..=5usize {
            for k in 0..=10usize {
                let total: BigUint = compositions(k, r)
                    .unwrap()
                    .map(|c| multinomial(k, &c).unwrap())
                    .sum();
                assert_eq!(total, BigUint::from(r).pow(k as u32), "k={k} r={r}");
            }
        }
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(6, 2), BigUint::from(15u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(60, 30), BigUint::from(118264581564861424u64));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("3").unwrap(), integer(3));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&integer(-2)), "-2");
        assert_eq!(to_f64(&ratio(1, 4)), 0.25);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..=40, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
    }

    proptest! {
        #[test]
        fn pochhammer_composition_law(a in small_rational(), j in 0usize..8, k in 0usize..8) {
            let lhs = pochhammer(&a, j + k);
            let rhs = pochhammer(&a, j) * pochhammer(&(a.clone() + integer(j as i64)), k);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rational_add_sub_round_trip(x in small_rational(), y in small_rational()) {
            let back = (x.clone() + &y) - &y;
            prop_assert_eq!(back.numer(), x.numer());
            prop_assert_eq!(back.denom(), x.denom());
            prop_assert!(back.denom().is_positive());
        }

        #[test]
        fn format_parse_round_trip(x in small_rational()) {
            prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }
}
