//! Extended-real exponents and weighted power means.
//!
//! Every exponent handled by the crate (mean orders, concavity orders of
//! densities and measures) lives in [`ExtReal`], so the limit orders
//! `-inf`, `0` and `+inf` are explicit values rather than float sentinels.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

/// Sums of reciprocals within this distance of zero are treated as zero.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Below this magnitude a non-zero mean order is evaluated in the log domain.
const SMALL_ORDER: f64 = 1e-8;

/// A number in `[-inf, +inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    /// Always a finite float when built through [`ExtReal::new`].
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);
    pub const ONE: ExtReal = ExtReal::Finite(1.0);

    /// Maps `±inf` floats onto the infinite variants; rejects NaN.
    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(domain("NaN is not an extended real"))
        } else if x == f64::INFINITY {
            Ok(ExtReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Ok(ExtReal::NegInf)
        } else {
            Ok(ExtReal::Finite(x))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(x) if x.is_finite())
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ExtReal::Finite(x) if x == 0.0)
    }

    /// `0 -> +inf`, `±inf -> 0`, `x -> 1/x`.
    pub fn recip(self) -> ExtReal {
        match self {
            ExtReal::NegInf | ExtReal::PosInf => ExtReal::ZERO,
            ExtReal::Finite(x) if x == 0.0 => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(1.0 / x),
        }
    }

    /// Sum with the usual conventions; `+inf + -inf` is rejected.
    pub fn checked_add(self, other: ExtReal) -> Result<ExtReal> {
        use ExtReal::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(domain("+inf + -inf is undefined")),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => ExtReal::new(a + b),
        }
    }

    /// Order with `-inf` least and `+inf` greatest.
    pub fn total_cmp(&self, other: &ExtReal) -> Ordering {
        self.to_f64().total_cmp(&other.to_f64())
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl From<f64> for ExtReal {
    /// Infinite floats map to the infinite variants. NaN is kept as a
    /// (non-finite) `Finite` payload; use [`ExtReal::new`] to reject it.
    fn from(x: f64) -> Self {
        ExtReal::new(x).unwrap_or(ExtReal::Finite(x))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::PosInf => s.serialize_str("inf"),
            ExtReal::Finite(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExtRealVisitor;

        impl Visitor<'_> for ExtRealVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"+inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                ExtReal::new(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                match v {
                    "inf" | "+inf" => Ok(ExtReal::PosInf),
                    "-inf" => Ok(ExtReal::NegInf),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(ExtRealVisitor)
    }
}

/// Interpolation weight in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Weight(f64);

impl Weight {
    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(Weight(lambda))
        } else {
            Err(domain(format!("weight {lambda} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - lambda`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

/// One mean order per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PVector(pub Vec<ExtReal>);

impl PVector {
    pub fn new(orders: Vec<ExtReal>) -> Self {
        PVector(orders)
    }

    /// `(p, ..., p)` with `n` copies.
    pub fn uniform(p: ExtReal, n: usize) -> Self {
        PVector(vec![p; n])
    }

    pub fn from_f64s(orders: &[f64]) -> Result<Self> {
        orders.iter().map(|&p| ExtReal::new(p)).collect::<Result<_>>().map(PVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[ExtReal] {
        &self.0
    }
}

fn check_nonneg(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(**v >= 0.0) || v.is_infinite()) {
        Some(v) => Err(domain(format!("mean arguments must be finite and non-negative, got {v}"))),
        None => Ok(()),
    }
}

/// Weighted `p`-mean `M_p^lambda(a, b)` of two non-negative numbers.
///
/// `lambda` in `{0, 1}` returns the matching endpoint for every order. With
/// `p <= 0` and an interior weight, a zero argument forces the mean to zero.
pub fn p_mean(p: ExtReal, lambda: Weight, a: f64, b: f64) -> Result<f64> {
    check_nonneg(&[a, b])?;
    let l = lambda.value();
    if l == 0.0 {
        return Ok(a);
    }
    if l == 1.0 {
        return Ok(b);
    }
    Ok(match p {
        ExtReal::NegInf => a.min(b),
        ExtReal::PosInf => a.max(b),
        ExtReal::Finite(p) => finite_order_mean(p, &[1.0 - l, l], &[a, b]),
    })
}

/// Weighted `p`-mean of `m` non-negative numbers; weights must sum to one.
pub fn p_mean_m(p: ExtReal, weights: &[f64], values: &[f64]) -> Result<f64> {
    if weights.len() != values.len() || weights.is_empty() {
        return Err(domain(format!(
            "{} weights for {} values",
            weights.len(),
            values.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(domain(format!("weight {w} outside [0, 1]")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(domain(format!("weights sum to {total}, expected 1")));
    }
    check_nonneg(values)?;

    // Zero-weight entries do not take part in the mean.
    let (w, v): (Vec<f64>, Vec<f64>) = weights
        .iter()
        .zip(values)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, v)| (*w, *v))
        .unzip();
    if w.len() == 1 {
        return Ok(v[0]);
    }
    Ok(match p {
        ExtReal::NegInf => v.iter().copied().fold(f64::INFINITY, f64::min),
        ExtReal::PosInf => v.iter().copied().fold(0.0, f64::max),
        ExtReal::Finite(p) => finite_order_mean(p, &w, &v),
    })
}

/// Finite order, strictly positive weights summing to one, at least two terms.
fn finite_order_mean(p: f64, weights: &[f64], values: &[f64]) -> f64 {
    let has_zero = values.iter().any(|&v| v == 0.0);
    if p <= 0.0 && has_zero {
        return 0.0;
    }
    if p == 0.0 {
        let log_mean: f64 = weights.iter().zip(values).map(|(w, v)| w * v.ln()).sum();
        return log_mean.exp();
    }
    if p.abs() < SMALL_ORDER && !has_zero {
        // sum_i w_i e^{p ln v_i} = 1 + sum_i w_i expm1(p ln v_i)
        let s: f64 = weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * (p * v.ln()).exp_m1())
            .sum();
        return (s.ln_1p() / p).exp();
    }
    // Scale by the largest (p > 0) or smallest (p < 0) value so every power
    // stays in [0, 1].
    let scale = if p > 0.0 {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    };
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * (v / scale).powf(p))
        .sum();
    scale * s.powf(1.0 / p)
}

/// Admissibility bound `-(sum_i 1/p_i)^{-1}` for the density order.
fn admissibility_bound(orders: &PVector) -> Result<f64> {
    if orders.is_empty() {
        return Err(domain("empty order vector"));
    }
    let mut sum = 0.0;
    for (i, p) in orders.as_slice().iter().enumerate() {
        match *p {
            ExtReal::Finite(v) if (0.0..=1.0).contains(&v) => {
                if v == 0.0 {
                    return Ok(0.0);
                }
                sum += 1.0 / v;
            }
            other => {
                return Err(domain(format!("order p[{i}] = {other} outside [0, 1]")));
            }
        }
    }
    Ok(-1.0 / sum)
}

/// `gamma = (sum_i 1/p_i + 1/alpha)^{-1}` with the limit conventions:
/// any `p_i = 0` or `alpha = 0` gives 0, `alpha = +inf` contributes nothing,
/// and a vanishing sum (the admissibility boundary) gives `-inf`.
pub fn gamma_compose(orders: &PVector, alpha: ExtReal) -> Result<ExtReal> {
    let bound = admissibility_bound(orders)?;
    let admissible = match alpha {
        ExtReal::NegInf => false,
        ExtReal::PosInf => true,
        ExtReal::Finite(a) => a >= bound - BOUNDARY_EPS * bound.abs(),
    };
    if !admissible {
        return Err(domain(format!(
            "alpha = {alpha} is below the admissibility bound -(sum 1/p_i)^(-1) = {bound}"
        )));
    }
    if bound == 0.0 || alpha.is_zero() {
        return Ok(ExtReal::ZERO);
    }
    let reciprocal_sum: f64 = orders.as_slice().iter().map(|p| 1.0 / p.to_f64()).sum();
    let total = reciprocal_sum + alpha.recip().to_f64();
    if total.abs() <= BOUNDARY_EPS {
        Ok(ExtReal::NegInf)
    } else {
        ExtReal::new(1.0 / total)
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_EPS * a.abs().max(b.abs()).max(1.0)
}

/// Borell's correspondence `alpha = s / (1 - s n)` between the concavity
/// order of a measure and that of its density.
pub fn borell_s_to_alpha(s: ExtReal, n: usize) -> Result<ExtReal> {
    if n == 0 {
        return Err(domain("dimension must be positive"));
    }
    let cap = 1.0 / n as f64;
    match s {
        ExtReal::NegInf => Ok(ExtReal::Finite(-cap)),
        ExtReal::PosInf => Err(domain(format!("s = inf exceeds 1/n = {cap}"))),
        ExtReal::Finite(s) if near(s, cap) => Ok(ExtReal::PosInf),
        ExtReal::Finite(s) if s > cap => Err(domain(format!("s = {s} exceeds 1/n = {cap}"))),
        ExtReal::Finite(s) => ExtReal::new(s / (1.0 - s * n as f64)),
    }
}

/// Inverse of [`borell_s_to_alpha`]: `s = alpha / (1 + alpha n)`.
pub fn alpha_to_s(alpha: ExtReal, n: usize) -> Result<ExtReal> {
    if n == 0 {
        return Err(domain("dimension must be positive"));
    }
    let floor = -1.0 / n as f64;
    match alpha {
        ExtReal::PosInf => Ok(ExtReal::Finite(-floor)),
        ExtReal::NegInf => Err(domain(format!("alpha = -inf is below -1/n = {floor}"))),
        ExtReal::Finite(a) if near(a, floor) => Ok(ExtReal::NegInf),
        ExtReal::Finite(a) if a < floor => {
            Err(domain(format!("alpha = {a} is below -1/n = {floor}")))
        }
        ExtReal::Finite(a) => ExtReal::new(a / (1.0 + a * n as f64)),
    }
}

/// Outcome of comparing the dilation-concavity order `(1-p)/n + gamma`
/// against the order `alpha / (1 + alpha n)` implied by `alpha`-concavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentComparison {
    pub improved: ExtReal,
    pub borell: ExtReal,
    pub holds: bool,
}

pub fn exponent_compare(p: f64, alpha: ExtReal, n: usize) -> Result<ExponentComparison> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("p = {p} outside (0, 1]")));
    }
    if n == 0 {
        return Err(domain("dimension must be positive"));
    }
    let gamma = gamma_compose(&PVector::uniform(ExtReal::Finite(p), n), alpha)?;
    let improved = ExtReal::Finite((1.0 - p) / n as f64).checked_add(gamma)?;
    let borell = alpha_to_s(alpha, n)?;
    let holds = match (improved, borell) {
        (ExtReal::NegInf, ExtReal::NegInf) => true,
        (x, y) if x.is_finite() && y.is_finite() => {
            let (x, y) = (x.to_f64(), y.to_f64());
            x >= y || near(x, y)
        }
        (x, y) => x >= y,
    };
    Ok(ExponentComparison {
        improved,
        borell,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: f64) -> Weight {
        Weight::new(l).unwrap()
    }

    fn fin(x: f64) -> ExtReal {
        ExtReal::Finite(x)
    }

    #[test]
    fn two_term_examples() {
        assert_eq!(p_mean(ExtReal::NegInf, w(0.3), 2.0, 5.0).unwrap(), 2.0);
        assert_eq!(p_mean(ExtReal::PosInf, w(0.3), 2.0, 5.0).unwrap(), 5.0);
        assert!((p_mean(fin(1.0), w(0.5), 2.0, 4.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((p_mean(fin(0.0), w(0.5), 1.0, 4.0).unwrap() - 2.0).abs() < 1e-15);
        // ((0.5 * 1 + 0.5 * 3))^2 = 4
        let direct = (0.5 * 1f64.sqrt() + 0.5 * 9f64.sqrt()).powi(2);
        assert!((direct - 4.0).abs() < 1e-15);
        assert!((p_mean(fin(0.5), w(0.5), 1.0, 9.0).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn zero_arguments() {
        assert_eq!(p_mean(fin(0.0), w(0.4), 0.0, 3.0).unwrap(), 0.0);
        assert_eq!(p_mean(fin(-2.0), w(0.4), 3.0, 0.0).unwrap(), 0.0);
        let positive = p_mean(fin(1.0), w(0.25), 4.0, 0.0).unwrap();
        assert!((positive - 3.0).abs() < 1e-15);
        // endpoints win over the zero convention
        assert_eq!(p_mean(fin(-1.0), w(0.0), 2.0, 0.0).unwrap(), 2.0);
        assert_eq!(p_mean(fin(-1.0), w(1.0), 2.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_input_is_domain_error() {
        assert!(p_mean(fin(1.0), w(0.5), -1.0, 2.0).is_err());
        assert!(p_mean_m(fin(1.0), &[0.5, 0.5], &[1.0, -2.0]).is_err());
        assert!(Weight::new(1.5).is_err());
    }

    #[test]
    fn small_order_uses_log_domain() {
        let near_zero = p_mean(fin(1e-10), w(0.3), 0.5, 8.0).unwrap();
        let geometric = p_mean(fin(0.0), w(0.3), 0.5, 8.0).unwrap();
        assert!((near_zero - geometric).abs() < 1e-8);
        let negative = p_mean(fin(-1e-10), w(0.3), 0.5, 8.0).unwrap();
        assert!((negative - geometric).abs() < 1e-8);
    }

    #[test]
    fn m_term_examples() {
        let third = 1.0 / 3.0;
        let m = p_mean_m(fin(1.0), &[third, third, 1.0 - 2.0 * third], &[1.0, 2.0, 3.0]).unwrap();
        assert!((m - 2.0).abs() < 1e-14);
        let g = p_mean_m(fin(0.0), &[0.5, 0.25, 0.25], &[1.0, 16.0, 1.0]).unwrap();
        assert!((g - 2.0).abs() < 1e-14);
        assert!(p_mean_m(fin(1.0), &[0.5, 0.4], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn m_term_agrees_with_two_term() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = rng.random_range(0.0..10.0);
            let b = rng.random_range(0.0..10.0);
            let two = p_mean(fin(2.0), w(0.5), a, b).unwrap();
            let many = p_mean_m(fin(2.0), &[0.5, 0.5], &[a, b]).unwrap();
            // direct formula oracle
            let direct = (0.5 * a * a + 0.5 * b * b).sqrt();
            assert!((two - many).abs() <= 1e-12 * direct.max(1.0));
            assert!((two - direct).abs() <= 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn gamma_examples() {
        let ones = PVector::uniform(ExtReal::ONE, 2);
        assert_eq!(gamma_compose(&ones, ExtReal::PosInf).unwrap(), fin(0.5));
        assert_eq!(gamma_compose(&ones, fin(-0.5)).unwrap(), ExtReal::NegInf);
        let mixed = PVector::from_f64s(&[0.0, 1.0]).unwrap();
        assert_eq!(gamma_compose(&mixed, fin(2.0)).unwrap(), ExtReal::ZERO);
        assert_eq!(gamma_compose(&mixed, ExtReal::PosInf).unwrap(), ExtReal::ZERO);
        // p_i = 0 pushes the admissibility bound to 0
        assert!(gamma_compose(&mixed, fin(-0.1)).is_err());
        assert_eq!(gamma_compose(&ones, ExtReal::ZERO).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn gamma_uniform_order_closed_form() {
        for n in 1..=4 {
            for &p in &[0.25, 0.5, 0.8, 1.0] {
                for &alpha in &[-p / (2.0 * n as f64), 0.3, 2.0, -p / (3.0 * n as f64)] {
                    let g = gamma_compose(&PVector::uniform(fin(p), n), fin(alpha)).unwrap();
                    let closed = 1.0 / (n as f64 / p + 1.0 / alpha);
                    assert!((g.to_f64() - closed).abs() < 1e-12, "n={n} p={p} a={alpha}");
                }
            }
        }
    }

    #[test]
    fn gamma_rejects_inadmissible() {
        let err = gamma_compose(&PVector::uniform(ExtReal::ONE, 2), fin(-0.6)).unwrap_err();
        assert!(err.to_string().contains("admissibility bound"));
        assert!(gamma_compose(&PVector::uniform(ExtReal::ONE, 2), ExtReal::NegInf).is_err());
        assert!(gamma_compose(&PVector::from_f64s(&[1.2, 1.0]).unwrap(), ExtReal::PosInf).is_err());
    }

    #[test]
    fn borell_examples() {
        assert_eq!(borell_s_to_alpha(ExtReal::ZERO, 3).unwrap(), ExtReal::ZERO);
        assert_eq!(borell_s_to_alpha(fin(1.0 / 3.0), 3).unwrap(), ExtReal::PosInf);
        let a = borell_s_to_alpha(fin(-1.0), 2).unwrap();
        assert!((a.to_f64() + 1.0 / 3.0).abs() < 1e-15);
        let back = alpha_to_s(a, 2).unwrap();
        assert!((back.to_f64() + 1.0).abs() < 1e-14);
        assert!(borell_s_to_alpha(fin(0.6), 2).is_err());
        assert_eq!(borell_s_to_alpha(ExtReal::NegInf, 4).unwrap(), fin(-0.25));
        assert_eq!(alpha_to_s(fin(-0.25), 4).unwrap(), ExtReal::NegInf);
        assert_eq!(alpha_to_s(ExtReal::PosInf, 4).unwrap(), fin(0.25));
    }

    #[test]
    fn exponent_compare_boundary_and_examples() {
        for n in 1..=4 {
            for &p in &[0.3, 0.5, 1.0] {
                let alpha = -p / (n as f64 * (1.0 + p));
                let c = exponent_compare(p, fin(alpha), n).unwrap();
                assert!(c.holds, "boundary n={n} p={p}: {c:?}");
            }
        }
        let zero = exponent_compare(0.5, ExtReal::ZERO, 2).unwrap();
        assert!(zero.holds);
        assert_eq!(zero.borell, ExtReal::ZERO);
        // p = 1: both closed forms reduce to alpha / (1 + alpha n)
        let c = exponent_compare(1.0, fin(-0.4), 2).unwrap();
        let gamma = 1.0 / (2.0 + 1.0 / -0.4);
        assert!((c.improved.to_f64() - gamma).abs() < 1e-12);
        assert!((c.borell.to_f64() - (-0.4 / (1.0 - 0.8))).abs() < 1e-12);
        assert!(c.holds);
        // just below the sufficient condition for p < 1 the comparison fails
        let c = exponent_compare(0.5, fin(-0.24), 2).unwrap();
        assert!(!c.holds, "{c:?}");
    }

    #[test]
    fn ext_real_serde() {
        let v: Vec<ExtReal> = serde_json::from_str(r#"[1, 0.5, "inf", "-inf", "+inf", 0]"#).unwrap();
        assert_eq!(
            v,
            vec![fin(1.0), fin(0.5), ExtReal::PosInf, ExtReal::NegInf, ExtReal::PosInf, ExtReal::ZERO]
        );
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1.0,0.5,"inf","-inf","inf",0.0]"#);
        assert!(serde_json::from_str::<ExtReal>(r#""infinity""#).is_err());
    }

    #[test]
    fn recip_round_trip() {
        for x in [ExtReal::ZERO, ExtReal::PosInf, fin(2.5), fin(-0.125)] {
            assert_eq!(x.recip().recip(), x);
        }
        assert_eq!(ExtReal::NegInf.recip(), ExtReal::ZERO);
    }
}
