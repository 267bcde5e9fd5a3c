//! Truncated power series `F_p[t]/(t^N)`, the working model of the
//! discrete valuation ring `D = F_p[[t]]`.
//!
//! Every series carries its prime and its precision `N`; arithmetic between
//! series of different configurations is a programming error and panics in
//! the operator impls. The `checked_*` methods report it as an error instead.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residue prime and truncation precision shared by one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingConfig {
    pub p: u32,
    pub prec: usize,
}

impl RingConfig {
    pub fn new(p: u32, prec: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Config(format!("p = {p} is not prime")));
        }
        if p < 5 {
            return Err(Error::Config(format!(
                "p = {p}: characteristic 2 and 3 make the ramified extensions inseparable"
            )));
        }
        if p > 1 << 16 {
            return Err(Error::Config(format!("p = {p} exceeds the supported range")));
        }
        if prec == 0 {
            return Err(Error::Config("precision must be at least 1".into()));
        }
        Ok(RingConfig { p, prec })
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Valuation of a series or of one branch component of an algebra element.
///
/// `Infinite` means "at least the working precision": the element vanishes
/// modulo `t^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// `a * self + b`, saturating at infinity.
    pub fn affine(self, a: u32, b: u32) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(a * v + b),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinite => s.serialize_none(),
        }
    }
}

#[inline]
pub(crate) fn mod_inv(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    mod_pow(a, p - 2, p)
}

#[inline]
pub(crate) fn mod_pow(a: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = (a % p) as u64;
    let p64 = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p64;
        }
        base = base * base % p64;
        e >>= 1;
    }
    acc as u32
}

#[inline]
pub(crate) fn reduce_i64(c: i64, p: u32) -> u32 {
    c.rem_euclid(p as i64) as u32
}

/// An element of `F_p[t]/(t^N)`, coefficients lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncatedSeries {
    p: u32,
    coeffs: Vec<u32>,
}

impl TruncatedSeries {
    pub fn zero(cfg: RingConfig) -> Self {
        TruncatedSeries { p: cfg.p, coeffs: vec![0; cfg.prec] }
    }

    pub fn one(cfg: RingConfig) -> Self {
        Self::constant(cfg, 1)
    }

    pub fn constant(cfg: RingConfig, c: i64) -> Self {
        Self::monomial(cfg, c, 0)
    }

    /// `c * t^deg`, zero if `deg >= N`.
    pub fn monomial(cfg: RingConfig, c: i64, deg: usize) -> Self {
        let mut s = Self::zero(cfg);
        if deg < cfg.prec {
            s.coeffs[deg] = reduce_i64(c, cfg.p);
        }
        s
    }

    /// The uniformizer `t`.
    pub fn t(cfg: RingConfig) -> Self {
        Self::monomial(cfg, 1, 1)
    }

    /// Builds a series from (possibly negative, possibly short) integer
    /// coefficients; missing coefficients are zero and excess ones are cut.
    pub fn from_coeffs(cfg: RingConfig, coeffs: &[i64]) -> Self {
        let mut s = Self::zero(cfg);
        for (slot, &c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = reduce_i64(c, cfg.p);
        }
        s
    }

    /// Strict variant used by deserialization: exact length, entries in `[0, p)`.
    pub fn from_residues(cfg: RingConfig, coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.len() != cfg.prec {
            return Err(Error::Parse(format!("series has {} coefficients, precision is {}", coeffs.len(), cfg.prec)));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= cfg.p) {
            return Err(Error::Parse(format!("coefficient {c} is not reduced mod {}", cfg.p)));
        }
        Ok(TruncatedSeries { p: cfg.p, coeffs })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn config(&self) -> RingConfig {
        RingConfig { p: self.p, prec: self.coeffs.len() }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u32 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs[0] != 0
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|&c| c != 0) {
            Some(i) => Valuation::Finite(i as u32),
            None => Valuation::Infinite,
        }
    }

    /// Degree bound of the polynomial representative (`0` for the zero series).
    pub fn poly_len(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1)
    }

    fn same_config(&self, other: &Self) -> bool {
        self.p == other.p && self.coeffs.len() == other.coeffs.len()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_config(other) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "series configurations differ: (p={}, N={}) vs (p={}, N={})",
                self.p,
                self.prec(),
                other.p,
                other.prec()
            )))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self * other)
    }

    /// Multiplicative inverse of a unit of `D`.
    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit(format!("series {self} has zero constant term")));
        }
        let p = self.p as u64;
        let n = self.prec();
        let a0_inv = mod_inv(self.coeffs[0], self.p) as u64;
        let mut b = vec![0u32; n];
        b[0] = a0_inv as u32;
        for k in 1..n {
            let mut acc = 0u64;
            for i in 1..=k {
                acc += self.coeffs[i] as u64 * b[k - i] as u64;
            }
            acc %= p;
            b[k] = ((p - acc) % p * a0_inv % p) as u32;
        }
        Ok(TruncatedSeries { p: self.p, coeffs: b })
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p as u64;
        let c = c as u64 % p;
        TruncatedSeries { p: self.p, coeffs: self.coeffs.iter().map(|&a| (a as u64 * c % p) as u32).collect() }
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.prec();
        let mut coeffs = vec![0; n];
        if k < n {
            coeffs[k..].copy_from_slice(&self.coeffs[..n - k]);
        }
        TruncatedSeries { p: self.p, coeffs }
    }

    /// Drops the coefficients below `t^k` and divides by `t^k`. The top `k`
    /// coefficients of the result are unknown at this precision and are set
    /// to zero.
    pub fn shift_down(&self, k: usize) -> Self {
        let n = self.prec();
        let mut coeffs = vec![0; n];
        if k < n {
            coeffs[..n - k].copy_from_slice(&self.coeffs[k..]);
        }
        TruncatedSeries { p: self.p, coeffs }
    }

    /// Representative modulo `t^d`: the coefficients of degree `< d`.
    pub fn reduce_mod_t_pow(&self, d: usize) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut().skip(d) {
            *c = 0;
        }
        s
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.config());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{c}t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.prec())
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert!(self.same_config(rhs), "series configuration mismatch");
        let p = self.p;
        TruncatedSeries {
            p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| {
                    let s = a + b;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        }
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert!(self.same_config(rhs), "series configuration mismatch");
        let p = self.p;
        TruncatedSeries {
            p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| if a >= b { a - b } else { a + p - b })
                .collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        let p = self.p;
        TruncatedSeries { p, coeffs: self.coeffs.iter().map(|&a| if a == 0 { 0 } else { p - a }).collect() }
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert!(self.same_config(rhs), "series configuration mismatch");
        let n = self.prec();
        let p = self.p as u64;
        let la = self.poly_len();
        let lb = rhs.poly_len();
        let mut acc = vec![0u64; n];
        for i in 0..la {
            let a = self.coeffs[i] as u64;
            if a == 0 {
                continue;
            }
            // p < 2^16, so each term is < 2^32 and n terms cannot overflow
            for j in 0..lb.min(n - i) {
                acc[i + j] += a * rhs.coeffs[j] as u64;
            }
        }
        TruncatedSeries { p: self.p, coeffs: acc.into_iter().map(|x| (x % p) as u32).collect() }
    }
}

impl AddAssign<&TruncatedSeries> for TruncatedSeries {
    fn add_assign(&mut self, rhs: &TruncatedSeries) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&TruncatedSeries> for TruncatedSeries {
    fn sub_assign(&mut self, rhs: &TruncatedSeries) {
        *self = &*self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(p: u32, n: usize) -> RingConfig {
        RingConfig::new(p, n).unwrap()
    }

    #[test]
    fn config_rejects_small_and_composite_primes() {
        assert!(RingConfig::new(2, 4).is_err());
        assert!(RingConfig::new(3, 4).is_err());
        assert!(RingConfig::new(9, 4).is_err());
        assert!(RingConfig::new(5, 0).is_err());
        assert!(RingConfig::new(7, 1).is_ok());
    }

    #[test]
    fn difference_of_squares() {
        let c = cfg(5, 6);
        let a = TruncatedSeries::from_coeffs(c, &[1, 1]);
        let b = TruncatedSeries::from_coeffs(c, &[1, -1]);
        assert_eq!(&a * &b, TruncatedSeries::from_coeffs(c, &[1, 0, -1]));
    }

    #[test]
    fn product_truncates() {
        let c = cfg(5, 4);
        let a = TruncatedSeries::monomial(c, 1, 2);
        let b = TruncatedSeries::monomial(c, 1, 3);
        assert!((&a * &b).is_zero());
    }

    #[test]
    fn geometric_inverse_of_one_plus_t() {
        let c = cfg(5, 4);
        let a = TruncatedSeries::from_coeffs(c, &[1, 1]);
        let b = TruncatedSeries::from_coeffs(c, &[1, 4, 1, 4]);
        assert!((&a * &b).is_one());
        assert_eq!(a.inv().unwrap(), b);
        assert!(TruncatedSeries::one(c).inv().unwrap().is_one());
        assert_eq!(TruncatedSeries::constant(c, 2).inv().unwrap(), TruncatedSeries::constant(c, 3));
    }

    #[test]
    fn inverse_of_non_unit_fails() {
        let c = cfg(7, 5);
        assert!(matches!(TruncatedSeries::t(c).inv(), Err(Error::NonUnit(_))));
    }

    #[test]
    fn valuations() {
        let c = cfg(5, 6);
        assert_eq!(TruncatedSeries::from_coeffs(c, &[0, 0, 1, 1]).valuation(), Valuation::Finite(2));
        assert_eq!(TruncatedSeries::zero(c).valuation(), Valuation::Infinite);
        assert_eq!(TruncatedSeries::constant(c, 3).valuation(), Valuation::Finite(0));
    }

    #[test]
    fn mismatched_configs_are_reported() {
        let a = TruncatedSeries::one(cfg(5, 4));
        let b = TruncatedSeries::one(cfg(7, 4));
        let c = TruncatedSeries::one(cfg(5, 5));
        assert!(a.checked_mul(&b).is_err());
        assert!(a.checked_mul(&c).is_err());
        assert!(a.checked_add(&a).is_ok());
    }

    #[test]
    fn shifts() {
        let c = cfg(7, 5);
        let a = TruncatedSeries::from_coeffs(c, &[1, 2, 3, 4, 5]);
        assert_eq!(a.shift_up(2), TruncatedSeries::from_coeffs(c, &[0, 0, 1, 2, 3]));
        assert_eq!(a.shift_down(2), TruncatedSeries::from_coeffs(c, &[3, 4, 5]));
        assert_eq!(a.reduce_mod_t_pow(2), TruncatedSeries::from_coeffs(c, &[1, 2]));
    }

    fn series(p: u32, n: usize) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec(0..p as i64, n)
            .prop_map(move |v| TruncatedSeries::from_coeffs(RingConfig { p, prec: n }, &v))
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 200, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

        #[test]
        fn ring_axioms(a in series(7, 8), b in series(7, 8), c in series(7, 8)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn valuation_is_additive(a in series(5, 10), b in series(5, 10)) {
            if let (Valuation::Finite(x), Valuation::Finite(y)) = (a.valuation(), b.valuation()) {
                if x + y < 10 {
                    prop_assert_eq!((&a * &b).valuation(), Valuation::Finite(x + y));
                }
            }
        }

        #[test]
        fn inverse_is_an_involution(a in series(11, 7)) {
            if a.is_unit() {
                let b = a.inv().unwrap();
                prop_assert!((&a * &b).is_one());
                prop_assert_eq!(b.inv().unwrap(), a);
            }
        }
    }
}
