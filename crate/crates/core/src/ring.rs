//! Coefficient rings and exact univariate Laurent polynomials.
//!
//! Every coefficient is stored as a [`BigRational`]; the owning [`CoeffRing`]
//! decides which values are legal (integers for `Z`, residues in `[0, m)` for
//! `Z/m`, anything for `Q`). Zero coefficients are never stored, so equality
//! of polynomials is equality of their term maps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffRing {
    Integers,
    Rationals,
    IntegersMod(u64),
}

impl CoeffRing {
    pub fn integers_mod(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidRing(format!("Z/{m} needs m >= 2")));
        }
        Ok(CoeffRing::IntegersMod(m))
    }

    pub fn is_field(&self) -> bool {
        match *self {
            CoeffRing::Integers => false,
            CoeffRing::Rationals => true,
            CoeffRing::IntegersMod(m) => is_prime(m),
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            CoeffRing::IntegersMod(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CoeffRing::IntegersMod(_))
    }

    /// Checks that `c` belongs to the ring and returns its canonical form.
    pub fn element(&self, c: &BigRational) -> Result<BigRational> {
        match *self {
            CoeffRing::Rationals => Ok(c.clone()),
            CoeffRing::Integers => {
                if c.is_integer() {
                    Ok(c.clone())
                } else {
                    Err(Error::NotInRing(c.to_string(), *self))
                }
            }
            CoeffRing::IntegersMod(m) => {
                if !c.is_integer() {
                    return Err(Error::NotInRing(c.to_string(), *self));
                }
                Ok(BigRational::from_integer(c.to_integer().mod_floor(&BigInt::from(m))))
            }
        }
    }

    pub(crate) fn reduce(&self, c: BigRational) -> BigRational {
        match *self {
            CoeffRing::IntegersMod(m) => {
                debug_assert!(c.is_integer());
                BigRational::from_integer(c.to_integer().mod_floor(&BigInt::from(m)))
            }
            _ => c,
        }
    }

    /// Multiplicative inverse, when it exists in the ring.
    pub fn inverse(&self, c: &BigRational) -> Option<BigRational> {
        if c.is_zero() {
            return None;
        }
        match *self {
            CoeffRing::Rationals => Some(c.recip()),
            CoeffRing::Integers => {
                if c.abs().is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            CoeffRing::IntegersMod(m) => {
                let m = BigInt::from(m);
                let e = c.to_integer().extended_gcd(&m);
                if e.gcd.is_one() {
                    Some(BigRational::from_integer(e.x.mod_floor(&m)))
                } else {
                    None
                }
            }
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Integers => write!(f, "Z"),
            CoeffRing::Rationals => write!(f, "Q"),
            CoeffRing::IntegersMod(m) => write!(f, "Zmod:{m}"),
        }
    }
}

impl FromStr for CoeffRing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(CoeffRing::Integers),
            "Q" => Ok(CoeffRing::Rationals),
            other => {
                let m = other
                    .strip_prefix("Zmod:")
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidRing(format!("`{other}` (expected Z, Q or Zmod:<m>)")))?;
                CoeffRing::integers_mod(m)
            }
        }
    }
}

impl Serialize for CoeffRing {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoeffRing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Exact Laurent polynomial in one variable `T` over a [`CoeffRing`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly {
    ring: CoeffRing,
    coeffs: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero(ring: CoeffRing) -> Self {
        LaurentPoly { ring, coeffs: BTreeMap::new() }
    }

    pub fn one(ring: CoeffRing) -> Self {
        Self::monomial(ring, 1, 0)
    }

    pub fn constant(ring: CoeffRing, c: i64) -> Self {
        Self::monomial(ring, c, 0)
    }

    /// `c * T^e`
    pub fn monomial(ring: CoeffRing, c: i64, e: i64) -> Self {
        let mut p = Self::zero(ring);
        p.add_term(e, ring.reduce(BigRational::from_integer(c.into())));
        p
    }

    pub fn t(ring: CoeffRing) -> Self {
        Self::monomial(ring, 1, 1)
    }

    /// `T^e - 1`; zero when `e == 0`.
    pub fn t_pow_minus_one(ring: CoeffRing, e: i64) -> Self {
        let mut p = Self::monomial(ring, 1, e);
        p.add_term(0, ring.reduce(BigRational::from_integer((-1).into())));
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_int_terms(ring: CoeffRing, terms: &[(i64, i64)]) -> Self {
        let mut p = Self::zero(ring);
        for &(e, c) in terms {
            p.add_term(e, ring.reduce(BigRational::from_integer(c.into())));
        }
        p
    }

    pub fn from_terms<I>(ring: CoeffRing, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            let c = ring.element(&c)?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let ring = self.ring;
        let entry = self.coeffs.entry(e).or_insert_with(BigRational::zero);
        *entry = ring.reduce(&*entry + c);
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, e: i64) -> BigRational {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// `max_exp - min_exp`, the Euclidean size in `k[T, T^-1]`.
    pub fn span(&self) -> Option<i64> {
        Some(self.max_exp()? - self.min_exp()?)
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.values().next_back()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = Self::zero(self.ring);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out.add_term(ea + eb, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Result<Self> {
        let c = self.ring.element(c)?;
        let mut out = Self::zero(self.ring);
        for (e, a) in self.terms() {
            out.add_term(e, a * &c);
        }
        Ok(out)
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into())).expect("integers embed in every coefficient ring")
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplication by the unit `T^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { ring: self.ring, coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// The substitution `T -> T^scale`. With `scale = -1` this turns a
    /// polynomial in `U` into the corresponding polynomial in `T` when
    /// `U = T^-1`.
    pub fn substitute(&self, scale: i64) -> Result<Self> {
        if scale == 0 {
            return Err(Error::ZeroScale);
        }
        Ok(LaurentPoly { ring: self.ring, coeffs: self.coeffs.iter().map(|(e, c)| (e * scale, c.clone())).collect() })
    }

    /// Splits `self = T^k * p` where `p` has nonzero constant term and no
    /// negative exponents. Zero maps to `(0, 0)`.
    pub fn normalize_unit(&self) -> (i64, Self) {
        match self.min_exp() {
            None => (0, self.clone()),
            Some(k) => (k, self.shift(-k)),
        }
    }

    /// Re-interprets the polynomial over another ring (`Z -> Q`, `Z -> Z/m`,
    /// `Q -> Z` when integral, ...).
    pub fn with_ring(&self, ring: CoeffRing) -> Result<Self> {
        if ring == self.ring {
            return Ok(self.clone());
        }
        if let (CoeffRing::IntegersMod(_), CoeffRing::IntegersMod(_)) = (self.ring, ring) {
            return Err(Error::RingMismatch(self.ring, ring));
        }
        Self::from_terms(ring, self.terms().map(|(e, c)| (e, c.clone())))
    }

    /// Long division of ordinary polynomials over a field.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check_ring(divisor)?;
        if !self.ring.is_field() {
            return Err(Error::NotEuclidean(self.ring));
        }
        let (dmax, dlead) = match (divisor.max_exp(), divisor.leading_coeff()) {
            (Some(e), Some(c)) => (e, c.clone()),
            _ => return Err(Error::ZeroPolynomial),
        };
        if divisor.min_exp().unwrap_or(0) < 0 || self.min_exp().unwrap_or(0) < 0 {
            return Err(Error::Dimension("div_rem expects ordinary polynomials".into()));
        }
        let inv = self.ring.inverse(&dlead).ok_or(Error::NotEuclidean(self.ring))?;
        let mut q = Self::zero(self.ring);
        let mut r = self.clone();
        while let Some(rmax) = r.max_exp() {
            if rmax < dmax {
                break;
            }
            let c = self.ring.reduce(r.leading_coeff().unwrap() * &inv);
            let shift = rmax - dmax;
            q.add_term(shift, c.clone());
            for (e, dc) in divisor.terms() {
                r.add_term(e + shift, -(dc * &c));
            }
        }
        Ok((q, r))
    }

    /// Extended gcd over `Q` (or over `F_p` for prime moduli), after clearing
    /// the unit powers of `T`. Returns `(g, u, v)` with `g = u*a + v*b` and `g`
    /// monic with nonzero constant term.
    pub fn gcd_ext(a: &Self, b: &Self) -> Result<(Self, Self, Self)> {
        a.check_ring(b)?;
        let ring = match a.ring {
            CoeffRing::Integers | CoeffRing::Rationals => CoeffRing::Rationals,
            r if r.is_field() => r,
            r => return Err(Error::NotEuclidean(r)),
        };
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (ka, a0) = a.with_ring(ring)?.normalize_unit();
        let (kb, b0) = b.with_ring(ring)?.normalize_unit();
        let (mut r0, mut r1) = (a0, b0);
        let (mut u0, mut u1) = (Self::one(ring), Self::zero(ring));
        let (mut v0, mut v1) = (Self::zero(ring), Self::one(ring));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let u2 = &u0 - &(&q * &u1);
            let v2 = &v0 - &(&q * &v1);
            r0 = std::mem::replace(&mut r1, r);
            u0 = std::mem::replace(&mut u1, u2);
            v0 = std::mem::replace(&mut v1, v2);
        }
        let inv = ring
            .inverse(r0.leading_coeff().expect("gcd of nonzero inputs is nonzero"))
            .expect("field coefficients are invertible");
        let g = r0.scale(&inv)?;
        let u = u0.scale(&inv)?.shift(-ka);
        let v = v0.scale(&inv)?.shift(-kb);
        Ok((g, u, v))
    }

    fn fmt_term(f: &mut fmt::Formatter<'_>, e: i64, c: &BigRational, first: bool) -> fmt::Result {
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let show_coeff = !mag.is_one() || e == 0;
        if show_coeff {
            if mag.is_integer() {
                write!(f, "{}", mag.numer())?;
            } else {
                write!(f, "({mag})")?;
            }
        }
        match e {
            0 => Ok(()),
            1 => write!(f, "T"),
            _ => write!(f, "T^{e}"),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.coeffs.iter().rev().enumerate() {
            Self::fmt_term(f, *e, c, i == 0)?;
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            /// Panics on a ring mismatch; use the `checked_*` form to handle it.
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$checked(rhs).expect("ring mismatch in Laurent polynomial arithmetic")
            }
        }
        impl std::ops::$trait<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale_int(-1)
    }
}

impl std::ops::Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

pub fn poly_arith(a: &LaurentPoly, b: &LaurentPoly, op: ArithOp) -> Result<LaurentPoly> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

pub fn poly_substitute(p: &LaurentPoly, exponent_scale: i64) -> Result<LaurentPoly> {
    p.substitute(exponent_scale)
}

pub fn poly_gcd_over_rationals(a: &LaurentPoly, b: &LaurentPoly) -> Result<(LaurentPoly, LaurentPoly, LaurentPoly)> {
    LaurentPoly::gcd_ext(a, b)
}

/// Scales a rational Bézout pair by the least common denominator `n` of all
/// coefficients, returning integer polynomials `(n*u, n*v, n)`.
pub fn bezout_integer_clearing(u: &LaurentPoly, v: &LaurentPoly) -> Result<(LaurentPoly, LaurentPoly, BigInt)> {
    for p in [u, v] {
        if !matches!(p.ring(), CoeffRing::Integers | CoeffRing::Rationals) {
            return Err(Error::NotEuclidean(p.ring()));
        }
    }
    let n = u.terms().chain(v.terms()).fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let scaled = |p: &LaurentPoly| {
        LaurentPoly::from_terms(
            CoeffRing::Integers,
            p.terms().map(|(e, c)| (e, c * BigRational::from_integer(n.clone()))),
        )
    };
    Ok((scaled(u)?, scaled(v)?, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: CoeffRing = CoeffRing::Integers;
    const Q: CoeffRing = CoeffRing::Rationals;

    fn p(ring: CoeffRing, terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_int_terms(ring, terms)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Dense schoolbook product over `Z/m` (or `Z` when `m == 0`), written
    /// independently of the map-based multiply.
    fn schoolbook(a: &[(i64, i64)], b: &[(i64, i64)], m: i64) -> Vec<(i64, i64)> {
        let lo = a.iter().map(|t| t.0).min().unwrap() + b.iter().map(|t| t.0).min().unwrap();
        let hi = a.iter().map(|t| t.0).max().unwrap() + b.iter().map(|t| t.0).max().unwrap();
        let mut dense = vec![0i64; (hi - lo + 1) as usize];
        for &(ea, ca) in a {
            for &(eb, cb) in b {
                dense[(ea + eb - lo) as usize] += ca * cb;
            }
        }
        dense
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as i64 + lo, if m > 0 { c.rem_euclid(m) } else { c }))
            .filter(|&(_, c)| c != 0)
            .collect()
    }

    #[test]
    fn difference_of_squares() {
        let a = p(Z, &[(1, 1), (0, -1)]);
        let b = p(Z, &[(1, 1), (0, 1)]);
        assert_eq!(&a * &b, p(Z, &[(2, 1), (0, -1)]));
    }

    #[test]
    fn additive_inverse_is_zero() {
        for n in 1..6 {
            let a = LaurentPoly::t_pow_minus_one(Z, n);
            let b = p(Z, &[(0, 1), (n, -1)]);
            let s = poly_arith(&a, &b, ArithOp::Add).unwrap();
            assert!(s.is_zero());
            assert_eq!(s.num_terms(), 0);
        }
    }

    #[test]
    fn square_mod_two_matches_schoolbook() {
        let z2 = CoeffRing::IntegersMod(2);
        for n in 1..7 {
            let terms = [(0, 1), (n, -1)];
            let a = p(z2, &terms);
            let expected = schoolbook(&terms, &terms, 2);
            assert_eq!(&a * &a, p(z2, &expected));
            assert_eq!(&a * &a, p(z2, &[(0, 1), (2 * n, 1)]));
        }
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = LaurentPoly::one(Z);
        let b = LaurentPoly::one(Q);
        assert_eq!(poly_arith(&a, &b, ArithOp::Mul), Err(Error::RingMismatch(Z, Q)));
    }

    #[test]
    fn substitution_examples() {
        // (1 - U^N) read as a U-polynomial becomes 1 - T^-N.
        let n = 3;
        let one_minus_un = p(Z, &[(0, 1), (n, -1)]);
        assert_eq!(one_minus_un.substitute(-1).unwrap(), p(Z, &[(0, 1), (-n, -1)]));
        assert_eq!(LaurentPoly::one(Z).substitute(7).unwrap(), LaurentPoly::one(Z));
        assert_eq!(LaurentPoly::one(Z).substitute(0), Err(Error::ZeroScale));
    }

    #[test]
    fn substituted_annihilator_matches_power_of_t_n_minus_one() {
        for n in 1..4i64 {
            for b1 in 1..5u32 {
                let terms = [(0, 1), (-n, -1)];
                let lhs = p(Z, &terms).pow(b1 + 1).shift(n * (b1 as i64 + 1));
                // (1 - T^-N)^(b+1) T^(N(b+1)) = (T^N - 1)^(b+1), expanded by hand.
                let mut expected = vec![(0i64, 1i64)];
                for _ in 0..=b1 {
                    expected = schoolbook(&expected, &[(n, 1), (0, -1)], 0);
                }
                assert_eq!(lhs, p(Z, &expected));
                assert_eq!(lhs, LaurentPoly::t_pow_minus_one(Z, n).pow(b1 + 1));
            }
        }
    }

    #[test]
    fn gcd_of_cyclotomic_style_inputs() {
        for n in 1..6i64 {
            for k in 1..9i64 {
                let a = LaurentPoly::t_pow_minus_one(Z, n).pow(2);
                let b = LaurentPoly::t_pow_minus_one(Z, k);
                let (g, u, v) = poly_gcd_over_rationals(&a, &b).unwrap();
                let l = num_integer::gcd(n, k);
                assert_eq!(g, LaurentPoly::t_pow_minus_one(Q, l), "N={n} k={k}");
                let aq = a.with_ring(Q).unwrap();
                let bq = b.with_ring(Q).unwrap();
                assert_eq!(&(&u * &aq) + &(&v * &bq), g);
            }
        }
        let x = LaurentPoly::t_pow_minus_one(Z, 1);
        assert_eq!(poly_gcd_over_rationals(&x, &x).unwrap().0, x.with_ring(Q).unwrap());
    }

    #[test]
    fn gcd_small_case_by_hand() {
        // (T^2-1)^2 = T^4 - 2T^2 + 1 and T^3 - 1 share exactly the factor T - 1.
        let a = p(Z, &[(4, 1), (2, -2), (0, 1)]);
        let b = p(Z, &[(3, 1), (0, -1)]);
        let (g, u, v) = poly_gcd_over_rationals(&a, &b).unwrap();
        assert_eq!(g, p(Q, &[(1, 1), (0, -1)]));
        let (uc, vc, n) = bezout_integer_clearing(&u, &v).unwrap();
        // Denominator scan done independently: lcm of every coefficient denominator.
        let mut expect_n = BigInt::one();
        for (_, c) in u.terms().chain(v.terms()) {
            expect_n = expect_n.lcm(c.denom());
        }
        assert_eq!(n, expect_n);
        let lhs = &(&uc * &a) + &(&vc * &b);
        assert_eq!(lhs, p(Z, &[(1, 1), (0, -1)]).scale(&BigRational::from_integer(n)).unwrap());
    }

    #[test]
    fn gcd_rejects_zero_and_composite_moduli() {
        let x = LaurentPoly::t(Z);
        assert_eq!(poly_gcd_over_rationals(&x, &LaurentPoly::zero(Z)), Err(Error::ZeroPolynomial));
        let z6 = CoeffRing::IntegersMod(6);
        let y = LaurentPoly::t(z6);
        assert_eq!(poly_gcd_over_rationals(&y, &y), Err(Error::NotEuclidean(z6)));
        let z5 = CoeffRing::IntegersMod(5);
        let a = LaurentPoly::t_pow_minus_one(z5, 4);
        let b = LaurentPoly::t_pow_minus_one(z5, 6);
        assert_eq!(LaurentPoly::gcd_ext(&a, &b).unwrap().0, LaurentPoly::t_pow_minus_one(z5, 2));
    }

    #[test]
    fn bezout_clearing_examples() {
        let u = LaurentPoly::from_terms(Q, [(0, rat(1, 2))]).unwrap();
        let v = LaurentPoly::from_terms(Q, [(0, rat(1, 3))]).unwrap();
        let (uc, vc, n) = bezout_integer_clearing(&u, &v).unwrap();
        assert_eq!((uc, vc, n), (LaurentPoly::constant(Z, 3), LaurentPoly::constant(Z, 2), BigInt::from(6)));
        let a = p(Z, &[(2, 4), (-1, 3)]);
        let (ac, bc, n) = bezout_integer_clearing(&a, &a).unwrap();
        assert_eq!(n, BigInt::one());
        assert_eq!(ac, a);
        assert_eq!(bc, a);
    }

    #[test]
    fn ring_parsing_and_flags() {
        assert_eq!("Z".parse::<CoeffRing>().unwrap(), Z);
        assert_eq!("Zmod:6".parse::<CoeffRing>().unwrap(), CoeffRing::IntegersMod(6));
        assert!("Zmod:1".parse::<CoeffRing>().is_err());
        assert!("R".parse::<CoeffRing>().is_err());
        assert!(Q.is_field());
        assert!(CoeffRing::IntegersMod(7).is_field());
        assert!(!CoeffRing::IntegersMod(6).is_field());
        assert!(!Z.is_field());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(Z, &[(2, 1), (0, -1)]).to_string(), "T^2 - 1");
        assert_eq!(p(Z, &[(1, -5)]).to_string(), "-5T");
        assert_eq!(p(Z, &[(0, 1), (-2, -1)]).to_string(), "1 - T^-2");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly(ring: CoeffRing) -> impl Strategy<Value = LaurentPoly> {
            prop::collection::vec((-4i64..5, -5i64..6), 0..6)
                .prop_map(move |terms| LaurentPoly::from_int_terms(ring, &terms))
        }

        fn arb_ring() -> impl Strategy<Value = CoeffRing> {
            prop_oneof![Just(Z), Just(Q), Just(CoeffRing::IntegersMod(2)), Just(CoeffRing::IntegersMod(6))]
        }

        proptest! {
            #[test]
            fn ring_axioms((a, b, c) in arb_ring().prop_flat_map(|r| (arb_poly(r), arb_poly(r), arb_poly(r)))) {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a + &b, &b + &a);
                for r in [&a + &b, &a - &b, &a * &b] {
                    prop_assert!(r.terms().all(|(_, c)| !c.is_zero()));
                }
                let t = LaurentPoly::t(a.ring());
                prop_assert!((&t * &LaurentPoly::monomial(a.ring(), 1, -1)).is_one());
            }

            #[test]
            fn substitution_is_multiplicative(a in arb_poly(Z), b in arb_poly(Z), s in prop_oneof![-3i64..0, 1i64..4]) {
                prop_assert_eq!((&a * &b).substitute(s).unwrap(), &a.substitute(s).unwrap() * &b.substitute(s).unwrap());
            }

            #[test]
            fn gcd_contract(a in arb_poly(Z), b in arb_poly(Z)) {
                prop_assume!(!a.is_zero() && !b.is_zero());
                let (g, u, v) = LaurentPoly::gcd_ext(&a, &b).unwrap();
                let aq = a.with_ring(Q).unwrap();
                let bq = b.with_ring(Q).unwrap();
                prop_assert_eq!(&(&u * &aq) + &(&v * &bq), g.clone());
                prop_assert!(g.leading_coeff().unwrap().is_one());
                for x in [aq, bq] {
                    let (_, x0) = x.normalize_unit();
                    let (_, r) = x0.div_rem(&g).unwrap();
                    prop_assert!(r.is_zero());
                }
            }
        }
    }
}
