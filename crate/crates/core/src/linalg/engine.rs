//! Scalar abstraction shared by the normal-form kernels.
//!
//! Every kernel is written once, generic over [`EngineInt`], and first run on
//! checked `i64` arithmetic. Any overflow aborts that attempt and the same
//! kernel is re-run on `BigInt`, where it cannot fail.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) type Res<T> = std::result::Result<T, Overflow>;

pub(crate) trait EngineInt: Clone + Debug + PartialEq + Eq {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn plus(&self, other: &Self) -> Res<Self>;
    fn minus(&self, other: &Self) -> Res<Self>;
    fn times(&self, other: &Self) -> Res<Self>;
    fn negated(&self) -> Res<Self>;
    /// Floor division; `other` is nonzero.
    fn floor_div(&self, other: &Self) -> Res<Self>;
    /// `self | other`
    fn is_divisor_of(&self, other: &Self) -> bool;
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;

    /// `self - q * x`
    fn sub_mul(&self, q: &Self, x: &Self) -> Res<Self> {
        self.minus(&q.times(x)?)
    }
}

fn guard(v: Option<i64>) -> Res<i64> {
    // i64::MIN has no absolute value; treat it as overflow as well.
    match v {
        Some(x) if x != i64::MIN => Ok(x),
        _ => Err(Overflow),
    }
}

impl EngineInt for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn plus(&self, other: &Self) -> Res<Self> {
        guard(self.checked_add(*other))
    }
    fn minus(&self, other: &Self) -> Res<Self> {
        guard(self.checked_sub(*other))
    }
    fn times(&self, other: &Self) -> Res<Self> {
        guard(self.checked_mul(*other))
    }
    fn negated(&self) -> Res<Self> {
        guard(self.checked_neg())
    }
    fn floor_div(&self, other: &Self) -> Res<Self> {
        Ok(Integer::div_floor(self, other))
    }
    fn is_divisor_of(&self, other: &Self) -> bool {
        if *self == 0 {
            *other == 0
        } else {
            other % self == 0
        }
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i64().filter(|&x| x != i64::MIN)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl EngineInt for BigInt {
    fn nil() -> Self {
        BigInt::zero()
    }
    fn unit() -> Self {
        BigInt::from(1)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn plus(&self, other: &Self) -> Res<Self> {
        Ok(self + other)
    }
    fn minus(&self, other: &Self) -> Res<Self> {
        Ok(self - other)
    }
    fn times(&self, other: &Self) -> Res<Self> {
        Ok(self * other)
    }
    fn negated(&self) -> Res<Self> {
        Ok(-self)
    }
    fn floor_div(&self, other: &Self) -> Res<Self> {
        Ok(Integer::div_floor(self, other))
    }
    fn is_divisor_of(&self, other: &Self) -> bool {
        if Zero::is_zero(self) {
            Zero::is_zero(other)
        } else {
            Zero::is_zero(&(other % self))
        }
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Column-major dense matrix used inside the kernels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dense<E> {
    pub nrows: usize,
    pub cols: Vec<Vec<E>>,
}

impl<E: EngineInt> Dense<E> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Dense { nrows, cols: vec![vec![E::nil(); nrows]; ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.cols[i][i] = E::unit();
        }
        m
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn from_int(m: &IntMatrix) -> Option<Self> {
        let mut cols = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            let mut col = Vec::with_capacity(m.rows());
            for i in 0..m.rows() {
                col.push(E::from_big(m.get(i, j))?);
            }
            cols.push(col);
        }
        Some(Dense { nrows: m.rows(), cols })
    }

    pub fn to_int(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.nrows, self.ncols());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                if !x.is_nil() {
                    out.set(i, j, x.to_big());
                }
            }
        }
        out
    }

    /// `col[dst] -= q * col[src]`, touching rows from `from` on.
    pub fn col_sub_mul(&mut self, dst: usize, src: usize, q: &E, from: usize) -> Res<()> {
        if q.is_nil() {
            return Ok(());
        }
        let (d, s) = two_mut(&mut self.cols, dst, src);
        for i in from..d.len() {
            if !s[i].is_nil() {
                d[i] = d[i].sub_mul(q, &s[i])?;
            }
        }
        Ok(())
    }

    pub fn negate_col(&mut self, j: usize) -> Res<()> {
        for x in self.cols[j].iter_mut() {
            if !x.is_nil() {
                *x = x.negated()?;
            }
        }
        Ok(())
    }

    /// `row[dst] -= q * row[src]`, touching columns from `from` on.
    pub fn row_sub_mul(&mut self, dst: usize, src: usize, q: &E, from: usize) -> Res<()> {
        if q.is_nil() {
            return Ok(());
        }
        for col in self.cols[from..].iter_mut() {
            if !col[src].is_nil() {
                col[dst] = col[dst].sub_mul(q, &col[src])?;
            }
        }
        Ok(())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        for col in self.cols.iter_mut() {
            col.swap(a, b);
        }
    }

    pub fn negate_row(&mut self, i: usize) -> Res<()> {
        for col in self.cols.iter_mut() {
            if !col[i].is_nil() {
                col[i] = col[i].negated()?;
            }
        }
        Ok(())
    }

    pub fn mul(&self, other: &Dense<E>) -> Res<Dense<E>> {
        assert_eq!(self.ncols(), other.nrows, "matrix product shape mismatch");
        let mut out = Dense::<E>::zeros(self.nrows, other.ncols());
        for (j, ocol) in other.cols.iter().enumerate() {
            let dst = &mut out.cols[j];
            for (k, b) in ocol.iter().enumerate() {
                if b.is_nil() {
                    continue;
                }
                for (i, a) in self.cols[k].iter().enumerate() {
                    if !a.is_nil() {
                        dst[i] = dst[i].plus(&a.times(b)?)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn two_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

/// Runs `small` on `i64` data when every entry fits, falling back to the
/// `BigInt` instantiation on overflow.
pub(crate) fn run<T>(
    inputs: &[&IntMatrix],
    small: impl FnOnce(Vec<Dense<i64>>) -> Res<T>,
    big: impl FnOnce(Vec<Dense<BigInt>>) -> Res<T>,
) -> T {
    let converted: Option<Vec<Dense<i64>>> = inputs.iter().map(|m| Dense::from_int(m)).collect();
    if let Some(small_in) = converted {
        if let Ok(out) = small(small_in) {
            return out;
        }
        log::trace!("i64 kernel overflowed; retrying with BigInt");
    }
    let big_in = inputs.iter().map(|m| Dense::from_int(m).expect("BigInt conversion is total")).collect();
    big(big_in).unwrap_or_else(|_| unreachable!("BigInt arithmetic cannot overflow"))
}
