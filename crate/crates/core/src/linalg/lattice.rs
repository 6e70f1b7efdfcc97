use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::engine::{Dense, Res};
use super::hnf::hnf_core;
use super::{hermite_normal_form, run, smith_normal_form, AbelianGroupType, IntMatrix};
use crate::error::{Error, Result};

/// A sublattice of `Z^n`, stored as a column echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
    pivot_rows: Vec<usize>,
}

impl Lattice {
    /// Lattice spanned by the columns of `gens`.
    pub fn from_generators(gens: &IntMatrix) -> Self {
        fn go<E: super::EngineInt>(m: Dense<E>) -> Res<(IntMatrix, Vec<usize>)> {
            let raw = hnf_core(m, false)?;
            Ok((raw.h.to_int(), raw.pivot_rows))
        }
        let (h, pivot_rows) = run(&[gens], |mut v| go(v.remove(0)), |mut v| go::<BigInt>(v.remove(0)));
        let basis = (0..pivot_rows.len()).map(|j| h.column(j)).collect();
        Lattice { dim: gens.rows(), basis, pivot_rows }
    }

    /// `m * Z^n`
    pub fn scaled_standard(dim: usize, m: &BigInt) -> Self {
        Lattice::from_generators(&IntMatrix::identity(dim).scale(m))
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.dim, &self.basis)
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivot_rows
    }

    /// Coordinates of `v` in the echelon basis, or `None` when `v` is not in
    /// the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.dim, "vector length does not match lattice");
        let mut r = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for (col, &p) in self.basis.iter().zip(&self.pivot_rows) {
            if r[..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, rem) = r[p].div_rem(&col[p]);
            if !rem.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, c) in r.iter_mut().zip(col).skip(p) {
                    if !c.is_zero() {
                        *x -= &q * c;
                    }
                }
            }
            coords.push(q);
        }
        r.iter().all(|x| x.is_zero()).then_some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Canonical representative of `v` modulo the lattice: two vectors are
    /// congruent exactly when their reductions coincide.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut r = v.to_vec();
        for (col, &p) in self.basis.iter().zip(&self.pivot_rows) {
            let q = r[p].div_floor(&col[p]);
            if !q.is_zero() {
                for (x, c) in r.iter_mut().zip(col).skip(p) {
                    if !c.is_zero() {
                        *x -= &q * c;
                    }
                }
            }
        }
        r
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Sum of two lattices in the same ambient space.
    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        Lattice::from_generators(&self.basis_matrix().hcat(&other.basis_matrix()))
    }

    /// Image of the lattice under `a`.
    pub fn image(&self, a: &IntMatrix) -> Lattice {
        Lattice::from_generators(&a.mul(&self.basis_matrix()))
    }
}

/// Outcome of a lattice membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `M * witness = v`.
    Member { witness: Vec<BigInt> },
    /// `functional * M` vanishes modulo `modulus` while `functional * v`
    /// does not (`modulus = 0` means exact vanishing over the integers).
    NonMember { functional: Vec<BigInt>, modulus: BigInt },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Decides whether `v` lies in the column span of `m` over the integers.
pub fn lattice_membership(m: &IntMatrix, v: &[BigInt]) -> Result<Membership> {
    if v.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "vector of length {} tested against a lattice in Z^{}",
            v.len(),
            m.rows()
        )));
    }
    let snf = smith_normal_form(m);
    let pv = snf.p.mul_vec(v);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); m.cols()];
    for (i, x) in pv.iter().enumerate() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        let ok = if d.is_zero() { x.is_zero() } else { (x % &d).is_zero() };
        if !ok {
            return Ok(Membership::NonMember { functional: snf.p.row(i), modulus: d });
        }
        if !d.is_zero() {
            y[i] = x / &d;
        }
    }
    Ok(Membership::Member { witness: snf.q.mul_vec(&y) })
}

/// Columns spanning the integer kernel of `m`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let h = hermite_normal_form(m);
    let cols: Vec<usize> = (h.rank..m.cols()).collect();
    h.u.select_cols(&cols)
}

/// Generators of `{x in Z^n : m x = 0 mod modulus}`; the span always
/// contains `modulus * Z^n`.
///
/// The modulus is split into prime powers `q` and the answers recombined as
/// `sum (modulus / q) L_q`. Prime factors go through elimination over `F_p`;
/// higher prime powers through the integer kernel of `[m | q I]`.
pub fn kernel_basis_mod(m: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    let n = m.cols();
    let Some(mu) = modulus.to_u64().filter(|&x| x >= 2) else {
        return kernel_mod_generic(m, modulus);
    };
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for (p, a) in factor_u64(mu) {
        let q = p.pow(a);
        let cof = BigInt::from(mu / q);
        let part = if a == 1 { kernel_mod_prime(m, p) } else { kernel_mod_generic(m, &BigInt::from(q)).columns() };
        cols.extend(part.into_iter().map(|v| v.into_iter().map(|x| x * &cof).collect()));
    }
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = modulus.clone();
        cols.push(e);
    }
    IntMatrix::from_columns(n, &cols)
}

fn kernel_mod_generic(m: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    let n = m.cols();
    let ext = m.hcat(&IntMatrix::identity(m.rows()).scale(modulus));
    let k = kernel_basis(&ext);
    let rows: Vec<usize> = (0..n).collect();
    let proj = k.select_rows(&rows);
    Lattice::from_generators(&proj).basis_matrix()
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut a = 0;
        while n.is_multiple_of(p) {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Kernel of `m` over `F_p` by reduced row echelon form, one vector per free
/// column, entries in `[0, p)`.
fn kernel_mod_prime(m: &IntMatrix, p: u64) -> Vec<Vec<BigInt>> {
    let pb = BigInt::from(p);
    let small = p < (1 << 32);
    let mulmod = |a: u64, b: u64| if small { a * b % p } else { ((a as u128 * b as u128) % p as u128) as u64 };
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|i| (0..cols).map(|j| m.get(i, j).mod_floor(&pb).to_u64().expect("reduced mod p")).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&k| a[k][c] != 0) else { continue };
        a.swap(r, k);
        let inv = pow_mod(a[r][c], p - 2, p);
        for x in a[r][c..].iter_mut() {
            *x = mulmod(*x, inv);
        }
        let pivot_row = a[r].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if *y != 0 {
                    *x = (*x + p - mulmod(f, *y)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![BigInt::zero(); cols];
            v[f] = BigInt::from(1);
            for (i, &c) in pivots.iter().enumerate() {
                if a[i][f] != 0 {
                    v[c] = BigInt::from(p - a[i][f]);
                }
            }
            v
        })
        .collect()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Isomorphism type of `Z^rows / (column span of m)`.
pub fn cokernel_type(m: &IntMatrix) -> AbelianGroupType {
    let snf = smith_normal_form(m);
    let extra = m.rows().saturating_sub(m.cols());
    AbelianGroupType::from_diagonal(&snf.diagonal(), extra)
}
