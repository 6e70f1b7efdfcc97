//! The Koszul-type model complex `(C, d1 + d3)` over `R[T, T^-1]`, its
//! truncated integer realizations, and filtration-lowering perturbations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, IntMatrix};
use crate::ring::{CoeffRing, LaurentPoly};

/// Algebraic input data: first Betti number, the values of `xi` on a basis of
/// `H^1`, the triple cup product form and the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifoldSpec {
    pub b1: usize,
    pub xi: Vec<i64>,
    /// Values `mu_ijk` for `1 <= i < j < k <= b1`; absent triples are zero.
    #[serde(serialize_with = "serialize_cup3")]
    pub cup3: BTreeMap<[usize; 3], i64>,
    pub ring: CoeffRing,
}

fn serialize_cup3<S: serde::Serializer>(m: &BTreeMap<[usize; 3], i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<[i64; 4]> = m.iter().map(|(k, v)| [k[0] as i64, k[1] as i64, k[2] as i64, *v]).collect();
    v.serialize(s)
}

/// Largest supported first Betti number; the complex has `2^b1` generators.
pub const MAX_B1: usize = 12;

impl ManifoldSpec {
    pub fn new<I>(b1: usize, xi: Vec<i64>, cup3: I, ring: CoeffRing) -> Result<Self>
    where
        I: IntoIterator<Item = ([usize; 3], i64)>,
    {
        if b1 == 0 {
            return Err(Error::InvalidSpec("b1 must be positive".into()));
        }
        if b1 > MAX_B1 {
            return Err(Error::InvalidSpec(format!("b1 = {b1} exceeds the supported maximum {MAX_B1}")));
        }
        if xi.len() != b1 {
            return Err(Error::InvalidSpec(format!("xi has length {} but b1 = {b1}", xi.len())));
        }
        if xi.iter().all(|&x| x == 0) {
            return Err(Error::TorsionSpinC);
        }
        if xi.contains(&i64::MIN) {
            return Err(Error::InvalidSpec("xi entry out of range".into()));
        }
        let mut map = BTreeMap::new();
        for (idx, v) in cup3 {
            let [i, j, k] = idx;
            if !(1 <= i && i < j && j < k && k <= b1) {
                return Err(Error::InvalidSpec(format!(
                    "cup3 index ({i},{j},{k}) must be strictly increasing within 1..={b1}"
                )));
            }
            if map.insert(idx, v).is_some() {
                return Err(Error::InvalidSpec(format!("cup3 index ({i},{j},{k}) given twice")));
            }
        }
        map.retain(|_, v| *v != 0);
        Ok(ManifoldSpec { b1, xi, cup3: map, ring })
    }

    /// The `b1 = 3` manifold with `xi = (N, 0, 0)` and `<a1 a2 a3, [Y]> = m`.
    pub fn three_torus_like(n: u64, m: i64, ring: CoeffRing) -> Result<Self> {
        Self::new(3, vec![n as i64, 0, 0], [([1, 2, 3], m)], ring)
    }

    /// `N`, the gcd of the entries of `xi`.
    pub fn n_value(&self) -> u64 {
        self.xi.iter().fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()))
    }

    /// `mu_ijk` for 1-based indices in any order, extended antisymmetrically.
    pub fn mu(&self, i: usize, j: usize, k: usize) -> i64 {
        let mut idx = [i, j, k];
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            return 0;
        }
        let mut sign = 1;
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        sign * self.cup3.get(&idx).copied().unwrap_or(0)
    }
}

/// Change of basis of `H^1` bringing `xi` to `(N, 0, ..., 0)`.
///
/// Returns the transformed spec and the unimodular `b1 x b1` matrix `Q` whose
/// columns express the new basis in the old one, so that `xi' = xi * Q` and
/// `mu'_{abc} = sum mu_{ijk} Q_ia Q_jb Q_kc`.
pub fn normalize_xi(spec: &ManifoldSpec) -> Result<(ManifoldSpec, IntMatrix)> {
    if spec.xi.iter().all(|&x| x == 0) {
        return Err(Error::TorsionSpinC);
    }
    let b = spec.b1;
    let n = spec.n_value() as i64;
    let q = if spec.xi[0] == n && spec.xi[1..].iter().all(|&x| x == 0) {
        IntMatrix::identity(b)
    } else {
        let row = IntMatrix::from_rows(std::slice::from_ref(&spec.xi));
        let snf = smith_normal_form(&row);
        let mut q = snf.q;
        if snf.p.get(0, 0).is_negative() {
            for i in 0..b {
                let v = -q.get(i, 0).clone();
                q.set(i, 0, v);
            }
        }
        q
    };
    let to_i64 =
        |x: &BigInt| x.to_i64().ok_or_else(|| Error::InvalidSpec("normalized data overflows 64-bit integers".into()));
    let xi_big: Vec<BigInt> = spec.xi.iter().map(|&x| BigInt::from(x)).collect();
    let new_xi: Vec<i64> =
        (0..b).map(|a| to_i64(&(0..b).map(|i| &xi_big[i] * q.get(i, a)).sum::<BigInt>())).collect::<Result<_>>()?;
    debug_assert_eq!(new_xi[0], n);
    let mut cup3 = Vec::new();
    for a in 0..b {
        for bb in a + 1..b {
            for c in bb + 1..b {
                let mut acc = BigInt::zero();
                for ((i, j, k), v) in spec.cup3.iter().map(|(k, v)| ((k[0], k[1], k[2]), *v)) {
                    // Sum over all permutations of the stored triple.
                    for (x, y, z, s) in
                        [(i, j, k, 1), (j, k, i, 1), (k, i, j, 1), (j, i, k, -1), (i, k, j, -1), (k, j, i, -1)]
                    {
                        acc += BigInt::from(v * s) * q.get(x - 1, a) * q.get(y - 1, bb) * q.get(z - 1, c);
                    }
                }
                if !acc.is_zero() {
                    cup3.push(([a + 1, bb + 1, c + 1], to_i64(&acc)?));
                }
            }
        }
    }
    Ok((ManifoldSpec::new(b, new_xi, cup3, spec.ring)?, q))
}

/// Sparse matrix with Laurent polynomial entries over one coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    ring: CoeffRing,
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(ring: CoeffRing, rows: usize, cols: usize) -> Self {
        LaurentMatrix { ring, rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(ring: CoeffRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(ring));
        }
        m
    }

    pub fn from_rows(ring: CoeffRing, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(ring, nr, nc);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != nc {
                return Err(Error::Dimension("ragged Laurent matrix rows".into()));
            }
            for (j, p) in row.into_iter().enumerate() {
                if p.ring() != ring {
                    return Err(Error::RingMismatch(ring, p.ring()));
                }
                m.set(i, j, p);
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> LaurentPoly {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| LaurentPoly::zero(self.ring))
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&LaurentPoly> {
        self.entries.get(&(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        assert!(i < self.rows && j < self.cols, "Laurent matrix index out of range");
        assert_eq!(p.ring(), self.ring, "Laurent matrix entry over the wrong ring");
        if p.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), p);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, p: &LaurentPoly) {
        let v = &self.get(i, j) + p;
        self.set(i, j, v);
    }

    /// Nonzero entries in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &LaurentPoly)> + '_ {
        self.entries.iter().map(|(&(i, j), p)| (i, j, p))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut by_row: Vec<Vec<(usize, &LaurentPoly)>> = vec![Vec::new(); other.rows];
        for (&(k, j), b) in &other.entries {
            by_row[k].push((j, b));
        }
        let mut out = LaurentMatrix::zeros(self.ring, self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            for &(j, b) in &by_row[k] {
                out.add_to(i, j, &(a * b));
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (&(i, j), p) in &other.entries {
            out.add_to(i, j, p);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentMatrix {
        LaurentMatrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(k, p)| (*k, -p)).collect(),
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> LaurentMatrix {
        let mut out = LaurentMatrix::zeros(self.ring, self.rows, self.cols);
        for (&(i, j), p) in &self.entries {
            out.set(i, j, p * c);
        }
        out
    }

    /// The submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> LaurentMatrix {
        let rpos: HashMap<usize, usize> = rows.iter().enumerate().map(|(a, &r)| (r, a)).collect();
        let cpos: HashMap<usize, usize> = cols.iter().enumerate().map(|(a, &c)| (c, a)).collect();
        let mut out = LaurentMatrix::zeros(self.ring, rows.len(), cols.len());
        for (&(i, j), p) in &self.entries {
            if let (Some(&a), Some(&b)) = (rpos.get(&i), cpos.get(&j)) {
                out.set(a, b, p.clone());
            }
        }
        out
    }

    pub fn with_ring(&self, ring: CoeffRing) -> Result<LaurentMatrix> {
        let mut out = LaurentMatrix::zeros(ring, self.rows, self.cols);
        for (&(i, j), p) in &self.entries {
            out.set(i, j, p.with_ring(ring)?);
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &LaurentMatrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("Laurent matrix shapes differ".into()));
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LaurentMatrix {}x{} over {} [", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Applies `iota_{idx[0]}` first, then `iota_{idx[1]}`, ... to `e_S`
/// (0-based indices, `S` a bitmask). Returns the sign and resulting subset.
pub fn contract(mask: u32, idx: &[usize]) -> Option<(i64, u32)> {
    let mut s = mask;
    let mut sign = 1;
    for &i in idx {
        let bit = 1u32 << i;
        if s & bit == 0 {
            return None;
        }
        if (s & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        s &= !bit;
    }
    Some((sign, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(morse_index: usize) -> Parity {
        if morse_index.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Free `R[T, T^-1]`-module on the generators `e_S`, `S` a subset of
/// `{1..b1}`, with differential `d1 + d3` and an optional filtration-lowering
/// chain map `P` defining `U = T^-1 + P`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    spec: ManifoldSpec,
    gens: Vec<u32>,
    pos: Vec<usize>,
    d1: LaurentMatrix,
    d3: LaurentMatrix,
    perturbation: Option<LaurentMatrix>,
    rebased: bool,
}

impl ChainComplex {
    /// The full model complex with `d = d1 + d3`.
    pub fn build(spec: &ManifoldSpec) -> Result<Self> {
        let mut cx = build_d1(spec)?;
        cx.d3 = build_d3_with(spec, &cx)?;
        Ok(cx)
    }

    /// Same generators and `d1`, with a caller-supplied `d3`. The matrix must
    /// have Morse degree `-3` and satisfy `(d1 + d3)^2 = 0`.
    pub fn with_custom_d3(spec: &ManifoldSpec, d3: LaurentMatrix) -> Result<Self> {
        let mut cx = build_d1(spec)?;
        if d3.ring() != spec.ring || d3.rows() != cx.rank() || d3.cols() != cx.rank() {
            return Err(Error::Dimension("custom d3 must be a square matrix on the generators".into()));
        }
        if let Some((i, j, _)) = d3.nonzero().find(|&(i, j, _)| cx.morse_index(j) != cx.morse_index(i) + 3) {
            return Err(Error::InvalidSpec(format!(
                "custom d3 entry ({i},{j}) does not lower the Morse index by exactly 3"
            )));
        }
        cx.d3 = d3;
        if !cx.square_is_zero()? {
            return Err(Error::InvalidSpec("(d1 + d3)^2 is not zero".into()));
        }
        Ok(cx)
    }

    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    pub fn ring(&self) -> CoeffRing {
        self.spec.ring
    }

    pub fn b1(&self) -> usize {
        self.spec.b1
    }

    pub fn n_value(&self) -> u64 {
        self.spec.n_value()
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// Generators as bitmasks, ordered by `(|S|, mask)`.
    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn index_of(&self, mask: u32) -> usize {
        self.pos[mask as usize]
    }

    pub fn morse_index(&self, g: usize) -> usize {
        self.gens[g].count_ones() as usize
    }

    pub fn generator_label(&self, g: usize) -> String {
        let s = self.gens[g];
        if s == 0 {
            return "e_{}".into();
        }
        let idx: Vec<String> = (0..self.b1()).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
        format!("e_{{{}}}", idx.join(","))
    }

    pub fn d1(&self) -> &LaurentMatrix {
        &self.d1
    }

    pub fn d3(&self) -> &LaurentMatrix {
        &self.d3
    }

    pub fn differential(&self) -> LaurentMatrix {
        self.d1.add(&self.d3).expect("d1 and d3 share shape and ring")
    }

    pub fn perturbation(&self) -> Option<&LaurentMatrix> {
        self.perturbation.as_ref()
    }

    /// Generator indices of the given parity of Morse index.
    pub fn parity_indices(&self, parity: Parity) -> Vec<usize> {
        (0..self.rank()).filter(|&g| Parity::of(self.morse_index(g)) == parity).collect()
    }

    /// Generator indices of Morse index `d`.
    pub fn degree_indices(&self, d: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&g| self.morse_index(g) == d).collect()
    }

    pub fn square_is_zero(&self) -> Result<bool> {
        let d = self.differential();
        Ok(d.mul(&d)?.is_zero())
    }

    /// Every nonzero entry of `d1` (resp. `d3`) joins Morse indices differing
    /// by exactly one (resp. three), downwards.
    pub fn degrees_are_consistent(&self) -> bool {
        let ok =
            |m: &LaurentMatrix, k: usize| m.nonzero().all(|(i, j, _)| self.morse_index(j) == self.morse_index(i) + k);
        ok(&self.d1, 1) && ok(&self.d3, 3)
    }

    /// Installs `U = T^-1 + P`. The map `P` must be a chain map of even
    /// Morse degree that strictly lowers the Morse filtration.
    pub fn install_perturbation(&self, p: LaurentMatrix) -> Result<ChainComplex> {
        if p.ring() != self.ring() || p.rows() != self.rank() || p.cols() != self.rank() {
            return Err(Error::InvalidPerturbation("shape or ring does not match the complex".into()));
        }
        for (i, j, _) in p.nonzero() {
            let (src, dst) = (self.morse_index(j), self.morse_index(i));
            if dst >= src {
                return Err(Error::InvalidPerturbation(format!(
                    "entry {} -> {} does not lower the filtration",
                    self.generator_label(j),
                    self.generator_label(i)
                )));
            }
            if (src - dst) % 2 == 1 {
                return Err(Error::InvalidPerturbation(format!(
                    "entry {} -> {} changes parity",
                    self.generator_label(j),
                    self.generator_label(i)
                )));
            }
        }
        let d = self.differential();
        if d.mul(&p)? != p.mul(&d)? {
            return Err(Error::InvalidPerturbation("P does not commute with the differential".into()));
        }
        let mut cx = self.clone();
        cx.perturbation = if p.is_zero() { None } else { Some(p) };
        Ok(cx)
    }

    /// The operator `U = T^-1 + P` on chains.
    pub fn u_operator(&self) -> LaurentMatrix {
        let t_inv = LaurentMatrix::identity(self.ring(), self.rank()).scale(&LaurentPoly::monomial(self.ring(), 1, -1));
        match &self.perturbation {
            Some(p) => t_inv.add(p).expect("same shape"),
            None => t_inv,
        }
    }

    /// The matrix of the product `iota_{idx[last]} ... iota_{idx[0]}`.
    pub fn contraction_matrix(&self, idx: &[usize]) -> LaurentMatrix {
        let mut m = LaurentMatrix::zeros(self.ring(), self.rank(), self.rank());
        for (j, &s) in self.gens.iter().enumerate() {
            if let Some((sign, t)) = contract(s, idx) {
                m.set(self.index_of(t), j, LaurentPoly::constant(self.ring(), sign));
            }
        }
        m
    }
}

/// The complex rewritten in a basis `e'_S = e'_(s1) ^ ... ^ e'_(sk)` with
/// `e'_j = sum_i E_ij e_i` for some `E` in `GL_b1(Z[T, T^-1])`.
///
/// `phi` maps new coordinates to old ones, so `d' = phi_inv d phi`. Both
/// preserve the Morse index.
#[derive(Clone, Debug)]
pub struct Rebased {
    pub complex: ChainComplex,
    pub phi: LaurentMatrix,
    pub phi_inv: LaurentMatrix,
}

/// `E` and `E^-1` over `Z[T^±]` with `(T^xi_i - 1)_i * E = (T^N - 1, 0, ..., 0)`,
/// by the Euclidean algorithm on exponents.
pub fn xi_reduction(xi: &[i64], ring: CoeffRing) -> (Vec<Vec<LaurentPoly>>, Vec<Vec<LaurentPoly>>) {
    let b = xi.len();
    let id = |b: usize| -> Vec<Vec<LaurentPoly>> {
        (0..b)
            .map(|i| (0..b).map(|j| if i == j { LaurentPoly::one(ring) } else { LaurentPoly::zero(ring) }).collect())
            .collect()
    };
    let (mut e, mut e_inv) = (id(b), id(b));
    let mut a = xi.to_vec();
    loop {
        let Some(j) = (0..b).filter(|&i| a[i] != 0).min_by_key(|&i| a[i].abs()) else { break };
        let mut changed = false;
        for k in 0..b {
            if k == j || a[k] == 0 {
                continue;
            }
            let q = a[k] / a[j];
            // col_k -= c col_j takes T^a_k - 1 to T^(a_k - q a_j) - 1.
            let c = if q > 0 {
                LaurentPoly::from_int_terms(ring, &(1..=q).map(|r| (a[k] - r * a[j], 1)).collect::<Vec<_>>())
            } else {
                LaurentPoly::from_int_terms(ring, &(0..-q).map(|r| (a[k] + r * a[j], -1)).collect::<Vec<_>>())
            };
            for row in e.iter_mut() {
                let v = &row[k] - &(&c * &row[j]);
                row[k] = v;
            }
            let rk = e_inv[k].clone();
            for (x, y) in e_inv[j].iter_mut().zip(&rk) {
                *x = &*x + &(&c * y);
            }
            a[k] -= q * a[j];
            changed = true;
        }
        if !changed {
            break;
        }
    }
    if let Some(j) = (0..b).find(|&i| a[i] != 0) {
        if a[j] < 0 {
            // T^-N - 1 = -T^-N (T^N - 1)
            let u = LaurentPoly::monomial(ring, -1, -a[j]);
            let u_inv = LaurentPoly::monomial(ring, -1, a[j]);
            for row in e.iter_mut() {
                row[j] = &row[j] * &u;
            }
            for x in e_inv[j].iter_mut() {
                *x = &*x * &u_inv;
            }
        }
        for row in e.iter_mut() {
            row.swap(0, j);
        }
        e_inv.swap(0, j);
    }
    (e, e_inv)
}

impl ChainComplex {
    /// Exterior power `Lambda(E)` as a matrix on the generators.
    fn exterior_power(&self, e: &[Vec<LaurentPoly>]) -> LaurentMatrix {
        let ring = self.ring();
        let b = self.b1();
        let mut m = LaurentMatrix::zeros(ring, self.rank(), self.rank());
        for (col, &s) in self.gens.iter().enumerate() {
            let mut acc: BTreeMap<u32, LaurentPoly> = BTreeMap::from([(0, LaurentPoly::one(ring))]);
            for j in (0..b).filter(|j| s >> j & 1 == 1) {
                let mut next: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
                for (&t, c) in &acc {
                    for (i, row) in e.iter().enumerate() {
                        if row[j].is_zero() || t >> i & 1 == 1 {
                            continue;
                        }
                        let sign = if (t >> (i + 1)).count_ones() % 2 == 1 { -1 } else { 1 };
                        let term = (c * &row[j]).scale_int(sign);
                        let slot = next.entry(t | 1 << i).or_insert_with(|| LaurentPoly::zero(ring));
                        *slot = &*slot + &term;
                    }
                }
                next.retain(|_, p| !p.is_zero());
                acc = next;
            }
            for (t, c) in acc {
                m.set(self.index_of(t), col, c);
            }
        }
        m
    }

    /// Rewrites the complex so that `d1` becomes `(T^N - 1) iota_1`. The
    /// result is isomorphic to `self` through `phi` and keeps the original
    /// spec; only the matrices change.
    pub fn rebased(&self) -> Result<Rebased> {
        let (e, e_inv) = xi_reduction(&self.spec.xi, self.ring());
        let phi = self.exterior_power(&e);
        let phi_inv = self.exterior_power(&e_inv);
        let conj = |m: &LaurentMatrix| -> Result<LaurentMatrix> { phi_inv.mul(m)?.mul(&phi) };
        let complex = ChainComplex {
            spec: self.spec.clone(),
            gens: self.gens.clone(),
            pos: self.pos.clone(),
            d1: conj(&self.d1)?,
            d3: conj(&self.d3)?,
            perturbation: self.perturbation.as_ref().map(conj).transpose()?,
            rebased: true,
        };
        Ok(Rebased { complex, phi, phi_inv })
    }

    /// Whether more than one `xi` entry is nonzero, the case in which
    /// [`ChainComplex::rebased`] changes anything.
    pub fn needs_rebase(&self) -> bool {
        !self.rebased && self.spec.xi.iter().filter(|&&x| x != 0).count() > 1
    }
}

/// Complex with `d = d1` (and `d3 = 0`).
pub fn build_d1(spec: &ManifoldSpec) -> Result<ChainComplex> {
    if spec.xi.iter().all(|&x| x == 0) {
        return Err(Error::TorsionSpinC);
    }
    let b = spec.b1;
    let mut gens: Vec<u32> = (0..1u32 << b).collect();
    gens.sort_by_key(|&s| (s.count_ones(), s));
    let mut pos = vec![0; gens.len()];
    for (a, &s) in gens.iter().enumerate() {
        pos[s as usize] = a;
    }
    let ring = spec.ring;
    let weights: Vec<LaurentPoly> = spec.xi.iter().map(|&x| LaurentPoly::t_pow_minus_one(ring, x)).collect();
    let mut d1 = LaurentMatrix::zeros(ring, gens.len(), gens.len());
    for (j, &s) in gens.iter().enumerate() {
        for (i, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            if let Some((sign, t)) = contract(s, &[i]) {
                d1.add_to(pos[t as usize], j, &w.scale_int(sign));
            }
        }
    }
    let d3 = LaurentMatrix::zeros(ring, gens.len(), gens.len());
    Ok(ChainComplex { spec: spec.clone(), gens, pos, d1, d3, perturbation: None, rebased: false })
}

/// `d3(e_S) = -T * sum_{i<j<k} mu_ijk iota_k iota_j iota_i e_S`.
pub fn build_d3(spec: &ManifoldSpec) -> Result<LaurentMatrix> {
    let cx = build_d1(spec)?;
    build_d3_with(spec, &cx)
}

fn build_d3_with(spec: &ManifoldSpec, cx: &ChainComplex) -> Result<LaurentMatrix> {
    let ring = spec.ring;
    let mut d3 = LaurentMatrix::zeros(ring, cx.rank(), cx.rank());
    for (&[i, j, k], &mu) in &spec.cup3 {
        let coeff = LaurentPoly::monomial(ring, -mu, 1);
        if coeff.is_zero() {
            continue;
        }
        for (col, &s) in cx.gens.iter().enumerate() {
            if let Some((sign, t)) = contract(s, &[i - 1, j - 1, k - 1]) {
                d3.add_to(cx.index_of(t), col, &coeff.scale_int(sign));
            }
        }
    }
    Ok(d3)
}

/// The 4x4 presentation matrix with diagonal `T^N - 1` and corner `-mT`.
pub fn assemble_block_matrix(n: u64, m: i64) -> Result<LaurentMatrix> {
    if n == 0 {
        return Err(Error::InvalidSpec("N must be positive".into()));
    }
    let ring = CoeffRing::Integers;
    let f = LaurentPoly::t_pow_minus_one(ring, n as i64);
    let mut a = LaurentMatrix::zeros(ring, 4, 4);
    for i in 0..4 {
        a.set(i, i, f.clone());
    }
    a.set(0, 3, LaurentPoly::monomial(ring, -m, 1));
    Ok(a)
}

/// The block of the differential from generators containing index 1 to
/// generators not containing it, with `e_{S+1}` matched to `e_S`.
///
/// When `xi = (N, 0, ..., 0)` these are the only nonzero blocks, so the
/// homology of the complex is the kernel plus the cokernel of this matrix.
pub fn index_one_split(cx: &ChainComplex) -> (LaurentMatrix, Vec<usize>, Vec<usize>) {
    let rows: Vec<usize> = (0..cx.rank()).filter(|&g| cx.gens[g] & 1 == 0).collect();
    let cols: Vec<usize> = rows.iter().map(|&g| cx.index_of(cx.gens[g] | 1)).collect();
    (cx.differential().select(&rows, &cols), rows, cols)
}

/// A random filtration-lowering, parity-preserving chain map: a sum of
/// products of two or four contractions with monomial coefficients, plus a
/// null-homotopic term `d h + h d` for a random `h` of Morse degree `-1`.
pub fn random_perturbation<R: Rng + ?Sized>(cx: &ChainComplex, rng: &mut R) -> LaurentMatrix {
    let ring = cx.ring();
    let b = cx.b1();
    let coeff = |rng: &mut R| {
        let c = rng.gen_range(-3..=3);
        let e = rng.gen_range(-1..=1);
        LaurentPoly::monomial(ring, c, e)
    };
    let mut p = LaurentMatrix::zeros(ring, cx.rank(), cx.rank());
    for i in 0..b {
        for j in i + 1..b {
            if rng.gen_bool(0.5) {
                let c = coeff(rng);
                p = p.add(&cx.contraction_matrix(&[i, j]).scale(&c)).expect("same shape");
            }
        }
    }
    for i in 0..b {
        for j in i + 1..b {
            for k in j + 1..b {
                for l in k + 1..b {
                    if rng.gen_bool(0.3) {
                        let c = coeff(rng);
                        p = p.add(&cx.contraction_matrix(&[i, j, k, l]).scale(&c)).expect("same shape");
                    }
                }
            }
        }
    }
    let mut h = LaurentMatrix::zeros(ring, cx.rank(), cx.rank());
    for j in 0..cx.rank() {
        for i in 0..cx.rank() {
            if cx.morse_index(i) + 1 == cx.morse_index(j) && rng.gen_bool(0.25) {
                let c = coeff(rng);
                h.set(i, j, c);
            }
        }
    }
    let d = cx.differential();
    let homotopy = d.mul(&h).and_then(|a| a.add(&h.mul(&d)?)).expect("same shape");
    p.add(&homotopy).expect("same shape")
}

/// The quotient ring `A = Z[T]/((T^N - 1)^power)` with basis
/// `1, T, ..., T^(N*power - 1)`. `T` is a unit in `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedRing {
    n: u64,
    power: u32,
    /// Coefficients of `(T^N - 1)^power` below the leading term.
    modulus: Vec<BigInt>,
    t_inv: Vec<BigInt>,
}

impl TruncatedRing {
    pub fn new(n: u64, power: u32) -> Self {
        assert!(n >= 1 && power >= 1, "truncation needs N >= 1 and power >= 1");
        let f = LaurentPoly::t_pow_minus_one(CoeffRing::Integers, n as i64).pow(power);
        let rank = (n as usize) * power as usize;
        let modulus: Vec<BigInt> = (0..rank).map(|e| f.coeff(e as i64).to_integer()).collect();
        // T * (T^(r-1) + a_{r-1} T^(r-2) + ... + a_1) = f - a_0 = -a_0 in A.
        let a0 = modulus[0].clone();
        debug_assert!(a0.abs().is_one());
        let mut t_inv: Vec<BigInt> =
            (0..rank).map(|e| if e + 1 == rank { BigInt::one() } else { modulus[e + 1].clone() }).collect();
        for c in t_inv.iter_mut() {
            *c = -(&*c * &a0);
        }
        TruncatedRing { n, power, modulus, t_inv }
    }

    pub fn n_value(&self) -> u64 {
        self.n
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Rank of `A` over `Z`.
    pub fn rank(&self) -> usize {
        self.modulus.len()
    }

    /// `T * v`
    pub fn times_t(&self, v: &[BigInt]) -> Vec<BigInt> {
        let r = self.rank();
        let top = v[r - 1].clone();
        let mut out = Vec::with_capacity(r);
        out.push(BigInt::zero());
        out.extend_from_slice(&v[..r - 1]);
        if !top.is_zero() {
            for (o, a) in out.iter_mut().zip(&self.modulus) {
                if !a.is_zero() {
                    *o -= &top * a;
                }
            }
        }
        out
    }

    /// `T^-1 * v`
    pub fn times_t_inv(&self, v: &[BigInt]) -> Vec<BigInt> {
        let low = v[0].clone();
        let mut out = v[1..].to_vec();
        out.push(BigInt::zero());
        if !low.is_zero() {
            for (o, a) in out.iter_mut().zip(&self.t_inv) {
                if !a.is_zero() {
                    *o += &low * a;
                }
            }
        }
        out
    }

    /// Coordinates of a Laurent polynomial with integer coefficients.
    pub fn element(&self, p: &LaurentPoly) -> Result<Vec<BigInt>> {
        let r = self.rank();
        let mut acc = vec![BigInt::zero(); r];
        if p.is_zero() {
            return Ok(acc);
        }
        let mut basis = vec![BigInt::zero(); r];
        basis[0] = BigInt::one();
        let lo = p.min_exp().unwrap_or(0);
        let hi = p.max_exp().unwrap_or(0);
        // Walk T^lo .. T^hi, starting from T^lo.
        let mut cur = basis;
        if lo < 0 {
            for _ in 0..-lo {
                cur = self.times_t_inv(&cur);
            }
        } else {
            for _ in 0..lo {
                cur = self.times_t(&cur);
            }
        }
        for e in lo..=hi {
            let c = p.coeff(e);
            if !c.is_zero() {
                if !c.is_integer() {
                    return Err(Error::NotInRing(c.to_string(), CoeffRing::Integers));
                }
                let c = c.to_integer();
                for (a, x) in acc.iter_mut().zip(&cur) {
                    if !x.is_zero() {
                        *a += &c * x;
                    }
                }
            }
            if e < hi {
                cur = self.times_t(&cur);
            }
        }
        Ok(acc)
    }

    /// Matrix of multiplication by `p` on the monomial basis.
    pub fn mult_matrix(&self, p: &LaurentPoly) -> Result<IntMatrix> {
        let mut col = self.element(p)?;
        let r = self.rank();
        let mut cols = Vec::with_capacity(r);
        for j in 0..r {
            cols.push(col.clone());
            if j + 1 < r {
                col = self.times_t(&col);
            }
        }
        Ok(IntMatrix::from_columns(r, &cols))
    }

    pub fn t_matrix(&self) -> IntMatrix {
        self.mult_matrix(&LaurentPoly::t(CoeffRing::Integers)).expect("T is integral")
    }

    /// The reduction map `A -> lower` (requires `lower.power <= self.power`).
    pub fn projection_to(&self, lower: &TruncatedRing) -> IntMatrix {
        assert_eq!(self.n, lower.n);
        assert!(lower.power <= self.power);
        let mut cols = Vec::with_capacity(self.rank());
        let mut cur = vec![BigInt::zero(); lower.rank()];
        cur[0] = BigInt::one();
        for _ in 0..self.rank() {
            cols.push(cur.clone());
            cur = lower.times_t(&cur);
        }
        IntMatrix::from_columns(lower.rank(), &cols)
    }

    /// Block realization of a Laurent matrix: each entry becomes its
    /// multiplication matrix. Coefficients over `Z/m` are taken as their
    /// representatives in `[0, m)`.
    pub fn realize(&self, m: &LaurentMatrix) -> Result<IntMatrix> {
        let r = self.rank();
        let mut out = IntMatrix::zeros(m.rows() * r, m.cols() * r);
        let mut cache: HashMap<&LaurentPoly, IntMatrix> = HashMap::new();
        for (i, j, p) in m.nonzero() {
            if !cache.contains_key(p) {
                let p_int = p.with_ring(CoeffRing::Integers).or_else(|_| int_representative(p))?;
                cache.insert(p, self.mult_matrix(&p_int)?);
            }
            let block = &cache[p];
            for a in 0..r {
                for b in 0..r {
                    let x = block.get(a, b);
                    if !x.is_zero() {
                        out.set(i * r + a, j * r + b, x.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Coordinates of a vector of Laurent polynomials.
    pub fn realize_vector(&self, v: &[LaurentPoly]) -> Result<Vec<BigInt>> {
        let mut out = Vec::with_capacity(v.len() * self.rank());
        for p in v {
            let p_int = p.with_ring(CoeffRing::Integers).or_else(|_| int_representative(p))?;
            out.extend(self.element(&p_int)?);
        }
        Ok(out)
    }
}

fn int_representative(p: &LaurentPoly) -> Result<LaurentPoly> {
    match p.ring() {
        CoeffRing::IntegersMod(_) => {
            let terms: Vec<(i64, num_rational::BigRational)> = p.terms().map(|(e, c)| (e, c.clone())).collect();
            LaurentPoly::from_terms(CoeffRing::Integers, terms)
        }
        r => Err(Error::NotInRing(p.to_string(), r)),
    }
}

/// Integer realization of a complex over `A = Z[T]/((T^N - 1)^power)`.
#[derive(Clone, Debug)]
pub struct TruncatedRealization {
    pub ring: TruncatedRing,
    pub d1: IntMatrix,
    pub d3: IntMatrix,
    /// `Z/m` coefficients are realized by appending `m e_i` as relations.
    pub modulus: Option<BigInt>,
}

impl TruncatedRealization {
    pub fn ring_rank(&self) -> usize {
        self.ring.rank()
    }

    pub fn differential(&self) -> IntMatrix {
        self.d1.add(&self.d3)
    }
}

pub fn truncated_realization(cx: &ChainComplex, power: u32) -> Result<TruncatedRealization> {
    if power == 0 {
        return Err(Error::InvalidSpec("truncation power must be positive".into()));
    }
    let ring = TruncatedRing::new(cx.n_value(), power);
    Ok(TruncatedRealization {
        d1: ring.realize(cx.d1())?,
        d3: ring.realize(cx.d3())?,
        modulus: cx.ring().modulus().map(BigInt::from),
        ring,
    })
}
