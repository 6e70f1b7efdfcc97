use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cokernel_type, kernel_basis, smith_normal_form, AbelianGroupType, IntMatrix, Lattice};
use crate::ring::{CoeffRing, LaurentPoly};

/// Which operator a polynomial is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variable {
    T,
    U,
}

/// Integer data of a subquotient `Z'/B` of `Z^n` before reduction.
///
/// `cycles` spans `Z'`, `boundaries` spans `B`, and `t_action`,
/// `t_inverse` (and `perturbation`, when present) are ambient matrices that
/// preserve both lattices.
#[derive(Clone, Debug)]
pub struct RawPresentation {
    pub ring: CoeffRing,
    pub n_value: u64,
    pub b1: usize,
    pub power: u32,
    pub cycles: IntMatrix,
    pub boundaries: IntMatrix,
    pub t_action: IntMatrix,
    pub t_inverse: IntMatrix,
    pub perturbation: Option<IntMatrix>,
    /// Morse index of each ambient block of `block_size` coordinates.
    pub block_morse: Vec<usize>,
    pub block_size: usize,
    /// Applied to ambient vectors supplied by callers before they are
    /// located in the cycle lattice (a change of chain basis).
    pub input_map: Option<IntMatrix>,
    pub label: String,
}

#[derive(Clone, Debug)]
struct Embedding {
    cycles: Lattice,
    p: IntMatrix,
    kept: Vec<usize>,
    block_morse: Vec<usize>,
    block_size: usize,
    input_map: Option<IntMatrix>,
}

/// A finitely generated module `Z/d_1 + ... + Z/d_t + Z^f` (or a `Q`-vector
/// space) with automorphisms `T` and `U`.
///
/// Coordinates are the reduced Smith coordinates of a subquotient
/// presentation; coordinate `i` is taken modulo `moduli[i]` (`0` for a free
/// coordinate).
#[derive(Clone, Debug)]
pub struct PresentedUModule {
    ring: CoeffRing,
    n_value: u64,
    b1: usize,
    power: u32,
    moduli: Vec<BigInt>,
    t: IntMatrix,
    t_inv: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    perturbed: bool,
    label: String,
    embedding: Option<Embedding>,
}

/// A homology class, stored in reduced coordinates. Over `Q` the class is
/// `coords / den`; elsewhere `den = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HClass {
    coords: Vec<BigInt>,
    den: BigInt,
}

impl HClass {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl fmt::Display for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        if self.den.is_one() {
            write!(f, "({})", c.join(", "))
        } else {
            write!(f, "({})/{}", c.join(", "), self.den)
        }
    }
}

impl Serialize for HClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Isomorphism invariants used to compare modules computed at different
/// truncation powers or by different engines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleInvariants {
    pub group: AbelianGroupType,
    /// Group type of `(T^N - 1)^j H` for `j = 1, 2, ...` until it vanishes.
    pub filtration_images: Vec<AbelianGroupType>,
    /// Smallest `j` with `(U^N - 1)^j = 0`, when found within the bound.
    pub u_nilpotency: Option<u32>,
}

fn reduce_entry(x: &mut BigInt, d: &BigInt) {
    if !d.is_zero() {
        *x = x.mod_floor(d);
    }
}

impl PresentedUModule {
    /// Reduces a subquotient presentation to Smith coordinates.
    pub fn from_presentation(raw: &RawPresentation) -> Result<Self> {
        let n = raw.cycles.rows();
        if raw.boundaries.rows() != n || raw.t_action.rows() != n || raw.t_inverse.rows() != n {
            return Err(Error::Dimension("presentation matrices disagree on the ambient rank".into()));
        }
        let cycles = Lattice::from_generators(&raw.cycles);
        let r = cycles.rank();
        let coords_of = |v: &[BigInt], what: &str| {
            cycles.coordinates(v).ok_or_else(|| Error::Internal(format!("{what} does not lie in the cycle lattice")))
        };
        let in_cycle_coords = |m: &IntMatrix, what: &str| -> Result<IntMatrix> {
            let cols: Vec<Vec<BigInt>> = (0..m.cols()).map(|j| coords_of(&m.column(j), what)).collect::<Result<_>>()?;
            Ok(IntMatrix::from_columns(r, &cols))
        };
        let basis = cycles.basis_matrix();
        let rel = in_cycle_coords(&raw.boundaries, "a boundary")?;
        let tz = in_cycle_coords(&raw.t_action.mul(&basis), "the T-image of a cycle")?;
        let tz_inv = in_cycle_coords(&raw.t_inverse.mul(&basis), "the T^-1-image of a cycle")?;
        let pz = match &raw.perturbation {
            Some(p) => Some(in_cycle_coords(&p.mul(&basis), "the P-image of a cycle")?),
            None => None,
        };

        let snf = smith_normal_form(&rel);
        let diag = snf.diagonal();
        let d_at = |i: usize| diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        let kept: Vec<usize> = (0..r)
            .filter(|&i| {
                let d = d_at(i);
                match raw.ring {
                    CoeffRing::Rationals => d.is_zero(),
                    _ => !d.is_one(),
                }
            })
            .collect();
        let moduli: Vec<BigInt> = kept.iter().map(|&i| d_at(i)).collect();
        if raw.ring.is_finite() && moduli.iter().any(|d| d.is_zero()) {
            return Err(Error::Internal("finite-ring presentation has a free coordinate".into()));
        }
        let conj = |a: &IntMatrix| -> IntMatrix {
            let full = snf.p.mul(a).mul(&snf.p_inv);
            let mut m = full.select_rows(&kept).select_cols(&kept);
            for (i, d) in moduli.iter().enumerate() {
                for j in 0..m.cols() {
                    let mut x = m.get(i, j).clone();
                    reduce_entry(&mut x, d);
                    m.set(i, j, x);
                }
            }
            m
        };
        let t = conj(&tz);
        let t_inv = conj(&tz_inv);
        let ph = pz.map(|pz| conj(&pz));
        let mut module = PresentedUModule {
            ring: raw.ring,
            n_value: raw.n_value,
            b1: raw.b1,
            power: raw.power,
            u: t_inv.clone(),
            u_inv: t.clone(),
            t,
            t_inv,
            moduli,
            perturbed: false,
            label: raw.label.clone(),
            embedding: Some(Embedding {
                cycles,
                p: snf.p.clone(),
                kept,
                block_morse: raw.block_morse.clone(),
                block_size: raw.block_size,
                input_map: raw.input_map.clone(),
            }),
        };
        if !module.mat_mul(&module.t, &module.t_inv).eq_mod(&IntMatrix::identity(module.rank()), &module.moduli) {
            return Err(Error::Internal("T and its inverse do not descend to inverse maps".into()));
        }
        if let Some(ph) = ph {
            module.install_u(&ph)?;
        }
        Ok(module)
    }

    /// Sets `U = T^-1 + P` where `P` is given in reduced coordinates.
    fn install_u(&mut self, ph: &IntMatrix) -> Result<()> {
        let k = self.rank();
        let u = self.reduce_matrix(&self.t_inv.add(ph));
        // U = T^-1 (1 + T P), and T P is nilpotent, so U^-1 = sum (-T P)^j T.
        let tp = self.mat_mul(&self.t, ph);
        let neg_tp = self.reduce_matrix(&tp.scale(&BigInt::from(-1)));
        let mut term = IntMatrix::identity(k);
        let mut series = IntMatrix::zeros(k, k);
        let mut steps = 0;
        while !self.is_zero_matrix(&term) {
            series = self.reduce_matrix(&series.add(&term));
            term = self.mat_mul(&term, &neg_tp);
            steps += 1;
            if steps > self.b1 + 3 {
                return Err(Error::InvalidPerturbation("T P is not nilpotent on homology".into()));
            }
        }
        let u_inv = self.mat_mul(&series, &self.t);
        if !self.mat_mul(&u, &u_inv).eq_mod(&IntMatrix::identity(k), &self.moduli) {
            return Err(Error::Internal("U does not invert on homology".into()));
        }
        self.u = u;
        self.u_inv = u_inv;
        self.perturbed = !self.is_zero_matrix(ph);
        Ok(())
    }

    /// Cokernel of a Laurent matrix over `A = R[T]/((T^N - 1)^power)`, with
    /// `U = T^-1`. Coordinates of the target are the rows.
    pub fn cokernel(
        matrix: &crate::complex::LaurentMatrix,
        n_value: u64,
        b1: usize,
        power: u32,
        ring: CoeffRing,
    ) -> Result<Self> {
        let a = crate::complex::TruncatedRing::new(n_value, power);
        let rows = matrix.rows() * a.rank();
        let mut boundaries = a.realize(matrix)?;
        if let Some(m) = ring.modulus() {
            boundaries = boundaries.hcat(&IntMatrix::identity(rows).scale(&BigInt::from(m)));
        }
        let blocks = vec![a.t_matrix(); matrix.rows()];
        let t_inv = a.mult_matrix(&LaurentPoly::monomial(CoeffRing::Integers, 1, -1))?;
        let raw = RawPresentation {
            ring,
            n_value,
            b1,
            power,
            cycles: IntMatrix::identity(rows),
            boundaries,
            t_action: IntMatrix::block_diag(&blocks),
            t_inverse: IntMatrix::block_diag(&vec![t_inv; matrix.rows()]),
            perturbation: None,
            block_morse: vec![0; matrix.rows()],
            block_size: a.rank(),
            input_map: None,
            label: "cokernel".into(),
        };
        Self::from_presentation(&raw)
    }

    /// Direct sum; both modules must share ring, `N` and `b1`.
    pub fn direct_sum(&self, other: &PresentedUModule, label: &str) -> Result<Self> {
        if self.ring != other.ring || self.n_value != other.n_value {
            return Err(Error::Dimension("direct sum of incompatible modules".into()));
        }
        let bd = |a: &IntMatrix, b: &IntMatrix| IntMatrix::block_diag(&[a.clone(), b.clone()]);
        let mut moduli = self.moduli.clone();
        moduli.extend(other.moduli.iter().cloned());
        Ok(PresentedUModule {
            ring: self.ring,
            n_value: self.n_value,
            b1: self.b1,
            power: self.power.min(other.power),
            moduli,
            t: bd(&self.t, &other.t),
            t_inv: bd(&self.t_inv, &other.t_inv),
            u: bd(&self.u, &other.u),
            u_inv: bd(&self.u_inv, &other.u_inv),
            perturbed: self.perturbed || other.perturbed,
            label: label.to_string(),
            embedding: None,
        })
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn n_value(&self) -> u64 {
        self.n_value
    }

    pub fn b1(&self) -> usize {
        self.b1
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbed
    }

    /// Number of reduced coordinates.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn is_zero_module(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.ring != CoeffRing::Rationals && self.moduli.iter().all(|d| !d.is_zero())
    }

    /// Number of elements, when finite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.moduli.iter().product())
    }

    pub fn t_matrix(&self) -> &IntMatrix {
        &self.t
    }

    pub fn t_inverse_matrix(&self) -> &IntMatrix {
        &self.t_inv
    }

    pub fn u_matrix(&self) -> &IntMatrix {
        &self.u
    }

    pub fn u_inverse_matrix(&self) -> &IntMatrix {
        &self.u_inv
    }

    pub fn operator(&self, v: Variable) -> &IntMatrix {
        match v {
            Variable::T => &self.t,
            Variable::U => &self.u,
        }
    }

    pub fn inverse_operator(&self, v: Variable) -> &IntMatrix {
        match v {
            Variable::T => &self.t_inv,
            Variable::U => &self.u_inv,
        }
    }

    /// Diagonal relation matrix: the class of `x` vanishes iff `x` lies in
    /// its column lattice (over `Q`, iff `x = 0`).
    pub fn relations(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.moduli)
    }

    /// As an abelian group (over `Q`, the free rank is the dimension).
    pub fn group_type(&self) -> AbelianGroupType {
        AbelianGroupType::from_diagonal(&self.moduli, 0)
    }

    pub fn zero(&self) -> HClass {
        HClass { coords: vec![BigInt::zero(); self.rank()], den: BigInt::one() }
    }

    /// The class of the `i`-th reduced coordinate vector.
    pub fn generator(&self, i: usize) -> HClass {
        let mut c = self.zero();
        c.coords[i] = BigInt::one();
        self.normalize(c)
    }

    pub fn generators(&self) -> Vec<HClass> {
        (0..self.rank()).map(|i| self.generator(i)).collect()
    }

    pub fn class_from_coords(&self, coords: Vec<BigInt>) -> Result<HClass> {
        if coords.len() != self.rank() {
            return Err(Error::Dimension(format!("{} coordinates for a module of rank {}", coords.len(), self.rank())));
        }
        Ok(self.normalize(HClass { coords, den: BigInt::one() }))
    }

    /// Class of an ambient vector of the presentation (a cycle).
    pub fn class_of_vector(&self, v: &[BigInt]) -> Result<HClass> {
        let emb =
            self.embedding.as_ref().ok_or_else(|| Error::Dimension("module has no ambient presentation".into()))?;
        if v.len() != emb.cycles.ambient_dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} for an ambient of rank {}",
                v.len(),
                emb.cycles.ambient_dim()
            )));
        }
        let mapped;
        let v = match &emb.input_map {
            Some(m) => {
                mapped = m.mul_vec(v);
                &mapped[..]
            }
            None => v,
        };
        let c = emb.cycles.coordinates(v).ok_or_else(|| Error::Dimension("vector is not a cycle".into()))?;
        let y = emb.p.mul_vec(&c);
        let coords = emb.kept.iter().map(|&i| y[i].clone()).collect();
        self.class_from_coords(coords)
    }

    /// Class of a vector of Laurent polynomials, one per ambient block.
    pub fn class_of(&self, v: &[LaurentPoly]) -> Result<HClass> {
        let a = crate::complex::TruncatedRing::new(self.n_value, self.power);
        self.class_of_vector(&a.realize_vector(v)?)
    }

    /// Morse index of each ambient block, when the module has a chain-level
    /// presentation.
    pub fn block_morse(&self) -> Option<(&[usize], usize)> {
        self.embedding.as_ref().map(|e| (e.block_morse.as_slice(), e.block_size))
    }

    /// Echelon basis of the cycle lattice in ambient coordinates.
    pub fn cycle_basis(&self) -> Option<&[Vec<BigInt>]> {
        self.embedding.as_ref().map(|e| e.cycles.basis())
    }

    fn normalize(&self, mut x: HClass) -> HClass {
        if self.ring == CoeffRing::Rationals {
            let g = x.coords.iter().fold(x.den.clone(), |g, c| g.gcd(c));
            if !g.is_zero() && !g.is_one() {
                for c in x.coords.iter_mut() {
                    *c = &*c / &g;
                }
                x.den = &x.den / &g;
            }
            if x.coords.iter().all(|c| c.is_zero()) {
                x.den = BigInt::one();
            }
        } else {
            for (c, d) in x.coords.iter_mut().zip(&self.moduli) {
                reduce_entry(c, d);
            }
        }
        x
    }

    fn check(&self, x: &HClass) -> Result<()> {
        if x.coords.len() != self.rank() {
            return Err(Error::Dimension(format!("class of length {} in a module of rank {}", x.len(), self.rank())));
        }
        Ok(())
    }

    pub fn is_zero(&self, x: &HClass) -> Result<bool> {
        self.check(x)?;
        Ok(x.coords.iter().zip(&self.moduli).all(|(c, d)| if d.is_zero() { c.is_zero() } else { (c % d).is_zero() }))
    }

    /// `x == y` in the module, i.e. `x - y` lies in the relation lattice.
    pub fn class_equal(&self, x: &HClass, y: &HClass) -> Result<bool> {
        let diff = self.sub(x, y)?;
        self.is_zero(&diff)
    }

    pub fn add(&self, x: &HClass, y: &HClass) -> Result<HClass> {
        self.check(x)?;
        self.check(y)?;
        let den = x.den.lcm(&y.den);
        let (fx, fy) = (&den / &x.den, &den / &y.den);
        let coords = x.coords.iter().zip(&y.coords).map(|(a, b)| a * &fx + b * &fy).collect();
        Ok(self.normalize(HClass { coords, den }))
    }

    pub fn sub(&self, x: &HClass, y: &HClass) -> Result<HClass> {
        self.add(x, &self.scale(y, &BigInt::from(-1)))
    }

    pub fn scale(&self, x: &HClass, c: &BigInt) -> HClass {
        self.normalize(HClass { coords: x.coords.iter().map(|a| a * c).collect(), den: x.den.clone() })
    }

    /// Applies an integer matrix in reduced coordinates.
    pub fn apply_matrix(&self, a: &IntMatrix, x: &HClass) -> Result<HClass> {
        self.check(x)?;
        Ok(self.normalize(HClass { coords: a.mul_vec(&x.coords), den: x.den.clone() }))
    }

    /// `p(T) x` or `p(U) x`.
    pub fn apply_poly(&self, p: &LaurentPoly, var: Variable, x: &HClass) -> Result<HClass> {
        self.check(x)?;
        if p.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, p.ring()));
        }
        if p.is_zero() {
            return Ok(self.zero());
        }
        let den = p.terms().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
        let lo = p.min_exp().expect("nonzero");
        let hi = p.max_exp().expect("nonzero");
        let step = self.operator(var);
        let mut cur = x.coords.clone();
        let back = self.inverse_operator(var);
        if lo < 0 {
            for _ in 0..-lo {
                cur = self.reduce_vec(back.mul_vec(&cur));
            }
        } else {
            for _ in 0..lo {
                cur = self.reduce_vec(step.mul_vec(&cur));
            }
        }
        let mut acc = vec![BigInt::zero(); self.rank()];
        for e in lo..=hi {
            let c: BigRational = p.coeff(e);
            if !c.is_zero() {
                let ci = (c * BigRational::from_integer(den.clone())).to_integer();
                for (a, v) in acc.iter_mut().zip(&cur) {
                    *a += &ci * v;
                }
            }
            if e < hi {
                cur = self.reduce_vec(step.mul_vec(&cur));
            }
        }
        Ok(self.normalize(HClass { coords: acc, den: &x.den * den }))
    }

    pub(crate) fn reduce_vec(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (c, d) in v.iter_mut().zip(&self.moduli) {
            reduce_entry(c, d);
        }
        v
    }

    pub(crate) fn reduce_matrix(&self, a: &IntMatrix) -> IntMatrix {
        let mut m = a.clone();
        for (i, d) in self.moduli.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            for j in 0..m.cols() {
                let mut x = m.get(i, j).clone();
                reduce_entry(&mut x, d);
                m.set(i, j, x);
            }
        }
        m
    }

    /// Product of two endomorphisms, rows reduced by the moduli.
    pub(crate) fn mat_mul(&self, a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        self.reduce_matrix(&a.mul(b))
    }

    pub(crate) fn mat_pow(&self, a: &IntMatrix, k: &BigInt) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.rank());
        let mut base = a.clone();
        let bits = k.to_str_radix(2);
        for (idx, bit) in bits.chars().rev().enumerate() {
            if bit == '1' {
                acc = self.mat_mul(&acc, &base);
            }
            if idx + 1 < bits.len() {
                base = self.mat_mul(&base, &base);
            }
        }
        acc
    }

    pub(crate) fn is_zero_matrix(&self, a: &IntMatrix) -> bool {
        a.eq_mod(&IntMatrix::zeros(a.rows(), a.cols()), &self.moduli)
    }

    /// `(V^N - 1)` as a matrix, for `V = T` or `U`.
    pub fn period_operator(&self, var: Variable) -> IntMatrix {
        let op = self.mat_pow(self.operator(var), &BigInt::from(self.n_value));
        self.reduce_matrix(&op.sub(&IntMatrix::identity(self.rank())))
    }

    /// Smallest `j <= limit` with `(V^N - 1)^j = 0`.
    pub fn nilpotency(&self, var: Variable, limit: u32) -> Option<u32> {
        let g = self.period_operator(var);
        let mut acc = IntMatrix::identity(self.rank());
        for j in 0..=limit {
            if self.is_zero_matrix(&acc) {
                return Some(j);
            }
            acc = self.mat_mul(&acc, &g);
        }
        None
    }

    /// Type of the submodule generated by the columns of `gens` (reduced
    /// coordinates).
    pub fn span_type(&self, gens: &IntMatrix) -> AbelianGroupType {
        let k = self.rank();
        let rel = self.relations();
        let lattice = Lattice::from_generators(&gens.hcat(&rel));
        let basis = lattice.basis_matrix();
        let cols: Vec<Vec<BigInt>> =
            (0..k).map(|j| lattice.coordinates(&rel.column(j)).expect("relations lie in the span")).collect();
        let rel_in = IntMatrix::from_columns(basis.cols(), &cols);
        let t = cokernel_type(&rel_in);
        if self.ring == CoeffRing::Rationals {
            AbelianGroupType { free_rank: t.free_rank, torsion_invariants: Vec::new() }
        } else {
            t
        }
    }

    /// Type of the kernel of an endomorphism given in reduced coordinates.
    pub fn kernel_type(&self, a: &IntMatrix) -> AbelianGroupType {
        let k = self.rank();
        // x in ker iff a x lies in the relation lattice: kernel of [a | D].
        let ext = a.hcat(&self.relations());
        let ker = kernel_basis(&ext);
        let rows: Vec<usize> = (0..k).collect();
        self.span_type(&ker.select_rows(&rows))
    }

    pub fn invariants(&self, limit: u32) -> ModuleInvariants {
        let g = self.period_operator(Variable::T);
        let mut images = Vec::new();
        let mut acc = g.clone();
        for _ in 0..=limit {
            let t = self.span_type(&acc);
            let done = t.is_trivial();
            images.push(t);
            if done {
                break;
            }
            acc = self.mat_mul(&acc, &g);
        }
        ModuleInvariants {
            group: self.group_type(),
            filtration_images: images,
            u_nilpotency: self.nilpotency(Variable::U, limit),
        }
    }
}

impl IntMatrix {
    /// Entrywise equality with row `i` compared modulo `moduli[i]` (`0`
    /// meaning exact).
    pub fn eq_mod(&self, other: &IntMatrix, moduli: &[BigInt]) -> bool {
        if (self.rows(), self.cols()) != (other.rows(), other.cols()) {
            return false;
        }
        (0..self.rows()).all(|i| {
            let d = &moduli[i];
            (0..self.cols()).all(|j| {
                let diff = self.get(i, j) - other.get(i, j);
                if d.is_zero() {
                    diff.is_zero()
                } else {
                    (diff % d).is_zero()
                }
            })
        })
    }
}
