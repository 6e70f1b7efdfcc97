use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::presentation::{HClass, PresentedUModule, Variable};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, IntMatrix, Lattice};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Cyclic {
        #[serde(serialize_with = "ser_big")]
        k_min: BigInt,
    },
    NonCyclic,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Outcome of the cyclicity decision for one class.
///
/// `exponent = N * s * e` is the only period that needs testing: `e` is the
/// exponent of the torsion subgroup of `Z[U] x` and `s` the order of `U` on
/// it. When the verdict is `NonCyclic`, `witness` is `(U^exponent - 1) x`,
/// which is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicityReport {
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_big")]
    pub exponent: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub s: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub e: BigInt,
    pub n_value: u64,
    pub operator: String,
    pub witness: Option<HClass>,
    pub trail: Vec<String>,
}

impl CyclicityReport {
    pub fn is_cyclic(&self) -> bool {
        matches!(self.verdict, Verdict::Cyclic { .. })
    }

    pub fn k_min(&self) -> Option<&BigInt> {
        match &self.verdict {
            Verdict::Cyclic { k_min } => Some(k_min),
            Verdict::NonCyclic => None,
        }
    }
}

/// Operator label for reports. The identification `U = T^-1` is exact for
/// `b1 <= 3` and an associated-graded model beyond that.
pub fn operator_label(m: &PresentedUModule) -> String {
    let base = if m.is_perturbed() { "U = T^-1 + P" } else { "U = T^-1" };
    if m.b1() > 3 {
        format!("model {base} (associated-graded approximation)")
    } else {
        base.to_string()
    }
}

/// Divisors of `k` in increasing order.
pub fn divisors(k: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *k {
        if (k % &d).is_zero() {
            let q = k / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn prime_factors(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut a = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            a += 1;
        }
        if a > 0 {
            out.push((p.clone(), a));
        }
        p += 1;
    }
    if m > BigInt::one() {
        out.push((m, 1));
    }
    out
}

fn ceil_log(q: &BigInt, p: u32) -> u32 {
    let mut c = 0;
    let mut acc = BigInt::one();
    while acc < BigInt::from(p) {
        acc *= q;
        c += 1;
    }
    c
}

/// `(V^k - 1) x` for the module operator `V`.
fn power_minus_one(m: &PresentedUModule, var: Variable, k: &BigInt, x: &HClass) -> Result<HClass> {
    let vk = m.mat_pow(m.operator(var), k);
    let y = m.apply_matrix(&vk, x)?;
    m.sub(&y, x)
}

/// Decides whether `U^k x = x` for some `k >= 1`, and finds the least such
/// `k`.
pub fn is_u_cyclic(m: &PresentedUModule, x: &HClass) -> Result<CyclicityReport> {
    is_cyclic_for(m, x, Variable::U)
}

pub fn is_cyclic_for(m: &PresentedUModule, x: &HClass, var: Variable) -> Result<CyclicityReport> {
    let n = BigInt::from(m.n_value());
    let mut trail = Vec::new();
    let label = match var {
        Variable::U => operator_label(m),
        Variable::T => "T".to_string(),
    };
    if m.is_zero(x)? {
        return Ok(CyclicityReport {
            verdict: Verdict::Cyclic { k_min: BigInt::one() },
            exponent: BigInt::one(),
            s: BigInt::one(),
            e: BigInt::one(),
            n_value: m.n_value(),
            operator: label,
            witness: None,
            trail: vec!["x = 0 is fixed".into()],
        });
    }
    let (s, e) = torsion_period(m, x, var, &mut trail)?;
    let exponent = &n * &s * &e;
    trail.push(format!("tested exponent K = N*s*e = {n}*{s}*{e} = {exponent}"));
    let w = power_minus_one(m, var, &exponent, x)?;
    if !m.is_zero(&w)? {
        trail.push(format!("(V^K - 1) x = {w} is nonzero"));
        return Ok(CyclicityReport {
            verdict: Verdict::NonCyclic,
            exponent,
            s,
            e,
            n_value: m.n_value(),
            operator: label,
            witness: Some(w),
            trail,
        });
    }
    for k in divisors(&exponent) {
        if m.is_zero(&power_minus_one(m, var, &k, x)?)? {
            trail.push(format!("least divisor of K fixing x: {k}"));
            return Ok(CyclicityReport {
                verdict: Verdict::Cyclic { k_min: k },
                exponent,
                s,
                e,
                n_value: m.n_value(),
                operator: label,
                witness: None,
                trail,
            });
        }
    }
    Err(Error::Internal("K fixes x but none of its divisors does".into()))
}

/// Exponent `e` of the torsion subgroup of `Z[V] x` and the order `s` of
/// `V` on it.
fn torsion_period(
    m: &PresentedUModule,
    x: &HClass,
    var: Variable,
    trail: &mut Vec<String>,
) -> Result<(BigInt, BigInt)> {
    let k = m.rank();
    let moduli = m.moduli();
    if m.ring() == crate::ring::CoeffRing::Rationals || moduli.iter().all(|d| d.is_zero()) {
        trail.push("no torsion: s = e = 1".into());
        return Ok((BigInt::one(), BigInt::one()));
    }
    // Z[V] x is spanned by x, Vx, ..., V^(k-1) x (Cayley-Hamilton).
    let op = m.operator(var);
    let mut cols = Vec::with_capacity(2 * k);
    let mut cur = x.coords().to_vec();
    for _ in 0..k {
        cols.push(cur.clone());
        cur = m.reduce_vec(op.mul_vec(&cur));
    }
    for (i, d) in moduli.iter().enumerate() {
        if !d.is_zero() {
            let mut c = vec![BigInt::zero(); k];
            c[i] = d.clone();
            cols.push(c);
        }
    }
    let g = IntMatrix::from_columns(k, &cols);
    let free: Vec<usize> = (0..k).filter(|&i| moduli[i].is_zero()).collect();
    let tor_gens = if free.is_empty() { g } else { g.mul(&kernel_basis(&g.select_rows(&free))) };
    let tor = Lattice::from_generators(&tor_gens);
    let mut e = BigInt::one();
    for v in tor.basis() {
        for (c, d) in v.iter().zip(moduli) {
            if !d.is_zero() {
                e = e.lcm(&(d / c.gcd(d)));
            }
        }
    }
    if e.is_one() {
        trail.push("torsion of Z[U]x is trivial: s = e = 1".into());
        return Ok((BigInt::one(), BigInt::one()));
    }
    let nil = m
        .nilpotency(var, m.b1() as u32 + 2)
        .ok_or_else(|| Error::Hypothesis(format!("(V^N - 1)^{} does not vanish", m.b1() + 2)))?;
    let mut bound = BigInt::from(m.n_value());
    for (q, a) in prime_factors(&e) {
        bound *= q.pow(a + ceil_log(&q, nil.max(1)));
    }
    let gens: Vec<HClass> = tor.basis().iter().map(|v| m.class_from_coords(v.clone())).collect::<Result<_>>()?;
    for d in divisors(&bound) {
        let vd = m.mat_pow(op, &d);
        let mut fixed = true;
        for g in &gens {
            let y = m.apply_matrix(&vd, g)?;
            if !m.class_equal(&y, g)? {
                fixed = false;
                break;
            }
        }
        if fixed {
            trail.push(format!(
                "torsion of Z[U]x: exponent e = {e}, order of U on it s = {d} (searched divisors of {bound})"
            ));
            return Ok((d, e));
        }
    }
    Err(Error::Internal(format!("order of U on the torsion exceeds the bound {bound}")))
}

/// A nonzero class fixed by `U^N`, with the steps that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct CyclicWitness {
    pub start: HClass,
    pub class: HClass,
    /// `class = (U^N - 1)^steps start`.
    pub steps: u32,
    pub trail: Vec<String>,
}

/// Starting from the first nonzero generator, applies `U^N - 1` until the
/// next application would give zero.
pub fn find_u_cyclic_class(m: &PresentedUModule) -> Result<CyclicWitness> {
    let start = m.generators().into_iter().find(|g| !m.is_zero(g).unwrap_or(true)).ok_or(Error::ZeroModule)?;
    find_u_cyclic_class_from(m, &start)
}

pub fn find_u_cyclic_class_from(m: &PresentedUModule, start: &HClass) -> Result<CyclicWitness> {
    if m.is_zero(start)? {
        return Err(Error::ZeroModule);
    }
    let g = m.period_operator(Variable::U);
    let mut cur = start.clone();
    let mut trail = vec![format!("start with {start}")];
    let limit = m.b1() as u32 + 2;
    for j in 0..=limit {
        let next = m.apply_matrix(&g, &cur)?;
        if m.is_zero(&next)? {
            trail.push(format!("(U^N - 1) applied {j} times gives {cur}, fixed by U^N"));
            return Ok(CyclicWitness { start: start.clone(), class: cur, steps: j, trail });
        }
        trail.push(format!("(U^N - 1) {cur} = {next} is nonzero"));
        cur = next;
    }
    Err(Error::Hypothesis(format!("(U^N - 1)^{} does not annihilate the start class", limit + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn small(k: &BigInt) -> Option<u64> {
        k.to_u64()
    }

    #[test]
    fn divisor_lists() {
        let d: Vec<u64> = divisors(&BigInt::from(12)).iter().map(|x| small(x).unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(&BigInt::from(1)), vec![BigInt::one()]);
        assert_eq!(prime_factors(&BigInt::from(360)), vec![(2.into(), 3), (3.into(), 2), (5.into(), 1)]);
        assert_eq!(ceil_log(&BigInt::from(2), 4), 2);
        assert_eq!(ceil_log(&BigInt::from(2), 5), 3);
        assert_eq!(ceil_log(&BigInt::from(3), 1), 0);
    }

    use crate::ring::{CoeffRing, LaurentPoly};
    use crate::umodule::{cokernel_module, sigma_class};

    /// Least `k <= limit` with `U^k x = x`, by stepping through the orbit.
    fn orbit_period(m: &PresentedUModule, x: &HClass, limit: u64) -> Option<u64> {
        let mut cur = x.clone();
        for k in 1..=limit {
            cur = m.apply_matrix(m.u_matrix(), &cur).unwrap();
            if m.class_equal(&cur, x).unwrap() {
                return Some(k);
            }
        }
        None
    }

    #[test]
    fn sigma_classes_are_not_cyclic() {
        let m = cokernel_module(2, 1, CoeffRing::Integers).unwrap();
        for i in 1..=3 {
            let s = sigma_class(&m, i).unwrap();
            let r = is_u_cyclic(&m, &s).unwrap();
            assert!(!r.is_cyclic());
            assert!(!m.is_zero(r.witness.as_ref().unwrap()).unwrap());
            assert_eq!(orbit_period(&m, &s, 60), None);
        }
    }

    #[test]
    fn e2_class_has_period_two() {
        let ring = CoeffRing::Integers;
        let m = cokernel_module(2, 1, ring).unwrap();
        let z = LaurentPoly::zero(ring);
        let e2 = m.class_of(&[z.clone(), LaurentPoly::one(ring), z.clone(), z]).unwrap();
        let r = is_u_cyclic(&m, &e2).unwrap();
        assert_eq!(r.k_min(), Some(&BigInt::from(2)));
        assert_eq!(orbit_period(&m, &e2, 60), Some(2));
    }

    #[test]
    fn zero_is_fixed() {
        let m = cokernel_module(3, 2, CoeffRing::Integers).unwrap();
        let r = is_u_cyclic(&m, &m.zero()).unwrap();
        assert_eq!(r.k_min(), Some(&BigInt::one()));
    }

    #[test]
    fn finite_rings_agree_with_orbits() {
        for (n, mm, ring) in
            [(1, 1, CoeffRing::IntegersMod(2)), (2, 1, CoeffRing::IntegersMod(3)), (2, 3, CoeffRing::IntegersMod(4))]
        {
            let m = cokernel_module(n, mm, ring).unwrap();
            for i in 0..4 {
                let s = sigma_class(&m, i).unwrap();
                let r = is_u_cyclic(&m, &s).unwrap();
                let k = orbit_period(&m, &s, 10_000).expect("finite module");
                assert_eq!(small(r.k_min().expect("finite rings are cyclic")), Some(k));
            }
        }
    }

    #[test]
    fn witness_search_stops_on_a_fixed_class() {
        let m = cokernel_module(2, 1, CoeffRing::Integers).unwrap();
        let s1 = sigma_class(&m, 1).unwrap();
        let w = find_u_cyclic_class_from(&m, &s1).unwrap();
        assert_eq!(w.steps, 1);
        let g = m.period_operator(Variable::U);
        assert!(m.is_zero(&m.apply_matrix(&g, &w.class).unwrap()).unwrap());
        assert!(!m.is_zero(&w.class).unwrap());
        // (T^2 - 1) sigma_1 = class of (T, 0, 0, 0).
        let ring = CoeffRing::Integers;
        let z = LaurentPoly::zero(ring);
        let te1 = m.class_of(&[LaurentPoly::t(ring), z.clone(), z.clone(), z]).unwrap();
        let t_side = m.apply_poly(&LaurentPoly::t_pow_minus_one(ring, 2), Variable::T, &s1).unwrap();
        assert!(m.class_equal(&t_side, &te1).unwrap());
        assert!(find_u_cyclic_class(&m).is_ok());
    }
}
