//! Homology over `k[T, T^-1]` for a field `k`, by Smith normal form with the
//! span of a Laurent polynomial as Euclidean size. Independent of the
//! truncated integer engine and used to cross-check it.

use serde::Serialize;

use super::homology::Part;
use crate::complex::{ChainComplex, LaurentMatrix, Parity};
use crate::error::{Error, Result};
use crate::ring::{CoeffRing, LaurentPoly};

/// A finitely generated `k[T, T^-1]`-module `k[T^±]^free ⊕ ⊕ k[T]/(g_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldModule {
    pub ring: CoeffRing,
    pub free_rank: usize,
    /// Monic, nonconstant, nonzero constant term, `g_i | g_(i+1)`.
    pub torsion: Vec<LaurentPoly>,
}

/// The field the engine works over: `Z` and `Q` map to `Q`, `Z/p` to itself.
pub fn field_of(ring: CoeffRing) -> Result<CoeffRing> {
    match ring {
        CoeffRing::Integers | CoeffRing::Rationals => Ok(CoeffRing::Rationals),
        r if r.is_field() => Ok(r),
        r => Err(Error::NotEuclidean(r)),
    }
}

fn span(p: &LaurentPoly) -> i64 {
    p.span().unwrap_or(i64::MAX)
}

/// Division with remainder in `k[T^±]`: `a = q b + r` with `span(r) < span(b)`.
fn ldiv_rem(a: &LaurentPoly, b: &LaurentPoly) -> Result<(LaurentPoly, LaurentPoly)> {
    let (ka, a0) = a.normalize_unit();
    let (kb, b0) = b.normalize_unit();
    let (q, r) = a0.div_rem(&b0)?;
    Ok((q.shift(ka - kb), r.shift(ka)))
}

/// Monic representative with nonzero constant term.
fn monic(p: &LaurentPoly) -> Result<LaurentPoly> {
    let (_, p0) = p.normalize_unit();
    let lc = p0.leading_coeff().ok_or(Error::ZeroPolynomial)?;
    let inv = p.ring().inverse(lc).ok_or(Error::NotEuclidean(p.ring()))?;
    p0.scale(&inv)
}

/// Nonzero Smith invariants of `m`, monic, in divisibility order. Units are
/// reported as `1`.
pub fn invariant_factors(m: &LaurentMatrix) -> Result<Vec<LaurentPoly>> {
    let k = field_of(m.ring())?;
    let m = m.with_ring(k)?;
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<LaurentPoly>> = (0..rows).map(|i| (0..cols).map(|j| m.get(i, j)).collect()).collect();
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_entry(&a, t, t..rows, t..cols) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let (q, r) = ldiv_rem(&a[i][t], &a[t][t])?;
                for j in t..cols {
                    let v = &a[i][j] - &(&q * &a[t][j]);
                    a[i][j] = v;
                }
                dirty |= !r.is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let (q, r) = ldiv_rem(&a[t][j], &a[t][t])?;
                for row in a.iter_mut().skip(t) {
                    let v = &row[j] - &(&q * &row[t]);
                    row[j] = v;
                }
                dirty |= !r.is_zero();
            }
            if dirty {
                let (pi, pj) = min_cross(&a, t);
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                continue;
            }
            let mut bad = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a[i][j].is_zero() && !ldiv_rem(&a[i][j], &a[t][t])?.1.is_zero() {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = &a[t][j] + &a[i][j];
                        a[t][j] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(monic(&a[t][t])?);
    }
    debug_assert!(diag.windows(2).all(|w| ldiv_rem(&w[1], &w[0]).map(|x| x.1.is_zero()).unwrap_or(false)));
    Ok(diag)
}

fn min_entry(
    a: &[Vec<LaurentPoly>],
    _t: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if !a[i][j].is_zero() && best.is_none_or(|b| span(&a[i][j]) < b.0) {
                best = Some((span(&a[i][j]), i, j));
            }
        }
    }
    best.map(|b| (b.1, b.2))
}

fn min_cross(a: &[Vec<LaurentPoly>], t: usize) -> (usize, usize) {
    let rows = a.len();
    let cols = a[0].len();
    let mut best = (span(&a[t][t]), t, t);
    for i in t..rows {
        if !a[i][t].is_zero() && span(&a[i][t]) < best.0 {
            best = (span(&a[i][t]), i, t);
        }
    }
    for j in t..cols {
        if !a[t][j].is_zero() && span(&a[t][j]) < best.0 {
            best = (span(&a[t][j]), t, j);
        }
    }
    (best.1, best.2)
}

fn rank(m: &LaurentMatrix) -> Result<usize> {
    Ok(invariant_factors(m)?.len())
}

/// `ker(d_out) / im(d_in)` on the generators `mid`.
fn slot_homology(d_out: &LaurentMatrix, d_in: &LaurentMatrix, size: usize) -> Result<FieldModule> {
    let ring = field_of(d_in.ring())?;
    let inv = invariant_factors(d_in)?;
    let free_rank = size - rank(d_out)? - inv.len();
    let torsion = inv.into_iter().filter(|g| span(g) > 0).collect();
    Ok(FieldModule { ring, free_rank, torsion })
}

/// Homology of `(C, d1 + d3)` over the field `k` (from `Z`, `Q`, or `Z/p`).
/// A perturbation, if installed, does not enter: the module structure over
/// `T` is computed.
pub fn field_homology(cx: &ChainComplex, part: Part) -> Result<FieldModule> {
    let d = cx.differential();
    let slot = |p: Parity| {
        let mid = cx.parity_indices(p);
        let other = cx.parity_indices(p.flip());
        slot_homology(&d.select(&other, &mid), &d.select(&mid, &other), mid.len())
    };
    match part {
        Part::Even => slot(Parity::Even),
        Part::Odd => slot(Parity::Odd),
        Part::Total => slot(Parity::Even)?.direct_sum(&slot(Parity::Odd)?),
    }
}

/// Homology of `(C, d1)` in each Morse degree.
pub fn field_e2(cx: &ChainComplex) -> Result<Vec<FieldModule>> {
    let d1 = cx.d1();
    (0..=cx.b1())
        .map(|deg| {
            let mid = cx.degree_indices(deg);
            let below = if deg == 0 { Vec::new() } else { cx.degree_indices(deg - 1) };
            let above = cx.degree_indices(deg + 1);
            slot_homology(&d1.select(&below, &mid), &d1.select(&mid, &above), mid.len())
        })
        .collect()
}

impl FieldModule {
    pub fn direct_sum(&self, other: &FieldModule) -> Result<FieldModule> {
        // Elementary divisors are not needed downstream; keep the list sorted
        // by degree only.
        let mut torsion = self.torsion.clone();
        torsion.extend(other.torsion.iter().cloned());
        torsion.sort_by_key(span);
        Ok(FieldModule { ring: self.ring, free_rank: self.free_rank + other.free_rank, torsion })
    }

    /// Dimension over `k`, `None` when there is a free part.
    pub fn dim(&self) -> Option<u64> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().map(|g| span(g) as u64).sum())
    }

    /// `dim_k ker(p(T))` for a nonzero `p`: the free part contributes nothing.
    pub fn kernel_dim(&self, p: &LaurentPoly) -> Result<u64> {
        let p = p.with_ring(self.ring)?;
        let mut total = 0;
        for g in &self.torsion {
            let (h, _, _) = LaurentPoly::gcd_ext(g, &p)?;
            total += span(&h) as u64;
        }
        Ok(total)
    }

    /// `dim_k (T^n - 1)^j H` for `j = 1, 2, ...` until it vanishes (at most
    /// `limit` terms). `None` when there is a free part.
    pub fn image_dims(&self, n: u64, limit: u32) -> Result<Option<Vec<u64>>> {
        let Some(dim) = self.dim() else { return Ok(None) };
        let base = LaurentPoly::t_pow_minus_one(self.ring, n as i64);
        let mut out = Vec::new();
        for j in 1..=limit.max(1) {
            let im = dim - self.kernel_dim(&base.pow(j))?;
            out.push(im);
            if im == 0 {
                break;
            }
        }
        Ok(Some(out))
    }

    /// Whether `p(T)` acts as zero.
    pub fn annihilated_by(&self, p: &LaurentPoly) -> Result<bool> {
        if self.free_rank > 0 {
            return Ok(false);
        }
        let p = p.with_ring(self.ring)?;
        for g in &self.torsion {
            if !ldiv_rem(&p, g)?.1.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ManifoldSpec;

    fn poly(ring: CoeffRing, terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_int_terms(ring, terms)
    }

    #[test]
    fn diagonal_of_small_matrices() {
        let q = CoeffRing::Rationals;
        let m = LaurentMatrix::from_rows(
            q,
            vec![
                vec![poly(q, &[(0, -1), (1, 1)]), LaurentPoly::zero(q)],
                vec![LaurentPoly::zero(q), poly(q, &[(0, -1), (1, 1)])],
            ],
        )
        .unwrap();
        let d = invariant_factors(&m).unwrap();
        assert_eq!(d, vec![poly(q, &[(0, -1), (1, 1)]); 2]);
        // (T-1) and (T+1) are coprime: diag(1, T^2-1).
        let m = LaurentMatrix::from_rows(
            q,
            vec![
                vec![poly(q, &[(0, -1), (1, 1)]), LaurentPoly::zero(q)],
                vec![LaurentPoly::zero(q), poly(q, &[(0, 1), (1, 1)])],
            ],
        )
        .unwrap();
        let d = invariant_factors(&m).unwrap();
        assert_eq!(d, vec![LaurentPoly::one(q), poly(q, &[(0, -1), (2, 1)])]);
        // A monomial entry is a unit.
        let m = LaurentMatrix::from_rows(q, vec![vec![poly(q, &[(-3, 2)])]]).unwrap();
        assert_eq!(invariant_factors(&m).unwrap(), vec![LaurentPoly::one(q)]);
    }

    #[test]
    fn circle_homology_over_fields() {
        for ring in [CoeffRing::Rationals, CoeffRing::IntegersMod(3)] {
            for n in 1..5 {
                let spec = ManifoldSpec::new(1, vec![n], std::iter::empty(), ring).unwrap();
                let cx = ChainComplex::build(&spec).unwrap();
                let even = field_homology(&cx, Part::Even).unwrap();
                assert_eq!(even.dim(), Some(n as u64));
                assert!(even.annihilated_by(&LaurentPoly::t_pow_minus_one(ring, n)).unwrap());
                assert_eq!(field_homology(&cx, Part::Odd).unwrap().dim(), Some(0));
            }
        }
    }

    #[test]
    fn composite_modulus_is_rejected() {
        let spec = ManifoldSpec::new(1, vec![2], std::iter::empty(), CoeffRing::IntegersMod(6)).unwrap();
        let cx = ChainComplex::build(&spec).unwrap();
        assert!(matches!(field_homology(&cx, Part::Even), Err(Error::NotEuclidean(_))));
    }
}
