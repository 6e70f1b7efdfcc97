use std::borrow::Cow;

use num_bigint::BigInt;
use serde::Serialize;

use super::presentation::{ModuleInvariants, PresentedUModule, RawPresentation};
use crate::complex::{ChainComplex, LaurentMatrix, Parity, TruncatedRing};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, kernel_basis_mod, IntMatrix};
use crate::ring::{CoeffRing, LaurentPoly};

/// Which part of the homology to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Even,
    Odd,
    Total,
}

impl From<Parity> for Part {
    fn from(p: Parity) -> Part {
        match p {
            Parity::Even => Part::Even,
            Parity::Odd => Part::Odd,
        }
    }
}

impl std::str::FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Part> {
        match s {
            "even" => Ok(Part::Even),
            "odd" => Ok(Part::Odd),
            "total" => Ok(Part::Total),
            _ => Err(Error::InvalidSpec(format!("unknown parity `{s}` (expected even, odd or total)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomologyOptions {
    /// Truncation power; `None` means `b1 + 1`.
    pub power: Option<u32>,
    /// Recompute at `power + 1` and require identical invariants.
    pub check_stability: bool,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions { power: None, check_stability: true }
    }
}

/// One homological slot: generators `mid`, differential `d_out` out of it and
/// `d_in` into it.
struct Slot<'a> {
    mid: Vec<usize>,
    /// Old-to-new chain coordinates when the complex was rebased.
    input_map: Option<&'a LaurentMatrix>,
    out_rows: Vec<usize>,
    in_cols: Vec<usize>,
    d: &'a LaurentMatrix,
    perturbation: Option<&'a LaurentMatrix>,
    label: String,
}

fn slot_presentation(cx: &ChainComplex, slot: &Slot, power: u32) -> Result<RawPresentation> {
    let ring = cx.ring();
    let n = cx.n_value();
    let a = TruncatedRing::new(n, power);
    let a2 = TruncatedRing::new(n, 2 * power);
    let r = a.rank();
    let dim = slot.mid.len() * r;

    // Cycles: kernel of d_out over A_{2p}, reduced to A_p.
    let d_out2 = a2.realize(&slot.d.select(&slot.out_rows, &slot.mid))?;
    let ker2 = match ring.modulus() {
        Some(m) => kernel_basis_mod(&d_out2, &BigInt::from(m)),
        None => kernel_basis(&d_out2),
    };
    let proj = IntMatrix::block_diag(&vec![a2.projection_to(&a); slot.mid.len()]);
    let mut cycles = proj.mul(&ker2);
    let mut boundaries = a.realize(&slot.d.select(&slot.mid, &slot.in_cols))?;
    if let Some(m) = ring.modulus() {
        let mi = IntMatrix::identity(dim).scale(&BigInt::from(m));
        cycles = cycles.hcat(&mi);
        boundaries = boundaries.hcat(&mi);
    }
    let t_inv = a.mult_matrix(&LaurentPoly::monomial(CoeffRing::Integers, 1, -1))?;
    let perturbation = match slot.perturbation {
        Some(p) => Some(a.realize(&p.select(&slot.mid, &slot.mid))?),
        None => None,
    };
    Ok(RawPresentation {
        ring,
        n_value: n,
        b1: cx.b1(),
        power,
        cycles,
        boundaries,
        t_action: IntMatrix::block_diag(&vec![a.t_matrix(); slot.mid.len()]),
        t_inverse: IntMatrix::block_diag(&vec![t_inv; slot.mid.len()]),
        perturbation,
        block_morse: slot.mid.iter().map(|&g| cx.morse_index(g)).collect(),
        block_size: r,
        input_map: match slot.input_map {
            Some(m) => Some(a.realize(&m.select(&slot.mid, &slot.mid))?),
            None => None,
        },
        label: slot.label.clone(),
    })
}

fn slot_module(cx: &ChainComplex, slot: &Slot, opts: HomologyOptions) -> Result<PresentedUModule> {
    let power = opts.power.unwrap_or(cx.b1() as u32 + 1);
    if power == 0 {
        return Err(Error::InvalidSpec("truncation power must be positive".into()));
    }
    let module = PresentedUModule::from_presentation(&slot_presentation(cx, slot, power)?)?;
    if opts.check_stability {
        let next = PresentedUModule::from_presentation(&slot_presentation(cx, slot, power + 1)?)?;
        let limit = power + 1;
        let (a, b) = (module.invariants(limit), next.invariants(limit));
        if a != b {
            return Err(instability(&slot.label, power, &a, &b));
        }
    }
    Ok(module)
}

fn instability(label: &str, power: u32, a: &ModuleInvariants, b: &ModuleInvariants) -> Error {
    Error::TruncationInstability(format!(
        "{label} homology changes between truncation powers {power} ({}) and {} ({})",
        a.group,
        power + 1,
        b.group
    ))
}

/// The complex the engine works on: rebased when several `xi` entries are
/// nonzero, which keeps `d1` sparse and the integer kernels small. The second
/// component maps caller chain coordinates to working ones.
pub(crate) fn working(cx: &ChainComplex) -> Result<(Cow<'_, ChainComplex>, Option<LaurentMatrix>)> {
    if cx.needs_rebase() {
        let r = cx.rebased()?;
        Ok((Cow::Owned(r.complex), Some(r.phi_inv)))
    } else {
        Ok((Cow::Borrowed(cx), None))
    }
}

fn parity_slot<'a>(
    cx: &'a ChainComplex,
    d: &'a LaurentMatrix,
    map: Option<&'a LaurentMatrix>,
    parity: Parity,
) -> Slot<'a> {
    let mid = cx.parity_indices(parity);
    let other = cx.parity_indices(parity.flip());
    Slot {
        mid,
        input_map: map,
        out_rows: other.clone(),
        in_cols: other,
        d,
        perturbation: cx.perturbation(),
        label: parity.to_string(),
    }
}

/// Homology of `(C, d1 + d3)` as a module over `T` and `U = T^-1 (+ P)`.
///
/// The differential is only `Z/2`-graded, so the homology splits by the
/// parity of the Morse index.
pub fn homology(cx: &ChainComplex, part: Part) -> Result<PresentedUModule> {
    homology_with(cx, part, HomologyOptions::default())
}

pub fn homology_with(cx: &ChainComplex, part: Part, opts: HomologyOptions) -> Result<PresentedUModule> {
    let (w, map) = working(cx)?;
    let d = w.differential();
    let slot = |p| slot_module(&w, &parity_slot(&w, &d, map.as_ref(), p), opts);
    match part {
        Part::Even => slot(Parity::Even),
        Part::Odd => slot(Parity::Odd),
        Part::Total => slot(Parity::Even)?.direct_sum(&slot(Parity::Odd)?, "total"),
    }
}

/// Homology of `(C, d1)` in each Morse degree `0..=b1`: the `E^2` page of the
/// Morse-index filtration, with `U` acting as `T^-1`.
pub fn e2_page(cx: &ChainComplex) -> Result<Vec<PresentedUModule>> {
    e2_page_with(cx, HomologyOptions::default())
}

pub fn e2_page_with(cx: &ChainComplex, opts: HomologyOptions) -> Result<Vec<PresentedUModule>> {
    let (w, map) = working(cx)?;
    let cx = &*w;
    let d1 = cx.d1();
    (0..=cx.b1())
        .map(|deg| {
            let slot = Slot {
                mid: cx.degree_indices(deg),
                input_map: map.as_ref(),
                out_rows: if deg == 0 { Vec::new() } else { cx.degree_indices(deg - 1) },
                in_cols: cx.degree_indices(deg + 1),
                d: d1,
                perturbation: None,
                label: format!("degree {deg}"),
            };
            slot_module(cx, &slot, opts)
        })
        .collect()
}

/// Cokernel of the 4x4 matrix with diagonal `T^N - 1` and corner `-mT`,
/// realized at truncation power `b1 + 1 = 4`.
pub fn cokernel_module(n: u64, m: i64, ring: CoeffRing) -> Result<PresentedUModule> {
    let mat = crate::complex::assemble_block_matrix(n, m)?.with_ring(ring)?;
    PresentedUModule::cokernel(&mat, n, 3, 4, ring)
}

/// The class `sigma_i`, represented by the column vector `(0, 0, 0, i)`.
pub fn sigma_class(module: &PresentedUModule, i: i64) -> Result<super::HClass> {
    let ring = module.ring();
    let z = LaurentPoly::zero(ring);
    module.class_of(&[z.clone(), z.clone(), z, LaurentPoly::constant(ring, i)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{ManifoldSpec, TruncatedRing};
    use crate::linalg::AbelianGroupType;
    use num_traits::Zero;

    fn cx(b1: usize, xi: Vec<i64>, cup3: Vec<([usize; 3], i64)>, ring: CoeffRing) -> ChainComplex {
        ChainComplex::build(&ManifoldSpec::new(b1, xi, cup3, ring).unwrap()).unwrap()
    }

    /// Rank over `F_p` by plain Gaussian elimination.
    fn rank_mod_p(m: &IntMatrix, p: i64) -> usize {
        let mut a: Vec<Vec<i64>> = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| (m.get(i, j) % BigInt::from(p)).try_into().map(|x: i64| x.rem_euclid(p)).unwrap())
                    .collect()
            })
            .collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(r) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
            a.swap(rank, r);
            let inv = (1..p).find(|x| x * a[rank][c] % p == 1).unwrap();
            for j in 0..m.cols() {
                a[rank][j] = a[rank][j] * inv % p;
            }
            for r in 0..a.len() {
                if r != rank && a[r][c] != 0 {
                    let f = a[r][c];
                    for j in 0..m.cols() {
                        a[r][j] = (a[r][j] - f * a[rank][j]).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn dim_mod_p(g: &AbelianGroupType, p: i64) -> usize {
        g.free_rank + g.torsion_invariants.iter().filter(|d| (*d % BigInt::from(p)).is_zero()).count()
    }

    #[test]
    fn circle_over_q() {
        let q = CoeffRing::Rationals;
        for n in 1..=4 {
            let c = cx(1, vec![n], vec![], q);
            let h0 = homology(&c, Part::Even).unwrap();
            assert_eq!(h0.group_type(), AbelianGroupType { free_rank: n as usize, torsion_invariants: vec![] });
            assert_eq!(h0.nilpotency(super::super::Variable::T, 3), Some(if n == 0 { 0 } else { 1 }));
            assert!(homology(&c, Part::Odd).unwrap().is_zero_module());
        }
    }

    #[test]
    fn circle_over_z_is_torsion_free() {
        let c = cx(1, vec![2], vec![], CoeffRing::Integers);
        assert_eq!(homology(&c, Part::Even).unwrap().group_type().to_string(), "Z^2");
        assert!(homology(&c, Part::Odd).unwrap().is_zero_module());
    }

    #[test]
    fn cokernel_module_matches_mod_p_ranks() {
        for (n, m) in [(1u64, 1i64), (2, 1), (1, 2), (2, 3)] {
            let module = cokernel_module(n, m, CoeffRing::Integers).unwrap();
            let a = TruncatedRing::new(n, 4);
            let raw = a.realize(&crate::complex::assemble_block_matrix(n, m).unwrap()).unwrap();
            for p in [2, 3, 5, 7] {
                assert_eq!(dim_mod_p(&module.group_type(), p), raw.rows() - rank_mod_p(&raw, p), "N={n} m={m} p={p}");
            }
        }
    }

    #[test]
    fn total_homology_is_the_four_by_four_cokernel() {
        // With xi = (N,0,0) the differential only maps generators containing
        // index 1 to those without it, by the 4x4 matrix, which is injective.
        for (n, m) in [(1u64, 1i64), (2, 1), (2, -2)] {
            let c = ChainComplex::build(&ManifoldSpec::three_torus_like(n, m, CoeffRing::Integers).unwrap()).unwrap();
            let total = homology(&c, Part::Total).unwrap();
            let block = cokernel_module(n, m, CoeffRing::Integers).unwrap();
            assert_eq!(total.invariants(5), block.invariants(5));
        }
    }

    #[test]
    fn e2_dimensions() {
        let q = CoeffRing::Rationals;
        for n in 1..=3 {
            let pages = e2_page(&cx(3, vec![n, 0, 0], vec![], q)).unwrap();
            let dims: Vec<usize> = pages.iter().map(|m| m.group_type().free_rank).collect();
            let n = n as usize;
            assert_eq!(dims, vec![n, 2 * n, n, 0]);
        }
        let pages = e2_page(&cx(2, vec![2, 0], vec![], CoeffRing::IntegersMod(3))).unwrap();
        let orders: Vec<BigInt> = pages.iter().map(|m| m.order().unwrap()).collect();
        assert_eq!(orders, vec![BigInt::from(9), BigInt::from(9), BigInt::from(1)]);
    }

    #[test]
    fn e2_ignores_the_cup_term() {
        let z = CoeffRing::Integers;
        let with = e2_page(&cx(3, vec![2, 0, 0], vec![([1, 2, 3], 3)], z)).unwrap();
        let without = e2_page(&cx(3, vec![2, 0, 0], vec![], z)).unwrap();
        for (a, b) in with.iter().zip(&without) {
            assert_eq!(a.group_type(), b.group_type());
        }
    }

    #[test]
    fn unnormalized_xi_gives_the_same_groups() {
        let z = CoeffRing::Integers;
        let a = homology(&cx(2, vec![4, 6], vec![], z), Part::Total).unwrap();
        let b = homology(&cx(2, vec![2, 0], vec![], z), Part::Total).unwrap();
        assert_eq!(a.group_type(), b.group_type());
    }

    #[test]
    fn zero_power_is_rejected() {
        let c = cx(1, vec![1], vec![], CoeffRing::Integers);
        let opts = HomologyOptions { power: Some(0), check_stability: false };
        assert!(homology_with(&c, Part::Even, opts).is_err());
    }

    #[test]
    fn part_parsing() {
        assert_eq!("odd".parse::<Part>().unwrap(), Part::Odd);
        assert!("both".parse::<Part>().is_err());
    }
}
