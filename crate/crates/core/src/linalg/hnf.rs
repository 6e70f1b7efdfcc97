use std::cmp::Ordering;

use num_bigint::BigInt;

use super::engine::{Dense, EngineInt, Res};
use super::{run, IntMatrix};

/// Column-style Hermite normal form `H = M * U`.
///
/// The first `rank` columns of `H` are nonzero, with pivot rows strictly
/// increasing, positive pivots and every entry left of a pivot reduced into
/// `[0, pivot)`. The remaining columns are zero, so the matching columns of
/// the unimodular `U` span the integer kernel of `M`.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
}

pub(crate) struct HnfRaw<E> {
    pub h: Dense<E>,
    pub u: Option<Dense<E>>,
    pub pivot_rows: Vec<usize>,
}

struct ColOps<E> {
    h: Dense<E>,
    u: Option<Dense<E>>,
    u_inv: Option<Dense<E>>,
}

impl<E: EngineInt> ColOps<E> {
    fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.h.cols.swap(a, b);
        if let Some(u) = &mut self.u {
            u.cols.swap(a, b);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.swap_rows(a, b);
        }
    }

    /// `col[dst] -= q * col[src]`
    fn sub_mul(&mut self, dst: usize, src: usize, q: &E, from_row: usize) -> Res<()> {
        if q.is_nil() {
            return Ok(());
        }
        self.h.col_sub_mul(dst, src, q, from_row)?;
        if let Some(u) = &mut self.u {
            u.col_sub_mul(dst, src, q, 0)?;
        }
        if let Some(ui) = &mut self.u_inv {
            ui.row_sub_mul(src, dst, &q.negated()?, 0)?;
        }
        Ok(())
    }

    fn negate(&mut self, j: usize) -> Res<()> {
        self.h.negate_col(j)?;
        if let Some(u) = &mut self.u {
            u.negate_col(j)?;
        }
        if let Some(ui) = &mut self.u_inv {
            ui.negate_row(j)?;
        }
        Ok(())
    }
}

pub(crate) fn hnf_core<E: EngineInt>(m: Dense<E>, with_transform: bool) -> Res<HnfRaw<E>> {
    let verify = cfg!(debug_assertions);
    let ncols = m.ncols();
    let nrows = m.nrows;
    let original = verify.then(|| m.clone());
    let track = with_transform || verify;
    let mut ops =
        ColOps { h: m, u: track.then(|| Dense::identity(ncols)), u_inv: verify.then(|| Dense::identity(ncols)) };

    let mut pc = 0;
    let mut pivot_rows = Vec::new();
    for r in 0..nrows {
        if pc == ncols {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in pc..ncols {
                let x = &ops.h.cols[j][r];
                if !x.is_nil() && best.is_none_or(|b| x.cmp_abs(&ops.h.cols[b][r]) == Ordering::Less) {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            ops.swap(b, pc);
            let mut clean = true;
            for j in pc + 1..ncols {
                if ops.h.cols[j][r].is_nil() {
                    continue;
                }
                let q = ops.h.cols[j][r].floor_div(&ops.h.cols[pc][r])?;
                ops.sub_mul(j, pc, &q, r)?;
                if !ops.h.cols[j][r].is_nil() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if ops.h.cols[pc][r].is_nil() {
            continue;
        }
        if ops.h.cols[pc][r].is_neg() {
            ops.negate(pc)?;
        }
        for c in 0..pc {
            let q = ops.h.cols[c][r].floor_div(&ops.h.cols[pc][r])?;
            ops.sub_mul(c, pc, &q, r)?;
        }
        pivot_rows.push(r);
        pc += 1;
    }

    if let Some(orig) = original {
        let u = ops.u.as_ref().expect("transform tracked in verified builds");
        assert_eq!(orig.mul(u)?, ops.h, "HNF postcondition M*U = H violated");
        let ui = ops.u_inv.as_ref().expect("inverse tracked in verified builds");
        assert_eq!(u.mul(ui)?, Dense::identity(ncols), "HNF transform is not unimodular");
        for (k, &r) in pivot_rows.iter().enumerate() {
            let p = &ops.h.cols[k][r];
            assert!(!p.is_neg() && !p.is_nil(), "HNF pivot not positive");
            for c in 0..k {
                let x = &ops.h.cols[c][r];
                assert!(!x.is_neg() && x.cmp_abs(p) == Ordering::Less, "HNF entry not reduced");
            }
        }
        for col in &ops.h.cols[pivot_rows.len()..] {
            assert!(col.iter().all(|x| x.is_nil()), "HNF trailing column nonzero");
        }
    }

    let u = if with_transform { ops.u } else { None };
    Ok(HnfRaw { h: ops.h, u, pivot_rows })
}

pub fn hermite_normal_form(m: &IntMatrix) -> Hnf {
    fn go<E: EngineInt>(m: Dense<E>) -> Res<Hnf> {
        let raw = hnf_core(m, true)?;
        Ok(Hnf {
            rank: raw.pivot_rows.len(),
            h: raw.h.to_int(),
            u: raw.u.expect("transform requested").to_int(),
            pivot_rows: raw.pivot_rows,
        })
    }
    run(&[m], |mut v| go(v.remove(0)), |mut v| go::<BigInt>(v.remove(0)))
}
