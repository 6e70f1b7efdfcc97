use std::cmp::Ordering;

use num_bigint::BigInt;

use super::engine::{Dense, EngineInt, Res};
use super::{run, IntMatrix};

/// Smith normal form `S = P * M * Q` with `P`, `Q` unimodular and the
/// diagonal of `S` forming a divisibility chain of nonnegative entries.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: IntMatrix,
    pub p: IntMatrix,
    pub p_inv: IntMatrix,
    pub q: IntMatrix,
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).collect()
    }
}

struct State<E> {
    a: Dense<E>,
    p: Dense<E>,
    p_inv: Dense<E>,
    q: Dense<E>,
    q_inv: Option<Dense<E>>,
}

impl<E: EngineInt> State<E> {
    fn at(&self, i: usize, j: usize) -> &E {
        &self.a.cols[j][i]
    }

    fn swap_rows(&mut self, x: usize, y: usize) {
        if x == y {
            return;
        }
        self.a.swap_rows(x, y);
        self.p.swap_rows(x, y);
        self.p_inv.cols.swap(x, y);
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        if x == y {
            return;
        }
        self.a.cols.swap(x, y);
        self.q.cols.swap(x, y);
        if let Some(qi) = &mut self.q_inv {
            qi.swap_rows(x, y);
        }
    }

    /// `row[dst] -= f * row[src]`
    fn row_op(&mut self, dst: usize, src: usize, f: &E, from_col: usize) -> Res<()> {
        if f.is_nil() {
            return Ok(());
        }
        self.a.row_sub_mul(dst, src, f, from_col)?;
        self.p.row_sub_mul(dst, src, f, 0)?;
        self.p_inv.col_sub_mul(src, dst, &f.negated()?, 0)
    }

    /// `col[dst] -= f * col[src]`
    fn col_op(&mut self, dst: usize, src: usize, f: &E, from_row: usize) -> Res<()> {
        if f.is_nil() {
            return Ok(());
        }
        self.a.col_sub_mul(dst, src, f, from_row)?;
        self.q.col_sub_mul(dst, src, f, 0)?;
        if let Some(qi) = &mut self.q_inv {
            qi.row_sub_mul(src, dst, &f.negated()?, 0)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Res<()> {
        self.a.negate_row(i)?;
        self.p.negate_row(i)?;
        self.p_inv.negate_col(i)
    }
}

fn snf_core<E: EngineInt>(m: Dense<E>) -> Res<(State<E>, usize)> {
    let verify = cfg!(debug_assertions);
    let (r, c) = (m.nrows, m.ncols());
    let original = verify.then(|| m.clone());
    let mut st = State {
        a: m,
        p: Dense::identity(r),
        p_inv: Dense::identity(r),
        q: Dense::identity(c),
        q_inv: verify.then(|| Dense::identity(c)),
    };

    let mut t = 0;
    while t < r.min(c) {
        let mut best: Option<(usize, usize)> = None;
        for j in t..c {
            for i in t..r {
                let x = st.at(i, j);
                if !x.is_nil() && best.is_none_or(|(bi, bj)| x.cmp_abs(st.at(bi, bj)) == Ordering::Less) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        st.swap_rows(t, bi);
        st.swap_cols(t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if st.at(i, t).is_nil() {
                    continue;
                }
                let f = st.at(i, t).floor_div(st.at(t, t))?;
                st.row_op(i, t, &f, t)?;
                dirty |= !st.at(i, t).is_nil();
            }
            for j in t + 1..c {
                if st.at(t, j).is_nil() {
                    continue;
                }
                let f = st.at(t, j).floor_div(st.at(t, t))?;
                st.col_op(j, t, &f, t)?;
                dirty |= !st.at(t, j).is_nil();
            }
            if dirty {
                let mut best: Option<(usize, usize)> = None;
                let cands = (t + 1..r).map(|i| (i, t)).chain((t + 1..c).map(|j| (t, j)));
                for (i, j) in cands {
                    let x = st.at(i, j);
                    if !x.is_nil() && best.is_none_or(|(bi, bj)| x.cmp_abs(st.at(bi, bj)) == Ordering::Less) {
                        best = Some((i, j));
                    }
                }
                let (bi, bj) = best.expect("dirty pivot row/column has a nonzero remainder");
                st.swap_rows(t, bi);
                st.swap_cols(t, bj);
                continue;
            }
            let pivot = st.at(t, t).clone();
            let bad = (t + 1..c)
                .flat_map(|j| (t + 1..r).map(move |i| (i, j)))
                .find(|&(i, j)| !pivot.is_divisor_of(st.at(i, j)));
            match bad {
                Some((i, _)) => st.row_op(t, i, &E::unit().negated()?, t)?,
                None => break,
            }
        }
        if st.at(t, t).is_neg() {
            st.negate_row(t)?;
        }
        t += 1;
    }

    if let Some(orig) = original {
        assert_eq!(st.p.mul(&orig)?.mul(&st.q)?, st.a, "SNF postcondition P*M*Q = S violated");
        assert_eq!(st.p.mul(&st.p_inv)?, Dense::identity(r), "SNF left transform not unimodular");
        let qi = st.q_inv.as_ref().expect("tracked in verified builds");
        assert_eq!(st.q.mul(qi)?, Dense::identity(c), "SNF right transform not unimodular");
        for j in 0..c {
            for i in 0..r {
                if i != j {
                    assert!(st.at(i, j).is_nil(), "SNF result not diagonal");
                }
            }
        }
        for i in 1..t {
            assert!(st.at(i - 1, i - 1).is_divisor_of(st.at(i, i)), "SNF divisibility chain broken");
        }
    }
    Ok((st, t))
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    fn go<E: EngineInt>(m: Dense<E>) -> Res<Snf> {
        let (st, rank) = snf_core(m)?;
        Ok(Snf { s: st.a.to_int(), p: st.p.to_int(), p_inv: st.p_inv.to_int(), q: st.q.to_int(), rank })
    }
    run(&[m], |mut v| go(v.remove(0)), |mut v| go::<BigInt>(v.remove(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::big_vec;
    use num_traits::{One, Signed, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(m: &IntMatrix) -> Snf {
        let s = smith_normal_form(m);
        assert_eq!(s.p.mul(m).mul(&s.q), s.s);
        assert!(s.p.determinant().abs().is_one());
        assert!(s.q.determinant().abs().is_one());
        assert_eq!(s.p.mul(&s.p_inv), IntMatrix::identity(m.rows()));
        let d = s.diagonal();
        for w in d.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && (&w[1] % &w[0]).is_zero());
        }
        s
    }

    #[test]
    fn coprime_diagonal_merges() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), big_vec(&[1, 6]));
    }

    #[test]
    fn zero_matrix_is_fixed() {
        let m = IntMatrix::zeros(3, 2);
        let s = check(&m);
        assert_eq!(s.s, m);
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn random_five_by_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let rows: Vec<Vec<i64>> = (0..5).map(|_| (0..5).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            let m = IntMatrix::from_rows(&rows);
            let s = check(&m);
            // |det M| equals the product of the invariant factors.
            let prod: BigInt = s.diagonal().iter().product();
            assert_eq!(prod, m.determinant().abs());
        }
    }

    #[test]
    fn rectangular_shapes() {
        let m = IntMatrix::from_rows(&[vec![4, 6, 8], vec![6, 9, 12]]);
        let s = check(&m);
        assert_eq!(s.rank, 1);
        assert_eq!(s.diagonal(), big_vec(&[1, 0]));
        let m = m.transpose();
        assert_eq!(check(&m).rank, 1);
        let one = IntMatrix::from_rows(&[vec![0, 0, 5]]);
        assert_eq!(check(&one).s.get(0, 0), &BigInt::from(5));
        assert!(check(&IntMatrix::identity(3)).diagonal().iter().all(|d| d.is_one()));
    }
}
