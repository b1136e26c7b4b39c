//! Dense integer matrices with exact Hermite and Smith normal forms.
//!
//! Everything is over `BigInt`; no entry is ever reduced modulo anything.
//! The transforms returned alongside each normal form are unimodular and
//! satisfy the stated identities exactly (`U·A = H`, `U·A·V = D`).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for (i, row) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed so that an empty row list
    /// still has a well-defined shape.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_i64(rows: &[Vec<i64>], cols: usize) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[Vec<BigInt>] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i][j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += vi * &self.data[i][j];
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix::from_rows(data, self.cols)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.data {
            row.swap(a, b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let (d, s) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (x, y) in d.iter_mut().zip(s.iter()) {
            if !y.is_zero() {
                *x += q * y;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in &mut self.data {
            let y = row[src].clone();
            if !y.is_zero() {
                row[dst] += q * y;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.data[i] {
            *x = -std::mem::take(x);
        }
    }

    /// Row-style Hermite normal form.
    ///
    /// Pivots are positive, entries above a pivot lie in `[0, pivot)`, and the
    /// zero rows sit at the bottom of `full`. `transform · self == full`.
    pub fn hnf(&self) -> Hnf {
        let mut a = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut r = 0;
        let mut pivots = Vec::new();
        let mut c = 0;
        while r < a.rows && c < a.cols {
            let pivot = (r..a.rows)
                .filter(|&i| !a.data[i][c].is_zero())
                .min_by(|&i, &j| a.data[i][c].abs().cmp(&a.data[j][c].abs()));
            let Some(pivot) = pivot else {
                c += 1;
                continue;
            };
            a.swap_rows(r, pivot);
            u.swap_rows(r, pivot);
            for k in r + 1..a.rows {
                if a.data[k][c].is_zero() {
                    continue;
                }
                let q = -a.data[k][c].div_floor(&a.data[r][c]);
                a.add_row_multiple(k, r, &q);
                u.add_row_multiple(k, r, &q);
            }
            if (r + 1..a.rows).any(|k| !a.data[k][c].is_zero()) {
                continue;
            }
            if a.data[r][c].is_negative() {
                a.negate_row(r);
                u.negate_row(r);
            }
            for k in 0..r {
                let q = -a.data[k][c].div_floor(&a.data[r][c]);
                a.add_row_multiple(k, r, &q);
                u.add_row_multiple(k, r, &q);
            }
            pivots.push(c);
            r += 1;
            c += 1;
        }
        Hnf {
            full: a,
            transform: u,
            rank: r,
            pivots,
        }
    }

    /// The nonzero rows of the Hermite normal form: a canonical basis of the
    /// row lattice.
    pub fn row_lattice_basis(&self) -> IntMatrix {
        let h = self.hnf();
        let rows = h.full.data[..h.rank].to_vec();
        IntMatrix::from_rows(rows, self.cols)
    }

    /// A basis (in HNF) of `{y : y · self = 0}`.
    pub fn left_kernel(&self) -> IntMatrix {
        let h = self.hnf();
        let rows: Vec<Vec<BigInt>> = h.transform.data[h.rank..].to_vec();
        IntMatrix::from_rows(rows, self.rows).row_lattice_basis()
    }

    /// A basis (in HNF) of `{x : self · x = 0}`.
    pub fn right_kernel(&self) -> IntMatrix {
        self.transpose().left_kernel()
    }

    /// Smith normal form: `u · self · v == diag(d)` padded with zeros, every
    /// `d[i]` positive and dividing `d[i+1]`.
    pub fn snf(&self) -> Snf {
        let mut a = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let mut v_inv = IntMatrix::identity(self.cols);
        let mut t = 0;
        let limit = self.rows.min(self.cols);
        while t < limit {
            let mut best: Option<(usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    if a.data[i][j].is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => a.data[i][j].abs() < a.data[bi][bj].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            loop {
                let mut clean = true;
                for i in t + 1..a.rows {
                    if a.data[i][t].is_zero() {
                        continue;
                    }
                    let q = -a.data[i][t].div_floor(&a.data[t][t]);
                    a.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    if !a.data[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..a.cols {
                    if a.data[t][j].is_zero() {
                        continue;
                    }
                    let q = -a.data[t][j].div_floor(&a.data[t][t]);
                    a.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    // V <- V E with E = I + q e_t e_j^T, so V^{-1} <- E^{-1} V^{-1}.
                    v_inv.add_row_multiple(t, j, &(-&q));
                    if !a.data[t][j].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    // Bring the smallest leftover of row/column t to the corner.
                    let mut best = (t, t);
                    for i in t + 1..a.rows {
                        if !a.data[i][t].is_zero()
                            && a.data[i][t].abs() < a.data[best.0][best.1].abs()
                        {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..a.cols {
                        if !a.data[t][j].is_zero()
                            && a.data[t][j].abs() < a.data[best.0][best.1].abs()
                        {
                            best = (t, j);
                        }
                    }
                    if best.0 != t {
                        a.swap_rows(t, best.0);
                        u.swap_rows(t, best.0);
                    } else if best.1 != t {
                        a.swap_cols(t, best.1);
                        v.swap_cols(t, best.1);
                        v_inv.swap_rows(t, best.1);
                    }
                    continue;
                }
                let mut offender = None;
                'search: for i in t + 1..a.rows {
                    for j in t + 1..a.cols {
                        if !a.data[i][j].is_multiple_of(&a.data[t][t]) {
                            offender = Some(i);
                            break 'search;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        let one = BigInt::one();
                        a.add_row_multiple(t, i, &one);
                        u.add_row_multiple(t, i, &one);
                    }
                    None => break,
                }
            }
            if a.data[t][t].is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        let diag = (0..t).map(|i| a.data[i][i].clone()).collect();
        Snf {
            u,
            v,
            v_inv,
            diag,
        }
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

#[derive(Clone, Debug)]
pub struct Hnf {
    pub full: IntMatrix,
    pub transform: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero invariant factors; their count is the rank.
    pub diag: Vec<BigInt>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
        IntMatrix::from_i64(rows, cols)
    }

    #[test]
    fn hnf_small() {
        let a = m(&[vec![4, 6], vec![6, 9], vec![2, 0]], 2);
        let h = a.hnf();
        assert_eq!(h.transform.mul(&a), h.full);
        assert_eq!(h.rank, 2);
        let basis = a.row_lattice_basis();
        assert_eq!(basis, m(&[vec![2, 0], vec![0, 3]], 2));
    }

    #[test]
    fn snf_identity_holds() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        let s = a.snf();
        let d = s.u.mul(&a).mul(&s.v);
        let mut expected = IntMatrix::zeros(3, 3);
        for (i, x) in s.diag.iter().enumerate() {
            expected.set(i, i, x.clone());
        }
        assert_eq!(d, expected);
        assert_eq!(
            s.diag,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(3));
    }

    #[test]
    fn kernels() {
        let a = m(&[vec![1, -1], vec![2, -2]], 2);
        assert_eq!(a.left_kernel(), m(&[vec![2, -1]], 2));
        assert_eq!(a.right_kernel(), m(&[vec![1, 1]], 2));
        assert_eq!(IntMatrix::identity(3).left_kernel().rows(), 0);
    }

    #[test]
    fn bareiss() {
        let a = m(&[vec![0, 1], vec![1, 1]], 2);
        assert_eq!(a.determinant(), BigInt::from(-1));
        let b = m(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]], 3);
        assert_eq!(b.determinant(), BigInt::from(6));
    }
}
