//! Kraus-sum application on one block of modes of a multi-mode operator.

use num_complex::Complex64;

use crate::linalg::CMat;

/// A Kraus operator stored as its nonzero entries `(row, col, value)`.
#[derive(Debug, Clone)]
pub(crate) struct KrausOp {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl KrausOp {
    pub fn from_matrix(matrix: &CMat) -> Self {
        let mut entries = Vec::new();
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                let v = matrix[(i, j)];
                if v != Complex64::ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self { rows: matrix.nrows(), cols: matrix.ncols(), entries }
    }

    pub fn matrix(&self) -> CMat {
        let mut m = CMat::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.2 == Complex64::ZERO)
    }

    pub fn adjoint(&self) -> Self {
        Self { rows: self.cols, cols: self.rows, entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect() }
    }

    /// `self * first`.
    pub fn after(&self, first: &KrausOp) -> Self {
        let mut by_col: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.cols];
        for &(i, j, v) in &self.entries {
            by_col[j].push((i, v));
        }
        let mut acc: Vec<(usize, usize, Complex64)> = Vec::new();
        for &(r, c, v) in &first.entries {
            for &(i, v2) in &by_col[r] {
                acc.push((i, c, v2 * v));
            }
        }
        acc.sort_by_key(|&(i, j, _)| (j, i));
        let mut entries: Vec<(usize, usize, Complex64)> = Vec::with_capacity(acc.len());
        for (i, j, v) in acc {
            match entries.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => entries.push((i, j, v)),
            }
        }
        entries.retain(|e| e.2 != Complex64::ZERO);
        Self { rows: self.rows, cols: first.cols, entries }
    }
}

/// Layout `left x block x right` of a multi-mode index with the channel acting on `block`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockLayout {
    pub left: usize,
    pub dim_in: usize,
    pub dim_out: usize,
    pub right: usize,
}

impl BlockLayout {
    pub fn single(dim_in: usize, dim_out: usize) -> Self {
        Self { left: 1, dim_in, dim_out, right: 1 }
    }

    fn total_in(&self) -> usize {
        self.left * self.dim_in * self.right
    }

    fn total_out(&self) -> usize {
        self.left * self.dim_out * self.right
    }
}

/// Right-multiplies `x` (rows x total_in, column-major) by `(I (x) K^dagger (x) I)`.
fn times_kraus_adjoint(x: &[Complex64], rows: usize, op: &KrausOp, layout: BlockLayout) -> Vec<Complex64> {
    let mut w = vec![Complex64::ZERO; rows * layout.total_out()];
    let lr = layout.left * layout.right;
    for &(i, a, v) in &op.entries {
        let cv = v.conj();
        for idx in 0..lr {
            let (l, r) = (idx / layout.right, idx % layout.right);
            let src = (l * layout.dim_in + a) * layout.right + r;
            let dst = (l * layout.dim_out + i) * layout.right + r;
            let s = &x[src * rows..(src + 1) * rows];
            let d = &mut w[dst * rows..(dst + 1) * rows];
            for (d, s) in d.iter_mut().zip(s) {
                *d += cv * s;
            }
        }
    }
    w
}

fn adjoint_raw(x: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            out[i * cols + j] = x[j * rows + i].conj();
        }
    }
    out
}

/// `sum_K (I (x) K (x) I) x (I (x) K^dagger (x) I)`.
pub(crate) fn apply_kraus(ops: &[KrausOp], x: &CMat, layout: BlockLayout) -> CMat {
    let (n_in, n_out) = (layout.total_in(), layout.total_out());
    assert_eq!(x.shape(), (n_in, n_in), "operator does not match channel input");
    let data = x.as_slice();
    // acc accumulates (K x K^dagger)^dagger, column-major n_out x n_out
    let mut acc = vec![Complex64::ZERO; n_out * n_out];
    for op in ops {
        let w = times_kraus_adjoint(data, n_in, op, layout);
        let z = adjoint_raw(&w, n_in, n_out);
        let y = times_kraus_adjoint(&z, n_out, op, layout);
        for (a, b) in acc.iter_mut().zip(&y) {
            *a += b;
        }
    }
    let acc = CMat::from_vec(n_out, n_out, acc);
    acc.adjoint()
}

/// Partial transpose of the block: `(l,i,r),(l',j,r') <- (l,j,r),(l',i,r')`.
pub(crate) fn apply_transpose(x: &CMat, layout: BlockLayout) -> CMat {
    let n = layout.total_in();
    let BlockLayout { dim_in: d, right, .. } = layout;
    let split = |idx: usize| {
        let r = idx % right;
        let rest = idx / right;
        (rest / d, rest % d, r)
    };
    let join = |l: usize, i: usize, r: usize| (l * d + i) * right + r;
    CMat::from_fn(n, n, |row, col| {
        let (l, i, r) = split(row);
        let (l2, j, r2) = split(col);
        x[(join(l, j, r), join(l2, i, r2))]
    })
}

/// `sum_K K^dagger K`.
pub(crate) fn completeness(ops: &[KrausOp], dim_in: usize) -> CMat {
    let mut m = CMat::zeros(dim_in, dim_in);
    for op in ops {
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); op.rows];
        for &(i, j, v) in &op.entries {
            by_row[i].push((j, v));
        }
        for row in &by_row {
            for &(j1, v1) in row {
                for &(j2, v2) in row {
                    m[(j1, j2)] += v1.conj() * v2;
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, kron, max_abs_diff, identity};

    fn sample(rows: usize, cols: usize, seed: f64) -> CMat {
        CMat::from_fn(rows, cols, |i, j| c(((i * 7 + j * 3) as f64 + seed).sin(), ((i * 5 + j * 11) as f64 * seed).cos()))
    }

    #[test]
    fn matches_dense_kron_formula() {
        let (l, di, do_, r) = (2, 3, 4, 2);
        let ks = [sample(do_, di, 0.3), sample(do_, di, 1.7)];
        let ops: Vec<KrausOp> = ks.iter().map(KrausOp::from_matrix).collect();
        let x = sample(l * di * r, l * di * r, 2.9);
        let got = apply_kraus(&ops, &x, BlockLayout { left: l, dim_in: di, dim_out: do_, right: r });
        let mut want = CMat::zeros(l * do_ * r, l * do_ * r);
        for k in &ks {
            let big = kron(&kron(&identity(l), k), &identity(r));
            want += &big * &x * big.adjoint();
        }
        assert!(max_abs_diff(&got, &want) < 1e-12);
        let mut dense = CMat::zeros(di, di);
        for k in &ks {
            dense += k.adjoint() * k;
        }
        assert!(max_abs_diff(&completeness(&ops, di), &dense) < 1e-12);
        let prod = ops[1].adjoint().after(&ops[0]);
        assert!(max_abs_diff(&prod.matrix(), &(ks[1].adjoint() * &ks[0])) < 1e-12);
    }

    #[test]
    fn partial_transpose_of_product() {
        let a = sample(3, 3, 0.4);
        let b = sample(2, 2, 0.9);
        let got = apply_transpose(&kron(&a, &b), BlockLayout { left: 1, dim_in: 3, dim_out: 3, right: 2 });
        assert!(max_abs_diff(&got, &kron(&a.transpose(), &b)) < 1e-15);
        let got = apply_transpose(&kron(&a, &b), BlockLayout { left: 3, dim_in: 2, dim_out: 2, right: 1 });
        assert!(max_abs_diff(&got, &kron(&a, &b.transpose())) < 1e-15);
    }
}
