//! Dense complex linear-algebra helpers on top of `nalgebra`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Kronecker product with the first factor as the most significant index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().copied().sum()
}

/// Largest entrywise modulus of `a - a^dagger`.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn eigvalsh(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

/// Eigen-decomposition of a Hermitian matrix, eigenpairs sorted by descending eigenvalue.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Function of a Hermitian matrix through its eigen-decomposition.
pub fn hermitian_fn(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(a);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&v| cr(f(v))));
    &vecs * CMat::from_diagonal(&d) * vecs.adjoint()
}

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// Backward-error bounds for each Padé degree (double precision).
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

/// Matrix exponential by scaling and squaring with diagonal Padé approximants
/// of degree 3, 5, 7, 9 or 13, chosen from the 1-norm.
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Shape(format!("expm needs a square matrix, got {:?}", a.shape())));
    }
    if n == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Numeric("expm input has non-finite entries".into()));
    }
    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            return pade_low(a, coeffs);
        }
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(0.5f64.powi(s));
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_low(a: &CMat, b: &[f64]) -> Result<CMat> {
    let n = a.nrows();
    let id = identity(n);
    let a2 = a * a;
    let mut u_inner = id.scale(b[1]);
    let mut v = id.scale(b[0]);
    let mut power = id.clone();
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        u_inner += power.scale(b[2 * k + 1]);
        v += power.scale(b[2 * k]);
    }
    let u = a * u_inner;
    solve_pade(u, v)
}

fn pade13(a: &CMat) -> Result<CMat> {
    let b = &PADE13;
    let n = a.nrows();
    let id = identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]));
    let u = a * (inner_u + a6.scale(b[7]) + a4.scale(b[5]) + a2.scale(b[3]) + id.scale(b[1]));
    let inner_v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]));
    let v = inner_v + a6.scale(b[6]) + a4.scale(b[4]) + a2.scale(b[2]) + id.scale(b[0]);
    solve_pade(u, v)
}

fn solve_pade(u: CMat, v: CMat) -> Result<CMat> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::Numeric("singular Padé denominator in expm".into()))
}

/// Columns `cols` of `exp(G)` for the real tridiagonal generator with `G[k+1,k] = c_k`
/// and `G[k,k+1] = -c_k`; the other columns are left zero. Conjugating by `diag(i^k)`
/// turns `G` into `-i T` with `T` real symmetric, so one real eigendecomposition suffices.
pub fn chain_exp(coupling: &[f64], cols: &[usize]) -> CMat {
    let m = coupling.len() + 1;
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j + 1 {
            coupling[j]
        } else if j == i + 1 {
            coupling[i]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let phases: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l)).collect();
    let quarter = [cr(1.0), Complex64::i(), cr(-1.0), -Complex64::i()];
    let mut out = CMat::zeros(m, m);
    for &c in cols {
        let weights: Vec<Complex64> = (0..m).map(|k| phases[k] * eig.eigenvectors[(c, k)]).collect();
        for r in 0..m {
            let v: Complex64 = (0..m).map(|k| weights[k] * eig.eigenvectors[(r, k)]).sum();
            out[(r, c)] = v * quarter[(r + 4 - c % 4) % 4];
        }
    }
    out
}

/// `exp(g)` for a generator that conserves an integer label on the basis, computed
/// block by block. Entries of `g` coupling different labels are an error.
pub fn expm_by_sectors(g: &CMat, labels: &[i64]) -> Result<CMat> {
    let n = g.nrows();
    if labels.len() != n || g.ncols() != n {
        return Err(Error::Shape("sector labels do not match generator".into()));
    }
    let mut sectors: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        sectors.entry(l).or_default().push(i);
    }
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] && g[(i, j)] != Complex64::ZERO {
                return Err(Error::Numeric(format!(
                    "generator couples sectors {} and {}",
                    labels[i], labels[j]
                )));
            }
        }
    }
    let mut out = CMat::zeros(n, n);
    for idx in sectors.values() {
        let k = idx.len();
        let block = CMat::from_fn(k, k, |r, s| g[(idx[r], idx[s])]);
        let e = expm(&block)?;
        for r in 0..k {
            for s in 0..k {
                out[(idx[r], idx[s])] = e[(r, s)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_exponential_matches_pade() {
        let coupling: Vec<f64> = (0..30).map(|k| 0.7 * ((k + 1) as f64 * (k + 4) as f64).sqrt()).collect();
        let m = coupling.len() + 1;
        let gen = CMat::from_fn(m, m, |i, j| {
            if i == j + 1 {
                cr(coupling[j])
            } else if j == i + 1 {
                cr(-coupling[i])
            } else {
                cr(0.0)
            }
        });
        let reference = expm(&gen).unwrap();
        let all: Vec<usize> = (0..m).collect();
        assert!(max_abs_diff(&chain_exp(&coupling, &all), &reference) < 1e-10);
        let some = chain_exp(&coupling, &[0, 3]);
        assert!((some[(5, 3)] - reference[(5, 3)]).norm() < 1e-10);
        assert_eq!(some[(5, 4)], cr(0.0));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMat::zeros(5, 5);
        assert!(max_abs_diff(&expm(&z).unwrap(), &identity(5)) < 1e-15);
    }

    #[test]
    fn expm_of_diagonal() {
        let d = CMat::from_diagonal(&DVector::from_vec(vec![cr(0.001), cr(-1.0), c(0.0, 3.0), cr(7.5)]));
        let e = expm(&d).unwrap();
        let want = [cr(0.001f64.exp()), cr((-1.0f64).exp()), c(0.0, 3.0).exp(), cr(7.5f64.exp())];
        for (i, w) in want.iter().enumerate() {
            assert!((e[(i, i)] - w).norm() < 1e-12 * w.norm().max(1.0));
        }
    }

    #[test]
    fn expm_rotation_generator_all_scales() {
        // exp([[0, -t], [t, 0]]) is a rotation by t; the range of t hits every Padé branch
        for &t in &[1e-3, 0.1, 0.8, 1.9, 4.0, 40.0] {
            let g = CMat::from_row_slice(2, 2, &[cr(0.0), cr(-t), cr(t), cr(0.0)]);
            let e = expm(&g).unwrap();
            let want = CMat::from_row_slice(2, 2, &[cr(t.cos()), cr(-t.sin()), cr(t.sin()), cr(t.cos())]);
            assert!(max_abs_diff(&e, &want) < 1e-12, "t={t}");
        }
    }

    #[test]
    fn expm_nilpotent_matches_series() {
        // strictly upper triangular: the series terminates
        let n = CMat::from_row_slice(3, 3, &[cr(0.0), cr(2.0), cr(1.0), cr(0.0), cr(0.0), cr(3.0), cr(0.0), cr(0.0), cr(0.0)]);
        let want = identity(3) + &n + (&n * &n).scale(0.5);
        assert!(max_abs_diff(&expm(&n).unwrap(), &want) < 1e-12);
    }

    #[test]
    fn kron_shapes_and_entries() {
        let a = CMat::from_row_slice(1, 2, &[cr(1.0), cr(2.0)]);
        let b = CMat::from_row_slice(2, 1, &[cr(3.0), cr(4.0)]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (2, 2));
        assert_eq!(k[(0, 0)], cr(3.0));
        assert_eq!(k[(1, 1)], cr(8.0));
    }

    #[test]
    fn sector_expm_rejects_coupling() {
        let g = CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(-1.0), cr(0.0)]);
        assert!(expm_by_sectors(&g, &[0, 1]).is_err());
        let e = expm_by_sectors(&g, &[4, 4]).unwrap();
        assert!(max_abs_diff(&e, &expm(&g).unwrap()) < 1e-15);
    }

    #[test]
    fn eigh_sorted_descending() {
        let m = CMat::from_row_slice(2, 2, &[cr(1.0), c(0.0, 1.0), c(0.0, -1.0), cr(1.0)]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 2.0).abs() < 1e-12 && vals[1].abs() < 1e-12);
        let back = &vecs * CMat::from_diagonal(&DVector::from_vec(vals.iter().map(|&v| cr(v)).collect())) * vecs.adjoint();
        assert!(max_abs_diff(&back, &m) < 1e-12);
    }
}
