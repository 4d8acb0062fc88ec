//! Independent dense oracles built directly on `BigRational`.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::{One, Zero};

use qakns::matrix::Matrix;
use qakns::qop::QDOp;
use qakns::scalar::Scalar;
use qakns::xseries::XSeries;

/// Dense x-polynomial truncated at degree `nx`.
pub type Poly = Vec<BigRational>;
/// Row-major square matrix of polynomials.
pub type PMat = Vec<Vec<Poly>>;

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn pzero(nx: usize) -> Poly {
    vec![BigRational::zero(); nx + 1]
}

pub fn padd(a: &Poly, b: &Poly) -> Poly {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn pmul(a: &Poly, b: &Poly) -> Poly {
    let nx = a.len() - 1;
    let mut out = pzero(nx);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(nx + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn pscale(a: &Poly, s: &BigRational) -> Poly {
    a.iter().map(|x| x * s).collect()
}

/// `g(x) -> g(c x)`.
pub fn pdilate(a: &Poly, c: &BigRational) -> Poly {
    let mut f = BigRational::one();
    a.iter()
        .map(|x| {
            let v = x * &f;
            f = &f * c;
            v
        })
        .collect()
}

pub fn rpow(b: &BigRational, e: i64) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        r = &r * b;
    }
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

pub fn mzero(n: usize, nx: usize) -> PMat {
    vec![vec![pzero(nx); n]; n]
}

pub fn madd(a: &PMat, b: &PMat) -> PMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| padd(x, y)).collect())
        .collect()
}

pub fn mmul(a: &PMat, b: &PMat) -> PMat {
    let n = a.len();
    let nx = a[0][0].len() - 1;
    let mut out = mzero(n, nx);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] = padd(&out[i][j], &pmul(&a[i][k], &b[k][j]));
            }
        }
    }
    out
}

pub fn from_matrix(m: &Matrix<XSeries>, nx: usize) -> PMat {
    let n = m.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..=nx).map(|k| m.get(i, j).coeff(k)).collect())
                .collect()
        })
        .collect()
}

/// z-free coefficients of a band operator, keyed by `D_q` power.
pub fn symbol(op: &QDOp, nx: usize) -> BTreeMap<i64, PMat> {
    op.terms()
        .map(|(p, c)| (p, from_matrix(&c.coeff_or_zero(0), nx)))
        .collect()
}

/// Brute-force z-expansion of the pairing: multiply the Laurent symbols
/// `sum_k p_k z^k`, `A^{-1}` and `sum_l (-q)^l g_l(x/q) z^l` term by term and
/// read off the `z^{-1}` coefficient.
pub fn pairing_oracle(p: &QDOp, g: &QDOp, a: &[Scalar], q: &Scalar, nx: usize) -> PMat {
    let n = a.len();
    let mut a_inv = mzero(n, nx);
    for (i, ai) in a.iter().enumerate() {
        a_inv[i][i][0] = ai.recip();
    }
    let left: BTreeMap<i64, PMat> = symbol(p, nx)
        .into_iter()
        .map(|(k, m)| (k, mmul(&m, &a_inv)))
        .collect();
    let q_inv = q.recip();
    let minus_q = -q.clone();
    let right: BTreeMap<i64, PMat> = symbol(g, nx)
        .into_iter()
        .map(|(l, m)| {
            let f = rpow(&minus_q, l);
            let m = m
                .iter()
                .map(|row| row.iter().map(|e| pscale(&pdilate(e, &q_inv), &f)).collect())
                .collect();
            (l, m)
        })
        .collect();
    let mut product: BTreeMap<i64, PMat> = BTreeMap::new();
    for (k, x) in &left {
        for (l, y) in &right {
            let slot = product.entry(k + l).or_insert_with(|| mzero(n, nx));
            *slot = madd(slot, &mmul(x, y));
        }
    }
    product.remove(&-1).unwrap_or_else(|| mzero(n, nx))
}

/// `[m]_q = 1 + q + ... + q^{m-1}`.
pub fn q_number(q: &BigRational, m: usize) -> BigRational {
    (0..m).fold(BigRational::zero(), |acc, i| acc + rpow(q, i as i64))
}
