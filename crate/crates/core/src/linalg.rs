//! Exact linear solvers over big rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Solves `A x = b` by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled to integers; elimination then stays in `BigInt`
/// with exact divisions, and only back substitution uses rationals.
pub fn solve_fraction_free(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = b.len();
    assert_eq!(a.len(), n, "matrix/rhs dimension mismatch");
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (row, rhs) in a.iter().zip(b) {
        assert_eq!(row.len(), n, "matrix must be square");
        let lcm = row
            .iter()
            .chain(std::iter::once(rhs))
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        m.push(
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect(),
        );
    }

    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero()).ok_or(Error::Singular)?;
            m.swap(k, swap);
        }
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }

    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

/// Plain Gauss-Jordan elimination over rationals.
///
/// Kept separate from [`solve_fraction_free`] so oracles do not share the
/// solver of the code they check.
pub fn solve_gauss_jordan(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = b.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut().skip(col) {
            *v *= &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *v -= &f * p;
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Thomas algorithm for a tridiagonal system.
///
/// `lower[i]` multiplies `x[i-1]` (ignored for `i = 0`), `upper[i]` multiplies
/// `x[i+1]` (ignored for the last row).
pub fn solve_tridiagonal(
    lower: &[Rational],
    diag: &[Rational],
    upper: &[Rational],
    rhs: &[Rational],
) -> Result<Vec<Rational>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![Rational::zero(); n];
    let mut d = vec![Rational::zero(); n];
    if diag[0].is_zero() {
        return Err(Error::Singular);
    }
    c[0] = &upper[0] / &diag[0];
    d[0] = &rhs[0] / &diag[0];
    for i in 1..n {
        let denom = &diag[i] - &lower[i] * &c[i - 1];
        if denom.is_zero() {
            return Err(Error::Singular);
        }
        if i + 1 < n {
            c[i] = &upper[i] / &denom;
        }
        d[i] = (&rhs[i] - &lower[i] * &d[i - 1]) / &denom;
    }
    let mut x = vec![Rational::zero(); n];
    x[n - 1] = d[n - 1].clone();
    for i in (0..n - 1).rev() {
        x[i] = &d[i] - &c[i] * &x[i + 1];
    }
    Ok(x)
}
