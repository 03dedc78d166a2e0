//! Exact rational scalars and the small dense linear algebra the Weingarten
//! inversion needs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

pub type ExactRational = BigRational;

pub fn int(n: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> ExactRational {
    ExactRational::new(BigInt::from(num), BigInt::from(den))
}

/// `base^exp` as an exact rational.
pub fn pow_u64(base: u64, exp: usize) -> ExactRational {
    ExactRational::from_integer(num_traits::pow(BigInt::from(base), exp))
}

pub fn to_f64(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Decimal-string form used by every JSON export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&ExactRational> for RationalJson {
    fn from(q: &ExactRational) -> Self {
        Self {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

pub type Matrix = Vec<Vec<ExactRational>>;

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let rows = a.len();
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![ExactRational::zero(); cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &Matrix, x: &[ExactRational]) -> Vec<ExactRational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(r, v)| !r.is_zero() && !v.is_zero())
                .fold(ExactRational::zero(), |acc, (r, v)| acc + r * v)
        })
        .collect()
}

// Row-reduces the augmented system in place; returns pivot columns.
fn row_reduce(a: &mut Matrix, b: &mut [ExactRational]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..cols {
                if !a[r][j].is_zero() {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
            let t = &f * &b[r];
            b[i] -= t;
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `a x = b` for square nonsingular `a`; `None` when singular.
pub fn solve_unique(a: &Matrix, b: &[ExactRational]) -> Option<Vec<ExactRational>> {
    let n = a.len();
    let mut a = a.clone();
    let mut b = b.to_vec();
    let pivots = row_reduce(&mut a, &mut b);
    if pivots.len() < n {
        return None;
    }
    Some(b)
}

/// Some solution of a consistent (possibly singular) system, with free
/// variables set to zero; `None` if inconsistent.
pub fn solve_consistent(a: &Matrix, b: &[ExactRational]) -> Option<Vec<ExactRational>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut a = a.clone();
    let mut b = b.to_vec();
    let pivots = row_reduce(&mut a, &mut b);
    if b[pivots.len()..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![ExactRational::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = b[row].clone();
    }
    Some(x)
}

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        ExactRational::one()
                    } else {
                        ExactRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn solves_two_by_two() {
        // [[9,3],[3,9]] x = [1,0] -> x = [1/8, -1/24]
        let x = solve_unique(&m(&[&[9, 3], &[3, 9]]), &[int(1), int(0)]).unwrap();
        assert_eq!(x, vec![ratio(1, 8), ratio(-1, 24)]);
    }

    #[test]
    fn detects_singular() {
        assert!(solve_unique(&m(&[&[1, 2], &[2, 4]]), &[int(1), int(0)]).is_none());
        let x = solve_consistent(&m(&[&[1, 2], &[2, 4]]), &[int(1), int(2)]).unwrap();
        assert_eq!(mat_vec(&m(&[&[1, 2], &[2, 4]]), &x), vec![int(1), int(2)]);
        assert!(solve_consistent(&m(&[&[1, 2], &[2, 4]]), &[int(1), int(0)]).is_none());
    }

    #[test]
    fn json_is_decimal_strings() {
        let j = RationalJson::from(&ratio(-6, 144));
        assert_eq!(j.num, "-1");
        assert_eq!(j.den, "24");
    }
}
