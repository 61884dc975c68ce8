//! Small exact linear-algebra kit over `BigInt` / `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntVec = Vec<BigInt>;
pub type RatVec = Vec<BigRational>;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn rat_dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Gcd of all entries (zero for the zero vector).
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Divides out the content. The zero vector is returned unchanged.
pub fn primitive(v: &[BigInt]) -> IntVec {
    let c = content(v);
    if c.is_zero() || c.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &c).collect()
}

/// `a*x + b*y`, entrywise.
pub fn combine(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> IntVec {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

pub fn to_rat(v: &[BigInt]) -> RatVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn clear_denominators(v: &[BigRational]) -> IntVec {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: IntVec = v.iter().map(|x| (x * &l).to_integer()).collect();
    primitive(&scaled)
}

/// Returns the integer vector if every entry is integral.
pub fn as_integral(v: &[BigRational]) -> Option<IntVec> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [RatVec]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (head, tail) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&mut a[i], &b[0])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&mut b[0], &a[r])
                };
                for (x, y) in head.iter_mut().zip(tail.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_rat(rows: &[RatVec]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

pub fn rank(rows: &[IntVec]) -> usize {
    let m: Vec<RatVec> = rows.iter().map(|r| to_rat(r)).collect();
    rank_rat(&m)
}

/// Basis of `{x : rows · x = 0}` over the rationals.
pub fn nullspace(rows: &[RatVec], n: usize) -> Vec<RatVec> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); n];
        v[free] = BigRational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn inverse(m: &[RatVec]) -> Option<Vec<RatVec>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut aug: Vec<RatVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "inverse of a non-square matrix");
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(m: &[RatVec]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Solves `y · basis = v` for `y`; `None` if `v` is outside the row space.
pub fn solve_in_rows(basis: &[RatVec], v: &[BigRational]) -> Option<RatVec> {
    let k = basis.len();
    let n = v.len();
    // Columns of the system are the basis vectors; unknowns are y.
    let mut m: Vec<RatVec> = (0..n)
        .map(|j| {
            let mut row: RatVec = basis.iter().map(|b| b[j].clone()).collect();
            row.push(v[j].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        return None;
    }
    let mut y = vec![BigRational::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        y[p] = m[r][k].clone();
    }
    Some(y)
}

pub fn mat_mul(a: &[RatVec], b: &[RatVec]) -> Vec<RatVec> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|t| &row[t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn int_mat_mul(a: &[IntVec], b: &[IntVec]) -> Vec<IntVec> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|t| &row[t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn identity(n: usize) -> Vec<IntVec> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Lexicographic comparison used for every deterministic vector ordering.
pub fn lex_cmp(a: &[BigInt], b: &[BigInt]) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

pub fn abs_min_index(v: &[BigInt]) -> Option<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .min_by(|(_, x), (_, y)| x.abs().cmp(&y.abs()))
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![r(2, 1), r(1, 3)], vec![r(-1, 2), r(5, 1)]];
        let inv = inverse(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { r(1, 1) } else { r(0, 1) });
            }
        }
        assert_eq!(determinant(&m), r(2 * 5, 1) + r(1, 6));
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = vec![vec![r(1, 1), r(2, 1)], vec![r(2, 1), r(4, 1)]];
        assert!(inverse(&m).is_none());
        assert!(determinant(&m).is_zero());
    }

    #[test]
    fn nullspace_is_orthogonal() {
        let rows = vec![to_rat(&int_vec(&[1, 2, 3])), to_rat(&int_vec(&[0, 1, 1]))];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for row in &rows {
            assert!(rat_dot(row, &ns[0]).is_zero());
        }
    }

    #[test]
    fn primitive_divides_content() {
        assert_eq!(primitive(&int_vec(&[4, -6, 0])), int_vec(&[2, -3, 0]));
        assert_eq!(primitive(&int_vec(&[0, 0])), int_vec(&[0, 0]));
    }
}
