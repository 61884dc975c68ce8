//! Integer lattices: Smith and Hermite normal forms, saturation, kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linalg::{self, IntVec};
use super::ConeError;

/// `u * m * v = diag(d)` with `u`, `v` unimodular. `v_inv` is carried along so
/// callers get a lattice basis adapted to the row space without inverting.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub u: Vec<IntVec>,
    pub v: Vec<IntVec>,
    pub v_inv: Vec<IntVec>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

pub fn smith(m: &[IntVec], cols: usize) -> Smith {
    let rows = m.len();
    let mut a: Vec<IntVec> = m.to_vec();
    let mut u = linalg::identity(rows);
    let mut v = linalg::identity(cols);
    let mut v_inv = linalg::identity(cols);
    let mut diagonal = Vec::new();

    let mut t = 0;
    while t < rows.min(cols) {
        // pick the smallest nonzero entry of the trailing block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        v_inv.swap(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                // inverse of the column operation acts on rows of v_inv
                let row_j = v_inv[j].clone();
                for (x, y) in v_inv[t].iter_mut().zip(&row_j) {
                    *x += &q * y;
                }
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, t, j);
                    swap_cols(&mut v, t, j);
                    v_inv.swap(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // enforce divisibility d_t | every remaining entry
            let mut fixed = true;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        let one = BigInt::one();
                        row_axpy(&mut a, t, i, &-one.clone());
                        row_axpy(&mut u, t, i, &-one);
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        diagonal.push(a[t][t].clone());
        t += 1;
    }
    Smith {
        diagonal,
        u,
        v,
        v_inv,
    }
}

fn swap_cols(m: &mut [IntVec], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// row_i -= q * row_t
fn row_axpy(m: &mut [IntVec], i: usize, t: usize, q: &BigInt) {
    let src = m[t].clone();
    for (x, y) in m[i].iter_mut().zip(&src) {
        *x -= q * y;
    }
}

/// col_j -= q * col_t
fn col_axpy(m: &mut [IntVec], j: usize, t: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = q * &row[t];
        row[j] -= s;
    }
}

/// Row-style Hermite normal form: positive pivots, entries above a pivot
/// reduced into `[0, pivot)`, zero rows dropped.
pub fn hermite(rows: &[IntVec], cols: usize) -> Vec<IntVec> {
    let mut a: Vec<IntVec> = rows.iter().filter(|r| !linalg::is_zero(r)).cloned().collect();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        loop {
            let Some(p) = (r..a.len())
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()))
            else {
                break;
            };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                row_axpy(&mut a, i, r, &q);
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = a[i][c].div_floor(&a[r][c]);
                if !q.is_zero() {
                    row_axpy(&mut a, i, r, &q);
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// A sublattice of `Z^ambient_rank` given by linearly independent basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: Vec<IntVec>,
}

impl Sublattice {
    pub fn new(ambient_rank: usize, basis: Vec<IntVec>) -> Result<Self, ConeError> {
        for b in &basis {
            if b.len() != ambient_rank {
                return Err(ConeError::LengthMismatch {
                    expected: ambient_rank,
                    found: b.len(),
                });
            }
        }
        if linalg::rank(&basis) != basis.len() {
            return Err(ConeError::DependentBasis);
        }
        Ok(Self {
            ambient_rank,
            basis,
        })
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn basis(&self) -> &[IntVec] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `(self ⊗ Q) ∩ Z^n`, with basis in Hermite normal form.
    pub fn saturate(&self) -> Sublattice {
        Sublattice {
            ambient_rank: self.ambient_rank,
            basis: saturated_basis(&self.basis, self.ambient_rank),
        }
    }

    /// Index of `self` in its saturation.
    pub fn index_in_saturation(&self) -> BigInt {
        smith(&self.basis, self.ambient_rank)
            .diagonal
            .iter()
            .product()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let basis: Vec<_> = self.basis.iter().map(|b| linalg::to_rat(b)).collect();
        linalg::solve_in_rows(&basis, &linalg::to_rat(v))
            .is_some_and(|y| y.iter().all(|x| x.is_integer()))
    }
}

/// Hermite basis of the saturation of the row span of `rows` (any rank).
pub fn saturated_basis(rows: &[IntVec], cols: usize) -> Vec<IntVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let s = smith(rows, cols);
    let r = s.rank();
    hermite(&s.v_inv[..r], cols)
}

/// Integer basis of `{x ∈ Z^cols : rows · x = 0}` (automatically saturated).
pub fn kernel_basis(rows: &[IntVec], cols: usize) -> Vec<IntVec> {
    if rows.is_empty() {
        return linalg::identity(cols);
    }
    let s = smith(rows, cols);
    let r = s.rank();
    let v_t = linalg::transpose(&s.v, cols);
    hermite(&v_t[r..], cols)
}

/// A unimodular basis of `Z^cols` whose first rows span the saturation of
/// `rows`. Returns `(basis, rank)`.
pub fn adapted_basis(rows: &[IntVec], cols: usize) -> (Vec<IntVec>, usize) {
    if rows.is_empty() {
        return (linalg::identity(cols), 0);
    }
    let s = smith(rows, cols);
    (s.v_inv.clone(), s.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use linalg::int_vec;

    fn check_smith(m: &[IntVec], cols: usize) {
        let s = smith(m, cols);
        let d = linalg::int_mat_mul(&linalg::int_mat_mul(&s.u, m), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j && i < s.rank() {
                    assert_eq!(*x, s.diagonal[i]);
                } else {
                    assert!(x.is_zero(), "off-diagonal {x} at {i},{j}");
                }
            }
        }
        for w in s.diagonal.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        let vv = linalg::int_mat_mul(&s.v, &s.v_inv);
        assert_eq!(vv, linalg::identity(cols));
    }

    #[test]
    fn smith_small_matrices() {
        check_smith(&[int_vec(&[2, 4, 4]), int_vec(&[-6, 6, 12]), int_vec(&[10, -4, -16])], 3);
        check_smith(&[int_vec(&[2, 0]), int_vec(&[0, 3])], 2);
        check_smith(&[int_vec(&[6, 3, 2])], 3);
        check_smith(&[int_vec(&[0, 0])], 2);
    }

    #[test]
    fn saturate_examples() {
        let s = Sublattice::new(2, vec![int_vec(&[2, 0])]).unwrap();
        assert_eq!(s.saturate().basis(), &[int_vec(&[1, 0])]);
        let s = Sublattice::new(2, vec![int_vec(&[2, 2])]).unwrap();
        assert_eq!(s.saturate().basis(), &[int_vec(&[1, 1])]);
        let s = Sublattice::new(2, vec![int_vec(&[2, 0]), int_vec(&[0, 3])]).unwrap();
        assert_eq!(s.index_in_saturation(), BigInt::from(6));
        assert_eq!(s.saturate().basis(), &[int_vec(&[1, 0]), int_vec(&[0, 1])]);
    }

    #[test]
    fn dependent_basis_rejected() {
        assert!(Sublattice::new(2, vec![int_vec(&[1, 2]), int_vec(&[2, 4])]).is_err());
    }

    #[test]
    fn kernel_of_row() {
        let k = kernel_basis(&[int_vec(&[6, 3, 2])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(linalg::dot(v, &int_vec(&[6, 3, 2])).is_zero());
        }
        // saturated: the kernel lattice has index 1 in its saturation
        assert_eq!(Sublattice::new(3, k).unwrap().index_in_saturation(), BigInt::one());
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite(&[int_vec(&[1, 1]), int_vec(&[0, 2])], 2);
        let b = hermite(&[int_vec(&[1, 3]), int_vec(&[0, 2]), int_vec(&[2, 2])], 2);
        assert_eq!(a, b);
    }
}
