//! Sparse exact Gauss-Jordan elimination over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::coeff::Q;

/// A sparse row `sum_j a_j c_j = rhs`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub coeffs: BTreeMap<usize, Q>,
    pub rhs: Q,
}

impl Row {
    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn axpy(&mut self, k: &Q, o: &Row) {
        for (j, a) in &o.coeffs {
            let e = self.coeffs.entry(*j).or_insert_with(Q::zero);
            *e += k * a;
            if e.is_zero() {
                self.coeffs.remove(j);
            }
        }
        self.rhs += k * &o.rhs;
    }
}

/// Reduced row-echelon form; pivot rows sorted by pivot column.
#[derive(Clone, Debug)]
pub struct Rref {
    pub ncols: usize,
    pub rows: BTreeMap<usize, Row>,
    pub consistent: bool,
}

impl Rref {
    pub fn new(ncols: usize) -> Rref {
        Rref { ncols, rows: BTreeMap::new(), consistent: true }
    }

    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = Row>) -> Rref {
        let mut r = Rref::new(ncols);
        for row in rows {
            r.push(row);
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Reduce a row against the current pivots and insert it if new.
    pub fn push(&mut self, mut row: Row) {
        for (p, prow) in &self.rows {
            if let Some(a) = row.coeffs.get(p).cloned() {
                row.axpy(&-a, prow);
            }
        }
        let Some((&p, a)) = row.coeffs.iter().next() else {
            if !row.rhs.is_zero() {
                self.consistent = false;
            }
            return;
        };
        let inv = Q::one() / a;
        for v in row.coeffs.values_mut() {
            *v *= &inv;
        }
        row.rhs *= &inv;
        for other in self.rows.values_mut() {
            if let Some(b) = other.coeffs.get(&p).cloned() {
                other.axpy(&-b, &row);
            }
        }
        self.rows.insert(p, row);
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|j| !self.rows.contains_key(j)).collect()
    }

    /// One basis vector per free column, with that column set to 1.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![Q::zero(); self.ncols];
                v[f] = Q::one();
                for (p, row) in &self.rows {
                    if let Some(a) = row.coeffs.get(&f) {
                        v[*p] = -a.clone();
                    }
                }
                v
            })
            .collect()
    }

    /// Solution with every free column pinned to zero.
    pub fn particular(&self) -> Option<Vec<Q>> {
        if !self.consistent {
            return None;
        }
        let mut v = vec![Q::zero(); self.ncols];
        for (p, row) in &self.rows {
            v[*p] = row.rhs.clone();
        }
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;

    fn row(c: &[(usize, i64)], rhs: i64) -> Row {
        Row { coeffs: c.iter().map(|&(j, a)| (j, q(a))).collect(), rhs: q(rhs) }
    }

    #[test]
    fn nullspace_and_particular() {
        let r = Rref::from_rows(3, [row(&[(0, 1), (1, 2)], 0), row(&[(0, 2), (1, 4)], 0), row(&[(2, 3)], 0)]);
        assert_eq!(r.rank(), 2);
        assert_eq!(r.nullspace(), vec![vec![q(-2), q(1), q(0)]]);
        let r = Rref::from_rows(2, [row(&[(0, 1), (1, 1)], 2), row(&[(0, 1), (1, -1)], 0)]);
        assert_eq!(r.particular(), Some(vec![q(1), q(1)]));
        let r = Rref::from_rows(1, [row(&[(0, 1)], 1), row(&[(0, 2)], 3)]);
        assert!(!r.consistent);
    }
}
