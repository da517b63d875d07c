//! Exact subspaces of `K^n` kept in reduced row echelon form.

use crate::field::{FieldSpec, Scalar};

/// A subspace with its unique reduced row echelon basis, so `==` is equality
/// of subspaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: FieldSpec,
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: FieldSpec, dim: usize) -> Self {
        Subspace { field, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by<I: IntoIterator<Item = Vec<Scalar>>>(field: FieldSpec, dim: usize, vectors: I) -> Self {
        let mut s = Subspace::zero(field, dim);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dimension(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        assert_eq!(v.len(), self.dim, "vector length must match the ambient dimension");
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (vi, ri) in v.iter_mut().zip(row) {
                    if !ri.is_zero() {
                        *vi = &*vi - &(&c * ri);
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v.to_vec()).iter().all(Scalar::is_zero)
    }

    /// Adds `v` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("pivot is nonzero");
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for (ri, vi) in row.iter_mut().zip(&v) {
                    if !vi.is_zero() {
                        *ri = &*ri - &(&c * vi);
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_q(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| FieldSpec::Rationals.from_i64(x)).collect()
    }

    #[test]
    fn rank_and_membership() {
        let s = Subspace::spanned_by(FieldSpec::Rationals, 3, [vec_q(&[1, 2, 3]), vec_q(&[2, 4, 6]), vec_q(&[0, 1, 1])]);
        assert_eq!(s.dimension(), 2);
        assert!(s.contains(&vec_q(&[1, 3, 4])));
        assert!(!s.contains(&vec_q(&[0, 0, 1])));
    }

    #[test]
    fn rref_is_canonical() {
        let a = Subspace::spanned_by(FieldSpec::Rationals, 3, [vec_q(&[1, 1, 0]), vec_q(&[0, 1, 1])]);
        let b = Subspace::spanned_by(FieldSpec::Rationals, 3, [vec_q(&[1, 2, 1]), vec_q(&[1, 0, -1])]);
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[vec_q(&[1, 0, -1]), vec_q(&[0, 1, 1])]);
    }

    #[test]
    fn prime_field_dependence() {
        let f = FieldSpec::prime(5).unwrap();
        let v = |xs: &[i64]| xs.iter().map(|&x| f.from_i64(x)).collect::<Vec<_>>();
        // (1,2) and (3,1) are dependent mod 5 since 3*(1,2) = (3,6) = (3,1)
        let s = Subspace::spanned_by(f, 2, [v(&[1, 2]), v(&[3, 1])]);
        assert_eq!(s.dimension(), 1);
    }
}
