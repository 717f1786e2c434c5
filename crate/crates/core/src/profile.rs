//! Mixed-radix indexing of finite product sets.
//!
//! Type profiles and action profiles are both points of a product
//! `A_1 x ... x A_I` of finite index sets. Points are enumerated in
//! lexicographic order with the first coordinate most significant.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductSpace {
    dims: Vec<usize>,
}

impl ProductSpace {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    /// Number of points. Panics on overflow; callers guard sizes first.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, point: &[usize]) -> bool {
        point.len() == self.dims.len() && point.iter().zip(&self.dims).all(|(p, d)| p < d)
    }

    /// Flat row-major index of `point`.
    pub fn index_of(&self, point: &[usize]) -> Result<usize> {
        if point.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} entries, expected {}",
                point.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0usize;
        for (&p, &d) in point.iter().zip(&self.dims) {
            crate::error::check_index("profile entry", p, d)?;
            idx = idx * d + p;
        }
        Ok(idx)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn point_at(&self, mut index: usize) -> Vec<usize> {
        let mut point = vec![0; self.dims.len()];
        for (slot, &d) in point.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        point
    }

    pub fn iter(&self) -> ProductIter<'_> {
        ProductIter {
            dims: &self.dims,
            next: if self.dims.iter().all(|&d| d > 0) {
                Some(vec![0; self.dims.len()])
            } else {
                None
            },
        }
    }
}

/// Lexicographic iterator over a [`ProductSpace`].
pub struct ProductIter<'a> {
    dims: &'a [usize],
    next: Option<Vec<usize>>,
}

impl Iterator for ProductIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.dims[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_lexicographically() {
        let space = ProductSpace::new(vec![2, 3]);
        let all: Vec<_> = space.iter().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(space.index_of(p).unwrap(), i);
            assert_eq!(&space.point_at(i), p);
        }
    }

    #[test]
    fn empty_arity_has_one_point() {
        let space = ProductSpace::new(vec![]);
        assert_eq!(space.iter().count(), 1);
        assert_eq!(space.len(), 1);
    }

    #[test]
    fn rejects_out_of_range() {
        let space = ProductSpace::new(vec![2, 2]);
        assert!(space.index_of(&[2, 0]).is_err());
        assert!(space.index_of(&[0]).is_err());
    }
}
