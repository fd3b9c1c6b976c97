//! Small dense square matrices, generic over the scalar so the same family
//! builders serve both the exact (Gaussian-rational) and the floating
//! (complex double) paths.

use num_complex::Complex64;
use num_traits::Zero;
use std::ops::{Add, Mul};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T> Mat<T> {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.dim + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Clone + Zero> Mat<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.dim {
            t = t + self.at(i, i).clone();
        }
        t
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    pub fn mul_mat(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Mat::from_fn(self.dim, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.dim {
                acc = acc + self.at(i, k).clone() * rhs.at(k, j).clone();
            }
            acc
        })
    }
}

impl Mat<Complex64> {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_and_trace() {
        let a = Mat::from_fn(2, |i, j| ((i * 2 + j) + 1) as i64); // [[1,2],[3,4]]
        let b = a.mul_mat(&a);
        assert_eq!(*b.at(0, 0), 7);
        assert_eq!(*b.at(0, 1), 10);
        assert_eq!(*b.at(1, 0), 15);
        assert_eq!(*b.at(1, 1), 22);
        assert_eq!(a.trace(), 5);
    }
}
