//! Three-dimensional vector algebra and the vector-valued matrix product.
//!
//! A [`VecMatrix`] is a matrix whose entries are [`Vec3`]s. It is stored as
//! three real component planes so that the vector-valued product of two such
//! matrices reduces to a handful of ordinary real matrix products:
//!
//! ```text
//! P ⊗ Q = [p2·q3 − p3·q2,  p3·q1 − p1·q3,  p1·q2 − p2·q1]
//! ```
//!
//! Entry `(i, k)` of `P ⊗ Q` is `Σ_j P[i, j] × Q[j, k]`, where `×` is the
//! 3-D cross product.

use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{s, Array2, ArrayView2, Axis};

use crate::error::{check_shape, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Vec3 { c1, c2, c3 }
    }

    pub fn splat(v: f64) -> Self {
        Vec3::new(v, v, v)
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2 + self.c3 * other.c3
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        cross(self, other)
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Vec3 {
        Vec3::new(f(self.c1), f(self.c2), f(self.c3))
    }

    pub fn is_finite(self) -> bool {
        self.c1.is_finite() && self.c2.is_finite() && self.c3.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.c1 - o.c1, self.c2 - o.c2, self.c3 - o.c3)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.c1, -self.c2, -self.c3)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.c1 * s, self.c2 * s, self.c3 * s)
    }
}

/// The 3-D vector (cross) product `x × y`.
pub fn cross(x: Vec3, y: Vec3) -> Vec3 {
    Vec3::new(
        x.c2 * y.c3 - x.c3 * y.c2,
        x.c3 * y.c1 - x.c1 * y.c3,
        x.c1 * y.c2 - x.c2 * y.c1,
    )
}

/// A rows×cols matrix of [`Vec3`] stored as three planes.
#[derive(Debug, Clone, PartialEq)]
pub struct VecMatrix {
    p1: Array2<f64>,
    p2: Array2<f64>,
    p3: Array2<f64>,
}

impl VecMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        VecMatrix {
            p1: Array2::zeros((rows, cols)),
            p2: Array2::zeros((rows, cols)),
            p3: Array2::zeros((rows, cols)),
        }
    }

    pub fn from_planes(p1: Array2<f64>, p2: Array2<f64>, p3: Array2<f64>) -> Result<Self> {
        check_shape("VecMatrix::from_planes", p1.dim(), p2.dim())?;
        check_shape("VecMatrix::from_planes", p1.dim(), p3.dim())?;
        Ok(VecMatrix { p1, p2, p3 })
    }

    /// Builds a matrix by evaluating `f(i, j)` for every entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Vec3) -> Self {
        let mut m = VecMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Every plane equal to `plane`.
    pub fn broadcast_plane(plane: &Array2<f64>) -> Self {
        VecMatrix {
            p1: plane.clone(),
            p2: plane.clone(),
            p3: plane.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        self.p1.nrows()
    }

    pub fn cols(&self) -> usize {
        self.p1.ncols()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.p1.dim()
    }

    pub fn p1(&self) -> &Array2<f64> {
        &self.p1
    }

    pub fn p2(&self) -> &Array2<f64> {
        &self.p2
    }

    pub fn p3(&self) -> &Array2<f64> {
        &self.p3
    }

    pub fn planes(&self) -> [&Array2<f64>; 3] {
        [&self.p1, &self.p2, &self.p3]
    }

    pub fn planes_mut(&mut self) -> [&mut Array2<f64>; 3] {
        [&mut self.p1, &mut self.p2, &mut self.p3]
    }

    pub fn into_planes(self) -> [Array2<f64>; 3] {
        [self.p1, self.p2, self.p3]
    }

    pub fn get(&self, i: usize, j: usize) -> Vec3 {
        Vec3::new(self.p1[[i, j]], self.p2[[i, j]], self.p3[[i, j]])
    }

    pub fn set(&mut self, i: usize, j: usize, v: Vec3) {
        self.p1[[i, j]] = v.c1;
        self.p2[[i, j]] = v.c2;
        self.p3[[i, j]] = v.c3;
    }

    pub fn t(&self) -> VecMatrix {
        self.map_planes(|p| p.t().to_owned())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> VecMatrix {
        self.map_planes(|p| p.mapv(&f))
    }

    fn map_planes(&self, f: impl Fn(&Array2<f64>) -> Array2<f64>) -> VecMatrix {
        VecMatrix {
            p1: f(&self.p1),
            p2: f(&self.p2),
            p3: f(&self.p3),
        }
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> VecMatrix {
        self.map_planes(|p| p.slice(s![start..end, ..]).to_owned())
    }

    /// Stacks `top` above `bottom`.
    pub fn vstack(top: &VecMatrix, bottom: &VecMatrix) -> Result<VecMatrix> {
        if top.cols() != bottom.cols() {
            return Err(Error::ShapeMismatch {
                op: "VecMatrix::vstack",
                left: top.dim(),
                right: bottom.dim(),
            });
        }
        let cat = |a: &Array2<f64>, b: &Array2<f64>| {
            ndarray::concatenate(Axis(0), &[a.view(), b.view()]).expect("column counts checked")
        };
        Ok(VecMatrix {
            p1: cat(&top.p1, &bottom.p1),
            p2: cat(&top.p2, &bottom.p2),
            p3: cat(&top.p3, &bottom.p3),
        })
    }

    /// Concatenates matrices with equal row counts left to right.
    pub fn hstack(parts: &[VecMatrix]) -> Result<VecMatrix> {
        let first = parts.first().ok_or(Error::EmptyInput("VecMatrix::hstack"))?;
        for p in parts {
            if p.rows() != first.rows() {
                return Err(Error::ShapeMismatch {
                    op: "VecMatrix::hstack",
                    left: first.dim(),
                    right: p.dim(),
                });
            }
        }
        let cat = |pick: fn(&VecMatrix) -> ArrayView2<'_, f64>| {
            let views: Vec<_> = parts.iter().map(pick).collect();
            ndarray::concatenate(Axis(1), &views).expect("row counts checked")
        };
        Ok(VecMatrix {
            p1: cat(|m| m.p1.view()),
            p2: cat(|m| m.p2.view()),
            p3: cat(|m| m.p3.view()),
        })
    }

    /// Gathers the given columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> VecMatrix {
        self.map_planes(|p| p.select(Axis(1), cols))
    }

    /// Adds the single column `bias` (rows×1) to every column.
    pub fn add_column(&self, bias: &VecMatrix) -> Result<VecMatrix> {
        if bias.cols() != 1 || bias.rows() != self.rows() {
            return Err(Error::ShapeMismatch {
                op: "VecMatrix::add_column",
                left: self.dim(),
                right: bias.dim(),
            });
        }
        Ok(VecMatrix {
            p1: &self.p1 + &bias.p1,
            p2: &self.p2 + &bias.p2,
            p3: &self.p3 + &bias.p3,
        })
    }

    /// Sums over columns, giving a rows×1 matrix.
    pub fn sum_cols(&self) -> VecMatrix {
        self.map_planes(|p| p.sum_axis(Axis(1)).insert_axis(Axis(1)))
    }

    pub fn is_finite(&self) -> bool {
        self.planes().iter().all(|p| p.iter().all(|v| v.is_finite()))
    }

    pub fn max_abs_diff(&self, other: &VecMatrix) -> f64 {
        self.planes()
            .iter()
            .zip(other.planes())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// `P ⊗ Q` computed as real matrix products over the component planes.
pub fn vec_matmul(p: &VecMatrix, q: &VecMatrix) -> Result<VecMatrix> {
    check_inner("vec_matmul", p, q)?;
    let c1 = p.p2.dot(&q.p3) - p.p3.dot(&q.p2);
    let c2 = p.p3.dot(&q.p1) - p.p1.dot(&q.p3);
    let c3 = p.p1.dot(&q.p2) - p.p2.dot(&q.p1);
    Ok(VecMatrix {
        p1: c1,
        p2: c2,
        p3: c3,
    })
}

/// Entry-by-entry `Σ_j cross(P[i, j], Q[j, k])`. Slow; used as an oracle.
pub fn vec_matmul_naive(p: &VecMatrix, q: &VecMatrix) -> Result<VecMatrix> {
    check_inner("vec_matmul_naive", p, q)?;
    let inner = p.cols();
    Ok(VecMatrix::from_fn(p.rows(), q.cols(), |i, k| {
        (0..inner).fold(Vec3::ZERO, |acc, j| acc + cross(p.get(i, j), q.get(j, k)))
    }))
}

fn check_inner(op: &'static str, p: &VecMatrix, q: &VecMatrix) -> Result<()> {
    if p.cols() == q.rows() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            op,
            left: p.dim(),
            right: q.dim(),
        })
    }
}

pub fn vm_add(a: &VecMatrix, b: &VecMatrix) -> Result<VecMatrix> {
    check_shape("vm_add", a.dim(), b.dim())?;
    Ok(VecMatrix {
        p1: &a.p1 + &b.p1,
        p2: &a.p2 + &b.p2,
        p3: &a.p3 + &b.p3,
    })
}

pub fn vm_sub(a: &VecMatrix, b: &VecMatrix) -> Result<VecMatrix> {
    check_shape("vm_sub", a.dim(), b.dim())?;
    Ok(VecMatrix {
        p1: &a.p1 - &b.p1,
        p2: &a.p2 - &b.p2,
        p3: &a.p3 - &b.p3,
    })
}

pub fn vm_scale(a: &VecMatrix, s: f64) -> VecMatrix {
    a.map(|v| v * s)
}

/// Squared Frobenius norm summed over all three planes.
pub fn vm_frob_sq(a: &VecMatrix) -> f64 {
    a.planes()
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vm(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> VecMatrix {
        VecMatrix::from_fn(rows, cols, |_, _| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
    }

    #[test]
    fn cross_examples() {
        assert_eq!(
            cross(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)),
            Vec3::new(0.0, 0.0, 1.0)
        );
        let a = Vec3::new(0.3, -2.0, 7.5);
        assert_eq!(cross(a, a), Vec3::ZERO);
        assert_eq!(
            cross(Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0)),
            Vec3::new(-3.0, 6.0, -3.0)
        );
    }

    #[test]
    fn zero_product() {
        let z = VecMatrix::zeros(3, 3);
        assert_eq!(vec_matmul(&z, &z).unwrap(), z);
    }

    #[test]
    fn one_by_one_is_cross() {
        let x = Vec3::new(1.0, 2.0, 3.0);
        let y = Vec3::new(4.0, 5.0, 6.0);
        let p = VecMatrix::from_fn(1, 1, |_, _| x);
        let q = VecMatrix::from_fn(1, 1, |_, _| y);
        assert_eq!(vec_matmul(&p, &q).unwrap().get(0, 0), cross(x, y));
    }

    #[test]
    fn fast_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_vm(&mut rng, 4, 3);
        let q = random_vm(&mut rng, 3, 2);
        let fast = vec_matmul(&p, &q).unwrap();
        let slow = vec_matmul_naive(&p, &q).unwrap();
        assert_eq!(fast.dim(), (4, 2));
        assert!(fast.max_abs_diff(&slow) <= 1e-12);
    }

    #[test]
    fn naive_identity_pattern() {
        // P diagonal-only entries pick out a single j per row.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_vm(&mut rng, 3, 3);
        let mut p = VecMatrix::zeros(3, 3);
        let e = Vec3::new(0.5, -1.0, 2.0);
        for i in 0..3 {
            p.set(i, i, e);
        }
        let r = vec_matmul_naive(&p, &q).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(r.get(i, k), cross(e, q.get(i, k)));
            }
        }
        let zero_q = VecMatrix::zeros(3, 2);
        assert_eq!(vec_matmul_naive(&p, &zero_q).unwrap(), VecMatrix::zeros(3, 2));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let p = VecMatrix::zeros(2, 3);
        let q = VecMatrix::zeros(2, 3);
        assert!(matches!(vec_matmul(&p, &q), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(
            vec_matmul_naive(&p, &q),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(vm_add(&p, &VecMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn plumbing_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_vm(&mut rng, 2, 5);
        assert_eq!(vm_add(&a, &VecMatrix::zeros(2, 5)).unwrap(), a);
        assert_eq!(vm_frob_sq(&VecMatrix::zeros(4, 4)), 0.0);
        let ones = VecMatrix::from_fn(2, 2, |_, _| Vec3::splat(1.0));
        assert_eq!(vm_frob_sq(&ones), 12.0);
        assert_eq!(vm_frob_sq(&vm_scale(&ones, 2.0)), 48.0);
    }

    #[test]
    fn stacking_and_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_vm(&mut rng, 2, 4);
        let b = random_vm(&mut rng, 3, 4);
        let st = VecMatrix::vstack(&a, &b).unwrap();
        assert_eq!(st.row_block(0, 2), a);
        assert_eq!(st.row_block(2, 5), b);
        let picked = a.select_cols(&[3, 1]);
        assert_eq!(picked.get(1, 0), a.get(1, 3));
        let h = VecMatrix::hstack(&[a.select_cols(&[0, 1]), a.select_cols(&[2, 3])]).unwrap();
        assert_eq!(h, a);
    }
}
