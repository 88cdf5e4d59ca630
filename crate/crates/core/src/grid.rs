//! Dense fields on the `height x width` pixel grid.
//!
//! Storage is row-major; pixel `(i, j)` is row `i`, column `j`. Channel 1 of
//! a vector field points along the columns (x), channel 2 along the rows (y).

use std::ops::{Index, IndexMut};

use crate::error::{FlowError, Result};
use crate::scalar::Real;

/// A scalar function on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

/// Two scalar fields per pixel, e.g. a gradient or the dual variable `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2<T> {
    x: ScalarField<T>,
    y: ScalarField<T>,
}

/// Two vector fields per pixel, e.g. the dual variable `q = (q1, q2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField4<T> {
    first: VectorField2<T>,
    second: VectorField2<T>,
}

/// Pixel displacements `d = (u, v)`: `u` along x (columns), `v` along y (rows).
#[derive(Clone, Debug, PartialEq)]
pub struct FlowField<T> {
    pub u: ScalarField<T>,
    pub v: ScalarField<T>,
}

pub(crate) fn check_dims(expected: (usize, usize), got: (usize, usize)) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(FlowError::Dimension {
            expected_width: expected.0,
            expected_height: expected.1,
            width: got.0,
            height: got.1,
        })
    }
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::constant(width, height, T::zero())
    }

    pub fn constant(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a field from row-major values, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(FlowError::InvalidField(format!(
                "{} values for a {width}x{height} grid",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(FlowError::InvalidField(format!(
                "non-finite value at row {}, column {}",
                k / width.max(1),
                k % width.max(1)
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Evaluates `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.width + col] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Pointwise combination of two equally shaped fields.
    ///
    /// Panics on a shape mismatch; use [`check_same_shape`](Self::check_same_shape)
    /// first for untrusted inputs.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.dims(), other.dims(), "zip_map on mismatched fields");
        Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        check_dims(self.dims(), other.dims())
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: T, other: &Self) {
        assert_eq!(self.dims(), other.dims(), "add_scaled on mismatched fields");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + alpha * b;
        }
    }

    pub fn max_value(&self) -> T {
        self.data
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max)
    }

    pub fn min_value(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn mean(&self) -> T {
        if self.data.is_empty() {
            return T::zero();
        }
        self.data.iter().copied().sum::<T>() / T::from_usize(self.data.len()).unwrap()
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Real>(&self) -> ScalarField<U> {
        ScalarField {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ScalarField<T> {
    type Output = T;

    #[inline]
    fn index(&self, (row, col): (usize, usize)) -> &T {
        &self.data[row * self.width + col]
    }
}

impl<T> IndexMut<(usize, usize)> for ScalarField<T> {
    #[inline]
    fn index_mut(&mut self, (row, col): (usize, usize)) -> &mut T {
        &mut self.data[row * self.width + col]
    }
}

impl<T: Real> VectorField2<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            x: ScalarField::zeros(width, height),
            y: ScalarField::zeros(width, height),
        }
    }

    pub fn from_channels(x: ScalarField<T>, y: ScalarField<T>) -> Result<Self> {
        x.check_same_shape(&y)?;
        Ok(Self { x, y })
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.x.dims()
    }

    #[inline]
    pub fn x(&self) -> &ScalarField<T> {
        &self.x
    }

    #[inline]
    pub fn y(&self) -> &ScalarField<T> {
        &self.y
    }

    #[inline]
    pub fn x_mut(&mut self) -> &mut ScalarField<T> {
        &mut self.x
    }

    #[inline]
    pub fn y_mut(&mut self) -> &mut ScalarField<T> {
        &mut self.y
    }

    pub fn channels_mut(&mut self) -> (&mut ScalarField<T>, &mut ScalarField<T>) {
        (&mut self.x, &mut self.y)
    }

    pub fn into_channels(self) -> (ScalarField<T>, ScalarField<T>) {
        (self.x, self.y)
    }

    pub fn add_scaled(&mut self, alpha: T, other: &Self) {
        self.x.add_scaled(alpha, &other.x);
        self.y.add_scaled(alpha, &other.y);
    }
}

impl<T: Real> VectorField4<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            first: VectorField2::zeros(width, height),
            second: VectorField2::zeros(width, height),
        }
    }

    pub fn from_parts(first: VectorField2<T>, second: VectorField2<T>) -> Result<Self> {
        check_dims(first.dims(), second.dims())?;
        Ok(Self { first, second })
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.first.dims()
    }

    /// `q1`, paired with `u`.
    #[inline]
    pub fn first(&self) -> &VectorField2<T> {
        &self.first
    }

    /// `q2`, paired with `v`.
    #[inline]
    pub fn second(&self) -> &VectorField2<T> {
        &self.second
    }

    pub fn parts_mut(&mut self) -> (&mut VectorField2<T>, &mut VectorField2<T>) {
        (&mut self.first, &mut self.second)
    }

    pub fn into_parts(self) -> (VectorField2<T>, VectorField2<T>) {
        (self.first, self.second)
    }

    pub fn add_scaled(&mut self, alpha: T, other: &Self) {
        self.first.add_scaled(alpha, &other.first);
        self.second.add_scaled(alpha, &other.second);
    }
}

impl<T: Real> FlowField<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            u: ScalarField::zeros(width, height),
            v: ScalarField::zeros(width, height),
        }
    }

    pub fn constant(width: usize, height: usize, u: T, v: T) -> Self {
        Self {
            u: ScalarField::constant(width, height, u),
            v: ScalarField::constant(width, height, v),
        }
    }

    pub fn new(u: ScalarField<T>, v: ScalarField<T>) -> Result<Self> {
        u.check_same_shape(&v)?;
        Ok(Self { u, v })
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.u.dims()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.u.width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.u.height()
    }

    pub fn cast<U: Real>(&self) -> FlowField<U> {
        FlowField {
            u: self.u.cast(),
            v: self.v.cast(),
        }
    }
}

/// Reductions shared by the three discrete spaces. Magnitudes follow the
/// isotropic pointwise Euclidean norm over all channels of a pixel.
pub trait Field<T: Real>: Clone {
    fn dims(&self) -> (usize, usize);

    /// Per-pixel Euclidean norm over the channels.
    fn pointwise_magnitude(&self) -> ScalarField<T>;

    /// Sum over all pixels and channels of the products.
    fn inner_product(&self, other: &Self) -> Result<T>;

    fn scaled(&self, alpha: T) -> Self;

    /// Largest pointwise magnitude; zero for an empty grid.
    fn inf_norm(&self) -> T {
        self.pointwise_magnitude()
            .as_slice()
            .iter()
            .copied()
            .fold(T::zero(), T::max)
    }

    /// Sum of pointwise magnitudes.
    fn l1_norm(&self) -> T {
        self.pointwise_magnitude().as_slice().iter().copied().sum()
    }

    fn norm_squared(&self) -> T {
        self.inner_product(self).expect("same shape")
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

impl<T: Real> Field<T> for ScalarField<T> {
    fn dims(&self) -> (usize, usize) {
        ScalarField::dims(self)
    }

    fn pointwise_magnitude(&self) -> ScalarField<T> {
        self.map(T::abs)
    }

    fn inner_product(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(dot(&self.data, &other.data))
    }

    fn scaled(&self, alpha: T) -> Self {
        self.map(|x| alpha * x)
    }
}

impl<T: Real> Field<T> for VectorField2<T> {
    fn dims(&self) -> (usize, usize) {
        VectorField2::dims(self)
    }

    fn pointwise_magnitude(&self) -> ScalarField<T> {
        self.x.zip_map(&self.y, T::hypot)
    }

    fn inner_product(&self, other: &Self) -> Result<T> {
        Ok(self.x.inner_product(&other.x)? + self.y.inner_product(&other.y)?)
    }

    fn scaled(&self, alpha: T) -> Self {
        Self {
            x: self.x.scaled(alpha),
            y: self.y.scaled(alpha),
        }
    }
}

impl<T: Real> Field<T> for VectorField4<T> {
    fn dims(&self) -> (usize, usize) {
        VectorField4::dims(self)
    }

    fn pointwise_magnitude(&self) -> ScalarField<T> {
        let (w, h) = self.dims();
        let a = self.first.x.as_slice();
        let b = self.first.y.as_slice();
        let c = self.second.x.as_slice();
        let d = self.second.y.as_slice();
        let data = (0..w * h)
            .map(|k| (a[k] * a[k] + b[k] * b[k] + c[k] * c[k] + d[k] * d[k]).sqrt())
            .collect();
        ScalarField {
            width: w,
            height: h,
            data,
        }
    }

    fn inner_product(&self, other: &Self) -> Result<T> {
        Ok(self.first.inner_product(&other.first)? + self.second.inner_product(&other.second)?)
    }

    fn scaled(&self, alpha: T) -> Self {
        Self {
            first: self.first.scaled(alpha),
            second: self.second.scaled(alpha),
        }
    }
}

impl<T: Real> Field<T> for FlowField<T> {
    fn dims(&self) -> (usize, usize) {
        FlowField::dims(self)
    }

    fn pointwise_magnitude(&self) -> ScalarField<T> {
        self.u.zip_map(&self.v, T::hypot)
    }

    fn inner_product(&self, other: &Self) -> Result<T> {
        Ok(self.u.inner_product(&other.u)? + self.v.inner_product(&other.v)?)
    }

    fn scaled(&self, alpha: T) -> Self {
        Self {
            u: self.u.scaled(alpha),
            v: self.v.scaled(alpha),
        }
    }
}
