//! Periodic lattices for the flat 4-torus `X = Σ×Σ` and the flat 2-torus `Σ`.
//!
//! Sites are stored in row-major order with the last axis fastest, so on a
//! 4D grid the linear index is `((x0·N1 + x1)·N2 + x2)·N3 + x3`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{MomentValue, Quaternion};

/// Name of the generator behind [`random_smooth_field`], recorded in reports.
pub const GENERATOR: &str = "ChaCha8Rng";

/// Smallest number of sites allowed along any axis.
pub const MIN_SITES: usize = 4;

/// Chunk length for deterministic reductions. Independent of worker count.
const REDUCE_CHUNK: usize = 1024;

/// Fields smaller than this are mapped on the calling thread.
#[cfg(feature = "parallel")]
const PARALLEL_MIN_SITES: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<const D: usize> {
    sizes: [usize; D],
    lengths: [f64; D],
}

pub type Grid4 = Grid<4>;
pub type Grid2 = Grid<2>;

impl<const D: usize> Grid<D> {
    pub fn new(sizes: [usize; D], lengths: [f64; D]) -> Result<Self> {
        for (axis, (&n, &l)) in sizes.iter().zip(lengths.iter()).enumerate() {
            if n < MIN_SITES {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} has {n} sites, need at least {MIN_SITES}"
                )));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} has non-positive length {l}"
                )));
            }
        }
        Ok(Self { sizes, lengths })
    }

    /// Unit side lengths.
    pub fn unit(sizes: [usize; D]) -> Result<Self> {
        Self::new(sizes, [1.0; D])
    }

    /// Grid without the minimum-size check. Used for 1-site transverse
    /// directions in snapshots of reduced data.
    pub(crate) fn new_unchecked(sizes: [usize; D], lengths: [f64; D]) -> Self {
        Self { sizes, lengths }
    }

    pub fn sizes(&self) -> [usize; D] {
        self.sizes
    }

    pub fn lengths(&self) -> [f64; D] {
        self.lengths
    }

    pub fn size(&self, axis: usize) -> usize {
        self.sizes[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.sizes[axis] as f64
    }

    pub fn spacings(&self) -> [f64; D] {
        std::array::from_fn(|a| self.spacing(a))
    }

    /// Coordinate volume of one cell, `Π h_μ`.
    pub fn cell_volume(&self) -> f64 {
        (0..D).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn site_count(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.sizes[axis + 1..].iter().product()
    }

    pub fn index(&self, coords: [usize; D]) -> usize {
        let mut idx = 0;
        for a in 0..D {
            idx = idx * self.sizes[a] + coords[a] % self.sizes[a];
        }
        idx
    }

    pub fn coords(&self, mut idx: usize) -> [usize; D] {
        let mut c = [0; D];
        for a in (0..D).rev() {
            c[a] = idx % self.sizes[a];
            idx /= self.sizes[a];
        }
        c
    }

    /// Index of the site `steps` cells away along `axis`, with wraparound.
    pub fn neighbor(&self, idx: usize, axis: usize, steps: isize) -> usize {
        let n = self.sizes[axis] as isize;
        let stride = self.stride(axis);
        let c = (idx / stride) as isize % n;
        let shifted = (c + steps).rem_euclid(n);
        (idx as isize + (shifted - c) * stride as isize) as usize
    }

    /// Physical coordinate of a site (cell corners at `k·h`).
    pub fn position(&self, idx: usize) -> [f64; D] {
        let c = self.coords(idx);
        std::array::from_fn(|a| c[a] as f64 * self.spacing(a))
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.sizes, other.sizes
            )))
        }
    }
}

impl Grid4 {
    /// The Σ-factor carrying `(x0, x1)`.
    pub fn factor1(&self) -> Grid2 {
        Grid2::new_unchecked([self.sizes[0], self.sizes[1]], [self.lengths[0], self.lengths[1]])
    }

    /// The Σ-factor carrying `(x2, x3)`.
    pub fn factor2(&self) -> Grid2 {
        Grid2::new_unchecked([self.sizes[2], self.sizes[3]], [self.lengths[2], self.lengths[3]])
    }
}

/// Site-indexed values on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<const D: usize, T = f64> {
    grid: Grid<D>,
    data: Vec<T>,
}

pub type ScalarField4 = Field<4, f64>;
pub type ScalarField2 = Field<2, f64>;

impl<const D: usize, T: Copy + Default + Send + Sync> Field<D, T> {
    pub fn zeros(grid: Grid<D>) -> Self {
        Self {
            grid,
            data: vec![T::default(); grid.site_count()],
        }
    }

    pub fn constant(grid: Grid<D>, value: T) -> Self {
        Self {
            grid,
            data: vec![value; grid.site_count()],
        }
    }

    pub fn from_vec(grid: Grid<D>, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.site_count() {
            return Err(Error::SizeMismatch(format!(
                "{} values for {} sites",
                data.len(),
                grid.site_count()
            )));
        }
        Ok(Self { grid, data })
    }

    /// Builds a field site by site. Sites are independent, so this may run
    /// in parallel; the result does not depend on the worker count.
    pub fn from_fn<F>(grid: Grid<D>, f: F) -> Self
    where
        F: Fn(usize) -> T + Sync + Send,
    {
        Self {
            grid,
            data: site_map(grid.site_count(), f),
        }
    }

    pub fn grid(&self) -> &Grid<D> {
        &self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn map<U, F>(&self, f: F) -> Field<D, U>
    where
        U: Copy + Default + Send + Sync,
        F: Fn(T) -> U + Sync + Send,
    {
        let data = &self.data;
        Field::from_fn(self.grid, |i| f(data[i]))
    }

    pub fn zip_map<U, V, F>(&self, other: &Field<D, U>, f: F) -> Result<Field<D, V>>
    where
        U: Copy + Default + Send + Sync,
        V: Copy + Default + Send + Sync,
        F: Fn(T, U) -> V + Sync + Send,
    {
        self.grid.check_same(other.grid())?;
        let (a, b) = (&self.data, other.data());
        Ok(Field::from_fn(self.grid, |i| f(a[i], b[i])))
    }

    /// `g(x) = f(x + steps·ê_axis)`.
    pub fn shifted(&self, axis: usize, steps: isize) -> Self {
        let grid = self.grid;
        let data = &self.data;
        Self::from_fn(grid, |i| data[grid.neighbor(i, axis, steps)])
    }
}

impl<const D: usize> Field<D, f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + s * b)
    }

    /// Plain sum over sites, in a fixed order.
    pub fn sum(&self) -> f64 {
        deterministic_sum(&self.data)
    }

    /// `Σ_sites f · Π h_μ`.
    pub fn integral(&self) -> f64 {
        self.sum() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    /// Plain `L²` inner product `Σ f g · Π h_μ`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        Ok(self.zip_map(other, |a, b| a * b)?.integral())
    }
}

impl<const D: usize> Field<D, Quaternion> {
    pub fn max_abs(&self) -> f64 {
        self.data().iter().fold(0.0, |m, q| m.max(q.max_abs()))
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        Ok(self.zip_map(other, |a, b| a.dot(b))?.integral())
    }

    pub fn component(&self, c: usize) -> Field<D, f64> {
        self.map(move |q| q.to_array()[c])
    }

    pub fn from_components(parts: [&Field<D, f64>; 4]) -> Result<Self> {
        let grid = *parts[0].grid();
        for p in &parts[1..] {
            grid.check_same(p.grid())?;
        }
        Ok(Self::from_fn(grid, |i| {
            Quaternion::new(parts[0].data()[i], parts[1].data()[i], parts[2].data()[i], parts[3].data()[i])
        }))
    }
}

impl<const D: usize> Field<D, MomentValue> {
    pub fn max_abs(&self) -> f64 {
        self.data().iter().fold(0.0, |m, v| m.max(v.max_abs()))
    }

    pub fn component(&self, c: usize) -> Field<D, f64> {
        self.map(move |m| m.to_array()[c])
    }
}

#[cfg(feature = "parallel")]
fn site_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if n < PARALLEL_MIN_SITES {
        return (0..n).map(f).collect();
    }
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn site_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sum with a summation order fixed by the data length alone: fixed-size
/// chunks summed left to right, then the chunk totals left to right.
pub fn deterministic_sum(values: &[f64]) -> f64 {
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = if values.len() < PARALLEL_MIN_SITES {
        values.chunks(REDUCE_CHUNK).map(|c| c.iter().sum::<f64>()).collect()
    } else {
        use rayon::prelude::*;
        values
            .par_chunks(REDUCE_CHUNK)
            .map(|c| c.iter().sum::<f64>())
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = values
        .chunks(REDUCE_CHUNK)
        .map(|c| c.iter().sum::<f64>())
        .collect();
    partials.iter().sum()
}

/// `(f(x+μ̂) − f(x)) / h_μ`.
pub fn fwd_diff<const D: usize>(field: &Field<D>, axis: usize) -> Field<D> {
    let grid = *field.grid();
    let h = grid.spacing(axis);
    let d = field.data();
    Field::from_fn(grid, |i| (d[grid.neighbor(i, axis, 1)] - d[i]) / h)
}

/// `(f(x) − f(x−μ̂)) / h_μ`, the negative adjoint of [`fwd_diff`].
pub fn bwd_diff<const D: usize>(field: &Field<D>, axis: usize) -> Field<D> {
    let grid = *field.grid();
    let h = grid.spacing(axis);
    let d = field.data();
    Field::from_fn(grid, |i| (d[i] - d[grid.neighbor(i, axis, -1)]) / h)
}

/// `(f(x+μ̂) − f(x−μ̂)) / 2h_μ`.
pub fn central_diff<const D: usize>(field: &Field<D>, axis: usize) -> Field<D> {
    let grid = *field.grid();
    let h = grid.spacing(axis);
    let d = field.data();
    Field::from_fn(grid, |i| {
        (d[grid.neighbor(i, axis, 1)] - d[grid.neighbor(i, axis, -1)]) / (2.0 * h)
    })
}

/// Conformal factors of the Kähler form `ω = f1 dx0∧dx1 + f2 dx2∧dx3`.
///
/// `f1` lives on the first Σ factor `(x0, x1)`, `f2` on the second `(x2, x3)`.
/// With `ω̃_Σ = f dx∧dy` and `ω̃_Σ = 2ω_Σ`, the form `ω_Σ` has weight `f/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerData {
    f1: ScalarField2,
    f2: ScalarField2,
}

/// Integration weight on the 4-torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VolumeWeight {
    /// Coordinate volume `d⁴x`.
    Plain,
    /// `ω∧ω = 2 f1 f2 d⁴x`.
    OmegaWedgeOmega,
}

impl KahlerData {
    pub fn new(f1: ScalarField2, f2: ScalarField2) -> Result<Self> {
        for (name, f) in [("f1", &f1), ("f2", &f2)] {
            if f.data().iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidKahler(format!("{name} must be positive")));
            }
        }
        Ok(Self { f1, f2 })
    }

    /// Flat factors `f1 ≡ f2 ≡ 1` matching a 4D grid.
    pub fn flat(grid: &Grid4) -> Self {
        Self::constant(grid, 1.0)
    }

    pub fn constant(grid: &Grid4, value: f64) -> Self {
        Self {
            f1: Field::constant(grid.factor1(), value),
            f2: Field::constant(grid.factor2(), value),
        }
    }

    /// `f(x, y) = 1 + a·sin(2πx/L0)·cos(2πy/L1)` on each factor, with
    /// `|a| < 1`.
    pub fn harmonic(grid: &Grid4, amplitude: f64) -> Result<Self> {
        let profile = |g: Grid2| {
            let [l0, l1] = g.lengths();
            Field::from_fn(g, move |i| {
                let [x, y] = g.position(i);
                1.0 + amplitude
                    * (2.0 * std::f64::consts::PI * x / l0).sin()
                    * (2.0 * std::f64::consts::PI * y / l1).cos()
            })
        };
        Self::new(profile(grid.factor1()), profile(grid.factor2()))
    }

    pub fn f1(&self) -> &ScalarField2 {
        &self.f1
    }

    pub fn f2(&self) -> &ScalarField2 {
        &self.f2
    }

    pub fn check_grid(&self, grid: &Grid4) -> Result<()> {
        if self.f1.grid().sizes() == grid.factor1().sizes()
            && self.f2.grid().sizes() == grid.factor2().sizes()
        {
            Ok(())
        } else {
            Err(Error::GridMismatch(
                "conformal factors do not match the 4D grid".into(),
            ))
        }
    }

    /// `f1(x0, x1)` at a 4D site.
    pub fn f1_at(&self, grid: &Grid4, idx: usize) -> f64 {
        let c = grid.coords(idx);
        self.f1.data()[self.f1.grid().index([c[0], c[1]])]
    }

    /// `f2(x2, x3)` at a 4D site.
    pub fn f2_at(&self, grid: &Grid4, idx: usize) -> f64 {
        let c = grid.coords(idx);
        self.f2.data()[self.f2.grid().index([c[2], c[3]])]
    }

    pub fn max_factor(&self) -> f64 {
        self.f1.max_abs().max(self.f2.max_abs())
    }
}

/// `Σ_sites s·weight·h0h1h2h3`.
pub fn integrate4(s: &ScalarField4, k: &KahlerData, weight: VolumeWeight) -> Result<f64> {
    let grid = *s.grid();
    k.check_grid(&grid)?;
    match weight {
        VolumeWeight::Plain => Ok(s.integral()),
        VolumeWeight::OmegaWedgeOmega => {
            let d = s.data();
            let w = Field::from_fn(grid, |i| d[i] * 2.0 * k.f1_at(&grid, i) * k.f2_at(&grid, i));
            Ok(w.integral())
        }
    }
}

/// `Σ_sites s·h0h1`, optionally weighted by a conformal factor.
pub fn integrate2(s: &ScalarField2, weight: Option<&ScalarField2>) -> Result<f64> {
    match weight {
        None => Ok(s.integral()),
        Some(f) => Ok(s.zip_map(f, |a, b| a * b)?.integral()),
    }
}

/// Which Σ factor a 2D slice spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `Σ×{p}`: coordinates `(x0, x1)` vary.
    First,
    /// `{q}×Σ`: coordinates `(x2, x3)` vary.
    Second,
}

impl Factor {
    pub fn grid(self, grid: &Grid4) -> Grid2 {
        match self {
            Factor::First => grid.factor1(),
            Factor::Second => grid.factor2(),
        }
    }

    /// 4D site index of slice site `(s0, s1)` with the other factor fixed at `at`.
    pub fn site(self, grid: &Grid4, slice: [usize; 2], at: [usize; 2]) -> usize {
        match self {
            Factor::First => grid.index([slice[0], slice[1], at[0], at[1]]),
            Factor::Second => grid.index([at[0], at[1], slice[0], slice[1]]),
        }
    }
}

fn check_slice_point(grid: &Grid4, factor: Factor, at: [usize; 2]) -> Result<()> {
    let other = match factor {
        Factor::First => grid.factor2(),
        Factor::Second => grid.factor1(),
    };
    let [n0, n1] = other.sizes();
    if at[0] < n0 && at[1] < n1 {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(format!(
            "slice point {at:?} outside {:?}",
            other.sizes()
        )))
    }
}

/// Slice of a 4D field along one Σ factor, the other factor fixed at `at`.
pub fn restrict<T: Copy + Default + Send + Sync>(
    field: &Field<4, T>,
    factor: Factor,
    at: [usize; 2],
) -> Result<Field<2, T>> {
    let grid = *field.grid();
    check_slice_point(&grid, factor, at)?;
    let g2 = factor.grid(&grid);
    let d = field.data();
    Ok(Field::from_fn(g2, |i| {
        let s = g2.coords(i);
        d[factor.site(&grid, s, at)]
    }))
}

/// `a1 = A(x0, x1, p)`.
pub fn restrict1<T: Copy + Default + Send + Sync>(
    field: &Field<4, T>,
    p: [usize; 2],
) -> Result<Field<2, T>> {
    restrict(field, Factor::First, p)
}

/// `a2 = A(q, x2, x3)`.
pub fn restrict2<T: Copy + Default + Send + Sync>(
    field: &Field<4, T>,
    q: [usize; 2],
) -> Result<Field<2, T>> {
    restrict(field, Factor::Second, q)
}

/// Constant extension along `(x2, x3)` of a field on the first factor.
pub fn lift1<T: Copy + Default + Send + Sync>(
    field: &Field<2, T>,
    target: &Grid4,
) -> Result<Field<4, T>> {
    if field.grid().sizes() != target.factor1().sizes() {
        return Err(Error::SizeMismatch(format!(
            "2D grid {:?} does not match the first factor {:?}",
            field.grid().sizes(),
            target.factor1().sizes()
        )));
    }
    let g2 = *field.grid();
    let d = field.data();
    let grid = *target;
    Ok(Field::from_fn(grid, |i| {
        let c = grid.coords(i);
        d[g2.index([c[0], c[1]])]
    }))
}

/// Per-field seed derived from a run seed and a stream label.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.gen()
}

/// Highest wavenumber used by [`random_smooth_field`].
pub const SMOOTH_MAX_WAVENUMBER: i64 = 2;

/// Sum of `modes` random low-frequency harmonics. Each harmonic is
/// `a·cos(2π k·x/L + φ)` with integer `|k_μ| ≤ 2` (clamped below `N_μ/2`),
/// amplitude `a ∈ [−1, 1]` and phase `φ ∈ [0, 2π)`.
pub fn random_smooth_field<const D: usize>(grid: &Grid<D>, seed: u64, modes: usize) -> Field<D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let harmonics: Vec<([f64; D], f64, f64)> = (0..modes)
        .map(|_| {
            let k: [f64; D] = std::array::from_fn(|a| {
                let kmax = SMOOTH_MAX_WAVENUMBER.min((grid.size(a) as i64 - 1) / 2);
                let k = rng.gen_range(-kmax..=kmax);
                2.0 * std::f64::consts::PI * k as f64 / grid.lengths()[a]
            });
            let amp = rng.gen_range(-1.0..1.0);
            let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            (k, amp, phase)
        })
        .collect();
    let grid = *grid;
    Field::from_fn(grid, |i| {
        let x = grid.position(i);
        harmonics
            .iter()
            .map(|(k, amp, phase)| {
                let arg: f64 = k.iter().zip(x.iter()).map(|(k, x)| k * x).sum();
                amp * (arg + phase).cos()
            })
            .sum()
    })
}

/// Quaternion-valued smooth field with independent components.
pub fn random_smooth_spinor<const D: usize>(
    grid: &Grid<D>,
    seed: u64,
    modes: usize,
) -> Field<D, Quaternion> {
    let parts: [Field<D>; 4] =
        std::array::from_fn(|c| random_smooth_field(grid, derive_seed(seed, c as u64), modes));
    Field::from_components([&parts[0], &parts[1], &parts[2], &parts[3]])
        .expect("components share a grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid4() -> Grid4 {
        Grid4::new([4, 5, 6, 7], [1.0, 1.5, 0.8, 2.0]).unwrap()
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(Grid4::unit([3, 4, 4, 4]).is_err());
        assert!(Grid2::new([4, 4], [1.0, 0.0]).is_err());
    }

    #[test]
    fn linear_index_layout() {
        let g = grid4();
        assert_eq!(g.index([1, 2, 3, 4]), ((5 + 2) * 6 + 3) * 7 + 4);
        for i in 0..g.site_count() {
            assert_eq!(g.index(g.coords(i)), i);
        }
    }

    #[test]
    fn periodic_shift_by_full_period_is_identity() {
        let g = grid4();
        let f = random_smooth_field(&g, 11, 3);
        for axis in 0..4 {
            assert_eq!(f.shifted(axis, g.size(axis) as isize), f);
            assert_eq!(f.shifted(axis, 1).shifted(axis, -1), f);
        }
    }

    #[test]
    fn fwd_diff_of_constant_is_zero() {
        let g = grid4();
        let f = Field::constant(g, 3.25);
        for axis in 0..4 {
            assert_eq!(fwd_diff(&f, axis).max_abs(), 0.0);
        }
    }

    #[test]
    fn fwd_diff_first_order_on_sine() {
        // Taylor remainder: |D⁺f − f'| ≤ h/2·max|f''| = h/2·(2π)².
        let mut errs = Vec::new();
        for n in [8usize, 16, 32] {
            let g = Grid4::unit([n, 4, 4, 4]).unwrap();
            let f = Field::from_fn(g, |i| (2.0 * PI * g.position(i)[0]).sin());
            let d = fwd_diff(&f, 0);
            let err = Field::from_fn(g, |i| d.data()[i] - 2.0 * PI * (2.0 * PI * g.position(i)[0]).cos())
                .max_abs();
            let h = g.spacing(0);
            assert!(err <= 0.5 * h * (2.0 * PI).powi(2) + 1e-12);
            errs.push(err);
        }
        let order = (errs[1] / errs[2]).log2();
        assert!((order - 1.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn fwd_diff_commutes_with_axis_relabeling() {
        let g = Grid4::unit([6, 6, 6, 6]).unwrap();
        let f = Field::from_fn(g, |i| {
            let x = g.position(i);
            (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()
        });
        // swap axes 0 and 1
        let swapped = Field::from_fn(g, |i| {
            let c = g.coords(i);
            f.data()[g.index([c[1], c[0], c[2], c[3]])]
        });
        let d0 = fwd_diff(&f, 0);
        let d1s = fwd_diff(&swapped, 1);
        for i in 0..g.site_count() {
            let c = g.coords(i);
            assert_eq!(d1s.data()[i], d0.data()[g.index([c[1], c[0], c[2], c[3]])]);
        }
    }

    #[test]
    fn telescoping_and_summation_by_parts() {
        let g = grid4();
        let f = random_smooth_field(&g, 5, 4);
        let h = random_smooth_field(&g, 6, 4);
        for axis in 0..4 {
            assert!(fwd_diff(&f, axis).sum().abs() < 1e-12 * f.max_abs() * g.site_count() as f64);
            let lhs = fwd_diff(&f, axis).inner(&h).unwrap();
            let rhs = -f.inner(&bwd_diff(&h, axis)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn integrate4_weights() {
        let g = grid4();
        let k = KahlerData::flat(&g);
        let one = Field::constant(g, 1.0);
        let v = integrate4(&one, &k, VolumeWeight::OmegaWedgeOmega).unwrap();
        assert!((v - 2.0 * g.volume()).abs() < 1e-12);
        let zero = Field::zeros(g);
        let kh = KahlerData::harmonic(&g, 0.5).unwrap();
        assert_eq!(integrate4(&zero, &kh, VolumeWeight::OmegaWedgeOmega).unwrap(), 0.0);
        assert_eq!(integrate4(&zero, &kh, VolumeWeight::Plain).unwrap(), 0.0);
    }

    #[test]
    fn single_harmonic_integrates_to_zero() {
        let g = grid4();
        let k = KahlerData::flat(&g);
        let f = Field::from_fn(g, |i| {
            let x = g.position(i);
            (2.0 * PI * x[1] / 1.5 + 0.3).cos() * (2.0 * PI * 2.0 * x[3] / 2.0).sin()
        });
        assert!(integrate4(&f, &k, VolumeWeight::Plain).unwrap().abs() < 1e-14);
        assert!(f.mean().abs() < 1e-13);
    }

    #[test]
    fn restrict_and_lift() {
        let g = grid4();
        let g2 = g.factor1();
        let s = random_smooth_field(&g2, 9, 3);
        let lifted = lift1(&s, &g).unwrap();
        assert_eq!(restrict1(&lifted, [2, 5]).unwrap(), s);
        assert_eq!(fwd_diff(&lifted, 2).max_abs(), 0.0);
        assert_eq!(lift1(&ScalarField2::zeros(g2), &g).unwrap().max_abs(), 0.0);

        let only_second = Field::from_fn(g, |i| {
            let c = g.coords(i);
            (c[2] * 10 + c[3]) as f64
        });
        let r = restrict1(&only_second, [1, 3]).unwrap();
        assert!(r.data().iter().all(|&v| v == 13.0));

        // slice then integrate vs direct slice sum
        let f = random_smooth_field(&g, 21, 3);
        let r = restrict1(&f, [4, 6]).unwrap();
        let direct: f64 = (0..4)
            .flat_map(|a| (0..5).map(move |b| (a, b)))
            .map(|(a, b)| f.data()[g.index([a, b, 4, 6])])
            .sum::<f64>()
            * g.spacing(0)
            * g.spacing(1);
        assert!((integrate2(&r, None).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn restrict_rejects_bad_index_and_lift_rejects_mismatch() {
        let g = grid4();
        let f = Field::<4>::zeros(g);
        assert!(restrict1(&f, [6, 0]).is_err());
        assert!(restrict2(&f, [0, 5]).is_err());
        let wrong = Field::<2>::zeros(Grid2::unit([4, 4]).unwrap());
        assert!(lift1(&wrong, &g).is_err());
    }

    #[test]
    fn random_fields_are_deterministic() {
        let g = grid4();
        assert_eq!(random_smooth_field(&g, 42, 3), random_smooth_field(&g, 42, 3));
        assert_ne!(random_smooth_field(&g, 42, 3), random_smooth_field(&g, 43, 3));
        assert_eq!(random_smooth_field(&g, 42, 0).max_abs(), 0.0);
    }

    #[test]
    fn deterministic_sum_is_chunked() {
        let v: Vec<f64> = (0..5000).map(|i| (i as f64 * 0.37).sin()).collect();
        let expected: f64 = v.chunks(REDUCE_CHUNK).map(|c| c.iter().sum::<f64>()).sum();
        assert_eq!(deterministic_sum(&v).to_bits(), expected.to_bits());
    }

    #[test]
    fn kahler_rejects_nonpositive() {
        let g = grid4();
        let f1 = Field::constant(g.factor1(), 1.0);
        let f2 = Field::constant(g.factor2(), 0.0);
        assert!(KahlerData::new(f1, f2).is_err());
    }
}
