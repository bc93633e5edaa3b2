//! Periodic boxes and sampled fields on them, with the unitary discrete
//! Fourier pair `v̂(k) = (2π)^{-d/2} Σ_x h^d v(x) e^{-ik·x}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs one length per axis (shape has {shape}, lengths has {lengths})")]
    DimensionMismatch { shape: usize, lengths: usize },
    #[error("grid axes need at least one point and a positive length")]
    EmptyAxis,
    #[error("operation needs a {0:?}-space field")]
    WrongRepresentation(Representation),
}

/// A periodic box `[0, L₁) × … × [0, L_d)` sampled on a regular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Torus {
    pub shape: Vec<usize>,
    pub lengths: Vec<f64>,
}

impl Torus {
    pub fn new(shape: Vec<usize>, lengths: Vec<f64>) -> Result<Self, GridError> {
        if shape.len() != lengths.len() {
            return Err(GridError::DimensionMismatch { shape: shape.len(), lengths: lengths.len() });
        }
        if shape.is_empty() || shape.iter().any(|n| *n == 0) || lengths.iter().any(|l| !(*l > 0.0)) {
            return Err(GridError::EmptyAxis);
        }
        Ok(Torus { shape, lengths })
    }

    /// `n` points on a box of side `l` in each of `d` dimensions.
    pub fn cube(d: usize, n: usize, l: f64) -> Self {
        Torus { shape: vec![n; d], lengths: vec![l; d] }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.shape[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Row-major multi-index of a flat index (last axis fastest).
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = idx % self.shape[a];
            idx /= self.shape[a];
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.shape).fold(0, |acc, (i, n)| acc * n + i)
    }

    pub fn position(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx).iter().enumerate().map(|(a, j)| *j as f64 * self.spacing(a)).collect()
    }

    /// Signed integer frequency of index `j` on an axis of `n` points.
    fn frequency(j: usize, n: usize) -> f64 {
        if j <= n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        }
    }

    pub fn wavevector(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx)
            .iter()
            .enumerate()
            .map(|(a, j)| 2.0 * PI * Self::frequency(*j, self.shape[a]) / self.lengths[a])
            .collect()
    }

    pub fn k_squared(&self, idx: usize) -> f64 {
        self.wavevector(idx).iter().map(|k| k * k).sum()
    }

    /// Momentum-space cell volume `Π 2π/L`.
    pub fn dk_volume(&self) -> f64 {
        self.lengths.iter().map(|l| 2.0 * PI / l).product()
    }

    /// Flat index of the momentum `−k` for the momentum at `idx`.
    pub fn negate(&self, idx: usize) -> usize {
        let m: Vec<usize> = self.unravel(idx).iter().zip(&self.shape).map(|(j, n)| (n - j) % n).collect();
        self.ravel(&m)
    }

    /// Minimum-image separation vector from `b` to `a`.
    pub fn min_image(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .zip(&self.lengths)
            .map(|((x, y), l)| {
                let d = x - y;
                d - l * (d / l).round()
            })
            .collect()
    }

    pub fn wrap(&self, x: &mut [f64]) {
        for (xi, l) in x.iter_mut().zip(&self.lengths) {
            *xi = xi.rem_euclid(*l);
            if *xi >= *l {
                *xi = 0.0;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Position,
    Momentum,
}

/// Samples of a field on a torus grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    pub torus: Torus,
    pub representation: Representation,
    pub values: Vec<Complex64>,
}

fn fft_nd(values: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = shape.iter().product();
    let mut stride = 1;
    for a in (0..shape.len()).rev() {
        let n = shape[a];
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let block = n * stride;
        for start in (0..total).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = values[base + j * stride];
                }
                fft.process(&mut line);
                for (j, l) in line.iter().enumerate() {
                    values[base + j * stride] = *l;
                }
            }
        }
        stride *= n;
    }
}

impl FieldGrid {
    pub fn from_fn(torus: &Torus, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..torus.len()).map(|i| Complex64::new(f(&torus.position(i)), 0.0)).collect();
        FieldGrid { torus: torus.clone(), representation: Representation::Position, values }
    }

    pub fn from_real(torus: &Torus, values: &[f64]) -> Self {
        FieldGrid {
            torus: torus.clone(),
            representation: Representation::Position,
            values: values.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
        }
    }

    pub fn constant(torus: &Torus, c: f64) -> Self {
        Self::from_fn(torus, |_| c)
    }

    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    fn require(&self, r: Representation) -> Result<(), GridError> {
        if self.representation == r {
            Ok(())
        } else {
            Err(GridError::WrongRepresentation(r))
        }
    }

    pub fn to_momentum(&self) -> Result<FieldGrid, GridError> {
        self.require(Representation::Position)?;
        let mut v = self.values.clone();
        fft_nd(&mut v, &self.torus.shape, false);
        let d = self.torus.dim() as i32;
        let scale = self.torus.cell_volume() * (2.0 * PI).powi(-d).sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
        Ok(FieldGrid { torus: self.torus.clone(), representation: Representation::Momentum, values: v })
    }

    pub fn to_position(&self) -> Result<FieldGrid, GridError> {
        self.require(Representation::Momentum)?;
        let mut v = self.values.clone();
        fft_nd(&mut v, &self.torus.shape, true);
        let d = self.torus.dim() as i32;
        let scale = self.torus.dk_volume() * (2.0 * PI).powi(-d).sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
        Ok(FieldGrid { torus: self.torus.clone(), representation: Representation::Position, values: v })
    }

    /// Multiply a momentum-space field pointwise by `symbol(|k|²)`.
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> f64) -> Result<FieldGrid, GridError> {
        self.require(Representation::Momentum)?;
        let values = self.values.iter().enumerate().map(|(i, v)| v * symbol(self.torus.k_squared(i))).collect();
        Ok(FieldGrid { values, ..self.clone() })
    }

    /// Position-space field mapped through `f(|k|²)` in momentum space.
    pub fn spectral(&self, symbol: impl Fn(f64) -> f64) -> Result<FieldGrid, GridError> {
        self.to_momentum()?.apply_symbol(symbol)?.to_position()
    }

    /// Heat-equation evolution `e^{tDΔ}`.
    pub fn heat(&self, diffusion: f64, t: f64) -> Result<FieldGrid, GridError> {
        self.spectral(|k2| (-diffusion * t * k2).exp())
    }

    /// Averages over the grid cells centred on each sample, exact for the
    /// trigonometric interpolant.
    pub fn cell_average(&self) -> Result<FieldGrid, GridError> {
        let m = self.to_momentum()?;
        let values = m
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let k = self.torus.wavevector(i);
                let w: f64 = k
                    .iter()
                    .enumerate()
                    .map(|(a, ka)| {
                        let x = 0.5 * ka * self.torus.spacing(a);
                        if x == 0.0 {
                            1.0
                        } else {
                            x.sin() / x
                        }
                    })
                    .product();
                v * w
            })
            .collect();
        FieldGrid { values, ..m }.to_position()
    }

    /// `∫ v dx` by the trapezoid rule (spectrally accurate for periodic data).
    pub fn integral(&self) -> Result<f64, GridError> {
        self.require(Representation::Position)?;
        Ok(self.values.iter().map(|v| v.re).sum::<f64>() * self.torus.cell_volume())
    }

    /// Value of the trigonometric interpolant at an arbitrary point.
    pub fn eval_at(&self, x: &[f64]) -> Result<f64, GridError> {
        let m = match self.representation {
            Representation::Position => self.to_momentum()?,
            Representation::Momentum => self.clone(),
        };
        let t = &self.torus;
        let mut s = Complex64::new(0.0, 0.0);
        for (i, v) in m.values.iter().enumerate() {
            let k = t.wavevector(i);
            let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
            s += v * Complex64::from_polar(1.0, phase);
        }
        Ok(s.re * t.dk_volume() * (2.0 * PI).powi(-(t.dim() as i32)).sqrt())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> FieldGrid {
        FieldGrid { values: self.values.iter().map(|v| Complex64::new(f(v.re), 0.0)).collect(), ..self.clone() }
    }

    pub fn zip_with(&self, other: &FieldGrid, f: impl Fn(Complex64, Complex64) -> Complex64) -> FieldGrid {
        FieldGrid { values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(), ..self.clone() }
    }

    pub fn sup_distance(&self, other: &FieldGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let t = Torus::new(vec![3, 4, 5], vec![1.0, 2.0, 3.0]).unwrap();
        for i in 0..t.len() {
            assert_eq!(t.ravel(&t.unravel(i)), i);
            assert_eq!(t.negate(t.negate(i)), i);
        }
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // ∫ e^{-x²/2} e^{-ikx} dx /√(2π) = e^{-k²/2}
        let t = Torus::cube(1, 128, 40.0);
        let g = FieldGrid::from_fn(&t, |x| {
            let y = x[0] - 20.0;
            (-0.5 * y * y).exp()
        });
        let m = g.to_momentum().unwrap();
        for (i, v) in m.values.iter().enumerate() {
            let k = t.wavevector(i)[0];
            let expect = (-0.5 * k * k).exp() * Complex64::from_polar(1.0, -k * 20.0);
            assert!((v - expect).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn bad_boxes_are_rejected() {
        assert!(Torus::new(vec![4], vec![1.0, 2.0]).is_err());
        assert!(Torus::new(vec![0], vec![1.0]).is_err());
        assert!(Torus::new(vec![4], vec![-1.0]).is_err());
    }

    #[test]
    fn min_image_wraps() {
        let t = Torus::cube(2, 8, 10.0);
        let d = t.min_image(&[9.5, 0.5], &[0.5, 9.5]);
        assert!((d[0] + 1.0).abs() < 1e-12 && (d[1] - 1.0).abs() < 1e-12);
    }
}
