//! Regular Cartesian grids and the (optionally parallel) map over them.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};

/// Axis-aligned box `[lo, hi]` (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CartesianBox {
    pub lo: Vector3<f64>,
    pub hi: Vector3<f64>,
}

impl CartesianBox {
    pub fn new(lo: Vector3<f64>, hi: Vector3<f64>) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// `[-half, half]³` around `center`.
    pub fn cube(center: Vector3<f64>, half: f64) -> Result<Self> {
        Self::new(
            center - Vector3::repeat(half),
            center + Vector3::repeat(half),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            if !(self.lo[i].is_finite() && self.hi[i].is_finite() && self.lo[i] <= self.hi[i]) {
                return Err(Error::InvalidInput(format!(
                    "box axis {} must satisfy lo <= hi, got [{}, {}]",
                    i + 1,
                    self.lo[i],
                    self.hi[i]
                )));
            }
        }
        Ok(())
    }
}

/// `n` samples per axis over a box, enumerated with x slowest and z fastest.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub bounds: CartesianBox,
    pub n: usize,
}

impl Grid {
    pub fn new(bounds: CartesianBox, n: usize) -> Result<Self> {
        bounds.validate()?;
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 samples per axis, got {n}"
            )));
        }
        Ok(Self { bounds, n })
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn coord(&self, axis: usize, k: usize) -> f64 {
        let (lo, hi) = (self.bounds.lo[axis], self.bounds.hi[axis]);
        if k == self.n - 1 {
            hi
        } else {
            lo + (hi - lo) * (k as f64) / ((self.n - 1) as f64)
        }
    }

    pub fn point(&self, index: usize) -> Vector3<f64> {
        let n = self.n;
        let (i, j, k) = (index / (n * n), (index / n) % n, index % n);
        Vector3::new(self.coord(0, i), self.coord(1, j), self.coord(2, k))
    }
}

/// How grid work is scheduled. Output order never depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, else sequential.
    #[default]
    Parallel,
}

pub(crate) fn map_indices<T, F>(count: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}
