#![allow(clippy::needless_range_loop)]

//! Fixed-step classical Runge–Kutta.

use crate::error::Result;

/// Scratch buffers for [`Rk4::step`].
#[derive(Clone, Debug, Default)]
pub(crate) struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            stage: vec![0.0; dim],
        }
    }

    /// Advances `y` by `h`. `check` sees every stage point and may reject it.
    pub fn step<F, C>(&mut self, y: &mut [f64], h: f64, mut drift: F, mut check: C) -> Result<()>
    where
        F: FnMut(&[f64], &mut [f64]) -> Result<()>,
        C: FnMut(&[f64]) -> Result<()>,
    {
        let n = y.len();
        drift(y, &mut self.k1)?;
        for i in 0..n {
            self.stage[i] = y[i] + 0.5 * h * self.k1[i];
        }
        check(&self.stage)?;
        drift(&self.stage, &mut self.k2)?;
        for i in 0..n {
            self.stage[i] = y[i] + 0.5 * h * self.k2[i];
        }
        check(&self.stage)?;
        drift(&self.stage, &mut self.k3)?;
        for i in 0..n {
            self.stage[i] = y[i] + h * self.k3[i];
        }
        check(&self.stage)?;
        drift(&self.stage, &mut self.k4)?;
        for i in 0..n {
            y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        check(y)
    }
}

/// Number of equal steps covering `span` with step at most `dt`.
pub(crate) fn step_count(span: f64, dt: f64) -> usize {
    if span <= 0.0 {
        0
    } else {
        ((span / dt) - 1e-9).ceil().max(1.0) as usize
    }
}
