//! Uniformly sampled complex wavefunctions on a 1-D axis.

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Which quadrature axis a wavefunction lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Position,
    Momentum,
}

/// Complex amplitude sampled on the uniform grid `start + i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction<T> {
    pub axis: Axis,
    pub start: T,
    pub step: T,
    pub amplitudes: Vec<C<T>>,
    pub normalized: bool,
}

impl<T: Real> Wavefunction<T> {
    /// Builds a wavefunction by evaluating `f` on a grid covering `[lo, hi]`
    /// with the given step, anchored so that `anchor` lies exactly on a grid
    /// point. Spike lattices and modular-region boundaries are kept on-grid
    /// this way.
    pub fn sample(
        axis: Axis,
        lo: T,
        hi: T,
        step: T,
        anchor: T,
        mut f: impl FnMut(T) -> C<T>,
    ) -> Self {
        let i_lo = ((lo - anchor) / step).floor();
        let i_hi = ((hi - anchor) / step).ceil();
        let n = (i_hi - i_lo).to_f64() as usize + 1;
        let start = anchor + i_lo * step;
        let amplitudes = (0..n).map(|i| f(start + step * T::of_usize(i))).collect();
        Wavefunction {
            axis,
            start,
            step,
            amplitudes,
            normalized: false,
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Grid coordinate of sample `i`.
    pub fn coord(&self, i: usize) -> T {
        self.start + self.step * T::of_usize(i)
    }

    /// Trapezoidal `step * sum |amplitude|^2`.
    pub fn norm_sq(&self) -> T {
        let mut acc = T::zero();
        for (i, a) in self.amplitudes.iter().enumerate() {
            let w = if i == 0 || i == self.amplitudes.len() - 1 {
                T::of(0.5)
            } else {
                T::one()
            };
            acc += w * a.norm_sqr();
        }
        acc * self.step
    }

    /// Rescales so that `norm_sq() == 1` and sets the `normalized` flag.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sq();
        if n <= T::of(1e-12) {
            return Err(Error::DegenerateState(format!("norm^2 = {n}")));
        }
        let inv = n.sqrt().recip();
        for a in &mut self.amplitudes {
            *a = *a * cr(inv);
        }
        self.normalized = true;
        Ok(())
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.axis != other.axis {
            return Err(Error::GridMismatch("different axes".into()));
        }
        if self.len() != other.len()
            || (self.start - other.start).abs() > T::of(1e-12)
            || (self.step - other.step).abs() > T::of(1e-15)
        {
            return Err(Error::GridMismatch(format!(
                "grids differ: start {} vs {}, step {} vs {}, len {} vs {}",
                self.start,
                other.start,
                self.step,
                other.step,
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// Trapezoidal inner product `step * sum conj(self) * other`.
    pub fn overlap(&self, other: &Self) -> Result<C<T>> {
        self.check_same_grid(other)?;
        let mut acc = C::new(T::zero(), T::zero());
        let last = self.len() - 1;
        for (i, (a, b)) in self.amplitudes.iter().zip(&other.amplitudes).enumerate() {
            let w = if i == 0 || i == last { T::of(0.5) } else { T::one() };
            acc += a.conj() * *b * cr(w);
        }
        Ok(acc * cr(self.step))
    }

    /// Numerical Fourier transform `psi(p) = (2 pi)^{-1/2} int phi(x) e^{-ipx} dx`
    /// evaluated by trapezoidal quadrature at the momenta of `p_grid`.
    ///
    /// Trapezoidal sums converge spectrally here because every amplitude in
    /// this artifact decays to far below the truncation tolerance at the
    /// window edges.
    pub fn fourier_to(&self, p_grid: &[T]) -> Wavefunction<T> {
        assert_eq!(self.axis, Axis::Position, "fourier_to expects a position wavefunction");
        let norm = self.step / (T::of(2.0) * T::PI()).sqrt();
        let last = self.len() - 1;
        let amplitudes = p_grid
            .iter()
            .map(|&p| {
                let mut acc = C::new(T::zero(), T::zero());
                for (i, a) in self.amplitudes.iter().enumerate() {
                    let w = if i == 0 || i == last { T::of(0.5) } else { T::one() };
                    let phase = -p * self.coord(i);
                    acc += *a * C::new(phase.cos(), phase.sin()) * cr(w);
                }
                acc * cr(norm)
            })
            .collect();
        let step = if p_grid.len() > 1 { p_grid[1] - p_grid[0] } else { T::one() };
        Wavefunction {
            axis: Axis::Momentum,
            start: *p_grid.first().unwrap_or(&T::zero()),
            step,
            amplitudes,
            normalized: false,
        }
    }

    /// The wavefunction shifted in its coordinate by `n_steps * step`
    /// (pure index shift, no interpolation): result(x) = self(x + n_steps*step).
    pub fn index_shifted(&self, n_steps: i64) -> Wavefunction<T> {
        let len = self.len() as i64;
        let amplitudes = (0..len)
            .map(|i| {
                let j = i + n_steps;
                if j >= 0 && j < len {
                    self.amplitudes[j as usize]
                } else {
                    C::new(T::zero(), T::zero())
                }
            })
            .collect();
        Wavefunction {
            axis: self.axis,
            start: self.start,
            step: self.step,
            amplitudes,
            normalized: false,
        }
    }
}
