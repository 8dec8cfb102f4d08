//! Ideal (non-normalizable) codewords as spike-lattice descriptors, with
//! modular syndrome extraction and shift recovery.
//!
//! The ideal combs have infinitely many spikes, so lattices are stored as
//! (spacing, offset, sign pattern) and never enumerated.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The four ideal codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Codeword {
    Zero,
    One,
    Plus,
    Minus,
}

impl std::str::FromStr for Codeword {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "zero" => Ok(Codeword::Zero),
            "1" | "one" => Ok(Codeword::One),
            "+" | "plus" => Ok(Codeword::Plus),
            "-" | "minus" => Ok(Codeword::Minus),
            other => Err(Error::Domain(format!("invalid codeword label {other:?}"))),
        }
    }
}

/// Spike sign pattern along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    /// All spikes carry +1.
    Uniform,
    /// Spike `s` carries `(-1)^s`.
    Alternating,
}

/// Spike lattices of an ideal codeword in position and momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDescriptor<T> {
    pub spacing_x: T,
    pub offset_x: T,
    pub spacing_p: T,
    pub offset_p: T,
    pub signs_p: SignPattern,
}

/// Result of a modular syndrome measurement against a lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyndromeResult<T> {
    /// Signed distance to the nearest lattice point, |residue| <= spacing/2.
    pub residue: T,
    /// The nearest lattice multiple (without the offset).
    pub nearest_multiple: T,
    /// Strict half-spacing criterion; exact ties are not correctable.
    pub correctable: bool,
}

/// Spike lattices of the requested ideal codeword for lattice constant `theta`.
pub fn ideal_lattice<T: Real>(label: Codeword, theta: T) -> Result<LatticeDescriptor<T>> {
    if theta <= T::zero() {
        return Err(Error::Domain(format!("theta must be > 0, got {theta}")));
    }
    let pi = T::PI();
    let two = T::of(2.0);
    Ok(match label {
        // |0>: spikes at x = 2 theta s, p = pi/theta s
        Codeword::Zero => LatticeDescriptor {
            spacing_x: two * theta,
            offset_x: T::zero(),
            spacing_p: pi / theta,
            offset_p: T::zero(),
            signs_p: SignPattern::Uniform,
        },
        // |1> = D_x(theta)|0>: x lattice offset by theta, p signs alternate
        Codeword::One => LatticeDescriptor {
            spacing_x: two * theta,
            offset_x: theta,
            spacing_p: pi / theta,
            offset_p: T::zero(),
            signs_p: SignPattern::Alternating,
        },
        // |+>: spikes at x = theta s, p = 2 pi/theta s
        Codeword::Plus => LatticeDescriptor {
            spacing_x: theta,
            offset_x: T::zero(),
            spacing_p: two * pi / theta,
            offset_p: T::zero(),
            signs_p: SignPattern::Uniform,
        },
        // |->: p lattice of |+> offset by pi/theta
        Codeword::Minus => LatticeDescriptor {
            spacing_x: theta,
            offset_x: T::zero(),
            spacing_p: two * pi / theta,
            offset_p: pi / theta,
            signs_p: SignPattern::Uniform,
        },
    })
}

/// Modular syndrome of `value` against the lattice `offset + spacing * Z`.
///
/// Exact half-spacing ties round toward the lower multiple and are flagged
/// not correctable.
pub fn syndrome<T: Real>(value: T, spacing: T, offset: T) -> Result<SyndromeResult<T>> {
    if spacing <= T::zero() {
        return Err(Error::Domain(format!("spacing must be > 0, got {spacing}")));
    }
    let shifted = value - offset;
    let ratio = shifted / spacing;
    let mut k = ratio.round();
    let half = spacing / T::of(2.0);
    let mut residue = shifted - k * spacing;
    // tie: round() rounds half away from zero; pick the lower multiple instead
    if residue.abs() == half && residue < T::zero() {
        k -= T::one();
        residue = shifted - k * spacing;
    }
    Ok(SyndromeResult {
        residue,
        nearest_multiple: k * spacing,
        correctable: residue.abs() < half,
    })
}

/// Projects `value` onto the nearest lattice point `offset + spacing * Z`.
pub fn correct_shift<T: Real>(value: T, spacing: T, offset: T) -> Result<T> {
    let s = syndrome(value, spacing, offset)?;
    Ok(s.nearest_multiple + offset)
}
