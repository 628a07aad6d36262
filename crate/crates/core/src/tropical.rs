//! Arithmetic on the tropical projective torus `R^d / R1`.
//!
//! A point is a finite vector defined up to adding the same constant to every
//! coordinate. The tropical metric
//! `d_tr(v, w) = max_i (v_i - w_i) - min_i (v_i - w_i)`
//! is well defined on these classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^d / R1` with `d >= 2` finite coordinates.
///
/// Equality (`PartialEq`) compares raw coordinates. Use [`TropicalPoint::equivalent`]
/// to compare equivalence classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TropicalPoint(Vec<f64>);

impl TropicalPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid(format!(
                "tropical point needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("tropical point"));
        }
        Ok(TropicalPoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Adds `c` to every coordinate; the class is unchanged.
    pub fn shifted(&self, c: f64) -> Self {
        TropicalPoint(self.0.iter().map(|x| x + c).collect())
    }

    /// Canonical representative with the first coordinate pinned to zero.
    pub fn normalize(&self) -> Self {
        let first = self.0[0];
        TropicalPoint(self.0.iter().map(|x| x - first).collect())
    }

    /// True when the two points differ by a constant vector, up to `tol`.
    pub fn equivalent(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(trop_distance(self, other)? <= tol)
    }
}

impl TryFrom<Vec<f64>> for TropicalPoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        TropicalPoint::new(coords)
    }
}

impl From<TropicalPoint> for Vec<f64> {
    fn from(p: TropicalPoint) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for TropicalPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Tropical (generalized Hilbert projective) distance between two points.
pub fn trop_distance(v: &TropicalPoint, w: &TropicalPoint) -> Result<f64> {
    check_dims(v.dim(), w.dim())?;
    Ok(distance_unchecked(v.coords(), w.coords()))
}

/// Canonical representative of `v` (first coordinate zero).
pub fn normalize(v: &TropicalPoint) -> TropicalPoint {
    v.normalize()
}

/// Tropical inner product `<x, -omega> = d_tr(x, omega) - bias`.
pub fn trop_inner_product(x: &TropicalPoint, omega: &TropicalPoint, bias: f64) -> Result<f64> {
    if !bias.is_finite() {
        return Err(Error::NonFinite("bias"));
    }
    Ok(trop_distance(x, omega)? - bias)
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `max_i (v_i - w_i) - min_i (v_i - w_i)` on raw slices of equal length.
pub(crate) fn distance_unchecked(v: &[f64], w: &[f64]) -> f64 {
    debug_assert_eq!(v.len(), w.len());
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (a, b) in v.iter().zip(w) {
        let diff = a - b;
        hi = hi.max(diff);
        lo = lo.min(diff);
    }
    hi - lo
}

/// Indices of the maximum and minimum of `values`, smallest index on ties.
pub(crate) fn arg_extrema(values: impl Iterator<Item = f64>) -> (usize, f64, usize, f64) {
    let mut imax = 0;
    let mut imin = 0;
    let mut vmax = f64::NEG_INFINITY;
    let mut vmin = f64::INFINITY;
    for (i, v) in values.enumerate() {
        if v > vmax {
            vmax = v;
            imax = i;
        }
        if v < vmin {
            vmin = v;
            imin = i;
        }
    }
    (imax, vmax, imin, vmin)
}
