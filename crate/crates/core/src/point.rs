//! Finitely supported points of ℓ∞ (and of the plane, for Euclidean spaces).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// A point with finitely many nonzero coordinates, stored as `(index, value)`
/// pairs sorted by index with zeros removed. Indices start at 1.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, f64)>", into = "Vec<(u32, f64)>")]
pub struct SparsePoint {
    coords: Vec<(u32, f64)>,
}

impl SparsePoint {
    /// The origin (empty support).
    pub fn origin() -> Self {
        Self::default()
    }

    /// Canonicalizes arbitrary input: sorts, drops zeros, rejects duplicates,
    /// index 0 and non-finite values.
    pub fn new(mut coords: Vec<(u32, f64)>) -> Result<Self> {
        coords.retain(|&(_, v)| v != 0.0);
        coords.sort_by_key(|&(i, _)| i);
        for w in coords.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!(
                    "duplicate coordinate index {}",
                    w[0].0
                )));
            }
        }
        if let Some(&(i, v)) = coords.iter().find(|&&(i, v)| i == 0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bad coordinate ({i}, {v})"
            )));
        }
        Ok(Self { coords })
    }

    /// Dense constructor: `values[0]` is coordinate 1.
    pub fn from_dense(values: &[f64]) -> Self {
        let coords = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i as u32 + 1, v))
            .collect();
        Self { coords }
    }

    pub fn coords(&self) -> &[(u32, f64)] {
        &self.coords
    }

    /// Value at `index` (0 when outside the support).
    pub fn get(&self, index: u32) -> f64 {
        self.coords
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.coords[k].1)
            .unwrap_or(0.0)
    }

    /// The support as a sorted index list.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.coords.iter().map(|&(i, _)| i)
    }

    /// Multiplies every coordinate by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|&(i, v)| (i, v * factor)).collect(),
        }
    }
}

impl TryFrom<Vec<(u32, f64)>> for SparsePoint {
    type Error = Error;
    fn try_from(coords: Vec<(u32, f64)>) -> Result<Self> {
        SparsePoint::new(coords)
    }
}

impl From<SparsePoint> for Vec<(u32, f64)> {
    fn from(p: SparsePoint) -> Self {
        p.coords
    }
}

/// Merges two sorted supports, yielding coordinate pairs `(a_i, b_i)`.
fn zip_union<'a>(
    a: &'a [(u32, f64)],
    b: &'a [(u32, f64)],
) -> impl Iterator<Item = (f64, f64)> + 'a {
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || match (a.get(i), b.get(j)) {
        (Some(&(ia, va)), Some(&(ib, vb))) => {
            if ia == ib {
                i += 1;
                j += 1;
                Some((va, vb))
            } else if ia < ib {
                i += 1;
                Some((va, 0.0))
            } else {
                j += 1;
                Some((0.0, vb))
            }
        }
        (Some(&(_, va)), None) => {
            i += 1;
            Some((va, 0.0))
        }
        (None, Some(&(_, vb))) => {
            j += 1;
            Some((0.0, vb))
        }
        (None, None) => None,
    })
}

/// ℓ∞ distance: the largest coordinate difference over the union of supports.
pub fn sup_distance(a: &SparsePoint, b: &SparsePoint) -> ExtReal {
    ExtReal::from_f64_unchecked(sup_distance_f64(a, b))
}

pub(crate) fn sup_distance_f64(a: &SparsePoint, b: &SparsePoint) -> f64 {
    zip_union(&a.coords, &b.coords).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Euclidean distance over the union of supports.
pub fn euclidean_distance(a: &SparsePoint, b: &SparsePoint) -> ExtReal {
    ExtReal::from_f64_unchecked(euclidean_distance_f64(a, b))
}

pub(crate) fn euclidean_distance_f64(a: &SparsePoint, b: &SparsePoint) -> f64 {
    let (mut scale, mut sum) = (0.0f64, 1.0f64);
    // scaled accumulation, the same trick hypot uses, so tiny steps do not underflow
    for (x, y) in zip_union(&a.coords, &b.coords) {
        let d = (x - y).abs();
        if d == 0.0 {
            continue;
        }
        if d > scale {
            sum = 1.0 + sum * (scale / d) * (scale / d);
            scale = d;
        } else {
            sum += (d / scale) * (d / scale);
        }
    }
    if scale == 0.0 {
        0.0
    } else if sum == 1.0 {
        scale
    } else {
        scale * sum.sqrt()
    }
}
