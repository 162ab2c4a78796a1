//! Covering an input box with ∞-norm lattice cells.
//!
//! Along dimension `j` the grid has `k_j = max(1, ⌈w_j / 2δ⌉)` centers at
//! `lower_j + (2m + 1)δ`. The grid is anchored at the lower corner; the last
//! cell may overhang the upper face, so cell centers can lie outside the box.

use crate::error::{Error, Result};
use crate::sampling;
use crate::scalar::{linf_dist, Scalar};
use crate::sensitivity::check_delta;

/// Axis-aligned box `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputBox<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> InputBox<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                context: "box bounds",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Precondition("box has zero dimensions".into()));
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidBox {
                    dim,
                    lower: lo.as_f64(),
                    upper: hi.as_f64(),
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Box from `(lower, upper)` pairs, one per dimension.
    pub fn from_intervals(bounds: &[(T, T)]) -> Result<Self> {
        Self::new(
            bounds.iter().map(|b| b.0).collect(),
            bounds.iter().map(|b| b.1).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Closed membership.
    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }
}

/// `{x : ‖x − center‖∞ ≤ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCell<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Scalar> LatticeCell<T> {
    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.center.len() && linf_dist(x, &self.center) <= self.radius
    }
}

/// Centers along one axis. The count is the smallest `k ≥ 1` whose last cell,
/// evaluated in `T` arithmetic exactly as the centers are, reaches `upper`.
/// A zero-width axis gets a single center on the face.
fn axis_centers<T: Scalar>(lower: T, upper: T, delta: T) -> Vec<T> {
    if lower == upper {
        return vec![lower];
    }
    let two = T::lit(2.0);
    let center = |m: usize| lower + T::lit((2 * m + 1) as f64) * delta;
    let reaches = |k: usize| center(k - 1) + delta >= upper;
    let estimate = ((upper - lower) / (two * delta)).ceil().to_usize().unwrap_or(1).max(1);
    let mut k = estimate;
    while k > 1 && reaches(k - 1) {
        k -= 1;
    }
    while !reaches(k) {
        k += 1;
    }
    (0..k).map(center).collect()
}

/// Lattice cells of radius `delta` covering `input`, in row-major grid order
/// (last dimension varies fastest).
pub fn discretize<T: Scalar>(input: &InputBox<T>, delta: T) -> Result<Vec<LatticeCell<T>>> {
    check_delta(delta, true)?;
    let axes: Vec<Vec<T>> = input
        .lower
        .iter()
        .zip(&input.upper)
        .map(|(&lo, &hi)| axis_centers(lo, hi, delta))
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut cells = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        cells.push(LatticeCell {
            center: idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect(),
            radius: delta,
        });
        for d in (0..axes.len()).rev() {
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(cells)
}

/// Cells for a finite union of boxes: box by box, dropping centers already
/// emitted by an earlier box.
pub fn discretize_union<T: Scalar>(boxes: &[InputBox<T>], delta: T) -> Result<Vec<LatticeCell<T>>> {
    check_delta(delta, true)?;
    if let Some(first) = boxes.first() {
        if let Some(b) = boxes.iter().find(|b| b.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                context: "input union",
                expected: first.dim(),
                found: b.dim(),
            });
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for b in boxes {
        for cell in discretize(b, delta)? {
            let key: Vec<u64> = cell.center.iter().map(|c| c.as_f64().to_bits()).collect();
            if seen.insert(key) {
                out.push(cell);
            }
        }
    }
    Ok(out)
}

/// Result of a sampled coverage audit.
#[derive(Debug, Clone, PartialEq)]
pub enum Coverage<T> {
    Covered,
    /// A sampled point of the box outside every cell.
    Gap(Vec<T>),
}

impl<T> Coverage<T> {
    pub fn is_covered(&self) -> bool {
        matches!(self, Coverage::Covered)
    }
}

/// Draws `samples` seeded uniform points from `input` and checks each lies in
/// some cell.
pub fn covers<T: Scalar>(cells: &[LatticeCell<T>], input: &InputBox<T>, samples: usize, seed: u64) -> Coverage<T> {
    let mut rng = sampling::stream(seed, 0);
    for _ in 0..samples {
        let p = sampling::uniform_point(&mut rng, input);
        if !cells.iter().any(|c| c.contains(&p)) {
            return Coverage::Gap(p);
        }
    }
    Coverage::Covered
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> InputBox<f64> {
        InputBox::new(vec![0.0; n], vec![1.0; n]).unwrap()
    }

    #[test]
    fn unit_square_counts() {
        for (delta, k) in [(0.1, 5usize), (0.05, 10), (0.025, 20), (0.0125, 40)] {
            assert_eq!(discretize(&unit(2), delta).unwrap().len(), k * k, "delta {delta}");
        }
    }

    #[test]
    fn wide_box_box_counts() {
        let b = InputBox::from_intervals(&[(-1.0, 2.0), (0.4, 0.6)]).unwrap();
        assert_eq!(discretize(&b, 0.1).unwrap().len(), 15);
        assert_eq!(discretize(&b, 0.05).unwrap().len(), 60);
    }

    #[test]
    fn single_covering_cell() {
        for n in 1..5 {
            let cells = discretize(&unit(n), 0.5).unwrap();
            assert_eq!(cells.len(), 1);
            assert_eq!(cells[0].center, vec![0.5; n]);
        }
    }

    #[test]
    fn degenerate_dimension_sits_on_face() {
        let b = InputBox::from_intervals(&[(0.0, 1.0), (0.3, 0.3)]).unwrap();
        let cells = discretize(&b, 0.25).unwrap();
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|c| c.center[1] == 0.3));
        assert!(covers(&cells, &b, 2000, 1).is_covered());
    }

    #[test]
    fn overhang_when_width_is_not_a_multiple() {
        let b = InputBox::from_intervals(&[(0.0, 1.0)]).unwrap();
        let cells = discretize(&b, 0.3).unwrap();
        assert_eq!(cells.len(), 2);
        assert!(cells[1].center[0] + 0.3 > 1.0);
        assert!(!b.contains(&[cells[1].center[0] + 0.3]));
    }

    #[test]
    fn row_major_and_deterministic() {
        let cells = discretize(&unit(2), 0.25).unwrap();
        let centers: Vec<_> = cells.iter().map(|c| c.center.clone()).collect();
        assert_eq!(centers[0], vec![0.25, 0.25]);
        assert_eq!(centers[1], vec![0.25, 0.75]);
        assert_eq!(centers[2], vec![0.75, 0.25]);
        assert_eq!(cells, discretize(&unit(2), 0.25).unwrap());
    }

    #[test]
    fn rejects_bad_radius_and_boxes() {
        assert!(discretize(&unit(2), 0.0).is_err());
        assert!(discretize(&unit(2), -0.1).is_err());
        assert!(InputBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(InputBox::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(InputBox::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn discretized_box_is_covered() {
        let b = InputBox::from_intervals(&[(-1.0, 2.0), (0.4, 0.6), (0.0, 0.33)]).unwrap();
        let cells = discretize(&b, 0.07).unwrap();
        assert!(covers(&cells, &b, 20_000, 5).is_covered());
    }

    #[test]
    fn missing_cell_is_found() {
        let b = unit(2);
        let mut cells = discretize(&b, 0.1).unwrap();
        let removed = cells.remove(12);
        assert_eq!(removed.center, vec![0.5, 0.5]);
        match covers(&cells, &b, 100_000, 9) {
            Coverage::Gap(p) => {
                assert!(removed.contains(&p));
                assert!(b.contains(&p));
            }
            Coverage::Covered => panic!("gap not detected"),
        }
    }

    #[test]
    fn big_cell_covers() {
        let cell = LatticeCell { center: vec![0.5, 0.5], radius: 0.5 };
        assert!(covers(&[cell], &unit(2), 5000, 3).is_covered());
    }

    #[test]
    fn union_dedups_shared_centers() {
        let a = InputBox::from_intervals(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let b = InputBox::from_intervals(&[(0.0, 1.0), (0.0, 2.0)]).unwrap();
        let cells = discretize_union(&[a.clone(), b.clone()], 0.25).unwrap();
        assert_eq!(cells.len(), 8);
        let c = InputBox::from_intervals(&[(0.0, 1.0)]).unwrap();
        assert!(discretize_union(&[a, c], 0.25).is_err());
        assert!(discretize_union::<f64>(&[], 0.25).unwrap().is_empty());
    }
}
