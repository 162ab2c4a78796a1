//! Box-shaped safety specifications and three-valued verification.
//!
//! Verification runs in two phases. First every lattice center that lies in
//! the input set is simulated; an unsafe simulation is a real counterexample
//! and ends the run with [`Verdict::Unsafe`]. Otherwise the reachtubes are
//! computed: if all of them lie inside the safe box the network is proven
//! [`Verdict::Safe`], else the result is [`Verdict::Uncertain`] and the leaking
//! tubes are reported so the caller can refine those cells with a smaller
//! radius.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{discretize_union, InputBox, LatticeCell};
use crate::network::Mlp;
use crate::reach::{check_boxes, ReachTube};
use crate::scalar::Scalar;
use crate::sensitivity::{check_delta, epsilon_unchecked};

/// Closed interval on one output; a missing side is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bound<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
}

impl<T: Scalar> Bound<T> {
    pub fn unbounded() -> Self {
        Self { lower: None, upper: None }
    }

    pub fn between(lower: T, upper: T) -> Self {
        Self { lower: Some(lower), upper: Some(upper) }
    }

    pub fn is_constrained(&self) -> bool {
        self.lower.is_some() || self.upper.is_some()
    }

    #[inline]
    fn admits(&self, v: T) -> bool {
        self.lower.is_none_or(|lo| v >= lo) && self.upper.is_none_or(|hi| v <= hi)
    }

    #[inline]
    fn admits_range(&self, lo: T, hi: T) -> bool {
        self.lower.is_none_or(|l| lo >= l) && self.upper.is_none_or(|u| hi <= u)
    }
}

/// Safe set: the conjunction of one [`Bound`] per output dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SafetySpec<T> {
    bounds: Vec<Bound<T>>,
}

impl<T: Scalar> SafetySpec<T> {
    pub fn new(bounds: Vec<Bound<T>>) -> Result<Self> {
        for (dim, b) in bounds.iter().enumerate() {
            let finite = |v: Option<T>| v.is_none_or(|v| v.is_finite());
            if !finite(b.lower) || !finite(b.upper) {
                return Err(Error::InvalidSpec { dim, reason: "non-finite bound".into() });
            }
            if let (Some(lo), Some(hi)) = (b.lower, b.upper) {
                if lo > hi {
                    return Err(Error::InvalidSpec {
                        dim,
                        reason: format!("lower {lo} exceeds upper {hi}"),
                    });
                }
            }
        }
        Ok(Self { bounds })
    }

    /// The whole output space.
    pub fn unconstrained(output_dim: usize) -> Self {
        Self { bounds: vec![Bound::unbounded(); output_dim] }
    }

    pub fn bounds(&self) -> &[Bound<T>] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_full_space(&self) -> bool {
        !self.bounds.iter().any(Bound::is_constrained)
    }
}

/// `y ∈ S`, inclusive. Outputs of the wrong length are never safe.
pub fn point_safe<T: Scalar>(spec: &SafetySpec<T>, y: &[T]) -> bool {
    y.len() == spec.dim() && spec.bounds.iter().zip(y).all(|(b, &v)| b.admits(v))
}

/// Whether the whole tube lies inside the safe box.
pub fn tube_safe<T: Scalar>(spec: &SafetySpec<T>, tube: &ReachTube<T>) -> bool {
    tube.center.len() == spec.dim()
        && spec
            .bounds
            .iter()
            .zip(&tube.center)
            .all(|(b, &c)| b.admits_range(c - tube.radius, c + tube.radius))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    /// Every output over the input set satisfies the spec.
    Safe,
    /// A simulated input from the input set violates the spec.
    Unsafe {
        cell_index: usize,
        input: Vec<T>,
        output: Vec<T>,
    },
    /// Some tubes leave the safe box; no claim either way.
    Uncertain { offending: Vec<usize> },
}

impl<T> Verdict<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Safe => "SAFE",
            Verdict::Unsafe { .. } => "UNSAFE",
            Verdict::Uncertain { .. } => "UNCERTAIN",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    pub verdict: Verdict<T>,
    /// Number of lattice cells (simulations) used.
    pub cell_count: usize,
}

fn in_union<T: Scalar>(boxes: &[InputBox<T>], x: &[T]) -> bool {
    boxes.iter().any(|b| b.contains(x))
}

/// Lowest-index lattice center inside the input set whose output is unsafe.
fn simulate_centers<T: Scalar>(
    net: &Mlp<T>,
    boxes: &[InputBox<T>],
    cells: &[LatticeCell<T>],
    spec: &SafetySpec<T>,
) -> Option<Verdict<T>> {
    cells
        .par_iter()
        .enumerate()
        .filter(|(_, c)| in_union(boxes, &c.center))
        .map(|(i, c)| (i, c, net.eval_unchecked(&c.center)))
        .find_first(|(_, _, y)| !point_safe(spec, y))
        .map(|(i, c, y)| Verdict::Unsafe {
            cell_index: i,
            input: c.center.clone(),
            output: y,
        })
}

pub fn safety_verify<T: Scalar>(
    net: &Mlp<T>,
    boxes: &[InputBox<T>],
    spec: &SafetySpec<T>,
    delta: T,
) -> Result<VerificationReport<T>> {
    check_delta(delta, true)?;
    check_boxes(net, boxes)?;
    if spec.dim() != net.output_dim() {
        return Err(Error::DimensionMismatch {
            context: "safety spec",
            expected: net.output_dim(),
            found: spec.dim(),
        });
    }
    let cells = discretize_union(boxes, delta)?;
    let cell_count = cells.len();

    if let Some(unsafe_verdict) = simulate_centers(net, boxes, &cells, spec) {
        return Ok(VerificationReport { verdict: unsafe_verdict, cell_count });
    }

    let offending: Vec<usize> = cells
        .par_iter()
        .enumerate()
        .filter_map(|(i, cell)| {
            let tube = ReachTube {
                cell_index: i,
                center: net.eval_unchecked(&cell.center),
                radius: epsilon_unchecked(net, &cell.center, delta),
                center_in_input: true,
            };
            (!tube_safe(spec, &tube)).then_some(i)
        })
        .collect();

    let verdict = if offending.is_empty() {
        Verdict::Safe
    } else {
        Verdict::Uncertain { offending }
    };
    Ok(VerificationReport { verdict, cell_count })
}
