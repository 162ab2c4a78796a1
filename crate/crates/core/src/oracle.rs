//! Independent checks of the analysis.
//!
//! None of these routines share code paths with the sensitivity bounds they
//! validate: sampling and grid search only ever call the plain forward pass,
//! and the corner oracle enumerates the input ball instead of using the
//! closed-form bound. Also hosts the two-link arm data generator used to
//! build the kinematics verification pipeline.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::InputBox;
use crate::network::{LayerParams, Mlp};
use crate::reach::{check_boxes, ReachEstimate};
use crate::sampling;
use crate::scalar::{dot, linf_dist, Scalar};
use crate::sensitivity::{check_delta, NeuronPreactBounds};

/// A sampled input whose output fell outside the estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<T> {
    pub box_index: usize,
    pub input: Vec<T>,
    pub output: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport<T> {
    pub seed: u64,
    pub sample_count: usize,
    pub violations: Vec<Violation<T>>,
    /// Largest ∞-distance from a sampled output to the estimate; zero when
    /// every output was contained.
    pub max_observed_deviation: T,
}

impl<T> SampleReport<T> {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn distance_to_estimate<T: Scalar>(est: &ReachEstimate<T>, y: &[T]) -> T {
    est.tubes
        .iter()
        .map(|t| (linf_dist(y, &t.center) - t.radius).max(T::zero()))
        .fold(T::infinity(), T::min)
}

/// Forward `n` seeded uniform inputs per box and collect every output that
/// is not inside `est`.
pub fn sample_containment<T: Scalar>(
    net: &Mlp<T>,
    boxes: &[InputBox<T>],
    est: &ReachEstimate<T>,
    n: usize,
    seed: u64,
) -> Result<SampleReport<T>> {
    check_boxes(net, boxes)?;
    if est.output_dim != net.output_dim() {
        return Err(Error::DimensionMismatch {
            context: "reach estimate",
            expected: net.output_dim(),
            found: est.output_dim,
        });
    }
    let chunks_per_box = n.div_ceil(sampling::CHUNK);
    let jobs: Vec<(usize, usize)> = (0..boxes.len())
        .flat_map(|b| (0..chunks_per_box).map(move |c| (b, c)))
        .collect();
    let partial: Vec<(Vec<Violation<T>>, T)> = jobs
        .par_iter()
        .map(|&(b, c)| {
            let mut rng = sampling::stream(seed, sampling::chunk_stream(b, c));
            let count = sampling::CHUNK.min(n - c * sampling::CHUNK);
            let mut violations = Vec::new();
            let mut worst = T::zero();
            for _ in 0..count {
                let x = sampling::uniform_point(&mut rng, &boxes[b]);
                let y = net.eval_unchecked(&x);
                if !est.contains(&y) {
                    worst = worst.max(distance_to_estimate(est, &y));
                    violations.push(Violation { box_index: b, input: x, output: y });
                }
            }
            (violations, worst)
        })
        .collect();
    let mut violations = Vec::new();
    let mut worst = T::zero();
    for (v, w) in partial {
        violations.extend(v);
        worst = worst.max(w);
    }
    Ok(SampleReport {
        seed,
        sample_count: n * boxes.len(),
        violations,
        max_observed_deviation: worst,
    })
}

/// Largest grid size [`brute_sensitivity`] accepts by default.
pub const DEFAULT_GRID_BUDGET: usize = 1 << 24;

/// Grid-search lower bound on the maximum sensitivity: the largest
/// `‖F(x0 + Δx) − F(x0)‖∞` over a `grid_per_dim^n` grid of the ∞-ball that
/// includes its corners. `grid_per_dim = 1` evaluates only `Δx = 0`.
pub fn brute_sensitivity<T: Scalar>(net: &Mlp<T>, x0: &[T], delta: T, grid_per_dim: usize) -> Result<T> {
    brute_sensitivity_with_budget(net, x0, delta, grid_per_dim, DEFAULT_GRID_BUDGET)
}

pub fn brute_sensitivity_with_budget<T: Scalar>(
    net: &Mlp<T>,
    x0: &[T],
    delta: T,
    grid_per_dim: usize,
    max_points: usize,
) -> Result<T> {
    let nominal = net.eval(x0)?;
    check_delta(delta, false)?;
    if grid_per_dim == 0 {
        return Err(Error::Precondition("grid_per_dim must be at least 1".into()));
    }
    let n = x0.len();
    let log_points = n as f64 * (grid_per_dim as f64).ln();
    if log_points > (max_points as f64).ln() {
        return Err(Error::BudgetExceeded(format!(
            "{grid_per_dim}^{n} grid points exceeds the budget of {max_points}"
        )));
    }
    let offsets: Vec<T> = if grid_per_dim == 1 {
        vec![T::zero()]
    } else {
        let steps = T::lit((grid_per_dim - 1) as f64);
        (0..grid_per_dim)
            .map(|k| {
                if k == grid_per_dim - 1 {
                    delta
                } else {
                    -delta + T::lit(2.0) * delta * T::lit(k as f64) / steps
                }
            })
            .collect()
    };
    let total = grid_per_dim.pow(n as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let x: Vec<T> = x0
                .iter()
                .map(|&c| {
                    let k = code % grid_per_dim;
                    code /= grid_per_dim;
                    c + offsets[k]
                })
                .collect();
            linf_dist(&net.eval_unchecked(&x), &nominal)
        })
        .reduce(T::zero, T::max);
    Ok(best)
}

/// Largest input dimension [`corner_lp_oracle`] will enumerate.
pub const MAX_CORNER_DIM: usize = 20;

/// Exact optima of `min/max ω_i·(x+Δx) + θ_i` over `‖Δx‖∞ ≤ δ`, found by
/// evaluating the objective at all `2^n` vertices of the ball.
pub fn corner_lp_oracle<T: Scalar>(
    layer: &LayerParams<T>,
    x: &[T],
    delta: T,
) -> Result<Vec<NeuronPreactBounds<T>>> {
    if x.len() != layer.inputs() {
        return Err(Error::DimensionMismatch {
            context: "layer input",
            expected: layer.inputs(),
            found: x.len(),
        });
    }
    check_delta(delta, false)?;
    let n = x.len();
    if n > MAX_CORNER_DIM {
        return Err(Error::BudgetExceeded(format!(
            "corner enumeration over {n} inputs (limit {MAX_CORNER_DIM})"
        )));
    }
    let mut corner = vec![T::zero(); n];
    Ok(layer
        .rows()
        .zip(layer.biases())
        .map(|(w, &theta)| {
            let mut lo = T::infinity();
            let mut hi = T::neg_infinity();
            for mask in 0u32..(1u32 << n) {
                for (j, v) in corner.iter_mut().enumerate() {
                    *v = if mask >> j & 1 == 1 { x[j] + delta } else { x[j] - delta };
                }
                let beta = dot(w, &corner) + theta;
                lo = lo.min(beta);
                hi = hi.max(beta);
            }
            NeuronPreactBounds {
                beta_min: lo,
                beta_max: hi,
                beta_nominal: dot(w, x) + theta,
            }
        })
        .collect())
}

/// Sampled tightness diagnostic: the largest ∞-distance from a tube corner
/// to its nearest sample. Smaller means the tubes hug the sampled outputs
/// more closely. This is a one-sided Hausdorff-style proxy, not a certified
/// distance. Samples must lie in the estimate up to a few ulps.
pub fn tightness<T: Scalar>(est: &ReachEstimate<T>, samples: &[Vec<T>]) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::Precondition("tightness needs at least one sample".into()));
    }
    let inside = |y: &Vec<T>| y.len() == est.output_dim && est.tubes.iter().any(|t| t.contains_rounded(y));
    if let Some(index) = samples.iter().position(|y| !inside(y)) {
        return Err(Error::NotContained { index });
    }
    let m = est.output_dim;
    if m >= 31 {
        return Err(Error::BudgetExceeded(format!("2^{m} corners per tube")));
    }
    let worst = est
        .tubes
        .par_iter()
        .map(|t| {
            let mut corner = vec![T::zero(); m];
            let mut worst = T::zero();
            for mask in 0u32..(1u32 << m) {
                for (j, v) in corner.iter_mut().enumerate() {
                    *v = if mask >> j & 1 == 1 { t.center[j] + t.radius } else { t.center[j] - t.radius };
                }
                let nearest = samples
                    .iter()
                    .map(|s| linf_dist(s, &corner))
                    .fold(T::infinity(), T::min);
                worst = worst.max(nearest);
            }
            worst
        })
        .reduce(T::zero, T::max);
    Ok(worst)
}

/// Two-link planar arm and the joint-angle zone used for training data.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmConfig {
    pub link1: f64,
    pub link2: f64,
    pub theta1_zone: (f64, f64),
    pub theta2_zone: (f64, f64),
}

/// Joint range of the normal working zone.
pub const NORMAL_ZONE: (f64, f64) = (5.0 * PI / 12.0, 7.0 * PI / 12.0);
/// Normal working zone plus the buffering zones on either side.
pub const BUFFERED_ZONE: (f64, f64) = (PI / 3.0, 2.0 * PI / 3.0);

impl Default for ArmConfig {
    /// Link lengths 10 and 7 over the normal working zone. The lengths are a
    /// stand-in chosen so the reachable workspace of the buffered zone lies in
    /// `-14 ≤ x ≤ 3, 1 ≤ y ≤ 17`.
    fn default() -> Self {
        Self {
            link1: 10.0,
            link2: 7.0,
            theta1_zone: NORMAL_ZONE,
            theta2_zone: NORMAL_ZONE,
        }
    }
}

impl ArmConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, l) in [("link1", self.link1), ("link2", self.link2)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Precondition(format!("{name} must be positive, got {l}")));
            }
        }
        for (name, (lo, hi)) in [("theta1", self.theta1_zone), ("theta2", self.theta2_zone)] {
            if !(0.0 <= lo && lo <= hi && hi <= 2.0 * PI) {
                return Err(Error::Precondition(format!(
                    "{name} zone [{lo}, {hi}] must lie within [0, 2π]"
                )));
            }
        }
        Ok(())
    }

    /// End-effector position for joint angles `(theta1, theta2)`.
    pub fn forward_kinematics(&self, theta1: f64, theta2: f64) -> (f64, f64) {
        let x = self.link1 * theta1.cos() + self.link2 * (theta1 + theta2).cos();
        let y = self.link1 * theta1.sin() + self.link2 * (theta1 + theta2).sin();
        (x, y)
    }
}

fn axis(zone: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (zone.0 + zone.1)];
    }
    (0..n)
        .map(|k| zone.0 + (zone.1 - zone.0) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Writes `theta1,theta2,x,y` rows over a `grid_per_dim²` grid of the
/// configured zone (endpoints included), theta2 varying fastest.
pub fn gen_arm_data<W: Write>(cfg: &ArmConfig, grid_per_dim: usize, mut sink: W) -> Result<usize> {
    cfg.validate()?;
    if grid_per_dim == 0 {
        return Err(Error::Precondition("grid_per_dim must be at least 1".into()));
    }
    writeln!(sink, "theta1,theta2,x,y")?;
    let mut rows = 0;
    for &t1 in &axis(cfg.theta1_zone, grid_per_dim) {
        for &t2 in &axis(cfg.theta2_zone, grid_per_dim) {
            let (x, y) = cfg.forward_kinematics(t1, t2);
            writeln!(sink, "{t1},{t2},{x},{y}")?;
            rows += 1;
        }
    }
    sink.flush()?;
    Ok(rows)
}
