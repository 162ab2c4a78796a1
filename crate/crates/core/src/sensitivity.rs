//! Maximum sensitivity of a network around a nominal input.
//!
//! For one layer and an ∞-norm input ball of radius `δ` around `x`, the
//! preactivation of neuron `i` ranges over `ω_i·x + θ_i ± δ‖ω_i‖₁` (a linear
//! functional over a box is extremal at the signed corner). Monotone
//! activations map that interval onto `[f(β_min), f(β_max)]`, so the largest
//! deviation from the nominal output is reached at one of the two endpoints.
//! The layer sensitivity is the largest such deviation over all neurons; it
//! becomes the input radius of the next layer.

use crate::error::{Error, Result};
use crate::network::{Activation, LayerParams, Mlp};
use crate::scalar::Scalar;

/// Extremal preactivations of one neuron over the input ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronPreactBounds<T> {
    pub beta_min: T,
    pub beta_max: T,
    pub beta_nominal: T,
}

/// One step of the layer-by-layer propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace<T> {
    /// Nominal input of the layer.
    pub input: Vec<T>,
    /// Radius of the ∞-ball around `input` the layer is analysed on.
    pub radius: T,
    /// Output deviation bound of the layer; the next layer's `radius`.
    pub sensitivity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityResult<T> {
    pub epsilon: T,
    pub layer_trace: Vec<LayerTrace<T>>,
}

pub(crate) fn check_delta<T: Scalar>(delta: T, positive: bool) -> Result<()> {
    let ok = delta.is_finite() && if positive { delta > T::zero() } else { delta >= T::zero() };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidDelta {
            requirement: if positive { "positive" } else { "non-negative" },
            value: delta.as_f64(),
        })
    }
}

fn bounds_unchecked<'a, T: Scalar>(
    layer: &'a LayerParams<T>,
    x: &[T],
    delta: T,
) -> impl Iterator<Item = NeuronPreactBounds<T>> + 'a {
    layer
        .preactivations(x)
        .into_iter()
        .zip(layer.rows())
        .map(move |(nominal, w)| {
            let spread = delta * w.iter().fold(T::zero(), |acc, &v| acc + v.abs());
            NeuronPreactBounds {
                beta_min: nominal - spread,
                beta_max: nominal + spread,
                beta_nominal: nominal,
            }
        })
}

/// Closed-form optima of `min/max ω_i·(x+Δx) + θ_i` over `‖Δx‖∞ ≤ δ`.
pub fn preactivation_bounds<T: Scalar>(
    layer: &LayerParams<T>,
    x: &[T],
    delta: T,
) -> Result<Vec<NeuronPreactBounds<T>>> {
    layer.check_input(x)?;
    check_delta(delta, false)?;
    Ok(bounds_unchecked(layer, x, delta).collect())
}

/// Largest `|f(β) − f(β_nominal)|` over `β ∈ {β_min, β_max}`.
#[inline]
pub fn neuron_deviation<T: Scalar>(bounds: &NeuronPreactBounds<T>, act: &Activation<T>) -> T {
    let nominal = act.apply(bounds.beta_nominal);
    let up = (act.apply(bounds.beta_max) - nominal).abs();
    let down = (nominal - act.apply(bounds.beta_min)).abs();
    up.max(down)
}

/// Same as [`neuron_deviation`] but with `β_min/β_max` pushed outward by
/// `slack` and the result padded for the activation's own evaluation error,
/// so the bound still holds against floating-point forward passes.
fn padded_deviation<T: Scalar>(b: &NeuronPreactBounds<T>, act: &Activation<T>, slack: T) -> T {
    let (lo, mid, hi) = (
        act.apply(b.beta_min - slack),
        act.apply(b.beta_nominal),
        act.apply(b.beta_max + slack),
    );
    let gamma = (hi - mid).abs().max((mid - lo).abs());
    gamma + T::lit(4.0) * T::epsilon() * lo.abs().max(mid.abs()).max(hi.abs())
}

fn layer_sensitivity_unchecked<T: Scalar>(layer: &LayerParams<T>, x: &[T], delta: T) -> T {
    // Zero radius means zero perturbation: the forward pass is deterministic.
    if delta == T::zero() {
        return T::zero();
    }
    let act = layer.activation();
    // Standard forward-error bound for an (n+1)-term dot product.
    let ulps = T::epsilon() * T::lit((layer.inputs() + 2) as f64);
    bounds_unchecked(layer, x, delta)
        .zip(layer.rows().zip(layer.biases()))
        .map(|(b, (w, &theta))| {
            let magnitude = w
                .iter()
                .zip(x)
                .fold(theta.abs(), |acc, (&wj, &xj)| acc + wj.abs() * (xj.abs() + delta));
            padded_deviation(&b, act, ulps * magnitude)
        })
        .fold(T::zero(), T::max)
}

/// Output deviation bound of one layer over the ∞-ball of radius `delta`.
/// Includes a few-ulp margin for rounding, so it sits marginally above
/// `max_i neuron_deviation` of the exact bounds.
pub fn layer_sensitivity<T: Scalar>(layer: &LayerParams<T>, x: &[T], delta: T) -> Result<T> {
    layer.check_input(x)?;
    check_delta(delta, false)?;
    Ok(layer_sensitivity_unchecked(layer, x, delta))
}

/// Sound upper bound on `sup ‖F(x0 + Δx) − F(x0)‖∞` over `‖Δx‖∞ ≤ delta`,
/// with the per-layer trace.
pub fn max_sensitivity<T: Scalar>(net: &Mlp<T>, x0: &[T], delta: T) -> Result<SensitivityResult<T>> {
    net.check_input(x0)?;
    check_delta(delta, false)?;
    let mut trace = Vec::with_capacity(net.layers().len());
    let mut x = x0.to_vec();
    let mut radius = delta;
    for layer in net.layers() {
        let eps = layer_sensitivity_unchecked(layer, &x, radius);
        let next = layer_eval_inner(layer, &x);
        trace.push(LayerTrace {
            input: std::mem::replace(&mut x, next),
            radius,
            sensitivity: eps,
        });
        radius = eps;
    }
    Ok(SensitivityResult {
        epsilon: radius,
        layer_trace: trace,
    })
}

/// Just the `ε_F` value, without keeping the trace.
pub(crate) fn epsilon_unchecked<T: Scalar>(net: &Mlp<T>, x0: &[T], delta: T) -> T {
    let mut x = x0.to_vec();
    let mut radius = delta;
    for layer in net.layers() {
        radius = layer_sensitivity_unchecked(layer, &x, radius);
        x = layer_eval_inner(layer, &x);
    }
    radius
}

fn layer_eval_inner<T: Scalar>(layer: &LayerParams<T>, x: &[T]) -> Vec<T> {
    let act = layer.activation();
    layer.preactivations(x).into_iter().map(|v| act.apply(v)).collect()
}
