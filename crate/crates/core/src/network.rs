//! Multi-layer perceptrons with monotone activations.
//!
//! A network is an ordered list of affine layers `y = f(W x + θ)`. Weights are
//! stored row-major so that each row is the weight vector of one neuron.
//!
//! # Document format
//!
//! Networks are exchanged as JSON documents:
//!
//! ```json
//! {
//!   "version": 1,
//!   "input_dim": 2,
//!   "layers": [
//!     { "weights": [[1.0, 0.0], [0.0, 1.0]], "biases": [0.0, 0.0], "activation": "tanh" },
//!     { "weights": [[0.5, -0.5]], "biases": [0.1], "activation": "elu", "alpha": 1.0 }
//!   ]
//! }
//! ```
//!
//! `weights` has one row per neuron and one column per input of the layer.
//! `activation` is one of `relu`, `logistic`, `tanh`, `linear`, `elu`; `alpha`
//! is required for `elu` and rejected otherwise.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

pub const DOCUMENT_VERSION: u32 = 1;

/// Non-decreasing scalar activation function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation<T> {
    Relu,
    Logistic,
    Tanh,
    Linear,
    /// `x` for `x > 0`, `alpha (e^x - 1)` otherwise. `alpha > 0`.
    Elu { alpha: T },
}

impl<T: Scalar> Activation<T> {
    pub fn elu(alpha: T) -> Result<Self> {
        if alpha.is_finite() && alpha > T::zero() {
            Ok(Activation::Elu { alpha })
        } else {
            Err(Error::InvalidActivation(format!(
                "elu alpha must be positive and finite, got {alpha}"
            )))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Logistic => "logistic",
            Activation::Tanh => "tanh",
            Activation::Linear => "linear",
            Activation::Elu { .. } => "elu",
        }
    }

    #[inline]
    pub fn apply(&self, v: T) -> T {
        match *self {
            Activation::Relu => v.max(T::zero()),
            Activation::Logistic => {
                // Evaluated on the side where exp cannot overflow.
                if v >= T::zero() {
                    T::one() / (T::one() + (-v).exp())
                } else {
                    let e = v.exp();
                    e / (T::one() + e)
                }
            }
            Activation::Tanh => v.tanh(),
            Activation::Linear => v,
            Activation::Elu { alpha } => {
                if v > T::zero() {
                    v
                } else {
                    alpha * v.exp_m1()
                }
            }
        }
    }

    pub fn cast<U: Scalar>(&self) -> Activation<U> {
        match *self {
            Activation::Relu => Activation::Relu,
            Activation::Logistic => Activation::Logistic,
            Activation::Tanh => Activation::Tanh,
            Activation::Linear => Activation::Linear,
            Activation::Elu { alpha } => Activation::Elu {
                alpha: U::lit(alpha.as_f64()),
            },
        }
    }
}

/// Evaluate activation `a` at `v`.
#[inline]
pub fn activate<T: Scalar>(a: &Activation<T>, v: T) -> T {
    a.apply(v)
}

/// Weights, biases and activation of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams<T> {
    rows: usize,
    cols: usize,
    weights: Vec<T>,
    biases: Vec<T>,
    activation: Activation<T>,
}

impl<T: Scalar> LayerParams<T> {
    /// Builds a layer from per-neuron weight rows.
    pub fn new(weights: Vec<Vec<T>>, biases: Vec<T>, activation: Activation<T>) -> Result<Self> {
        Self::checked(0, weights, biases, activation)
    }

    fn checked(
        layer: usize,
        weights: Vec<Vec<T>>,
        biases: Vec<T>,
        activation: Activation<T>,
    ) -> Result<Self> {
        let rows = weights.len();
        if rows == 0 {
            return Err(Error::LayerShape {
                layer,
                what: "weight matrix has no rows".into(),
            });
        }
        let cols = weights[0].len();
        if cols == 0 {
            return Err(Error::LayerShape {
                layer,
                what: "weight matrix has no columns".into(),
            });
        }
        if let Some((i, r)) = weights.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::LayerShape {
                layer,
                what: format!("weight row {i} has {} entries, row 0 has {cols}", r.len()),
            });
        }
        if biases.len() != rows {
            return Err(Error::LayerShape {
                layer,
                what: format!("{} biases for {rows} weight rows", biases.len()),
            });
        }
        if weights.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite {
                layer,
                field: "weights",
            });
        }
        if biases.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite {
                layer,
                field: "biases",
            });
        }
        if let Activation::Elu { alpha } = activation {
            Activation::elu(alpha)?;
        }
        Ok(Self {
            rows,
            cols,
            weights: weights.into_iter().flatten().collect(),
            biases,
            activation,
        })
    }

    /// Number of neurons.
    pub fn outputs(&self) -> usize {
        self.rows
    }

    /// Number of inputs.
    pub fn inputs(&self) -> usize {
        self.cols
    }

    /// Weight vector of neuron `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.weights[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.weights.chunks_exact(self.cols)
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    pub fn activation(&self) -> &Activation<T> {
        &self.activation
    }

    pub(crate) fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "layer input",
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Preactivations `W x + θ`. Caller guarantees `x.len() == inputs()`.
    pub(crate) fn preactivations(&self, x: &[T]) -> Vec<T> {
        self.rows()
            .zip(&self.biases)
            .map(|(w, &b)| dot(w, x) + b)
            .collect()
    }

    fn eval_unchecked(&self, x: &[T]) -> Vec<T> {
        let mut out = self.preactivations(x);
        for v in &mut out {
            *v = self.activation.apply(*v);
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> LayerParams<U> {
        LayerParams {
            rows: self.rows,
            cols: self.cols,
            weights: self.weights.iter().map(|w| U::lit(w.as_f64())).collect(),
            biases: self.biases.iter().map(|b| U::lit(b.as_f64())).collect(),
            activation: self.activation.cast(),
        }
    }
}

/// Evaluate a single layer: component `i` is `f(ω_i · x + θ_i)`.
pub fn layer_eval<T: Scalar>(layer: &LayerParams<T>, x: &[T]) -> Result<Vec<T>> {
    layer.check_input(x)?;
    Ok(layer.eval_unchecked(x))
}

/// A feed-forward network `F = f_L ∘ … ∘ f_1`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    layers: Vec<LayerParams<T>>,
}

impl<T: Scalar> Mlp<T> {
    pub fn new(layers: Vec<LayerParams<T>>) -> Result<Self> {
        let first = layers.first().ok_or(Error::EmptyNetwork)?;
        let mut expected = first.inputs();
        for (l, layer) in layers.iter().enumerate() {
            if layer.inputs() != expected {
                return Err(Error::DimensionChain {
                    layer: l,
                    expected,
                    found: layer.inputs(),
                });
            }
            expected = layer.outputs();
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[LayerParams<T>] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    /// Same network converted to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Mlp<U> {
        Mlp {
            layers: self.layers.iter().map(LayerParams::cast).collect(),
        }
    }

    pub(crate) fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Forward pass without the shape check; `x.len()` must equal `input_dim()`.
    pub(crate) fn eval_unchecked(&self, x: &[T]) -> Vec<T> {
        let mut cur = self.layers[0].eval_unchecked(x);
        for layer in &self.layers[1..] {
            cur = layer.eval_unchecked(&cur);
        }
        cur
    }

    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        Ok(self.eval_unchecked(x))
    }
}

/// `F(x)`: sequential composition of every layer.
pub fn forward<T: Scalar>(net: &Mlp<T>, x: &[T]) -> Result<Vec<T>> {
    net.eval(x)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    version: u32,
    input_dim: usize,
    layers: Vec<LayerDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    activation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
}

fn parse_activation<T: Scalar>(layer: usize, name: &str, alpha: Option<f64>) -> Result<Activation<T>> {
    let act = match name {
        "relu" => Activation::Relu,
        "logistic" => Activation::Logistic,
        "tanh" => Activation::Tanh,
        "linear" => Activation::Linear,
        "elu" => {
            let alpha = alpha.ok_or_else(|| {
                Error::InvalidActivation(format!("layer {layer}: elu requires `alpha`"))
            })?;
            return Activation::elu(T::lit(alpha));
        }
        other => return Err(Error::UnknownActivation(other.to_string())),
    };
    if alpha.is_some() {
        return Err(Error::InvalidActivation(format!(
            "layer {layer}: `alpha` is only valid for elu"
        )));
    }
    Ok(act)
}

/// Parse and validate a network document.
pub fn load_network<T: Scalar, R: Read>(source: R) -> Result<Mlp<T>> {
    let doc: NetworkDoc =
        serde_json::from_reader(source).map_err(|e| Error::Malformed(e.to_string()))?;
    if doc.version != DOCUMENT_VERSION {
        return Err(Error::UnsupportedVersion(doc.version));
    }
    let mut expected = doc.input_dim;
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (l, ld) in doc.layers.into_iter().enumerate() {
        let activation = parse_activation::<T>(l, &ld.activation, ld.alpha)?;
        if let Some(w) = ld.weights.first() {
            if w.len() != expected {
                return Err(Error::DimensionChain {
                    layer: l,
                    expected,
                    found: w.len(),
                });
            }
        }
        let weights = ld
            .weights
            .into_iter()
            .map(|r| r.into_iter().map(T::lit).collect())
            .collect();
        let biases = ld.biases.into_iter().map(T::lit).collect();
        let layer = LayerParams::checked(l, weights, biases, activation)?;
        expected = layer.outputs();
        layers.push(layer);
    }
    Mlp::new(layers)
}

pub fn read_network_file<T: Scalar>(path: impl AsRef<Path>) -> Result<Mlp<T>> {
    let file = std::fs::File::open(path)?;
    load_network(std::io::BufReader::new(file))
}

/// Serialize `net` as a network document.
pub fn write_network<T: Scalar, W: Write>(net: &Mlp<T>, sink: W) -> Result<()> {
    let doc = NetworkDoc {
        version: DOCUMENT_VERSION,
        input_dim: net.input_dim(),
        layers: net
            .layers
            .iter()
            .map(|l| LayerDoc {
                weights: l.rows().map(|r| r.iter().map(|w| w.as_f64()).collect()).collect(),
                biases: l.biases.iter().map(|b| b.as_f64()).collect(),
                activation: l.activation.name().to_string(),
                alpha: match l.activation {
                    Activation::Elu { alpha } => Some(alpha.as_f64()),
                    _ => None,
                },
            })
            .collect(),
    };
    serde_json::to_writer_pretty(sink, &doc).map_err(|e| Error::Malformed(e.to_string()))
}
