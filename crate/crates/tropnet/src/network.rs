//! ReLU feedforward networks with exact rational weights.
//!
//! Weights come from IEEE-754 doubles (model files) and are exactified on
//! load, so forward evaluation is exact. Double-precision Jacobian signatures
//! back the numerical region estimators.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational};

#[derive(Debug, Clone)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<Rational>,
}

/// A feedforward network `L_d . sigma . ... . sigma . L_1`, with ReLU
/// applied after every layer and after the last one only when
/// `final_activation` is set.
#[derive(Debug, Clone)]
pub struct Network {
    architecture: Vec<usize>,
    layers: Vec<Layer>,
    final_activation: bool,
}

impl Network {
    pub fn new(layers: Vec<Layer>, final_activation: bool) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidModel(
                "network needs at least one layer".into(),
            ));
        }
        let mut architecture = vec![layers[0].weights.cols()];
        for (idx, layer) in layers.iter().enumerate() {
            let fan_in = *architecture.last().expect("non-empty");
            if layer.weights.cols() != fan_in {
                return Err(Error::InvalidModel(format!(
                    "layer {idx}: expected {fan_in} input columns, got {}",
                    layer.weights.cols()
                )));
            }
            if layer.bias.len() != layer.weights.rows() {
                return Err(Error::InvalidModel(format!(
                    "layer {idx}: bias length {} does not match {} rows",
                    layer.bias.len(),
                    layer.weights.rows()
                )));
            }
            architecture.push(layer.weights.rows());
        }
        Ok(Network {
            architecture,
            layers,
            final_activation,
        })
    }

    pub fn architecture(&self) -> &[usize] {
        &self.architecture
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn final_activation(&self) -> bool {
        self.final_activation
    }

    pub fn input_dim(&self) -> usize {
        self.architecture[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.architecture.last().expect("non-empty")
    }

    /// Exact forward pass.
    pub fn forward(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
                context: "network input",
            });
        }
        let depth = self.layers.len();
        let mut v = x.to_vec();
        for (idx, layer) in self.layers.iter().enumerate() {
            let mut pre = layer.weights.mul_vec(&v)?;
            for (p, b) in pre.iter_mut().zip(&layer.bias) {
                *p += b;
            }
            let activate = idx + 1 < depth || self.final_activation;
            if activate {
                for p in pre.iter_mut() {
                    if p.is_negative() {
                        *p = Rational::zero();
                    }
                }
            }
            v = pre;
        }
        Ok(v)
    }

    /// Double-precision Jacobian signature at `x` for scalar-output networks:
    /// the product of weight matrices masked by active units (active iff the
    /// preactivation is strictly positive; the kink at zero takes the
    /// inactive branch), rounded to 10 decimals.
    pub fn jacobian(&self, x: &[f64]) -> Result<JacobianSignature> {
        if self.output_dim() != 1 {
            return Err(Error::ScalarOutputRequired(self.output_dim()));
        }
        let dense = DenseNet::from(self);
        Ok(dense.jacobian_signature(x))
    }

    /// Permutation-invariant two-layer network `x -> sum_i relu(Wx)_i` with
    /// `W = lambda I + gamma 1 1^T`; zero biases, linear output.
    pub fn build_invariant(n: usize, lambda: f64, gamma: f64) -> Result<Network> {
        if n < 2 {
            return Err(Error::InvalidModel(
                "invariant construction needs input size >= 2".into(),
            ));
        }
        let lam = Rational::from_f64(lambda)?;
        let gam = Rational::from_f64(gamma)?;
        let mut w = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j { &lam + &gam } else { gam.clone() };
                w.set(i, j, v);
            }
        }
        let hidden = Layer {
            weights: w,
            bias: vec![Rational::zero(); n],
        };
        let output = Layer {
            weights: Matrix::from_rows(vec![vec![Rational::one(); n]])?,
            bias: vec![Rational::zero()],
        };
        Network::new(vec![hidden, output], false)
    }

    /// Random network with uniform Glorot-style weights and zero biases;
    /// reproducible from the seed.
    pub fn random(architecture: &[usize], seed: u64) -> Result<Network> {
        Self::random_with(architecture, seed, false)
    }

    /// Random permutation-invariant network: `build_invariant` with
    /// `lambda, gamma` drawn uniformly from `(-1, 1)`.
    pub fn random_invariant(n: usize, seed: u64) -> Result<Network> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = rng.gen_range(-1.0..1.0);
        let gamma = rng.gen_range(-1.0..1.0);
        Self::build_invariant(n, lambda, gamma)
    }

    /// Random network with uniform Glorot-style weights and uniform biases in
    /// `(-1/2, 1/2)`.
    pub fn random_with_biases(architecture: &[usize], seed: u64) -> Result<Network> {
        Self::random_with(architecture, seed, true)
    }

    fn random_with(architecture: &[usize], seed: u64, biases: bool) -> Result<Network> {
        if architecture.len() < 2 {
            return Err(Error::InvalidModel(
                "architecture needs input and output sizes".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::new();
        for w in architecture.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let scale = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut rows = Vec::with_capacity(fan_out);
            for _ in 0..fan_out {
                let row = (0..fan_in)
                    .map(|_| Rational::from_f64(rng.gen_range(-scale..scale)))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
            let bias = (0..fan_out)
                .map(|_| {
                    if biases {
                        Rational::from_f64(rng.gen_range(-0.5..0.5))
                    } else {
                        Ok(Rational::zero())
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            layers.push(Layer {
                weights: Matrix::from_rows(rows)?,
                bias,
            });
        }
        Network::new(layers, false)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Network> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("model JSON: {e}")))?;
        file.into_network()
    }
}

/// On-disk model format: weights and biases as IEEE-754 doubles, exactified
/// on load.
#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    architecture: Vec<usize>,
    final_activation: bool,
    layers: Vec<ModelLayer>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelLayer {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl From<&Network> for ModelFile {
    fn from(net: &Network) -> Self {
        ModelFile {
            architecture: net.architecture.clone(),
            final_activation: net.final_activation,
            layers: net
                .layers
                .iter()
                .map(|l| ModelLayer {
                    weights: l
                        .weights
                        .row_iter()
                        .map(|r| r.iter().map(Rational::to_f64).collect())
                        .collect(),
                    bias: l.bias.iter().map(Rational::to_f64).collect(),
                })
                .collect(),
        }
    }
}

impl ModelFile {
    fn into_network(self) -> Result<Network> {
        let mut layers = Vec::with_capacity(self.layers.len());
        for (idx, layer) in self.layers.into_iter().enumerate() {
            let rows = layer
                .weights
                .iter()
                .map(|row| row.iter().map(|&v| Rational::from_f64(v)).collect())
                .collect::<Result<Vec<Vec<_>>>>()
                .map_err(|e| Error::InvalidModel(format!("layer {idx} weights: {e}")))?;
            let bias = layer
                .bias
                .iter()
                .map(|&v| Rational::from_f64(v))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::InvalidModel(format!("layer {idx} bias: {e}")))?;
            layers.push(Layer {
                weights: Matrix::from_rows(rows)?,
                bias,
            });
        }
        let net = Network::new(layers, self.final_activation)?;
        if net.architecture != self.architecture {
            return Err(Error::InvalidModel(format!(
                "declared architecture {:?} does not match layer shapes {:?}",
                self.architecture, net.architecture
            )));
        }
        Ok(net)
    }
}

/// Jacobian entries rounded to 10 decimal places; rounding happens before any
/// comparison or hashing, so signatures with equal rounded entries compare
/// equal.
#[derive(Debug, Clone)]
pub struct JacobianSignature {
    entries: Vec<f64>,
}

pub(crate) fn round10(x: f64) -> f64 {
    let r = (x * 1e10).round() / 1e10;
    if r == 0.0 {
        0.0 // normalize -0.0
    } else {
        r
    }
}

impl JacobianSignature {
    pub fn new(raw: Vec<f64>) -> Self {
        JacobianSignature {
            entries: raw.into_iter().map(round10).collect(),
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn bits(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|v| v.to_bits())
    }
}

impl PartialEq for JacobianSignature {
    fn eq(&self, other: &Self) -> bool {
        self.bits().eq(other.bits())
    }
}

impl Eq for JacobianSignature {}

impl PartialOrd for JacobianSignature {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for JacobianSignature {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Total order on rounded values; sign-aware so it matches numeric
        // order on the normalized entries.
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match a.partial_cmp(b) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        self.entries.len().cmp(&other.entries.len())
    }
}

impl std::hash::Hash for JacobianSignature {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for b in self.bits() {
            b.hash(state);
        }
    }
}

/// Double-precision copy of a network for the sampling hot path.
pub(crate) struct DenseNet {
    layers: Vec<(Vec<Vec<f64>>, Vec<f64>)>,
    final_activation: bool,
    input_dim: usize,
}

impl DenseNet {
    pub(crate) fn from(net: &Network) -> Self {
        DenseNet {
            layers: net
                .layers
                .iter()
                .map(|l| {
                    (
                        l.weights
                            .row_iter()
                            .map(|r| r.iter().map(Rational::to_f64).collect())
                            .collect(),
                        l.bias.iter().map(Rational::to_f64).collect(),
                    )
                })
                .collect(),
            final_activation: net.final_activation,
            input_dim: net.input_dim(),
        }
    }

    pub(crate) fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub(crate) fn forward(&self, x: &[f64]) -> Vec<f64> {
        let depth = self.layers.len();
        let mut v = x.to_vec();
        for (idx, (w, b)) in self.layers.iter().enumerate() {
            let mut pre: Vec<f64> = w
                .iter()
                .zip(b)
                .map(|(row, bi)| row.iter().zip(&v).map(|(a, xi)| a * xi).sum::<f64>() + bi)
                .collect();
            if idx + 1 < depth || self.final_activation {
                for p in pre.iter_mut() {
                    if *p <= 0.0 {
                        *p = 0.0;
                    }
                }
            }
            v = pre;
        }
        v
    }

    /// Scalar forward value.
    pub(crate) fn forward_scalar(&self, x: &[f64]) -> f64 {
        self.forward(x)[0]
    }

    /// Jacobian row of a scalar-output network as masked weight products.
    pub(crate) fn jacobian_signature(&self, x: &[f64]) -> JacobianSignature {
        let depth = self.layers.len();
        let mut v = x.to_vec();
        // acc starts as the identity, folded as masked products row by row.
        let mut acc: Vec<Vec<f64>> = (0..x.len())
            .map(|i| {
                let mut e = vec![0.0; x.len()];
                e[i] = 1.0;
                e
            })
            .collect();
        for (idx, (w, b)) in self.layers.iter().enumerate() {
            let pre: Vec<f64> = w
                .iter()
                .zip(b)
                .map(|(row, bi)| row.iter().zip(&v).map(|(a, xi)| a * xi).sum::<f64>() + bi)
                .collect();
            // next_acc[i] = sum_j w[i][j] * acc[j]
            let mut next_acc: Vec<Vec<f64>> = w
                .iter()
                .map(|row| {
                    let mut out = vec![0.0; x.len()];
                    for (j, &wij) in row.iter().enumerate() {
                        if wij != 0.0 {
                            for (o, a) in out.iter_mut().zip(&acc[j]) {
                                *o += wij * a;
                            }
                        }
                    }
                    out
                })
                .collect();
            let activate = idx + 1 < depth || self.final_activation;
            let mut post = pre;
            if activate {
                for (i, p) in post.iter_mut().enumerate() {
                    if *p <= 0.0 {
                        *p = 0.0;
                        next_acc[i].iter_mut().for_each(|a| *a = 0.0);
                    }
                }
            }
            v = post;
            acc = next_acc;
        }
        JacobianSignature::new(acc.swap_remove(0))
    }
}
