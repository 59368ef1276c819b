//! Small fully connected networks with hand-written backprop and Adam.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::MixedStrategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the pre-activation value.
    fn derivative(self, pre: f64, post: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - post * post,
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// One affine layer; `weights` is row-major `outputs × inputs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn affine(&self, input: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|o| {
                let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
                self.biases[o] + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>()
            })
            .collect()
    }
}

/// Feed-forward network: affine layers, `activation` between them, raw
/// outputs from the last layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
    activation: Activation,
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "network needs at least two positive layer sizes, got {dims:?}"
        )));
    }
    Ok(())
}

impl Mlp {
    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], activation: Activation, rng: &mut R) -> Result<Self> {
        check_dims(dims)?;
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut layer = Layer::zeros(fan_in, fan_out);
                for v in &mut layer.weights {
                    *v = rng.gen_range(-limit..=limit);
                }
                layer
            })
            .collect();
        Ok(Self { layers, activation })
    }

    pub fn zeros(dims: &[usize], activation: Activation) -> Result<Self> {
        check_dims(dims)?;
        let layers = dims.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect();
        Ok(Self { layers, activation })
    }

    pub fn from_layers(layers: Vec<Layer>, activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::DimensionMismatch("no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::DimensionMismatch(format!("layer {i} has inconsistent shapes")));
            }
            if i > 0 && layers[i - 1].outputs != l.inputs {
                return Err(Error::DimensionMismatch(format!(
                    "layer {i} expects {} inputs but previous layer emits {}",
                    l.inputs,
                    layers[i - 1].outputs
                )));
            }
        }
        if layers
            .iter()
            .any(|l| l.weights.iter().chain(&l.biases).any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidConfig("non-finite network parameter".into()));
        }
        Ok(Self { layers, activation })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs)
            .chain(self.layers.iter().map(|l| l.outputs))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.outputs).unwrap_or(0)
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Parameters flattened layer by layer, weights before biases.
    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for a network with {}",
                params.len(),
                self.num_params()
            )));
        }
        for (slot, v) in self.params_mut().zip(params) {
            *slot = *v;
        }
        Ok(())
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "input has {} entries, network expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let last = self.layers.len() - 1;
        let mut x = input.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            x = layer.affine(&x);
            if i < last {
                x.iter_mut().for_each(|v| *v = self.activation.apply(*v));
            }
        }
        Ok(x)
    }

    /// Layer inputs (post-activation) and pre-activations for backprop.
    fn forward_trace(&self, input: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len() + 1);
        let mut pres = Vec::with_capacity(self.layers.len());
        inputs.push(input.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let pre = layer.affine(inputs.last().expect("non-empty"));
            let post = if i < last {
                pre.iter().map(|&v| self.activation.apply(v)).collect()
            } else {
                pre.clone()
            };
            pres.push(pre);
            inputs.push(post);
        }
        (inputs, pres)
    }

    pub fn to_checkpoint(&self) -> Result<String> {
        let ckpt = Checkpoint {
            layer_dims: self.layer_dims(),
            activation: self.activation,
            layers: self
                .layers
                .iter()
                .map(|l| CheckpointLayer {
                    weights: l.weights.chunks(l.inputs).map(<[f64]>::to_vec).collect(),
                    biases: l.biases.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&ckpt)?)
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_str(text)?;
        if ckpt.layers.len() + 1 != ckpt.layer_dims.len() {
            return Err(Error::DimensionMismatch("layer count disagrees with dims header".into()));
        }
        let layers = ckpt
            .layers
            .into_iter()
            .zip(ckpt.layer_dims.windows(2))
            .map(|(l, dims)| {
                if l.weights.len() != dims[1] || l.weights.iter().any(|r| r.len() != dims[0]) {
                    return Err(Error::DimensionMismatch("weight matrix disagrees with dims header".into()));
                }
                Ok(Layer {
                    inputs: dims[0],
                    outputs: dims[1],
                    weights: l.weights.into_iter().flatten().collect(),
                    biases: l.biases,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(layers, ckpt.activation)
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    layer_dims: Vec<usize>,
    activation: Activation,
    layers: Vec<CheckpointLayer>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointLayer {
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

pub fn mlp_forward(net: &Mlp, input: &[f64]) -> Result<Vec<f64>> {
    net.forward(input)
}

/// Parameter gradients shaped like the network's layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| Layer::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }

    pub fn flat(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }

    fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        let flat = other.flat();
        for (a, b) in self.values_mut().zip(flat) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.values_mut().for_each(|v| *v *= factor);
    }

    pub fn norm(&self) -> f64 {
        self.flat().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Reverse-mode gradient of `output_gradient · net(input)` with respect to
/// every parameter.
pub fn backprop(net: &Mlp, input: &[f64], output_gradient: &[f64]) -> Result<Gradients> {
    net.check_input(input)?;
    if output_gradient.len() != net.output_dim() {
        return Err(Error::DimensionMismatch(format!(
            "output gradient has {} entries, network emits {}",
            output_gradient.len(),
            net.output_dim()
        )));
    }
    let (inputs, pres) = net.forward_trace(input);
    let mut grads = Gradients::zeros_like(net);
    let last = net.layers.len() - 1;
    let mut delta = output_gradient.to_vec();
    for i in (0..net.layers.len()).rev() {
        if i < last {
            for (d, (&pre, &post)) in delta.iter_mut().zip(pres[i].iter().zip(&inputs[i + 1])) {
                *d *= net.activation.derivative(pre, post);
            }
        }
        let layer = &net.layers[i];
        let g = &mut grads.layers[i];
        let x = &inputs[i];
        for o in 0..layer.outputs {
            g.biases[o] = delta[o];
            let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
            for (w, &xi) in row.iter_mut().zip(x) {
                *w = delta[o] * xi;
            }
        }
        if i > 0 {
            delta = (0..layer.inputs)
                .map(|c| {
                    (0..layer.outputs)
                        .map(|o| layer.weights[o * layer.inputs + c] * delta[o])
                        .sum()
                })
                .collect();
        }
    }
    Ok(grads)
}

fn log_sum_exp(logits: &[f64]) -> (f64, f64) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|l| (l - max).exp()).sum();
    (max, sum)
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> MixedStrategy {
    let (max, sum) = log_sum_exp(logits);
    MixedStrategy::from_simplex(logits.iter().map(|l| (l - max).exp() / sum).collect())
}

/// `KL(target ‖ softmax(logits))` and its gradient `softmax(logits) - target`.
pub fn kl_loss(target: &MixedStrategy, logits: &[f64]) -> (f64, Vec<f64>) {
    let (max, sum) = log_sum_exp(logits);
    let log_norm = max + sum.ln();
    let value = target
        .probs()
        .iter()
        .zip(logits)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, &l)| t * (t.ln() - (l - log_norm)))
        .sum();
    let grad = logits
        .iter()
        .zip(target.probs())
        .map(|(&l, &t)| (l - log_norm).exp() - t)
        .collect();
    (value, grad)
}

/// Sum of squared errors and its gradient `2 (pred - target)`.
pub fn mse_and_grad(predictions: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    let diff: Vec<f64> = predictions.iter().zip(targets).map(|(p, t)| p - t).collect();
    let value = diff.iter().map(|d| d * d).sum();
    Ok((value, diff.into_iter().map(|d| 2.0 * d).collect()))
}

/// Adam moments for one network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
}

impl AdamState {
    pub fn new(num_params: usize, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first_moment: vec![0.0; num_params],
            second_moment: vec![0.0; num_params],
        }
    }

    pub fn for_net(net: &Mlp, learning_rate: f64) -> Self {
        Self::new(net.num_params(), learning_rate)
    }
}

/// Clips `gradients` to global norm `max_grad_norm` (no clipping when it is
/// not positive and finite), then applies one bias-corrected Adam update.
pub fn adam_step(state: &mut AdamState, net: &mut Mlp, gradients: &Gradients, max_grad_norm: f64) -> Result<()> {
    let mut g = gradients.flat();
    if g.len() != net.num_params() || state.first_moment.len() != g.len() {
        return Err(Error::DimensionMismatch(
            "gradient, optimizer and network sizes disagree".into(),
        ));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteGradient);
    }
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if max_grad_norm.is_finite() && max_grad_norm > 0.0 && norm > max_grad_norm {
        let factor = max_grad_norm / norm;
        g.iter_mut().for_each(|v| *v *= factor);
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - state.beta1.powi(t);
    let c2 = 1.0 - state.beta2.powi(t);
    for (((p, gi), m), v) in net
        .params_mut()
        .zip(&g)
        .zip(state.first_moment.iter_mut())
        .zip(state.second_moment.iter_mut())
    {
        *m = state.beta1 * *m + (1.0 - state.beta1) * gi;
        *v = state.beta2 * *v + (1.0 - state.beta2) * gi * gi;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hand_net() -> Mlp {
        // 2-4-2 tanh network with small integer-ish weights.
        let l1 = Layer {
            inputs: 2,
            outputs: 4,
            weights: vec![0.5, -0.25, 0.1, 0.2, -0.3, 0.4, 0.0, 1.0],
            biases: vec![0.0, 0.1, -0.1, 0.2],
        };
        let l2 = Layer {
            inputs: 4,
            outputs: 2,
            weights: vec![1.0, -1.0, 0.5, 0.25, -0.5, 0.3, 0.2, -0.1],
            biases: vec![0.05, -0.05],
        };
        Mlp::from_layers(vec![l1, l2], Activation::Tanh).unwrap()
    }

    #[test]
    fn forward_zero_and_identity() {
        let zero = Mlp::zeros(&[3, 5, 2], Activation::Tanh).unwrap();
        assert_eq!(zero.forward(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0, 0.0]);

        let id = Mlp::from_layers(
            vec![Layer {
                inputs: 2,
                outputs: 2,
                weights: vec![1.0, 0.0, 0.0, 1.0],
                biases: vec![0.0, 0.0],
            }],
            Activation::Tanh,
        )
        .unwrap();
        assert_eq!(id.forward(&[0.7, -3.0]).unwrap(), vec![0.7, -3.0]);
        assert!(matches!(id.forward(&[1.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn forward_hand_computed() {
        // Hidden pre-activations for input (1, 2):
        //   0.5 - 0.5 + 0 = 0, 0.1 + 0.4 + 0.1 = 0.6, -0.3 + 0.8 - 0.1 = 0.4, 0 + 2 + 0.2 = 2.2
        let h = [0.0f64.tanh(), 0.6f64.tanh(), 0.4f64.tanh(), 2.2f64.tanh()];
        let o0 = 0.05 + h[0] - h[1] + 0.5 * h[2] + 0.25 * h[3];
        let o1 = -0.05 - 0.5 * h[0] + 0.3 * h[1] + 0.2 * h[2] - 0.1 * h[3];
        let out = hand_net().forward(&[1.0, 2.0]).unwrap();
        assert!((out[0] - o0).abs() < 1e-15);
        assert!((out[1] - o1).abs() < 1e-15);
        // Frozen values of the expressions above.
        assert!((out[0] - (-0.053_139_303_362_559_98)).abs() < 1e-12, "{}", out[0]);
        assert!((out[1] - (0.089_530_349_547_310_39)).abs() < 1e-12, "{}", out[1]);
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&[0.0, 0.0]).probs(), &[0.5, 0.5]);
        let u = softmax(&[3.0, 3.0, 3.0]);
        assert!(u.probs().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        let s = softmax(&[1000.0, 0.0]);
        assert_eq!(s.prob(0), 1.0);
        assert!(s.prob(1) >= 0.0 && s.prob(1) < 1e-300);
    }

    #[test]
    fn kl_examples() {
        let logits = [0.3, -1.2, 0.8];
        let (v, _) = kl_loss(&softmax(&logits), &logits);
        assert!(v.abs() < 1e-15);
        let (v, g) = kl_loss(&MixedStrategy::pure(2, 0), &[0.0, 0.0]);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(g, vec![-0.5, 0.5]);
    }

    #[test]
    fn kl_gradient_matches_finite_differences() {
        let target = MixedStrategy::new(vec![0.2, 0.0, 0.8]).unwrap();
        let logits = [0.4, -0.7, 1.1];
        let (_, g) = kl_loss(&target, &logits);
        let h = 1e-5;
        for i in 0..3 {
            let mut up = logits;
            up[i] += h;
            let mut dn = logits;
            dn[i] -= h;
            let fd = (kl_loss(&target, &up).0 - kl_loss(&target, &dn).0) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse_and_grad(&[1.0, 2.0], &[1.0, 2.0]).unwrap().0, 0.0);
        let (v, g) = mse_and_grad(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(v, 5.0);
        assert_eq!(g, vec![2.0, 4.0]);
        assert!(mse_and_grad(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn backprop_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = Mlp::new(&[3, 4, 2], Activation::Tanh, &mut rng).unwrap();
        let zero = backprop(&net, &[0.1, 0.2, 0.3], &[0.0, 0.0]).unwrap();
        assert!(zero.flat().iter().all(|&v| v == 0.0));

        let linear = Mlp::new(&[3, 2], Activation::Tanh, &mut rng).unwrap();
        let x = [0.5, -1.0, 2.0];
        let go = [0.3, -0.7];
        let g = backprop(&linear, &x, &go).unwrap();
        for o in 0..2 {
            for i in 0..3 {
                assert_eq!(g.layers[0].weights[o * 3 + i], go[o] * x[i]);
            }
            assert_eq!(g.layers[0].biases[o], go[o]);
        }
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = Mlp::new(&[2, 8, 3], Activation::Tanh, &mut rng).unwrap();
        let x = [0.3, -0.8];
        let go = [0.5, -1.0, 0.25];
        let g = backprop(&net, &x, &go).unwrap().flat();
        let base = net.params();
        let h = 1e-5;
        let objective = |p: &[f64]| {
            let mut n = net.clone();
            n.set_params(p).unwrap();
            n.forward(&x).unwrap().iter().zip(&go).map(|(a, b)| a * b).sum::<f64>()
        };
        for i in 0..base.len() {
            let mut up = base.clone();
            up[i] += h;
            let mut dn = base.clone();
            dn[i] -= h;
            let fd = (objective(&up) - objective(&dn)) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * fd.abs().max(1.0), "param {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn adam_examples() {
        let mut net = Mlp::zeros(&[1, 1], Activation::Identity).unwrap();
        net.set_params(&[2.0, 0.0]).unwrap();
        let mut state = AdamState::for_net(&net, 0.1);
        let zero = Gradients::zeros_like(&net);
        adam_step(&mut state, &mut net, &zero, 0.5).unwrap();
        assert_eq!(net.params(), vec![2.0, 0.0]);

        let mut net = Mlp::zeros(&[1, 1], Activation::Identity).unwrap();
        net.set_params(&[1.0, 0.0]).unwrap();
        let mut state = AdamState::for_net(&net, 0.1);
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].weights[0] = 1.0;
        adam_step(&mut state, &mut net, &g, f64::INFINITY).unwrap();
        // m_hat = v_hat = 1, so the step is lr / (1 + eps).
        assert!((net.params()[0] - (1.0 - 0.1 / (1.0 + 1e-8))).abs() < 1e-15);
    }

    #[test]
    fn adam_clips_global_norm() {
        let mut net = Mlp::zeros(&[1, 2], Activation::Identity).unwrap();
        let mut state = AdamState::for_net(&net, 0.1);
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].weights = vec![6.0, 8.0]; // norm 10
        adam_step(&mut state, &mut net, &g, 0.5).unwrap();
        // After clipping by 0.05 the first moment holds 0.1 * (0.3, 0.4).
        assert!((state.first_moment[0] - 0.03).abs() < 1e-15);
        assert!((state.first_moment[1] - 0.04).abs() < 1e-15);
    }

    #[test]
    fn adam_rejects_non_finite() {
        let mut net = Mlp::zeros(&[1, 1], Activation::Identity).unwrap();
        let mut state = AdamState::for_net(&net, 0.1);
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].biases[0] = f64::NAN;
        assert!(matches!(
            adam_step(&mut state, &mut net, &g, 0.5),
            Err(Error::NonFiniteGradient)
        ));
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let net = Mlp::new(&[2, 8, 3], Activation::Tanh, &mut rng).unwrap();
        let text = net.to_checkpoint().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["layer_dims"], serde_json::json!([2, 8, 3]));
        assert_eq!(Mlp::from_checkpoint(&text).unwrap(), net);
    }
}
