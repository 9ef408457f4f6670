//! Feed-forward tanh network trained on a squared TD loss.
//!
//! Parameters live in one flat `Vec<f64>`. For each layer the weight matrix
//! (`out × in`, row-major) comes first, followed by its bias vector. Gradients
//! and optimizer moments share that layout, so the optimizer works on plain
//! slices.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CHECKPOINT_MAGIC: &[u8; 8] = b"NSTMLP01";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproximatorConfig {
    /// Hidden layer widths.
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for ApproximatorConfig {
    fn default() -> Self {
        ApproximatorConfig {
            hidden: vec![32, 32],
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl ApproximatorConfig {
    pub fn layer_dims(&self, input: usize, output: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 2);
        dims.push(input);
        dims.extend_from_slice(&self.hidden);
        dims.push(output);
        dims
    }
}

/// Multilayer perceptron with tanh hidden units and a linear output layer.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    dims: Vec<usize>,
    params: Vec<f64>,
}

fn param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::Config(format!("invalid layer dimensions {dims:?}")));
    }
    Ok(())
}

impl Mlp {
    /// Uniform `±sqrt(6 / (fan_in + fan_out))` weights, zero biases.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        check_dims(dims)?;
        let mut params = Vec::with_capacity(param_count(dims));
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| rng.gen_range(-limit..limit)));
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Ok(Mlp {
            dims: dims.to_vec(),
            params,
        })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        Ok(Mlp {
            dims: dims.to_vec(),
            params: vec![0.0; param_count(dims)],
        })
    }

    pub fn from_parameters(dims: &[usize], params: Vec<f64>) -> Result<Self> {
        check_dims(dims)?;
        let expected = param_count(dims);
        if params.len() != expected {
            return Err(Error::Config(format!(
                "expected {expected} parameters for {dims:?}, got {}",
                params.len()
            )));
        }
        Ok(Mlp {
            dims: dims.to_vec(),
            params,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Offsets of `(weights, bias)` for layer `l` inside the flat parameter vector.
    fn layer_offsets(&self, layer: usize) -> (usize, usize) {
        let mut off = 0;
        for w in self.dims.windows(2).take(layer) {
            off += w[0] * w[1] + w[1];
        }
        (off, off + self.dims[layer] * self.dims[layer + 1])
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut acts = Activations::default();
        self.forward_into(x, &mut acts);
        acts.layers.pop().unwrap()
    }

    /// Forward pass keeping every layer's output for backprop.
    pub fn forward_into(&self, x: &[f64], acts: &mut Activations) {
        assert_eq!(
            x.len(),
            self.input_dim(),
            "input has length {} but the network expects {}",
            x.len(),
            self.input_dim()
        );
        acts.layers.resize_with(self.dims.len(), Vec::new);
        acts.layers[0].clear();
        acts.layers[0].extend_from_slice(x);
        let last = self.num_layers() - 1;
        for l in 0..self.num_layers() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let (w_off, b_off) = self.layer_offsets(l);
            let weights = &self.params[w_off..w_off + n_in * n_out];
            let bias = &self.params[b_off..b_off + n_out];
            let (before, after) = acts.layers.split_at_mut(l + 1);
            let input = &before[l];
            let out = &mut after[0];
            out.clear();
            for (row, b) in weights.chunks_exact(n_in).zip(bias) {
                let z = b + dot(row, input);
                out.push(if l == last { z } else { z.tanh() });
            }
        }
    }

    /// Gradient of `(Q(x)[action] - td_target)^2` with respect to every parameter.
    pub fn backward(&self, x: &[f64], action: usize, td_target: f64) -> Gradients {
        let mut grads = Gradients::zeros_like(self);
        let mut acts = Activations::default();
        self.accumulate_td_gradient(x, action, td_target, 1.0, &mut acts, &mut grads);
        grads
    }

    /// Adds `weight * ∂/∂θ (Q(x)[action] - td_target)^2` into `grads` and returns
    /// the residual `Q(x)[action] - td_target`.
    pub fn accumulate_td_gradient(
        &self,
        x: &[f64],
        action: usize,
        td_target: f64,
        weight: f64,
        acts: &mut Activations,
        grads: &mut Gradients,
    ) -> f64 {
        assert!(action < self.output_dim(), "action {action} out of range");
        assert_eq!(grads.0.len(), self.params.len());
        self.forward_into(x, acts);
        let residual = acts.layers[self.num_layers()][action] - td_target;

        let mut delta = std::mem::take(&mut acts.delta);
        let mut prev = std::mem::take(&mut acts.prev);
        delta.clear();
        delta.resize(self.output_dim(), 0.0);
        delta[action] = 2.0 * residual * weight;
        for l in (0..self.num_layers()).rev() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let (w_off, b_off) = self.layer_offsets(l);
            let input = &acts.layers[l];
            for (j, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &mut grads.0[w_off + j * n_in..w_off + (j + 1) * n_in];
                for (g, a) in row.iter_mut().zip(input) {
                    *g += d * a;
                }
                grads.0[b_off + j] += d;
            }
            if l == 0 {
                break;
            }
            let weights = &self.params[w_off..w_off + n_in * n_out];
            prev.clear();
            prev.resize(n_in, 0.0);
            for (row, &d) in weights.chunks_exact(n_in).zip(&delta) {
                if d == 0.0 {
                    continue;
                }
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += w * d;
                }
            }
            for (p, a) in prev.iter_mut().zip(input) {
                *p *= 1.0 - a * a;
            }
            std::mem::swap(&mut delta, &mut prev);
        }
        acts.delta = delta;
        acts.prev = prev;
        residual
    }

    /// Exact value equality of all parameters.
    pub fn parameters_equal(&self, other: &Mlp) -> bool {
        assert_eq!(
            self.dims, other.dims,
            "comparing networks with different architectures"
        );
        self.params == other.params
    }

    pub fn copy_from(&mut self, src: &Mlp) {
        assert_eq!(
            self.dims, src.dims,
            "copying between different architectures"
        );
        self.params.copy_from_slice(&src.params);
    }

    /// Serialises as: magic, `u32` layer count, `u32` dims, then every
    /// parameter as little-endian `f64` in layout order.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&(self.dims.len() as u32).to_le_bytes())?;
        for &d in &self.dims {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        for p in &self.params {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let n = u32::from_le_bytes(word) as usize;
        if !(2..=64).contains(&n) {
            return Err(Error::Checkpoint(format!("implausible layer count {n}")));
        }
        let mut dims = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut word)?;
            dims.push(u32::from_le_bytes(word) as usize);
        }
        check_dims(&dims).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let mut params = Vec::with_capacity(param_count(&dims));
        let mut buf = [0u8; 8];
        for _ in 0..param_count(&dims) {
            r.read_exact(&mut buf)?;
            params.push(f64::from_le_bytes(buf));
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::Checkpoint("trailing bytes".into()));
        }
        Ok(Mlp { dims, params })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::file(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
        Mlp::read_from(std::io::BufReader::new(file))
    }
}

/// Per-layer outputs of the last forward pass; `layers[0]` is the input.
#[derive(Clone, Debug, Default)]
pub struct Activations {
    pub layers: Vec<Vec<f64>>,
    // Backprop scratch, kept here so repeated calls do not allocate.
    delta: Vec<f64>,
    prev: Vec<f64>,
}

impl Activations {
    /// Output of the last layer.
    pub fn output(&self) -> &[f64] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Dot product with four independent accumulators, which keeps the
/// floating-point add chain from serialising the loop.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Gradient in the network's flat parameter layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients(pub Vec<f64>);

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Gradients(vec![0.0; net.params.len()])
    }

    pub fn clear(&mut self) {
        self.0.iter_mut().for_each(|g| *g = 0.0);
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|g| g.is_finite())
    }
}

/// Adam moments for one parameter vector.
#[derive(Clone, Debug)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    steps: u64,
}

impl Adam {
    pub fn new(num_params: usize, cfg: &ApproximatorConfig) -> Result<Self> {
        if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
            return Err(Error::Config(
                "learning rate must be positive and finite".into(),
            ));
        }
        if !(0.0..1.0).contains(&cfg.beta1) || !(0.0..1.0).contains(&cfg.beta2) {
            return Err(Error::Config("Adam decay rates must lie in [0, 1)".into()));
        }
        Ok(Adam {
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            epsilon: cfg.epsilon,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            steps: 0,
        })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn learning_rate(&self) -> f64 {
        self.lr
    }

    /// One bias-corrected Adam step. Non-finite gradients leave everything untouched.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::Training(format!(
                "non-finite gradient at parameter {i}"
            )));
        }
        self.steps += 1;
        let t = self.steps as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.epsilon);
        }
        Ok(())
    }
}

pub fn apply_gradients(net: &mut Mlp, optimizer: &mut Adam, grads: &Gradients) -> Result<()> {
    optimizer.step(net.params_mut(), &grads.0)
}

/// Central-difference estimate of the TD-loss gradient, one parameter at a time.
pub fn numerical_gradient(net: &Mlp, x: &[f64], action: usize, td_target: f64, h: f64) -> Vec<f64> {
    let loss = |n: &Mlp| (n.forward(x)[action] - td_target).powi(2);
    let mut probe = net.clone();
    (0..net.params.len())
        .map(|i| {
            let orig = probe.params[i];
            probe.params[i] = orig + h;
            let up = loss(&probe);
            probe.params[i] = orig - h;
            let down = loss(&probe);
            probe.params[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖ / (‖a‖ + ‖b‖)`, zero when both vectors vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let diff = norm(&mut a.iter().zip(b).map(|(x, y)| x - y));
    let scale = norm(&mut a.iter().copied()) + norm(&mut b.iter().copied());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub nets: usize,
    pub max_relative_error: f64,
    pub worst_net: usize,
}

/// Compares backprop with central differences on `count` random networks,
/// inputs and targets.
pub fn gradient_check_suite(count: usize, seed: u64) -> GradCheckReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradCheckReport {
        nets: count,
        max_relative_error: 0.0,
        worst_net: 0,
    };
    for i in 0..count {
        let depth = rng.gen_range(1..=3);
        let mut dims = vec![rng.gen_range(1..=5)];
        dims.extend((0..depth).map(|_| rng.gen_range(2..=10)));
        dims.push(rng.gen_range(1..=8));
        let net = Mlp::new(&dims, &mut rng).expect("random dims are valid");
        let x: Vec<f64> = (0..dims[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let action = rng.gen_range(0..net.output_dim());
        let target = rng.gen_range(-2.0..2.0);
        let analytic = net.backward(&x, action, target);
        let numeric = numerical_gradient(&net, &x, action, target, 1e-5);
        let err = relative_error(&analytic.0, &numeric);
        if err > report.max_relative_error {
            report.max_relative_error = err;
            report.worst_net = i;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = Mlp::zeros(&[4, 32, 32, 8]).unwrap();
        assert_eq!(net.forward(&[0.3, -1.0, 2.0, 0.5]), vec![0.0; 8]);
    }

    #[test]
    fn hand_evaluated_single_unit() {
        // w1=1, b1=0, w2=1, b2=0
        let net = Mlp::from_parameters(&[1, 1, 1], vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let out = net.forward(&[0.5]);
        assert!((out[0] - 0.5f64.tanh()).abs() < 1e-15);
        assert!((out[0] - 0.4621).abs() < 1e-4);
    }

    #[test]
    fn output_width_matches_action_sets() {
        let cfg = ApproximatorConfig::default();
        let nested = Mlp::new(&cfg.layer_dims(4, 8), &mut rng(1)).unwrap();
        let main = Mlp::new(&cfg.layer_dims(3, 2), &mut rng(1)).unwrap();
        assert_eq!(nested.forward(&[0.0; 4]).len(), 8);
        assert_eq!(main.forward(&[0.0; 3]).len(), 2);
    }

    #[test]
    #[should_panic(expected = "expects 3")]
    fn forward_rejects_wrong_input_length() {
        Mlp::zeros(&[3, 2]).unwrap().forward(&[1.0]);
    }

    #[test]
    fn gradient_zero_at_loss_minimum() {
        let net = Mlp::new(&[3, 5, 4], &mut rng(2)).unwrap();
        let x = [0.1, -0.4, 0.9];
        let q = net.forward(&x);
        let g = net.backward(&x, 2, q[2]);
        assert!(g.0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_selected_outputs_get_no_gradient() {
        let net = Mlp::new(&[2, 3, 3], &mut rng(3)).unwrap();
        let g = net.backward(&[0.2, 0.7], 1, 5.0);
        let (w_off, b_off) = net.layer_offsets(1);
        for j in [0usize, 2] {
            assert!(g.0[w_off + j * 3..w_off + (j + 1) * 3]
                .iter()
                .all(|&v| v == 0.0));
            assert_eq!(g.0[b_off + j], 0.0);
        }
    }

    #[test]
    fn gradient_is_linear_in_residual() {
        let net = Mlp::new(&[3, 6, 6, 2], &mut rng(4)).unwrap();
        let x = [0.5, 0.25, -0.75];
        let q = net.forward(&x)[0];
        let g1 = net.backward(&x, 0, q - 0.3);
        let g2 = net.backward(&x, 0, q - 0.6);
        for (a, b) in g1.0.iter().zip(&g2.0) {
            assert!((2.0 * a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn initialization_is_seeded_and_bounded() {
        let a = Mlp::new(&[4, 32, 32, 8], &mut rng(9)).unwrap();
        let b = Mlp::new(&[4, 32, 32, 8], &mut rng(9)).unwrap();
        let c = Mlp::new(&[4, 32, 32, 8], &mut rng(10)).unwrap();
        assert!(a.parameters_equal(&b));
        assert!(!a.parameters_equal(&c));
        let limit = (6.0f64 / 36.0).sqrt();
        let (w_off, b_off) = a.layer_offsets(0);
        assert!(a.params[w_off..b_off].iter().all(|w| w.abs() < limit));
    }

    #[test]
    fn hidden_activations_stay_in_open_interval() {
        let net = Mlp::new(&[2, 16, 16, 3], &mut rng(5)).unwrap();
        let mut acts = Activations::default();
        net.forward_into(&[40.0, -40.0], &mut acts);
        for layer in &acts.layers[1..acts.layers.len() - 1] {
            assert!(layer.iter().all(|a| *a >= -1.0 && *a <= 1.0));
        }
    }

    #[test]
    fn clone_has_value_semantics() {
        let cfg = ApproximatorConfig::default();
        let mut src = Mlp::new(&[3, 4, 2], &mut rng(6)).unwrap();
        let copy = src.clone();
        assert!(src.parameters_equal(&copy));

        let mut perturbed = copy.clone();
        perturbed.params_mut()[3] += 1e-12;
        assert!(!perturbed.parameters_equal(&copy));

        let mut adam = Adam::new(src.params.len(), &cfg).unwrap();
        let g = src.backward(&[0.1, 0.2, 0.3], 0, 10.0);
        apply_gradients(&mut src, &mut adam, &g).unwrap();
        assert!(!src.parameters_equal(&copy));
        assert_eq!(copy, Mlp::new(&[3, 4, 2], &mut rng(6)).unwrap());
    }

    #[test]
    #[should_panic(expected = "different architectures")]
    fn comparing_mismatched_architectures_panics() {
        let a = Mlp::zeros(&[3, 2]).unwrap();
        let b = Mlp::zeros(&[3, 3]).unwrap();
        a.parameters_equal(&b);
    }

    #[test]
    fn adam_zero_gradient_is_noop() {
        let mut net = Mlp::new(&[3, 4, 2], &mut rng(7)).unwrap();
        let before = net.clone();
        let mut adam = Adam::new(net.params.len(), &ApproximatorConfig::default()).unwrap();
        apply_gradients(&mut net, &mut adam, &Gradients::zeros_like(&before)).unwrap();
        assert!(net.parameters_equal(&before));
        assert_eq!(adam.steps(), 1);
    }

    #[test]
    fn adam_moves_against_gradient() {
        let cfg = ApproximatorConfig::default();
        for g in [3.0, -0.2] {
            let mut adam = Adam::new(1, &cfg).unwrap();
            let mut p = [1.0];
            adam.step(&mut p, &[g]).unwrap();
            assert!((p[0] - 1.0).signum() == -g.signum());
        }
    }

    #[test]
    fn adam_converges_on_quadratic() {
        // f(p) = (p - 1.5)^2; Adam travels roughly lr per step, so the
        // minimum sits well inside 5000 * lr of the start
        let mut adam = Adam::new(1, &ApproximatorConfig::default()).unwrap();
        let mut p = [0.0];
        for _ in 0..5000 {
            let g = 2.0 * (p[0] - 1.5);
            adam.step(&mut p, &[g]).unwrap();
        }
        assert!((p[0] - 1.5).abs() < 1e-3, "p = {}", p[0]);
    }

    #[test]
    fn adam_rejects_non_finite_gradients() {
        let mut adam = Adam::new(2, &ApproximatorConfig::default()).unwrap();
        let mut p = [1.0, 2.0];
        assert!(matches!(
            adam.step(&mut p, &[0.1, f64::NAN]),
            Err(Error::Training(_))
        ));
        assert_eq!(p, [1.0, 2.0]);
        assert_eq!(adam.steps(), 0);
    }

    #[test]
    fn backprop_matches_central_differences() {
        let report = gradient_check_suite(25, 11);
        assert!(report.max_relative_error < 1e-4, "{report:?}");
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        assert!(Mlp::read_from(&b"NOTMAGIC\0\0\0\0"[..]).is_err());
        let mut bytes = Vec::new();
        Mlp::zeros(&[2, 2]).unwrap().write_to(&mut bytes).unwrap();
        bytes.push(0);
        assert!(matches!(
            Mlp::read_from(&bytes[..]),
            Err(Error::Checkpoint(_))
        ));
    }
}
