//! Feed-forward tanh networks with plain and jet-propagating forward passes.
//!
//! The network maps a scalar time input through `hidden_layers` tanh layers
//! of equal width to one or two affine outputs. Parameters are stored flat in
//! a fixed canonical order (layer-major, row-major, weights before bias) so
//! the optimizer can treat the whole network as a single vector.

use std::fmt::Write as _;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Jet2, Tape, Var};
use crate::error::{Error, Result};

/// Network shape and initialization seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub hidden_layers: usize,
    pub neurons_per_layer: usize,
    pub output_dim: usize,
    pub seed: u64,
}

impl MlpConfig {
    pub fn new(hidden_layers: usize, neurons_per_layer: usize, output_dim: usize) -> Self {
        MlpConfig {
            input_dim: 1,
            hidden_layers,
            neurons_per_layer,
            output_dim,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.input_dim == 0
            || self.hidden_layers == 0
            || self.neurons_per_layer == 0
            || self.output_dim == 0
        {
            return Err(Error::config("network dimensions must all be nonzero"));
        }
        if self.output_dim > 2 {
            return Err(Error::config("output_dim must be 1 or 2"));
        }
        Ok(())
    }

    /// Sizes of consecutive layers, input through output.
    fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_layers + 2);
        w.push(self.input_dim);
        w.extend(std::iter::repeat(self.neurons_per_layer).take(self.hidden_layers));
        w.push(self.output_dim);
        w
    }

    /// Total number of trainable parameters.
    pub fn param_count(&self) -> usize {
        self.widths()
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

/// One affine layer as offsets into the internal parameter vector.
///
/// Internally weights are stored neuron-major (`w[j][i]`, each neuron's
/// incoming weights contiguous) for fast forward passes; the canonical
/// flatten order exposed by [`Mlp::params_flatten`] is row-major over
/// `[fan_in × fan_out]` (`w[i][j]`), weights before bias, layer by layer.
#[derive(Debug, Clone, Copy)]
struct LayerShape {
    fan_in: usize,
    fan_out: usize,
    offset: usize,
}

impl LayerShape {
    fn weight_index(&self, i: usize, j: usize) -> usize {
        self.offset + j * self.fan_in + i
    }

    fn weight_range(&self, j: usize) -> std::ops::Range<usize> {
        let start = self.offset + j * self.fan_in;
        start..start + self.fan_in
    }

    fn bias_index(&self, j: usize) -> usize {
        self.offset + self.fan_in * self.fan_out + j
    }

    fn bias(&self, params: &[f64], j: usize) -> f64 {
        params[self.bias_index(j)]
    }
}

/// A feed-forward tanh network with flat parameter storage.
#[derive(Debug, Clone)]
pub struct Mlp {
    config: MlpConfig,
    layers: Vec<LayerShape>,
    params: Vec<f64>,
}

impl Mlp {
    /// Glorot-uniform weights (range `±√(6/(fan_in+fan_out))`), zero biases,
    /// fully determined by `config.seed`.
    pub fn init(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let widths = config.widths();
        let mut layers = Vec::with_capacity(widths.len() - 1);
        let mut offset = 0;
        for w in widths.windows(2) {
            layers.push(LayerShape {
                fan_in: w[0],
                fan_out: w[1],
                offset,
            });
            offset += w[0] * w[1] + w[1];
        }
        let mut params = vec![0.0; offset];
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        // Draw in canonical (row-major) order so the seeded stream is part
        // of the flatten contract, independent of internal storage.
        for layer in &layers {
            let limit = (6.0 / (layer.fan_in + layer.fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit);
            for i in 0..layer.fan_in {
                for j in 0..layer.fan_out {
                    params[layer.weight_index(i, j)] = dist.sample(&mut rng);
                }
            }
            // biases stay zero
        }
        Ok(Mlp {
            config,
            layers,
            params,
        })
    }

    pub fn config(&self) -> &MlpConfig {
        &self.config
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Copy of the parameters in canonical order.
    pub fn params_flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.params.len());
        for layer in &self.layers {
            for i in 0..layer.fan_in {
                for j in 0..layer.fan_out {
                    flat.push(self.params[layer.weight_index(i, j)]);
                }
            }
            for j in 0..layer.fan_out {
                flat.push(self.params[layer.bias_index(j)]);
            }
        }
        flat
    }

    /// Overwrite all parameters from a canonical-order vector.
    pub fn params_assign(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.params.len() {
            return Err(Error::config(format!(
                "parameter vector length {} does not match network ({})",
                flat.len(),
                self.params.len()
            )));
        }
        let mut k = 0;
        for l in 0..self.layers.len() {
            let layer = self.layers[l];
            for i in 0..layer.fan_in {
                for j in 0..layer.fan_out {
                    self.params[layer.weight_index(i, j)] = flat[k];
                    k += 1;
                }
            }
            for j in 0..layer.fan_out {
                self.params[layer.bias_index(j)] = flat[k];
                k += 1;
            }
        }
        Ok(())
    }

    /// Plain `f64` forward pass, bitwise-identical to the taped one.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut act = vec![t];
        let n_layers = self.layers.len();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = Vec::with_capacity(layer.fan_out);
            for j in 0..layer.fan_out {
                let w = &self.params[layer.weight_range(j)];
                let mut acc = 0.0;
                for (wi, a) in w.iter().zip(&act) {
                    acc += wi * a;
                }
                acc += layer.bias(&self.params, j);
                next.push(if l + 1 < n_layers { acc.tanh() } else { acc });
            }
            act = next;
        }
        act
    }

    /// Register all parameters on `tape` (canonical order) for one epoch.
    pub fn bind<'t>(&self, tape: &'t Tape) -> MlpVars<'t> {
        let vars: Vec<Var<'t>> = self.params.iter().map(|&p| tape.leaf(p)).collect();
        MlpVars {
            tape,
            layers: self.layers.clone(),
            vars,
        }
    }

    /// Save as a flat text file: one header line, then one parameter per
    /// line in canonical order (shortest round-trip decimal).
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let c = &self.config;
        writeln!(
            out,
            "mlp input_dim={} hidden_layers={} neurons_per_layer={} output_dim={} seed={}",
            c.input_dim, c.hidden_layers, c.neurons_per_layer, c.output_dim, c.seed
        )
        .unwrap();
        for p in self.params_flatten() {
            writeln!(out, "{p}").unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("empty model file"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("mlp") {
            return Err(Error::parse("model file must start with `mlp`"));
        }
        let mut config = MlpConfig::new(1, 1, 1);
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("bad header field `{field}`")))?;
            let parse = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| Error::parse(format!("bad value for `{key}`: {v}")))
            };
            match key {
                "input_dim" => config.input_dim = parse(value)? as usize,
                "hidden_layers" => config.hidden_layers = parse(value)? as usize,
                "neurons_per_layer" => config.neurons_per_layer = parse(value)? as usize,
                "output_dim" => config.output_dim = parse(value)? as usize,
                "seed" => config.seed = parse(value)?,
                other => return Err(Error::parse(format!("unknown header field `{other}`"))),
            }
        }
        let mut mlp = Mlp::init(config)?;
        let mut params = Vec::with_capacity(mlp.param_count());
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            params.push(
                line.parse::<f64>()
                    .map_err(|_| Error::parse(format!("bad parameter line `{line}`")))?,
            );
        }
        mlp.params_assign(&params)?;
        Ok(mlp)
    }
}

/// A network bound to a tape for one epoch: parameters as tape leaves.
pub struct MlpVars<'t> {
    tape: &'t Tape,
    layers: Vec<LayerShape>,
    vars: Vec<Var<'t>>,
}

impl<'t> MlpVars<'t> {
    pub fn tape(&self) -> &'t Tape {
        self.tape
    }

    /// Gradient components for all parameters, canonical order.
    pub fn gradient(&self, grad: &crate::autodiff::Gradient, out: &mut Vec<f64>) {
        out.clear();
        for layer in &self.layers {
            for i in 0..layer.fan_in {
                for j in 0..layer.fan_out {
                    out.push(grad.wrt(self.vars[layer.weight_index(i, j)]));
                }
            }
            for j in 0..layer.fan_out {
                out.push(grad.wrt(self.vars[layer.bias_index(j)]));
            }
        }
    }

    fn bias(&self, layer: &LayerShape, j: usize) -> Var<'t> {
        self.vars[layer.bias_index(j)]
    }

    /// Taped forward pass: hidden layers tanh, output layer affine.
    pub fn forward(&self, t: Var<'t>) -> Vec<Var<'t>> {
        let mut act = vec![t];
        let n_layers = self.layers.len();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = Vec::with_capacity(layer.fan_out);
            for j in 0..layer.fan_out {
                let w = &self.vars[layer.weight_range(j)];
                let pre = self.tape.affine(w, &act, self.bias(layer, j));
                next.push(if l + 1 < n_layers { pre.tanh() } else { pre });
            }
            act = next;
        }
        act
    }

    /// Jet-propagating forward pass; the value components match
    /// [`MlpVars::forward`] bit-exactly.
    pub fn forward_jet(&self, t: f64) -> Vec<Jet2<'t>> {
        let mut act = vec![Jet2::lift_input(self.tape, t)];
        let n_layers = self.layers.len();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = Vec::with_capacity(layer.fan_out);
            for j in 0..layer.fan_out {
                let w = &self.vars[layer.weight_range(j)];
                let pre = self.tape.affine_jets(w, &act, self.bias(layer, j));
                next.push(if l + 1 < n_layers { pre.tanh() } else { pre });
            }
            act = next;
        }
        act
    }
}
