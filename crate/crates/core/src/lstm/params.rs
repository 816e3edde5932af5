use crate::error::{Error, Result};
use crate::numkit::RngStream;

/// The four gate blocks, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Forget = 0,
    Input = 1,
    Candidate = 2,
    Output = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Forget, Gate::Input, Gate::Candidate, Gate::Output];
}

/// All trainable parameters in one flat vector.
///
/// Layout: the stacked gate weights `[W_f; W_i; W_C; W_o]` as a
/// `4H × (H + I)` row-major matrix whose columns act on `[h_{t-1}, x_t]`,
/// then the stacked biases `[b_f; b_i; b_C; b_o]` (4H), then the dense head
/// `W_out` (H) and `b_out` (1). Gradients and Adam moments share the layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    hidden: usize,
    input: usize,
    values: Vec<f64>,
}

impl LstmParams {
    pub fn param_count(hidden: usize, input: usize) -> usize {
        4 * hidden * (hidden + input) + 4 * hidden + hidden + 1
    }

    pub fn zeros(hidden: usize, input: usize) -> Self {
        LstmParams {
            hidden,
            input,
            values: vec![0.0; Self::param_count(hidden, input)],
        }
    }

    pub fn from_values(hidden: usize, input: usize, values: Vec<f64>) -> Result<Self> {
        if hidden == 0 || input == 0 {
            return Err(Error::Dimension("hidden and input sizes must be >= 1".into()));
        }
        let expected = Self::param_count(hidden, input);
        if values.len() != expected {
            return Err(Error::Dimension(format!(
                "LSTM({hidden}, {input}) has {expected} parameters, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite LSTM parameter".into()));
        }
        Ok(LstmParams {
            hidden,
            input,
            values,
        })
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden
    }

    pub fn input_size(&self) -> usize {
        self.input
    }

    /// Width of `[h, x]`.
    pub fn concat_size(&self) -> usize {
        self.hidden + self.input
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn weights_len(&self) -> usize {
        4 * self.hidden * self.concat_size()
    }

    pub(crate) fn bias_offset(&self) -> usize {
        self.weights_len()
    }

    pub(crate) fn head_offset(&self) -> usize {
        self.weights_len() + 4 * self.hidden
    }

    /// Stacked `4H × (H + I)` gate weight matrix.
    pub fn gate_weights(&self) -> &[f64] {
        &self.values[..self.weights_len()]
    }

    pub fn gate_biases(&self) -> &[f64] {
        &self.values[self.bias_offset()..self.head_offset()]
    }

    /// One `H × (H + I)` block.
    pub fn weight_block(&self, gate: Gate) -> &[f64] {
        let block = self.hidden * self.concat_size();
        let start = gate as usize * block;
        &self.values[start..start + block]
    }

    pub fn bias_block(&self, gate: Gate) -> &[f64] {
        let start = self.bias_offset() + gate as usize * self.hidden;
        &self.values[start..start + self.hidden]
    }

    pub fn weight_block_mut(&mut self, gate: Gate) -> &mut [f64] {
        let block = self.hidden * self.concat_size();
        let start = gate as usize * block;
        &mut self.values[start..start + block]
    }

    pub fn bias_block_mut(&mut self, gate: Gate) -> &mut [f64] {
        let start = self.bias_offset() + gate as usize * self.hidden;
        &mut self.values[start..start + self.hidden]
    }

    pub fn w_out(&self) -> &[f64] {
        let s = self.head_offset();
        &self.values[s..s + self.hidden]
    }

    pub fn w_out_mut(&mut self) -> &mut [f64] {
        let s = self.head_offset();
        &mut self.values[s..s + self.hidden]
    }

    pub fn b_out(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn set_b_out(&mut self, v: f64) {
        let last = self.values.len() - 1;
        self.values[last] = v;
    }
}

/// Glorot-uniform gate blocks (`fan_in = H + I`, `fan_out = H`) and head
/// (`fan_in = H`, `fan_out = 1`); zero biases except `b_f = 1`.
pub fn init_params(hidden: usize, input: usize, rng: &mut RngStream) -> Result<LstmParams> {
    if hidden == 0 || input == 0 {
        return Err(Error::InvalidParameter(format!(
            "hidden ({hidden}) and input ({input}) sizes must be >= 1"
        )));
    }
    let mut p = LstmParams::zeros(hidden, input);
    let gate_bound = (6.0 / (2 * hidden + input) as f64).sqrt();
    for gate in Gate::ALL {
        for w in p.weight_block_mut(gate) {
            *w = rng.uniform(-gate_bound, gate_bound);
        }
    }
    p.bias_block_mut(Gate::Forget).fill(1.0);
    let head_bound = (6.0 / (hidden + 1) as f64).sqrt();
    for w in p.w_out_mut() {
        *w = rng.uniform(-head_bound, head_bound);
    }
    Ok(p)
}
