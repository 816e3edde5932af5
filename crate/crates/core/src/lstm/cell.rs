use super::{dot, sigmoid, LstmParams};
use crate::error::{Error, Result};

/// Recurrent state carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        LstmState {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

/// Intermediates of one cell step, kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCache {
    /// `[h_{t-1}, x_t]`
    pub concat: Vec<f64>,
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    /// Candidate cell state C̃.
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

/// One LSTM step:
///
/// ```text
/// f = σ(W_f [h, x] + b_f)     i = σ(W_i [h, x] + b_i)
/// C̃ = tanh(W_C [h, x] + b_C)  o = σ(W_o [h, x] + b_o)
/// C' = f ⊙ C + i ⊙ C̃          h' = o ⊙ tanh(C')
/// ```
pub fn cell_forward(params: &LstmParams, x: &[f64], state: &LstmState) -> Result<(LstmState, StepCache)> {
    let hs = params.hidden_size();
    if x.len() != params.input_size() || state.h.len() != hs || state.c.len() != hs {
        return Err(Error::Dimension(format!(
            "cell expects input {} and state {hs}, got input {} and state ({}, {})",
            params.input_size(),
            x.len(),
            state.h.len(),
            state.c.len()
        )));
    }
    let width = params.concat_size();
    let mut concat = Vec::with_capacity(width);
    concat.extend_from_slice(&state.h);
    concat.extend_from_slice(x);

    let w = params.gate_weights();
    let b = params.gate_biases();
    let pre = |row: usize| b[row] + dot(&w[row * width..(row + 1) * width], &concat);

    let mut f = Vec::with_capacity(hs);
    let mut i = Vec::with_capacity(hs);
    let mut g = Vec::with_capacity(hs);
    let mut o = Vec::with_capacity(hs);
    for k in 0..hs {
        f.push(sigmoid(pre(k)));
        i.push(sigmoid(pre(hs + k)));
        g.push(pre(2 * hs + k).tanh());
        o.push(sigmoid(pre(3 * hs + k)));
    }
    let c: Vec<f64> = (0..hs).map(|k| f[k] * state.c[k] + i[k] * g[k]).collect();
    let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
    let h: Vec<f64> = o.iter().zip(&tanh_c).map(|(a, b)| a * b).collect();

    if c.iter().chain(&h).any(|v| !v.is_finite()) {
        return Err(Error::NumericOverflow("non-finite LSTM cell state".into()));
    }
    let next = LstmState { h, c: c.clone() };
    let cache = StepCache {
        concat,
        f,
        i,
        g,
        o,
        c_prev: state.c.clone(),
        c,
        tanh_c,
    };
    Ok((next, cache))
}
