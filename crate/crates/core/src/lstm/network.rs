use super::{axpy, cell_forward, dot, LstmParams, LstmState, StepCache};
use crate::error::{Error, Result};
use crate::numkit::pairwise_sum;

/// Gradient vector in the [`LstmParams`] layout.
pub type Gradients = Vec<f64>;

#[derive(Debug, Clone)]
pub struct SequenceCache {
    pub steps: Vec<StepCache>,
    pub h_final: Vec<f64>,
}

fn check_window(params: &LstmParams, window: &[f64]) -> Result<()> {
    let inp = params.input_size();
    if window.is_empty() || window.len() % inp != 0 {
        return Err(Error::Dimension(format!(
            "window of length {} is not a nonempty multiple of input size {inp}",
            window.len()
        )));
    }
    Ok(())
}

/// Runs the cell over the window from a zero state, then the dense head.
pub fn network_forward(params: &LstmParams, window: &[f64]) -> Result<(f64, SequenceCache)> {
    check_window(params, window)?;
    let mut state = LstmState::zeros(params.hidden_size());
    let mut steps = Vec::with_capacity(window.len() / params.input_size());
    for x in window.chunks_exact(params.input_size()) {
        let (next, cache) = cell_forward(params, x, &state)?;
        steps.push(cache);
        state = next;
    }
    let pred = dot(params.w_out(), &state.h) + params.b_out();
    Ok((
        pred,
        SequenceCache {
            steps,
            h_final: state.h,
        },
    ))
}

/// Forward pass without keeping the cache.
pub fn predict_standardized(params: &LstmParams, window: &[f64]) -> Result<f64> {
    network_forward(params, window).map(|(p, _)| p)
}

pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<f64> {
    if preds.len() != targets.len() || preds.is_empty() {
        return Err(Error::Dimension(format!(
            "mse over {} predictions and {} targets",
            preds.len(),
            targets.len()
        )));
    }
    let sq: Vec<f64> = preds.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).collect();
    Ok(pairwise_sum(&sq) / preds.len() as f64)
}

/// Adds `dL/dθ` for one sequence into `grad`, given `d_pred = dL/dŷ`.
pub(crate) fn accumulate_sample_gradient(
    params: &LstmParams,
    cache: &SequenceCache,
    d_pred: f64,
    grad: &mut [f64],
) {
    let hs = params.hidden_size();
    let width = params.concat_size();
    let w = params.gate_weights();
    let bias_off = params.bias_offset();
    let head_off = params.head_offset();

    axpy(d_pred, &cache.h_final, &mut grad[head_off..head_off + hs]);
    grad[head_off + hs] += d_pred;

    let mut dh: Vec<f64> = params.w_out().iter().map(|w| w * d_pred).collect();
    let mut dc = vec![0.0; hs];
    let mut dz = vec![0.0; 4 * hs];
    let mut dconcat = vec![0.0; width];

    for step in cache.steps.iter().rev() {
        for k in 0..hs {
            let (f, i, g, o, tc) = (step.f[k], step.i[k], step.g[k], step.o[k], step.tanh_c[k]);
            let d_o = dh[k] * tc;
            let dck = dc[k] + dh[k] * o * (1.0 - tc * tc);
            dz[k] = dck * step.c_prev[k] * f * (1.0 - f);
            dz[hs + k] = dck * g * i * (1.0 - i);
            dz[2 * hs + k] = dck * i * (1.0 - g * g);
            dz[3 * hs + k] = d_o * o * (1.0 - o);
            dc[k] = dck * f;
        }
        dconcat.fill(0.0);
        for (row, &d) in dz.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let wr = &w[row * width..(row + 1) * width];
            axpy(d, &step.concat, &mut grad[row * width..(row + 1) * width]);
            axpy(d, wr, &mut dconcat);
            grad[bias_off + row] += d;
        }
        dh.copy_from_slice(&dconcat[..hs]);
    }
}

/// Exact gradient of the batch-mean squared error over `caches`.
pub fn backward(
    params: &LstmParams,
    caches: &[SequenceCache],
    preds: &[f64],
    targets: &[f64],
) -> Result<Gradients> {
    if caches.len() != preds.len() || preds.len() != targets.len() || preds.is_empty() {
        return Err(Error::Dimension(format!(
            "backward over {} caches, {} predictions, {} targets",
            caches.len(),
            preds.len(),
            targets.len()
        )));
    }
    let n = preds.len() as f64;
    let per_sample: Vec<Gradients> = caches
        .iter()
        .zip(preds.iter().zip(targets))
        .map(|(cache, (p, t))| {
            let mut g = vec![0.0; params.len()];
            accumulate_sample_gradient(params, cache, 2.0 * (p - t) / n, &mut g);
            g
        })
        .collect();
    Ok(sum_gradients(per_sample, params.len()))
}

/// Fixed-shape pairwise reduction of per-sample gradients.
pub(crate) fn sum_gradients(mut parts: Vec<Gradients>, len: usize) -> Gradients {
    if parts.is_empty() {
        return vec![0.0; len];
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap()
}
