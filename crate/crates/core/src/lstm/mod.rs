//! LSTM regressor written from scratch: a single LSTM layer over a window of
//! standardized prices followed by a one-unit dense head, trained by
//! backpropagation through time and Adam.

mod adam;
mod cell;
mod checkpoint;
mod network;
mod params;
mod train;
mod window;

pub use adam::{clip_global_norm, AdamState};
pub use cell::{cell_forward, LstmState, StepCache};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use network::{backward, mse_loss, network_forward, predict_standardized, Gradients, SequenceCache};
pub use params::{init_params, Gate, LstmParams};
pub use train::{train, train_with, EpochStats, TrainConfig, TrainHistory};
pub use window::{make_windows, predict_next, WindowSet, WindowedSample};

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Dot product with four independent accumulators. The association order is
/// fixed, so results are reproducible, and the loop vectorizes.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
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

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
