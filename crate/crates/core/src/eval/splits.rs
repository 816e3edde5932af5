use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive 1-based day ranges of one walk-forward fold. Training always
/// starts on day 1; validation starts the day after training ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub index: usize,
    pub train_first: usize,
    pub train_last: usize,
    pub valid_first: usize,
    pub valid_last: usize,
}

impl FoldSpec {
    pub fn train_days(&self) -> (usize, usize) {
        (self.train_first, self.train_last)
    }

    pub fn valid_days(&self) -> (usize, usize) {
        (self.valid_first, self.valid_last)
    }
}

/// Expanding-window folds: fold `k` trains on `[1, init + k·step]` and
/// validates on the next `val_len` days, for as long as that fits in `days`.
pub fn walk_forward_splits(days: usize, init_train: usize, val_len: usize, step: usize) -> Result<Vec<FoldSpec>> {
    if init_train == 0 {
        return Err(Error::config("walkforward.init_train", "must be >= 1"));
    }
    if val_len == 0 {
        return Err(Error::config("walkforward.val_len", "must be >= 1"));
    }
    if step == 0 {
        return Err(Error::config("walkforward.step", "must be >= 1"));
    }
    if init_train + val_len > days {
        return Err(Error::config(
            "walkforward.val_len",
            format!("first validation window ends on day {} > {days}", init_train + val_len),
        ));
    }
    let mut folds = Vec::new();
    let mut end = init_train;
    while end + val_len <= days {
        folds.push(FoldSpec {
            index: folds.len(),
            train_first: 1,
            train_last: end,
            valid_first: end + 1,
            valid_last: end + val_len,
        });
        end += step;
    }
    Ok(folds)
}
