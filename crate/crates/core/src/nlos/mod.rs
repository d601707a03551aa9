//! LOS/NLOS identification from CIR amplitude moments with a random forest.

mod dataset;
mod evaluate;
mod features;
mod forest;

pub use dataset::{estimate_k_factor_db, generate_dataset, SyntheticCirParams};
pub use evaluate::{evaluate_subsets, evaluate_subsets_with, stratified_split, training_set, SubsetAccuracy, TRAIN_FRACTION};
pub use features::{extract_features, FeatureSubset, FeatureVector};
pub use forest::{classify, train_forest, train_tree, Forest, ForestParams, Node, Tree};

use alloc::vec::Vec;

use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Los,
    Nlos,
    Unknown,
}

impl Label {
    /// Code used in the binary CIR format.
    pub fn code(self) -> u8 {
        match self {
            Label::Los => 0,
            Label::Nlos => 1,
            Label::Unknown => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Label::Los),
            1 => Some(Label::Nlos),
            2 => Some(Label::Unknown),
            _ => None,
        }
    }
}

/// Shortest CIR accepted by [`Cir::new`] and the generator.
pub const MIN_TAPS: usize = 8;

/// Channel impulse response with its ground-truth label.
#[derive(Debug, Clone, PartialEq)]
pub struct Cir {
    pub taps: Vec<Complex64>,
    pub label: Label,
}

impl Cir {
    /// Requires at least [`MIN_TAPS`] taps, one of them nonzero.
    pub fn new(taps: Vec<Complex64>, label: Label) -> Result<Self, NlosError> {
        if taps.len() < MIN_TAPS {
            return Err(NlosError::TooFewTaps(taps.len()));
        }
        if taps.iter().all(|t| t.norm_sqr() == 0.0) {
            return Err(NlosError::Params("CIR has no nonzero tap"));
        }
        Ok(Self { taps, label })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NlosError {
    #[error("need at least 2 taps, got {0}")]
    TooFewTaps(usize),
    #[error("training data holds a single class")]
    SingleClass,
    #[error("expected {expected} features, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    Params(&'static str),
}
