//! Neural network pieces: autodiff tape, Haar layers, model and training.

pub mod adam;
pub mod layers;
pub mod model;
pub mod tape;
pub mod train;

pub use layers::{haar_conv, haar_pool, Activation, HaarConvLayer};
pub use model::{GraphInput, HaarNet, Mode, ModelSpec, Param, ParamKind};
pub use tape::{Gradients, Tape, Var};
pub use train::{build_model, prepare_graphs, train, train_with, PreparedGraph, TrainConfig, TrainOutcome};
