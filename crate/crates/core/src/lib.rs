//! Kernel support vector machines: soft-margin classification,
//! ε-insensitive regression and one-against-one multiclass voting, with an
//! SMO dual solver, synthetic data generators and text file formats.

pub mod classify;
pub mod data;
pub mod experiment;
pub mod error;
pub mod kernel;
pub mod model_io;
pub mod multiclass;
pub mod qp;
pub mod regress;

pub use classify::{train_svc, SvcModel};
pub use error::{Result, SvmError};
pub use kernel::{FeatureVector, KernelSpec};
pub use model_io::Model;
pub use multiclass::{train_ovo, MulticlassModel};
pub use qp::SolverConfig;
pub use regress::{train_svr, SvrModel};
