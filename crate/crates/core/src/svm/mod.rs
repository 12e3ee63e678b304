//! Soft-margin binary support vector machine.

mod cache;
mod io;
mod kernel;
mod model;
mod smo;

pub use io::{load_model, read_model, save_model, write_model};
pub use kernel::{KernelKind, KernelSpec};
pub use model::{label_of, SvmModel};
pub use smo::{train, train_with_info, SolveInfo, TrainConfig};
