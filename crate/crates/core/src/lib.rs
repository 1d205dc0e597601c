//! Number and phase distributions of spin-j systems, the knowledge measures
//! built on them, searches for bounds on their sum, and two noise channels
//! acting on a qubit.

pub mod channels;
pub mod distributions;
pub mod error;
pub mod knowledge;
pub mod optimize;
pub mod presets;
pub mod quad;
pub mod search;
pub mod special;
pub mod spin;
pub mod state;

pub use error::{Error, Result};
pub use spin::SpinSystem;
pub use state::{DensityMatrix, PureState, C64};
