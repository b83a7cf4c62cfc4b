//! Simulation of the canonical slow-fast family: stiff integration of the
//! full system, section returns, the finite-δ hybrid and signature
//! classification.

pub mod classify;
pub mod error;
pub mod explicit;
pub mod export;
pub mod full;
pub mod hybrid;
pub mod linalg;
pub mod rescale;
pub mod rodas;

pub use classify::{classify_series, ClassifyOptions, Classification};
pub use error::{SimError, SimResult};
pub use full::{detect_section_crossings, integrate_full, Crossing, FullRun, SectionSpec, SimConfig, TimeSeries};
pub use hybrid::{delta_convergence, hybrid_simulate, HybridRun};
pub use rescale::visual_rescale;
