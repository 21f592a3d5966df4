//! Log-free illumination correction driven by a small-kernel PDE.
//!
//! An image `I` is split into a low-pass part `A∗I` (3×3 box mean) and a
//! high-pass part `I − A∗I`. The low-pass part is lifted by a power law
//! instead of a logarithm, the high-pass part is kept (or weighted), and the
//! combination is evolved with an explicit Euler scheme:
//!
//! ```text
//! ∂I/∂t = λ·( w·(I − A∗I) + S^(1−k)·(A∗I)^k − I ) + β·(I − μ)/σ
//! ```
//!
//! Iteration stops when the 256-bin Shannon entropy of the evolving plane
//! peaks. The crate also carries the no-reference metrics used to judge the
//! result (colourfulness, entropy, average gradient, EME, hue deviation, a
//! blockiness/activity quality score) and a handful of classical enhancers
//! for comparison.
//!
//! ```
//! use pdelum::{flow, synth, EnhanceParams, StopPolicy};
//!
//! let dark = synth::gamma_ramp(32, 8, 2.0);
//! let (out, trace) = flow::evolve(&dark, &EnhanceParams::default(), &StopPolicy::default()).unwrap();
//! assert!(trace.chosen().entropy >= trace.records()[0].entropy);
//! assert_eq!(out.width(), 32);
//! ```

pub mod baselines;
mod error;
pub mod flow;
pub mod fmt;
pub mod kernels;
pub mod metrics;
pub mod raster;
pub mod synth;

pub use error::{Error, Result};
pub use flow::{EnhanceParams, EvolutionTrace, Mode, StopMode, StopPolicy, TraceRecord};
pub use kernels::{BoundaryMode, Kernel3};
pub use metrics::{AbsoluteMetrics, MetricsReport, RelativeMetrics};
pub use raster::{ColorImage, ColorModel, PixelDomain, Raster};
