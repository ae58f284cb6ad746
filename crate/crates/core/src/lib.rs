//! Physics-informed neural networks for ordinary differential equations.
//!
//! Small tanh networks are trained against a composite of data, equation
//! residual and energy-conservation losses, with reverse-mode automatic
//! differentiation built in. Fixed-step Runge-Kutta integrators provide
//! reference trajectories, and a benchmark harness reproduces a set of
//! standard oscillator experiments end to end.

pub mod autodiff;
pub mod bench;
pub mod error;
pub mod fd;
pub mod integrators;
pub mod network;
pub mod problems;
pub mod training;

pub use autodiff::{Gradient, Jet2, Tape, Var};
pub use error::{Error, Result};
pub use network::{Mlp, MlpConfig, MlpVars};
