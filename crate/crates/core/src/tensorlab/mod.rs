//! Chart-level tensor calculus with exact derivatives.

pub mod algebra;
pub mod chart;
pub mod complex;
pub mod connection;
pub mod curvature;
pub mod field;
pub mod forms;
pub mod frame;
pub mod lie;

pub use chart::Chart;
pub use field::{EndoField, Field, FormField, MetricField, OneForm, ScalarField, VectorField};
pub use frame::{Frame, FrameKind, Residual, Slot};
