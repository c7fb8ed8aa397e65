//! The hyper-Kähler side: Boyer–Finley charts, flat rigid c-map models,
//! rotating Killing data, the elementary deformation and the two-form
//! formulas used by the conformally Kähler analysis.

pub mod bf;
pub mod cmap;
pub mod deformation;
pub mod highdim;
pub mod rotating;
pub mod sigma;
pub mod toda;

use std::sync::Arc;

use crate::tensorlab::chart::Chart;
use crate::tensorlab::field::{EndoField, FormField, MetricField};

pub use rotating::{rotating_data, RotatingKillingData};
pub use toda::TodaSolution;

/// A (pseudo-)hyper-Kähler chart. Either all three complex structures are
/// known, or only `I₁` (the Boyer–Finley charts).
#[derive(Clone, Debug)]
pub struct HyperKahler {
    pub name: String,
    pub metric: MetricField,
    /// `I₁` and, when available, `I₂`, `I₃`.
    pub complex: Vec<EndoField>,
    /// `ω_k = g(I_k·, ·)`, matching `complex`.
    pub forms: Vec<FormField>,
}

impl HyperKahler {
    pub fn chart(&self) -> &Arc<Chart> {
        self.metric.chart()
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn i1(&self) -> &EndoField {
        &self.complex[0]
    }

    pub fn omega1(&self) -> &FormField {
        &self.forms[0]
    }

    pub fn has_triple(&self) -> bool {
        self.complex.len() == 3
    }
}
