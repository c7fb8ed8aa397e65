//! Tensor fields on a chart, evaluable to any jet order.
//!
//! A field is a pure map `(point, order) ↦ component jets`. Primitive fields
//! are written as formulas over seeded coordinate jets; derived fields (a
//! covariant derivative, a projector, a potential obtained by quadrature)
//! request whatever orders of their ingredients they need.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::{Jet, MAX_ORDER};

use super::chart::Chart;
use super::forms::form_len;

pub type EvalFn = dyn Fn(&[f64], usize) -> Vec<Jet> + Send + Sync;

#[derive(Clone)]
pub struct Field {
    chart: Arc<Chart>,
    len: usize,
    max_order: usize,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("chart", &self.chart.name())
            .field("len", &self.len)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl Field {
    pub fn new<F>(chart: Arc<Chart>, len: usize, eval: F) -> Self
    where
        F: Fn(&[f64], usize) -> Vec<Jet> + Send + Sync + 'static,
    {
        Self {
            chart,
            len,
            max_order: MAX_ORDER,
            eval: Arc::new(eval),
        }
    }

    /// Highest jet order the field can be evaluated to.
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Declares a lower evaluation limit (e.g. a field known only through
    /// its first derivatives).
    pub fn with_max_order(mut self, order: usize) -> Self {
        self.max_order = order.min(MAX_ORDER);
        self
    }

    /// Errors unless the field supports jets of order `needed`.
    pub fn require_order(&self, needed: usize) -> Result<()> {
        if needed <= self.max_order {
            Ok(())
        } else {
            Err(GeoError::Order {
                needed,
                got: self.max_order,
            })
        }
    }

    /// A field given by a formula in the seeded coordinate jets.
    pub fn from_jets<F>(chart: Arc<Chart>, len: usize, formula: F) -> Self
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        Self::new(chart, len, move |p, order| formula(&Jet::seed(p, order)))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn eval(&self, p: &[f64], order: usize) -> Vec<Jet> {
        let out = (self.eval)(p, order);
        debug_assert_eq!(out.len(), self.len, "field produced wrong component count");
        out
    }

    pub fn values(&self, p: &[f64]) -> Vec<f64> {
        self.eval(p, 0).iter().map(Jet::value).collect()
    }
}

macro_rules! typed_field {
    ($(#[$doc:meta])* $name:ident, $len:expr) => {
        $(#[$doc])*
        #[derive(Clone, Debug)]
        pub struct $name(pub(crate) Field);

        impl $name {
            pub fn new<F>(chart: Arc<Chart>, eval: F) -> Self
            where
                F: Fn(&[f64], usize) -> Vec<Jet> + Send + Sync + 'static,
            {
                let n = chart.dim();
                Self(Field::new(chart, ($len)(n), eval))
            }

            pub fn from_jets<F>(chart: Arc<Chart>, formula: F) -> Self
            where
                F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
            {
                let n = chart.dim();
                Self(Field::from_jets(chart, ($len)(n), formula))
            }

            pub fn field(&self) -> &Field {
                &self.0
            }

            pub fn chart(&self) -> &Arc<Chart> {
                self.0.chart()
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            pub fn eval(&self, p: &[f64], order: usize) -> Vec<Jet> {
                self.0.eval(p, order)
            }

            pub fn values(&self, p: &[f64]) -> Vec<f64> {
                self.0.values(p)
            }

            pub fn max_order(&self) -> usize {
                self.0.max_order()
            }

            pub fn with_max_order(self, order: usize) -> Self {
                Self(self.0.with_max_order(order))
            }

            pub fn require_order(&self, needed: usize) -> Result<()> {
                self.0.require_order(needed)
            }
        }
    };
}

typed_field!(
    /// A single component.
    ScalarField,
    |_n: usize| 1
);
typed_field!(
    /// Contravariant components `V^i`.
    VectorField,
    |n: usize| n
);
typed_field!(
    /// Symmetric `g_ij`, row-major.
    MetricField,
    |n: usize| n * n
);
typed_field!(
    /// `A^i_j` (row = upper index), acting on vectors as `(AV)^i = A^i_j V^j`.
    EndoField,
    |n: usize| n * n
);

impl ScalarField {
    pub fn value(&self, p: &[f64]) -> f64 {
        self.eval(p, 0)[0].value()
    }

    pub fn jet(&self, p: &[f64], order: usize) -> Jet {
        self.eval(p, order).swap_remove(0)
    }
}

/// A p-form stored by its strictly increasing index tuples in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct FormField {
    pub(crate) field: Field,
    degree: usize,
}

impl FormField {
    pub fn new<F>(chart: Arc<Chart>, degree: usize, eval: F) -> Self
    where
        F: Fn(&[f64], usize) -> Vec<Jet> + Send + Sync + 'static,
    {
        let n = chart.dim();
        Self {
            field: Field::new(chart, form_len(n, degree), eval),
            degree,
        }
    }

    pub fn from_jets<F>(chart: Arc<Chart>, degree: usize, formula: F) -> Self
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        let n = chart.dim();
        Self {
            field: Field::from_jets(chart, form_len(n, degree), formula),
            degree,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.field.chart()
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn eval(&self, p: &[f64], order: usize) -> Vec<Jet> {
        self.field.eval(p, order)
    }

    pub fn values(&self, p: &[f64]) -> Vec<f64> {
        self.field.values(p)
    }

    pub fn max_order(&self) -> usize {
        self.field.max_order()
    }

    pub fn with_max_order(self, order: usize) -> Self {
        Self {
            field: self.field.with_max_order(order),
            degree: self.degree,
        }
    }

    pub fn require_order(&self, needed: usize) -> Result<()> {
        self.field.require_order(needed)
    }
}

/// A one-form is a form of degree 1; its components are `α_i`.
pub type OneForm = FormField;

/// The coordinate vector field `∂_i`.
pub fn coordinate_vector(chart: Arc<Chart>, i: usize) -> VectorField {
    let n = chart.dim();
    VectorField::new(chart, move |p, order| {
        (0..n)
            .map(|k| Jet::constant(p.len(), order, if k == i { 1.0 } else { 0.0 }))
            .collect()
    })
}

/// The differential of a scalar field, `df`.
pub fn differential(f: &ScalarField) -> FormField {
    let f = f.clone();
    let n = f.dim();
    FormField::new(Arc::clone(f.chart()), 1, move |p, order| {
        let j = f.jet(p, order + 1);
        (0..n).map(|i| j.partial(i)).collect()
    })
}
