use std::fmt;
use std::sync::Arc;

use crate::error::{GeoError, Result};

/// Margin used when rejecting points against a chart's domain inequalities.
pub const DOMAIN_MARGIN: f64 = 1e-6;

type DomainFn = dyn Fn(&[f64], f64) -> bool + Send + Sync;

/// A coordinate chart: named coordinates, a domain predicate and a box from
/// which sample points are drawn.
///
/// The predicate receives a point and a margin; every defining inequality
/// `h(p) > 0` is tested as `h(p) > margin`.
#[derive(Clone)]
pub struct Chart {
    name: String,
    coord_names: Vec<String>,
    domain: Arc<DomainFn>,
    sample_box: Vec<(f64, f64)>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("coords", &self.coord_names)
            .field("sample_box", &self.sample_box)
            .finish()
    }
}

impl Chart {
    pub fn new<F>(name: &str, coord_names: &[&str], sample_box: Vec<(f64, f64)>, domain: F) -> Self
    where
        F: Fn(&[f64], f64) -> bool + Send + Sync + 'static,
    {
        assert!(coord_names.len() >= 2, "charts have dimension ≥ 2");
        assert_eq!(coord_names.len(), sample_box.len());
        Self {
            name: name.to_string(),
            coord_names: coord_names.iter().map(|s| s.to_string()).collect(),
            domain: Arc::new(domain),
            sample_box,
        }
    }

    /// The whole of ℝⁿ, sampled on a box.
    pub fn euclidean(coord_names: &[&str], sample_box: Vec<(f64, f64)>) -> Self {
        Self::new("euclidean", coord_names, sample_box, |_, _| true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn contains(&self, p: &[f64], margin: f64) -> bool {
        p.len() == self.dim() && p.iter().all(|v| v.is_finite()) && (self.domain)(p, margin)
    }

    /// Rejects points outside the domain (with the standard margin).
    pub fn check(&self, p: &[f64]) -> Result<()> {
        if self.contains(p, DOMAIN_MARGIN) {
            Ok(())
        } else {
            Err(GeoError::Domain { point: p.to_vec() })
        }
    }

    /// Same coordinates and domain, different sampling box.
    pub fn with_sample_box(&self, sample_box: Vec<(f64, f64)>) -> Self {
        assert_eq!(sample_box.len(), self.dim());
        Self {
            sample_box,
            ..self.clone()
        }
    }

    /// Intersects the domain with an extra predicate.
    pub fn restrict<F>(&self, name: &str, extra: F) -> Self
    where
        F: Fn(&[f64], f64) -> bool + Send + Sync + 'static,
    {
        let base = Arc::clone(&self.domain);
        Self {
            name: name.to_string(),
            domain: Arc::new(move |p, m| base(p, m) && extra(p, m)),
            ..self.clone()
        }
    }
}
