//! Model registry: target identifiers and the fields built from them.
//!
//! Identifiers: `gabc:a,b,c,K`, `bf:a,b,c,K`, `cmap:n` (n = 1, 2, 3),
//! `case:N` (a representative of item N), and the negative controls
//! `gabc:perturbed`, `bf:perturbed`, `cmap:perturbed`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::hkside::cmap::RigidCmapModel;
use crate::hkside::toda::TodaSolution;
use crate::hkside::{bf, rotating_data, RotatingKillingData};
use crate::qkside::{
    case_transform, gabc_metric, hermitian_pair, pt::pt_from_params, pt_metric, GabcParams,
    HermitianPair, PtChart,
};
use crate::tensorlab::chart::Chart;
use crate::tensorlab::field::{MetricField, ScalarField};

/// Size of the non-separable perturbation `u ↦ u + ε ρx`.
pub const PERTURBATION: f64 = 0.1;
/// Conformal perturbation `1 + ε|w₀|²` of the c-map control.
pub const CMAP_PERTURBATION: f64 = 0.1;
/// Quaternionic dimension of the c-map control.
pub const CMAP_PERTURBED_N: usize = 2;

/// Representative parameters tried, in order, for `case:N`.
const CASE_CANDIDATES: [(f64, f64, f64, f64); 13] = [
    (0.0, 0.0, 1.0, -1.0),
    (0.0, 1.0, 1.0, -1.0),
    (1.0, 1.0, 1.0, -1.0),
    (1.0, 0.0, 1.0, -1.0),
    (1.0, 0.0, -1.0, 1.0),
    (1.0, -1.0, 0.0, 1.0),
    (1.0, -3.0, 1.0, -1.0),
    (1.0, -1.0, 1.0, -1.0),
    (-1.0, 2.0, 1.0, -1.0),
    (-1.0, 0.0, 2.0, -1.0),
    (-1.0, -1.0, 1.0, -1.0),
    (-1.0, 1.0, 1.0, -1.0),
    (-1.0, 3.0, 1.0, -1.0),
];

/// Base of the `gabc`/`bf` perturbations.
pub fn perturbation_base() -> GabcParams {
    GabcParams::new(1.0, 1.0, 1.0, -1.0).expect("admissible")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    Gabc(GabcParams),
    Bf(GabcParams),
    Cmap(usize),
    Case(u8),
    GabcPerturbed,
    BfPerturbed,
    CmapPerturbed,
}

/// Model families shown by `list`, with their identifier patterns.
pub const FAMILIES: [(&str, &str); 7] = [
    ("gabc", "gabc:a,b,c,K  separable quaternionic Kähler family (Przanowski–Tod)"),
    ("bf", "bf:a,b,c,K  Boyer–Finley hyper-Kähler chart of the same Toda solution"),
    ("cmap", "cmap:n  flat rigid c-map model, n = 1, 2, 3"),
    ("case", "case:N  representative parameters of identification item N = 1..10"),
    ("gabc:perturbed", "gabc:perturbed  Przanowski–Tod metric of u + 0.1ρx on (1,1,1,-1)"),
    ("bf:perturbed", "bf:perturbed  Boyer–Finley metric of u + 0.1ρx on (1,1,1,-1)"),
    ("cmap:perturbed", "cmap:perturbed  c-map n = 2 with metric scaled by 1 + 0.1|w0|^2"),
];

fn registry_error(name: &str) -> GeoError {
    GeoError::Registry {
        kind: "target",
        name: name.to_string(),
        available: "gabc:a,b,c,K, bf:a,b,c,K, cmap:1..3, case:1..10, gabc:perturbed, \
                    bf:perturbed, cmap:perturbed"
            .to_string(),
    }
}

impl FromStr for Target {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').ok_or_else(|| registry_error(s))?;
        match (family, rest) {
            ("gabc", "perturbed") => Ok(Self::GabcPerturbed),
            ("bf", "perturbed") => Ok(Self::BfPerturbed),
            ("cmap", "perturbed") => Ok(Self::CmapPerturbed),
            ("gabc", p) => Ok(Self::Gabc(GabcParams::parse(p)?)),
            ("bf", p) => Ok(Self::Bf(GabcParams::parse(p)?)),
            ("cmap", n) => match n.parse::<usize>() {
                Ok(n @ 1..=3) => Ok(Self::Cmap(n)),
                _ => Err(GeoError::Parameters(format!(
                    "cmap:{n}: n must be 1, 2 or 3"
                ))),
            },
            ("case", n) => match n.parse::<u8>() {
                Ok(n @ 1..=10) => Ok(Self::Case(n)),
                _ => Err(GeoError::Parameters(format!("case:{n}: items are 1..10"))),
            },
            _ => Err(registry_error(s)),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gabc(p) => write!(f, "gabc:{p}"),
            Self::Bf(p) => write!(f, "bf:{p}"),
            Self::Cmap(n) => write!(f, "cmap:{n}"),
            Self::Case(n) => write!(f, "case:{n}"),
            Self::GabcPerturbed => f.write_str("gabc:perturbed"),
            Self::BfPerturbed => f.write_str("bf:perturbed"),
            Self::CmapPerturbed => f.write_str("cmap:perturbed"),
        }
    }
}

/// First registered representative for which `item` applies.
pub fn case_representative(item: u8) -> Result<GabcParams> {
    CASE_CANDIDATES
        .iter()
        .filter_map(|&(a, b, c, k)| GabcParams::new(a, b, c, k).ok())
        .find(|p| case_transform(item, p).is_ok())
        .ok_or_else(|| GeoError::NotApplicable(format!("no representative for item {item}")))
}

/// The quaternionic Kähler side of a target.
#[derive(Clone, Debug)]
pub struct QkModel {
    pub metric: MetricField,
    pub pt: PtChart,
    pub pair: HermitianPair,
}

/// The hyper-Kähler side of a target.
#[derive(Clone, Debug)]
pub struct HkModel {
    pub data: RotatingKillingData,
    pub cmap: Option<RigidCmapModel>,
}

/// Everything the checks evaluate for one target.
#[derive(Clone, Debug)]
pub struct Model {
    pub target: Target,
    pub chart: Arc<Chart>,
    /// Parameters of the family (the unperturbed base for controls).
    pub params: Option<GabcParams>,
    pub sol: Option<TodaSolution>,
    pub qk: Option<QkModel>,
    pub hk: Option<HkModel>,
    /// Restricts `case_transform` to one item.
    pub case_item: Option<u8>,
    pub perturbed: bool,
}

fn perturbed_solution() -> TodaSolution {
    let base = perturbation_base();
    let u = ScalarField::from_jets(base.chart(), move |c| {
        vec![&base.u_jet(&c[0], &c[1], &c[2]) + &(&(&c[0] * &c[1]) * PERTURBATION)]
    });
    TodaSolution::new_unchecked(u, base.k)
}

fn qk_from_params(params: &GabcParams) -> Result<QkModel> {
    let pt = pt_from_params(params)?;
    let pair = hermitian_pair(&pt);
    Ok(QkModel {
        metric: gabc_metric(params),
        pt,
        pair,
    })
}

fn hk_from_solution(sol: &TodaSolution, name: &str) -> Result<HkModel> {
    let hk = bf::hyper_kahler(sol, name);
    let data = rotating_data(&hk, &bf::rotating_field(sol), &bf::moment_map(sol), 0.0)?;
    Ok(HkModel { data, cmap: None })
}

fn hk_from_cmap(m: RigidCmapModel) -> Result<HkModel> {
    let data = rotating_data(m.hyper_kahler(), m.z(), &m.moment_map(), 0.0)?;
    Ok(HkModel {
        data,
        cmap: Some(m),
    })
}

impl Model {
    pub fn build(target: Target) -> Result<Self> {
        let name = target.to_string();
        let mut m = Model {
            target,
            chart: perturbation_base().chart(),
            params: None,
            sol: None,
            qk: None,
            hk: None,
            case_item: None,
            perturbed: false,
        };
        match target {
            Target::Gabc(p) => {
                m.chart = p.chart();
                m.sol = Some(p.toda()?);
                m.qk = Some(qk_from_params(&p)?);
                m.params = Some(p);
            }
            Target::Case(item) => {
                let p = case_representative(item)?;
                m.chart = p.chart();
                m.sol = Some(p.toda()?);
                m.qk = Some(qk_from_params(&p)?);
                m.params = Some(p);
                m.case_item = Some(item);
            }
            Target::Bf(p) => {
                let sol = p.toda()?;
                sol.check_boyer_finley()?;
                m.chart = p.chart();
                m.hk = Some(hk_from_solution(&sol, &name)?);
                m.sol = Some(sol);
                m.params = Some(p);
            }
            Target::Cmap(n) => {
                let cm = RigidCmapModel::new(n)?;
                m.chart = Arc::clone(cm.chart());
                m.hk = Some(hk_from_cmap(cm)?);
            }
            Target::GabcPerturbed => {
                let sol = perturbed_solution();
                let pt = pt_metric(&sol)?;
                let pair = hermitian_pair(&pt);
                m.qk = Some(QkModel {
                    metric: pt.metric.clone(),
                    pt,
                    pair,
                });
                m.sol = Some(sol);
                m.params = Some(perturbation_base());
                m.perturbed = true;
            }
            Target::BfPerturbed => {
                let sol = perturbed_solution();
                m.hk = Some(hk_from_solution(&sol, &name)?);
                m.sol = Some(sol);
                m.params = Some(perturbation_base());
                m.perturbed = true;
            }
            Target::CmapPerturbed => {
                let cm = RigidCmapModel::perturbed(CMAP_PERTURBED_N, CMAP_PERTURBATION)?;
                m.chart = Arc::clone(cm.chart());
                m.hk = Some(hk_from_cmap(cm)?);
                m.perturbed = true;
            }
        }
        Ok(m)
    }

    /// The metric under test: the quaternionic Kähler one when present.
    pub fn metric(&self) -> &MetricField {
        match (&self.qk, &self.hk) {
            (Some(q), _) => &q.metric,
            (None, Some(h)) => &h.data.hk.metric,
            (None, None) => unreachable!("every target builds one side"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers_round_trip() {
        for s in [
            "gabc:0,1,1,-1",
            "bf:1,1,1,-1",
            "cmap:2",
            "case:3",
            "gabc:perturbed",
            "bf:perturbed",
            "cmap:perturbed",
        ] {
            let t: Target = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("cmap:4".parse::<Target>().is_err());
        assert!("nosuch:1".parse::<Target>().is_err());
        assert!("gabc:1,2".parse::<Target>().is_err());
    }

    #[test]
    fn every_case_item_has_a_representative() {
        for item in 1..=10 {
            case_representative(item).unwrap();
        }
    }
}
