use qkgeo::verify::{
    check_info, run_check, run_suite, CheckSpec, Expected, Verdict, CHECKS, NEGATIVE_FLOOR,
};
use qkgeo::GeoError;

fn spec(name: &str, target: &str) -> CheckSpec {
    CheckSpec::new(name, target).unwrap().with_samples(40).with_seed(7)
}

#[test]
fn einstein_passes_on_the_family() {
    let r = run_check(&spec("einstein", "gabc:0,1,1,-1")).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{}", r.summary());
    assert_eq!(r.samples, 40);
}

#[test]
fn toda_fails_on_the_perturbed_solution() {
    let r = run_check(&spec("toda", "bf:perturbed").expecting(Expected::Pass)).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.max_abs > 1e-3);
    // the registry default is a pass claim, so the control reports a failure
    let r = run_check(&spec("toda", "bf:perturbed")).unwrap();
    assert_eq!((r.verdict, r.expected), (Verdict::Fail, Expected::Pass));
    let r = run_check(&spec("toda", "bf:perturbed").expecting(Expected::Fail {
        floor: NEGATIVE_FLOOR,
    }))
    .unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn empty_suite_is_empty() {
    assert!(run_suite(&[]).unwrap().is_empty());
}

#[test]
fn registry_errors_name_the_alternatives() {
    match check_info("nosuchcheck") {
        Err(e @ GeoError::Registry { .. }) => assert!(e.to_string().contains("einstein")),
        other => panic!("{other:?}"),
    }
    let bad = CheckSpec {
        target: "nosuch:1".into(),
        ..spec("toda", "gabc:0,1,1,-1")
    };
    assert!(run_check(&bad).is_err());
    let good = spec("toda", "gabc:0,1,1,-1");
    assert!(run_suite(&[good, bad]).is_err());
    assert!(run_check(&spec("einstein", "gabc:0,1,1,-1").with_tolerance(0.0)).is_err());
    assert!(run_check(&spec("einstein", "gabc:0,1,1,-1").with_samples(0)).is_err());
}

#[test]
fn registry_covers_the_required_checks() {
    for name in [
        "toda", "liouville", "einstein", "killing", "rotating", "criterion", "prop_ih",
        "sigma_tilde", "xi_kahler", "highdim", "nijenhuis", "lee_closed", "orientation",
        "algebra", "case_transform", "curvnorm", "symmetric", "singularity_distance",
    ] {
        assert!(check_info(name).is_ok(), "{name}");
    }
}

#[test]
fn reports_are_deterministic_and_ordered() {
    let specs: Vec<CheckSpec> = ["curvnorm", "einstein", "criterion", "xi_kahler"]
        .iter()
        .flat_map(|c| ["gabc:1,1,1,-1", "bf:0,1,1,-1"].map(|t| spec(c, t)))
        .collect();
    let a = run_suite(&specs).unwrap();
    let b = run_suite(&specs).unwrap();
    assert_eq!(a.len(), specs.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.max_abs.to_bits(), y.max_abs.to_bits());
        assert_eq!(x.mean_abs.to_bits(), y.mean_abs.to_bits());
        assert_eq!(x.argmax_point, y.argmax_point);
        assert_eq!(x.verdict, y.verdict);
    }
    for (r, s) in a.iter().zip(&specs) {
        assert_eq!((&r.name, &r.target), (&s.name, &s.target));
    }
}

#[test]
fn passing_stays_passing_at_looser_tolerance() {
    for (name, target) in [("einstein", "gabc:1,1,1,-1"), ("toda", "bf:0,1,1,-1")] {
        let base = spec(name, target);
        let r = run_check(&base).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        for t in [r.max_abs.max(1e-300), 1e-6, 1.0] {
            let r = run_check(&base.clone().with_tolerance(t)).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{name} at {t}");
        }
    }
}

/// Checks whose pass-type claims have no perturbed target to fail on:
/// orientation holds by construction of `J̃₁`, and the singularity distance
/// is not defined for the perturbed charts.
const NO_CONTROL: [&str; 2] = ["orientation", "singularity_distance"];

#[test]
fn negative_controls_exist_for_pass_type_checks() {
    let controls = ["gabc:perturbed", "bf:perturbed", "cmap:perturbed"];
    for info in CHECKS.iter() {
        let failing: Vec<&str> = controls
            .iter()
            .copied()
            .filter(|t| {
                let r = run_check(&spec(info.name, t).expecting(Expected::Pass)).unwrap();
                r.verdict == Verdict::Fail && r.max_abs > NEGATIVE_FLOOR && r.max_abs.is_finite()
            })
            .collect();
        if NO_CONTROL.contains(&info.name) {
            assert!(failing.is_empty(), "{}: {failing:?}", info.name);
        } else {
            assert!(!failing.is_empty(), "{} has no failing control", info.name);
        }
    }
}
