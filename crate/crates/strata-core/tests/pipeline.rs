//! End-to-end pipelines over the public surface, written the way an
//! external consumer would use the crate: descriptors travel as JSON text,
//! get re-parsed, and drive the quotient, gluing, fiber, and certificate
//! machinery. The in-module unit tests construct values directly; these
//! tests prove the serialized interfaces are enough on their own.

use strata_core::exact::GaussianRational;
use strata_core::exquo::{
    extended_quotient, gl2_swap_action, gl2_theta_shift, sl5d_action, theta_glue_data,
    twisted_extended_quotient, ThetaGlueData,
};
use strata_core::findim::certify::{
    doubled_point_certificate, doubled_point_samples, verify_certificate, EquivalenceCertificate,
};
use strata_core::findim::descriptor::{build_fiber, CoefficientKind, FiberDescriptor};
use strata_core::glue::{
    distinguishing_invariants, from_theta, ComparisonVerdict, GluedPoint, Locus, SetDescriptor,
};
use strata_core::groups::Cocycle2;
use strata_core::hecke::{associativity_sample, verify_quadratic};
use strata_core::lattice::{ActionJson, LatticeAction};
use strata_core::weyl::{ball, RootSystemSpec};

type Gq = GaussianRational;

fn pt(coords: &[&str]) -> Vec<Gq> {
    coords.iter().map(|c| c.parse().expect("scalar parses")).collect()
}

/// The rank-4 Klein action and its cocycle survive a round trip through
/// JSON text and still assemble the full twisted stratification.
#[test]
fn serialized_descriptors_rebuild_the_twisted_quotient() {
    let (action, rho) = sl5d_action();
    let action_text = serde_json::to_string(&action.to_json()).expect("action serializes");
    let rho_text =
        serde_json::to_string(&rho.to_json(action.group())).expect("cocycle serializes");

    let parsed: ActionJson = serde_json::from_str(&action_text).expect("action text parses");
    let rebuilt = LatticeAction::from_json(&parsed).expect("action validates");
    let (group, cocycle) =
        Cocycle2::from_json(&serde_json::from_str(&rho_text).expect("cocycle text parses"))
            .expect("cocycle validates");
    assert_eq!(group.order(), rebuilt.group().order());

    let eq = twisted_extended_quotient(&rebuilt, &cocycle).expect("twisted quotient builds");
    assert_eq!(eq.strata().len(), 5);
    let mut mults = eq.multiplicities();
    mults.sort_unstable();
    assert_eq!(mults, [1, 1, 2, 2, 2]);

    // A generic point sees one label; a point on a single wall sees the
    // wall's two plus the closure of the free sheet is not counted twice —
    // the fiber reports exactly the labels living over the point.
    assert_eq!(eq.fiber_at(&pt(&["2", "3", "5", "7"])).expect("free fiber").labels.len(), 1);
    assert_eq!(eq.fiber_at(&pt(&["2", "3", "2", "3"])).expect("wall fiber").labels.len(), 2);
    assert_eq!(eq.fiber_at(&pt(&["5", "5", "5", "5"])).expect("deep fiber").labels.len(), 1);
}

/// Theta gluing data serializes, re-parses, and rebuilds a model with the
/// same doubled curve; stripping the doublings changes the comparison
/// invariants in exactly the expected ways.
#[test]
fn theta_data_round_trips_into_the_glued_model() {
    let eq = extended_quotient(&gl2_swap_action()).expect("swap quotient builds");
    let data = theta_glue_data(&eq, &gl2_theta_shift("2")).expect("glue data assembles");
    let text = serde_json::to_string(&data).expect("glue data serializes");
    let reread: ThetaGlueData = serde_json::from_str(&text).expect("glue data re-parses");
    assert_eq!(reread, data);

    let model = from_theta(&reread).expect("model builds");
    assert_eq!(model.multiplicity_at(0, &pt(&["3/2", "6"])).expect("on the curve"), 2);
    assert_eq!(model.multiplicity_at(0, &pt(&["2", "3"])).expect("off the curve"), 1);

    // Each copy of a doubled point is closed in its own chart: the full
    // torus minus nothing closes onto copy one as well as copy two.
    let whole = SetDescriptor {
        piece: 0,
        copy: None,
        locus: Locus::of_congruences(vec![]),
        minus: None,
    };
    for copy in [0, 1] {
        let candidate = GluedPoint::new(0, copy, pt(&["3/2", "6"]));
        assert!(
            model.closure_contains(&whole, &candidate).expect("closure query answers"),
            "copy {copy} of a curve point lies in the closure of the whole space"
        );
    }

    let mut separated = reread.clone();
    separated.doublings.clear();
    let plain = from_theta(&separated).expect("separated model builds");
    let report = distinguishing_invariants(&model, &plain);
    match report.verdict {
        ComparisonVerdict::NotHomeomorphic { differing } => {
            assert!(differing.contains(&"non_separated_pair".to_string()));
        }
        ComparisonVerdict::IndistinguishableAtThisResolution => {
            panic!("doubling the curve must change the invariants")
        }
    }
    let same = distinguishing_invariants(&model, &model);
    assert_eq!(same.verdict, ComparisonVerdict::IndistinguishableAtThisResolution);
}

/// A crossed-product descriptor assembled as JSON drives the block census
/// at points of every stratum depth.
#[test]
fn fiber_descriptors_travel_as_json() {
    let (action, _) = sl5d_action();
    let desc = FiberDescriptor::CrossedProduct {
        action: action.to_json(),
        coefficient: CoefficientKind::M2Rho,
        cocycle: None,
    };
    let text = serde_json::to_string(&desc).expect("descriptor serializes");
    let reread: FiberDescriptor = serde_json::from_str(&text).expect("descriptor re-parses");
    reread.validate().expect("descriptor validates");

    let cases: [(&[&str], &[usize]); 3] = [
        (&["2", "3", "5", "7"], &[8]),
        (&["2", "3", "2", "3"], &[4, 4]),
        (&["5", "5", "5", "5"], &[4]),
    ];
    for (coords, want) in cases {
        let fiber = build_fiber(&reread, &pt(coords)).expect("fiber builds");
        assert_eq!(fiber.blocks().expect("census splits"), want, "blocks at {coords:?}");
    }
}

/// The bundled certificate survives a serde round trip and still verifies
/// against the bundled samples; its source family splits as expected at a
/// doubled and an ordinary point.
#[test]
fn certificates_survive_serde_and_verify() {
    let cert = doubled_point_certificate();
    let text = serde_json::to_string(&cert).expect("certificate serializes");
    let reread: EquivalenceCertificate = serde_json::from_str(&text).expect("certificate parses");
    assert_eq!(reread, cert);

    let samples = doubled_point_samples();
    let report = verify_certificate(&reread, &samples).expect("verification runs");
    assert!(report.all_pass, "every certificate step verifies");
    assert_eq!(report.steps.len(), 2);

    let source = &reread.algebras[0];
    let at_zero = build_fiber(source, &pt(&["0"])).expect("fiber at the doubled point");
    assert_eq!(at_zero.blocks().expect("census splits"), [1, 1]);
    let away = build_fiber(source, &pt(&["2"])).expect("fiber away from it");
    assert_eq!(away.blocks().expect("census splits"), [2]);
}

/// The Hecke layer checks its defining relations for a spec parsed from a
/// plain string, and the ball respects the closed-form length.
#[test]
fn hecke_relations_hold_for_a_parsed_spec() {
    let spec = RootSystemSpec::parse("A_SL:3").expect("spec parses");
    let quadratic = verify_quadratic(spec, 2).expect("relation suite runs");
    assert!(quadratic.all_pass());
    assert_eq!(quadratic.checks.len(), spec.num_affine_generators());

    let assoc = associativity_sample(spec, 3, 25, 7).expect("sample suite runs");
    assert_eq!(assoc.failures, 0);

    for x in ball(spec, 3).expect("ball enumerates") {
        let (_, core) = x.strip_omega();
        assert_eq!(core.length().expect("length computes"), core.closed_form_length());
    }
}
