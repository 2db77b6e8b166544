//! The self-test suite behind `strata selftest` and the acceptance
//! integration tests: ten deterministic end-to-end checks that tie the
//! modules together on the bundled examples.
//!
//! Every check is exact — equality of integers, block lists, or verdicts,
//! never a tolerance — and every randomized sample is drawn from a fixed
//! seed, so two runs produce identical reports. Each criterion finishes in
//! seconds; the whole suite is cheap enough to run on every build.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exact::GaussianRational;
use crate::exquo::{
    discrete_oracle, extended_quotient, gl2_swap_action, gl2_theta_shift, hh_support,
    sl3_quotient_action, sl5d_action, theta_glue_data, twisted_extended_quotient,
};
use crate::findim::certify::{
    diag_embedding_check, doubled_point_certificate, doubled_point_samples, verify_certificate,
};
use crate::findim::descriptor::{build_fiber, CoefficientKind, FiberDescriptor};
use crate::findim::FinDimAlgebra;
use crate::glue::{
    build_glued, build_product, disjoint_union, distinguishing_invariants, from_theta, BaseSpace,
    ComparisonVerdict, DoublingSpec, GluedPoint, Locus, ProductPoint, ProductSet, SetDescriptor,
};
use crate::hecke::{associativity_sample, specialization_sample, verify_quadratic};
use crate::weyl::{ball, ExtendedAffineWeylElt, RootSystemSpec};

type Gq = GaussianRational;

/// Seed of the associativity sample; arbitrary but frozen.
const ASSOC_SEED: u64 = 0x5eed_a550;
/// Seed of the specialization sample; arbitrary but frozen.
const SPECIALIZE_SEED: u64 = 0x5eed_0e5e;

/// One labelled check inside a criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub label: String,
    pub pass: bool,
}

/// Outcome of one criterion: an overall verdict plus one line per check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub index: usize,
    pub name: String,
    pub pass: bool,
    pub checks: Vec<CheckLine>,
}

impl CriterionResult {
    /// The labels of the checks that failed.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.label.as_str()).collect()
    }
}

/// Accumulator for the checks of one criterion.
#[derive(Default)]
struct Checks {
    lines: Vec<CheckLine>,
}

impl Checks {
    fn is(&mut self, label: impl Into<String>, pass: bool) {
        self.lines.push(CheckLine { label: label.into(), pass });
    }

    /// Equality check; a failure records both sides in the label.
    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, label: &str, got: T, want: T) {
        if got == want {
            self.is(label, true);
        } else {
            self.is(format!("{label}: got {got:?}, want {want:?}"), false);
        }
    }
}

/// Runs one criterion body, folding any error into a failed check line.
fn criterion(
    index: usize,
    name: &str,
    body: impl FnOnce(&mut Checks) -> Result<(), String>,
) -> CriterionResult {
    let mut c = Checks::default();
    if let Err(e) = body(&mut c) {
        c.is(format!("aborted: {e}"), false);
    }
    let pass = !c.lines.is_empty() && c.lines.iter().all(|l| l.pass);
    CriterionResult { index, name: name.to_string(), pass, checks: c.lines }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pt(coords: &[&str]) -> Vec<Gq> {
    coords.iter().map(|s| s.parse().expect("scalar literal")).collect()
}

/// The fiber-family descriptor of the rank-4 Klein action with 2×2 matrix
/// coefficients conjugated through the projective representation.
fn klein_matrix_descriptor() -> FiberDescriptor {
    FiberDescriptor::CrossedProduct {
        action: sl5d_action().0.to_json(),
        coefficient: CoefficientKind::M2Rho,
        cocycle: None,
    }
}

/// The affine line with the origin doubled once.
fn doubled_line_model() -> Result<crate::glue::GluedSpace, String> {
    build_glued(
        BaseSpace::Affine { dim: 1 },
        &[DoublingSpec { locus: Locus::of_points(&[&["0"]]), minus: None, extra: 1 }],
    )
    .map_err(err)
}

/// Criterion 1 — stratification of the rank-4 Klein action: one free
/// stratum, three rank-2 walls of multiplicity 2, and one deep rank-1 torus
/// whose twisted multiplicity is 1 but whose plain multiplicity is 4.
pub fn criterion_1() -> CriterionResult {
    criterion(1, "rank-4 Klein stratification", |c| {
        let (action, rho) = sl5d_action();
        let eq = twisted_extended_quotient(&action, &rho).map_err(err)?;
        let rows = eq.report_rows();
        c.eq("stratum count", rows.len(), 5);

        let free: Vec<_> = rows.iter().filter(|r| r.stabilizer_order == 1).collect();
        c.eq("free stratum count", free.len(), 1);
        if let [row] = free[..] {
            c.eq("free carrier rank", row.carrier_rank, 4);
        }

        let walls: Vec<_> = rows.iter().filter(|r| r.carrier_rank == 2).collect();
        c.eq("rank-2 carrier count", walls.len(), 3);
        c.is("rank-2 stabilizers have order 2", walls.iter().all(|r| r.stabilizer_order == 2));
        c.is("rank-2 multiplicity is 2", walls.iter().all(|r| r.multiplicity == 2));

        let deep: Vec<_> = rows.iter().filter(|r| r.carrier_rank == 1).collect();
        c.eq("rank-1 carrier count", deep.len(), 1);
        if let [row] = deep[..] {
            c.eq("deep stabilizer order", row.stabilizer_order, 4);
            c.eq("twisted multiplicity over the deep torus", row.multiplicity, 1);
            // The deep torus is the intersection of the three walls: it lies
            // inside each of them, and nothing of intermediate rank exists.
            for wall in &walls {
                c.is(
                    format!("deep carrier sits inside wall stratum {}", wall.stratum),
                    eq.containments().contains(&(row.stratum, wall.stratum)),
                );
            }
            c.is("no carrier of rank 3", rows.iter().all(|r| r.carrier_rank != 3));
        }

        let plain = extended_quotient(&action).map_err(err)?;
        let plain_deep = plain
            .report_rows()
            .into_iter()
            .find(|r| r.carrier_rank == 1)
            .ok_or("plain quotient lost the deep stratum")?;
        c.eq("plain multiplicity over the deep torus", plain_deep.multiplicity, 4);
        Ok(())
    })
}

/// Criterion 2 — fiber algebras of the Klein matrix family: block lists
/// {8}, {4, 4}, {4} at a free, a wall, and the deep point, with block
/// counts equal to the twisted fiber sizes 1, 2, 1.
pub fn criterion_2() -> CriterionResult {
    criterion(2, "Klein fiber-algebra blocks", |c| {
        let (action, rho) = sl5d_action();
        let eq = twisted_extended_quotient(&action, &rho).map_err(err)?;
        let desc = klein_matrix_descriptor();
        desc.validate().map_err(err)?;
        let cases: [(&[&str], Vec<usize>); 3] = [
            (&["2", "3", "5", "7"], vec![8]),
            (&["2", "3", "2", "3"], vec![4, 4]),
            (&["5", "5", "5", "5"], vec![4]),
        ];
        for (coords, want) in cases {
            let x = pt(coords);
            let fiber = build_fiber(&desc, &x).map_err(err)?;
            let blocks = fiber.blocks().map_err(err)?;
            let fiber_size = eq.fiber_at(&x).map_err(err)?.labels.len();
            c.eq(&format!("blocks at ({})", coords.join(",")), blocks.clone(), want);
            c.eq(
                &format!("block count matches the fiber size at ({})", coords.join(",")),
                blocks.len(),
                fiber_size,
            );
        }
        Ok(())
    })
}

/// Criterion 3 — the coordinate swap on a rank-2 torus: two components in
/// the extended quotient, and the built-in shift doubles exactly the curve
/// of unordered pairs {v⁻¹z, vz}.
pub fn criterion_3() -> CriterionResult {
    criterion(3, "swap-action components and shifted curve", |c| {
        let action = gl2_swap_action();
        let eq = extended_quotient(&action).map_err(err)?;
        c.eq("component census", eq.component_census().map_err(err)?.total, 2);

        let data = theta_glue_data(&eq, &gl2_theta_shift("2")).map_err(err)?;
        c.eq("doubled curve count", data.doublings.len(), 1);
        let model = from_theta(&data).map_err(err)?;
        for coords in [&["3/2", "6"], &["6", "3/2"], &["1/2", "2"]] {
            c.eq(
                &format!("multiplicity 2 on the curve at ({})", coords.join(",")),
                model.multiplicity_at(0, &pt(coords)).map_err(err)?,
                2,
            );
        }
        for coords in [&["2", "2"], &["2", "3"], &["5", "7"]] {
            c.eq(
                &format!("multiplicity 1 off the curve at ({})", coords.join(",")),
                model.multiplicity_at(0, &pt(coords)).map_err(err)?,
                1,
            );
        }
        Ok(())
    })
}

/// Criterion 4 — the doubled-point family: blocks {2} off the vanishing
/// point and {1, 1} on it, the bundled two-step certificate verifies at
/// five sample points, and the doubled model is told apart from the
/// disjoint model by both the separation and the component invariants.
pub fn criterion_4() -> CriterionResult {
    criterion(4, "doubled-point certificate and invariants", |c| {
        let cert = doubled_point_certificate();
        let family = &cert.algebras[0];
        let off = build_fiber(family, &pt(&["2"])).map_err(err)?;
        c.eq("blocks off the vanishing point", off.blocks().map_err(err)?, vec![2]);
        let on = build_fiber(family, &pt(&["0"])).map_err(err)?;
        c.eq("blocks at the vanishing point", on.blocks().map_err(err)?, vec![1, 1]);

        let samples = doubled_point_samples();
        c.is("at least five sample points", samples.len() >= 5);
        let report = verify_certificate(&cert, &samples).map_err(err)?;
        c.eq("certificate step count", report.steps.len(), 2);
        c.is("two-step certificate verifies at every sample", report.all_pass);

        let doubled = doubled_line_model()?;
        let line = build_glued(BaseSpace::Affine { dim: 1 }, &[]).map_err(err)?;
        let point = build_glued(BaseSpace::Affine { dim: 0 }, &[]).map_err(err)?;
        let disjoint = disjoint_union(vec![line, point]);
        let report = distinguishing_invariants(&doubled, &disjoint);
        match report.verdict {
            ComparisonVerdict::NotHomeomorphic { ref differing } => {
                c.is(
                    "component counts distinguish the models",
                    differing.contains(&"components".to_string()),
                );
                c.is(
                    "separation distinguishes the models",
                    differing.contains(&"non_separated_pair".to_string()),
                );
            }
            ComparisonVerdict::IndistinguishableAtThisResolution => {
                c.is("models are distinguished", false);
            }
        }
        Ok(())
    })
}

/// Criterion 5 — Hecke algebra suite for the rank-2 GL and rank-3 SL
/// lattices: the quadratic relation for every affine generator, 200 random
/// associativity triples of length ≤ 6, and 100 random products whose q = 1
/// specialization matches the independently computed crossed product.
pub fn criterion_5() -> CriterionResult {
    criterion(5, "Hecke relation suite", |c| {
        let specs =
            [RootSystemSpec::a_gl(2).map_err(err)?, RootSystemSpec::a_sl(3).map_err(err)?];
        for spec in specs {
            let quad = verify_quadratic(spec, 1).map_err(err)?;
            c.is(
                format!("{spec}: quadratic relation for all affine generators"),
                quad.all_pass() && quad.checks.len() == spec.num_affine_generators(),
            );
            let assoc = associativity_sample(spec, 6, 200, ASSOC_SEED).map_err(err)?;
            c.is(
                format!("{spec}: associativity on {} random triples", assoc.trials),
                assoc.pass() && assoc.trials == 200,
            );
            let spec1 = specialization_sample(spec, 6, 100, SPECIALIZE_SEED).map_err(err)?;
            c.is(
                format!("{spec}: q = 1 specialization of {} random products", spec1.trials),
                spec1.pass() && spec1.trials == 100,
            );
        }
        Ok(())
    })
}

/// Criterion 6 — the fiber-size law: over every 12-torsion point of the
/// swap, symmetric-group, and Klein actions (the latter plain and twisted),
/// the symbolic fiber size equals the brute-force class count of the
/// stabilizer — conjugacy classes plainly, regular classes twisted.
pub fn criterion_6() -> CriterionResult {
    criterion(6, "fiber-size census", |c| {
        let (klein, rho) = sl5d_action();
        let cases = [
            ("rank-2 swap", gl2_swap_action(), None),
            ("symmetric group on the quotient torus", sl3_quotient_action(), None),
            ("plain rank-4 Klein", klein.clone(), None),
            ("twisted rank-4 Klein", klein, Some(rho)),
        ];
        for (label, action, cocycle) in cases {
            let census = discrete_oracle(&action, cocycle.as_ref(), 12).map_err(err)?;
            c.is(
                format!(
                    "{label}: all {} twelve-torsion points match ({} unmatched)",
                    census.total_points, census.unmatched_points
                ),
                census.matches && census.unmatched_points == 0,
            );
        }
        Ok(())
    })
}

/// Criterion 7 — length agreement: an independent breadth-first search over
/// the affine generators reproduces both the closed-form length and the
/// library's cached length on the whole radius-8 ball of the rank-3 SL
/// lattice, Ω-translates included.
pub fn criterion_7() -> CriterionResult {
    criterion(7, "length agreement on the radius-8 ball", |c| {
        let spec = RootSystemSpec::a_sl(3).map_err(err)?;
        let radius = 8u64;
        let generators: Vec<ExtendedAffineWeylElt> = (0..spec.num_affine_generators())
            .map(|i| ExtendedAffineWeylElt::simple(spec, i))
            .collect::<Result<_, _>>()
            .map_err(err)?;

        let mut dist: BTreeMap<ExtendedAffineWeylElt, u64> = BTreeMap::new();
        let mut frontier = vec![ExtendedAffineWeylElt::identity(spec)];
        dist.insert(frontier[0].clone(), 0);
        for depth in 1..=radius {
            let mut next = Vec::new();
            for x in &frontier {
                for s in &generators {
                    let y = x.compose(s).map_err(err)?;
                    if !dist.contains_key(&y) {
                        dist.insert(y.clone(), depth);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }

        let full = ball(spec, radius as usize).map_err(err)?;
        c.eq("ball size is the search size times |Ω|", full.len(), dist.len() * 3);
        let mut closed_form_agrees = true;
        let mut cached_agrees = true;
        let mut all_reached = true;
        for x in &full {
            let (_, w) = x.strip_omega();
            match dist.get(&w) {
                None => all_reached = false,
                Some(&d) => {
                    closed_form_agrees &= x.closed_form_length() == d;
                    cached_agrees &= x.length().map_err(err)? == d;
                }
            }
        }
        c.is("every ball element is reached by the search", all_reached);
        c.is(
            format!("closed form equals search depth on {} elements", full.len()),
            closed_form_agrees,
        );
        c.is("cached length equals search depth", cached_agrees);
        Ok(())
    })
}

/// Criterion 8 — class support on the quotient torus: the three-cycle class
/// has a rank-0 fixed locus with exactly 3 components, the brute count at
/// the cube roots of unity finds exactly 3 fixed points, and every class
/// matches its predicted count at the 12-torsion level.
pub fn criterion_8() -> CriterionResult {
    criterion(8, "class support on the quotient torus", |c| {
        let action = sl3_quotient_action();
        let rows = hh_support(&action).map_err(err)?;
        c.eq("class count", rows.len(), 3);
        let three_cycle =
            rows.iter().find(|r| r.class_size == 2).ok_or("no three-cycle class")?;
        c.eq("three-cycle fixed rank", three_cycle.fixed.rank_fixed, 0);
        c.eq("three-cycle component count", three_cycle.fixed.component_count, 3);
        c.eq(
            "three-cycle fixed points at the cube roots",
            action.discrete_fixed_count(three_cycle.class_rep, 3),
            3,
        );
        for row in &rows {
            let expected =
                row.fixed.component_count * 12u64.pow(row.fixed.rank_fixed as u32);
            c.eq(
                &format!("class {} matches its 12-torsion count", row.class_rep),
                action.discrete_fixed_count(row.class_rep, 12),
                expected,
            );
        }
        Ok(())
    })
}

/// Criterion 9 — matrix stability: the diagonal embedding A → M_n(A)
/// preserves spectra and scales every block size by n, for n = 2, 3, on
/// both fibers of the doubled-point family and on the 2×2 matrix algebra.
pub fn criterion_9() -> CriterionResult {
    criterion(9, "diagonal-embedding stability", |c| {
        let cert = doubled_point_certificate();
        let family = &cert.algebras[0];
        let algebras = [
            ("off-point fiber", build_fiber(family, &pt(&["2"])).map_err(err)?),
            ("doubled-point fiber", build_fiber(family, &pt(&["0"])).map_err(err)?),
            ("2x2 matrix algebra", FinDimAlgebra::matrix_algebra(2).map_err(err)?),
        ];
        for (label, alg) in &algebras {
            for n in [2usize, 3] {
                let report = diag_embedding_check(alg, n).map_err(err)?;
                c.is(
                    format!(
                        "{label}, n = {n}: blocks {:?} -> {:?}",
                        report.source_blocks, report.target_blocks
                    ),
                    report.pass(),
                );
            }
        }
        Ok(())
    })
}

/// Criterion 10 — closure facts: on the doubled line both origins lie in
/// the closure of the punctured line, and on the product of two doubled
/// lines all four origins lie in the closure of the diagonal.
pub fn criterion_10() -> CriterionResult {
    criterion(10, "closure facts", |c| {
        let line = doubled_line_model()?;
        let punctured = SetDescriptor {
            piece: 0,
            copy: None,
            locus: Locus::of_linear(&[], &[]),
            minus: Some(Locus::of_points(&[&["0"]])),
        };
        for copy in 0..2 {
            let origin = GluedPoint::new(0, copy, pt(&["0"]));
            c.is(
                format!("origin copy {copy} closes the punctured line"),
                line.closure_contains(&punctured, &origin).map_err(err)?,
            );
        }

        let product = build_product(vec![line.clone(), line]).map_err(err)?;
        let diagonal = ProductSet {
            copies: None,
            locus: Locus::of_linear(&[&["1", "-1"]], &["0"]),
            minus: None,
        };
        for copies in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
            let origin = ProductPoint {
                copies: copies.to_vec(),
                coords: vec![pt(&["0"]), pt(&["0"])],
            };
            c.is(
                format!("origin ({}, {}) closes the diagonal", copies[0], copies[1]),
                product.closure_contains(&diagonal, &origin).map_err(err)?,
            );
        }
        Ok(())
    })
}

/// Runs all ten criteria in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}
