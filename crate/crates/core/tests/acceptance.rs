//! Acceptance suite: one line per criterion, then a comparison of the observed
//! failures with the list of known, analysed failures. Any unexpected outcome
//! (a new failure or a known failure that starts passing) fails the run.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilflow::catalog::{complete_set_instances, default_instances, resolve};
use nilflow::geodesic::{conservation_report, integrate};
use nilflow::group::TangentPoint;
use nilflow::integrals::FirstIntegral;
use nilflow::linalg::Matrix;
use nilflow::poisson::{butler_involution, involution_criteria, involution_table, is_first_integral, verify_iso_homomorphism};
use nilflow::quotients::invariance_check;
use nilflow::solvers::{independence_scan, killing2_tensors, skew_derivations, RankPath, Region};
use nilflow::verify::{verify_name, VerifyOptions};

const ISO_TRIALS: usize = 10;
const ISO_BUDGET: Duration = Duration::from_secs(30);
const SET_BUDGET: Duration = Duration::from_secs(120);
const FLOW_BUDGET: Duration = Duration::from_secs(120);
const SCAN_SAMPLES: usize = 200;
const FLOAT_FULL_RANK: f64 = 0.99;
const CRITERIA_INSTANCES: usize = 50;
const FLOW_DT: f64 = 1e-3;
const FLOW_T: f64 = 10.0;
const FLOW_INITIAL_CONDITIONS: usize = 5;
const MEMBER_DRIFT: f64 = 1e-8;
const ENERGY_DRIFT: f64 = 1e-10;
const HALVING_GAIN: f64 = 8.0;
const COARSE_DT: f64 = 0.02;
const INVARIANCE_SAMPLES: usize = 200;
const INVARIANCE_TOL: f64 = 1e-10;
const SEED: u64 = 20240611;

/// Failures analysed in the decisions log; each is a conflict between a displayed
/// claim and an exact computation, or a floating-point floor.
const KNOWN_FAILURES: &[(u8, &str)] = &[
    (2, "n1 derivation dim = 2"),
    (3, "n1"),
    (3, "n6_10"),
    (3, "n6_19(-1)"),
    (3, "n6_19(0)"),
    (3, "n6_19(1)"),
    (3, "n6_19(2)"),
    (3, "n6_20"),
    (5, "n6_22(0) displayed g_1"),
    (5, "n6_22(1) displayed g_1"),
    (7, "n1 drift"),
    (7, "n6_10 drift"),
    (7, "n6_19(0) drift"),
    (7, "n6_20 drift"),
    (7, "halving dt = 1e-3 -> 5e-4 gains 8x on every set"),
    (9, "n6_24(0) derivation family"),
];

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

struct Outcome {
    id: u8,
    title: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
}

fn run(id: u8, title: &'static str, f: impl FnOnce() -> Vec<Check>) -> Outcome {
    let start = Instant::now();
    let checks = f();
    Outcome {
        id,
        title,
        checks,
        elapsed: start.elapsed(),
    }
}

fn set_of(name: &str) -> Vec<FirstIntegral> {
    resolve(name).unwrap().complete_set_integrals().unwrap().unwrap()
}

fn c1_isometry() -> Vec<Check> {
    let start = Instant::now();
    let names = [
        "h3", "h5", "n1", "n2", "n3", "n23free", "n6_10", "n6_19(0)", "n6_19(1)", "n6_20", "n6_22(1)", "n6_25", "n6_26",
    ];
    let mut out: Vec<Check> = names
        .iter()
        .map(|n| {
            let r = verify_iso_homomorphism(&resolve(n).unwrap().algebra, ISO_TRIALS, SEED).unwrap();
            let bad: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.identity.as_str()).collect();
            check(
                *n,
                r.identities_passed,
                format!("{} identities, derivation dim {}, failing {bad:?}", r.checks.len(), r.derivation_dim),
            )
        })
        .collect();
    let t = start.elapsed();
    out.push(check("runtime < 30 s", t < ISO_BUDGET, format!("{t:.2?}")));
    out
}

fn c2_solver_dims() -> Vec<Check> {
    let der = |n: &str| skew_derivations(&resolve(n).unwrap().algebra).dim;
    let kil = |n: &str| killing2_tensors(&resolve(n).unwrap().algebra).dim;
    let mut out = Vec::new();
    for (name, want) in [("n1", 2), ("n23free", 1), ("n6_23", 0), ("h3", 1)] {
        let got = der(name);
        out.push(check(format!("{name} derivation dim = {want}"), got == want, format!("solver {got}")));
    }
    for (name, want) in [("n23free", 5), ("n6_19(0)", 4)] {
        let got = kil(name);
        out.push(check(format!("{name} killing dim = {want}"), got == want, format!("solver {got}")));
    }
    for name in default_instances() {
        let alg = resolve(&name).unwrap().algebra;
        let ok = killing2_tensors(&alg).contains(&Matrix::identity(alg.dim()));
        out.push(check(format!("Id Killing on {name}"), ok, ""));
    }
    out
}

fn c3_complete_sets() -> Vec<Check> {
    let start = Instant::now();
    let mut out = Vec::new();
    for name in complete_set_instances() {
        let alg = resolve(&name).unwrap().algebra;
        let set = set_of(&name);
        assert_eq!(set.len(), alg.dim(), "{name}: complete set size");
        let not_fi: Vec<String> = set
            .iter()
            .filter(|f| !is_first_integral(f, &alg).unwrap().holds)
            .map(|f| f.spec(&alg))
            .collect();
        let table = involution_table(&set, &alg).unwrap();
        let pairs: Vec<String> = table
            .failures()
            .iter()
            .map(|&(i, j)| format!("{{{}, {}}}", set[i].spec(&alg), set[j].spec(&alg)))
            .collect();
        out.push(check(
            name,
            not_fi.is_empty() && pairs.is_empty(),
            format!("not first integrals {not_fi:?}, non-commuting {pairs:?}"),
        ));
    }
    let t = start.elapsed();
    out.push(check("runtime < 2 min", t < SET_BUDGET, format!("{t:.2?}")));
    out
}

fn c4_independence() -> Vec<Check> {
    let mut out = Vec::new();
    for name in ["h3", "n2", "n3", "n1", "n23free"] {
        let e = resolve(name).unwrap();
        let set = e.complete_set_integrals().unwrap().unwrap();
        let region: Region = e.dense_predicate.clone().expect("dense predicate");
        let f = independence_scan(&set, &e.algebra, &region, SCAN_SAMPLES, SEED, RankPath::Float).unwrap();
        out.push(check(
            format!("{name} float"),
            f.accepted == SCAN_SAMPLES && f.full_rank_fraction >= FLOAT_FULL_RANK,
            format!("{}/{}", f.full_rank, f.accepted),
        ));
        let x = independence_scan(&set, &e.algebra, &region, SCAN_SAMPLES, SEED, RankPath::Exact).unwrap();
        out.push(check(
            format!("{name} exact"),
            x.accepted == SCAN_SAMPLES && x.full_rank == x.accepted,
            format!("{}/{}", x.full_rank, x.accepted),
        ));
    }
    out
}

fn c5_butler() -> Vec<Check> {
    let mut out = Vec::new();
    for name in default_instances() {
        let alg = resolve(&name).unwrap().algebra;
        if alg.step().unwrap() != 2 {
            continue;
        }
        let fails = butler_involution(&alg, 2).unwrap();
        out.push(check(format!("{name} g_i commute"), fails.is_empty(), format!("{fails:?}")));
    }
    for eps in ["0", "1"] {
        let name = format!("n6_22({eps})");
        let e = resolve(&name).unwrap();
        let g1 = FirstIntegral::butler(&e.algebra, 1).unwrap().as_polynomial(&e.algebra).unwrap().value;
        let diff = &g1 - e.butler_display.as_ref().unwrap();
        out.push(check(format!("{name} displayed g_1"), diff.is_identically_zero(), format!("difference {diff}")));
    }
    out
}

fn c6_criteria() -> Vec<Check> {
    default_instances()
        .iter()
        .map(|name| {
            let alg = resolve(name).unwrap().algebra;
            let r = involution_criteria(&alg, CRITERIA_INSTANCES, SEED).unwrap();
            let summary: Vec<String> = r
                .criteria
                .iter()
                .map(|c| format!("{} {}/{}", c.name, c.agreements, c.instances))
                .collect();
            check(name.clone(), r.passed, summary.join(", "))
        })
        .collect()
}

fn max_drift(name: &str, inits: &[TangentPoint<f64>], dt: f64, t_end: f64) -> (f64, f64) {
    let e = resolve(name).unwrap();
    let set = set_of(name);
    let mut member: f64 = 0.0;
    let mut energy: f64 = 0.0;
    for init in inits {
        let traj = integrate(&e.algebra, init, dt, t_end).unwrap();
        let rep = conservation_report(&e.algebra, &traj, &set).unwrap();
        member = member.max(rep.integrals.iter().map(|d| d.max_rel_drift).fold(0.0, f64::max));
        energy = energy.max(rep.energy_rel_drift);
    }
    (member, energy)
}

fn c7_conservation() -> Vec<Check> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    let mut worst_gain = f64::INFINITY;
    let mut worst_coarse_gain = f64::INFINITY;
    for name in complete_set_instances() {
        let n = resolve(&name).unwrap().algebra.dim();
        let inits: Vec<TangentPoint<f64>> = (0..FLOW_INITIAL_CONDITIONS)
            .map(|_| {
                let w = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                TangentPoint::new(w, y).unwrap()
            })
            .collect();
        let (member, energy) = max_drift(&name, &inits, FLOW_DT, FLOW_T);
        out.push(check(
            format!("{name} drift"),
            member < MEMBER_DRIFT && energy < ENERGY_DRIFT,
            format!("member {member:.2e}, energy {energy:.2e}"),
        ));
        if member < MEMBER_DRIFT {
            let (half, _) = max_drift(&name, &inits, FLOW_DT / 2.0, FLOW_T);
            worst_gain = worst_gain.min(member / half);
            let (coarse, _) = max_drift(&name, &inits[..1], COARSE_DT, FLOW_T);
            let (coarse_half, _) = max_drift(&name, &inits[..1], COARSE_DT / 2.0, FLOW_T);
            worst_coarse_gain = worst_coarse_gain.min(coarse / coarse_half);
        }
    }
    out.push(check(
        "halving dt = 1e-3 -> 5e-4 gains 8x on every set",
        worst_gain >= HALVING_GAIN,
        format!("smallest gain {worst_gain:.2}"),
    ));
    out.push(check(
        "halving dt = 0.02 -> 0.01 gains 8x on every set",
        worst_coarse_gain >= HALVING_GAIN,
        format!("smallest gain {worst_coarse_gain:.2}"),
    ));
    let t = start.elapsed();
    out.push(check("runtime < 2 min", t < FLOW_BUDGET, format!("{t:.2?}")));
    out
}

fn c8_quotients() -> Vec<Check> {
    let mut out = Vec::new();
    for name in ["h3", "n3"] {
        let e = resolve(name).unwrap();
        for fixture in &e.lattices {
            for f in e.integrals(&fixture.integrals).unwrap() {
                let r = invariance_check(&f, &fixture.lattice, &e.algebra, INVARIANCE_SAMPLES, SEED).unwrap();
                out.push(check(
                    format!("{} on {}", f.label().unwrap(), fixture.lattice.name),
                    r.samples == INVARIANCE_SAMPLES && r.max_deviation < INVARIANCE_TOL,
                    format!("{:.2e} over {} samples", r.max_deviation, r.samples),
                ));
            }
        }
    }
    out
}

fn c9_negative() -> Vec<Check> {
    let opts = VerifyOptions {
        samples: SCAN_SAMPLES,
        seed: SEED,
        exact_rank: false,
    };
    let mut out = Vec::new();
    for name in ["n6_23", "n6_24(0)", "n6_24(2)", "n6_24(-1)"] {
        let r = verify_name(name, &opts).unwrap();
        let none = r.claim("complete-set").map(|c| c.detail.as_str()) == Some("no complete set claimed");
        out.push(check(format!("{name} reports no complete set"), none, ""));
        if name == "n6_23" {
            let c = r.claim("derivation_dim").unwrap();
            out.push(check("n6_23 derivation dim 0", c.passed, c.detail.clone()));
        }
        if name == "n6_24(0)" || name == "n6_24(-1)" {
            let c = r
                .claims
                .iter()
                .find(|c| c.name.starts_with("derivation-family"))
                .unwrap();
            out.push(check(format!("{name} derivation family"), c.passed, c.detail.clone()));
        }
    }
    out
}

fn main() -> ExitCode {
    let outcomes = vec![
        run(1, "isometry-algebra monomorphism identities", c1_isometry),
        run(2, "solver fixture dimensions", c2_solver_dims),
        run(3, "complete sets: involution and first integrals", c3_complete_sets),
        run(4, "independence scans on dense sets", c4_independence),
        run(5, "Butler integrals", c5_butler),
        run(6, "involution criteria equivalences", c6_criteria),
        run(7, "conservation along RK4 trajectories", c7_conservation),
        run(8, "quotient invariance under lattices", c8_quotients),
        run(9, "negative fixtures", c9_negative),
    ];
    let known: BTreeSet<(u8, &str)> = KNOWN_FAILURES.iter().copied().collect();
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let failing: Vec<&Check> = o.checks.iter().filter(|c| !c.passed).collect();
        let verdict = if failing.is_empty() { "PASS" } else { "FAIL" };
        let passed = o.checks.len() - failing.len();
        let mut line = format!(
            "criterion {}: {verdict} {} [{passed}/{} checks, {:.1?}]",
            o.id,
            o.title,
            o.checks.len(),
            o.elapsed
        );
        if !failing.is_empty() {
            let names: Vec<String> = failing.iter().map(|c| format!("{} ({})", c.name, c.detail)).collect();
            line.push_str(&format!(" failing: {}", names.join("; ")));
        }
        println!("{line}");
        for c in &o.checks {
            let expected_fail = known.contains(&(o.id, c.name.as_str()));
            if c.passed == expected_fail {
                unexpected.push(format!(
                    "criterion {} check `{}` {} unexpectedly ({})",
                    o.id,
                    c.name,
                    if c.passed { "passed" } else { "failed" },
                    c.detail
                ));
            }
        }
    }
    for (id, name) in &known {
        let present = outcomes
            .iter()
            .any(|o| o.id == *id && o.checks.iter().any(|c| c.name == *name));
        if !present {
            unexpected.push(format!("criterion {id} known failure `{name}` was not evaluated"));
        }
    }
    if unexpected.is_empty() {
        println!(
            "acceptance: all outcomes as expected ({} known failures, see README)",
            KNOWN_FAILURES.len()
        );
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("acceptance: {u}");
        }
        ExitCode::FAILURE
    }
}
