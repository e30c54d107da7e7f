//! Acceptance gate: every shipped guarantee, one test per criterion, each
//! printing a single pass/fail line (run with `--nocapture` to see them
//! inline). Time budgets are asserted alongside the mathematical checks.

use std::sync::Arc;
use std::time::Instant;
use vertexforge::current::{
    bracket_elements, AlgebraContext, CurrentElement, GenMode, Sector,
};
use vertexforge::lie::LieAlgebraSpec;
use vertexforge::report::{CheckResult, CheckStatus};
use vertexforge::scalar::Scalar;
use vertexforge::series::LaurentSeries;
use vertexforge::suites::batteries::*;
use vertexforge::suites::randgen::{rand_element_with, trial_rng, CoeffPolicy};
use vertexforge::suites::{run_suite, SuiteConfig};
use vertexforge::vacuum::ModuleContext;
use vertexforge::vertex::ModeWindow;

const SEED: u64 = 7;

fn s(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

fn assert_all_pass(criterion: &str, checks: &[CheckResult]) {
    for c in checks {
        if c.status != CheckStatus::Pass {
            println!("[{criterion}] FAIL");
            panic!(
                "{criterion}: check '{}' is {:?}: {}",
                c.name,
                c.status,
                c.witness.clone().unwrap_or_default()
            );
        }
    }
}

fn finish(criterion: &str, start: Instant, budget_secs: u64) {
    let elapsed = start.elapsed();
    println!("[{criterion}] pass ({} ms)", elapsed.as_millis());
    assert!(
        elapsed.as_secs() < budget_secs,
        "{criterion}: {} ms exceeded the {budget_secs} s budget",
        elapsed.as_millis()
    );
}

fn betas() -> Vec<(Scalar, &'static str)> {
    vec![(s(0), "0"), (Scalar::from_ratio(1, 2), "1/2")]
}

#[test]
fn criterion_01_lie_axiom_suites() {
    let start = Instant::now();
    for (beta, label) in betas() {
        let p = AlgebraContext::elliptic_p(&beta);
        let hat = AlgebraContext::hat_gp(LieAlgebraSpec::sl2(), p.clone()).unwrap();
        let check = AlgebraContext::check_gp(LieAlgebraSpec::sl2(), p).unwrap();
        // hat-g_p coefficients are scalars, so exactness is automatic;
        // check-g_p trials use exact Laurent-polynomial coefficients so
        // the equalities are exact rather than window-certified
        assert_all_pass(
            &format!("criterion 1 (beta={label}, hat)"),
            &lie_axiom_battery(&hat, 200, SEED, 16),
        );
        let anti = |t: u64| {
            let mut rng = trial_rng(SEED, 0xAC01, t);
            let x = rand_element_with(&mut rng, &check, 16, -6, 6, CoeffPolicy::Exact);
            let y = rand_element_with(&mut rng, &check, 16, -6, 6, CoeffPolicy::Exact);
            let defect = bracket_elements(&check, &x, &y)
                .unwrap()
                .add(&bracket_elements(&check, &y, &x).unwrap());
            defect.terms().count() == 0 && defect.central_part().is_zero()
        };
        let jacobi = |t: u64| {
            let mut rng = trial_rng(SEED, 0xAC02, t);
            let x = rand_element_with(&mut rng, &check, 16, -5, 5, CoeffPolicy::Exact);
            let y = rand_element_with(&mut rng, &check, 16, -5, 5, CoeffPolicy::Exact);
            let z = rand_element_with(&mut rng, &check, 16, -5, 5, CoeffPolicy::Exact);
            let s1 = bracket_elements(&check, &x, &bracket_elements(&check, &y, &z).unwrap()).unwrap();
            let s2 = bracket_elements(&check, &y, &bracket_elements(&check, &z, &x).unwrap()).unwrap();
            let s3 = bracket_elements(&check, &z, &bracket_elements(&check, &x, &y).unwrap()).unwrap();
            let defect = s1.add(&s2).add(&s3);
            defect.terms().count() == 0 && defect.central_part().is_zero()
        };
        for t in 0..200 {
            assert!(anti(t), "criterion 1: check antisymmetry trial {t} (beta={label})");
            assert!(jacobi(t), "criterion 1: check jacobi trial {t} (beta={label})");
        }
    }
    finish("criterion 1: lie-axiom suites", start, 10);
}

#[test]
fn criterion_02_kgp_mod_dr() {
    let start = Instant::now();
    let p = AlgebraContext::elliptic_p(&s(0));
    let ctx = AlgebraContext::kgp(LieAlgebraSpec::sl2(), p);
    // skew and jacobi defects with always-truncated coefficients (depth 16)
    for t in 0..100u64 {
        let mut rng = trial_rng(SEED, 0xAC10, t);
        let x = rand_element_with(&mut rng, &ctx, 16, -4, 4, CoeffPolicy::Capped);
        let y = rand_element_with(&mut rng, &ctx, 16, -4, 4, CoeffPolicy::Capped);
        let z = rand_element_with(&mut rng, &ctx, 16, -3, 3, CoeffPolicy::Capped);
        let skew = bracket_elements(&ctx, &x, &y)
            .unwrap()
            .add(&bracket_elements(&ctx, &y, &x).unwrap());
        assert!(
            skew.terms().all(|(_, c)| c.known_zero()),
            "criterion 2: non-central skew defect, trial {t}"
        );
        let record = skew.central_obstruction().unwrap();
        assert!(record.known_zero(), "criterion 2: skew obstruction {record}, trial {t}");
        let s1 = bracket_elements(&ctx, &x, &bracket_elements(&ctx, &y, &z).unwrap()).unwrap();
        let s2 = bracket_elements(&ctx, &y, &bracket_elements(&ctx, &z, &x).unwrap()).unwrap();
        let s3 = bracket_elements(&ctx, &z, &bracket_elements(&ctx, &x, &y).unwrap()).unwrap();
        let jac = s1.add(&s2).add(&s3);
        assert!(
            jac.terms().all(|(_, c)| c.known_zero()),
            "criterion 2: non-central jacobi defect, trial {t}"
        );
        let record = jac.central_obstruction().unwrap();
        assert!(record.known_zero(), "criterion 2: jacobi obstruction {record}, trial {t}");
    }
    // the known non-member survives the quotient
    let nonmember = CurrentElement::kgp_central(-1, LaurentSeries::one());
    let record = nonmember.central_obstruction().unwrap();
    assert!(
        !record.known_zero() && record.fully_certified(),
        "criterion 2: k(x)t^-1 must have a nonzero obstruction, got {record}"
    );
    finish("criterion 2: K(g,p) mod-dR suite", start, 30);
}

#[test]
fn criterion_03_oracle_equivalence() {
    let start = Instant::now();
    let p = AlgebraContext::elliptic_p(&s(0));
    let hat = AlgebraContext::hat_gp(LieAlgebraSpec::sl2(), p.clone()).unwrap();
    let check = AlgebraContext::check_gp(LieAlgebraSpec::sl2(), p).unwrap();
    assert_all_pass("criterion 3 (hat)", &[oracle_battery(&hat, 6)]);
    assert_all_pass("criterion 3 (check)", &[oracle_battery(&check, 6)]);
    finish("criterion 3: oracle equivalence", start, 10);
}

#[test]
fn criterion_04_module_law() {
    let start = Instant::now();
    let p = AlgebraContext::elliptic_p(&s(0));
    let levels = [s(0), s(1), s(-2)];
    for ell in &levels {
        let vkl = ModuleContext::v_kl(ell.clone());
        assert_all_pass(
            "criterion 4 (vkl)",
            &[module_law_battery(&vkl, 200, SEED, 4, 16)],
        );
        for f_text in ["1", "1+z", "z^2"] {
            let f = vertexforge::parse::parse_series(f_text).unwrap();
            let vf = ModuleContext::v_f(ell.clone(), f);
            assert_all_pass(
                &format!("criterion 4 (vf, f={f_text})"),
                &[module_law_battery(&vf, 200, SEED, 4, 16)],
            );
        }
        let vcheck =
            ModuleContext::v_check(LieAlgebraSpec::sl2(), p.clone(), ell.clone()).unwrap();
        assert_all_pass(
            "criterion 4 (vcheck)",
            &[module_law_battery(&vcheck, 200, SEED, 4, 16)],
        );
        let mhat = ModuleContext::build_mhat(LieAlgebraSpec::sl2(), p.clone(), ell.clone()).unwrap();
        assert_all_pass(
            "criterion 4 (mhat)",
            &[module_law_battery(&mhat, 200, SEED, 4, 16)],
        );
    }
    finish("criterion 4: module-law suite", start, 120);
}

#[test]
fn criterion_05_locality_matrix() {
    let start = Instant::now();
    let p = AlgebraContext::elliptic_p(&s(0));
    let vcheck = ModuleContext::v_check(LieAlgebraSpec::sl2(), p.clone(), s(1)).unwrap();
    let mhat = ModuleContext::build_mhat(LieAlgebraSpec::sl2(), p, s(1)).unwrap();
    let window = ModeWindow::new(-3, 4);
    assert_all_pass(
        "criterion 5 (vcheck)",
        &locality_criterion_battery(&vcheck, SEED, 6, window),
    );
    assert_all_pass(
        "criterion 5 (mhat)",
        &locality_criterion_battery(&mhat, SEED, 6, window),
    );
    finish("criterion 5: locality matrix", start, 60);
}

#[test]
fn criterion_06_lpoly_reproduction() {
    let start = Instant::now();
    for (beta, blabel) in betas() {
        for ell in [s(1), s(3)] {
            let p = AlgebraContext::elliptic_p(&beta);
            let mhat = ModuleContext::build_mhat(LieAlgebraSpec::sl2(), p, ell.clone()).unwrap();
            assert_all_pass(
                &format!("criterion 6 (beta={blabel}, level={ell})"),
                &lpoly_battery(&mhat, SEED, ModeWindow::new(-6, 6)),
            );
        }
    }
    finish("criterion 6: lemma-lpoly reproduction", start, 5);
}

#[test]
fn criterion_07_nogo_obstruction() {
    let start = Instant::now();
    for (beta, blabel) in betas() {
        for ell in [s(0), s(1)] {
            let p = AlgebraContext::elliptic_p(&beta);
            let mhat = ModuleContext::build_mhat(LieAlgebraSpec::sl2(), p, ell.clone()).unwrap();
            assert_all_pass(
                &format!("criterion 7 (beta={blabel}, level={ell})"),
                &nogo_battery(&mhat, ModeWindow::new(-8, 8)),
            );
        }
    }
    finish("criterion 7: no-go obstruction", start, 5);
}

#[test]
fn criterion_08_vertex_axioms() {
    let start = Instant::now();
    let p = AlgebraContext::elliptic_p(&s(0));
    let vcheck = ModuleContext::v_check(LieAlgebraSpec::sl2(), p.clone(), s(1)).unwrap();
    let mhat = ModuleContext::build_mhat(LieAlgebraSpec::sl2(), p, s(1)).unwrap();
    // window: 9 x-modes, z-coefficients certified to depth 16 (>= 8x8)
    let window = ModeWindow::new(-4, 4);
    assert_all_pass(
        "criterion 8 (vertex C((z)) axiom)",
        &[czz_axiom_battery(&vcheck, 100, SEED, 16, window)],
    );
    assert_all_pass(
        "criterion 8 (type-zero axiom)",
        &[type_zero_battery(&vcheck, &mhat, 100, SEED, 16, window)],
    );
    finish("criterion 8: vertex-algebra axioms", start, 120);
}

#[test]
fn criterion_09_heisenberg_chain() {
    let start = Instant::now();
    for f_text in ["1", "1+z"] {
        let f = vertexforge::parse::parse_series(f_text).unwrap();
        let fock = ModuleContext::fock_hf(f.clone(), s(1)).unwrap();
        let vf = ModuleContext::v_f(s(1), f.clone());
        assert_all_pass(
            &format!("criterion 9 (fock module law, f={f_text})"),
            &[fock_kl_module_law_battery(&fock, 200, SEED)],
        );
        assert_all_pass(
            &format!("criterion 9 (type-zero, f={f_text})"),
            &[type_zero_battery(&vf, &fock, 100, SEED, 16, ModeWindow::new(-4, 4))],
        );
        assert_all_pass(
            &format!("criterion 9 (specialization, f={f_text})"),
            &[kl_specialization_battery(&f, &s(1), 6)],
        );
    }
    finish("criterion 9: heisenberg chain", start, 60);
}

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    for suite in vertexforge::suites::SUITE_NAMES {
        let cfg = SuiteConfig {
            suite: suite.to_string(),
            trials: 40,
            ..SuiteConfig::default()
        };
        let first = run_suite(&cfg).unwrap();
        let second = run_suite(&cfg).unwrap();
        assert_eq!(
            first.to_text(),
            second.to_text(),
            "criterion 10: text report for '{suite}' not byte-identical"
        );
        assert_eq!(
            first.to_json(),
            second.to_json(),
            "criterion 10: json report for '{suite}' not byte-identical"
        );
    }
    finish("criterion 10: determinism", start, 60);
}

/// The module contexts are shared read-only across threads by the
/// parallel batteries; this pins the Send+Sync contract.
#[test]
fn contexts_are_shareable() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Arc<ModuleContext>>();
    assert_send_sync::<AlgebraContext>();
    assert_send_sync::<CurrentElement>();
    assert_send_sync::<GenMode>();
    assert_send_sync::<Sector>();
}
