//! Named verification suites, one per structural statement the library
//! implements, plus deterministic table dumps for golden files.

pub mod batteries;
pub mod randgen;

use crate::current::AlgebraContext;
use crate::error::{VfError, VfResult};
use crate::lie::LieAlgebraSpec;
use crate::parse::{parse_scalar, parse_series};
use crate::report::{CheckResult, ConfigEcho, Report};
use crate::scalar::Scalar;
use crate::series::LaurentSeries;
use crate::vacuum::{ModuleContext, PbwVector};
use crate::vertex::ModeWindow;
use batteries::*;
use std::sync::Arc;
use std::time::Instant;

/// Raw suite configuration: literals as the user supplied them. The
/// seed fully determines every randomized trial.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: String,
    pub algebra: String,
    pub beta: String,
    /// Explicit p overrides the beta-derived elliptic polynomial.
    pub p: Option<String>,
    pub level: String,
    pub f: String,
    pub trunc: i64,
    pub depth: i64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: String::new(),
            algebra: "sl2".into(),
            beta: "0".into(),
            p: None,
            level: "1".into(),
            f: "1".into(),
            trunc: 16,
            depth: 4,
            trials: 200,
            seed: 7,
        }
    }
}

/// Parsed and validated configuration.
pub struct Resolved {
    pub base: Arc<LieAlgebraSpec>,
    pub beta: Scalar,
    pub p: LaurentSeries,
    pub level: Scalar,
    pub f: LaurentSeries,
    pub trunc: i64,
    pub depth: i64,
    pub trials: u64,
    pub seed: u64,
    pub echo: ConfigEcho,
}

pub fn resolve(cfg: &SuiteConfig) -> VfResult<Resolved> {
    let base = LieAlgebraSpec::load(&cfg.algebra)?;
    let validation = base.validate();
    if !validation.all_passed() {
        return Err(VfError::Config(format!(
            "algebra '{}' fails validation:\n{validation}",
            cfg.algebra
        )));
    }
    let beta = parse_scalar(&cfg.beta)?;
    let p = match &cfg.p {
        Some(text) => parse_series(text)?,
        None => AlgebraContext::elliptic_p(&beta),
    };
    if !p.is_polynomial() {
        return Err(VfError::Config("p must be a polynomial".into()));
    }
    let level = parse_scalar(&cfg.level)?;
    let f = parse_series(&cfg.f)?;
    if cfg.trunc < 2 {
        return Err(VfError::Config("truncation depth must be at least 2".into()));
    }
    Ok(Resolved {
        base,
        beta,
        p: p.clone(),
        level,
        f,
        trunc: cfg.trunc,
        depth: cfg.depth,
        trials: cfg.trials,
        seed: cfg.seed,
        echo: ConfigEcho {
            algebra: cfg.algebra.clone(),
            beta: cfg.beta.clone(),
            p: p.display_with("z"),
            level: cfg.level.clone(),
            f: cfg.f.clone(),
            trunc: cfg.trunc,
            depth: cfg.depth,
            trials: cfg.trials,
            seed: cfg.seed,
        },
    })
}

pub const SUITE_NAMES: &[&str] = &[
    "jacobi-hatgp",
    "jacobi-checkgp",
    "ideal-kgp",
    "filtration",
    "restricted",
    "poly-module",
    "nogo",
    "vacuum-module",
    "vtalgebra",
    "tmain",
    "hf-modules",
    "heisenberg",
];

/// Run a named suite and assemble its deterministic report.
pub fn run_suite(cfg: &SuiteConfig) -> VfResult<Report> {
    let resolved = resolve(cfg)?;
    let start = Instant::now();
    let checks = match cfg.suite.as_str() {
        "jacobi-hatgp" => suite_jacobi_hatgp(&resolved)?,
        "jacobi-checkgp" => suite_jacobi_checkgp(&resolved)?,
        "ideal-kgp" => suite_ideal_kgp(&resolved)?,
        "filtration" => suite_filtration(&resolved)?,
        "restricted" => suite_restricted(&resolved)?,
        "poly-module" => suite_poly_module(&resolved)?,
        "nogo" => suite_nogo(&resolved)?,
        "vacuum-module" => suite_vacuum_module(&resolved)?,
        "vtalgebra" => suite_vtalgebra(&resolved)?,
        "tmain" => suite_tmain(&resolved)?,
        "hf-modules" => suite_hf_modules(&resolved)?,
        "heisenberg" => suite_heisenberg(&resolved)?,
        other => {
            return Err(VfError::Config(format!(
                "unknown suite '{other}'; available: {}",
                SUITE_NAMES.join(", ")
            )))
        }
    };
    Ok(Report {
        suite: cfg.suite.clone(),
        config: resolved.echo,
        checks,
        wall_ms: start.elapsed().as_millis(),
    })
}

fn suite_jacobi_hatgp(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let ctx = AlgebraContext::hat_gp(r.base.clone(), r.p.clone())?;
    let mut checks = base_random_battery(&r.base, r.trials.min(100), r.seed);
    checks.extend(lie_axiom_battery(&ctx, r.trials, r.seed, r.trunc));
    Ok(checks)
}

fn suite_jacobi_checkgp(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let ctx = AlgebraContext::check_gp(r.base.clone(), r.p.clone())?;
    let mut checks = lie_axiom_battery(&ctx, r.trials, r.seed, r.trunc);
    checks.push(derivation_battery(&ctx, r.trials, r.seed, r.trunc));
    Ok(checks)
}

fn suite_ideal_kgp(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let ctx = AlgebraContext::kgp(r.base.clone(), r.p.clone());
    Ok(kgp_ideal_battery(&ctx, r.trials, r.seed, r.trunc))
}

fn suite_filtration(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let ctx = AlgebraContext::check_gp(r.base.clone(), r.p.clone())?;
    Ok(vec![filtration_battery(&ctx, r.trials, r.seed, r.trunc)])
}

fn suite_restricted(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let vcheck = ModuleContext::v_check(r.base.clone(), r.p.clone(), r.level.clone())?;
    let mhat = ModuleContext::build_mhat(r.base.clone(), r.p.clone(), r.level.clone())?;
    Ok(vec![
        restricted_battery(&vcheck, r.trials.min(60), r.seed, r.depth, r.trunc),
        restricted_battery(&mhat, r.trials.min(60), r.seed + 1, r.depth, r.trunc),
    ])
}

fn suite_poly_module(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let mhat = ModuleContext::build_mhat(r.base.clone(), r.p.clone(), r.level.clone())?;
    Ok(lpoly_battery(&mhat, r.seed, ModeWindow::new(-6, 6)))
}

fn suite_nogo(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let mhat = ModuleContext::build_mhat(r.base.clone(), r.p.clone(), r.level.clone())?;
    Ok(nogo_battery(&mhat, ModeWindow::new(-8, 8)))
}

fn suite_vacuum_module(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let vcheck = ModuleContext::v_check(r.base.clone(), r.p.clone(), r.level.clone())?;
    let mhat = ModuleContext::build_mhat(r.base.clone(), r.p.clone(), r.level.clone())?;
    let mut checks = Vec::new();
    // vacuum annihilation on the cyclic vector
    let mut annih = CheckResult::pass("annihilation");
    'outer: for (label, sector, base) in module_generators(&vcheck) {
        for n in 0..=(r.p.terms().map(|(e, _)| e).max().unwrap_or(0) + 2) {
            let v = crate::vacuum::apply_mode(
                &vcheck,
                crate::current::GenMode::new(sector, base, n),
                &PbwVector::one(),
            )?;
            if !v.is_zero_exact() {
                annih = CheckResult::fail(
                    "annihilation",
                    format!("{label}({n}) does not annihilate the cyclic vector: {v}"),
                );
                break 'outer;
            }
        }
    }
    checks.push(annih);
    checks.extend(d_operator_battery(&vcheck, r.trials.min(80), r.seed, r.depth, r.trunc));
    checks.push(universality_battery(&vcheck, r.depth.min(3)));
    checks.push(pbw_route_battery(&vcheck, r.trials.min(80), r.seed));
    checks.push(homomorphism_battery(
        &vcheck,
        &mhat,
        r.trials.min(40),
        r.seed,
        ModeWindow::new(-3, 3),
    ));
    Ok(checks)
}

fn suite_vtalgebra(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let vcheck = ModuleContext::v_check(r.base.clone(), r.p.clone(), r.level.clone())?;
    let ctx = AlgebraContext::check_gp(r.base.clone(), r.p.clone())?;
    let mut checks = vec![oracle_battery(&ctx, 6)];
    checks.extend(y_vacuum_battery(&vcheck, r.seed, r.trunc));
    checks.push(module_law_battery(&vcheck, r.trials, r.seed, r.depth, r.trunc));
    checks.push(czz_axiom_battery(
        &vcheck,
        r.trials.min(100),
        r.seed,
        r.trunc,
        ModeWindow::new(-4, 4),
    ));
    checks.push(skew_symmetry_battery(&vcheck, ModeWindow::new(-3, 3)));
    checks.push(nth_product_commutator_battery(
        &vcheck,
        r.seed,
        ModeWindow::new(-3, 3),
        2,
    ));
    checks.push(closure_locality_battery(
        &vcheck,
        r.seed,
        6,
        ModeWindow::new(-2, 3),
    ));
    Ok(checks)
}

fn suite_tmain(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let vcheck = ModuleContext::v_check(r.base.clone(), r.p.clone(), r.level.clone())?;
    let mhat = ModuleContext::build_mhat(r.base.clone(), r.p.clone(), r.level.clone())?;
    let ctx = AlgebraContext::hat_gp(r.base.clone(), r.p.clone())?;
    let mut checks = vec![oracle_battery(&ctx, 6)];
    checks.push(module_law_battery(&mhat, r.trials, r.seed, r.depth, r.trunc));
    checks.push(type_zero_battery(
        &vcheck,
        &mhat,
        r.trials.min(100),
        r.seed,
        r.trunc,
        ModeWindow::new(-4, 4),
    ));
    checks.push(commutator_transfer_battery(
        &vcheck,
        &mhat,
        r.seed,
        ModeWindow::new(-2, 3),
        2,
    ));
    Ok(checks)
}

fn suite_hf_modules(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let fock = ModuleContext::fock_hf(r.f.clone(), r.level.clone())?;
    let hf_ctx = AlgebraContext::heisenberg(r.f.clone());
    let kl_ctx = AlgebraContext::k_ell(r.level.clone());
    let mut checks = vec![
        oracle_battery_hf(&hf_ctx, 6),
        oracle_battery_kl(&kl_ctx, 6),
        kl_specialization_battery(&r.f, &r.level, 6),
        derivation_battery(&kl_ctx, r.trials, r.seed, r.trunc),
        fock_kl_module_law_battery(&fock, r.trials, r.seed),
        restricted_battery(&fock, r.trials.min(60), r.seed, r.depth, r.trunc),
    ];
    checks.push(module_law_battery(&fock, r.trials, r.seed, r.depth, r.trunc));
    Ok(checks)
}

fn suite_heisenberg(r: &Resolved) -> VfResult<Vec<CheckResult>> {
    let vf = ModuleContext::v_f(r.level.clone(), r.f.clone());
    let vkl = ModuleContext::v_kl(r.level.clone());
    let fock = ModuleContext::fock_hf(r.f.clone(), r.level.clone())?;
    Ok(vec![
        module_law_battery(&vkl, r.trials, r.seed, r.depth, r.trunc),
        module_law_battery(&vf, r.trials, r.seed, r.depth, r.trunc),
        pbw_route_battery(&vkl, r.trials.min(80), r.seed),
        ctilde_field_battery(&vf, &fock, r.seed, ModeWindow::new(-4, 4)),
        type_zero_battery(
            &vf,
            &fock,
            r.trials.min(100),
            r.seed,
            r.trunc,
            ModeWindow::new(-4, 4),
        ),
    ])
}

// ---------------------------------------------------------------------
// Table dumps
// ---------------------------------------------------------------------

pub const TABLE_NAMES: &[&str] = &["bracket-table", "pbw-basis", "locality-matrix"];

/// Deterministic, golden-file-friendly table rendering.
pub fn table_dump(what: &str, cfg: &SuiteConfig, json: bool) -> VfResult<String> {
    let r = resolve(cfg)?;
    match what {
        "bracket-table" => dump_bracket_table(&r, json),
        "pbw-basis" => dump_pbw_basis(&r, json),
        "locality-matrix" => dump_locality_matrix(&r, json),
        other => Err(VfError::Config(format!(
            "unknown table '{other}'; available: {}",
            TABLE_NAMES.join(", ")
        ))),
    }
}

fn dump_bracket_table(r: &Resolved, json: bool) -> VfResult<String> {
    use crate::current::{bracket_modes, GenMode, Sector};
    let ctx = AlgebraContext::hat_gp(r.base.clone(), r.p.clone())?;
    let mut gens = Vec::new();
    for sector in [Sector::Plain, Sector::Copied] {
        for (i, name) in r.base.basis_names().iter().enumerate() {
            gens.push((format!("{}{}", name, sector.suffix()), sector, i));
        }
    }
    let mut rows = Vec::new();
    for (la, sa, ba) in &gens {
        for (lb, sb, bb) in &gens {
            for m in -2..=2i64 {
                for n in -2..=2i64 {
                    let result =
                        bracket_modes(&ctx, GenMode::new(*sa, *ba, m), GenMode::new(*sb, *bb, n))?;
                    rows.push((
                        format!("{la}({m})"),
                        format!("{lb}({n})"),
                        result.display_with(&ctx),
                    ));
                }
            }
        }
    }
    if json {
        let items: Vec<serde_json::Value> = rows
            .iter()
            .map(|(a, b, c)| serde_json::json!({"left": a, "right": b, "bracket": c}))
            .collect();
        Ok(serde_json::to_string_pretty(&items).unwrap())
    } else {
        let mut out = String::new();
        for (a, b, c) in rows {
            out.push_str(&format!("[{a}, {b}] = {c}\n"));
        }
        Ok(out)
    }
}

fn dump_pbw_basis(r: &Resolved, json: bool) -> VfResult<String> {
    let vcheck = ModuleContext::v_check(r.base.clone(), r.p.clone(), r.level.clone())?;
    let mut names: Vec<String> = crate::vacuum::enumerate_monomials(&vcheck, r.depth)
        .into_iter()
        .map(|m| m.display_with(&vcheck))
        .collect();
    names.sort();
    if json {
        Ok(serde_json::to_string_pretty(&names).unwrap())
    } else {
        let mut out = String::new();
        for n in names {
            out.push_str(&n);
            out.push('\n');
        }
        Ok(out)
    }
}

fn dump_locality_matrix(r: &Resolved, json: bool) -> VfResult<String> {
    let vcheck = ModuleContext::v_check(r.base.clone(), r.p.clone(), r.level.clone())?;
    let probes = randgen::spec_default_probes(&vcheck, r.seed);
    let matrix = locality_matrix(&vcheck, &probes, 6, ModeWindow::new(-3, 4))?;
    if json {
        let items: Vec<serde_json::Value> = matrix
            .iter()
            .map(|(a, b, k)| serde_json::json!({"a": a, "b": b, "order": k}))
            .collect();
        Ok(serde_json::to_string_pretty(&items).unwrap())
    } else {
        let mut out = String::new();
        for (a, b, k) in matrix {
            out.push_str(&format!("{a:<4} {b:<4} {k}\n"));
        }
        Ok(out)
    }
}
