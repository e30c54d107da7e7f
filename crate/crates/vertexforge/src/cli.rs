//! Command-line front end: context construction, one-shot calculus
//! commands, the verification suites, and golden-table dumps.
//!
//! Exit codes: 0 all checks pass, 1 any check fails, 2 malformed
//! configuration. The env var `VERTEXFORGE_TRUNC` overrides the default
//! truncation depth.

use crate::current::{
    bracket_elements, filtration_degree, reduce_mod_dr, AlgebraContext, AlgebraKind,
    CurrentElement, GenMode, Sector,
};
use crate::error::{VfError, VfResult};
use crate::lie::LieAlgebraSpec;
use crate::parse::{parse_generator, parse_series, parse_vector, GeneratorDescriptor};
use crate::report::CheckStatus;
use crate::suites::batteries::{locality_order_cached, module_generators};
use crate::suites::randgen::default_probes;
use crate::suites::{resolve, run_suite, table_dump, SuiteConfig, SUITE_NAMES};
use crate::vacuum::{apply_element, apply_mode, ModuleContext, PbwVector};
use crate::vertex::{y_series, ModeWindow, OperatorSeries, YRule};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "vertexforge",
    about = "Exact calculus for elliptic current algebras, their vacuum modules, and vertex structure",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Built-in algebra name (sl2, abelian1) or a JSON spec file.
    #[arg(long, global = true, default_value = "sl2")]
    algebra: String,
    /// The elliptic parameter; p defaults to z^3 - 2*beta*z^2 + z.
    #[arg(long, global = true, default_value = "0")]
    beta: String,
    /// Explicit polynomial p, overriding beta.
    #[arg(long, global = true)]
    p: Option<String>,
    /// Level: the scalar the central element acts by.
    #[arg(long, global = true, default_value = "1")]
    level: String,
    /// Defining series f for the Heisenberg-type algebras.
    #[arg(long, global = true, default_value = "1")]
    f: String,
    /// Truncation depth for user-supplied non-polynomial series.
    #[arg(long, global = true)]
    trunc: Option<i64>,
    /// Probe depth for module-level checks.
    #[arg(long, global = true, default_value_t = 4)]
    depth: i64,
    /// Number of randomized trials per check.
    #[arg(long, global = true, default_value_t = 200)]
    trials: u64,
    /// Seed determining every randomized trial.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true, default_value_t = false)]
    json: bool,
}

impl CommonOpts {
    fn trunc(&self) -> i64 {
        self.trunc
            .or_else(|| {
                std::env::var("VERTEXFORGE_TRUNC")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(16)
    }

    fn suite_config(&self, suite: &str) -> SuiteConfig {
        SuiteConfig {
            suite: suite.to_string(),
            algebra: self.algebra.clone(),
            beta: self.beta.clone(),
            p: self.p.clone(),
            level: self.level.clone(),
            f: self.f.clone(),
            trunc: self.trunc(),
            depth: self.depth,
            trials: self.trials,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a Lie algebra spec: antisymmetry, Jacobi, form axioms.
    CheckLie {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Bracket two generators, e.g. `bracket e@1 f@-1` or `bracket e^1@0 f^1@-1`.
    Bracket {
        /// Generator descriptors like e@-1 or e^1@2 (or beta@1 / ctilde@0).
        left: String,
        right: String,
        /// Algebra flavor: hat (default), check, kgp, hf, kl.
        #[arg(long, default_value = "hat")]
        flavor: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Reduce a K(g,p) central element modulo dR: `reduce-dr "z^-1" -1 ...`
    /// takes (series, mode) pairs.
    ReduceDr {
        /// Alternating series literals and t-modes.
        #[arg(num_args = 2.., allow_hyphen_values = true, value_names = ["SERIES MODE"])]
        parts: Vec<String>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Build and apply vacuum modules.
    Vacuum {
        #[command(subcommand)]
        action: VacuumAction,
    },
    /// Locality order of two generator series on a module.
    Locality {
        /// Generator names like e, f^1, beta.
        a: String,
        b: String,
        #[arg(long, default_value = "vcheck")]
        module: String,
        #[arg(long, default_value_t = 6)]
        k_max: i64,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        xmin: i64,
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        xmax: i64,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// n-th product of two generator series, expanded against a vector.
    NthProduct {
        a: String,
        b: String,
        #[arg(allow_hyphen_values = true)]
        n: i64,
        /// Target vector descriptor (default: the cyclic vector).
        #[arg(long, default_value = "1")]
        to: String,
        #[arg(long, default_value = "mhat")]
        module: String,
        #[arg(long, default_value_t = -6, allow_hyphen_values = true)]
        xmin: i64,
        #[arg(long, default_value_t = 6, allow_hyphen_values = true)]
        xmax: i64,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Apply the state-field map: expand Y(v, x) w over a mode window.
    YApply {
        /// The vertex-algebra vector v.
        #[arg(long)]
        v: String,
        /// The target vector w.
        #[arg(long, default_value = "1")]
        w: String,
        #[arg(long, default_value = "vcheck")]
        module: String,
        /// Type-zero substitution rule instead of the shift rule.
        #[arg(long, default_value_t = false)]
        type_zero: bool,
        #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
        xmin: i64,
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        xmax: i64,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a named verification suite (or `all`).
    Verify {
        /// Suite name; see --list.
        suite: String,
        #[arg(long, default_value_t = false)]
        list: bool,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Dump a deterministic table: bracket-table, pbw-basis, locality-matrix.
    Dump {
        table: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Subcommand)]
enum VacuumAction {
    /// Construct a module context and print its summary.
    Build {
        #[arg(long, default_value = "vcheck")]
        module: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Apply a mode operator to a vector: `vacuum apply --op e^1@1 --to "f^1@-1*1"`.
    Apply {
        #[arg(long)]
        op: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value = "vcheck")]
        module: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

/// Entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with its own exit codes
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(VfError::Config(msg)) | Err(VfError::Parse(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> VfResult<i32> {
    match cli.command {
        Command::CheckLie { opts } => {
            let base = LieAlgebraSpec::load(&opts.algebra)?;
            let report = base.validate();
            if opts.json {
                let items: Vec<serde_json::Value> = report
                    .checks
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "axiom": c.axiom,
                            "status": if c.passed { "pass" } else { "fail" },
                            "witness": c.witness,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&items).unwrap());
            } else {
                print!("{report}");
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Bracket {
            left,
            right,
            flavor,
            opts,
        } => cmd_bracket(&left, &right, &flavor, &opts),
        Command::ReduceDr { parts, opts } => cmd_reduce_dr(&parts, &opts),
        Command::Vacuum { action } => match action {
            VacuumAction::Build { module, opts } => cmd_vacuum_build(&module, &opts),
            VacuumAction::Apply { op, to, module, opts } => cmd_vacuum_apply(&op, &to, &module, &opts),
        },
        Command::Locality {
            a,
            b,
            module,
            k_max,
            xmin,
            xmax,
            opts,
        } => cmd_locality(&a, &b, &module, k_max, xmin, xmax, &opts),
        Command::NthProduct {
            a,
            b,
            n,
            to,
            module,
            xmin,
            xmax,
            opts,
        } => cmd_nth_product(&a, &b, n, &to, &module, xmin, xmax, &opts),
        Command::YApply {
            v,
            w,
            module,
            type_zero,
            xmin,
            xmax,
            opts,
        } => cmd_y_apply(&v, &w, &module, type_zero, xmin, xmax, &opts),
        Command::Verify { suite, list, opts } => {
            if list || suite == "list" {
                for s in SUITE_NAMES {
                    println!("{s}");
                }
                return Ok(0);
            }
            let suites: Vec<&str> = if suite == "all" {
                SUITE_NAMES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut exit = 0;
            for s in suites {
                let report = run_suite(&opts.suite_config(s))?;
                if opts.json {
                    println!("{}", report.to_json());
                } else {
                    print!("{}", report.to_text());
                }
                eprintln!("# {} finished in {} ms", s, report.wall_ms);
                if report.worst() == CheckStatus::Fail {
                    exit = 1;
                }
            }
            Ok(exit)
        }
        Command::Dump { table, opts } => {
            let text = table_dump(&table, &opts.suite_config("dump"), opts.json)?;
            print!("{text}");
            Ok(0)
        }
    }
}

fn algebra_context(flavor: &str, opts: &CommonOpts) -> VfResult<AlgebraContext> {
    let r = resolve(&opts.suite_config("cli"))?;
    match flavor {
        "hat" => AlgebraContext::hat_gp(r.base, r.p),
        "check" => AlgebraContext::check_gp(r.base, r.p),
        "kgp" => Ok(AlgebraContext::kgp(r.base, r.p)),
        "hf" => Ok(AlgebraContext::heisenberg(r.f)),
        "kl" => Ok(AlgebraContext::k_ell(r.level)),
        other => Err(VfError::Config(format!(
            "unknown flavor '{other}' (hat, check, kgp, hf, kl)"
        ))),
    }
}

fn gen_mode_from_descriptor(
    ctx: &AlgebraContext,
    desc: &GeneratorDescriptor,
) -> VfResult<GenMode> {
    let sector = match (ctx.kind(), desc.name.as_str(), desc.copied) {
        (AlgebraKind::Hf, "beta", false) | (AlgebraKind::Kl, "beta", false) => Sector::Beta,
        (AlgebraKind::Kl, "ctilde", false) => Sector::CTilde,
        (AlgebraKind::Hf | AlgebraKind::Kl, name, _) => {
            return Err(VfError::Parse(format!(
                "generator '{name}' does not exist in this algebra"
            )))
        }
        (_, _, true) => Sector::Copied,
        (_, _, false) => Sector::Plain,
    };
    let base = match sector {
        Sector::Beta | Sector::CTilde => 0,
        _ => ctx.base().basis_index(&desc.name)?,
    };
    Ok(GenMode::new(sector, base, desc.mode))
}

fn cmd_bracket(left: &str, right: &str, flavor: &str, opts: &CommonOpts) -> VfResult<i32> {
    let ctx = algebra_context(flavor, opts)?;
    let l = parse_generator(left)?;
    let r = parse_generator(right)?;
    let gl = gen_mode_from_descriptor(&ctx, &l)?;
    let gr = gen_mode_from_descriptor(&ctx, &r)?;
    let x = CurrentElement::generator(ctx.kind(), gl);
    let y = CurrentElement::generator(ctx.kind(), gr);
    let result = bracket_elements(&ctx, &x, &y)?;
    if opts.json {
        let terms: Vec<serde_json::Value> = result
            .terms()
            .map(|(g, c)| {
                serde_json::json!({
                    "sector": format!("{:?}", g.sector),
                    "base": g.base,
                    "mode": g.mode,
                    "coeff": c.display_with("z"),
                })
            })
            .collect();
        let payload = serde_json::json!({
            "bracket": result.display_with(&ctx),
            "terms": terms,
            "central": result.central_part().display_with("z"),
        });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        println!("{}", result.display_with(&ctx));
        if ctx.kind() == AlgebraKind::CheckGp {
            if let Some(deg) = filtration_degree(&result)? {
                println!("filtration degree: {deg}");
            }
        }
    }
    Ok(0)
}

fn cmd_reduce_dr(parts: &[String], opts: &CommonOpts) -> VfResult<i32> {
    if parts.is_empty() || !parts.len().is_multiple_of(2) {
        return Err(VfError::Config(
            "reduce-dr takes alternating series literals and integer modes".into(),
        ));
    }
    let trunc = opts.trunc();
    let mut central: BTreeMap<i64, crate::series::LaurentSeries> = BTreeMap::new();
    for chunk in parts.chunks(2) {
        let series = parse_series(&chunk[0])?;
        let series = if series.is_polynomial() {
            series
        } else {
            let val = series.val().unwrap_or(0);
            series.truncated(val + trunc)
        };
        let mode: i64 = chunk[1]
            .parse()
            .map_err(|_| VfError::Parse(format!("bad mode '{}'", chunk[1])))?;
        let entry = central.entry(mode).or_insert_with(crate::series::LaurentSeries::zero);
        *entry = entry.add(&series);
    }
    let record = reduce_mod_dr(&central)?;
    if opts.json {
        let entries: Vec<serde_json::Value> = record
            .entries()
            .map(|((s, site), v)| {
                serde_json::json!({"weight": s, "site": site.to_string(), "value": v.to_string()})
            })
            .collect();
        let payload = serde_json::json!({
            "obstruction": entries,
            "certified_below": record.certified_below(),
            "in_dr": record.known_zero(),
        });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        println!("{record}");
    }
    Ok(0)
}

fn module_context(module: &str, opts: &CommonOpts) -> VfResult<Arc<ModuleContext>> {
    let r = resolve(&opts.suite_config("cli"))?;
    match module {
        "vcheck" => ModuleContext::v_check(r.base, r.p, r.level),
        "mhat" => ModuleContext::build_mhat(r.base, r.p, r.level),
        "vkl" => Ok(ModuleContext::v_kl(r.level)),
        "vf" => Ok(ModuleContext::v_f(r.level, r.f)),
        "fockhf" => ModuleContext::fock_hf(r.f, r.level),
        other => Err(VfError::Config(format!(
            "unknown module '{other}' (vcheck, mhat, vkl, vf, fockhf)"
        ))),
    }
}

fn vector_from_descriptor(ctx: &Arc<ModuleContext>, text: &str) -> VfResult<PbwVector> {
    let terms = parse_vector(text)?;
    let mut out = PbwVector::zero();
    for term in terms {
        let mut v = PbwVector::monomial(crate::vacuum::PbwMonomial::unit(), term.coeff.clone());
        for desc in term.word.iter().rev() {
            let g = module_gen_from_descriptor(ctx, desc)?;
            v = apply_mode(ctx, g, &v)?;
        }
        out = out.add(&v);
    }
    Ok(out)
}

fn module_gen_from_descriptor(
    ctx: &Arc<ModuleContext>,
    desc: &GeneratorDescriptor,
) -> VfResult<GenMode> {
    use crate::vacuum::ModuleKind;
    match ctx.kind() {
        ModuleKind::VKl | ModuleKind::Vf | ModuleKind::FockHf => match desc.name.as_str() {
            "beta" => Ok(GenMode::new(Sector::Beta, 0, desc.mode)),
            "ctilde" => Ok(GenMode::new(Sector::CTilde, 0, desc.mode)),
            other => Err(VfError::Parse(format!(
                "generator '{other}' does not act on this module"
            ))),
        },
        _ => {
            let sector = if desc.copied { Sector::Copied } else { Sector::Plain };
            let base = ctx.algebra().base().basis_index(&desc.name)?;
            Ok(GenMode::new(sector, base, desc.mode))
        }
    }
}

fn series_from_gen_name(ctx: &Arc<ModuleContext>, name: &str) -> VfResult<OperatorSeries> {
    // accept e, f^1, beta, ctilde
    let desc = if let Some(stripped) = name.strip_suffix("^1") {
        GeneratorDescriptor {
            name: stripped.to_string(),
            copied: true,
            mode: 0,
        }
    } else {
        GeneratorDescriptor {
            name: name.to_string(),
            copied: false,
            mode: 0,
        }
    };
    let g = module_gen_from_descriptor(ctx, &desc)?;
    Ok(OperatorSeries::generator(ctx.clone(), g.sector, g.base))
}

fn cmd_vacuum_build(module: &str, opts: &CommonOpts) -> VfResult<i32> {
    let ctx = module_context(module, opts)?;
    let basis = crate::vacuum::enumerate_monomials(&ctx, opts.depth.min(3));
    if opts.json {
        let names: Vec<String> = basis.iter().map(|m| m.display_with(&ctx)).collect();
        let payload = serde_json::json!({
            "module": ctx.kind().name(),
            "level": ctx.level().to_string(),
            "generators": module_generators(&ctx)
                .iter()
                .map(|(n, _, _)| n.clone())
                .collect::<Vec<_>>(),
            "basis_to_depth": opts.depth.min(3),
            "basis": names,
        });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        println!("module: {}", ctx.kind().name());
        println!("level: {}", ctx.level());
        let gens: Vec<String> = module_generators(&ctx).iter().map(|(n, _, _)| n.clone()).collect();
        println!("generators: {}", gens.join(", "));
        println!("basis monomials to depth {}: {}", opts.depth.min(3), basis.len());
    }
    Ok(0)
}

fn cmd_vacuum_apply(op: &str, to: &str, module: &str, opts: &CommonOpts) -> VfResult<i32> {
    let ctx = module_context(module, opts)?;
    let target = vector_from_descriptor(&ctx, to)?;
    let result = if op == "D" {
        crate::vacuum::apply_d(&ctx, &target)?
    } else if op == "k" {
        apply_element(
            &ctx,
            &CurrentElement::central(ctx.algebra().kind(), crate::series::LaurentSeries::one()),
            &target,
        )?
    } else {
        let desc = parse_generator(op)?;
        let g = module_gen_from_descriptor(&ctx, &desc)?;
        apply_mode(&ctx, g, &target)?
    };
    if opts.json {
        let terms: Vec<serde_json::Value> = result
            .terms()
            .map(|(m, c)| {
                serde_json::json!({
                    "monomial": m.display_with(&ctx),
                    "coeff": c.display_with("z"),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&terms).unwrap());
    } else {
        println!("{}", result.display_with(&ctx));
    }
    Ok(0)
}

fn cmd_locality(
    a: &str,
    b: &str,
    module: &str,
    k_max: i64,
    xmin: i64,
    xmax: i64,
    opts: &CommonOpts,
) -> VfResult<i32> {
    let ctx = module_context(module, opts)?;
    let sa = series_from_gen_name(&ctx, a)?;
    let sb = series_from_gen_name(&ctx, b)?;
    let probes = default_probes(&ctx, opts.seed, opts.depth.min(4), 4);
    let window = ModeWindow::new(xmin, xmax);
    let (k, witness) = locality_order_cached(&sa, &sb, &probes, k_max, window)?;
    if opts.json {
        let payload = serde_json::json!({
            "a": a,
            "b": b,
            "order": k,
            "window": {"lo": xmin, "hi": xmax},
            "probes": probes.len(),
            "tightness_witness": witness.map(|w| w.description),
        });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        println!("locality order of ({a}, {b}) on {}: {k}", ctx.kind().name());
        println!("certified window: modes in [{xmin}, {xmax}], {} probes", probes.len());
        if let Some(w) = witness {
            println!("tightness: {}", w.description);
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_nth_product(
    a: &str,
    b: &str,
    n: i64,
    to: &str,
    module: &str,
    xmin: i64,
    xmax: i64,
    opts: &CommonOpts,
) -> VfResult<i32> {
    let ctx = module_context(module, opts)?;
    let sa = series_from_gen_name(&ctx, a)?;
    let sb = series_from_gen_name(&ctx, b)?;
    let product = OperatorSeries::nth_product(&sa, &sb, n);
    let target = vector_from_descriptor(&ctx, to)?;
    let expansion = product.expansion(&target, xmin, xmax)?;
    print_expansion(&ctx, &expansion.coeffs, xmin, xmax, opts.json);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_y_apply(
    v: &str,
    w: &str,
    module: &str,
    type_zero: bool,
    xmin: i64,
    xmax: i64,
    opts: &CommonOpts,
) -> VfResult<i32> {
    let ctx = module_context(module, opts)?;
    // the vector lives in the vacuum module over the same algebra family
    let vertex_ctx = match ctx.kind() {
        crate::vacuum::ModuleKind::Mhat => {
            let r = resolve(&opts.suite_config("cli"))?;
            ModuleContext::v_check(r.base, r.p, r.level)?
        }
        crate::vacuum::ModuleKind::FockHf => {
            let r = resolve(&opts.suite_config("cli"))?;
            ModuleContext::v_f(r.level, r.f)
        }
        _ => ctx.clone(),
    };
    let vec_v = vector_from_descriptor(&vertex_ctx, v)?;
    let vec_w = vector_from_descriptor(&ctx, w)?;
    let rule = if type_zero { YRule::Substituted } else { YRule::Shifted };
    let series = y_series(&ctx, &vec_v, rule)?;
    let expansion = series.expansion(&vec_w, xmin, xmax)?;
    print_expansion(&ctx, &expansion.coeffs, xmin, xmax, opts.json);
    Ok(0)
}

fn print_expansion(
    ctx: &Arc<ModuleContext>,
    coeffs: &BTreeMap<i64, PbwVector>,
    xmin: i64,
    xmax: i64,
    json: bool,
) {
    if json {
        let items: Vec<serde_json::Value> = coeffs
            .iter()
            .map(|(m, v)| {
                serde_json::json!({
                    "mode": m,
                    "x_exponent": -m - 1,
                    "value": v.display_with(ctx),
                })
            })
            .collect();
        let payload = serde_json::json!({
            "window": {"mode_lo": xmin, "mode_hi": xmax},
            "coefficients": items,
        });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        println!("modes in [{xmin}, {xmax}] (x-exponent = -mode-1):");
        if coeffs.is_empty() {
            println!("  0");
        }
        for (m, v) in coeffs {
            println!("  mode {m} (x^{}): {}", -m - 1, v.display_with(ctx));
        }
    }
}
