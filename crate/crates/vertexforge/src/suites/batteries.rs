//! The reusable check batteries behind the named suites. Each battery
//! returns one or more [`CheckResult`]s; randomized batteries shard their
//! trials over a worker pool with per-trial seeds.

use super::randgen::*;
use crate::current::oracle::{oracle_bracket_hf, oracle_bracket_kl, oracle_bracket_modes};
use crate::current::{
    bracket_elements, bracket_hf, bracket_kl, bracket_modes, derivation,
    filtration_degree, AlgebraContext, AlgebraKind, CurrentElement, GenMode, Sector,
};
use crate::error::{VfError, VfResult};
use crate::lie::LieAlgebraSpec;
use crate::report::{CheckResult, CheckStatus};
use crate::scalar::{binomial, Scalar};
use crate::series::LaurentSeries;
use crate::vacuum::{
    apply_d, apply_mode, module_law_defect, normalize, restrictedness_bound, ModuleContext,
    ModuleKind, PbwMonomial, PbwVector,
};
use crate::vertex::{
    locality_defect, series_agree, y_series, ModeWindow, OperatorSeries, Witness, YRule,
};
use rand::Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Run `trials` independent trials in parallel; the first witness (by
/// trial index) decides the verdict.
fn run_trials<F>(name: &str, trials: u64, f: F) -> CheckResult
where
    F: Fn(u64) -> VfResult<Option<String>> + Sync,
{
    let outcomes: Vec<VfResult<Option<String>>> =
        (0..trials).into_par_iter().map(&f).collect();
    summarize(name, outcomes)
}

fn summarize(name: &str, outcomes: Vec<VfResult<Option<String>>>) -> CheckResult {
    for (t, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(None) => {}
            Ok(Some(witness)) => {
                return CheckResult::fail(name, format!("trial {t}: {witness}"));
            }
            Err(VfError::Precision(msg)) => {
                return CheckResult::precision_limited(name, format!("trial {t}: {msg}"));
            }
            Err(e) => {
                return CheckResult::fail(name, format!("trial {t}: unexpected error: {e}"));
            }
        }
    }
    CheckResult::pass(name)
}

// ---------------------------------------------------------------------
// Lie-axiom batteries
// ---------------------------------------------------------------------

/// Antisymmetry and Jacobi for hat-g_p, check-g_p, H(f) or K(l), on
/// random one/two-term elements. Exact equality of all known
/// coefficients.
pub fn lie_axiom_battery(
    ctx: &AlgebraContext,
    trials: u64,
    seed: u64,
    trunc: i64,
) -> Vec<CheckResult> {
    let anti = run_trials("antisymmetry", trials, |t| {
        let mut rng = trial_rng(seed, 0xA001, t);
        let x = rand_element(&mut rng, ctx, trunc, -6, 6);
        let y = rand_element(&mut rng, ctx, trunc, -6, 6);
        let xy = bracket_elements(ctx, &x, &y)?;
        let yx = bracket_elements(ctx, &y, &x)?;
        let defect = xy.add(&yx);
        if defect.is_zero_known() {
            Ok(None)
        } else {
            Ok(Some(format!("[x,y]+[y,x] = {defect:?} for x = {x:?}, y = {y:?}")))
        }
    });
    let jacobi = run_trials("jacobi", trials, |t| {
        let mut rng = trial_rng(seed, 0xA002, t);
        let x = rand_element(&mut rng, ctx, trunc, -5, 5);
        let y = rand_element(&mut rng, ctx, trunc, -5, 5);
        let z = rand_element(&mut rng, ctx, trunc, -5, 5);
        let s1 = bracket_elements(ctx, &x, &bracket_elements(ctx, &y, &z)?)?;
        let s2 = bracket_elements(ctx, &y, &bracket_elements(ctx, &z, &x)?)?;
        let s3 = bracket_elements(ctx, &z, &bracket_elements(ctx, &x, &y)?)?;
        let defect = s1.add(&s2).add(&s3);
        if defect.is_zero_known() {
            Ok(None)
        } else {
            Ok(Some(format!("cyclic sum = {defect:?} on x = {x:?}, y = {y:?}, z = {z:?}")))
        }
    });
    vec![anti, jacobi]
}

/// Derivation law `derivation([x,y]) = [derivation(x),y] + [x,derivation(y)]`
/// for d on K(l), D-check on check-g_p.
pub fn derivation_battery(
    ctx: &AlgebraContext,
    trials: u64,
    seed: u64,
    trunc: i64,
) -> CheckResult {
    run_trials("derivation-law", trials, |t| {
        let mut rng = trial_rng(seed, 0xA003, t);
        let x = rand_element(&mut rng, ctx, trunc, -5, 5);
        let y = rand_element(&mut rng, ctx, trunc, -5, 5);
        let lhs = derivation(ctx, &bracket_elements(ctx, &x, &y)?)?;
        let rhs = bracket_elements(ctx, &derivation(ctx, &x)?, &y)?
            .add(&bracket_elements(ctx, &x, &derivation(ctx, &y)?)?);
        let defect = lhs.add(&rhs.neg());
        if defect.is_zero_known() {
            Ok(None)
        } else {
            Ok(Some(format!("derivation defect {defect:?} on x = {x:?}, y = {y:?}")))
        }
    })
}

// ---------------------------------------------------------------------
// K(g,p) ideal battery
// ---------------------------------------------------------------------

/// Prop-pbig battery: skew and Jacobi defects vanish modulo dR, the J0
/// spanning set reduces to zero, k(x)t^{-1} does not, and D is a
/// derivation modulo dR.
pub fn kgp_ideal_battery(
    ctx: &AlgebraContext,
    trials: u64,
    seed: u64,
    trunc: i64,
) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let kgp_defect_zero = |defect: &CurrentElement| -> VfResult<Option<String>> {
        if !defect.terms().all(|(_, c)| c.known_zero()) {
            return Ok(Some(format!("non-central defect {defect:?}")));
        }
        let record = defect.central_obstruction()?;
        if record.known_zero() {
            Ok(None)
        } else {
            Ok(Some(format!("nonzero dR obstruction: {record}")))
        }
    };

    out.push(run_trials("skew-mod-dr", trials, |t| {
        let mut rng = trial_rng(seed, 0xB001, t);
        let x = rand_element(&mut rng, ctx, trunc, -4, 4);
        let y = rand_element(&mut rng, ctx, trunc, -4, 4);
        let defect = bracket_elements(ctx, &x, &y)?.add(&bracket_elements(ctx, &y, &x)?);
        kgp_defect_zero(&defect)
    }));

    out.push(run_trials("jacobi-mod-dr", trials, |t| {
        let mut rng = trial_rng(seed, 0xB002, t);
        let x = rand_element(&mut rng, ctx, trunc, -3, 3);
        let y = rand_element(&mut rng, ctx, trunc, -3, 3);
        let z = rand_element(&mut rng, ctx, trunc, -3, 3);
        let s1 = bracket_elements(ctx, &x, &bracket_elements(ctx, &y, &z)?)?;
        let s2 = bracket_elements(ctx, &y, &bracket_elements(ctx, &z, &x)?)?;
        let s3 = bracket_elements(ctx, &z, &bracket_elements(ctx, &x, &y)?)?;
        kgp_defect_zero(&s1.add(&s2).add(&s3))
    }));

    out.push(run_trials("derivation-mod-dr", trials, |t| {
        let mut rng = trial_rng(seed, 0xB003, t);
        let x = rand_element(&mut rng, ctx, trunc, -4, 4);
        let y = rand_element(&mut rng, ctx, trunc, -4, 4);
        let lhs = derivation(ctx, &bracket_elements(ctx, &x, &y)?)?;
        let rhs = bracket_elements(ctx, &derivation(ctx, &x)?, &y)?
            .add(&bracket_elements(ctx, &x, &derivation(ctx, &y)?)?);
        kgp_defect_zero(&lhs.add(&rhs.neg()))
    }));

    // J0 spanning set: f'(xi) k t^n + n f(xi) k t^{n-1} reduces to zero
    out.push(run_trials("j0-members", trials.min(50), |t| {
        let mut rng = trial_rng(seed, 0xB004, t);
        let capped = rng.random_range(0..2) == 0;
        let f = rand_series(&mut rng, trunc, capped);
        let n = rand_mode(&mut rng, -4, 4);
        let mut member = CurrentElement::kgp_central(n, f.derive());
        member = member.add(&CurrentElement::kgp_central(
            n - 1,
            f.scale(&Scalar::from_integer(n)),
        ));
        let record = member.central_obstruction()?;
        if record.known_zero() {
            Ok(None)
        } else {
            Ok(Some(format!("J0 member has obstruction {record} (f = {f}, n = {n})")))
        }
    }));

    // k (x) t^{-1} must survive the quotient
    let nonmember = CurrentElement::kgp_central(-1, LaurentSeries::one());
    out.push(match nonmember.central_obstruction() {
        Ok(record) if !record.known_zero() => CheckResult::pass("known-nonmember"),
        Ok(record) => CheckResult::fail(
            "known-nonmember",
            format!("k(x)t^-1 reduced to zero: {record}"),
        ),
        Err(e) => CheckResult::fail("known-nonmember", e.to_string()),
    });

    out
}

// ---------------------------------------------------------------------
// Filtration battery (check-g_p)
// ---------------------------------------------------------------------

pub fn filtration_battery(
    ctx: &AlgebraContext,
    trials: u64,
    seed: u64,
    trunc: i64,
) -> CheckResult {
    run_trials("bracket-filtration", trials, |t| {
        let mut rng = trial_rng(seed, 0xC001, t);
        let x = rand_element(&mut rng, ctx, trunc, -5, 5);
        let y = rand_element(&mut rng, ctx, trunc, -5, 5);
        let dx = filtration_degree(&x)?;
        let dy = filtration_degree(&y)?;
        let br = bracket_elements(ctx, &x, &y)?;
        let dbr = filtration_degree(&br)?;
        match (dx, dy, dbr) {
            (Some(a), Some(b), Some(c)) if c < a + b => Ok(Some(format!(
                "deg[x,y] = {c} < {a} + {b} for x = {x:?}, y = {y:?}"
            ))),
            _ => Ok(None),
        }
    })
}

// ---------------------------------------------------------------------
// Oracle-equivalence batteries
// ---------------------------------------------------------------------

/// Closed-form bracket_modes vs the blind delta-expansion oracle on every
/// sector combination and |m|, |n| <= bound.
pub fn oracle_battery(ctx: &AlgebraContext, bound: i64) -> CheckResult {
    let name = match ctx.kind() {
        AlgebraKind::HatGp => "oracle-hatgp",
        AlgebraKind::CheckGp => "oracle-checkgp",
        _ => "oracle",
    };
    let dim = ctx.base().dim();
    let cells: Vec<(i64, i64)> = (-bound..=bound)
        .flat_map(|m| (-bound..=bound).map(move |n| (m, n)))
        .collect();
    let outcomes: Vec<VfResult<Option<String>>> = cells
        .par_iter()
        .map(|&(m, n)| {
            for sx in [Sector::Plain, Sector::Copied] {
                for sy in [Sector::Plain, Sector::Copied] {
                    for bx in 0..dim {
                        for by in 0..dim {
                            let x = GenMode::new(sx, bx, m);
                            let y = GenMode::new(sy, by, n);
                            let closed = bracket_modes(ctx, x, y)?;
                            let blind = oracle_bracket_modes(ctx, x, y)?;
                            if closed != blind {
                                return Ok(Some(format!(
                                    "closed {closed:?} != oracle {blind:?} at sectors ({sx:?},{sy:?}), bases ({bx},{by}), modes ({m},{n})"
                                )));
                            }
                        }
                    }
                }
            }
            Ok(None)
        })
        .collect();
    summarize(name, outcomes)
}

/// H(f) closed form vs oracle on |m|, |n| <= bound (exact f).
pub fn oracle_battery_hf(ctx: &AlgebraContext, bound: i64) -> CheckResult {
    let mut outcomes = Vec::new();
    for m in -bound..=bound {
        for n in -bound..=bound {
            let r = (|| -> VfResult<Option<String>> {
                let closed = bracket_hf(ctx, m, n)?;
                let blind = oracle_bracket_hf(ctx, m, n)?;
                if closed != blind {
                    return Ok(Some(format!(
                        "closed {closed:?} != oracle {blind:?} at modes ({m},{n})"
                    )));
                }
                Ok(None)
            })();
            outcomes.push(r);
        }
    }
    summarize("oracle-hf", outcomes)
}

/// K(l) closed form vs oracle on |m|, |n| <= bound.
pub fn oracle_battery_kl(ctx: &AlgebraContext, bound: i64) -> CheckResult {
    let mut outcomes = Vec::new();
    for m in -bound..=bound {
        for n in -bound..=bound {
            let r = (|| -> VfResult<Option<String>> {
                let closed = bracket_kl(ctx, Sector::Beta, m, Sector::Beta, n);
                let blind = oracle_bracket_kl(ctx, m, n)?;
                if closed != blind {
                    return Ok(Some(format!(
                        "closed {closed:?} != oracle {blind:?} at modes ({m},{n})"
                    )));
                }
                Ok(None)
            })();
            outcomes.push(r);
        }
    }
    summarize("oracle-kl", outcomes)
}

// ---------------------------------------------------------------------
// Module-law battery
// ---------------------------------------------------------------------

/// `[u(m), v(n)] w = (u(m)v(n) - v(n)u(m)) w` for random generators and
/// vectors: the single most important identity in the repo.
pub fn module_law_battery(
    ctx: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
    depth: i64,
    trunc: i64,
) -> CheckResult {
    let name = format!("module-law-{}", ctx.kind().name());
    run_trials(&name, trials, |t| {
        let mut rng = trial_rng(seed, 0xD001, t);
        let x = rand_module_gen(&mut rng, ctx, -4, 4);
        let y = rand_module_gen(&mut rng, ctx, -4, 4);
        let w = rand_vector(&mut rng, ctx, depth, trunc);
        let defect = module_law_defect(ctx, x, y, &w)?;
        if defect.is_zero_known() {
            Ok(None)
        } else {
            Ok(Some(format!(
                "module-law defect {} for x = {x:?}, y = {y:?}, w = {w}",
                defect
            )))
        }
    })
}

fn rand_module_gen(
    rng: &mut rand_chacha::ChaCha8Rng,
    ctx: &ModuleContext,
    lo: i64,
    hi: i64,
) -> GenMode {
    use rand::Rng;
    let mode = rng.random_range(lo..=hi);
    match ctx.kind() {
        ModuleKind::VKl | ModuleKind::Vf => {
            let sector = if rng.random_range(0..4) == 0 {
                Sector::CTilde
            } else {
                Sector::Beta
            };
            GenMode::new(sector, 0, mode)
        }
        ModuleKind::FockHf => GenMode::new(Sector::Beta, 0, mode),
        _ => {
            let sector = if rng.random_range(0..2) == 0 {
                Sector::Plain
            } else {
                Sector::Copied
            };
            GenMode::new(sector, rng.random_range(0..ctx.algebra().base().dim()), mode)
        }
    }
}

/// PBW route independence: a random creation word applied factor by
/// factor equals the word normalized in one pass.
pub fn pbw_route_battery(
    ctx: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
) -> CheckResult {
    run_trials("pbw-route-independence", trials, |t| {
        let mut rng = trial_rng(seed, 0xD002, t);
        let len = rand_mode(&mut rng, 1, 6);
        let mut word = Vec::new();
        for _ in 0..len {
            word.push(rand_module_gen(&mut rng, ctx, -3, -1));
        }
        let mut route_a = PbwVector::one();
        for op in word.iter().rev() {
            route_a = apply_mode(ctx, *op, &route_a)?;
        }
        let route_b = normalize(ctx, LaurentSeries::one(), word.clone())?;
        if route_a.sub(&route_b).is_zero_known() {
            Ok(None)
        } else {
            Ok(Some(format!(
                "routes disagree on word {word:?}: {route_a} vs {route_b}"
            )))
        }
    })
}

/// D-operator laws: D'1 = 0 and [D, u(n)] = -n u(n-1) on random vectors.
pub fn d_operator_battery(
    ctx: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
    depth: i64,
    trunc: i64,
) -> Vec<CheckResult> {
    let vacuum = match apply_d(ctx, &PbwVector::one()) {
        Ok(r) if r.is_zero_exact() => CheckResult::pass("d-annihilates-vacuum"),
        Ok(r) => CheckResult::fail("d-annihilates-vacuum", format!("D(1) = {r}")),
        Err(e) => CheckResult::fail("d-annihilates-vacuum", e.to_string()),
    };
    let commutator = run_trials("d-commutator", trials, |t| {
        let mut rng = trial_rng(seed, 0xD003, t);
        let g = rand_module_gen(&mut rng, ctx, -4, 4);
        let v = rand_vector(&mut rng, ctx, depth, trunc);
        let lhs = apply_d(ctx, &apply_mode(ctx, g, &v)?)?
            .sub(&apply_mode(ctx, g, &apply_d(ctx, &v)?)?);
        let rhs = apply_mode(ctx, GenMode::new(g.sector, g.base, g.mode - 1), &v)?
            .scale(&Scalar::from_integer(-g.mode));
        if lhs.sub(&rhs).is_zero_known() {
            Ok(None)
        } else {
            Ok(Some(format!(
                "[D, {g:?}] defect on {v}: {} vs {}",
                lhs, rhs
            )))
        }
    });
    vec![vacuum, commutator]
}

/// Restrictedness: the evaluated bound is honest (zero at and above N,
/// nonzero just below when N > 0).
pub fn restricted_battery(
    ctx: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
    depth: i64,
    trunc: i64,
) -> CheckResult {
    run_trials("restricted-bound", trials, |t| {
        let mut rng = trial_rng(seed, 0xD004, t);
        let g = rand_module_gen(&mut rng, ctx, -1, -1);
        let v = rand_vector(&mut rng, ctx, depth, trunc);
        let n = restrictedness_bound(ctx, g.sector, g.base, &v)?;
        for probe_mode in [n, n + 1, n + 2] {
            let r = apply_mode(ctx, GenMode::new(g.sector, g.base, probe_mode), &v)?;
            if !r.is_zero_known() {
                return Ok(Some(format!(
                    "bound {n} dishonest: mode {probe_mode} gives {r} on {v}"
                )));
            }
        }
        if n > 0 {
            let r = apply_mode(ctx, GenMode::new(g.sector, g.base, n - 1), &v)?;
            if r.is_zero_known() {
                return Ok(Some(format!("bound {n} not tight on {v}")));
            }
        }
        Ok(None)
    })
}

/// Universality hook: every basis monomial up to the depth is reachable
/// from the cyclic vector by apply_mode calls.
pub fn universality_battery(ctx: &Arc<ModuleContext>, depth: i64) -> CheckResult {
    let monos = crate::vacuum::enumerate_monomials(ctx, depth);
    for mono in monos {
        let mut v = PbwVector::one();
        for op in mono.factors().iter().rev() {
            v = match apply_mode(ctx, *op, &v) {
                Ok(r) => r,
                Err(e) => return CheckResult::fail("universality", e.to_string()),
            };
        }
        let expect = PbwVector::monomial(mono.clone(), LaurentSeries::one());
        if v != expect {
            return CheckResult::fail(
                "universality",
                format!("monomial {mono:?} not reached: got {v}"),
            );
        }
    }
    CheckResult::pass("universality")
}

// ---------------------------------------------------------------------
// Locality
// ---------------------------------------------------------------------

/// Per-probe mode cache so the locality scan reuses every mode
/// application across the (k, m, n) loops.
struct ProbeCache<'a> {
    a: &'a OperatorSeries,
    b: &'a OperatorSeries,
    v: &'a PbwVector,
    av: BTreeMap<i64, PbwVector>,
    bv: BTreeMap<i64, PbwVector>,
    ab: BTreeMap<(i64, i64), PbwVector>,
    ba: BTreeMap<(i64, i64), PbwVector>,
}

impl<'a> ProbeCache<'a> {
    fn new(a: &'a OperatorSeries, b: &'a OperatorSeries, v: &'a PbwVector) -> Self {
        ProbeCache {
            a,
            b,
            v,
            av: BTreeMap::new(),
            bv: BTreeMap::new(),
            ab: BTreeMap::new(),
            ba: BTreeMap::new(),
        }
    }

    fn a_on_v(&mut self, r: i64) -> VfResult<PbwVector> {
        if let Some(hit) = self.av.get(&r) {
            return Ok(hit.clone());
        }
        let out = self.a.mode(r, self.v)?;
        self.av.insert(r, out.clone());
        Ok(out)
    }

    fn b_on_v(&mut self, s: i64) -> VfResult<PbwVector> {
        if let Some(hit) = self.bv.get(&s) {
            return Ok(hit.clone());
        }
        let out = self.b.mode(s, self.v)?;
        self.bv.insert(s, out.clone());
        Ok(out)
    }

    /// A_r (B_s v)
    fn a_after_b(&mut self, r: i64, s: i64) -> VfResult<PbwVector> {
        if let Some(hit) = self.ab.get(&(r, s)) {
            return Ok(hit.clone());
        }
        let bv = self.b_on_v(s)?;
        let out = if bv.is_zero_exact() {
            PbwVector::zero()
        } else {
            self.a.mode(r, &bv)?
        };
        self.ab.insert((r, s), out.clone());
        Ok(out)
    }

    /// B_s (A_r v)
    fn b_after_a(&mut self, r: i64, s: i64) -> VfResult<PbwVector> {
        if let Some(hit) = self.ba.get(&(r, s)) {
            return Ok(hit.clone());
        }
        let av = self.a_on_v(r)?;
        let out = if av.is_zero_exact() {
            PbwVector::zero()
        } else {
            self.b.mode(s, &av)?
        };
        self.ba.insert((r, s), out.clone());
        Ok(out)
    }

    fn defect(&mut self, k: i64, m: i64, n: i64) -> VfResult<PbwVector> {
        let mut out = PbwVector::zero();
        for j in 0..=k {
            let coeff = binomial(k, j as u32);
            let sign = if j % 2 == 0 {
                Scalar::one()
            } else {
                Scalar::from_integer(-1)
            };
            let w = &coeff * &sign;
            let commutator = self
                .a_after_b(m + k - j, n + j)?
                .sub(&self.b_after_a(m + k - j, n + j)?);
            out = out.add(&commutator.scale(&w));
        }
        Ok(out)
    }
}

/// Locality order with mode-level caching: least k <= k_max with zero
/// weighted commutator over probes and the window; also returns the
/// witness for why k-1 fails (when k > 0).
pub fn locality_order_cached(
    a: &OperatorSeries,
    b: &OperatorSeries,
    probes: &[PbwVector],
    k_max: i64,
    window: ModeWindow,
) -> VfResult<(i64, Option<Witness>)> {
    if probes.is_empty() {
        return Err(VfError::Config("locality check needs probes".into()));
    }
    let mut caches: Vec<ProbeCache> = probes.iter().map(|v| ProbeCache::new(a, b, v)).collect();
    let mut last_witness = None;
    'order: for k in 0..=k_max {
        for (pi, cache) in caches.iter_mut().enumerate() {
            for m in window.lo..=window.hi {
                for n in window.lo..=window.hi {
                    let defect = cache.defect(k, m, n)?;
                    if !defect.is_zero_known() {
                        last_witness = Some(Witness {
                            description: format!(
                                "k={k}: [{}, {}] defect at (m,n)=({m},{n}) on probe #{pi}: {defect}",
                                a.label(),
                                b.label()
                            ),
                        });
                        continue 'order;
                    }
                }
            }
        }
        return Ok((k, last_witness));
    }
    Err(VfError::Locality(format!(
        "no locality order up to {k_max} for ({}, {})",
        a.label(),
        b.label()
    )))
}

/// All generator pairs of the module with their locality orders.
pub fn locality_matrix(
    ctx: &Arc<ModuleContext>,
    probes: &[PbwVector],
    k_max: i64,
    window: ModeWindow,
) -> VfResult<Vec<(String, String, i64)>> {
    let gens = module_generators(ctx);
    let pairs: Vec<_> = gens
        .iter()
        .flat_map(|a| gens.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let results: Vec<VfResult<(String, String, i64)>> = pairs
        .par_iter()
        .map(|((la, sa, ba), (lb, sb, bb))| {
            let a = OperatorSeries::generator(ctx.clone(), *sa, *ba);
            let b = OperatorSeries::generator(ctx.clone(), *sb, *bb);
            let (k, _) = locality_order_cached(&a, &b, probes, k_max, window)?;
            Ok((la.clone(), lb.clone(), k))
        })
        .collect();
    results.into_iter().collect()
}

/// The named generators of a module: (label, sector, base).
pub fn module_generators(ctx: &ModuleContext) -> Vec<(String, Sector, usize)> {
    match ctx.kind() {
        ModuleKind::VKl => vec![
            ("beta".into(), Sector::Beta, 0),
            ("ctilde".into(), Sector::CTilde, 0),
        ],
        ModuleKind::Vf | ModuleKind::FockHf => vec![("beta".into(), Sector::Beta, 0)],
        ModuleKind::Vcheck | ModuleKind::Mhat => {
            let base = ctx.algebra().base();
            let mut out = Vec::new();
            for sector in [Sector::Plain, Sector::Copied] {
                for (i, name) in base.basis_names().iter().enumerate() {
                    out.push((format!("{}{}", name, sector.suffix()), sector, i));
                }
            }
            out
        }
    }
}

/// Criterion: every pair has order <= 2, and pairs with nonzero form
/// pairing at nonzero level have order exactly 2.
pub fn locality_criterion_battery(
    ctx: &Arc<ModuleContext>,
    seed: u64,
    k_max: i64,
    window: ModeWindow,
) -> Vec<CheckResult> {
    let probes = spec_default_probes(ctx, seed);
    let matrix = match locality_matrix(ctx, &probes, k_max, window) {
        Ok(m) => m,
        Err(VfError::Precision(msg)) => {
            return vec![CheckResult::precision_limited("locality-matrix", msg)]
        }
        Err(e) => return vec![CheckResult::fail("locality-matrix", e.to_string())],
    };
    let mut bound_ok = CheckResult::pass_window(
        format!("locality-bound-{}", ctx.kind().name()),
        format!("modes [{}, {}]", window.lo, window.hi),
    );
    for (a, b, k) in &matrix {
        if *k > 2 {
            bound_ok = CheckResult::fail(
                format!("locality-bound-{}", ctx.kind().name()),
                format!("pair ({a}, {b}) has order {k} > 2"),
            );
            break;
        }
    }
    // tightness: <a,b> != 0 and l != 0 forces the d-delta term, so order 2
    let mut tight_ok = CheckResult::pass(format!("locality-tight-{}", ctx.kind().name()));
    if !ctx.level().is_zero() {
        let base = ctx.algebra().base();
        let gens = module_generators(ctx);
        'outer: for (la, sa, ba) in &gens {
            for (lb, sb, bb) in &gens {
                if sa != sb {
                    continue; // the mixed relation has no d-delta term
                }
                if base.form_basis(*ba, *bb).is_zero() {
                    continue;
                }
                let entry = matrix
                    .iter()
                    .find(|(x, y, _)| x == la && y == lb)
                    .map(|(_, _, k)| *k);
                if entry != Some(2) {
                    tight_ok = CheckResult::fail(
                        format!("locality-tight-{}", ctx.kind().name()),
                        format!("pair ({la}, {lb}) has order {entry:?}, expected exactly 2"),
                    );
                    break 'outer;
                }
            }
        }
    }
    vec![bound_ok, tight_ok]
}

/// Closure spot check: series derived from the generators by n-th
/// products stay mutually local with the generators, so the generated
/// subspace really is closed and local.
pub fn closure_locality_battery(
    ctx: &Arc<ModuleContext>,
    seed: u64,
    k_max: i64,
    window: ModeWindow,
) -> CheckResult {
    let gens = module_generators(ctx);
    if gens.len() < 2 {
        return CheckResult::pass("closure-locality");
    }
    let (_, sa, ba) = gens[0].clone();
    let (_, sb, bb) = gens[gens.len() - 1].clone();
    let a = OperatorSeries::generator(ctx.clone(), sa, ba);
    let b = OperatorSeries::generator(ctx.clone(), sb, bb);
    // a normal-ordered product and a commutator-type product
    let derived = [
        OperatorSeries::nth_product(&a, &b, -1),
        OperatorSeries::nth_product(&a, &b, 0),
    ];
    let mut probes: Vec<PbwVector> = crate::vacuum::enumerate_monomials(ctx, 1)
        .into_iter()
        .map(|m| PbwVector::monomial(m, LaurentSeries::one()))
        .collect();
    let mut rng = trial_rng(seed, 0xE007, 0);
    probes.push(rand_vector(&mut rng, ctx, 3, 8));
    for d in &derived {
        for (label, sector, base) in &gens {
            let g = OperatorSeries::generator(ctx.clone(), *sector, *base);
            match locality_order_cached(d, &g, &probes, k_max, window) {
                Ok((_, _)) => {}
                Err(VfError::Locality(msg)) => {
                    return CheckResult::fail(
                        "closure-locality",
                        format!("({}, {label}): {msg}", d.label()),
                    )
                }
                Err(VfError::Precision(msg)) => {
                    return CheckResult::precision_limited("closure-locality", msg)
                }
                Err(e) => return CheckResult::fail("closure-locality", e.to_string()),
            }
        }
    }
    CheckResult::pass_window(
        "closure-locality",
        format!("k <= {k_max}, modes [{}, {}]", window.lo, window.hi),
    )
}

// ---------------------------------------------------------------------
// n-th products: Lemma-lpoly and the no-go obstruction
// ---------------------------------------------------------------------

/// `e1(x)_1 f1(x) = l <e,f> p(x) 1_W` and `(p(x))_{-3} 1_W = p''(x)/2`,
/// checked as operator series on probes.
pub fn lpoly_battery(
    mhat: &Arc<ModuleContext>,
    seed: u64,
    window: ModeWindow,
) -> Vec<CheckResult> {
    let base = mhat.algebra().base();
    let e = base.basis_index("e").unwrap_or(0);
    let f = base.basis_index("f").unwrap_or(base.dim() - 1);
    let probes = default_probes(mhat, seed, 3, 3);
    let e1 = OperatorSeries::generator(mhat.clone(), Sector::Copied, e);
    let f1 = OperatorSeries::generator(mhat.clone(), Sector::Copied, f);
    let pairing = base.form_basis(e, f).clone();
    let product = OperatorSeries::nth_product(&e1, &f1, 1);
    let expected_series = mhat
        .algebra()
        .p()
        .scale(&(mhat.level() * &pairing));
    let expected = OperatorSeries::from_substituted(&expected_series);
    let first = match series_agree(&product, &expected, &probes, window) {
        Ok(None) => CheckResult::pass_window(
            "a1-product-is-ell-p",
            format!("modes [{}, {}]", window.lo, window.hi),
        ),
        Ok(Some(w)) => CheckResult::fail("a1-product-is-ell-p", w.description),
        Err(VfError::Precision(m)) => CheckResult::precision_limited("a1-product-is-ell-p", m),
        Err(e) => CheckResult::fail("a1-product-is-ell-p", e.to_string()),
    };

    let p_series = OperatorSeries::from_substituted(mhat.algebra().p());
    let id = OperatorSeries::identity();
    let prod = OperatorSeries::nth_product(&p_series, &id, -3);
    let half_second = mhat.algebra().p().derive_div_factorial(2);
    let expect = OperatorSeries::from_substituted(&half_second);
    let second = match series_agree(&prod, &expect, &probes, window) {
        Ok(None) => CheckResult::pass_window(
            "p-minus3-vacuum",
            format!("modes [{}, {}]", window.lo, window.hi),
        ),
        Ok(Some(w)) => CheckResult::fail("p-minus3-vacuum", w.description),
        Err(VfError::Precision(m)) => CheckResult::precision_limited("p-minus3-vacuum", m),
        Err(e) => CheckResult::fail("p-minus3-vacuum", e.to_string()),
    };
    vec![first, second]
}

/// The no-go obstruction: the x-derivative of the scalar series
/// `e1(x)_1 f1(x)` equals `l <e,f> p'(x)` and is nonzero exactly when the
/// level is nonzero.
pub fn nogo_battery(mhat: &Arc<ModuleContext>, window: ModeWindow) -> Vec<CheckResult> {
    let base = mhat.algebra().base();
    let e = base.basis_index("e").unwrap_or(0);
    let f = base.basis_index("f").unwrap_or(base.dim() - 1);
    let pairing = base.form_basis(e, f).clone();
    let e1 = OperatorSeries::generator(mhat.clone(), Sector::Copied, e);
    let f1 = OperatorSeries::generator(mhat.clone(), Sector::Copied, f);
    let product = OperatorSeries::nth_product(&e1, &f1, 1);
    // extract the scalar series of the product against the cyclic vector
    let mut scalar_terms = Vec::new();
    for m in window.lo..=window.hi {
        let r = match product.mode(m, &PbwVector::one()) {
            Ok(r) => r,
            Err(e) => return vec![CheckResult::fail("obstruction-iff-level", e.to_string())],
        };
        let mut coeff = Scalar::zero();
        for (mono, c) in r.terms() {
            if !mono.is_empty() {
                return vec![CheckResult::fail(
                    "obstruction-iff-level",
                    format!("product mode {m} is not scalar: {r}"),
                )];
            }
            coeff = match c.as_constant() {
                Some(k) => k,
                None => {
                    return vec![CheckResult::fail(
                        "obstruction-iff-level",
                        format!("product mode {m} has a series coefficient {c}"),
                    )]
                }
            };
        }
        if !coeff.is_zero() {
            scalar_terms.push((-m - 1, coeff));
        }
    }
    let a_of_x = LaurentSeries::from_terms(scalar_terms);
    let obstruction = a_of_x.derive();
    let expected = mhat
        .algebra()
        .p()
        .derive()
        .scale(&(mhat.level() * &pairing));
    let mut out = Vec::new();
    if obstruction != expected {
        out.push(CheckResult::fail(
            "obstruction-iff-level",
            format!("derivative {obstruction} != l<e,f>p' = {expected}"),
        ));
        return out;
    }
    let level_zero = mhat.level().is_zero();
    if level_zero == obstruction.is_zero() {
        out.push(CheckResult::pass_window(
            "obstruction-iff-level",
            format!("level = {}", mhat.level()),
        ));
    } else {
        out.push(CheckResult::fail(
            "obstruction-iff-level",
            format!(
                "level {} but obstruction {obstruction}",
                mhat.level()
            ),
        ));
    }
    out
}

/// Independent oracle for n-th products at n >= 0: the finite commutator
/// sum `(A_n B)_m = sum_{i=0}^n (-1)^i C(n,i) [A_{n-i}, B_{m+i}]`,
/// evaluated directly, must match the residue-formula implementation.
pub fn nth_product_commutator_battery(
    ctx: &Arc<ModuleContext>,
    seed: u64,
    window: ModeWindow,
    n_max: i64,
) -> CheckResult {
    let gens = module_generators(ctx);
    // a lean probe set: the cyclic vector, depth-1 monomials, two randoms
    let mut probes: Vec<PbwVector> = crate::vacuum::enumerate_monomials(ctx, 1)
        .into_iter()
        .map(|m| PbwVector::monomial(m, LaurentSeries::one()))
        .collect();
    let mut rng = trial_rng(seed, 0xE006, 0);
    for _ in 0..2 {
        probes.push(rand_vector(&mut rng, ctx, 3, 8));
    }
    let check = (|| -> VfResult<Option<String>> {
        for (la, sa, ba) in &gens {
            for (lb, sb, bb) in &gens {
                let a = OperatorSeries::generator(ctx.clone(), *sa, *ba);
                let b = OperatorSeries::generator(ctx.clone(), *sb, *bb);
                for n in 0..=n_max {
                    let product = OperatorSeries::nth_product(&a, &b, n);
                    for v in &probes {
                        for m in window.lo..=window.hi {
                            let got = product.mode(m, v)?;
                            let mut want = PbwVector::zero();
                            for i in 0..=n {
                                let coeff = binomial(n, i as u32);
                                if coeff.is_zero() {
                                    continue;
                                }
                                let sign = if i % 2 == 0 {
                                    Scalar::one()
                                } else {
                                    Scalar::from_integer(-1)
                                };
                                let bv = b.mode(m + i, v)?;
                                let ab = if bv.is_zero_exact() {
                                    PbwVector::zero()
                                } else {
                                    a.mode(n - i, &bv)?
                                };
                                let av = a.mode(n - i, v)?;
                                let ba = if av.is_zero_exact() {
                                    PbwVector::zero()
                                } else {
                                    b.mode(m + i, &av)?
                                };
                                want = want.add(&ab.sub(&ba).scale(&(&coeff * &sign)));
                            }
                            if !got.sub(&want).is_zero_known() {
                                return Ok(Some(format!(
                                    "({la})_{n}({lb}) mode {m} on probe {v}: residue {got} vs commutator sum {want}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    })();
    match check {
        Ok(None) => CheckResult::pass_window(
            "nth-product-commutator-oracle",
            format!("n in [0, {n_max}], modes [{}, {}]", window.lo, window.hi),
        ),
        Ok(Some(w)) => CheckResult::fail("nth-product-commutator-oracle", w),
        Err(VfError::Precision(m)) => {
            CheckResult::precision_limited("nth-product-commutator-oracle", m)
        }
        Err(e) => CheckResult::fail("nth-product-commutator-oracle", e.to_string()),
    }
}

// ---------------------------------------------------------------------
// Vertex-algebra axioms
// ---------------------------------------------------------------------

/// Vacuum and creation axioms for Y on the vacuum module.
pub fn y_vacuum_battery(ctx: &Arc<ModuleContext>, seed: u64, trunc: i64) -> Vec<CheckResult> {
    let mut rng = trial_rng(seed, 0xE000, 0);
    let probe = rand_vector(&mut rng, ctx, 3, trunc);
    let id_check = (|| -> VfResult<Option<String>> {
        let y1 = y_series(ctx, &PbwVector::one(), YRule::Shifted)?;
        for m in -4..=4 {
            let got = y1.mode(m, &probe)?;
            let want = if m == -1 { probe.clone() } else { PbwVector::zero() };
            if !got.sub(&want).is_zero_known() {
                return Ok(Some(format!("Y(1,x) mode {m}: {got}")));
            }
        }
        Ok(None)
    })();
    let vacuum = match id_check {
        Ok(None) => CheckResult::pass("vacuum-axiom"),
        Ok(Some(w)) => CheckResult::fail("vacuum-axiom", w),
        Err(e) => CheckResult::fail("vacuum-axiom", e.to_string()),
    };
    let creation_check = (|| -> VfResult<Option<String>> {
        for mono in crate::vacuum::enumerate_monomials(ctx, 2) {
            let v = PbwVector::monomial(mono.clone(), LaurentSeries::one());
            let y = y_series(ctx, &v, YRule::Shifted)?;
            // no poles against the vacuum, and x^0 coefficient is v
            for m in 0..=3 {
                let got = y.mode(m, &PbwVector::one())?;
                if !got.is_zero_known() {
                    return Ok(Some(format!("Y({v},x)1 has a pole at mode {m}: {got}")));
                }
            }
            let at_zero = y.mode(-1, &PbwVector::one())?;
            if !at_zero.sub(&v).is_zero_known() {
                return Ok(Some(format!("creation limit of {v} is {at_zero}")));
            }
        }
        Ok(None)
    })();
    let creation = match creation_check {
        Ok(None) => CheckResult::pass("creation"),
        Ok(Some(w)) => CheckResult::fail("creation", w),
        Err(e) => CheckResult::fail("creation", e.to_string()),
    };
    vec![vacuum, creation]
}

/// The vertex C((z))-algebra axiom: Y(f(z)u, x)(g(z)v) =
/// f(z+x) g(z) Y(u,x) v, coefficientwise over the mode window.
pub fn czz_axiom_battery(
    ctx: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
    trunc: i64,
    window: ModeWindow,
) -> CheckResult {
    let name = "vertex-czz-axiom";
    let result = run_trials(name, trials, |t| {
        let mut rng = trial_rng(seed, 0xE001, t);
        let f_capped = rng.random_range(0..3) == 0;
        let f = rand_series(&mut rng, trunc, f_capped);
        let g_capped = rng.random_range(0..3) == 0;
        let g = rand_series(&mut rng, trunc, g_capped);
        let u = PbwVector::monomial(rand_monomial(&mut rng, ctx, 2), LaurentSeries::one());
        let v = PbwVector::monomial(rand_monomial(&mut rng, ctx, 2), LaurentSeries::one());
        let target = v.scale_series(&g);
        // left side: Y(f(z)u, x) applied to g(z)v
        let fu = u.scale_series(&f);
        let y_left = y_series(ctx, &fu, YRule::Shifted)?;
        // right side per mode: sum_k f^(k)/k! g(z) (Y(u)_{m+k} v)
        let y_u = y_series(ctx, &u, YRule::Shifted)?;
        let bound = y_u.bound(&v)?;
        for m in window.lo..=window.hi {
            let lhs = y_left.mode(m, &target)?;
            let mut rhs = PbwVector::zero();
            let mut k = 0i64;
            while m + k < bound {
                let yv = y_u.mode(m + k, &v)?;
                if !yv.is_zero_exact() {
                    let fk = f.derive_div_factorial(k as u32);
                    rhs = rhs.add(&yv.scale_series(&fk.mul(&g)));
                }
                k += 1;
            }
            if !lhs.sub(&rhs).is_zero_known() {
                return Ok(Some(format!(
                    "axiom defect at mode {m}: f = {f}, g = {g}, u = {u}, v = {v}: {lhs} vs {rhs}"
                )));
            }
        }
        Ok(None)
    });
    attach_window(
        result,
        format!(
            "x-modes [{}, {}], z-precision {trunc}",
            window.lo, window.hi
        ),
    )
}

fn attach_window(mut check: CheckResult, window: String) -> CheckResult {
    if check.status == CheckStatus::Pass {
        check.window = Some(window);
    }
    check
}

/// The type-zero axiom on a module: Y_W(f(z)v, x) w = f(x) Y_W(v, x) w.
pub fn type_zero_battery(
    vertex_ctx: &Arc<ModuleContext>,
    module_ctx: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
    trunc: i64,
    window: ModeWindow,
) -> CheckResult {
    let name = format!("type-zero-axiom-{}", module_ctx.kind().name());
    let result = run_trials(&name, trials, |t| {
        let mut rng = trial_rng(seed, 0xE002, t);
        let f = rand_series(&mut rng, trunc, false);
        let v = PbwVector::monomial(rand_monomial(&mut rng, vertex_ctx, 2), LaurentSeries::one());
        let w = rand_vector(&mut rng, module_ctx, 3, trunc);
        let fv = v.scale_series(&f);
        let lhs_series = y_series(module_ctx, &fv, YRule::Substituted)?;
        let rhs_inner = y_series(module_ctx, &v, YRule::Substituted)?;
        let bound = rhs_inner.bound(&w)?;
        for m in window.lo..=window.hi {
            let lhs = lhs_series.mode(m, &w)?;
            // f(x) S(x): mode m = sum_j f_j S_{m+j}
            let mut rhs = PbwVector::zero();
            if let Some(val) = f.val() {
                for j in val..(bound - m).max(val) {
                    let sv = rhs_inner.mode(m + j, &w)?;
                    if sv.is_zero_exact() {
                        continue;
                    }
                    let fj = f.coeff(j)?;
                    if !fj.is_zero() {
                        rhs = rhs.add(&sv.scale(&fj));
                    }
                }
            }
            if !lhs.sub(&rhs).is_zero_known() {
                return Ok(Some(format!(
                    "type-zero defect at mode {m}: f = {f}, v = {v}, w = {w}: {lhs} vs {rhs}"
                )));
            }
        }
        Ok(None)
    });
    attach_window(
        result,
        format!("x-modes [{}, {}], z-precision {trunc}", window.lo, window.hi),
    )
}

/// Skew-symmetry spot check: Y(u,x)v agrees with exp(xD) Y(v,-x) u in
/// low coefficients, for depth-1 generator vectors.
pub fn skew_symmetry_battery(
    ctx: &Arc<ModuleContext>,
    window: ModeWindow,
) -> CheckResult {
    let gens = module_generators(ctx);
    let check = (|| -> VfResult<Option<String>> {
        for (la, sa, ba) in &gens {
            for (lb, sb, bb) in &gens {
                let u = PbwVector::monomial(
                    PbwMonomial(vec![GenMode::new(*sa, *ba, -1)]),
                    LaurentSeries::one(),
                );
                let v = PbwVector::monomial(
                    PbwMonomial(vec![GenMode::new(*sb, *bb, -1)]),
                    LaurentSeries::one(),
                );
                let y_u = y_series(ctx, &u, YRule::Shifted)?;
                let y_v = y_series(ctx, &v, YRule::Shifted)?;
                let n_v = y_v.bound(&u)?;
                for j in window.lo..=window.hi {
                    // coefficient of x^j in Y(u,x)v
                    let lhs = y_u.mode(-j - 1, &v)?;
                    // sum_k (-1)^{k-j} D^k/k! (Y(v)_{k-j-1} u)
                    let mut rhs = PbwVector::zero();
                    let mut k = 0i64;
                    let mut kfact = Scalar::one();
                    while k - j - 1 < n_v {
                        if k > 0 {
                            kfact = &kfact * &Scalar::from_integer(k);
                        }
                        if k - j > -(4 * (window.hi - window.lo + 4)) {
                            let vu = y_v.mode(k - j - 1, &u)?;
                            if !vu.is_zero_exact() {
                                let mut term = vu;
                                for _ in 0..k {
                                    term = apply_d(ctx, &term)?;
                                }
                                let sign = if (k - j) % 2 == 0 {
                                    Scalar::one()
                                } else {
                                    Scalar::from_integer(-1)
                                };
                                rhs = rhs.add(&term.scale(&(&sign / &kfact)));
                            }
                        }
                        k += 1;
                    }
                    if !lhs.sub(&rhs).is_zero_known() {
                        return Ok(Some(format!(
                            "skew defect for ({la}, {lb}) at x^{j}: {lhs} vs {rhs}"
                        )));
                    }
                }
            }
        }
        Ok(None)
    })();
    match check {
        Ok(None) => CheckResult::pass_window(
            "skew-symmetry",
            format!("x-powers [{}, {}]", window.lo, window.hi),
        ),
        Ok(Some(w)) => CheckResult::fail("skew-symmetry", w),
        Err(VfError::Precision(m)) => CheckResult::precision_limited("skew-symmetry", m),
        Err(e) => CheckResult::fail("skew-symmetry", e.to_string()),
    }
}

/// Commutator transfer: the products u_i v computed in the vacuum vertex
/// algebra reproduce the commutator expansion on the module:
/// `[A_m, B_n] w = sum_i C(m,i) (Y_W(u_i v))_{m+n-i} w`.
pub fn commutator_transfer_battery(
    vertex_ctx: &Arc<ModuleContext>,
    module_ctx: &Arc<ModuleContext>,
    seed: u64,
    window: ModeWindow,
    max_i: i64,
) -> CheckResult {
    let gens = module_generators(vertex_ctx);
    let probes = default_probes(module_ctx, seed, 3, 3);
    let check = (|| -> VfResult<Option<String>> {
        for (la, sa, ba) in &gens {
            for (lb, sb, bb) in &gens {
                // u_i v inside the vacuum vertex algebra
                let v_vec = apply_mode(
                    vertex_ctx,
                    GenMode::new(*sb, *bb, -1),
                    &PbwVector::one(),
                )?;
                let mut products = Vec::new();
                for i in 0..=max_i {
                    products.push(apply_mode(vertex_ctx, GenMode::new(*sa, *ba, i), &v_vec)?);
                }
                let product_series: Vec<OperatorSeries> = products
                    .iter()
                    .map(|p| y_series(module_ctx, p, YRule::Substituted))
                    .collect::<VfResult<_>>()?;
                let a = OperatorSeries::generator(module_ctx.clone(), *sa, *ba);
                let b = OperatorSeries::generator(module_ctx.clone(), *sb, *bb);
                for w in &probes {
                    for m in window.lo..=window.hi {
                        for n in window.lo..=window.hi {
                            let lhs = locality_defect(&a, &b, 0, m, n, w)?;
                            let mut rhs = PbwVector::zero();
                            for (i, ps) in product_series.iter().enumerate() {
                                let c = binomial(m, i as u32);
                                if c.is_zero() {
                                    continue;
                                }
                                let term = ps.mode(m + n - i as i64, w)?;
                                rhs = rhs.add(&term.scale(&c));
                            }
                            if !lhs.sub(&rhs).is_zero_known() {
                                return Ok(Some(format!(
                                    "transfer defect for ({la}, {lb}) at (m,n)=({m},{n}): {lhs} vs {rhs}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    })();
    match check {
        Ok(None) => CheckResult::pass_window(
            "commutator-transfer",
            format!("modes [{}, {}]", window.lo, window.hi),
        ),
        Ok(Some(w)) => CheckResult::fail("commutator-transfer", w),
        Err(VfError::Precision(m)) => CheckResult::precision_limited("commutator-transfer", m),
        Err(e) => CheckResult::fail("commutator-transfer", e.to_string()),
    }
}

/// Homomorphism well-definedness: a random creation word, straightened in
/// the vacuum algebra and mapped through Y_W, agrees with the direct
/// composition of generator series on the module.
pub fn homomorphism_battery(
    vertex_ctx: &Arc<ModuleContext>,
    module_ctx: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
    window: ModeWindow,
) -> CheckResult {
    run_trials("homomorphism-routes", trials, |t| {
        let mut rng = trial_rng(seed, 0xE004, t);
        let len = rand_mode(&mut rng, 2, 3);
        let mut word = Vec::new();
        for _ in 0..len {
            word.push(rand_module_gen(&mut rng, vertex_ctx, -2, -1));
        }
        // route 1: straighten in the vacuum algebra, then map through Y_W
        let v = normalize(vertex_ctx, LaurentSeries::one(), word.clone())?;
        let via_normal_form = y_series(module_ctx, &v, YRule::Substituted)?;
        // route 2: compose the generator series directly in word order
        let mut direct = OperatorSeries::identity();
        for op in word.iter().rev() {
            let gen = OperatorSeries::generator(module_ctx.clone(), op.sector, op.base);
            direct = OperatorSeries::nth_product(&gen, &direct, op.mode);
        }
        let mut rng2 = trial_rng(seed, 0xE005, t);
        let probe = rand_vector(&mut rng2, module_ctx, 2, 8);
        for m in window.lo..=window.hi {
            let lhs = via_normal_form.mode(m, &probe)?;
            let rhs = direct.mode(m, &probe)?;
            if !lhs.sub(&rhs).is_zero_known() {
                return Ok(Some(format!(
                    "routes disagree at mode {m} on word {word:?}: {lhs} vs {rhs}"
                )));
            }
        }
        Ok(None)
    })
}

// ---------------------------------------------------------------------
// Heisenberg chain
// ---------------------------------------------------------------------

/// The K(l) -> H(f) specialization: substituting c~_j by the
/// x^{-j-1}-coefficient of f into bracket_kl reproduces l * bracket_hf.
pub fn kl_specialization_battery(
    f: &LaurentSeries,
    ell: &Scalar,
    bound: i64,
) -> CheckResult {
    let kl = AlgebraContext::k_ell(ell.clone());
    let hf = AlgebraContext::heisenberg(f.clone());
    for m in -bound..=bound {
        for n in -bound..=bound {
            let kl_bracket = bracket_kl(&kl, Sector::Beta, m, Sector::Beta, n);
            // specialize: c~_j -> coeff of x^{-j-1} in f
            let mut specialized = Scalar::zero();
            for (g, c) in kl_bracket.terms() {
                debug_assert_eq!(g.sector, Sector::CTilde);
                let fj = match f.coeff(-g.mode - 1) {
                    Ok(v) => v,
                    Err(e) => {
                        return CheckResult::precision_limited(
                            "kl-specialization",
                            format!("modes ({m},{n}): {e}"),
                        )
                    }
                };
                let cc = match c.as_constant() {
                    Some(v) => v,
                    None => {
                        return CheckResult::fail(
                            "kl-specialization",
                            format!("series coefficient in K(l) bracket at ({m},{n})"),
                        )
                    }
                };
                specialized += &(&cc * &fj);
            }
            let hf_bracket = match bracket_hf(&hf, m, n) {
                Ok(b) => b,
                Err(e) => {
                    return CheckResult::precision_limited(
                        "kl-specialization",
                        format!("modes ({m},{n}): {e}"),
                    )
                }
            };
            let hf_value = hf_bracket
                .central_part()
                .as_constant()
                .unwrap_or_else(Scalar::zero);
            let scaled_hf = &hf_value * ell;
            if specialized != scaled_hf {
                return CheckResult::fail(
                    "kl-specialization",
                    format!("modes ({m},{n}): specialized {specialized} != l*H(f) {scaled_hf}"),
                );
            }
        }
    }
    CheckResult::pass_window("kl-specialization", format!("|m|,|n| <= {bound}"))
}

/// Module law for the K(l)-action on the Fock H(f)-module through the
/// specialization: beta~_n acts as beta_n, c~_j as the f-coefficient.
pub fn fock_kl_module_law_battery(
    fock: &Arc<ModuleContext>,
    trials: u64,
    seed: u64,
) -> CheckResult {
    let ell = fock.level().clone();
    let kl = AlgebraContext::k_ell(ell);
    let f = fock.f().clone();
    run_trials("fock-kl-module-law", trials, |t| {
        let mut rng = trial_rng(seed, 0xF001, t);
        let m = rand_mode(&mut rng, -4, 4);
        let n = rand_mode(&mut rng, -4, 4);
        let w = rand_vector(&mut rng, fock, 4, 8);
        let act = |mode: i64, v: &PbwVector| -> VfResult<PbwVector> {
            apply_mode(fock, GenMode::new(Sector::Beta, 0, mode), v)
        };
        let lhs = act(m, &act(n, &w)?)?.sub(&act(n, &act(m, &w)?)?);
        // [b~_m, b~_n] = (l/2)(m-n) c~_{m+n-1}, and c~_j acts as f_{-j-1}
        let kl_bracket = bracket_kl(&kl, Sector::Beta, m, Sector::Beta, n);
        let mut rhs = PbwVector::zero();
        for (g, c) in kl_bracket.terms() {
            let fj = f.coeff(-g.mode - 1)?;
            let cc = c.as_constant().expect("K(l) coefficients are scalars");
            rhs = rhs.add(&w.scale(&(&cc * &fj)));
        }
        if lhs.sub(&rhs).is_zero_known() {
            Ok(None)
        } else {
            Ok(Some(format!(
                "K(l) module law defect at ({m},{n}) on {w}: {lhs} vs {rhs}"
            )))
        }
    })
}

/// Y_W(c~, x) acts on the Fock module as multiplication by f(x).
pub fn ctilde_field_battery(
    vf: &Arc<ModuleContext>,
    fock: &Arc<ModuleContext>,
    seed: u64,
    window: ModeWindow,
) -> CheckResult {
    // in V[f], the vector c~ is f(t) * 1
    let ctilde_vec = PbwVector::monomial(PbwMonomial::unit(), vf.f().clone());
    let check = (|| -> VfResult<Option<String>> {
        let y = y_series(fock, &ctilde_vec, YRule::Substituted)?;
        let mut rng = trial_rng(seed, 0xF002, 0);
        let w = rand_vector(&mut rng, fock, 3, 8);
        for m in window.lo..=window.hi {
            let got = y.mode(m, &w)?;
            let want = match vf.f().coeff(-m - 1) {
                Ok(c) => w.scale(&c),
                Err(_) => continue,
            };
            if !got.sub(&want).is_zero_known() {
                return Ok(Some(format!("Y_W(c~)_({m}) = {got}, expected f-coefficient action")));
            }
        }
        Ok(None)
    })();
    match check {
        Ok(None) => CheckResult::pass("ctilde-acts-as-f"),
        Ok(Some(w)) => CheckResult::fail("ctilde-acts-as-f", w),
        Err(VfError::Precision(m)) => CheckResult::precision_limited("ctilde-acts-as-f", m),
        Err(e) => CheckResult::fail("ctilde-acts-as-f", e.to_string()),
    }
}

// ---------------------------------------------------------------------
// sl2-free helpers
// ---------------------------------------------------------------------

/// Spot checks used by the validate suite of lie-base.
pub fn validate_battery(base: &Arc<LieAlgebraSpec>) -> Vec<CheckResult> {
    let report = base.validate();
    report
        .checks
        .iter()
        .map(|c| {
            if c.passed {
                CheckResult::pass(c.axiom)
            } else {
                CheckResult::fail(c.axiom, c.witness.clone().unwrap_or_default())
            }
        })
        .collect()
}

/// Random-element Lie axioms for the finite-dimensional base algebra.
pub fn base_random_battery(
    base: &Arc<LieAlgebraSpec>,
    trials: u64,
    seed: u64,
) -> Vec<CheckResult> {
    use crate::lie::LieElement;
    let rand_elt = |rng: &mut rand_chacha::ChaCha8Rng| -> LieElement {
        let coeffs = (0..base.dim()).map(|_| rand_scalar(rng)).collect();
        LieElement { coeffs }
    };
    let anti = run_trials("antisymmetry-random", trials, |t| {
        let mut rng = trial_rng(seed, 0x9001, t);
        let a = rand_elt(&mut rng);
        let b = rand_elt(&mut rng);
        let defect = base.bracket(&a, &b)?.add(&base.bracket(&b, &a)?);
        if defect.is_zero() {
            Ok(None)
        } else {
            Ok(Some("random antisymmetry defect".into()))
        }
    });
    let jac = run_trials("jacobi-random", trials, |t| {
        let mut rng = trial_rng(seed, 0x9002, t);
        let a = rand_elt(&mut rng);
        let b = rand_elt(&mut rng);
        let c = rand_elt(&mut rng);
        let s1 = base.bracket(&a, &base.bracket(&b, &c)?)?;
        let s2 = base.bracket(&b, &base.bracket(&c, &a)?)?;
        let s3 = base.bracket(&c, &base.bracket(&a, &b)?)?;
        if s1.add(&s2).add(&s3).is_zero() {
            Ok(None)
        } else {
            Ok(Some("random jacobi defect".into()))
        }
    });
    let inv = run_trials("invariance-random", trials, |t| {
        let mut rng = trial_rng(seed, 0x9003, t);
        let a = rand_elt(&mut rng);
        let b = rand_elt(&mut rng);
        let c = rand_elt(&mut rng);
        let lhs = base.form_eval(&base.bracket(&a, &b)?, &c)?;
        let rhs = base.form_eval(&a, &base.bracket(&b, &c)?)?;
        if lhs == rhs {
            Ok(None)
        } else {
            Ok(Some("random invariance defect".into()))
        }
    });
    vec![anti, jac, inv]
}

/// Convenience: overall status of a batch.
pub fn worst_status(checks: &[CheckResult]) -> CheckStatus {
    let mut worst = CheckStatus::Pass;
    for c in checks {
        worst = match (worst, c.status) {
            (_, CheckStatus::Fail) | (CheckStatus::Fail, _) => CheckStatus::Fail,
            (_, CheckStatus::PrecisionLimited) | (CheckStatus::PrecisionLimited, _) => {
                CheckStatus::PrecisionLimited
            }
            _ => CheckStatus::Pass,
        };
    }
    worst
}
