//! PBW induced modules: the K(l) vacuum module, the quotient module `V[f]`,
//! the check-g_p vacuum module over C((z)), a generic restricted hat-g_p
//! module, and the Fock-type H(f) module.
//!
//! Vectors are linear combinations of normal-ordered creation monomials
//! applied to the cyclic vector. The chosen PBW section sorts factors by
//! non-decreasing mode, then plain sector before copied, then base index.
//! `apply_mode` inserts an operator on the left and straightens by the
//! worklist below; each step either shortens the word (bracket branch) or
//! keeps its length and removes one adjacent inversion (swap branch), so
//! the rewriting terminates.

use crate::current::{
    bracket_gen, AlgebraContext, AlgebraKind, CurrentElement, GenMode, Sector,
};
use crate::error::{VfError, VfResult};
use crate::lie::LieAlgebraSpec;
use crate::scalar::Scalar;
use crate::series::LaurentSeries;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Which induced module we are working in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModuleKind {
    /// Vacuum module of K(l) over C.
    VKl,
    /// `V[f]`: C((t))-coefficient quotient where c~-modes act as scalars.
    Vf,
    /// Vacuum module of check-g_p over C((z)).
    Vcheck,
    /// Induced restricted hat-g_p module of level l over C.
    Mhat,
    /// Fock-type restricted H(f)-module of level l over C.
    FockHf,
}

impl ModuleKind {
    pub fn name(self) -> &'static str {
        match self {
            ModuleKind::VKl => "vkl",
            ModuleKind::Vf => "vf",
            ModuleKind::Vcheck => "vcheck",
            ModuleKind::Mhat => "mhat",
            ModuleKind::FockHf => "fockhf",
        }
    }

    /// Monomial coefficients are constant scalars (as opposed to series).
    pub fn scalar_coefficients(self) -> bool {
        matches!(self, ModuleKind::VKl | ModuleKind::Mhat | ModuleKind::FockHf)
    }
}

/// A module together with its algebra context and level.
#[derive(Clone)]
pub struct ModuleContext {
    kind: ModuleKind,
    algebra: AlgebraContext,
    level: Scalar,
    /// Defining series for Vf (also stored inside the H(f) context for
    /// FockHf).
    f: LaurentSeries,
}

impl ModuleContext {
    /// The vacuum module of K(l).
    pub fn v_kl(ell: Scalar) -> Arc<Self> {
        Arc::new(ModuleContext {
            kind: ModuleKind::VKl,
            algebra: AlgebraContext::k_ell(ell.clone()),
            level: ell,
            f: LaurentSeries::zero(),
        })
    }

    /// `V[f]` at level l: coefficients in C((t)), c~-modes act as the
    /// Taylor data of f.
    pub fn v_f(ell: Scalar, f: LaurentSeries) -> Arc<Self> {
        Arc::new(ModuleContext {
            kind: ModuleKind::Vf,
            algebra: AlgebraContext::k_ell(ell.clone()),
            level: ell,
            f,
        })
    }

    /// The level-l vacuum module of check-g_p.
    pub fn v_check(base: Arc<LieAlgebraSpec>, p: LaurentSeries, ell: Scalar) -> VfResult<Arc<Self>> {
        Ok(Arc::new(ModuleContext {
            kind: ModuleKind::Vcheck,
            algebra: AlgebraContext::check_gp(base, p)?,
            level: ell,
            f: LaurentSeries::zero(),
        }))
    }

    /// The induced restricted hat-g_p module M(l): nonnegative modes of
    /// g + g^1 annihilate the cyclic vector and k acts as l.
    pub fn build_mhat(base: Arc<LieAlgebraSpec>, p: LaurentSeries, ell: Scalar) -> VfResult<Arc<Self>> {
        Ok(Arc::new(ModuleContext {
            kind: ModuleKind::Mhat,
            algebra: AlgebraContext::hat_gp(base, p)?,
            level: ell,
            f: LaurentSeries::zero(),
        }))
    }

    /// Fock-type H(f)-module of level l (requires f to be a power series
    /// so that the annihilator span is consistent).
    pub fn fock_hf(f: LaurentSeries, ell: Scalar) -> VfResult<Arc<Self>> {
        if let Some(v) = f.val() {
            if v < 0 {
                return Err(VfError::Config(
                    "the Fock construction needs f with nonnegative valuation".into(),
                ));
            }
        }
        Ok(Arc::new(ModuleContext {
            kind: ModuleKind::FockHf,
            algebra: AlgebraContext::heisenberg(f.clone()),
            level: ell,
            f,
        }))
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn algebra(&self) -> &AlgebraContext {
        &self.algebra
    }

    pub fn level(&self) -> &Scalar {
        &self.level
    }

    pub fn f(&self) -> &LaurentSeries {
        &self.f
    }

    /// The scalar by which c~_j acts on `V[f]`: the x^{-j-1}-coefficient of
    /// f(t+x), which is 0 for j >= 0 and f^(k)(t)/k! with k = -j-1 below.
    pub fn ctilde_multiplier(&self, j: i64) -> LaurentSeries {
        if j >= 0 {
            LaurentSeries::zero()
        } else {
            self.f.derive_div_factorial((-j - 1) as u32)
        }
    }

    fn valid_sector(&self, sector: Sector) -> bool {
        match self.kind {
            ModuleKind::VKl | ModuleKind::Vf => matches!(sector, Sector::Beta | Sector::CTilde),
            ModuleKind::FockHf => sector == Sector::Beta,
            ModuleKind::Vcheck | ModuleKind::Mhat => {
                matches!(sector, Sector::Plain | Sector::Copied)
            }
        }
    }
}

/// A normal-ordered creation monomial: factors sorted non-decreasing by
/// (mode, sector, base), all modes negative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PbwMonomial(pub Vec<GenMode>);

impl PbwMonomial {
    pub fn unit() -> Self {
        PbwMonomial(Vec::new())
    }

    pub fn factors(&self) -> &[GenMode] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total creation depth: the sum of the negated modes.
    pub fn depth(&self) -> i64 {
        self.0.iter().map(|g| -g.mode).sum()
    }

    pub fn display_with(&self, ctx: &ModuleContext) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for g in &self.0 {
            let name = match g.sector {
                Sector::Beta => "beta".to_string(),
                Sector::CTilde => "ctilde".to_string(),
                _ => format!(
                    "{}{}",
                    ctx.algebra().base().basis_names()[g.base],
                    g.sector.suffix()
                ),
            };
            parts.push(format!("{}({})", name, g.mode));
        }
        parts.push("1".to_string());
        parts.join("*")
    }
}

/// A module vector: monomials with series coefficients (constant scalars
/// in the C-coefficient modules). Exactly-zero coefficients are dropped;
/// truncated-zero coefficients are kept because they carry the certified
/// precision window of the value.
#[derive(Clone, PartialEq, Debug)]
pub struct PbwVector {
    terms: BTreeMap<PbwMonomial, LaurentSeries>,
}

impl PbwVector {
    pub fn zero() -> Self {
        PbwVector {
            terms: BTreeMap::new(),
        }
    }

    /// The cyclic vector.
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(PbwMonomial::unit(), LaurentSeries::one());
        PbwVector { terms }
    }

    pub fn monomial(mono: PbwMonomial, coeff: LaurentSeries) -> Self {
        let mut out = Self::zero();
        out.add_term(mono, coeff);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &LaurentSeries)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mono: PbwMonomial, coeff: LaurentSeries) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(LaurentSeries::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, rhs: &PbwVector) -> PbwVector {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &PbwVector) -> PbwVector {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> PbwVector {
        self.scale(&Scalar::from_integer(-1))
    }

    pub fn scale(&self, s: &Scalar) -> PbwVector {
        self.scale_series(&LaurentSeries::constant(s.clone()))
    }

    pub fn scale_series(&self, s: &LaurentSeries) -> PbwVector {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(s));
        }
        out
    }

    /// All known coefficients vanish (the caps may hide an unknown tail).
    pub fn is_zero_known(&self) -> bool {
        self.terms.values().all(LaurentSeries::known_zero)
    }

    /// Exactly zero, caps included.
    pub fn is_zero_exact(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum creation depth over the monomials.
    pub fn max_depth(&self) -> i64 {
        self.terms.keys().map(PbwMonomial::depth).max().unwrap_or(0)
    }

    pub fn display_with(&self, ctx: &ModuleContext) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mono = m.display_with(ctx);
            match c.as_constant() {
                Some(k) if k.is_one() => parts.push(mono),
                Some(k) => parts.push(format!("({k})*{mono}")),
                None => parts.push(format!("({})*{mono}", c)),
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for PbwVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{:?}", m.0)?;
        }
        Ok(())
    }
}

/// Apply the mode operator `op` to a vector: the exact induced-module
/// action. Creation modes insert and straighten; nonnegative modes
/// commute rightward until they annihilate the cyclic vector; the central
/// output of every bracket contributes through the level.
pub fn apply_mode(ctx: &ModuleContext, op: GenMode, v: &PbwVector) -> VfResult<PbwVector> {
    if !ctx.valid_sector(op.sector) {
        return Err(VfError::Context(format!(
            "sector {:?} does not act on module {}",
            op.sector,
            ctx.kind().name()
        )));
    }
    if ctx.kind() == ModuleKind::Vf && op.sector == Sector::CTilde {
        // c~-modes act as scalars on the C((t)) coefficient
        return Ok(v.scale_series(&ctx.ctilde_multiplier(op.mode)));
    }
    let mut out = PbwVector::zero();
    for (mono, coeff) in v.terms() {
        let mut word = Vec::with_capacity(mono.len() + 1);
        word.push(op);
        word.extend_from_slice(mono.factors());
        let part = normalize(ctx, coeff.clone(), word)?;
        out = out.add(&part);
    }
    Ok(out)
}

/// Apply a whole algebra element (terms plus central part) to a vector.
pub fn apply_element(
    ctx: &ModuleContext,
    elem: &CurrentElement,
    v: &PbwVector,
) -> VfResult<PbwVector> {
    if elem.kind() != ctx.algebra().kind() {
        return Err(VfError::Context(
            "element and module belong to different algebras".into(),
        ));
    }
    let mut out = PbwVector::zero();
    for (g, c) in elem.terms() {
        let applied = apply_mode(ctx, *g, v)?;
        out = out.add(&applied.scale_series(c));
    }
    if !elem.central_part().is_zero() {
        // the central element acts as the level
        let central = v
            .scale_series(elem.central_part())
            .scale(ctx.level());
        out = out.add(&central);
    }
    Ok(out)
}

/// Straighten `coeff * word * 1` into normal form.
pub fn normalize(ctx: &ModuleContext, coeff: LaurentSeries, word: Vec<GenMode>) -> VfResult<PbwVector> {
    let mut out = PbwVector::zero();
    let mut stack: Vec<(LaurentSeries, Vec<GenMode>)> = vec![(coeff, word)];
    while let Some((c, w)) = stack.pop() {
        if c.is_zero() {
            continue;
        }
        // locate the leftmost adjacent inversion
        let inversion = w.windows(2).position(|pair| pair[0] > pair[1]);
        match inversion {
            None => {
                // sorted; annihilators (modes >= 0) sit at the right end
                if let Some(last) = w.last() {
                    if last.mode >= 0 {
                        continue; // kills the cyclic vector
                    }
                }
                out.add_term(PbwMonomial(w), c);
            }
            Some(i) => {
                // swap branch: w[i] w[i+1] -> w[i+1] w[i]
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                // bracket branch: [w[i], w[i+1]] replaces the pair
                let br = bracket_gen(ctx.algebra(), &w[i], &w[i + 1])?;
                stack.push((c.clone(), swapped));
                for (g, bc) in br.terms {
                    let mut shorter = Vec::with_capacity(w.len() - 1);
                    shorter.extend_from_slice(&w[..i]);
                    let new_coeff = if ctx.kind() == ModuleKind::Vf && g.sector == Sector::CTilde {
                        // convert the central-mode output to a scalar
                        c.mul(&bc).mul(&ctx.ctilde_multiplier(g.mode))
                    } else {
                        shorter.push(g);
                        c.mul(&bc)
                    };
                    shorter.extend_from_slice(&w[i + 2..]);
                    stack.push((new_coeff, shorter));
                }
                if !br.central.is_zero() {
                    let mut shorter = Vec::with_capacity(w.len() - 2);
                    shorter.extend_from_slice(&w[..i]);
                    shorter.extend_from_slice(&w[i + 2..]);
                    stack.push((c.mul(&br.central).scale(ctx.level()), shorter));
                }
            }
        }
    }
    Ok(out)
}

/// The derivation operator of the vacuum modules: zero on the cyclic
/// vector, commutes with u(n) to -n u(n-1), and differentiates the
/// C((z)) coefficients of the check-module.
pub fn apply_d(ctx: &ModuleContext, v: &PbwVector) -> VfResult<PbwVector> {
    if !matches!(ctx.kind(), ModuleKind::VKl | ModuleKind::Vcheck) {
        return Err(VfError::Context(format!(
            "the derivation operator is defined on vkl and vcheck, not {}",
            ctx.kind().name()
        )));
    }
    let mut out = PbwVector::zero();
    for (mono, coeff) in v.terms() {
        if ctx.kind() == ModuleKind::Vcheck {
            let dc = coeff.derive();
            if !dc.is_zero() {
                out = out.add(&PbwVector::monomial(mono.clone(), dc));
            }
        }
        for (i, g) in mono.factors().iter().enumerate() {
            let mut word = mono.factors().to_vec();
            word[i] = GenMode::new(g.sector, g.base, g.mode - 1);
            let scaled = coeff.scale(&Scalar::from_integer(-g.mode));
            let part = normalize(ctx, scaled, word)?;
            out = out.add(&part);
        }
    }
    Ok(out)
}

/// A bound N with `u(n) v = 0` for all n >= N, where u is the given
/// sector/base generator: start from the filtration bound (creation depth
/// plus the degree of p plus one) and tighten by a direct evaluation
/// sweep. The returned bound is verified by evaluating modes N and N-1.
pub fn restrictedness_bound(
    ctx: &ModuleContext,
    sector: Sector,
    base: usize,
    v: &PbwVector,
) -> VfResult<i64> {
    if v.is_zero_exact() {
        return Ok(0);
    }
    let deg_p = match ctx.algebra().kind() {
        AlgebraKind::HatGp | AlgebraKind::CheckGp => ctx.algebra().p_degree().max(0),
        _ => 0,
    };
    let coarse = v.max_depth() + deg_p + 1;
    let mut tight = 0i64;
    for n in (0..coarse).rev() {
        let r = apply_mode(ctx, GenMode::new(sector, base, n), v)?;
        if !r.is_zero_known() {
            tight = n + 1;
            break;
        }
    }
    // verify the certificate edges
    let at_bound = apply_mode(ctx, GenMode::new(sector, base, tight), v)?;
    debug_assert!(at_bound.is_zero_known());
    if tight > 0 {
        let below = apply_mode(ctx, GenMode::new(sector, base, tight - 1), v)?;
        debug_assert!(!below.is_zero_known());
    }
    Ok(tight)
}

/// `[u(m), v(n)] w - (bracket of u(m), v(n) applied to w)`: the module-law
/// defect, which must vanish identically.
pub fn module_law_defect(
    ctx: &ModuleContext,
    x: GenMode,
    y: GenMode,
    w: &PbwVector,
) -> VfResult<PbwVector> {
    let xy = apply_mode(ctx, x, &apply_mode(ctx, y, w)?)?;
    let yx = apply_mode(ctx, y, &apply_mode(ctx, x, w)?)?;
    let br = bracket_gen(ctx.algebra(), &x, &y)?;
    let mut bracket_action = PbwVector::zero();
    for (g, c) in br.terms {
        let applied = if ctx.kind() == ModuleKind::Vf && g.sector == Sector::CTilde {
            w.scale_series(&ctx.ctilde_multiplier(g.mode)).scale_series(&c)
        } else {
            apply_mode(ctx, g, w)?.scale_series(&c)
        };
        bracket_action = bracket_action.add(&applied);
    }
    if !br.central.is_zero() {
        bracket_action = bracket_action.add(&w.scale_series(&br.central).scale(ctx.level()));
    }
    Ok(xy.sub(&yx).sub(&bracket_action))
}

/// Enumerate all normal-ordered monomials of total creation depth <= the
/// bound (sorted), as probe material and for the pbw-basis table.
pub fn enumerate_monomials(ctx: &ModuleContext, max_depth: i64) -> Vec<PbwMonomial> {
    let sectors: Vec<Sector> = match ctx.kind() {
        ModuleKind::VKl => vec![Sector::Beta, Sector::CTilde],
        ModuleKind::Vf | ModuleKind::FockHf => vec![Sector::Beta],
        ModuleKind::Vcheck | ModuleKind::Mhat => vec![Sector::Plain, Sector::Copied],
    };
    let dim = match ctx.kind() {
        ModuleKind::Vcheck | ModuleKind::Mhat => ctx.algebra().base().dim(),
        _ => 1,
    };
    // generators of depth d: mode -d
    let mut gens: Vec<GenMode> = Vec::new();
    for d in 1..=max_depth {
        for &sector in &sectors {
            for base in 0..dim {
                gens.push(GenMode::new(sector, base, -d));
            }
        }
    }
    let mut out = vec![PbwMonomial::unit()];
    // grow words in canonical order so each monomial appears exactly once
    fn grow(
        gens: &[GenMode],
        start: usize,
        remaining: i64,
        word: &mut Vec<GenMode>,
        out: &mut Vec<PbwMonomial>,
    ) {
        for (idx, g) in gens.iter().enumerate().skip(start) {
            let depth = -g.mode;
            if depth > remaining {
                continue;
            }
            word.push(*g);
            // keep the factors sorted: next factor must not precede this
            out.push(PbwMonomial({
                let mut w = word.clone();
                w.sort();
                w
            }));
            grow(gens, idx, remaining - depth, word, out);
            word.pop();
        }
    }
    let mut word = Vec::new();
    grow(&gens, 0, max_depth, &mut word, &mut out);
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::AlgebraContext;

    fn s(n: i64) -> Scalar {
        Scalar::from_integer(n)
    }

    fn vcheck(beta: i64, ell: i64) -> Arc<ModuleContext> {
        let p = AlgebraContext::elliptic_p(&s(beta));
        ModuleContext::v_check(LieAlgebraSpec::sl2(), p, s(ell)).unwrap()
    }

    fn gen(sector: Sector, base: usize, mode: i64) -> GenMode {
        GenMode::new(sector, base, mode)
    }

    const E: usize = 0;
    const H: usize = 1;
    const F: usize = 2;

    #[test]
    fn annihilation_on_cyclic_vector() {
        let ctx = vcheck(0, 1);
        for sector in [Sector::Plain, Sector::Copied] {
            for base in 0..3 {
                for n in 0..4 {
                    let r = apply_mode(&ctx, gen(sector, base, n), &PbwVector::one()).unwrap();
                    assert!(r.is_zero_exact());
                }
            }
        }
    }

    #[test]
    fn straightening_examples() {
        let ctx = vcheck(0, 5);
        let f_m1 = apply_mode(&ctx, gen(Sector::Plain, F, -1), &PbwVector::one()).unwrap();

        // e(0) f(-1) 1 = h(-1) 1
        let r = apply_mode(&ctx, gen(Sector::Plain, E, 0), &f_m1).unwrap();
        let expect = PbwVector::monomial(
            PbwMonomial(vec![gen(Sector::Plain, H, -1)]),
            LaurentSeries::one(),
        );
        assert_eq!(r, expect);

        // e(1) f(-1) 1 = l 1
        let r = apply_mode(&ctx, gen(Sector::Plain, E, 1), &f_m1).unwrap();
        let expect = PbwVector::monomial(PbwMonomial::unit(), LaurentSeries::constant(s(5)));
        assert_eq!(r, expect);

        // e1(1) f1(-1) 1 = l p(z) 1
        let f1_m1 = apply_mode(&ctx, gen(Sector::Copied, F, -1), &PbwVector::one()).unwrap();
        let r = apply_mode(&ctx, gen(Sector::Copied, E, 1), &f1_m1).unwrap();
        let expect = PbwVector::monomial(PbwMonomial::unit(), ctx.algebra().p().scale(&s(5)));
        assert_eq!(r, expect);
    }

    #[test]
    fn mhat_examples() {
        let p = AlgebraContext::elliptic_p(&s(0));
        let ctx = ModuleContext::build_mhat(LieAlgebraSpec::sl2(), p, s(3)).unwrap();
        // e1(0) f1(-1) 1 = (1/2) l 1 at beta = 0
        let f1_m1 = apply_mode(&ctx, gen(Sector::Copied, F, -1), &PbwVector::one()).unwrap();
        let r = apply_mode(&ctx, gen(Sector::Copied, E, 0), &f1_m1).unwrap();
        let expect = PbwVector::monomial(
            PbwMonomial::unit(),
            LaurentSeries::constant(Scalar::from_ratio(3, 2)),
        );
        assert_eq!(r, expect);
    }

    #[test]
    fn vkl_straightening() {
        let ctx = ModuleContext::v_kl(s(2));
        let b_m1 = apply_mode(&ctx, gen(Sector::Beta, 0, -1), &PbwVector::one()).unwrap();
        // b~_1 b~_{-1} 1 = (l/2)(2) c~_{-1} 1 = l c~_{-1} 1
        let r = apply_mode(&ctx, gen(Sector::Beta, 0, 1), &b_m1).unwrap();
        let expect = PbwVector::monomial(
            PbwMonomial(vec![gen(Sector::CTilde, 0, -1)]),
            LaurentSeries::constant(s(2)),
        );
        assert_eq!(r, expect);
        // b~_2 b~_{-1} 1 = (l/2)(3) c~_0 1 = 0
        let r = apply_mode(&ctx, gen(Sector::Beta, 0, 2), &b_m1).unwrap();
        assert!(r.is_zero_exact());
        // and c~_{-1} 1 is itself a basis vector
        let r = apply_mode(&ctx, gen(Sector::CTilde, 0, -1), &PbwVector::one()).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn vf_ctilde_acts_as_multiplication() {
        let f = LaurentSeries::from_terms([(0, s(1)), (1, s(1))]); // 1 + t
        let ctx = ModuleContext::v_f(s(1), f.clone());
        let g = LaurentSeries::monomial(2, s(1));
        let v = PbwVector::monomial(PbwMonomial::unit(), g.clone());
        // c~_{-1} (g(t) 1) = f(t) g(t) 1
        let r = apply_mode(&ctx, gen(Sector::CTilde, 0, -1), &v).unwrap();
        assert_eq!(r, PbwVector::monomial(PbwMonomial::unit(), f.mul(&g)));
        // c~_0 kills everything
        let r = apply_mode(&ctx, gen(Sector::CTilde, 0, 0), &v).unwrap();
        assert!(r.is_zero_exact());
        // c~_{-2} multiplies by f'(t)
        let r = apply_mode(&ctx, gen(Sector::CTilde, 0, -2), &v).unwrap();
        assert_eq!(r, PbwVector::monomial(PbwMonomial::unit(), f.derive().mul(&g)));
    }

    #[test]
    fn fock_hf_level() {
        let ctx = ModuleContext::fock_hf(LaurentSeries::one(), s(1)).unwrap();
        let b_m1 = apply_mode(&ctx, gen(Sector::Beta, 0, -1), &PbwVector::one()).unwrap();
        // [beta_1, beta_{-1}] = c acts as l = 1
        let r = apply_mode(&ctx, gen(Sector::Beta, 0, 1), &b_m1).unwrap();
        assert_eq!(r, PbwVector::one());
    }

    #[test]
    fn apply_d_examples() {
        let ctx = vcheck(0, 1);
        assert!(apply_d(&ctx, &PbwVector::one()).unwrap().is_zero_exact());

        // D(a(-1) 1) = a(-2) 1
        let a_m1 = PbwVector::monomial(
            PbwMonomial(vec![gen(Sector::Plain, E, -1)]),
            LaurentSeries::one(),
        );
        let r = apply_d(&ctx, &a_m1).unwrap();
        let expect = PbwVector::monomial(
            PbwMonomial(vec![gen(Sector::Plain, E, -2)]),
            LaurentSeries::one(),
        );
        assert_eq!(r, expect);

        // D(z a(-1) 1) = a(-1) 1 + z a(-2) 1
        let za = a_m1.scale_series(&LaurentSeries::monomial(1, s(1)));
        let r = apply_d(&ctx, &za).unwrap();
        let expect = a_m1.add(&PbwVector::monomial(
            PbwMonomial(vec![gen(Sector::Plain, E, -2)]),
            LaurentSeries::monomial(1, s(1)),
        ));
        assert_eq!(r, expect);
    }

    #[test]
    fn restrictedness_examples() {
        let ctx = vcheck(0, 1);
        // N(1) = 0
        assert_eq!(
            restrictedness_bound(&ctx, Sector::Plain, E, &PbwVector::one()).unwrap(),
            0
        );
        // v = f(-3) 1, plain e: e(3) v = 3 l 1 != 0, e(n >= 4) v = 0
        let v = apply_mode(&ctx, gen(Sector::Plain, F, -3), &PbwVector::one()).unwrap();
        assert_eq!(restrictedness_bound(&ctx, Sector::Plain, E, &v).unwrap(), 4);
        // v = f1(-1) 1, copied e: N <= 3
        let v = apply_mode(&ctx, gen(Sector::Copied, F, -1), &PbwVector::one()).unwrap();
        let n = restrictedness_bound(&ctx, Sector::Copied, E, &v).unwrap();
        assert!(n <= 3, "bound {n}");
    }

    #[test]
    fn central_element_reads_back_the_level() {
        use crate::current::CurrentElement;
        let p = AlgebraContext::elliptic_p(&s(0));
        let ctx = ModuleContext::build_mhat(LieAlgebraSpec::sl2(), p, s(7)).unwrap();
        let v = apply_mode(&ctx, gen(Sector::Copied, E, -2), &PbwVector::one()).unwrap();
        let k = CurrentElement::central(ctx.algebra().kind(), LaurentSeries::one());
        let kv = apply_element(&ctx, &k, &v).unwrap();
        assert_eq!(kv, v.scale(&s(7)));
    }

    #[test]
    fn route_independence_of_straightening() {
        let ctx = vcheck(1, 2);
        let word = vec![
            gen(Sector::Copied, E, -1),
            gen(Sector::Plain, H, -2),
            gen(Sector::Copied, F, -1),
            gen(Sector::Plain, E, 1),
            gen(Sector::Plain, F, -1),
        ];
        // route A: apply one factor at a time, right to left
        let mut route_a = PbwVector::one();
        for op in word.iter().rev() {
            route_a = apply_mode(&ctx, *op, &route_a).unwrap();
        }
        // route B: normalize the whole word at once
        let route_b = normalize(&ctx, LaurentSeries::one(), word).unwrap();
        assert_eq!(route_a, route_b);
    }

    #[test]
    fn monomial_enumeration_depth2() {
        let ctx = vcheck(0, 1);
        let monos = enumerate_monomials(&ctx, 2);
        // depth 0: 1; depth 1: 6 gens at mode -1; depth 2: 6 at mode -2
        // plus 21 unordered pairs of mode -1 gens
        assert_eq!(monos.len(), 1 + 6 + 6 + 21);
        assert!(monos.iter().all(|m| m.depth() <= 2));
    }
}
