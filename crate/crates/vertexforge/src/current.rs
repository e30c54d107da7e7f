//! The current-type Lie algebras: the Heisenberg-type algebra H(f), its
//! abstraction K(l), the big quotient algebra K(g,p) with its dR-reduced
//! central part, and the two elliptic current algebras: hat-g_p over C and
//! check-g_p over C((z)).
//!
//! Mode-level brackets are stored as derived closed forms; an independent
//! delta-expansion oracle (see [`oracle`]) extracts the same brackets
//! blindly from the generating-function relations and keeps the closed
//! forms honest.
//!
//! Closed forms, with `p_j` the x^j-coefficient of the polynomial p and
//! `f_j` the z^j-coefficient of f:
//!
//! ```text
//! H(f):      [b_m, b_n] = (1/2)(m-n) f_{-m-n} c
//! K(l):      [b_m, b_n] = (l/2)(m-n) c_{m+n-1},  c_* central
//! hat-g_p:   [a(m), b(n)]   = [a,b](m+n) + m d_{m+n,0} <a,b> k
//!            [a(m), b1(n)]  = [a,b]1(m+n)
//!            [a1(m), b1(n)] = sum_j p_j [a,b](m+n+j)
//!                             + (1/2)(m-n) p_{-m-n} <a,b> k
//! check-g_p: as hat-g_p with p_j replaced by the Taylor data
//!            p^(j)(z)/j! of p(z+x); coefficients live in C((z))
//! ```

use crate::error::{VfError, VfResult};
use crate::lie::LieAlgebraSpec;
use crate::scalar::Scalar;
use crate::series::{Cap, LaurentSeries, ShiftExpansion};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub mod oracle;

/// Which of the five algebras an element belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlgebraKind {
    /// Heisenberg-type H(f) with generators c, beta_n.
    Hf,
    /// K(l) with basis beta~_n, c~_n.
    Kl,
    /// K(g,p): series-coefficient currents with central part in R/dR.
    Kgp,
    /// hat-g_p over C.
    HatGp,
    /// check-g_p over C((z)).
    CheckGp,
}

/// Generator sector. The ordering (plain before copied) is part of the
/// canonical term order and of the PBW section.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sector {
    Plain,
    Copied,
    Beta,
    CTilde,
}

impl Sector {
    pub fn suffix(self) -> &'static str {
        match self {
            Sector::Plain => "",
            Sector::Copied => "^1",
            Sector::Beta => "",
            Sector::CTilde => "",
        }
    }
}

/// A single mode generator: a basis element of g (or the Heisenberg
/// generator) in a sector, at an integer t-mode.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GenMode {
    pub sector: Sector,
    pub base: usize,
    pub mode: i64,
}

impl GenMode {
    pub fn new(sector: Sector, base: usize, mode: i64) -> Self {
        GenMode { sector, base, mode }
    }

    /// Canonical sort key: mode, then sector, then base index.
    fn key(&self) -> (i64, Sector, usize) {
        (self.mode, self.sector, self.base)
    }
}

impl PartialOrd for GenMode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GenMode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

/// Construction context for one of the algebras.
#[derive(Clone)]
pub struct AlgebraContext {
    kind: AlgebraKind,
    base: Option<Arc<LieAlgebraSpec>>,
    /// p for Kgp/HatGp/CheckGp (a polynomial for the latter two).
    p: LaurentSeries,
    /// Cached Taylor data of p(z+x) for check-g_p.
    p_shift: Option<ShiftExpansion>,
    /// f for H(f).
    f: LaurentSeries,
    /// The level parameter of K(l) (part of the algebra, not the module).
    ell: Scalar,
}

impl AlgebraContext {
    pub fn heisenberg(f: LaurentSeries) -> Self {
        AlgebraContext {
            kind: AlgebraKind::Hf,
            base: None,
            p: LaurentSeries::zero(),
            p_shift: None,
            f,
            ell: Scalar::zero(),
        }
    }

    pub fn k_ell(ell: Scalar) -> Self {
        AlgebraContext {
            kind: AlgebraKind::Kl,
            base: None,
            p: LaurentSeries::zero(),
            p_shift: None,
            f: LaurentSeries::zero(),
            ell,
        }
    }

    /// K(g,p) allows any lower-truncated series p(xi).
    pub fn kgp(base: Arc<LieAlgebraSpec>, p: LaurentSeries) -> Self {
        AlgebraContext {
            kind: AlgebraKind::Kgp,
            base: Some(base),
            p,
            p_shift: None,
            f: LaurentSeries::zero(),
            ell: Scalar::zero(),
        }
    }

    /// hat-g_p requires a true polynomial p.
    pub fn hat_gp(base: Arc<LieAlgebraSpec>, p: LaurentSeries) -> VfResult<Self> {
        Self::require_polynomial(&p)?;
        Ok(AlgebraContext {
            kind: AlgebraKind::HatGp,
            base: Some(base),
            p,
            p_shift: None,
            f: LaurentSeries::zero(),
            ell: Scalar::zero(),
        })
    }

    /// check-g_p requires a true polynomial p; its Taylor shift is cached.
    pub fn check_gp(base: Arc<LieAlgebraSpec>, p: LaurentSeries) -> VfResult<Self> {
        Self::require_polynomial(&p)?;
        let deg = p.terms().map(|(e, _)| e).max().unwrap_or(0).max(0) as u32;
        let p_shift = p.shift(deg);
        Ok(AlgebraContext {
            kind: AlgebraKind::CheckGp,
            base: Some(base),
            p,
            p_shift: Some(p_shift),
            f: LaurentSeries::zero(),
            ell: Scalar::zero(),
        })
    }

    /// The elliptic polynomial `z^3 - 2*beta*z^2 + z`.
    pub fn elliptic_p(beta: &Scalar) -> LaurentSeries {
        LaurentSeries::from_terms([
            (3, Scalar::one()),
            (2, &Scalar::from_integer(-2) * beta),
            (1, Scalar::one()),
        ])
    }

    fn require_polynomial(p: &LaurentSeries) -> VfResult<()> {
        if !p.is_polynomial() {
            return Err(VfError::Config(
                "p must be an exact polynomial in nonnegative powers".into(),
            ));
        }
        Ok(())
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn base(&self) -> &Arc<LieAlgebraSpec> {
        self.base.as_ref().expect("algebra has a base Lie algebra")
    }

    pub fn p(&self) -> &LaurentSeries {
        &self.p
    }

    pub fn f(&self) -> &LaurentSeries {
        &self.f
    }

    pub fn ell(&self) -> &Scalar {
        &self.ell
    }

    pub fn p_degree(&self) -> i64 {
        self.p.terms().map(|(e, _)| e).max().unwrap_or(0)
    }

    /// Taylor coefficient `p^(k)(z)/k!` of `p(z+x)`.
    pub fn p_shift_term(&self, k: u32) -> LaurentSeries {
        match &self.p_shift {
            Some(sh) if k <= sh.order() => sh.term(k).clone(),
            _ => self.p.derive_div_factorial(k),
        }
    }

    fn gen_name(&self, g: &GenMode) -> String {
        match g.sector {
            Sector::Beta => "beta".to_string(),
            Sector::CTilde => "ctilde".to_string(),
            _ => format!("{}{}", self.base().basis_names()[g.base], g.sector.suffix()),
        }
    }
}

/// An element of one of the current algebras: a finite sum of
/// (coefficient, generator-mode) terms plus a central part.
///
/// Terms are kept in canonical sorted order with merged duplicates and no
/// exactly-zero coefficients. Truncated-zero coefficients (all known
/// coefficients zero, finite cap) are kept: they carry the precision
/// window of the value.
#[derive(Clone, PartialEq)]
pub struct CurrentElement {
    kind: AlgebraKind,
    terms: BTreeMap<GenMode, LaurentSeries>,
    /// Coefficient of the central element (c for H(f), k for hat/check).
    /// Constant for Hf/HatGp; a z-series for CheckGp; unused for Kl/Kgp.
    central: LaurentSeries,
    /// K(g,p) only: the raw central part, t-mode -> xi-series, understood
    /// modulo dR.
    central_modes: BTreeMap<i64, LaurentSeries>,
}

impl CurrentElement {
    pub fn zero(kind: AlgebraKind) -> Self {
        CurrentElement {
            kind,
            terms: BTreeMap::new(),
            central: LaurentSeries::zero(),
            central_modes: BTreeMap::new(),
        }
    }

    pub fn generator(kind: AlgebraKind, g: GenMode) -> Self {
        Self::term(kind, g, LaurentSeries::one())
    }

    pub fn term(kind: AlgebraKind, g: GenMode, coeff: LaurentSeries) -> Self {
        let mut out = Self::zero(kind);
        out.add_term(g, coeff);
        out
    }

    pub fn central(kind: AlgebraKind, coeff: LaurentSeries) -> Self {
        let mut out = Self::zero(kind);
        out.central = coeff;
        out
    }

    /// A raw K(g,p) central element `f(xi) k (x) t^mode`.
    pub fn kgp_central(mode: i64, coeff: LaurentSeries) -> Self {
        let mut out = Self::zero(AlgebraKind::Kgp);
        if !coeff.is_zero() {
            out.central_modes.insert(mode, coeff);
        }
        out
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GenMode, &LaurentSeries)> {
        self.terms.iter()
    }

    pub fn central_part(&self) -> &LaurentSeries {
        &self.central
    }

    pub fn central_mode_part(&self) -> &BTreeMap<i64, LaurentSeries> {
        &self.central_modes
    }

    fn add_term(&mut self, g: GenMode, coeff: LaurentSeries) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(g)
            .or_insert_with(LaurentSeries::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&g);
        }
    }

    fn add_central(&mut self, coeff: &LaurentSeries) {
        self.central = self.central.add(coeff);
    }

    fn add_central_mode(&mut self, mode: i64, coeff: &LaurentSeries) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .central_modes
            .entry(mode)
            .or_insert_with(LaurentSeries::zero);
        *entry = entry.add(coeff);
        if entry.is_zero() {
            self.central_modes.remove(&mode);
        }
    }

    pub fn add(&self, rhs: &CurrentElement) -> CurrentElement {
        assert_eq!(self.kind, rhs.kind, "cannot add elements of different algebras");
        let mut out = self.clone();
        for (g, c) in &rhs.terms {
            out.add_term(*g, c.clone());
        }
        out.add_central(&rhs.central);
        for (m, c) in &rhs.central_modes {
            out.add_central_mode(*m, c);
        }
        out
    }

    pub fn neg(&self) -> CurrentElement {
        self.scale_series(&LaurentSeries::constant(Scalar::from_integer(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> CurrentElement {
        self.scale_series(&LaurentSeries::constant(s.clone()))
    }

    pub fn scale_series(&self, s: &LaurentSeries) -> CurrentElement {
        let mut out = Self::zero(self.kind);
        for (g, c) in &self.terms {
            out.add_term(*g, c.mul(s));
        }
        out.central = self.central.mul(s);
        for (m, c) in &self.central_modes {
            out.add_central_mode(*m, &c.mul(s));
        }
        out
    }

    /// Every known coefficient (terms and central) is zero. For K(g,p)
    /// the central part is judged through its dR obstruction record.
    pub fn is_zero_known(&self) -> bool {
        let terms_zero = self.terms.values().all(LaurentSeries::known_zero);
        if self.kind == AlgebraKind::Kgp {
            terms_zero
                && reduce_mod_dr(&self.central_modes)
                    .map(|r| r.known_zero())
                    .unwrap_or(false)
        } else {
            terms_zero && self.central.known_zero()
        }
    }

    /// The canonical dR obstruction record of the central part (Kgp).
    pub fn central_obstruction(&self) -> VfResult<DrObstruction> {
        if self.kind != AlgebraKind::Kgp {
            return Err(VfError::Context(
                "dR reduction only applies to K(g,p) elements".into(),
            ));
        }
        reduce_mod_dr(&self.central_modes)
    }

    pub fn display_with(&self, ctx: &AlgebraContext) -> String {
        let mut parts = Vec::new();
        for (g, c) in &self.terms {
            let name = format!("{}({})", ctx.gen_name(g), g.mode);
            parts.push(render_coeff_term(c, &name));
        }
        if !self.central.is_zero() {
            let central_name = match self.kind {
                AlgebraKind::Hf => "c",
                _ => "k",
            };
            parts.push(render_coeff_term(&self.central, central_name));
        }
        for (m, c) in &self.central_modes {
            parts.push(render_coeff_term(c, &format!("k@{m}")));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn render_coeff_term(coeff: &LaurentSeries, name: &str) -> String {
    match coeff.as_constant() {
        Some(c) if c.is_one() => name.to_string(),
        Some(c) => format!("({c})*{name}"),
        None => format!("({})*{name}", coeff),
    }
}

impl fmt::Debug for CurrentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*[{:?},{},{}]", c, g.sector, g.base, g.mode)?;
        }
        if !self.central.is_zero() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*central", self.central)?;
        }
        for (m, c) in &self.central_modes {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*k@{m}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------
// Closed-form generator brackets
// ---------------------------------------------------------------------

/// Result of a generator-level bracket, before coefficient multiplication:
/// structure terms plus a central coefficient.
pub struct GenBracket {
    pub terms: Vec<(GenMode, LaurentSeries)>,
    /// Coefficient of c / k (constant for Hf/HatGp, z-series for CheckGp).
    pub central: LaurentSeries,
}

impl GenBracket {
    fn empty() -> Self {
        GenBracket {
            terms: Vec::new(),
            central: LaurentSeries::zero(),
        }
    }
}

/// `[beta_m, beta_n]` in H(f): `(1/2)(m-n) f_{-m-n} c`.
pub fn bracket_hf(ctx: &AlgebraContext, m: i64, n: i64) -> VfResult<CurrentElement> {
    assert_eq!(ctx.kind(), AlgebraKind::Hf);
    if m == n {
        // antisymmetry closes this case without touching f's precision
        return Ok(CurrentElement::zero(AlgebraKind::Hf));
    }
    let fj = ctx.f.coeff(-m - n).map_err(|_| {
        VfError::Precision(format!(
            "[beta_{m}, beta_{n}] needs the z^{} coefficient of f beyond its cap",
            -m - n
        ))
    })?;
    let value = &(&Scalar::from_ratio(1, 2) * &Scalar::from_integer(m - n)) * &fj;
    Ok(CurrentElement::central(
        AlgebraKind::Hf,
        LaurentSeries::constant(value),
    ))
}

/// `[x_m, y_n]` in K(l) for kinds beta~ / c~.
pub fn bracket_kl(
    ctx: &AlgebraContext,
    kind_m: Sector,
    m: i64,
    kind_n: Sector,
    n: i64,
) -> CurrentElement {
    assert_eq!(ctx.kind(), AlgebraKind::Kl);
    if kind_m == Sector::CTilde || kind_n == Sector::CTilde {
        return CurrentElement::zero(AlgebraKind::Kl);
    }
    debug_assert_eq!(kind_m, Sector::Beta);
    debug_assert_eq!(kind_n, Sector::Beta);
    let coeff = &(&Scalar::from_ratio(1, 2) * ctx.ell()) * &Scalar::from_integer(m - n);
    CurrentElement::term(
        AlgebraKind::Kl,
        GenMode::new(Sector::CTilde, 0, m + n - 1),
        LaurentSeries::constant(coeff),
    )
}

/// Generator-level closed-form bracket for hat-g_p and check-g_p (and the
/// Heisenberg family, which the PBW straightener also routes through
/// here). Coefficients are constants for HatGp/Hf/Kl and z-series for
/// CheckGp.
pub fn bracket_gen(ctx: &AlgebraContext, x: &GenMode, y: &GenMode) -> VfResult<GenBracket> {
    match ctx.kind() {
        AlgebraKind::Hf => {
            let r = bracket_hf(ctx, x.mode, y.mode)?;
            Ok(GenBracket {
                terms: Vec::new(),
                central: r.central_part().clone(),
            })
        }
        AlgebraKind::Kl => {
            let r = bracket_kl(ctx, x.sector, x.mode, y.sector, y.mode);
            Ok(GenBracket {
                terms: r.terms().map(|(g, c)| (*g, c.clone())).collect(),
                central: LaurentSeries::zero(),
            })
        }
        AlgebraKind::HatGp => Ok(bracket_gen_hat(ctx, x, y)),
        AlgebraKind::CheckGp => Ok(bracket_gen_check(ctx, x, y)),
        AlgebraKind::Kgp => Err(VfError::Context(
            "K(g,p) brackets carry their own series coefficients; use bracket_elements".into(),
        )),
    }
}

fn structure_terms(
    ctx: &AlgebraContext,
    i: usize,
    j: usize,
    sector: Sector,
    mode: i64,
    weight: &LaurentSeries,
) -> Vec<(GenMode, LaurentSeries)> {
    let base = ctx.base();
    let bk = base.bracket_basis(i, j);
    let mut out = Vec::new();
    for (k, c) in bk.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out.push((GenMode::new(sector, k, mode), weight.scale(c)));
    }
    out
}

fn bracket_gen_hat(ctx: &AlgebraContext, x: &GenMode, y: &GenMode) -> GenBracket {
    let base = ctx.base();
    let (m, n) = (x.mode, y.mode);
    let pairing = base.form_basis(x.base, y.base).clone();
    let one = LaurentSeries::one();
    match (x.sector, y.sector) {
        (Sector::Plain, Sector::Plain) => {
            let mut terms = structure_terms(ctx, x.base, y.base, Sector::Plain, m + n, &one);
            let mut central = LaurentSeries::zero();
            if m + n == 0 {
                central = LaurentSeries::constant(&Scalar::from_integer(m) * &pairing);
            }
            // keep canonical order stable for downstream consumers
            terms.sort_by_key(|(g, _)| *g);
            GenBracket { terms, central }
        }
        (Sector::Plain, Sector::Copied) | (Sector::Copied, Sector::Plain) => {
            let terms = structure_terms(ctx, x.base, y.base, Sector::Copied, m + n, &one);
            GenBracket {
                terms,
                central: LaurentSeries::zero(),
            }
        }
        (Sector::Copied, Sector::Copied) => {
            let mut terms = Vec::new();
            for (d, pd) in ctx.p.terms() {
                let weight = LaurentSeries::constant(pd.clone());
                terms.extend(structure_terms(
                    ctx,
                    x.base,
                    y.base,
                    Sector::Plain,
                    m + n + d,
                    &weight,
                ));
            }
            terms.sort_by_key(|(g, _)| *g);
            let mut central = LaurentSeries::zero();
            let s = -m - n;
            if s >= 0 {
                // (1/2)(m-n) p_{-m-n} <a,b> k
                let ps = ctx.p.coeff(s).expect("p is exact");
                let value = &(&Scalar::from_ratio(1, 2) * &Scalar::from_integer(m - n))
                    * &(&ps * &pairing);
                central = LaurentSeries::constant(value);
            }
            GenBracket { terms, central }
        }
        _ => GenBracket::empty(),
    }
}

fn bracket_gen_check(ctx: &AlgebraContext, x: &GenMode, y: &GenMode) -> GenBracket {
    let base = ctx.base();
    let (m, n) = (x.mode, y.mode);
    let pairing = base.form_basis(x.base, y.base).clone();
    let one = LaurentSeries::one();
    match (x.sector, y.sector) {
        (Sector::Plain, Sector::Plain) => {
            let mut terms = structure_terms(ctx, x.base, y.base, Sector::Plain, m + n, &one);
            terms.sort_by_key(|(g, _)| *g);
            let mut central = LaurentSeries::zero();
            if m + n == 0 {
                central = LaurentSeries::constant(&Scalar::from_integer(m) * &pairing);
            }
            GenBracket { terms, central }
        }
        (Sector::Plain, Sector::Copied) | (Sector::Copied, Sector::Plain) => {
            let terms = structure_terms(ctx, x.base, y.base, Sector::Copied, m + n, &one);
            GenBracket {
                terms,
                central: LaurentSeries::zero(),
            }
        }
        (Sector::Copied, Sector::Copied) => {
            let mut terms = Vec::new();
            let deg = ctx.p_degree().max(0) as u32;
            for k in 0..=deg {
                let weight = ctx.p_shift_term(k);
                if weight.is_zero() {
                    continue;
                }
                terms.extend(structure_terms(
                    ctx,
                    x.base,
                    y.base,
                    Sector::Plain,
                    m + n + k as i64,
                    &weight,
                ));
            }
            terms.sort_by_key(|(g, _)| *g);
            let mut central = LaurentSeries::zero();
            let s = -m - n;
            if s >= 0 {
                // (1/2)(m-n) p^(s)(z)/s! <a,b> k
                let shift = ctx.p_shift_term(s as u32);
                let value = &(&Scalar::from_ratio(1, 2) * &Scalar::from_integer(m - n)) * &pairing;
                central = shift.scale(&value);
            }
            GenBracket { terms, central }
        }
        _ => GenBracket::empty(),
    }
}

/// The mode-level bracket of two basis generators in hat-g_p or
/// check-g_p, packaged as a [`CurrentElement`].
pub fn bracket_modes(
    ctx: &AlgebraContext,
    x: GenMode,
    y: GenMode,
) -> VfResult<CurrentElement> {
    if !matches!(ctx.kind(), AlgebraKind::HatGp | AlgebraKind::CheckGp) {
        return Err(VfError::Context(
            "bracket_modes is defined for hat-g_p and check-g_p".into(),
        ));
    }
    let br = bracket_gen(ctx, &x, &y)?;
    let mut out = CurrentElement::zero(ctx.kind());
    for (g, c) in br.terms {
        out.add_term(g, c);
    }
    out.add_central(&br.central);
    Ok(out)
}

/// Bilinear extension of the brackets to whole elements. For K(g,p) this
/// is the five-case coefficient bracket with the central output kept raw
/// (understood modulo dR); for the others it multiplies through the
/// generator closed forms.
pub fn bracket_elements(
    ctx: &AlgebraContext,
    x: &CurrentElement,
    y: &CurrentElement,
) -> VfResult<CurrentElement> {
    if x.kind() != ctx.kind() || y.kind() != ctx.kind() {
        return Err(VfError::Context("bracket of mismatched algebra elements".into()));
    }
    let mut out = CurrentElement::zero(ctx.kind());
    if ctx.kind() == AlgebraKind::Kgp {
        for (gx, f) in x.terms() {
            for (gy, g) in y.terms() {
                bracket_kgp_pair(ctx, gx, f, gy, g, &mut out);
            }
        }
        // central parts bracket to zero
        return Ok(out);
    }
    for (gx, cx) in x.terms() {
        for (gy, cy) in y.terms() {
            let weight = cx.mul(cy);
            let br = bracket_gen(ctx, gx, gy)?;
            for (g, c) in br.terms {
                out.add_term(g, c.mul(&weight));
            }
            out.add_central(&br.central.mul(&weight));
        }
    }
    Ok(out)
}

/// One K(g,p) generator-pair bracket: `[f(xi) u (x) t^m, g(xi) v (x) t^n]`
/// by the five displayed cases.
fn bracket_kgp_pair(
    ctx: &AlgebraContext,
    gx: &GenMode,
    f: &LaurentSeries,
    gy: &GenMode,
    g: &LaurentSeries,
    out: &mut CurrentElement,
) {
    let (m, n) = (gx.mode, gy.mode);
    let pairing = ctx.base().form_basis(gx.base, gy.base).clone();
    let fg = f.mul(g);
    match (gx.sector, gy.sector) {
        (Sector::Plain, Sector::Plain) => {
            for (gmode, c) in structure_terms(ctx, gx.base, gy.base, Sector::Plain, m + n, &fg) {
                out.add_term(gmode, c);
            }
            if !pairing.is_zero() {
                // <a,b> f' g k t^{m+n} + m <a,b> f g k t^{m+n-1}
                out.add_central_mode(m + n, &f.derive().mul(g).scale(&pairing));
                out.add_central_mode(
                    m + n - 1,
                    &fg.scale(&(&Scalar::from_integer(m) * &pairing)),
                );
            }
        }
        (Sector::Plain, Sector::Copied) | (Sector::Copied, Sector::Plain) => {
            for (gmode, c) in structure_terms(ctx, gx.base, gy.base, Sector::Copied, m + n, &fg) {
                out.add_term(gmode, c);
            }
        }
        (Sector::Copied, Sector::Copied) => {
            let fgp = fg.mul(&ctx.p);
            for (gmode, c) in structure_terms(ctx, gx.base, gy.base, Sector::Plain, m + n, &fgp) {
                out.add_term(gmode, c);
            }
            if !pairing.is_zero() {
                // <a,b> f' g p k t^{m+n} + (1/2) <a,b> f g p' k t^{m+n}
                //   + m <a,b> f g p k t^{m+n-1}
                let t1 = f.derive().mul(g).mul(&ctx.p).scale(&pairing);
                let t2 = fg
                    .mul(&ctx.p.derive())
                    .scale(&(&Scalar::from_ratio(1, 2) * &pairing));
                out.add_central_mode(m + n, &t1.add(&t2));
                out.add_central_mode(
                    m + n - 1,
                    &fgp.scale(&(&Scalar::from_integer(m) * &pairing)),
                );
            }
        }
        _ => {}
    }
}

// ---------------------------------------------------------------------
// Derivations and the filtration
// ---------------------------------------------------------------------

/// The canonical derivation of the algebra: d on K(l), D on K(g,p),
/// D-check on check-g_p.
pub fn derivation(ctx: &AlgebraContext, x: &CurrentElement) -> VfResult<CurrentElement> {
    if x.kind() != ctx.kind() {
        return Err(VfError::Context("derivation of a mismatched element".into()));
    }
    let mut out = CurrentElement::zero(ctx.kind());
    match ctx.kind() {
        AlgebraKind::Kl => {
            // d(u_n) = -n u_{n-1} on both beta~ and c~
            for (g, c) in x.terms() {
                out.add_term(
                    GenMode::new(g.sector, g.base, g.mode - 1),
                    c.scale(&Scalar::from_integer(-g.mode)),
                );
            }
        }
        AlgebraKind::Kgp => {
            // D(u (x) t^n) = -n u (x) t^{n-1}, central modes included
            for (g, c) in x.terms() {
                out.add_term(
                    GenMode::new(g.sector, g.base, g.mode - 1),
                    c.scale(&Scalar::from_integer(-g.mode)),
                );
            }
            for (mode, c) in x.central_mode_part() {
                out.add_central_mode(mode - 1, &c.scale(&Scalar::from_integer(-mode)));
            }
        }
        AlgebraKind::CheckGp => {
            // D-check: f(z) u t^n -> f'(z) u t^n - n f(z) u t^{n-1};
            // f(z) k -> f'(z) k
            for (g, c) in x.terms() {
                out.add_term(*g, c.derive());
                out.add_term(
                    GenMode::new(g.sector, g.base, g.mode - 1),
                    c.scale(&Scalar::from_integer(-g.mode)),
                );
            }
            out.add_central(&x.central_part().derive());
        }
        other => {
            return Err(VfError::Context(format!(
                "no derivation is defined on {other:?}"
            )))
        }
    }
    Ok(out)
}

/// Largest n with x in the n-th filtration piece of check-g_p: the
/// minimum term mode, with a nonzero central part forcing <= 0. `None`
/// for the zero element (degree +infinity).
pub fn filtration_degree(x: &CurrentElement) -> VfResult<Option<i64>> {
    if x.kind() != AlgebraKind::CheckGp {
        return Err(VfError::Context(
            "the filtration is defined on check-g_p".into(),
        ));
    }
    let mut deg: Option<i64> = None;
    for (g, c) in x.terms() {
        if c.known_zero() {
            continue;
        }
        deg = Some(match deg {
            None => g.mode,
            Some(d) => d.min(g.mode),
        });
    }
    if !x.central_part().known_zero() {
        deg = Some(match deg {
            None => 0,
            Some(d) => d.min(0),
        });
    }
    Ok(deg)
}

// ---------------------------------------------------------------------
// dR reduction for the K(g,p) central part
// ---------------------------------------------------------------------

/// Which cokernel coordinate of the weight-s reduction an obstruction
/// lives at. `Lower` pairs against the functional anchored at xi-exponent
/// a = -1; `Upper` (present only for weights s >= -1) against the one
/// anchored at a = s+1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ObstructionSite {
    Lower,
    Upper,
}

impl fmt::Display for ObstructionSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObstructionSite::Lower => write!(f, "a=-1"),
            ObstructionSite::Upper => write!(f, "a=s+1"),
        }
    }
}

/// Canonical record of the class of a central element in R/dR: the
/// cokernel coordinates per weight, plus the weight window that the input
/// precision certifies. Zero obstruction on every certified weight means
/// membership in dR (within the window).
#[derive(Clone, PartialEq, Debug)]
pub struct DrObstruction {
    entries: BTreeMap<(i64, ObstructionSite), Scalar>,
    /// Weights >= this bound could not be decided. None: fully certified.
    certified_below: Option<i64>,
}

impl DrObstruction {
    pub fn entries(&self) -> impl Iterator<Item = (&(i64, ObstructionSite), &Scalar)> {
        self.entries.iter()
    }

    pub fn certified_below(&self) -> Option<i64> {
        self.certified_below
    }

    pub fn fully_certified(&self) -> bool {
        self.certified_below.is_none()
    }

    /// No nonzero obstruction among the certified weights.
    pub fn known_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Membership in dR, certified outright (exact input, no obstruction).
    pub fn is_zero_certified(&self) -> bool {
        self.known_zero() && self.fully_certified()
    }
}

impl fmt::Display for DrObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            write!(f, "zero obstruction")?;
        } else {
            let mut first = true;
            for ((s, site), v) in &self.entries {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "weight {s} [{site}]: {v}")?;
            }
        }
        if let Some(b) = self.certified_below {
            write!(f, " (certified for weights < {b})")?;
        }
        Ok(())
    }
}

/// Decide membership of a central element `sum_n f_n(xi) k (x) t^n` in dR.
///
/// The element is split along the weight grading (weight s on the
/// monomial xi^a t^n is a+n, and d lowers it by exactly one). Within
/// weight s, solving d(h) = g is the triangular recurrence
/// `(a+1) h_{a+1} + (s+1-a) h_a = g_a`, which is singular at a = -1 and
/// a = s+1; the cokernel is spanned by one functional anchored at each
/// singular index (the upper one exists only for s >= -1). The returned
/// record holds the pairings of the input against those functionals.
pub fn reduce_mod_dr(central: &BTreeMap<i64, LaurentSeries>) -> VfResult<DrObstruction> {
    // Per-weight slices g_a, plus the certification bound: weight s is
    // fully known iff s < n + cap(f_n) for every constituent series.
    let mut slices: BTreeMap<i64, BTreeMap<i64, Scalar>> = BTreeMap::new();
    let mut certified_below: Option<i64> = None;
    for (&n, f) in central {
        if let Cap::Finite(c) = f.cap() {
            let bound = n + c;
            certified_below = Some(match certified_below {
                None => bound,
                Some(b) => b.min(bound),
            });
        }
        for (a, coeff) in f.terms() {
            let s = a + n;
            slices
                .entry(s)
                .or_default()
                .entry(a)
                .and_modify(|v| *v += coeff)
                .or_insert_with(|| coeff.clone());
        }
    }
    let mut entries = BTreeMap::new();
    for (&s, slice) in &slices {
        if let Some(bound) = certified_below {
            if s >= bound {
                // unknown coefficients could alter this weight; skip it
                continue;
            }
        }
        let lower = pair_lower_functional(s, slice);
        if !lower.is_zero() {
            entries.insert((s, ObstructionSite::Lower), lower);
        }
        if s >= -1 {
            let upper = pair_upper_functional(s, slice);
            if !upper.is_zero() {
                entries.insert((s, ObstructionSite::Upper), upper);
            }
        }
    }
    Ok(DrObstruction {
        entries,
        certified_below,
    })
}

/// Pairing with the cokernel functional anchored at a = -1:
/// phi_{-1} = 1 and phi_{b-1} = -((s+1-b)/b) phi_b going down.
fn pair_lower_functional(s: i64, slice: &BTreeMap<i64, Scalar>) -> Scalar {
    let min_a = match slice.keys().next() {
        Some(&a) => a,
        None => return Scalar::zero(),
    };
    let mut total = Scalar::zero();
    let mut phi = Scalar::one();
    let mut b = -1i64;
    while b >= min_a {
        if let Some(g) = slice.get(&b) {
            total += &(&phi * g);
        }
        // phi at b-1
        phi = &phi
            * &(&Scalar::from_integer(-(s + 1 - b)) / &Scalar::from_integer(b));
        if phi.is_zero() {
            break;
        }
        b -= 1;
    }
    total
}

/// Pairing with the cokernel functional anchored at a = s+1 (weights
/// s >= -1 only): phi_{s+1} = 1 and phi_b = -(b/(s+1-b)) phi_{b-1} going
/// up.
fn pair_upper_functional(s: i64, slice: &BTreeMap<i64, Scalar>) -> Scalar {
    let max_a = match slice.keys().next_back() {
        Some(&a) => a,
        None => return Scalar::zero(),
    };
    let mut total = Scalar::zero();
    let mut phi = Scalar::one();
    let mut b = s + 1;
    while b <= max_a {
        if let Some(g) = slice.get(&b) {
            total += &(&phi * g);
        }
        let next = b + 1;
        // phi at next
        phi = &phi
            * &(&Scalar::from_integer(-next) / &Scalar::from_integer(s + 1 - next));
        b = next;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebraSpec;

    fn s(n: i64) -> Scalar {
        Scalar::from_integer(n)
    }

    fn sl2_hat(beta: i64) -> AlgebraContext {
        let p = AlgebraContext::elliptic_p(&s(beta));
        AlgebraContext::hat_gp(LieAlgebraSpec::sl2(), p).unwrap()
    }

    fn sl2_check(beta: i64) -> AlgebraContext {
        let p = AlgebraContext::elliptic_p(&s(beta));
        AlgebraContext::check_gp(LieAlgebraSpec::sl2(), p).unwrap()
    }

    #[test]
    fn hf_bracket_examples() {
        // f = 1: [beta_1, beta_-1] = c
        let ctx = AlgebraContext::heisenberg(LaurentSeries::one());
        let r = bracket_hf(&ctx, 1, -1).unwrap();
        assert_eq!(r.central_part(), &LaurentSeries::one());
        // [beta_0, beta_0] = 0
        assert!(bracket_hf(&ctx, 0, 0).unwrap().is_zero_known());
        // f = z: [beta_1, beta_0] = (1/2)(1-0) f_{-1} c = 0 since f_{-1} = 0
        let ctx_z = AlgebraContext::heisenberg(LaurentSeries::monomial(1, s(1)));
        assert!(bracket_hf(&ctx_z, 1, 0).unwrap().is_zero_known());
        // capped f hides the needed coefficient: [beta_-1, beta_-2] needs f_3
        let capped = LaurentSeries::monomial(1, s(1)).truncated(2);
        let ctx_c = AlgebraContext::heisenberg(capped);
        assert!(bracket_hf(&ctx_c, -1, -2).is_err());
    }

    #[test]
    fn kl_bracket_examples() {
        let ctx = AlgebraContext::k_ell(s(2));
        // [b~_1, b~_0] = (l/2)(1) c~_0 = c~_0 at l = 2
        let r = bracket_kl(&ctx, Sector::Beta, 1, Sector::Beta, 0);
        let terms: Vec<_> = r.terms().collect();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, &GenMode::new(Sector::CTilde, 0, 0));
        assert_eq!(terms[0].1.as_constant().unwrap(), s(1));
        // central c~ kills everything
        assert!(bracket_kl(&ctx, Sector::CTilde, 3, Sector::Beta, 0).is_zero_known());
        assert!(bracket_kl(&ctx, Sector::Beta, 2, Sector::Beta, 2).is_zero_known());
    }

    #[test]
    fn hat_bracket_examples() {
        let ctx = sl2_hat(0); // p = z^3 + z
        let e = |m| GenMode::new(Sector::Plain, 0, m);
        let f = |m| GenMode::new(Sector::Plain, 2, m);
        let e1 = |m| GenMode::new(Sector::Copied, 0, m);
        let f1 = |m| GenMode::new(Sector::Copied, 2, m);

        // [e(1), f(-1)] = h(0) + k
        let r = bracket_modes(&ctx, e(1), f(-1)).unwrap();
        let terms: Vec<_> = r.terms().collect();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, &GenMode::new(Sector::Plain, 1, 0));
        assert_eq!(terms[0].1.as_constant().unwrap(), s(1));
        assert_eq!(r.central_part().as_constant().unwrap(), s(1));

        // [e1(0), f1(-1)] = h(2) + h(0) + (1/2)k
        let r = bracket_modes(&ctx, e1(0), f1(-1)).unwrap();
        let terms: Vec<_> = r.terms().collect();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].0, &GenMode::new(Sector::Plain, 1, 0));
        assert_eq!(terms[1].0, &GenMode::new(Sector::Plain, 1, 2));
        assert_eq!(
            r.central_part().as_constant().unwrap(),
            Scalar::from_ratio(1, 2)
        );

        // mixed sector never has a central term: [e(m), f1(n)] = h1(m+n)
        let r = bracket_modes(&ctx, e(2), f1(-5)).unwrap();
        assert!(r.central_part().is_zero());
        let terms: Vec<_> = r.terms().collect();
        assert_eq!(terms[0].0, &GenMode::new(Sector::Copied, 1, -3));
    }

    #[test]
    fn check_bracket_central_is_shifted() {
        let ctx = sl2_check(0); // p = z^3 + z
        let e1 = GenMode::new(Sector::Copied, 0, 1);
        let f1 = GenMode::new(Sector::Copied, 2, -1);
        // central term of [e1(1), f1(-1)] is (1/2)(1-(-1)) p(z) = p(z)
        let r = bracket_modes(&ctx, e1, f1).unwrap();
        assert_eq!(r.central_part(), ctx.p());
    }

    #[test]
    fn derivation_examples() {
        // Kl: d(b~_3) = -3 b~_2
        let kl = AlgebraContext::k_ell(s(1));
        let x = CurrentElement::generator(AlgebraKind::Kl, GenMode::new(Sector::Beta, 0, 3));
        let d = derivation(&kl, &x).unwrap();
        let terms: Vec<_> = d.terms().collect();
        assert_eq!(terms[0].0, &GenMode::new(Sector::Beta, 0, 2));
        assert_eq!(terms[0].1.as_constant().unwrap(), s(-3));

        // check: D(z a t^2) = a t^2 - 2 z a t^1
        let ck = sl2_check(0);
        let x = CurrentElement::term(
            AlgebraKind::CheckGp,
            GenMode::new(Sector::Plain, 0, 2),
            LaurentSeries::monomial(1, s(1)),
        );
        let d = derivation(&ck, &x).unwrap();
        let mut iter = d.terms();
        let (g1, c1) = iter.next().unwrap();
        assert_eq!(g1, &GenMode::new(Sector::Plain, 0, 1));
        assert_eq!(c1, &LaurentSeries::monomial(1, s(-2)));
        let (g2, c2) = iter.next().unwrap();
        assert_eq!(g2, &GenMode::new(Sector::Plain, 0, 2));
        assert_eq!(c2, &LaurentSeries::one());

        // check: D(f(z) k) = f'(z) k
        let x = CurrentElement::central(AlgebraKind::CheckGp, LaurentSeries::monomial(2, s(1)));
        let d = derivation(&ck, &x).unwrap();
        assert_eq!(d.central_part(), &LaurentSeries::monomial(1, s(2)));
    }

    #[test]
    fn filtration_examples() {
        let x = CurrentElement::generator(AlgebraKind::CheckGp, GenMode::new(Sector::Plain, 0, 5));
        assert_eq!(filtration_degree(&x).unwrap(), Some(5));
        let k = CurrentElement::central(AlgebraKind::CheckGp, LaurentSeries::one());
        assert_eq!(filtration_degree(&k).unwrap(), Some(0));
        let y = x.add(&CurrentElement::generator(
            AlgebraKind::CheckGp,
            GenMode::new(Sector::Copied, 1, -1),
        ));
        assert_eq!(filtration_degree(&y).unwrap(), Some(-1));
        assert_eq!(
            filtration_degree(&CurrentElement::zero(AlgebraKind::CheckGp)).unwrap(),
            None
        );
    }

    #[test]
    fn check_bracket_at_z_zero_is_hat_bracket() {
        // substituting z = 0 into the check-g_p structure data recovers
        // hat-g_p: p^(k)(0)/k! is the x^k coefficient of p
        let hat = sl2_hat(1);
        let check = sl2_check(1);
        for (sx, sy) in [
            (Sector::Plain, Sector::Plain),
            (Sector::Plain, Sector::Copied),
            (Sector::Copied, Sector::Copied),
        ] {
            for m in -4..=4 {
                for n in -4..=4 {
                    let x = GenMode::new(sx, 0, m);
                    let y = GenMode::new(sy, 2, n);
                    let h = bracket_modes(&hat, x, y).unwrap();
                    let c = bracket_modes(&check, x, y).unwrap();
                    for (g, coeff) in c.terms() {
                        let at_zero = coeff.coeff(0).unwrap();
                        let hat_coeff = h
                            .terms()
                            .find(|(hg, _)| *hg == g)
                            .map(|(_, hc)| hc.as_constant().unwrap())
                            .unwrap_or_else(Scalar::zero);
                        assert_eq!(at_zero, hat_coeff, "term {g:?} at ({m},{n})");
                    }
                    assert_eq!(
                        c.central_part().coeff(0).unwrap(),
                        h.central_part().as_constant().unwrap_or_else(Scalar::zero),
                        "central at ({m},{n})"
                    );
                }
            }
        }
    }

    #[test]
    fn abelian_copied_sector_is_heisenberg() {
        // over the 1-dim abelian algebra the copied-sector bracket of
        // hat-g_p collapses to the H(p) relation
        let p = LaurentSeries::from_terms([(0, s(2)), (2, s(-1)), (3, s(1))]);
        let hat = AlgebraContext::hat_gp(LieAlgebraSpec::abelian1(), p.clone()).unwrap();
        let hf = AlgebraContext::heisenberg(p);
        for m in -5..=5 {
            for n in -5..=5 {
                let a1m = GenMode::new(Sector::Copied, 0, m);
                let a1n = GenMode::new(Sector::Copied, 0, n);
                let hat_bracket = bracket_modes(&hat, a1m, a1n).unwrap();
                assert_eq!(hat_bracket.terms().count(), 0);
                let hf_bracket = bracket_hf(&hf, m, n).unwrap();
                assert_eq!(
                    hat_bracket.central_part(),
                    hf_bracket.central_part(),
                    "modes ({m},{n})"
                );
            }
        }
    }

    #[test]
    fn dr_reduction_known_cases() {
        // k (x) t^0 = d(k (x) t^1) is in dR
        let mut central = BTreeMap::new();
        central.insert(0i64, LaurentSeries::one());
        let r = reduce_mod_dr(&central).unwrap();
        assert!(r.is_zero_certified(), "{r}");

        // the spanning set f' k t^n + n f k t^{n-1} is in dR
        let f = LaurentSeries::from_terms([(-2, s(3)), (0, s(1)), (4, s(-2))]);
        for n in [-3i64, 0, 2] {
            let mut central = BTreeMap::new();
            central.insert(n, f.derive());
            let prev = f.scale(&s(n));
            if !prev.is_zero() {
                central.insert(n - 1, prev);
            }
            let r = reduce_mod_dr(&central).unwrap();
            assert!(r.is_zero_certified(), "n = {n}: {r}");
        }

        // k (x) t^{-1} survives
        let mut central = BTreeMap::new();
        central.insert(-1i64, LaurentSeries::one());
        let r = reduce_mod_dr(&central).unwrap();
        assert!(!r.known_zero());
        let entries: Vec<_> = r.entries().collect();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].0, &(-1i64, ObstructionSite::Upper));
        assert_eq!(entries[0].1, &s(1));
    }

    #[test]
    fn dr_reduction_certification_window() {
        // A truncated series: membership certified only below the window.
        let f = LaurentSeries::monomial(0, s(1)).truncated(4);
        let mut central = BTreeMap::new();
        central.insert(0i64, f.derive()); // f' known zero below cap 3
        let r = reduce_mod_dr(&central).unwrap();
        assert!(r.known_zero());
        assert!(!r.fully_certified());
        assert_eq!(r.certified_below(), Some(3));
    }

    #[test]
    fn kgp_skew_defect_reduces_to_zero() {
        let p = LaurentSeries::from_terms([(3, s(1)), (1, s(1))]);
        let ctx = AlgebraContext::kgp(LieAlgebraSpec::sl2(), p);
        let f = LaurentSeries::from_terms([(-1, s(2)), (2, s(1))]);
        let g = LaurentSeries::from_terms([(0, s(1)), (1, s(-1))]);
        let x = CurrentElement::term(
            AlgebraKind::Kgp,
            GenMode::new(Sector::Copied, 0, 2),
            f,
        );
        let y = CurrentElement::term(
            AlgebraKind::Kgp,
            GenMode::new(Sector::Copied, 2, -1),
            g,
        );
        let xy = bracket_elements(&ctx, &x, &y).unwrap();
        let yx = bracket_elements(&ctx, &y, &x).unwrap();
        let defect = xy.add(&yx);
        assert!(defect.terms().all(|(_, c)| c.known_zero()));
        let record = defect.central_obstruction().unwrap();
        assert!(record.is_zero_certified(), "{record}");
    }
}
