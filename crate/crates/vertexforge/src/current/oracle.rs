//! Independent delta-expansion oracle for the mode brackets.
//!
//! The closed forms in the parent module were derived by hand. This
//! oracle recomputes `[x(m), y(n)]` blindly from the generating-function
//! relations: the formal delta distribution is materialized as a
//! truncated double series, differentiated termwise, multiplied out, and
//! the (x1^{-m-1}, x2^{-n-1}) coefficient is extracted by brute force.
//! No mode arithmetic like `r = m+n+j` appears anywhere here.

use super::{AlgebraContext, AlgebraKind, CurrentElement, GenMode, Sector};
use crate::error::{VfError, VfResult};
use crate::scalar::Scalar;
use crate::series::LaurentSeries;
use std::collections::BTreeMap;

/// A truncated double series in (x1, x2) with exact scalar coefficients.
#[derive(Clone, Debug)]
struct BiPoly {
    coeffs: BTreeMap<(i64, i64), Scalar>,
}

impl BiPoly {
    /// The window `sum_{|k| <= half} x1^k x2^{-k-1}` of x2^{-1} delta(x1/x2).
    fn delta_window(half: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for k in -half..=half {
            coeffs.insert((k, -k - 1), Scalar::one());
        }
        BiPoly { coeffs }
    }

    /// Termwise formal d/dx2.
    fn d_dx2(&self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&(e1, e2), c) in &self.coeffs {
            if e2 == 0 {
                continue;
            }
            let d = c * &Scalar::from_integer(e2);
            if !d.is_zero() {
                coeffs.insert((e1, e2 - 1), d);
            }
        }
        BiPoly { coeffs }
    }

    /// Coefficient of x1^e1, as a Laurent polynomial in x2. Errs when the
    /// requested exponent sits at the window boundary.
    fn extract_x1(&self, e1: i64, half: i64) -> VfResult<LaurentSeries> {
        if e1.abs() >= half {
            return Err(VfError::Precision(format!(
                "delta window {half} too small for x1 exponent {e1}"
            )));
        }
        Ok(LaurentSeries::from_terms(
            self.coeffs
                .iter()
                .filter(|(&(a, _), _)| a == e1)
                .map(|(&(_, b), c)| (b, c.clone())),
        ))
    }
}

/// A truncated series in x2 whose coefficients are generator symbols with
/// z-series weights: the blind stand-in for a generating function like
/// `[a,b](x2)`.
#[derive(Clone)]
struct SymSeries {
    terms: Vec<(i64, GenMode, LaurentSeries)>,
    half: i64,
}

impl SymSeries {
    /// `u(x2) = sum_r u(r) x2^{-r-1}` over the mode window `|r| <= half`.
    fn generating(sector: Sector, base: usize, half: i64) -> Self {
        let mut terms = Vec::new();
        for r in -half..=half {
            terms.push((-r - 1, GenMode::new(sector, base, r), LaurentSeries::one()));
        }
        SymSeries { terms, half }
    }

    /// Termwise formal d/dx2 (used for the c~'(w) relation of K(l)).
    fn d_dx2(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _, _)| *e != 0)
            .map(|(e, g, c)| (e - 1, *g, c.scale(&Scalar::from_integer(*e))))
            .collect();
        SymSeries {
            terms,
            half: self.half,
        }
    }

    /// Multiply by a scalar x2-polynomial whose coefficients are z-series.
    fn mul_poly(&self, poly: &[(i64, LaurentSeries)]) -> Self {
        let mut terms = Vec::new();
        for (e, g, c) in &self.terms {
            for (pe, pc) in poly {
                terms.push((e + pe, *g, c.mul(pc)));
            }
        }
        SymSeries {
            terms,
            half: self.half,
        }
    }

    /// Coefficient of x2^e2: generator terms with their weights. Errs if
    /// a contribution comes from the edge of the mode window.
    fn extract(&self, e2: i64) -> VfResult<Vec<(GenMode, LaurentSeries)>> {
        let mut out: Vec<(GenMode, LaurentSeries)> = Vec::new();
        for (e, g, c) in &self.terms {
            if *e != e2 {
                continue;
            }
            if g.mode.abs() >= self.half - 1 {
                return Err(VfError::Precision(format!(
                    "oracle mode window {} too small (touched mode {})",
                    self.half, g.mode
                )));
            }
            out.push((*g, c.clone()));
        }
        Ok(out)
    }
}

/// Scalar x2-polynomial (with z-series coefficients) out of an exact
/// x2-Laurent polynomial.
fn scalar_poly(series: &LaurentSeries) -> Vec<(i64, LaurentSeries)> {
    series
        .terms()
        .map(|(e, c)| (e, LaurentSeries::constant(c.clone())))
        .collect()
}

/// `p(z+x2)` as an x2-polynomial with z-series coefficients.
fn shifted_poly(p: &LaurentSeries) -> Vec<(i64, LaurentSeries)> {
    let deg = p.terms().map(|(e, _)| e).max().unwrap_or(0).max(0) as u32;
    let sh = p.shift(deg);
    (0..=deg)
        .map(|k| (k as i64, sh.term(k).clone()))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// An x2-series with z-series coefficients (finite, exact).
struct ZxSeries {
    coeffs: BTreeMap<i64, LaurentSeries>,
}

impl ZxSeries {
    fn add(mut self, rhs: ZxSeries) -> ZxSeries {
        for (e, c) in rhs.coeffs {
            let entry = self.coeffs.entry(e).or_insert_with(LaurentSeries::zero);
            *entry = entry.add(&c);
        }
        self
    }

    fn scale(mut self, s: &Scalar) -> ZxSeries {
        for c in self.coeffs.values_mut() {
            *c = c.scale(s);
        }
        self
    }

    fn coeff(&self, e: i64) -> LaurentSeries {
        self.coeffs.get(&e).cloned().unwrap_or_else(LaurentSeries::zero)
    }
}

/// Multiply an x2-polynomial with z-series coefficients by an exact
/// scalar x2-Laurent polynomial.
fn mul_series_poly(poly: &[(i64, LaurentSeries)], q: &LaurentSeries) -> ZxSeries {
    let mut out: BTreeMap<i64, LaurentSeries> = BTreeMap::new();
    for (pe, pc) in poly {
        for (qe, qc) in q.terms() {
            let entry = out.entry(pe + qe).or_insert_with(LaurentSeries::zero);
            *entry = entry.add(&pc.scale(qc));
        }
    }
    ZxSeries { coeffs: out }
}

/// Blind double-residue extraction of `[x(m), y(n)]` for hat-g_p and
/// check-g_p from the displayed generating-function relations.
pub fn oracle_bracket_modes(
    ctx: &AlgebraContext,
    x: GenMode,
    y: GenMode,
) -> VfResult<CurrentElement> {
    let kind = ctx.kind();
    if !matches!(kind, AlgebraKind::HatGp | AlgebraKind::CheckGp) {
        return Err(VfError::Context(
            "the delta oracle covers hat-g_p and check-g_p".into(),
        ));
    }
    let (m, n) = (x.mode, y.mode);
    let deg = ctx.p_degree().max(0);
    let k_half = m.abs() + 2;
    let r_half = m.abs() + n.abs() + deg + 4;

    let delta0 = BiPoly::delta_window(k_half);
    let delta1 = delta0.d_dx2();
    let q0 = delta0.extract_x1(-m - 1, k_half)?;
    let q1 = delta1.extract_x1(-m - 1, k_half)?;

    let base = ctx.base();
    let pairing = base.form_basis(x.base, y.base).clone();
    let bk = base.bracket_basis(x.base, y.base);

    // the relation's multipliers for this sector pair
    let one_poly = vec![(0i64, LaurentSeries::one())];
    let (struct_sector, struct_multiplier, central_series): (
        Sector,
        Vec<(i64, LaurentSeries)>,
        Option<ZxSeries>,
    ) = match (x.sector, y.sector) {
        (Sector::Plain, Sector::Plain) => (
            Sector::Plain,
            one_poly,
            // <a,b> k d/dx2-delta
            Some(mul_series_poly(&[(0, LaurentSeries::one())], &q1).scale(&pairing)),
        ),
        (Sector::Plain, Sector::Copied) | (Sector::Copied, Sector::Plain) => {
            (Sector::Copied, one_poly, None)
        }
        (Sector::Copied, Sector::Copied) => {
            let (p_poly, dp_poly) = match kind {
                AlgebraKind::HatGp => (scalar_poly(ctx.p()), scalar_poly(&ctx.p().derive())),
                _ => (shifted_poly(ctx.p()), shifted_poly(&ctx.p().derive())),
            };
            // (1/2) <a,b> p' delta + <a,b> p d/dx2-delta
            let half_pairing = &Scalar::from_ratio(1, 2) * &pairing;
            let central = mul_series_poly(&dp_poly, &q0)
                .scale(&half_pairing)
                .add(mul_series_poly(&p_poly, &q1).scale(&pairing));
            (Sector::Plain, p_poly, Some(central))
        }
        _ => {
            return Err(VfError::Context(
                "hat/check generators live in the plain and copied sectors".into(),
            ))
        }
    };

    let mut out = CurrentElement::zero(kind);
    // structure part: multiplier(x2) * [a,b]-sector(x2) * delta
    if !bk.is_zero() {
        for (idx, coeff) in bk.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let sym = SymSeries::generating(struct_sector, idx, r_half)
                .mul_poly(&struct_multiplier)
                .mul_poly(&scalar_poly(&q0));
            for (g, c) in sym.extract(-n - 1)? {
                out = out.add(&CurrentElement::term(kind, g, c.scale(coeff)));
            }
        }
    }
    // central part: coefficient of x2^{-n-1}
    if let Some(series) = central_series {
        let c = series.coeff(-n - 1);
        if !c.is_zero() {
            out = out.add(&CurrentElement::central(kind, c));
        }
    }
    Ok(out)
}

/// Blind extraction of `[beta_m, beta_n]` in H(f) from the relation
/// `(1/2) f'(x2) delta c + f(x2) (d/dx2 delta) c`. Precision caps on f
/// propagate through the series arithmetic, so a hidden coefficient
/// surfaces as a precision error exactly as in the closed form.
pub fn oracle_bracket_hf(ctx: &AlgebraContext, m: i64, n: i64) -> VfResult<CurrentElement> {
    if ctx.kind() != AlgebraKind::Hf {
        return Err(VfError::Context("expected an H(f) context".into()));
    }
    let k_half = m.abs() + 2;
    let delta0 = BiPoly::delta_window(k_half);
    let delta1 = delta0.d_dx2();
    let q0 = delta0.extract_x1(-m - 1, k_half)?;
    let q1 = delta1.extract_x1(-m - 1, k_half)?;
    let f = ctx.f();
    let total = f
        .derive()
        .scale(&Scalar::from_ratio(1, 2))
        .mul(&q0)
        .add(&f.mul(&q1));
    let c = total.coeff(-n - 1)?;
    Ok(CurrentElement::central(
        AlgebraKind::Hf,
        LaurentSeries::constant(c),
    ))
}

/// Blind extraction of `[beta~_m, beta~_n]` in K(l) from
/// `(l/2) c~'(x2) delta + l c~(x2) (d/dx2 delta)`.
pub fn oracle_bracket_kl(ctx: &AlgebraContext, m: i64, n: i64) -> VfResult<CurrentElement> {
    if ctx.kind() != AlgebraKind::Kl {
        return Err(VfError::Context("expected a K(l) context".into()));
    }
    let k_half = m.abs() + 2;
    let r_half = m.abs() + n.abs() + 4;
    let delta0 = BiPoly::delta_window(k_half);
    let delta1 = delta0.d_dx2();
    let q0 = delta0.extract_x1(-m - 1, k_half)?;
    let q1 = delta1.extract_x1(-m - 1, k_half)?;
    let ctilde = SymSeries::generating(Sector::CTilde, 0, r_half);
    let half_ell = &Scalar::from_ratio(1, 2) * ctx.ell();
    let mut out = CurrentElement::zero(AlgebraKind::Kl);
    let first = ctilde.d_dx2().mul_poly(&scalar_poly(&q0));
    for (g, c) in first.extract(-n - 1)? {
        out = out.add(&CurrentElement::term(AlgebraKind::Kl, g, c.scale(&half_ell)));
    }
    let second = ctilde.mul_poly(&scalar_poly(&q1));
    for (g, c) in second.extract(-n - 1)? {
        out = out.add(&CurrentElement::term(AlgebraKind::Kl, g, c.scale(ctx.ell())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::{bracket_hf, bracket_kl, bracket_modes};
    use crate::lie::LieAlgebraSpec;

    fn s(v: i64) -> Scalar {
        Scalar::from_integer(v)
    }

    #[test]
    fn oracle_matches_closed_form_hat_spot() {
        let p = AlgebraContext::elliptic_p(&s(0));
        let ctx = AlgebraContext::hat_gp(LieAlgebraSpec::sl2(), p).unwrap();
        let e1 = GenMode::new(Sector::Copied, 0, 0);
        let f1 = GenMode::new(Sector::Copied, 2, -1);
        let closed = bracket_modes(&ctx, e1, f1).unwrap();
        let blind = oracle_bracket_modes(&ctx, e1, f1).unwrap();
        assert_eq!(closed, blind);
    }

    #[test]
    fn oracle_matches_closed_form_check_spot() {
        let p = AlgebraContext::elliptic_p(&Scalar::from_ratio(1, 2));
        let ctx = AlgebraContext::check_gp(LieAlgebraSpec::sl2(), p).unwrap();
        for (m, n) in [(1i64, -1i64), (0, -2), (-3, 2), (2, 2)] {
            for (sx, sy) in [
                (Sector::Plain, Sector::Plain),
                (Sector::Plain, Sector::Copied),
                (Sector::Copied, Sector::Copied),
            ] {
                let x = GenMode::new(sx, 0, m);
                let y = GenMode::new(sy, 2, n);
                let closed = bracket_modes(&ctx, x, y).unwrap();
                let blind = oracle_bracket_modes(&ctx, x, y).unwrap();
                assert_eq!(closed, blind, "sectors {sx:?} {sy:?} modes {m} {n}");
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_hf() {
        let f = LaurentSeries::from_terms([(-2, s(1)), (0, s(3)), (1, s(-1))]);
        let ctx = AlgebraContext::heisenberg(f);
        for m in -3..=3 {
            for n in -3..=3 {
                let closed = bracket_hf(&ctx, m, n).unwrap();
                let blind = oracle_bracket_hf(&ctx, m, n).unwrap();
                assert_eq!(closed, blind, "modes {m} {n}");
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_kl() {
        let ctx = AlgebraContext::k_ell(Scalar::from_ratio(3, 2));
        for m in -3..=3 {
            for n in -3..=3 {
                let closed = bracket_kl(&ctx, Sector::Beta, m, Sector::Beta, n);
                let blind = oracle_bracket_kl(&ctx, m, n).unwrap();
                assert_eq!(closed, blind, "modes {m} {n}");
            }
        }
    }

    #[test]
    fn oracle_respects_precision_caps() {
        // f = z truncated at cap 2: f_3 is hidden, so [beta_-1, beta_-2]
        // must be a precision error in the oracle too
        let capped = LaurentSeries::monomial(1, s(1)).truncated(2);
        let ctx = AlgebraContext::heisenberg(capped);
        assert!(oracle_bracket_hf(&ctx, -1, -2).is_err());
        assert!(oracle_bracket_hf(&ctx, 2, 1).is_ok());
    }
}
