//! Formal-distribution calculus on a module: operator series (elements of
//! Hom(W, W((x)))), locality orders, residue n-th products, and the
//! state-field maps Y (shift rule for C((z)) scalars) and Y_W (type-zero
//! substitution rule).
//!
//! Every operator series is lazy: a mode function plus a per-vector
//! certificate bound N(v) with `mode(n) v = 0` for all `n >= N(v)`. The
//! n-th product
//!
//! `(A_n B)_m v = sum_i (-1)^i C(n,i) A_{n-i} B_{m+i} v
//!              - sum_i (-1)^{n-i} C(n,i) B_{m+n-i} A_i v`
//!
//! is the residue formula coefficient by coefficient; both sums are
//! finite on each vector thanks to the certificates. Series equalities
//! are only ever certified on explicit finite windows.

use crate::current::{GenMode, Sector};
use crate::error::{VfError, VfResult};
use crate::scalar::{binomial, Scalar};
use crate::series::{Cap, LaurentSeries};
use crate::vacuum::{apply_mode, restrictedness_bound, ModuleContext, PbwVector};
use std::collections::BTreeMap;
use std::sync::Arc;

type ApplyFn = dyn Fn(i64, &PbwVector) -> VfResult<PbwVector> + Send + Sync;
type BoundFn = dyn Fn(&PbwVector) -> VfResult<i64> + Send + Sync;

/// A lazy operator series `A(x) = sum_n A_n x^{-n-1}` on a fixed module.
#[derive(Clone)]
pub struct OperatorSeries {
    label: String,
    apply: Arc<ApplyFn>,
    bound: Arc<BoundFn>,
}

impl OperatorSeries {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// The mode A_n applied to a vector.
    pub fn mode(&self, n: i64, v: &PbwVector) -> VfResult<PbwVector> {
        (self.apply)(n, v)
    }

    /// A certificate N with `A_n v = 0` for all n >= N.
    pub fn bound(&self, v: &PbwVector) -> VfResult<i64> {
        (self.bound)(v)
    }

    /// The generating series of a current-algebra generator acting on the
    /// module.
    pub fn generator(ctx: Arc<ModuleContext>, sector: Sector, base: usize) -> Self {
        let ctx_apply = ctx.clone();
        let ctx_bound = ctx.clone();
        let label = match sector {
            Sector::Beta => "beta(x)".to_string(),
            Sector::CTilde => "ctilde(x)".to_string(),
            _ => format!(
                "{}{}(x)",
                ctx.algebra().base().basis_names()[base],
                sector.suffix()
            ),
        };
        OperatorSeries {
            label,
            apply: Arc::new(move |n, v| apply_mode(&ctx_apply, GenMode::new(sector, base, n), v)),
            bound: Arc::new(move |v| restrictedness_bound(&ctx_bound, sector, base, v)),
        }
    }

    /// A scalar series g(x) acting by multiplication; the mode A_n
    /// multiplies by the z-series coefficient of x^{-n-1}. Covers both
    /// C((x))-scalars (constant coefficients) and series like p(z+x).
    pub fn scalar_series(label: impl Into<String>, coeffs: XSeries) -> Self {
        let coeffs_apply = coeffs.clone();
        let bound_val = coeffs.annihilation_bound();
        OperatorSeries {
            label: label.into(),
            apply: Arc::new(move |n, v| {
                let c = coeffs_apply.coeff(-n - 1)?;
                Ok(v.scale_series(&c))
            }),
            bound: Arc::new(move |_| Ok(bound_val)),
        }
    }

    /// The identity series 1_W.
    pub fn identity() -> Self {
        Self::scalar_series("1_W", XSeries::constant(LaurentSeries::one()))
    }

    /// The scalar series f(x) with f in C((z)) substituted at x.
    pub fn from_substituted(f: &LaurentSeries) -> Self {
        Self::scalar_series(
            format!("{}|z=x", f),
            XSeries::from_substitution(f),
        )
    }

    /// The multiplication series f(z+x).
    pub fn from_shifted(f: &LaurentSeries, order: u32) -> Self {
        Self::scalar_series(format!("{}(z+x)", f), XSeries::from_shift(f, order))
    }

    /// The n-th product A_n B by the residue formula.
    pub fn nth_product(a: &OperatorSeries, b: &OperatorSeries, n: i64) -> Self {
        let label = format!("({})_{}({})", a.label, n, b.label);
        let a1 = a.clone();
        let b1 = b.clone();
        let a2 = a.clone();
        let b2 = b.clone();
        OperatorSeries {
            label,
            apply: Arc::new(move |m, v| {
                let mut out = PbwVector::zero();
                // sum_i (-1)^i C(n,i) A_{n-i} B_{m+i} v
                let nb = b1.bound(v)?;
                let mut i = 0i64;
                while m + i < nb {
                    let coeff = binomial(n, i as u32);
                    if !coeff.is_zero() {
                        let sign = if i % 2 == 0 { Scalar::one() } else { Scalar::from_integer(-1) };
                        let bv = b1.mode(m + i, v)?;
                        if !bv.is_zero_exact() {
                            let abv = a1.mode(n - i, &bv)?;
                            out = out.add(&abv.scale(&(&coeff * &sign)));
                        }
                    } else if n >= 0 && i > n {
                        break; // binomial tail is identically zero
                    }
                    i += 1;
                }
                // - sum_i (-1)^{n-i} C(n,i) B_{m+n-i} A_i v
                let na = a1.bound(v)?;
                for i in 0..na.max(0) {
                    let coeff = binomial(n, i as u32);
                    if coeff.is_zero() {
                        continue;
                    }
                    let sign = if (n - i) % 2 == 0 {
                        Scalar::one()
                    } else {
                        Scalar::from_integer(-1)
                    };
                    let av = a1.mode(i, v)?;
                    if av.is_zero_exact() {
                        continue;
                    }
                    let bav = b1.mode(m + n - i, &av)?;
                    out = out.sub(&bav.scale(&(&coeff * &sign)));
                }
                Ok(out)
            }),
            bound: Arc::new(move |v| {
                let mut bound = b2.bound(v)?;
                let na = a2.bound(v)?;
                for i in 0..na.max(0) {
                    let av = a2.mode(i, v)?;
                    if av.is_zero_exact() {
                        continue;
                    }
                    bound = bound.max(b2.bound(&av)? + i - n);
                }
                Ok(bound)
            }),
        }
    }

    /// Multiplication by the shifted series f(z+x) composed with an inner
    /// series: the C((z))-scalar rule of the vertex algebra Y-map.
    pub fn mul_shifted(f: &LaurentSeries, inner: &OperatorSeries) -> Self {
        let label = format!("{}(z+x)*{}", f, inner.label);
        let inner1 = inner.clone();
        let inner2 = inner.clone();
        let f1 = f.clone();
        OperatorSeries {
            label,
            apply: Arc::new(move |m, v| {
                // (f(z+x) S(x))_m = sum_{k>=0} f^(k)(z)/k! S_{m+k}
                let n_inner = inner1.bound(v)?;
                let mut out = PbwVector::zero();
                let mut k = 0i64;
                while m + k < n_inner {
                    if k >= 0 {
                        let sv = inner1.mode(m + k, v)?;
                        if !sv.is_zero_exact() {
                            let fk = f1.derive_div_factorial(k as u32);
                            out = out.add(&sv.scale_series(&fk));
                        }
                    }
                    k += 1;
                }
                Ok(out)
            }),
            bound: Arc::new(move |v| inner2.bound(v)),
        }
    }

    /// Multiplication by the substituted series f(x) composed with an
    /// inner series: the type-zero scalar rule of Y_W.
    pub fn mul_substituted(f: &LaurentSeries, inner: &OperatorSeries) -> Self {
        let label = format!("{}|z=x*{}", f, inner.label);
        let inner1 = inner.clone();
        let inner2 = inner.clone();
        let f1 = f.clone();
        let f2 = f.clone();
        OperatorSeries {
            label,
            apply: Arc::new(move |m, v| {
                // (f(x) S(x))_m = sum_j f_j S_{m+j}
                let n_inner = inner1.bound(v)?;
                let mut out = PbwVector::zero();
                let j_lo = match f1.val() {
                    Some(v) => v,
                    None => match f1.cap() {
                        Cap::Finite(c) => c,
                        Cap::Infinite => return Ok(out), // exact zero
                    },
                };
                for j in j_lo..(n_inner - m).max(j_lo) {
                    let sv = inner1.mode(m + j, v)?;
                    if sv.is_zero_exact() {
                        continue;
                    }
                    let fj = f1.coeff(j).map_err(|_| {
                        VfError::Precision(format!(
                            "substitution rule needs the z^{j} coefficient of a capped series"
                        ))
                    })?;
                    if !fj.is_zero() {
                        out = out.add(&sv.scale(&fj));
                    }
                }
                Ok(out)
            }),
            bound: Arc::new(move |v| {
                let j_lo = f2.val().unwrap_or_default();
                Ok(inner2.bound(v)? - j_lo)
            }),
        }
    }

    /// Expand the series against a target vector over a window of modes.
    pub fn expansion(&self, w: &PbwVector, mode_lo: i64, mode_hi: i64) -> VfResult<OperatorExpansion> {
        let mut coeffs = BTreeMap::new();
        for m in mode_lo..=mode_hi {
            let r = self.mode(m, w)?;
            if !r.is_zero_exact() {
                coeffs.insert(m, r);
            }
        }
        Ok(OperatorExpansion {
            coeffs,
            mode_lo,
            mode_hi,
        })
    }
}

/// A truncated series in x with z-series coefficients, keyed by the x
/// exponent.
#[derive(Clone, PartialEq, Debug)]
pub struct XSeries {
    coeffs: BTreeMap<i64, LaurentSeries>,
    cap: Cap,
}

impl XSeries {
    pub fn constant(c: LaurentSeries) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        XSeries {
            coeffs,
            cap: Cap::Infinite,
        }
    }

    /// f(x) for f in C((z)): the x-exponents are f's own exponents and
    /// the coefficients are constants; a finite z-cap becomes a finite
    /// x-cap.
    pub fn from_substitution(f: &LaurentSeries) -> Self {
        let coeffs = f
            .terms()
            .map(|(e, c)| (e, LaurentSeries::constant(c.clone())))
            .collect();
        XSeries {
            coeffs,
            cap: f.cap(),
        }
    }

    /// f(z+x) up to x^order.
    pub fn from_shift(f: &LaurentSeries, order: u32) -> Self {
        let sh = f.shift(order);
        let coeffs = (0..=order)
            .map(|k| (k as i64, sh.term(k).clone()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let cap = if f.is_exact() && f.is_polynomial() && order as i64 >= f.terms().map(|(e, _)| e).max().unwrap_or(0)
        {
            Cap::Infinite
        } else {
            Cap::Finite(order as i64 + 1)
        };
        XSeries { coeffs, cap }
    }

    pub fn coeff(&self, e: i64) -> VfResult<LaurentSeries> {
        if !self.cap.covers(e) {
            return Err(VfError::Precision(format!(
                "x^{e} coefficient beyond the series window"
            )));
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(LaurentSeries::zero))
    }

    /// N with mode(n) = 0 for all n >= N: modes live at x^{-n-1}, so N is
    /// minus the lowest x-exponent with a nonzero coefficient.
    fn annihilation_bound(&self) -> i64 {
        match self.coeffs.keys().next() {
            Some(&e) => -e,
            None => 0,
        }
    }
}

/// The result of expanding an operator series against one vector over a
/// window of modes: mode -> coefficient vector, with the window recorded.
#[derive(Clone, PartialEq, Debug)]
pub struct OperatorExpansion {
    pub coeffs: BTreeMap<i64, PbwVector>,
    pub mode_lo: i64,
    pub mode_hi: i64,
}

impl OperatorExpansion {
    pub fn coeff(&self, mode: i64) -> PbwVector {
        self.coeffs.get(&mode).cloned().unwrap_or_else(PbwVector::zero)
    }

    pub fn is_zero_known(&self) -> bool {
        self.coeffs.values().all(PbwVector::is_zero_known)
    }
}

/// Window of mode pairs for locality and commutator checks.
#[derive(Clone, Copy, Debug)]
pub struct ModeWindow {
    pub lo: i64,
    pub hi: i64,
}

impl ModeWindow {
    pub fn new(lo: i64, hi: i64) -> Self {
        ModeWindow { lo, hi }
    }

    pub fn symmetric(radius: i64) -> Self {
        ModeWindow {
            lo: -radius,
            hi: radius,
        }
    }
}

/// One failed coefficient check, with enough data to reproduce it.
#[derive(Clone, Debug)]
pub struct Witness {
    pub description: String,
}

/// The defect `sum_j (-1)^j C(k,j) [A_{m+k-j}, B_{n+j}] v` — the
/// (x^{-m-1}, z^{-n-1}) coefficient of `(x-z)^k [A(x), B(z)] v`.
pub fn locality_defect(
    a: &OperatorSeries,
    b: &OperatorSeries,
    k: i64,
    m: i64,
    n: i64,
    v: &PbwVector,
) -> VfResult<PbwVector> {
    let mut out = PbwVector::zero();
    for j in 0..=k {
        let coeff = binomial(k, j as u32);
        let sign = if j % 2 == 0 { Scalar::one() } else { Scalar::from_integer(-1) };
        let w = &coeff * &sign;
        let bv = b.mode(n + j, v)?;
        if !bv.is_zero_exact() {
            out = out.add(&a.mode(m + k - j, &bv)?.scale(&w));
        }
        let av = a.mode(m + k - j, v)?;
        if !av.is_zero_exact() {
            out = out.sub(&b.mode(n + j, &av)?.scale(&w));
        }
    }
    Ok(out)
}

/// Locality order: the least k <= k_max such that the (x-z)^k-weighted
/// commutator of A and B vanishes on every probe over the given mode
/// window. Returns the order and, when k > 0, a witness for why k-1
/// fails.
pub fn locality_order(
    a: &OperatorSeries,
    b: &OperatorSeries,
    probes: &[PbwVector],
    k_max: i64,
    window: ModeWindow,
) -> VfResult<(i64, Option<Witness>)> {
    if probes.is_empty() {
        return Err(VfError::Config("locality check needs at least one probe".into()));
    }
    let mut last_witness: Option<Witness> = None;
    'order: for k in 0..=k_max {
        for (pi, v) in probes.iter().enumerate() {
            for m in window.lo..=window.hi {
                for n in window.lo..=window.hi {
                    let defect = locality_defect(a, b, k, m, n, v)?;
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
        "no locality order up to {k_max} for ({}, {}) on the window [{}, {}]",
        a.label(),
        b.label(),
        window.lo,
        window.hi
    )))
}

/// How Y treats series scalars on vectors.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum YRule {
    /// Vertex C((z))-algebra rule: Y(f(z)u, x) = f(z+x) Y(u, x).
    Shifted,
    /// Type-zero module rule: Y_W(f(z)u, x) = f(x) Y_W(u, x).
    Substituted,
}

/// The state-field map: turn a vector of the vacuum vertex algebra into
/// an operator series on the module `ops_ctx`, recursively via n-th
/// products, with the chosen scalar rule. The vector's monomials must use
/// sectors that act on `ops_ctx`.
pub fn y_series(
    ops_ctx: &Arc<ModuleContext>,
    v: &PbwVector,
    rule: YRule,
) -> VfResult<OperatorSeries> {
    let mut total: Option<OperatorSeries> = None;
    for (mono, coeff) in v.terms() {
        let mut series = OperatorSeries::identity();
        for op in mono.factors().iter().rev() {
            let gen = OperatorSeries::generator(ops_ctx.clone(), op.sector, op.base);
            series = OperatorSeries::nth_product(&gen, &series, op.mode);
        }
        let with_coeff = match rule {
            YRule::Shifted => {
                if coeff.as_constant().is_some() {
                    let c = coeff.as_constant().unwrap();
                    scaled(&series, &c)
                } else {
                    // shift order: enough x-powers to cover any later
                    // extraction; the bound keeps the sums finite anyway
                    OperatorSeries::mul_shifted(coeff, &series)
                }
            }
            YRule::Substituted => {
                if let Some(c) = coeff.as_constant() {
                    scaled(&series, &c)
                } else {
                    OperatorSeries::mul_substituted(coeff, &series)
                }
            }
        };
        total = Some(match total {
            None => with_coeff,
            Some(t) => sum(&t, &with_coeff),
        });
    }
    Ok(total.unwrap_or_else(zero_series))
}

/// Pointwise sum of two operator series.
pub fn sum(a: &OperatorSeries, b: &OperatorSeries) -> OperatorSeries {
    let (a1, b1) = (a.clone(), b.clone());
    let (a2, b2) = (a.clone(), b.clone());
    OperatorSeries {
        label: format!("{} + {}", a.label, b.label),
        apply: Arc::new(move |n, v| Ok(a1.mode(n, v)?.add(&b1.mode(n, v)?))),
        bound: Arc::new(move |v| Ok(a2.bound(v)?.max(b2.bound(v)?))),
    }
}

/// Scalar multiple of an operator series.
pub fn scaled(a: &OperatorSeries, c: &Scalar) -> OperatorSeries {
    let a1 = a.clone();
    let a2 = a.clone();
    let c1 = c.clone();
    OperatorSeries {
        label: format!("({c})*{}", a.label),
        apply: Arc::new(move |n, v| Ok(a1.mode(n, v)?.scale(&c1))),
        bound: Arc::new(move |v| a2.bound(v)),
    }
}

/// The zero series.
pub fn zero_series() -> OperatorSeries {
    OperatorSeries {
        label: "0".into(),
        apply: Arc::new(|_, _| Ok(PbwVector::zero())),
        bound: Arc::new(|_| Ok(0)),
    }
}

/// Compare two operator series on probes over a mode window; returns the
/// first witness of disagreement, if any.
pub fn series_agree(
    a: &OperatorSeries,
    b: &OperatorSeries,
    probes: &[PbwVector],
    window: ModeWindow,
) -> VfResult<Option<Witness>> {
    for (pi, v) in probes.iter().enumerate() {
        for m in window.lo..=window.hi {
            let av = a.mode(m, v)?;
            let bv = b.mode(m, v)?;
            if !av.sub(&bv).is_zero_known() {
                return Ok(Some(Witness {
                    description: format!(
                        "series '{}' and '{}' differ at mode {m} on probe #{pi}: {} vs {}",
                        a.label(),
                        b.label(),
                        av,
                        bv
                    ),
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::AlgebraContext;
    use crate::lie::LieAlgebraSpec;
    use crate::vacuum::PbwMonomial;

    fn s(v: i64) -> Scalar {
        Scalar::from_integer(v)
    }

    fn vcheck(beta: i64, ell: i64) -> Arc<ModuleContext> {
        let p = AlgebraContext::elliptic_p(&s(beta));
        ModuleContext::v_check(LieAlgebraSpec::sl2(), p, s(ell)).unwrap()
    }

    const E: usize = 0;
    const F: usize = 2;

    #[test]
    fn nth_product_with_identity() {
        let ctx = vcheck(0, 1);
        let e_series = OperatorSeries::generator(ctx.clone(), Sector::Plain, E);
        let id = OperatorSeries::identity();
        // A_{-1} 1_W = A
        let prod = OperatorSeries::nth_product(&e_series, &id, -1);
        let probe = apply_mode(&ctx, GenMode::new(Sector::Plain, F, -1), &PbwVector::one()).unwrap();
        for m in -4..4 {
            let lhs = prod.mode(m, &probe).unwrap();
            let rhs = e_series.mode(m, &probe).unwrap();
            assert_eq!(lhs, rhs, "mode {m}");
        }
        // A_n 1_W = 0 for n >= 0
        for n in 0..3 {
            let prod = OperatorSeries::nth_product(&e_series, &id, n);
            for m in -3..3 {
                assert!(prod.mode(m, &probe).unwrap().is_zero_exact());
            }
        }
    }

    #[test]
    fn nth_product_scalar_series() {
        // (p(x))_{-3} 1_W = (1/2) p''(x) = 3x - 2 beta
        let beta = Scalar::from_ratio(1, 2);
        let p = AlgebraContext::elliptic_p(&beta);
        let p_series = OperatorSeries::from_substituted(&p);
        let id = OperatorSeries::identity();
        let prod = OperatorSeries::nth_product(&p_series, &id, -3);
        let expect = p.derive_div_factorial(2); // 3x - 2 beta, read off in x
        let w = PbwVector::one();
        for m in -4..4 {
            let got = prod.mode(m, &w).unwrap();
            let want = match expect.coeff(-m - 1) {
                Ok(c) if !c.is_zero() => PbwVector::monomial(PbwMonomial::unit(), LaurentSeries::constant(c)),
                _ => PbwVector::zero(),
            };
            assert_eq!(got, want, "mode {m}");
        }
    }

    #[test]
    fn locality_of_sl2_generators() {
        let ctx = vcheck(0, 1);
        let e_series = OperatorSeries::generator(ctx.clone(), Sector::Plain, E);
        let f_series = OperatorSeries::generator(ctx.clone(), Sector::Plain, F);
        let probes = vec![
            PbwVector::one(),
            apply_mode(&ctx, GenMode::new(Sector::Plain, F, -1), &PbwVector::one()).unwrap(),
            apply_mode(&ctx, GenMode::new(Sector::Copied, E, -2), &PbwVector::one()).unwrap(),
        ];
        let window = ModeWindow::new(-3, 4);
        let (k, witness) = locality_order(&e_series, &f_series, &probes, 6, window).unwrap();
        assert_eq!(k, 2);
        assert!(witness.is_some()); // k = 1 must fail through the central term
        // [e(x), e(z)] = 0: order 0
        let (k, _) = locality_order(&e_series, &e_series, &probes, 6, window).unwrap();
        assert_eq!(k, 0);
    }

    #[test]
    fn y_creation_property() {
        // lim_{x->0} Y(v, x) 1 = v for monomial generators
        let ctx = vcheck(0, 1);
        for (sector, base) in [(Sector::Plain, E), (Sector::Copied, F)] {
            let v = apply_mode(&ctx, GenMode::new(sector, base, -1), &PbwVector::one()).unwrap();
            let y = y_series(&ctx, &v, YRule::Shifted).unwrap();
            // coefficient of x^0 is mode -1
            let at_zero = y.mode(-1, &PbwVector::one()).unwrap();
            assert_eq!(at_zero, v);
            // no poles against the vacuum
            for m in 0..4 {
                assert!(y.mode(m, &PbwVector::one()).unwrap().is_zero_exact());
            }
        }
    }

    #[test]
    fn y_vacuum_is_identity() {
        let ctx = vcheck(1, 2);
        let y = y_series(&ctx, &PbwVector::one(), YRule::Shifted).unwrap();
        let probe = apply_mode(&ctx, GenMode::new(Sector::Copied, F, -2), &PbwVector::one()).unwrap();
        for m in -4..4 {
            let got = y.mode(m, &probe).unwrap();
            if m == -1 {
                assert_eq!(got, probe);
            } else {
                assert!(got.is_zero_exact());
            }
        }
    }
}
