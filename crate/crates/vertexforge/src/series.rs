//! Truncated formal Laurent series with exact coefficients and per-value
//! precision tracking.
//!
//! A [`LaurentSeries`] knows every coefficient below its `cap`: stored
//! entries are nonzero, everything else below the cap is zero, and
//! exponents at or above the cap are *unknown*. A series with an infinite
//! cap is an exact Laurent polynomial. Arithmetic propagates caps so that
//! no operation ever reports a coefficient it cannot actually know:
//!
//! - `add`: cap = min(cap_a, cap_b)
//! - `mul`: cap = min(val_a + cap_b, val_b + cap_a)
//!
//! Extraction past the cap is a precision error, never a guess.

use crate::error::{VfError, VfResult};
use crate::scalar::{factorial, Scalar};
use std::collections::BTreeMap;
use std::fmt;

/// Precision cap: exponents `>= cap` are unknown. `Infinite` means the
/// value is exact.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Cap {
    Finite(i64),
    Infinite,
}

impl Cap {
    pub fn min_with(self, other: Cap) -> Cap {
        match (self, other) {
            (Cap::Infinite, c) | (c, Cap::Infinite) => c,
            (Cap::Finite(a), Cap::Finite(b)) => Cap::Finite(a.min(b)),
        }
    }

    pub fn shift(self, by: i64) -> Cap {
        match self {
            Cap::Infinite => Cap::Infinite,
            Cap::Finite(c) => Cap::Finite(c + by),
        }
    }

    pub fn covers(self, exp: i64) -> bool {
        match self {
            Cap::Infinite => true,
            Cap::Finite(c) => exp < c,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cap::Infinite)
    }
}

impl fmt::Display for Cap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cap::Infinite => write!(f, "inf"),
            Cap::Finite(c) => write!(f, "{c}"),
        }
    }
}

/// A lower-truncated formal Laurent series over Q(i).
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    /// Nonzero known coefficients, keyed by exponent. All keys < cap.
    coeffs: BTreeMap<i64, Scalar>,
    cap: Cap,
}

impl LaurentSeries {
    fn normalized(mut coeffs: BTreeMap<i64, Scalar>, cap: Cap) -> Self {
        coeffs.retain(|_, c| !c.is_zero());
        if let Cap::Finite(cp) = cap {
            coeffs.retain(|&e, _| e < cp);
        }
        LaurentSeries { coeffs, cap }
    }

    /// The exact zero series.
    pub fn zero() -> Self {
        LaurentSeries {
            coeffs: BTreeMap::new(),
            cap: Cap::Infinite,
        }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    /// Exact constant series.
    pub fn constant(c: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        LaurentSeries {
            coeffs,
            cap: Cap::Infinite,
        }
    }

    /// Exact monomial `c · z^exp`.
    pub fn monomial(exp: i64, c: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentSeries {
            coeffs,
            cap: Cap::Infinite,
        }
    }

    /// Exact series from explicit terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            let entry = coeffs.entry(e).or_insert_with(Scalar::zero);
            *entry += &c;
        }
        Self::normalized(coeffs, Cap::Infinite)
    }

    /// Same terms, with the stated finite precision cap.
    pub fn from_terms_capped(terms: impl IntoIterator<Item = (i64, Scalar)>, cap: i64) -> Self {
        let exact = Self::from_terms(terms);
        exact.truncated(cap)
    }

    /// Lower the precision cap (no-op if the value is already coarser).
    pub fn truncated(&self, cap: i64) -> Self {
        let new_cap = self.cap.min_with(Cap::Finite(cap));
        Self::normalized(self.coeffs.clone(), new_cap)
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    /// Lowest exponent with a (known) nonzero coefficient. `None` when no
    /// nonzero coefficient is known.
    pub fn val(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Lower bound used in precision propagation: the valuation when one
    /// is known, otherwise the cap itself (a truncated zero is zero below
    /// its cap).
    fn val_bound(&self) -> Option<i64> {
        match self.val() {
            Some(v) => Some(v),
            None => match self.cap {
                Cap::Finite(c) => Some(c),
                // Exact zero: handled specially by callers.
                Cap::Infinite => None,
            },
        }
    }

    /// True when the value is exactly the zero series.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.cap.is_infinite()
    }

    /// True when every *known* coefficient is zero (the unknown tail may
    /// hide anything).
    pub fn known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.cap.is_infinite()
    }

    /// True for an exact polynomial in nonnegative powers.
    pub fn is_polynomial(&self) -> bool {
        self.is_exact() && self.val().is_none_or(|v| v >= 0)
    }

    /// True for an exact constant (possibly zero).
    pub fn as_constant(&self) -> Option<Scalar> {
        if !self.is_exact() {
            return None;
        }
        match self.coeffs.len() {
            0 => Some(Scalar::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    /// Known coefficient of `z^exp`; precision error at or above the cap.
    pub fn coeff(&self, exp: i64) -> VfResult<Scalar> {
        if !self.cap.covers(exp) {
            return Err(VfError::Precision(format!(
                "coefficient of z^{exp} is beyond cap {}",
                self.cap
            )));
        }
        Ok(self.coeffs.get(&exp).cloned().unwrap_or_else(Scalar::zero))
    }

    /// Iterate over the known nonzero terms in exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn add(&self, rhs: &LaurentSeries) -> LaurentSeries {
        let cap = self.cap.min_with(rhs.cap);
        let mut coeffs = self.coeffs.clone();
        for (&e, c) in &rhs.coeffs {
            let entry = coeffs.entry(e).or_insert_with(Scalar::zero);
            *entry += c;
        }
        Self::normalized(coeffs, cap)
    }

    pub fn sub(&self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
            cap: self.cap,
        }
    }

    pub fn scale(&self, s: &Scalar) -> LaurentSeries {
        if s.is_zero() {
            // Scalar zero annihilates even the unknown tail.
            return LaurentSeries::zero();
        }
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, c * s)).collect(),
            cap: self.cap,
        }
    }

    pub fn mul(&self, rhs: &LaurentSeries) -> LaurentSeries {
        // An exact zero annihilates the other factor's unknown tail.
        if self.is_zero() || rhs.is_zero() {
            return LaurentSeries::zero();
        }
        let cap = match (self.val_bound(), rhs.val_bound()) {
            (Some(va), Some(vb)) => rhs.cap.shift(va).min_with(self.cap.shift(vb)),
            // One side is an exact zero; already handled above, but keep
            // the arm total.
            _ => Cap::Infinite,
        };
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (&ea, ca) in &self.coeffs {
            for (&eb, cb) in &rhs.coeffs {
                let e = ea + eb;
                if !cap.covers(e) {
                    continue;
                }
                let entry = coeffs.entry(e).or_insert_with(Scalar::zero);
                *entry += &(ca * cb);
            }
        }
        Self::normalized(coeffs, cap)
    }

    /// Multiply by the exact monomial `z^exp`.
    pub fn shift_exponents(&self, exp: i64) -> LaurentSeries {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + exp, c.clone())).collect(),
            cap: self.cap.shift(exp),
        }
    }

    /// Termwise formal derivative. A finite cap drops by one.
    pub fn derive(&self) -> LaurentSeries {
        let cap = self.cap.shift(-1);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&e, _)| e != 0)
            .map(|(&e, c)| (e - 1, c * &Scalar::from_integer(e)))
            .collect();
        Self::normalized(coeffs, cap)
    }

    /// k-fold derivative divided by k!: the x^k coefficient of the shifted
    /// series f(z+x).
    pub fn derive_div_factorial(&self, k: u32) -> LaurentSeries {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.derive();
        }
        out.scale(&factorial(k).inv())
    }

    /// Coefficient of `z^{-1}`. Requires that coefficient to be known.
    pub fn residue(&self) -> VfResult<Scalar> {
        self.coeff(-1)
    }

    /// Taylor expansion of `f(z+x)` up to `x^order`.
    pub fn shift(&self, order: u32) -> ShiftExpansion {
        let mut terms = Vec::with_capacity(order as usize + 1);
        let mut current = self.clone();
        for k in 0..=order {
            if k > 0 {
                current = current.derive();
            }
            terms.push(current.scale(&factorial(k).inv()));
        }
        ShiftExpansion { terms }
    }

    /// Render with a chosen variable name.
    pub fn display_with(&self, var: &str) -> String {
        let mut out = String::new();
        let mut first = true;
        for (e, c) in self.terms() {
            let cs = c.to_string();
            let (sign, mag) = match cs.strip_prefix('-') {
                // Only strip an outer minus when the scalar is a pure real
                // or pure imaginary; mixed scalars get parentheses anyway.
                Some(rest) if !cs.contains('+') && cs.matches('-').count() == 1 => {
                    ("-", rest.to_string())
                }
                _ => ("+", cs),
            };
            if first {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            first = false;
            let needs_parens = mag.contains('+') || mag.contains('-');
            let coef_str = if needs_parens { format!("({mag})") } else { mag };
            let power = if e == 1 {
                var.to_string()
            } else {
                format!("{var}^{e}")
            };
            if e == 0 {
                out.push_str(&coef_str);
            } else if coef_str == "1" {
                out.push_str(&power);
            } else {
                out.push_str(&format!("{coef_str}*{power}"));
            }
        }
        if first {
            out.push('0');
        }
        if let Cap::Finite(c) = self.cap {
            out.push_str(&format!(" + O({var}^{c})"));
        }
        out
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("z"))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The coefficients of x^0..x^order in `f(z+x)`.
///
/// Term k is the k-th derivative of the base over k!; term 0 is the base
/// itself, so substituting x = 0 recovers it.
#[derive(Clone, PartialEq, Debug)]
pub struct ShiftExpansion {
    terms: Vec<LaurentSeries>,
}

impl ShiftExpansion {
    pub fn order(&self) -> u32 {
        (self.terms.len() - 1) as u32
    }

    pub fn base(&self) -> &LaurentSeries {
        &self.terms[0]
    }

    /// Coefficient of x^k.
    pub fn term(&self, k: u32) -> &LaurentSeries {
        &self.terms[k as usize]
    }

    pub fn terms(&self) -> &[LaurentSeries] {
        &self.terms
    }

    /// Termwise product in x, truncated at the shorter order.
    pub fn mul(&self, rhs: &ShiftExpansion) -> ShiftExpansion {
        let order = self.order().min(rhs.order()) as usize;
        let mut terms = vec![LaurentSeries::zero(); order + 1];
        for (i, a) in self.terms.iter().enumerate() {
            for (j, b) in rhs.terms.iter().enumerate() {
                if i + j <= order {
                    terms[i + j] = terms[i + j].add(&a.mul(b));
                }
            }
        }
        ShiftExpansion { terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_integer(n)
    }

    #[test]
    fn monomial_product_is_exact() {
        let a = LaurentSeries::monomial(-1, s(1));
        let b = LaurentSeries::monomial(1, s(1));
        let p = a.mul(&b);
        assert_eq!(p, LaurentSeries::one());
        assert!(p.is_exact());
    }

    #[test]
    fn add_cancels() {
        let a = LaurentSeries::from_terms([(0, s(1)), (1, s(1))]);
        let b = LaurentSeries::constant(s(-1));
        assert_eq!(a.add(&b), LaurentSeries::monomial(1, s(1)));
    }

    #[test]
    fn mul_precision_rule() {
        // (z^-1 + 1, cap 3) * (z^-1, cap 5) -> z^-2 + z^-1, cap 2
        let a = LaurentSeries::from_terms([(-1, s(1)), (0, s(1))]).truncated(3);
        let b = LaurentSeries::monomial(-1, s(1)).truncated(5);
        let p = a.mul(&b);
        assert_eq!(p.cap(), Cap::Finite(2));
        assert_eq!(p.coeff(-2).unwrap(), s(1));
        assert_eq!(p.coeff(-1).unwrap(), s(1));
        assert_eq!(p.coeff(0).unwrap(), s(0));
        assert_eq!(p.coeff(1).unwrap(), s(0));
        assert!(p.coeff(2).is_err());
    }

    #[test]
    fn derive_examples() {
        let z3 = LaurentSeries::monomial(3, s(1));
        assert_eq!(z3.derive(), LaurentSeries::monomial(2, s(3)));
        let zm1 = LaurentSeries::monomial(-1, s(1));
        assert_eq!(zm1.derive(), LaurentSeries::monomial(-2, s(-1)));
        assert_eq!(LaurentSeries::constant(s(5)).derive(), LaurentSeries::zero());
    }

    #[test]
    fn shift_examples() {
        // z^2 -> [z^2, 2z, 1]
        let sq = LaurentSeries::monomial(2, s(1)).shift(2);
        assert_eq!(sq.term(0), &LaurentSeries::monomial(2, s(1)));
        assert_eq!(sq.term(1), &LaurentSeries::monomial(1, s(2)));
        assert_eq!(sq.term(2), &LaurentSeries::one());

        // z^-1 -> [z^-1, -z^-2, z^-3]
        let inv = LaurentSeries::monomial(-1, s(1)).shift(2);
        assert_eq!(inv.term(1), &LaurentSeries::monomial(-2, s(-1)));
        assert_eq!(inv.term(2), &LaurentSeries::monomial(-3, s(1)));

        // constant -> [c, 0, 0]
        let c = LaurentSeries::constant(s(7)).shift(2);
        assert_eq!(c.term(0), &LaurentSeries::constant(s(7)));
        assert!(c.term(1).is_zero());
        assert!(c.term(2).is_zero());
    }

    #[test]
    fn residue_examples() {
        assert_eq!(LaurentSeries::monomial(-1, s(1)).residue().unwrap(), s(1));
        let mix = LaurentSeries::from_terms([(2, s(1)), (-1, s(3))]);
        assert_eq!(mix.residue().unwrap(), s(3));
        assert_eq!(LaurentSeries::monomial(2, s(1)).residue().unwrap(), s(0));
        // cap <= -1 means the residue is unknown
        let blind = LaurentSeries::monomial(-3, s(1)).truncated(-1);
        assert!(blind.residue().is_err());
    }

    #[test]
    fn exact_zero_annihilates() {
        let trunc = LaurentSeries::monomial(4, s(2)).truncated(6);
        let z = LaurentSeries::zero();
        assert!(z.mul(&trunc).is_zero());
        assert!(trunc.scale(&Scalar::zero()).is_zero());
    }
}
