//! Finite-dimensional base Lie algebras given by structure constants,
//! together with a symmetric invariant non-degenerate bilinear form.
//!
//! The only inputs the current-algebra layer ever sees are a validated
//! bracket table and form matrix, so everything downstream can assume the
//! axioms hold.

use crate::error::{VfError, VfResult};
use crate::parse::parse_scalar;
use crate::scalar::Scalar;
use serde::Deserialize;
use std::fmt;
use std::sync::Arc;

/// A Lie algebra by structure constants: `bracket[i][j]` is the
/// coefficient vector of `[e_i, e_j]` over the basis, `form[i][j]` is
/// `<e_i, e_j>`.
#[derive(Clone, PartialEq)]
pub struct LieAlgebraSpec {
    name: String,
    basis: Vec<String>,
    bracket: Vec<Vec<Vec<Scalar>>>,
    form: Vec<Vec<Scalar>>,
}

/// An element of the base Lie algebra as a coefficient vector.
#[derive(Clone, PartialEq, Debug)]
pub struct LieElement {
    pub coeffs: Vec<Scalar>,
}

impl LieElement {
    pub fn zero(dim: usize) -> Self {
        LieElement {
            coeffs: vec![Scalar::zero(); dim],
        }
    }

    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); dim];
        coeffs[idx] = Scalar::one();
        LieElement { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, rhs: &LieElement) -> LieElement {
        LieElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> LieElement {
        LieElement {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn neg(&self) -> LieElement {
        self.scale(&Scalar::from_integer(-1))
    }
}

/// Outcome of one axiom check, with a witness on failure.
#[derive(Clone, Debug)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Per-axiom validation report.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{:<14} {}", c.axiom, if c.passed { "pass" } else { "FAIL" })?;
            if let Some(w) = &c.witness {
                write!(f, "  ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl LieAlgebraSpec {
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        bracket: Vec<Vec<Vec<Scalar>>>,
        form: Vec<Vec<Scalar>>,
    ) -> Self {
        LieAlgebraSpec {
            name: name.into(),
            basis,
            bracket,
            form,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn basis_index(&self, name: &str) -> VfResult<usize> {
        self.basis
            .iter()
            .position(|b| b == name)
            .ok_or_else(|| VfError::Parse(format!("unknown basis element '{name}'")))
    }

    /// `[e_i, e_j]` straight from the table.
    pub fn bracket_basis(&self, i: usize, j: usize) -> LieElement {
        LieElement {
            coeffs: self.bracket[i][j].clone(),
        }
    }

    /// Bilinear extension of the bracket table.
    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> VfResult<LieElement> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let mut out = LieElement::zero(self.dim());
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let w = ca * cb;
                for (k, s) in self.bracket[i][j].iter().enumerate() {
                    out.coeffs[k] += &(s * &w);
                }
            }
        }
        Ok(out)
    }

    /// Bilinear extension of the form matrix.
    pub fn form_eval(&self, a: &LieElement, b: &LieElement) -> VfResult<Scalar> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let mut out = Scalar::zero();
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                out += &(&(ca * cb) * &self.form[i][j]);
            }
        }
        Ok(out)
    }

    pub fn form_basis(&self, i: usize, j: usize) -> &Scalar {
        &self.form[i][j]
    }

    fn check_dim(&self, x: &LieElement) -> VfResult<()> {
        if x.coeffs.len() != self.dim() {
            return Err(VfError::Dimension(format!(
                "element has {} coefficients, algebra '{}' has dimension {}",
                x.coeffs.len(),
                self.name,
                self.dim()
            )));
        }
        Ok(())
    }

    /// Run every axiom check, reporting a witness triple on failure.
    pub fn validate(&self) -> ValidationReport {
        let dim = self.dim();
        let mut checks = Vec::new();
        let name = |i: usize| self.basis[i].clone();

        // antisymmetry on the table
        let mut anti = AxiomCheck {
            axiom: "antisymmetry",
            passed: true,
            witness: None,
        };
        'anti: for i in 0..dim {
            for j in 0..dim {
                let lhs = self.bracket_basis(i, j);
                let rhs = self.bracket_basis(j, i).neg();
                if lhs != rhs {
                    anti.passed = false;
                    anti.witness = Some(format!("[{}, {}] != -[{}, {}]", name(i), name(j), name(j), name(i)));
                    break 'anti;
                }
            }
        }
        checks.push(anti);

        // Jacobi on all basis triples
        let mut jac = AxiomCheck {
            axiom: "jacobi",
            passed: true,
            witness: None,
        };
        'jac: for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let a = LieElement::basis(dim, i);
                    let b = LieElement::basis(dim, j);
                    let c = LieElement::basis(dim, k);
                    let s1 = self.bracket(&a, &self.bracket(&b, &c).unwrap()).unwrap();
                    let s2 = self.bracket(&b, &self.bracket(&c, &a).unwrap()).unwrap();
                    let s3 = self.bracket(&c, &self.bracket(&a, &b).unwrap()).unwrap();
                    if !s1.add(&s2).add(&s3).is_zero() {
                        jac.passed = false;
                        jac.witness = Some(format!(
                            "cyclic sum on ({}, {}, {}) is nonzero",
                            name(i),
                            name(j),
                            name(k)
                        ));
                        break 'jac;
                    }
                }
            }
        }
        checks.push(jac);

        // form symmetry
        let mut sym = AxiomCheck {
            axiom: "form-symmetry",
            passed: true,
            witness: None,
        };
        'sym: for i in 0..dim {
            for j in 0..dim {
                if self.form[i][j] != self.form[j][i] {
                    sym.passed = false;
                    sym.witness = Some(format!("<{}, {}> != <{}, {}>", name(i), name(j), name(j), name(i)));
                    break 'sym;
                }
            }
        }
        checks.push(sym);

        // invariance <[a,b],c> = <a,[b,c]> on basis triples
        let mut inv = AxiomCheck {
            axiom: "invariance",
            passed: true,
            witness: None,
        };
        'inv: for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let a = LieElement::basis(dim, i);
                    let b = LieElement::basis(dim, j);
                    let c = LieElement::basis(dim, k);
                    let lhs = self.form_eval(&self.bracket(&a, &b).unwrap(), &c).unwrap();
                    let rhs = self.form_eval(&a, &self.bracket(&b, &c).unwrap()).unwrap();
                    if lhs != rhs {
                        inv.passed = false;
                        inv.witness = Some(format!(
                            "<[{}, {}], {}> = {} but <{}, [{}, {}]> = {}",
                            name(i),
                            name(j),
                            name(k),
                            lhs,
                            name(i),
                            name(j),
                            name(k),
                            rhs
                        ));
                        break 'inv;
                    }
                }
            }
        }
        checks.push(inv);

        // non-degeneracy via exact inversion
        let nd = match invert_matrix(&self.form) {
            Some(_) => AxiomCheck {
                axiom: "non-degeneracy",
                passed: true,
                witness: None,
            },
            None => AxiomCheck {
                axiom: "non-degeneracy",
                passed: false,
                witness: Some("form matrix is singular".into()),
            },
        };
        checks.push(nd);

        ValidationReport { checks }
    }

    /// Exact inverse of the form matrix, as a non-degeneracy witness.
    pub fn form_inverse(&self) -> Option<Vec<Vec<Scalar>>> {
        invert_matrix(&self.form)
    }

    /// The built-in sl2: basis e, h, f with `[h,e] = 2e`, `[h,f] = -2f`,
    /// `[e,f] = h`; form `<e,f> = <f,e> = 1`, `<h,h> = 2`.
    pub fn sl2() -> Arc<LieAlgebraSpec> {
        let dim = 3;
        let z = || vec![Scalar::zero(); dim];
        let mut bracket = vec![vec![z(); dim]; dim];
        // basis order: e = 0, h = 1, f = 2
        let set = |bracket: &mut Vec<Vec<Vec<Scalar>>>, i: usize, j: usize, k: usize, c: i64| {
            bracket[i][j][k] = Scalar::from_integer(c);
            bracket[j][i][k] = Scalar::from_integer(-c);
        };
        set(&mut bracket, 1, 0, 0, 2); // [h,e] = 2e
        set(&mut bracket, 1, 2, 2, -2); // [h,f] = -2f
        set(&mut bracket, 0, 2, 1, 1); // [e,f] = h
        let mut form = vec![vec![Scalar::zero(); dim]; dim];
        form[0][2] = Scalar::one();
        form[2][0] = Scalar::one();
        form[1][1] = Scalar::from_integer(2);
        LieAlgebraSpec::new(
            "sl2",
            vec!["e".into(), "h".into(), "f".into()],
            bracket,
            form,
        )
        .into()
    }

    /// One-dimensional abelian algebra with <a,a> = 1.
    pub fn abelian1() -> Arc<LieAlgebraSpec> {
        LieAlgebraSpec::new(
            "abelian1",
            vec!["a".into()],
            vec![vec![vec![Scalar::zero()]]],
            vec![vec![Scalar::one()]],
        )
        .into()
    }

    /// Look up a built-in by name or load a JSON spec file.
    pub fn load(source: &str) -> VfResult<Arc<LieAlgebraSpec>> {
        match source {
            "sl2" => Ok(Self::sl2()),
            "abelian1" => Ok(Self::abelian1()),
            path => {
                let text = std::fs::read_to_string(path)?;
                Self::from_json(&text, path)
            }
        }
    }

    /// Parse the algebra-spec JSON format:
    /// `{"basis": [...], "brackets": [[i, j, [coeffs]], ...], "form": [[...]]}`.
    ///
    /// Coefficients may be JSON integers or scalar literals like "3/2" or
    /// "1+2i". When only one of (i,j)/(j,i) is listed, the mirror entry is
    /// filled by antisymmetry; listing both leaves them untouched so the
    /// validator can catch inconsistent tables.
    pub fn from_json(text: &str, name: &str) -> VfResult<Arc<LieAlgebraSpec>> {
        #[derive(Deserialize)]
        struct RawSpec {
            basis: Vec<String>,
            brackets: Vec<(usize, usize, Vec<serde_json::Value>)>,
            form: Vec<Vec<serde_json::Value>>,
        }
        let raw: RawSpec = serde_json::from_str(text)?;
        let dim = raw.basis.len();
        if dim == 0 {
            return Err(VfError::Config("algebra spec has an empty basis".into()));
        }
        let mut bracket = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
        let mut listed = vec![vec![false; dim]; dim];
        for (i, j, coeffs) in &raw.brackets {
            if *i >= dim || *j >= dim || coeffs.len() != dim {
                return Err(VfError::Config(format!(
                    "bracket entry ({i},{j}) is out of range for dimension {dim}"
                )));
            }
            bracket[*i][*j] = coeffs.iter().map(json_scalar).collect::<VfResult<_>>()?;
            listed[*i][*j] = true;
        }
        for i in 0..dim {
            for j in 0..dim {
                if listed[i][j] && !listed[j][i] {
                    bracket[j][i] = bracket[i][j].iter().map(|c| -c).collect();
                    listed[j][i] = true;
                }
            }
        }
        if raw.form.len() != dim || raw.form.iter().any(|r| r.len() != dim) {
            return Err(VfError::Config(format!(
                "form matrix must be {dim}x{dim}"
            )));
        }
        let form = raw
            .form
            .iter()
            .map(|row| row.iter().map(json_scalar).collect::<VfResult<_>>())
            .collect::<VfResult<_>>()?;
        Ok(LieAlgebraSpec::new(name, raw.basis, bracket, form).into())
    }
}

fn json_scalar(v: &serde_json::Value) -> VfResult<Scalar> {
    match v {
        serde_json::Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| VfError::Config(format!("non-integer number {n}; use a string literal")))?;
            Ok(Scalar::from_integer(i))
        }
        serde_json::Value::String(s) => parse_scalar(s),
        other => Err(VfError::Config(format!("bad scalar value {other}"))),
    }
}

/// Exact Gauss-Jordan inversion over Q(i). Returns None for a singular
/// matrix.
fn invert_matrix(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        let pinv = p.inv();
        for j in 0..n {
            a[col][j] = &a[col][j] * &pinv;
            inv[col][j] = &inv[col][j] * &pinv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let d = &a[col][j] * &factor;
                a[r][j] = &a[r][j] - &d;
                let e = &inv[col][j] * &factor;
                inv[r][j] = &inv[r][j] - &e;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_validates() {
        let sl2 = LieAlgebraSpec::sl2();
        let report = sl2.validate();
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn abelian_validates() {
        assert!(LieAlgebraSpec::abelian1().validate().all_passed());
    }

    #[test]
    fn sl2_table_entries() {
        let sl2 = LieAlgebraSpec::sl2();
        let e = LieElement::basis(3, 0);
        let h = LieElement::basis(3, 1);
        let f = LieElement::basis(3, 2);
        assert_eq!(sl2.bracket(&h, &e).unwrap(), e.scale(&Scalar::from_integer(2)));
        assert_eq!(sl2.bracket(&e, &f).unwrap(), h);
        assert_eq!(sl2.form_eval(&e, &f).unwrap(), Scalar::one());
        assert_eq!(sl2.form_eval(&h, &h).unwrap(), Scalar::from_integer(2));
        assert_eq!(sl2.form_eval(&e, &e).unwrap(), Scalar::zero());
        // [a, a] = 0 for a random-ish combination
        let a = e.add(&h.scale(&Scalar::from_ratio(1, 3))).add(&f.neg());
        assert!(sl2.bracket(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn corrupted_form_fails_invariance() {
        let sl2 = LieAlgebraSpec::sl2();
        let mut form = sl2.form.clone();
        form[0][0] = Scalar::one(); // <e,e> = 1
        let bad = LieAlgebraSpec::new("bad-sl2", sl2.basis.clone(), sl2.bracket.clone(), form);
        let report = bad.validate();
        assert!(!report.all_passed());
        let inv = report.checks.iter().find(|c| c.axiom == "invariance").unwrap();
        assert!(!inv.passed);
        assert!(inv.witness.is_some());
    }

    #[test]
    fn form_inverse_is_inverse() {
        let sl2 = LieAlgebraSpec::sl2();
        let inv = sl2.form_inverse().unwrap();
        #[allow(clippy::needless_range_loop)]
        for i in 0..3 {
            for j in 0..3 {
                let mut sum = Scalar::zero();
                for k in 0..3 {
                    sum += &(&sl2.form[i][k] * &inv[k][j]);
                }
                let expect = if i == j { Scalar::one() } else { Scalar::zero() };
                assert_eq!(sum, expect);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{
            "basis": ["x", "y"],
            "brackets": [[0, 1, [0, 0]]],
            "form": [[1, 0], [0, "1/2"]]
        }"#;
        let alg = LieAlgebraSpec::from_json(text, "demo").unwrap();
        assert!(alg.validate().all_passed());
        assert_eq!(alg.form_basis(1, 1), &Scalar::from_ratio(1, 2));
    }
}
