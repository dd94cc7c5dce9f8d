//! Finite extensions `L = L_0[pi_L]/(E(pi_L))` of the base field, where `L_0`
//! is unramified of degree f and `E` is Eisenstein with base-field coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{BaseKind, BaseRing};

/// Config-level description of an extension of the base field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unramified: Option<usize>,
    /// Eisenstein coefficients, little-endian; a trailing leading 1 is optional.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<Vec<i64>>,
    /// `p^k`: the totally ramified cyclotomic extension of level p^k.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclotomic: Option<u64>,
}

impl FieldSpec {
    pub fn unramified(name: &str, f: usize) -> Self {
        FieldSpec { name: name.into(), unramified: Some(f), ..Default::default() }
    }

    pub fn cyclotomic(name: &str, pk: u64) -> Self {
        FieldSpec { name: name.into(), cyclotomic: Some(pk), ..Default::default() }
    }

    pub fn eisenstein(name: &str, coeffs: &[i64]) -> Self {
        FieldSpec { name: name.into(), eisenstein: Some(coeffs.to_vec()), ..Default::default() }
    }

    pub fn base(name: &str) -> Self {
        FieldSpec { name: name.into(), ..Default::default() }
    }
}

/// An extension with unramified degree f and ramification index e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub f: usize,
    pub e: usize,
    /// Monic Eisenstein polynomial over the base, as integers (little-endian, length e + 1).
    pub eis: Vec<i64>,
}

impl Field {
    pub fn degree(&self) -> usize {
        self.e * self.f
    }

    pub fn build(spec: &FieldSpec, base: &BaseRing) -> Result<Field> {
        let f = spec.unramified.unwrap_or(1);
        if f == 0 {
            return Err(Error::UnsupportedDegree("unramified degree 0".into()));
        }
        let eis = match (&spec.eisenstein, spec.cyclotomic) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(format!("{}: give either eisenstein or cyclotomic, not both", spec.name)))
            }
            (Some(c), None) => {
                let mut c = c.clone();
                if c.len() < 2 || *c.last().unwrap() != 1 {
                    c.push(1);
                }
                c
            }
            (None, Some(pk)) => cyclotomic_eisenstein(pk, base)?,
            (None, None) => vec![-pi_integer(base), 1],
        };
        check_eisenstein(&eis, base)?;
        Ok(Field { name: spec.name.clone(), f, e: eis.len() - 1, eis })
    }
}

/// The uniformizer as an integer literal: p for p-adic bases. Laurent bases use
/// the literal `p` to stand for t in coefficient lists.
fn pi_integer(base: &BaseRing) -> i64 {
    base.p as i64
}

/// Base-ring image of an integer literal; for Laurent bases the digits of the
/// literal in base p are read as a polynomial in t.
pub fn literal(base: &BaseRing, c: i64) -> u64 {
    match base.kind {
        BaseKind::Padic => base.from_i64(c),
        BaseKind::Laurent => {
            let p = base.p as i64;
            let neg = c < 0;
            let mut r = c.abs();
            let mut digits = vec![];
            while r > 0 {
                digits.push((r % p) as u64);
                r /= p;
            }
            let x = base.from_digits(&digits);
            if neg {
                base.neg(x)
            } else {
                x
            }
        }
    }
}

fn check_eisenstein(eis: &[i64], base: &BaseRing) -> Result<()> {
    let e = eis.len() - 1;
    if e == 0 {
        return Err(Error::NotEisenstein("degree 0".into()));
    }
    if eis[e] != 1 {
        return Err(Error::NotEisenstein("leading coefficient must be 1".into()));
    }
    for (j, &c) in eis[..e].iter().enumerate() {
        let v = base.valuation(literal(base, c));
        if v == Some(0) {
            return Err(Error::NotEisenstein(format!("coefficient of X^{j} is a unit")));
        }
        if j == 0 && v != Some(1) {
            return Err(Error::NotEisenstein("constant term must have valuation 1".into()));
        }
    }
    Ok(())
}

/// `Phi_{p^k}(X + 1)`.
fn cyclotomic_eisenstein(pk: u64, base: &BaseRing) -> Result<Vec<i64>> {
    if base.kind != BaseKind::Padic {
        return Err(Error::UnsupportedDegree("cyclotomic extensions need a p-adic base".into()));
    }
    let p = base.p;
    let mut k = 0;
    let mut r = pk;
    while r > 1 && r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    if r != 1 || k == 0 {
        return Err(Error::UnsupportedDegree(format!("cyclotomic level {pk} is not a power of p = {p}")));
    }
    let step = pk / p;
    let deg = (pk - step) as usize;
    // sum_{i<p} (X+1)^{i*step}
    let mut out = vec![0i128; deg + 1];
    for i in 0..p {
        let n = (i * step) as usize;
        let mut binom: i128 = 1;
        for (j, slot) in out.iter_mut().enumerate().take(n + 1) {
            *slot += binom;
            binom = binom * (n - j) as i128 / (j as i128 + 1);
        }
    }
    out.into_iter()
        .map(|c| i64::try_from(c).map_err(|_| Error::UnsupportedDegree(format!("cyclotomic level {pk} too large"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::BaseField;

    #[test]
    fn cyclotomic_polynomials() {
        let b3 = BaseRing::new(&BaseField::padic(3), 10).unwrap();
        let z3 = Field::build(&FieldSpec::cyclotomic("z3", 3), &b3).unwrap();
        assert_eq!(z3.eis, vec![3, 3, 1]);
        let z9 = Field::build(&FieldSpec::cyclotomic("z9", 9), &b3).unwrap();
        assert_eq!(z9.e, 6);
        assert_eq!(z9.eis, vec![3, 9, 18, 21, 15, 6, 1]);
        let u = Field::build(&FieldSpec::unramified("u2", 2), &b3).unwrap();
        assert_eq!((u.f, u.e, u.degree()), (2, 1, 2));
    }

    #[test]
    fn rejects_non_eisenstein() {
        let b2 = BaseRing::new(&BaseField::padic(2), 10).unwrap();
        assert!(Field::build(&FieldSpec::eisenstein("r", &[-2, 0, 1]), &b2).is_ok());
        assert!(matches!(
            Field::build(&FieldSpec::eisenstein("bad", &[4, 0, 1]), &b2),
            Err(Error::NotEisenstein(_))
        ));
        assert!(matches!(
            Field::build(&FieldSpec::eisenstein("bad", &[2, 1, 1]), &b2),
            Err(Error::NotEisenstein(_))
        ));
        assert!(Field::build(&FieldSpec::cyclotomic("z6", 6), &b2).is_err());
    }
}
