//! JSON forms of field elements, rationals and Weil elements.

use lcft::extension::{LnrElem, LnrRing};
use lcft::weil::WeilElement;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;

/// `pi_L^shift * sum_j c_j pi_L^j`; `coeffs[j][k]` is the k-th `R_M`
/// coordinate of `c_j` as base digits, all little-endian in pi. Trailing
/// zero digits are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub shift: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<i64>,
    pub coeffs: Vec<Vec<Vec<u64>>>,
}

pub fn element(r: &LnrRing, x: &LnrElem) -> ElementJson {
    let base = &r.unr.base;
    let coeffs = x
        .c
        .iter()
        .map(|rm| {
            rm.iter()
                .map(|&b| {
                    let mut d = base.to_digits(b);
                    while d.last() == Some(&0) {
                        d.pop();
                    }
                    d
                })
                .collect()
        })
        .collect();
    ElementJson { shift: x.shift, prec: Some(x.prec), coeffs }
}

pub fn parse_element(r: &LnrRing, j: &ElementJson) -> Result<LnrElem, CliError> {
    let u = &r.unr;
    if j.coeffs.len() > r.e || j.coeffs.iter().any(|c| c.len() > u.m) {
        return Err(CliError::Config(format!("element needs at most {} x {} coefficients", r.e, u.m)));
    }
    let mut poly = r.poly_zero();
    for (pj, cj) in poly.iter_mut().zip(&j.coeffs) {
        for (slot, digits) in pj.iter_mut().zip(cj) {
            if digits.iter().any(|&d| d >= u.base.p) {
                return Err(CliError::Config("digit out of range".into()));
            }
            *slot = u.base.from_digits(digits);
        }
    }
    let x = r.from_poly(j.shift, poly);
    Ok(match j.prec {
        Some(p) => r.with_prec(&x, p),
        None => x,
    })
}

pub fn rational(x: Ratio<i64>) -> Value {
    json!({ "num": x.numer(), "den": x.denom() })
}

pub fn split(r: &LnrRing, x: &[LnrElem]) -> Value {
    json!(x.iter().map(|c| element(r, c)).collect::<Vec<_>>())
}

/// `{beta, s, alpha_ref, certificate}` with s the index in `Aut_K(E)`.
pub fn weil_element(g: &WeilElement, alpha_ref: &str) -> Value {
    let alg = &g.group.alg;
    json!({
        "beta": split(alg.ring(), &g.beta),
        "s": alg.group.members[g.s],
        "alpha_ref": alpha_ref,
        "certificate": rational(g.residual),
    })
}
