//! Roots of polynomials over `L^nr` with residues in a fixed subfield, and the
//! automorphism group of an extension built from them.

use super::lnr::{LnrElem, LnrRing};
use crate::error::{Error, Result};
use crate::padic::Fq;

/// A root found by the residue-digit search, with the digit path used to
/// order roots deterministically.
#[derive(Debug, Clone)]
pub struct Root {
    pub path: Vec<u64>,
    pub value: LnrElem,
}

/// `poly(c + X)`.
fn taylor_shift(r: &LnrRing, poly: &[LnrElem], c: &LnrElem) -> Vec<LnrElem> {
    let mut a = poly.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = r.mul(&a[j + 1], c);
            a[j] = r.add(&a[j], &t);
        }
    }
    a
}

/// `poly(pi_L^k X)`.
fn scale_var(r: &LnrRing, poly: &[LnrElem], k: i64) -> Vec<LnrElem> {
    poly.iter().enumerate().map(|(i, c)| r.mul(c, &r.pi_l_pow(k * i as i64))).collect()
}

/// Divides by the content; returns None if every coefficient is zero to precision.
fn primitive_part(r: &LnrRing, poly: &[LnrElem]) -> Option<Vec<LnrElem>> {
    let v = poly.iter().filter_map(|c| r.val(c)).min()?;
    let s = r.pi_l_pow(-v);
    Some(poly.iter().map(|c| r.mul(c, &s)).collect())
}

fn residue_poly(r: &LnrRing, poly: &[LnrElem]) -> Vec<Fq> {
    let k = &r.unr.residue;
    poly.iter()
        .map(|c| if r.val(c) == Some(0) { r.unit_residue(c) } else { k.zero() })
        .collect()
}

fn eval_fq(r: &LnrRing, f: &[Fq], x: &Fq) -> Fq {
    let k = &r.unr.residue;
    f.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
}

fn derivative(r: &LnrRing, poly: &[LnrElem]) -> Vec<LnrElem> {
    poly.iter().enumerate().skip(1).map(|(i, c)| r.mul(c, &r.from_i64(i as i64))).collect()
}

/// Newton iteration for a simple root of `poly` lifting `seed`.
fn newton(r: &LnrRing, poly: &[LnrElem], seed: &LnrElem) -> Result<LnrElem> {
    let d = derivative(r, poly);
    let mut y = seed.clone();
    let mut steps = 0;
    loop {
        let fy = r.eval(poly, &y);
        if r.is_zero(&fy) {
            return Ok(y);
        }
        let dy = r.eval(&d, &y);
        let next = r.sub(&y, &r.div(&fy, &dy)?);
        if r.agrees(&next, &y) && next.prec <= y.prec {
            return Ok(next);
        }
        y = next;
        steps += 1;
        if steps > 64 {
            return Err(Error::HenselFails("Newton iteration did not settle".into()));
        }
    }
}

/// All roots of `poly` of exact valuation `v0` (in `pi_L` units) whose digits
/// lie in the residue subfield of degree `sub_f`, sorted by digit path.
pub fn roots_with_valuation(r: &LnrRing, poly: &[LnrElem], v0: i64, sub_f: usize) -> Result<Vec<Root>> {
    let digits: Vec<Fq> = r.unr.residue.subfield_elements(sub_f);
    let start = primitive_part(r, &scale_var(r, poly, v0))
        .ok_or_else(|| Error::PrecisionLoss("polynomial vanishes to working precision".into()))?;
    let mut out = vec![];
    // stack entries: (polynomial in the current variable, offset, scale power, path)
    let mut stack = vec![(start, r.zero(), v0, vec![])];
    let max_depth = r.capacity();
    while let Some((g, off, k, path)) = stack.pop() {
        if path.len() as i64 > max_depth {
            return Err(Error::PrecisionLoss("root search exceeded working precision".into()));
        }
        let gbar = residue_poly(r, &g);
        let dbar: Vec<Fq> = {
            let k = &r.unr.residue;
            gbar.iter().enumerate().skip(1).map(|(i, c)| k.scale(c, i as u64)).collect()
        };
        let kf = &r.unr.residue;
        for c in &digits {
            if path.is_empty() && kf.is_zero(c) {
                continue;
            }
            if !kf.is_zero(&eval_fq(r, &gbar, c)) {
                continue;
            }
            let mut p2 = path.clone();
            p2.push(kf.index(c));
            let t = r.teichmuller(c);
            if !kf.is_zero(&eval_fq(r, &dbar, c)) {
                let y = newton(r, &g, &t)?;
                let value = r.add(&off, &r.mul(&r.pi_l_pow(k), &y));
                out.push(Root { path: p2, value });
            } else {
                let shifted = scale_var(r, &taylor_shift(r, &g, &t), 1);
                let Some(h) = primitive_part(r, &shifted) else {
                    return Err(Error::PrecisionLoss("root search ran out of precision".into()));
                };
                if h.iter().all(|c| c.prec - c.shift <= 0) {
                    return Err(Error::PrecisionLoss("root search ran out of precision".into()));
                }
                let off2 = r.add(&off, &r.mul(&r.pi_l_pow(k), &t));
                stack.push((h, off2, k + 1, p2));
            }
        }
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

/// An automorphism of L over the base field: `sigma^k` on the unramified part
/// and `pi_L -> root`.
#[derive(Debug, Clone)]
pub struct Automorphism {
    pub k: usize,
    pub root: LnrElem,
    pub path: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct AutGroup {
    pub autos: Vec<Automorphism>,
    /// `table[s][t]` = index of `s . t` (apply t first).
    pub table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
}

impl AutGroup {
    /// All automorphisms of the field behind `r` (residue degree `r.f`).
    pub fn compute(r: &LnrRing) -> Result<Self> {
        let roots = roots_with_valuation(r, &r.eisenstein_poly(), 1, r.f)?;
        let mut autos = vec![];
        for k in 0..r.f {
            for root in &roots {
                autos.push(Automorphism { k, root: root.value.clone(), path: root.path.clone() });
            }
        }
        // identity first: k = 0 and root = pi_L
        let pl = r.pi_l();
        let id = autos
            .iter()
            .position(|a| a.k == 0 && r.agrees(&a.root, &pl))
            .ok_or_else(|| Error::HenselFails("pi_L not found among the roots".into()))?;
        let ida = autos.remove(id);
        autos.insert(0, ida);
        let n = autos.len();
        let mut table = vec![vec![0; n]; n];
        for s in 0..n {
            for t in 0..n {
                let c = compose(r, &autos[s], &autos[t])?;
                table[s][t] = find(r, &autos, &c).ok_or(Error::NotGalois { found: n, degree: r.e * r.f })?;
            }
        }
        let inverse = (0..n).map(|s| (0..n).find(|&t| table[s][t] == 0).unwrap_or(0)).collect();
        Ok(AutGroup { autos, table, inverse })
    }

    pub fn order(&self) -> usize {
        self.autos.len()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|s| (0..n).all(|t| self.table[s][t] == self.table[t][s]))
    }
}

/// `s . t`: `sigma^{k_s + k_t}`, `pi_L -> s(t(pi_L))`.
pub fn compose(r: &LnrRing, s: &Automorphism, t: &Automorphism) -> Result<Automorphism> {
    let root = apply(r, s, &t.root)?;
    Ok(Automorphism { k: (s.k + t.k) % r.f, root, path: vec![] })
}

/// Applies an automorphism to an element of L (or its extension to L^nr with
/// `sigma^k` on coefficients).
pub fn apply(r: &LnrRing, s: &Automorphism, x: &LnrElem) -> Result<LnrElem> {
    apply_twisted(r, s, s.k as i64, x)
}

/// As [`apply`] but with an explicit coefficient Frobenius power.
pub fn apply_twisted(r: &LnrRing, s: &Automorphism, k: i64, x: &LnrElem) -> Result<LnrElem> {
    r.substitute(x, k, &s.root)
}

pub fn find(r: &LnrRing, autos: &[Automorphism], a: &Automorphism) -> Option<usize> {
    autos.iter().position(|b| b.k == a.k && r.agrees(&b.root, &a.root))
}
