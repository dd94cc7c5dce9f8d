//! `L^nr = K^nr[pi_L]/(E(pi_L))` at a fixed unramified level, with elements
//! stored as `pi_L^shift * (unit polynomial)` and absolute precision in
//! `pi_L`-units.

use std::sync::Arc;

use super::field::{literal, Field};
use crate::error::{Error, Result};
use crate::padic::{Fq, Rm, UnramRing};

/// Polynomial in `pi_L` of degree < e with `R_M` coefficients.
pub type Poly = Vec<Rm>;

#[derive(Debug)]
pub struct LnrRing {
    pub unr: Arc<UnramRing>,
    pub e: usize,
    /// Unramified degree of the field this ring is built from.
    pub f: usize,
    /// Non-leading Eisenstein coefficients `a_0..a_{e-1}` in the base ring.
    eis: Vec<u64>,
    /// `pi / pi_L` as a polynomial.
    pdiv: Poly,
    /// `w^a` and `w^{-a}` for `w = pi_L^e / pi`, a = 0..=n.
    w_pows: Vec<Poly>,
    w_inv_pows: Vec<Poly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LnrElem {
    /// Valuation in `pi_L` units (equals `prec` for elements zero to precision).
    pub shift: i64,
    /// Unit polynomial (or all zeros).
    pub c: Poly,
    /// Absolute precision in `pi_L` units.
    pub prec: i64,
}

impl LnrRing {
    pub fn new(field: &Field, unr: &Arc<UnramRing>) -> Result<Self> {
        if !unr.m.is_multiple_of(field.f) {
            return Err(Error::IncompatibleTower(format!(
                "residue level {} is not a multiple of f = {}",
                unr.m, field.f
            )));
        }
        let base = &unr.base;
        let e = field.e;
        let eis: Vec<u64> = field.eis[..e].iter().map(|&c| literal(base, c)).collect();
        let u0 = base.div_pi_pow(eis[0], 1);
        let u0_inv = base.inv(u0).ok_or(Error::NotEisenstein("constant term".into()))?;
        let mut pdiv = vec![unr.zero(); e];
        pdiv[e - 1] = unr.scalar(base.neg(u0_inv));
        for j in 0..e - 1 {
            pdiv[j] = unr.scalar(base.neg(base.mul(eis[j + 1], u0_inv)));
        }
        let mut ring = LnrRing { unr: unr.clone(), e, f: field.f, eis, pdiv, w_pows: vec![], w_inv_pows: vec![] };
        let w: Poly = (0..e).map(|j| unr.scalar(base.neg(base.div_pi_pow(ring.eis[j], 1)))).collect();
        let w_inv = ring.poly_inv(&w).ok_or(Error::NotEisenstein("pi_L^e / pi is not a unit".into()))?;
        let n = base.n as usize;
        let mut wp = vec![ring.poly_one()];
        let mut wip = vec![ring.poly_one()];
        for a in 1..=n {
            wp.push(ring.poly_mul(&wp[a - 1], &w));
            wip.push(ring.poly_mul(&wip[a - 1], &w_inv));
        }
        ring.w_pows = wp;
        ring.w_inv_pows = wip;
        Ok(ring)
    }

    /// Eisenstein coefficient `a_j` (j < e) in the base ring.
    pub fn eis_coeff(&self, j: usize) -> u64 {
        self.eis[j]
    }

    /// Stored relative precision in `pi_L` units.
    pub fn capacity(&self) -> i64 {
        (self.e as i64) * (self.unr.base.n as i64)
    }

    // ---------- polynomial layer ----------

    pub fn poly_zero(&self) -> Poly {
        vec![self.unr.zero(); self.e]
    }

    pub fn poly_one(&self) -> Poly {
        let mut p = self.poly_zero();
        p[0] = self.unr.one();
        p
    }

    pub fn poly_add(&self, x: &Poly, y: &Poly) -> Poly {
        x.iter().zip(y).map(|(a, b)| self.unr.add(a, b)).collect()
    }

    pub fn poly_sub(&self, x: &Poly, y: &Poly) -> Poly {
        x.iter().zip(y).map(|(a, b)| self.unr.sub(a, b)).collect()
    }

    pub fn poly_mul(&self, x: &Poly, y: &Poly) -> Poly {
        let e = self.e;
        let r = &self.unr;
        if e == 1 {
            return vec![r.mul(&x[0], &y[0])];
        }
        let mut prod = vec![r.zero(); 2 * e - 1];
        for (i, a) in x.iter().enumerate() {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !r.is_zero(b) {
                    prod[i + j] = r.add(&prod[i + j], &r.mul(a, b));
                }
            }
        }
        self.reduce(prod)
    }

    fn reduce(&self, mut prod: Vec<Rm>) -> Poly {
        let e = self.e;
        let r = &self.unr;
        for top in (e..prod.len()).rev() {
            let c = std::mem::replace(&mut prod[top], r.zero());
            if r.is_zero(&c) {
                continue;
            }
            for j in 0..e {
                if self.eis[j] != 0 {
                    let t = r.scale(&c, self.eis[j]);
                    prod[top - e + j] = r.sub(&prod[top - e + j], &t);
                }
            }
        }
        prod.truncate(e);
        prod
    }

    /// Multiplication by `pi_L`.
    fn poly_shift_up(&self, x: &Poly) -> Poly {
        let mut v = vec![self.unr.zero()];
        v.extend(x.iter().cloned());
        self.reduce(v)
    }

    /// Exact division by `pi_L` of a polynomial with non-unit constant term.
    fn poly_shift_down(&self, x: &Poly) -> Poly {
        let r = &self.unr;
        let c0 = r.div_pi_pow(&x[0], 1);
        let mut out: Poly = x[1..].to_vec();
        out.push(r.zero());
        let t: Poly = self.pdiv.iter().map(|d| r.mul(d, &c0)).collect();
        self.poly_add(&out, &t)
    }

    /// `pi_L`-adic valuation of a polynomial.
    pub fn poly_val(&self, x: &Poly) -> Option<i64> {
        x.iter()
            .enumerate()
            .filter_map(|(j, c)| self.unr.valuation(c).map(|v| self.e as i64 * v as i64 + j as i64))
            .min()
    }

    pub(crate) fn poly_mul_pi_l_pow(&self, x: &Poly, k: i64) -> Poly {
        let e = self.e as i64;
        let (a, b) = (k / e, k % e);
        let n = self.unr.base.n as i64;
        if a >= n {
            return self.poly_zero();
        }
        let mut y: Poly = x.iter().map(|c| self.unr.mul_pi_pow(c, a as u32)).collect();
        if a > 0 {
            y = self.poly_mul(&y, &self.w_pows[a as usize]);
        }
        for _ in 0..b {
            y = self.poly_shift_up(&y);
        }
        y
    }

    fn poly_div_pi_l_pow(&self, x: &Poly, k: i64) -> Poly {
        let e = self.e as i64;
        let (a, b) = (k / e, k % e);
        let mut y: Poly = x.iter().map(|c| self.unr.div_pi_pow(c, a as u32)).collect();
        if a > 0 {
            y = self.poly_mul(&y, &self.w_inv_pows[a as usize]);
        }
        for _ in 0..b {
            y = self.poly_shift_down(&y);
        }
        y
    }

    /// Inverse of a unit polynomial (Newton iteration).
    pub fn poly_inv(&self, x: &Poly) -> Option<Poly> {
        let r = &self.unr;
        let c0 = r.inv(&x[0])?;
        let mut y = self.poly_zero();
        y[0] = c0;
        let two = {
            let mut t = self.poly_zero();
            t[0] = r.from_i64(2);
            t
        };
        let mut correct = 1i64;
        while correct < self.capacity() {
            y = self.poly_mul(&y, &self.poly_sub(&two, &self.poly_mul(x, &y)));
            correct *= 2;
        }
        Some(y)
    }

    // ---------- element layer ----------

    pub fn zero_with_prec(&self, prec: i64) -> LnrElem {
        LnrElem { shift: prec, c: self.poly_zero(), prec }
    }

    pub fn zero(&self) -> LnrElem {
        self.zero_with_prec(self.capacity())
    }

    pub fn from_poly(&self, shift: i64, c: Poly) -> LnrElem {
        let prec = shift + self.capacity();
        self.normalize(shift, c, prec)
    }

    pub fn from_poly_prec(&self, shift: i64, c: Poly, prec: i64) -> LnrElem {
        self.normalize(shift, c, prec)
    }

    pub fn one(&self) -> LnrElem {
        self.from_poly(0, self.poly_one())
    }

    pub fn from_i64(&self, v: i64) -> LnrElem {
        self.scalar(&self.unr.from_i64(v))
    }

    /// A `K^nr` scalar.
    pub fn scalar(&self, c: &Rm) -> LnrElem {
        let mut p = self.poly_zero();
        p[0] = c.clone();
        self.from_poly(0, p)
    }

    pub fn pi_l(&self) -> LnrElem {
        self.pi_l_pow(1)
    }

    pub fn pi_l_pow(&self, k: i64) -> LnrElem {
        LnrElem { shift: k, c: self.poly_one(), prec: k + self.capacity() }
    }

    /// The base uniformizer `pi = pi_L^e / w`.
    pub fn pi(&self) -> LnrElem {
        self.scalar(&self.unr.pi())
    }

    fn normalize(&self, shift: i64, c: Poly, prec: i64) -> LnrElem {
        let Some(v) = self.poly_val(&c) else {
            return self.zero_with_prec(prec);
        };
        if shift + v >= prec {
            return self.zero_with_prec(prec);
        }
        if v == 0 {
            return LnrElem { shift, c, prec };
        }
        let c = self.poly_div_pi_l_pow(&c, v);
        LnrElem { shift: shift + v, c, prec }
    }

    pub fn is_zero(&self, x: &LnrElem) -> bool {
        x.c.iter().all(|c| self.unr.is_zero(c))
    }

    /// `pi_L`-adic valuation, `None` when zero to precision.
    pub fn val(&self, x: &LnrElem) -> Option<i64> {
        if self.is_zero(x) {
            None
        } else {
            Some(x.shift)
        }
    }

    pub fn mul(&self, x: &LnrElem, y: &LnrElem) -> LnrElem {
        let prec = (x.prec + y.shift).min(y.prec + x.shift);
        if self.is_zero(x) || self.is_zero(y) {
            return self.zero_with_prec(prec);
        }
        self.normalize(x.shift + y.shift, self.poly_mul(&x.c, &y.c), prec)
    }

    pub fn add(&self, x: &LnrElem, y: &LnrElem) -> LnrElem {
        let prec = x.prec.min(y.prec);
        let (lo, hi) = if x.shift <= y.shift { (x, y) } else { (y, x) };
        if self.is_zero(hi) || hi.shift >= prec {
            return self.normalize(lo.shift, lo.c.clone(), prec);
        }
        if self.is_zero(lo) {
            return self.normalize(hi.shift, hi.c.clone(), prec);
        }
        let d = hi.shift - lo.shift;
        let moved = self.poly_mul_pi_l_pow(&hi.c, d);
        self.normalize(lo.shift, self.poly_add(&lo.c, &moved), prec)
    }

    pub fn neg(&self, x: &LnrElem) -> LnrElem {
        LnrElem { shift: x.shift, c: x.c.iter().map(|c| self.unr.neg(c)).collect(), prec: x.prec }
    }

    pub fn sub(&self, x: &LnrElem, y: &LnrElem) -> LnrElem {
        self.add(x, &self.neg(y))
    }

    pub fn inv(&self, x: &LnrElem) -> Result<LnrElem> {
        if self.is_zero(x) {
            return Err(Error::NotInvertible);
        }
        let c = self.poly_inv(&x.c).ok_or(Error::NotInvertible)?;
        let rp = x.prec - x.shift;
        Ok(LnrElem { shift: -x.shift, c, prec: -x.shift + rp })
    }

    pub fn div(&self, x: &LnrElem, y: &LnrElem) -> Result<LnrElem> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &LnrElem, k: i64) -> Result<LnrElem> {
        let base = if k < 0 { self.inv(x)? } else { x.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Applies `sigma^k` to every `K^nr` coefficient (fixing `pi_L`).
    pub fn sigma_pow(&self, x: &LnrElem, k: i64) -> LnrElem {
        if k.rem_euclid(self.unr.m as i64) == 0 {
            return x.clone();
        }
        LnrElem { shift: x.shift, c: x.c.iter().map(|c| self.unr.sigma_pow(c, k)).collect(), prec: x.prec }
    }

    /// `x(pi_L) -> sigma^k(x)(img)` where `img` is a uniformizer of this ring.
    pub fn substitute(&self, x: &LnrElem, k: i64, img: &LnrElem) -> Result<LnrElem> {
        if self.is_zero(x) {
            return Ok(x.clone());
        }
        let c: Poly = x.c.iter().map(|c| self.unr.sigma_pow(c, k)).collect();
        // Horner in img
        let mut acc = self.zero_with_prec(self.capacity() + x.prec);
        for cj in c.iter().rev() {
            acc = self.add(&self.mul(&acc, img), &self.scalar(cj));
        }
        let scale = self.pow(img, x.shift)?;
        let out = self.mul(&acc, &scale);
        // precision: the map is an isometry
        let prec = out.prec.min(x.prec);
        Ok(self.normalize(out.shift, out.c, prec))
    }

    /// Residue of the unit part.
    pub fn unit_residue(&self, x: &LnrElem) -> Fq {
        self.unr.residue_of(&x.c[0])
    }

    /// `v_{pi_L}(x - y)` capped by the common precision.
    pub fn distance(&self, x: &LnrElem, y: &LnrElem) -> i64 {
        let d = self.sub(x, y);
        self.val(&d).unwrap_or(d.prec).min(d.prec)
    }

    /// Agreement to `min(x.prec, y.prec)`.
    pub fn agrees(&self, x: &LnrElem, y: &LnrElem) -> bool {
        self.val(&self.sub(x, y)).is_none()
    }

    /// Relative agreement: `v(x - y) - v(y) >= digits` (in `pi_L` units), or
    /// both vanish.
    pub fn close(&self, x: &LnrElem, y: &LnrElem, digits: i64) -> bool {
        let base = self.val(y).or(self.val(x));
        match base {
            None => true,
            Some(v) => self.distance(x, y) - v >= digits,
        }
    }

    /// Whether every coefficient lies in the subring fixed by `sigma^k`.
    pub fn fixed_by(&self, x: &LnrElem, k: i64) -> bool {
        self.agrees(x, &self.sigma_pow(x, k))
    }

    /// Lowers the precision (never raises it).
    pub fn with_prec(&self, x: &LnrElem, prec: i64) -> LnrElem {
        self.normalize(x.shift, x.c.clone(), prec.min(x.prec))
    }

    /// Lift of a residue element as a constant.
    pub fn lift(&self, c: &Fq) -> LnrElem {
        self.scalar(&self.unr.lift(c))
    }

    pub fn teichmuller(&self, c: &Fq) -> LnrElem {
        self.scalar(&self.unr.teichmuller(c))
    }

    /// Evaluates a polynomial with `L^nr` coefficients.
    pub fn eval(&self, f: &[LnrElem], x: &LnrElem) -> LnrElem {
        let mut acc = self.zero();
        for c in f.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }

    /// The Eisenstein polynomial as `L^nr` coefficients.
    pub fn eisenstein_poly(&self) -> Vec<LnrElem> {
        let mut out: Vec<LnrElem> = self.eis.iter().map(|&a| self.scalar(&self.unr.scalar(a))).collect();
        out.push(self.one());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::field::FieldSpec;
    use crate::padic::{BaseField, BaseRing};

    fn ring(spec: FieldSpec, p: u64, m: usize) -> LnrRing {
        let base = BaseRing::new(&BaseField::padic(p), 12).unwrap();
        let field = Field::build(&spec, &base).unwrap();
        let unr = Arc::new(UnramRing::new(&base, m).unwrap());
        LnrRing::new(&field, &unr).unwrap()
    }

    #[test]
    fn uniformizer_relations() {
        let r = ring(FieldSpec::cyclotomic("z3", 3), 3, 2);
        let pl = r.pi_l();
        let sq = r.mul(&pl, &pl);
        // pi_L^2 = -3 pi_L - 3
        let rhs = r.neg(&r.add(&r.mul(&r.from_i64(3), &pl), &r.from_i64(3)));
        assert!(r.agrees(&sq, &rhs));
        assert_eq!(r.val(&r.from_i64(3)), Some(2));
        assert_eq!(r.val(&r.from_i64(9 * 2)), Some(4));
    }

    #[test]
    fn inverse_and_division() {
        let r = ring(FieldSpec::cyclotomic("z9", 9), 3, 1);
        let x = r.add(&r.pi_l_pow(3), &r.from_i64(1));
        let y = r.mul(&r.pi_l_pow(-2), &x);
        let yi = r.inv(&y).unwrap();
        assert!(r.agrees(&r.mul(&y, &yi), &r.one()));
        assert_eq!(r.val(&yi), Some(2));
        let three = r.from_i64(3);
        let q = r.div(&three, &r.pi_l()).unwrap();
        assert_eq!(r.val(&q), Some(5));
        assert!(r.agrees(&r.mul(&q, &r.pi_l()), &three));
    }

    #[test]
    fn cancellation_lowers_relative_precision() {
        let r = ring(FieldSpec::cyclotomic("z3", 3), 3, 1);
        let a = r.add(&r.one(), &r.pi_l_pow(5));
        let d = r.sub(&a, &r.one());
        assert_eq!(r.val(&d), Some(5));
        assert!(d.prec <= r.capacity());
        let z = r.sub(&a, &a);
        assert!(r.is_zero(&z));
    }
}
