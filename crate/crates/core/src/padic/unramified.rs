//! Truncated unramified extensions `R_M = O_K[g]/(P(g))` of the base ring,
//! where `P` lifts the table polynomial of degree M.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::base::{BaseField, BaseRing, Precision};
use super::residue::{Fq, ResidueField};
use crate::error::{Error, Result};

/// Raw coefficient vector of an element of `R_M` in the basis `1, g, ..., g^{M-1}`.
pub type Rm = Vec<u64>;

#[derive(Debug)]
pub struct UnramRing {
    pub base: BaseRing,
    pub m: usize,
    pub residue: Arc<ResidueField>,
    /// Monic lift of the table polynomial (length m + 1).
    modulus: Vec<u64>,
    /// `frob[k][j] = sigma^k(g^j)`.
    frob: Vec<Vec<Rm>>,
    /// Image of the table generator of `R_f` for every divisor f of m.
    sub_gens: BTreeMap<usize, Rm>,
}

impl UnramRing {
    /// Builds `R_M` with fresh subfield generators (least residue root).
    pub fn new(base: &BaseRing, m: usize) -> Result<Self> {
        Self::build(base, m, None)
    }

    /// `make_unramified`: validates the budget before building.
    pub fn make(field: &BaseField, m: usize, prec: &Precision) -> Result<Arc<Self>> {
        prec.validate()?;
        if m > prec.residue_degree_cap {
            return Err(Error::ResidueBudgetExceeded { needed: m, cap: prec.residue_degree_cap });
        }
        let base = BaseRing::new(field, prec.working_digits())?;
        Ok(Arc::new(Self::new(&base, m)?))
    }

    fn build(base: &BaseRing, m: usize, parent: Option<(&UnramRing, &Rm)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::UnsupportedDegree("residue degree 0".into()));
        }
        let residue = Arc::new(ResidueField::new(base.p, m));
        let modulus: Vec<u64> = residue.modulus.iter().map(|&c| base.from_i64(c as i64)).collect();
        let mut ring = UnramRing {
            base: base.clone(),
            m,
            residue,
            modulus,
            frob: vec![],
            sub_gens: BTreeMap::new(),
        };
        // sigma(g): Hensel root of P congruent to g^p
        let g = ring.gen();
        let seed = ring.pow(&g, base.p);
        let poly: Vec<Rm> = ring.modulus.iter().map(|&c| ring.scalar(c)).collect();
        let sg = ring.hensel_root(&poly, &seed)?;
        let mut cols = vec![ring.one()];
        for j in 1..m {
            cols.push(ring.mul(&cols[j - 1], &sg));
        }
        let id: Vec<Rm> = (0..m).map(|j| ring.monomial(j)).collect();
        ring.frob = vec![id, cols];
        for k in 2..m {
            let next: Vec<Rm> = ring.frob[k - 1].iter().map(|x| ring.sigma(x)).collect();
            ring.frob.push(next);
        }
        ring.frob.truncate(m);
        // subfield generators
        for f in (1..=m).filter(|f| m.is_multiple_of(*f)) {
            let img = match parent {
                Some((par, emb)) if par.m % f == 0 => {
                    let old = par.sub_gens[&f].clone();
                    ring.apply_embedding(par, emb, &old)
                }
                _ => ring.least_root_of_table(f)?,
            };
            ring.sub_gens.insert(f, img);
        }
        Ok(ring)
    }

    /// Enlarges to degree `m2` (a multiple of m); returns the new ring and the
    /// image of `g` under the embedding, keeping subfield generators compatible.
    pub fn grow(&self, m2: usize) -> Result<(Arc<UnramRing>, Rm)> {
        if !m2.is_multiple_of(self.m) {
            return Err(Error::UnsupportedDegree(format!("{m2} is not a multiple of {}", self.m)));
        }
        let fresh = UnramRing::new(&self.base, m2)?;
        let emb = fresh.sub_gens[&self.m].clone();
        let ring = Self::build(&self.base, m2, Some((self, &emb)))?;
        Ok((Arc::new(ring), emb))
    }

    fn least_root_of_table(&self, f: usize) -> Result<Rm> {
        let k = &self.residue;
        let pf = super::residue::table_polynomial(self.base.p, f);
        let root = k
            .irreducible_roots(&pf)
            .into_iter()
            .next()
            .ok_or_else(|| Error::HenselFails(format!("no residue root of the degree-{f} table polynomial")))?;
        let poly: Vec<Rm> = pf.iter().map(|&c| self.scalar(self.base.from_i64(c as i64))).collect();
        self.hensel_root(&poly, &self.lift(&root))
    }

    pub fn zero(&self) -> Rm {
        vec![0; self.m]
    }

    pub fn one(&self) -> Rm {
        self.scalar(self.base.one())
    }

    pub fn scalar(&self, c: u64) -> Rm {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    pub fn from_i64(&self, c: i64) -> Rm {
        self.scalar(self.base.from_i64(c))
    }

    fn monomial(&self, j: usize) -> Rm {
        let mut v = self.zero();
        v[j] = self.base.one();
        v
    }

    /// The table generator `g`.
    pub fn gen(&self) -> Rm {
        if self.m == 1 {
            // root of X + c0 is -c0
            self.scalar(self.base.neg(self.modulus[0]))
        } else {
            self.monomial(1)
        }
    }

    /// Image of the generator of `R_f` (f | m).
    pub fn sub_gen(&self, f: usize) -> &Rm {
        &self.sub_gens[&f]
    }

    pub fn pi(&self) -> Rm {
        self.scalar(self.base.pi())
    }

    pub fn add(&self, x: &Rm, y: &Rm) -> Rm {
        x.iter().zip(y).map(|(&a, &b)| self.base.add(a, b)).collect()
    }

    pub fn sub(&self, x: &Rm, y: &Rm) -> Rm {
        x.iter().zip(y).map(|(&a, &b)| self.base.sub(a, b)).collect()
    }

    pub fn neg(&self, x: &Rm) -> Rm {
        x.iter().map(|&a| self.base.neg(a)).collect()
    }

    pub fn scale(&self, x: &Rm, c: u64) -> Rm {
        x.iter().map(|&a| self.base.mul(a, c)).collect()
    }

    pub fn mul(&self, x: &Rm, y: &Rm) -> Rm {
        let m = self.m;
        if m == 1 {
            return vec![self.base.mul(x[0], y[0])];
        }
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b != 0 {
                    prod[i + j] = self.base.add(prod[i + j], self.base.mul(a, b));
                }
            }
        }
        for top in (m..2 * m - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for k in 0..m {
                let t = self.base.mul(c, self.modulus[k]);
                prod[top - m + k] = self.base.sub(prod[top - m + k], t);
            }
        }
        prod.truncate(m);
        prod
    }

    pub fn pow(&self, x: &Rm, mut e: u64) -> Rm {
        let mut acc = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, x: &Rm) -> bool {
        x.iter().all(|&c| c == 0)
    }

    /// pi-adic valuation (`None` when zero to working precision).
    pub fn valuation(&self, x: &Rm) -> Option<u32> {
        x.iter().filter_map(|&c| self.base.valuation(c)).min()
    }

    pub fn is_unit(&self, x: &Rm) -> bool {
        self.valuation(x) == Some(0)
    }

    pub fn div_pi_pow(&self, x: &Rm, k: u32) -> Rm {
        x.iter().map(|&c| self.base.div_pi_pow(c, k)).collect()
    }

    pub fn mul_pi_pow(&self, x: &Rm, k: u32) -> Rm {
        x.iter().map(|&c| self.base.mul_pi_pow(c, k)).collect()
    }

    pub fn truncate(&self, x: &Rm, k: u32) -> Rm {
        x.iter().map(|&c| self.base.truncate(c, k)).collect()
    }

    pub fn residue_of(&self, x: &Rm) -> Fq {
        x.iter().map(|&c| self.base.residue(c)).collect()
    }

    /// Digitwise lift of a residue element.
    pub fn lift(&self, c: &Fq) -> Rm {
        c.iter().map(|&d| self.base.from_i64(d as i64)).collect()
    }

    pub fn inv(&self, x: &Rm) -> Option<Rm> {
        let r = self.residue.inv(&self.residue_of(x))?;
        let mut y = self.lift(&r);
        let two = self.from_i64(2);
        let mut correct = 1;
        while correct < self.base.n {
            y = self.mul(&y, &self.sub(&two, &self.mul(x, &y)));
            correct *= 2;
        }
        Some(y)
    }

    /// `sigma^k(x)` for any integer k.
    pub fn sigma_pow(&self, x: &Rm, k: i64) -> Rm {
        let k = k.rem_euclid(self.m as i64) as usize;
        if k == 0 {
            return x.clone();
        }
        let cols = &self.frob[k];
        let mut out = self.zero();
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                out = self.add(&out, &self.scale(&cols[j], c));
            }
        }
        out
    }

    pub fn sigma(&self, x: &Rm) -> Rm {
        self.sigma_pow(x, 1)
    }

    /// Whether x lies in the base subring, i.e. only the constant coefficient is nonzero.
    pub fn in_base(&self, x: &Rm) -> bool {
        x[1..].iter().all(|&c| c == 0)
    }

    pub fn teichmuller(&self, c: &Fq) -> Rm {
        let mut x = self.lift(c);
        if self.residue.is_zero(c) {
            return self.zero();
        }
        let q = self.residue.order();
        for _ in 0..self.base.n {
            let y = self.pow(&x, q);
            if y == x {
                break;
            }
            x = y;
        }
        x
    }

    pub fn eval(&self, f: &[Rm], x: &Rm) -> Rm {
        f.iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    pub fn derivative(&self, f: &[Rm]) -> Vec<Rm> {
        f.iter().enumerate().skip(1).map(|(i, c)| self.scale(c, self.base.from_i64(i as i64))).collect()
    }

    /// Newton iteration from `seed`; requires `v(f(seed)) > 2 v(f'(seed))`.
    pub fn hensel_root(&self, f: &[Rm], seed: &Rm) -> Result<Rm> {
        let df = self.derivative(f);
        let d0 = self.eval(&df, seed);
        let vd = self
            .valuation(&d0)
            .ok_or_else(|| Error::HenselFails("derivative vanishes at the seed".into()))?;
        let f0 = self.eval(f, seed);
        if let Some(vf) = self.valuation(&f0) {
            if vf <= 2 * vd {
                return Err(Error::HenselFails(format!("v(f) = {vf} is not above 2 v(f') = {}", 2 * vd)));
            }
        }
        let mut x = seed.clone();
        for _ in 0..(2 * self.base.n + 4) {
            let fx = self.eval(f, &x);
            if self.is_zero(&fx) {
                return Ok(x);
            }
            let dx = self.eval(&df, &x);
            let unit = self.inv(&self.div_pi_pow(&dx, vd)).ok_or(Error::NotInvertible)?;
            let vf = self.valuation(&fx).unwrap_or(self.base.n);
            if vf < vd {
                return Err(Error::HenselFails("iteration left the Hensel ball".into()));
            }
            let step = self.mul(&self.div_pi_pow(&fx, vd), &unit);
            let next = self.sub(&x, &step);
            if next == x {
                return Ok(x);
            }
            x = next;
        }
        // the top vd digits are not determined; f(x) vanishes to n - vd
        Ok(x)
    }

    /// Embedding `R_small -> self` given the image of the generator of `R_small`.
    pub fn apply_embedding(&self, small: &UnramRing, gen_image: &Rm, x: &Rm) -> Rm {
        debug_assert_eq!(x.len(), small.m);
        x.iter()
            .rev()
            .fold(self.zero(), |acc, &c| self.add(&self.mul(&acc, gen_image), &self.scalar(c)))
    }

    /// Embedding of `R_f` (f | m) with the stored subfield generator.
    pub fn embed_sub(&self, small: &UnramRing, x: &Rm) -> Rm {
        self.apply_embedding(small, &self.sub_gens[&small.m], x)
    }

    /// Coordinates of x in the basis `rho^b` (b < f) of the subring `R_f`, if x lies in it.
    pub fn sub_coordinates(&self, f: usize, x: &Rm) -> Option<Vec<u64>> {
        if f == self.m {
            return Some(x.clone());
        }
        let rho = &self.sub_gens[&f];
        let mut cols = vec![self.one()];
        for b in 1..f {
            cols.push(self.mul(&cols[b - 1], rho));
        }
        // unit lower-triangular after a residue change of basis; solve by
        // Gaussian elimination over the local ring.
        let rows = self.m;
        let mut mat: Vec<Vec<u64>> = (0..rows).map(|r| (0..f).map(|b| cols[b][r]).chain([x[r]]).collect()).collect();
        let mut piv_row = 0;
        let mut pivots = vec![];
        for col in 0..f {
            let pr = (piv_row..rows).find(|&r| self.base.is_unit(mat[r][col]))?;
            mat.swap(piv_row, pr);
            let inv = self.base.inv(mat[piv_row][col])?;
            for c in 0..=f {
                mat[piv_row][c] = self.base.mul(mat[piv_row][c], inv);
            }
            for r in 0..rows {
                if r != piv_row && mat[r][col] != 0 {
                    let fac = mat[r][col];
                    for c in 0..=f {
                        let t = self.base.mul(fac, mat[piv_row][c]);
                        mat[r][c] = self.base.sub(mat[r][c], t);
                    }
                }
            }
            pivots.push(col);
            piv_row += 1;
        }
        if (piv_row..rows).any(|r| mat[r][f] != 0) {
            return None;
        }
        Some((0..f).map(|b| mat[b][f]).collect())
    }
}

/// A precision-tracked element of a truncated unramified ring.
#[derive(Debug, Clone)]
pub struct TruncatedUnramified {
    pub ring: Arc<UnramRing>,
    pub coeffs: Rm,
    /// Absolute pi-adic precision.
    pub prec: u32,
}

/// Valuation marker: an exact value, or "at least" when all known digits vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Exact(i64),
    AtLeast(i64),
}

impl TruncatedUnramified {
    pub fn new(ring: &Arc<UnramRing>, coeffs: Rm) -> Self {
        let prec = ring.base.n;
        TruncatedUnramified { ring: ring.clone(), coeffs, prec }
    }

    pub fn from_i64(ring: &Arc<UnramRing>, c: i64) -> Self {
        Self::new(ring, ring.from_i64(c))
    }

    pub fn teichmuller(ring: &Arc<UnramRing>, c: &Fq) -> Self {
        Self::new(ring, ring.teichmuller(c))
    }

    fn raw_val(&self) -> u32 {
        self.ring.valuation(&self.coeffs).unwrap_or(self.prec).min(self.prec)
    }

    pub fn valuation(&self) -> Valuation {
        let v = self.raw_val();
        if v >= self.prec {
            Valuation::AtLeast(self.prec as i64)
        } else {
            Valuation::Exact(v as i64)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        TruncatedUnramified { ring: self.ring.clone(), coeffs: self.ring.add(&self.coeffs, &o.coeffs), prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        TruncatedUnramified { ring: self.ring.clone(), coeffs: self.ring.sub(&self.coeffs, &o.coeffs), prec }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = (self.prec + o.raw_val()).min(o.prec + self.raw_val()).min(self.ring.base.n);
        TruncatedUnramified { ring: self.ring.clone(), coeffs: self.ring.mul(&self.coeffs, &o.coeffs), prec }
    }

    pub fn frobenius(&self) -> Self {
        TruncatedUnramified { ring: self.ring.clone(), coeffs: self.ring.sigma(&self.coeffs), prec: self.prec }
    }

    pub fn frobenius_pow(&self, k: i64) -> Self {
        TruncatedUnramified { ring: self.ring.clone(), coeffs: self.ring.sigma_pow(&self.coeffs, k), prec: self.prec }
    }

    /// Division by pi^k lowers the absolute precision by k.
    pub fn div_pi_pow(&self, k: u32) -> Result<Self> {
        if self.raw_val() < k {
            return Err(Error::PrecisionLoss(format!("element is not divisible by pi^{k}")));
        }
        Ok(TruncatedUnramified {
            ring: self.ring.clone(),
            coeffs: self.ring.div_pi_pow(&self.coeffs, k),
            prec: self.prec.saturating_sub(k),
        })
    }

    /// Equality to the smaller of the two precisions.
    pub fn agrees(&self, o: &Self) -> bool {
        let prec = self.prec.min(o.prec);
        let d = self.ring.sub(&self.coeffs, &o.coeffs);
        self.ring.valuation(&d).is_none_or(|v| v >= prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(field: BaseField, m: usize, n: u32) -> UnramRing {
        UnramRing::new(&BaseRing::new(&field, n).unwrap(), m).unwrap()
    }

    #[test]
    fn sigma_is_frobenius_lift() {
        for (field, m) in [(BaseField::padic(2), 2), (BaseField::padic(3), 3), (BaseField::laurent(2), 3)] {
            let r = ring(field, m, 12);
            let g = r.gen();
            let sg = r.sigma(&g);
            assert_eq!(r.residue_of(&sg), r.residue.frobenius(&r.residue_of(&g), 1));
            assert_eq!(r.sigma_pow(&g, m as i64), g);
            let mut x = g.clone();
            for _ in 0..m {
                x = r.sigma(&x);
            }
            assert_eq!(x, g);
        }
    }

    #[test]
    fn laurent_sigma_fixes_prime_field_coefficients() {
        let r = ring(BaseField::laurent(2), 3, 12);
        // basis check: sigma fixes x iff x has coefficients only in degree 0
        for j in 0..3 {
            let mut e = r.zero();
            e[j] = r.base.pi_pow(2) ^ 1;
            assert_eq!(r.sigma(&e) == e, j == 0);
        }
    }

    #[test]
    fn teichmuller_values() {
        let r = ring(BaseField::padic(3), 1, 10);
        let t = r.teichmuller(&vec![2]);
        assert_eq!(t, r.from_i64(-1));
        let r2 = ring(BaseField::padic(2), 2, 10);
        let w = r2.teichmuller(&r2.residue.generator_element());
        // a cube root of unity
        assert_eq!(r2.pow(&w, 3), r2.one());
    }

    #[test]
    fn hensel_cube_root_of_unity() {
        let r = ring(BaseField::padic(2), 2, 16);
        let f = vec![r.one(), r.one(), r.one()];
        let root = r.hensel_root(&f, &r.gen()).unwrap();
        assert!(r.is_zero(&r.eval(&f, &root)));
        let bad = vec![r.one(), r.zero(), r.one()]; // X^2 + 1 at 0
        assert!(matches!(r.hensel_root(&bad, &r.zero()), Err(Error::HenselFails(_))));
    }

    #[test]
    fn growth_keeps_subfield_generators() {
        let r = ring(BaseField::padic(3), 2, 10);
        let (big, emb) = r.grow(4).unwrap();
        assert_eq!(big.apply_embedding(&r, &emb, r.sub_gen(2)), *big.sub_gen(2));
        let x = r.add(&r.gen(), &r.from_i64(5));
        let y = r.mul(&x, &r.sigma(&x));
        let ex = big.apply_embedding(&r, &emb, &x);
        assert_eq!(big.apply_embedding(&r, &emb, &y), big.mul(&ex, &big.sigma(&ex)));
    }

    #[test]
    fn valuation_marker() {
        let base = BaseRing::new(&BaseField::padic(3), 8).unwrap();
        let r = Arc::new(UnramRing::new(&base, 2).unwrap());
        let z = TruncatedUnramified::from_i64(&r, 0);
        assert_eq!(z.valuation(), Valuation::AtLeast(8));
        let x = TruncatedUnramified::from_i64(&r, 27 * 2);
        assert_eq!(x.valuation(), Valuation::Exact(3));
        assert_eq!(x.div_pi_pow(3).unwrap().prec, 5);
    }
}
