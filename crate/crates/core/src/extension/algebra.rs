//! The split algebra `E_B = B^nr (x)_B E`, modelled as `f_{E/B}` copies of
//! `E^nr`: component i is the factor on which `B^nr` acts through
//! `sigma_B^{-i}`.

use std::sync::Arc;

use num_rational::Ratio;

use super::galois;
use super::lnr::{LnrElem, LnrRing};
use super::tower::{Context, Ext};
use crate::error::{Error, Result};
use crate::padic::Rm;

/// An element of `E_B` in split form.
pub type Lk = Vec<LnrElem>;

/// `G_{E/B}` as a subgroup of `Aut_K(E)`, identity first.
#[derive(Debug, Clone)]
pub struct RelGroup {
    /// Indices into `Aut_K(E)`.
    pub members: Vec<usize>,
    pub table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
}

impl RelGroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.table[s][t]
    }

    pub fn inv(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|s| (0..n).all(|t| self.table[s][t] == self.table[t][s]))
    }

    /// Order of an element.
    pub fn elem_order(&self, s: usize) -> usize {
        let mut x = s;
        let mut n = 1;
        while x != 0 {
            x = self.table[s][x];
            n += 1;
        }
        n
    }

    /// Index of the subgroup element given an `Aut_K(E)` index.
    pub fn local(&self, global: usize) -> Option<usize> {
        self.members.iter().position(|&g| g == global)
    }
}

#[derive(Debug, Clone)]
pub struct Algebra {
    pub ctx: Arc<Context>,
    pub top: usize,
    pub base: usize,
    pub f_rel: usize,
    pub e_rel: usize,
    pub group: RelGroup,
}

impl Algebra {
    pub fn new(ctx: &Arc<Context>, top: usize, base: usize) -> Result<Self> {
        if !ctx.is_subfield(base, top) {
            return Err(Error::IncompatibleTower(format!(
                "{} is not an extension of {}",
                ctx.field(top).field.name,
                ctx.field(base).field.name
            )));
        }
        let (e, b) = (&ctx.field(top).field, &ctx.field(base).field);
        let members = ctx.fixing(top, base)?;
        let d = e.degree() / b.degree();
        if members.len() != d {
            return Err(Error::NotGalois { found: members.len(), degree: d });
        }
        let g = &ctx.field(top).group;
        let n = members.len();
        let mut table = vec![vec![0; n]; n];
        for s in 0..n {
            for t in 0..n {
                let st = g.table[members[s]][members[t]];
                table[s][t] = members.iter().position(|&x| x == st).expect("subgroup is closed");
            }
        }
        let inverse = (0..n).map(|s| (0..n).find(|&t| table[s][t] == 0).unwrap()).collect();
        Ok(Algebra {
            ctx: ctx.clone(),
            top,
            base,
            f_rel: e.f / b.f,
            e_rel: e.e / b.e,
            group: RelGroup { members, table, inverse },
        })
    }

    pub fn ext(&self) -> &Ext {
        self.ctx.field(self.top)
    }

    pub fn ring(&self) -> &LnrRing {
        &self.ctx.field(self.top).ring
    }

    pub fn base_ring(&self) -> &LnrRing {
        &self.ctx.field(self.base).ring
    }

    /// `[E:B]`.
    pub fn degree(&self) -> usize {
        self.f_rel * self.e_rel
    }

    fn f_top(&self) -> usize {
        self.ctx.field(self.top).field.f
    }

    fn f_base(&self) -> usize {
        self.ctx.field(self.base).field.f
    }

    pub fn one(&self) -> Lk {
        vec![self.ring().one(); self.f_rel]
    }

    /// `lk_from_tuple`.
    pub fn from_tuple(&self, parts: Vec<LnrElem>) -> Result<Lk> {
        if parts.len() != self.f_rel {
            return Err(Error::Config(format!("expected {} components, got {}", self.f_rel, parts.len())));
        }
        Ok(parts)
    }

    /// `lk_embed_L`: an element of E (coefficients fixed by `sigma^{f_E}`).
    pub fn embed_top(&self, a: &LnrElem) -> Lk {
        vec![a.clone(); self.f_rel]
    }

    /// `lk_embed_Knr` for `B^nr`: `(c, sigma_B^{-1} c, ...)`.
    pub fn embed_base_nr(&self, c: &LnrElem) -> Result<Lk> {
        let br = self.base_ring();
        let fb = self.f_base() as i64;
        (0..self.f_rel)
            .map(|i| self.ctx.embed(self.base, self.top, &br.sigma_pow(c, -(i as i64) * fb)))
            .collect()
    }

    /// A `K^nr` scalar `c in R_M`.
    pub fn embed_scalar(&self, c: &Rm) -> Lk {
        let r = self.ring();
        (0..self.f_rel).map(|i| r.scalar(&r.unr.sigma_pow(c, -(i as i64) * self.f_base() as i64))).collect()
    }

    pub fn mul(&self, x: &Lk, y: &Lk) -> Lk {
        let r = self.ring();
        x.iter().zip(y).map(|(a, b)| r.mul(a, b)).collect()
    }

    pub fn add(&self, x: &Lk, y: &Lk) -> Lk {
        let r = self.ring();
        x.iter().zip(y).map(|(a, b)| r.add(a, b)).collect()
    }

    pub fn sub(&self, x: &Lk, y: &Lk) -> Lk {
        let r = self.ring();
        x.iter().zip(y).map(|(a, b)| r.sub(a, b)).collect()
    }

    pub fn inv(&self, x: &Lk) -> Result<Lk> {
        let r = self.ring();
        x.iter()
            .enumerate()
            .map(|(i, a)| if r.is_zero(a) { Err(Error::ZeroComponent(i)) } else { r.inv(a) })
            .collect()
    }

    pub fn div(&self, x: &Lk, y: &Lk) -> Result<Lk> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &Lk, k: i64) -> Result<Lk> {
        let r = self.ring();
        x.iter().map(|a| r.pow(a, k)).collect()
    }

    /// `sigma_B (x) 1`: `(x_0, ..., x_{f-1}) -> (sigma_E(x_{f-1}), x_0, ..., x_{f-2})`
    /// with `sigma_E = sigma^{f_E}` on coefficients.
    pub fn sigma(&self, x: &Lk) -> Lk {
        let r = self.ring();
        let n = self.f_rel;
        let mut out = Vec::with_capacity(n);
        out.push(r.sigma_pow(&x[n - 1], self.f_top() as i64));
        out.extend(x[..n - 1].iter().cloned());
        out
    }

    pub fn sigma_inv(&self, x: &Lk) -> Lk {
        let r = self.ring();
        let mut out: Lk = x[1..].to_vec();
        out.push(r.sigma_pow(&x[0], -(self.f_top() as i64)));
        out
    }

    /// `^s x = (1 (x) s)(x)` for `s in G_{E/B}` (local index).
    pub fn galois(&self, s: usize, x: &Lk) -> Result<Lk> {
        let a = self.ext().auto(self.group.members[s]);
        let fe = self.f_top() as i64;
        let k = a.k as i64;
        let kp = a.k / self.f_base();
        let r = self.ring();
        (0..self.f_rel)
            .map(|i| {
                let j = i + kp;
                let (src, kappa) = if j < self.f_rel { (j, k) } else { (j - self.f_rel, k - fe) };
                galois::apply_twisted(r, a, kappa, &x[src])
            })
            .collect()
    }

    /// Certified level in `pi_E` digits: `(N - loss budget) e_E`.
    pub fn certified(&self) -> i64 {
        self.ctx.precision.certified_digits() * self.ring().e as i64
    }

    /// Whether x is, to the certified level, in the image of E: a constant
    /// tuple with coefficients fixed by `sigma^{f_E}`.
    pub fn in_top(&self, x: &Lk) -> bool {
        let r = self.ring();
        let d = self.certified();
        x.iter().all(|c| r.close(c, &x[0], d)) && r.close(&r.sigma_pow(&x[0], self.f_top() as i64), &x[0], d)
    }

    /// Componentwise relative agreement to the certified level.
    pub fn close(&self, x: &Lk, y: &Lk) -> bool {
        let r = self.ring();
        let d = self.certified();
        x.iter().zip(y).all(|(a, b)| r.close(a, b, d))
    }

    pub fn agrees(&self, x: &Lk, y: &Lk) -> bool {
        let r = self.ring();
        x.iter().zip(y).all(|(a, b)| r.agrees(a, b))
    }

    /// Minimum over components of `v_K(x_i - y_i)` (or its precision bound), in
    /// units of `1/e_E`.
    pub fn distance(&self, x: &Lk, y: &Lk) -> i64 {
        let r = self.ring();
        x.iter().zip(y).map(|(a, b)| r.distance(a, b)).min().unwrap_or(i64::MAX)
    }

    /// `w_{E/B}(x) = sum_i v(x_i) / f` with `v(pi_B) = 1`.
    pub fn w_val(&self, x: &Lk) -> Result<Ratio<i64>> {
        let r = self.ring();
        let mut s = 0i64;
        for (i, c) in x.iter().enumerate() {
            s += r.val(c).ok_or(Error::ZeroComponent(i))?;
        }
        Ok(Ratio::new(s, (self.e_rel * self.f_rel) as i64))
    }

    // ---------- norms ----------

    /// `N_{E^nr/L^nr}` for a subfield L of E with `E/L` Galois, via the inertia
    /// conjugates; the result is expressed in `L^nr`.
    pub fn nr_norm(ctx: &Context, top: usize, sub: usize, x: &LnrElem) -> Result<LnrElem> {
        if top == sub {
            return Ok(x.clone());
        }
        if sub == 0 {
            return norm_to_base_nr(ctx.field(top), ctx.k(), x);
        }
        let e = ctx.field(top);
        let r = &e.ring;
        let mut acc = r.one();
        for s in ctx.fixing(top, sub)? {
            let a = e.auto(s);
            if a.k == 0 {
                acc = r.mul(&acc, &galois::apply_twisted(r, a, 0, x)?);
            }
        }
        ctx.descend(sub, top, &acc)
    }

    /// `N_{E/B}: E_B -> B^nr` (the `E/B/B` case of [`Algebra::rel_norm`]).
    pub fn norm(&self, x: &Lk) -> Result<LnrElem> {
        let br = self.base_ring();
        let fb = self.f_base() as i64;
        let mut acc = br.one();
        for (i, c) in x.iter().enumerate() {
            if self.ring().is_zero(c) {
                return Err(Error::ZeroComponent(i));
            }
            let n = Self::nr_norm(&self.ctx, self.top, self.base, c)?;
            acc = br.mul(&acc, &br.sigma_pow(&n, i as i64 * fb));
        }
        Ok(acc)
    }

    /// `N_{E/L/B}: E_B -> L_B` for an intermediate field L (`lower` is the
    /// algebra `L_B`).
    pub fn rel_norm(&self, lower: &Algebra, x: &Lk) -> Result<Lk> {
        if lower.base != self.base || !self.ctx.is_subfield(lower.top, self.top) {
            return Err(Error::IncompatibleTower("rel_norm needs E/L/B with a common base".into()));
        }
        let lr = lower.ring();
        let fl = lower.f_top() as i64;
        let blocks = lower.f_rel;
        let per = self.f_rel / blocks;
        let mut out = Vec::with_capacity(blocks);
        for j in 0..blocks {
            let mut acc = lr.one();
            for k in 0..per {
                let c = &x[j + blocks * k];
                if self.ring().is_zero(c) {
                    return Err(Error::ZeroComponent(j + blocks * k));
                }
                let n = Self::nr_norm(&self.ctx, self.top, lower.top, c)?;
                acc = lr.mul(&acc, &lr.sigma_pow(&n, k as i64 * fl));
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// `iota_{E/L/B}`: `E_L -> E_B`, `(x, 1, ..., 1)` in the block decomposition.
    /// `self` is `E_B`, `mid` is `E_L`.
    pub fn iota(&self, mid: &Algebra, x: &Lk) -> Result<Lk> {
        let blocks = self.block_count(mid)?;
        let r = self.ring();
        Ok((0..self.f_rel).map(|i| if i % blocks == 0 { x[i / blocks].clone() } else { r.one() }).collect())
    }

    /// `delta_{E/L/B}`: `(x, ..., x)` in the block decomposition.
    pub fn delta(&self, mid: &Algebra, x: &Lk) -> Result<Lk> {
        let blocks = self.block_count(mid)?;
        Ok((0..self.f_rel).map(|i| x[i / blocks].clone()).collect())
    }

    fn block_count(&self, mid: &Algebra) -> Result<usize> {
        if mid.top != self.top || !self.ctx.is_subfield(self.base, mid.base) {
            return Err(Error::IncompatibleTower("iota/delta need E_L and E_B with B in L".into()));
        }
        Ok(self.f_rel / mid.f_rel)
    }

    /// Local index in `G_{E/B}` of the restriction of `s` (local index in
    /// `G_{E/B}`) to the top field of `lower` (`L_B`).
    pub fn restrict_to(&self, lower: &Algebra, s: usize) -> Result<usize> {
        let g = self.ctx.restrict(self.top, lower.top, self.group.members[s])?;
        lower.group.local(g).ok_or(Error::IncompatibleTower("restriction leaves G_{L/B}".into()))
    }

    /// Empirical slope of `F_alpha(x) = alpha sigma(x)`: iterates on the unit
    /// lattice and measures the valuation growth of `F^n(1)` for n the least
    /// multiple of `f_{E/B}` that is at least `n_max`. The estimate must lie in
    /// the interval spanned by the component growth rates.
    pub fn slope_empirical(&self, alpha: &Lk, n_max: usize) -> Result<Ratio<i64>> {
        let d = self.f_rel;
        let n = n_max.div_ceil(d).max(1) * d;
        let r = self.ring();
        let mut x = self.one();
        for _ in 0..n {
            x = self.mul(alpha, &self.sigma(&x));
            if x.iter().any(|c| c.prec - c.shift <= 0) {
                return Err(Error::PrecisionLoss("slope iteration exhausted precision".into()));
            }
        }
        let w = self.w_val(&x)? / Ratio::from_integer(n as i64);
        let vals: Vec<i64> = x.iter().map(|c| r.val(c).unwrap_or(c.prec)).collect();
        let scale = Ratio::new(1, (self.e_rel * n) as i64);
        let lam = Ratio::from_integer(*vals.iter().min().unwrap()) * scale;
        let mu = Ratio::from_integer(*vals.iter().max().unwrap()) * scale;
        if w < lam || w > mu {
            return Err(Error::PrecisionLoss("slope outside its certified interval".into()));
        }
        Ok(w)
    }
}

/// `N_{E^nr/K^nr}` by a division-free determinant of the multiplication map
/// on the basis `pi_E^j`.
pub fn norm_to_base_nr(e: &Ext, k: &LnrRing, x: &LnrElem) -> Result<LnrElem> {
    let r = &e.ring;
    let unr = &r.unr;
    let n = r.e;
    if r.is_zero(x) {
        return Err(Error::ZeroComponent(0));
    }
    // columns: x.c * pi_E^j
    let cols: Vec<Vec<Rm>> = (0..n).map(|j| r.poly_mul_pi_l_pow(&x.c, j as i64)).collect();
    let mat: Vec<Vec<Rm>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
    let det = berkowitz_det(unr, &mat);
    // N(pi_E) = (-1)^e a_0 = pi * (-1)^e u0
    let a0 = r.eis_coeff(0);
    let u0 = unr.base.div_pi_pow(a0, 1);
    let u0 = if n % 2 == 1 { unr.base.neg(u0) } else { u0 };
    let npi = k.mul(&k.pi(), &k.scalar(&unr.scalar(u0)));
    let rel = (x.prec - x.shift).div_euclid(n as i64);
    let unit = k.from_poly_prec(0, vec![det], rel);
    Ok(k.mul(&k.pow(&npi, x.shift)?, &unit))
}

/// Determinant via Berkowitz' algorithm (no divisions).
pub fn berkowitz_det(r: &crate::padic::UnramRing, a: &[Vec<Rm>]) -> Rm {
    let n = a.len();
    if n == 0 {
        return r.one();
    }
    // characteristic polynomial coefficients of the leading 1x1 block
    let mut vect: Vec<Rm> = vec![r.one(), r.neg(&a[0][0])];
    for k in 1..n {
        // R = a[k][0..k], C = a[0..k][k], A = a[0..k][0..k]
        let mut q = vec![r.one(), r.neg(&a[k][k])];
        let mut c: Vec<Rm> = (0..k).map(|i| a[i][k].clone()).collect();
        for _ in 0..k {
            let rc = (0..k).fold(r.zero(), |acc, j| r.add(&acc, &r.mul(&a[k][j], &c[j])));
            q.push(r.neg(&rc));
            c = (0..k)
                .map(|i| (0..k).fold(r.zero(), |acc, j| r.add(&acc, &r.mul(&a[i][j], &c[j]))))
                .collect();
        }
        // Toeplitz (k+2) x (k+1) times vect
        let mut next = vec![r.zero(); k + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, v) in vect.iter().enumerate() {
                if i >= j {
                    *slot = r.add(slot, &r.mul(&q[i - j], v));
                }
            }
        }
        vect = next;
    }
    let c = vect[n].clone();
    if n % 2 == 1 {
        r.neg(&c)
    } else {
        c
    }
}
