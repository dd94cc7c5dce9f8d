//! The cocycle `a_{s,t} = ^s(beta_t) beta_{st}^{-1} beta_s` attached to an
//! element alpha of `E_B^x`, crossed-product arithmetic and the unramified
//! closed form with its invariant.

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::extension::{galois, Algebra, LnrElem, Lk};
use crate::padic::residue::solve_fp;
use crate::solver::{residual, solve_sigma, SolveOptions};

/// `z` with `prod_{j<m} sigma_E^j(z) = target` (m = M / f_E), for a unit
/// target of E. Least-index residue choice, then one trace equation per digit.
pub fn norm_preimage(alg: &Algebra, target: &LnrElem) -> Result<LnrElem> {
    let r = alg.ring();
    let u = &r.unr;
    let kf = &u.residue;
    let fe = r.f;
    let m = u.m / fe;
    let norm = |z: &LnrElem| (0..m).fold(r.one(), |acc, j| r.mul(&acc, &r.sigma_pow(z, (j * fe) as i64)));
    let q = u.base.p.pow(fe as u32);
    let tbar = r.unit_residue(target);
    let roots = kf.roots_of(&tbar, (kf.order() - 1) / (q - 1));
    let z0 = roots.first().ok_or(Error::NotInvertible)?;
    let mut z = r.teichmuller(z0);
    let tr = kf.linear_matrix(|x| kf.trace_to(x, fe));
    let tbar_inv = kf.inv(&tbar).ok_or(Error::NotInvertible)?;
    let mut last = 0;
    loop {
        let d = r.sub(target, &norm(&z));
        let Some(k) = r.val(&d) else { break };
        if k <= last {
            return Err(Error::PrecisionLoss("norm preimage stalled".into()));
        }
        last = k;
        let rhs = kf.mul(&r.unit_residue(&d), &tbar_inv);
        let (y, _) = solve_fp(&tr, &rhs, u.base.p, &[])
            .ok_or_else(|| Error::PrecisionLoss("trace equation unsolvable".into()))?;
        let step = r.mul(&r.lift(&y), &r.pi_l_pow(k));
        z = r.add(&z, &r.mul(&z, &step));
    }
    Ok(z)
}

/// The standard alpha with `w(alpha) = -1/d`: `iota(pi_E^{-1} z)` where z is
/// chosen so that every `^{s-1} alpha` is solvable at the current level.
pub fn default_alpha(alg: &Algebra) -> Result<Lk> {
    let ctx = &alg.ctx;
    let r = alg.ring();
    let e_rel = alg.e_rel;
    let m = ctx.m() / r.f;
    if !m.is_multiple_of(e_rel) {
        return Err(Error::ResidueBudgetExceeded { needed: ctx.m() * e_rel, cap: ctx.precision.residue_degree_cap });
    }
    let pi_b = ctx.embed(alg.base, alg.top, &alg.base_ring().pi_l())?;
    let unit = r.div(&r.pi_l_pow(e_rel as i64), &pi_b)?;
    let target = r.pow(&unit, (m / e_rel) as i64)?;
    let z = norm_preimage(alg, &target)?;
    let mut alpha = alg.one();
    alpha[0] = r.mul(&r.pi_l_pow(-1), &z);
    Ok(alpha)
}

/// `beta_s` solving `sigma(beta) = ^{s-1} alpha`; `beta_id = 1`.
pub fn beta_for(alg: &Algebra, alpha: &Lk, s: usize, opts: SolveOptions) -> Result<Lk> {
    if s == 0 {
        return Ok(alg.one());
    }
    let gamma = alg.div(&alg.galois(s, alpha)?, alpha)?;
    let sol = solve_sigma(alg, &gamma, SolveOptions { allow_growth: false, ..opts })?;
    Ok(sol.beta)
}

#[derive(Debug, Clone)]
pub struct Cocycle {
    pub alg: Algebra,
    pub alpha: Lk,
    pub betas: Vec<Lk>,
    /// `table[s][t] = a_{s,t}` as an element of E (local group indices).
    pub table: Vec<Vec<LnrElem>>,
}

/// The cocycle of alpha with the canonical solver choices (or a perturbed
/// tie-break).
pub fn cocycle(alg: &Algebra, alpha: &Lk, opts: SolveOptions) -> Result<Cocycle> {
    let n = alg.group.order();
    let betas = (0..n).map(|s| beta_for(alg, alpha, s, opts)).collect::<Result<Vec<_>>>()?;
    cocycle_from_betas(alg, alpha, betas)
}

pub fn cocycle_from_betas(alg: &Algebra, alpha: &Lk, betas: Vec<Lk>) -> Result<Cocycle> {
    let n = alg.group.order();
    let mut table = vec![Vec::with_capacity(n); n];
    for s in 0..n {
        for t in 0..n {
            let st = alg.group.mul(s, t);
            let v = alg.mul(&alg.div(&alg.galois(s, &betas[t])?, &betas[st])?, &betas[s]);
            if !alg.in_top(&v) {
                return Err(Error::NotInL(s, t));
            }
            table[s].push(v[0].clone());
        }
    }
    Ok(Cocycle { alg: alg.clone(), alpha: alpha.clone(), betas, table })
}

impl Cocycle {
    fn act(&self, s: usize, x: &LnrElem) -> Result<LnrElem> {
        galois::apply(self.alg.ring(), self.alg.ext().auto(self.alg.group.members[s]), x)
    }

    /// Least agreement (v_K units) in `a_{s,t} a_{st,u} = ^s(a_{t,u}) a_{s,tu}`.
    pub fn relation_residual(&self) -> Result<Ratio<i64>> {
        relation_residual(&self.alg, &self.table)
    }
}

/// Residual of the 2-cocycle relation for an arbitrary table over `alg`.
pub fn relation_residual(alg: &Algebra, table: &[Vec<LnrElem>]) -> Result<Ratio<i64>> {
    let r = alg.ring();
    let g = &alg.group;
    let n = g.order();
    let mut worst = i64::MAX;
    for s in 0..n {
        for t in 0..n {
            for u in 0..n {
                let lhs = r.mul(&table[s][t], &table[g.mul(s, t)][u]);
                let su = galois::apply(r, alg.ext().auto(g.members[s]), &table[t][u])?;
                let rhs = r.mul(&su, &table[s][g.mul(t, u)]);
                worst = worst.min(r.distance(&lhs, &rhs) - r.val(&rhs).unwrap_or(rhs.prec));
            }
        }
    }
    Ok(Ratio::new(worst, r.e as i64))
}

/// Local index of `sigma_arith^i` in an unramified `E/B`.
pub fn frobenius_power_index(alg: &Algebra, i: usize) -> Result<usize> {
    if alg.e_rel != 1 {
        return Err(Error::NotUnramifiedShape("extension is ramified".into()));
    }
    let fb = alg.base_ring().f;
    let fe = alg.ring().f;
    (0..alg.group.order())
        .find(|&s| alg.ext().auto(alg.group.members[s]).k == (i * fb) % fe)
        .ok_or_else(|| Error::NotUnramifiedShape(format!("no automorphism for sigma_arith^{i}")))
}

/// The closed form `a_{i,j} = a` if `i + j < d` else 1, indexed by local group
/// indices.
pub fn unramified_cocycle(alg: &Algebra, a: &LnrElem) -> Result<Vec<Vec<LnrElem>>> {
    let d = alg.degree();
    let r = alg.ring();
    let idx: Vec<usize> = (0..d).map(|i| frobenius_power_index(alg, i)).collect::<Result<_>>()?;
    let mut table = vec![vec![r.one(); d]; d];
    for i in 0..d {
        for j in 0..d {
            if i + j < d {
                table[idx[i]][idx[j]] = a.clone();
            }
        }
    }
    Ok(table)
}

/// A 1-cochain c with `table = closed * dc`, `(dc)_{s,t} = ^s c_t c_{st}^{-1} c_s`,
/// searched with `c_g` (g = sigma_arith) in `pi^n mu_{p-1}`, |n| <= bound, and
/// certified on every pair. Both tables must be over the same unramified algebra.
pub fn find_coboundary(
    alg: &Algebra,
    table: &[Vec<LnrElem>],
    closed: &[Vec<LnrElem>],
    bound: i64,
) -> Result<Option<Vec<LnrElem>>> {
    let r = alg.ring();
    let d = alg.degree();
    let idx: Vec<usize> = (0..d).map(|i| frobenius_power_index(alg, i)).collect::<Result<_>>()?;
    let ratio = |s: usize, t: usize| r.div(&table[s][t], &closed[s][t]);
    let g = idx[1 % d];
    let kf = &r.unr.residue;
    let mu: Vec<LnrElem> = (1..r.unr.base.p).map(|c| r.teichmuller(&kf.from_int(c))).collect();
    for n in -bound..=bound {
        for zeta in &mu {
            let cg = r.mul(&r.pi_l_pow(n * r.e as i64), zeta);
            let mut c = vec![r.one(); d];
            c[idx[0]] = ratio(idx[0], idx[0])?;
            if d > 1 {
                c[g] = cg.clone();
            }
            // c_{g^{i+1}} = ^g c_{g^i} c_g / r_{g, g^i}
            for i in 1..d.saturating_sub(1) {
                let gc = galois::apply(r, alg.ext().auto(alg.group.members[g]), &c[idx[i]])?;
                c[idx[i + 1]] = r.div(&r.mul(&gc, &cg), &ratio(g, idx[i])?)?;
            }
            let ok = (0..d).all(|s| {
                (0..d).all(|t| {
                    let st = alg.group.mul(s, t);
                    let Ok(sc) = galois::apply(r, alg.ext().auto(alg.group.members[s]), &c[t]) else {
                        return false;
                    };
                    let Ok(dc) = r.div(&r.mul(&sc, &c[s]), &c[st]) else { return false };
                    ratio(s, t).map(|x| r.close(&x, &dc, alg.certified())).unwrap_or(false)
                })
            });
            if ok {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Invariant of a cocycle on an unramified extension: the 1-cochain
/// `b~_1 = (1/d) sum_i v(a_{g, g^i})` (g = sigma_arith) taken mod 1. For the
/// closed form this is `(d-1) v(a) / d = -v(a)/d mod 1`.
pub fn unramified_invariant(alg: &Algebra, table: &[Vec<LnrElem>]) -> Result<Ratio<i64>> {
    let r = alg.ring();
    let d = alg.degree();
    let idx: Vec<usize> = (0..d).map(|i| frobenius_power_index(alg, i)).collect::<Result<_>>()?;
    let mut v = vec![vec![0i64; d]; d];
    for s in 0..d {
        for t in 0..d {
            let x = &table[s][t];
            if !r.fixed_by(x, r.f as i64) {
                return Err(Error::NotUnramifiedShape(format!("a_({s},{t}) is not in L")));
            }
            v[s][t] = r.val(x).ok_or_else(|| Error::NotUnramifiedShape(format!("a_({s},{t}) vanishes")))?;
        }
    }
    // integer cocycle relation on the valuations
    let g = &alg.group;
    for s in 0..d {
        for t in 0..d {
            for u in 0..d {
                if v[s][t] + v[g.mul(s, t)][u] != v[t][u] + v[s][g.mul(t, u)] {
                    return Err(Error::NotUnramifiedShape("valuations are not a 2-cocycle".into()));
                }
            }
        }
    }
    let sum: i64 = (0..d).map(|i| v[idx[1 % d]][idx[i]]).sum();
    let b1 = Ratio::new(sum, d as i64);
    Ok(b1 - b1.floor())
}

/// `-v(a)/d mod 1` from the closed form, after checking that
/// `b~_i = (d - i) v(a) / d` satisfies `b~_i - b~_{i+j} + b~_j = v(a_{i,j})`.
pub fn closed_form_invariant(v: i64, d: usize) -> Result<Ratio<i64>> {
    let d = d as i64;
    let b = |i: i64| Ratio::new((d - i) * v, d);
    for i in 0..d {
        for j in 0..d {
            let vij = if i + j < d { v } else { 0 };
            if b(i) - b((i + j).mod_floor(&d)) + b(j) != Ratio::from_integer(vij) {
                return Err(Error::NotUnramifiedShape(format!("coboundary fails at ({i}, {j})")));
            }
        }
    }
    let inv = Ratio::new(-v, d);
    Ok(inv - inv.floor())
}

/// `sum_s l_s u_s` with `l_s in E`.
#[derive(Debug, Clone)]
pub struct CrossedElement {
    pub coeffs: Vec<LnrElem>,
}

impl Cocycle {
    pub fn crossed_zero(&self) -> CrossedElement {
        let r = self.alg.ring();
        CrossedElement { coeffs: vec![r.zero(); self.alg.group.order()] }
    }

    /// `l u_s`.
    pub fn crossed_basis(&self, s: usize, l: &LnrElem) -> CrossedElement {
        let mut x = self.crossed_zero();
        x.coeffs[s] = l.clone();
        x
    }

    /// Bilinear extension of `(l u_s)(l' u_t) = l ^s(l') a_{s,t} u_{st}`.
    pub fn crossed_mul(&self, x: &CrossedElement, y: &CrossedElement) -> Result<CrossedElement> {
        let r = self.alg.ring();
        let mut out = self.crossed_zero();
        for (s, ls) in x.coeffs.iter().enumerate() {
            if r.is_zero(ls) {
                continue;
            }
            for (t, lt) in y.coeffs.iter().enumerate() {
                if r.is_zero(lt) {
                    continue;
                }
                let st = self.alg.group.mul(s, t);
                let term = r.mul(&r.mul(ls, &self.act(s, lt)?), &self.table[s][t]);
                out.coeffs[st] = r.add(&out.coeffs[st], &term);
            }
        }
        Ok(out)
    }

    pub fn crossed_agrees(&self, x: &CrossedElement, y: &CrossedElement) -> bool {
        let r = self.alg.ring();
        x.coeffs.iter().zip(&y.coeffs).all(|(a, b)| r.agrees(a, b))
    }
}

/// Per-automorphism outcome of [`transfer_identity_check`].
#[derive(Debug, Clone)]
pub struct TransferLine {
    pub s: usize,
    pub norm: LnrElem,
    pub product: LnrElem,
    pub fixed: bool,
    /// Agreement of `N(beta_s)` with `prod_t a_{t,s}` in `v_K` units.
    pub residual: Ratio<i64>,
}

/// `N(beta_s)` is sigma- and G-fixed and equals `prod_t a_{t,s}`.
pub fn transfer_identity_check(c: &Cocycle) -> Result<Vec<TransferLine>> {
    let alg = &c.alg;
    let r = alg.ring();
    let br = alg.base_ring();
    let n = alg.group.order();
    let mut out = vec![];
    for s in 0..n {
        let norm = alg.norm(&c.betas[s])?;
        let in_e = alg.ctx.embed(alg.base, alg.top, &norm)?;
        let digits = alg.ctx.precision.certified_digits() * br.e as i64;
        let mut fixed = br.close(&br.sigma_pow(&norm, br.f as i64), &norm, digits);
        for t in 0..n {
            fixed &= r.close(&c.act(t, &in_e)?, &in_e, alg.certified());
        }
        let product = (0..n).fold(r.one(), |acc, t| r.mul(&acc, &c.table[t][s]));
        let rel = r.distance(&in_e, &product) - r.val(&product).unwrap_or(product.prec);
        out.push(TransferLine { s, norm, product, fixed, residual: Ratio::new(rel, r.e as i64) });
    }
    Ok(out)
}

/// Certificates for every `beta_s` of a cocycle, in `v_K` units.
pub fn beta_residuals(c: &Cocycle) -> Result<Vec<Ratio<i64>>> {
    let alg = &c.alg;
    (0..alg.group.order())
        .map(|s| {
            let gamma = alg.div(&alg.galois(s, &c.alpha)?, &c.alpha)?;
            Ok(residual(alg, &c.betas[s], &gamma))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::extension::{Context, FieldSpec};
    use crate::padic::{BaseField, Precision};
    use crate::sample;

    fn alg(base: BaseField, specs: &[FieldSpec], top: usize) -> Algebra {
        let ctx = Arc::new(Context::new(base, Precision::default(), specs).unwrap());
        Algebra::new(&ctx, top, 0).unwrap()
    }

    fn unram_alpha(a: &Algebra, v: i64) -> (Lk, LnrElem) {
        let r = a.ring();
        let x = r.pi_l_pow(v);
        let mut alpha = a.one();
        alpha[0] = x.clone();
        (alpha, x)
    }

    #[test]
    fn unramified_cocycles_match_the_closed_form_up_to_coboundary() {
        for (base, d) in [(BaseField::padic(2), 2), (BaseField::padic(3), 3), (BaseField::laurent(2), 2)] {
            let a = alg(base, &[FieldSpec::unramified("u", d)], 1);
            let (alpha, x) = unram_alpha(&a, 1);
            let c = cocycle(&a, &alpha, SolveOptions::default()).unwrap();
            assert!(c.relation_residual().unwrap() >= Ratio::from_integer(12));
            let closed = unramified_cocycle(&a, &x).unwrap();
            assert!(relation_residual(&a, &closed).unwrap() >= Ratio::from_integer(12));
            assert!(find_coboundary(&a, &c.table, &closed, 2).unwrap().is_some(), "d = {d}");
            // a different class is not found
            let (_, y) = unram_alpha(&a, 2);
            let other = unramified_cocycle(&a, &y).unwrap();
            assert!(find_coboundary(&a, &c.table, &other, 2).unwrap().is_none());
        }
    }

    #[test]
    fn invariants() {
        let a = alg(BaseField::padic(3), &[FieldSpec::unramified("u4", 4)], 1);
        for v in [-1, 1, 2] {
            let (alpha, _) = unram_alpha(&a, v);
            let c = cocycle(&a, &alpha, SolveOptions::default()).unwrap();
            let inv = unramified_invariant(&a, &c.table).unwrap();
            assert_eq!(inv, closed_form_invariant(v, 4).unwrap());
            let expect = Ratio::new(-v, 4);
            assert_eq!(inv, expect - expect.floor());
        }
        assert_eq!(closed_form_invariant(-1, 2).unwrap(), Ratio::new(1, 2));
        assert_eq!(closed_form_invariant(0, 3).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn ramified_cocycle_and_transfer_identity() {
        let a = alg(BaseField::padic(3), &[FieldSpec::cyclotomic("z3", 3)], 1);
        let alpha = default_alpha(&a).unwrap();
        assert_eq!(a.w_val(&alpha).unwrap(), Ratio::new(-1, 2));
        let c = cocycle(&a, &alpha, SolveOptions::default()).unwrap();
        assert!(c.relation_residual().unwrap() >= Ratio::from_integer(12));
        for res in beta_residuals(&c).unwrap() {
            assert!(res >= Ratio::from_integer(12));
        }
        for line in transfer_identity_check(&c).unwrap() {
            assert!(line.fixed && line.residual >= Ratio::from_integer(12), "{line:?}");
        }
    }

    #[test]
    fn default_alpha_is_unramified_closed_form() {
        let a = alg(BaseField::padic(2), &[FieldSpec::unramified("u3", 3)], 1);
        let (alpha, _) = unram_alpha(&a, -1);
        assert!(a.agrees(&default_alpha(&a).unwrap(), &alpha));
        let s = frobenius_power_index(&a, 1).unwrap();
        let beta = beta_for(&a, &alpha, s, SolveOptions::default()).unwrap();
        let r = a.ring();
        assert!(a.agrees(&beta, &vec![r.pi_l_pow(-1), r.pi_l_pow(-1), r.one()]));
        assert!(a.ctx.k().agrees(&a.norm(&beta).unwrap(), &a.ctx.k().pi_l_pow(-2)));
    }

    #[test]
    fn tie_break_changes_the_cocycle_by_a_coboundary() {
        let a = alg(BaseField::padic(3), &[FieldSpec::cyclotomic("z3", 3), FieldSpec::unramified("u2", 2)], 2);
        let alpha = default_alpha(&a).unwrap();
        let c0 = cocycle(&a, &alpha, SolveOptions::default()).unwrap();
        let c1 = cocycle(&a, &alpha, SolveOptions { tie_break: 1, ..Default::default() }).unwrap();
        let r = a.ring();
        let n = a.group.order();
        let l: Vec<LnrElem> = (0..n)
            .map(|s| {
                let q = a.div(&c1.betas[s], &c0.betas[s]).unwrap();
                assert!(a.in_top(&q));
                q[0].clone()
            })
            .collect();
        for s in 0..n {
            for t in 0..n {
                let st = a.group.mul(s, t);
                let dl = r.div(&r.mul(&c0.act(s, &l[t]).unwrap(), &l[s]), &l[st]).unwrap();
                assert!(r.agrees(&c1.table[s][t], &r.mul(&c0.table[s][t], &dl)));
            }
        }
    }

    #[test]
    fn crossed_product_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = alg(BaseField::padic(3), &[FieldSpec::cyclotomic("z3", 3)], 1);
        let c = cocycle(&a, &default_alpha(&a).unwrap(), SolveOptions::default()).unwrap();
        let r = a.ring();
        let n = a.group.order();
        let rand_x = |rng: &mut ChaCha8Rng| CrossedElement {
            coeffs: (0..n).map(|_| sample::lnr_unit_in(r, 1, rng)).collect(),
        };
        let l = sample::lnr_unit_in(r, 1, &mut rng);
        for s in 0..n {
            let lhs = c.crossed_mul(&c.crossed_basis(s, &r.one()), &c.crossed_basis(0, &l)).unwrap();
            let rhs = c.crossed_basis(s, &c.act(s, &l).unwrap());
            assert!(c.crossed_agrees(&lhs, &rhs));
        }
        let lu = c.crossed_basis(0, &l);
        assert!(c.crossed_agrees(&c.crossed_mul(&lu, &lu).unwrap(), &c.crossed_basis(0, &r.mul(&l, &l))));
        for _ in 0..5 {
            let (x, y, z) = (rand_x(&mut rng), rand_x(&mut rng), rand_x(&mut rng));
            let left = c.crossed_mul(&c.crossed_mul(&x, &y).unwrap(), &z).unwrap();
            let right = c.crossed_mul(&x, &c.crossed_mul(&y, &z).unwrap()).unwrap();
            assert!(c.crossed_agrees(&left, &right));
        }
    }
}
