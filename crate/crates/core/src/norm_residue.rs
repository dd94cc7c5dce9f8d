//! The norm residue map `eta(s) = N(beta_s)` into `B^x / N(E^x)`, the class
//! group it lands in, its inverse theta, and the functoriality checks.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::extension::{galois, Algebra, Context, LnrElem, LnrRing, RelGroup};
use crate::fundamental::{beta_for, default_alpha};
use crate::padic::residue::solve_fp;
use crate::padic::Fq;
use crate::solver::SolveOptions;

/// Smith normal form data: `diag` and the column transform V with
/// `rowspace(A) V = rowspace(diag)`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub v: Vec<Vec<BigInt>>,
}

/// Invariant factors of the quotient `Z^n / rowspace(a)`.
pub fn smith(a: &[Vec<BigInt>], n: usize) -> Smith {
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let rows = m.len();
    let mut v: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut diag = vec![BigInt::zero(); n];
    let col_swap = |m: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in m.iter_mut().chain(v.iter_mut()) {
            row.swap(a, b);
        }
    };
    // col_b -= q col_a
    let col_sub = |m: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, a: usize, b: usize, q: &BigInt| {
        for row in m.iter_mut().chain(v.iter_mut()) {
            let t = &row[a] * q;
            row[b] -= t;
        }
    };
    for t in 0..n.min(rows) {
        loop {
            // smallest nonzero entry of the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..n {
                    if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return Smith { diag, v } };
            m.swap(t, bi);
            col_swap(&mut m, &mut v, t, bj);
            let p = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_floor(&p);
                if !q.is_zero() {
                    let rt = m[t].clone();
                    for (x, y) in m[i].iter_mut().zip(&rt) {
                        *x -= &q * y;
                    }
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = m[t][j].div_floor(&p);
                if !q.is_zero() {
                    col_sub(&mut m, &mut v, t, j, &q);
                }
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold a non-multiple into row t and repeat
            let bad = (t + 1..rows).find(|&i| (t + 1..n).any(|j| !m[i][j].mod_floor(&p).is_zero()));
            if let Some(i) = bad {
                let ri = m[i].clone();
                for (x, y) in m[t].iter_mut().zip(&ri) {
                    *x += y;
                }
                continue;
            }
            diag[t] = p.abs();
            break;
        }
    }
    Smith { diag, v }
}

/// A class in `B^x / N(E^x)`: residues modulo the nontrivial invariant factors.
pub type Class = Vec<i64>;

#[derive(Debug, Clone)]
pub struct NormClassGroup {
    pub ctx: Arc<Context>,
    pub top: usize,
    pub base: usize,
    /// Unit depth D: the group is computed modulo `U_B^{(D)}`.
    pub depth: usize,
    /// Invariant factors greater than 1.
    pub invariants: Vec<u64>,
    keep: Vec<usize>,
    smith: Smith,
    /// `zeta_B`, its residue, and the principal-unit generators `u_{i,b}` inverted.
    zeta_res: Fq,
    zeta_order: u64,
    rho_basis: Vec<Vec<u64>>,
    u_inv: Vec<Vec<LnrElem>>,
}

fn unit_generators(r: &LnrRing, f: usize, depth: usize) -> Vec<Vec<LnrElem>> {
    let rho = r.scalar(r.unr.sub_gen(f));
    (1..depth)
        .map(|i| {
            let mut pw = r.one();
            (0..f)
                .map(|_| {
                    let u = r.add(&r.one(), &r.mul(&pw, &r.pi_l_pow(i as i64)));
                    pw = r.mul(&pw, &rho);
                    u
                })
                .collect()
        })
        .collect()
}

/// Teichmuller generator of `mu_{Q-1}` for the residue subfield of degree f.
fn teich_generator(r: &LnrRing, f: usize) -> (LnrElem, Fq) {
    let kf = &r.unr.residue;
    let q = r.unr.base.p.pow(f as u32);
    let g = kf.pow(&kf.primitive(), (kf.order() - 1) / (q - 1));
    (r.teichmuller(&g), g)
}

impl NormClassGroup {
    /// `norm_group`: increases the depth until the order is stable at two
    /// consecutive depths and equals `|G^ab|`.
    pub fn compute(ctx: &Arc<Context>, top: usize, base: usize) -> Result<Self> {
        let alg = Algebra::new(ctx, top, base)?;
        let target = Abelianization::of(&alg.group).order() as u64;
        let max = ctx.precision.pi_digits as usize;
        let mut prev: Option<u64> = None;
        for depth in 1..=max {
            let g = Self::at_depth(&alg, depth)?;
            let ord = g.order();
            if prev == Some(ord) && ord == target {
                return Ok(g);
            }
            prev = Some(ord);
        }
        Err(Error::Unstable(max))
    }

    pub fn at_depth(alg: &Algebra, depth: usize) -> Result<Self> {
        let ctx = &alg.ctx;
        let (top, base) = (alg.top, alg.base);
        let br = alg.base_ring();
        let fb = ctx.field(base).field.f;
        let kf = &br.unr.residue;
        let (_, zeta_res) = teich_generator(br, fb);
        let zeta_order = br.unr.base.p.pow(fb as u32) - 1;
        let rho_sub = br.unr.residue_of(br.unr.sub_gen(fb));
        let mut rho_basis = vec![kf.one()];
        for b in 1..fb {
            rho_basis.push(kf.mul(&rho_basis[b - 1], &rho_sub));
        }
        let u = unit_generators(br, fb, depth);
        let u_inv = u.iter().map(|row| row.iter().map(|x| br.inv(x)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        let mut g = NormClassGroup {
            ctx: ctx.clone(),
            top,
            base,
            depth,
            invariants: vec![],
            keep: vec![],
            smith: Smith { diag: vec![], v: vec![] },
            zeta_res,
            zeta_order,
            rho_basis,
            u_inv,
        };
        let n = g.ngens();
        let mut rel: Vec<Vec<BigInt>> = vec![];
        let big = |v: Vec<i64>| v.into_iter().map(BigInt::from).collect::<Vec<_>>();
        let mut zrow = vec![0i64; n];
        zrow[1] = zeta_order as i64;
        rel.push(big(zrow));
        let p = br.unr.base.p as i64;
        for (i, row) in u.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                let mut v = g.exponents(&br.pow(x, p)?)?;
                for c in v.iter_mut() {
                    *c = -*c;
                }
                v[2 + i * fb + b] += p;
                rel.push(big(v));
            }
        }
        // norms of generators of E^x / U_E^{(e' D)}
        let er = alg.ring();
        let fe = ctx.field(top).field.f;
        let (zeta_e, _) = teich_generator(er, fe);
        let mut egens = vec![er.pi_l(), zeta_e];
        for row in unit_generators(er, fe, alg.e_rel * depth) {
            egens.extend(row);
        }
        for y in &egens {
            let nm = field_norm(alg, y)?;
            rel.push(big(g.exponents(&nm)?));
        }
        let s = smith(&rel, n);
        let keep: Vec<usize> = (0..n).filter(|&i| s.diag[i] != BigInt::one()).collect();
        if keep.iter().any(|&i| s.diag[i].is_zero()) {
            return Err(Error::Unstable(depth));
        }
        g.invariants = keep.iter().map(|&i| s.diag[i].to_u64().unwrap_or(u64::MAX)).collect();
        g.keep = keep;
        g.smith = s;
        Ok(g)
    }

    fn ngens(&self) -> usize {
        2 + self.rho_basis.len() * (self.depth - 1)
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    fn base_ring(&self) -> &LnrRing {
        &self.ctx.field(self.base).ring
    }

    /// Exponents of x in `pi_B, zeta_B, u_{i,b}` modulo `U_B^{(D)}` (greedy).
    pub fn exponents(&self, x: &LnrElem) -> Result<Vec<i64>> {
        let br = self.base_ring();
        let kf = &br.unr.residue;
        let fb = self.rho_basis.len();
        let mut out = vec![0i64; self.ngens()];
        let v = br.val(x).ok_or(Error::ZeroComponent(0))?;
        out[0] = v;
        let mut y = br.mul(x, &br.pi_l_pow(-v));
        let res = br.unit_residue(&y);
        let ez = self.zeta_dlog(&res)?;
        out[1] = ez as i64;
        let (zeta, _) = teich_generator(br, fb);
        y = br.mul(&y, &br.pow(&zeta, -(ez as i64))?);
        let fix = self.rho_matrix();
        for i in 1..self.depth {
            let d = br.sub(&y, &br.one());
            match br.val(&d) {
                None => break,
                Some(k) if k > i as i64 => continue,
                Some(k) if k < i as i64 => {
                    return Err(Error::PrecisionLoss(format!("unit reduction stalled at depth {i}")))
                }
                _ => {}
            }
            let c: Fq = br.unit_residue(&d);
            let (coords, _) = solve_fp(&fix, &c, kf.p, &[])
                .ok_or_else(|| Error::PrecisionLoss("residue outside the base residue field".into()))?;
            for (b, &cb) in coords.iter().enumerate() {
                if cb != 0 {
                    out[2 + (i - 1) * fb + b] = cb as i64;
                    y = br.mul(&y, &br.pow(&self.u_inv[i - 1][b], cb as i64)?);
                }
            }
        }
        Ok(out)
    }

    fn rho_matrix(&self) -> Vec<Vec<u64>> {
        let m = self.base_ring().unr.m;
        (0..m).map(|row| self.rho_basis.iter().map(|c| c[row]).collect()).collect()
    }

    fn zeta_dlog(&self, res: &Fq) -> Result<u64> {
        if self.zeta_order == 1 {
            return Ok(0);
        }
        let kf = &self.base_ring().unr.residue;
        let full = kf.order() - 1;
        let lz = kf.dlog(&self.zeta_res).ok_or(Error::NotInvertible)?;
        let lx = kf.dlog(res).ok_or(Error::NotInvertible)?;
        // zeta = g^{lz} with lz = full / zeta_order
        if lx % lz != 0 {
            return Err(Error::PrecisionLoss("residue is not in the base residue field".into()));
        }
        Ok((lx / lz) % self.zeta_order.max(1) % full.max(1))
    }

    pub fn class_of_exponents(&self, e: &[i64]) -> Class {
        let n = e.len();
        self.keep
            .iter()
            .map(|&i| {
                let y: BigInt = (0..n).map(|j| BigInt::from(e[j]) * &self.smith.v[j][i]).sum();
                y.mod_floor(&self.smith.diag[i]).to_i64().unwrap()
            })
            .collect()
    }

    /// Class of an element of `B^x` (given in `B^nr`).
    pub fn class(&self, x: &LnrElem) -> Result<Class> {
        Ok(self.class_of_exponents(&self.exponents(x)?))
    }

    pub fn add(&self, a: &Class, b: &Class) -> Class {
        a.iter().zip(b).zip(&self.invariants).map(|((x, y), &d)| (x + y).rem_euclid(d as i64)).collect()
    }

    pub fn identity(&self) -> Class {
        vec![0; self.invariants.len()]
    }
}

/// `N_{E/B}(y)` for y in E, as an element of `B^nr`.
pub fn field_norm(alg: &Algebra, y: &LnrElem) -> Result<LnrElem> {
    let r = alg.ring();
    let mut acc = r.one();
    for &s in &alg.group.members {
        acc = r.mul(&acc, &galois::apply(r, alg.ext().auto(s), y)?);
    }
    alg.ctx.descend(alg.base, alg.top, &acc)
}

/// `G^ab`: commutator subgroup and a coset representative for each element.
#[derive(Debug, Clone)]
pub struct Abelianization {
    pub in_commutator: Vec<bool>,
    /// Least-index representative of the coset of each element.
    pub rep: Vec<usize>,
    pub reps: Vec<usize>,
}

impl Abelianization {
    pub fn of(g: &RelGroup) -> Self {
        let n = g.order();
        let mut inc = vec![false; n];
        inc[0] = true;
        let mut gens = vec![];
        for s in 0..n {
            for t in 0..n {
                let c = g.mul(g.mul(s, t), g.mul(g.inv(s), g.inv(t)));
                gens.push(c);
            }
        }
        // closure
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                if !inc[a] {
                    continue;
                }
                for &c in &gens {
                    let x = g.mul(a, c);
                    if !inc[x] {
                        inc[x] = true;
                        changed = true;
                    }
                }
            }
        }
        let comm: Vec<usize> = (0..n).filter(|&x| inc[x]).collect();
        let rep: Vec<usize> = (0..n).map(|s| comm.iter().map(|&c| g.mul(s, c)).min().unwrap()).collect();
        let mut reps: Vec<usize> = rep.clone();
        reps.sort();
        reps.dedup();
        Abelianization { in_commutator: inc, rep, reps }
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }
}

/// `eta(s)`: raw value `N(beta_s)` and its class.
#[derive(Debug, Clone)]
pub struct EtaValue {
    pub s: usize,
    pub raw: LnrElem,
    pub class: Class,
}

/// eta on every element of `G_{E/B}`, for one alpha.
#[derive(Debug, Clone)]
pub struct NormResidue {
    pub alg: Algebra,
    pub alpha: Vec<LnrElem>,
    pub group: NormClassGroup,
    pub values: Vec<EtaValue>,
    pub ab: Abelianization,
}

pub fn eta(alg: &Algebra, alpha: &[LnrElem], s: usize, group: &NormClassGroup, opts: SolveOptions) -> Result<EtaValue> {
    let beta = beta_for(alg, &alpha.to_vec(), s, opts)?;
    let raw = alg.norm(&beta)?;
    let class = group.class(&raw)?;
    Ok(EtaValue { s, raw, class })
}

impl NormResidue {
    pub fn compute(ctx: &Arc<Context>, top: usize, base: usize) -> Result<Self> {
        let alg = Algebra::new(ctx, top, base)?;
        let alpha = default_alpha(&alg)?;
        Self::with_alpha(&alg, alpha, SolveOptions::default())
    }

    pub fn with_alpha(alg: &Algebra, alpha: Vec<LnrElem>, opts: SolveOptions) -> Result<Self> {
        let group = NormClassGroup::compute(&alg.ctx, alg.top, alg.base)?;
        let values =
            (0..alg.group.order()).map(|s| eta(alg, &alpha, s, &group, opts)).collect::<Result<Vec<_>>>()?;
        let ab = Abelianization::of(&alg.group);
        Ok(NormResidue { alg: alg.clone(), alpha, group, values, ab })
    }

    pub fn class(&self, s: usize) -> &Class {
        &self.values[s].class
    }

    /// `eta(st) = eta(s) eta(t)` for all pairs.
    pub fn is_homomorphism(&self) -> bool {
        let g = &self.alg.group;
        let n = g.order();
        (0..n).all(|s| (0..n).all(|t| *self.class(g.mul(s, t)) == self.group.add(self.class(s), self.class(t))))
    }

    /// Injective on `G^ab` with image of size `|G^ab|` = order of the group.
    pub fn is_bijective(&self) -> bool {
        let n = self.alg.group.order();
        let mut seen: Vec<&Class> = vec![];
        for &r in &self.ab.reps {
            let c = self.class(r);
            if seen.contains(&c) {
                return false;
            }
            seen.push(c);
        }
        // eta is constant on commutator cosets
        (0..n).all(|s| self.class(s) == self.class(self.ab.rep[s])) && seen.len() as u64 == self.group.order()
    }

    /// `theta(a)`: the coset representative s with `eta(s) = class(a)`.
    pub fn theta(&self, a: &LnrElem) -> Result<usize> {
        let c = self.group.class(a)?;
        let hits: Vec<usize> = self.ab.reps.iter().copied().filter(|&r| *self.class(r) == c).collect();
        match hits.as_slice() {
            [s] => Ok(*s),
            [] => Err(Error::NotBijective("class not in the image of eta".into())),
            _ => Err(Error::NotBijective("eta is not injective on G^ab".into())),
        }
    }
}

/// Outcome of one functoriality diagram: every instance checked and the ones
/// whose two paths disagree.
#[derive(Debug, Clone, Default)]
pub struct DiagramReport {
    pub diagram: &'static str,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl DiagramReport {
    fn new(diagram: &'static str) -> Self {
        DiagramReport { diagram, ..Default::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Quotient diagram: `eta_{E/K}(s) = eta_{L/K}(s|_L)` in `K^x / N_{L/K}`,
/// the right side computed from `alpha_L = N_{E/L/K}(alpha_E)`.
pub fn check_quotient_compat(ctx: &Arc<Context>, e: usize, l: usize) -> Result<DiagramReport> {
    let mut rep = DiagramReport::new("quotient");
    let nr_ek = NormResidue::compute(ctx, e, 0)?;
    let alg_lk = Algebra::new(ctx, l, 0)?;
    let alpha_l = nr_ek.alg.rel_norm(&alg_lk, &nr_ek.alpha)?;
    let group_lk = NormClassGroup::compute(ctx, l, 0)?;
    for s in 0..nr_ek.alg.group.order() {
        let sl = nr_ek.alg.restrict_to(&alg_lk, s)?;
        let lhs = group_lk.class(&nr_ek.values[s].raw)?;
        let rhs = eta(&alg_lk, &alpha_l, sl, &group_lk, SolveOptions::default())?.class;
        rep.record(lhs == rhs, || format!("s = {s}: {lhs:?} vs {rhs:?}"));
    }
    Ok(rep)
}

/// Subgroup diagram: for s in `G_{E/L}`, `eta_{E/K}(s)` computed with
/// `alpha_K = iota(alpha_L)` equals `N_{L/K}(eta_{E/L}(s))` in `K^x / N_{E/K}`.
pub fn check_subgroup_compat(ctx: &Arc<Context>, e: usize, l: usize) -> Result<DiagramReport> {
    let mut rep = DiagramReport::new("subgroup");
    let nr_el = NormResidue::compute(ctx, e, l)?;
    let alg_ek = Algebra::new(ctx, e, 0)?;
    let alpha_k = alg_ek.iota(&nr_el.alg, &nr_el.alpha)?;
    let group_ek = NormClassGroup::compute(ctx, e, 0)?;
    let alg_lk = Algebra::new(ctx, l, 0)?;
    for s in 0..nr_el.alg.group.order() {
        let sk = alg_ek.group.local(nr_el.alg.group.members[s]).ok_or(Error::IncompatibleTower("G_{E/L}".into()))?;
        let lhs = eta(&alg_ek, &alpha_k, sk, &group_ek, SolveOptions::default())?.class;
        let down = alg_lk.norm(&alg_lk.embed_top(&nr_el.values[s].raw))?;
        let rhs = group_ek.class(&down)?;
        rep.record(lhs == rhs, || format!("s = {s}: {lhs:?} vs {rhs:?}"));
    }
    Ok(rep)
}

/// Conjugation diagram for every t in `G_{E/K}` with `t(L) = L`:
/// `eta_{E/L}(t s t^{-1}) = t(eta_{E/L}(s))` in `L^x / N_{E/L}`.
pub fn check_conj_compat(ctx: &Arc<Context>, e: usize, l: usize) -> Result<DiagramReport> {
    let mut rep = DiagramReport::new("conj");
    let nr_el = NormResidue::compute(ctx, e, l)?;
    let g = &ctx.field(e).group;
    let h = &nr_el.alg.group.members;
    let lr = &ctx.field(l).ring;
    for t in 0..g.order() {
        let ti = g.inverse[t];
        if !h.iter().all(|&s| h.contains(&g.table[g.table[t][s]][ti])) {
            continue;
        }
        let tl = ctx.restrict(e, l, t)?;
        for (s, &sg) in h.iter().enumerate() {
            let conj = g.table[g.table[t][sg]][ti];
            let lhs = nr_el.class(nr_el.alg.group.local(conj).unwrap()).clone();
            let moved = galois::apply(lr, ctx.field(l).auto(tl), &nr_el.values[s].raw)?;
            let rhs = nr_el.group.class(&moved)?;
            rep.record(lhs == rhs, || format!("t = {t}, s = {s}: {lhs:?} vs {rhs:?}"));
        }
    }
    Ok(rep)
}

/// `Ver: G_{E/K} -> G_{E/L}` through the least-index left coset
/// representatives, as a local index of `G_{E/L}`.
pub fn transfer(g: &RelGroup, h: &[usize], s: usize) -> usize {
    let n = g.order();
    let mut reps: Vec<usize> = vec![];
    for x in 0..n {
        if !reps.iter().any(|&r| h.contains(&g.mul(g.inv(r), x))) {
            reps.push(x);
        }
    }
    let mut acc = 0;
    for &r in &reps {
        let sr = g.mul(s, r);
        let r2 = *reps.iter().find(|&&r2| h.contains(&g.mul(g.inv(r2), sr))).unwrap();
        acc = g.mul(acc, g.mul(g.inv(r2), sr));
    }
    acc
}

/// Transfer diagram: `eta_{E/L}(Ver s)` equals the class of `eta_{E/K}(s)`
/// in `L^x / N_{E/L}`.
pub fn check_transfer_compat(ctx: &Arc<Context>, e: usize, l: usize) -> Result<DiagramReport> {
    let mut rep = DiagramReport::new("transfer");
    let nr_ek = NormResidue::compute(ctx, e, 0)?;
    let nr_el = NormResidue::compute(ctx, e, l)?;
    let g = &nr_ek.alg.group;
    // G_{E/L} inside G_{E/K}, in local indices of G_{E/K}
    let h: Vec<usize> = nr_el.alg.group.members.iter().map(|&m| g.local(m).unwrap()).collect();
    for s in 0..g.order() {
        let v = transfer(g, &h, s);
        let v_local = nr_el.alg.group.local(g.members[v]).unwrap();
        let rhs = nr_el.class(v_local).clone();
        let lifted = ctx.embed(0, l, &nr_ek.values[s].raw)?;
        let lhs = nr_el.group.class(&lifted)?;
        rep.record(lhs == rhs, || format!("s = {s}: {lhs:?} vs {rhs:?}"));
    }
    Ok(rep)
}

/// All four diagrams for `E/L/K`.
pub fn check_all_compat(ctx: &Arc<Context>, e: usize, l: usize) -> Result<Vec<DiagramReport>> {
    Ok(vec![
        check_quotient_compat(ctx, e, l)?,
        check_subgroup_compat(ctx, e, l)?,
        check_conj_compat(ctx, e, l)?,
        check_transfer_compat(ctx, e, l)?,
    ])
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::extension::FieldSpec;
    use crate::fundamental::frobenius_power_index;
    use crate::padic::{BaseField, Precision};
    use crate::sample;

    fn ctx(base: BaseField, specs: &[FieldSpec]) -> Arc<Context> {
        Arc::new(Context::new(base, Precision::default(), specs).unwrap())
    }

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn smith_form_invariant_factors() {
        let s = smith(&big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), 3);
        let d: Vec<i64> = s.diag.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        let s = smith(&big(&[&[4, 0], &[0, 6]]), 2);
        let d: Vec<i64> = s.diag.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![2, 12]);
    }

    #[test]
    fn unramified_norm_groups_are_generated_by_pi() {
        for d in [2, 3] {
            let c = ctx(BaseField::padic(2), &[FieldSpec::unramified("u", d)]);
            let nr = NormResidue::compute(&c, 1, 0).unwrap();
            assert_eq!(nr.group.invariants, vec![d as u64]);
            let k = c.k();
            let s = frobenius_power_index(&nr.alg, 1).unwrap();
            assert!(k.agrees(&nr.values[s].raw, &k.pi_l_pow(-(d as i64 - 1))));
            assert_eq!(nr.values[s].class, nr.group.class(&k.pi()).unwrap());
            assert_eq!(nr.theta(&k.pi()).unwrap(), s);
            assert!(nr.is_homomorphism() && nr.is_bijective());
            // units are norms
            let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
            let u = sample::lnr_unit_in(k, 1, &mut rng);
            assert_eq!(nr.group.class(&u).unwrap(), nr.group.identity());
        }
    }

    #[test]
    fn ramified_quadratic_over_q3() {
        let c = ctx(BaseField::padic(3), &[FieldSpec::cyclotomic("z3", 3)]);
        let nr = NormResidue::compute(&c, 1, 0).unwrap();
        assert_eq!(nr.group.order(), 2);
        let k = c.k();
        let cls = |x: i64| nr.group.class(&k.from_i64(x)).unwrap();
        assert_ne!(cls(2), nr.group.identity());
        assert_ne!(cls(-1), nr.group.identity());
        assert_eq!(cls(3), nr.group.identity());
        assert_eq!(cls(-2), nr.group.identity());
        assert_eq!(nr.values[1].class, cls(2));
        assert_eq!(nr.theta(&k.from_i64(2)).unwrap(), 1);
        assert!(nr.is_homomorphism() && nr.is_bijective());
    }

    #[test]
    fn trivial_extension_has_trivial_quotient() {
        let c = ctx(BaseField::padic(3), &[]);
        let g = NormClassGroup::compute(&c, 0, 0).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn norms_reduce_to_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let c = ctx(BaseField::padic(3), &[FieldSpec::cyclotomic("z9", 9)]);
        let alg = Algebra::new(&c, 1, 0).unwrap();
        let g = NormClassGroup::compute(&c, 1, 0).unwrap();
        assert_eq!(g.order(), 6);
        let k = c.k();
        let x = k.mul(&sample::lnr_unit_in(k, 1, &mut rng), &k.pi_l_pow(3));
        for _ in 0..3 {
            let y = alg.ring().mul(&sample::lnr_unit_in(alg.ring(), 1, &mut rng), &alg.ring().pi_l_pow(-2));
            let xy = k.mul(&x, &field_norm(&alg, &y).unwrap());
            assert_eq!(g.class(&xy).unwrap(), g.class(&x).unwrap());
        }
    }

    #[test]
    fn eta_is_bijective_on_ramified_and_mixed_extensions() {
        let comp = FieldSpec { name: "c".into(), unramified: Some(2), cyclotomic: Some(3), ..Default::default() };
        let cases = [
            (BaseField::padic(3), vec![FieldSpec::cyclotomic("z9", 9)]),
            (BaseField::padic(3), vec![comp]),
            (BaseField::padic(2), vec![FieldSpec::eisenstein("r2", &[-2, 0, 1])]),
            (BaseField::padic(2), vec![FieldSpec::cyclotomic("z4", 4)]),
            (BaseField::laurent(2), vec![FieldSpec::unramified("t2", 2)]),
        ];
        for (base, specs) in cases {
            let c = ctx(base, &specs);
            let nr = NormResidue::compute(&c, 1, 0).unwrap();
            assert_eq!(nr.group.order() as usize, nr.ab.order(), "{}", specs[0].name);
            assert!(nr.is_homomorphism() && nr.is_bijective(), "{}", specs[0].name);
        }
    }

    #[test]
    fn functoriality_on_the_towers() {
        let z = ctx(BaseField::padic(3), &[FieldSpec::cyclotomic("z3", 3), FieldSpec::cyclotomic("z9", 9)]);
        for r in check_all_compat(&z, 2, 1).unwrap() {
            assert!(r.ok() && r.checked > 0, "{r:?}");
        }
        let comp = FieldSpec { name: "c".into(), unramified: Some(2), cyclotomic: Some(3), ..Default::default() };
        let c = ctx(BaseField::padic(3), &[FieldSpec::unramified("u2", 2), FieldSpec::cyclotomic("z3", 3), comp]);
        for l in [1, 2] {
            for r in check_all_compat(&c, 3, l).unwrap() {
                assert!(r.ok() && r.checked > 0, "{r:?}");
            }
        }
        // degenerate tower E = L
        for r in check_all_compat(&z, 1, 1).unwrap() {
            assert!(r.ok(), "{r:?}");
        }
    }
}
