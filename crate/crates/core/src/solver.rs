//! Solving `sigma(beta) = gamma * beta` in `E_B^x` for `w(gamma) = 0`.
//!
//! The split equation collapses along the chain `beta_{i-1} = gamma_i beta_i`
//! to `sigma_E(b) = delta b` in `E^nr` with `b = beta_{f-1}` and
//! `delta = gamma_0 ... gamma_{f-1}`. That equation is solved digit by digit:
//! a residue root of `x^{Q-1} = delta-bar`, then one linear equation
//! `x^Q - delta-bar x = c` over `F_p` per `pi_E`-digit.


use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::extension::{Algebra, LnrElem, Lk};
use crate::padic::residue::solve_fp;
use crate::padic::Fq;

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Index (mod the number of roots) of the residue root; 0 is canonical.
    pub tie_break: u64,
    /// Allow rebuilding the context at a larger residue degree.
    pub allow_growth: bool,
}

#[derive(Debug, Clone)]
pub struct SigmaSolution {
    /// The algebra `beta` lives in; differs from the input one after growth.
    pub alg: Algebra,
    pub beta: Lk,
    /// Valuation in `v_K` units of `sigma(beta) / (gamma beta) - 1`.
    pub residual: Ratio<i64>,
    pub m_used: usize,
}

/// `sigma(beta) / beta` compared with gamma, in `v_K` units.
pub fn residual(alg: &Algebra, beta: &Lk, gamma: &Lk) -> Ratio<i64> {
    let r = alg.ring();
    let lhs = alg.sigma(beta);
    let rhs = alg.mul(gamma, beta);
    let rel = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| r.distance(a, b) - r.val(b).unwrap_or(b.prec))
        .min()
        .unwrap_or(i64::MAX);
    Ratio::new(rel, alg.ring().e as i64)
}

/// `delta = gamma_0 ... gamma_{f-1}`.
fn chain_product(alg: &Algebra, gamma: &Lk) -> LnrElem {
    let r = alg.ring();
    gamma.iter().fold(r.one(), |acc, g| r.mul(&acc, g))
}

/// Least t with `N_{E_{Mt}/E}(delta) = 1`, i.e. the growth factor making the
/// equation solvable at a finite level (Hilbert 90). None if no t with
/// `M t <= cap` works.
fn growth_factor(alg: &Algebra, delta: &LnrElem) -> Option<usize> {
    let r = alg.ring();
    let fe = r.f as i64;
    let m = alg.ctx.m() / r.f;
    let mut eta = r.one();
    for j in 0..m {
        eta = r.mul(&eta, &r.sigma_pow(delta, j as i64 * fe));
    }
    let cap = alg.ctx.precision.residue_degree_cap / alg.ctx.m();
    let one = r.one();
    let mut acc = eta.clone();
    for t in 1..=cap {
        if r.agrees(&acc, &one) {
            return Some(t);
        }
        acc = r.mul(&acc, &eta);
    }
    None
}

/// Solves `sigma_E(b) = delta b` with b a unit of `E^nr` at the current level.
fn solve_anchor(alg: &Algebra, delta: &LnrElem, tie_break: u64) -> Result<LnrElem> {
    let r = alg.ring();
    let u = &r.unr;
    let kf = &u.residue;
    let fe = r.f;
    let q = u.base.p.pow(fe as u32);
    let dbar = r.unit_residue(delta);
    let roots = kf.roots_of(&dbar, q - 1);
    if roots.is_empty() {
        return Err(Error::ResidueBudgetExceeded { needed: u.m + 1, cap: alg.ctx.precision.residue_degree_cap });
    }
    let root = &roots[(tie_break % roots.len() as u64) as usize];
    let mut b = r.teichmuller(root);
    // L(x) = x^Q - dbar x over F_p
    let lin = kf.linear_matrix(|x| kf.sub(&kf.frobenius(x, fe), &kf.mul(&dbar, x)));
    let mut d = r.sub(&r.sigma_pow(&b, fe as i64), &r.mul(delta, &b));
    let mut last = 0;
    while let Some(k) = r.val(&d) {
        if k <= last {
            return Err(Error::PrecisionLoss("sigma solver stalled".into()));
        }
        last = k;
        let rhs: Fq = kf.sub(&kf.zero(), &r.unit_residue(&d));
        let (x, _) = solve_fp(&lin, &rhs, u.base.p, &[])
            .ok_or_else(|| Error::PrecisionLoss(format!("digit {k} of the sigma equation is unsolvable")))?;
        let t = r.mul(&r.lift(&x), &r.pi_l_pow(k));
        b = r.add(&b, &t);
        d = r.add(&d, &r.sub(&r.sigma_pow(&t, fe as i64), &r.mul(delta, &t)));
    }
    Ok(b)
}

/// `solve_sigma`: beta with `sigma(beta) = gamma beta`.
pub fn solve_sigma(alg: &Algebra, gamma: &Lk, opts: SolveOptions) -> Result<SigmaSolution> {
    let w = alg.w_val(gamma)?;
    if w != Ratio::from_integer(0) {
        return Err(Error::NonzeroSlope { num: *w.numer(), den: *w.denom() });
    }
    let delta = chain_product(alg, gamma);
    let cap = alg.ctx.precision.residue_degree_cap;
    let t = growth_factor(alg, &delta);
    match t {
        Some(1) => solve_here(alg, gamma, &delta, opts),
        Some(t) if opts.allow_growth => {
            let (ctx2, img) = alg.ctx.grown(alg.ctx.m() * t)?;
            let alg2 = Algebra::new(&ctx2, alg.top, alg.base)?;
            let g2: Lk = gamma.iter().map(|g| alg.ctx.transport(&ctx2, &img, alg.top, g)).collect();
            let d2 = chain_product(&alg2, &g2);
            solve_here(&alg2, &g2, &d2, opts)
        }
        Some(t) => Err(Error::ResidueBudgetExceeded { needed: alg.ctx.m() * t, cap }),
        // no level up to the cap works: report the first level beyond it
        None => Err(Error::ResidueBudgetExceeded { needed: (cap / alg.ctx.m() + 1) * alg.ctx.m(), cap }),
    }
}

fn solve_here(alg: &Algebra, gamma: &Lk, delta: &LnrElem, opts: SolveOptions) -> Result<SigmaSolution> {
    let certified = alg.ctx.precision.certified_digits();
    if certified <= 0 {
        return Err(Error::PrecisionLoss(format!(
            "{} pi-digits leave nothing after the loss budget",
            alg.ctx.precision.pi_digits
        )));
    }
    let r = alg.ring();
    let f = alg.f_rel;
    let b = solve_anchor(alg, delta, opts.tie_break)?;
    let mut beta = vec![b; f];
    for i in (0..f - 1).rev() {
        beta[i] = r.mul(&gamma[i + 1], &beta[i + 1]);
    }
    let residual = residual(alg, &beta, gamma);
    if residual < Ratio::from_integer(certified) {
        return Err(Error::PrecisionLoss(format!("solution certified only to {residual}")));
    }
    Ok(SigmaSolution { alg: alg.clone(), beta, residual, m_used: alg.ctx.m() })
}

/// Outcome of [`verify_exactness`]; every list holds the failing sample indices.
#[derive(Debug, Clone, Default)]
pub struct ExactnessReport {
    pub kernel_violations: Vec<usize>,
    pub slope_violations: Vec<usize>,
    pub image_violations: Vec<usize>,
    pub samples: usize,
}

impl ExactnessReport {
    pub fn ok(&self) -> bool {
        self.kernel_violations.is_empty() && self.slope_violations.is_empty() && self.image_violations.is_empty()
    }
}

/// Checks the exact sequence `1 -> E^x -> E_B^x -> E_B^x -> Q -> 0` on
/// samples: elements of E are sigma-fixed, `w(sigma(x)/x) = 0`, and
/// `w(iota(pi_E^r)) = r/d` covers `d^{-1} Z / Z`.
pub fn verify_exactness(alg: &Algebra, field_elems: &[LnrElem], units: &[Lk]) -> Result<ExactnessReport> {
    let r = alg.ring();
    let mut rep = ExactnessReport { samples: field_elems.len() + units.len(), ..Default::default() };
    for (i, l) in field_elems.iter().enumerate() {
        let x = alg.embed_top(l);
        if !alg.agrees(&alg.sigma(&x), &x) {
            rep.kernel_violations.push(i);
        }
    }
    for (i, x) in units.iter().enumerate() {
        let q = alg.div(&alg.sigma(x), x)?;
        if alg.w_val(&q)? != Ratio::from_integer(0) {
            rep.slope_violations.push(i);
        }
    }
    let d = alg.degree() as i64;
    for rr in 0..d {
        let mut x = alg.one();
        x[0] = r.pi_l_pow(rr);
        if alg.w_val(&x)? != Ratio::new(rr, d) {
            rep.image_violations.push(rr as usize);
        }
    }
    Ok(rep)
}
