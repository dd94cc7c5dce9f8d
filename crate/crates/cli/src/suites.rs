//! Command bodies and the verification suites.

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use lcft::extension::{Algebra, Lk};
use lcft::fundamental::{
    beta_residuals, closed_form_invariant, cocycle, default_alpha, find_coboundary, frobenius_power_index,
    transfer_identity_check, unramified_cocycle, unramified_invariant, Cocycle,
};
use lcft::norm_residue::{check_all_compat, NormResidue};
use lcft::sample;
use lcft::solver::{solve_sigma, verify_exactness, SolveOptions};
use lcft::weil::{self, WeilGroup};

use crate::config::{AlphaPolicy, ExtTarget, RunConfig};
use crate::error::CliError;
use crate::report::{Check, Report};
use crate::serial::{element, parse_element, rational, split, weil_element};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Solver,
    Cocycle,
    Nrs,
    Weil,
    Tower,
    #[default]
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

/// A per-check generator: the run seed mixed with an FNV-1a hash of the id.
pub fn rng_for(seed: u64, id: &str) -> ChaCha8Rng {
    let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn alpha_for(cfg: &RunConfig, t: &ExtTarget, alg: &Algebra) -> lcft::Result<(Lk, String)> {
    if let AlphaPolicy::Explicit(map) = &cfg.alpha {
        if let Some(parts) = map.get(&t.name) {
            let r = alg.ring();
            let x = parts
                .iter()
                .map(|j| parse_element(r, j).map_err(|e| lcft::Error::Config(e.to_string())))
                .collect::<lcft::Result<Vec<_>>>()?;
            return Ok((alg.from_tuple(x)?, format!("{}:explicit", t.name)));
        }
    }
    Ok((default_alpha(alg)?, format!("{}:auto", t.name)))
}

fn tol(alg: &Algebra) -> Ratio<i64> {
    Ratio::from_integer(alg.ctx.precision.certified_digits())
}

// ---------- build ----------

pub fn build(cfg: &RunConfig, name: &str, seed: u64) -> Result<Report, CliError> {
    let t = cfg.extension(name)?;
    let mut rep = Report::new("build", name, seed);
    let ext = t.ctx.field(t.top);
    let f = &ext.field;
    rep.data = json!({
        "name": f.name,
        "base": t.base,
        "p": t.ctx.base_field.p,
        "e": f.e,
        "f": f.f,
        "degree": f.degree(),
        "eisenstein": f.eis,
        "level": t.ctx.m(),
        "galois": {
            "order": ext.group.order(),
            "abelian": ext.group.is_abelian(),
            "table": ext.group.table,
        },
    });
    rep.checks.push(Check::new(
        format!("{name}/galois"),
        "Aut_K(L) has order [L:K]",
        ext.is_galois(),
        json!(ext.group.order()),
        json!(f.degree()),
    ));
    Ok(rep.finish())
}

// ---------- cocycle ----------

fn cocycle_checks(cfg: &RunConfig, t: &ExtTarget, rep: &mut Report) -> lcft::Result<Cocycle> {
    let alg = Algebra::new(&t.ctx, t.top, 0)?;
    let (alpha, _) = alpha_for(cfg, t, &alg)?;
    let c = cocycle(&alg, &alpha, SolveOptions::default())?;
    let n = &t.name;
    let res = c.relation_residual()?;
    rep.checks.push(
        Check::new(format!("{n}/cocycle/relation"), "2-cocycle relation", res >= tol(&alg), json!("a_st a_(st)u"), json!("s(a_tu) a_s(tu)"))
            .residual(Some(res)),
    );
    for (s, res) in beta_residuals(&c)?.into_iter().enumerate() {
        rep.checks.push(
            Check::new(format!("{n}/cocycle/beta/{s}"), "sigma(beta_s) = s(alpha)/alpha beta_s", res >= tol(&alg), json!("sigma(beta_s)"), json!("(s-1)alpha beta_s"))
                .residual(Some(res)),
        );
    }
    let br = alg.base_ring();
    for line in transfer_identity_check(&c)? {
        let ok = line.fixed && line.residual >= tol(&alg);
        rep.checks.push(
            Check::new(
                format!("{n}/cocycle/transfer/{}", line.s),
                "N(beta_s) = prod_t a_(t,s), sigma- and G-fixed",
                ok,
                json!(element(br, &line.norm)),
                json!(element(alg.ring(), &line.product)),
            )
            .residual(Some(line.residual)),
        );
    }
    if alg.e_rel == 1 && alg.degree() > 1 {
        let r = alg.ring();
        let v = r.val(&c.alpha[0]).unwrap_or(0) + c.alpha[1..].iter().map(|x| r.val(x).unwrap_or(0)).sum::<i64>();
        let closed = unramified_cocycle(&alg, &r.pi_l_pow(v))?;
        let cob = find_coboundary(&alg, &c.table, &closed, 2)?;
        rep.checks.push(Check::new(
            format!("{n}/cocycle/closed-form"),
            "unramified cocycle cohomologous to the closed form",
            cob.is_some(),
            json!("cocycle(alpha)"),
            json!(format!("closed form with a = pi^{v}")),
        ));
        let inv = unramified_invariant(&alg, &c.table)?;
        let expect = closed_form_invariant(v, alg.degree())?;
        rep.checks.push(Check::new(
            format!("{n}/cocycle/invariant"),
            "invariant -v(a)/d mod 1",
            inv == expect,
            rational(inv),
            rational(expect),
        ));
    }
    Ok(c)
}

pub fn cocycle_cmd(cfg: &RunConfig, name: &str, seed: u64) -> Result<Report, CliError> {
    let t = cfg.extension(name)?;
    let mut rep = Report::new("cocycle", name, seed);
    match cocycle_checks(cfg, &t, &mut rep) {
        Ok(c) => {
            let r = c.alg.ring();
            rep.data = json!({
                "alpha": split(r, &c.alpha),
                "group": c.alg.group.members,
                "table": c.table.iter().map(|row| row.iter().map(|x| element(r, x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
        }
        Err(e) => rep.checks.push(Check::error(format!("{name}/cocycle"), "cocycle of alpha", &e)),
    }
    Ok(rep.finish())
}

// ---------- norm residue ----------

/// Symbol to evaluate: `theta(a)` for a = "pi" or an integer, or `eta(s)` for
/// s = "id" or an index of `Aut_K(L)`.
#[derive(Debug, Clone)]
pub enum Symbol {
    Theta(String),
    Eta(String),
    Table,
}

fn nrs_checks(cfg: &RunConfig, t: &ExtTarget, rep: &mut Report) -> lcft::Result<NormResidue> {
    let alg = Algebra::new(&t.ctx, t.top, 0)?;
    let (alpha, _) = alpha_for(cfg, t, &alg)?;
    let nr = NormResidue::with_alpha(&alg, alpha, SolveOptions::default())?;
    let n = &t.name;
    rep.checks.push(Check::new(
        format!("{n}/nrs/homomorphism"),
        "eta(st) = eta(s) eta(t)",
        nr.is_homomorphism(),
        json!("eta(st)"),
        json!("eta(s) eta(t)"),
    ));
    rep.checks.push(Check::new(
        format!("{n}/nrs/bijective"),
        "eta: G^ab -> K^x/N L^x is bijective",
        nr.is_bijective(),
        json!(nr.ab.order()),
        json!(nr.group.order()),
    ));
    if alg.e_rel == 1 && alg.degree() > 1 && matches!(cfg.alpha, AlphaPolicy::Auto) {
        let d = alg.degree() as i64;
        let s = frobenius_power_index(&alg, 1)?;
        let k = t.ctx.k();
        let raw = &nr.values[s].raw;
        let expect = k.pi_l_pow(-(d - 1));
        rep.checks.push(Check::new(
            format!("{n}/nrs/frobenius-raw"),
            "eta(sigma_arith) = pi^-(d-1)",
            k.agrees(raw, &expect),
            json!(element(k, raw)),
            json!(element(k, &expect)),
        ));
        let pi_class = nr.group.class(&k.pi())?;
        rep.checks.push(Check::new(
            format!("{n}/nrs/frobenius-class"),
            "eta(sigma_arith) ~ pi",
            nr.values[s].class == pi_class,
            json!(nr.values[s].class),
            json!(pi_class),
        ));
    }
    Ok(nr)
}

fn parse_k_element(t: &ExtTarget, a: &str) -> Result<lcft::extension::LnrElem, CliError> {
    let k = t.ctx.k();
    if a == "pi" {
        return Ok(k.pi());
    }
    let v: i64 = a.parse().map_err(|_| CliError::Config(format!("cannot read {a:?} as an element (use pi or an integer)")))?;
    if v == 0 {
        return Err(CliError::Config("theta(0) is undefined".into()));
    }
    Ok(k.from_i64(v))
}

pub fn nrs_cmd(cfg: &RunConfig, name: &str, symbol: Symbol, seed: u64) -> Result<Report, CliError> {
    let t = cfg.extension(name)?;
    let mut rep = Report::new("nrs", name, seed);
    let nr = match nrs_checks(cfg, &t, &mut rep) {
        Ok(nr) => nr,
        Err(e) => {
            rep.checks.push(Check::error(format!("{name}/nrs"), "norm residue map", &e));
            return Ok(rep.finish());
        }
    };
    let k = t.ctx.k();
    let g = &nr.alg.group;
    let eta_entry = |s: usize| {
        json!({
            "s": g.members[s],
            "order": g.elem_order(s),
            "raw": element(k, &nr.values[s].raw),
            "class": nr.values[s].class,
        })
    };
    rep.data = match symbol {
        Symbol::Table => json!({
            "invariants": nr.group.invariants,
            "eta": (0..g.order()).map(eta_entry).collect::<Vec<_>>(),
        }),
        Symbol::Eta(s) => {
            let global = if s == "id" { 0 } else { s.parse().map_err(|_| CliError::Config(format!("bad automorphism {s:?}")))? };
            let local = g.local(global).ok_or_else(|| CliError::Config(format!("no automorphism {global}")))?;
            json!({ "eta": eta_entry(local), "invariants": nr.group.invariants })
        }
        Symbol::Theta(a) => {
            let x = parse_k_element(&t, &a)?;
            match nr.theta(&x) {
                Ok(s) => json!({
                    "theta": { "argument": a, "s": g.members[s], "order": g.elem_order(s), "class": nr.group.class(&x)? },
                }),
                Err(e) => {
                    rep.checks.push(Check::error(format!("{name}/nrs/theta"), "theta(a)", &e));
                    Value::Null
                }
            }
        }
    };
    Ok(rep.finish())
}

// ---------- Weil groups ----------

fn weil_checks(cfg: &RunConfig, t: &ExtTarget, seed: u64, rep: &mut Report) -> lcft::Result<Vec<Value>> {
    let alg = Algebra::new(&t.ctx, t.top, 0)?;
    let (alpha, alpha_ref) = alpha_for(cfg, t, &alg)?;
    let w = WeilGroup::new(&alg, alpha)?;
    let n = &t.name;
    let id = format!("{n}/weil/laws");
    let laws = weil::group_laws(&w, cfg.samples.laws, &mut rng_for(seed, &id))?;
    let res_ok = laws.min_residual.is_none_or(|r| r >= w.tolerance());
    rep.checks.push(
        Check::new(id, "W(alpha) group laws", laws.ok() && res_ok, json!(laws.checked), json!(laws.violations))
            .residual(laws.min_residual),
    );
    let id = format!("{n}/weil/ker-p");
    let kp = weil::kernel_of_p(&w, cfg.samples.tower, &mut rng_for(seed, &id))?;
    rep.checks.push(Check::new(id, "ker p = L^x", kp.ok(), json!(kp.checked), json!(kp.violations)));
    let group = lcft::norm_residue::NormClassGroup::compute(&t.ctx, t.top, 0)?;
    let id = format!("{n}/weil/projection");
    let pc = weil::projection_checks(&w, &group, cfg.samples.tower, &mut rng_for(seed, &id))?;
    rep.checks.push(Check::new(id, "abelian projection = eta = transfer", pc.ok(), json!(pc.checked), json!(pc.violations)));
    if alg.e_rel == 1 && alg.degree() == 2 && matches!(cfg.alpha, AlphaPolicy::Auto) {
        let r = alg.ring();
        let s = frobenius_power_index(&alg, 1)?;
        let g = w.element(alg.from_tuple(vec![r.pi_l_pow(-1), r.one()])?, s)?;
        let sq = g.mul(&g)?;
        let expect = alg.embed_top(&r.pi_l_pow(-1));
        let exact = sq.s == 0 && sq.beta.iter().zip(&expect).all(|(x, y)| x.shift == y.shift && x.c == y.c);
        rep.checks.push(Check::new(
            format!("{n}/weil/square"),
            "g^2 = (iota(pi^-1), id)",
            exact,
            weil_element(&sq, &alpha_ref),
            split(r, &expect),
        ));
    }
    (0..alg.group.order())
        .map(|s| Ok(weil_element(&w.lift(s, SolveOptions::default())?, &alpha_ref)))
        .collect()
}

pub fn weil_cmd(cfg: &RunConfig, name: &str, seed: u64) -> Result<Report, CliError> {
    let t = cfg.extension(name)?;
    let mut rep = Report::new("weil", name, seed);
    match weil_checks(cfg, &t, seed, &mut rep) {
        Ok(lifts) => rep.data = json!({ "lifts": lifts }),
        Err(e) => rep.checks.push(Check::error(format!("{name}/weil"), "W(alpha)", &e)),
    }
    Ok(rep.finish())
}

// ---------- per-extension suites ----------

fn algebra_suite(cfg: &RunConfig, t: &ExtTarget, seed: u64) -> Vec<Check> {
    let n = &t.name;
    let run = || -> lcft::Result<Vec<Check>> {
        let alg = Algebra::new(&t.ctx, t.top, 0)?;
        let mut rng = rng_for(seed, &format!("{n}/algebra"));
        let mut out = vec![];
        let d = alg.degree();
        let mut commute = true;
        let mut mult = true;
        let k = alg.base_ring();
        for _ in 0..8 {
            let x = sample::lk_element(&alg, &mut rng);
            let y = sample::lk_element(&alg, &mut rng);
            for s in 0..d {
                commute &= alg.agrees(&alg.sigma(&alg.galois(s, &x)?), &alg.galois(s, &alg.sigma(&x))?);
            }
            mult &= k.agrees(&alg.norm(&alg.mul(&x, &y))?, &k.mul(&alg.norm(&x)?, &alg.norm(&y)?));
        }
        out.push(Check::new(format!("{n}/algebra/sigma-galois"), "sigma commutes with G", commute, json!(true), json!(commute)));
        out.push(Check::new(format!("{n}/algebra/norm"), "N(xy) = N(x) N(y)", mult, json!(true), json!(mult)));
        let (alpha, _) = alpha_for(cfg, t, &alg)?;
        let w = alg.w_val(&alpha)?;
        let expect = Ratio::new(-1, d as i64);
        out.push(Check::new(format!("{n}/algebra/w-alpha"), "w(alpha) = -1/d", w == expect, rational(w), rational(expect)));
        let slope = alg.slope_empirical(&alpha, 4 * d)?;
        out.push(Check::new(format!("{n}/algebra/slope"), "slope of F_alpha = w(alpha)", slope == w, rational(slope), rational(w)));
        let r = alg.ring();
        let fields: Vec<_> = (0..8).map(|_| sample::lnr_unit_in(r, r.f, &mut rng)).collect();
        let units: Vec<_> = (0..8).map(|_| sample::lk_element(&alg, &mut rng)).collect();
        let ex = verify_exactness(&alg, &fields, &units)?;
        out.push(Check::new(format!("{n}/algebra/exactness"), "1 -> L^x -> L_K^x -> L_K^x -> Q -> 0", ex.ok(), json!(ex.samples), json!(format!("{ex:?}"))));
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![Check::error(format!("{n}/algebra"), "L_K structure", &e)])
}

/// Solver soundness on `count` random `gamma = zeta sigma(b)/b` (zeta on every
/// tenth sample): each solution is certified and the tie-break perturbations
/// 1 and 2 differ from the canonical solution by sigma-fixed factors.
pub fn solver_soundness(alg: &Algebra, count: usize, rng: &mut ChaCha8Rng) -> lcft::Result<SolverStats> {
    let mut st = SolverStats::default();
    let cap = alg.ctx.precision.residue_degree_cap;
    for i in 0..count {
        let gamma = sample::sigma_gamma(alg, i % 10 == 9, rng)?;
        let solve = |tie_break| solve_sigma(alg, &gamma, SolveOptions { tie_break, allow_growth: true });
        let base = match solve(0) {
            Ok(s) => s,
            Err(lcft::Error::ResidueBudgetExceeded { needed, .. }) if needed > cap => {
                st.declined += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        st.solved += 1;
        st.min_residual = Some(st.min_residual.map_or(base.residual, |m: Ratio<i64>| m.min(base.residual)));
        if base.residual < tol(alg) {
            st.failures.push(format!("sample {i}: residual {}", base.residual));
        }
        for tb in [1, 2] {
            let other = solve(tb)?;
            let a2 = &base.alg;
            let q = a2.div(&other.beta, &base.beta)?;
            if !a2.close(&a2.sigma(&q), &q) || other.residual < tol(alg) {
                st.failures.push(format!("sample {i}: tie-break {tb} differs by a non-fixed factor"));
            }
        }
    }
    Ok(st)
}

#[derive(Debug, Clone, Default)]
pub struct SolverStats {
    pub solved: usize,
    /// Samples whose growth level exceeds the residue cap, declined with
    /// `ResidueBudgetExceeded`.
    pub declined: usize,
    pub failures: Vec<String>,
    pub min_residual: Option<Ratio<i64>>,
}

fn solver_suite(cfg: &RunConfig, t: &ExtTarget, seed: u64) -> Vec<Check> {
    let n = &t.name;
    let id = format!("{n}/solver/soundness");
    let run = || -> lcft::Result<Vec<Check>> {
        let alg = Algebra::new(&t.ctx, t.top, 0)?;
        let st = solver_soundness(&alg, cfg.samples.solver, &mut rng_for(seed, &id))?;
        let mut out = vec![Check::new(
            id.clone(),
            "sigma(beta) = gamma beta, tie-breaks differ by sigma-fixed factors",
            st.failures.is_empty(),
            json!({ "solved": st.solved, "declined_beyond_cap": st.declined }),
            json!({ "failures": st.failures }),
        )
        .residual(st.min_residual)];
        // nonzero slope is rejected
        let mut gamma = alg.one();
        gamma[0] = alg.ring().pi_l();
        let rejected = matches!(solve_sigma(&alg, &gamma, SolveOptions::default()), Err(lcft::Error::NonzeroSlope { .. }));
        out.push(Check::new(format!("{n}/solver/slope"), "no solution for w(gamma) != 0", rejected, json!("pi_L"), json!("NonzeroSlope")));
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![Check::error(id.clone(), "sigma solver", &e)])
}

fn extension_suites(cfg: &RunConfig, t: &ExtTarget, suite: Suite, seed: u64) -> Vec<Check> {
    let mut out = vec![];
    if suite.includes(Suite::Algebra) {
        out.extend(algebra_suite(cfg, t, seed));
    }
    if suite.includes(Suite::Solver) {
        out.extend(solver_suite(cfg, t, seed));
    }
    let mut rep = Report::new("", "", seed);
    if suite.includes(Suite::Cocycle) {
        if let Err(e) = cocycle_checks(cfg, t, &mut rep) {
            rep.checks.push(Check::error(format!("{}/cocycle", t.name), "cocycle of alpha", &e));
        }
    }
    if suite.includes(Suite::Nrs) {
        if let Err(e) = nrs_checks(cfg, t, &mut rep) {
            rep.checks.push(Check::error(format!("{}/nrs", t.name), "norm residue map", &e));
        }
    }
    if suite.includes(Suite::Weil) {
        if let Err(e) = weil_checks(cfg, t, seed, &mut rep) {
            rep.checks.push(Check::error(format!("{}/weil", t.name), "W(alpha)", &e));
        }
    }
    out.extend(rep.checks);
    out
}

// ---------- per-tower suites ----------

fn tower_suites(cfg: &RunConfig, name: &str, suite: Suite, seed: u64) -> Vec<Check> {
    let t = match cfg.tower(name) {
        Ok(t) => t,
        Err(CliError::Core(e)) => return vec![Check::error(format!("{name}/tower"), "tower", &e)],
        Err(e) => return vec![Check::error(format!("{name}/tower"), "tower", &lcft::Error::Config(e.to_string()))],
    };
    let mut rep = Report::new("", "", seed);
    for (mid, l) in &t.middle {
        let pre = format!("{name}/{mid}");
        if suite.includes(Suite::Nrs) {
            match check_all_compat(&t.ctx, t.top, *l) {
                Ok(diagrams) => {
                    for d in diagrams {
                        rep.checks.push(Check::new(
                            format!("{pre}/nrs/{}", d.diagram),
                            "functoriality of eta",
                            d.ok() && d.checked > 0,
                            json!(d.checked),
                            json!(d.violations),
                        ));
                    }
                }
                Err(e) => rep.checks.push(Check::error(format!("{pre}/nrs"), "functoriality of eta", &e)),
            }
        }
        if suite.includes(Suite::Weil) {
            let id = format!("{pre}/weil/kernel");
            let out = weil::kernel_checks(&t.ctx, t.top, *l, cfg.samples.tower, &mut rng_for(seed, &id)).map(|k| {
                Check::new(id.clone(), "ker(pi) contains commutators; ker(pi) on E^x = ker N", k.ok(), json!(k.checked), json!(k.violations))
                    .residual(k.min_residual)
            });
            rep.push(id.clone(), "kernel of pi", out);
            rep.checks.push(Check::skipped(
                format!("{pre}/weil/kernel-factorization"),
                "ker(pi) = i(W^c)",
                "kernel elements as products of commutators: not constructively verified",
            ));
            let id = format!("{pre}/weil/shafarevich-weil");
            let out = weil::shafarevich_weil_compare(&t.ctx, t.top, *l).map(|sw| {
                Check::new(
                    id.clone(),
                    "W_{L/K} / N E^x = G_{E/K} as extensions",
                    sw.quotient_order == sw.galois_order,
                    json!({ "order": sw.quotient_order, "cyclic": sw.quotient_cyclic, "exponent": sw.quotient_exponent }),
                    json!({ "order": sw.galois_order, "cochain": sw.cochain }),
                )
            });
            rep.push(id.clone(), "Shafarevich-Weil", out);
        }
        if suite.includes(Suite::Tower) {
            let id = format!("{pre}/tower");
            let out = weil::tower_check(&t.ctx, t.top, *l, cfg.samples.tower, &mut rng_for(seed, &id)).map(|k| {
                Check::new(id.clone(), "pi- and i-transitivity, mixed square", k.ok(), json!(k.checked), json!(k.violations))
                    .residual(k.min_residual)
            });
            rep.push(id.clone(), "tower transitivity", out);
        }
    }
    rep.checks
}

pub fn verify(cfg: &RunConfig, suite: Suite, only: Option<&str>, seed: u64) -> Result<Report, CliError> {
    let target = only.unwrap_or("corpus");
    let mut rep = Report::new("verify", target, seed);
    let names: Vec<String> = match only {
        Some(n) => vec![n.to_string()],
        None => cfg.extensions(),
    };
    let targets = names.iter().map(|n| cfg.extension(n)).collect::<Result<Vec<_>, _>>()?;
    let ext_checks: Vec<Vec<Check>> = targets.par_iter().map(|t| extension_suites(cfg, t, suite, seed)).collect();
    rep.checks.extend(ext_checks.into_iter().flatten());
    if only.is_none() {
        let towers = cfg.towers();
        let tower_checks: Vec<Vec<Check>> = towers.par_iter().map(|n| tower_suites(cfg, n, suite, seed)).collect();
        rep.checks.extend(tower_checks.into_iter().flatten());
    }
    Ok(rep.finish())
}
