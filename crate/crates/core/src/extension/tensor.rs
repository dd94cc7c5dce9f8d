//! Tensor-basis form of `L_K`: `pi_L^shift * sum c_{a,b} pi_L^a omega^b` with
//! `c_{a,b} in K^nr`. Used as an independent model of the ring structure and
//! the Galois action.

use super::algebra::{Algebra, Lk};
use super::galois;
use super::lnr::LnrElem;
use crate::error::{Error, Result};
use crate::padic::{Rm, UnramRing};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElem {
    pub shift: i64,
    /// `coeffs[a][b]`, a < e, b < f.
    pub coeffs: Vec<Vec<Rm>>,
    pub prec: i64,
}

fn check(alg: &Algebra) -> Result<()> {
    if alg.base != 0 {
        return Err(Error::IncompatibleTower("tensor form is defined over the base field only".into()));
    }
    Ok(())
}

/// Solves `V c = y` over `R_M` for a matrix with unit determinant.
fn solve_unit(r: &UnramRing, v: &[Vec<Rm>], y: &[Rm]) -> Result<Vec<Rm>> {
    let n = v.len();
    let mut m: Vec<Vec<Rm>> = v.iter().zip(y).map(|(row, yi)| row.iter().cloned().chain([yi.clone()]).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| r.is_unit(&m[i][col])).ok_or(Error::NotInvertible)?;
        m.swap(col, piv);
        let inv = r.inv(&m[col][col]).ok_or(Error::NotInvertible)?;
        for c in 0..=n {
            m[col][c] = r.mul(&m[col][c], &inv);
        }
        for i in 0..n {
            if i != col && !r.is_zero(&m[i][col]) {
                let f = m[i][col].clone();
                for c in 0..=n {
                    let t = r.mul(&f, &m[col][c]);
                    m[i][c] = r.sub(&m[i][c], &t);
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}

fn vandermonde(alg: &Algebra) -> Vec<Vec<Rm>> {
    let r = alg.ring();
    let f = alg.f_rel;
    let rho = r.unr.sub_gen(f).clone();
    (0..f)
        .map(|i| {
            let si = r.unr.sigma_pow(&rho, i as i64);
            let mut row = vec![r.unr.one()];
            for b in 1..f {
                row.push(r.unr.mul(&row[b - 1], &si));
            }
            row
        })
        .collect()
}

/// Split -> tensor.
pub fn to_tensor(alg: &Algebra, x: &Lk) -> Result<TensorElem> {
    check(alg)?;
    let r = alg.ring();
    let (e, f) = (r.e, alg.f_rel);
    let shift = x.iter().map(|c| c.shift).min().unwrap_or(0);
    let prec = x.iter().map(|c| c.prec).min().unwrap_or(0);
    let polys: Vec<Vec<Rm>> = x
        .iter()
        .map(|c| if r.is_zero(c) { r.poly_zero() } else { r.poly_mul_pi_l_pow(&c.c, c.shift - shift) })
        .collect();
    let v = vandermonde(alg);
    let mut coeffs = vec![vec![r.unr.zero(); f]; e];
    for a in 0..e {
        let y: Vec<Rm> = (0..f).map(|i| r.unr.sigma_pow(&polys[i][a], i as i64)).collect();
        coeffs[a] = solve_unit(&r.unr, &v, &y)?;
    }
    Ok(TensorElem { shift, coeffs, prec })
}

/// Tensor -> split: component i is `sum sigma^{-i}(c_{a,b}) rho^b pi^a`.
pub fn from_tensor(alg: &Algebra, t: &TensorElem) -> Result<Lk> {
    check(alg)?;
    let r = alg.ring();
    let f = alg.f_rel;
    let rho = r.unr.sub_gen(f).clone();
    let mut rho_pows = vec![r.unr.one()];
    for b in 1..f {
        rho_pows.push(r.unr.mul(&rho_pows[b - 1], &rho));
    }
    Ok((0..f)
        .map(|i| {
            let poly: Vec<Rm> = t
                .coeffs
                .iter()
                .map(|row| {
                    row.iter().enumerate().fold(r.unr.zero(), |acc, (b, c)| {
                        r.unr.add(&acc, &r.unr.mul(&r.unr.sigma_pow(c, -(i as i64)), &rho_pows[b]))
                    })
                })
                .collect();
            r.from_poly_prec(t.shift, poly, t.prec)
        })
        .collect())
}

/// Product computed in `K^nr[X, Y]` modulo the Eisenstein polynomial in X and
/// the lifted residue polynomial of omega in Y.
pub fn tensor_mul(alg: &Algebra, x: &TensorElem, y: &TensorElem) -> Result<TensorElem> {
    check(alg)?;
    let r = alg.ring();
    let u = &r.unr;
    let (e, f) = (r.e, alg.f_rel);
    let mut prod = vec![vec![u.zero(); 2 * f - 1]; 2 * e - 1];
    for a in 0..e {
        for b in 0..f {
            for a2 in 0..e {
                for b2 in 0..f {
                    let t = u.mul(&x.coeffs[a][b], &y.coeffs[a2][b2]);
                    prod[a + a2][b + b2] = u.add(&prod[a + a2][b + b2], &t);
                }
            }
        }
    }
    // omega^f = -sum p_j omega^j
    let pf = crate::padic::residue::table_polynomial(u.base.p, f);
    let pf: Vec<u64> = pf.iter().map(|&c| u.base.from_i64(c as i64)).collect();
    for row in prod.iter_mut() {
        for top in (f..2 * f - 1).rev() {
            let c = std::mem::replace(&mut row[top], u.zero());
            for j in 0..f {
                let t = u.scale(&c, pf[j]);
                row[top - f + j] = u.sub(&row[top - f + j], &t);
            }
        }
        row.truncate(f);
    }
    // pi^e = -sum a_j pi^j
    for top in (e..2 * e - 1).rev() {
        let c = std::mem::replace(&mut prod[top], vec![u.zero(); f]);
        for j in 0..e {
            for b in 0..f {
                let t = u.scale(&c[b], r.eis_coeff(j));
                prod[top - e + j][b] = u.sub(&prod[top - e + j][b], &t);
            }
        }
    }
    prod.truncate(e);
    let prec = (x.prec + y.shift).min(y.prec + x.shift);
    Ok(TensorElem { shift: x.shift + y.shift, coeffs: prod, prec })
}

/// `(1 (x) s)`: substitutes `s(pi)` and `s(omega)` and re-expands in the basis
/// with base-field coordinates.
pub fn tensor_galois(alg: &Algebra, s: usize, x: &TensorElem) -> Result<TensorElem> {
    check(alg)?;
    let r = alg.ring();
    let u = &r.unr;
    let (e, f) = (r.e, alg.f_rel);
    let a = alg.ext().auto(alg.group.members[s]);
    let rho = r.scalar(u.sub_gen(f));
    let s_rho = galois::apply(r, a, &rho)?;
    let s_pi = a.root.clone();
    let mut out = vec![vec![u.zero(); f]; e];
    let sp_shift = r.pow(&s_pi, x.shift)?;
    // s(pi)^shift * s(pi)^a s(omega)^b expanded; the leading pi^shift is kept
    // and the unit ratio s(pi)^shift / pi^shift folded into the coefficients.
    let ratio = r.mul(&sp_shift, &r.pi_l_pow(-x.shift));
    for ai in 0..e {
        for bi in 0..f {
            let mono = r.mul(&r.mul(&r.pow(&s_pi, ai as i64)?, &r.pow(&s_rho, bi as i64)?), &ratio);
            let poly = r.poly_mul_pi_l_pow(&mono.c, mono.shift);
            // coordinates of each R_f coefficient in the basis rho^b
            for (a2, c) in poly.iter().enumerate() {
                let coords = u.sub_coordinates(f, c).ok_or(Error::NotInL(ai, bi))?;
                for (b2, lam) in coords.iter().enumerate() {
                    let t = u.scale(&x.coeffs[ai][bi], *lam);
                    out[a2][b2] = u.add(&out[a2][b2], &t);
                }
            }
        }
    }
    Ok(TensorElem { shift: x.shift, coeffs: out, prec: x.prec })
}

/// A split element from an `L^nr` element list, for tests.
pub fn split_of(x: &[LnrElem]) -> Lk {
    x.to_vec()
}
