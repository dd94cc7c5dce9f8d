//! Random elements for tests and the randomized acceptance suites.

use rand::Rng;

use crate::error::Result;
use crate::extension::{Algebra, LnrElem, LnrRing, Lk};
use crate::padic::{Rm, UnramRing};

/// A random element of `R_M` with every digit uniform.
pub fn rm<R: Rng>(u: &UnramRing, rng: &mut R) -> Rm {
    let n = u.base.n as usize;
    (0..u.m)
        .map(|_| {
            let digits: Vec<u64> = (0..n).map(|_| rng.gen_range(0..u.base.p)).collect();
            u.base.from_digits(&digits)
        })
        .collect()
}

/// A random unit of `R_M`.
pub fn rm_unit<R: Rng>(u: &UnramRing, rng: &mut R) -> Rm {
    loop {
        let x = rm(u, rng);
        if u.is_unit(&x) {
            return x;
        }
    }
}

/// A random unit of `L^nr` whose coefficients lie in `R_f` (f | M), i.e. a
/// unit of the field itself when f is its residue degree.
pub fn lnr_unit_in<R: Rng>(r: &LnrRing, f: usize, rng: &mut R) -> LnrElem {
    let u = &r.unr;
    let rho = u.sub_gen(f).clone();
    let coeff = |rng: &mut R| {
        let mut acc = u.zero();
        let mut pw = u.one();
        for _ in 0..f {
            acc = u.add(&acc, &u.mul(&pw, &u.scalar(u.base.from_digits(&rand_digits(u, rng)))));
            pw = u.mul(&pw, &rho);
        }
        acc
    };
    loop {
        let poly: Vec<Rm> = (0..r.e).map(|_| coeff(rng)).collect();
        if u.is_unit(&poly[0]) {
            return r.from_poly(0, poly);
        }
    }
}

/// A random unit of `L^nr` with arbitrary `R_M` coefficients.
pub fn lnr_unit<R: Rng>(r: &LnrRing, rng: &mut R) -> LnrElem {
    lnr_unit_in(r, r.unr.m, rng)
}

fn rand_digits<R: Rng>(u: &UnramRing, rng: &mut R) -> Vec<u64> {
    (0..u.base.n).map(|_| rng.gen_range(0..u.base.p)).collect()
}

/// A random `b` of `E_B^x` (components: units times `pi_E^k`, `|k| <= 2`).
pub fn lk_element<R: Rng>(alg: &Algebra, rng: &mut R) -> Lk {
    let r = alg.ring();
    (0..alg.f_rel).map(|_| r.mul(&lnr_unit(r, rng), &r.pi_l_pow(rng.gen_range(-2..=2)))).collect()
}

/// A random `gamma = zeta sigma(b) / b` with `w(gamma) = 0`: b from
/// [`lk_element`], and zeta (when `twist`) a random Teichmuller root of unity
/// of the current level in the first component.
pub fn sigma_gamma<R: Rng>(alg: &Algebra, twist: bool, rng: &mut R) -> Result<Lk> {
    let b = lk_element(alg, rng);
    let mut gamma = alg.div(&alg.sigma(&b), &b)?;
    if twist {
        let r = alg.ring();
        let zeta = r.teichmuller(&r.unit_residue(&lnr_unit(r, rng)));
        gamma[0] = r.mul(&gamma[0], &zeta);
    }
    Ok(gamma)
}
