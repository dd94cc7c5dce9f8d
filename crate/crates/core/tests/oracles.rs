//! Independent oracles for norm groups and reciprocity: the quadratic Hilbert
//! symbol, the unit filtration description of cyclotomic norm groups, and the
//! explicit action of units on roots of unity.

use std::sync::Arc;

use lcft::extension::{Context, FieldSpec};
use lcft::norm_residue::{NormClassGroup, NormResidue};
use lcft::padic::{BaseField, Precision};

fn context(base: BaseField, spec: FieldSpec) -> Arc<Context> {
    Arc::new(Context::new(base, Precision::default(), &[spec]).unwrap())
}

fn split_p(mut a: i64, p: i64) -> (i64, i64) {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    (v, a)
}

fn legendre(u: i64, p: i64) -> i64 {
    let mut r = 1i64;
    let (mut b, mut e) = (u.rem_euclid(p), (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 { 1 } else { -1 }
}

/// The Hilbert symbol `(a, b)_p` over `Q_p`.
fn hilbert(a: i64, b: i64, p: i64) -> i64 {
    let (al, u) = split_p(a, p);
    let (be, v) = split_p(b, p);
    if p == 2 {
        let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
        let omega = |x: i64| ((x * x - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + al * omega(v) + be * omega(u);
        if e % 2 == 0 { 1 } else { -1 }
    } else {
        let sign = if (al * be * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
        let lu = if be % 2 == 0 { 1 } else { legendre(u, p) };
        let lv = if al % 2 == 0 { 1 } else { legendre(v, p) };
        sign * lu * lv
    }
}

fn is_norm(g: &NormClassGroup, ctx: &Context, a: i64) -> bool {
    g.class(&ctx.k().from_i64(a)).unwrap() == g.identity()
}

fn sample_integers() -> impl Iterator<Item = i64> {
    (-40i64..=40).filter(|&a| a != 0)
}

#[test]
fn quadratic_norm_groups_match_the_hilbert_symbol() {
    // (name, p, spec, d) with the field equal to Q_p(sqrt d)
    let cases = [
        ("q3-z3", 3, FieldSpec::cyclotomic("z3", 3), -3),
        ("q3-u2", 3, FieldSpec::unramified("u2", 2), -1),
        ("q2-u2", 2, FieldSpec::unramified("u2", 2), -3),
        ("q2-sqrt2", 2, FieldSpec::eisenstein("s2", &[-2, 0, 1]), 2),
        ("q2-z4", 2, FieldSpec::cyclotomic("z4", 4), -1),
    ];
    for (name, p, spec, d) in cases {
        let ctx = context(BaseField::padic(p as u64), spec);
        let g = NormClassGroup::compute(&ctx, 1, 0).unwrap();
        assert_eq!(g.order(), 2, "{name}");
        for a in sample_integers() {
            assert_eq!(is_norm(&g, &ctx, a), hilbert(a, d, p) == 1, "{name}: a = {a}");
        }
    }
}

#[test]
fn cyclotomic_norm_groups_are_p_times_principal_units() {
    // N Q_p(zeta_{p^k})^x = <p> x (1 + p^k Z_p)
    for (p, pk) in [(3i64, 3i64), (3, 9), (2, 4)] {
        let ctx = context(BaseField::padic(p as u64), FieldSpec::cyclotomic("z", pk as u64));
        let g = NormClassGroup::compute(&ctx, 1, 0).unwrap();
        assert_eq!(g.order() as i64, pk - pk / p);
        for a in sample_integers() {
            let (_, u) = split_p(a, p);
            assert_eq!(is_norm(&g, &ctx, a), u.rem_euclid(pk) == 1, "p^k = {pk}: a = {a}");
        }
    }
}

#[test]
fn unramified_norm_groups_are_valuations_divisible_by_d() {
    let cases = [
        (BaseField::padic(2), 2usize),
        (BaseField::padic(2), 3),
        (BaseField::padic(3), 4),
        (BaseField::laurent(2), 2),
    ];
    for (base, d) in cases {
        let ctx = context(base, FieldSpec::unramified("u", d));
        let g = NormClassGroup::compute(&ctx, 1, 0).unwrap();
        let k = ctx.k();
        let mut rng_units = (1..30i64).filter(|u| u % base.p as i64 != 0);
        for v in -3i64..=5 {
            let u = rng_units.next().unwrap();
            let x = k.mul(&k.from_i64(u), &k.pi_l_pow(v));
            let trivial = g.class(&x).unwrap() == g.identity();
            assert_eq!(trivial, v.rem_euclid(d as i64) == 0, "d = {d}, v = {v}, u = {u}");
        }
    }
}

/// `theta(u)(zeta) = zeta^(u^-1)` for units u and `theta(p)` fixes zeta, in
/// the arithmetic normalization where uniformizers go to Frobenius.
#[test]
fn cyclotomic_reciprocity_is_the_inverse_cyclotomic_character() {
    for (p, pk) in [(3i64, 3i64), (3, 9), (2, 4)] {
        let ctx = context(BaseField::padic(p as u64), FieldSpec::cyclotomic("z", pk as u64));
        let nr = NormResidue::compute(&ctx, 1, 0).unwrap();
        let r = &ctx.field(1).ring;
        let zeta = r.add(&r.one(), &r.pi_l());
        let exponent_of = |s: usize| -> i64 {
            let auto = ctx.field(1).auto(nr.alg.group.members[s]);
            let image = r.add(&r.one(), &auto.root);
            (1..pk).find(|&j| r.agrees(&r.pow(&zeta, j).unwrap(), &image)).expect("zeta maps to a power of zeta")
        };
        let k = ctx.k();
        assert_eq!(exponent_of(nr.theta(&k.from_i64(p)).unwrap()), 1);
        for u in (2..pk).filter(|u| u % p != 0) {
            let inv = (1..pk).find(|v| (u * v) % pk == 1).unwrap();
            assert_eq!(exponent_of(nr.theta(&k.from_i64(u)).unwrap()), inv, "p^k = {pk}, u = {u}");
        }
    }
}
