//! Finite fields `F_{p^m}` presented by the fixed polynomial table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Polynomials over F_p are coefficient vectors, lowest degree first.
pub type FpPoly = Vec<u64>;

fn trim(a: &mut FpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_inv(a: u64, p: u64) -> u64 {
    super::base::mod_inv(a, p)
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(prod, m, p)
}

fn poly_rem(mut a: FpPoly, m: &[u64], p: u64) -> FpPoly {
    trim(&mut a);
    let dm = m.len() - 1;
    let lead_inv = fp_inv(m[dm], p);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % p;
        if c != 0 {
            for (k, &mk) in m.iter().enumerate() {
                let idx = top - dm + k;
                a[idx] = (a[idx] + p * p - c * mk % p) % p;
            }
        }
        a.pop();
        trim(&mut a);
    }
    a
}

fn poly_gcd(mut a: FpPoly, mut b: FpPoly, p: u64) -> FpPoly {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod_x(e_frob: u32, m: &[u64], p: u64) -> FpPoly {
    // x^(p^e_frob) mod m
    let mut x = poly_rem(vec![0, 1], m, p);
    for _ in 0..e_frob {
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

fn prime_factors(n: usize) -> Vec<usize> {
    prime_factors_u64(n as u64).into_iter().map(|r| r as usize).collect()
}

pub(crate) fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial of degree m.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let xq = poly_powmod_x(m as u32, f, p);
    let x = poly_rem(vec![0, 1], f, p);
    if xq != x {
        return false;
    }
    for r in prime_factors(m) {
        let mut h = poly_powmod_x((m / r) as u32, f, p);
        h.resize(h.len().max(2), 0);
        h[1] = (h[1] + p - 1) % p;
        trim(&mut h);
        let g = poly_gcd(f.to_vec(), h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

type TableCache = Mutex<HashMap<(u64, usize), Arc<FpPoly>>>;

fn table() -> &'static TableCache {
    static TABLE: OnceLock<TableCache> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The table polynomial of degree m over F_p: the monic irreducible polynomial
/// whose lower coefficients, read as base-p digits `c_0 + c_1 p + ...`, form
/// the least integer.
pub fn table_polynomial(p: u64, m: usize) -> Arc<FpPoly> {
    if let Some(f) = table().lock().unwrap().get(&(p, m)) {
        return f.clone();
    }
    let mut idx: u64 = 0;
    let f = loop {
        let mut f = vec![0u64; m + 1];
        let mut r = idx;
        for c in f.iter_mut().take(m) {
            *c = r % p;
            r /= p;
        }
        f[m] = 1;
        if is_irreducible(&f, p) {
            break f;
        }
        idx += 1;
    };
    let f = Arc::new(f);
    table().lock().unwrap().entry((p, m)).or_insert(f).clone()
}

/// Element of `F_{p^m}` as a coefficient vector of length m in the table basis.
pub type Fq = Vec<u64>;

#[derive(Debug)]
pub struct ResidueField {
    pub p: u64,
    pub m: usize,
    pub modulus: Arc<FpPoly>,
    primitive: OnceLock<Fq>,
}

impl ResidueField {
    pub fn new(p: u64, m: usize) -> Self {
        ResidueField { p, m, modulus: table_polynomial(p, m), primitive: OnceLock::new() }
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    pub fn zero(&self) -> Fq {
        vec![0; self.m]
    }

    pub fn one(&self) -> Fq {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    /// The class of the table generator `x`.
    pub fn generator_element(&self) -> Fq {
        let mut v = self.zero();
        if self.m > 1 {
            v[1] = 1;
        } else {
            // x mod (x - c) = c
            v[0] = (self.p - self.modulus[0]) % self.p;
        }
        v
    }

    pub fn from_int(&self, c: u64) -> Fq {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    pub fn is_zero(&self, a: &Fq) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// Index `sum c_i p^i`; defines the canonical order used for tie-breaks.
    pub fn index(&self, a: &Fq) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn from_index(&self, mut idx: u64) -> Fq {
        let mut v = self.zero();
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        v
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn scale(&self, a: &Fq, c: u64) -> Fq {
        a.iter().map(|x| x * (c % self.p) % self.p).collect()
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        let mut r = poly_mulmod(a, b, &self.modulus, self.p);
        r.resize(self.m, 0);
        r
    }

    pub fn pow(&self, a: &Fq, mut e: u64) -> Fq {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: &Fq, k: usize) -> Fq {
        let mut x = a.clone();
        for _ in 0..(k % self.m.max(1)) {
            x = self.pow(&x, self.p);
        }
        x
    }

    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }

    /// The least-index generator of the unit group.
    pub fn primitive(&self) -> Fq {
        self.primitive
            .get_or_init(|| {
                let n = self.order() - 1;
                let factors = prime_factors_u64(n);
                (1..)
                    .map(|i| self.from_index(i))
                    .find(|g| factors.iter().all(|&r| self.pow(g, n / r) != self.one()))
                    .expect("finite field has a primitive element")
            })
            .clone()
    }

    /// Discrete logarithm to the base `primitive()` (Pohlig-Hellman with
    /// baby-step giant-step in each prime-order layer).
    pub fn dlog(&self, a: &Fq) -> Option<u64> {
        if self.is_zero(a) {
            return None;
        }
        let n = self.order() - 1;
        if n == 1 {
            return Some(0);
        }
        let g = self.primitive();
        let mut residues = vec![];
        for r in prime_factors_u64(n) {
            let mut re = 1u64;
            while n.is_multiple_of(re * r) {
                re *= r;
            }
            let gi = self.pow(&g, n / re);
            let ai = self.pow(a, n / re);
            let gamma = self.pow(&gi, re / r);
            let gi_inv = self.inv(&gi).unwrap();
            let mut x = 0u64;
            let mut rk = 1u64;
            while rk < re {
                let h = self.pow(&self.mul(&ai, &self.pow(&gi_inv, x)), re / rk / r);
                let d = self.bsgs(&gamma, &h, r)?;
                x += d * rk;
                rk *= r;
            }
            residues.push((x, re));
        }
        let (mut x, mut m) = (0u64, 1u64);
        for (xi, mi) in residues {
            // combine x mod m with xi mod mi
            let t = ((xi + mi - x % mi) % mi) as u128 * super::base::mod_inv(m % mi, mi) as u128 % mi as u128;
            x += (t as u64) * m;
            m *= mi;
        }
        Some(x % n)
    }

    fn bsgs(&self, g: &Fq, h: &Fq, order: u64) -> Option<u64> {
        let step = (order as f64).sqrt().ceil() as u64 + 1;
        let mut table = HashMap::with_capacity(step as usize);
        let mut x = self.one();
        for j in 0..step {
            table.entry(self.index(&x)).or_insert(j);
            x = self.mul(&x, g);
        }
        let giant = self.inv(&self.pow(g, step))?;
        let mut y = h.clone();
        for i in 0..=step {
            if let Some(&j) = table.get(&self.index(&y)) {
                return Some((i * step + j) % order);
            }
            y = self.mul(&y, &giant);
        }
        None
    }

    pub fn exp(&self, k: u64) -> Fq {
        self.pow(&self.primitive(), k % (self.order() - 1))
    }

    /// All solutions of `x^n = a` with `x != 0`, sorted by index.
    pub fn roots_of(&self, a: &Fq, n: u64) -> Vec<Fq> {
        let order = self.order() - 1;
        let Some(la) = self.dlog(a) else { return vec![] };
        let g = num_integer::gcd(n % order, order);
        let g = if g == 0 { order } else { g };
        if la % g != 0 {
            return vec![];
        }
        let step = order / g;
        // solve (n/g) x = la/g mod step
        let nn = (n / g) % step;
        let x0 = if step == 1 {
            0
        } else {
            ((la / g) % step) as u128 * super::base::mod_inv(nn, step) as u128 % step as u128
        } as u64;
        let mut out: Vec<Fq> = (0..g).map(|t| self.exp(x0 + t * step)).collect();
        out.sort_by_key(|x| self.index(x));
        out
    }

    /// The roots of an irreducible F_p polynomial whose degree divides m,
    /// sorted by index: one root by equal-degree splitting, then its
    /// Frobenius orbit.
    pub fn irreducible_roots(&self, f: &[u64]) -> Vec<Fq> {
        let mut g = self.fq_poly_monic(f.iter().map(|&c| self.from_int(c)).collect());
        let mut a = 0u64;
        while g.len() > 2 {
            a += 1;
            let h = self.fq_poly_gcd(g.clone(), self.splitting_probe(&g, a));
            if h.len() > 1 && h.len() < g.len() {
                let (q, _) = self.fq_poly_divrem(&g, &h);
                g = if h.len() <= q.len() { h } else { q };
            }
        }
        let Some(c) = g.first() else { return vec![] };
        let root = self.sub(&self.zero(), c);
        let mut out = vec![root.clone()];
        let mut x = self.frobenius(&root, 1);
        while x != root {
            out.push(x.clone());
            x = self.frobenius(&x, 1);
        }
        out.sort_by_key(|x| self.index(x));
        out
    }

    /// For odd p, `(X + c)^((Q-1)/2) - 1 mod g`; for p = 2, the absolute
    /// trace of `cX mod g`. c is drawn from a fixed stream: small indices
    /// lie in small subfields and often never split.
    fn splitting_probe(&self, g: &[Fq], a: u64) -> Vec<Fq> {
        let c = self.from_index(ChaCha8Rng::seed_from_u64(a).gen_range(0..self.order()));
        let x = vec![c.clone(), self.one()];
        if self.p == 2 {
            let mut t = self.fq_poly_divrem(&[self.zero(), c], g).1;
            let mut acc = t.clone();
            for _ in 1..self.m {
                t = self.fq_poly_mulmod(&t, &t, g);
                acc = self.fq_poly_add(&acc, &t);
            }
            acc
        } else {
            let mut e = (self.order() - 1) / 2;
            let mut base = self.fq_poly_divrem(&x, g).1;
            let mut acc = vec![self.one()];
            while e > 0 {
                if e & 1 == 1 {
                    acc = self.fq_poly_mulmod(&acc, &base, g);
                }
                base = self.fq_poly_mulmod(&base, &base, g);
                e >>= 1;
            }
            self.fq_poly_add(&acc, &[self.sub(&self.zero(), &self.one())])
        }
    }

    fn fq_poly_trim(&self, mut a: Vec<Fq>) -> Vec<Fq> {
        while a.last().is_some_and(|c| self.is_zero(c)) {
            a.pop();
        }
        a
    }

    fn fq_poly_monic(&self, a: Vec<Fq>) -> Vec<Fq> {
        let a = self.fq_poly_trim(a);
        let Some(lead) = a.last() else { return a };
        let inv = self.inv(lead).expect("nonzero leading coefficient");
        a.iter().map(|c| self.mul(c, &inv)).collect()
    }

    fn fq_poly_add(&self, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
        let n = a.len().max(b.len());
        let z = self.zero();
        let out = (0..n).map(|i| self.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        self.fq_poly_trim(out)
    }

    fn fq_poly_divrem(&self, a: &[Fq], b: &[Fq]) -> (Vec<Fq>, Vec<Fq>) {
        let b = self.fq_poly_trim(b.to_vec());
        let mut r = self.fq_poly_trim(a.to_vec());
        if r.len() < b.len() {
            return (vec![], r);
        }
        let lead = b.last().expect("nonzero divisor");
        let inv = if *lead == self.one() { lead.clone() } else { self.inv(lead).expect("nonzero leading coefficient") };
        let mut q = vec![self.zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = self.mul(r.last().unwrap(), &inv);
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] = self.sub(&r[shift + i], &self.mul(&c, bi));
            }
            q[shift] = c;
            r = self.fq_poly_trim(r);
        }
        (q, r)
    }

    fn fq_poly_mulmod(&self, a: &[Fq], b: &[Fq], g: &[Fq]) -> Vec<Fq> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = self.add(&prod[i + j], &self.mul(x, y));
            }
        }
        self.fq_poly_divrem(&prod, g).1
    }

    fn fq_poly_gcd(&self, mut a: Vec<Fq>, mut b: Vec<Fq>) -> Vec<Fq> {
        b = self.fq_poly_trim(b);
        while !b.is_empty() {
            let r = self.fq_poly_divrem(&a, &b).1;
            a = b;
            b = r;
        }
        self.fq_poly_monic(a)
    }

    /// Elements of the subfield `F_{p^k}` (k | m), sorted by index.
    pub fn subfield_elements(&self, k: usize) -> Vec<Fq> {
        let n = self.order() - 1;
        let sub = self.p.pow(k as u32) - 1;
        let h = self.exp(n / sub);
        let mut out = vec![self.zero()];
        let mut x = self.one();
        for _ in 0..sub {
            out.push(x.clone());
            x = self.mul(&x, &h);
        }
        out.sort_by_key(|x| self.index(x));
        out
    }

    /// Evaluate a polynomial with F_p coefficients at `x`.
    pub fn eval_fp_poly(&self, f: &[u64], x: &Fq) -> Fq {
        f.iter().rev().fold(self.zero(), |acc, &c| self.add(&self.mul(&acc, x), &self.from_int(c)))
    }

    /// Matrix (over F_p, column j = image of basis vector j) of an F_p-linear map.
    pub fn linear_matrix(&self, f: impl Fn(&Fq) -> Fq) -> Vec<Vec<u64>> {
        let mut cols = Vec::with_capacity(self.m);
        for j in 0..self.m {
            let mut e = self.zero();
            e[j] = 1;
            cols.push(f(&e));
        }
        // rows x cols
        (0..self.m).map(|i| (0..self.m).map(|j| cols[j][i]).collect()).collect()
    }

    /// Trace to the subfield `F_{p^k}` (k | m).
    pub fn trace_to(&self, a: &Fq, k: usize) -> Fq {
        let mut acc = self.zero();
        let mut x = a.clone();
        for _ in 0..(self.m / k) {
            acc = self.add(&acc, &x);
            x = self.frobenius(&x, k);
        }
        acc
    }

    /// Norm to the subfield `F_{p^k}` (k | m).
    pub fn norm_to(&self, a: &Fq, k: usize) -> Fq {
        let pk = self.p.pow(k as u32);
        let e = (self.order() - 1) / (pk - 1);
        self.pow(a, e)
    }
}

/// Solve `A x = b` over F_p. Returns the solution with free variables set to
/// `free` (cycled), or None when inconsistent. Also returns the kernel basis.
pub fn solve_fp(a: &[Vec<u64>], b: &[u64], p: u64, free: &[u64]) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<u64>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi % p);
        r
    }).collect();
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&r| !m[r][col].is_multiple_of(p)) else { continue };
        m.swap(row, pr);
        let inv = fp_inv(m[row][col], p);
        for c in 0..=cols {
            m[row][c] = m[row][c] * inv % p;
        }
        for r in 0..rows {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..=cols {
                    m[r][c] = (m[r][c] + p * p - f * m[row][c] % p) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if (row..rows).any(|r| m[r][cols] != 0) {
        return None;
    }
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut x = vec![0u64; cols];
    for (k, &fc) in free_cols.iter().enumerate() {
        x[fc] = if free.is_empty() { 0 } else { free[k % free.len()] % p };
    }
    for (r, &pc) in pivots.iter().enumerate() {
        let mut v = m[r][cols];
        for &fc in &free_cols {
            v = (v + p * p - m[r][fc] * x[fc] % p) % p;
        }
        x[pc] = v;
    }
    let kernel = free_cols
        .iter()
        .map(|&fc| {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][fc]) % p;
            }
            v
        })
        .collect();
    Some((x, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_roots_match_enumeration() {
        for (p, m) in [(2, 4), (2, 6), (3, 4), (3, 6), (5, 2)] {
            let k = ResidueField::new(p, m);
            for f in (1..=m).filter(|f| m % f == 0) {
                let pf = table_polynomial(p, f);
                let brute: Vec<Fq> =
                    k.subfield_elements(f).into_iter().filter(|x| k.is_zero(&k.eval_fp_poly(&pf, x))).collect();
                assert_eq!(k.irreducible_roots(&pf), brute, "p = {p}, m = {m}, f = {f}");
            }
        }
    }

    #[test]
    fn roots_of_small_tables_in_a_large_field() {
        let k = ResidueField::new(2, 24);
        for f in [1, 2, 3, 4, 6, 8, 12] {
            let r = k.irreducible_roots(&table_polynomial(2, f));
            assert_eq!(r.len(), f);
        }
    }

    #[test]
    fn table_is_least_irreducible() {
        assert_eq!(*table_polynomial(2, 2), vec![1, 1, 1]);
        assert_eq!(*table_polynomial(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(*table_polynomial(3, 2), vec![1, 0, 1]);
        // brute force: no smaller monic degree-3 polynomial over F_3 is free of roots
        let f = table_polynomial(3, 3);
        assert!(is_irreducible(&f, 3));
    }

    #[test]
    fn field_axioms_small() {
        let k = ResidueField::new(3, 2);
        for i in 1..9 {
            let a = k.from_index(i);
            let inv = k.inv(&a).unwrap();
            assert_eq!(k.mul(&a, &inv), k.one());
            assert_eq!(k.frobenius(&a, 2), a);
        }
        assert_eq!(k.dlog(&k.one()), Some(0));
        let g = k.primitive();
        assert_eq!(k.pow(&g, 8), k.one());
        assert_ne!(k.pow(&g, 4), k.one());
    }

    #[test]
    fn roots_are_complete() {
        let k = ResidueField::new(2, 4);
        for i in 1..16 {
            let a = k.from_index(i);
            for n in [1u64, 3, 5, 15] {
                let roots = k.roots_of(&a, n);
                let brute: Vec<Fq> = (1..16).map(|j| k.from_index(j)).filter(|x| k.pow(x, n) == a).collect();
                assert_eq!(roots.len(), brute.len(), "a={i} n={n}");
                for r in &roots {
                    assert_eq!(k.pow(r, n), a);
                }
            }
        }
    }

    #[test]
    fn artin_schreier_kernel() {
        let k = ResidueField::new(3, 2);
        let mat = k.linear_matrix(|x| k.sub(&k.frobenius(x, 1), x));
        let (_, ker) = solve_fp(&mat, &[0, 0], 3, &[]).unwrap();
        assert_eq!(ker.len(), 1);
    }
}
