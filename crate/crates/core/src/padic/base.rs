//! Truncated valuation rings of the base field: `Z_p / p^n` and `F_p[[t]] / t^n`.
//!
//! Elements are packed into a `u64`. For the p-adic kind the value is the
//! residue in `[0, p^n)`; for the Laurent kind digit `i` (the coefficient of
//! `t^i`) occupies bits `[i*b, (i+1)*b)` where `b` is the digit width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Padic,
    Laurent,
}

/// The base local field K: either `Q_p` or `F_p((t))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseField {
    pub kind: BaseKind,
    pub p: u64,
    pub q: u64,
}

impl BaseField {
    pub fn padic(p: u64) -> Self {
        BaseField { kind: BaseKind::Padic, p, q: p }
    }

    pub fn laurent(p: u64) -> Self {
        BaseField { kind: BaseKind::Laurent, p, q: p }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::InvalidBase(format!("p = {} is not prime", self.p)));
        }
        let mut r = self.q;
        while r > 1 && r.is_multiple_of(self.p) {
            r /= self.p;
        }
        if self.q < self.p || r != 1 {
            return Err(Error::InvalidBase(format!("q = {} is not a power of p = {}", self.q, self.p)));
        }
        if self.q != self.p {
            return Err(Error::UnsupportedDegree(format!(
                "base residue field of size {} (only prime residue fields are supported)",
                self.q
            )));
        }
        Ok(())
    }
}

/// Working precision: `pi_digits` is the reported precision N, the ring keeps
/// `guard_digits` more internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub pi_digits: u32,
    pub residue_degree_cap: usize,
    #[serde(default = "default_guard")]
    pub guard_digits: u32,
}

/// Digits a derived identity may lose against N.
pub const LOSS_BUDGET: i64 = 4;

fn default_guard() -> u32 {
    8
}

impl Default for Precision {
    fn default() -> Self {
        Precision { pi_digits: 16, residue_degree_cap: 24, guard_digits: 8 }
    }
}

impl Precision {
    pub fn new(pi_digits: u32, residue_degree_cap: usize) -> Self {
        Precision { pi_digits, residue_degree_cap, guard_digits: default_guard() }
    }

    /// The level, in `v_K` units, to which derived identities are certified:
    /// N less the loss budget.
    pub fn certified_digits(&self) -> i64 {
        self.pi_digits as i64 - LOSS_BUDGET
    }

    pub fn working_digits(&self) -> u32 {
        self.pi_digits + self.guard_digits
    }

    pub fn validate(&self) -> Result<()> {
        if self.pi_digits == 0 || self.residue_degree_cap == 0 {
            return Err(Error::Config("pi_digits and residue_degree_cap must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic in the truncated ring of integers of the base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseRing {
    pub kind: BaseKind,
    pub p: u64,
    /// Number of pi-adic digits kept.
    pub n: u32,
    modulus: u64,
    bits: u32,
    digit_mask: u64,
}

impl BaseRing {
    pub fn new(field: &BaseField, n: u32) -> Result<Self> {
        field.validate()?;
        match field.kind {
            BaseKind::Padic => {
                let mut m: u128 = 1;
                for _ in 0..n {
                    m *= field.p as u128;
                    if m >= (1u128 << 62) {
                        return Err(Error::Config(format!(
                            "p^{n} does not fit the 62-bit arithmetic used for p = {}",
                            field.p
                        )));
                    }
                }
                Ok(BaseRing { kind: field.kind, p: field.p, n, modulus: m as u64, bits: 0, digit_mask: 0 })
            }
            BaseKind::Laurent => {
                let bits = 64 - (field.p - 1).leading_zeros();
                if bits * n > 64 {
                    return Err(Error::Config(format!("{n} digits of F_{} do not fit 64 bits", field.p)));
                }
                Ok(BaseRing {
                    kind: field.kind,
                    p: field.p,
                    n,
                    modulus: 0,
                    bits,
                    digit_mask: (1u64 << bits) - 1,
                })
            }
        }
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        if self.n == 0 {
            0
        } else {
            1
        }
    }

    /// The uniformizer p or t.
    pub fn pi(&self) -> u64 {
        self.pi_pow(1)
    }

    pub fn pi_pow(&self, k: u32) -> u64 {
        if k >= self.n {
            return 0;
        }
        match self.kind {
            BaseKind::Padic => self.p.pow(k),
            BaseKind::Laurent => 1u64 << (k * self.bits),
        }
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        match self.kind {
            BaseKind::Padic => {
                let m = self.modulus as i128;
                (((v as i128) % m + m) % m) as u64
            }
            BaseKind::Laurent => {
                let p = self.p as i64;
                (((v % p) + p) % p) as u64
            }
        }
    }

    fn digit(&self, x: u64, i: u32) -> u64 {
        (x >> (i * self.bits)) & self.digit_mask
    }

    fn digitwise(&self, x: u64, y: u64, f: impl Fn(u64, u64) -> u64) -> u64 {
        let mut out = 0;
        for i in 0..self.n {
            let d = f(self.digit(x, i), self.digit(y, i)) % self.p;
            out |= d << (i * self.bits);
        }
        out
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        match self.kind {
            BaseKind::Padic => {
                let s = x + y;
                if s >= self.modulus {
                    s - self.modulus
                } else {
                    s
                }
            }
            BaseKind::Laurent if self.p == 2 => x ^ y,
            BaseKind::Laurent => self.digitwise(x, y, |a, b| a + b),
        }
    }

    pub fn neg(&self, x: u64) -> u64 {
        match self.kind {
            BaseKind::Padic => {
                if x == 0 {
                    0
                } else {
                    self.modulus - x
                }
            }
            BaseKind::Laurent if self.p == 2 => x,
            BaseKind::Laurent => self.digitwise(x, 0, |a, _| self.p - a),
        }
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        match self.kind {
            BaseKind::Padic => ((x as u128 * y as u128) % self.modulus as u128) as u64,
            BaseKind::Laurent if self.p == 2 => {
                let mut out = 0u64;
                let mut a = x;
                let mut i = 0;
                while a != 0 && i < self.n {
                    if a & 1 == 1 {
                        out ^= y << i;
                    }
                    a >>= 1;
                    i += 1;
                }
                out & self.full_mask()
            }
            BaseKind::Laurent => {
                let mut acc = vec![0u64; self.n as usize];
                for i in 0..self.n {
                    let a = self.digit(x, i);
                    if a == 0 {
                        continue;
                    }
                    for j in 0..(self.n - i) {
                        acc[(i + j) as usize] += a * self.digit(y, j);
                    }
                }
                acc.iter().enumerate().fold(0, |out, (i, d)| out | ((d % self.p) << (i as u32 * self.bits)))
            }
        }
    }

    fn full_mask(&self) -> u64 {
        let total = self.bits * self.n;
        if total >= 64 {
            u64::MAX
        } else {
            (1u64 << total) - 1
        }
    }

    pub fn is_zero(&self, x: u64) -> bool {
        x == 0
    }

    /// pi-adic valuation; `None` for zero.
    pub fn valuation(&self, x: u64) -> Option<u32> {
        if x == 0 {
            return None;
        }
        match self.kind {
            BaseKind::Padic => {
                let mut v = 0;
                let mut y = x;
                while y.is_multiple_of(self.p) {
                    y /= self.p;
                    v += 1;
                }
                Some(v)
            }
            BaseKind::Laurent => Some(x.trailing_zeros() / self.bits),
        }
    }

    /// Exact division by pi^k; the caller guarantees divisibility.
    pub fn div_pi_pow(&self, x: u64, k: u32) -> u64 {
        match self.kind {
            BaseKind::Padic => x / self.p.pow(k),
            BaseKind::Laurent => {
                if k * self.bits >= 64 {
                    0
                } else {
                    x >> (k * self.bits)
                }
            }
        }
    }

    pub fn mul_pi_pow(&self, x: u64, k: u32) -> u64 {
        if k >= self.n {
            return 0;
        }
        match self.kind {
            BaseKind::Padic => self.mul(x, self.pi_pow(k)),
            BaseKind::Laurent => (x << (k * self.bits)) & self.full_mask(),
        }
    }

    /// Reduction modulo pi, as an integer in `[0, p)`.
    pub fn residue(&self, x: u64) -> u64 {
        match self.kind {
            BaseKind::Padic => x % self.p,
            BaseKind::Laurent => x & self.digit_mask,
        }
    }

    /// The leading pi-adic digit after removing the valuation.
    pub fn leading_digit(&self, x: u64) -> u64 {
        match self.valuation(x) {
            None => 0,
            Some(v) => self.residue(self.div_pi_pow(x, v)),
        }
    }

    /// Reduction modulo pi^k.
    pub fn truncate(&self, x: u64, k: u32) -> u64 {
        if k >= self.n {
            return x;
        }
        match self.kind {
            BaseKind::Padic => x % self.p.pow(k),
            BaseKind::Laurent => x & ((1u64 << (k * self.bits)) - 1),
        }
    }

    pub fn is_unit(&self, x: u64) -> bool {
        self.residue(x) != 0
    }

    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit by Newton iteration.
    pub fn inv(&self, x: u64) -> Option<u64> {
        let r = self.residue(x);
        if r == 0 {
            return None;
        }
        let r_inv = mod_inv(r, self.p);
        let mut y = self.from_i64(r_inv as i64);
        let two = self.from_i64(2);
        let mut correct = 1;
        while correct < self.n {
            y = self.mul(y, self.sub(two, self.mul(x, y)));
            correct *= 2;
        }
        Some(y)
    }

    /// The n digits of x in base pi, least significant first.
    pub fn to_digits(&self, x: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.n as usize);
        match self.kind {
            BaseKind::Padic => {
                let mut y = x;
                for _ in 0..self.n {
                    out.push(y % self.p);
                    y /= self.p;
                }
            }
            BaseKind::Laurent => {
                for i in 0..self.n {
                    out.push(self.digit(x, i));
                }
            }
        }
        out
    }

    pub fn from_digits(&self, digits: &[u64]) -> u64 {
        let mut acc = 0;
        for &d in digits.iter().take(self.n as usize).rev() {
            acc = self.add(self.mul_pi_pow(acc, 1), self.from_i64(d as i64));
        }
        acc
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

pub(crate) fn mod_inv(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    (((t % m as i128) + m as i128) % m as i128) as u64
}
