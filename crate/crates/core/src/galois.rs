//! Arithmetic in F_q for prime powers q = p^m ≤ 2^16.
//!
//! An element is a plain index in `[0, q)`. Its base-p digits, least significant
//! first, are the coefficients of a polynomial in F_p[x] reduced by the field's
//! monic modulus. Multiplication and inversion go through log/exp tables built
//! once at construction, so a [`FieldSpec`] is immutable and cheap to share.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::sync::Arc;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// An element of some field, stored as its canonical index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field F_{p^m} together with its lookup tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    /// Coefficients c_0..c_m of the monic modulus; empty for prime fields.
    modulus: Vec<u32>,
    exp: Vec<u16>,
    log: Vec<u32>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    add_table: Option<Vec<u16>>,
}

/// Shared handle used by vectors, matrices and codes.
pub type Field = Arc<FieldSpec>;

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}", self.p, self.m)?;
        if self.m > 1 {
            write!(f, ", modulus {:?}", self.modulus)?;
        }
        write!(f, ")")
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Polynomials over F_p as coefficient vectors, lowest degree first.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Remainder of `a` modulo `b` (b nonzero, trimmed).
    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let coef = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
            for (i, &bc) in b.iter().enumerate() {
                let sub = (coef as u64 * bc as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        rem(&out, modulus, p)
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    /// Enumerates monic polynomials of exact degree `deg`.
    pub fn monic_of_degree(deg: usize, p: u32) -> impl Iterator<Item = Vec<u32>> {
        let count = (p as u64).pow(deg as u32);
        (0..count).map(move |mut idx| {
            let mut c = Vec::with_capacity(deg + 1);
            for _ in 0..deg {
                c.push((idx % p as u64) as u32);
                idx /= p as u64;
            }
            c.push(1);
            c
        })
    }

    /// Irreducible iff no monic factor of degree 1..=deg/2 divides it.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        if deg <= 1 {
            return deg == 1;
        }
        for d in 1..=deg / 2 {
            for g in monic_of_degree(d, p) {
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

fn digits(mut idx: u32, p: u32, m: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(idx % p);
        idx /= p;
    }
    poly::trim(&mut out);
    out
}

fn undigits(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// Slow reference multiplication used only while building tables.
fn slow_mul(a: u32, b: u32, p: u32, m: u32, modulus: &[u32]) -> u32 {
    if m == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let r = poly::mul_mod(&digits(a, p, m), &digits(b, p, m), modulus, p);
    undigits(&r, p)
}

fn slow_pow(a: u32, mut e: u64, p: u32, m: u32, modulus: &[u32]) -> u32 {
    let mut r = 1u32;
    let mut b = a;
    while e > 0 {
        if e & 1 == 1 {
            r = slow_mul(r, b, p, m, modulus);
        }
        b = slow_mul(b, b, p, m, modulus);
        e >>= 1;
    }
    r
}

fn is_generator(g: u32, q: u32, p: u32, m: u32, modulus: &[u32], factors: &[u32]) -> bool {
    g != 0 && factors.iter().all(|&r| slow_pow(g, ((q - 1) / r) as u64, p, m, modulus) != 1)
}

/// The built-in modulus for (p, m): the monic irreducible polynomial of degree m
/// with smallest coefficient index (c_0 + c_1 p + ...) whose root generates the
/// multiplicative group. The choice is a pure function of (p, m).
pub fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    if m == 1 {
        return Vec::new();
    }
    let q = p.pow(m);
    let factors = prime_factors(q - 1);
    for f in poly::monic_of_degree(m as usize, p) {
        if f[0] == 0 || !poly::is_irreducible(&f, p) {
            continue;
        }
        if is_generator(p, q, p, m, &f, &factors) {
            return f;
        }
    }
    unreachable!("a primitive polynomial exists for every (p, m)")
}

impl FieldSpec {
    /// Builds F_{p^m}. With `modulus = None` the built-in polynomial is used.
    pub fn new(p: u32, m: u32, modulus: Option<&[u32]>) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if m == 0 {
            return Err(Error::InvalidInput("extension degree must be at least 1".into()));
        }
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or(Error::FieldTooLarge { p, m })? as u32;
        let modulus: Vec<u32> = match modulus {
            None => default_modulus(p, m),
            Some(c) => {
                if c.len() != m as usize + 1 || c[m as usize] != 1 {
                    return Err(Error::InvalidInput(format!(
                        "modulus must be monic of degree {m} (got {} coefficients)",
                        c.len()
                    )));
                }
                if c.iter().any(|&x| x >= p) {
                    return Err(Error::InvalidInput(format!("modulus coefficients must lie in [0, {p})")));
                }
                if !poly::is_irreducible(c, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                if m == 1 {
                    Vec::new()
                } else {
                    c.to_vec()
                }
            }
        };
        Ok(Self::build(p, m, q, modulus))
    }

    /// F_q for a prime power q, with the built-in modulus.
    pub fn with_order(q: u32) -> Result<FieldSpec> {
        if q < 2 {
            return Err(Error::InvalidInput(format!("{q} is not a prime power")));
        }
        let p = prime_factors(q)[0];
        let mut m = 0;
        let mut r = q;
        while r % p == 0 {
            r /= p;
            m += 1;
        }
        if r != 1 {
            return Err(Error::InvalidInput(format!("{q} is not a prime power")));
        }
        FieldSpec::new(p, m, None)
    }

    /// Shared handle to F_q.
    pub fn shared(q: u32) -> Result<Field> {
        Ok(Arc::new(Self::with_order(q)?))
    }

    fn build(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> FieldSpec {
        let factors = prime_factors(q - 1);
        let g = (1..q)
            .find(|&g| q == 2 || is_generator(g, q, p, m, &modulus, &factors))
            .expect("multiplicative group is cyclic");
        let order = (q - 1) as usize;
        let mut exp = vec![0u16; 2 * order.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..order {
            exp[i] = cur as u16;
            exp[i + order] = cur as u16;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, g, p, m, &modulus);
        }
        let add_digits = |a: u32, b: u32| -> u32 {
            if p == 2 {
                return a ^ b;
            }
            let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
            for _ in 0..m {
                out += ((a % p + b % p) % p) * place;
                a /= p;
                b /= p;
                place *= p;
            }
            out
        };
        let neg: Vec<u16> = (0..q)
            .map(|a| {
                let (mut a, mut out, mut place) = (a, 0u32, 1u32);
                for _ in 0..m {
                    out += ((p - a % p) % p) * place;
                    a /= p;
                    place *= p;
                }
                out as u16
            })
            .collect();
        let inv: Vec<u16> = (0..q)
            .map(|a| if a == 0 { 0 } else { exp[(order - log[a as usize] as usize) % order] })
            .collect();
        let add_table = if p != 2 && m > 1 && q <= 256 {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b) as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        FieldSpec { p, m, q, modulus, exp, log, neg, inv, add_table }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    /// Full monic modulus c_0..c_m, or empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Checked conversion from an index.
    pub fn element(&self, index: u32) -> Result<Fe> {
        if index < self.q {
            Ok(Fe(index as u16))
        } else {
            Err(Error::InvalidInput(format!("{index} is not an element of F_{}", self.q)))
        }
    }

    /// All q elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.q).map(|i| Fe(i as u16))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.m == 1 {
            let s = a.0 as u32 + b.0 as u32;
            return Fe(if s >= self.p { s - self.p } else { s } as u16);
        }
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if let Some(t) = &self.add_table {
            return Fe(t[a.index() * self.q as usize + b.index()]);
        }
        let (p, mut x, mut y) = (self.p, a.0 as u32, b.0 as u32);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.m {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Fe(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[(self.log[a.index()] + self.log[b.index()]) as usize])
    }

    /// Multiplicative inverse.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            Err(Error::InvertZero)
        } else {
            Ok(Fe(self.inv[a.index()]))
        }
    }

    /// Inverse of a value already known to be nonzero.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Fe) -> Fe {
        debug_assert!(!a.is_zero());
        Fe(self.inv[a.index()])
    }

    /// `a^e` for a signed exponent; negative exponents require `a != 0`.
    pub fn pow(&self, a: Fe, e: i64) -> Result<Fe> {
        if e == 0 {
            return Ok(Fe::ONE);
        }
        if a.is_zero() {
            return if e > 0 { Ok(Fe::ZERO) } else { Err(Error::InvertZero) };
        }
        let order = (self.q - 1) as i64;
        let l = self.log[a.index()] as i64;
        let k = (l * e.rem_euclid(order)).rem_euclid(order);
        Ok(Fe(self.exp[k as usize]))
    }

    /// Product of `a` with `b` where `b` is reused across a loop: returns the
    /// log of `b`, or `None` when `b` is zero.
    #[inline]
    pub(crate) fn log_of(&self, b: Fe) -> Option<u32> {
        if b.is_zero() {
            None
        } else {
            Some(self.log[b.index()])
        }
    }

    #[inline]
    pub(crate) fn mul_by_log(&self, a: Fe, log_b: u32) -> Fe {
        if a.is_zero() {
            Fe::ZERO
        } else {
            Fe(self.exp[(self.log[a.index()] + log_b) as usize])
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    p: u32,
    m: u32,
    #[serde(default)]
    modulus: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldRepr { p: self.p, m: self.m, modulus: self.modulus.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FieldRepr::deserialize(d)?;
        let modulus = if r.modulus.is_empty() { None } else { Some(r.modulus.as_slice()) };
        FieldSpec::new(r.p, r.m, modulus).map_err(serde::de::Error::custom)
    }
}

/// Whether two handles denote the same field.
pub fn same_field(a: &FieldSpec, b: &FieldSpec) -> bool {
    std::ptr::eq(a, b) || a == b
}
