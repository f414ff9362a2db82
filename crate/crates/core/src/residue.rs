//! Arithmetic in `Z/p^l Z` for an odd prime `p`.
//!
//! Residues are plain `u64` values in `[0, p^l)`; the ring itself is a cheap
//! handle ([`RingParams`]) that owns the canonical generator of the unit group
//! and a discrete-logarithm table.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Moduli up to this size get a full discrete-log table; larger ones fall
/// back to baby-step giant-step.
const DLOG_TABLE_LIMIT: u64 = 1_000_000;

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, modulus);
        }
        b = mul_mod(b, b, modulus);
        exp >>= 1;
    }
    result
}

#[inline]
pub fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
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

/// Legendre symbol `(x/p)` for an odd prime `p`.
pub fn legendre(x: i64, p: u64) -> i8 {
    let r = x.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// p-adic valuation; `None` stands for the valuation of zero.
pub fn valuation(x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let mut x = x;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

pub fn ipow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("integer power overflow")
}

struct RingInner {
    p: u64,
    l: u32,
    q: u64,
    unit_order: u64,
    generator: u64,
    dlog: Option<Vec<u32>>,
}

/// The ring `Z/p^l Z` together with its canonical unit-group generator.
#[derive(Clone)]
pub struct RingParams {
    inner: Arc<RingInner>,
}

impl fmt::Debug for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p(), self.l())
    }
}

impl PartialEq for RingParams {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.l() == other.l()
    }
}

impl Eq for RingParams {}

impl RingParams {
    /// `p` must be an odd prime and `l >= 2`.
    pub fn new(p: u64, l: u32) -> Result<Self> {
        if l < 2 {
            return Err(Error::BadRing(format!("l must be at least 2, got {l}")));
        }
        Self::level(p, l)
    }

    /// Like [`RingParams::new`] but also admits `l = 1`; lower levels show up
    /// when Gauss sums are reduced along `p | r`.
    pub fn level(p: u64, l: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::BadRing(format!("p must be an odd prime, got {p}")));
        }
        if l < 1 {
            return Err(Error::BadRing("l must be positive".into()));
        }
        let q = p
            .checked_pow(l)
            .filter(|q| *q < (1 << 40))
            .ok_or_else(|| Error::BadRing(format!("{p}^{l} is too large")))?;
        let unit_order = q / p * (p - 1);
        let generator = smallest_primitive_root(p, q, unit_order);
        let dlog = (q <= DLOG_TABLE_LIMIT).then(|| {
            let mut table = vec![u32::MAX; q as usize];
            let mut x = 1u64;
            for t in 0..unit_order {
                table[x as usize] = t as u32;
                x = mul_mod(x, generator, q);
            }
            table
        });
        Ok(RingParams {
            inner: Arc::new(RingInner {
                p,
                l,
                q,
                unit_order,
                generator,
                dlog,
            }),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn l(&self) -> u32 {
        self.inner.l
    }

    /// `floor(l/2)`
    pub fn m(&self) -> u32 {
        self.inner.l / 2
    }

    /// `ceil(l/2)`
    pub fn n(&self) -> u32 {
        self.inner.l.div_ceil(2)
    }

    /// The modulus `p^l`.
    pub fn q(&self) -> u64 {
        self.inner.q
    }

    /// `p^{l-1}(p-1)`
    pub fn unit_order(&self) -> u64 {
        self.inner.unit_order
    }

    /// Smallest positive primitive root modulo `p^l`.
    pub fn generator(&self) -> u64 {
        self.inner.generator
    }

    pub fn pow_p(&self, k: u32) -> u64 {
        ipow(self.p(), k)
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.q() as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.q() as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as i128 - b as i128)
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.reduce(-(a as i128))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q())
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        mod_pow(a, e, self.q())
    }

    pub fn is_unit(&self, x: u64) -> bool {
        x % self.p() != 0
    }

    pub fn inv(&self, x: u64) -> Result<u64> {
        let x = x % self.q();
        if !self.is_unit(x) {
            return Err(Error::NonUnit(x));
        }
        let ext = (x as i128).extended_gcd(&(self.q() as i128));
        Ok(self.reduce(ext.x))
    }

    /// `t` in `[0, unit_order)` with `g^t = x`.
    pub fn discrete_log(&self, x: u64) -> Result<u64> {
        let x = x % self.q();
        if !self.is_unit(x) {
            return Err(Error::NonUnit(x));
        }
        match &self.inner.dlog {
            Some(table) => Ok(table[x as usize] as u64),
            None => Ok(bsgs(self.generator(), x, self.q(), self.unit_order())
                .expect("generator must reach every unit")),
        }
    }

    /// Multiplicative order of a unit.
    pub fn order(&self, x: u64) -> Result<u64> {
        let t = self.discrete_log(x)?;
        Ok(self.unit_order() / t.gcd(&self.unit_order()))
    }

    /// Generator `gamma` of the unit group with `gamma^{p^{m-1}(p-1)} = 1 + p^m`.
    ///
    /// Writing `gamma = g^a`, the condition is the linear congruence
    /// `a * p^{m-1}(p-1) = dlog(1 + p^m)` modulo the group order; the smallest
    /// solution `a` coprime to the group order is taken.
    pub fn find_gamma(&self) -> Result<u64> {
        let m = self.m();
        if m == 0 {
            return Err(Error::BadArgument("find_gamma needs l >= 2".into()));
        }
        let order = self.unit_order();
        let step = self.pow_p(m - 1) * (self.p() - 1);
        let target = self.discrete_log(1 + self.pow_p(m))?;
        let fail = || Error::ConstructionFailed(format!("no gamma for {self:?}"));
        if target % step != 0 {
            return Err(fail());
        }
        let period = order / step;
        let base = (target / step) % period;
        let exponent = (0..step)
            .map(|t| base + t * period)
            .find(|a| a.gcd(&order) == 1)
            .ok_or_else(fail)?;
        let gamma = self.pow(self.generator(), exponent);
        if self.q() <= 10_000 {
            // cross-check against the exhaustive definition
            let brute = (1..self.q())
                .filter(|&x| self.is_unit(x))
                .filter(|&x| self.order(x).ok() == Some(order))
                .filter(|&x| self.pow(x, step) == 1 + self.pow_p(m))
                .min_by_key(|&x| self.discrete_log(x).unwrap_or(u64::MAX))
                .ok_or_else(fail)?;
            debug_assert_eq!(brute, gamma);
        }
        Ok(gamma)
    }
}

fn smallest_primitive_root(p: u64, q: u64, unit_order: u64) -> u64 {
    let factors = prime_factors(unit_order);
    (2..q)
        .filter(|x| x % p != 0)
        .find(|&x| factors.iter().all(|f| mod_pow(x, unit_order / f, q) != 1))
        .expect("(Z/p^l)^x is cyclic for odd p")
}

fn bsgs(g: u64, x: u64, modulus: u64, order: u64) -> Option<u64> {
    let step = (order as f64).sqrt().ceil() as u64;
    let mut baby = HashMap::with_capacity(step as usize);
    let mut cur = 1u64;
    for j in 0..step {
        baby.entry(cur).or_insert(j);
        cur = mul_mod(cur, g, modulus);
    }
    let factor = mod_pow(mod_pow(g, step, modulus), order - 1, modulus);
    let mut gamma = x;
    for i in 0..=step {
        if let Some(j) = baby.get(&gamma) {
            return Some((i * step + j) % order);
        }
        gamma = mul_mod(gamma, factor, modulus);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, l: u32) -> RingParams {
        RingParams::new(p, l).unwrap()
    }

    #[test]
    fn inverses() {
        let r = ring(3, 2);
        assert_eq!(r.inv(2).unwrap(), 5);
        assert_eq!(r.inv(1).unwrap(), 1);
        assert_eq!(r.inv(3), Err(Error::NonUnit(3)));
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(1, 3), 1);
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(6, 3), 0);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
    }

    #[test]
    fn legendre_is_multiplicative() {
        for p in [3u64, 5, 7, 11, 13] {
            for x in 0..p as i64 {
                for y in 0..p as i64 {
                    assert_eq!(legendre(x, p) * legendre(y, p), legendre(x * y, p));
                }
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(ring(3, 2).generator(), 2);
        assert_eq!(ring(5, 2).generator(), 2);
        assert_eq!(ring(7, 2).generator(), 3);
        // 14 is a primitive root mod 29 but not mod 29^2
        assert_eq!(RingParams::level(29, 1).unwrap().generator(), 2);
    }

    #[test]
    fn discrete_logs() {
        let r = ring(3, 2);
        assert_eq!(r.discrete_log(4).unwrap(), 2);
        assert_eq!(r.discrete_log(1).unwrap(), 0);
        assert_eq!(r.discrete_log(5).unwrap(), 5);
        assert_eq!(r.discrete_log(6), Err(Error::NonUnit(6)));
    }

    #[test]
    fn discrete_log_inverts_powering() {
        for (p, l) in [(3, 2), (3, 3), (3, 4), (3, 5), (5, 2), (5, 3), (7, 2)] {
            let r = ring(p, l);
            for x in (1..r.q()).filter(|&x| r.is_unit(x)) {
                let t = r.discrete_log(x).unwrap();
                assert!(t < r.unit_order());
                assert_eq!(r.pow(r.generator(), t), x);
                assert_eq!(r.inv(r.inv(x).unwrap()).unwrap(), x);
                assert_eq!(r.mul(x, r.inv(x).unwrap()), 1);
            }
        }
    }

    #[test]
    fn bsgs_agrees_with_table() {
        let r = ring(5, 3);
        for x in (1..r.q()).filter(|&x| r.is_unit(x)) {
            let t = bsgs(r.generator(), x, r.q(), r.unit_order()).unwrap();
            assert_eq!(t, r.discrete_log(x).unwrap());
        }
    }

    #[test]
    fn gamma_conditions() {
        assert_eq!(ring(3, 2).find_gamma().unwrap(), 2);
        for (p, l) in [(3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (7, 3)] {
            let r = ring(p, l);
            let gamma = r.find_gamma().unwrap();
            let m = r.m();
            assert_eq!(r.order(gamma).unwrap(), r.unit_order());
            assert_eq!(r.pow(gamma, r.pow_p(m - 1) * (p - 1)), 1 + r.pow_p(m));
        }
        // m = 1 at l = 3, so the condition is gamma^2 = 4
        let r = ring(3, 3);
        assert_eq!(r.pow(r.find_gamma().unwrap(), 2), 4);
        let r = ring(5, 2);
        assert_eq!(r.pow(r.find_gamma().unwrap(), 4), 6);
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(18, 3), Some(2));
        assert_eq!(valuation(5, 3), Some(0));
        assert_eq!(valuation(0, 3), None);
        assert_eq!(valuation(-27, 3), Some(3));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RingParams::new(2, 3).is_err());
        assert!(RingParams::new(9, 2).is_err());
        assert!(RingParams::new(3, 1).is_err());
        assert!(RingParams::level(3, 1).is_ok());
    }
}
