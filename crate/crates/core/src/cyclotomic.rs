//! Exact arithmetic in the cyclotomic integers `Z[zeta_N]`.
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^{phi(N)-1}` and
//! kept fully reduced modulo the `N`-th cyclotomic polynomial, so two elements
//! are equal exactly when their coefficient vectors are. Character sums are
//! accumulated in [`RootSum`] (a vector of multiplicities indexed by exponent,
//! i.e. an element of the group ring `Z[C_N]`) and only reduced at the end.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::residue::{prime_factors, RingParams};

/// Reduction data for one conductor `N`.
pub struct Cyclo {
    n: u64,
    phi: usize,
    poly: Vec<i64>,
    /// `powers[k]` is `x^k mod Phi_N` for `0 <= k < N`.
    powers: Vec<Vec<i64>>,
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo(N={})", self.n)
    }
}

impl Cyclo {
    pub fn new(n: u64) -> Arc<Cyclo> {
        assert!(n >= 1, "conductor must be positive");
        let poly = cyclotomic_polynomial(n);
        let phi = poly.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; phi];
        if phi > 0 {
            cur[0] = 1;
        }
        for _ in 0..n {
            powers.push(cur.clone());
            if phi == 0 {
                continue;
            }
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            next[1..phi].copy_from_slice(&cur[..phi - 1]);
            for (i, c) in poly[..phi].iter().enumerate() {
                next[i] = next[i]
                    .checked_sub(top.checked_mul(*c).expect("power table overflow"))
                    .expect("power table overflow");
            }
            cur = next;
        }
        Arc::new(Cyclo {
            n,
            phi,
            poly,
            powers,
        })
    }

    /// Conductor `lcm(4, p^l, p^2 - 1)` shared by every value of one ring.
    pub fn for_ring(ring: &RingParams) -> Arc<Cyclo> {
        let p = ring.p();
        Cyclo::new(4u64.lcm(&ring.q()).lcm(&(p * p - 1)))
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    /// `phi(N)`, the dimension of the power basis.
    pub fn degree(&self) -> usize {
        self.phi
    }

    /// Coefficients of `Phi_N`, constant term first.
    pub fn polynomial(&self) -> &[i64] {
        &self.poly
    }

    /// `zeta_k^a` as an exponent of `zeta_N`.
    pub fn root(&self, k: u64, a: i64) -> Result<Root> {
        if k == 0 || self.n % k != 0 {
            return Err(Error::BadConductor(k, self.n));
        }
        let scale = (self.n / k) as i128;
        let exp = (scale * a as i128).rem_euclid(self.n as i128) as u64;
        Ok(Root { exp, n: self.n })
    }

    pub fn one_root(&self) -> Root {
        Root { exp: 0, n: self.n }
    }

    fn reduce_exponents(&self, counts: impl Iterator<Item = (usize, i128)>) -> Vec<i128> {
        let mut out = vec![0i128; self.phi];
        for (k, c) in counts {
            if c == 0 {
                continue;
            }
            for (o, t) in out.iter_mut().zip(&self.powers[k]) {
                if *t != 0 {
                    *o = o
                        .checked_add(c.checked_mul(*t as i128).expect("coefficient overflow"))
                        .expect("coefficient overflow");
                }
            }
        }
        out
    }
}

fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `Phi_N` as the Möbius product of the factors `x^d - 1`, computed over
/// arbitrary-precision integers with exact divisions.
fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    let mut num: Vec<BigInt> = vec![BigInt::one()];
    for &d in &divisors {
        if mobius(n / d) == 1 {
            let mut next = vec![BigInt::zero(); num.len() + d as usize];
            for (i, c) in num.iter().enumerate() {
                next[i + d as usize] += c;
                next[i] -= c;
            }
            num = next;
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            num = divide_by_xd_minus_one(&num, d as usize);
        }
    }
    num.iter()
        .map(|c| c.to_i64().expect("cyclotomic coefficient fits in i64"))
        .collect()
}

fn divide_by_xd_minus_one(a: &[BigInt], d: usize) -> Vec<BigInt> {
    let deg = a.len() - 1;
    assert!(deg >= d, "dividend degree too small");
    let mut q = vec![BigInt::zero(); deg - d + 1];
    for k in (0..q.len()).rev() {
        let mut c = a[k + d].clone();
        if k + d < q.len() {
            c += &q[k + d];
        }
        q[k] = c;
    }
    // remainder check: (x^d - 1) q must reproduce a
    for (k, ak) in a.iter().enumerate() {
        let mut v = BigInt::zero();
        if k >= d && k - d < q.len() {
            v += &q[k - d];
        }
        if k < q.len() {
            v -= &q[k];
        }
        assert_eq!(&v, ak, "inexact division by x^{d} - 1");
    }
    q
}

/// A root of unity `zeta_N^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    exp: u64,
    n: u64,
}

impl Root {
    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    pub fn pow(self, e: i64) -> Root {
        let exp = (self.exp as i128 * e as i128).rem_euclid(self.n as i128) as u64;
        Root { exp, n: self.n }
    }

    pub fn inv(self) -> Root {
        self.pow(-1)
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.n / self.exp.gcd(&self.n)
    }
}

impl Mul for Root {
    type Output = Root;

    fn mul(self, rhs: Root) -> Root {
        debug_assert_eq!(self.n, rhs.n, "roots from different conductors");
        Root {
            exp: (self.exp + rhs.exp) % self.n,
            n: self.n,
        }
    }
}

/// Accumulator for integer combinations of roots of unity.
#[derive(Clone)]
pub struct RootSum {
    ctx: Arc<Cyclo>,
    counts: Vec<i64>,
}

impl RootSum {
    pub fn new(ctx: &Arc<Cyclo>) -> Self {
        RootSum {
            ctx: ctx.clone(),
            counts: vec![0; ctx.n as usize],
        }
    }

    pub fn add(&mut self, root: Root) {
        self.counts[root.exp as usize] += 1;
    }

    pub fn add_times(&mut self, root: Root, times: i64) {
        self.counts[root.exp as usize] += times;
    }

    pub fn merge(&mut self, other: &RootSum) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += *b;
        }
    }

    pub fn to_elem(&self) -> CycElem {
        let coeffs = self
            .ctx
            .reduce_exponents(self.counts.iter().enumerate().map(|(k, c)| (k, *c as i128)));
        CycElem {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }
}

/// An element of `Z[zeta_N]` in canonical form.
#[derive(Clone)]
pub struct CycElem {
    ctx: Arc<Cyclo>,
    coeffs: Vec<i128>,
}

impl PartialEq for CycElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n && self.coeffs == other.coeffs
    }
}

impl Eq for CycElem {}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                _ => format!("{c}*z^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0 (N={})", self.ctx.n)
        } else {
            write!(f, "{} (N={})", terms.join(" + "), self.ctx.n)
        }
    }
}

impl CycElem {
    pub fn zero(ctx: &Arc<Cyclo>) -> Self {
        CycElem {
            ctx: ctx.clone(),
            coeffs: vec![0; ctx.phi],
        }
    }

    pub fn from_int(ctx: &Arc<Cyclo>, v: i128) -> Self {
        let mut e = Self::zero(ctx);
        if ctx.phi > 0 {
            e.coeffs[0] = v;
        }
        e
    }

    pub fn one(ctx: &Arc<Cyclo>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_root(ctx: &Arc<Cyclo>, root: Root) -> Self {
        assert_eq!(root.n, ctx.n, "root from a different conductor");
        CycElem {
            ctx: ctx.clone(),
            coeffs: ctx.powers[root.exp as usize]
                .iter()
                .map(|c| *c as i128)
                .collect(),
        }
    }

    /// `zeta_k^a`.
    pub fn root_of_unity(ctx: &Arc<Cyclo>, k: u64, a: i64) -> Result<Self> {
        Ok(Self::from_root(ctx, ctx.root(k, a)?))
    }

    /// Builds an element from raw power-basis coefficients (reducing them).
    pub fn from_coeffs(ctx: &Arc<Cyclo>, raw: &[i128]) -> Self {
        let n = ctx.n as usize;
        let mut folded = vec![0i128; n];
        for (k, c) in raw.iter().enumerate() {
            folded[k % n] += c;
        }
        CycElem {
            ctx: ctx.clone(),
            coeffs: ctx.reduce_exponents(folded.into_iter().enumerate()),
        }
    }

    pub fn ctx(&self) -> &Arc<Cyclo> {
        &self.ctx
    }

    pub fn conductor(&self) -> u64 {
        self.ctx.n
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// The integer value if the element is a rational integer.
    pub fn as_integer(&self) -> Option<i128> {
        match self.coeffs.split_first() {
            Some((c0, rest)) if rest.iter().all(|c| *c == 0) => Some(*c0),
            None => Some(0),
            _ => None,
        }
    }

    pub fn scale(&self, k: i128) -> Self {
        CycElem {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.checked_mul(k).expect("coefficient overflow"))
                .collect(),
        }
    }

    /// Division by a rational integer; every coefficient must be divisible.
    pub fn div_exact(&self, k: i128) -> Result<Self> {
        if k == 0 || self.coeffs.iter().any(|c| c % k != 0) {
            return Err(Error::InexactDivision(k));
        }
        Ok(CycElem {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c / k).collect(),
        })
    }

    pub fn mul_root(&self, root: Root) -> Self {
        self * &Self::from_root(&self.ctx, root)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Complex conjugation `zeta_N -> zeta_N^{-1}`.
    pub fn conj(&self) -> Self {
        let n = self.ctx.n as usize;
        let mut folded = vec![0i128; n];
        for (k, c) in self.coeffs.iter().enumerate() {
            folded[(n - k) % n] += c;
        }
        CycElem {
            ctx: self.ctx.clone(),
            coeffs: self.ctx.reduce_exponents(folded.into_iter().enumerate()),
        }
    }

    /// Re-expresses the element over a conductor divisible by this one.
    pub fn lift(&self, target: &Arc<Cyclo>) -> Result<Self> {
        if target.n % self.ctx.n != 0 {
            return Err(Error::BadConductor(self.ctx.n, target.n));
        }
        let scale = (target.n / self.ctx.n) as usize;
        Ok(CycElem {
            ctx: target.clone(),
            coeffs: target
                .reduce_exponents(self.coeffs.iter().enumerate().map(|(k, c)| (k * scale, *c))),
        })
    }

    /// Value under the embedding `zeta_N -> exp(2 pi i / N)` in double precision.
    pub fn embed(&self) -> Complex64 {
        let n = self.ctx.n as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| Complex64::from_polar(*c as f64, 2.0 * PI * k as f64 / n))
            .sum()
    }

    /// `|x|^2 = x * conj(x)`, exact.
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }
}

impl Serialize for CycElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("N", &self.ctx.n)?;
        map.serialize_entry("coeffs", &self.coeffs)?;
        map.end()
    }
}

fn check_same(a: &CycElem, b: &CycElem) {
    assert_eq!(
        a.ctx.n, b.ctx.n,
        "cyclotomic elements from different conductors"
    );
}

impl Add<&CycElem> for &CycElem {
    type Output = CycElem;

    fn add(self, rhs: &CycElem) -> CycElem {
        check_same(self, rhs);
        CycElem {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.checked_add(*b).expect("coefficient overflow"))
                .collect(),
        }
    }
}

impl Sub<&CycElem> for &CycElem {
    type Output = CycElem;

    fn sub(self, rhs: &CycElem) -> CycElem {
        check_same(self, rhs);
        CycElem {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.checked_sub(*b).expect("coefficient overflow"))
                .collect(),
        }
    }
}

impl Mul<&CycElem> for &CycElem {
    type Output = CycElem;

    fn mul(self, rhs: &CycElem) -> CycElem {
        check_same(self, rhs);
        let phi = self.ctx.phi;
        if phi == 0 {
            return self.clone();
        }
        let mut prod = vec![0i128; 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, b) in rhs.coeffs.iter().enumerate().filter(|(_, b)| **b != 0) {
                prod[i + j] = prod[i + j]
                    .checked_add(a.checked_mul(*b).expect("coefficient overflow"))
                    .expect("coefficient overflow");
            }
        }
        // 2 phi(N) - 1 < N whenever 4 | N, so the table covers every exponent
        let n = self.ctx.n as usize;
        let mut folded = vec![0i128; n.max(prod.len())];
        for (k, c) in prod.into_iter().enumerate() {
            folded[k % n] += c;
        }
        folded.truncate(n);
        CycElem {
            ctx: self.ctx.clone(),
            coeffs: self.ctx.reduce_exponents(folded.into_iter().enumerate()),
        }
    }
}

impl Neg for &CycElem {
    type Output = CycElem;

    fn neg(self) -> CycElem {
        self.scale(-1)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for CycElem {
            type Output = CycElem;
            fn $f(self, rhs: CycElem) -> CycElem {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&CycElem> for CycElem {
            type Output = CycElem;
            fn $f(self, rhs: &CycElem) -> CycElem {
                (&self).$f(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycElem {
    type Output = CycElem;

    fn neg(self) -> CycElem {
        self.scale(-1)
    }
}

/// The positive square root of `p` inside `Z[zeta_p, zeta_4]`, obtained from
/// the quadratic Gauss sum `sum_x zeta_p^{x^2}` (which is `sqrt(p)` or
/// `i sqrt(p)` according to `p mod 4`).
pub fn sqrt_p(ctx: &Arc<Cyclo>, p: u64) -> Result<CycElem> {
    if ctx.n % (4 * p) != 0 || prime_factors(p) != vec![p] || p == 2 {
        return Err(Error::BadConductor(4 * p, ctx.n));
    }
    let mut sum = RootSum::new(ctx);
    for x in 0..p {
        sum.add(ctx.root(p, ((x * x) % p) as i64)?);
    }
    let gauss = sum.to_elem();
    if p % 4 == 3 {
        Ok(gauss.mul_root(ctx.root(4, -1)?))
    } else {
        Ok(gauss)
    }
}
