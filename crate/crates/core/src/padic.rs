//! Truncated p-adic integers and the p-adic logarithm on `1 + pZ_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::residue::{valuation, RingParams};

/// A p-adic integer known modulo `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicInt {
    p: u64,
    precision: u32,
    value: BigInt,
}

fn pow_big(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

impl PadicInt {
    pub fn new(p: u64, precision: u32, value: impl Into<BigInt>) -> Self {
        let value = value.into().mod_floor(&pow_big(p, precision));
        PadicInt {
            p,
            precision,
            value,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// Drops digits beyond `precision`.
    pub fn truncate(&self, precision: u32) -> Self {
        assert!(precision <= self.precision, "cannot invent digits");
        PadicInt::new(self.p, precision, self.value.clone())
    }

    pub fn mul(&self, other: &PadicInt) -> PadicInt {
        let prec = self.precision.min(other.precision);
        PadicInt::new(self.p, prec, &self.value * &other.value)
    }

    pub fn add(&self, other: &PadicInt) -> PadicInt {
        let prec = self.precision.min(other.precision);
        PadicInt::new(self.p, prec, &self.value + &other.value)
    }

    pub fn is_unit(&self) -> bool {
        !(&self.value % self.p).is_zero()
    }

    pub fn inv(&self) -> Result<PadicInt> {
        let modulus = pow_big(self.p, self.precision);
        let ext = self.value.extended_gcd(&modulus);
        if !ext.gcd.is_one() {
            return Err(Error::BadArgument("inverse of a non-unit".into()));
        }
        Ok(PadicInt::new(self.p, self.precision, ext.x))
    }
}

/// Number of series terms needed: the `k`-th term `(u-1)^k / k` has valuation
/// at least `k - floor(log_p k)`, which is nondecreasing in `k`.
fn series_terms(p: u64, precision: u32) -> u64 {
    let mut k = 1u64;
    loop {
        if k as i64 - floor_log(p, k) as i64 >= precision as i64 {
            return k;
        }
        k += 1;
    }
}

fn floor_log(p: u64, k: u64) -> u32 {
    let mut e = 0;
    let mut x = k;
    while x >= p {
        x /= p;
        e += 1;
    }
    e
}

/// `log(u) = sum_{k>=1} (-1)^{k+1} (u-1)^k / k` for `u = 1 (mod p)`, correct
/// modulo `p^{precision}` of the input.
pub fn padic_log_unit(u: &PadicInt) -> Result<PadicInt> {
    let p = u.p;
    let prec = u.precision;
    let x = &u.value - BigInt::one();
    if !(&x % p).is_zero() {
        return Err(Error::BadArgument(format!("log needs u = 1 mod {p}")));
    }
    let terms = series_terms(p, prec);
    let guard = floor_log(p, terms);
    let work = pow_big(p, prec + guard);
    let target = pow_big(p, prec);
    let mut acc = BigInt::zero();
    let mut power = BigInt::one();
    for k in 1..=terms {
        power = (&power * &x).mod_floor(&work);
        let v = valuation(k as i128, p).unwrap_or(0);
        let pv = pow_big(p, v);
        debug_assert!((&power % &pv).is_zero());
        let num = &power / &pv;
        let unit_part = BigInt::from(k / p.pow(v));
        let inv = unit_part.extended_gcd(&target).x;
        let term = (num * inv).mod_floor(&target);
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(PadicInt::new(p, prec, acc))
}

/// Guard digits for the Odoni constant: `ceil(log_p(2 * terms)) + 2`.
fn sigma_precision(p: u64, l: u32) -> u32 {
    let terms = series_terms(p, l + 2);
    let mut g = 0;
    while p.pow(g) < 2 * terms {
        g += 1;
    }
    l + g + 2
}

/// Odoni's constant `sigma = p/log(1+p) * (1 - log(p/log(1+p)))` modulo `p^l`.
///
/// With `log(1+p) = p w`, `w` a unit, this is `w^{-1} (1 + log w)`.
pub fn odoni_sigma(ring: &RingParams) -> Result<u64> {
    let p = ring.p();
    let prec = sigma_precision(p, ring.l());
    let log1p = padic_log_unit(&PadicInt::new(p, prec + 1, 1 + p))?;
    debug_assert!((log1p.value() % p).is_zero());
    let w = PadicInt::new(p, prec, log1p.value() / BigInt::from(p));
    let log_w = padic_log_unit(&w)?;
    let sigma = w
        .inv()?
        .mul(&PadicInt::new(p, prec, BigInt::one() + log_w.value()));
    Ok(sigma
        .truncate(ring.l())
        .value()
        .to_u64()
        .expect("sigma fits in u64"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_examples() {
        let l = padic_log_unit(&PadicInt::new(3, 2, 4)).unwrap();
        assert_eq!(l.value(), &BigInt::from(3));
        let zero = padic_log_unit(&PadicInt::new(5, 7, 1)).unwrap();
        assert!(zero.value().is_zero());
        let l3 = padic_log_unit(&PadicInt::new(3, 3, 4)).unwrap();
        assert_eq!(l3.value() % 9, BigInt::from(3));
        assert!(padic_log_unit(&PadicInt::new(3, 3, 2)).is_err());
    }

    #[test]
    fn sigma_is_one_mod_p() {
        for (p, l) in [
            (3, 2),
            (3, 3),
            (3, 4),
            (3, 6),
            (5, 2),
            (5, 4),
            (7, 2),
            (7, 3),
            (11, 3),
        ] {
            let ring = RingParams::new(p, l).unwrap();
            let sigma = odoni_sigma(&ring).unwrap();
            assert!(sigma < ring.q());
            assert_eq!(sigma % p, 1, "p={p} l={l}");
        }
    }

    #[test]
    fn sigma_digits_are_stable() {
        for p in [3u64, 5, 7] {
            let top = odoni_sigma(&RingParams::new(p, 7).unwrap()).unwrap();
            for l in 2..7 {
                let s = odoni_sigma(&RingParams::new(p, l).unwrap()).unwrap();
                assert_eq!(top % p.pow(l), s, "p={p} l={l}");
            }
        }
    }

    proptest! {
        #[test]
        fn log_is_a_homomorphism(p in prop::sample::select(vec![3u64, 5, 7]), a in 0u64..10_000, b in 0u64..10_000) {
            let prec = 6;
            let u = PadicInt::new(p, prec, 1 + p * a);
            let v = PadicInt::new(p, prec, 1 + p * b);
            let lhs = padic_log_unit(&u.mul(&v)).unwrap();
            let rhs = padic_log_unit(&u).unwrap().add(&padic_log_unit(&v).unwrap());
            prop_assert_eq!(lhs.truncate(prec - 1), rhs.truncate(prec - 1));
        }

        #[test]
        fn more_precision_keeps_lower_digits(p in prop::sample::select(vec![3u64, 5, 7]), a in 0u64..10_000, prec in 2u32..8) {
            let lo = padic_log_unit(&PadicInt::new(p, prec, 1 + p * a)).unwrap();
            let hi = padic_log_unit(&PadicInt::new(p, prec + 3, 1 + p * a)).unwrap();
            prop_assert_eq!(hi.truncate(prec), lo);
        }
    }
}
