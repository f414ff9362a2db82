//! The auxiliary sum
//! `P = sum_{c, d mod p^i, p !| d} lambda(p^j beta d + d^{-1}(p^k b - c^2))`
//! with `lambda(1) = zeta_{p^i}^r`, its factorization into a quadratic Gauss
//! sum times `P1`, and the Kloosterman / Salie sums that `P1` reduces to.
//!
//! Everything here lives at its own level `i`, independent of any ambient
//! `Z/p^l`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cyclotomic::{sqrt_p, CycElem, Cyclo, RootSum};
use crate::error::{Error, Result};
use crate::residue::{ipow, is_prime, legendre, RingParams};

/// Parameters of `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PSumParams {
    pub p: u64,
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub beta: u64,
    pub b: u64,
    pub r: u64,
}

impl PSumParams {
    pub fn new(p: u64, i: u32, j: u32, k: u32, beta: u64, b: u64, r: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::BadRing(format!("p = {p} is not an odd prime")));
        }
        if i == 0 || j == 0 || j > i || k > i {
            return Err(Error::BadArgument(format!(
                "need 1 <= j <= i and 0 <= k <= i, got i={i} j={j} k={k}"
            )));
        }
        for (name, v) in [("beta", beta), ("b", b), ("r", r)] {
            if v % p == 0 {
                return Err(Error::BadArgument(format!("{name} = {v} is not a unit")));
            }
        }
        let q = ipow(p, i);
        Ok(PSumParams {
            p,
            i,
            j,
            k,
            beta: beta % q,
            b: b % q,
            r: r % q,
        })
    }

    pub fn level(&self) -> RingParams {
        RingParams::level(self.p, self.i).expect("validated")
    }

    /// A field containing `zeta_{p^i}` and `zeta_4`.
    pub fn ctx(&self) -> Arc<Cyclo> {
        level_ctx(self.p, self.i)
    }

    /// Which of the five evaluations applies.
    pub fn case(&self) -> PCase {
        let (i, j, k) = (self.i, self.j, self.k);
        if j == i && k == i {
            PCase::I
        } else if j < k {
            PCase::II
        } else if k < j {
            PCase::III
        } else if i % 2 == 0 {
            PCase::IV
        } else {
            PCase::V
        }
    }
}

pub fn level_ctx(p: u64, i: u32) -> Arc<Cyclo> {
    Cyclo::new(4 * ipow(p, i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PCase {
    I,
    II,
    III,
    IV,
    V,
}

impl fmt::Display for PCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PCase::I => "i",
            PCase::II => "ii",
            PCase::III => "iii",
            PCase::IV => "iv",
            PCase::V => "v",
        };
        f.write_str(s)
    }
}

/// `P = prefactor * P1`, with the case used and whether `P1` came from a
/// closed form (case iv at `i - j = 1` falls back to summing `K`).
#[derive(Clone, Debug, Serialize)]
pub struct PSumValue {
    pub case: PCase,
    pub prefactor: CycElem,
    pub p1: CycElem,
    pub value: CycElem,
    pub closed_form: bool,
}

fn leg(x: u64, p: u64) -> i128 {
    legendre((x % p) as i64, p) as i128
}

fn sign_pow(s: i128, e: u32) -> i128 {
    if e % 2 == 0 {
        1
    } else {
        s
    }
}

/// `(-1/p)^{delta_e / 2} p^{e/2}`: `p^{e/2}` for even `e`, and
/// `sqrt((-1/p)) p^{(e-1)/2} sqrt(p)` for odd `e`, with `sqrt(-1) = zeta_4`.
fn half_power(ctx: &Arc<Cyclo>, p: u64, e: u32) -> Result<CycElem> {
    if e % 2 == 0 {
        return Ok(CycElem::from_int(ctx, ipow(p, e / 2) as i128));
    }
    let v = sqrt_p(ctx, p)?.scale(ipow(p, e / 2) as i128);
    Ok(if p % 4 == 3 {
        v.mul_root(ctx.root(4, 1)?)
    } else {
        v
    })
}

/// `sum_{c mod p^i} lambda(-d^{-1} c^2) = (-rd/p)^i (-1/p)^{delta_i/2} p^{i/2}`.
pub fn quad_gauss_closed(d: u64, level: &RingParams, r: u64, ctx: &Arc<Cyclo>) -> Result<CycElem> {
    let p = level.p();
    if d % p == 0 {
        return Err(Error::NonUnit(d));
    }
    let s = sign_pow(leg(level.neg(level.mul(r, d)), p), level.l());
    Ok(half_power(ctx, p, level.l())?.scale(s))
}

/// The same sum, term by term.
pub fn quad_gauss_brute(d: u64, level: &RingParams, r: u64, ctx: &Arc<Cyclo>) -> Result<CycElem> {
    let q = level.q();
    let a = level.neg(level.inv(d)?);
    let mut acc = RootSum::new(ctx);
    for c in 0..q {
        acc.add(ctx.root(q, (level.mul(r, level.mul(a, level.mul(c, c)))) as i64)?);
    }
    Ok(acc.to_elem())
}

/// Smallest `u` with `u^2 = a (mod p^h)`, if any.
pub fn sqrt_mod(a: u64, level: &RingParams) -> Option<u64> {
    (1..level.q()).find(|&u| level.mul(u, u) == a % level.q())
}

/// `sum_{d mod p^h, p !| d} chi(d)^t zeta_{p^h}^{r(d + a d^{-1})}` where `chi` is
/// the Legendre symbol and `t` is 0 or 1.
pub fn twisted_kloosterman_brute(
    a: u64,
    level: &RingParams,
    r: u64,
    quadratic: bool,
    ctx: &Arc<Cyclo>,
) -> Result<CycElem> {
    let (p, q) = (level.p(), level.q());
    let mut acc = RootSum::new(ctx);
    for d in (1..q).filter(|d| d % p != 0) {
        let root = ctx.root(
            q,
            level.mul(r, level.add(d, level.mul(a, level.inv(d)?))) as i64,
        )?;
        let w = if quadratic { leg(d, p) as i64 } else { 1 };
        acc.add_times(root, w);
    }
    Ok(acc.to_elem())
}

/// Kloosterman sum `K = sum_d lambda_1(d + a d^{-1})` at level `h`, where
/// `lambda_1(1) = zeta_{p^h}^r`: summed directly at `h = 1`, Salie's
/// evaluation above.
pub fn kloosterman(a: u64, level: &RingParams, r: u64, ctx: &Arc<Cyclo>) -> Result<CycElem> {
    let (p, h, q) = (level.p(), level.l(), level.q());
    if a % p == 0 || r % p == 0 {
        return Err(Error::NonUnit(if a % p == 0 { a } else { r }));
    }
    if h == 1 {
        return twisted_kloosterman_brute(a, level, r, false, ctx);
    }
    let Some(u) = sqrt_mod(a, level) else {
        return Ok(CycElem::zero(ctx));
    };
    let minus = sign_pow(leg(p - 1, p), h);
    let lead = sign_pow(leg(level.mul(u, r), p), h);
    let plus = ctx.root(q, level.mul(r, level.mul(2, u)) as i64)?;
    let neg = ctx.root(q, level.mul(r, level.neg(level.mul(2, u))) as i64)?;
    let mut pair = RootSum::new(ctx);
    pair.add(plus);
    pair.add_times(neg, minus as i64);
    Ok(half_power(ctx, p, h)? * pair.to_elem().scale(lead))
}

/// `K' = sum_d (d/p) lambda_1(d + a d^{-1})` at level `h` (Salie sum).
pub fn salie(a: u64, level: &RingParams, r: u64, ctx: &Arc<Cyclo>) -> Result<CycElem> {
    let (p, h, q) = (level.p(), level.l(), level.q());
    if a % p == 0 || r % p == 0 {
        return Err(Error::NonUnit(if a % p == 0 { a } else { r }));
    }
    let Some(u) = sqrt_mod(a, level) else {
        return Ok(CycElem::zero(ctx));
    };
    let plus = ctx.root(q, level.mul(r, level.mul(2, u)) as i64)?;
    let neg = ctx.root(q, level.mul(r, level.neg(level.mul(2, u))) as i64)?;
    let mut pair = RootSum::new(ctx);
    if h % 2 == 1 {
        pair.add(plus);
        pair.add(neg);
        Ok(half_power(ctx, p, h)? * pair.to_elem().scale(leg(r, p)))
    } else {
        pair.add(plus);
        pair.add_times(neg, leg(p - 1, p) as i64);
        Ok(half_power(ctx, p, h)? * pair.to_elem().scale(leg(u, p)))
    }
}

/// `sum_{d unit mod p^e} (d/p)^t zeta_{p^e}^{r d}`.
fn ramanujan_like(ctx: &Arc<Cyclo>, p: u64, e: u32, r: u64, quadratic: bool) -> Result<CycElem> {
    Ok(match (e, quadratic) {
        (1, false) => CycElem::from_int(ctx, -1),
        (1, true) => half_power(ctx, p, 1)?.scale(leg(r, p)),
        _ => CycElem::zero(ctx),
    })
}

/// `P` from the case analysis.
pub fn p_sum_closed(params: &PSumParams, ctx: &Arc<Cyclo>) -> Result<PSumValue> {
    let PSumParams {
        p,
        i,
        j,
        k,
        beta,
        b,
        r,
    } = *params;
    let level = params.level();
    let quadratic = i % 2 == 1;
    let chi = |x: u64| if quadratic { leg(x, p) } else { 1 };
    let pj = ipow(p, j) as i128;
    let case = params.case();
    let mut closed_form = true;
    let p1 = match case {
        PCase::I => {
            if quadratic {
                CycElem::zero(ctx)
            } else {
                CycElem::from_int(ctx, level.unit_order() as i128)
            }
        }
        // d -> d + p^{k-j} beta b d^{-1} permutes units mod p^{i-j}, fixing d mod p
        PCase::II => ramanujan_like(ctx, p, i - j, r, quadratic)?.scale(pj * chi(beta)),
        PCase::III => {
            ramanujan_like(ctx, p, i - k, r, quadratic)?.scale(ipow(p, k) as i128 * chi(b))
        }
        PCase::IV => {
            let lower = RingParams::level(p, i - j)?;
            closed_form = i - j > 1;
            kloosterman(lower.mul(beta, b), &lower, r, ctx)?.scale(pj)
        }
        PCase::V => {
            let lower = RingParams::level(p, i - j)?;
            salie(lower.mul(beta, b), &lower, r, ctx)?.scale(pj * chi(beta))
        }
    };
    let prefactor = half_power(ctx, p, i)?.scale(sign_pow(leg(level.neg(r), p), i));
    Ok(PSumValue {
        case,
        value: &prefactor * &p1,
        prefactor,
        p1,
        closed_form,
    })
}

/// `P1 = sum_{d unit mod p^i} (d/p)^i lambda(p^j beta d + p^k b d^{-1})`, directly.
pub fn p1_brute(params: &PSumParams, ctx: &Arc<Cyclo>) -> Result<CycElem> {
    let PSumParams {
        p,
        i,
        j,
        k,
        beta,
        b,
        r,
    } = *params;
    let level = params.level();
    let q = level.q();
    let (pj, pk) = (ipow(p, j) % q, ipow(p, k) % q);
    let mut acc = RootSum::new(ctx);
    for d in (1..q).filter(|d| d % p != 0) {
        let x = level.add(
            level.mul(pj, level.mul(beta, d)),
            level.mul(pk, level.mul(b, level.inv(d)?)),
        );
        let w = if i % 2 == 1 { leg(d, p) as i64 } else { 1 };
        acc.add_times(ctx.root(q, level.mul(r, x) as i64)?, w);
    }
    Ok(acc.to_elem())
}

/// The literal double sum defining `P`.
pub fn p_sum_brute(params: &PSumParams, ctx: &Arc<Cyclo>, cap: u64) -> Result<CycElem> {
    let PSumParams {
        p,
        j,
        k,
        beta,
        b,
        r,
        ..
    } = *params;
    let level = params.level();
    let q = level.q();
    if q * q > cap {
        return Err(Error::TooLarge { size: q * q, cap });
    }
    let (pj, pk) = (ipow(p, j) % q, ipow(p, k) % q);
    let mut acc = RootSum::new(ctx);
    for d in (1..q).filter(|d| d % p != 0) {
        let dinv = level.inv(d)?;
        let fixed = level.mul(pj, level.mul(beta, d));
        for c in 0..q {
            let inner = level.sub(level.mul(pk, b), level.mul(c, c));
            let x = level.add(fixed, level.mul(dinv, inner));
            acc.add(ctx.root(q, level.mul(r, x) as i64)?);
        }
    }
    Ok(acc.to_elem())
}

/// Every valid `(i, j, k, beta, b, r)` at prime `p` with `i <= max_i`; unit
/// parameters range over residues mod `p^i`.
pub fn sweep(p: u64, max_i: u32) -> Result<Vec<PSumParams>> {
    let mut out = Vec::new();
    for i in 1..=max_i {
        let q = ipow(p, i);
        let units: Vec<u64> = (1..q).filter(|x| x % p != 0).collect();
        for j in 1..=i {
            for k in 0..=i {
                for &beta in &units {
                    for &b in &units {
                        for &r in &units {
                            out.push(PSumParams::new(p, i, j, k, beta, b, r)?);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_gauss_matches_brute() {
        for (p, i) in [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)] {
            let level = RingParams::level(p, i).unwrap();
            let ctx = level_ctx(p, i);
            for d in (1..level.q()).filter(|d| d % p != 0) {
                for r in [1, 2] {
                    let closed = quad_gauss_closed(d, &level, r, &ctx).unwrap();
                    assert_eq!(
                        closed,
                        quad_gauss_brute(d, &level, r, &ctx).unwrap(),
                        "p={p} i={i} d={d}"
                    );
                    let sq = closed.pow(2).as_integer().unwrap();
                    let pi = ipow(p, i) as i128;
                    assert!(sq == pi || sq == -pi);
                }
            }
        }
        let level = RingParams::level(3, 1).unwrap();
        assert_eq!(
            quad_gauss_closed(3, &level, 1, &level_ctx(3, 1)),
            Err(Error::NonUnit(3))
        );
    }

    #[test]
    fn kloosterman_examples() {
        let ctx = level_ctx(3, 2);
        let l1 = RingParams::level(3, 1).unwrap();
        assert_eq!(
            kloosterman(1, &l1, 1, &ctx).unwrap(),
            CycElem::from_int(&ctx, -1)
        );
        let l2 = RingParams::level(3, 2).unwrap();
        assert!(kloosterman(2, &l2, 1, &ctx).unwrap().is_zero());
        for (p, h) in [(3, 2), (3, 3), (5, 2), (5, 3), (7, 2)] {
            let level = RingParams::level(p, h).unwrap();
            let ctx = level_ctx(p, h);
            for a in (1..level.q()).filter(|a| a % p != 0) {
                for r in (1..p).take(2) {
                    let k = kloosterman(a, &level, r, &ctx).unwrap();
                    assert_eq!(
                        k,
                        twisted_kloosterman_brute(a, &level, r, false, &ctx).unwrap()
                    );
                    assert!(k.embed().norm() <= 2.0 * (level.q() as f64).sqrt() + 1e-9);
                    let s = salie(a, &level, r, &ctx).unwrap();
                    assert_eq!(
                        s,
                        twisted_kloosterman_brute(a, &level, r, true, &ctx).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn salie_level_one_and_nonsquares() {
        for p in [3, 5, 7, 11] {
            let level = RingParams::level(p, 1).unwrap();
            let ctx = level_ctx(p, 1);
            for a in 1..p {
                let s = salie(a, &level, 1, &ctx).unwrap();
                assert_eq!(
                    s,
                    twisted_kloosterman_brute(a, &level, 1, true, &ctx).unwrap()
                );
                if legendre(a as i64, p) == -1 {
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn square_root_choice_is_irrelevant() {
        // both formulas only see u through the pair {u, -u}
        let level = RingParams::level(5, 2).unwrap();
        let ctx = level_ctx(5, 2);
        let a = 4;
        let u = sqrt_mod(a, &level).unwrap();
        assert_eq!(u, 2);
        let other = level.neg(u);
        assert_eq!(level.mul(other, other), a);
        assert_eq!(
            kloosterman(a, &level, 1, &ctx).unwrap(),
            twisted_kloosterman_brute(level.mul(other, other), &level, 1, false, &ctx).unwrap()
        );
    }

    #[test]
    fn case_one_values() {
        let p = PSumParams::new(3, 2, 2, 2, 1, 1, 1).unwrap();
        let ctx = p.ctx();
        let v = p_sum_closed(&p, &ctx).unwrap();
        assert_eq!(v.case, PCase::I);
        assert_eq!(v.p1.as_integer(), Some(6));
        let p = PSumParams::new(3, 1, 1, 1, 1, 1, 1).unwrap();
        assert!(p_sum_closed(&p, &p.ctx()).unwrap().p1.is_zero());
        let p = PSumParams::new(3, 3, 1, 2, 1, 2, 1).unwrap();
        let v = p_sum_closed(&p, &p.ctx()).unwrap();
        assert_eq!(v.case, PCase::II);
        assert!(v.p1.is_zero());
    }

    #[test]
    fn closed_matches_brute_small() {
        for params in sweep(3, 2).unwrap() {
            let ctx = params.ctx();
            let closed = p_sum_closed(&params, &ctx).unwrap();
            assert_eq!(closed.p1, p1_brute(&params, &ctx).unwrap(), "{params:?}");
            assert_eq!(
                closed.value,
                p_sum_brute(&params, &ctx, u64::MAX).unwrap(),
                "{params:?}"
            );
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PSumParams::new(3, 0, 1, 0, 1, 1, 1).is_err());
        assert!(PSumParams::new(3, 2, 3, 0, 1, 1, 1).is_err());
        assert!(PSumParams::new(3, 2, 1, 3, 1, 1, 1).is_err());
        assert!(PSumParams::new(3, 2, 1, 1, 3, 1, 1).is_err());
        assert!(PSumParams::new(4, 2, 1, 1, 1, 1, 1).is_err());
        let p = PSumParams::new(3, 2, 1, 1, 1, 1, 1).unwrap();
        assert!(matches!(
            p_sum_brute(&p, &p.ctx(), 10),
            Err(Error::TooLarge { .. })
        ));
    }
}
