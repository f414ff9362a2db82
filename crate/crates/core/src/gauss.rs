//! Gauss sums: `g_l(mu) = sum_x mu(x) e(x)` over `(Z/p^l)^x` and
//! `tau_l(chi) = sum_X chi(X) e(Tr X)` over `GL_2(Z/p^l)`, each both in closed
//! form and by direct summation.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::characters::{make_lambda_prime, make_nu0, AddChar, CharSpec, Character, MultChar};
use crate::cyclotomic::{sqrt_p, CycElem, Cyclo, RootSum};
use crate::error::{Error, Result};
use crate::group::{Mat2, OmegaFamily, OmegaIndex, Subgroup, SubgroupSpec};
use crate::padic::odoni_sigma;
use crate::residue::{valuation, RingParams};

/// An exact value together with its complex embedding.
#[derive(Clone, Debug, Serialize)]
pub struct GaussValue {
    pub exact: CycElem,
    #[serde(skip)]
    pub embedding: Complex64,
}

impl GaussValue {
    pub fn new(exact: CycElem) -> Self {
        let embedding = exact.embed();
        GaussValue { exact, embedding }
    }
}

/// `delta` of the second or third family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaUnit {
    pub value: u64,
    pub is_unit: bool,
    pub family: OmegaFamily,
}

/// `p^e delta = 2 sum_{t odd, t <= p^s} C(p^s, t) p^t x^{(t+1)/2}` with
/// `(e, s, x) = (n, n-1, eps)` for the second family and
/// `(m+1, m-1, p beta)` for the third; exact integer arithmetic.
pub fn delta_unit(family: OmegaFamily, ring: &RingParams) -> Result<DeltaUnit> {
    let p = ring.p();
    let (e, s, x) = match family {
        OmegaFamily::X2 { eps } => (ring.n(), ring.n() - 1, BigInt::from(eps)),
        OmegaFamily::X3 { beta } => {
            if ring.m() == 0 {
                return Err(Error::BadArgument("third family needs l >= 2".into()));
            }
            (ring.m() + 1, ring.m() - 1, BigInt::from(p) * beta)
        }
    };
    let top = ring.pow_p(s);
    let bp = BigInt::from(p);
    let mut sum = BigInt::zero();
    let mut binom = BigInt::from(1u32);
    for t in 1..=top {
        binom = binom * (top - t + 1) / t;
        if t % 2 == 1 {
            sum += &binom
                * num_traits::pow(bp.clone(), t as usize)
                * num_traits::pow(x.clone(), ((t + 1) / 2) as usize);
        }
    }
    sum *= 2;
    let pe = num_traits::pow(bp, e as usize);
    let (quot, rem) = sum.div_mod_floor(&pe);
    if !rem.is_zero() {
        return Err(Error::DivisibilityFailed(e));
    }
    let value = quot
        .mod_floor(&BigInt::from(ring.q()))
        .to_u64()
        .expect("reduced value fits");
    Ok(DeltaUnit {
        value,
        is_unit: value % p != 0,
        family,
    })
}

fn check_levels(mu: &MultChar, e: &AddChar) -> Result<()> {
    if mu.ring().p() != e.ring().p() || mu.ring().l() != e.ring().l() {
        return Err(Error::BadArgument(
            "characters live on different rings".into(),
        ));
    }
    Ok(())
}

/// `sum_{x unit} mu(x) e(x)` by direct summation.
pub fn g_brute(mu: &MultChar, e: &AddChar, ctx: &Arc<Cyclo>, cap: u64) -> Result<CycElem> {
    check_levels(mu, e)?;
    let ring = mu.ring();
    if ring.unit_order() > cap {
        return Err(Error::TooLarge {
            size: ring.unit_order(),
            cap,
        });
    }
    let mut acc = RootSum::new(ctx);
    for x in (1..ring.q()).filter(|x| x % ring.p() != 0) {
        acc.add(mu.eval(ctx, x)? * e.eval(ctx, x));
    }
    Ok(acc.to_elem())
}

/// `g_l(mu, e)` without summing over the whole unit group: descent when
/// `p | r`, vanishing for imprimitive `mu`, and stationary phase otherwise.
pub fn g_closed(mu: &MultChar, e: &AddChar, ctx: &Arc<Cyclo>) -> Result<CycElem> {
    check_levels(mu, e)?;
    let ring = mu.ring();
    let p = ring.p();
    let l = ring.l();
    if l == 1 {
        return g_brute(mu, e, ctx, u64::MAX);
    }
    let v = valuation(e.r() as i128, p).expect("r is nonzero");
    if v >= 1 {
        if !mu.is_trivial_on(l - v) {
            return Ok(CycElem::zero(ctx));
        }
        let lower_mu = mu.descend(l - v)?;
        let lower_e = AddChar::new(lower_mu.ring(), e.r() / ring.pow_p(v))?;
        return Ok(g_closed(&lower_mu, &lower_e, ctx)?.scale(ring.pow_p(v) as i128));
    }
    if !mu.is_primitive() {
        return Ok(CycElem::zero(ctx));
    }
    let (m, n) = (ring.m(), ring.n());
    let pm = ring.pow_p(m);
    // mu(1 + p^n z) = zeta_{p^m}^{b z}
    let b = mu.turn(1 + ring.pow_p(n))? / (ring.unit_order() / pm);
    let a = (b as u128 * ring.inv(e.r())? as u128 % pm as u128) as u64;
    let y0 = (pm - a % pm) % pm;
    let lead = mu.eval(ctx, y0)? * e.eval(ctx, y0);
    if l % 2 == 0 {
        return Ok(CycElem::from_root(ctx, lead).scale(pm as i128));
    }
    let mut tail = RootSum::new(ctx);
    for t in 0..p {
        let u = ring.reduce(1 + (pm * t) as i128);
        tail.add(lead * mu.eval(ctx, u)? * e.eval(ctx, ring.mul(y0, pm * t)));
    }
    Ok(tail.to_elem().scale(pm as i128))
}

/// The characters normalized by `nu(1 + p) = zeta_{p^{l-1}}^{-1}`; all are
/// primitive and they differ by characters of order dividing `p - 1`.
pub fn odoni_normalized(ring: &RingParams) -> Vec<MultChar> {
    let x = 1 + ring.p();
    let top = ring.pow_p(ring.l() - 1);
    MultChar::all(ring)
        .filter(|chi| {
            // zeta_M^t = zeta_top^{-1}
            let m = ring.unit_order();
            chi.turn(x).expect("1+p is a unit") == m - m / top
        })
        .collect()
}

/// Odoni's value of `g_l(nu)` for the normalized primitive `nu` and `r = 1`.
pub fn odoni_value(ring: &RingParams, ctx: &Arc<Cyclo>) -> Result<CycElem> {
    let p = ring.p();
    let l = ring.l();
    let q = ring.q();
    let half = if l % 2 == 0 {
        CycElem::from_int(ctx, ring.pow_p(l / 2) as i128)
    } else {
        sqrt_p(ctx, p)?.scale(ring.pow_p(l / 2) as i128)
    };
    let quarter = ctx.root(4, (1 - p as i64) / 2)?;
    let value = match l {
        2 => half.mul_root(ctx.root(q, 1)?),
        3 => half
            .mul_root(ctx.root(q, 1)?)
            .mul_root(quarter)
            .mul_root(ctx.root(p, ((p * p - 1) / 8) as i64)?),
        _ => {
            let sigma = odoni_sigma(ring)?;
            let v = half.mul_root(ctx.root(q, sigma as i64)?);
            if l % 2 == 0 {
                v
            } else {
                v.mul_root(quarter)
            }
        }
    };
    Ok(value)
}

/// Outcome of comparing Odoni's value with one normalized character.
#[derive(Clone, Debug, Serialize)]
pub struct OdoniCase {
    pub exponent: u64,
    pub brute: CycElem,
    pub matches: bool,
}

/// Compares Odoni's value with the brute-force sum for every normalized
/// primitive character at `r = 1`.
pub fn odoni_report(
    ring: &RingParams,
    ctx: &Arc<Cyclo>,
    cap: u64,
) -> Result<(CycElem, Vec<OdoniCase>)> {
    let value = odoni_value(ring, ctx)?;
    let e = AddChar::standard(ring);
    let cases = odoni_normalized(ring)
        .into_iter()
        .map(|nu| {
            let brute = g_brute(&nu, &e, ctx, cap)?;
            Ok(OdoniCase {
                exponent: nu.exponent(),
                matches: brute == value,
                brute,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((value, cases))
}

fn check_same_ring(ch: &Character, e: &AddChar) -> Result<()> {
    if ch.ring().p() != e.ring().p() || ch.ring().l() != e.ring().l() {
        return Err(Error::BadArgument(
            "character and additive character live on different rings".into(),
        ));
    }
    Ok(())
}

/// `tau_l(chi, e)` from the closed forms of each family.
pub fn tau_closed(ch: &Character, e: &AddChar) -> Result<CycElem> {
    check_same_ring(ch, e)?;
    let ring = ch.ring();
    let ctx = ch.ctx();
    let p = ring.p();
    let (l, m, n) = (ring.l(), ring.m(), ring.n());
    let deg = ch.degree() as i128;
    let mu = ch.mu();
    let r = e.r();
    let root = |k: u64, a: u128| ctx.root(k, (a % k as u128) as i64);
    match *ch.spec() {
        CharSpec::X1 { u, i, j, .. } => {
            let lp = make_lambda_prime(u, ring)?;
            let pm = ring.pow_p(m);
            let g1 = g_closed(&mu.mul(&lp.pow(1 + pm * i)), e, ctx)?;
            let g2 = g_closed(&mu.mul(&lp.pow(pm * j)), e, ctx)?;
            Ok((g1 * g2).scale(ring.q() as i128 * deg))
        }
        CharSpec::X2 { alpha, i, .. } => {
            if r % p == 0 {
                return Ok(CycElem::zero(ctx));
            }
            let table = ch.omega().expect("second family has an Omega table");
            let delta = ch.delta().expect("second family has delta") as u128;
            let h = table.find_h(alpha, r)?;
            let k2_root = |k2: u64| {
                root(
                    ring.pow_p(l - 1),
                    (delta + ring.pow_p(m) as u128 * i.k2 as u128) * k2 as u128,
                )
            };
            let k3_root = root(p * p - 1, i.k3 as u128 * h.k3 as u128)?;
            let term = |k: OmegaIndex| -> Result<crate::cyclotomic::Root> {
                let s = table.get(k).expect("index in Omega");
                Ok(mu.eval(ctx, s.det(ring))? * e.eval(ctx, s.trace(ring)))
            };
            if l % 2 == 0 {
                let v = term(h)?
                    * root(ring.pow_p(m - 1), i.k1 as u128 * h.k1 as u128)?
                    * k2_root(h.k2)?
                    * k3_root;
                Ok(CycElem::from_root(ctx, v).scale(ring.pow_p(2 * l) as i128 * deg))
            } else {
                let step = ring.pow_p(m - 1);
                let mut acc = RootSum::new(ctx);
                for a in 0..p {
                    for b in 0..p {
                        let k = OmegaIndex::new(h.k1 + a * step, h.k2 + b * step, h.k3);
                        acc.add(
                            term(k)?
                                * root(ring.pow_p(m), i.k1 as u128 * k.k1 as u128)?
                                * k2_root(k.k2)?
                                * k3_root,
                        );
                    }
                }
                Ok(acc.to_elem().scale(-(ring.pow_p(2 * l - 1) as i128) * deg))
            }
        }
        CharSpec::X3 { alpha, i, j, .. } => {
            if r % p == 0 || alpha % p == 0 {
                return Ok(CycElem::zero(ctx));
            }
            let table = ch.omega().expect("third family has an Omega table");
            let delta = ch.delta().expect("third family has delta") as u128;
            let (sigma1, sigma2) = ch.sigmas().expect("third family has sigmas");
            let h = table.find_h(alpha, r)?;
            let sh = table.get(h).expect("h in Omega");
            let a_exp = i.0 as u128 + i.1 as u128 + ring.pow_p(n - m) as u128 * j.k1 as u128;
            let b_exp = delta + ring.pow_p(n - 1) as u128 * j.k2 as u128;
            let lead = mu.eval(ctx, sh.det(ring))?
                * e.eval(ctx, sh.trace(ring))
                * root(
                    ring.pow_p(n) * (p - 1),
                    a_exp * (p as u128 * h.k1 as u128 + sigma1 as u128 * h.k3 as u128),
                )?
                * root(
                    ring.pow_p(l - 1),
                    b_exp * (p as u128 * h.k2 as u128 + sigma2 as u128 * h.k3 as u128),
                )?
                * root(p, j.k3 as u128 * h.k3 as u128)?;
            let lambda = AddChar::standard(ring);
            let pm = ring.pow_p(m);
            let t_sum = |ik: u64| -> Result<CycElem> {
                let mut acc = RootSum::new(ctx);
                for t in 0..ring.pow_p(n - m) {
                    acc.add(
                        mu.eval(ctx, ring.reduce(1 + (pm * t) as i128))?
                            * lambda.eval(ctx, ring.mul(ring.pow_p(2 * m), ring.mul(ik, t)))
                            * e.eval(ctx, ring.mul(ring.mul(pm, sh.a), t)),
                    );
                }
                Ok(acc.to_elem())
            };
            let value = (t_sum(i.0)? * t_sum(i.1)?).mul_root(lead);
            Ok(value.scale(ring.pow_p(l + 2 * m) as i128 * deg))
        }
    }
}

fn group_index(ring: &RingParams, sub: &Subgroup) -> i128 {
    (crate::group::group_order(ring) / sub.order()) as i128
}

/// `sum_{x in H} mu(det x) f(x) e(Tr x)` for a root-valued `f`.
fn subgroup_sum<F>(h: &Subgroup, ch: &Character, f: F, e: &AddChar, cap: u64) -> Result<CycElem>
where
    F: Fn(&Mat2) -> Result<crate::cyclotomic::Root>,
{
    let ring = ch.ring();
    let ctx = ch.ctx();
    let mut acc = RootSum::new(ctx);
    for x in h.enumerate(cap)? {
        acc.add(ch.mu_det(&x)? * f(&x)? * e.eval(ctx, x.trace(ring)));
    }
    Ok(acc.to_elem())
}

/// The two sums `sum_{N_{m+1}} mu phi'_i e(Tr)` and `sum_L mu phi_i e(Tr)`
/// behind the virtual character of the second family at odd `l`.
pub fn virtual_components(ch: &Character, e: &AddChar, cap: u64) -> Result<(CycElem, CycElem)> {
    check_same_ring(ch, e)?;
    let CharSpec::X2 { eps, .. } = *ch.spec() else {
        return Err(Error::UnsupportedFamily(format!(
            "{:?}",
            ch.spec().family()
        )));
    };
    if !ch.is_virtual() {
        return Err(Error::UnsupportedFamily("only for odd l".into()));
    }
    let ring = ch.ring();
    let n_sub = Subgroup::new(
        SubgroupSpec::X2N {
            eps,
            j: ring.m() + 1,
        },
        ring,
    );
    let l_sub = Subgroup::new(SubgroupSpec::X2L { eps }, ring);
    Ok((
        subgroup_sum(&n_sub, ch, |x| ch.linear(x), e, cap)?,
        subgroup_sum(&l_sub, ch, |x| ch.linear(x), e, cap)?,
    ))
}

/// `tau_l(chi, e) = [G : H] sum_{x in H} mu(det x) psi(x) e(Tr x)` over the
/// stabilizer; for the virtual case, the two induced components separately.
pub fn tau_oracle_subgroup(ch: &Character, e: &AddChar, cap: u64) -> Result<CycElem> {
    check_same_ring(ch, e)?;
    let ring = ch.ring();
    if ch.is_virtual() {
        let CharSpec::X2 { eps, .. } = *ch.spec() else {
            unreachable!()
        };
        let (on_n, on_l) = virtual_components(ch, e, cap)?;
        let n_sub = Subgroup::new(
            SubgroupSpec::X2N {
                eps,
                j: ring.m() + 1,
            },
            ring,
        );
        let l_sub = Subgroup::new(SubgroupSpec::X2L { eps }, ring);
        let first = on_n
            .scale(group_index(ring, &n_sub))
            .div_exact(ring.p() as i128)?;
        let second = on_l.scale(group_index(ring, &l_sub));
        return Ok(first - second);
    }
    let h = ch.stabilizer();
    Ok(subgroup_sum(h, ch, |x| ch.linear(x), e, cap)?.scale(group_index(ring, h)))
}

/// `[G : T] sum_{x in T} mu(det x) psi(x) e(Tr x)` with `psi` evaluated as a
/// class function on the stabilizer (through the virtual-character formula
/// in the odd second-family case).
pub fn tau_oracle_stabilizer_values(ch: &Character, e: &AddChar, cap: u64) -> Result<CycElem> {
    check_same_ring(ch, e)?;
    let ring = ch.ring();
    let ctx = ch.ctx();
    let h = ch.stabilizer();
    let mut acc = CycElem::zero(ctx);
    for x in h.enumerate(cap)? {
        acc = acc
            + ch.psi(&x)?
                .mul_root(ch.mu_det(&x)? * e.eval(ctx, x.trace(ring)));
    }
    Ok(acc.scale(group_index(ring, h)))
}

/// `sum_{X in G_l} chi(X) e(Tr X)` with `chi` obtained by induction.
pub fn tau_oracle_full(ch: &Character, e: &AddChar, cap: u64) -> Result<CycElem> {
    check_same_ring(ch, e)?;
    let ring = ch.ring();
    let ctx = ch.ctx();
    let full = ch.full()?;
    let g = Subgroup::new(SubgroupSpec::Full, ring);
    let mut acc = CycElem::zero(ctx);
    for x in g.enumerate(cap)? {
        acc = acc + full.value(&x)?.mul_root(e.eval(ctx, x.trace(ring)));
    }
    Ok(acc)
}

/// Values of a character of `G_{l-1}`, viewed through `G_l -> G_{l-1}`.
pub struct ThetaTable {
    ring: RingParams,
    ctx: Arc<Cyclo>,
    values: HashMap<Mat2, CycElem>,
    source: Option<CharSpec>,
}

impl ThetaTable {
    /// Tabulates a constructed character on all of its group.
    pub fn from_character(ch: &Character, cap: u64) -> Result<Self> {
        let full = ch.full()?;
        let g = Subgroup::new(SubgroupSpec::Full, ch.ring());
        let values = g
            .enumerate(cap)?
            .map(|x| Ok((x, full.value(&x)?)))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(ThetaTable {
            ring: ch.ring().clone(),
            ctx: ch.ctx().clone(),
            values,
            source: Some(*ch.spec()),
        })
    }

    /// A user-supplied table over the whole group.
    pub fn from_values(
        ring: &RingParams,
        ctx: &Arc<Cyclo>,
        values: HashMap<Mat2, CycElem>,
    ) -> Result<Self> {
        let expected = crate::group::group_order(ring) as usize;
        if values.len() != expected {
            return Err(Error::BadArgument(format!(
                "table has {} entries, the group has {expected}",
                values.len()
            )));
        }
        Ok(ThetaTable {
            ring: ring.clone(),
            ctx: ctx.clone(),
            values,
            source: None,
        })
    }

    pub fn ring(&self) -> &RingParams {
        &self.ring
    }

    pub fn source(&self) -> Option<&CharSpec> {
        self.source.as_ref()
    }

    /// `theta(x mod p^{l-1})` for any integer matrix `x`.
    pub fn value(&self, x: &Mat2) -> Result<&CycElem> {
        let y = x.reduce(&self.ring);
        self.values
            .get(&y)
            .ok_or_else(|| Error::NotInSubgroup(format!("{y:?} has no tabulated value")))
    }

    /// `tau_{l-1}(theta, e)` by summing the table.
    pub fn tau(&self, e: &AddChar) -> Result<CycElem> {
        let mut acc = CycElem::zero(&self.ctx);
        for (x, v) in &self.values {
            acc = acc + v.mul_root(e.eval(&self.ctx, x.trace(&self.ring)));
        }
        Ok(acc)
    }
}

/// Result of the twisted-inflation rules: an exact value, or the restricted
/// sum for which no closed form is claimed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum X4Tau {
    Exact(CycElem),
    Residual(CycElem),
}

impl X4Tau {
    pub fn value(&self) -> &CycElem {
        match self {
            X4Tau::Exact(v) | X4Tau::Residual(v) => v,
        }
    }
}

fn check_x4(twist: u64, theta: &ThetaTable, ring: &RingParams, e: &AddChar) -> Result<()> {
    if twist >= ring.p() {
        return Err(Error::BadArgument("twist power must be below p".into()));
    }
    if theta.ring.p() != ring.p() || theta.ring.l() + 1 != ring.l() {
        return Err(Error::BadArgument("theta must live one level down".into()));
    }
    if e.ring().l() != ring.l() {
        return Err(Error::BadArgument(
            "additive character must live at level l".into(),
        ));
    }
    Ok(())
}

/// `tau_l(nu^i theta, e)` with `nu = nu_0 o det` and `theta` inflated from
/// level `l-1`.
pub fn tau_x4(
    twist: u64,
    theta: &ThetaTable,
    ring: &RingParams,
    ctx: &Arc<Cyclo>,
    e: &AddChar,
) -> Result<X4Tau> {
    check_x4(twist, theta, ring, e)?;
    let p = ring.p();
    let p4 = (p as i128).pow(4);
    let r = e.r();
    if (twist >= 1 && r % p == 0) || (twist == 0 && r % p != 0) {
        return Ok(X4Tau::Exact(CycElem::zero(ctx)));
    }
    if twist == 0 {
        let lower_e = e.descend()?;
        let lower = match theta.source {
            Some(spec) => {
                let ch = Character::new(spec, &theta.ring, &theta.ctx, u64::MAX)?;
                tau_closed(&ch, &lower_e)?
            }
            None => theta.tau(&lower_e)?,
        };
        return Ok(X4Tau::Exact(lower.lift(ctx)?.scale(p4)));
    }
    let nu = make_nu0(ring)?.pow(twist);
    let target = ring.reduce(-((twist as i128) * ring.inv(r)? as i128)) % p;
    let mut acc = CycElem::zero(ctx);
    for (y, v) in &theta.values {
        if y.b % p != 0 || y.c % p != 0 || y.a % p != target || y.d % p != target {
            continue;
        }
        let w = nu.eval(ctx, y.det(ring))? * e.eval(ctx, ring.add(y.a, y.d));
        acc = acc + v.lift(ctx)?.mul_root(w);
    }
    Ok(X4Tau::Residual(acc.scale(p4)))
}

/// `sum_{X in G_l} nu(det X)^i theta(X) e(Tr X)` by direct summation.
pub fn tau_x4_brute(
    twist: u64,
    theta: &ThetaTable,
    ring: &RingParams,
    ctx: &Arc<Cyclo>,
    e: &AddChar,
    cap: u64,
) -> Result<CycElem> {
    check_x4(twist, theta, ring, e)?;
    let nu = make_nu0(ring)?.pow(twist);
    let mut fibres: HashMap<Mat2, RootSum> = HashMap::new();
    for x in Subgroup::new(SubgroupSpec::Full, ring).enumerate(cap)? {
        let y = x.reduce(&theta.ring);
        fibres
            .entry(y)
            .or_insert_with(|| RootSum::new(ctx))
            .add(nu.eval(ctx, x.det(ring))? * e.eval(ctx, x.trace(ring)));
    }
    let mut acc = CycElem::zero(ctx);
    for (y, s) in fibres {
        acc = acc + theta.value(&y)?.lift(ctx)? * s.to_elem();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_specs, Family};
    use crate::group::DEFAULT_ENUM_CAP;

    fn setup(p: u64, l: u32) -> (RingParams, Arc<Cyclo>) {
        let r = RingParams::new(p, l).unwrap();
        let c = Cyclo::for_ring(&r);
        (r, c)
    }

    #[test]
    fn delta_examples() {
        let r = RingParams::new(3, 2).unwrap();
        let d = delta_unit(OmegaFamily::X2 { eps: 2 }, &r).unwrap();
        assert_eq!(d.value, 4);
        assert!(d.is_unit);
        for (p, l) in [(3, 3), (3, 4), (3, 5), (5, 3), (7, 4)] {
            let r = RingParams::new(p, l).unwrap();
            for eps in (1..p).filter(|e| crate::residue::legendre(*e as i64, p) == -1) {
                assert!(delta_unit(OmegaFamily::X2 { eps }, &r).unwrap().is_unit);
            }
            assert_eq!(
                delta_unit(OmegaFamily::X3 { beta: 0 }, &r).unwrap().value,
                0
            );
        }
    }

    #[test]
    fn g_brute_examples() {
        let (r, c) = setup(3, 2);
        let e = AddChar::standard(&r);
        assert!(g_brute(&MultChar::trivial(&r), &e, &c, 100)
            .unwrap()
            .is_zero());
        // the quadratic character mod 9 factors through mod 3, so its sum vanishes
        let quad = MultChar::new(&r, 3);
        assert!(g_brute(&quad, &e, &c, 100).unwrap().is_zero());
        assert!(matches!(
            g_brute(&quad, &e, &c, 2),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn g_closed_matches_brute_small() {
        for (p, l) in [(3, 2), (3, 3), (5, 2)] {
            let (r, c) = setup(p, l);
            for mu in MultChar::all(&r) {
                for rr in 1..r.q() {
                    let e = AddChar::new(&r, rr).unwrap();
                    assert_eq!(
                        g_closed(&mu, &e, &c).unwrap(),
                        g_brute(&mu, &e, &c, DEFAULT_ENUM_CAP).unwrap(),
                        "p={p} l={l} c={} r={rr}",
                        mu.exponent()
                    );
                }
            }
        }
    }

    #[test]
    fn odoni_at_9() {
        let (r, c) = setup(3, 2);
        let (value, cases) = odoni_report(&r, &c, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(
            value,
            CycElem::from_root(&c, c.root(9, 1).unwrap()).scale(3)
        );
        assert_eq!(cases.len(), 2);
        assert!(cases.iter().any(|k| k.matches));
    }

    #[test]
    fn closed_tau_examples() {
        let (r, c) = setup(3, 2);
        let cap = DEFAULT_ENUM_CAP;
        let x2 = Character::new(
            CharSpec::X2 {
                alpha: 0,
                eps: 2,
                i: OmegaIndex::new(0, 0, 0),
            },
            &r,
            &c,
            cap,
        )
        .unwrap();
        assert!(tau_closed(&x2, &AddChar::new(&r, 3).unwrap())
            .unwrap()
            .is_zero());
        let x3 = Character::new(
            CharSpec::X3 {
                alpha: 0,
                beta: 0,
                i: (0, 0),
                j: OmegaIndex::new(0, 0, 0),
            },
            &r,
            &c,
            cap,
        )
        .unwrap();
        for rr in 1..9 {
            assert!(tau_closed(&x3, &AddChar::new(&r, rr).unwrap())
                .unwrap()
                .is_zero());
        }
        let x1 = Character::new(
            CharSpec::X1 {
                alpha: 0,
                u: 1,
                i: 0,
                j: 0,
            },
            &r,
            &c,
            cap,
        )
        .unwrap();
        let e = AddChar::standard(&r);
        assert!(tau_closed(&x1, &e).unwrap().is_zero());
        assert!(tau_oracle_subgroup(&x1, &e, cap).unwrap().is_zero());
    }

    #[test]
    fn closed_tau_matches_subgroup_oracle_at_9() {
        let (r, c) = setup(3, 2);
        let cap = DEFAULT_ENUM_CAP;
        for fam in [Family::X1, Family::X2, Family::X3] {
            for spec in enumerate_specs(fam, &r).into_iter().step_by(3) {
                let ch = Character::new(spec, &r, &c, cap).unwrap();
                for rr in [1, 2, 3, 4, 6] {
                    let e = AddChar::new(&r, rr).unwrap();
                    assert_eq!(
                        tau_closed(&ch, &e).unwrap(),
                        tau_oracle_subgroup(&ch, &e, cap).unwrap(),
                        "{spec:?} r={rr}"
                    );
                }
            }
        }
    }
}
