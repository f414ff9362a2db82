//! Characters: additive characters of `Z/p^l`, multiplicative characters of
//! its unit group, the linear characters `phi_A` of `K_n`, the characters of
//! the stabilizer subgroups that induce to the irreducible characters of each
//! family, induction and inner products.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycElem, Cyclo, Root, RootSum};
use crate::error::{Error, Result};
use crate::gauss::delta_unit;
use crate::group::{
    CosetDecomposer, Mat2, OmegaFamily, OmegaIndex, OmegaTable, Subgroup, SubgroupSpec,
};
use crate::residue::{legendre, RingParams};

/// `e(x) = zeta_{p^l}^{r x}`; `r = 1` is the fixed injective character `lambda`.
#[derive(Clone, Debug)]
pub struct AddChar {
    ring: RingParams,
    r: u64,
}

impl AddChar {
    pub fn new(ring: &RingParams, r: u64) -> Result<Self> {
        let r = r % ring.q();
        if r == 0 {
            return Err(Error::BadArgument(
                "additive character must be nontrivial".into(),
            ));
        }
        Ok(AddChar {
            ring: ring.clone(),
            r,
        })
    }

    /// `lambda`, with `lambda(1) = zeta_{p^l}`.
    pub fn standard(ring: &RingParams) -> Self {
        AddChar {
            ring: ring.clone(),
            r: 1,
        }
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn ring(&self) -> &RingParams {
        &self.ring
    }

    pub fn eval(&self, ctx: &Cyclo, x: u64) -> Root {
        let q = self.ring.q();
        let e = ((self.r as u128 * (x % q) as u128) % q as u128) as i64;
        ctx.root(q, e).expect("conductor contains p^l-th roots")
    }

    /// For `p | r`: the character of `Z/p^{l-1}` with `e'(1) = zeta_{p^{l-1}}^{r/p}`.
    pub fn descend(&self) -> Result<AddChar> {
        let p = self.ring.p();
        if self.r % p != 0 || self.ring.l() < 2 {
            return Err(Error::BadArgument(
                "additive character does not descend".into(),
            ));
        }
        let lower = RingParams::level(p, self.ring.l() - 1)?;
        AddChar::new(&lower, self.r / p)
    }
}

/// `chi(g) = zeta_M^c` for the canonical generator `g`, `M = p^{l-1}(p-1)`.
#[derive(Clone, Debug)]
pub struct MultChar {
    ring: RingParams,
    c: u64,
}

impl PartialEq for MultChar {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.ring.p() == other.ring.p() && self.ring.l() == other.ring.l()
    }
}

impl Eq for MultChar {}

impl MultChar {
    pub fn new(ring: &RingParams, c: u64) -> Self {
        MultChar {
            ring: ring.clone(),
            c: c % ring.unit_order(),
        }
    }

    pub fn trivial(ring: &RingParams) -> Self {
        MultChar::new(ring, 0)
    }

    /// Every character of the unit group, by exponent.
    pub fn all(ring: &RingParams) -> impl Iterator<Item = MultChar> + '_ {
        (0..ring.unit_order()).map(move |c| MultChar::new(ring, c))
    }

    pub fn exponent(&self) -> u64 {
        self.c
    }

    pub fn ring(&self) -> &RingParams {
        &self.ring
    }

    /// `chi(x) = zeta_M^{turn(x)}`.
    pub fn turn(&self, x: u64) -> Result<u64> {
        let m = self.ring.unit_order();
        let t = self.ring.discrete_log(x % self.ring.q())?;
        Ok(((self.c as u128 * t as u128) % m as u128) as u64)
    }

    pub fn eval(&self, ctx: &Cyclo, x: u64) -> Result<Root> {
        let t = self.turn(x)?;
        ctx.root(self.ring.unit_order(), t as i64)
    }

    pub fn mul(&self, other: &MultChar) -> MultChar {
        MultChar::new(&self.ring, self.c + other.c)
    }

    pub fn pow(&self, e: u64) -> MultChar {
        let m = self.ring.unit_order();
        MultChar::new(
            &self.ring,
            ((self.c as u128 * e as u128) % m as u128) as u64,
        )
    }

    pub fn is_trivial(&self) -> bool {
        self.c == 0
    }

    /// Whether the character is trivial on `1 + p^k Z`.
    pub fn is_trivial_on(&self, k: u32) -> bool {
        if k >= self.ring.l() {
            return true;
        }
        let x = self.ring.reduce(1 + self.ring.pow_p(k) as i128);
        self.turn(x).expect("1 + p^k is a unit") == 0
    }

    /// Does not factor through `(Z/p^{l-1})^x`.
    pub fn is_primitive(&self) -> bool {
        if self.ring.l() == 1 {
            return !self.is_trivial();
        }
        !self.is_trivial_on(self.ring.l() - 1)
    }

    /// The character of `(Z/p^k)^x` this one factors through.
    pub fn descend(&self, k: u32) -> Result<MultChar> {
        let lower = RingParams::level(self.ring.p(), k)?;
        if k > self.ring.l() || (k >= 1 && !self.is_trivial_on(k)) {
            return Err(Error::BadArgument(format!(
                "character does not factor through level {k}"
            )));
        }
        let big = self.ring.unit_order();
        let small = lower.unit_order();
        let t = self.turn(lower.generator())?;
        let scale = big / small;
        if t % scale != 0 {
            return Err(Error::ConstructionFailed(
                "descended value has the wrong order".into(),
            ));
        }
        Ok(MultChar::new(&lower, t / scale))
    }

    /// Smallest exponent `c` with `chi(x) = zeta_den^num`; with `faithful`,
    /// additionally `gcd(c, M) = 1`.
    pub fn solve(
        ring: &RingParams,
        x: u64,
        num: u64,
        den: u64,
        faithful: bool,
    ) -> Result<MultChar> {
        let m = ring.unit_order() as u128;
        let t = ring.discrete_log(x % ring.q())? as u128;
        let den = den as u128;
        let target = (num as u128 % den) * m;
        (0..m as u64)
            .find(|&c| {
                (c as u128 * t % m) * den == target && (!faithful || (c as u128).gcd(&m) == 1)
            })
            .map(|c| MultChar::new(ring, c))
            .ok_or_else(|| {
                Error::ConstructionFailed("no multiplicative character with that value".into())
            })
    }
}

/// `mu_alpha`: `mu(1 + p^n) = lambda(p^n alpha)`, minimal exponent.
pub fn make_mu_alpha(alpha: u64, ring: &RingParams) -> Result<MultChar> {
    let x = 1 + ring.pow_p(ring.n());
    MultChar::solve(
        ring,
        x,
        ring.mul(ring.pow_p(ring.n()), alpha),
        ring.q(),
        false,
    )
}

/// `lambda'`: `lambda'(1 + p^n) = lambda(p^n u)`. The smallest faithful
/// solution is taken so that the `psi_ij` built from it are distinct.
pub fn make_lambda_prime(u: u64, ring: &RingParams) -> Result<MultChar> {
    let x = 1 + ring.pow_p(ring.n());
    MultChar::solve(ring, x, ring.mul(ring.pow_p(ring.n()), u), ring.q(), true)
}

/// `nu_0`: faithful with `nu_0(1 + p^{l-1}) = zeta_p`.
pub fn make_nu0(ring: &RingParams) -> Result<MultChar> {
    let x = 1 + ring.pow_p(ring.l() - 1);
    MultChar::solve(ring, x, 1, ring.p(), true)
}

/// `phi_A(X) = lambda(Tr(A(X - I)))` for `X` in `K_n`.
pub fn eval_phi_a(a: &Mat2, x: &Mat2, ring: &RingParams, ctx: &Cyclo) -> Result<Root> {
    if !x.is_congruent_identity(ring.n(), ring) {
        return Err(Error::NotInSubgroup(format!("{x:?} is not in K_n")));
    }
    Ok(AddChar::standard(ring).eval(ctx, trace_pairing(a, x, ring)))
}

/// `Tr(A(X - I))`
fn trace_pairing(a: &Mat2, x: &Mat2, ring: &RingParams) -> u64 {
    let t = a.a as u128 * ring.sub(x.a, 1) as u128
        + a.b as u128 * x.c as u128
        + a.c as u128 * x.b as u128
        + a.d as u128 * ring.sub(x.d, 1) as u128;
    (t % ring.q() as u128) as u64
}

/// The three families of characters not trivial on `K_{l-1}` up to twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    X1,
    X2,
    X3,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::X1 => "X1",
            Family::X2 => "X2",
            Family::X3 => "X3",
        }
    }
}

/// Parameters of one irreducible character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CharSpec {
    X1 {
        alpha: u64,
        u: u64,
        i: u64,
        j: u64,
    },
    X2 {
        alpha: u64,
        eps: u64,
        i: OmegaIndex,
    },
    X3 {
        alpha: u64,
        beta: u64,
        i: (u64, u64),
        j: OmegaIndex,
    },
}

fn omega_bounds(family: OmegaFamily, ring: &RingParams) -> [u64; 3] {
    let p = ring.p();
    match family {
        OmegaFamily::X2 { .. } => {
            let b = ring.pow_p(ring.n() - 1);
            [b, b, p * p - 1]
        }
        OmegaFamily::X3 { .. } => {
            let b = ring.pow_p(ring.m() - 1);
            [b * (p - 1), b, p]
        }
    }
}

fn omega_indices(bounds: [u64; 3]) -> impl Iterator<Item = OmegaIndex> {
    (0..bounds[0]).flat_map(move |a| {
        (0..bounds[1]).flat_map(move |b| (0..bounds[2]).map(move |c| OmegaIndex::new(a, b, c)))
    })
}

impl CharSpec {
    pub fn family(&self) -> Family {
        match self {
            CharSpec::X1 { .. } => Family::X1,
            CharSpec::X2 { .. } => Family::X2,
            CharSpec::X3 { .. } => Family::X3,
        }
    }

    pub fn alpha(&self) -> u64 {
        match *self {
            CharSpec::X1 { alpha, .. }
            | CharSpec::X2 { alpha, .. }
            | CharSpec::X3 { alpha, .. } => alpha,
        }
    }

    /// Same character with a different twist `alpha`.
    pub fn with_alpha(&self, alpha: u64) -> CharSpec {
        let mut s = *self;
        match &mut s {
            CharSpec::X1 { alpha: a, .. }
            | CharSpec::X2 { alpha: a, .. }
            | CharSpec::X3 { alpha: a, .. } => *a = alpha,
        }
        s
    }

    pub fn validate(&self, ring: &RingParams) -> Result<()> {
        let p = ring.p();
        let pm = ring.pow_p(ring.m());
        let bad = |msg: String| Err(Error::BadArgument(msg));
        if self.alpha() >= pm {
            return bad(format!("alpha must be below p^m = {pm}"));
        }
        match *self {
            CharSpec::X1 { u, i, j, .. } => {
                if u == 0 || u > (pm - 1) / 2 || u % p == 0 {
                    return bad(format!(
                        "u must satisfy 1 <= u <= {} and p !| u",
                        (pm - 1) / 2
                    ));
                }
                let top = ring.pow_p(ring.n() - 1) * (p - 1);
                if i >= top || j >= top {
                    return bad(format!("i, j must be below {top}"));
                }
            }
            CharSpec::X2 { eps, i, .. } => {
                if eps >= pm || legendre(eps as i64, p) != -1 {
                    return bad(format!("eps must be a nonsquare mod p below {pm}"));
                }
                let b = omega_bounds(OmegaFamily::X2 { eps }, ring);
                if i.k1 >= b[0] || i.k2 >= b[1] || i.k3 >= b[2] {
                    return bad(format!(
                        "i must lie in [0,{})x[0,{})x[0,{})",
                        b[0], b[1], b[2]
                    ));
                }
            }
            CharSpec::X3 { beta, i, j, .. } => {
                if beta >= ring.pow_p(ring.m() - 1) {
                    return bad(format!(
                        "beta must be below p^(m-1) = {}",
                        ring.pow_p(ring.m() - 1)
                    ));
                }
                let top = ring.pow_p(ring.n() - ring.m());
                if i.0 >= top || i.1 >= top {
                    return bad(format!("i1, i2 must be below {top}"));
                }
                let b = omega_bounds(OmegaFamily::X3 { beta }, ring);
                if j.k1 >= b[0] || j.k2 >= b[1] || j.k3 >= b[2] {
                    return bad(format!(
                        "j must lie in [0,{})x[0,{})x[0,{})",
                        b[0], b[1], b[2]
                    ));
                }
            }
        }
        Ok(())
    }

    /// `A`, the matrix whose `phi_A` the character lies over.
    pub fn a_matrix(&self, ring: &RingParams) -> Mat2 {
        let alpha = self.alpha();
        match *self {
            CharSpec::X1 { u, .. } => Mat2::diag(ring.add(alpha, u), alpha),
            CharSpec::X2 { eps, .. } => Mat2::new(alpha, eps, 1, alpha),
            CharSpec::X3 { beta, .. } => {
                Mat2::new(alpha, ring.reduce((ring.p() * beta) as i128), 1, alpha)
            }
        }
    }

    /// `A_0`, the untwisted representative.
    pub fn a0_matrix(&self, ring: &RingParams) -> Mat2 {
        self.with_alpha(0).a_matrix(ring)
    }

    /// Key of the orbit `G(A)` this character belongs to.
    pub fn orbit(&self) -> (Family, u64, u64) {
        match *self {
            CharSpec::X1 { alpha, u, .. } => (Family::X1, alpha, u),
            CharSpec::X2 { alpha, eps, .. } => (Family::X2, alpha, eps),
            CharSpec::X3 { alpha, beta, .. } => (Family::X3, alpha, beta),
        }
    }

    /// `chi(I)`
    pub fn degree(&self, ring: &RingParams) -> u64 {
        let p = ring.p();
        let l = ring.l();
        match self.family() {
            Family::X1 => ring.pow_p(l - 1) * (p + 1),
            Family::X2 => ring.pow_p(l - 1) * (p - 1),
            Family::X3 => ring.pow_p(l - 2) * (p * p - 1),
        }
    }
}

/// Every parameter tuple of a family, in lexicographic order.
pub fn enumerate_specs(family: Family, ring: &RingParams) -> Vec<CharSpec> {
    let p = ring.p();
    let pm = ring.pow_p(ring.m());
    let mut out = Vec::new();
    for alpha in 0..pm {
        match family {
            Family::X1 => {
                let top = ring.pow_p(ring.n() - 1) * (p - 1);
                for u in (1..=(pm - 1) / 2).filter(|u| u % p != 0) {
                    for i in 0..top {
                        for j in 0..top {
                            out.push(CharSpec::X1 { alpha, u, i, j });
                        }
                    }
                }
            }
            Family::X2 => {
                for eps in (1..pm).filter(|e| legendre(*e as i64, p) == -1) {
                    for i in omega_indices(omega_bounds(OmegaFamily::X2 { eps }, ring)) {
                        out.push(CharSpec::X2 { alpha, eps, i });
                    }
                }
            }
            Family::X3 => {
                let top = ring.pow_p(ring.n() - ring.m());
                for beta in 0..ring.pow_p(ring.m() - 1) {
                    for i1 in 0..top {
                        for i2 in 0..top {
                            for j in omega_indices(omega_bounds(OmegaFamily::X3 { beta }, ring)) {
                                out.push(CharSpec::X3 {
                                    alpha,
                                    beta,
                                    i: (i1, i2),
                                    j,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Sizes of the three families: `p^{2l-3}(p-1)^3 / 2`,
/// `p^{2l-3}(p-1)(p^2-1) / 2` and `p^{2l-2}(p-1)`.
pub fn family_count_formula(family: Family, ring: &RingParams) -> u64 {
    let p = ring.p();
    let l = ring.l();
    match family {
        Family::X1 => ring.pow_p(2 * l - 3) * (p - 1).pow(3) / 2,
        Family::X2 => ring.pow_p(2 * l - 3) * (p - 1) * (p * p - 1) / 2,
        Family::X3 => ring.pow_p(2 * l - 2) * (p - 1),
    }
}

/// Left coset representatives of `sub` in `group`, for evaluating induced
/// characters as `sum_t f'(t^{-1} x t)`.
pub struct Induction {
    group: Subgroup,
    sub: Subgroup,
    reps: Vec<Mat2>,
    inverses: Vec<Mat2>,
}

impl Induction {
    pub fn new(group: Subgroup, sub: Subgroup, cap: u64) -> Result<Self> {
        let ring = group.ring().clone();
        let reps = crate::group::left_coset_reps(&group, &sub, cap)?;
        let inverses = reps
            .iter()
            .map(|t| t.inv(&ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(Induction {
            group,
            sub,
            reps,
            inverses,
        })
    }

    pub fn index(&self) -> u64 {
        self.reps.len() as u64
    }

    pub fn group(&self) -> &Subgroup {
        &self.group
    }

    pub fn sub(&self) -> &Subgroup {
        &self.sub
    }

    fn conjugates<'a>(&'a self, x: &'a Mat2) -> impl Iterator<Item = Mat2> + 'a {
        let ring = self.group.ring();
        self.reps
            .iter()
            .zip(&self.inverses)
            .map(move |(t, ti)| ti.mul(x, ring).mul(t, ring))
            .filter(|y| self.sub.contains(y))
    }

    /// Adds `times * ind f(x)` to `acc` for a root-valued `f`.
    pub fn accumulate<F>(&self, f: &F, x: &Mat2, times: i64, acc: &mut RootSum) -> Result<()>
    where
        F: Fn(&Mat2) -> Result<Root>,
    {
        for y in self.conjugates(x) {
            acc.add_times(f(&y)?, times);
        }
        Ok(())
    }

    pub fn value_linear<F>(&self, f: &F, x: &Mat2, ctx: &Arc<Cyclo>) -> Result<CycElem>
    where
        F: Fn(&Mat2) -> Result<Root>,
    {
        let mut acc = RootSum::new(ctx);
        self.accumulate(f, x, 1, &mut acc)?;
        Ok(acc.to_elem())
    }

    pub fn value<F>(&self, f: &F, x: &Mat2, ctx: &Arc<Cyclo>) -> Result<CycElem>
    where
        F: Fn(&Mat2) -> Result<CycElem>,
    {
        let mut acc = CycElem::zero(ctx);
        for y in self.conjugates(x) {
            acc = acc + f(&y)?;
        }
        Ok(acc)
    }
}

/// `(1/|H|) sum_{g in G} f'(g x g^{-1})`, the definition of the induced
/// character, by enumerating `G`.
pub fn induced_value_brute<F>(
    group: &Subgroup,
    sub: &Subgroup,
    f: &F,
    x: &Mat2,
    ctx: &Arc<Cyclo>,
    cap: u64,
) -> Result<CycElem>
where
    F: Fn(&Mat2) -> Result<CycElem>,
{
    let ring = group.ring();
    let mut acc = CycElem::zero(ctx);
    for g in group.enumerate(cap)? {
        let y = g.mul(x, ring).mul(&g.inv(ring)?, ring);
        if sub.contains(&y) {
            acc = acc + f(&y)?;
        }
    }
    acc.div_exact(sub.order() as i128)
}

/// `<f, g>_D = (1/|D|) sum_{x in D} f(x) conj(g(x))`; the result must be a
/// cyclotomic integer (it is for characters).
pub fn inner_product<F, G>(
    f: &F,
    g: &G,
    domain: &Subgroup,
    ctx: &Arc<Cyclo>,
    cap: u64,
) -> Result<CycElem>
where
    F: Fn(&Mat2) -> Result<CycElem>,
    G: Fn(&Mat2) -> Result<CycElem>,
{
    let mut acc = CycElem::zero(ctx);
    for x in domain.enumerate(cap)? {
        acc = acc + f(&x)? * g(&x)?.conj();
    }
    acc.div_exact(domain.order() as i128)
}

/// Inner product of two root-valued functions, accumulated without
/// multiplying cyclotomic elements.
pub fn inner_product_linear<F, G>(
    f: &F,
    g: &G,
    domain: &Subgroup,
    ctx: &Arc<Cyclo>,
    cap: u64,
) -> Result<CycElem>
where
    F: Fn(&Mat2) -> Result<Root>,
    G: Fn(&Mat2) -> Result<Root>,
{
    let mut acc = RootSum::new(ctx);
    for x in domain.enumerate(cap)? {
        acc.add(f(&x)? * g(&x)?.inv());
    }
    acc.to_elem().div_exact(domain.order() as i128)
}

enum Kind {
    X1 {
        lambda_prime: MultChar,
        exp_a: u64,
        exp_d: u64,
    },
    /// Decomposition against `K_m` (even `l`), `K_{m+1}` (odd `l`, on `L`)
    /// or `N` (third family); `rep_values[k] = psi(s^k)`.
    Omega {
        dec: CosetDecomposer,
        rep_values: Vec<Root>,
    },
}

struct OddParts {
    from_n: Induction,
    from_l: Induction,
}

/// A constructed character: the linear (or, for the second family with odd
/// `l`, virtual) character `psi` of the stabilizer `H`, and `mu_alpha`; the
/// irreducible character is `(mu_alpha o det) ind_H^G psi`.
pub struct Character {
    spec: CharSpec,
    ring: RingParams,
    ctx: Arc<Cyclo>,
    mu: MultChar,
    a0: Mat2,
    stab: Subgroup,
    kind: Kind,
    delta: Option<u64>,
    sigmas: Option<(u64, u64)>,
    odd: OnceLock<OddParts>,
    cap: u64,
}

impl std::fmt::Debug for Character {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Character({:?} at p={}, l={})",
            self.spec,
            self.ring.p(),
            self.ring.l()
        )
    }
}

impl Character {
    pub fn new(spec: CharSpec, ring: &RingParams, ctx: &Arc<Cyclo>, cap: u64) -> Result<Self> {
        spec.validate(ring)?;
        let p = ring.p();
        let (l, m, n) = (ring.l(), ring.m(), ring.n());
        let mu = make_mu_alpha(spec.alpha(), ring)?;
        let a0 = spec.a0_matrix(ring);
        let root = |k: u64, a: u128| ctx.root(k, (a % k as u128) as i64);
        let mut delta = None;
        let mut sigmas = None;
        let (stab, kind) = match spec {
            CharSpec::X1 { u, i, j, .. } => {
                let pm = ring.pow_p(m);
                (
                    Subgroup::new(SubgroupSpec::X1T0, ring),
                    Kind::X1 {
                        lambda_prime: make_lambda_prime(u, ring)?,
                        exp_a: 1 + pm * i,
                        exp_d: pm * j,
                    },
                )
            }
            CharSpec::X2 { eps, i, .. } => {
                let table = OmegaTable::new(OmegaFamily::X2 { eps }, ring)?;
                let d = delta_unit(OmegaFamily::X2 { eps }, ring)?.value;
                delta = Some(d);
                let g1 = if l % 2 == 0 {
                    root(ring.pow_p(m - 1), i.k1 as u128)?
                } else {
                    root(ring.pow_p(m), i.k1 as u128)?
                };
                let g2 = root(
                    ring.pow_p(l - 1),
                    d as u128 + ring.pow_p(m) as u128 * i.k2 as u128,
                )?;
                let g3 = root(p * p - 1, i.k3 as u128)?;
                let rep_values = rep_values(&table, [g1, g2, g3]);
                let key = if l % 2 == 0 { m } else { m + 1 };
                let dec = CosetDecomposer::new(
                    table,
                    Subgroup::new(SubgroupSpec::K(key), ring),
                    key,
                    None,
                );
                (
                    Subgroup::new(SubgroupSpec::X2T { eps }, ring),
                    Kind::Omega { dec, rep_values },
                )
            }
            CharSpec::X3 { beta, i, j, .. } => {
                let table = OmegaTable::new(OmegaFamily::X3 { beta }, ring)?;
                let d = delta_unit(OmegaFamily::X3 { beta }, ring)?.value;
                delta = Some(d);
                let (s1, s2) = table.sigmas()?;
                sigmas = Some((s1, s2));
                let a = i.0 as u128 + i.1 as u128 + ring.pow_p(n - m) as u128 * j.k1 as u128;
                let b = d as u128 + ring.pow_p(n - 1) as u128 * j.k2 as u128;
                let g1 = root(ring.pow_p(n - 1) * (p - 1), a)?;
                let g2 = root(ring.pow_p(l - 2), b)?;
                let g3 = root(ring.pow_p(n) * (p - 1), a * s1 as u128)?
                    * root(ring.pow_p(l - 1), b * s2 as u128)?
                    * root(p, j.k3 as u128)?;
                let rep_values = rep_values(&table, [g1, g2, g3]);
                let dec = CosetDecomposer::new(
                    table,
                    Subgroup::new(SubgroupSpec::X3N { beta }, ring),
                    n,
                    None,
                );
                (
                    Subgroup::new(SubgroupSpec::X3T0 { beta }, ring),
                    Kind::Omega { dec, rep_values },
                )
            }
        };
        Ok(Character {
            spec,
            ring: ring.clone(),
            ctx: ctx.clone(),
            mu,
            a0,
            stab,
            kind,
            delta,
            sigmas,
            odd: OnceLock::new(),
            cap,
        })
    }

    pub fn spec(&self) -> &CharSpec {
        &self.spec
    }

    pub fn ring(&self) -> &RingParams {
        &self.ring
    }

    pub fn ctx(&self) -> &Arc<Cyclo> {
        &self.ctx
    }

    pub fn mu(&self) -> &MultChar {
        &self.mu
    }

    pub fn lambda_prime(&self) -> Option<&MultChar> {
        match &self.kind {
            Kind::X1 { lambda_prime, .. } => Some(lambda_prime),
            Kind::Omega { .. } => None,
        }
    }

    pub fn delta(&self) -> Option<u64> {
        self.delta
    }

    pub fn sigmas(&self) -> Option<(u64, u64)> {
        self.sigmas
    }

    /// The Omega table of the second and third families.
    pub fn omega(&self) -> Option<&OmegaTable> {
        match &self.kind {
            Kind::Omega { dec, .. } => Some(dec.table()),
            Kind::X1 { .. } => None,
        }
    }

    /// `psi(s^k)` (for odd `l` in the second family: `phi_i(s^k)`).
    pub fn rep_value(&self, k: OmegaIndex) -> Option<Root> {
        match &self.kind {
            Kind::Omega { dec, rep_values } => dec.table().position(k).map(|i| rep_values[i]),
            Kind::X1 { .. } => None,
        }
    }

    /// The subgroup `psi` lives on: `T_0`, `T` or `T_0` by family.
    pub fn stabilizer(&self) -> &Subgroup {
        &self.stab
    }

    /// Whether `psi` is a virtual combination of induced characters
    /// (second family, odd `l`).
    pub fn is_virtual(&self) -> bool {
        matches!(self.spec, CharSpec::X2 { .. }) && self.ring.l() % 2 == 1
    }

    pub fn degree(&self) -> u64 {
        self.spec.degree(&self.ring)
    }

    pub fn a0(&self) -> Mat2 {
        self.a0
    }

    /// `phi_{A_0}` on `K_n`.
    pub fn phi_a0(&self, x: &Mat2) -> Result<Root> {
        eval_phi_a(&self.a0, x, &self.ring, &self.ctx)
    }

    /// `mu_alpha(det x)`
    pub fn mu_det(&self, x: &Mat2) -> Result<Root> {
        self.mu.eval(&self.ctx, x.det(&self.ring))
    }

    /// The linear character on the stabilizer (on `L` for the virtual case).
    pub fn linear(&self, x: &Mat2) -> Result<Root> {
        match &self.kind {
            Kind::X1 {
                lambda_prime,
                exp_a,
                exp_d,
            } => {
                if !self.stab.contains(x) {
                    return Err(Error::NotInSubgroup(format!("{x:?} is not in T_0")));
                }
                Ok(lambda_prime.eval(&self.ctx, x.a)?.pow(*exp_a as i64)
                    * lambda_prime.eval(&self.ctx, x.d)?.pow(*exp_d as i64))
            }
            Kind::Omega { dec, rep_values } => {
                if !dec_domain_contains(self, x) {
                    return Err(Error::NotInSubgroup(format!(
                        "{x:?} is not in the domain of {:?}",
                        self.spec
                    )));
                }
                let (k, idx) = dec.decompose(x)?;
                let base = match self.spec {
                    CharSpec::X3 { beta, i, .. } => self.phi_n_x3(&k, beta, i)?,
                    _ => self.phi_a0(&k)?,
                };
                Ok(base * rep_values[idx])
            }
        }
    }

    /// `phi_i` on `N` for the third family.
    fn phi_n_x3(&self, x: &Mat2, beta: u64, i: (u64, u64)) -> Result<Root> {
        let ring = &self.ring;
        let (m, n) = (ring.m(), ring.n());
        let pm = ring.pow_p(m);
        let pn = ring.pow_p(n);
        let a = ring.sub(x.a, 1) / pm;
        let d = ring.sub(x.d, 1) / pm;
        let c = x.c / pm;
        let b = x.b / pn;
        let e1 = ring.mul(
            ring.pow_p(2 * m),
            ring.add(ring.mul(i.0, a), ring.mul(i.1, d)),
        );
        let e2 = ring.add(
            ring.mul(ring.mul(ring.pow_p(m + 1), beta), c),
            ring.mul(pn, b),
        );
        let lambda = AddChar::standard(ring);
        Ok(lambda.eval(&self.ctx, ring.add(e1, e2)))
    }

    fn odd_parts(&self) -> Result<&OddParts> {
        if let Some(parts) = self.odd.get() {
            return Ok(parts);
        }
        let CharSpec::X2 { eps, .. } = self.spec else {
            return Err(Error::UnsupportedFamily(
                "virtual characters are second-family only".into(),
            ));
        };
        let m = self.ring.m();
        let t = Subgroup::new(SubgroupSpec::X2T { eps }, &self.ring);
        let from_n = Induction::new(
            t.clone(),
            Subgroup::new(SubgroupSpec::X2N { eps, j: m + 1 }, &self.ring),
            self.cap,
        )?;
        let from_l = Induction::new(
            t,
            Subgroup::new(SubgroupSpec::X2L { eps }, &self.ring),
            self.cap,
        )?;
        Ok(self.odd.get_or_init(|| OddParts { from_n, from_l }))
    }

    /// `[T : N_{m+1}]` and `[T : L]` for the virtual case.
    pub fn odd_indices(&self) -> Result<(u64, u64)> {
        let parts = self.odd_parts()?;
        Ok((parts.from_n.index(), parts.from_l.index()))
    }

    /// `psi(x)` for `x` in the stabilizer, as a cyclotomic integer. For the
    /// virtual case this is `(1/p) ind_{N_{m+1}} phi'_i - ind_L phi_i`.
    pub fn psi(&self, x: &Mat2) -> Result<CycElem> {
        if !self.is_virtual() {
            return Ok(CycElem::from_root(&self.ctx, self.linear(x)?));
        }
        if !self.stab.contains(x) {
            return Err(Error::NotInSubgroup(format!("{x:?} is not in T")));
        }
        let parts = self.odd_parts()?;
        let p = self.ring.p() as i64;
        let f = |y: &Mat2| self.linear(y);
        let mut acc = RootSum::new(&self.ctx);
        parts.from_n.accumulate(&f, x, 1, &mut acc)?;
        parts.from_l.accumulate(&f, x, -p, &mut acc)?;
        acc.to_elem().div_exact(p as i128)
    }

    /// `(mu_alpha o det) psi`, the character of the stabilizer whose
    /// induction is the irreducible character.
    pub fn twisted(&self, x: &Mat2) -> Result<CycElem> {
        Ok(self.psi(x)?.mul_root(self.mu_det(x)?))
    }

    /// The full character on `G_l`, through induction from the stabilizer.
    pub fn full(&self) -> Result<FullCharacter<'_>> {
        let g = Subgroup::new(SubgroupSpec::Full, &self.ring);
        Ok(FullCharacter {
            ch: self,
            ind: Induction::new(g, self.stab.clone(), self.cap)?,
        })
    }
}

fn dec_domain_contains(ch: &Character, x: &Mat2) -> bool {
    match ch.spec {
        CharSpec::X2 { eps, .. } if ch.ring.l() % 2 == 1 => {
            Subgroup::new(SubgroupSpec::X2L { eps }, &ch.ring).contains(x)
        }
        _ => ch.stab.contains(x),
    }
}

fn rep_values(table: &OmegaTable, gens: [Root; 3]) -> Vec<Root> {
    table
        .reps()
        .iter()
        .map(|(k, _)| {
            gens[0].pow(k.k1 as i64) * gens[1].pow(k.k2 as i64) * gens[2].pow(k.k3 as i64)
        })
        .collect()
}

/// `chi = (mu_alpha o det) ind_H^G psi` on all of `G_l`.
pub struct FullCharacter<'a> {
    ch: &'a Character,
    ind: Induction,
}

impl FullCharacter<'_> {
    pub fn character(&self) -> &Character {
        self.ch
    }

    pub fn value(&self, x: &Mat2) -> Result<CycElem> {
        let ch = self.ch;
        let v = if ch.is_virtual() {
            self.ind.value(&|y: &Mat2| ch.psi(y), x, &ch.ctx)?
        } else {
            self.ind
                .value_linear(&|y: &Mat2| ch.linear(y), x, &ch.ctx)?
        };
        Ok(v.mul_root(ch.mu_det(x)?))
    }
}

/// Number of pairwise distinct value vectors of the twisted stabilizer
/// characters of `specs` (which must share a stabilizer) on that stabilizer.
pub fn count_distinct(
    specs: &[CharSpec],
    ring: &RingParams,
    ctx: &Arc<Cyclo>,
    cap: u64,
) -> Result<usize> {
    let mut seen = HashSet::new();
    let mut domain: Option<Vec<Mat2>> = None;
    for spec in specs {
        let ch = Character::new(*spec, ring, ctx, cap)?;
        let elems = domain.get_or_insert_with(|| ch.stabilizer().iter().collect());
        if elems.len() as u64 > cap {
            return Err(Error::TooLarge {
                size: elems.len() as u64,
                cap,
            });
        }
        let values = elems
            .iter()
            .map(|x| ch.twisted(x))
            .collect::<Result<Vec<_>>>()?;
        let key: Vec<Vec<i128>> = values.iter().map(|v| v.coeffs().to_vec()).collect();
        seen.insert(key);
    }
    Ok(seen.len())
}
