//! `GL_2(Z/p^l Z)`, its congruence subgroups and the stabilizer subgroups used
//! to build the irreducible characters, together with the coset
//! representatives `s^k = s_1^{k_1} s_2^{k_2} s_3^{k_3}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{legendre, prime_factors, RingParams};

/// Default upper bound on the number of elements any enumeration may visit.
pub const DEFAULT_ENUM_CAP: u64 = 2_000_000;

/// A 2x2 matrix `(a b; c d)` over `Z/p^l`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn scalar(x: u64) -> Self {
        Mat2::new(x, 0, 0, x)
    }

    pub fn diag(a: u64, d: u64) -> Self {
        Mat2::new(a, 0, 0, d)
    }

    pub fn reduce(&self, ring: &RingParams) -> Self {
        let q = ring.q();
        Mat2::new(self.a % q, self.b % q, self.c % q, self.d % q)
    }

    pub fn mul(&self, o: &Mat2, ring: &RingParams) -> Mat2 {
        let q = ring.q() as u128;
        let f = |x: u64, y: u64, z: u64, w: u64| {
            ((x as u128 * y as u128 + z as u128 * w as u128) % q) as u64
        };
        Mat2 {
            a: f(self.a, o.a, self.b, o.c),
            b: f(self.a, o.b, self.b, o.d),
            c: f(self.c, o.a, self.d, o.c),
            d: f(self.c, o.b, self.d, o.d),
        }
    }

    pub fn det(&self, ring: &RingParams) -> u64 {
        ring.sub(ring.mul(self.a, self.d), ring.mul(self.b, self.c))
    }

    pub fn trace(&self, ring: &RingParams) -> u64 {
        ring.add(self.a, self.d)
    }

    pub fn is_invertible(&self, ring: &RingParams) -> bool {
        ring.is_unit(self.det(ring))
    }

    pub fn inv(&self, ring: &RingParams) -> Result<Mat2> {
        let di = ring.inv(self.det(ring))?;
        Ok(Mat2 {
            a: ring.mul(self.d, di),
            b: ring.mul(ring.neg(self.b), di),
            c: ring.mul(ring.neg(self.c), di),
            d: ring.mul(self.a, di),
        })
    }

    pub fn pow(&self, mut e: u64, ring: &RingParams) -> Mat2 {
        let mut acc = Mat2::IDENTITY;
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ring);
            }
            base = base.mul(&base, ring);
            e >>= 1;
        }
        acc
    }

    /// `X = I (mod p^e)`
    pub fn is_congruent_identity(&self, e: u32, ring: &RingParams) -> bool {
        let pe = ring.pow_p(e);
        self.a % pe == 1 % pe && self.d % pe == 1 % pe && self.b % pe == 0 && self.c % pe == 0
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    /// Entries reduced modulo `p^e`.
    pub fn mod_p_power(&self, e: u32, ring: &RingParams) -> Mat2 {
        let pe = ring.pow_p(e);
        Mat2::new(self.a % pe, self.b % pe, self.c % pe, self.d % pe)
    }

    /// Multiplicative order, found by repeated multiplication.
    pub fn order(&self, ring: &RingParams) -> u64 {
        let mut x = *self;
        let mut k = 1;
        while x != Mat2::IDENTITY {
            x = x.mul(self, ring);
            k += 1;
        }
        k
    }
}

/// `|GL_2(Z/p^l)| = p^{4(l-1)} (p^2-1)(p^2-p)`.
pub fn group_order(ring: &RingParams) -> u64 {
    let p = ring.p();
    ring.pow_p(4 * (ring.l() - 1)) * (p * p - 1) * (p * p - p)
}

/// Relation imposed on the `d` entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DiagRel {
    /// `d = 1 (mod p^k)`
    One(u32),
    /// `d = a (mod p^k)`
    SameAsA(u32),
}

/// Linear congruence shape shared by every subgroup used here:
/// `a = 1 (mod p^a_one)`, the `d` relation, `c = 0 (mod p^c_zero)` and
/// `b = b_coef * c (mod p^b_mod)`, intersected with the invertible matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Shape {
    a_one: u32,
    d: DiagRel,
    c_zero: u32,
    b_coef: u64,
    b_mod: u32,
}

/// Subgroups of `GL_2(Z/p^l)` referenced by the character constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupSpec {
    Full,
    /// `K_i = I + p^i M_2`
    K(u32),
    Center,
    /// Diagonal units (the `S` of the first family).
    X1S,
    /// `(a, p^m b; p^m c, d)`
    X1T,
    /// `(a, p^n b; p^m c, d)`
    X1T0,
    /// `(1 + p^n a, p^n b; p^m c, 1 + p^n d)`
    X1N,
    /// `(a, eps b; b, a)`
    X2S {
        eps: u64,
    },
    /// `K_m S = (a, eps b + p^m c; b, a + p^m d)`
    X2T {
        eps: u64,
    },
    /// `N_j = K_j Z (K_1 cap S) = (a, p eps b + p^j c; p b, a + p^j d)`
    X2N {
        eps: u64,
        j: u32,
    },
    /// `L = K_{m+1} S`
    X2L {
        eps: u64,
    },
    /// `(a, p beta b; b, a)`
    X3S {
        beta: u64,
    },
    /// `K_m S`
    X3T {
        beta: u64,
    },
    /// `N S = (a, p beta b + p^n c; b, a + p^m d)`
    X3T0 {
        beta: u64,
    },
    /// `(1 + p^m a, p^n b; p^m c, 1 + p^m d)`
    X3N {
        beta: u64,
    },
}

impl SubgroupSpec {
    fn shape(&self, ring: &RingParams) -> Shape {
        let (l, m, n, p) = (ring.l(), ring.m(), ring.n(), ring.p());
        let free = |d: DiagRel, c_zero, b_coef, b_mod| Shape {
            a_one: 0,
            d,
            c_zero,
            b_coef,
            b_mod,
        };
        match *self {
            SubgroupSpec::Full => free(DiagRel::One(0), 0, 0, 0),
            SubgroupSpec::K(i) => Shape {
                a_one: i,
                d: DiagRel::One(i),
                c_zero: i,
                b_coef: 0,
                b_mod: i,
            },
            SubgroupSpec::Center => free(DiagRel::SameAsA(l), l, 0, l),
            SubgroupSpec::X1S => free(DiagRel::One(0), l, 0, l),
            SubgroupSpec::X1T => free(DiagRel::One(0), m, 0, m),
            SubgroupSpec::X1T0 => free(DiagRel::One(0), m, 0, n),
            SubgroupSpec::X1N => Shape {
                a_one: n,
                d: DiagRel::One(n),
                c_zero: m,
                b_coef: 0,
                b_mod: n,
            },
            SubgroupSpec::X2S { eps } => free(DiagRel::SameAsA(l), 0, eps, l),
            SubgroupSpec::X2T { eps } => free(DiagRel::SameAsA(m), 0, eps, m),
            SubgroupSpec::X2N { eps, j } => free(DiagRel::SameAsA(j), 1.min(l), eps, j),
            SubgroupSpec::X2L { eps } => free(DiagRel::SameAsA(m + 1), 0, eps, m + 1),
            SubgroupSpec::X3S { beta } => {
                free(DiagRel::SameAsA(l), 0, ring.reduce((p * beta) as i128), l)
            }
            SubgroupSpec::X3T { beta } => {
                free(DiagRel::SameAsA(m), 0, ring.reduce((p * beta) as i128), m)
            }
            SubgroupSpec::X3T0 { beta } => {
                free(DiagRel::SameAsA(m), 0, ring.reduce((p * beta) as i128), n)
            }
            SubgroupSpec::X3N { .. } => Shape {
                a_one: m,
                d: DiagRel::One(m),
                c_zero: m,
                b_coef: 0,
                b_mod: n,
            },
        }
    }

    pub fn name(&self) -> String {
        format!("{self:?}")
    }
}

/// A concrete subgroup of `GL_2(Z/p^l)`.
#[derive(Clone, Debug)]
pub struct Subgroup {
    spec: SubgroupSpec,
    ring: RingParams,
    shape: Shape,
}

impl Subgroup {
    pub fn new(spec: SubgroupSpec, ring: &RingParams) -> Self {
        Subgroup {
            spec,
            ring: ring.clone(),
            shape: spec.shape(ring),
        }
    }

    pub fn spec(&self) -> SubgroupSpec {
        self.spec
    }

    pub fn ring(&self) -> &RingParams {
        &self.ring
    }

    pub fn contains(&self, x: &Mat2) -> bool {
        let r = &self.ring;
        let s = &self.shape;
        let divides = |k: u32, v: u64| v % r.pow_p(k) == 0;
        if !x.is_invertible(r) {
            return false;
        }
        if !divides(s.a_one, r.sub(x.a, 1)) {
            return false;
        }
        let d_ok = match s.d {
            DiagRel::One(k) => divides(k, r.sub(x.d, 1)),
            DiagRel::SameAsA(k) => divides(k, r.sub(x.d, x.a)),
        };
        d_ok && divides(s.c_zero, x.c) && divides(s.b_mod, r.sub(x.b, r.mul(s.b_coef, x.c)))
    }

    /// Number of free lifts of each entry parameter.
    fn ranges(&self) -> [u64; 4] {
        let r = &self.ring;
        let l = r.l();
        let s = &self.shape;
        let dk = match s.d {
            DiagRel::One(k) | DiagRel::SameAsA(k) => k,
        };
        [
            r.pow_p(l - s.a_one),
            r.pow_p(l - dk),
            r.pow_p(l - s.c_zero),
            r.pow_p(l - s.b_mod),
        ]
    }

    fn build(&self, ta: u64, td: u64, tc: u64, tb: u64) -> Mat2 {
        let r = &self.ring;
        let s = &self.shape;
        let a = r.add(
            1 % r.q() * u64::from(s.a_one > 0),
            r.mul(r.pow_p(s.a_one), ta),
        );
        let d = match s.d {
            DiagRel::One(k) => r.add(u64::from(k > 0), r.mul(r.pow_p(k), td)),
            DiagRel::SameAsA(k) => r.add(a, r.mul(r.pow_p(k), td)),
        };
        let c = r.mul(r.pow_p(s.c_zero), tc);
        let b = r.add(r.mul(s.b_coef, c), r.mul(r.pow_p(s.b_mod), tb));
        Mat2::new(a, b, c, d)
    }

    /// Exact order: the invertibility condition only depends on entries mod
    /// `p`, so it is counted on reductions and scaled by the fibre size.
    pub fn order(&self) -> u64 {
        let r = &self.ring;
        let p = r.p();
        let l1 = RingParams::level(p, 1).expect("valid prime");
        let s = &self.shape;
        let clamp = |k: u32| k.min(1);
        let low = Subgroup {
            spec: self.spec,
            ring: l1.clone(),
            shape: Shape {
                a_one: clamp(s.a_one),
                d: match s.d {
                    DiagRel::One(k) => DiagRel::One(clamp(k)),
                    DiagRel::SameAsA(k) => DiagRel::SameAsA(clamp(k)),
                },
                c_zero: clamp(s.c_zero),
                b_coef: s.b_coef % p,
                b_mod: clamp(s.b_mod),
            },
        };
        let low_count = low.iter().count() as u64;
        let total: u64 = self.ranges().iter().product();
        let low_total: u64 = low.ranges().iter().product();
        low_count * (total / low_total)
    }

    /// All elements, each exactly once.
    pub fn iter(&self) -> impl Iterator<Item = Mat2> + '_ {
        let [na, nd, nc, nb] = self.ranges();
        (0..na).flat_map(move |ta| {
            (0..nd).flat_map(move |td| {
                (0..nc).flat_map(move |tc| {
                    (0..nb).filter_map(move |tb| {
                        let x = self.build(ta, td, tc, tb);
                        x.is_invertible(&self.ring).then_some(x)
                    })
                })
            })
        })
    }

    /// Like [`Subgroup::iter`] but refuses subgroups larger than `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<impl Iterator<Item = Mat2> + '_> {
        let size = self.order();
        if size > cap {
            return Err(Error::TooLarge { size, cap });
        }
        Ok(self.iter())
    }

    pub fn elements(&self, cap: u64) -> Result<Vec<Mat2>> {
        Ok(self.enumerate(cap)?.collect())
    }
}

/// Left coset representatives `t` with `G = disjoint union of t H`.
pub fn left_coset_reps(group: &Subgroup, sub: &Subgroup, cap: u64) -> Result<Vec<Mat2>> {
    let ring = group.ring();
    let index = group.order() / sub.order();
    let mut reps: Vec<Mat2> = Vec::with_capacity(index as usize);
    let mut inverses: Vec<Mat2> = Vec::with_capacity(index as usize);
    for g in group.enumerate(cap)? {
        if reps.len() as u64 == index {
            break;
        }
        if inverses.iter().any(|ti| sub.contains(&ti.mul(&g, ring))) {
            continue;
        }
        inverses.push(g.inv(ring)?);
        reps.push(g);
    }
    if reps.len() as u64 != index {
        return Err(Error::ConstructionFailed(format!(
            "found {} coset representatives, expected {index}",
            reps.len()
        )));
    }
    Ok(reps)
}

/// The two families whose stabilizers need the representatives `s^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OmegaFamily {
    X2 { eps: u64 },
    X3 { beta: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OmegaIndex {
    pub k1: u64,
    pub k2: u64,
    pub k3: u64,
}

impl OmegaIndex {
    pub fn new(k1: u64, k2: u64, k3: u64) -> Self {
        OmegaIndex { k1, k2, k3 }
    }
}

/// Memoized `s^k` for every `k` in `Omega`.
#[derive(Clone, Debug)]
pub struct OmegaTable {
    family: OmegaFamily,
    ring: RingParams,
    gens: [Mat2; 3],
    bounds: [u64; 3],
    reps: Vec<(OmegaIndex, Mat2)>,
    inverses: Vec<Mat2>,
}

impl OmegaTable {
    pub fn new(family: OmegaFamily, ring: &RingParams) -> Result<Self> {
        let p = ring.p();
        let (m, n) = (ring.m(), ring.n());
        let (gens, bounds) = match family {
            OmegaFamily::X2 { eps } => {
                let s1 = Mat2::scalar(1 + p);
                let s2 = Mat2::new(1, ring.reduce((p * eps) as i128), p, 1);
                let s3 = find_s3_x2(eps, ring)?;
                let b = ring.pow_p(n - 1);
                ([s1, s2, s3], [b, b, p * p - 1])
            }
            OmegaFamily::X3 { beta } => {
                if m == 0 {
                    return Err(Error::BadArgument("third family needs l >= 2".into()));
                }
                let gamma = ring.find_gamma()?;
                let s1 = Mat2::scalar(gamma);
                let s2 = Mat2::new(1, ring.reduce((p * p * beta) as i128), p, 1);
                let s3 = Mat2::new(1, ring.reduce((p * beta) as i128), 1, 1);
                let b = ring.pow_p(m - 1);
                ([s1, s2, s3], [b * (p - 1), b, p])
            }
        };
        let mut reps = Vec::with_capacity((bounds[0] * bounds[1] * bounds[2]) as usize);
        let mut p1 = Mat2::IDENTITY;
        for k1 in 0..bounds[0] {
            let mut p2 = p1;
            for k2 in 0..bounds[1] {
                let mut p3 = p2;
                for k3 in 0..bounds[2] {
                    reps.push((OmegaIndex::new(k1, k2, k3), p3));
                    p3 = p3.mul(&gens[2], ring);
                }
                p2 = p2.mul(&gens[1], ring);
            }
            p1 = p1.mul(&gens[0], ring);
        }
        let inverses = reps
            .iter()
            .map(|(_, s)| s.inv(ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(OmegaTable {
            family,
            ring: ring.clone(),
            gens,
            bounds,
            reps,
            inverses,
        })
    }

    pub fn family(&self) -> OmegaFamily {
        self.family
    }

    /// `s_1, s_2, s_3`
    pub fn generators(&self) -> [Mat2; 3] {
        self.gens
    }

    pub fn bounds(&self) -> [u64; 3] {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[(OmegaIndex, Mat2)] {
        &self.reps
    }

    pub fn position(&self, k: OmegaIndex) -> Option<usize> {
        let [b1, b2, b3] = self.bounds;
        (k.k1 < b1 && k.k2 < b2 && k.k3 < b3).then(|| (((k.k1 * b2) + k.k2) * b3 + k.k3) as usize)
    }

    pub fn get(&self, k: OmegaIndex) -> Option<Mat2> {
        self.position(k).map(|i| self.reps[i].1)
    }

    pub fn inverse_at(&self, idx: usize) -> Mat2 {
        self.inverses[idx]
    }

    /// The off-diagonal coefficient of `S`: `eps` or `p beta`.
    fn s_coefficient(&self) -> u64 {
        match self.family {
            OmegaFamily::X2 { eps } => eps,
            OmegaFamily::X3 { beta } => self.ring.reduce((self.ring.p() * beta) as i128),
        }
    }

    /// The unique `h` with
    /// `(-alpha/r, -c/r; -1/r, -alpha/r) in (K_m cap S) s^h`, `c` the `S`
    /// coefficient. For the second family only `h_1, h_2 < p^{m-1}` are
    /// admissible, which is all of `Omega` when `l` is even.
    pub fn find_h(&self, alpha: u64, r: u64) -> Result<OmegaIndex> {
        let ring = &self.ring;
        let p = ring.p();
        let m = ring.m();
        if r % p == 0 {
            return Err(Error::NonUnit(r));
        }
        if matches!(self.family, OmegaFamily::X3 { .. }) && alpha % p == 0 {
            return Err(Error::NonUnit(alpha));
        }
        let rinv = ring.inv(r)?;
        let x = ring.neg(ring.mul(alpha, rinv));
        let target = Mat2::new(
            x,
            ring.neg(ring.mul(self.s_coefficient(), rinv)),
            ring.neg(rinv),
            x,
        );
        let limit = match self.family {
            OmegaFamily::X2 { .. } => ring.pow_p(m - 1),
            OmegaFamily::X3 { .. } => u64::MAX,
        };
        let mut found = None;
        for (idx, (k, _)) in self.reps.iter().enumerate() {
            if k.k1 >= limit || k.k2 >= limit {
                continue;
            }
            if target
                .mul(&self.inverses[idx], ring)
                .is_congruent_identity(m, ring)
            {
                if found.is_some() {
                    return Err(Error::NotUnique(format!("h for alpha={alpha} r={r}")));
                }
                found = Some(*k);
            }
        }
        found.ok_or_else(|| Error::NotFound(format!("h for alpha={alpha} r={r}")))
    }

    /// Integers `(sigma_1, sigma_2)` with `s_3^p = s_1^{sigma_1} s_2^{sigma_2}`
    /// (third family), `sigma_1` reduced modulo the order of `s_1` and
    /// `sigma_2` the smallest admissible exponent.
    pub fn sigmas(&self) -> Result<(u64, u64)> {
        if !matches!(self.family, OmegaFamily::X3 { .. }) {
            return Err(Error::UnsupportedFamily("sigmas are defined for X3".into()));
        }
        let ring = &self.ring;
        let [s1, s2, s3] = self.gens;
        let target = s3.pow(ring.p(), ring);
        let s2_inv = s2.inv(ring)?;
        let gamma_log = ring.discrete_log(s1.a)?;
        let order = ring.unit_order();
        let gamma_log_inv = (gamma_log as i128)
            .extended_gcd(&(order as i128))
            .x
            .rem_euclid(order as i128) as u64;
        let mut z = target;
        for sigma2 in 0..s2.order(ring) {
            if z.is_scalar() {
                let t = ring.discrete_log(z.a)?;
                let sigma1 = ((t as u128 * gamma_log_inv as u128) % order as u128) as u64;
                return Ok((sigma1, sigma2));
            }
            z = z.mul(&s2_inv, ring);
        }
        Err(Error::ConstructionFailed(
            "s_3^p is not in <s_1> x <s_2>".into(),
        ))
    }
}

/// `s_3` for the second family: the `p^{2(l-1)}`-th power of
/// `u = (x, eps y; y, x)`, where `(x, y)` is the lexicographically smallest
/// pair whose image `x + y sqrt(eps)` generates `F_{p^2}^x`. The result has
/// order exactly `p^2 - 1` and `s_3^{p+1}` is scalar.
pub fn find_s3_x2(eps: u64, ring: &RingParams) -> Result<Mat2> {
    let p = ring.p();
    if legendre(eps as i64, p) != -1 {
        return Err(Error::BadArgument(format!(
            "eps={eps} is not a nonsquare mod {p}"
        )));
    }
    let order = p * p - 1;
    let factors = prime_factors(order);
    let field = RingParams::level(p, 1)?;
    let e = eps % p;
    let pow_f = |x: u64, y: u64, mut k: u64| {
        // (x + y w)^k with w^2 = eps in F_p[w]
        let (mut rx, mut ry) = (1u64, 0u64);
        let (mut bx, mut by) = (x, y);
        while k > 0 {
            if k & 1 == 1 {
                let nx = field.add(field.mul(rx, bx), field.mul(e, field.mul(ry, by)));
                let ny = field.add(field.mul(rx, by), field.mul(ry, bx));
                rx = nx;
                ry = ny;
            }
            let nx = field.add(field.mul(bx, bx), field.mul(e, field.mul(by, by)));
            let ny = field.mul(2, field.mul(bx, by));
            bx = nx;
            by = ny;
            k >>= 1;
        }
        (rx, ry)
    };
    let (x, y) = (0..p)
        .flat_map(|x| (0..p).map(move |y| (x, y)))
        .filter(|&(x, y)| (x, y) != (0, 0))
        .find(|&(x, y)| factors.iter().all(|f| pow_f(x, y, order / f) != (1, 0)))
        .ok_or_else(|| Error::ConstructionFailed("no generator of F_p^2".into()))?;
    let u = Mat2::new(x, ring.mul(eps, y), y, x);
    let s3 = u.pow(ring.pow_p(2 * (ring.l() - 1)), ring);
    if s3.order(ring) != order || !s3.pow(p + 1, ring).is_scalar() {
        return Err(Error::ConstructionFailed("s_3 has the wrong order".into()));
    }
    Ok(s3)
}

/// Decomposition `X = n s^k` of elements of `H s^Omega`, where the normal
/// factor `H` contains `K_e`; results are cached by `X mod p^e`.
pub struct CosetDecomposer {
    table: OmegaTable,
    normal: Subgroup,
    key_level: u32,
    allowed: Option<(u64, u64)>,
    cache: Mutex<HashMap<Mat2, usize>>,
}

impl CosetDecomposer {
    /// `allowed` optionally restricts `(k_1, k_2)` to `[0, b1) x [0, b2)`.
    pub fn new(
        table: OmegaTable,
        normal: Subgroup,
        key_level: u32,
        allowed: Option<(u64, u64)>,
    ) -> Self {
        CosetDecomposer {
            table,
            normal,
            key_level,
            allowed,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn table(&self) -> &OmegaTable {
        &self.table
    }

    pub fn normal(&self) -> &Subgroup {
        &self.normal
    }

    /// Returns `(n, position of k)` with `x = n s^k`.
    pub fn decompose(&self, x: &Mat2) -> Result<(Mat2, usize)> {
        let ring = self.table.ring.clone();
        let key = x.mod_p_power(self.key_level, &ring);
        if let Some(&idx) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok((x.mul(&self.table.inverses[idx], &ring), idx));
        }
        for (idx, (k, _)) in self.table.reps.iter().enumerate() {
            if let Some((b1, b2)) = self.allowed {
                if k.k1 >= b1 || k.k2 >= b2 {
                    continue;
                }
            }
            let n = x.mul(&self.table.inverses[idx], &ring);
            if self.normal.contains(&n) {
                self.cache.lock().expect("cache lock").insert(key, idx);
                return Ok((n, idx));
            }
        }
        Err(Error::NotInSubgroup(format!(
            "{x:?} is not in {}·s^Omega",
            self.normal.spec().name()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn ring(p: u64, l: u32) -> RingParams {
        RingParams::new(p, l).unwrap()
    }

    #[test]
    fn group_orders() {
        let r = ring(3, 2);
        assert_eq!(group_order(&r), 3888);
        assert_eq!(Subgroup::new(SubgroupSpec::Full, &r).iter().count(), 3888);
        let r1 = RingParams::level(3, 1).unwrap();
        assert_eq!(group_order(&r1), 48);
        assert_eq!(Subgroup::new(SubgroupSpec::Full, &r1).iter().count(), 48);
        assert_eq!(group_order(&ring(5, 2)), 300_000);
        assert_eq!(
            Subgroup::new(SubgroupSpec::Full, &ring(5, 2)).order(),
            300_000
        );
    }

    #[test]
    fn small_subgroups() {
        let r = ring(3, 2);
        let k1 = Subgroup::new(SubgroupSpec::K(1), &r);
        assert_eq!(k1.iter().count(), 81);
        assert!(k1.iter().all(|x| x.is_congruent_identity(1, &r)));
        assert_eq!(Subgroup::new(SubgroupSpec::X1S, &r).iter().count(), 36);
        let t0 = Subgroup::new(SubgroupSpec::X1T0, &r);
        assert_eq!(t0.iter().count(), 6 * 6 * 3 * 3);
        assert_eq!(t0.order(), 324);
        assert!(matches!(
            Subgroup::new(SubgroupSpec::Full, &r).elements(100),
            Err(Error::TooLarge {
                size: 3888,
                cap: 100
            })
        ));
    }

    fn all_specs(r: &RingParams) -> Vec<SubgroupSpec> {
        let m = r.m();
        let mut specs = vec![
            SubgroupSpec::Full,
            SubgroupSpec::Center,
            SubgroupSpec::X1S,
            SubgroupSpec::X1T,
            SubgroupSpec::X1T0,
            SubgroupSpec::X1N,
            SubgroupSpec::X2S { eps: 2 },
            SubgroupSpec::X2T { eps: 2 },
            SubgroupSpec::X2L { eps: 2 },
            SubgroupSpec::X2N { eps: 2, j: m },
            SubgroupSpec::X2N { eps: 2, j: m + 1 },
            SubgroupSpec::X3S { beta: 0 },
            SubgroupSpec::X3T { beta: 0 },
            SubgroupSpec::X3T0 { beta: 0 },
            SubgroupSpec::X3N { beta: 0 },
        ];
        specs.extend((1..r.l()).map(SubgroupSpec::K));
        specs
    }

    #[test]
    fn enumeration_matches_order_and_membership() {
        for (p, l) in [(3, 2), (3, 3), (5, 2)] {
            let r = ring(p, l);
            for spec in all_specs(&r) {
                let h = Subgroup::new(spec, &r);
                let elems: Vec<Mat2> = h.iter().collect();
                let set: HashSet<Mat2> = elems.iter().copied().collect();
                assert_eq!(set.len(), elems.len(), "{spec:?} repeats");
                assert_eq!(elems.len() as u64, h.order(), "{spec:?} at ({p},{l})");
                assert!(elems.iter().all(|x| h.contains(x)));
                if p == 3 && l == 2 {
                    let full = Subgroup::new(SubgroupSpec::Full, &r);
                    let members = full.iter().filter(|x| h.contains(x)).count();
                    assert_eq!(members, elems.len(), "{spec:?} membership");
                }
            }
        }
    }

    #[test]
    fn subgroups_are_closed() {
        let r = ring(3, 2);
        for spec in all_specs(&r) {
            let h = Subgroup::new(spec, &r);
            let elems: Vec<Mat2> = h.iter().collect();
            for x in &elems {
                assert!(h.contains(&x.inv(&r).unwrap()), "{spec:?} inverse");
                for y in &elems {
                    assert!(h.contains(&x.mul(y, &r)), "{spec:?} product");
                }
            }
        }
        let r = ring(3, 3);
        for spec in all_specs(&r) {
            let h = Subgroup::new(spec, &r);
            let elems: Vec<Mat2> = h.iter().collect();
            let step = (elems.len() / 97).max(1);
            for x in elems.iter().step_by(step) {
                assert!(h.contains(&x.inv(&r).unwrap()));
                for y in elems.iter().step_by(step) {
                    assert!(h.contains(&x.mul(y, &r)), "{spec:?} product");
                }
            }
        }
    }

    #[test]
    fn congruence_subgroups_are_normal() {
        let r = ring(3, 2);
        let g: Vec<Mat2> = Subgroup::new(SubgroupSpec::Full, &r)
            .iter()
            .step_by(7)
            .collect();
        let k = Subgroup::new(SubgroupSpec::K(1), &r);
        for x in &g {
            let xi = x.inv(&r).unwrap();
            for y in k.iter() {
                assert!(k.contains(&x.mul(&y, &r).mul(&xi, &r)));
            }
        }
    }

    #[test]
    fn s3_for_second_family() {
        for (p, l, eps) in [(3, 2, 2), (3, 3, 2), (5, 2, 2), (5, 2, 3), (7, 2, 3)] {
            let r = ring(p, l);
            let s3 = find_s3_x2(eps, &r).unwrap();
            assert_eq!(s3.order(&r), p * p - 1);
            assert!(s3.pow(p + 1, &r).is_scalar());
            assert!(Subgroup::new(SubgroupSpec::X2S { eps }, &r).contains(&s3));
        }
        assert!(find_s3_x2(1, &ring(3, 2)).is_err());
    }

    #[test]
    fn omega_tables() {
        let r = ring(3, 2);
        let t = OmegaTable::new(OmegaFamily::X2 { eps: 2 }, &r).unwrap();
        assert_eq!(t.len(), 8);
        let s = Subgroup::new(SubgroupSpec::X2S { eps: 2 }, &r);
        let distinct: HashSet<Mat2> = t.reps().iter().map(|x| x.1).collect();
        assert_eq!(distinct.len(), 8);
        assert!(t.reps().iter().all(|(_, x)| s.contains(x)));

        let t3 = OmegaTable::new(OmegaFamily::X3 { beta: 0 }, &r).unwrap();
        assert_eq!(t3.len(), 6);
        let s3 = Subgroup::new(SubgroupSpec::X3S { beta: 0 }, &r);
        assert!(t3.reps().iter().all(|(_, x)| s3.contains(x)));
    }

    #[test]
    fn second_family_generators_span_s() {
        for (p, l) in [(3u64, 2u32), (3, 3)] {
            let r = ring(p, l);
            let n = r.n();
            let t = OmegaTable::new(OmegaFamily::X2 { eps: 2 }, &r).unwrap();
            let [s1, s2, s3] = t.generators();
            let s = Subgroup::new(SubgroupSpec::X2S { eps: 2 }, &r);
            let ord = r.pow_p(l - 1);
            let mut span = HashSet::new();
            let mut k1_cap_s = HashSet::new();
            let mut kn_cap_s = HashSet::new();
            for a in 0..ord {
                for b in 0..ord {
                    let x = s1.pow(a, &r).mul(&s2.pow(b, &r), &r);
                    k1_cap_s.insert(x);
                    let pn = r.pow_p(n - 1);
                    kn_cap_s.insert(s1.pow(a * pn, &r).mul(&s2.pow(b * pn, &r), &r));
                    for c in 0..p * p - 1 {
                        span.insert(x.mul(&s3.pow(c, &r), &r));
                    }
                }
            }
            assert_eq!(span.len() as u64, s.order());
            let expected: HashSet<Mat2> = s
                .iter()
                .filter(|x| x.is_congruent_identity(1, &r))
                .collect();
            assert_eq!(k1_cap_s, expected);
            let expected: HashSet<Mat2> = s
                .iter()
                .filter(|x| x.is_congruent_identity(n, &r))
                .collect();
            assert_eq!(kn_cap_s, expected);
        }
    }

    #[test]
    fn third_family_sigmas() {
        for (p, l, beta) in [
            (3, 2, 0),
            (3, 3, 0),
            (3, 4, 0),
            (3, 4, 1),
            (3, 4, 2),
            (5, 2, 0),
            (5, 3, 0),
        ] {
            let r = ring(p, l);
            let t = OmegaTable::new(OmegaFamily::X3 { beta }, &r).unwrap();
            let [s1, s2, s3] = t.generators();
            let (sigma1, sigma2) = t.sigmas().unwrap();
            assert_eq!(
                s3.pow(p, &r),
                s1.pow(sigma1, &r).mul(&s2.pow(sigma2, &r), &r)
            );
        }
    }

    #[test]
    fn h_is_unique_for_every_unit_r() {
        let r = ring(3, 2);
        let t = OmegaTable::new(OmegaFamily::X2 { eps: 2 }, &r).unwrap();
        for rr in [1, 2, 4, 5, 7, 8] {
            let h = t.find_h(0, rr).unwrap();
            let target = Mat2::new(
                0,
                r.neg(r.mul(2, r.inv(rr).unwrap())),
                r.neg(r.inv(rr).unwrap()),
                0,
            );
            let s_h = t.get(h).unwrap();
            assert!(target
                .mul(&s_h.inv(&r).unwrap(), &r)
                .is_congruent_identity(1, &r));
        }
        assert_eq!(t.find_h(0, 3), Err(Error::NonUnit(3)));
        let t3 = OmegaTable::new(OmegaFamily::X3 { beta: 0 }, &r).unwrap();
        assert!(t3.find_h(1, 1).is_ok());
        assert_eq!(t3.find_h(3, 1), Err(Error::NonUnit(3)));
    }

    #[test]
    fn coset_reps_partition() {
        let r = ring(3, 2);
        let g = Subgroup::new(SubgroupSpec::Full, &r);
        let h = Subgroup::new(SubgroupSpec::X1T0, &r);
        let reps = left_coset_reps(&g, &h, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(reps.len(), 12);
        let mut seen = HashSet::new();
        for t in &reps {
            for x in h.iter() {
                assert!(seen.insert(t.mul(&x, &r)));
            }
        }
        assert_eq!(seen.len(), 3888);
    }
}
