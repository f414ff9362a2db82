//! Sweeps comparing every closed form with an independent oracle. Each
//! sweep returns one [`Case`] per comparison so callers can print or count
//! failures.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::appendix::{self, p1_brute, p_sum_brute, p_sum_closed, PCase};
use crate::characters::{
    count_distinct, enumerate_specs, family_count_formula, inner_product, AddChar, CharSpec,
    Character, Family, MultChar,
};
use crate::cyclotomic::{CycElem, Cyclo};
use crate::error::Result;
use crate::gauss::{
    g_brute, g_closed, odoni_report, tau_closed, tau_oracle_full, tau_oracle_subgroup, tau_x4,
    tau_x4_brute, virtual_components, ThetaTable, X4Tau,
};
use crate::group::{Subgroup, SubgroupSpec};
use crate::residue::RingParams;

/// Magnitude tolerance for complex-embedding checks.
pub const MAGNITUDE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Case {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Case {
            name: name.into(),
            passed,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub cases: Vec<Case>,
}

impl Report {
    pub fn push(&mut self, case: Case) {
        self.cases.push(case);
    }

    pub fn extend(&mut self, other: Report) {
        self.cases.extend(other.cases);
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.passed)
    }

    pub fn summary(&self) -> String {
        let bad = self.failures().count();
        format!(
            "{}/{} cases passed",
            self.cases.len() - bad,
            self.cases.len()
        )
    }
}

/// `g_closed = g_brute` for every character and every `r`, plus
/// `|g| = p^{l/2}` for primitive characters and unit `r`.
pub fn gauss_suite(ring: &RingParams, cap: u64) -> Result<Report> {
    let ctx = Cyclo::for_ring(ring);
    let mut report = Report::default();
    let target = (ring.q() as f64).sqrt();
    for mu in MultChar::all(ring) {
        for r in 1..ring.q() {
            let e = AddChar::new(ring, r)?;
            let closed = g_closed(&mu, &e, &ctx)?;
            let brute = g_brute(&mu, &e, &ctx, cap)?;
            let name = format!("g p={} l={} c={} r={r}", ring.p(), ring.l(), mu.exponent());
            report.push(Case::new(name.clone(), closed == brute));
            if mu.is_primitive() && r % ring.p() != 0 {
                let size = closed.embed().norm();
                report.push(
                    Case::new(format!("{name} |g|"), (size - target).abs() < MAGNITUDE_TOL)
                        .with_detail(format!("{size:.12}")),
                );
            }
        }
    }
    Ok(report)
}

/// Odoni's value against every normalized primitive character; a mismatch
/// is a failed case.
pub fn odoni_suite(ring: &RingParams, cap: u64) -> Result<Report> {
    let ctx = Cyclo::for_ring(ring);
    let (value, cases) = odoni_report(ring, &ctx, cap)?;
    let mut report = Report::default();
    for c in cases {
        report.push(
            Case::new(
                format!("odoni p={} l={} c={}", ring.p(), ring.l(), c.exponent),
                c.matches,
            )
            .with_detail(format!(
                "formula {:.6}, brute {:.6}",
                value.embed(),
                c.brute.embed()
            )),
        );
    }
    Ok(report)
}

/// Every `count`-th spec of each family, always including the first.
pub fn sample_specs(family: Family, ring: &RingParams, per_family: Option<usize>) -> Vec<CharSpec> {
    let all = enumerate_specs(family, ring);
    match per_family {
        None => all,
        Some(k) if k >= all.len() => all,
        Some(k) => {
            let step = all.len() / k.max(1);
            all.into_iter().step_by(step.max(1)).take(k).collect()
        }
    }
}

/// Additive characters used in the tau sweeps: every `r` for small rings,
/// otherwise a mix of units and non-units.
pub fn r_values(ring: &RingParams) -> Vec<u64> {
    if ring.q() <= 25 {
        return (1..ring.q()).collect();
    }
    let p = ring.p();
    let mut rs: Vec<u64> = vec![1, 2, p - 1, p + 1, p, 2 * p, p * p, ring.q() - 1];
    rs.retain(|&r| r < ring.q());
    rs.sort_unstable();
    rs.dedup();
    rs
}

/// `tau_closed = tau_oracle_subgroup` over the given specs and `r`s; for
/// the second family at even `l` also `|tau / degree| = p^{2l}` at unit `r`.
pub fn tau_suite(ring: &RingParams, specs: &[CharSpec], rs: &[u64], cap: u64) -> Result<Report> {
    let ctx = Cyclo::for_ring(ring);
    let mut report = Report::default();
    for spec in specs {
        let ch = Character::new(*spec, ring, &ctx, cap)?;
        for &r in rs {
            let e = AddChar::new(ring, r)?;
            let closed = tau_closed(&ch, &e)?;
            let oracle = tau_oracle_subgroup(&ch, &e, cap)?;
            let name = format!("tau p={} l={} {spec:?} r={r}", ring.p(), ring.l());
            report.push(Case::new(name.clone(), closed == oracle));
            if spec.family() == Family::X2 && ring.l() % 2 == 0 && r % ring.p() != 0 {
                let size = closed.embed().norm() / ch.degree() as f64;
                let target = (ring.q() as f64).powi(2);
                report.push(
                    Case::new(
                        format!("{name} |tau/deg|"),
                        (size - target).abs() < MAGNITUDE_TOL * target,
                    )
                    .with_detail(format!("{size:.6}")),
                );
            }
            if spec.family() != Family::X1 && r % ring.p() == 0 {
                report.push(Case::new(
                    format!("{name} vanishes"),
                    closed.is_zero() && oracle.is_zero(),
                ));
            }
        }
    }
    Ok(report)
}

/// Invariants of the virtual character `psi` (second family, odd `l`):
/// `psi(I) = p`, `psi = p phi_{A_0}` on `K_{m+1}`, `<psi, psi>_T = 1`, and
/// the `N_{m+1}` component of `tau` vanishes for unit `r`.
pub fn virtual_suite(ch: &Character, cap: u64) -> Result<Report> {
    let ring = ch.ring();
    let ctx = ch.ctx();
    let p = ring.p() as i128;
    let mut report = Report::default();
    let tag = format!("{:?}", ch.spec());
    let at_one = ch.psi(&crate::group::Mat2::IDENTITY)?;
    report.push(Case::new(
        format!("psi(I) = p {tag}"),
        at_one.as_integer() == Some(p),
    ));
    let k = Subgroup::new(SubgroupSpec::K(ring.m() + 1), ring);
    let mut ok = true;
    for x in k.enumerate(cap)? {
        if ch.psi(&x)? != CycElem::from_root(ctx, ch.phi_a0(&x)?).scale(p) {
            ok = false;
            break;
        }
    }
    report.push(Case::new(format!("psi = p phi on K_(m+1) {tag}"), ok));
    let norm = inner_product(&|x| ch.psi(x), &|x| ch.psi(x), ch.stabilizer(), ctx, cap)?;
    report.push(Case::new(
        format!("<psi,psi>_T = 1 {tag}"),
        norm.as_integer() == Some(1),
    ));
    for r in [1, 2] {
        let (on_n, _) = virtual_components(ch, &AddChar::new(ring, r)?, cap)?;
        report.push(Case::new(
            format!("N component vanishes {tag} r={r}"),
            on_n.is_zero(),
        ));
    }
    Ok(report)
}

/// Definition-level checks on the whole group: `tau_oracle_full =
/// tau_closed`, `chi(I) = degree`, `<chi, chi> = 1`, and pairwise
/// orthogonality of the given specs.
pub fn full_suite(ring: &RingParams, specs: &[CharSpec], rs: &[u64], cap: u64) -> Result<Report> {
    let ctx = Cyclo::for_ring(ring);
    let g = Subgroup::new(SubgroupSpec::Full, ring);
    let elems = g.elements(cap)?;
    let chars = specs
        .iter()
        .map(|s| Character::new(*s, ring, &ctx, cap))
        .collect::<Result<Vec<_>>>()?;
    let mut tables: Vec<Vec<CycElem>> = Vec::new();
    let mut report = Report::default();
    for ch in &chars {
        let full = ch.full()?;
        let values = elems
            .iter()
            .map(|x| full.value(x))
            .collect::<Result<Vec<_>>>()?;
        let tag = format!("{:?}", ch.spec());
        let at_one = full.value(&crate::group::Mat2::IDENTITY)?;
        report.push(
            Case::new(
                format!("chi(I) = degree {tag}"),
                at_one.as_integer() == Some(ch.degree() as i128),
            )
            .with_detail(format!("{:?}", at_one.as_integer())),
        );
        for &r in rs {
            let e = AddChar::new(ring, r)?;
            report.push(Case::new(
                format!("tau full = closed {tag} r={r}"),
                tau_oracle_full(ch, &e, cap)? == tau_closed(ch, &e)?,
            ));
        }
        tables.push(values);
    }
    let order = elems.len() as i128;
    for a in 0..chars.len() {
        for b in a..chars.len() {
            let mut acc = CycElem::zero(&ctx);
            for (x, y) in tables[a].iter().zip(&tables[b]) {
                acc = acc + x * &y.conj();
            }
            let ip = acc.div_exact(order)?;
            let want = i128::from(a == b);
            report.push(Case::new(
                format!(
                    "<chi,chi'> = {want} {:?} {:?}",
                    chars[a].spec(),
                    chars[b].spec()
                ),
                ip.as_integer() == Some(want),
            ));
        }
    }
    Ok(report)
}

/// Family sizes: formula, enumerated specs and (under the cap) distinct
/// characters per orbit.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyCount {
    pub family: &'static str,
    pub formula: u64,
    pub enumerated: u64,
    pub orbit_size: u64,
    pub distinct_per_orbit: Option<Vec<u64>>,
}

pub fn family_counts(ring: &RingParams, cap: u64) -> Result<Vec<FamilyCount>> {
    let ctx = Cyclo::for_ring(ring);
    let mut out = Vec::new();
    for fam in [Family::X1, Family::X2, Family::X3] {
        let specs = enumerate_specs(fam, ring);
        let mut orbits: BTreeMap<(u64, u64), Vec<CharSpec>> = BTreeMap::new();
        for s in &specs {
            let (_, a, b) = s.orbit();
            orbits.entry((a, b)).or_default().push(*s);
        }
        let orbit_size = orbits.values().next().map_or(0, |v| v.len() as u64);
        let stab = Character::new(specs[0], ring, &ctx, cap)?
            .stabilizer()
            .order();
        let distinct = if stab <= cap {
            Some(
                orbits
                    .values()
                    .map(|members| count_distinct(members, ring, &ctx, cap).map(|n| n as u64))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        out.push(FamilyCount {
            family: fam.name(),
            formula: family_count_formula(fam, ring),
            enumerated: specs.len() as u64,
            orbit_size,
            distinct_per_orbit: distinct,
        });
    }
    Ok(out)
}

pub fn counts_suite(ring: &RingParams, cap: u64) -> Result<Report> {
    Ok(counts_report(ring, &family_counts(ring, cap)?))
}

pub fn counts_report(ring: &RingParams, counts: &[FamilyCount]) -> Report {
    let mut report = Report::default();
    for c in counts {
        let name = format!("count p={} l={} {}", ring.p(), ring.l(), c.family);
        report.push(
            Case::new(
                format!("{name} formula = enumerated"),
                c.formula == c.enumerated,
            )
            .with_detail(format!("{} vs {}", c.formula, c.enumerated)),
        );
        if let Some(d) = &c.distinct_per_orbit {
            report.push(Case::new(
                format!("{name} orbit members distinct"),
                d.iter().all(|&n| n == c.orbit_size),
            ));
        }
    }
    report
}

/// `p_sum_closed = p_sum_brute` (and `P1` against its own direct sum) for
/// every parameter tuple at `p` with `i <= max_i`.
pub fn appendix_suite(p: u64, max_i: u32, cap: u64) -> Result<Report> {
    let mut report = Report::default();
    let mut ctxs: BTreeMap<u32, Arc<Cyclo>> = BTreeMap::new();
    for params in appendix::sweep(p, max_i)? {
        let ctx = ctxs.entry(params.i).or_insert_with(|| params.ctx()).clone();
        let closed = p_sum_closed(&params, &ctx)?;
        let ok = closed.value == p_sum_brute(&params, &ctx, cap)?
            && closed.p1 == p1_brute(&params, &ctx)?;
        let mut case = Case::new(format!("P {params:?} case {}", closed.case), ok);
        if closed.case == PCase::IV && !closed.closed_form {
            case = case.with_detail("Kloosterman sum computed directly");
        }
        report.push(case);
    }
    Ok(report)
}

/// Level-2 characters used as inflated `theta` at level 3: one per family
/// plus a second from the second family.
pub fn default_thetas(p: u64) -> Result<Vec<CharSpec>> {
    let lower = RingParams::new(p, 2)?;
    let mut out = Vec::new();
    for fam in [Family::X1, Family::X2, Family::X3] {
        let specs = enumerate_specs(fam, &lower);
        out.push(specs[specs.len() / 2]);
    }
    out.push(enumerate_specs(Family::X2, &lower)[1]);
    Ok(out)
}

/// The twisted-inflation rules at level 3 against direct summation over
/// `GL_2(Z/p^3)`.
pub fn x4_suite(p: u64, thetas: &[CharSpec], rs: &[u64], cap: u64) -> Result<Report> {
    let ring = RingParams::new(p, 3)?;
    let lower = RingParams::new(p, 2)?;
    let ctx = Cyclo::for_ring(&ring);
    let lower_ctx = Cyclo::for_ring(&lower);
    let mut report = Report::default();
    for spec in thetas {
        let ch = Character::new(*spec, &lower, &lower_ctx, cap)?;
        let theta = ThetaTable::from_character(&ch, cap)?;
        for twist in 0..p {
            for &r in rs {
                let e = AddChar::new(&ring, r)?;
                let rule = tau_x4(twist, &theta, &ring, &ctx, &e)?;
                let brute = tau_x4_brute(twist, &theta, &ring, &ctx, &e, cap)?;
                let kind = match (&rule, twist, r % p == 0) {
                    (X4Tau::Exact(v), 0, true) => {
                        let lower_e = e.descend()?;
                        let direct = theta.tau(&lower_e)?.lift(&ctx)?.scale((p as i128).pow(4));
                        report.push(Case::new(
                            format!("x4 p^4 recursion (table) {spec:?} r={r}"),
                            &direct == v,
                        ));
                        "recursion"
                    }
                    (X4Tau::Exact(v), _, _) => {
                        report.push(Case::new(
                            format!("x4 zero {spec:?} i={twist} r={r}"),
                            v.is_zero(),
                        ));
                        "vanishing"
                    }
                    (X4Tau::Residual(_), _, _) => "residual",
                };
                report.push(Case::new(
                    format!("x4 {kind} = brute {spec:?} i={twist} r={r}"),
                    rule.value() == &brute,
                ));
            }
        }
    }
    Ok(report)
}

/// `<chi, chi> = 1` on the stabilizer for the twisted stabilizer character
/// of each spec; it is the necessary half of irreducibility after induction.
pub fn irreducibility_suite(ring: &RingParams, specs: &[CharSpec], cap: u64) -> Result<Report> {
    let ctx = Cyclo::for_ring(ring);
    let mut report = Report::default();
    for spec in specs {
        let ch = Character::new(*spec, ring, &ctx, cap)?;
        let ip = inner_product(
            &|x| ch.twisted(x),
            &|x| ch.twisted(x),
            ch.stabilizer(),
            &ctx,
            cap,
        )?;
        report.push(Case::new(
            format!("<psi,psi>_H = 1 p={} l={} {spec:?}", ring.p(), ring.l()),
            ip.as_integer() == Some(1),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ENUM_CAP;

    #[test]
    fn small_suites_pass() {
        let ring = RingParams::new(3, 2).unwrap();
        let cap = DEFAULT_ENUM_CAP;
        assert!(gauss_suite(&ring, cap).unwrap().passed());
        assert!(counts_suite(&ring, cap).unwrap().passed());
        let specs: Vec<_> = [Family::X1, Family::X2, Family::X3]
            .into_iter()
            .flat_map(|f| sample_specs(f, &ring, Some(2)))
            .collect();
        assert!(tau_suite(&ring, &specs, &[1, 3], cap).unwrap().passed());
        assert!(irreducibility_suite(&ring, &specs, cap).unwrap().passed());
        assert!(appendix_suite(3, 1, cap).unwrap().passed());
    }

    #[test]
    fn sampling() {
        let ring = RingParams::new(3, 2).unwrap();
        assert_eq!(sample_specs(Family::X2, &ring, Some(5)).len(), 5);
        assert_eq!(sample_specs(Family::X2, &ring, None).len(), 24);
        assert_eq!(r_values(&ring), (1..9).collect::<Vec<_>>());
    }
}
