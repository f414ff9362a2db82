use gl2_gauss::characters::{enumerate_specs, AddChar, CharSpec, Character, Family, MultChar};
use gl2_gauss::cyclotomic::{CycElem, Cyclo};
use gl2_gauss::gauss::{
    delta_unit, g_brute, g_closed, tau_closed, tau_oracle_subgroup, tau_x4, ThetaTable, X4Tau,
};
use gl2_gauss::group::{OmegaFamily, OmegaIndex, DEFAULT_ENUM_CAP};
use gl2_gauss::residue::RingParams;

const CAP: u64 = DEFAULT_ENUM_CAP;

#[test]
fn g_closed_at_25_and_49() {
    for p in [5, 7] {
        let ring = RingParams::new(p, 2).unwrap();
        let ctx = Cyclo::for_ring(&ring);
        for mu in MultChar::all(&ring).step_by(3) {
            for r in [1, 2, p, 2 * p + 1] {
                let e = AddChar::new(&ring, r).unwrap();
                assert_eq!(
                    g_closed(&mu, &e, &ctx).unwrap(),
                    g_brute(&mu, &e, &ctx, CAP).unwrap()
                );
            }
        }
    }
}

#[test]
fn g_closed_at_81() {
    let ring = RingParams::new(3, 4).unwrap();
    let ctx = Cyclo::for_ring(&ring);
    for mu in MultChar::all(&ring).step_by(5) {
        for r in [1, 5, 3, 9, 27] {
            let e = AddChar::new(&ring, r).unwrap();
            assert_eq!(
                g_closed(&mu, &e, &ctx).unwrap(),
                g_brute(&mu, &e, &ctx, CAP).unwrap()
            );
        }
    }
}

#[test]
fn x2_even_magnitude_at_9() {
    let ring = RingParams::new(3, 2).unwrap();
    let ctx = Cyclo::for_ring(&ring);
    let ch = Character::new(
        CharSpec::X2 {
            alpha: 1,
            eps: 2,
            i: OmegaIndex::new(0, 0, 3),
        },
        &ring,
        &ctx,
        CAP,
    )
    .unwrap();
    let tau = tau_closed(&ch, &AddChar::standard(&ring)).unwrap();
    let size = tau.embed().norm() / 6.0;
    assert!((size - 81.0).abs() < 1e-9);
}

#[test]
fn tau_closed_matches_oracle_at_25_sampled() {
    let ring = RingParams::new(5, 2).unwrap();
    let ctx = Cyclo::for_ring(&ring);
    for fam in [Family::X1, Family::X2, Family::X3] {
        let specs = enumerate_specs(fam, &ring);
        for spec in specs.iter().step_by(specs.len() / 4) {
            let ch = Character::new(*spec, &ring, &ctx, CAP).unwrap();
            for r in [1, 3, 5] {
                let e = AddChar::new(&ring, r).unwrap();
                assert_eq!(
                    tau_closed(&ch, &e).unwrap(),
                    tau_oracle_subgroup(&ch, &e, CAP).unwrap(),
                    "{spec:?} r={r}"
                );
            }
        }
    }
}

#[test]
fn tau_closed_matches_oracle_at_81_sampled() {
    let ring = RingParams::new(3, 4).unwrap();
    let ctx = Cyclo::for_ring(&ring);
    for fam in [Family::X2, Family::X3] {
        let specs = enumerate_specs(fam, &ring);
        for spec in specs.iter().step_by(specs.len() / 2) {
            let ch = Character::new(*spec, &ring, &ctx, CAP).unwrap();
            for r in [1, 2] {
                let e = AddChar::new(&ring, r).unwrap();
                assert_eq!(
                    tau_closed(&ch, &e).unwrap(),
                    tau_oracle_subgroup(&ch, &e, CAP).unwrap(),
                    "{spec:?} r={r}"
                );
            }
        }
    }
}

#[test]
fn delta_second_family_is_unit() {
    let ring = RingParams::new(3, 2).unwrap();
    let d = delta_unit(OmegaFamily::X2 { eps: 2 }, &ring).unwrap();
    assert_eq!((d.value, d.is_unit), (4, true));
    assert_eq!(d.value % 3, 1);
}

#[test]
fn x4_vanishing_rules() {
    let lower = RingParams::new(3, 2).unwrap();
    let ring = RingParams::new(3, 3).unwrap();
    let ctx = Cyclo::for_ring(&ring);
    let lower_ctx = Cyclo::for_ring(&lower);
    let spec = enumerate_specs(Family::X2, &lower)[3];
    let theta =
        ThetaTable::from_character(&Character::new(spec, &lower, &lower_ctx, CAP).unwrap(), CAP)
            .unwrap();
    let zero = CycElem::zero(&ctx);
    assert_eq!(
        tau_x4(1, &theta, &ring, &ctx, &AddChar::new(&ring, 3).unwrap()).unwrap(),
        X4Tau::Exact(zero.clone())
    );
    assert_eq!(
        tau_x4(0, &theta, &ring, &ctx, &AddChar::new(&ring, 1).unwrap()).unwrap(),
        X4Tau::Exact(zero)
    );
    assert!(matches!(
        tau_x4(2, &theta, &ring, &ctx, &AddChar::new(&ring, 1).unwrap()).unwrap(),
        X4Tau::Residual(_)
    ));
    assert!(tau_x4(3, &theta, &ring, &ctx, &AddChar::new(&ring, 1).unwrap()).is_err());
}
