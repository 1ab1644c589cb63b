use std::sync::OnceLock;

use proptest::prelude::*;

use hklab::linalg::{Rational, RationalMatrix, Subspace};
use hklab::llv::{build_frame, random_anisotropic_basis, random_rotation, verify_derivation, LinearLambda};
use hklab::module_io::{export_module, load_module};
use hklab::quadratic::{default_tail, make_standard_space, witt_transport, IsotropicPlane};
use hklab::verbitsky::{build_verbitsky, DEFAULT_BUDGET};
use hklab::verifier::{nilpotence_profile, FrameData, Instance, InstanceConfig};

fn base() -> &'static Instance {
    static INST: OnceLock<Instance> = OnceLock::new();
    INST.get_or_init(|| Instance::build(&InstanceConfig::standard(2, 5, 0)).unwrap())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn frame_choice_does_not_change_dimensions(seed in 1u64..10_000) {
        let inst = base();
        let frame = build_frame(inst.data.space(), seed).unwrap();
        let other = FrameData::new(inst.data.module.clone(), frame).unwrap();
        prop_assert_eq!(other.big.dim_table(), inst.data.big.dim_table());
        prop_assert_eq!(nilpotence_profile(&other.m).unwrap(), nilpotence_profile(&inst.data.m).unwrap());
    }

    #[test]
    fn bigrading_is_symmetric_and_profile_dual(seed in 0u64..10_000) {
        let inst = base();
        let frame = build_frame(inst.data.space(), seed).unwrap();
        let data = FrameData::new(inst.data.module.clone(), frame).unwrap();
        prop_assert!(data.big.symmetry_violation().is_none());
        let p = nilpotence_profile(&data.m).unwrap();
        for (&d, &v) in &p.by_degree {
            prop_assert_eq!(Some(v), p.get(8 - d));
        }
    }

    #[test]
    fn transported_frames_give_valid_operators(seed in 0u64..10_000) {
        let inst = base();
        let space = inst.data.space();
        let g = random_rotation(space, seed).unwrap();
        let frame = inst.data.frame.transformed(space, &g).unwrap();
        let data = FrameData::new(inst.data.module.clone(), frame).unwrap();
        let r = verify_derivation(&inst.alg, &data.m, 20, seed).unwrap();
        prop_assert!(r.passed(), "{:?}", r.witness);
        prop_assert_eq!(data.m.block(2).pow(2).unwrap().is_zero(), true);
    }

    #[test]
    fn lambda_is_basis_independent(seed in 0u64..10_000) {
        let inst = base();
        let basis = random_anisotropic_basis(inst.data.space(), seed).unwrap();
        let other = LinearLambda::new(&inst.data.module, &basis).unwrap();
        prop_assert_eq!(inst.data.lambda.agrees_with(&other).unwrap(), None);
    }

    #[test]
    fn witt_transport_lands_in_so(b2 in 4usize..8, s1 in 0u64..1000, s2 in 0u64..1000) {
        let space = make_standard_space(b2, &default_tail(b2)).unwrap();
        let plane = |seed| {
            let f = build_frame(&space, seed).unwrap();
            IsotropicPlane::new(&space, f.s, f.beta).unwrap()
        };
        let (p, q) = (plane(s1), plane(s2));
        let g = witt_transport(&space, &p, &q).unwrap();
        let m = &g.matrix;
        prop_assert_eq!(&m.transpose().mul(space.gram()).unwrap().mul(m).unwrap(), space.gram());
        prop_assert_eq!(m.det().unwrap(), Rational::one());
        prop_assert_eq!(m.mul(&g.inverse().matrix).unwrap(), RationalMatrix::identity(b2));
        let image = Subspace::span(b2, &[g.apply(&p.v1), g.apply(&p.v2)]).unwrap();
        prop_assert_eq!(image, q.span());
    }

    #[test]
    fn isotropic_samples_are_isotropic(b2 in 4usize..8, seed in 0u64..10_000) {
        let space = make_standard_space(b2, &default_tail(b2)).unwrap();
        for v in space.sample_isotropic(4, seed).unwrap() {
            prop_assert!(space.quadratic(&v).unwrap().is_zero());
            prop_assert!(v.iter().any(|x| !x.is_zero()));
        }
    }
}

proptest! {
    #![proptest_config(config(4))]

    #[test]
    fn builds_are_deterministic_and_exports_round_trip(n in 1usize..3, b2 in 4usize..7, seed in 0u64..1000) {
        let space = make_standard_space(b2, &default_tail(b2)).unwrap();
        let a = build_verbitsky(&space, n, DEFAULT_BUDGET, seed).unwrap();
        let b = build_verbitsky(&space, n, DEFAULT_BUDGET, seed).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let frame = build_frame(&space, seed).unwrap();
        let json = export_module(&a, &frame).unwrap();
        prop_assert_eq!(load_module(&json).unwrap().to_json().unwrap(), json);
    }
}
