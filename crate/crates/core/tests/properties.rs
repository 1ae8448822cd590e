use num_bigint::BigUint;
use proptest::prelude::*;
use qmul_core::blocks::{
    build_adder, build_const_adder, build_controlled_adder, build_controlled_addsub, build_subtractor, AdderSpec,
    CarryIn, Control,
};
use qmul_core::multipliers::{build_mod2n, build_modp, build_schoolbook};
use qmul_core::sim::inputs;
use qmul_core::{count_resources, run, BasisState, Circuit, Execution, ModPParams, QubitId, Variant};

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn out(c: &Circuit, pairs: &[(&str, u64)]) -> std::collections::BTreeMap<String, BigUint> {
    run(c, &inputs(pairs.iter().map(|&(k, v)| (k, big(v))))).unwrap()
}

fn roundtrip(c: &Circuit, seed_bits: &[bool]) {
    let mut state = BasisState::zeros(c.qubit_count() as usize);
    for (i, &b) in seed_bits.iter().cycle().take(state.len()).enumerate() {
        state.set(QubitId(i as u32), b);
    }
    let forward = Execution::unchecked(c, state.clone()).finish().unwrap();
    let inverse = c.invert();
    let back = Execution::unchecked(&inverse, forward).finish().unwrap();
    assert_eq!(back, state);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adder_semantics(n in 1usize..=12, a in any::<u64>(), b in any::<u64>(), cin in any::<bool>(), carry in any::<bool>()) {
        let mask = (1u64 << n) - 1;
        let (a, b) = (a & mask, b & mask);
        let carry_in = if cin { CarryIn::Qubit } else { CarryIn::Absent };
        let c = build_adder(n, carry, carry_in).unwrap();
        let mut pairs = vec![("a", a), ("b", b)];
        if cin {
            pairs.push(("cin", 1));
        }
        let r = out(&c, &pairs);
        let sum = a + b + cin as u64;
        let expect = if carry { sum } else { sum & mask };
        let got = if carry { &r["b"] + (&r["carry"] << n) } else { r["b"].clone() };
        prop_assert_eq!(got, big(expect));
        prop_assert_eq!(&r["a"], &big(a));
        prop_assert_eq!(count_resources(&c).counted_toffoli, AdderSpec::plain(n, carry).toffoli_cost());
    }

    #[test]
    fn subtractor_semantics(n in 1usize..=12, a in any::<u64>(), b in any::<u64>(), borrow in any::<bool>()) {
        let mask = (1u64 << n) - 1;
        let (a, b) = (a & mask, b & mask);
        let c = build_subtractor(n, borrow).unwrap();
        let r = out(&c, &[("a", a), ("b", b)]);
        if borrow {
            prop_assert_eq!(&r["b"] + (&r["carry"] << n), big(b + (1 << n) - a));
        } else {
            prop_assert_eq!(&r["b"], &big(b.wrapping_sub(a) & mask));
        }
    }

    #[test]
    fn controlled_blocks(n in 1usize..=10, a in any::<u64>(), b in any::<u64>(), ctrl in any::<bool>(), carry in any::<bool>()) {
        let mask = (1u64 << n) - 1;
        let (a, b, k) = (a & mask, b & mask, ctrl as u64);
        let c = build_controlled_adder(n, carry).unwrap();
        let r = out(&c, &[("ctrl", k), ("a", a), ("b", b)]);
        let sum = b + k * a;
        let got = if carry { &r["b"] + (&r["carry"] << n) } else { r["b"].clone() };
        prop_assert_eq!(got, big(if carry { sum } else { sum & mask }));
        prop_assert_eq!(count_resources(&c).counted_toffoli, AdderSpec::controlled(n, carry, Control::Adder).toffoli_cost());

        let c = build_controlled_addsub(n, carry).unwrap();
        let r = out(&c, &[("ctrl", k), ("a", a), ("b", b)]);
        let got = if carry { &r["b"] + (&r["carry"] << n) } else { r["b"].clone() };
        let expect = match (ctrl, carry) {
            (true, true) => b + a,
            (true, false) => (b + a) & mask,
            (false, true) => b + (1 << n) - a,
            (false, false) => b.wrapping_sub(a) & mask,
        };
        prop_assert_eq!(got, big(expect));
        prop_assert_eq!(count_resources(&c).counted_toffoli, AdderSpec::controlled(n, carry, Control::AddSub).toffoli_cost());
    }

    #[test]
    fn const_adder_semantics(n in 1usize..=12, c in any::<u64>(), b in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (c, b) = (c & mask, b & mask);
        let circuit = build_const_adder(n, &big(c)).unwrap();
        prop_assert_eq!(&out(&circuit, &[("b", b)])["b"], &big((b + c) & mask));
    }

    #[test]
    fn adding_twice_matches_adding_the_sum(n in 1usize..=10, a1 in any::<u64>(), a2 in any::<u64>(), b in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let c = build_adder(n, false, CarryIn::Absent).unwrap();
        let step = out(&c, &[("a", a1 & mask), ("b", b & mask)])["b"].clone();
        let step: u64 = step.try_into().unwrap();
        let twice = out(&c, &[("a", a2 & mask), ("b", step)])["b"].clone();
        let once = out(&c, &[("a", ((a1 & mask) + (a2 & mask)) & mask), ("b", b & mask)])["b"].clone();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn inversion_roundtrip(n in 1usize..=5, bits in proptest::collection::vec(any::<bool>(), 1..64)) {
        for variant in [Variant::Classic, Variant::AddSub] {
            roundtrip(&build_schoolbook(n, variant).unwrap(), &bits);
            roundtrip(&build_mod2n(n, variant).unwrap(), &bits);
        }
        roundtrip(&build_controlled_addsub(n, true).unwrap(), &bits);
    }
}

#[test]
fn modp_inversion_roundtrip() {
    let params = ModPParams::new(big(13), 4, 2).unwrap();
    for variant in [Variant::Classic, Variant::AddSub] {
        let c = build_modp(&params, variant).unwrap();
        for seed in [[true, false, true].as_slice(), &[false, false, true, true, true], &[true]] {
            roundtrip(&c, seed);
        }
        let inverse = c.invert();
        assert_eq!(inverse.invert().gates(), c.gates());
        assert!((count_resources(&inverse).nominal_toffoli - count_resources(&c).nominal_toffoli).abs() < 1e-9);
    }
}
