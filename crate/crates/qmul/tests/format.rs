use qmul::text::{emit, emit_json, parse, parse_json};
use qmul_core::blocks::{build_lookup, build_lookup_uncompute, LookupSpec};
use qmul_core::multipliers::{build, uncompute_garbage};
use qmul_core::oracle::largest_prime_of_width;
use qmul_core::{BigUint, ModPParams, MultiplierKind, Variant};

#[test]
fn every_multiplier_roundtrips() {
    for kind in MultiplierKind::ALL {
        for n in [2usize, 5] {
            let params = kind.is_mod_p().then(|| ModPParams::new(largest_prime_of_width(n as u32), n as u32, 2).unwrap());
            let c = build(kind, n, params.as_ref()).unwrap();
            let text = emit(&c);
            assert_eq!(parse(&text).unwrap(), c, "{kind} n={n}");
            assert_eq!(emit(&parse(&text).unwrap()), text);
            assert_eq!(parse_json(&emit_json(&c)).unwrap(), c, "{kind} n={n}");
        }
    }
}

#[test]
fn uncompute_and_lookups_roundtrip() {
    let params = ModPParams::new(BigUint::from(13u32), 4, 3).unwrap();
    for variant in [Variant::Classic, Variant::AddSub] {
        let c = uncompute_garbage(&params, variant).unwrap();
        assert_eq!(parse(&emit(&c)).unwrap(), c);
    }
    let table = (0..8u32).map(|v| BigUint::from(v * 5 % 16)).collect();
    let spec = LookupSpec::new(3, 4, table).unwrap();
    for c in [build_lookup(&spec).unwrap(), build_lookup_uncompute(&spec).unwrap()] {
        assert_eq!(parse(&emit(&c)).unwrap(), c);
    }
}

#[test]
fn malformed_input_is_rejected() {
    for src in [
        "# qubits: 2\ncnot q0 q0\n",
        "# qubits: 2\nunand q0 q1 q1\n",
        "# qubits: 3\nunand q0 q1 q2\n",
        "# qubits: 3\n# register x: q0..q1\n# register y: q1..q2\n",
        "# qubits: 4\nlookup q0 -> q1..q2 : 1,2,3\n",
        "# qubits: 2\n# block b 0..5\nnot q0\n",
        "# qubits: 2\n# check 0 q0 sometimes\n",
        "# qubits: x\n",
    ] {
        assert!(parse(src).is_err(), "{src}");
    }
}
