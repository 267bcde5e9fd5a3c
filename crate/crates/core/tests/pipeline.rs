use std::sync::Arc;

use cubic_rings::classify::{classify, embedding_dim};
use cubic_rings::duality::{is_gorenstein, trace_dual};
use cubic_rings::families::{enumerate_closed, Subscript};
use cubic_rings::ideals::{is_isomorphic, iso_classes};
use cubic_rings::lattice::LatticeJson;
use cubic_rings::overrings::brute_force_overrings;
use cubic_rings::{make_family, recognize, BranchCase, CubicAlgebra, FamilyDescriptor, Lattice, RingConfig};

fn alg(p: u32, case: BranchCase) -> Arc<CubicAlgebra> {
    Arc::new(CubicAlgebra::new(RingConfig::new(p, 20).unwrap(), case).unwrap())
}

#[test]
fn json_round_trip_through_names_and_lattices() {
    for case in BranchCase::ALL {
        let a = alg(7, case);
        for d in enumerate_closed(7, case, 2) {
            let text = serde_json::to_string(&d).unwrap();
            let back: FamilyDescriptor = serde_json::from_str(&text).unwrap();
            assert_eq!(back, d);
            let l = make_family(&a, &d).unwrap();
            let j: LatticeJson = serde_json::from_str(&serde_json::to_string(&l).unwrap()).unwrap();
            let l2 = Lattice::from_json(&j, None).unwrap();
            assert_eq!(l2.hnf(), l.hnf());
            assert_eq!(recognize(&l2).unwrap(), d.canonical());
        }
    }
}

#[test]
fn scanned_overrings_are_named_and_classified() {
    let a = alg(5, BranchCase::TwoBranchesRamified);
    for b in brute_force_overrings(&a, 3).unwrap() {
        let c = classify(&b).unwrap();
        assert_eq!(make_family(&a, &c.descriptor).unwrap(), b);
        if let Some(e) = c.edim {
            assert_eq!(c.singularity.is_some(), e == 2 && b != Lattice::full(&a));
        }
    }
}

#[test]
fn self_dual_exactly_when_edim_two() {
    // the dual of the dual needs room for three colengths
    let a = Arc::new(CubicAlgebra::new(RingConfig::new(7, 32).unwrap(), BranchCase::OneBranchRamified).unwrap());
    for rho in 1..=4 {
        let d = FamilyDescriptor::shifted(
            BranchCase::OneBranchRamified,
            0,
            Subscript::Rho(rho),
            vec![1; (rho / 2) as usize],
        );
        let c = make_family(&a, &d).unwrap();
        assert_eq!(embedding_dim(&c).unwrap(), 2);
        assert!(is_gorenstein(&c).unwrap());
        let shifted = FamilyDescriptor { k: 1, ..d };
        let s = make_family(&a, &shifted).unwrap();
        assert_eq!(embedding_dim(&s).unwrap(), 3);
        assert!(!is_gorenstein(&s).unwrap());
        assert!(is_isomorphic(&trace_dual(&trace_dual(&s).unwrap()).unwrap(), &s).unwrap());
    }
}

#[test]
fn a1_class_counts_per_case() {
    let expected = [4, 3, 5, 4, 6];
    for (case, n) in BranchCase::ALL.into_iter().zip(expected) {
        let a = alg(5, case);
        let c = make_family(&a, &FamilyDescriptor::am(case, 1)).unwrap();
        let census = iso_classes(&c).unwrap();
        assert_eq!(census.len(), n, "{case}");
        assert_eq!(census.unexpected(), 0);
    }
}
