use definetti::classes::{sample_spec, FreeClass};
use definetti::cumulant::FreeFamily;
use definetti::fixtures;
use definetti::invariance::{check_2_exchangeable, check_invariance, Coefficients};
use definetti::qgroup::{coproduct_lift, MatrixRep};
use definetti::Execution;

fn family(class: FreeClass, n: usize, order: usize) -> FreeFamily {
    FreeFamily::new(sample_spec(class, 0).unwrap().full_table().unwrap().truncated(order), n).unwrap()
}

fn invariant(class: FreeClass, rep: &MatrixRep, order: usize) -> bool {
    let joint = family(class, rep.n(), order);
    check_invariance(&joint, rep, order, Coefficients::Identity, Execution::default()).unwrap().invariant
}

#[test]
fn permutations_preserve_every_free_family() {
    let rep = fixtures::permutation(3).unwrap();
    for class in FreeClass::NINE {
        assert!(invariant(class, &rep, 4), "{class}");
    }
}

#[test]
fn circular_is_unitarily_invariant() {
    for rep in [fixtures::quarter_turn(2).unwrap(), fixtures::complex_rotation(2).unwrap()] {
        assert!(invariant(FreeClass::Circular, &rep, 4));
    }
}

#[test]
fn m_unitary_needs_roots_of_unity() {
    assert!(invariant(FreeClass::MUnitary(3), &fixtures::root_of_unity(3, 2).unwrap(), 5));
    assert!(!invariant(FreeClass::MUnitary(3), &fixtures::irrational_phase(2).unwrap(), 5));
}

#[test]
fn semicircular_fails_under_quarter_turn() {
    let joint = family(FreeClass::Semicircular, 2, 4);
    let v = check_invariance(&joint, &fixtures::quarter_turn(2).unwrap(), 4, Coefficients::Identity, Execution::default())
        .unwrap();
    assert!(!v.invariant);
    assert_eq!(v.first_violation.unwrap().order, 2);
}

#[test]
fn invariance_survives_the_coproduct() {
    let rep = fixtures::rotation(2).unwrap();
    let lift = coproduct_lift(&rep, &rep).unwrap();
    assert!(invariant(FreeClass::Orthogonal, &lift, 4));
    assert!(invariant(FreeClass::Semicircular, &lift, 4));
}

#[test]
fn matrix_valued_coefficients() {
    let spec = sample_spec(FreeClass::Orthogonal, 0).unwrap();
    let table = spec.full_table().unwrap().truncated(4).amplify(2).unwrap();
    let joint = FreeFamily::new(table, 2).unwrap();
    let rep = fixtures::rotation(2).unwrap();
    let v = check_invariance(&joint, &rep, 4, Coefficients::NonCommuting { seed: 0 }, Execution::default()).unwrap();
    assert!(v.invariant, "{:?}", v.first_violation);
}

#[test]
fn free_copies_are_exchangeable() {
    for class in FreeClass::NINE {
        assert!(check_2_exchangeable(&family(class, 2, 4), Coefficients::Identity, 1e-9).unwrap(), "{class}");
    }
}

#[test]
fn sequential_and_parallel_verdicts_match() {
    let joint = family(FreeClass::RDiagonal, 3, 4);
    let rep = fixtures::sign_diagonal(3).unwrap();
    let a = check_invariance(&joint, &rep, 4, Coefficients::Identity, Execution::Sequential).unwrap();
    let b = check_invariance(&joint, &rep, 4, Coefficients::Identity, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
