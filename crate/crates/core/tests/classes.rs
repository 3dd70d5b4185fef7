use definetti::classes::{
    class_implications, classify_classical, classify_free, free_upward_closure, sample_spec, ClassicalClass,
    CumulantSpec, FreeClass, DEFAULT_MMAX,
};
use definetti::cumulant::{moments_to_free_cumulants, single, CumulantTable, MomentTable};
use definetti::algebra::Elem;
use num_complex::Complex64;

#[test]
fn upward_closure_is_closed_under_implications() {
    let edges = class_implications(DEFAULT_MMAX);
    for tag in FreeClass::NINE {
        let up = free_upward_closure(tag, DEFAULT_MMAX);
        assert!(up.contains(&tag));
        for (a, b) in &edges {
            if up.contains(a) {
                assert!(up.contains(b), "{tag}: {a} in closure but {b} missing");
            }
        }
    }
}

#[test]
fn samples_classify_minimally_as_their_own_tag() {
    for tag in FreeClass::NINE {
        let spec = sample_spec(tag, 0).unwrap();
        let c = classify_free(&spec, 6, DEFAULT_MMAX).unwrap();
        assert_eq!(c.minimal, vec![tag], "{tag}: tags {:?}", c.tags);
        assert_eq!(c.tags, free_upward_closure(tag, DEFAULT_MMAX), "{tag}");
    }
}

#[test]
fn symmetric_agrees_at_low_order() {
    // Up to order 3 free and classical cumulants coincide.
    for seed in 0..8 {
        let t = CumulantTable::random(1, 3, 1, seed).unwrap();
        let spec = CumulantSpec::new(t, Elem::zero(1), false).unwrap();
        let f = classify_free(&spec, 3, DEFAULT_MMAX).unwrap();
        let c = classify_classical(&spec, 3, DEFAULT_MMAX).unwrap();
        assert_eq!(f.tags.contains(&FreeClass::Symmetric), c.tags.contains(&ClassicalClass::Symmetric));
    }
    let mut t = CumulantTable::new(1, 3).unwrap();
    t.set_scalar(&single(&"11".parse().unwrap()), Complex64::new(1.0, 0.0)).unwrap();
    let spec = CumulantSpec::new(t, Elem::zero(1), true).unwrap();
    assert!(classify_free(&spec, 3, DEFAULT_MMAX).unwrap().tags.contains(&FreeClass::Symmetric));
    assert!(classify_classical(&spec, 3, DEFAULT_MMAX).unwrap().tags.contains(&ClassicalClass::Symmetric));
}

fn haar(star: &[definetti::partition::Star]) -> Complex64 {
    let e: i64 = star.iter().map(|s| if *s == definetti::partition::Star::Plain { 1 } else { -1 }).sum();
    Complex64::new(if e == 0 { 1.0 } else { 0.0 }, 0.0)
}

#[test]
fn haar_unitary_is_r_diagonal() {
    let m = MomentTable::from_fn(6, false, haar);
    let kappa = moments_to_free_cumulants(&m, 6).unwrap();
    let spec = CumulantSpec::new(kappa, Elem::zero(1), false).unwrap();
    let c = classify_free(&spec, 6, DEFAULT_MMAX).unwrap();
    assert_eq!(c.minimal, vec![FreeClass::RDiagonal]);
    assert!(!c.tags.contains(&FreeClass::Circular));
}
