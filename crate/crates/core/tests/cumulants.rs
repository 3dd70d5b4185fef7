use definetti::algebra::Elem;
use definetti::cumulant::{
    all_words, classical_cumulants_to_moments, cumulants_from_moments, eval_partitioned_classical,
    eval_partitioned_free, eval_partitioned_free_with, free_cumulants_to_moments, moments_to_classical_cumulants,
    moments_to_free_cumulants, multivariate_cumulants_from_joint_moments, single, vars_of, word, CumulantTable,
    FoldOrder, FreeFamily, Lattice, MomentOracle,
};
use definetti::partition::{noncrossing_partitions, StarPattern};
use definetti::Execution;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_elem(p: usize, rng: &mut ChaCha8Rng) -> Elem {
    let rows: Vec<Vec<Complex64>> = (0..p)
        .map(|_| (0..p).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect();
    Elem::from_rows(&rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn free_round_trip(seed in any::<u64>(), order in 1usize..=6) {
        let t = CumulantTable::random(1, order, 1, seed).unwrap();
        let back = moments_to_free_cumulants(&free_cumulants_to_moments(&t, order).unwrap(), order).unwrap();
        prop_assert!(back.dist(&t) <= 1e-9);
    }

    #[test]
    fn classical_round_trip(seed in any::<u64>(), order in 1usize..=6) {
        let t = CumulantTable::random(1, order, 1, seed).unwrap();
        let back =
            moments_to_classical_cumulants(&classical_cumulants_to_moments(&t, order).unwrap(), order).unwrap();
        prop_assert!(back.dist(&t) <= 1e-9);
    }

    #[test]
    fn matrix_round_trip(seed in any::<u64>(), order in 1usize..=4) {
        let t = CumulantTable::random(2, order, 1, seed).unwrap();
        let back = moments_to_free_cumulants(&free_cumulants_to_moments(&t, order).unwrap(), order).unwrap();
        prop_assert!(back.dist(&t) <= 1e-9);
    }

    #[test]
    fn low_orders_agree(seed in any::<u64>()) {
        let t = CumulantTable::random(1, 3, 1, seed).unwrap();
        let m = free_cumulants_to_moments(&t, 3).unwrap();
        let free = moments_to_free_cumulants(&m, 3).unwrap();
        let classical = moments_to_classical_cumulants(&m, 3).unwrap();
        prop_assert!(free.dist(&classical) <= 1e-12);
    }

    #[test]
    fn multilinear_in_each_coefficient(seed in any::<u64>(), k in 1usize..=5, slot in 0usize..6, imag in any::<bool>()) {
        let slot = slot % (k + 1);
        let t = CumulantTable::random(2, k, 1, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<Elem> = (0..=k).map(|_| random_elem(2, &mut rng)).collect();
        let lambda = if imag { Complex64::new(0.0, 1.0) } else { Complex64::new(2.0, 0.0) };
        let mut scaled = coeffs.clone();
        scaled[slot] = scaled[slot].scale(lambda);
        let pattern = StarPattern::all(k)[seed as usize % (1 << k)].clone();
        let w = single(&pattern);
        for p in noncrossing_partitions(k).unwrap() {
            let base = eval_partitioned_free(&t, &p, &w, &coeffs).unwrap();
            let got = eval_partitioned_free(&t, &p, &w, &scaled).unwrap();
            prop_assert!(got.dist(&base.scale(lambda)) <= 1e-12 * (1.0 + base.max_abs()));
        }
    }

    #[test]
    fn fold_order_is_irrelevant(seed in any::<u64>(), k in 1usize..=5) {
        let t = CumulantTable::random(2, k, 1, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let coeffs: Vec<Elem> = (0..=k).map(|_| random_elem(2, &mut rng)).collect();
        for pattern in StarPattern::all(k) {
            let w = single(&pattern);
            for p in noncrossing_partitions(k).unwrap() {
                let left = eval_partitioned_free_with(&t, &p, &w, &coeffs, FoldOrder::Leftmost).unwrap();
                let right = eval_partitioned_free_with(&t, &p, &w, &coeffs, FoldOrder::Rightmost).unwrap();
                prop_assert!(left.dist(&right) <= 1e-12 * (1.0 + left.max_abs()));
            }
        }
    }
}

#[test]
fn free_families_have_no_mixed_cumulants() {
    for (n, p, order) in [(2, 1, 5), (3, 1, 5), (2, 2, 3)] {
        let single_table = CumulantTable::random(p, order, 1, 11).unwrap();
        let fam = FreeFamily::new(single_table.clone(), n).unwrap();
        let joint = multivariate_cumulants_from_joint_moments(&fam, n, order).unwrap();
        for k in 1..=order {
            for w in all_words(n, k) {
                let vars = vars_of(&w);
                let got = joint.get(&w).unwrap().map_or(0.0, |t| t.max_abs());
                if vars.iter().any(|&v| v != vars[0]) {
                    assert!(got <= 1e-9, "mixed cumulant {got:e} at n={n}, p={p}");
                } else {
                    let same = single(&definetti::cumulant::pattern_of(&w));
                    let want = single_table.get(&same).unwrap();
                    let diff = match (joint.get(&w).unwrap(), want) {
                        (Some(a), Some(b)) => a.dist(b),
                        (Some(a), None) | (None, Some(a)) => a.max_abs(),
                        (None, None) => 0.0,
                    };
                    assert!(diff <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn classical_product_form_is_multiplicative_for_scalars() {
    let t = CumulantTable::random(1, 4, 1, 3).unwrap();
    let p = definetti::partition::Partition::from_one_based(vec![vec![1, 3], vec![2, 4]]).unwrap();
    let w = single(&"1*1*".parse().unwrap());
    let ones = vec![Elem::real(1.0); 5];
    let got = eval_partitioned_classical(&t, &p, &w, &ones).unwrap().as_scalar().unwrap();
    let want = t.scalar(&single(&"11".parse().unwrap())).unwrap() * t.scalar(&single(&"**".parse().unwrap())).unwrap();
    assert!((got - want).norm() < 1e-12);
}

#[test]
fn sequential_and_parallel_conversions_agree() {
    let t = CumulantTable::random(2, 4, 1, 9).unwrap();
    let m = free_cumulants_to_moments(&t, 4).unwrap();
    let a = cumulants_from_moments(&m, 1, 4, Lattice::Free, Execution::Sequential).unwrap();
    let b = cumulants_from_moments(&m, 1, 4, Lattice::Free, Execution::Parallel).unwrap();
    assert_eq!(a.dist(&b), 0.0);
}

#[test]
fn joint_moment_of_free_semicirculars() {
    let mut t = CumulantTable::new(1, 4).unwrap();
    t.set_scalar(&single(&"11".parse().unwrap()), Complex64::new(1.0, 0.0)).unwrap();
    let fam = FreeFamily::new(t, 2).unwrap();
    let ones = vec![Elem::real(1.0); 5];
    // φ(x1 x2 x1 x2) = 0 and φ(x1 x1 x2 x2) = 1 for free semicirculars.
    let alt = fam.moment(&word(&[0, 1, 0, 1], &StarPattern::plain(4)).unwrap(), &ones).unwrap();
    let nested = fam.moment(&word(&[0, 0, 1, 1], &StarPattern::plain(4)).unwrap(), &ones).unwrap();
    assert!(alt.is_zero());
    assert!((nested.as_scalar().unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
}
