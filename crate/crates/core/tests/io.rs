use definetti::classes::{sample_spec, FreeClass};
use definetti::cumulant::{CumulantTable, Lattice};
use definetti::io::{
    load_rep, load_spec, rep_from_json, rep_to_json, spec_from_json, spec_to_json, table_from_records,
    table_records, write_fixtures,
};
use definetti::qgroup::{BlockMatrix, MatrixRep};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn records_round_trip(seed in any::<u64>(), p in 1usize..=2, order in 1usize..=4, n in 1usize..=2) {
        let t = CumulantTable::random(p, order, n, seed).unwrap();
        let json = serde_json::to_string(&table_records(&t)).unwrap();
        let back = table_from_records(p, order, &serde_json::from_str::<Vec<_>>(&json).unwrap()).unwrap();
        prop_assert_eq!(back.dist(&t), 0.0);
    }

    #[test]
    fn rep_json_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = definetti::qgroup::random_unitary(n, &mut rng);
        let rep = MatrixRep::new(BlockMatrix::from_flat(n, 1, &u).unwrap(), 1e-9).unwrap();
        prop_assert_eq!(rep_from_json(&rep_to_json(&rep)).unwrap(), rep);
    }
}

#[test]
fn spec_json_round_trip() {
    for tag in FreeClass::NINE {
        let spec = sample_spec(tag, 3).unwrap();
        let back = spec_from_json(&spec_to_json(&spec), Lattice::Free).unwrap();
        assert_eq!(back.table().dist(spec.table()), 0.0, "{tag}");
    }
}

#[test]
fn written_fixtures_load() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_fixtures(dir.path()).unwrap();
    assert!(files.len() >= 24);
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).unwrap();
        if text.contains("\"entries\"") {
            let loaded = load_rep(&path);
            assert_eq!(loaded.is_ok(), name != "bistochastic_printed.json", "{name}");
        } else {
            load_spec(&path, Lattice::Free).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(rep_from_json("{\"n\": 1, \"d\": 1, \"entries\": [[[[1.0]]]]}").is_err());
    assert!(rep_from_json("{\"n\": 1, \"d\": 1, \"entries\": [[[[[1.0, 0.0]]]]], \"extra\": 1}").is_err());
    assert!(spec_from_json("{\"order\": 2, \"cumulants\": [{\"pattern\": \"1x\", \"value\": [1.0, 0.0]}]}", Lattice::Free).is_err());
}
