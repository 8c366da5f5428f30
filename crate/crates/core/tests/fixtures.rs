use std::path::PathBuf;

use detour_core::verify::{paper_witness, witness_names};
use detour_core::{parse_instance, serialize_instance};

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn every_witness_ships_as_a_fixture() {
    for name in witness_names() {
        let path = fixtures_dir().join(format!("{name}.inst"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let w = paper_witness(name).unwrap();
        assert_eq!(parse_instance(&text).unwrap(), w.instance, "{name}");
        let first = text.lines().next().unwrap();
        assert!(first.starts_with(&format!("# {name}: {}", w.anchor)), "{first}");
    }
}

#[test]
fn fixtures_round_trip() {
    for entry in std::fs::read_dir(fixtures_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "inst") {
            let inst = parse_instance(&std::fs::read_to_string(&path).unwrap()).unwrap();
            assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        }
    }
}
