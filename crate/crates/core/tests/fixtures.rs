//! The checked-in fixture files match the builders and parse back to the
//! same graphs. LOGMODULI_REGEN=1 rewrites them.

use std::path::PathBuf;

use logmoduli::document::{parse_document, GraphDocument};
use logmoduli::examples::fixture_files;

fn fixture_dir() -> PathBuf {
    match std::env::var_os("LOGMODULI_FIXTURES") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    }
}

#[test]
fn fixtures_match_builders() {
    let dir = fixture_dir();
    let regen = std::env::var("LOGMODULI_REGEN").is_ok_and(|v| v == "1");
    if regen {
        std::fs::create_dir_all(&dir).unwrap();
    }
    let mut stale = vec![];
    for (name, body) in fixture_files() {
        let path = dir.join(name);
        if regen {
            std::fs::write(&path, &body).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(on_disk) if on_disk == body => {}
            _ => stale.push(name),
        }
    }
    assert!(stale.is_empty(), "stale fixtures {stale:?}; rerun with LOGMODULI_REGEN=1");
}

#[test]
fn fixtures_round_trip() {
    for (name, body) in fixture_files() {
        if name.ends_with("_characters.json") || name == "empty_graph.json" {
            continue;
        }
        let doc = parse_document(&body).unwrap_or_else(|e| panic!("{name}: {e}"));
        let g = doc.graph().unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut again = GraphDocument::from_graph(&g);
        again.sections = doc.sections.clone();
        again.characters = doc.characters.clone();
        again.profile = doc.profile.clone();
        again.ghost = doc.ghost.clone();
        let mut doc = doc;
        again.canonicalize();
        doc.canonicalize();
        assert_eq!(again.to_json(), doc.to_json(), "{name}");
    }
}

#[test]
fn empty_graph_is_rejected_with_a_path() {
    let body = fixture_files().into_iter().find(|(n, _)| *n == "empty_graph.json").unwrap().1;
    let err = parse_document(&body).unwrap().graph().unwrap_err();
    assert!(err.to_string().contains("$.vertices"), "{err}");
}
