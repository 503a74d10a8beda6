//! Keeps the shipped proof files in `fixtures/` in sync with the in-code
//! fixture library.
//!
//! To regenerate after changing the library:
//!
//! ```text
//! cargo test -p teamlogic --test fixture_files -- --ignored regenerate
//! ```

use std::path::PathBuf;

use teamlogic::proof::fixtures::all_fixtures;
use teamlogic::proof::{check_derivation, derivation_from_json, derivation_to_json};

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
#[ignore = "writes into the source tree; run explicitly to regenerate"]
fn regenerate() {
    let dir = fixtures_dir();
    std::fs::create_dir_all(&dir).unwrap();
    for fixture in all_fixtures() {
        let path = dir.join(format!("{}.json", fixture.name));
        let text = derivation_to_json(fixture.system, &fixture.derivation);
        std::fs::write(&path, text + "\n").unwrap();
    }
}

#[test]
fn shipped_files_match_the_library() {
    let dir = fixtures_dir();
    let fixtures = all_fixtures();
    for fixture in &fixtures {
        let path = dir.join(format!("{}.json", fixture.name));
        let text = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; regenerate the fixture files", path.display()));
        let (system, derivation) = derivation_from_json(&text).unwrap();
        assert_eq!(system, Some(fixture.system), "{}", fixture.name);
        assert_eq!(derivation, fixture.derivation, "{} is stale", fixture.name);
    }
    // No stray files either.
    let on_disk = std::fs::read_dir(&dir).unwrap().count();
    assert_eq!(on_disk, fixtures.len(), "stray files in fixtures/");
}

#[test]
fn shipped_files_check_out(){
    for fixture in all_fixtures() {
        let path = fixtures_dir().join(format!("{}.json", fixture.name));
        let (system, derivation) = derivation_from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
        let (conclusion, _) = check_derivation(&derivation, system.unwrap()).unwrap();
        assert_eq!(&conclusion, fixture.derivation.conclusion());
    }
}
