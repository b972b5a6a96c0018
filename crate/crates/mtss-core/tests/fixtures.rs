//! Fixture corpus health: every committed document must be canonical
//! bytes, the clean corpus must lint clean, the warning corpus must carry
//! exactly its intended finding, and the bad corpus must fail with its
//! intended parse code.

mod common;

use common::{fixture_paths, load_script};
use mtss_core::parser::{parse_document, serialize, ParseCode};
use mtss_core::validator::{validate, RuleCode, Severity};

#[test]
fn corpus_is_large_enough() {
    let clean = fixture_paths("clean").len();
    let valid = fixture_paths("valid").len();
    assert!(clean >= 12, "want a rich clean corpus, have {clean}");
    assert!(clean + valid >= 20, "round-trip corpus too small");
}

#[test]
fn committed_fixtures_are_canonical_bytes() {
    for path in fixture_paths("clean").into_iter().chain(fixture_paths("valid")) {
        let bytes = std::fs::read(&path).unwrap();
        let script = load_script(&path);
        let canonical = serialize(&script);
        assert_eq!(
            canonical.as_bytes(),
            &bytes[..],
            "{} is not canonically formatted; run the rewrite_fixtures helper",
            path.display()
        );
    }
}

#[test]
fn clean_corpus_lints_clean() {
    for path in fixture_paths("clean") {
        let script = load_script(&path);
        let diags = validate(&script);
        assert!(
            diags.is_empty(),
            "{} should be clean, found: {}",
            path.display(),
            diags
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        );
    }
}

#[test]
fn warning_fixtures_carry_their_intended_findings() {
    let expectations = [
        ("gap_shots", Some(RuleCode::W104)),
        ("offscreen_speaker", Some(RuleCode::W103)),
        ("unbound_sfx", Some(RuleCode::W105)),
        ("unlisted_overlap", Some(RuleCode::W102)),
        ("unused_entity", Some(RuleCode::W101)),
        ("zero_duration", None),
    ];
    for path in fixture_paths("valid") {
        let stem = path.file_stem().unwrap().to_string_lossy().replace(".mtss", "");
        let script = load_script(&path);
        let diags = validate(&script);
        assert_eq!(
            diags.error_count(),
            0,
            "{} must stay error-free",
            path.display()
        );
        let expected = expectations
            .iter()
            .find(|(name, _)| *name == stem)
            .map(|(_, code)| *code)
            .expect("every valid fixture has an expectation entry");
        match expected {
            Some(code) => assert!(
                diags.has_code(code),
                "{} should trigger {code}",
                path.display()
            ),
            None => assert!(diags.is_empty(), "{} should be clean", path.display()),
        }
    }
}

#[test]
fn bad_fixtures_fail_with_their_intended_codes() {
    let expectations = [
        ("syntax", ParseCode::P001),
        ("unknown_field", ParseCode::P002),
        ("wrong_type", ParseCode::P003),
        ("bad_range", ParseCode::P004),
        ("bad_marker", ParseCode::P005),
        ("duplicate_id", ParseCode::P004),
        ("bad_utf8", ParseCode::P001),
    ];
    for path in fixture_paths("bad") {
        let stem = path.file_stem().unwrap().to_string_lossy().replace(".mtss", "");
        let bytes = std::fs::read(&path).unwrap();
        let diags = parse_document(&bytes).expect_err("bad fixture must not parse");
        let expected = expectations
            .iter()
            .find(|(name, _)| *name == stem)
            .map(|(_, code)| *code)
            .expect("every bad fixture has an expectation entry");
        assert!(
            diags.iter().any(|d| d.code == expected),
            "{} should fail with {expected}, got: {}",
            path.display(),
            diags
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        );
    }
}

#[test]
fn lint_fixture_dangles() {
    let path = common::fixture_dir("lint").join("dangling.mtss.json");
    let script = load_script(&path);
    let diags = validate(&script);
    assert!(diags.has_code(RuleCode::E001));
    assert_eq!(diags.iter().filter(|d| d.severity == Severity::Error).count(), 1);
}

#[test]
fn lint_fixture_noncanonical_parses_but_differs() {
    let path = common::fixture_dir("lint").join("noncanonical.mtss.json");
    let bytes = std::fs::read(&path).unwrap();
    let script = parse_document(&bytes).expect("noncanonical fixture still parses");
    assert_ne!(serialize(&script).as_bytes(), &bytes[..]);
}

/// Maintenance helper, not part of the suite: rewrites every clean/valid
/// fixture into canonical bytes in place.
///
/// cargo test -p mtss-core --test fixtures -- --ignored rewrite_fixtures
#[test]
#[ignore]
fn rewrite_fixtures() {
    for path in fixture_paths("clean").into_iter().chain(fixture_paths("valid")) {
        let script = load_script(&path);
        std::fs::write(&path, serialize(&script)).unwrap();
        println!("rewrote {}", path.display());
    }
}
