use iri::corpus::{corpus_dir, load_manifest, manifest_paths, replicate, run_manifest};
use iri::kripke::load_model;
use iri::proofs::Derivation;
use std::collections::BTreeSet;
use std::fs;

#[test]
fn replicate_passes_and_is_repeatable() {
    let root = corpus_dir();
    let first = replicate(&root).unwrap();
    for m in &first.manifests {
        let failures: Vec<_> = m.failures().collect();
        assert!(failures.is_empty(), "{}: {failures:#?}", m.manifest);
    }
    assert!(first.passed);
    let second = replicate(&root).unwrap();
    assert_eq!(
        serde_json::to_string(&first).unwrap(),
        serde_json::to_string(&second).unwrap()
    );
    let names: Vec<&str> = first.manifests.iter().map(|m| m.manifest.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn spec_named_manifests_pass() {
    for name in ["prop3.json", "undefinability.json"] {
        let report = run_manifest(&corpus_dir().join("manifests").join(name)).unwrap();
        assert!(report.passed, "{name}");
    }
}

/// Every bundled file loads and is cited by some claim; every claim cites
/// a file that exists.
#[test]
fn corpus_files_and_citations_agree() {
    let root = corpus_dir();
    let mut cited = BTreeSet::new();
    for path in manifest_paths(&root).unwrap() {
        let manifest = load_manifest(&path).unwrap();
        assert!(!manifest.claims.is_empty());
        for claim in &manifest.claims {
            assert!(!claim.tag.is_empty());
            assert!(!claim.anchor.is_empty());
            if let Some(f) = claim.file.as_ref().or(manifest.file.as_ref()) {
                cited.insert(f.clone());
            }
            if let Some(other) = claim.args.get("other").and_then(|v| v.as_str()) {
                cited.insert(other.to_string());
            }
        }
    }
    for f in &cited {
        assert!(root.join(f).is_file(), "{f} is cited but missing");
    }
    for dir in ["models", "derivations"] {
        for entry in fs::read_dir(root.join(dir)).unwrap() {
            let path = entry.unwrap().path();
            let rel = format!("{dir}/{}", path.file_name().unwrap().to_string_lossy());
            assert!(cited.contains(&rel), "{rel} is never cited");
            let text = fs::read_to_string(&path).unwrap();
            if dir == "models" {
                load_model(&text).unwrap();
            } else {
                Derivation::from_json(&text).unwrap();
            }
        }
    }
}

/// Models whose relations were read off a diagram say which claims pinned
/// them down.
#[test]
fn reconciled_models_list_their_constraints() {
    for name in ["prop3i.json", "remark_serial.json", "undef1_m.json", "undef1_m2.json"] {
        let text = fs::read_to_string(corpus_dir().join("models").join(name)).unwrap();
        let m = load_model(&text).unwrap();
        let comment = m.comment().unwrap_or_default();
        assert!(comment.contains("Constraints used:"), "{name}");
    }
}
