use std::path::PathBuf;

use rnaqubo::dataset::{
    emit_ct, parse_ct, read_ct, read_sequence, CtOptions, CtRecord, DatasetError, PkClass,
};
use rnaqubo::scoring::{confusion, structure_mcc};
use rnaqubo::{DatasetManifest, Split};

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

#[test]
fn golden_ct_pairs() {
    let (seq, s) = read_ct(&data("fixtures/golden.ct")).unwrap();
    assert_eq!(seq.id, "golden_hpk");
    assert_eq!(seq.len(), 26);
    let pairs: Vec<_> = s.pairs().iter().copied().collect();
    assert_eq!(
        pairs,
        vec![(1, 15), (2, 14), (3, 13), (4, 12), (8, 20), (9, 19), (10, 18), (23, 26)]
    );
    assert!(s.is_pseudoknotted());

    let fasta = read_sequence(&data("fixtures/golden.fa")).unwrap();
    assert_eq!(fasta.bases(), seq.bases());
}

#[test]
fn golden_score() {
    let (_, truth) = read_ct(&data("fixtures/golden.ct")).unwrap();
    let (_, pred) = read_ct(&data("fixtures/golden_pred.ct")).unwrap();
    let c = confusion(&pred, &truth).unwrap();
    assert_eq!((c.tp, c.fp, c.fn_, c.tn), (4, 0, 4, 317));
    let v = structure_mcc(&pred, &truth).unwrap();
    assert!((v - 0.7026873205096165).abs() < 1e-12, "{v}");
    assert_eq!(structure_mcc(&truth, &truth).unwrap(), 1.0);
}

#[test]
fn golden_round_trip() {
    let (seq, s) = read_ct(&data("fixtures/golden.ct")).unwrap();
    let text = emit_ct(&seq, &s, "golden_hpk");
    let (seq2, s2) = parse_ct(&text).unwrap();
    assert_eq!(seq2.bases(), seq.bases());
    assert_eq!(s2, s);
    let strict = CtRecord::parse(&text, CtOptions { strict: true }).unwrap();
    assert_eq!(strict.name(), "golden_hpk");
}

#[test]
fn manifests_load() {
    let m = DatasetManifest::load(&data("toy/toy10.tsv")).unwrap();
    assert_eq!(m.len(), 10);
    assert_eq!(m.split_sizes(), (10, 0));
    let pk = m.load_examples(None, PkClass::Pseudoknotted).unwrap();
    assert!(!pk.is_empty());
    assert!(pk.iter().all(|e| e.truth.is_pseudoknotted()));
    let nested = m.load_examples(None, PkClass::Nested).unwrap();
    assert_eq!(pk.len() + nested.len(), 10);
    assert!(nested.iter().all(|e| !e.truth.is_pseudoknotted()));

    let split = DatasetManifest::load(&data("toy/split4.tsv")).unwrap();
    assert_eq!(split.split_sizes(), (2, 2));
    let test: Vec<_> = split
        .load_examples(Some(Split::Test), PkClass::All)
        .unwrap()
        .into_iter()
        .map(|e| e.id)
        .collect();
    assert_eq!(test, ["ser1", "pk2"]);
}

#[test]
fn manifest_with_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.tsv");
    std::fs::write(
        &path,
        "id\tsequence\tct\tpseudoknotted\tsplit\nx\t-\tnowhere.ct\t0\ttrain\n",
    )
    .unwrap();
    assert!(matches!(
        DatasetManifest::load(&path),
        Err(DatasetError::MissingFile(_))
    ));
}

#[test]
fn mismatched_fasta_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.fa"), ">a\nGGGAAACCC\n").unwrap();
    std::fs::copy(data("toy/hp1.ct"), dir.path().join("a.ct")).unwrap();
    let path = dir.path().join("m.tsv");
    std::fs::write(
        &path,
        "id\tsequence\tct\tpseudoknotted\tsplit\na\ta.fa\ta.ct\t0\ttrain\n",
    )
    .unwrap();
    let m = DatasetManifest::load(&path).unwrap();
    assert!(matches!(
        m.load_examples(None, PkClass::All),
        Err(DatasetError::SequenceMismatch(_))
    ));
}
