use std::fs;
use std::path::Path;

use proptest::prelude::*;
use rfzt::rf_ingest::{
    default_profiles, load_dronerf_pairs, parse_segment_name, segment_file_name, synth_generate, write_pairs,
    Manifest,
};
use rfzt::{ClassLabel, Error, LabeledSpectrumSet, ReceiverHalf};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, body: &str) {
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join(name), body).unwrap();
}

#[test]
fn loads_a_lower_upper_pair() {
    let tmp = TempDir::new().unwrap();
    let (l, h) = (tmp.path().join("L"), tmp.path().join("H"));
    write(&l, "10000L_0.csv", "1.0,2.0,3.0,4.0\n");
    write(&h, "10000H_0.csv", "0.5\n-0.5\n0.25\n-0.25\n");
    let manifest = Manifest::from_archive_ids([10_000_000]).unwrap();
    let pairs = load_dronerf_pairs(&l, &h, &manifest).unwrap();
    assert_eq!(pairs.len(), 1);
    let p = &pairs[0];
    assert_eq!(p.label, ClassLabel::Bebop);
    assert_eq!(p.lower.samples(), &[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(p.upper.samples(), &[0.5, -0.5, 0.25, -0.25]);
    assert_eq!(p.lower.half(), ReceiverHalf::Lower);
    assert_eq!(p.upper.segment_id(), 10_000_000);
}

#[test]
fn missing_partner_is_reported_with_all_ids() {
    let tmp = TempDir::new().unwrap();
    let (l, h) = (tmp.path().join("L"), tmp.path().join("H"));
    for k in 0..3 {
        write(&l, &format!("11000L_{k}.csv"), "1,2\n");
    }
    write(&h, "11000H_1.csv", "1,2\n");
    let manifest = Manifest::from_archive_ids((0..3).map(|k| 11_000_000 + k)).unwrap();
    match load_dronerf_pairs(&l, &h, &manifest).unwrap_err() {
        Error::MissingPair { missing, segment_ids } => {
            assert_eq!(missing, "upper");
            assert_eq!(segment_ids, vec![11_000_000, 11_000_002]);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unlabelled_segment_is_an_error() {
    let tmp = TempDir::new().unwrap();
    let (l, h) = (tmp.path().join("L"), tmp.path().join("H"));
    write(&l, "10100L_4.csv", "1,2\n");
    write(&h, "10100H_4.csv", "1,2\n");
    let err = load_dronerf_pairs(&l, &h, &Manifest::default()).unwrap_err();
    assert!(matches!(err, Error::Label { segment_id: 10_100_004 }));
    assert!(matches!(
        Manifest::from_archive_ids([99_999_000]),
        Err(Error::Label { segment_id: 99_999_000 })
    ));
}

#[test]
fn bad_token_names_row_and_column() {
    let tmp = TempDir::new().unwrap();
    let (l, h) = (tmp.path().join("L"), tmp.path().join("H"));
    write(&l, "00000L_0.csv", "1,2\n3,abc\n");
    write(&h, "00000H_0.csv", "1,2,3,4\n");
    let manifest = Manifest::from_archive_ids([0]).unwrap();
    match load_dronerf_pairs(&l, &h, &manifest).unwrap_err() {
        Error::MalformedCsv { row, column, path, .. } => {
            assert_eq!((row, column), (2, 2));
            assert!(path.ends_with("00000L_0.csv"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unequal_halves_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let (l, h) = (tmp.path().join("L"), tmp.path().join("H"));
    write(&l, "00000L_0.csv", "1,2,3\n");
    write(&h, "00000H_0.csv", "1,2\n");
    let manifest = Manifest::from_archive_ids([0]).unwrap();
    assert!(matches!(
        load_dronerf_pairs(&l, &h, &manifest).unwrap_err(),
        Error::PairLength { lower: 3, upper: 2, .. }
    ));
}

#[test]
fn synthetic_corpus_round_trips_through_disk() {
    let pairs = synth_generate(&default_profiles(64, 64), 3, 7).unwrap();
    let tmp = TempDir::new().unwrap();
    write_pairs(tmp.path(), &pairs).unwrap();
    let manifest = Manifest::load(&tmp.path().join("manifest.csv")).unwrap();
    assert_eq!(manifest.len(), 12);
    let back = load_dronerf_pairs(&tmp.path().join("L"), &tmp.path().join("H"), &manifest).unwrap();
    let mut want = pairs.clone();
    want.sort_by_key(|p| p.lower.segment_id());
    assert_eq!(back, want);
}

#[test]
fn synthetic_generation_is_seeded() {
    let a = synth_generate(&default_profiles(128, 128), 4, 7).unwrap();
    let b = synth_generate(&default_profiles(128, 128), 4, 7).unwrap();
    let c = synth_generate(&default_profiles(128, 128), 4, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    for label in ClassLabel::ALL {
        assert_eq!(a.iter().filter(|p| p.label == label).count(), 4);
    }
}

#[test]
fn segment_names_round_trip() {
    for id in [0u64, 10_000_017, 10_100_999, 11_000_000] {
        for half in [ReceiverHalf::Lower, ReceiverHalf::Upper] {
            assert_eq!(parse_segment_name(&segment_file_name(id, half)), Some((id, half)));
        }
    }
    assert_eq!(parse_segment_name("10000L.csv"), Some((10_000, ReceiverHalf::Lower)));
    assert_eq!(parse_segment_name("10000X_1.csv"), None);
    assert_eq!(parse_segment_name("notes.txt"), None);
}

#[test]
fn corpus_reader_rejects_ragged_rows() {
    let text = "label,f0,f1\n1,0.5,0.25\n2,0.5\n";
    match LabeledSpectrumSet::read_csv(text, Path::new("corpus.csv")).unwrap_err() {
        Error::MalformedCsv { row, .. } => assert_eq!(row, 3),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corpus_csv_round_trips_bit_exactly(
        rows in proptest::collection::vec(
            (0usize..4, proptest::collection::vec(any::<f32>().prop_filter("finite", |v| v.is_finite()), 5)),
            1..30,
        ),
    ) {
        let labels: Vec<ClassLabel> = rows.iter().map(|(c, _)| ClassLabel::ALL[*c]).collect();
        let data: Vec<Vec<f32>> = rows.into_iter().map(|(_, r)| r).collect();
        let set = LabeledSpectrumSet::from_rows(data, labels).unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let back = LabeledSpectrumSet::read_csv(std::str::from_utf8(&buf).unwrap(), Path::new("x.csv")).unwrap();
        prop_assert_eq!(back.labels(), set.labels());
        for (a, b) in back.spectra().iter().zip(set.spectra()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
