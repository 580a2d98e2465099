#![allow(dead_code)]

use std::io::BufReader;
use std::path::PathBuf;

use flate2::read::GzDecoder;
use treeviz::hashing::SparseBinarySet;
use treeviz::io::{parse_reader, Dataset, InputFormat};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

/// Binarized MNIST digits (pixel above the image mean), first `n` rows.
pub fn mnist_sets(n: usize) -> Vec<SparseBinarySet> {
    let file = std::fs::File::open(data_dir().join("mnist10k.txt.gz")).expect("fixture present");
    match parse_reader(BufReader::new(GzDecoder::new(file)), InputFormat::SparseBinary).expect("fixture parses") {
        Dataset::Sets(mut sets) => {
            assert!(sets.len() >= n, "fixture has {} rows", sets.len());
            sets.truncate(n);
            sets
        }
        _ => unreachable!(),
    }
}

pub fn write_sets(path: &std::path::Path, sets: &[SparseBinarySet]) {
    let mut text = String::new();
    for s in sets {
        let row: Vec<String> = s.elements().iter().map(u32::to_string).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}
