//! Replays the checked-in fuzz seeds through the same invariants the fuzz
//! targets assert.

use std::path::PathBuf;

use graphinterp::imaging::{decode_image, decode_pnm, encode_pnm};
use graphinterp::pipeline::{export_params, import_params};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn pnm_seeds() {
    let mut decoded = 0;
    for (name, bytes) in seeds("decode_pnm") {
        if let Ok(img) = decode_pnm(&bytes) {
            assert_eq!(decode_pnm(&encode_pnm(&img)).unwrap(), img, "{name}");
            decoded += 1;
        }
    }
    assert_eq!(decoded, 2);
}

#[test]
fn png_seeds() {
    for (name, bytes) in seeds("decode_png") {
        let res = decode_image(&bytes);
        if cfg!(feature = "png") {
            let img = res.unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!((img.height(), img.width()), (4, 4), "{name}");
        } else {
            assert!(res.is_err(), "{name}");
        }
    }
}

#[test]
fn params_seeds() {
    let mut accepted = 0;
    for (name, bytes) in seeds("import_params") {
        let text = String::from_utf8(bytes).unwrap();
        if let Ok(cfg) = import_params(&text) {
            assert_eq!(import_params(&export_params(&cfg)).unwrap(), cfg, "{name}");
            accepted += 1;
        }
    }
    assert_eq!(accepted, 2);
}
