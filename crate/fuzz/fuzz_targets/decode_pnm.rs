#![no_main]

use graphinterp::imaging::{decode_pnm, encode_pnm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_pnm(data) {
        let again = decode_pnm(&encode_pnm(&img)).expect("re-encoded image decodes");
        assert_eq!(again, img);
    }
});
