#![no_main]

use graphinterp::imaging::{decode_image, decode_png};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_png(data);
    let _ = decode_image(data);
});
