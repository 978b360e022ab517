#![no_main]

use graphinterp::pipeline::{export_params, import_params};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = import_params(text) {
        let back = import_params(&export_params(&cfg)).expect("exported parameters parse");
        assert_eq!(back, cfg);
    }
});
