#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_envelope_cli::report::{parse_json_report, parse_json_verify};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_json_report(text);
    let _ = parse_json_verify(text);
});
