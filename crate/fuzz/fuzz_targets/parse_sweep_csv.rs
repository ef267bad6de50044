#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_envelope_cli::report::{parse_sweep_csv, sweep_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_sweep_csv(text) {
        // Re-emitting and re-parsing must be stable.
        let emitted = sweep_csv(&rows);
        let again = parse_sweep_csv(&emitted).expect("emitted csv parses");
        assert_eq!(sweep_csv(&again), emitted);
    }
});
