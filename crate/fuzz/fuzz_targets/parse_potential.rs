#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_envelope::{Domain, PotentialShape};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for domain in [Domain::HalfLine, Domain::FullLine] {
        if let Ok(shape) = PotentialShape::parse(text, domain) {
            // Anything accepted must print back to an equivalent shape.
            let again = PotentialShape::parse(&shape.to_string(), domain)
                .expect("display output parses");
            assert_eq!(again, shape);
        }
    }
});
