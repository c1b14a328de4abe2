#![no_main]

use biconserve::config::Tolerances;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(tol) = Tolerances::parse(text) {
            tol.validate().expect("parsed tolerances are valid");
        }
    }
});
