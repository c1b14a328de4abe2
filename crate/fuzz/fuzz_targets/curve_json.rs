#![no_main]

use biconserve::format::{parse_curve, write_curve};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(trace) = parse_curve(data) {
        let text = write_curve(&trace).expect("accepted curves serialize");
        let again = parse_curve(text.as_bytes()).expect("written curves parse");
        assert_eq!(again, trace);
    }
});
