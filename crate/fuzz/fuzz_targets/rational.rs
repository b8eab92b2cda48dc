#![no_main]
use libfuzzer_sys::fuzz_target;
use pcmlab::io::parse_rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_rational(text) {
        assert!(v.is_finite());
        // Shortest round-trip formatting parses back to the same value.
        assert_eq!(parse_rational(&v.to_string()).unwrap(), v);
    }
});
