#![no_main]
use libfuzzer_sys::fuzz_target;
use pcmlab::config::{parse_sa1_file, to_toml};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = parse_sa1_file(text) else { return };
    // Resolving overlays the file on its preset and validates the result.
    let _ = file.resolve();
    // Serializing is a fixed point after one parse.
    if let Ok(once) = to_toml(&file) {
        let reparsed = parse_sa1_file(&once).expect("own output parses");
        assert_eq!(to_toml(&reparsed).unwrap(), once);
    }
});
