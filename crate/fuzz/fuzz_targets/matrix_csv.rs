#![no_main]
use libfuzzer_sys::fuzz_target;
use pcmlab::io::parse_matrix;
use pcmlab::Reciprocity;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for mode in [None, Some(Reciprocity::Reciprocal), Some(Reciprocity::Arbitrary)] {
        if let Ok(m) = parse_matrix(text, mode) {
            // An accepted matrix is square with finite positive entries.
            for i in 0..m.n() {
                for j in 0..m.n() {
                    let v = m.get(i, j);
                    assert!(v.is_finite() && v > 0.0);
                }
            }
            if let Some(mode) = mode {
                assert_eq!(m.mode(), mode);
            }
        }
    }
});
