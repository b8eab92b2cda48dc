#![no_main]
use libfuzzer_sys::fuzz_target;
use pcmlab::simulation::{bin_records, RecordSet};

fuzz_target!(|data: &[u8]| {
    let Ok(set) = RecordSet::read_csv(data) else { return };
    let once = set.to_csv_string().expect("parsed records serialize");
    let again = RecordSet::from_csv_str(&once).expect("own output parses");
    assert_eq!(again.to_csv_string().unwrap(), once);
    if let Some(measure) = set.measures.first() {
        let _ = bin_records(&set, measure);
    }
});
