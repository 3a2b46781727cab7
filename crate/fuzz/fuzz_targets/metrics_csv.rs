#![no_main]
use libfuzzer_sys::fuzz_target;
use telephyt_core::reps::{read_metrics_csv, write_metrics_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_metrics_csv(data) else { return };
    let mut buf = Vec::new();
    write_metrics_csv(&rows, &mut buf).expect("parsed rows must serialise");
    let again = read_metrics_csv(buf.as_slice()).expect("written rows must parse");
    // Debug formatting compares NaN cells as equal.
    assert_eq!(format!("{again:?}"), format!("{rows:?}"));
});
