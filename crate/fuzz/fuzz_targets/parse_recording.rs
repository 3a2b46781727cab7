#![no_main]
use libfuzzer_sys::fuzz_target;
use telephyt_core::motion::{parse_recording, write_recording};

fuzz_target!(|data: &[u8]| {
    let Ok(rec) = parse_recording(data) else { return };
    let mut buf = Vec::new();
    // Frames far from the sensor decode but are refused on write.
    if write_recording(&rec, &mut buf).is_ok() {
        assert_eq!(parse_recording(&buf).unwrap(), rec);
    }
});
