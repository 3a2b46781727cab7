#![no_main]
use libfuzzer_sys::fuzz_target;
use telephyt_core::motion::validate_frame;
use telephyt_core::wire::{decode_frame, encode_frame};

// Decoding is lenient about joint distance; only frames that pass validation
// are expected to re-encode, and then byte-for-byte.
fuzz_target!(|data: &[u8]| {
    let Ok(frame) = decode_frame(data) else { return };
    if validate_frame(&frame).is_err() {
        assert!(encode_frame(&frame).is_err());
        return;
    }
    let packet = encode_frame(&frame).expect("valid frame must encode");
    assert_eq!(packet.as_bytes(), data);
    assert_eq!(decode_frame(packet.as_bytes()).unwrap(), frame);
});
