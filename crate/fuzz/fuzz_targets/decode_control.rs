#![no_main]
use libfuzzer_sys::fuzz_target;
use telephyt_core::wire::{decode_control, encode_control};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(msg) = decode_control(text) {
        let again = decode_control(&encode_control(&msg)).expect("re-encoded message must decode");
        assert_eq!(again, msg);
    }
});
