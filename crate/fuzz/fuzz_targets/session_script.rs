#![no_main]
use libfuzzer_sys::fuzz_target;
use telephyt_core::synth::SessionScript;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = SessionScript::from_json(text);
    }
});
