#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(seq) = illusion_core::phoneme::parse_sequence(&text) {
        let shown = illusion_core::phoneme::format_sequence(&seq);
        assert_eq!(illusion_core::phoneme::parse_sequence(&shown).unwrap(), seq);
    }
    let _ = illusion_core::features::parse_feature_name(&text);
});
