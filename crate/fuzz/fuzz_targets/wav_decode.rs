#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for downmix in [false, true] {
        if let Ok(clip) = illusion_core::audio::decode_wav(std::io::Cursor::new(data), downmix) {
            assert!(!clip.samples().is_empty());
        }
    }
});
