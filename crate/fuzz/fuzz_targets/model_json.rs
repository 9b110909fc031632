#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = illusion_core::ridge::ModelFile::from_json(text) {
            let _ = illusion_core::ridge::ModelPredictor::new(file);
        }
    }
});
