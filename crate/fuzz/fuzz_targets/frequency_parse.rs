#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(freq) = illusion_core::corpus::FrequencyLexicon::parse(&text) {
        let k = freq.len().min(10);
        if k > 0 {
            let p = illusion_core::corpus::prevalence(&freq, k, None).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&p));
        }
    }
});
