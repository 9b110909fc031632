#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = illusion_core::ridge::read_labeled_csv(data);
});
