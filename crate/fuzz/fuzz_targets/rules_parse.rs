#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(table) = illusion_core::mcgurk::RuleTable::parse(&text) {
        assert_eq!(illusion_core::mcgurk::RuleTable::parse(&table.to_text()).unwrap(), table);
    }
});
