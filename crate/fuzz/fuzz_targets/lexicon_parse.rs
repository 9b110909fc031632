#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(lex) = illusion_core::phoneme::PronunciationLexicon::parse(&text) {
        let again = illusion_core::phoneme::PronunciationLexicon::parse(&lex.to_text()).expect("re-parse");
        assert_eq!(again.len(), lex.len());
    }
});
