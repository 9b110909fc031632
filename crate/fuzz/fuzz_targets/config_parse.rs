#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(file) = illusion_cli::ConfigFile::parse(&text) {
        let _ = illusion_cli::CliConfig::resolve(&file, &Default::default());
    }
});
