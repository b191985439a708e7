#![no_main]
use libfuzzer_sys::fuzz_target;
use qk_cli::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::from_toml(text) else { return };
    let _ = cfg.model();
    let _ = cfg.limit();
});
