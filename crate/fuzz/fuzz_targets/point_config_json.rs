#![no_main]
use libfuzzer_sys::fuzz_target;
use qkrawtchouk::partitions::PointConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = serde_json::from_slice::<PointConfig>(data) {
        assert!(config.coords().windows(2).all(|w| w[0] > w[1]));
    }
});
