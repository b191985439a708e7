#![no_main]
use libfuzzer_sys::fuzz_target;
use qkrawtchouk::partitions::Partition;

fuzz_target!(|data: &[u8]| {
    if let Ok(lambda) = serde_json::from_slice::<Partition>(data) {
        assert!(lambda.rows().windows(2).all(|w| w[0] >= w[1]));
        let back = serde_json::to_string(&lambda).unwrap();
        assert_eq!(serde_json::from_str::<Partition>(&back).unwrap(), lambda);
    }
});
