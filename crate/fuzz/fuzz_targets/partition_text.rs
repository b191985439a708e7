#![no_main]
use libfuzzer_sys::fuzz_target;
use qkrawtchouk::partitions::{to_coords, from_coords, Partition};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(lambda) = text.parse::<Partition>() else { return };
    let reparsed: Partition = lambda.to_string().parse().expect("display output parses");
    assert_eq!(reparsed, lambda);
    let n = lambda.length().max(1);
    if let Ok(coords) = to_coords(&lambda, n) {
        assert_eq!(from_coords(&coords, n).expect("coords invert"), lambda);
    }
});
