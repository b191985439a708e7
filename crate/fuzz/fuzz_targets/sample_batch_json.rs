#![no_main]
use libfuzzer_sys::fuzz_target;
use qkrawtchouk::sampler::SampleBatch;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(batch) = SampleBatch::from_json(text) {
        let again = SampleBatch::from_json(&batch.to_json()).expect("own output validates");
        assert_eq!(again.samples, batch.samples);
    }
});
