#![no_main]
use libfuzzer_sys::fuzz_target;
use qkrawtchouk::ensemble::KernelMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(kernel) = KernelMatrix::from_bytes(data) {
        assert_eq!(8 + 8 * kernel.dim() * kernel.dim(), data.len());
        assert_eq!(kernel.to_bytes(), data);
    }
});
