#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Arbitrary text must be rejected with an error, never a panic; accepted
    // specs must expand into a splitting without panicking either.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = floquet_cli::parse_problem(text) {
            let _ = spec.splitting();
            let _ = spec.forcing_series();
        }
    }
});
