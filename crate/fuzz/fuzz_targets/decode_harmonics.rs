#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // The first byte picks the matrix size and the cutoff.
    let Some((&shape, rest)) = data.split_first() else {
        return;
    };
    let n = 1 + (shape & 0x03) as usize;
    let cutoff = (shape >> 2) as usize & 0x0f;
    if let Ok(text) = std::str::from_utf8(rest) {
        if let Ok(list) = floquet_cli::decode_harmonics(text, n, cutoff) {
            assert!(list.iter().all(|(m, a)| m.unsigned_abs() as usize <= cutoff && a.nrows() == n && a.ncols() == n));
        }
    }
});
