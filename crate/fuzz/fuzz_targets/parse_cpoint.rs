#![no_main]

use libfuzzer_sys::fuzz_target;
use wpbailey::params::parse_cpoint;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_cpoint(input) {
        // Accepted points are always finite.
        assert!(z.re.is_finite() && z.im.is_finite());
    }
});
