#![no_main]

use libfuzzer_sys::fuzz_target;
use wpbailey::params::{parse_monomial, render_monomial};

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_monomial(input) {
        // Accepted values must round-trip through the canonical rendering.
        let rendered = render_monomial(&m);
        let again = parse_monomial(&rendered).expect("rendered monomial reparses");
        assert_eq!(m, again);
    }
});
