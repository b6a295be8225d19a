#![no_main]

use libfuzzer_sys::fuzz_target;
use wpbailey::params::{parse_param, render_monomial};

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else { return };
    if let Ok((name, value)) = parse_param(input) {
        assert!(!name.is_empty());
        assert!(name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
        let rebuilt = format!("{name}={}", render_monomial(&value));
        let (name2, value2) = parse_param(&rebuilt).expect("canonical form reparses");
        assert_eq!(name, name2);
        assert_eq!(value, value2);
    }
});
