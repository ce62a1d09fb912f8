//! The group-label parser must never panic on untrusted text, and every
//! accepted label is nonempty with no surrounding whitespace.

#![no_main]

use libfuzzer_sys::fuzz_target;
use plans_core::io::parse_groups;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(labels) = parse_groups(text) else { return };
    for label in &labels {
        assert!(!label.is_empty(), "no blank labels");
        assert_eq!(label, label.trim(), "labels are trimmed");
    }
});
