//! The rating-table CSV parser must never panic on untrusted text, and
//! accepted tables must be rectangular with only finite entries.

#![no_main]

use libfuzzer_sys::fuzz_target;
use plans_core::io::parse_ratings_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_ratings_csv(text) else { return };
    assert_eq!(m.data().len(), m.rows() * m.cols(), "shape matches storage");
    assert!(m.data().iter().all(|v| v.is_finite()), "accepted entries are finite");
});
