//! The loss-matrix CSV parser must never panic on untrusted text, and
//! anything it accepts must survive a write/parse round trip bit-exactly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use plans_core::io::{parse_matrix_csv, write_matrix_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(l) = parse_matrix_csv(text) else { return };
    let back = parse_matrix_csv(&write_matrix_csv(&l)).expect("serialized output reparses");
    assert_eq!(
        l.matrix().data().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        back.matrix().data().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        "round trip must be bit-exact"
    );
});
