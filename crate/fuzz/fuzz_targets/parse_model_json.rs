//! The model JSON parser must never panic on untrusted text, and any
//! model it accepts must survive a write/parse round trip exactly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use plans_core::io::{parse_model_json, write_model_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(model) = parse_model_json(text) else { return };
    let back = parse_model_json(&write_model_json(&model)).expect("serialized output reparses");
    assert_eq!(model, back, "round trip must reproduce the model");
});
