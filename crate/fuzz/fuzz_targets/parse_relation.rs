#![no_main]

use libfuzzer_sys::fuzz_target;
use pbisim::io::{parse_relation, print_relation};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let concrete: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
    let abs: Vec<String> = (0..3).map(|i| format!("a{i}")).collect();
    let Ok(r) = parse_relation(text, &concrete, &abs) else { return };
    let printed = print_relation(&r, &concrete, &abs);
    assert_eq!(parse_relation(&printed, &concrete, &abs).expect("reparses"), r);
});
