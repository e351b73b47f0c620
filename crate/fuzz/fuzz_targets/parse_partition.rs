#![no_main]

use libfuzzer_sys::fuzz_target;
use pbisim::io::{default_state_names, parse_partition, print_partition};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let names = default_state_names(5);
    let Ok(p) = parse_partition(text, &names) else { return };
    let printed = print_partition(&p, &names);
    assert_eq!(parse_partition(&printed, &names).expect("reparses"), p);
});
