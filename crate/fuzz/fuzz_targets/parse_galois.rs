#![no_main]

use libfuzzer_sys::fuzz_target;
use pbisim::galois::check_galois;
use pbisim::io::{parse_galois, print_galois};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = parse_galois(text) else { return };
    let printed = print_galois(&file.spec, &file.concrete_names);
    let again = parse_galois(&printed).expect("printed connection reparses");
    assert_eq!(again, file);
    // The checker must reject oversized carriers cleanly rather than panic.
    let _ = check_galois(&file.spec, 8);
});
