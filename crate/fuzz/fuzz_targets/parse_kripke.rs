#![no_main]

use libfuzzer_sys::fuzz_target;
use pbisim::io::{parse_kripke, print_kripke};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = parse_kripke(text) else { return };
    let printed = print_kripke(&file.structure, &file.names);
    let again = parse_kripke(&printed).expect("printed structure reparses");
    assert_eq!(again, file);
});
