#![no_main]

use libfuzzer_sys::fuzz_target;
use pbisim::io::{parse_pts, print_pts};
use pbisim::DEFAULT_TOL;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = parse_pts(text, DEFAULT_TOL) else { return };
    // Anything accepted must survive a print/parse cycle unchanged.
    let printed = print_pts(&file.system, &file.state_names);
    let again = parse_pts(&printed, DEFAULT_TOL).expect("printed system reparses");
    assert_eq!(again.state_names, file.state_names);
    assert_eq!(print_pts(&again.system, &again.state_names), printed);
});
