#![no_main]

use libfuzzer_sys::fuzz_target;

use groundeq::problem::{parse_problem, print_problem};

fuzz_target!(|data: &[u8]| {
    // Any accepted problem must print back to a form that parses to an
    // identical structure
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(problem) = parse_problem(text) else {
        return;
    };
    let printed = print_problem(&problem);
    let reparsed = parse_problem(&printed).expect("printed problem must parse");
    assert_eq!(problem, reparsed);
});
