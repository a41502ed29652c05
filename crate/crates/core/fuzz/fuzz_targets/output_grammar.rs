#![no_main]

use eventrl::events::{check_output, parse_output, serialize_output};
use eventrl::schema::parse_schema;
use libfuzzer_sys::fuzz_target;

const SCHEMA: &str = r#"event Attack "a" { attacker: list "x"; place: list "y"; }
event Die "d" { victim: list "v"; }"#;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(events) = parse_output(text) {
        let canonical = serialize_output(&events);
        let again = parse_output(&canonical).expect("canonical output parses");
        assert_eq!(again, events);
        assert_eq!(serialize_output(&again), canonical);
    }
    let schema = parse_schema(SCHEMA).unwrap();
    let report = check_output(text, &schema);
    assert!(report.valid_events.len() <= parse_output(text).map(|e| e.len()).unwrap_or(0));
});
