#![no_main]

use eventrl::schema::parse_schema;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(schema) = parse_schema(text) {
        let source = schema.to_source();
        let again = parse_schema(&source).expect("canonical source parses");
        assert_eq!(again, schema);
        assert_eq!(again.to_source(), source);
    }
});
