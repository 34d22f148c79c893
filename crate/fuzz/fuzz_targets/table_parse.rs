//! Fuzz the marginal-table file parser: accepted tables satisfy all table
//! invariants by construction and round-trip byte-identically through the
//! canonical serialization.

#![no_main]

use libfuzzer_sys::fuzz_target;
use locallim::measure::MarginalTable;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = MarginalTable::parse(s) {
        let text = table.to_text();
        let back = MarginalTable::parse(&text).expect("canonical text re-parses");
        assert_eq!(back, table);
        assert_eq!(back.to_text(), text, "canonical serialization is a fixpoint");
        assert_eq!(back.digest(), table.digest());
    }
});
