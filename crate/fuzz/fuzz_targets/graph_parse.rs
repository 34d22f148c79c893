//! Fuzz the edge-list graph file parser: accepted graphs are simple with
//! in-range ids, round-trip through the canonical writer, and admit a census.

#![no_main]

use libfuzzer_sys::fuzz_target;
use locallim::census::ball_census;
use locallim::graphio::GraphFile;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = GraphFile::parse(s) {
        let text = g.to_text();
        let back = GraphFile::parse(&text).expect("canonical text re-parses");
        assert_eq!(back, g);
        if g.n() > 0 && g.n() <= 64 {
            let d = g.max_degree().max(1) as u32;
            let rep = ball_census(&g.adj, 1, d, 1, 12).unwrap();
            assert_eq!(rep.total, g.n() as u64);
        }
    }
});
