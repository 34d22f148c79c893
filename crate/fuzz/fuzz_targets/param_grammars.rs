//! Fuzz the small user-facing grammars: rationals, degree distributions,
//! tree specs, mixture lists.

#![no_main]

use libfuzzer_sys::fuzz_target;
use locallim::params::{parse_degree_dist, parse_mixture_list, parse_tree_spec};
use locallim::ratio::{fmt_ratio, parse_ratio};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = parse_ratio(s) {
        assert_eq!(parse_ratio(&fmt_ratio(&r)).unwrap(), r);
    }
    if let Ok(d) = parse_degree_dist(s) {
        assert!(!d.is_empty());
    }
    if let Ok(t) = parse_tree_spec(s) {
        assert!(t.is_tree());
        assert!(t.n() >= 1);
    }
    let _ = parse_mixture_list(s);
});
