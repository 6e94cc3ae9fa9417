//! Shared fixtures for the benchmarks.

use adlv::parse::{parse_element, parse_group};
use adlv::{AffineElement, RootDatum};

pub fn datum(spec: &str) -> RootDatum {
    parse_group(spec).expect("valid group spec")
}

pub fn element(d: &RootDatum, spec: &str) -> AffineElement {
    parse_element(d, spec).expect("valid element")
}
