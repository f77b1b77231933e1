//! Benchmark parsers, seeded generators and the native text format.

mod gen;
mod native;
mod parse;
mod rng;

pub use gen::{
    gen_gap, gen_kp, gen_scp_intervals, overlay_intervals, random_corpus, random_instance, GapType,
    RandomShape, ScpFlavor,
};
pub use native::{parse_native, serialize_native};
pub use parse::{
    parse_chubeasley_mkp, parse_chubeasley_mkp_file, parse_orlib_gap, parse_orlib_gap_file,
    parse_orlib_scp, ParseError,
};
pub use rng::SplitMix64;
