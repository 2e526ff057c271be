//! Per-cell seeds.
//!
//! Cell `i` of a run with master seed `s` uses the `(i+1)`-th output of a
//! SplitMix64 stream started at `s`. Each output depends only on
//! `(s, i)`, so cells can be evaluated in any order or in parallel.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn cell_seed(master: u64, index: u64) -> u64 {
    mix(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}
