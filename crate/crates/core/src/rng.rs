//! Counter-based SplitMix64 uniforms and Box-Muller normals.
//!
//! Draw `i` of stream `seed` depends only on `(seed, i)`, which makes the
//! synthetic data reproducible bit-for-bit across platforms and languages.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output for counter `i` (the `(i+1)`-th output of the sequential
/// generator started at state `seed`).
pub fn splitmix64(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
pub fn uniform(seed: u64, i: u64) -> f64 {
    ((splitmix64(seed, i) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal number `j` of stream `seed`. Pair `p = j / 2` consumes
/// uniforms `2p` and `2p + 1`; even `j` takes the cosine branch and odd `j`
/// the sine branch.
pub fn normal(seed: u64, j: u64) -> f64 {
    let p = j / 2;
    let u1 = uniform(seed, 2 * p);
    let u2 = uniform(seed, 2 * p + 1);
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    if j.is_multiple_of(2) {
        radius * angle.cos()
    } else {
        radius * angle.sin()
    }
}
