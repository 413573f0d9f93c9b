//! Platform-stable integer PRNGs used for permutations and seed derivation.
//!
//! Interleaver permutations must be identical on every platform and across
//! releases of third-party crates, so they are driven by a fixed xorshift64*
//! generator (Vigna, shifts 12/25/27, multiplier `0x2545F4914F6CDD1D`) seeded
//! through SplitMix64. Gaussian noise streams use ChaCha8 from `rand_chacha`,
//! seeded with values derived here.

/// SplitMix64 finalizer; used to spread seeds and derive per-point streams.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `master`: `splitmix64(master ^ splitmix64(index))`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[derive(Clone, Debug)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self {
            // an all-zero state is a fixed point of xorshift
            state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform integer in `0..bound` by 128-bit multiply-shift.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// Fisher-Yates permutation of `0..len`; entry `k` is the source index of output `k`.
pub fn permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    let mut rng = XorShift64Star::new(seed);
    for i in (1..len).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}
