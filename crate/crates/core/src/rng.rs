//! Deterministic per-task random number streams.
//!
//! Every source of randomness in the crate flows from a single 64-bit seed
//! through [`StreamRng`], a splitmix64 generator. Stream derivation is part
//! of the persisted model contract: tree `j` of a forest trained with seed
//! `s` always consumes the stream `StreamRng::for_stream(s, j as u64)`, so a
//! reloaded model can be reasoned about (and retrained bit-identically)
//! from its header alone. Streams are independent of execution order, which
//! is what makes parallel tree growing reproducible.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based splitmix64 stream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    state: u64,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        StreamRng { state: seed }
    }

    /// Derive the `stream_id`-th substream of `seed`.
    ///
    /// The state is initialized to
    /// `mix64(seed ^ mix64(stream_id + GOLDEN))`; both the constant and the
    /// finalizer are fixed by the model format.
    pub fn for_stream(seed: u64, stream_id: u64) -> Self {
        StreamRng {
            state: mix64(seed ^ mix64(stream_id.wrapping_add(GOLDEN))),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Unbiased integer in `0..n` (Lemire's multiply-with-rejection).
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let n = n as u64;
        loop {
            let x = self.next_u64();
            let m = (x as u128) * (n as u128);
            let low = m as u64;
            if low < n {
                let threshold = n.wrapping_neg() % n;
                if low < threshold {
                    continue;
                }
            }
            return (m >> 64) as usize;
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller.
    pub fn next_normal(&mut self) -> f64 {
        let mut u1 = self.next_f64();
        if u1 == 0.0 {
            u1 = f64::MIN_POSITIVE;
        }
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// First `k` elements of a Fisher-Yates shuffle of `0..n`, in draw order.
    pub fn draw_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.next_index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
