//! Seeded, worker-count independent random streams.
//!
//! Work is cut into fixed-size chunks; chunk `k` draws from ChaCha8 stream `k`
//! of a key derived from (seed, purpose). Results are concatenated in chunk
//! order, so output does not depend on how many threads ran the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
    purpose: u64,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Streams { seed, purpose: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent family of streams for a named sub-task.
    pub fn derive(&self, label: &str) -> Streams {
        Streams { seed: self.seed, purpose: splitmix(self.purpose ^ fnv1a(label.as_bytes())) }
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(splitmix(self.seed ^ splitmix(self.purpose)));
        r.set_stream(stream);
        r
    }
}

/// Runs `f(chunk_index, start, len)` over `n` items in chunks of `CHUNK`
/// and concatenates the results in chunk order.
pub fn par_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize, usize) -> Vec<T> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK;
            f(k, start, CHUNK.min(n - start))
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Fallible variant of `par_chunks`; the first error in chunk order wins.
pub fn try_par_chunks<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize, usize, usize) -> Result<Vec<T>, E> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>, E>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK;
            f(k, start, CHUNK.min(n - start))
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunked_results_ignore_worker_count() {
        let s = Streams::new(7).derive("t");
        let run = |w| {
            with_workers(w, || {
                par_chunks(5000, |k, _, len| {
                    let mut r = s.rng(k as u64);
                    (0..len).map(|_| r.random::<u64>()).collect()
                })
            })
        };
        let a = run(1);
        assert_eq!(a, run(4));
        assert_eq!(a, run(16));
        assert_eq!(a.len(), 5000);
    }

    #[test]
    fn purposes_differ() {
        let s = Streams::new(1);
        let mut a = s.derive("a").rng(0);
        let mut b = s.derive("b").rng(0);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
    }
}
