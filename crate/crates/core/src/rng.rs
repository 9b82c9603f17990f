use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent deterministic stream `(seed, stream)`. Parallel work is split
/// over streams so that results do not depend on thread scheduling.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
