//! The shuffling algorithm: split law, `S -> S +- 1` steps, exact step
//! probabilities and the dynamics built from them.

pub mod chain;
pub mod exact;
pub mod split;
pub mod step;

pub use chain::{run_chain, JsonlWriter, MarkovPlan, Observer, Recorder};
pub use exact::{exact_step_prob, update_law_algorithm, update_law_matrix};
pub use split::{sample_split, SplitDistribution};
pub use step::{block_law, blocks, sample_uniform, step_down, step_up, Block, StepDirection, Stepper};

/// Seeded generator used across the crate and the command line tool.
pub type ChainRng = rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChainRng {
    <ChainRng as rand::SeedableRng>::seed_from_u64(seed)
}
