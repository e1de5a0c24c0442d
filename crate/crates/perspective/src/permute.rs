//! Seeded answer-order permutations.
//!
//! The generator is ChaCha8 (rand_chacha 0.3) seeded from a caller-supplied
//! u64, so permutation sets reproduce bit-for-bit across machines and
//! releases. A permutation maps presented position to original option index.

use persona_questionnaire::Questionnaire;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generates `count` option-order permutations for a questionnaire's scale.
///
/// With `identity_first` the first permutation is the identity (original
/// option order) and only the remaining `count - 1` are shuffled; the
/// shuffled tail is the same sequence the flag-off call would produce.
pub fn permute_options(
    q: &Questionnaire,
    seed: u64,
    count: usize,
    identity_first: bool,
) -> Vec<Vec<usize>> {
    permutations_of(q.scale.points(), seed, count, identity_first)
}

/// Same as [`permute_options`] for a bare option count.
pub fn permutations_of(
    points: usize,
    seed: u64,
    count: usize,
    identity_first: bool,
) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if identity_first && count > 0 {
        out.push((0..points).collect());
    }
    while out.len() < count {
        let mut perm: Vec<usize> = (0..points).collect();
        perm.shuffle(&mut rng);
        out.push(perm);
    }
    out
}

/// Inverse permutation: maps original option index to presented position.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (pos, &orig) in perm.iter().enumerate() {
        inv[orig] = pos;
    }
    inv
}
