//! Deterministic seed derivation so concurrent or reordered trials always
//! see the same per-trial stream.

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives an independent seed for lane `lane`, trial `index` from a root
/// seed; pure, so the derived stream does not depend on evaluation order.
pub(crate) fn derive_seed(root: u64, lane: u64, index: u64) -> u64 {
    mix(mix(root ^ lane.wrapping_mul(0xd1342543de82ef95)) ^ index)
}
