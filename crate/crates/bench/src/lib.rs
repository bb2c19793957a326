//! Fixed inputs shared by the criterion benches.

use rectpack_core::lab::{gen_random, Profile};
use rectpack_core::model::{Container, Instance, Item, Label};

/// `count` uniform instances with the given item count and side.
pub fn random_instances(count: usize, n_items: usize, side: i64) -> Vec<Instance> {
    (0..count as u64).map(|s| gen_random(Profile::Uniform, n_items, side, s, s % 2 == 0)).collect()
}

/// Items no larger than a tenth of the side in either dimension.
pub fn small_items(n_items: usize, side: i64, seed: u64) -> Vec<Item> {
    let cap = (side / 10).max(1);
    gen_random(Profile::Uniform, n_items, side, seed, false)
        .items
        .into_iter()
        .map(|it| Item::new(it.id, 1 + it.w % cap, 1 + it.h % cap, it.p))
        .collect()
}

/// A row of floating containers, alternating labels, for compaction.
pub fn floating_containers(count: usize, side: i64) -> Vec<Container> {
    let w = (side / count as i64).max(1);
    (0..count)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Horizontal } else { Label::Vertical };
            Container::new(i as i64 * w, side / 2 - (i as i64 % 5) * 7, w, side / 4, label)
        })
        .collect()
}
