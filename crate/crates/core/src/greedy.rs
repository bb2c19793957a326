//! Container stacking and Next-Fit-Decreasing-Height.

use serde::{Deserialize, Serialize};

use crate::model::{effective_dims, Container, Item, ItemId, Placement};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackResult {
    pub placements: Vec<Placement>,
    pub leftovers: Vec<ItemId>,
}

impl PackResult {
    pub fn packed_ids(&self) -> Vec<&str> {
        self.placements.iter().map(|p| p.id.as_str()).collect()
    }
}

/// Stacks items bottom-up, left-aligned, in the given order. An item is packed
/// iff it still fits; otherwise it becomes a leftover and the scan continues.
pub fn stack_horizontal(region: &Container, items: &[(Item, bool)]) -> PackResult {
    let mut out = PackResult::default();
    let mut y = 0;
    for (it, rot) in items {
        let (w, h) = effective_dims(it, *rot);
        if w <= region.w && y + h <= region.h {
            out.placements.push(Placement::new(it.id.clone(), region.x, region.y + y, *rot));
            y += h;
        } else {
            out.leftovers.push(it.id.clone());
        }
    }
    out
}

/// Mirror of [`stack_horizontal`]: items side by side, bottom-aligned.
pub fn stack_vertical(region: &Container, items: &[(Item, bool)]) -> PackResult {
    let mut out = PackResult::default();
    let mut x = 0;
    for (it, rot) in items {
        let (w, h) = effective_dims(it, *rot);
        if h <= region.h && x + w <= region.w {
            out.placements.push(Placement::new(it.id.clone(), region.x + x, region.y, *rot));
            x += w;
        } else {
            out.leftovers.push(it.id.clone());
        }
    }
    out
}

/// NFDH order: height desc, width desc, id asc.
pub fn nfdh_order(items: &mut [Item]) {
    items.sort_by(|a, b| b.h.cmp(&a.h).then(b.w.cmp(&a.w)).then(a.id.cmp(&b.id)));
}

/// Next-Fit-Decreasing-Height on unrotated items. Stops at the first item
/// that would need a shelf above the region; everything after it is left over.
pub fn nfdh(region: &Container, items: &[Item]) -> PackResult {
    nfdh_oriented(region, &items.iter().map(|i| (i.clone(), false)).collect::<Vec<_>>())
}

/// NFDH on items with a caller-chosen orientation.
pub fn nfdh_oriented(region: &Container, items: &[(Item, bool)]) -> PackResult {
    let mut order: Vec<(i64, i64, &Item, bool)> = items
        .iter()
        .map(|(it, r)| {
            let (w, h) = effective_dims(it, *r);
            (w, h, it, *r)
        })
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(b.0.cmp(&a.0)).then(a.2.id.cmp(&b.2.id)));
    let mut out = PackResult::default();
    let mut shelf_y = 0;
    let mut shelf_h: Option<i64> = None;
    let mut x = 0;
    let mut stopped = false;
    for (w, h, it, rot) in order {
        if stopped || w > region.w {
            out.leftovers.push(it.id.clone());
            continue;
        }
        match shelf_h {
            Some(sh) if x + w <= region.w => {
                debug_assert!(h <= sh);
            }
            Some(sh) => {
                shelf_y += sh;
                x = 0;
                if shelf_y + h > region.h {
                    stopped = true;
                    out.leftovers.push(it.id.clone());
                    continue;
                }
                shelf_h = Some(h);
            }
            None => {
                if h > region.h {
                    stopped = true;
                    out.leftovers.push(it.id.clone());
                    continue;
                }
                shelf_h = Some(h);
            }
        }
        out.placements.push(Placement::new(it.id.clone(), region.x + x, region.y + shelf_y, rot));
        x += w;
    }
    out
}
