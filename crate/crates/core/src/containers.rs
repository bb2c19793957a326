//! Container packings: candidate container sets, assignment through GAP and
//! realisation by stacking or NFDH.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::gap::{bins_from_containers, coarsen, container_orientation, solve_gap_with, GapConfig, GapError, GapInstance, GapSolution};
use crate::greedy::{nfdh_oriented, stack_horizontal, stack_vertical};
use crate::model::{container_name, effective_dims, Container, Instance, Item, ItemId, Label, Packing, Placement, Rect};
use crate::rational::{floor_mul, le_mul, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Denominator of the uniform part of the coordinate grid.
    pub grid: i64,
    pub gap: GapConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { grid: 16, gap: GapConfig::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerSolution {
    pub containers: Vec<Container>,
    pub packing: Packing,
    pub profit: i64,
    /// Items assigned by GAP that the realisation could not place.
    pub dropped: Vec<ItemId>,
}

/// Coordinates `{0, N}`, single extents and sums of two extents of different
/// items, and `ceil(N q / g)` for `q = 0..=g`; sorted, all within `[0, N]`.
pub fn candidate_grid(inst: &Instance, g: i64) -> Vec<i64> {
    let n = inst.n;
    let mut s = BTreeSet::from([0, n]);
    let ext: Vec<(usize, i64)> =
        inst.items.iter().enumerate().flat_map(|(i, it)| [(i, it.w), (i, it.h)]).filter(|e| e.1 <= n).collect();
    for &(i, a) in &ext {
        s.insert(a);
        for &(j, b) in &ext {
            if j > i && a + b <= n {
                s.insert(a + b);
            }
        }
    }
    for q in 0..=g {
        s.insert(((n as i128 * q as i128 + g as i128 - 1) / g as i128) as i64);
    }
    s.into_iter().collect()
}

pub fn candidate_containers(inst: &Instance, c: usize, budget: usize) -> Vec<Vec<Container>> {
    candidate_containers_in(inst.knapsack(), &candidate_grid(inst, SearchConfig::default().grid), c, budget)
}

/// Labelled guillotine partitions of `region` into at most `c` containers.
///
/// Order: number of pieces, then partitions in generation order (cuts by
/// direction, coordinate and piece split), then labels lexicographically.
/// Partitions with one piece yield the whole region with each label, so a
/// single container is never worse than any smaller container of the same
/// label. Stops after `budget` sets.
pub fn candidate_containers_in(region: Rect, grid: &[i64], c: usize, budget: usize) -> Vec<Vec<Container>> {
    let mut out = Vec::new();
    if region.w < 1 || region.h < 1 {
        return out;
    }
    for m in 1..=c {
        let mut seen: HashSet<Vec<Rect>> = HashSet::new();
        let mut stop = false;
        partitions(vec![(region, m)], Vec::new(), grid, &mut |mut parts| {
            parts.sort_by_key(|r| (r.y, r.x, r.w, r.h));
            if !seen.insert(parts.clone()) {
                return true;
            }
            for labels in label_tuples(parts.len()) {
                if out.len() >= budget {
                    stop = true;
                    return false;
                }
                out.push(parts.iter().zip(&labels).map(|(r, l)| Container::from_rect(*r, *l)).collect());
            }
            true
        });
        if stop {
            break;
        }
    }
    out
}

fn label_tuples(m: usize) -> Vec<Vec<Label>> {
    let mut v: Vec<Vec<Label>> = vec![vec![]];
    for _ in 0..m {
        v = v.into_iter().flat_map(|t| Label::ALL.iter().map(move |l| [t.clone(), vec![*l]].concat())).collect();
    }
    v
}

fn partitions(mut pending: Vec<(Rect, usize)>, done: Vec<Rect>, grid: &[i64], cb: &mut dyn FnMut(Vec<Rect>) -> bool) -> bool {
    let Some((r, m)) = pending.pop() else {
        return cb(done);
    };
    if m == 1 {
        let mut d = done;
        d.push(r);
        return partitions(pending, d, grid, cb);
    }
    for vertical in [true, false] {
        let (lo, hi) = if vertical { (r.x, r.right()) } else { (r.y, r.top()) };
        let start = grid.partition_point(|&g| g <= lo);
        for &cut in grid[start..].iter().take_while(|&&g| g < hi) {
            let (a, b) = if vertical {
                (Rect::new(r.x, r.y, cut - r.x, r.h), Rect::new(cut, r.y, r.right() - cut, r.h))
            } else {
                (Rect::new(r.x, r.y, r.w, cut - r.y), Rect::new(r.x, cut, r.w, r.top() - cut))
            };
            for m1 in 1..m {
                let mut p = pending.clone();
                p.push((b, m - m1));
                p.push((a, m1));
                if !partitions(p, done.clone(), grid, cb) {
                    return false;
                }
            }
        }
    }
    true
}

/// Solves GAP, coarsening capacities by powers of two whenever the exact
/// solver runs out of budget. The returned assignment is feasible for `gap`.
pub fn assign(gap: &GapInstance, cfg: &GapConfig) -> Result<GapSolution, GapError> {
    match solve_gap_with(gap, cfg) {
        Err(GapError::StateBudgetExceeded { .. }) => {}
        other => return other,
    }
    let max_cap = gap.bins.iter().map(|b| b.capacity).max().unwrap_or(0).max(1);
    let mut g = 2i64;
    loop {
        match solve_gap_with(&coarsen(gap, g), cfg) {
            Err(GapError::StateBudgetExceeded { .. }) if g <= max_cap => g = g.saturating_mul(2),
            other => return other,
        }
    }
}

pub fn pack_into_containers(inst: &Instance, containers: &[Container], eps: Q) -> Result<ContainerSolution, GapError> {
    pack_into_containers_with(inst, containers, eps, &GapConfig::default())
}

pub fn pack_into_containers_with(
    inst: &Instance,
    containers: &[Container],
    eps: Q,
    cfg: &GapConfig,
) -> Result<ContainerSolution, GapError> {
    let gap = bins_from_containers(containers, &inst.items, inst.rotation_allowed, eps);
    let sol = assign(&gap, cfg)?;
    let idx = inst.index();
    let mut per_bin: BTreeMap<String, Vec<&Item>> = BTreeMap::new();
    for (iid, bid) in &sol.assignment {
        per_bin.entry(bid.clone()).or_default().push(idx[iid.as_str()]);
    }
    let mut out = ContainerSolution { containers: containers.to_vec(), ..Default::default() };
    for (ci, c) in containers.iter().enumerate() {
        let Some(items) = per_bin.get(&container_name(ci)) else { continue };
        let (placements, dropped) = realise(c, items, inst.rotation_allowed, eps);
        out.packing.placements.extend(placements);
        out.dropped.extend(dropped);
    }
    out.packing.placements.sort_by(|a, b| a.id.cmp(&b.id));
    out.profit = out.packing.profit(inst);
    Ok(out)
}

/// Places the items assigned to one container; returns placements and drops.
pub fn realise(c: &Container, items: &[&Item], rotation_allowed: bool, eps: Q) -> (Vec<Placement>, Vec<ItemId>) {
    let oriented: Vec<(Item, bool)> = items
        .iter()
        .filter_map(|it| container_orientation(c, it, rotation_allowed, eps).map(|r| ((*it).clone(), r)))
        .collect();
    let mut dropped: Vec<ItemId> = items
        .iter()
        .filter(|it| !oriented.iter().any(|(o, _)| o.id == it.id))
        .map(|it| it.id.clone())
        .collect();
    let res = match c.label {
        Label::Horizontal => stack_horizontal(c, &oriented),
        Label::Vertical => stack_vertical(c, &oriented),
        Label::Area => {
            let (kept, gone) = group_discard(&oriented, c, eps);
            dropped.extend(gone);
            nfdh_oriented(c, &kept)
        }
    };
    dropped.extend(res.leftovers);
    (res.placements, dropped)
}

/// If the items exceed `(1 - 2 eps) a(C)`, cuts them (in the given order) into
/// groups closing once their area reaches `2 eps a(C)` and deletes the cheapest
/// closed group, repeating until the remainder fits.
pub fn group_discard(items: &[(Item, bool)], c: &Container, eps: Q) -> (Vec<(Item, bool)>, Vec<ItemId>) {
    let limit = floor_mul(Q::from_integer(1) - eps * 2, c.area());
    let mut kept = items.to_vec();
    let mut gone = Vec::new();
    while kept.iter().map(|(i, _)| i.area()).sum::<i64>() > limit {
        let mut groups: Vec<(usize, usize, i64, bool)> = Vec::new();
        let (mut start, mut area, mut profit) = (0, 0i64, 0i64);
        for (k, (it, _)) in kept.iter().enumerate() {
            area += it.area();
            profit += it.p;
            let full = !le_mul(area, eps * 2, c.area()) || area * eps.denom() == eps.numer() * 2 * c.area();
            if full {
                groups.push((start, k + 1, profit, true));
                start = k + 1;
                area = 0;
                profit = 0;
            }
        }
        if start < kept.len() {
            groups.push((start, kept.len(), profit, false));
        }
        let victim = groups
            .iter()
            .filter(|g| g.3)
            .min_by_key(|g| g.2)
            .or_else(|| groups.iter().min_by_key(|g| g.2))
            .copied();
        let Some((a, b, _, _)) = victim else { break };
        gone.extend(kept.drain(a..b).map(|(i, _)| i.id));
    }
    (kept, gone)
}

pub fn solve_container(inst: &Instance, c: usize, eps: Q, budget: usize) -> Result<ContainerSolution, GapError> {
    solve_container_with(inst, c, eps, budget, &SearchConfig::default())
}

/// Best realised container packing over [`candidate_containers_in`]; the first
/// candidate wins ties.
pub fn solve_container_with(
    inst: &Instance,
    c: usize,
    eps: Q,
    budget: usize,
    cfg: &SearchConfig,
) -> Result<ContainerSolution, GapError> {
    let grid = candidate_grid(inst, cfg.grid);
    let mut best: Option<ContainerSolution> = None;
    for cand in candidate_containers_in(inst.knapsack(), &grid, c, budget) {
        let sol = pack_into_containers_with(inst, &cand, eps, &cfg.gap)?;
        if best.as_ref().map_or(true, |b| sol.profit > b.profit) {
            best = Some(sol);
        }
    }
    Ok(best.unwrap_or_default())
}

/// Simple reference packings on the whole knapsack: one stack of items with the
/// shorter side vertical, one row with the shorter side horizontal, and NFDH on
/// the longest id-ordered prefix of `eps`-small items with area at most
/// `(1 - 2 eps) N^2`. Returns the most profitable of the three.
pub fn greedy_baseline(inst: &Instance, eps: Q) -> Packing {
    let n = inst.n;
    let mut items = inst.items.clone();
    items.sort_by(|a, b| a.id.cmp(&b.id));
    let full = |l| Container::new(0, 0, n, n, l);
    let orient = |it: &Item, want_flat: bool| {
        let r = inst.rotation_allowed && ((it.h > it.w) == want_flat);
        (it.clone(), r)
    };
    let stack = stack_horizontal(&full(Label::Horizontal), &items.iter().map(|i| orient(i, true)).collect::<Vec<_>>());
    let row = stack_vertical(&full(Label::Vertical), &items.iter().map(|i| orient(i, false)).collect::<Vec<_>>());
    let limit = floor_mul(Q::from_integer(1) - eps * 2, n * n);
    let mut prefix = Vec::new();
    let mut area = 0;
    for it in &items {
        let r = [false, true].into_iter().filter(|&r| !r || inst.rotation_allowed).find(|&r| {
            let (w, h) = effective_dims(it, r);
            le_mul(w, eps, n) && le_mul(h, eps, n)
        });
        let Some(r) = r else { continue };
        if area + it.area() > limit {
            break;
        }
        area += it.area();
        prefix.push((it.clone(), r));
    }
    let shelf = nfdh_oriented(&full(Label::Area), &prefix);
    [stack, row, shelf]
        .into_iter()
        .map(|r| Packing::new(r.placements))
        .max_by_key(|p| p.profit(inst))
        .unwrap_or_default()
}
