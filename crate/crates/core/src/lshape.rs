//! Packings into one L-shaped corridor at the origin plus a few containers.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::containers::{candidate_containers_in, candidate_grid, realise, solve_container_with, SearchConfig};
use crate::gap::{container_capacity, container_size, GapError};
use crate::model::{
    validate_container_packing, validate_packing, Container, Instance, Item, ItemId, Packing, Placement, Rect,
    ValidationReport, Violation,
};
use crate::rational::{le_mul, Q};

/// Horizontal arm `[0, W_L] x [0, h_L]`, vertical arm `[0, w_L] x [0, H_L]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LShape {
    #[serde(rename = "W_L")]
    pub big_w: i64,
    #[serde(rename = "H_L")]
    pub big_h: i64,
    #[serde(rename = "w_L")]
    pub w: i64,
    #[serde(rename = "h_L")]
    pub h: i64,
}

impl LShape {
    pub fn new(n: i64, big_h: i64, w: i64, h: i64) -> Self {
        LShape { big_w: n, big_h, w, h }
    }

    pub fn degenerate(n: i64) -> Self {
        LShape::new(n, 0, 0, 0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.h == 0 && (self.w == 0 || self.big_h == 0)
    }

    pub fn horizontal_arm(&self) -> Rect {
        Rect::new(0, 0, self.big_w, self.h)
    }

    pub fn vertical_arm(&self) -> Rect {
        Rect::new(0, 0, self.w, self.big_h)
    }

    pub fn intersects(&self, r: &Rect) -> bool {
        r.overlaps(&self.horizontal_arm()) || r.overlaps(&self.vertical_arm())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemPartition {
    pub horizontal: Vec<ItemId>,
    pub vertical: Vec<ItemId>,
    pub rest: Vec<ItemId>,
}

fn min_max(it: &Item) -> (i64, i64) {
    (it.w.min(it.h), it.w.max(it.h))
}

/// Items that may sit in the horizontal arm (long side above `N/2`), in the
/// vertical arm (long side in `(H_L/2, H_L]`) or in neither. Both arm classes
/// need their short side within `eps N`.
pub fn partition_for_l(inst: &Instance, big_h: i64, eps: Q) -> ItemPartition {
    let mut p = ItemPartition::default();
    for it in &inst.items {
        let (lo, hi) = min_max(it);
        let thin = le_mul(lo, eps, inst.n);
        if thin && 2 * hi > inst.n {
            p.horizontal.push(it.id.clone());
        } else if thin && 2 * hi > big_h && hi <= big_h {
            p.vertical.push(it.id.clone());
        } else {
            p.rest.push(it.id.clone());
        }
    }
    p
}

/// Which orientation class the vertical-arm items share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmOrientation {
    /// every vertical-arm item has `h* > w*`
    Tall,
    /// every vertical-arm item has `w* >= h*`
    Wide,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcSolution {
    pub lshape: LShape,
    pub containers: Vec<Container>,
    pub packing: Packing,
    pub profit: i64,
    pub orientation: Option<ArmOrientation>,
    pub dropped: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LcError {
    #[error(transparent)]
    Gap(#[from] GapError),
    #[error("search exceeded {0} memoised states")]
    StateBudgetExceeded(usize),
}

#[derive(Clone, Copy)]
struct ArmFit {
    w: i64,
    h: i64,
    rotated: bool,
}

fn fit_dims(it: &Item, w: i64, h: i64, rotation_allowed: bool) -> Option<ArmFit> {
    if (it.w, it.h) == (w, h) {
        Some(ArmFit { w, h, rotated: false })
    } else if rotation_allowed && (it.h, it.w) == (w, h) {
        Some(ArmFit { w, h, rotated: true })
    } else {
        None
    }
}

fn horizontal_fit(it: &Item, n: i64, rot: bool) -> Option<ArmFit> {
    let (lo, hi) = min_max(it);
    fit_dims(it, hi, lo, rot).filter(|f| 2 * f.w > n)
}

fn vertical_fit(it: &Item, l: &LShape, o: ArmOrientation, rot: bool) -> Option<ArmFit> {
    let (lo, hi) = min_max(it);
    let f = match o {
        ArmOrientation::Tall if lo < hi => fit_dims(it, lo, hi, rot)?,
        ArmOrientation::Tall => return None,
        ArmOrientation::Wide => fit_dims(it, hi, lo, rot)?,
    };
    (2 * f.h > l.big_h).then_some(f)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    i: usize,
    j: usize,
    k: usize,
    t: i64,
    r: i64,
    resid: Vec<i64>,
}

#[derive(Clone, Copy, Debug)]
enum Move {
    SkipH,
    HToL,
    HToC(usize),
    SkipV,
    VToL,
    VToC(usize),
    SkipR,
    RToC(usize),
}

struct Lc<'a> {
    l: LShape,
    hs: Vec<(&'a Item, Option<ArmFit>)>,
    vs: Vec<(&'a Item, Option<ArmFit>)>,
    rs: Vec<&'a Item>,
    /// size of each item in each container, keyed by item id
    sizes: HashMap<&'a str, Vec<Option<i64>>>,
    memo: HashMap<State, i64>,
    budget: usize,
}

impl<'a> Lc<'a> {
    fn moves(&self, s: &State) -> Vec<(Move, State, i64)> {
        let mut out = Vec::new();
        let containers = |it: &Item, mv: fn(usize) -> Move, next: &dyn Fn(&mut State), out: &mut Vec<(Move, State, i64)>| {
            for (c, sz) in self.sizes[it.id.as_str()].iter().enumerate() {
                if let Some(sz) = sz {
                    if *sz <= s.resid[c] {
                        let mut n = s.clone();
                        next(&mut n);
                        n.resid[c] -= sz;
                        out.push((mv(c), n, it.p));
                    }
                }
            }
        };
        if s.i < self.hs.len() {
            let (it, fit) = self.hs[s.i];
            out.push((Move::SkipH, State { i: s.i + 1, ..s.clone() }, 0));
            if let Some(f) = fit {
                if s.r + f.w <= self.l.big_w && s.t + f.h <= self.l.h {
                    out.push((Move::HToL, State { i: s.i + 1, t: s.t + f.h, ..s.clone() }, it.p));
                }
            }
            containers(it, Move::HToC, &|n| n.i += 1, &mut out);
        }
        if s.j < self.vs.len() {
            let (it, fit) = self.vs[s.j];
            out.push((Move::SkipV, State { j: s.j + 1, ..s.clone() }, 0));
            if let Some(f) = fit {
                if s.r + f.w <= self.l.w && s.t + f.h <= self.l.big_h {
                    out.push((Move::VToL, State { j: s.j + 1, r: s.r + f.w, ..s.clone() }, it.p));
                }
            }
            containers(it, Move::VToC, &|n| n.j += 1, &mut out);
        }
        if s.i == self.hs.len() && s.j == self.vs.len() && s.k < self.rs.len() {
            let it = self.rs[s.k];
            out.push((Move::SkipR, State { k: s.k + 1, ..s.clone() }, 0));
            containers(it, Move::RToC, &|n| n.k += 1, &mut out);
        }
        out
    }

    fn value(&mut self, s: &State) -> Result<i64, LcError> {
        if let Some(v) = self.memo.get(s) {
            return Ok(*v);
        }
        if self.memo.len() >= self.budget {
            return Err(LcError::StateBudgetExceeded(self.budget));
        }
        let mut best = 0;
        for (_, n, gain) in self.moves(s) {
            best = best.max(gain + self.value(&n)?);
        }
        self.memo.insert(s.clone(), best);
        Ok(best)
    }
}

/// Best packing for one fixed L, container set and vertical-arm orientation.
pub fn solve_lc_fixed(
    inst: &Instance,
    l: &LShape,
    containers: &[Container],
    eps: Q,
    orientation: ArmOrientation,
    state_budget: usize,
) -> Result<LcSolution, LcError> {
    let part = partition_for_l(inst, l.big_h, eps);
    let idx = inst.index();
    let rot = inst.rotation_allowed;
    let arm_ok = !l.is_degenerate();
    let mut hs: Vec<(&Item, Option<ArmFit>)> = part
        .horizontal
        .iter()
        .map(|id| {
            let it = idx[id.as_str()];
            (it, horizontal_fit(it, inst.n, rot).filter(|_| arm_ok))
        })
        .collect();
    hs.sort_by(|a, b| {
        let wa = a.1.map_or(0, |f| f.w);
        let wb = b.1.map_or(0, |f| f.w);
        wb.cmp(&wa).then(a.0.id.cmp(&b.0.id))
    });
    let mut vs: Vec<(&Item, Option<ArmFit>)> = part
        .vertical
        .iter()
        .map(|id| {
            let it = idx[id.as_str()];
            (it, vertical_fit(it, l, orientation, rot).filter(|_| arm_ok))
        })
        .collect();
    vs.sort_by(|a, b| {
        let ha = a.1.map_or(0, |f| f.h);
        let hb = b.1.map_or(0, |f| f.h);
        hb.cmp(&ha).then(a.0.id.cmp(&b.0.id))
    });
    let mut rs: Vec<&Item> = part.rest.iter().map(|id| idx[id.as_str()]).collect();
    rs.sort_by(|a, b| a.id.cmp(&b.id));
    let sizes = inst
        .items
        .iter()
        .map(|it| (it.id.as_str(), containers.iter().map(|c| container_size(c, it, rot, eps).map(|s| s.0)).collect()))
        .collect();
    let mut lc = Lc { l: *l, hs, vs, rs, sizes, memo: HashMap::new(), budget: state_budget };
    let root =
        State { i: 0, j: 0, k: 0, t: 0, r: 0, resid: containers.iter().map(|c| container_capacity(c, eps)).collect() };
    let total = lc.value(&root)?;

    let mut placements = Vec::new();
    let mut per_container: Vec<Vec<&Item>> = vec![Vec::new(); containers.len()];
    let mut s = root;
    loop {
        let target = lc.value(&s)?;
        let mut chosen = None;
        for (mv, n, gain) in lc.moves(&s) {
            if gain + lc.value(&n)? == target {
                chosen = Some((mv, n));
                break;
            }
        }
        let Some((mv, n)) = chosen else { break };
        match mv {
            Move::HToL => {
                let (it, f) = lc.hs[s.i];
                placements.push(Placement::new(it.id.clone(), s.r, s.t, f.unwrap().rotated));
            }
            Move::VToL => {
                let (it, f) = lc.vs[s.j];
                placements.push(Placement::new(it.id.clone(), s.r, s.t, f.unwrap().rotated));
            }
            Move::HToC(c) => per_container[c].push(lc.hs[s.i].0),
            Move::VToC(c) => per_container[c].push(lc.vs[s.j].0),
            Move::RToC(c) => per_container[c].push(lc.rs[s.k]),
            Move::SkipH | Move::SkipV | Move::SkipR => {}
        }
        s = n;
    }
    let mut dropped = Vec::new();
    for (c, items) in containers.iter().zip(&mut per_container) {
        items.sort_by(|a, b| a.id.cmp(&b.id));
        let (p, d) = realise(c, items, rot, eps);
        placements.extend(p);
        dropped.extend(d);
    }
    placements.sort_by(|a, b| a.id.cmp(&b.id));
    let packing = Packing::new(placements);
    let profit = packing.profit(inst);
    debug_assert!(profit <= total);
    Ok(LcSolution { lshape: *l, containers: containers.to_vec(), packing, profit, orientation: Some(orientation), dropped })
}

/// Candidate L shapes: `H_L` from extents, their pairwise sums and the grid,
/// arm thicknesses from extents, all within the size limits of an L. Sorted.
pub fn candidate_lshapes(inst: &Instance, eps: Q, grid: i64) -> Vec<LShape> {
    let n = inst.n;
    let ext: BTreeSet<i64> = inst.items.iter().flat_map(|it| [it.w, it.h]).collect();
    let mut tall: BTreeSet<i64> = candidate_grid(inst, grid).into_iter().filter(|&v| 2 * v <= n).collect();
    tall.extend(ext.iter().copied().filter(|&v| 2 * v <= n));
    let thick: Vec<i64> = std::iter::once(0).chain(ext.iter().copied().filter(|&v| le_mul(v, eps, n))).collect();
    let mut out = Vec::new();
    for &bh in &tall {
        for &w in &thick {
            for &h in &thick {
                let l = LShape::new(n, bh, w, h);
                if h <= bh && !l.is_degenerate() {
                    out.push(l);
                }
            }
        }
    }
    out
}

pub fn solve_lc_star(inst: &Instance, c: usize, eps: Q, budget: usize) -> Result<LcSolution, LcError> {
    solve_lc_star_with(inst, c, eps, budget, &SearchConfig::default(), 1 << 20)
}

/// Starts from the best container packing (the empty L) and tries every
/// candidate L with both vertical-arm orientations and container sets in the
/// region right of and above the arms. The first best candidate wins.
pub fn solve_lc_star_with(
    inst: &Instance,
    c: usize,
    eps: Q,
    budget: usize,
    cfg: &SearchConfig,
    state_budget: usize,
) -> Result<LcSolution, LcError> {
    let base = if c >= 1 { solve_container_with(inst, c, eps, budget, cfg)? } else { Default::default() };
    let mut best = LcSolution {
        lshape: LShape::degenerate(inst.n),
        containers: base.containers,
        packing: base.packing,
        profit: base.profit,
        orientation: None,
        dropped: base.dropped,
    };
    let shapes = candidate_lshapes(inst, eps, cfg.grid);
    let grid = candidate_grid(inst, cfg.grid);
    let per_shape = (budget / shapes.len().max(1)).max(3);
    for l in shapes.iter().take(budget.max(1)) {
        let free = Rect::new(l.w, l.h, inst.n - l.w, inst.n - l.h);
        let mut sets = vec![Vec::new()];
        if c >= 1 {
            sets.extend(candidate_containers_in(free, &grid, c, per_shape));
        }
        for cs in &sets {
            for o in [ArmOrientation::Tall, ArmOrientation::Wide] {
                match solve_lc_fixed(inst, l, cs, eps, o, state_budget) {
                    Ok(sol) if sol.profit > best.profit => best = sol,
                    Ok(_) | Err(LcError::StateBudgetExceeded(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(best)
}

/// Checks the L-and-containers rules literally.
///
/// An item inside the vertical arm rectangle counts as a vertical-arm item;
/// any other item inside the horizontal arm is a horizontal-arm item; every
/// remaining item must lie in exactly one container.
pub fn validate_lc_star(
    inst: &Instance,
    packing: &Packing,
    l: &LShape,
    containers: &[Container],
    eps: Q,
) -> ValidationReport {
    let mut report = validate_packing(inst, packing);
    let mut out = Vec::new();
    let n = inst.n;
    let shape = format!("L(W={}, H={}, w={}, h={})", l.big_w, l.big_h, l.w, l.h);
    if l.big_w != n
        || 2 * l.big_h > n
        || !le_mul(l.w, eps, n)
        || !le_mul(l.h, eps, n)
        || l.w > l.big_w
        || l.h > l.big_h
        || l.w < 0
        || l.h < 0
    {
        out.push(Violation::new("l_shape_bounds", vec![], format!("{shape} violates the size limits")));
    }
    for (i, c) in containers.iter().enumerate() {
        if l.intersects(&c.rect()) {
            out.push(Violation::new("container_intersects_l", vec![crate::model::container_name(i)], shape.clone()));
        }
    }
    let idx = inst.index();
    let mut rest = Vec::new();
    let mut arm_classes = BTreeSet::new();
    for pl in &packing.placements {
        let Some(it) = idx.get(pl.id.as_str()) else { continue };
        let r = pl.rect(it);
        if !l.is_degenerate() && l.vertical_arm().w > 0 && l.vertical_arm().contains(&r) {
            if 2 * r.h <= l.big_h {
                out.push(Violation::new("vertical_arm_item_too_short", vec![pl.id.clone()], format!("h*(i)={} violates h*(i) > H_L/2", r.h)));
            }
            arm_classes.insert(r.h > r.w);
        } else if !l.is_degenerate() && l.horizontal_arm().h > 0 && l.horizontal_arm().contains(&r) {
            if 2 * r.w <= n {
                out.push(Violation::new("horizontal_arm_item_too_narrow", vec![pl.id.clone()], format!("w*(i)={} violates w*(i) > N/2", r.w)));
            }
        } else {
            rest.push(pl.clone());
        }
    }
    if arm_classes.len() > 1 {
        out.push(Violation::new("mixed_arm_orientation", vec![], "vertical arm mixes tall and wide items"));
    }
    let cont = validate_container_packing(inst, &Packing::new(rest), containers, eps);
    report = report.merge(ValidationReport::from_violations(out)).merge(cont);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: i64, rot: bool, d: &[(i64, i64, i64)]) -> Instance {
        Instance::new(n, rot, d.iter().enumerate().map(|(i, &(w, h, p))| Item::new(format!("i{i}"), w, h, p)).collect())
    }

    #[test]
    fn partition_examples() {
        let k = inst(100, false, &[(60, 5, 1), (30, 4, 1), (60, 60, 1)]);
        let p = partition_for_l(&k, 40, Q::new(1, 10));
        assert_eq!(p.horizontal, vec!["i0"]);
        assert_eq!(p.vertical, vec!["i1"]);
        assert_eq!(p.rest, vec!["i2"]);
    }

    #[test]
    fn both_arms_used() {
        let k = inst(100, true, &[(90, 10, 5), (8, 35, 4)]);
        let l = LShape::new(100, 40, 10, 10);
        let sol = solve_lc_fixed(&k, &l, &[], Q::new(1, 10), ArmOrientation::Tall, 1 << 16).unwrap();
        assert_eq!(sol.profit, 9);
        assert!(validate_lc_star(&k, &sol.packing, &l, &[], Q::new(1, 10)).valid);
    }

    #[test]
    fn wide_guess_cannot_use_the_vertical_arm() {
        let k = inst(100, true, &[(8, 35, 4)]);
        let l = LShape::new(100, 40, 10, 10);
        let wide = solve_lc_fixed(&k, &l, &[], Q::new(1, 10), ArmOrientation::Wide, 1 << 16).unwrap();
        assert_eq!(wide.profit, 0);
        let tall = solve_lc_fixed(&k, &l, &[], Q::new(1, 10), ArmOrientation::Tall, 1 << 16).unwrap();
        assert_eq!(tall.profit, 4);
    }

    #[test]
    fn degenerate_l_matches_container_search() {
        let k = inst(10, false, &[(3, 9, 2), (7, 9, 3), (5, 2, 4)]);
        let eps = Q::new(1, 4);
        for set in crate::containers::candidate_containers(&k, 2, 60) {
            let lc = solve_lc_fixed(&k, &LShape::degenerate(10), &set, eps, ArmOrientation::Tall, 1 << 16).unwrap();
            let cs = crate::containers::pack_into_containers(&k, &set, eps).unwrap();
            assert_eq!(lc.profit, cs.profit);
        }
        let lc = solve_lc_star(&k, 2, eps, 40).unwrap();
        assert!(lc.profit >= crate::containers::solve_container(&k, 2, eps, 40).unwrap().profit);
        assert!(validate_lc_star(&k, &lc.packing, &lc.lshape, &lc.containers, eps).valid);
    }

    #[test]
    fn validator_flags_short_arm_items() {
        let k = inst(100, false, &[(40, 5, 1)]);
        let l = LShape::new(100, 40, 10, 10);
        let p = Packing::new(vec![Placement::new("i0", 20, 0, false)]);
        let rep = validate_lc_star(&k, &p, &l, &[], Q::new(1, 10));
        assert!(rep.has("horizontal_arm_item_too_narrow"));
        let bad = LShape::new(100, 60, 10, 10);
        assert!(validate_lc_star(&k, &Packing::default(), &bad, &[], Q::new(1, 10)).has("l_shape_bounds"));
    }
}
