//! Exact solvers for tiny instances.
//!
//! `solve_exact` walks item subsets by decreasing profit and stops at the
//! first one that packs. Feasibility scans the cells of a compressed grid in
//! row-major order and either starts an item at the first undecided cell or
//! marks it as waste, never wasting more than `N^2` minus the subset's area.
//! Grid lines are the subset sums of effective widths (heights); any packing
//! can be pushed down and left until every edge lies on such a line, so the
//! scan is complete.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use crate::containers::realise;
use crate::model::{Container, Instance, Item, Label, Packing, Placement};
use crate::rational::{floor_mul, le_mul, Q};

#[derive(Debug, Clone)]
pub struct OracleLimits {
    pub max_items: usize,
    pub max_candidate_coords: usize,
    pub node_budget: u64,
    pub time_budget: Option<Duration>,
    /// Use every integer coordinate instead of subset sums (cross-checks).
    pub unit_grid: bool,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_items: 10,
            max_candidate_coords: 20_000,
            node_budget: 50_000_000,
            time_budget: None,
            unit_grid: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{n} items exceed the oracle limit of {max}")]
    TooManyItems { n: usize, max: usize },
    #[error("more than {max} candidate coordinates")]
    TooManyCoords { max: usize },
    #[error("exhaustive container search supports at most 2 containers (got {0})")]
    TooManyContainers(usize),
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub packing: Packing,
    pub profit: i64,
    pub certified: bool,
    pub nodes: u64,
}

fn subset_sums(dims: &[Vec<i64>], n: i64, unit: bool, cap: usize) -> Result<Vec<i64>, OracleError> {
    if unit {
        if n as usize + 1 > cap {
            return Err(OracleError::TooManyCoords { max: cap });
        }
        return Ok((0..=n).collect());
    }
    let mut sums: BTreeSet<i64> = BTreeSet::from([0]);
    for opts in dims {
        let mut next = sums.clone();
        for &s in &sums {
            for &d in opts {
                if s + d <= n {
                    next.insert(s + d);
                }
            }
        }
        if next.len() > cap {
            return Err(OracleError::TooManyCoords { max: cap });
        }
        sums = next;
    }
    sums.insert(n);
    Ok(sums.into_iter().collect())
}

/// Identical items share a type so permutations are not explored.
struct ItemType {
    ids: Vec<String>,
    orients: Vec<(i64, i64, bool)>,
}

enum Fit {
    Packed(Vec<Placement>),
    Impossible,
    Aborted,
}

struct Scan {
    xs: Vec<i64>,
    ys: Vec<i64>,
    xi: HashMap<i64, usize>,
    yi: HashMap<i64, usize>,
    types: Vec<ItemType>,
    left: Vec<usize>,
    occ: Vec<bool>,
    waste: i64,
    cur: Vec<(usize, usize, usize, bool)>,
    nodes: u64,
    cap: u64,
    deadline: Option<Instant>,
    aborted: bool,
}

impl Scan {
    fn cols(&self) -> usize {
        self.xs.len() - 1
    }

    fn cell_area(&self, idx: usize) -> i64 {
        let (c, r) = (idx % self.cols(), idx / self.cols());
        (self.xs[c + 1] - self.xs[c]) * (self.ys[r + 1] - self.ys[r])
    }

    fn region_free(&self, c0: usize, c1: usize, r0: usize, r1: usize) -> bool {
        (r0..r1).all(|r| (c0..c1).all(|c| !self.occ[r * self.cols() + c]))
    }

    fn set_region(&mut self, c0: usize, c1: usize, r0: usize, r1: usize, v: bool) {
        let cols = self.cols();
        for r in r0..r1 {
            for c in c0..c1 {
                self.occ[r * cols + c] = v;
            }
        }
    }

    /// True once every item is placed.
    fn run(&mut self, from: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.cap || (self.nodes % 4096 == 0 && self.deadline.map_or(false, |d| Instant::now() > d)) {
            self.aborted = true;
        }
        if self.aborted {
            return false;
        }
        if self.left.iter().all(|&l| l == 0) {
            return true;
        }
        let Some(idx) = (from..self.occ.len()).find(|&i| !self.occ[i]) else { return false };
        let cols = self.cols();
        let (c0, r0) = (idx % cols, idx / cols);
        let (x0, y0) = (self.xs[c0], self.ys[r0]);
        for t in 0..self.types.len() {
            if self.left[t] == 0 {
                continue;
            }
            for o in 0..self.types[t].orients.len() {
                let (w, h, rot) = self.types[t].orients[o];
                let (Some(&c1), Some(&r1)) = (self.xi.get(&(x0 + w)), self.yi.get(&(y0 + h))) else { continue };
                if !self.region_free(c0, c1, r0, r1) {
                    continue;
                }
                self.set_region(c0, c1, r0, r1, true);
                self.left[t] -= 1;
                self.cur.push((t, c0, r0, rot));
                if self.run(idx + 1) {
                    return true;
                }
                self.cur.pop();
                self.left[t] += 1;
                self.set_region(c0, c1, r0, r1, false);
                if self.aborted {
                    return false;
                }
            }
        }
        let a = self.cell_area(idx);
        if a > self.waste {
            return false;
        }
        self.occ[idx] = true;
        self.waste -= a;
        let done = self.run(idx + 1);
        self.waste += a;
        self.occ[idx] = false;
        done
    }
}

fn orientations(i: &Item, n: i64, rot: bool) -> Vec<(i64, i64, bool)> {
    let mut v = vec![(i.w, i.h, false)];
    if rot && i.w != i.h {
        v.push((i.h, i.w, true));
    }
    v.retain(|&(w, h, _)| w <= n && h <= n);
    v
}

/// Decides whether all of `items` fit together, within `cap` search nodes.
fn pack_all(items: &[&Item], n: i64, rot: bool, limits: &OracleLimits, cap: u64, deadline: Option<Instant>) -> Result<(Fit, u64), OracleError> {
    let wdims: Vec<Vec<i64>> = items.iter().map(|i| orientations(i, n, rot).iter().map(|o| o.0).collect()).collect();
    let hdims: Vec<Vec<i64>> = items.iter().map(|i| orientations(i, n, rot).iter().map(|o| o.1).collect()).collect();
    let xs = subset_sums(&wdims, n, limits.unit_grid, limits.max_candidate_coords)?;
    let ys = subset_sums(&hdims, n, limits.unit_grid, limits.max_candidate_coords)?;
    let mut sorted = items.to_vec();
    // large items first find contradictions early
    sorted.sort_by(|a, b| b.area().cmp(&a.area()).then(a.id.cmp(&b.id)));
    let mut types: Vec<ItemType> = Vec::new();
    for it in sorted {
        let o = orientations(it, n, rot);
        match types.iter_mut().find(|t| t.orients == o) {
            Some(t) => t.ids.push(it.id.clone()),
            None => types.push(ItemType { ids: vec![it.id.clone()], orients: o }),
        }
    }
    let cells = (xs.len() - 1) * (ys.len() - 1);
    let mut s = Scan {
        xi: xs.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
        yi: ys.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
        xs,
        ys,
        left: types.iter().map(|t| t.ids.len()).collect(),
        types,
        occ: vec![false; cells],
        waste: n * n - items.iter().map(|i| i.area()).sum::<i64>(),
        cur: Vec::new(),
        nodes: 0,
        cap,
        deadline,
        aborted: false,
    };
    if s.waste < 0 {
        return Ok((Fit::Impossible, 0));
    }
    let fit = if s.run(0) {
        let mut used = vec![0usize; s.types.len()];
        let mut pl: Vec<Placement> = s
            .cur
            .iter()
            .map(|&(t, c, r, rot)| {
                let id = s.types[t].ids[used[t]].clone();
                used[t] += 1;
                Placement::new(id, s.xs[c], s.ys[r], rot)
            })
            .collect();
        pl.sort_by(|a, b| a.id.cmp(&b.id));
        Fit::Packed(pl)
    } else if s.aborted {
        Fit::Aborted
    } else {
        Fit::Impossible
    };
    Ok((fit, s.nodes))
}

/// Maximum-profit packing of a tiny instance. `certified` is false when the
/// node or time budget ran out; the packing is then the best one found by a
/// short search over the remaining subsets.
pub fn solve_exact(inst: &Instance, limits: &OracleLimits) -> Result<ExactResult, OracleError> {
    let n = inst.n;
    if inst.items.len() > limits.max_items {
        return Err(OracleError::TooManyItems { n: inst.items.len(), max: limits.max_items });
    }
    let rot = inst.rotation_allowed;
    let fits: Vec<&Item> = inst.items.iter().filter(|i| i.p > 0 && !orientations(i, n, rot).is_empty()).collect();
    let m = fits.len();
    let mut order: Vec<(i64, i64, u32)> = (0u32..1 << m)
        .map(|mask| {
            let sel = (0..m).filter(|&i| mask >> i & 1 == 1);
            let p = sel.clone().map(|i| fits[i].p).sum();
            let a = sel.map(|i| fits[i].area()).sum();
            (p, a, mask)
        })
        .filter(|&(_, a, _)| a <= n * n)
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let deadline = limits.time_budget.map(|t| Instant::now() + t);
    let pick = |mask: u32| -> Vec<&Item> { (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| fits[i]).collect() };
    let mut infeasible: Vec<u32> = Vec::new();
    let mut nodes = 0u64;
    let mut stopped = order.len();
    for (k, &(p, _, mask)) in order.iter().enumerate() {
        if infeasible.iter().any(|&b| b & mask == b) {
            continue;
        }
        let (fit, used) = pack_all(&pick(mask), n, rot, limits, limits.node_budget.saturating_sub(nodes), deadline)?;
        nodes += used;
        match fit {
            Fit::Packed(pl) => return Ok(ExactResult { packing: Packing::new(pl), profit: p, certified: true, nodes }),
            Fit::Impossible => infeasible.push(mask),
            Fit::Aborted => {
                stopped = k;
                break;
            }
        }
    }
    // out of budget: first subset that packs within a small allowance
    for &(p, _, mask) in &order[stopped.min(order.len())..] {
        if infeasible.iter().any(|&b| b & mask == b) {
            continue;
        }
        if let (Fit::Packed(pl), used) = pack_all(&pick(mask), n, rot, limits, 2_000, None)? {
            nodes += used;
            return Ok(ExactResult { packing: Packing::new(pl), profit: p, certified: false, nodes });
        }
    }
    Ok(ExactResult { packing: Packing::default(), profit: 0, certified: false, nodes })
}

#[derive(Debug, Clone)]
pub struct ExactContainerResult {
    pub packing: Packing,
    pub containers: Vec<Container>,
    pub profit: i64,
    pub certified: bool,
}

/// Size an item takes in a container, or `None` if it is not admissible.
fn size_in(c: &Container, it: &Item, rot_ok: bool, eps: Q) -> Option<i64> {
    let mut opts = vec![(it.w, it.h)];
    if rot_ok {
        opts.push((it.h, it.w));
    }
    let fitting = opts.into_iter().filter(|&(w, h)| w <= c.w && h <= c.h);
    match c.label {
        Label::Horizontal => fitting.map(|(_, h)| h).min(),
        Label::Vertical => fitting.map(|(w, _)| w).min(),
        Label::Area => {
            let mut f = fitting.filter(|&(w, h)| le_mul(w, eps, c.w) && le_mul(h, eps, c.h));
            f.next().map(|_| it.area())
        }
    }
}

fn cap_of(c: &Container, eps: Q) -> i64 {
    match c.label {
        Label::Horizontal => c.h,
        Label::Vertical => c.w,
        Label::Area => floor_mul(Q::from_integer(1) - eps * 2, c.area()),
    }
}

/// Best assignment by plain depth-first enumeration.
fn best_assignment(items: &[Item], sizes: &[Vec<Option<i64>>], caps: &[i64]) -> (i64, Vec<Option<usize>>) {
    fn go(
        i: usize,
        items: &[Item],
        sizes: &[Vec<Option<i64>>],
        load: &mut Vec<i64>,
        caps: &[i64],
        cur: &mut Vec<Option<usize>>,
        profit: i64,
        best: &mut (i64, Vec<Option<usize>>),
    ) {
        if i == items.len() {
            if profit > best.0 {
                *best = (profit, cur.clone());
            }
            return;
        }
        cur.push(None);
        go(i + 1, items, sizes, load, caps, cur, profit, best);
        cur.pop();
        for b in 0..caps.len() {
            if let Some(s) = sizes[i][b] {
                if load[b] + s <= caps[b] {
                    load[b] += s;
                    cur.push(Some(b));
                    go(i + 1, items, sizes, load, caps, cur, profit + items[i].p, best);
                    cur.pop();
                    load[b] -= s;
                }
            }
        }
    }
    let mut best = (0, vec![None; items.len()]);
    go(0, items, sizes, &mut vec![0; caps.len()], caps, &mut Vec::new(), 0, &mut best);
    best
}

/// Optimum over container packings with at most `c <= 2` containers. Two
/// disjoint rectangles are separated by an axis-parallel line and can be
/// grown to the two sides of it, so it suffices to try every cut position.
pub fn solve_exact_container(inst: &Instance, c: usize, eps: Q, limits: &OracleLimits) -> Result<ExactContainerResult, OracleError> {
    if c > 2 {
        return Err(OracleError::TooManyContainers(c));
    }
    if inst.items.len() > limits.max_items {
        return Err(OracleError::TooManyItems { n: inst.items.len(), max: limits.max_items });
    }
    let n = inst.n;
    let mut configs: Vec<Vec<Container>> = vec![Vec::new()];
    if c >= 1 {
        for l in Label::ALL {
            configs.push(vec![Container::new(0, 0, n, n, l)]);
        }
    }
    let mut certified = true;
    if c == 2 {
        let cuts: Vec<i64> = if (n as usize) <= limits.max_candidate_coords {
            (1..n).collect()
        } else {
            certified = false;
            let dims: Vec<Vec<i64>> = inst.items.iter().map(|i| vec![i.w, i.h]).collect();
            subset_sums(&dims, n, false, usize::MAX)?.into_iter().filter(|&s| s > 0 && s < n).collect()
        };
        for &s in &cuts {
            for a in Label::ALL {
                for b in Label::ALL {
                    configs.push(vec![Container::new(0, 0, s, n, a), Container::new(s, 0, n - s, n, b)]);
                    configs.push(vec![Container::new(0, 0, n, s, a), Container::new(0, s, n, n - s, b)]);
                }
            }
        }
    }
    let start = Instant::now();
    let mut best: (i64, Vec<Container>, Vec<Option<usize>>) = (-1, Vec::new(), Vec::new());
    for cfg in configs {
        if limits.time_budget.map_or(false, |t| start.elapsed() > t) {
            certified = false;
            break;
        }
        let sizes: Vec<Vec<Option<i64>>> =
            inst.items.iter().map(|it| cfg.iter().map(|k| size_in(k, it, inst.rotation_allowed, eps)).collect()).collect();
        let caps: Vec<i64> = cfg.iter().map(|k| cap_of(k, eps)).collect();
        let (p, asg) = best_assignment(&inst.items, &sizes, &caps);
        if p > best.0 {
            best = (p, cfg, asg);
        }
    }
    let (profit, containers, asg) = best;
    let mut placements = Vec::new();
    for (k, cont) in containers.iter().enumerate() {
        let members: Vec<&Item> = inst.items.iter().zip(&asg).filter(|(_, a)| **a == Some(k)).map(|(i, _)| i).collect();
        let (pl, dropped) = realise(cont, &members, inst.rotation_allowed, eps);
        debug_assert!(dropped.is_empty(), "capacity-feasible assignment must realise");
        placements.extend(pl);
    }
    placements.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(ExactContainerResult { packing: Packing::new(placements), containers, profit: profit.max(0), certified })
}
