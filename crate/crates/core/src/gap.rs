//! Generalized assignment with a handful of bins and bin-independent profits.
//!
//! Items are processed in id order. The optimum is exact and ties are broken
//! toward the lexicographically smallest assignment vector, where an item's
//! code is 0 when unassigned and `j + 1` when it goes to bin `j`.
//!
//! Small capacity products use a table over residual-capacity vectors. Larger
//! ones use a depth-first branch and bound that visits assignment vectors in
//! lexicographic order, which yields the same answer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{effective_dims, Container, Item, Label};
use crate::rational::{floor_mul, le_mul, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapBin {
    pub id: String,
    pub capacity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapItem {
    pub id: String,
    pub profit: i64,
    /// One entry per bin; `None` marks an item that cannot go into that bin.
    pub sizes: Vec<Option<i64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapInstance {
    pub bins: Vec<GapBin>,
    pub items: Vec<GapItem>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSolution {
    /// item id -> bin id, only for assigned items
    pub assignment: BTreeMap<String, String>,
    pub profit: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapConfig {
    pub k_max: usize,
    /// Largest residual-state table (product of `capacity + 1`).
    pub state_budget: u64,
    /// Largest table including the item dimension.
    pub cell_budget: u64,
    /// Search nodes allowed when the table is too large.
    pub node_budget: u64,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig { k_max: 8, state_budget: 1 << 20, cell_budget: 1 << 23, node_budget: 5_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("{k} bins exceed the limit of {k_max}")]
    TooManyBins { k: usize, k_max: usize },
    #[error("state budget exceeded ({states} states, {nodes} search nodes); coarsen capacities")]
    StateBudgetExceeded { states: u128, nodes: u64 },
    #[error("malformed instance: {0}")]
    Malformed(String),
}

pub fn solve_gap(inst: &GapInstance) -> Result<GapSolution, GapError> {
    solve_gap_with(inst, &GapConfig::default())
}

pub fn solve_gap_with(inst: &GapInstance, cfg: &GapConfig) -> Result<GapSolution, GapError> {
    let k = inst.bins.len();
    if k > cfg.k_max {
        return Err(GapError::TooManyBins { k, k_max: cfg.k_max });
    }
    for b in &inst.bins {
        if b.capacity < 0 {
            return Err(GapError::Malformed(format!("bin {} has negative capacity", b.id)));
        }
    }
    let mut order: Vec<usize> = (0..inst.items.len()).collect();
    order.sort_by(|&a, &b| inst.items[a].id.cmp(&inst.items[b].id));
    let mut items: Vec<Prepared> = Vec::with_capacity(order.len());
    for &oi in &order {
        let it = &inst.items[oi];
        if it.sizes.len() != k {
            return Err(GapError::Malformed(format!("item {} has {} sizes for {k} bins", it.id, it.sizes.len())));
        }
        if it.sizes.iter().flatten().any(|&s| s < 0) {
            return Err(GapError::Malformed(format!("item {} has a negative size", it.id)));
        }
        // sizes above capacity are as good as infeasible
        let sizes =
            it.sizes.iter().zip(&inst.bins).map(|(s, b)| s.filter(|&s| s <= b.capacity)).collect::<Vec<_>>();
        items.push(Prepared { profit: it.profit.max(0), sizes, raw_profit: it.profit });
    }
    // a capacity beyond the total demand on a bin changes nothing
    let caps: Vec<i64> = (0..k)
        .map(|j| {
            let demand: i64 = items.iter().filter_map(|it| it.sizes[j]).sum();
            inst.bins[j].capacity.min(demand)
        })
        .collect();
    let states: u128 = caps.iter().map(|&c| c as u128 + 1).product();
    let cells = states * (items.len() as u128 + 1);
    let fits_table = states <= cfg.state_budget as u128 && cells <= cfg.cell_budget as u128;
    // a short search settles most small instances without allocating the table
    let quick = if fits_table && cells > 4096 { branch_and_bound(&items, &caps, cfg.node_budget.min(20_000)) } else { None };
    let codes = if let Some(c) = quick {
        c
    } else if fits_table {
        table(&items, &caps, states as usize)
    } else {
        branch_and_bound(&items, &caps, cfg.node_budget).ok_or(GapError::StateBudgetExceeded { states, nodes: cfg.node_budget })?
    };
    let mut sol = GapSolution::default();
    for (pos, &code) in codes.iter().enumerate() {
        if code > 0 {
            let it = &inst.items[order[pos]];
            sol.assignment.insert(it.id.clone(), inst.bins[code - 1].id.clone());
            sol.profit += items[pos].raw_profit;
        }
    }
    Ok(sol)
}

struct Prepared {
    /// negative profits are never worth assigning
    profit: i64,
    raw_profit: i64,
    sizes: Vec<Option<i64>>,
}

fn table(items: &[Prepared], caps: &[i64], states: usize) -> Vec<usize> {
    let k = caps.len();
    let mut stride = vec![1usize; k];
    for j in 1..k {
        stride[j] = stride[j - 1] * (caps[j - 1] as usize + 1);
    }
    let digit = |s: usize, j: usize| (s / stride[j]) % (caps[j] as usize + 1);
    let n = items.len();
    // best[i][s]: optimum over items i.. with residual state s
    let mut best: Vec<Vec<i64>> = vec![Vec::new(); n + 1];
    best[n] = vec![0; states];
    for i in (0..n).rev() {
        let next = &best[i + 1];
        let mut cur = next.clone();
        let it = &items[i];
        if it.profit > 0 {
            for j in 0..k {
                let Some(sz) = it.sizes[j] else { continue };
                let off = sz as usize * stride[j];
                for s in 0..states {
                    if digit(s, j) >= sz as usize {
                        let v = it.profit + next[s - off];
                        if v > cur[s] {
                            cur[s] = v;
                        }
                    }
                }
            }
        }
        best[i] = cur;
    }
    let mut s: usize = (0..k).map(|j| caps[j] as usize * stride[j]).sum();
    let mut codes = vec![0usize; n];
    for i in 0..n {
        let target = best[i][s];
        if best[i + 1][s] == target {
            continue;
        }
        let it = &items[i];
        for j in 0..k {
            let Some(sz) = it.sizes[j] else { continue };
            if digit(s, j) >= sz as usize && it.profit + best[i + 1][s - sz as usize * stride[j]] == target {
                codes[i] = j + 1;
                s -= sz as usize * stride[j];
                break;
            }
        }
        debug_assert!(codes[i] > 0);
    }
    codes
}

fn branch_and_bound(items: &[Prepared], caps: &[i64], node_budget: u64) -> Option<Vec<usize>> {
    let seed = greedy_profit(items, caps);
    let mut st = Bnb {
        items,
        resid: caps.to_vec(),
        codes: vec![0; items.len()],
        best: None,
        need: seed,
        nodes: 0,
        budget: node_budget,
        suffix: suffix_profits(items),
    };
    st.dfs(0, 0);
    if st.nodes > st.budget {
        return None;
    }
    st.best.map(|(_, c)| c)
}

fn suffix_profits(items: &[Prepared]) -> Vec<i64> {
    let mut s = vec![0; items.len() + 1];
    for i in (0..items.len()).rev() {
        s[i] = s[i + 1] + items[i].profit;
    }
    s
}

fn greedy_profit(items: &[Prepared], caps: &[i64]) -> i64 {
    let mut resid = caps.to_vec();
    let mut order: Vec<usize> = (0..items.len()).filter(|&i| items[i].profit > 0).collect();
    let min_size = |i: usize| items[i].sizes.iter().flatten().copied().min().unwrap_or(i64::MAX);
    order.sort_by(|&a, &b| {
        let (sa, sb) = (min_size(a).max(1) as i128, min_size(b).max(1) as i128);
        (items[b].profit as i128 * sa).cmp(&(items[a].profit as i128 * sb)).then(a.cmp(&b))
    });
    let mut total = 0;
    for i in order {
        let pick = (0..caps.len())
            .filter(|&j| items[i].sizes[j].is_some_and(|s| s <= resid[j]))
            .min_by_key(|&j| resid[j] - items[i].sizes[j].unwrap());
        if let Some(j) = pick {
            resid[j] -= items[i].sizes[j].unwrap();
            total += items[i].profit;
        }
    }
    total
}

struct Bnb<'a> {
    items: &'a [Prepared],
    resid: Vec<i64>,
    codes: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
    need: i64,
    nodes: u64,
    budget: u64,
    suffix: Vec<i64>,
}

impl Bnb<'_> {
    fn bound(&self, i: usize) -> i64 {
        let total_resid: i64 = self.resid.iter().sum();
        let mut cand: Vec<(i64, i64)> = Vec::new();
        for it in &self.items[i..] {
            if it.profit <= 0 {
                continue;
            }
            let m = it
                .sizes
                .iter()
                .zip(&self.resid)
                .filter_map(|(s, r)| s.filter(|&s| s <= *r))
                .min();
            if let Some(m) = m {
                cand.push((it.profit, m));
            }
        }
        let simple: i64 = cand.iter().map(|c| c.0).sum();
        cand.sort_by(|a, b| (b.0 as i128 * a.1 as i128).cmp(&(a.0 as i128 * b.1 as i128)));
        let mut room = total_resid as i128;
        let mut frac = 0i128;
        for (p, s) in cand {
            if s as i128 <= room {
                room -= s as i128;
                frac += p as i128;
            } else {
                // ceil of the fractional part keeps the bound valid for integers
                frac += (p as i128 * room + s as i128 - 1) / s as i128;
                break;
            }
        }
        simple.min(frac as i64).min(self.suffix[i])
    }

    fn dfs(&mut self, i: usize, profit: i64) {
        self.nodes += 1;
        if self.nodes > self.budget {
            return;
        }
        if i == self.items.len() {
            if profit >= self.need {
                self.best = Some((profit, self.codes.clone()));
                self.need = profit + 1;
            }
            return;
        }
        if profit + self.bound(i) < self.need {
            return;
        }
        self.codes[i] = 0;
        self.dfs(i + 1, profit);
        if self.items[i].profit <= 0 {
            return;
        }
        for j in 0..self.resid.len() {
            let Some(s) = self.items[i].sizes[j] else { continue };
            if s > self.resid[j] {
                continue;
            }
            self.resid[j] -= s;
            self.codes[i] = j + 1;
            self.dfs(i + 1, profit + self.items[i].profit);
            self.resid[j] += s;
            self.codes[i] = 0;
            if self.nodes > self.budget {
                return;
            }
        }
    }
}

/// Divides capacities by `g` (rounding down) and sizes by `g` (rounding up):
/// every assignment feasible for the result is feasible for the original.
pub fn coarsen(inst: &GapInstance, g: i64) -> GapInstance {
    assert!(g >= 1, "coarsening factor must be positive");
    GapInstance {
        bins: inst.bins.iter().map(|b| GapBin { id: b.id.clone(), capacity: b.capacity / g }).collect(),
        items: inst
            .items
            .iter()
            .map(|it| GapItem {
                id: it.id.clone(),
                profit: it.profit,
                sizes: it.sizes.iter().map(|s| s.map(|s| (s + g - 1) / g)).collect(),
            })
            .collect(),
    }
}

/// Checks capacities and recomputes profit; `None` when the assignment is infeasible.
pub fn assignment_profit(inst: &GapInstance, sol: &GapSolution) -> Option<i64> {
    let mut used = vec![0i64; inst.bins.len()];
    let mut profit = 0;
    for (iid, bid) in &sol.assignment {
        let it = inst.items.iter().find(|i| &i.id == iid)?;
        let j = inst.bins.iter().position(|b| &b.id == bid)?;
        used[j] += it.sizes[j]?;
        profit += it.profit;
    }
    used.iter().zip(&inst.bins).all(|(u, b)| *u <= b.capacity).then_some(profit)
}

/// Orientation used when an item goes into a container, or `None` if it cannot.
///
/// Horizontal containers take the fitting orientation whose shorter side is
/// vertical (the other one only if that is the sole fit); vertical containers
/// mirror this. Area containers need both sides within `eps` of the container.
pub fn container_orientation(c: &Container, item: &Item, rotation_allowed: bool, eps: Q) -> Option<bool> {
    let options: &[bool] = if rotation_allowed { &[false, true] } else { &[false] };
    let fits = |r: bool| {
        let (w, h) = effective_dims(item, r);
        match c.label {
            Label::Horizontal | Label::Vertical => w <= c.w && h <= c.h,
            Label::Area => le_mul(w, eps, c.w) && le_mul(h, eps, c.h),
        }
    };
    let preferred = |r: bool| {
        let (w, h) = effective_dims(item, r);
        match c.label {
            Label::Horizontal => h <= w,
            Label::Vertical => w <= h,
            Label::Area => !r,
        }
    };
    let feasible: Vec<bool> = options.iter().copied().filter(|&r| fits(r)).collect();
    feasible.iter().copied().find(|&r| preferred(r)).or_else(|| feasible.first().copied())
}

/// Size of an item in a container bin, with the orientation it was sized in.
pub fn container_size(c: &Container, item: &Item, rotation_allowed: bool, eps: Q) -> Option<(i64, bool)> {
    let r = container_orientation(c, item, rotation_allowed, eps)?;
    let (w, h) = effective_dims(item, r);
    let s = match c.label {
        Label::Horizontal => h,
        Label::Vertical => w,
        Label::Area => w * h,
    };
    Some((s, r))
}

pub fn container_capacity(c: &Container, eps: Q) -> i64 {
    match c.label {
        Label::Horizontal => c.h,
        Label::Vertical => c.w,
        Label::Area => floor_mul(Q::from_integer(1) - eps * 2, c.area()).max(0),
    }
}

/// One bin per container (ids `C0`, `C1`, ...).
pub fn bins_from_containers(containers: &[Container], items: &[Item], rotation_allowed: bool, eps: Q) -> GapInstance {
    GapInstance {
        bins: containers
            .iter()
            .enumerate()
            .map(|(i, c)| GapBin { id: crate::model::container_name(i), capacity: container_capacity(c, eps) })
            .collect(),
        items: items
            .iter()
            .map(|it| GapItem {
                id: it.id.clone(),
                profit: it.p,
                sizes: containers.iter().map(|c| container_size(c, it, rotation_allowed, eps).map(|s| s.0)).collect(),
            })
            .collect(),
    }
}
