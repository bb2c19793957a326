//! Structural transforms on container packings: shrinking, splitting,
//! compaction, free-strip detection, chains, the contraction pipeline and
//! random strip deletion.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::greedy::nfdh_oriented;
use crate::model::{
    validate_container_packing, Container, Instance, Item, ItemId, Label, Packing, Placement, Rect,
};
use crate::rational::{ceil_mul, floor_mul, fmt_big, q_to_big, Q};
use crate::steinberg::steinberg;

/// An item together with where it currently sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placed {
    pub id: ItemId,
    pub rect: Rect,
    pub p: i64,
    pub rotated: bool,
}

impl Placed {
    pub fn from_placement(item: &Item, pl: &Placement) -> Self {
        Placed { id: item.id.clone(), rect: pl.rect(item), p: item.p, rotated: pl.rotated }
    }

    pub fn placement(&self) -> Placement {
        Placement::new(self.id.clone(), self.rect.x, self.rect.y, self.rotated)
    }

    pub fn shifted(&self, dx: i64, dy: i64) -> Placed {
        let mut q = self.clone();
        q.rect.x += dx;
        q.rect.y += dy;
        q
    }

    fn transposed(&self) -> Placed {
        let mut q = self.clone();
        q.rect = q.rect.transpose();
        q
    }
}

pub fn placed_from_packing(inst: &Instance, packing: &Packing) -> Vec<Placed> {
    let idx = inst.index();
    packing
        .placements
        .iter()
        .filter_map(|pl| idx.get(pl.id.as_str()).map(|it| Placed::from_placement(it, pl)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("delta must lie in (0,1), got {0}")]
    InvalidDelta(String),
    #[error("1/delta must be an integer, got delta = {0}")]
    NonIntegralDelta(String),
    #[error("operation needs a horizontal or vertical container")]
    AreaContainer,
    #[error("free strip blocked on both sides (chain {chain:?})")]
    StripBlocked { chain: Option<Vec<usize>> },
    #[error("only the right strip is free and rotations are not allowed")]
    RightStripWithoutRotation,
    #[error("top strip blocked but no chain of vertical containers reaches the floor")]
    ChainNotFound,
    #[error("invalid container packing: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cardinality,
    Weighted,
}

impl Mode {
    fn weight(self, p: &Placed) -> i64 {
        match self {
            Mode::Cardinality => 1,
            Mode::Weighted => p.p,
        }
    }
}

fn check_delta(delta: Q) -> Result<(), TransformError> {
    if delta <= Q::zero() || delta >= Q::one() {
        return Err(TransformError::InvalidDelta(crate::rational::fmt_q(&delta)));
    }
    Ok(())
}

/// Number of equal strips used for a given `delta`: `floor(1/delta)`.
fn strip_count(delta: Q) -> i64 {
    (delta.recip()).floor().to_integer().max(1)
}

fn transpose_container(c: &Container) -> Container {
    Container::from_rect(c.rect().transpose(), c.label.transpose())
}

/// Items whose interior meets one of the lines `y0 + i*len/k` for `0<i<k`
/// are returned as crossers; the others are bucketed by strip.
fn cut_strips(items: &[Placed], y0: i64, len: i64, k: i64) -> (Vec<Vec<Placed>>, Vec<Placed>) {
    let mut strips = vec![Vec::new(); k as usize];
    let mut crossers = Vec::new();
    for it in items {
        // strip index of the bottom edge: floor((y - y0) * k / len)
        let lo = it.rect.y - y0;
        let hi = it.rect.top() - y0;
        let s = Integer::div_floor(&(lo as i128 * k as i128), &(len as i128)) as i64;
        let s = s.clamp(0, k - 1);
        // the strip's upper line is (s+1)*len/k; crossing iff hi*k > (s+1)*len
        if (hi as i128) * (k as i128) > ((s + 1) as i128) * (len as i128) {
            crossers.push(it.clone());
        } else {
            strips[s as usize].push(it.clone());
        }
    }
    (strips, crossers)
}

fn min_strip(strips: &[Vec<Placed>], mode: Mode) -> usize {
    let mut best = 0;
    let mut best_w = i64::MAX;
    for (i, s) in strips.iter().enumerate() {
        let w: i64 = s.iter().map(|p| mode.weight(p)).sum();
        if w < best_w {
            best_w = w;
            best = i;
        }
    }
    best
}

fn ids(v: &[Placed]) -> Vec<ItemId> {
    v.iter().map(|p| p.id.clone()).collect()
}

/// Output of [`box_to_containers`].
#[derive(Debug, Clone, Default)]
pub struct BoxSplit {
    pub containers: Vec<Container>,
    pub kept: Vec<Placed>,
    pub killed: Vec<ItemId>,
    pub deleted: Vec<ItemId>,
}

/// Cuts a horizontal or vertical box by `floor(1/delta) - 1` lines, kills the
/// crossers, deletes the minimum-profit strip and restacks the survivors into
/// at most `floor(1/delta)` side-by-side stacks inside the box.
pub fn box_to_containers(bx: &Container, items: &[Placed], delta: Q) -> Result<BoxSplit, TransformError> {
    if delta <= Q::zero() || delta > Q::one() {
        return Err(TransformError::InvalidDelta(crate::rational::fmt_q(&delta)));
    }
    match bx.label {
        Label::Area => Err(TransformError::AreaContainer),
        Label::Vertical => {
            let t: Vec<Placed> = items.iter().map(Placed::transposed).collect();
            let mut out = box_to_containers(&transpose_container(bx), &t, delta)?;
            out.containers = out.containers.iter().map(transpose_container).collect();
            out.kept = out.kept.iter().map(Placed::transposed).collect();
            Ok(out)
        }
        Label::Horizontal => {
            let k = strip_count(delta);
            let (mut strips, crossers) = cut_strips(items, bx.y, bx.h, k);
            let mut out = BoxSplit { killed: ids(&crossers), ..Default::default() };
            if k >= 2 {
                let s = min_strip(&strips, Mode::Weighted);
                out.deleted = ids(&strips[s]);
                strips[s].clear();
            }
            let mut surv: Vec<Placed> = strips.into_iter().flatten().collect();
            surv.sort_by(|a, b| b.rect.w.cmp(&a.rect.w).then(a.id.cmp(&b.id)));
            let mut x = bx.x;
            let mut col: Option<(i64, i64, i64)> = None; // (x, width, used height)
            for it in surv {
                let fits_col = col.map_or(false, |(_, _, used)| used + it.rect.h <= bx.h);
                if !fits_col {
                    if let Some((cx, cw, used)) = col.take() {
                        out.containers.push(Container::new(cx, bx.y, cw, used, Label::Horizontal));
                        x = cx + cw;
                    }
                    if out.containers.len() as i64 >= k || x + it.rect.w > bx.right() || it.rect.h > bx.h {
                        out.killed.push(it.id.clone());
                        continue;
                    }
                    col = Some((x, it.rect.w, 0));
                }
                let (cx, cw, used) = col.unwrap();
                out.kept.push(Placed { rect: Rect::new(cx, bx.y + used, it.rect.w, it.rect.h), ..it });
                col = Some((cx, cw, used + out.kept.last().unwrap().rect.h));
            }
            if let Some((cx, cw, used)) = col {
                out.containers.push(Container::new(cx, bx.y, cw, used, Label::Horizontal));
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContainerClass {
    Thick,
    Thin,
    Intermediate,
}

/// The thick dimension of a container: height for horizontal, width for vertical.
pub fn thick_dim(c: &Container) -> Option<i64> {
    match c.label {
        Label::Horizontal => Some(c.h),
        Label::Vertical => Some(c.w),
        Label::Area => None,
    }
}

pub fn classify_container(c: &Container, n: i64, small: &BigRational, large: &BigRational) -> ContainerClass {
    let Some(d) = thick_dim(c) else { return ContainerClass::Thick };
    let d = BigRational::from_integer(BigInt::from(d));
    let nn = BigInt::from(n);
    if d >= large * &nn {
        ContainerClass::Thick
    } else if d <= small * &nn {
        ContainerClass::Thin
    } else {
        ContainerClass::Intermediate
    }
}

pub fn classify_containers(cs: &[Container], n: i64, small: &BigRational, large: &BigRational) -> Vec<ContainerClass> {
    cs.iter().map(|c| classify_container(c, n, small, large)).collect()
}

/// Result of the band search for container thresholds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerThresholds {
    pub small: BigRational,
    pub large: BigRational,
    pub band: usize,
    pub ratio: i64,
    pub band_weight: i64,
}

/// Bands `(eps_large/k^j, eps_large/k^(j-1)]` for `j = 1..=ceil(1/eps)` with
/// `k = ceil(3 * max(|C|,1) / eps)`; picks the band of least content weight,
/// ties to the smallest `j`.
pub fn choose_container_thresholds(cs: &[Container], weights: &[i64], n: i64, eps: Q, eps_large: Q) -> ContainerThresholds {
    let k = ceil_mul(Q::from_integer(3) / eps, cs.len().max(1) as i64).max(2);
    let bands = eps.recip().ceil().to_integer().max(1) as usize;
    let kb = BigRational::from_integer(BigInt::from(k));
    let el = q_to_big(eps_large);
    let nn = BigInt::from(n);
    let mut edges = vec![el.clone()];
    for j in 1..=bands {
        let prev = edges[j - 1].clone();
        edges.push(prev / &kb);
    }
    let mut best = (i64::MAX, 1usize);
    for j in 1..=bands {
        let lo = &edges[j] * &nn;
        let hi = &edges[j - 1] * &nn;
        let w: i64 = cs
            .iter()
            .zip(weights)
            .filter_map(|(c, &w)| thick_dim(c).map(|d| (BigRational::from_integer(BigInt::from(d)), w)))
            .filter(|(d, _)| *d > lo && *d <= hi)
            .map(|(_, w)| w)
            .sum();
        if w < best.0 {
            best = (w, j);
        }
    }
    let j = best.1;
    ContainerThresholds { small: edges[j].clone(), large: edges[j - 1].clone(), band: j, ratio: k, band_weight: best.0 }
}

/// Output of [`shrink_container`].
#[derive(Debug, Clone)]
pub struct Shrunk {
    pub container: Container,
    pub kept: Vec<Placed>,
    pub killed: Vec<ItemId>,
    pub deleted: Vec<ItemId>,
}

fn restack(c: &Container, mut items: Vec<Placed>, limit: i64) -> (Vec<Placed>, Vec<ItemId>) {
    items.sort_by(|a, b| a.rect.y.cmp(&b.rect.y).then(a.rect.x.cmp(&b.rect.x)).then(a.id.cmp(&b.id)));
    let mut y = c.y;
    let mut kept = Vec::new();
    let mut lost = Vec::new();
    for it in items {
        if y + it.rect.h <= c.y + limit && it.rect.w <= c.w {
            kept.push(Placed { rect: Rect::new(c.x, y, it.rect.w, it.rect.h), ..it });
            y += kept.last().unwrap().rect.h;
        } else {
            lost.push(it.id);
        }
    }
    (kept, lost)
}

/// Shrinks the thick dimension of `c` to `floor((1-delta) d)`; area
/// containers shrink in both dimensions and are repacked by NFDH.
pub fn shrink_container(c: &Container, items: &[Placed], delta: Q, mode: Mode) -> Result<Shrunk, TransformError> {
    check_delta(delta)?;
    let keep = Q::one() - delta;
    match c.label {
        Label::Vertical => {
            let t: Vec<Placed> = items.iter().map(Placed::transposed).collect();
            let mut s = shrink_container(&transpose_container(c), &t, delta, mode)?;
            s.container = transpose_container(&s.container);
            s.kept = s.kept.iter().map(Placed::transposed).collect();
            Ok(s)
        }
        Label::Area => {
            let cp = Container::new(c.x, c.y, floor_mul(keep, c.w).max(1), floor_mul(keep, c.h).max(1), Label::Area);
            let as_items: Vec<(Item, bool)> =
                items.iter().map(|p| (Item::new(p.id.clone(), p.rect.w, p.rect.h, p.p), false)).collect();
            let res = nfdh_oriented(&cp, &as_items);
            let by_id: HashMap<&str, &Placed> = items.iter().map(|p| (p.id.as_str(), p)).collect();
            let kept = res
                .placements
                .iter()
                .map(|pl| {
                    let orig = by_id[pl.id.as_str()];
                    Placed { rect: Rect::new(pl.x, pl.y, orig.rect.w, orig.rect.h), ..orig.clone() }
                })
                .collect();
            Ok(Shrunk { container: cp, kept, killed: res.leftovers, deleted: Vec::new() })
        }
        Label::Horizontal => {
            let limit = floor_mul(keep, c.h);
            let cp = Container::new(c.x, c.y, c.w, limit.max(1), Label::Horizontal);
            let total: i64 = items.iter().map(|p| p.rect.h).sum();
            if total <= limit {
                let (kept, killed) = restack(&cp, items.to_vec(), limit);
                return Ok(Shrunk { container: cp, kept, killed, deleted: Vec::new() });
            }
            let k = strip_count(delta);
            let (mut strips, crossers) = cut_strips(items, c.y, c.h, k);
            let s = min_strip(&strips, mode);
            let deleted = ids(&strips[s]);
            strips[s].clear();
            let (kept, mut killed) = restack(&cp, strips.into_iter().flatten().collect(), limit);
            let mut all_killed = ids(&crossers);
            all_killed.append(&mut killed);
            Ok(Shrunk { container: cp, kept, killed: all_killed, deleted })
        }
    }
}

/// Output of [`split_container`].
#[derive(Debug, Clone)]
pub struct Split {
    pub containers: Vec<Container>,
    pub kept: Vec<Placed>,
    pub killed: Vec<ItemId>,
    pub waste: i64,
}

/// Normalises the stack (widest at the bottom, left-pushed), cuts the stack
/// height into `1/delta` strips, kills crossers and returns one container
/// per nonempty strip hugging its items.
pub fn split_container(c: &Container, items: &[Placed], delta: Q) -> Result<Split, TransformError> {
    check_delta(delta)?;
    if !delta.recip().is_integer() {
        return Err(TransformError::NonIntegralDelta(crate::rational::fmt_q(&delta)));
    }
    match c.label {
        Label::Area => Err(TransformError::AreaContainer),
        Label::Vertical => {
            let t: Vec<Placed> = items.iter().map(Placed::transposed).collect();
            let mut s = split_container(&transpose_container(c), &t, delta)?;
            s.containers = s.containers.iter().map(transpose_container).collect();
            s.kept = s.kept.iter().map(Placed::transposed).collect();
            Ok(s)
        }
        Label::Horizontal => {
            let k = delta.recip().to_integer();
            let mut sorted = items.to_vec();
            sorted.sort_by(|a, b| b.rect.w.cmp(&a.rect.w).then(a.id.cmp(&b.id)));
            let mut y = c.y;
            for it in sorted.iter_mut() {
                it.rect.x = c.x;
                it.rect.y = y;
                y += it.rect.h;
            }
            let hs = y - c.y;
            let mut out = Split { containers: Vec::new(), kept: Vec::new(), killed: Vec::new(), waste: 0 };
            if hs == 0 {
                return Ok(out);
            }
            let (strips, crossers) = cut_strips(&sorted, c.y, hs, k);
            out.killed = ids(&crossers);
            for s in strips.into_iter().filter(|s| !s.is_empty()) {
                let y0 = s.iter().map(|p| p.rect.y).min().unwrap();
                let h: i64 = s.iter().map(|p| p.rect.h).sum();
                let w = s.iter().map(|p| p.rect.w).max().unwrap();
                // crossers leave gaps, so re-stack inside the strip
                let mut yy = y0;
                for it in s {
                    out.waste += (w - it.rect.w) * it.rect.h;
                    out.kept.push(Placed { rect: Rect::new(c.x, yy, it.rect.w, it.rect.h), ..it });
                    yy += it.rect.h;
                }
                out.containers.push(Container::new(c.x, y0, w, h, Label::Horizontal));
            }
            assert!(out.waste as i128 * k as i128 <= c.area() as i128, "split waste above delta * a(C)");
            Ok(out)
        }
    }
}

/// Pushes containers down, then left, until nothing moves. Contents move
/// rigidly with their container.
pub fn compact(cs: &mut [Container], contents: &mut [Vec<Placed>]) {
    loop {
        let a = push(cs, contents, false);
        let b = push(cs, contents, true);
        if !a && !b {
            break;
        }
    }
}

fn push(cs: &mut [Container], contents: &mut [Vec<Placed>], left: bool) -> bool {
    let mut any = false;
    loop {
        let mut order: Vec<usize> = (0..cs.len()).collect();
        if left {
            order.sort_by_key(|&i| (cs[i].x, cs[i].y, i));
        } else {
            order.sort_by_key(|&i| (cs[i].y, cs[i].x, i));
        }
        let mut moved = false;
        for &i in &order {
            let c = cs[i];
            let target = cs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .filter_map(|(_, d)| {
                    if left {
                        (d.y < c.top() && c.y < d.top() && d.right() <= c.x).then_some(d.right())
                    } else {
                        (d.x < c.right() && c.x < d.right() && d.top() <= c.y).then_some(d.top())
                    }
                })
                .max()
                .unwrap_or(0);
            let (dx, dy) = if left { (target - c.x, 0) } else { (0, target - c.y) };
            if dx != 0 || dy != 0 {
                cs[i].x += dx;
                cs[i].y += dy;
                if let Some(v) = contents.get_mut(i) {
                    for p in v.iter_mut() {
                        *p = p.shifted(dx, dy);
                    }
                }
                moved = true;
            }
        }
        if !moved {
            return any;
        }
        any = true;
    }
}

trait Edges {
    fn top(&self) -> i64;
    fn right(&self) -> i64;
}

impl Edges for Container {
    fn top(&self) -> i64 {
        self.y + self.h
    }
    fn right(&self) -> i64 {
        self.x + self.w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeStrip {
    Top,
    Right,
    Neither,
}

pub fn top_strip(n: i64, t: i64) -> Rect {
    Rect::new(0, n - t, n, t)
}

pub fn right_strip(n: i64, t: i64) -> Rect {
    Rect::new(n - t, 0, t, n)
}

pub fn find_free_strip(cs: &[Container], n: i64, t: i64) -> FreeStrip {
    let sh = top_strip(n, t);
    let sv = right_strip(n, t);
    if !cs.iter().any(|c| c.rect().overlaps(&sh)) {
        FreeStrip::Top
    } else if !cs.iter().any(|c| c.rect().overlaps(&sv)) {
        FreeStrip::Right
    } else {
        FreeStrip::Neither
    }
}

fn x_contact(a: &Container, b: &Container) -> bool {
    a.x < b.right() && b.x < a.right()
}

/// A chain `C0..Ck` of vertical containers: `C0` meets the top strip and
/// nothing rests on it, each `Cj` sits directly below `Cj-1` with
/// positive-length contact, and `Ck` stands on the floor.
pub fn extract_chain(cs: &[Container], n: i64, t: i64) -> Result<Option<Vec<usize>>, TransformError> {
    let sh = top_strip(n, t);
    if !cs.iter().any(|c| c.rect().overlaps(&sh)) {
        return Ok(None);
    }
    let starts: Vec<usize> = (0..cs.len())
        .filter(|&i| cs[i].label == Label::Vertical && cs[i].rect().overlaps(&sh))
        .filter(|&i| !cs.iter().enumerate().any(|(j, d)| j != i && d.y == cs[i].top() && x_contact(d, &cs[i])))
        .collect();
    for s in starts {
        let mut path = vec![s];
        if chain_dfs(cs, &mut path) {
            return Ok(Some(path));
        }
    }
    Err(TransformError::ChainNotFound)
}

fn chain_dfs(cs: &[Container], path: &mut Vec<usize>) -> bool {
    let cur = cs[*path.last().unwrap()];
    if cur.y == 0 {
        return true;
    }
    for j in 0..cs.len() {
        let d = &cs[j];
        if d.label == Label::Vertical && d.top() == cur.y && x_contact(d, &cur) && !path.contains(&j) {
            path.push(j);
            if chain_dfs(cs, path) {
                return true;
            }
            path.pop();
        }
    }
    false
}

/// Checks conditions (i)-(iii) of a chain witness.
pub fn is_valid_chain(cs: &[Container], chain: &[usize], n: i64, t: i64) -> bool {
    let Some(&first) = chain.first() else { return false };
    if chain.iter().any(|&i| i >= cs.len() || cs[i].label != Label::Vertical) {
        return false;
    }
    let c0 = cs[first];
    if !c0.rect().overlaps(&top_strip(n, t)) {
        return false;
    }
    if cs.iter().enumerate().any(|(j, d)| j != first && d.y == c0.top() && x_contact(d, &c0)) {
        return false;
    }
    for w in chain.windows(2) {
        let (a, b) = (cs[w[0]], cs[w[1]]);
        if b.top() != a.y || !x_contact(&a, &b) {
            return false;
        }
    }
    cs[*chain.last().unwrap()].y == 0
}

/// Input of the contraction pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineInput {
    pub instance: Instance,
    pub containers: Vec<Container>,
    pub placements: Vec<Placement>,
    #[serde(default)]
    pub thin_items: Vec<ItemId>,
    #[serde(default)]
    pub set_aside: Vec<ItemId>,
    #[serde(default)]
    pub small_items: Vec<ItemId>,
}

#[derive(Debug, Clone)]
pub struct PipelineParams {
    pub eps: Q,
    pub eps_large: Q,
    pub eps_thin: Q,
    pub mode: Mode,
    /// Height fraction kept empty at the top; defaults to `2 * eps_thin`.
    pub mu: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLoss {
    pub stage: String,
    pub discarded_count: usize,
    pub discarded_profit: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub placements: Vec<Placement>,
    pub containers: Vec<Container>,
    pub eps_c_small: String,
    pub eps_c_large: String,
    pub band: usize,
    pub strip: FreeStrip,
    pub transposed: bool,
    pub strip_thickness: i64,
    pub empty_height: i64,
    pub mu_effective: String,
    pub stages: Vec<StageLoss>,
    pub discarded_count: usize,
    pub discarded_profit: i64,
}

struct Ledger<'a> {
    profit: &'a HashMap<String, i64>,
    stages: Vec<StageLoss>,
}

impl Ledger<'_> {
    fn add(&mut self, stage: &str, ids: &[ItemId]) {
        let profit = ids.iter().map(|i| self.profit.get(i).copied().unwrap_or(0)).sum();
        self.stages.push(StageLoss { stage: stage.to_string(), discarded_count: ids.len(), discarded_profit: profit });
    }
}

/// Thresholds, shrinking, compaction and refilling of the freed top strip.
/// All output lies in `[0,N] x [0,N-e]` where `e` is the reported empty height.
pub fn resource_contraction(input: &PipelineInput, params: &PipelineParams) -> Result<PipelineReport, TransformError> {
    let inst = &input.instance;
    let n = inst.n;
    let packing = Packing::new(input.placements.clone());
    let rep = validate_container_packing(inst, &packing, &input.containers, params.eps);
    if !rep.valid {
        return Err(TransformError::InvalidInput(format!("{:?}", rep.violations.first())));
    }
    let profit: HashMap<String, i64> = inst.items.iter().map(|i| (i.id.clone(), i.p)).collect();
    let mut ledger = Ledger { profit: &profit, stages: Vec::new() };

    let placed = placed_from_packing(inst, &packing);
    let mut contents: Vec<Vec<Placed>> = vec![Vec::new(); input.containers.len()];
    for p in placed {
        if let Some(i) = input.containers.iter().position(|c| c.rect().contains(&p.rect)) {
            contents[i].push(p);
        }
    }
    let weights: Vec<i64> = contents.iter().map(|v| v.iter().map(|p| params.mode.weight(p)).sum()).collect();
    let th = choose_container_thresholds(&input.containers, &weights, n, params.eps, params.eps_large);
    let classes = classify_containers(&input.containers, n, &th.small, &th.large);

    let mut thick = Vec::new();
    let mut thick_items = Vec::new();
    let mut thin = Vec::new();
    let mut inter_lost = Vec::new();
    let mut shrink_lost = Vec::new();
    for (i, c) in input.containers.iter().enumerate() {
        match classes[i] {
            ContainerClass::Intermediate => inter_lost.extend(ids(&contents[i])),
            ContainerClass::Thin => thin.push((*c, contents[i].clone())),
            ContainerClass::Thick => {
                let s = shrink_container(c, &contents[i], params.eps, params.mode)?;
                shrink_lost.extend(s.killed);
                shrink_lost.extend(s.deleted);
                thick.push(s.container);
                thick_items.push(s.kept);
            }
        }
    }
    ledger.add("intermediate_containers", &inter_lost);
    ledger.add("shrink", &shrink_lost);

    compact(&mut thick, &mut thick_items);
    let t = {
        let v = q_to_big(params.eps) * &th.large * BigInt::from(n);
        v.ceil().to_integer().to_i64().unwrap_or(n).clamp(1, n)
    };
    let strip = find_free_strip(&thick, n, t);
    let mut transposed = false;
    match strip {
        FreeStrip::Top => {}
        FreeStrip::Right => {
            if !inst.rotation_allowed {
                return Err(TransformError::RightStripWithoutRotation);
            }
            transposed = true;
            thick = thick.iter().map(transpose_container).collect();
            for v in thick_items.iter_mut() {
                *v = v.iter().map(|p| Placed { rotated: !p.rotated, ..p.transposed() }).collect();
            }
            thin = thin
                .into_iter()
                .map(|(c, v)| {
                    (transpose_container(&c), v.iter().map(|p| Placed { rotated: !p.rotated, ..p.transposed() }).collect())
                })
                .collect();
        }
        FreeStrip::Neither => {
            let chain = extract_chain(&thick, n, t).ok().flatten();
            return Err(TransformError::StripBlocked { chain });
        }
    }

    let mu = params.mu.unwrap_or(params.eps_thin * 2);
    let e = ceil_mul(mu, n).clamp(1, (t / 3).max(1));
    let mu_eff = BigRational::new(BigInt::from(e), BigInt::from(n));
    let strip_lo = n - t;
    let strip_hi = n - e;
    let mut out_containers = thick.clone();
    let mut out: Vec<Placed> = thick_items.into_iter().flatten().collect();

    // thin containers on shelves inside the usable strip
    let mut shelves: Vec<(Container, Vec<Placed>)> = Vec::new();
    let mut thin_lost = Vec::new();
    for (c, v) in thin {
        if c.label == Label::Vertical {
            if inst.rotation_allowed {
                let rc = Container::new(0, 0, c.h, c.w, Label::Horizontal);
                let rv =
                    v.iter().map(|p| Placed { rotated: !p.rotated, ..p.shifted(-c.x, -c.y).transposed() }).collect();
                shelves.push((rc, rv));
            } else {
                thin_lost.extend(ids(&v));
            }
        } else {
            let v = v.iter().map(|p| p.shifted(-c.x, -c.y)).collect();
            shelves.push((Container::new(0, 0, c.w, c.h, c.label), v));
        }
    }
    shelves.sort_by(|a, b| b.0.h.cmp(&a.0.h).then(b.0.w.cmp(&a.0.w)));
    let (mut sx, mut sy, mut shelf_h) = (0i64, strip_lo, 0i64);
    for (c, v) in shelves {
        if sx + c.w > n {
            sy += shelf_h;
            sx = 0;
            shelf_h = 0;
        }
        if c.w > n || sy + c.h > strip_hi {
            thin_lost.extend(ids(&v));
            continue;
        }
        out_containers.push(Container::new(sx, sy, c.w, c.h, c.label));
        out.extend(v.iter().map(|p| p.shifted(sx, sy)));
        sx += c.w;
        shelf_h = shelf_h.max(c.h);
    }
    ledger.add("thin_containers", &thin_lost);
    let mut y = sy + shelf_h;

    // set-aside items in one horizontal stack
    let idx = inst.index();
    let mut aside_lost = Vec::new();
    let mut stack_w = 0;
    let stack_y = y;
    for id in &input.set_aside {
        let Some(it) = idx.get(id.as_str()) else { continue };
        let rot = inst.rotation_allowed && it.h > it.w;
        let (w, h) = it.dims(rot);
        if y + h <= strip_hi && w <= n {
            out.push(Placed { id: id.clone(), rect: Rect::new(0, y, w, h), p: it.p, rotated: rot });
            y += h;
            stack_w = stack_w.max(w);
        } else {
            aside_lost.push(id.clone());
        }
    }
    if y > stack_y {
        out_containers.push(Container::new(0, stack_y, stack_w, y - stack_y, Label::Horizontal));
    }
    ledger.add("set_aside", &aside_lost);

    // thin items in the rest of the strip
    let rest = Container::new(0, y, n, strip_hi - y, Label::Area);
    let thin_items: Vec<Item> = input.thin_items.iter().filter_map(|id| idx.get(id.as_str()).map(|i| (*i).clone())).collect();
    let mut thin_item_lost = Vec::new();
    if rest.h > 0 && !thin_items.is_empty() {
        let res = steinberg(&rest, &thin_items).unwrap_or_else(|_| {
            let or: Vec<(Item, bool)> = thin_items.iter().map(|i| (i.clone(), false)).collect();
            nfdh_oriented(&rest, &or)
        });
        for pl in &res.placements {
            let it = idx[pl.id.as_str()];
            out.push(Placed::from_placement(it, pl));
        }
        thin_item_lost = res.leftovers;
    } else {
        thin_item_lost.extend(thin_items.iter().map(|i| i.id.clone()));
    }
    ledger.add("thin_items", &thin_item_lost);

    // small items in grid cells avoiding containers and the strip
    let small: Vec<Item> = input.small_items.iter().filter_map(|id| idx.get(id.as_str()).map(|i| (*i).clone())).collect();
    let mut small_lost = Vec::new();
    if !small.is_empty() {
        let side = small.iter().map(|i| i.w.max(i.h)).max().unwrap();
        let cell = ceil_mul(params.eps.recip(), side).max(side);
        let mut queue: Vec<(Item, bool)> = small.iter().map(|i| (i.clone(), false)).collect();
        let mut cy = 0;
        while cy + cell <= strip_lo && !queue.is_empty() {
            let mut cx = 0;
            while cx + cell <= n && !queue.is_empty() {
                let r = Rect::new(cx, cy, cell, cell);
                if let Some(c) = out_containers.iter().find(|c| c.rect().overlaps(&r)) {
                    // jump to the first grid column past the obstacle
                    cx = Integer::div_ceil(&c.right(), &cell) * cell;
                    continue;
                }
                {
                    let cc = Container::from_rect(r, Label::Area);
                    let res = nfdh_oriented(&cc, &queue);
                    if !res.placements.is_empty() {
                        out_containers.push(cc);
                        for pl in &res.placements {
                            out.push(Placed::from_placement(idx[pl.id.as_str()], pl));
                        }
                        let left: HashSet<&str> = res.leftovers.iter().map(|s| s.as_str()).collect();
                        queue.retain(|(i, _)| left.contains(i.id.as_str()));
                    }
                }
                cx += cell;
            }
            cy += cell;
        }
        small_lost = queue.into_iter().map(|(i, _)| i.id).collect();
    }
    ledger.add("small_items", &small_lost);

    let discarded_count = ledger.stages.iter().map(|s| s.discarded_count).sum();
    let discarded_profit = ledger.stages.iter().map(|s| s.discarded_profit).sum();
    let mut placements: Vec<Placement> = out.iter().map(Placed::placement).collect();
    placements.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(PipelineReport {
        placements,
        containers: out_containers,
        eps_c_small: fmt_big(&th.small),
        eps_c_large: fmt_big(&th.large),
        band: th.band,
        strip,
        transposed,
        strip_thickness: t,
        empty_height: e,
        mu_effective: fmt_big(&mu_eff),
        stages: ledger.stages,
        discarded_count,
        discarded_profit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StripOrientation {
    Horizontal,
    Vertical,
}

/// Removes every item whose interior meets a strip of the given thickness at
/// an offset drawn uniformly from `0..=N-thickness`.
pub fn delete_random_strip(
    inst: &Instance,
    packing: &Packing,
    orientation: StripOrientation,
    thickness: i64,
    seed: u64,
) -> (Packing, i64) {
    let n = inst.n;
    let t = thickness.clamp(0, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(0..=n - t);
    let strip = match orientation {
        StripOrientation::Horizontal => Rect::new(0, a, n, t),
        StripOrientation::Vertical => Rect::new(a, 0, t, n),
    };
    let idx = inst.index();
    let kept = packing
        .placements
        .iter()
        .filter(|pl| idx.get(pl.id.as_str()).map_or(false, |it| !pl.rect(it).overlaps(&strip)))
        .cloned()
        .collect();
    (Packing::new(kept), a)
}

/// Survival probability of an item of extent `len` at offset `pos` under a
/// uniformly placed strip of thickness `t`, as an exact fraction.
pub fn strip_survival_probability(n: i64, t: i64, pos: i64, len: i64) -> BigRational {
    let total = n - t + 1;
    let hits = (0..=n - t).filter(|&a| a < pos + len && pos < a + t).count() as i64;
    BigRational::new(BigInt::from(total - hits), BigInt::from(total))
}
