//! Instances, packings, containers, validity checks and item classification.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::{le_mul, Power, Q};

pub type ItemId = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub w: i64,
    pub h: i64,
    pub p: i64,
}

impl Item {
    pub fn new(id: impl Into<String>, w: i64, h: i64, p: i64) -> Self {
        Item { id: id.into(), w, h, p }
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }

    pub fn dims(&self, rotated: bool) -> (i64, i64) {
        effective_dims(self, rotated)
    }
}

/// Width and height of an item as placed.
pub fn effective_dims(item: &Item, rotated: bool) -> (i64, i64) {
    if rotated {
        (item.h, item.w)
    } else {
        (item.w, item.h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(default)]
    pub rotation_allowed: bool,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("knapsack side must be at least 1 (got {0})")]
    BadSide(i64),
    #[error("duplicate item id `{0}`")]
    DuplicateId(String),
    #[error("item `{id}` has dimensions {w}x{h} outside [1, {n}]")]
    BadDims { id: String, w: i64, h: i64, n: i64 },
    #[error("item `{0}` has negative profit")]
    NegativeProfit(String),
}

impl Instance {
    pub fn new(n: i64, rotation_allowed: bool, items: Vec<Item>) -> Self {
        Instance { n, rotation_allowed, items }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if self.n < 1 {
            return Err(ModelError::BadSide(self.n));
        }
        let mut seen = HashSet::new();
        for it in &self.items {
            if !seen.insert(it.id.as_str()) {
                return Err(ModelError::DuplicateId(it.id.clone()));
            }
            if it.w < 1 || it.h < 1 || it.w > self.n || it.h > self.n {
                return Err(ModelError::BadDims { id: it.id.clone(), w: it.w, h: it.h, n: self.n });
            }
            if it.p < 0 {
                return Err(ModelError::NegativeProfit(it.id.clone()));
            }
        }
        Ok(())
    }

    pub fn index(&self) -> HashMap<&str, &Item> {
        self.items.iter().map(|i| (i.id.as_str(), i)).collect()
    }

    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn total_profit(&self) -> i64 {
        self.items.iter().map(|i| i.p).sum()
    }

    pub fn knapsack(&self) -> Rect {
        Rect::new(0, 0, self.n, self.n)
    }

    pub fn is_cardinality(&self) -> bool {
        self.items.iter().all(|i| i.p == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub id: ItemId,
    pub x: i64,
    pub y: i64,
    #[serde(default)]
    pub rotated: bool,
}

impl Placement {
    pub fn new(id: impl Into<String>, x: i64, y: i64, rotated: bool) -> Self {
        Placement { id: id.into(), x, y, rotated }
    }

    pub fn rect(&self, item: &Item) -> Rect {
        let (w, h) = effective_dims(item, self.rotated);
        Rect::new(self.x, self.y, w, h)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub placements: Vec<Placement>,
}

impl Packing {
    pub fn new(placements: Vec<Placement>) -> Self {
        Packing { placements }
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn profit(&self, inst: &Instance) -> i64 {
        let idx = inst.index();
        self.placements.iter().filter_map(|p| idx.get(p.id.as_str())).map(|i| i.p).sum()
    }

    pub fn area(&self, inst: &Instance) -> i64 {
        let idx = inst.index();
        self.placements.iter().filter_map(|p| idx.get(p.id.as_str())).map(|i| i.area()).sum()
    }

    pub fn ids(&self) -> HashSet<&str> {
        self.placements.iter().map(|p| p.id.as_str()).collect()
    }

    /// Rectangles of all placements whose item exists in `inst`.
    pub fn rects(&self, inst: &Instance) -> Vec<(String, Rect)> {
        let idx = inst.index();
        self.placements
            .iter()
            .filter_map(|p| idx.get(p.id.as_str()).map(|it| (p.id.clone(), p.rect(it))))
            .collect()
    }
}

/// The instance half of a packing file: either a path or the instance itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceRef {
    Path(String),
    Inline(Instance),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingFile {
    pub instance: InstanceRef,
    pub placements: Vec<Placement>,
}

/// Half-open integer rectangle `[x, x+w] x [y, y+h]`, compared as an open set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub const fn new(x: i64, y: i64, w: i64, h: i64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    pub fn top(&self) -> i64 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }

    /// Positive-area intersection of the interiors.
    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x < o.right() && o.x < self.right() && self.y < o.top() && o.y < self.top()
    }

    pub fn contains(&self, o: &Rect) -> bool {
        o.x >= self.x && o.y >= self.y && o.right() <= self.right() && o.top() <= self.top()
    }

    pub fn intersection(&self, o: &Rect) -> Option<Rect> {
        let x0 = self.x.max(o.x);
        let y0 = self.y.max(o.y);
        let x1 = self.right().min(o.right());
        let y1 = self.top().min(o.top());
        (x0 < x1 && y0 < y1).then(|| Rect::new(x0, y0, x1 - x0, y1 - y0))
    }

    pub fn transpose(&self) -> Rect {
        Rect::new(self.y, self.x, self.h, self.w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Horizontal,
    Vertical,
    Area,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Horizontal, Label::Vertical, Label::Area];

    pub fn transpose(self) -> Label {
        match self {
            Label::Horizontal => Label::Vertical,
            Label::Vertical => Label::Horizontal,
            Label::Area => Label::Area,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Horizontal => "horizontal",
            Label::Vertical => "vertical",
            Label::Area => "area",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Container {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
    pub label: Label,
}

impl Container {
    pub const fn new(x: i64, y: i64, w: i64, h: i64, label: Label) -> Self {
        Container { x, y, w, h, label }
    }

    pub fn from_rect(r: Rect, label: Label) -> Self {
        Container::new(r.x, r.y, r.w, r.h, label)
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.w, self.h)
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub ids: Vec<String>,
    pub detail: String,
}

impl Violation {
    pub fn new(kind: &str, ids: Vec<String>, detail: impl Into<String>) -> Self {
        Violation { kind: kind.to_string(), ids, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { valid: violations.is_empty(), violations }
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn merge(mut self, other: ValidationReport) -> Self {
        self.violations.extend(other.violations);
        self.valid = self.violations.is_empty();
        self
    }
}

/// Checks feasibility of a packing: known and unique items, legal rotations,
/// containment in the knapsack and pairwise interior-disjointness.
pub fn validate_packing(inst: &Instance, packing: &Packing) -> ValidationReport {
    validate_in_region(inst, packing, inst.knapsack())
}

/// Same as [`validate_packing`] but with an arbitrary target region.
pub fn validate_in_region(inst: &Instance, packing: &Packing, region: Rect) -> ValidationReport {
    let idx = inst.index();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut rects: Vec<(Rect, &str)> = Vec::with_capacity(packing.len());
    for pl in &packing.placements {
        let Some(item) = idx.get(pl.id.as_str()) else {
            out.push(Violation::new("unknown_item", vec![pl.id.clone()], "placement refers to no item"));
            continue;
        };
        if !seen.insert(pl.id.as_str()) {
            out.push(Violation::new("duplicate", vec![pl.id.clone()], "item placed more than once"));
            continue;
        }
        if pl.rotated && !inst.rotation_allowed {
            out.push(Violation::new(
                "illegal_rotation",
                vec![pl.id.clone()],
                "item rotated although rotations are forbidden",
            ));
        }
        let r = pl.rect(item);
        if !region.contains(&r) {
            out.push(Violation::new(
                "out_of_bounds",
                vec![pl.id.clone()],
                format!(
                    "[{},{}]x[{},{}] not inside [{},{}]x[{},{}]",
                    r.x,
                    r.right(),
                    r.y,
                    r.top(),
                    region.x,
                    region.right(),
                    region.y,
                    region.top()
                ),
            ));
        }
        rects.push((r, pl.id.as_str()));
    }
    // sweep on x: only rectangles whose x-ranges meet can overlap
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by_key(|&i| (rects[i].0.x, i));
    for (a_pos, &a) in order.iter().enumerate() {
        let ra = rects[a].0;
        for &b in &order[a_pos + 1..] {
            let rb = rects[b].0;
            if rb.x >= ra.right() {
                break;
            }
            if ra.overlaps(&rb) {
                let (i, j) = if rects[a].1 <= rects[b].1 { (a, b) } else { (b, a) };
                out.push(Violation::new(
                    "overlap",
                    vec![rects[i].1.to_string(), rects[j].1.to_string()],
                    "interiors intersect",
                ));
            }
        }
    }
    ValidationReport::from_violations(out)
}

pub fn container_name(i: usize) -> String {
    format!("C{i}")
}

/// Feasibility plus the container rules: disjoint containers, every item in
/// exactly one container, stacks in horizontal and vertical containers, and
/// `eps`-small items in area containers.
pub fn validate_container_packing(
    inst: &Instance,
    packing: &Packing,
    containers: &[Container],
    eps: Q,
) -> ValidationReport {
    let mut report = validate_packing(inst, packing);
    let mut out = Vec::new();
    let k = inst.knapsack();
    for (i, c) in containers.iter().enumerate() {
        if c.w < 1 || c.h < 1 {
            out.push(Violation::new("degenerate_container", vec![container_name(i)], "container side < 1"));
        }
        if !k.contains(&c.rect()) {
            out.push(Violation::new("container_out_of_bounds", vec![container_name(i)], "outside knapsack"));
        }
        for (j, d) in containers.iter().enumerate().skip(i + 1) {
            if c.rect().overlaps(&d.rect()) {
                out.push(Violation::new(
                    "container_overlap",
                    vec![container_name(i), container_name(j)],
                    "containers intersect",
                ));
            }
        }
    }
    let idx = inst.index();
    let mut members: Vec<Vec<(Rect, &str)>> = vec![Vec::new(); containers.len()];
    for pl in &packing.placements {
        let Some(item) = idx.get(pl.id.as_str()) else { continue };
        let r = pl.rect(item);
        let holders: Vec<usize> =
            containers.iter().enumerate().filter(|(_, c)| c.rect().contains(&r)).map(|(i, _)| i).collect();
        match holders.len() {
            0 => out.push(Violation::new("not_in_container", vec![pl.id.clone()], "item lies in no container")),
            1 => members[holders[0]].push((r, pl.id.as_str())),
            _ => out.push(Violation::new(
                "multiple_containers",
                vec![pl.id.clone()],
                format!("item lies in {} containers", holders.len()),
            )),
        }
    }
    for (ci, c) in containers.iter().enumerate() {
        let m = &members[ci];
        match c.label {
            Label::Horizontal | Label::Vertical => {
                let horiz = c.label == Label::Horizontal;
                for a in 0..m.len() {
                    for b in a + 1..m.len() {
                        let (ra, rb) = (m[a].0, m[b].0);
                        let clash = if horiz {
                            ra.y < rb.top() && rb.y < ra.top()
                        } else {
                            ra.x < rb.right() && rb.x < ra.right()
                        };
                        if clash {
                            out.push(Violation::new(
                                "stacking",
                                vec![m[a].1.to_string(), m[b].1.to_string(), container_name(ci)],
                                format!("items share a {} range in a {} container", if horiz { "y" } else { "x" }, c.label),
                            ));
                        }
                    }
                }
            }
            Label::Area => {
                for (r, id) in m {
                    if !le_mul(r.w, eps, c.w) || !le_mul(r.h, eps, c.h) {
                        out.push(Violation::new(
                            "area_item_too_large",
                            vec![id.to_string(), container_name(ci)],
                            format!("item {}x{} exceeds eps times container {}x{}", r.w, r.h, c.w, c.h),
                        ));
                    }
                }
            }
        }
    }
    report = report.merge(ValidationReport::from_violations(out));
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ItemClass {
    Small,
    Large,
    HorizontalItem,
    VerticalItem,
    Intermediate,
}

/// Classification thresholds. `eps_small` and `eps_large` are kept as symbolic
/// powers because the cubic ladder produces values far below `1/N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thresholds {
    pub eps: Q,
    pub eps_small: Power,
    pub eps_large: Power,
    /// Position on the ladder that produced the pair (0 when built by hand).
    pub ladder_index: usize,
}

impl Thresholds {
    pub fn new(eps: Q, eps_small: Q, eps_large: Q) -> Self {
        Thresholds { eps, eps_small: Power::of(eps_small), eps_large: Power::of(eps_large), ladder_index: 0 }
    }
}

pub fn classify_item(item: &Item, n: i64, t: &Thresholds) -> ItemClass {
    let w_small = t.eps_small.dim_le(item.w, n);
    let h_small = t.eps_small.dim_le(item.h, n);
    let w_large = t.eps_large.dim_gt(item.w, n);
    let h_large = t.eps_large.dim_gt(item.h, n);
    if w_small && h_small {
        ItemClass::Small
    } else if w_large && h_large {
        ItemClass::Large
    } else if w_large && h_small {
        ItemClass::HorizontalItem
    } else if h_large && w_small {
        ItemClass::VerticalItem
    } else {
        ItemClass::Intermediate
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThresholdError {
    #[error("eps must lie in (0, 1/2], got {0}")]
    EpsOutOfRange(Q),
}

/// Length of the threshold ladder for `eps`: `ceil(2/eps)`.
pub fn ladder_len(eps: Q) -> usize {
    let two_over = Q::from_integer(2) / eps;
    two_over.ceil().to_integer() as usize
}

/// Ladder pair `j`: `(e_{j+1}, e_j)` with `e_0 = eps^2`, `e_{j+1} = e_j^3`.
pub fn ladder_pair(eps: Q, j: usize) -> (Power, Power) {
    let e = |i: usize| Power::new(eps, 2 * 3u64.saturating_pow(i as u32));
    (e(j + 1), e(j))
}

pub fn intermediate_profit(items: &[Item], n: i64, t: &Thresholds) -> i64 {
    items.iter().filter(|i| classify_item(i, n, t) == ItemClass::Intermediate).map(|i| i.p).sum()
}

/// Picks the ladder pair with the least Intermediate profit (smallest index on ties).
pub fn choose_thresholds(items: &[Item], n: i64, eps: Q) -> Result<Thresholds, ThresholdError> {
    if eps <= Q::from_integer(0) || eps > Q::new(1, 2) {
        return Err(ThresholdError::EpsOutOfRange(eps));
    }
    let mut best: Option<(i64, Thresholds)> = None;
    for j in 0..ladder_len(eps) {
        let (small, large) = ladder_pair(eps, j);
        let t = Thresholds { eps, eps_small: small, eps_large: large, ladder_index: j };
        let prof = intermediate_profit(items, n, &t);
        if best.as_ref().map_or(true, |(bp, _)| prof < *bp) {
            best = Some((prof, t));
        }
    }
    Ok(best.expect("ladder has at least one pair").1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: i64, rot: bool, items: &[(i64, i64, i64)]) -> Instance {
        Instance::new(
            n,
            rot,
            items.iter().enumerate().map(|(i, &(w, h, p))| Item::new(format!("i{i}"), w, h, p)).collect(),
        )
    }

    #[test]
    fn effective_dims_cases() {
        let it = Item::new("a", 3, 7, 1);
        assert_eq!(effective_dims(&it, false), (3, 7));
        assert_eq!(effective_dims(&it, true), (7, 3));
        assert_eq!(effective_dims(&Item::new("b", 5, 5, 1), true), (5, 5));
    }

    #[test]
    fn exact_fit_is_valid() {
        let i = inst(10, false, &[(10, 10, 1)]);
        let p = Packing::new(vec![Placement::new("i0", 0, 0, false)]);
        assert!(validate_packing(&i, &p).valid);
    }

    #[test]
    fn overlap_names_the_pair() {
        let i = inst(12, false, &[(6, 6, 1), (6, 6, 1)]);
        let p = Packing::new(vec![Placement::new("i0", 0, 0, false), Placement::new("i1", 5, 0, false)]);
        let r = validate_packing(&i, &p);
        assert!(!r.valid);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, "overlap");
        assert_eq!(r.violations[0].ids, vec!["i0".to_string(), "i1".to_string()]);
    }

    #[test]
    fn shared_edges_are_legal() {
        let i = inst(10, false, &[(5, 10, 1), (5, 10, 1)]);
        let p = Packing::new(vec![Placement::new("i0", 0, 0, false), Placement::new("i1", 5, 0, false)]);
        assert!(validate_packing(&i, &p).valid);
    }

    #[test]
    fn rotation_forbidden() {
        let i = inst(10, false, &[(4, 8, 1)]);
        let p = Packing::new(vec![Placement::new("i0", 0, 0, true)]);
        assert!(validate_packing(&i, &p).has("illegal_rotation"));
    }

    #[test]
    fn duplicate_unknown_and_out_of_bounds() {
        let i = inst(10, true, &[(4, 8, 1)]);
        let p = Packing::new(vec![
            Placement::new("i0", 0, 0, true),
            Placement::new("i0", 0, 0, false),
            Placement::new("zz", 0, 0, false),
        ]);
        let r = validate_packing(&i, &p);
        assert!(r.has("duplicate") && r.has("unknown_item"));
        let q = Packing::new(vec![Placement::new("i0", 3, 0, true)]);
        assert!(validate_packing(&i, &q).has("out_of_bounds"));
    }

    #[test]
    fn container_stack_rules() {
        let i = inst(20, false, &[(8, 2, 1), (10, 3, 1)]);
        let c = [Container::new(0, 0, 10, 6, Label::Horizontal)];
        let stacked = Packing::new(vec![Placement::new("i0", 0, 0, false), Placement::new("i1", 0, 2, false)]);
        assert!(validate_container_packing(&i, &stacked, &c, Q::new(1, 10)).valid);
        let j = inst(20, false, &[(4, 2, 1), (5, 3, 1)]);
        let side = Packing::new(vec![Placement::new("i0", 0, 0, false), Placement::new("i1", 4, 0, false)]);
        assert!(validate_container_packing(&j, &side, &c, Q::new(1, 10)).has("stacking"));
    }

    #[test]
    fn area_container_threshold() {
        let i = inst(20, false, &[(3, 1, 1)]);
        let c = [Container::new(0, 0, 20, 20, Label::Area)];
        let p = Packing::new(vec![Placement::new("i0", 0, 0, false)]);
        assert!(validate_container_packing(&i, &p, &c, Q::new(1, 10)).has("area_item_too_large"));
    }

    #[test]
    fn item_outside_containers_and_overlapping_containers() {
        let i = inst(20, false, &[(3, 1, 1)]);
        let c = [Container::new(0, 0, 10, 10, Label::Horizontal), Container::new(5, 5, 10, 10, Label::Vertical)];
        let p = Packing::new(vec![Placement::new("i0", 15, 19, false)]);
        let r = validate_container_packing(&i, &p, &c, Q::new(1, 10));
        assert!(r.has("container_overlap") && r.has("not_in_container"));
    }

    #[test]
    fn classify_examples() {
        let t = Thresholds::new(Q::new(1, 2), Q::new(1, 20), Q::new(1, 5));
        assert_eq!(classify_item(&Item::new("a", 4, 4, 1), 100, &t), ItemClass::Small);
        assert_eq!(classify_item(&Item::new("b", 3, 90, 1), 100, &t), ItemClass::VerticalItem);
        assert_eq!(classify_item(&Item::new("c", 10, 10, 1), 100, &t), ItemClass::Intermediate);
        assert_eq!(classify_item(&Item::new("d", 90, 3, 1), 100, &t), ItemClass::HorizontalItem);
        assert_eq!(classify_item(&Item::new("e", 30, 30, 1), 100, &t), ItemClass::Large);
    }

    #[test]
    fn eps_range_checked() {
        let items = [Item::new("a", 1, 1, 1)];
        assert!(choose_thresholds(&items, 100, Q::new(3, 5)).is_err());
        assert!(choose_thresholds(&items, 100, Q::from_integer(0)).is_err());
        assert!(choose_thresholds(&items, 100, Q::new(1, 2)).is_ok());
    }

    #[test]
    fn all_unit_items_have_no_intermediate_profit() {
        let items: Vec<Item> = (0..10).map(|i| Item::new(format!("u{i}"), 1, 1, 1)).collect();
        let t = choose_thresholds(&items, 100, Q::new(1, 4)).unwrap();
        assert_eq!(intermediate_profit(&items, 100, &t), 0);
    }

    #[test]
    fn ladder_pair_zero_classifies_as_expected() {
        // e_0 = 1/4, e_1 = 1/64 for eps = 1/2
        let (s, l) = ladder_pair(Q::new(1, 2), 0);
        assert_eq!(l.to_string(), "1/4");
        assert_eq!(s.to_string(), "1/64");
        let t = Thresholds { eps: Q::new(1, 2), eps_small: s, eps_large: l, ladder_index: 0 };
        assert_eq!(classify_item(&Item::new("a", 50, 50, 9), 100, &t), ItemClass::Large);
        assert_eq!(classify_item(&Item::new("b", 10, 2, 1), 100, &t), ItemClass::Intermediate);
    }

    #[test]
    fn minimiser_moves_past_pair_zero_when_a_later_pair_is_cleaner() {
        // on pair 1 (1/2^18, 1/64) the 10x2 item is Large (both sides > 100/64)
        let items = [Item::new("a", 50, 50, 9), Item::new("b", 10, 2, 1)];
        let t = choose_thresholds(&items, 100, Q::new(1, 2)).unwrap();
        assert_eq!(t.ladder_index, 1);
        assert_eq!(intermediate_profit(&items, 100, &t), 0);
    }
}
