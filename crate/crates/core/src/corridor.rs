//! Corridors: chains of overlapping subcorridors, and the routine that turns
//! the items packed in one into thin items, killed items and boxes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::model::{Container, Instance, ItemId, Label, Packing, Placement, Rect};
use crate::rational::{q_to_big, Q};
use crate::transforms::{box_to_containers, placed_from_packing, Placed, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorridorKind {
    Open,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubCorridor {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
    pub orientation: Orientation,
}

impl SubCorridor {
    pub fn new(x: i64, y: i64, w: i64, h: i64, orientation: Orientation) -> Self {
        SubCorridor { x, y, w, h, orientation }
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.w, self.h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corridor {
    pub kind: CorridorKind,
    pub subcorridors: Vec<SubCorridor>,
}

impl Corridor {
    pub fn bends(&self) -> usize {
        match self.kind {
            CorridorKind::Open => self.subcorridors.len().saturating_sub(1),
            CorridorKind::Closed => self.subcorridors.len(),
        }
    }

    /// Area of the union of the subcorridors.
    pub fn area(&self) -> i64 {
        union_area(&self.subcorridors.iter().map(|s| s.rect()).collect::<Vec<_>>())
    }

    pub fn contains(&self, r: &Rect) -> bool {
        // a rectangle inside the union: every compressed cell it covers is covered
        let rects: Vec<Rect> = self.subcorridors.iter().map(|s| s.rect()).collect();
        let inside: Vec<Rect> = rects.iter().filter_map(|s| s.intersection(r)).collect();
        union_area(&inside) == r.area()
    }
}

fn union_area(rects: &[Rect]) -> i64 {
    let xs: BTreeSet<i64> = rects.iter().flat_map(|r| [r.x, r.right()]).collect();
    let ys: BTreeSet<i64> = rects.iter().flat_map(|r| [r.y, r.top()]).collect();
    let xs: Vec<i64> = xs.into_iter().collect();
    let ys: Vec<i64> = ys.into_iter().collect();
    let mut total = 0;
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let cell = Rect::new(xw[0], yw[0], xw[1] - xw[0], yw[1] - yw[0]);
            if rects.iter().any(|r| r.contains(&cell)) {
                total += cell.area();
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorridorError {
    #[error("item `{0}` lies only in subcorridors of the other orientation")]
    MixedOrientation(String),
    #[error("malformed corridor: {0}")]
    MalformedCorridor(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Everything [`process_corridor`] produces. Every input item ends up in
/// exactly one of `placements`, `thin_items`, `killed_items`, `deleted_items`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CorridorOutput {
    pub boxes: Vec<Container>,
    pub containers: Vec<Container>,
    pub placements: Vec<Placement>,
    pub thin_items: Vec<ItemId>,
    pub killed_items: Vec<ItemId>,
    pub deleted_items: Vec<ItemId>,
    pub thin_area: i64,
}

pub fn validate_corridor(corr: &Corridor, n: i64, max_bends: usize) -> Result<(), CorridorError> {
    let bad = |m: String| Err(CorridorError::MalformedCorridor(m));
    let s = &corr.subcorridors;
    if s.is_empty() {
        return bad("no subcorridors".into());
    }
    if corr.kind == CorridorKind::Closed && s.len() < 4 {
        return bad("a closed corridor needs at least four subcorridors".into());
    }
    if corr.bends() > max_bends {
        return bad(format!("{} bends exceed the limit {max_bends}", corr.bends()));
    }
    let k = Rect::new(0, 0, n, n);
    for (i, a) in s.iter().enumerate() {
        if a.w < 1 || a.h < 1 || !k.contains(&a.rect()) {
            return bad(format!("subcorridor {i} is degenerate or outside the knapsack"));
        }
    }
    let m = s.len();
    let consecutive = |i: usize, j: usize| {
        j == i + 1 || (corr.kind == CorridorKind::Closed && i == 0 && j == m - 1)
    };
    for i in 0..m {
        for j in i + 1..m {
            let ov = s[i].rect().overlaps(&s[j].rect());
            if consecutive(i, j) {
                if !ov {
                    return bad(format!("subcorridors {i} and {j} do not overlap"));
                }
                if s[i].orientation == s[j].orientation {
                    return bad(format!("subcorridors {i} and {j} share an orientation"));
                }
            } else if ov {
                return bad(format!("non-consecutive subcorridors {i} and {j} overlap"));
            }
        }
    }
    Ok(())
}

/// Processing order: given order for open corridors; for closed ones start
/// at the bottom-most horizontal subcorridor and go around.
fn processing_order(corr: &Corridor) -> Vec<usize> {
    let m = corr.subcorridors.len();
    match corr.kind {
        CorridorKind::Open => (0..m).collect(),
        CorridorKind::Closed => {
            let start = (0..m)
                .filter(|&i| corr.subcorridors[i].orientation == Orientation::Horizontal)
                .min_by_key(|&i| (corr.subcorridors[i].y, corr.subcorridors[i].x, i))
                .unwrap_or(0);
            (0..m).map(|k| (start + k) % m).collect()
        }
    }
}

/// Cuts the parts already owned by earlier subcorridors off the ends of `s`.
fn private_rect(s: &SubCorridor, earlier: &[SubCorridor]) -> Result<Option<Rect>, CorridorError> {
    let r = s.rect();
    let horiz = s.orientation == Orientation::Horizontal;
    let (mut a, mut b) = if horiz { (r.x, r.right()) } else { (r.y, r.top()) };
    for e in earlier {
        let Some(ov) = r.intersection(&e.rect()) else { continue };
        let (c, d) = if horiz { (ov.x, ov.right()) } else { (ov.y, ov.top()) };
        if c <= a {
            a = a.max(d);
        } else if d >= b {
            b = b.min(c);
        } else {
            return Err(CorridorError::MalformedCorridor("overlap in the middle of a subcorridor".into()));
        }
    }
    if a >= b {
        return Ok(None);
    }
    Ok(Some(if horiz { Rect::new(a, r.y, b - a, r.h) } else { Rect::new(r.x, a, r.w, b - a) }))
}

fn fits_orientation(r: &Rect, o: Orientation) -> bool {
    match o {
        Orientation::Horizontal => r.w >= r.h,
        Orientation::Vertical => r.h >= r.w,
    }
}

/// Distances `eps_thin * (1+eps)^j * h`, `j = 0, 1, ...`, below `h`.
pub fn strip_lines(h: i64, eps: Q, eps_thin: Q) -> Vec<BigRational> {
    let hb = BigRational::from_integer(BigInt::from(h));
    let step = q_to_big(Q::one() + eps);
    let mut cur = q_to_big(eps_thin) * &hb;
    let mut out = Vec::new();
    if cur <= BigRational::zero() || eps <= Q::zero() {
        return out;
    }
    while cur < hb {
        out.push(cur.clone());
        cur = cur * &step;
    }
    out
}

/// `((1/eps) * L)^(bends+1) * (1/eps)` where `L` counts the strip lines.
pub fn box_count_bound(eps: Q, eps_thin: Q, bends: usize) -> u128 {
    let inv = eps.recip().ceil().to_integer().max(1) as u128;
    let lines = strip_lines(1, eps, eps_thin).len().max(1) as u128;
    (inv * lines).saturating_pow(bends as u32 + 1).saturating_mul(inv)
}

fn ceil_big(v: &BigRational) -> i64 {
    v.ceil().to_integer().to_i64().expect("coordinate fits i64")
}

fn floor_big(v: &BigRational) -> i64 {
    v.floor().to_integer().to_i64().expect("coordinate fits i64")
}

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Bucket items by the lines they fall between; items whose interior meets
/// a line are returned separately.
fn bucket(items: Vec<Placed>, lines: &[BigRational]) -> (Vec<Vec<Placed>>, Vec<Placed>) {
    let mut buckets = vec![Vec::new(); lines.len() + 1];
    let mut crossers = Vec::new();
    for it in items {
        let (lo, hi) = (big(it.rect.y), big(it.rect.top()));
        if lines.iter().any(|l| lo < *l && *l < hi) {
            crossers.push(it);
        } else {
            let b = lines.iter().filter(|l| **l <= lo).count();
            buckets[b].push(it);
        }
    }
    (buckets, crossers)
}

/// Processes one horizontal private rectangle (vertical ones are transposed
/// by the caller).
fn process_horizontal(
    p: Rect,
    h: i64,
    items: Vec<Placed>,
    eps: Q,
    eps_thin: Q,
    out: &mut CorridorOutput,
    label: Label,
    back: &dyn Fn(&Placed) -> Placed,
    back_c: &dyn Fn(&Container) -> Container,
) -> Result<(), CorridorError> {
    let y0 = big(p.y);
    let mut bounds: Vec<BigRational> = strip_lines(h, eps, eps_thin).into_iter().map(|d| &y0 + d).collect();
    let (mut regions, crossers) = bucket(items, &bounds);
    out.killed_items.extend(crossers.iter().map(|c| c.id.clone()));
    let thin = std::mem::take(&mut regions[0]);
    out.thin_area += thin.iter().map(|t| t.rect.area()).sum::<i64>();
    out.thin_items.extend(thin.iter().map(|t| t.id.clone()));
    bounds.push(big(p.top()));
    let m = eps.recip().floor().to_integer().max(1);
    for (j, region) in regions.into_iter().enumerate().skip(1) {
        let (lo, hi) = (&bounds[j - 1], &bounds[j]);
        let (blo, bhi) = (ceil_big(lo), floor_big(hi));
        if bhi <= blo {
            out.killed_items.extend(region.iter().map(|r| r.id.clone()));
            continue;
        }
        let mut kept = region;
        let mut shift = 0;
        if m >= 2 {
            let step = (hi - lo) / big(m);
            let sub: Vec<BigRational> = (1..m).map(|i| lo + &step * big(i)).collect();
            let (mut strips, cross) = bucket(kept, &sub);
            out.killed_items.extend(cross.iter().map(|c| c.id.clone()));
            let worst = (0..strips.len())
                .min_by_key(|&i| (strips[i].iter().map(|p| p.p).sum::<i64>(), i))
                .unwrap();
            out.deleted_items.extend(strips[worst].iter().map(|c| c.id.clone()));
            strips[worst].clear();
            let l = if worst == 0 { lo.clone() } else { sub[worst - 1].clone() };
            let u = if worst + 1 == m as usize { hi.clone() } else { sub[worst].clone() };
            shift = ceil_big(&u) - ceil_big(&l);
            kept = Vec::new();
            for (i, s) in strips.into_iter().enumerate() {
                for it in s {
                    kept.push(if i > worst { it.shifted(0, -shift) } else { it });
                }
            }
        }
        let bx = Container::new(p.x, blo, p.w, bhi - blo - shift, Label::Horizontal);
        if bx.h < 1 {
            out.killed_items.extend(kept.iter().map(|r| r.id.clone()));
            continue;
        }
        out.boxes.push(back_c(&Container { label, ..bx }));
        let split = box_to_containers(&bx, &kept, eps.min(Q::one()))?;
        out.containers.extend(split.containers.iter().map(back_c));
        out.placements.extend(split.kept.iter().map(|k| back(k).placement()));
        out.killed_items.extend(split.killed);
        out.deleted_items.extend(split.deleted);
    }
    Ok(())
}

/// Thin-strip and re-boxing treatment of every subcorridor of `corr`.
/// Only items of `packing` that overlap the corridor are considered.
pub fn process_corridor(
    inst: &Instance,
    corr: &Corridor,
    packing: &Packing,
    eps: Q,
    eps_thin: Q,
    max_bends: Option<usize>,
) -> Result<CorridorOutput, CorridorError> {
    let default_bends = eps.recip().ceil().to_integer().max(0) as usize;
    validate_corridor(corr, inst.n, max_bends.unwrap_or(default_bends))?;
    let subs = &corr.subcorridors;
    let all: Vec<Placed> = placed_from_packing(inst, packing)
        .into_iter()
        .filter(|p| subs.iter().any(|s| s.rect().overlaps(&p.rect)))
        .collect();
    let order = processing_order(corr);
    let mut privs: Vec<Option<Rect>> = vec![None; subs.len()];
    for (k, &i) in order.iter().enumerate() {
        let earlier: Vec<SubCorridor> = order[..k].iter().map(|&j| subs[j]).collect();
        privs[i] = private_rect(&subs[i], &earlier)?;
    }
    let mut assigned: Vec<Vec<Placed>> = vec![Vec::new(); subs.len()];
    let mut out = CorridorOutput::default();
    for it in all {
        let holders: Vec<usize> = (0..subs.len()).filter(|&i| subs[i].rect().contains(&it.rect)).collect();
        if holders.is_empty() {
            if corr.contains(&it.rect) {
                out.killed_items.push(it.id.clone());
                continue;
            }
            return Err(CorridorError::MalformedCorridor(format!("item `{}` leaves the corridor", it.id)));
        }
        let compatible: Vec<usize> =
            holders.iter().copied().filter(|&i| fits_orientation(&it.rect, subs[i].orientation)).collect();
        if compatible.is_empty() {
            return Err(CorridorError::MixedOrientation(it.id.clone()));
        }
        match order.iter().copied().find(|&i| compatible.contains(&i) && privs[i].map_or(false, |p| p.contains(&it.rect))) {
            Some(i) => assigned[i].push(it),
            None => out.killed_items.push(it.id.clone()),
        }
    }
    for &i in &order {
        let Some(p) = privs[i] else { continue };
        let items = std::mem::take(&mut assigned[i]);
        match subs[i].orientation {
            Orientation::Horizontal => {
                process_horizontal(p, subs[i].h, items, eps, eps_thin, &mut out, Label::Horizontal, &|q| q.clone(), &|c| *c)?;
            }
            Orientation::Vertical => {
                let t: Vec<Placed> = items.iter().map(transpose_placed).collect();
                process_horizontal(
                    p.transpose(),
                    subs[i].w,
                    t,
                    eps,
                    eps_thin,
                    &mut out,
                    Label::Horizontal,
                    &transpose_placed,
                    &|c| Container::from_rect(c.rect().transpose(), c.label.transpose()),
                )?;
            }
        }
    }
    Ok(out)
}

fn transpose_placed(p: &Placed) -> Placed {
    Placed { rect: p.rect.transpose(), ..p.clone() }
}
