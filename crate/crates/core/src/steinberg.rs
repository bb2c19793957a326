//! Area-guaranteed packer: if `w_max <= u`, `h_max <= v` and
//! `2*S <= u*v - (2*w_max - u)_+ * (2*h_max - v)_+`, all items fit in `u x v`.
//!
//! The packer recurses over sub-boxes. Each step is one of the classic
//! reductions (stack the wide items, row of tall items, big item in a corner
//! with the rest split between the two remaining boxes, or a guillotine split
//! of the item list) and is only taken after the area condition has been
//! re-verified exactly for every sub-box it creates. Steps are tried in a fixed
//! order with backtracking, so the result is deterministic. A skyline packer is
//! the last resort if the search runs out of moves.

use crate::greedy::PackResult;
use crate::model::{Container, Item, Placement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SteinbergError {
    #[error("precondition failed: {detail} (lhs {lhs} > rhs {rhs})")]
    PreconditionFailed { lhs: i128, rhs: i128, detail: String },
}

/// Checks the packing condition, reporting the violated inequality.
pub fn check_condition(u: i64, v: i64, dims: &[(i64, i64)]) -> Result<(), SteinbergError> {
    let a = dims.iter().map(|d| d.0).max().unwrap_or(0);
    let b = dims.iter().map(|d| d.1).max().unwrap_or(0);
    if a > u {
        return Err(SteinbergError::PreconditionFailed {
            lhs: a as i128,
            rhs: u as i128,
            detail: "widest item exceeds region width".into(),
        });
    }
    if b > v {
        return Err(SteinbergError::PreconditionFailed {
            lhs: b as i128,
            rhs: v as i128,
            detail: "tallest item exceeds region height".into(),
        });
    }
    let s: i128 = dims.iter().map(|d| d.0 as i128 * d.1 as i128).sum();
    let lhs = 2 * s;
    let rhs = u as i128 * v as i128 - pos(2 * a as i128 - u as i128) * pos(2 * b as i128 - v as i128);
    if lhs > rhs {
        return Err(SteinbergError::PreconditionFailed {
            lhs,
            rhs,
            detail: "2*area > w*h - (2*w_max - w)_+ * (2*h_max - h)_+".into(),
        });
    }
    Ok(())
}

fn pos(x: i128) -> i128 {
    x.max(0)
}

/// Packs all items into `region` (unrotated) or reports the failed precondition.
pub fn steinberg(region: &Container, items: &[Item]) -> Result<PackResult, SteinbergError> {
    let dims: Vec<(i64, i64)> = items.iter().map(|i| (i.w, i.h)).collect();
    check_condition(region.w, region.h, &dims)?;
    let placed = pack_dims(region.w, region.h, &dims);
    let mut out = PackResult::default();
    let mut done = vec![false; items.len()];
    for (i, x, y) in placed {
        done[i] = true;
        out.placements.push(Placement::new(items[i].id.clone(), region.x + x, region.y + y, false));
    }
    out.placements.sort_by(|a, b| a.id.cmp(&b.id));
    for (i, it) in items.iter().enumerate() {
        if !done[i] {
            out.leftovers.push(it.id.clone());
        }
    }
    Ok(out)
}

/// Which step produced a packing; exposed for tests and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Recursive,
    Skyline,
    Incomplete,
}

/// Positions `(index, x, y)` relative to the box. Packs everything whenever the
/// recursive search or the skyline fallback succeeds.
pub fn pack_dims(u: i64, v: i64, dims: &[(i64, i64)]) -> Vec<(usize, i64, i64)> {
    pack_dims_route(u, v, dims).0
}

pub fn pack_dims_route(u: i64, v: i64, dims: &[(i64, i64)]) -> (Vec<(usize, i64, i64)>, Route) {
    if dims.is_empty() {
        return (Vec::new(), Route::Recursive);
    }
    let idx: Vec<usize> = (0..dims.len()).collect();
    // Integer split positions can waste up to one unit per cut; on failure the
    // search is repeated on a finer grid and snapped back by gravity.
    let uv = (u as i128 * v as i128).max(1);
    let cap = (1i128 << 30) / (u.max(v).max(1) as i128);
    let mut scales = vec![1i64, 16];
    for s in [uv, uv * uv] {
        if s <= cap && !scales.contains(&(s as i64)) {
            scales.push(s as i64);
        }
    }
    for scale in scales {
        let sd: Vec<(i64, i64)> = dims.iter().map(|&(w, h)| (w * scale, h * scale)).collect();
        let mut s = Search { dims: &sd, nodes: 0, limit: 2_000_000 };
        if let Some(p) = s.solve(u * scale, v * scale, &idx, false) {
            let p = if scale == 1 { p } else { snap_to_grid(dims, &p, scale) };
            return (p, Route::Recursive);
        }
    }
    let sky = skyline_best(u, v, dims);
    let route = if sky.len() == dims.len() { Route::Skyline } else { Route::Incomplete };
    (sky, route)
}

type Out = Vec<(usize, i64, i64)>;

struct Search<'a> {
    dims: &'a [(i64, i64)],
    nodes: usize,
    limit: usize,
}

impl Search<'_> {
    /// Dimensions in the (possibly transposed) frame.
    fn d(&self, i: usize, t: bool) -> (i64, i64) {
        let (w, h) = self.dims[i];
        if t {
            (h, w)
        } else {
            (w, h)
        }
    }

    /// Single row or single stack, when one of them fits outright.
    fn row_or_stack(&self, u: i64, v: i64, idx: &[usize], t: bool) -> Option<Out> {
        let sw: i64 = idx.iter().map(|&i| self.d(i, t).0).sum();
        let sh: i64 = idx.iter().map(|&i| self.d(i, t).1).sum();
        let mw = idx.iter().map(|&i| self.d(i, t).0).max().unwrap_or(0);
        let mh = idx.iter().map(|&i| self.d(i, t).1).max().unwrap_or(0);
        if sw <= u && mh <= v {
            let mut x = 0;
            return Some(idx.iter().map(|&i| {
                let e = (i, x, 0);
                x += self.d(i, t).0;
                e
            })
            .collect());
        }
        if sh <= v && mw <= u {
            let mut y = 0;
            return Some(idx.iter().map(|&i| {
                let e = (i, 0, y);
                y += self.d(i, t).1;
                e
            })
            .collect());
        }
        None
    }

    fn fits(&self, u: i64, v: i64, idx: &[usize], t: bool) -> bool {
        if idx.len() > 1 && self.row_or_stack(u, v, idx, t).is_some() {
            return true;
        }
        match idx.len() {
            0 => u >= 0 && v >= 0,
            1 => {
                let (w, h) = self.d(idx[0], t);
                w <= u && h <= v
            }
            _ => {
                let ds: Vec<_> = idx.iter().map(|&i| self.d(i, t)).collect();
                check_condition(u, v, &ds).is_ok()
            }
        }
    }

    /// Smallest integer width `x` such that `idx` satisfies the condition in `x * v`.
    fn min_width(&self, v: i64, idx: &[usize], t: bool) -> Option<i64> {
        let a = idx.iter().map(|&i| self.d(i, t).0).max()?;
        let b = idx.iter().map(|&i| self.d(i, t).1).max()?;
        if b > v {
            return None;
        }
        if idx.len() == 1 {
            return Some(a);
        }
        let sh: i64 = idx.iter().map(|&i| self.d(i, t).1).sum();
        let sw: i64 = idx.iter().map(|&i| self.d(i, t).0).sum();
        // a single stack needs width `a`; a single row needs width `sw`
        let direct = if sh <= v { Some(a) } else { Some(sw) };
        let s: i128 = idx.iter().map(|&i| {
            let (w, h) = self.d(i, t);
            w as i128 * h as i128
        })
        .sum();
        if v == 0 {
            return None;
        }
        let c = pos(2 * b as i128 - v as i128);
        let g = |x: i128| x * v as i128 - pos(2 * a as i128 - x) * c;
        let (mut lo, mut hi) = (a as i128, (a as i128).max((2 * s + v as i128 - 1) / v as i128) + 2 * a as i128);
        if g(lo) < 2 * s {
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if g(mid) >= 2 * s {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo = hi;
        }
        direct.map(|d| d.min(lo as i64)).or(Some(lo as i64))
    }

    fn solve(&mut self, u: i64, v: i64, idx: &[usize], t: bool) -> Option<Out> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return None;
        }
        match idx.len() {
            0 => return Some(Vec::new()),
            1 => {
                let (w, h) = self.d(idx[0], t);
                return (w <= u && h <= v).then(|| vec![(idx[0], 0, 0)]);
            }
            _ => {}
        }
        if let Some(p) = self.row_or_stack(u, v, idx, t) {
            return Some(p);
        }
        if !self.fits(u, v, idx, t) {
            return None;
        }
        for tt in [t, !t] {
            // in the transposed frame the box is v x u and output is swapped back
            let (uu, vv) = if tt == t { (u, v) } else { (v, u) };
            let flip = tt != t;
            if let Some(p) = self.stack_wide(uu, vv, idx, tt) {
                return Some(swap_if(p, flip));
            }
        }
        if let Some(p) = self.big_corner(u, v, idx, t) {
            return Some(p);
        }
        for tt in [t, !t] {
            let (uu, vv) = if tt == t { (u, v) } else { (v, u) };
            let flip = tt != t;
            if let Some(p) = self.split(uu, vv, idx, tt) {
                return Some(swap_if(p, flip));
            }
        }
        None
    }

    /// Items at least half as wide as the box stacked at the bottom (widest
    /// first), the rest in the box above them.
    fn stack_wide(&mut self, u: i64, v: i64, idx: &[usize], t: bool) -> Option<Out> {
        let mut wide: Vec<usize> = idx.iter().copied().filter(|&i| 2 * self.d(i, t).0 >= u).collect();
        if wide.is_empty() {
            return None;
        }
        wide.sort_by(|&a, &b| self.d(b, t).0.cmp(&self.d(a, t).0).then(a.cmp(&b)));
        for m in (1..=wide.len()).rev() {
            let pre = &wide[..m];
            let hw: i64 = pre.iter().map(|&i| self.d(i, t).1).sum();
            if hw > v {
                continue;
            }
            let rest: Vec<usize> = idx.iter().copied().filter(|i| !pre.contains(i)).collect();
            if !self.fits(u, v - hw, &rest, t) {
                continue;
            }
            if let Some(sub) = self.solve(u, v - hw, &rest, t) {
                let mut out = Vec::with_capacity(idx.len());
                let mut y = 0;
                for &i in pre {
                    out.push((i, 0, y));
                    y += self.d(i, t).1;
                }
                out.extend(sub.into_iter().map(|(i, x, yy)| (i, x, yy + hw)));
                return Some(out);
            }
        }
        None
    }

    /// A big item (at least half the box in both directions) at the origin;
    /// the rest go to the column on its right or the box above it.
    fn big_corner(&mut self, u: i64, v: i64, idx: &[usize], t: bool) -> Option<Out> {
        let big = idx
            .iter()
            .copied()
            .filter(|&i| {
                let (w, h) = self.d(i, t);
                2 * w >= u && 2 * h >= v
            })
            .max_by(|&a, &b| {
                let (wa, ha) = self.d(a, t);
                let (wb, hb) = self.d(b, t);
                (wa * ha).cmp(&(wb * hb)).then(b.cmp(&a))
            })?;
        let (w0, h0) = self.d(big, t);
        let rest: Vec<usize> = idx.iter().copied().filter(|&i| i != big).collect();
        let mut forced_top = Vec::new();
        let mut forced_right = Vec::new();
        let mut free = Vec::new();
        for &i in &rest {
            let (w, h) = self.d(i, t);
            let top_ok = w <= w0 && h <= v - h0;
            let right_ok = w <= u - w0 && h <= v;
            match (top_ok, right_ok) {
                (false, false) => return None,
                (true, false) => forced_top.push(i),
                (false, true) => forced_right.push(i),
                (true, true) => free.push(i),
            }
        }
        free.sort_by(|&a, &b| self.d(b, t).1.cmp(&self.d(a, t).1).then(a.cmp(&b)));
        for m in (0..=free.len()).rev() {
            let mut right = forced_right.clone();
            right.extend_from_slice(&free[..m]);
            let mut top = forced_top.clone();
            top.extend_from_slice(&free[m..]);
            if !self.fits(u - w0, v, &right, t) || !self.fits(w0, v - h0, &top, t) {
                continue;
            }
            let Some(r) = self.solve(u - w0, v, &right, t) else { continue };
            let Some(tp) = self.solve(w0, v - h0, &top, t) else { continue };
            let mut out = vec![(big, 0, 0)];
            out.extend(r.into_iter().map(|(i, x, y)| (i, x + w0, y)));
            out.extend(tp.into_iter().map(|(i, x, y)| (i, x, y + h0)));
            return Some(out);
        }
        None
    }

    /// Vertical guillotine cut: a prefix of a sorted order goes to the left box
    /// of minimal admissible width, the rest to the right box.
    fn split(&mut self, u: i64, v: i64, idx: &[usize], t: bool) -> Option<Out> {
        let n = idx.len();
        let mut orders: Vec<Vec<usize>> = Vec::new();
        let mut by_w = idx.to_vec();
        by_w.sort_by(|&a, &b| self.d(b, t).0.cmp(&self.d(a, t).0).then(a.cmp(&b)));
        orders.push(by_w);
        let mut by_area = idx.to_vec();
        by_area.sort_by(|&a, &b| {
            let (wa, ha) = self.d(a, t);
            let (wb, hb) = self.d(b, t);
            (wb * hb).cmp(&(wa * ha)).then(a.cmp(&b))
        });
        orders.push(by_area);
        let mut by_h = idx.to_vec();
        by_h.sort_by(|&a, &b| self.d(b, t).1.cmp(&self.d(a, t).1).then(a.cmp(&b)));
        orders.push(by_h);
        for ord in orders {
            for m in 1..n {
                let (l, r) = ord.split_at(m);
                let Some(x1) = self.min_width(v, l, t) else { continue };
                let Some(x2) = self.min_width(v, r, t) else { continue };
                if x1 + x2 > u {
                    continue;
                }
                let Some(pl) = self.solve(x1, v, l, t) else { continue };
                let Some(pr) = self.solve(u - x1, v, r, t) else { continue };
                let mut out = pl;
                out.extend(pr.into_iter().map(|(i, x, y)| (i, x + x1, y)));
                return Some(out);
            }
        }
        None
    }
}

/// Gravity pass (down, then left) on positions given in units of `1/scale`.
/// Supports have integer extents, so every coordinate ends on a multiple of
/// `scale`; coordinates only decrease, so containment and disjointness hold.
fn snap_to_grid(dims: &[(i64, i64)], p: &Out, scale: i64) -> Out {
    let mut pos: Vec<(usize, i64, i64)> = p.clone();
    let size = |i: usize| (dims[i].0 * scale, dims[i].1 * scale);
    for axis in 0..2 {
        let key = |e: &(usize, i64, i64)| if axis == 0 { (e.2, e.1) } else { (e.1, e.2) };
        pos.sort_by_key(|e| key(e));
        for k in 0..pos.len() {
            let (i, x, y) = pos[k];
            let (w, h) = size(i);
            let mut floor = 0;
            for &(j, xj, yj) in &pos[..k] {
                let (wj, hj) = size(j);
                if axis == 0 && xj < x + w && x < xj + wj {
                    floor = floor.max(yj + hj);
                } else if axis == 1 && yj < y + h && y < yj + hj {
                    floor = floor.max(xj + wj);
                }
            }
            if axis == 0 {
                pos[k].2 = floor;
            } else {
                pos[k].1 = floor;
            }
        }
    }
    pos.into_iter().map(|(i, x, y)| (i, x / scale, y / scale)).collect()
}

fn swap_if(p: Out, flip: bool) -> Out {
    if flip {
        p.into_iter().map(|(i, x, y)| (i, y, x)).collect()
    } else {
        p
    }
}

/// Bottom-left skyline packing under a few item orders; returns the order
/// that packs the most items.
fn skyline_best(u: i64, v: i64, dims: &[(i64, i64)]) -> Out {
    let keys: [fn(&(i64, i64)) -> (i64, i64); 4] = [
        |d| (d.1, d.0),
        |d| (d.0 * d.1, d.1),
        |d| (d.0, d.1),
        |d| (d.0.max(d.1), d.0 * d.1),
    ];
    let mut best: Out = Vec::new();
    for key in keys {
        let mut ord: Vec<usize> = (0..dims.len()).collect();
        ord.sort_by(|&a, &b| key(&dims[b]).cmp(&key(&dims[a])).then(a.cmp(&b)));
        let got = skyline(u, v, dims, &ord);
        if got.len() > best.len() {
            best = got;
            if best.len() == dims.len() {
                break;
            }
        }
    }
    best
}

fn skyline(u: i64, v: i64, dims: &[(i64, i64)], ord: &[usize]) -> Out {
    // segments (x, width, height)
    let mut sky: Vec<(i64, i64, i64)> = vec![(0, u, 0)];
    let mut out = Vec::new();
    for &i in ord {
        let (w, h) = dims[i];
        let mut best: Option<(i64, i64, usize)> = None;
        for s in 0..sky.len() {
            let x = sky[s].0;
            if x + w > u {
                break;
            }
            let mut y = 0;
            let mut rem = w;
            let mut k = s;
            while rem > 0 && k < sky.len() {
                y = y.max(sky[k].2);
                rem -= sky[k].1;
                k += 1;
            }
            if y + h <= v && best.map_or(true, |(by, bx, _)| (y, x) < (by, bx)) {
                best = Some((y, x, s));
            }
        }
        let Some((y, x, _)) = best else { continue };
        out.push((i, x, y));
        // rebuild the skyline over [x, x+w)
        let mut next = Vec::with_capacity(sky.len() + 2);
        for &(sx, sw, sh) in &sky {
            let (a, b) = (sx, sx + sw);
            if b <= x || a >= x + w {
                next.push((sx, sw, sh));
                continue;
            }
            if a < x {
                next.push((a, x - a, sh));
            }
            if b > x + w {
                next.push((x + w, b - x - w, sh));
            }
        }
        next.push((x, w, y + h));
        next.sort();
        let mut merged: Vec<(i64, i64, i64)> = Vec::with_capacity(next.len());
        for s in next {
            if let Some(last) = merged.last_mut() {
                if last.2 == s.2 && last.0 + last.1 == s.0 {
                    last.1 += s.1;
                    continue;
                }
            }
            merged.push(s);
        }
        sky = merged;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_in_region, Instance, Label, Packing};

    fn items(d: &[(i64, i64)]) -> Vec<Item> {
        d.iter().enumerate().map(|(i, &(w, h))| Item::new(format!("i{i}"), w, h, 1)).collect()
    }

    fn run(u: i64, v: i64, d: &[(i64, i64)]) -> Result<PackResult, SteinbergError> {
        steinberg(&Container::new(0, 0, u, v, Label::Area), &items(d))
    }

    #[test]
    fn packs_three_small_items() {
        let r = run(10, 8, &[(4, 3), (4, 3), (3, 2)]).unwrap();
        assert!(r.leftovers.is_empty());
        let inst = Instance::new(10, false, items(&[(4, 3), (4, 3), (3, 2)]));
        assert!(validate_in_region(&inst, &Packing::new(r.placements), crate::model::Rect::new(0, 0, 10, 8)).valid);
    }

    #[test]
    fn area_violation_reports_both_sides() {
        match run(10, 8, &[(5, 4), (5, 4), (4, 3)]) {
            Err(SteinbergError::PreconditionFailed { lhs, rhs, .. }) => {
                assert_eq!((lhs, rhs), (104, 80));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_full_item_fails_the_condition() {
        match run(10, 10, &[(10, 10)]) {
            Err(SteinbergError::PreconditionFailed { lhs, rhs, .. }) => assert_eq!((lhs, rhs), (200, 0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oversized_item_fails() {
        assert!(run(10, 10, &[(11, 1)]).is_err());
    }

    #[test]
    fn empty_list_is_trivially_packed() {
        assert_eq!(run(3, 3, &[]).unwrap(), PackResult::default());
    }

    #[test]
    fn big_item_and_companions() {
        // one item over half in both directions, the condition is tight-ish
        let d = [(6, 6), (3, 2), (2, 3)];
        check_condition(10, 10, &d).unwrap();
        let r = run(10, 10, &d).unwrap();
        assert!(r.leftovers.is_empty());
    }

    #[test]
    fn skyline_handles_a_simple_row() {
        let d = [(3, 2), (3, 2), (4, 2)];
        let out = skyline(10, 2, &d, &[0, 1, 2]);
        assert_eq!(out.len(), 3);
    }
}
