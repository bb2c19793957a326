//! Instance families: the k-PartSum reduction and its packings, the
//! container lower-bound family, and seeded random generators.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{validate_packing, Instance, Item, Packing, Placement, Rect};
use crate::rational::{floor_mul, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartSumInstance {
    #[serde(rename = "A")]
    pub values: Vec<i64>,
    pub k: usize,
}

/// `values[..m]` and `values[m..]` have equal sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualSplit {
    pub values: Vec<i64>,
    pub m: usize,
}

impl EqualSplit {
    pub fn is_balanced(&self) -> bool {
        self.m >= 1
            && self.m < self.values.len()
            && self.values[..self.m].iter().sum::<i64>() == self.values[self.m..].iter().sum::<i64>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabError {
    #[error("k must be odd and at least 3 (got {0})")]
    BadK(usize),
    #[error("k = {0} is below 9; pass force to generate anyway")]
    KTooSmall(usize),
    #[error("all values must be positive")]
    NonPositive,
    #[error("n must be odd and at least 3 (got {0})")]
    BadN(usize),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("not extractable: {0}")]
    NotExtractable(String),
}

/// `{a + M'} ∪ {(k-1) M'}` with `M' = k max|a| + 1`.
pub fn reduce_ksum_to_partsum(a: &[i64], k: usize) -> Result<PartSumInstance, LabError> {
    if k < 3 || k % 2 == 0 {
        return Err(LabError::BadK(k));
    }
    let mp = k as i64 * a.iter().map(|v| v.abs()).max().unwrap_or(0) + 1;
    let mut values: Vec<i64> = a.iter().map(|v| v + mp).collect();
    values.push((k as i64 - 1) * mp);
    assert!(values.iter().all(|&v| v > 0));
    Ok(PartSumInstance { values, k })
}

/// Knapsack side `2 M k^4` for the hardness instance.
pub fn hardness_side(ps: &PartSumInstance) -> i64 {
    let m = ps.values.iter().copied().max().unwrap_or(1);
    2 * m * (ps.k as i64).pow(4)
}

/// Ids of the two rectangles made for the `i`-th value.
pub fn hardness_ids(i: usize) -> (String, String) {
    (format!("R{i}"), format!("Rp{i}"))
}

/// Two unit-profit rectangles per value: `(N/k + a) x (N/2 - a)` and
/// `(N/k - a) x (N/2 + a)`.
pub fn gen_hardness_2dkr(ps: &PartSumInstance, rotation_allowed: bool, force: bool) -> Result<Instance, LabError> {
    if ps.k < 3 {
        return Err(LabError::BadK(ps.k));
    }
    if ps.k < 9 && !force {
        return Err(LabError::KTooSmall(ps.k));
    }
    if ps.values.iter().any(|&v| v <= 0) {
        return Err(LabError::NonPositive);
    }
    let n = hardness_side(ps);
    let k = ps.k as i64;
    let mut items = Vec::new();
    for (i, &a) in ps.values.iter().enumerate() {
        let (r, rp) = hardness_ids(i);
        items.push(Item::new(r, n / k + a, n / 2 - a, 1));
        items.push(Item::new(rp, n / k - a, n / 2 + a, 1));
    }
    Ok(Instance::new(n, rotation_allowed, items))
}

/// Matches split values to distinct positions of the multiset.
fn match_values(ps: &PartSumInstance, vals: &[i64]) -> Result<Vec<usize>, LabError> {
    let mut used = vec![false; ps.values.len()];
    vals.iter()
        .map(|v| {
            let i = (0..ps.values.len())
                .find(|&i| !used[i] && ps.values[i] == *v)
                .ok_or_else(|| LabError::InvalidSplit(format!("value {v} not available in A")))?;
            used[i] = true;
            Ok(i)
        })
        .collect()
}

/// The explicit `2k`-rectangle packing for a yes-instance.
pub fn construct_yes_packing(ps: &PartSumInstance, split: &EqualSplit) -> Result<Packing, LabError> {
    let k = ps.k;
    if split.values.len() != k {
        return Err(LabError::InvalidSplit(format!("expected {k} values, got {}", split.values.len())));
    }
    if !split.is_balanced() {
        return Err(LabError::InvalidSplit("sides have different sums".into()));
    }
    let mut first = split.values[..split.m].to_vec();
    let mut second = split.values[split.m..].to_vec();
    first.sort_by(|a, b| b.cmp(a));
    second.sort();
    let m = first.len();
    let ordered: Vec<i64> = first.iter().chain(second.iter()).copied().collect();
    let pos = match_values(ps, &ordered)?;
    let n = hardness_side(ps);
    let nk = n / k as i64;
    let dims_r = |a: i64| (nk + a, n / 2 - a);
    let dims_rp = |a: i64| (nk - a, n / 2 + a);
    let mut pl = Vec::new();
    // top row: R'_{a_1..a_m} then R_{a_{m+1}..a_k}, touching the ceiling
    let mut x = 0;
    for j in 0..k {
        let (id, (w, h)) = if j < m {
            (hardness_ids(pos[j]).1, dims_rp(ordered[j]))
        } else {
            (hardness_ids(pos[j]).0, dims_r(ordered[j]))
        };
        pl.push(Placement::new(id, x, n - h, false));
        x += w;
    }
    // floor from the left: R_{a_1..a_m}
    let mut x = 0;
    for j in 0..m {
        pl.push(Placement::new(hardness_ids(pos[j]).0, x, 0, false));
        x += dims_r(ordered[j]).0;
    }
    // floor from the right: R'_{a_k} .. R'_{a_{m+1}}
    let mut x = n;
    for j in (m..k).rev() {
        x -= dims_rp(ordered[j]).0;
        pl.push(Placement::new(hardness_ids(pos[j]).1, x, 0, false));
    }
    pl.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Packing::new(pl))
}

/// Reads an equal-sum split back out of a packing of all `2k` rectangles.
pub fn extract_partition(inst: &Instance, packing: &Packing, k: usize) -> Result<EqualSplit, LabError> {
    let fail = |m: &str| Err(LabError::NotExtractable(m.to_string()));
    if packing.len() != 2 * k {
        return fail(&format!("{} rectangles placed, need {}", packing.len(), 2 * k));
    }
    if !validate_packing(inst, packing).valid {
        return fail("packing is not feasible");
    }
    let n = inst.n;
    let nk = n / k as i64;
    let idx = inst.index();
    // (rect, a, is_primed)
    let mut rects: Vec<(Rect, i64, bool)> = Vec::new();
    let rotated: Vec<bool> = packing.placements.iter().map(|p| p.rotated).collect();
    if rotated.iter().any(|&r| r) && rotated.iter().any(|&r| !r) {
        return fail("mixed orientations");
    }
    let flip = rotated.first().copied().unwrap_or(false);
    for p in &packing.placements {
        let it = idx[p.id.as_str()];
        let mut r = p.rect(it);
        if flip {
            r = r.transpose();
        }
        let (a, primed) = if it.w > nk { (it.w - nk, false) } else { (nk - it.w, true) };
        rects.push((r, a, primed));
    }
    // every vertical line meets at most two rectangles
    let mut xs: Vec<i64> = rects.iter().flat_map(|(r, _, _)| [r.x, r.right()]).collect();
    xs.sort();
    xs.dedup();
    for w in xs.windows(2) {
        let hits = rects.iter().filter(|(r, _, _)| r.x <= w[0] && w[1] <= r.right()).count();
        if hits > 2 {
            return fail("a vertical line meets three rectangles");
        }
    }
    // top or bottom: whichever side the x-overlapping partner is not on
    let mut side: Vec<Option<bool>> = vec![None; rects.len()];
    for i in 0..rects.len() {
        for j in 0..rects.len() {
            let (a, b) = (rects[i].0, rects[j].0);
            if i != j && a.x < b.right() && b.x < a.right() {
                let top = a.y > b.y;
                if side[i].map_or(false, |s| s != top) {
                    return fail("rectangle between two others");
                }
                side[i] = Some(top);
            }
        }
    }
    let tops = side.iter().filter(|s| **s == Some(true)).count();
    if tops > k {
        return fail("more than k rectangles on top");
    }
    let mut need = k - tops;
    for s in side.iter_mut() {
        if s.is_none() {
            *s = Some(need > 0);
            need = need.saturating_sub(1);
        }
    }
    let mut top: Vec<(Rect, i64, bool)> =
        rects.iter().zip(&side).filter(|(_, s)| **s == Some(true)).map(|(r, _)| *r).collect();
    if top.len() != k {
        return fail("top row does not hold exactly k rectangles");
    }
    // sorted non-increasingly by height, as in the left-to-right repacking
    top.sort_by(|a, b| b.0.h.cmp(&a.0.h).then(a.1.cmp(&b.1)));
    let width: i64 = top.iter().map(|t| t.0.w).sum();
    if width != n {
        return fail(&format!("top-row widths sum to {width}, not {n}"));
    }
    let m = top.iter().take_while(|t| t.2).count();
    if top[m..].iter().any(|t| t.2) {
        return fail("primed rectangles are not a prefix of the top row");
    }
    let split = EqualSplit { values: top.iter().map(|t| t.1).collect(), m };
    if !split.is_balanced() {
        return fail("decoded sides have different sums");
    }
    Ok(split)
}

/// Cube-root helpers for the lower-bound family: `N = 2^(3(n+1)/2)`.
fn lowerbound_side(n: usize) -> (i64, i64, i64) {
    let e = (n as u32 + 1) / 2;
    let c = 1i64 << e;
    (c * c * c, c, c * c)
}

/// Items `H_j`, `V_j` for `j = 1..(n-1)/2` and a special item `istar`.
pub fn gen_lowerbound_family(n: usize) -> Result<Instance, LabError> {
    if n < 3 || n % 2 == 0 {
        return Err(LabError::BadN(n));
    }
    let (big_n, c1, c2) = lowerbound_side(n);
    let mut items = Vec::new();
    for j in 1..=(n - 1) / 2 {
        let p2 = 1i64 << (j - 1);
        items.push(Item::new(format!("H{j}"), big_n - (p2 - 1) * c2, p2, 1));
        items.push(Item::new(format!("V{j}"), p2 * c2, c1 - 2 * p2 + 1, 1));
    }
    items.push(Item::new("istar", big_n, big_n - c1, ((n - 1) / 2) as i64));
    Ok(Instance::new(big_n, true, items))
}

/// `istar` on top, `H_j` stacked from the floor, each `V_j` on `H_j`.
pub fn construct_lowerbound_packing(inst: &Instance) -> Packing {
    let j_max = inst.items.iter().filter(|i| i.id.starts_with('H')).count();
    let big_n = inst.n;
    let c1 = (1..=big_n).find(|c| c * c * c >= big_n).unwrap_or(1);
    let c2 = c1 * c1;
    let mut pl = vec![Placement::new("istar", 0, c1, false)];
    let mut y = 0;
    for j in 1..=j_max {
        let h = 1i64 << (j - 1);
        pl.push(Placement::new(format!("H{j}"), 0, y, false));
        y += h;
        let x = if j == j_max { 0 } else { big_n - ((1i64 << j) - 1) * c2 };
        pl.push(Placement::new(format!("V{j}"), x, y, false));
    }
    pl.sort_by(|a, b| a.id.cmp(&b.id));
    Packing::new(pl)
}

/// Number of pairs with both members packed: `(H_j, V_j)` in the lower-bound
/// family, `(R_i, Rp_i)` in the hardness family.
pub fn count_symmetric_pairs(packing: &Packing) -> usize {
    let ids = packing.ids();
    let mut count = 0;
    for id in &ids {
        if let Some(j) = id.strip_prefix('H') {
            count += ids.contains(format!("V{j}").as_str()) as usize;
        } else if let Some(i) = id.strip_prefix('R').filter(|s| !s.starts_with('p')) {
            count += ids.contains(format!("Rp{i}").as_str()) as usize;
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Uniform,
    Skewed(Q),
    Cardinality,
}

impl std::str::FromStr for Profile {
    type Err = String;

    /// `uniform`, `cardinality` or `skewed:<eps>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Profile::Uniform),
            "cardinality" => Ok(Profile::Cardinality),
            _ => {
                let e = s.strip_prefix("skewed:").or_else(|| s.strip_prefix("skewed=")).ok_or(format!("unknown profile `{s}`"))?;
                crate::rational::parse_q(e).map(Profile::Skewed).map_err(|e| e.to_string())
            }
        }
    }
}

/// Seeded random instance; skewed items have a side of at most `eps N`.
pub fn gen_random(profile: Profile, n_items: usize, n: i64, seed: u64, rotation_allowed: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = (0..n_items)
        .map(|i| {
            let mut w = rng.gen_range(1..=n);
            let mut h = rng.gen_range(1..=n);
            let p = match profile {
                Profile::Cardinality => 1,
                _ => rng.gen_range(1..=100),
            };
            if let Profile::Skewed(e) = profile {
                let cap = floor_mul(e, n).max(1);
                if rng.gen_bool(0.5) {
                    w = rng.gen_range(1..=cap);
                } else {
                    h = rng.gen_range(1..=cap);
                }
            }
            Item::new(format!("i{i}"), w, h, p)
        })
        .collect();
    Instance::new(n, rotation_allowed, items)
}

/// A random yes-instance: `k` values split `m | k-m` with equal sums plus
/// `extra` noise values.
pub fn gen_yes_instance(k: usize, max_value: i64, extra: usize, seed: u64) -> (PartSumInstance, EqualSplit) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = rng.gen_range(1..k);
        let left: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=max_value)).collect();
        let mut right: Vec<i64> = (0..k - m - 1).map(|_| rng.gen_range(1..=max_value)).collect();
        let last = left.iter().sum::<i64>() - right.iter().sum::<i64>();
        if last < 1 || last > max_value {
            continue;
        }
        right.push(last);
        let mut values: Vec<i64> = left.iter().chain(right.iter()).copied().collect();
        values.extend((0..extra).map(|_| rng.gen_range(1..=max_value)));
        let mut order: Vec<usize> = (0..values.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let shuffled: Vec<i64> = order.iter().map(|&i| values[i]).collect();
        let split = EqualSplit { values: left.into_iter().chain(right).collect(), m };
        return (PartSumInstance { values: shuffled, k }, split);
    }
}

/// Multiset equality of two value lists.
pub fn same_multiset(a: &[i64], b: &[i64]) -> bool {
    let mut c: HashMap<i64, i64> = HashMap::new();
    for v in a {
        *c.entry(*v).or_default() += 1;
    }
    for v in b {
        *c.entry(*v).or_default() -= 1;
    }
    c.values().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_examples() {
        let r = reduce_ksum_to_partsum(&[-2, 2], 3).unwrap();
        assert_eq!(r.values, vec![5, 9, 14]);
        let r = reduce_ksum_to_partsum(&[1], 3).unwrap();
        assert_eq!(r.values, vec![5, 8]);
        let r = reduce_ksum_to_partsum(&[-1, 2, -1], 3).unwrap();
        assert_eq!(r.values, vec![6, 9, 6, 14]);
        assert!(reduce_ksum_to_partsum(&[1], 4).is_err());
    }

    #[test]
    fn hardness_dimensions() {
        let ps = PartSumInstance { values: vec![1], k: 9 };
        let inst = gen_hardness_2dkr(&ps, true, false).unwrap();
        assert_eq!(inst.n, 13122);
        assert_eq!((inst.items[0].w, inst.items[0].h), (1459, 6560));
        assert_eq!((inst.items[1].w, inst.items[1].h), (1457, 6562));
        assert!(inst.items.iter().all(|i| (i.w + i.h) * 18 == 11 * 13122));
        assert_eq!(gen_hardness_2dkr(&PartSumInstance { values: vec![1], k: 5 }, true, false), Err(LabError::KTooSmall(5)));
        assert!(gen_hardness_2dkr(&PartSumInstance { values: vec![1], k: 5 }, true, true).is_ok());
    }

    #[test]
    fn yes_packing_round_trip() {
        let ps = PartSumInstance { values: vec![36, 1, 2, 3, 4, 5, 6, 7, 8, 11], k: 9 };
        let split = EqualSplit { values: vec![36, 1, 2, 3, 4, 5, 6, 7, 8], m: 1 };
        let inst = gen_hardness_2dkr(&ps, false, false).unwrap();
        let p = construct_yes_packing(&ps, &split).unwrap();
        assert_eq!(p.len(), 18);
        assert!(validate_packing(&inst, &p).valid, "{:?}", validate_packing(&inst, &p).violations);
        let back = extract_partition(&inst, &p, 9).unwrap();
        assert!(back.is_balanced());
        assert!(same_multiset(&back.values, &split.values));
    }

    #[test]
    fn yes_packing_with_m_k_minus_one() {
        let ps = PartSumInstance { values: vec![1, 1, 1, 1, 1, 1, 1, 1, 8], k: 9 };
        let split = EqualSplit { values: vec![1, 1, 1, 1, 1, 1, 1, 1, 8], m: 8 };
        let inst = gen_hardness_2dkr(&ps, false, false).unwrap();
        let p = construct_yes_packing(&ps, &split).unwrap();
        assert!(validate_packing(&inst, &p).valid);
        assert!(extract_partition(&inst, &p, 9).unwrap().is_balanced());
    }

    #[test]
    fn transposed_packing_extracts_the_same_split() {
        let ps = PartSumInstance { values: vec![36, 1, 2, 3, 4, 5, 6, 7, 8], k: 9 };
        let split = EqualSplit { values: vec![36, 1, 2, 3, 4, 5, 6, 7, 8], m: 1 };
        let inst = gen_hardness_2dkr(&ps, true, false).unwrap();
        let p = construct_yes_packing(&ps, &split).unwrap();
        let idx = inst.index();
        let t = Packing::new(
            p.placements
                .iter()
                .map(|pl| {
                    let r = pl.rect(idx[pl.id.as_str()]);
                    Placement::new(pl.id.clone(), r.y, r.x, true)
                })
                .collect(),
        );
        assert!(validate_packing(&inst, &t).valid);
        let a = extract_partition(&inst, &p, 9).unwrap();
        let b = extract_partition(&inst, &t, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn extraction_rejects_short_packings_and_bad_splits() {
        let ps = PartSumInstance { values: vec![36, 1, 2, 3, 4, 5, 6, 7, 8], k: 9 };
        let inst = gen_hardness_2dkr(&ps, false, false).unwrap();
        let split = EqualSplit { values: vec![36, 1, 2, 3, 4, 5, 6, 7, 8], m: 1 };
        let mut p = construct_yes_packing(&ps, &split).unwrap();
        p.placements.pop();
        assert!(matches!(extract_partition(&inst, &p, 9), Err(LabError::NotExtractable(_))));
        let bad = EqualSplit { values: vec![35, 1, 2, 3, 4, 5, 6, 7, 8], m: 1 };
        assert!(matches!(construct_yes_packing(&ps, &bad), Err(LabError::InvalidSplit(_))));
    }

    #[test]
    fn lowerbound_family_small_cases() {
        let i3 = gen_lowerbound_family(3).unwrap();
        assert_eq!(i3.n, 64);
        let dims: Vec<(&str, i64, i64, i64)> = i3.items.iter().map(|i| (i.id.as_str(), i.w, i.h, i.p)).collect();
        assert_eq!(dims, vec![("H1", 64, 1, 1), ("V1", 16, 3, 1), ("istar", 64, 60, 1)]);
        let p = construct_lowerbound_packing(&i3);
        let at: Vec<(i64, i64)> = p.placements.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(at, vec![(0, 0), (0, 1), (0, 4)]);
        let i5 = gen_lowerbound_family(5).unwrap();
        assert_eq!(i5.n, 512);
        let h2 = i5.item("H2").unwrap();
        let v2 = i5.item("V2").unwrap();
        assert_eq!((h2.w, h2.h, v2.w, v2.h), (448, 2, 128, 5));
        assert_eq!(i5.item("istar").unwrap().p, 2);
        assert!(gen_lowerbound_family(4).is_err());
    }

    #[test]
    fn lowerbound_packings_are_valid() {
        for n in (3..=15).step_by(2) {
            let inst = gen_lowerbound_family(n).unwrap();
            let p = construct_lowerbound_packing(&inst);
            assert!(validate_packing(&inst, &p).valid, "n={n}");
            assert_eq!(p.len(), n);
            assert_eq!(p.profit(&inst), 3 * (n as i64 - 1) / 2);
            assert_eq!(count_symmetric_pairs(&p), (n - 1) / 2);
        }
    }

    #[test]
    fn random_profiles() {
        assert!(gen_random(Profile::Uniform, 0, 100, 1, false).items.is_empty());
        let s = gen_random(Profile::Skewed(Q::new(1, 10)), 200, 100, 3, false);
        assert!(s.items.iter().all(|i| i.w.min(i.h) <= 10));
        assert_eq!(gen_random(Profile::Uniform, 20, 50, 9, true), gen_random(Profile::Uniform, 20, 50, 9, true));
        assert!(gen_random(Profile::Cardinality, 20, 50, 9, true).items.iter().all(|i| i.p == 1));
        assert_eq!("skewed:1/10".parse::<Profile>().unwrap(), Profile::Skewed(Q::new(1, 10)));
    }
}
