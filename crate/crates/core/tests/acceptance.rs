//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p rectpack-core --test acceptance`.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::panic::AssertUnwindSafe;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rectpack_core::containers::{greedy_baseline, solve_container};
use rectpack_core::corridor::{box_count_bound, process_corridor, Corridor, CorridorKind, Orientation, SubCorridor};
use rectpack_core::gap::{assignment_profit, solve_gap, GapBin, GapInstance, GapItem};
use rectpack_core::greedy::{nfdh, nfdh_oriented, stack_horizontal, stack_vertical};
use rectpack_core::lab::{
    construct_lowerbound_packing, construct_yes_packing, count_symmetric_pairs, extract_partition, gen_hardness_2dkr,
    gen_lowerbound_family, gen_random, gen_yes_instance, same_multiset, Profile,
};
use rectpack_core::lshape::{solve_lc_star, validate_lc_star};
use rectpack_core::model::{validate_in_region, validate_packing, Container, Instance, Item, Label, Packing, Placement, Rect};
use rectpack_core::oracle::{solve_exact, OracleLimits};
use rectpack_core::rational::Q;
use rectpack_core::steinberg::{check_condition, steinberg};
use rectpack_core::transforms::{
    box_to_containers, compact, delete_random_strip, extract_chain, find_free_strip, is_valid_chain, placed_from_packing,
    resource_contraction, shrink_container, split_container, strip_survival_probability, FreeStrip, Mode, PipelineInput,
    PipelineParams, Placed, StripOrientation,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn packing_of(p: &[Placed]) -> Packing {
    Packing::new(p.iter().map(Placed::placement).collect())
}

fn check(inst: &Instance, p: &Packing, what: &str) -> Result<(), String> {
    let r = validate_packing(inst, p);
    if r.valid {
        Ok(())
    } else {
        Err(format!("{what}: {:?}", r.violations.first()))
    }
}

fn random_instance(seed: u64) -> Instance {
    let profile = match seed % 3 {
        0 => Profile::Uniform,
        1 => Profile::Skewed(Q::new(1, 10)),
        _ => Profile::Cardinality,
    };
    let n_items = (seed % 13) as usize;
    let side = 5 + (seed.wrapping_mul(7919) % 196) as i64;
    gen_random(profile, n_items, side, seed, (seed / 3) % 2 == 0)
}

fn flat(inst: &Instance, want_flat: bool) -> Vec<(Item, bool)> {
    inst.items
        .iter()
        .map(|it| (it.clone(), inst.rotation_allowed && ((it.h > it.w) == want_flat)))
        .collect()
}

fn validity_closure() -> Outcome {
    let eps = Q::new(1, 4);
    let mut checked = 0usize;
    let instances = 10_000u64;
    for seed in 0..instances {
        let inst = random_instance(seed);
        let n = inst.n;
        let full = |l| Container::new(0, 0, n, n, l);
        let mut outs: Vec<(String, Packing)> = Vec::new();

        let shelf = Packing::new(nfdh(&full(Label::Area), &inst.items).placements);
        let stack = Packing::new(stack_horizontal(&full(Label::Horizontal), &flat(&inst, true)).placements);
        let row = Packing::new(stack_vertical(&full(Label::Vertical), &flat(&inst, false)).placements);
        let base = greedy_baseline(&inst, eps);
        if let Ok(r) = steinberg(&full(Label::Area), &inst.items) {
            outs.push(("steinberg".into(), Packing::new(r.placements)));
        }
        let oriented = Packing::new(nfdh_oriented(&full(Label::Area), &flat(&inst, true)).placements);
        for (o, name) in [(StripOrientation::Horizontal, "h"), (StripOrientation::Vertical, "v")] {
            outs.push((format!("strip-{name}"), delete_random_strip(&inst, &shelf, o, (n / 10).max(1), seed).0));
            outs.push((format!("strip-base-{name}"), delete_random_strip(&inst, &base, o, (n / 7).max(1), seed).0));
        }

        let stack_items = placed_from_packing(&inst, &stack);
        let row_items = placed_from_packing(&inst, &row);
        let s = shrink_container(&full(Label::Horizontal), &stack_items, eps, Mode::Weighted).map_err(|e| e.to_string())?;
        outs.push(("shrink-h".into(), packing_of(&s.kept)));
        let s = shrink_container(&full(Label::Vertical), &row_items, eps, Mode::Cardinality).map_err(|e| e.to_string())?;
        outs.push(("shrink-v".into(), packing_of(&s.kept)));
        let s = split_container(&full(Label::Horizontal), &stack_items, eps).map_err(|e| e.to_string())?;
        outs.push(("split".into(), packing_of(&s.kept)));
        let b = box_to_containers(&full(Label::Horizontal), &stack_items, Q::new(1, 3)).map_err(|e| e.to_string())?;
        outs.push(("box".into(), packing_of(&b.kept)));
        let bar = Corridor {
            kind: CorridorKind::Open,
            subcorridors: vec![SubCorridor::new(0, 0, n, n, Orientation::Horizontal)],
        };
        if let Ok(c) = process_corridor(&inst, &bar, &stack, Q::new(1, 2), Q::new(1, 8), None) {
            outs.push(("corridor".into(), Packing::new(c.placements)));
        }

        if seed % 10 == 0 {
            let sol = solve_container(&inst, 2, eps, 200).map_err(|e| e.to_string())?;
            let input = PipelineInput {
                instance: inst.clone(),
                containers: sol.containers.clone(),
                placements: sol.packing.placements.clone(),
                thin_items: Vec::new(),
                set_aside: Vec::new(),
                small_items: Vec::new(),
            };
            let mode = if inst.is_cardinality() { Mode::Cardinality } else { Mode::Weighted };
            let params = PipelineParams { eps, eps_large: eps, eps_thin: Q::new(1, 16), mode, mu: None };
            if let Ok(rep) = resource_contraction(&input, &params) {
                outs.push(("pipeline".into(), Packing::new(rep.placements)));
            }
            outs.push(("container".into(), sol.packing));
            let lc = solve_lc_star(&inst, 1, eps, 20).map_err(|e| e.to_string())?;
            outs.push(("lc_star".into(), lc.packing));
            if inst.items.len() <= 7 && n <= 30 {
                let limits = OracleLimits { time_budget: Some(Duration::from_secs(2)), ..OracleLimits::default() };
                let ex = solve_exact(&inst, &limits).map_err(|e| e.to_string())?;
                outs.push(("oracle".into(), ex.packing));
            }
        }

        outs.push(("nfdh".into(), shelf));
        outs.push(("nfdh-oriented".into(), oriented));
        outs.push(("stack".into(), stack));
        outs.push(("row".into(), row));
        outs.push(("baseline".into(), base));
        for (name, p) in &outs {
            check(&inst, p, &format!("seed {seed} {name}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} packings from {instances} instances, 0 violations"))
}

fn nfdh_bound() -> Outcome {
    let mut full = 0;
    for seed in 0..1000u64 {
        let mut r = rng(seed);
        let q = r.gen_range(3..=12i64);
        let p = 1;
        let w = r.gen_range(q..=240);
        let h = r.gen_range(q..=240);
        let (mw, mh) = (w * p / q, h * p / q);
        let count = r.gen_range(1..=(4 * q * q) as usize);
        let items: Vec<Item> =
            (0..count).map(|i| Item::new(format!("i{i}"), r.gen_range(1..=mw), r.gen_range(1..=mh), 1)).collect();
        let region = Container::new(0, 0, w, h, Label::Area);
        let res = nfdh(&region, &items);
        let inst = Instance::new(w.max(h), false, items.clone());
        let pk = Packing::new(res.placements);
        let rep = validate_in_region(&inst, &pk, region.rect());
        if !rep.valid {
            return Err(format!("seed {seed}: {:?}", rep.violations.first()));
        }
        let total: i128 = items.iter().map(|i| i.area() as i128).sum();
        let packed = pk.area(&inst) as i128;
        let (p, q) = (p as i128, q as i128);
        let rhs = (total * q).min((q - 2 * p) * w as i128 * h as i128);
        if packed * q < rhs {
            return Err(format!("seed {seed}: packed area {packed} below min(a(I)={total}, (1-2/{q}) {w}x{h})"));
        }
        if packed == total {
            full += 1;
        }
    }
    Ok(format!("1000 instances, bound exact, {full} packed completely"))
}

fn steinberg_all_packed() -> Outcome {
    let mut done = 0;
    let mut seed = 0u64;
    let mut total_items = 0;
    while done < 1000 {
        seed += 1;
        let mut r = rng(seed);
        let (u, v) = (r.gen_range(2..=120i64), r.gen_range(2..=120i64));
        let (x0, y0) = (r.gen_range(0..=20i64), r.gen_range(0..=20i64));
        let scale = r.gen_range(2..=12i64);
        let mut dims: Vec<(i64, i64)> = Vec::new();
        let mut misses = 0;
        while misses < 6 {
            let d = match r.gen_range(0..10) {
                0 => (r.gen_range(1..=u), r.gen_range(1..=v)),
                1..=3 => (r.gen_range(1..=(u / 3).max(1)), r.gen_range(1..=(v / 3).max(1))),
                _ => (r.gen_range(1..=(u / scale).max(1)), r.gen_range(1..=(v / scale).max(1))),
            };
            dims.push(d);
            if check_condition(u, v, &dims).is_err() {
                dims.pop();
                misses += 1;
            }
        }
        let items: Vec<Item> = dims.iter().enumerate().map(|(i, &(w, h))| Item::new(format!("s{i}"), w, h, 1)).collect();
        let region = Container::new(x0, y0, u, v, Label::Area);
        let res = steinberg(&region, &items).map_err(|e| format!("seed {seed}: {e}"))?;
        if !res.leftovers.is_empty() {
            return Err(format!("seed {seed}: {} leftovers in {u}x{v}", res.leftovers.len()));
        }
        let inst = Instance::new((x0 + u).max(y0 + v), false, items);
        let pk = Packing::new(res.placements);
        let rep = validate_in_region(&inst, &pk, region.rect());
        if !rep.valid || pk.len() != inst.items.len() {
            return Err(format!("seed {seed}: {:?}", rep.violations.first()));
        }
        total_items += pk.len();
        done += 1;
    }
    Ok(format!("1000 instances, {total_items} items, every item packed"))
}

/// Plain enumeration of every assignment, pruned only by capacity.
fn gap_brute(inst: &GapInstance) -> i64 {
    fn go(i: usize, inst: &GapInstance, left: &mut [i64], acc: i64, best: &mut i64) {
        if i == inst.items.len() {
            *best = (*best).max(acc);
            return;
        }
        go(i + 1, inst, left, acc, best);
        let it = &inst.items[i];
        for b in 0..left.len() {
            if let Some(s) = it.sizes[b] {
                if s <= left[b] {
                    left[b] -= s;
                    go(i + 1, inst, left, acc + it.profit, best);
                    left[b] += s;
                }
            }
        }
    }
    let mut left: Vec<i64> = inst.bins.iter().map(|b| b.capacity).collect();
    let mut best = 0;
    go(0, inst, &mut left, 0, &mut best);
    best
}

fn gap_exact() -> Outcome {
    let mut count = 0;
    for k in 1..=3usize {
        for n in 0..=12usize {
            for cap_max in [0i64, 1, 3, 6, 12] {
                for rep in 0..20u64 {
                    let mut r = rng((k as u64) << 40 | (n as u64) << 32 | (cap_max as u64) << 8 | rep);
                    let bins: Vec<GapBin> =
                        (0..k).map(|b| GapBin { id: format!("b{b}"), capacity: r.gen_range(0..=cap_max) }).collect();
                    let items: Vec<GapItem> = (0..n)
                        .map(|i| GapItem {
                            id: format!("g{i}"),
                            profit: r.gen_range(1..=20),
                            sizes: (0..k).map(|_| if r.gen_bool(0.15) { None } else { Some(r.gen_range(1..=13)) }).collect(),
                        })
                        .collect();
                    let inst = GapInstance { bins, items };
                    let sol = solve_gap(&inst).map_err(|e| e.to_string())?;
                    let want = gap_brute(&inst);
                    if assignment_profit(&inst, &sol) != Some(sol.profit) || sol.profit != want {
                        return Err(format!("k={k} n={n} cap<={cap_max} rep {rep}: got {}, want {want}", sol.profit));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances match enumeration"))
}

fn oracle_dominance() -> Outcome {
    let eps = Q::new(1, 10);
    for seed in 0..200u64 {
        let profile = if seed % 2 == 0 { Profile::Uniform } else { Profile::Cardinality };
        let inst = gen_random(profile, 1 + (seed % 8) as usize, 4 + (seed % 13) as i64, seed, seed % 3 == 0);
        let ex = solve_exact(&inst, &OracleLimits::default()).map_err(|e| e.to_string())?;
        if !ex.certified {
            return Err(format!("seed {seed}: oracle not certified"));
        }
        let cont = solve_container(&inst, 2, eps, 2000).map_err(|e| e.to_string())?;
        let greedy = greedy_baseline(&inst, eps).profit(&inst);
        for (name, p) in [("oracle", &ex.packing), ("container", &cont.packing)] {
            check(&inst, p, &format!("seed {seed} {name}"))?;
        }
        if !(ex.profit >= cont.profit && cont.profit >= greedy) {
            return Err(format!("seed {seed}: oracle {} container {} greedy {greedy}", ex.profit, cont.profit));
        }
    }
    Ok("200 instances, oracle >= container >= greedy".into())
}

fn hardness_identities() -> Outcome {
    let mut count = 0;
    for seed in 0..60u64 {
        let k = 9usize;
        let (ps, _) = gen_yes_instance(k, 5 + (seed as i64 * 37) % 500, (seed % 4) as usize, seed);
        let inst = gen_hardness_2dkr(&ps, seed % 2 == 0, false).map_err(|e| e.to_string())?;
        let (n, k) = (inst.n as i128, k as i128);
        let k4 = k.pow(4);
        if inst.items.len() != 2 * ps.values.len() {
            return Err(format!("seed {seed}: {} items", inst.items.len()));
        }
        for it in &inst.items {
            let (w, h) = (it.w as i128, it.h as i128);
            if 2 * k * (w + h) != (k + 2) * n {
                return Err(format!("seed {seed} {}: w+h = {} != (1/2+1/k)N", it.id, w + h));
            }
            let lo_w = k4 * w > (k * k * k - 1) * n && k4 * w < (k * k * k + 1) * n;
            let lo_h = 2 * k4 * h > (k4 - 2) * n && 2 * k4 * h < (k4 + 2) * n;
            if !lo_w || !lo_h {
                return Err(format!("seed {seed} {}: {}x{} outside the width/height windows", it.id, w, h));
            }
            let a = 2 * k4 * w * h;
            if !(a > (k * k * k - 2) * n * n && a < (k * k * k + 2) * n * n) {
                return Err(format!("seed {seed} {}: area {} outside the window", it.id, w * h));
            }
        }
        let mut areas: Vec<i128> = inst.items.iter().map(|i| i.area() as i128).collect();
        areas.sort_unstable();
        let need = 2 * ps.k + 1;
        if areas.len() >= need && areas[..need].iter().sum::<i128>() <= n * n {
            return Err(format!("seed {seed}: {need} smallest items fit by area"));
        }
        count += 1;
    }
    Ok(format!("{count} instances, identities exact"))
}

fn hardness_round_trip() -> Outcome {
    for seed in 0..100u64 {
        let (ps, split) = gen_yes_instance(9, 10 + (seed as i64 * 13) % 300, (seed % 3) as usize, seed);
        let inst = gen_hardness_2dkr(&ps, true, false).map_err(|e| e.to_string())?;
        let pk = construct_yes_packing(&ps, &split).map_err(|e| e.to_string())?;
        check(&inst, &pk, &format!("seed {seed}"))?;
        if pk.len() != 2 * ps.k {
            return Err(format!("seed {seed}: {} placements", pk.len()));
        }
        let back = extract_partition(&inst, &pk, ps.k).map_err(|e| format!("seed {seed}: {e}"))?;
        let (a, b) = back.values.split_at(back.m);
        let chosen: Vec<i64> = split.values.clone();
        if a.iter().sum::<i64>() != b.iter().sum::<i64>() || !same_multiset(&back.values, &chosen) {
            return Err(format!("seed {seed}: extracted {:?} from {:?}", back, ps.values));
        }
    }
    Ok("100 yes-instances, k = 9".into())
}

fn lowerbound_family() -> Outcome {
    let mut solves = 0;
    for n in (3..=15usize).step_by(2) {
        let inst = gen_lowerbound_family(n).map_err(|e| e.to_string())?;
        let pk = construct_lowerbound_packing(&inst);
        check(&inst, &pk, &format!("n={n}"))?;
        if pk.len() != inst.items.len() || pk.profit(&inst) != 3 * (n as i64 - 1) / 2 {
            return Err(format!("n={n}: {} placed, profit {}", pk.len(), pk.profit(&inst)));
        }
        for c in 1..=4usize {
            let sol = solve_container(&inst, c, Q::new(1, 10), 2000).map_err(|e| e.to_string())?;
            check(&inst, &sol.packing, &format!("n={n} c={c}"))?;
            let s = count_symmetric_pairs(&sol.packing);
            if s > c {
                return Err(format!("n={n} c={c}: {s} symmetric pairs"));
            }
            solves += 1;
        }
    }
    Ok(format!("7 packings exact, {solves} container solves with s <= c"))
}

fn guillotine(r: &mut ChaCha8Rng, rect: Rect, depth: u32, out: &mut Vec<Rect>) {
    const MIN: i64 = 20;
    let can_v = rect.w >= 2 * MIN;
    let can_h = rect.h >= 2 * MIN;
    if depth == 0 || (!can_v && !can_h) || r.gen_bool(0.2) {
        out.push(rect);
        return;
    }
    if can_v && (!can_h || r.gen_bool(0.5)) {
        let cut = r.gen_range(MIN..=rect.w - MIN);
        guillotine(r, Rect::new(rect.x, rect.y, cut, rect.h), depth - 1, out);
        guillotine(r, Rect::new(rect.x + cut, rect.y, rect.w - cut, rect.h), depth - 1, out);
    } else {
        let cut = r.gen_range(MIN..=rect.h - MIN);
        guillotine(r, Rect::new(rect.x, rect.y, rect.w, cut), depth - 1, out);
        guillotine(r, Rect::new(rect.x, rect.y + cut, rect.w, rect.h - cut), depth - 1, out);
    }
}

/// Labelled thick containers: horizontal ones have height at least `thick`
/// and width at least `long` (they hold horizontal items), vertical ones the
/// transpose.
fn thick_config(seed: u64, n: i64, thick: i64, long: i64) -> Vec<Container> {
    let mut r = rng(seed);
    let mut leaves = Vec::new();
    if seed % 4 == 3 {
        // free placement by rejection
        for _ in 0..r.gen_range(1..40) {
            let (w, h) = (r.gen_range(1..=n / 2), r.gen_range(1..=n / 2));
            let rc = Rect::new(r.gen_range(0..=n - w), r.gen_range(0..=n - h), w, h);
            if leaves.iter().all(|o: &Rect| !o.overlaps(&rc)) {
                leaves.push(rc);
            }
        }
    } else {
        guillotine(&mut r, Rect::new(0, 0, n, n), 8, &mut leaves);
    }
    let mut out = Vec::new();
    for mut rc in leaves {
        if r.gen_bool(0.3) {
            // leave slack inside the cell
            let w = r.gen_range(1..=rc.w);
            let h = r.gen_range(1..=rc.h);
            rc = Rect::new(rc.x + r.gen_range(0..=rc.w - w), rc.y + r.gen_range(0..=rc.h - h), w, h);
        }
        let labels: Vec<Label> = [(Label::Horizontal, rc.h, rc.w), (Label::Vertical, rc.w, rc.h)]
            .into_iter()
            .filter(|&(_, d, e)| d >= thick && e >= long)
            .map(|(l, _, _)| l)
            .collect();
        if labels.is_empty() || r.gen_bool(0.05) {
            continue;
        }
        out.push(Container::from_rect(rc, labels[r.gen_range(0..labels.len())]));
    }
    out
}

fn free_strip() -> Outcome {
    let n = 1000;
    let eps = Q::new(1, 10);
    let eps_c_large = Q::new(1, 10);
    let eps_large = Q::new(1, 5);
    let thick = (eps_c_large * n).ceil().to_integer();
    let long = (eps_large * n).ceil().to_integer();
    let t = (eps * eps_c_large * n).ceil().to_integer();
    let (mut top, mut right, mut chains) = (0, 0, 0);
    for seed in 0..10_000u64 {
        let cs = thick_config(seed, n, thick, long);
        let mut shrunk = Vec::with_capacity(cs.len());
        for c in &cs {
            let s = shrink_container(c, &[], eps, Mode::Weighted).map_err(|e| e.to_string())?;
            shrunk.push(s.container);
        }
        let mut contents = vec![Vec::new(); shrunk.len()];
        compact(&mut shrunk, &mut contents);
        match find_free_strip(&shrunk, n, t) {
            FreeStrip::Neither => return Err(format!("seed {seed}: both strips blocked ({} containers)", cs.len())),
            FreeStrip::Top => top += 1,
            FreeStrip::Right => {
                right += 1;
                match extract_chain(&shrunk, n, t) {
                    Ok(Some(chain)) if is_valid_chain(&shrunk, &chain, n, t) => chains += 1,
                    other => return Err(format!("seed {seed}: top blocked but chain is {other:?}")),
                }
            }
        }
    }
    Ok(format!("10000 configurations: {top} top free, {right} right free, {chains} chains valid"))
}

struct CorridorCase {
    name: String,
    inst: Instance,
    corr: Corridor,
    packing: Packing,
    max_bends: Option<usize>,
}

fn fill_corridor(r: &mut ChaCha8Rng, subs: &[SubCorridor], tries: usize) -> (Vec<Item>, Vec<Placement>) {
    let mut rects: Vec<Rect> = Vec::new();
    let mut items = Vec::new();
    let mut pls = Vec::new();
    for _ in 0..tries {
        let s = subs[r.gen_range(0..subs.len())];
        let (long, short) = match s.orientation {
            Orientation::Horizontal => (s.w, s.h),
            Orientation::Vertical => (s.h, s.w),
        };
        let b = r.gen_range(1..=short);
        let a = r.gen_range(b.min(long)..=long).max(b);
        if a > long {
            continue;
        }
        let (w, h) = match s.orientation {
            Orientation::Horizontal => (a, b),
            Orientation::Vertical => (b, a),
        };
        let rc = Rect::new(s.x + r.gen_range(0..=s.w - w), s.y + r.gen_range(0..=s.h - h), w, h);
        if rects.iter().any(|o| o.overlaps(&rc)) {
            continue;
        }
        let id = format!("c{}", items.len());
        items.push(Item::new(id.clone(), w, h, r.gen_range(1..=9)));
        pls.push(Placement::new(id, rc.x, rc.y, false));
        rects.push(rc);
    }
    (items, pls)
}

fn corridor_cases() -> Vec<CorridorCase> {
    use Orientation::{Horizontal as H, Vertical as V};
    let mut cases = Vec::new();
    let hand: Vec<(&str, CorridorKind, Vec<SubCorridor>)> = vec![
        ("bar", CorridorKind::Open, vec![SubCorridor::new(0, 0, 64, 16, H)]),
        ("l", CorridorKind::Open, vec![SubCorridor::new(0, 0, 64, 12, H), SubCorridor::new(52, 0, 12, 64, V)]),
        (
            "ring",
            CorridorKind::Closed,
            vec![
                SubCorridor::new(0, 0, 64, 10, H),
                SubCorridor::new(54, 0, 10, 64, V),
                SubCorridor::new(0, 54, 64, 10, H),
                SubCorridor::new(0, 0, 10, 64, V),
            ],
        ),
    ];
    for (i, (name, kind, subs)) in hand.into_iter().enumerate() {
        let (items, pls) = fill_corridor(&mut rng(900 + i as u64), &subs, 60);
        let max_bends = (kind == CorridorKind::Closed).then_some(4);
        cases.push(CorridorCase {
            name: name.into(),
            inst: Instance::new(64, false, items),
            corr: Corridor { kind, subcorridors: subs },
            packing: Packing::new(pls),
            max_bends,
        });
    }
    for seed in 0..120u64 {
        let mut r = rng(seed);
        let n = 500;
        let subs = if seed % 4 == 0 {
            // ring of four arms
            let th = r.gen_range(8..=60);
            let (x0, y0) = (r.gen_range(0..=40), r.gen_range(0..=40));
            let (w, h) = (r.gen_range(2 * th + 1..=n - x0), r.gen_range(2 * th + 1..=n - y0));
            vec![
                SubCorridor::new(x0, y0, w, th, H),
                SubCorridor::new(x0 + w - th, y0, th, h, V),
                SubCorridor::new(x0, y0 + h - th, w, th, H),
                SubCorridor::new(x0, y0, th, h, V),
            ]
        } else {
            // staircase: right along H arms, up along V arms
            let arms = 1 + (seed % 5) as usize;
            let mut subs = Vec::new();
            let (mut x, mut y) = (0i64, 0i64);
            let mut o = if r.gen_bool(0.5) { H } else { V };
            for _ in 0..arms {
                let th = r.gen_range(6..=30);
                // long enough that arms two apart never meet
                let len = r.gen_range(62..=140);
                let s = match o {
                    H => SubCorridor::new(x, y, len, th, H),
                    V => SubCorridor::new(x, y, th, len, V),
                };
                subs.push(s);
                // the next arm starts at the far end, overlapping this one
                match o {
                    H => x = s.x + s.w - r.gen_range(1..=th.min(s.w)),
                    V => y = s.y + s.h - r.gen_range(1..=th.min(s.h)),
                }
                o = if o == H { V } else { H };
            }
            subs
        };
        let (items, pls) = fill_corridor(&mut r, &subs, 80);
        let kind = if seed % 4 == 0 { CorridorKind::Closed } else { CorridorKind::Open };
        cases.push(CorridorCase {
            name: format!("gen-{seed}"),
            inst: Instance::new(n, seed % 3 == 0, items),
            corr: Corridor { kind, subcorridors: subs },
            packing: Packing::new(pls),
            max_bends: Some(8),
        });
    }
    cases
}

fn corridor_conservation() -> Outcome {
    let eps = Q::new(1, 4);
    let eps_thin = Q::new(1, 16);
    let cases = corridor_cases();
    let mut items = 0;
    for c in &cases {
        check(&c.inst, &c.packing, &format!("{} input", c.name))?;
        let out = process_corridor(&c.inst, &c.corr, &c.packing, eps, eps_thin, c.max_bends)
            .map_err(|e| format!("{}: {e}", c.name))?;
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for id in out
            .placements
            .iter()
            .map(|p| &p.id)
            .chain(&out.thin_items)
            .chain(&out.killed_items)
            .chain(&out.deleted_items)
        {
            *seen.entry(id.clone()).or_default() += 1;
        }
        let want: HashSet<&str> = c.packing.ids();
        if seen.len() != want.len() || seen.iter().any(|(id, &k)| k != 1 || !want.contains(id.as_str())) {
            return Err(format!("{}: {} items in, accounting {:?}", c.name, want.len(), seen));
        }
        check(&c.inst, &Packing::new(out.placements.clone()), &c.name)?;
        let bound = BigRational::from_integer(BigInt::from(2 * c.corr.area()))
            * BigRational::new(BigInt::from(*eps_thin.numer()), BigInt::from(*eps_thin.denom()));
        if BigRational::from_integer(BigInt::from(out.thin_area)) > bound {
            return Err(format!("{}: thin area {} above 2 eps_thin a(corridor)", c.name, out.thin_area));
        }
        let boxes = out.boxes.len() as u128;
        if boxes > box_count_bound(eps, eps_thin, c.corr.bends()) {
            return Err(format!("{}: {boxes} boxes", c.name));
        }
        items += want.len();
    }
    Ok(format!("{} corridors, {items} items accounted once each", cases.len()))
}

fn lc_star_rules() -> Outcome {
    let eps = Q::new(1, 4);
    let mut tiny = 0;
    for seed in 0..150u64 {
        let profile = if seed % 2 == 0 { Profile::Uniform } else { Profile::Skewed(Q::new(1, 8)) };
        let n_items = 1 + (seed % 8) as usize;
        let inst = gen_random(profile, n_items, 8 + (seed % 17) as i64, seed, seed % 3 != 0);
        let c = 1 + (seed % 2) as usize;
        let sol = solve_lc_star(&inst, c, eps, 200).map_err(|e| e.to_string())?;
        let rep = validate_lc_star(&inst, &sol.packing, &sol.lshape, &sol.containers, eps);
        if !rep.valid {
            return Err(format!("seed {seed}: {:?}", rep.violations.first()));
        }
        if n_items <= 5 {
            let cont = solve_container(&inst, c, eps, 200).map_err(|e| e.to_string())?;
            if sol.profit < cont.profit {
                return Err(format!("seed {seed}: L&C* {} below container {}", sol.profit, cont.profit));
            }
            tiny += 1;
        }
    }
    Ok(format!("150 solutions valid, {tiny} tiny comparisons"))
}

fn strip_survival() -> Outcome {
    let n = 100_000;
    let eps = Q::new(1, 10);
    let t = (eps * n).to_integer();
    // an item of height eps N well inside the knapsack
    let (pos, len) = (40_000, t);
    let inst = Instance::new(n, false, vec![Item::new("x", n / 2, len, 1)]);
    let pk = Packing::new(vec![Placement::new("x", 0, pos, false)]);
    let seeds = 100_000u64;
    let survived = (0..seeds)
        .filter(|&s| delete_random_strip(&inst, &pk, StripOrientation::Horizontal, t, s).0.len() == 1)
        .count() as f64;
    let emp = survived / seeds as f64;
    let exact = strip_survival_probability(n, t, pos, len).to_f64().unwrap();
    let e = eps.to_f64().unwrap();
    let analytic = 1.0 - 2.0 * e / (1.0 - e);
    let se = (exact * (1.0 - exact) / seeds as f64).sqrt();
    let z_exact = (emp - exact) / se;
    let z_analytic = (emp - analytic) / se;
    let detail = format!("empirical {emp:.5}, analytic {analytic:.5} (z={z_analytic:.2}), exact {exact:.5} (z={z_exact:.2})");
    if z_analytic.abs() <= 3.0 && z_exact.abs() <= 3.0 && BigRational::one() >= strip_survival_probability(n, t, pos, len) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "validity closure", limit: Duration::from_secs(300), run: validity_closure },
    Criterion { id: 2, name: "NFDH area bound", limit: Duration::from_secs(60), run: nfdh_bound },
    Criterion { id: 3, name: "Steinberg packs everything", limit: Duration::from_secs(120), run: steinberg_all_packed },
    Criterion { id: 4, name: "GAP exactness", limit: Duration::from_secs(180), run: gap_exact },
    Criterion { id: 5, name: "oracle dominance", limit: Duration::from_secs(600), run: oracle_dominance },
    Criterion { id: 6, name: "hardness identities", limit: Duration::from_secs(60), run: hardness_identities },
    Criterion { id: 7, name: "hardness round trip", limit: Duration::from_secs(120), run: hardness_round_trip },
    Criterion { id: 8, name: "lower-bound family", limit: Duration::from_secs(300), run: lowerbound_family },
    Criterion { id: 9, name: "free strip after shrink and compaction", limit: Duration::from_secs(300), run: free_strip },
    Criterion { id: 10, name: "corridor conservation", limit: Duration::from_secs(120), run: corridor_conservation },
    Criterion { id: 11, name: "L&C* rules", limit: Duration::from_secs(600), run: lc_star_rules },
    Criterion { id: 12, name: "random strip survival", limit: Duration::from_secs(120), run: strip_survival },
];

fn main() {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut err = std::io::stderr();
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let res = std::panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let took = start.elapsed();
        let (ok, detail) = match res {
            Ok(d) if took <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s limit", c.limit.as_secs())),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        writeln!(err, "[{tag}] {:>2} {} ({detail}; {:.1}s)", c.id, c.name, took.as_secs_f64()).unwrap();
    }
    writeln!(err, "acceptance: {failed} failed").unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
