//! Named experiment suites emitting one CSV row per (instance, algorithm).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rectpack_core::lab::{
    construct_lowerbound_packing, construct_yes_packing, count_symmetric_pairs, extract_partition, gen_hardness_2dkr,
    gen_lowerbound_family, gen_random, gen_yes_instance, Profile,
};
use rectpack_core::model::{validate_packing, Instance};
use rectpack_core::rational::Q;

use crate::io::{CliError, CliResult};
use crate::solve::{run, Algo, Params};

pub const HEADER: [&str; 6] = ["instance", "algo", "profit", "oracle_profit", "ratio", "wall_ms"];
pub const SUITES: [&str; 4] = ["empty", "hardness-roundtrip", "lowerbound-sweep", "random-small"];

#[derive(Debug, Clone)]
pub struct Row {
    pub instance: String,
    pub algo: String,
    pub profit: i64,
    pub oracle_profit: Option<i64>,
    pub wall_ms: u128,
}

impl Row {
    pub fn ratio(&self) -> Option<f64> {
        self.oracle_profit.map(|o| if o == 0 { 1.0 } else { self.profit as f64 / o as f64 })
    }

    fn record(&self) -> [String; 6] {
        [
            self.instance.clone(),
            self.algo.clone(),
            self.profit.to_string(),
            self.oracle_profit.map(|o| o.to_string()).unwrap_or_default(),
            self.ratio().map(|r| format!("{r:.4}")).unwrap_or_default(),
            self.wall_ms.to_string(),
        ]
    }
}

type Job = Box<dyn Fn() -> CliResult<Vec<Row>> + Send + Sync>;

pub struct SuiteConfig {
    pub c: usize,
    pub seed: u64,
    pub count: usize,
    pub eps: Q,
}

fn hardness_roundtrip(cfg: &SuiteConfig) -> Vec<Job> {
    (0..cfg.count)
        .map(|i| {
            let seed = cfg.seed + i as u64;
            Box::new(move || {
                let start = Instant::now();
                let (ps, split) = gen_yes_instance(9, 40, 2, seed);
                let inst = gen_hardness_2dkr(&ps, true, false).map_err(|e| CliError::invalid(e.to_string()))?;
                let packing = construct_yes_packing(&ps, &split).map_err(|e| CliError::invalid(e.to_string()))?;
                if !validate_packing(&inst, &packing).valid {
                    return Err(CliError::invalid(format!("yes packing for seed {seed} is infeasible")));
                }
                let back = extract_partition(&inst, &packing, ps.k).map_err(|e| CliError::invalid(e.to_string()))?;
                let ok = back.is_balanced();
                Ok(vec![Row {
                    instance: format!("hardness-k9-s{seed}"),
                    algo: "yes_packing+extract".into(),
                    profit: if ok { packing.profit(&inst) } else { 0 },
                    // no 2k+1 items fit, so 2k is optimal
                    oracle_profit: Some(2 * ps.k as i64),
                    wall_ms: start.elapsed().as_millis(),
                }])
            }) as Job
        })
        .collect()
}

fn lowerbound_sweep(cfg: &SuiteConfig) -> Vec<Job> {
    let (c, eps) = (cfg.c, cfg.eps);
    (3..=15)
        .step_by(2)
        .map(|n| {
            Box::new(move || {
                let inst = gen_lowerbound_family(n).map_err(|e| CliError::invalid(e.to_string()))?;
                let opt = construct_lowerbound_packing(&inst).profit(&inst);
                let start = Instant::now();
                let params = Params { c, eps, grid: 16, budget: 2000, time_ms: None, unit_grid: false };
                let out = run(&inst, Algo::Container, &params)?;
                if count_symmetric_pairs(&out.packing) > c {
                    return Err(CliError::invalid(format!("n={n}: more symmetric pairs than containers")));
                }
                Ok(vec![Row {
                    instance: format!("lowerbound-n{n}"),
                    algo: format!("container-c{c}"),
                    profit: out.profit,
                    oracle_profit: Some(opt),
                    wall_ms: start.elapsed().as_millis(),
                }])
            }) as Job
        })
        .collect()
}

fn random_small(cfg: &SuiteConfig) -> Vec<Job> {
    let (c, eps) = (cfg.c, cfg.eps);
    (0..cfg.count)
        .map(|i| {
            let seed = cfg.seed + i as u64;
            Box::new(move || {
                let inst: Instance = gen_random(Profile::Uniform, 2 + (seed % 7) as usize, 8 + (seed % 9) as i64, seed, seed % 2 == 0);
                let name = format!("random-s{seed}");
                let base = Params { c, eps, grid: 16, budget: 50_000_000, time_ms: None, unit_grid: false };
                let oracle = run(&inst, Algo::Oracle, &base)?;
                let opt = oracle.certified.then_some(oracle.profit);
                let mut rows = Vec::new();
                for algo in [Algo::Nfdh, Algo::Container, Algo::LcStar] {
                    let start = Instant::now();
                    let p = Params { budget: 2000, ..base.clone() };
                    let out = run(&inst, algo, &p)?;
                    rows.push(Row {
                        instance: name.clone(),
                        algo: format!("{algo:?}").to_lowercase(),
                        profit: out.profit,
                        oracle_profit: opt,
                        wall_ms: start.elapsed().as_millis(),
                    });
                }
                Ok(rows)
            }) as Job
        })
        .collect()
}

pub fn jobs(suite: &str, cfg: &SuiteConfig) -> CliResult<Vec<Job>> {
    match suite {
        "empty" => Ok(Vec::new()),
        "hardness-roundtrip" => Ok(hardness_roundtrip(cfg)),
        "lowerbound-sweep" => Ok(lowerbound_sweep(cfg)),
        "random-small" => Ok(random_small(cfg)),
        other => Err(CliError::usage(format!("unknown suite `{other}` (known: {})", SUITES.join(", ")))),
    }
}

/// Runs jobs on up to `threads` workers; rows come back in job order.
pub fn run_jobs(jobs: Vec<Job>, threads: usize) -> CliResult<Vec<Row>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CliResult<Vec<Row>>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, jobs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = jobs.get(i) else { break };
                let r = job();
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    let mut rows = Vec::new();
    for r in results.into_inner().unwrap() {
        rows.extend(r.expect("every job ran")?);
    }
    Ok(rows)
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).unwrap();
    for r in rows {
        w.write_record(r.record()).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
