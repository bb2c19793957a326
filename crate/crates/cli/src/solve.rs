use std::time::Duration;

use clap::ValueEnum;
use rectpack_core::containers::{solve_container_with, SearchConfig};
use rectpack_core::gap::GapError;
use rectpack_core::greedy::nfdh_oriented;
use rectpack_core::lshape::{solve_lc_star_with, LShape, LcError};
use rectpack_core::model::{Container, Instance, Label, Packing};
use rectpack_core::oracle::{solve_exact, solve_exact_container, OracleLimits};
use rectpack_core::rational::Q;
use rectpack_core::steinberg::steinberg;

use crate::io::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Container,
    #[value(name = "lc_star", alias = "lc-star")]
    LcStar,
    Nfdh,
    Steinberg,
    Oracle,
}

#[derive(Debug, Clone)]
pub struct Params {
    pub c: usize,
    pub eps: Q,
    pub grid: i64,
    /// Candidate container sets for the searches, nodes for the oracle.
    pub budget: u64,
    pub time_ms: Option<u64>,
    pub unit_grid: bool,
}

impl Params {
    fn search(&self) -> SearchConfig {
        SearchConfig { grid: self.grid, ..SearchConfig::default() }
    }

    pub fn limits(&self) -> OracleLimits {
        OracleLimits {
            node_budget: self.budget,
            time_budget: self.time_ms.map(Duration::from_millis),
            unit_grid: self.unit_grid,
            ..OracleLimits::default()
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub packing: Packing,
    pub containers: Vec<Container>,
    pub lshape: Option<LShape>,
    pub profit: i64,
    pub certified: bool,
    /// A budget ran out; `packing` is the best found so far (possibly empty).
    pub exhausted: bool,
}

fn gap_err(e: GapError) -> CliResult<Outcome> {
    match e {
        GapError::StateBudgetExceeded { .. } => Ok(Outcome { exhausted: true, ..Outcome::default() }),
        e => Err(CliError::usage(e.to_string())),
    }
}

pub fn run(inst: &Instance, algo: Algo, p: &Params) -> CliResult<Outcome> {
    let n = inst.n;
    let full = Container::new(0, 0, n, n, Label::Area);
    let budget = p.budget.min(usize::MAX as u64) as usize;
    match algo {
        Algo::Container => match solve_container_with(inst, p.c, p.eps, budget, &p.search()) {
            Ok(s) => Ok(Outcome { profit: s.profit, packing: s.packing, containers: s.containers, ..Outcome::default() }),
            Err(e) => gap_err(e),
        },
        Algo::LcStar => match solve_lc_star_with(inst, p.c, p.eps, budget, &p.search(), 1 << 20) {
            Ok(s) => Ok(Outcome {
                profit: s.profit,
                packing: s.packing,
                containers: s.containers,
                lshape: Some(s.lshape),
                ..Outcome::default()
            }),
            Err(LcError::Gap(e)) => gap_err(e),
            Err(e) => Err(CliError::usage(e.to_string())),
        },
        Algo::Nfdh => {
            let items: Vec<_> = inst.items.iter().map(|i| (i.clone(), inst.rotation_allowed && i.h > i.w)).collect();
            let r = nfdh_oriented(&full, &items);
            let packing = Packing::new(r.placements);
            Ok(Outcome { profit: packing.profit(inst), packing, ..Outcome::default() })
        }
        Algo::Steinberg => {
            let r = steinberg(&full, &inst.items).map_err(|e| CliError::invalid(format!("steinberg: {e}")))?;
            let packing = Packing::new(r.placements);
            Ok(Outcome { profit: packing.profit(inst), packing, ..Outcome::default() })
        }
        Algo::Oracle => {
            let r = solve_exact(inst, &p.limits()).map_err(|e| CliError::usage(e.to_string()))?;
            Ok(Outcome { profit: r.profit, packing: r.packing, certified: r.certified, exhausted: !r.certified, ..Outcome::default() })
        }
    }
}

/// Best packing using at most `c` containers, by exhaustive search.
pub fn run_container_oracle(inst: &Instance, c: usize, p: &Params) -> CliResult<Outcome> {
    let r = solve_exact_container(inst, c, p.eps, &p.limits()).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(Outcome {
        profit: r.profit,
        packing: r.packing,
        containers: r.containers,
        certified: r.certified,
        exhausted: !r.certified,
        lshape: None,
    })
}
