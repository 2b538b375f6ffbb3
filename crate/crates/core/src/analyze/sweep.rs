use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fixed_points::{find_fixed_points, match_branch, reduction_error};
use super::stats::StatsRow;
use crate::config::{GridValue, NetworkSpec, SweepConfig};
use crate::error::{Error, Result};
use crate::graph::{gen_ba, gen_er, gen_sw, load_edge_list_path, Graph};
use crate::models::{assign_edge_types, build_model, sample_recovery_rates, ModelKind};
use crate::reduce::{
    build_effective_system, default_poly_domain, effective_params, fit_subfunctions, ReductionMode,
};
use crate::seeds::{self, stream};
use crate::simulate::{initial_state, integrate_to_steady, InitRegime};

/// One simulation compared against the effective equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: ModelKind,
    pub network: String,
    pub n: usize,
    pub net_seed: u64,
    pub dyn_seed: u64,
    pub p: f64,
    pub mu_e: f64,
    pub weight_mult: f64,
    #[serde(rename = "A_eff")]
    pub a_eff: f64,
    pub e_eff: f64,
    pub init_regime: InitRegime,
    pub x_eff_num: f64,
    pub x_eff_ana: f64,
    pub err: f64,
    pub converged: bool,
    pub t_final: f64,
    pub residual: f64,
    /// False when no stable root existed and the nearest root was used.
    pub ana_stable: bool,
    pub err_degenerate: bool,
    /// Empty unless the cell failed.
    pub error: String,
}

impl SweepRow {
    /// Row counts toward error statistics.
    pub fn is_usable(&self) -> bool {
        self.converged && self.error.is_empty() && self.err.is_finite()
    }
}

const HEADER: [&str; 20] = [
    "model",
    "network",
    "n",
    "net_seed",
    "dyn_seed",
    "p",
    "mu_e",
    "weight_mult",
    "A_eff",
    "e_eff",
    "init_regime",
    "x_eff_num",
    "x_eff_ana",
    "err",
    "converged",
    "t_final",
    "residual",
    "ana_stable",
    "err_degenerate",
    "error",
];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_rows_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.model.to_string(),
            r.network.clone(),
            r.n.to_string(),
            r.net_seed.to_string(),
            r.dyn_seed.to_string(),
            num(r.p),
            num(r.mu_e),
            num(r.weight_mult),
            num(r.a_eff),
            num(r.e_eff),
            r.init_regime.as_str().to_string(),
            num(r.x_eff_num),
            num(r.x_eff_ana),
            num(r.err),
            r.converged.to_string(),
            num(r.t_final),
            num(r.residual),
            r.ana_stable.to_string(),
            r.err_degenerate.to_string(),
            r.error.clone(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_rows_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_stats_csv<W: Write>(out: W, stats: &[StatsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "model",
        "network",
        "p",
        "n",
        "count",
        "excluded",
        "degenerate",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "mean",
        "median_low",
        "median_high",
    ])?;
    for s in stats {
        w.write_record([
            s.model.to_string(),
            s.network.clone(),
            num(s.p),
            s.n.to_string(),
            s.count.to_string(),
            s.excluded.to_string(),
            s.degenerate.to_string(),
            num(s.min),
            num(s.q1),
            num(s.median),
            num(s.q3),
            num(s.max),
            num(s.mean),
            num(s.median_low),
            num(s.median_high),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Graph for size `n` and network seed `seed`, with unit (or file) weights.
pub fn build_network(spec: &NetworkSpec, n: usize, seed: u64) -> Result<Graph> {
    match spec {
        NetworkSpec::Er { c, .. } => gen_er(n, *c, seed),
        NetworkSpec::Ba { m, .. } => gen_ba(n, *m, seed),
        NetworkSpec::Sw {
            k, beta, clamp_k, ..
        } => gen_sw(n, NetworkSpec::sw_degree(*k, n, *clamp_k), *beta, seed),
        NetworkSpec::File {
            path,
            undirected,
            binarize,
        } => {
            let g = load_edge_list_path(path, *undirected)?.graph;
            Ok(if *binarize { g.binarized() } else { g })
        }
    }
}

/// Everything one cell needs besides the sweep-wide settings.
#[derive(Clone, Debug)]
pub struct CellRequest {
    pub graph: Arc<Graph>,
    pub network: String,
    pub net_seed: u64,
    pub dyn_seed: u64,
    pub p: f64,
    pub grid: GridValue,
}

struct Prepared {
    weight_mult: f64,
    a_eff: f64,
    e_eff: f64,
    model: crate::models::SeparableModel,
    fps: Vec<super::FixedPoint>,
}

fn prepare(cfg: &SweepConfig, req: &CellRequest) -> Result<Prepared> {
    let n = req.graph.n_nodes();
    let rates = sample_recovery_rates(
        n,
        cfg.mu_e,
        seeds::derive(&[req.net_seed, req.dyn_seed, stream::RATES]),
    )?;
    let weight_mult = match req.grid {
        GridValue::Multiplier(w) => w,
        GridValue::Ratio(target) => {
            let unit = effective_params(&req.graph, &rates, req.p, None)?;
            target * unit.e_eff / unit.a_eff
        }
    };
    let graph = if weight_mult == 1.0 {
        Arc::clone(&req.graph)
    } else {
        Arc::new(req.graph.scaled(weight_mult)?)
    };
    let types = assign_edge_types(
        &graph,
        req.p,
        seeds::derive(&[req.net_seed, req.dyn_seed, stream::EDGE_TYPES]),
        cfg.edge_types,
    )?;
    let params = effective_params(&graph, &rates, req.p, Some(cfg.model))?;
    let model = build_model(cfg.model, Arc::clone(&graph), rates, types)?;
    let polys = match cfg.mode {
        ReductionMode::Polynomial => {
            let (lo, hi) = default_poly_domain(params.kind, &params);
            Some(fit_subfunctions(&model, cfg.poly_terms, lo, hi)?)
        }
        _ => None,
    };
    let sys = build_effective_system(params, cfg.mode, polys)?;
    let fps = find_fixed_points(&sys, sys.domain(), cfg.root_grid)?;
    Ok(Prepared {
        weight_mult,
        a_eff: params.a_eff,
        e_eff: params.e_eff,
        model,
        fps,
    })
}

fn failed_row(cfg: &SweepConfig, req: &CellRequest, regime: InitRegime, msg: String) -> SweepRow {
    SweepRow {
        model: cfg.model,
        network: req.network.clone(),
        n: req.graph.n_nodes(),
        net_seed: req.net_seed,
        dyn_seed: req.dyn_seed,
        p: req.p,
        mu_e: cfg.mu_e,
        weight_mult: match req.grid {
            GridValue::Multiplier(w) => w,
            GridValue::Ratio(_) => f64::NAN,
        },
        a_eff: f64::NAN,
        e_eff: f64::NAN,
        init_regime: regime,
        x_eff_num: f64::NAN,
        x_eff_ana: f64::NAN,
        err: f64::NAN,
        converged: false,
        t_final: f64::NAN,
        residual: f64::NAN,
        ana_stable: false,
        err_degenerate: false,
        error: msg,
    }
}

/// Simulate one cell from every configured initial regime. Failures are
/// recorded in the `error` column rather than returned.
pub fn run_cell(cfg: &SweepConfig, req: &CellRequest) -> Vec<SweepRow> {
    let prep = match prepare(cfg, req) {
        Ok(p) => p,
        Err(e) => {
            log::warn!(
                "cell n={} seed={} p={}: {e}",
                req.graph.n_nodes(),
                req.net_seed,
                req.p
            );
            return cfg
                .init
                .iter()
                .map(|&r| failed_row(cfg, req, r, e.to_string()))
                .collect();
        }
    };
    let n = req.graph.n_nodes();
    cfg.init
        .iter()
        .map(|&regime| {
            let x0 = initial_state(
                n,
                regime,
                seeds::derive(&[req.net_seed, req.dyn_seed, stream::INITIAL, regime as u64]),
            );
            let mut row = failed_row(cfg, req, regime, String::new());
            row.weight_mult = prep.weight_mult;
            row.a_eff = prep.a_eff;
            row.e_eff = prep.e_eff;
            let ss = match integrate_to_steady(&prep.model, &x0, &cfg.integrator) {
                Ok(ss) => ss,
                Err(e) => {
                    row.error = e.to_string();
                    return row;
                }
            };
            row.x_eff_num = ss.x_eff_num;
            row.converged = ss.converged;
            row.t_final = ss.t_final;
            row.residual = ss.residual;
            match match_branch(ss.x_eff_num, &prep.fps) {
                Ok(b) => {
                    let err = reduction_error(ss.x_eff_num, b.point.x_star);
                    row.x_eff_ana = b.point.x_star;
                    row.ana_stable = !b.unstable_fallback;
                    row.err = err.value;
                    row.err_degenerate = err.degenerate;
                }
                Err(e) => row.error = e.to_string(),
            }
            if !ss.converged {
                log::debug!(
                    "not converged: n={n} seed={} p={} residual={:e}",
                    req.net_seed,
                    req.p,
                    ss.residual
                );
            }
            row
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub non_converged: usize,
    pub errored: usize,
}

/// Run every cell of `cfg` on `jobs` worker threads (0 picks the core count).
/// Rows come back sorted by `(p, n, weight_mult, net_seed, dyn_seed,
/// init_regime)` regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepOutcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let label = cfg.network.to_string();

    let networks: Vec<(u64, std::result::Result<Arc<Graph>, String>)> = match cfg.network.sizes() {
        None => {
            // a file network is loaded once; a load failure is fatal
            let g = Arc::new(build_network(&cfg.network, 0, 0)?);
            cfg.seeds.iter().map(|&s| (s, Ok(Arc::clone(&g)))).collect()
        }
        Some(sizes) => {
            let keys: Vec<(usize, u64)> = sizes
                .iter()
                .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
                .collect();
            pool.install(|| {
                keys.par_iter()
                    .map(|&(n, s)| {
                        let g = build_network(&cfg.network, n, s)
                            .map(Arc::new)
                            .map_err(|e| format!("n={n}: {e}"));
                        (s, g)
                    })
                    .collect()
            })
        }
    };

    let grid = cfg.weight_grid.values();
    let mut requests = Vec::new();
    let mut hard_failures = Vec::new();
    for (net_seed, g) in &networks {
        let g = match g {
            Ok(g) => g,
            Err(msg) => {
                hard_failures.push((*net_seed, msg.clone()));
                continue;
            }
        };
        for &gv in &grid {
            for &p in &cfg.p {
                for &dyn_seed in &cfg.dyn_seeds {
                    requests.push(CellRequest {
                        graph: Arc::clone(g),
                        network: label.clone(),
                        net_seed: *net_seed,
                        dyn_seed,
                        p,
                        grid: gv,
                    });
                }
            }
        }
    }
    log::info!(
        "sweep: {} cells on {} networks",
        requests.len(),
        networks.len()
    );

    let mut rows: Vec<SweepRow> = pool.install(|| {
        requests
            .par_iter()
            .flat_map_iter(|r| run_cell(cfg, r))
            .collect()
    });

    if !hard_failures.is_empty() {
        // graphs that could not be built still get rows, one per cell
        let empty = Arc::new(crate::graph::GraphBuilder::undirected(0).build());
        for (net_seed, msg) in hard_failures {
            for &gv in &grid {
                for &p in &cfg.p {
                    for &dyn_seed in &cfg.dyn_seeds {
                        let req = CellRequest {
                            graph: Arc::clone(&empty),
                            network: label.clone(),
                            net_seed,
                            dyn_seed,
                            p,
                            grid: gv,
                        };
                        for &r in &cfg.init {
                            rows.push(failed_row(cfg, &req, r, msg.clone()));
                        }
                    }
                }
            }
        }
    }

    rows.sort_by(|a, b| {
        a.p.total_cmp(&b.p)
            .then(a.n.cmp(&b.n))
            .then(a.weight_mult.total_cmp(&b.weight_mult))
            .then(a.net_seed.cmp(&b.net_seed))
            .then(a.dyn_seed.cmp(&b.dyn_seed))
            .then(a.init_regime.cmp(&b.init_regime))
    });
    let errored = rows.iter().filter(|r| !r.error.is_empty()).count();
    let non_converged = rows
        .iter()
        .filter(|r| r.error.is_empty() && !r.converged)
        .count();
    Ok(SweepOutcome {
        rows,
        non_converged,
        errored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, WeightGrid};

    fn small_cfg() -> SweepConfig {
        parse_config(
            r#"{
                "model": "sis",
                "network": {"kind": "er", "n": 30, "c": 0.5},
                "mu_e": 1,
                "p": [0.0, 1.0],
                "weight_grid": {"multipliers": [1.0, 2.0]},
                "seeds": [0, 1]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn sweep_shape_and_order() {
        let cfg = small_cfg();
        let out = run_sweep(&cfg, 1).unwrap();
        assert_eq!(out.rows.len(), cfg.expected_rows());
        assert_eq!(out.errored, 0);
        for w in out.rows.windows(2) {
            assert!(w[0].p <= w[1].p);
        }
        for r in &out.rows {
            assert!(r.converged);
            assert!(r.err.is_finite());
            assert_eq!(r.network, "er(c=0.5)");
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let cfg = small_cfg();
        let a = run_sweep(&cfg, 1).unwrap().rows;
        let b = run_sweep(&cfg, 3).unwrap().rows;
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.x_eff_num.to_bits(), y.x_eff_num.to_bits());
            assert_eq!(x.err.to_bits(), y.err.to_bits());
        }
    }

    #[test]
    fn ratio_grid_hits_target() {
        let mut cfg = small_cfg();
        cfg.weight_grid = WeightGrid::Ratio {
            lo: 0.5,
            hi: 4.0,
            points: 2,
        };
        cfg.p = vec![1.0];
        let out = run_sweep(&cfg, 1).unwrap();
        for r in &out.rows {
            let ratio = r.a_eff / r.e_eff;
            assert!(
                (ratio - 0.5).abs() < 1e-9 || (ratio - 4.0).abs() < 1e-9,
                "{ratio}"
            );
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = run_sweep(&small_cfg(), 1).unwrap().rows;
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(
            text.starts_with("model,network,n,net_seed,dyn_seed,p,mu_e,weight_mult,A_eff,e_eff,")
        );
        // the network label contains '=', and a comma gets quoted
        let back = read_rows_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn failed_cells_are_recorded() {
        let mut cfg = small_cfg();
        cfg.root_grid = 16;
        cfg.init = vec![InitRegime::Low];
        let req = CellRequest {
            graph: Arc::new(crate::graph::GraphBuilder::undirected(3).build()),
            network: "empty".into(),
            net_seed: 0,
            dyn_seed: 0,
            p: 0.5,
            grid: GridValue::Multiplier(1.0),
        };
        let rows = run_cell(&cfg, &req);
        assert_eq!(rows.len(), 1);
        assert!(!rows[0].error.is_empty());
        assert!(rows[0].err.is_nan());
    }
}
