//! Sweep evaluation into a result table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{OutputKind, SweepConfig};
use crate::analytics::{asep_closed, asep_quadrature, asymptote, outage, SystemParams};
use crate::error::Result;
use crate::montecarlo::{simulate_outage, simulate_sep, EstimateWithCI, SimPlan};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which configuration produced a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigStamp {
    pub label: String,
    pub sha256: String,
    pub seed: u64,
    /// Compact JSON of the full configuration.
    pub config: String,
}

impl ConfigStamp {
    pub fn of(config: &SweepConfig) -> Self {
        ConfigStamp {
            label: config.label.clone(),
            sha256: config.hash(),
            seed: config.mc().seed(),
            config: serde_json::to_string(config).expect("config serializes"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub version: String,
    pub command: String,
    pub configs: Vec<ConfigStamp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    /// One entry per numeric column; `None` is an empty cell.
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub meta: TableMeta,
    /// Numeric column names, between `label` and `error`.
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl ResultTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, row by row.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// Rows of one curve.
    pub fn curve(&self, label: &str) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.label == label).collect()
    }

    /// Rows where any Monte Carlo column is flagged low-count.
    pub fn low_count_rows(&self) -> Vec<&Row> {
        let flags: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.ends_with("_low_count"))
            .map(|(i, _)| i)
            .collect();
        self.rows
            .iter()
            .filter(|r| flags.iter().any(|&i| r.values[i] == Some(1.0)))
            .collect()
    }
}

const MC_SUFFIXES: [&str; 4] = ["ci_low", "ci_high", "trials", "low_count"];

fn columns_for(outputs: &[OutputKind]) -> Vec<String> {
    let mut cols: Vec<String> = ["x_db", "gamma_bar_ur_db", "gamma_bar_rd_db"]
        .map(String::from)
        .to_vec();
    for o in outputs {
        cols.push(o.column().to_string());
        if o.is_mc() {
            cols.extend(MC_SUFFIXES.iter().map(|s| format!("{}_{s}", o.column())));
        }
    }
    cols
}

/// Evaluates one configuration.
pub fn run_sweep(config: &SweepConfig) -> Result<ResultTable> {
    run_sweeps(std::slice::from_ref(config), "sweep")
}

/// Evaluates several curves into one table; columns are the union of the
/// requested outputs. All points of all curves run in parallel and rows keep
/// curve order, then sweep order.
pub fn run_sweeps(configs: &[SweepConfig], command: &str) -> Result<ResultTable> {
    for c in configs {
        c.validate()?;
    }
    let outputs: Vec<OutputKind> = OutputKind::ALL
        .into_iter()
        .filter(|o| configs.iter().any(|c| c.outputs.contains(o)))
        .collect();
    let columns = columns_for(&outputs);
    let jobs: Vec<(&SweepConfig, f64)> = configs
        .iter()
        .flat_map(|c| c.range_db.points().into_iter().map(move |x| (c, x)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(c, x)| evaluate_point(c, x, &outputs))
        .collect();
    Ok(ResultTable {
        meta: TableMeta {
            version: VERSION.to_string(),
            command: command.to_string(),
            configs: configs.iter().map(ConfigStamp::of).collect(),
        },
        columns,
        rows,
    })
}

struct PointWriter {
    values: Vec<Option<f64>>,
    errors: Vec<String>,
}

impl PointWriter {
    fn number(&mut self, name: &str, v: f64) {
        if v.is_finite() {
            self.values.push(Some(v));
        } else {
            self.values.push(None);
            self.errors.push(format!("{name}: non-finite value {v}"));
        }
    }

    fn scalar(&mut self, name: &str, r: Result<f64>) {
        match r {
            Ok(v) => self.number(name, v),
            Err(e) => {
                self.values.push(None);
                self.errors.push(format!("{name}: {e}"));
            }
        }
    }

    fn estimate(&mut self, name: &str, r: Result<EstimateWithCI>) {
        match r {
            Ok(e) => {
                self.number(name, e.estimate);
                self.values.extend([
                    Some(e.ci_low),
                    Some(e.ci_high),
                    Some(e.trials as f64),
                    Some(if e.low_count { 1.0 } else { 0.0 }),
                ]);
            }
            Err(err) => {
                self.values.extend([None; 5]);
                self.errors.push(format!("{name}: {err}"));
            }
        }
    }

    fn skip(&mut self, o: OutputKind) {
        let width = if o.is_mc() { 5 } else { 1 };
        self.values.extend(std::iter::repeat_n(None, width));
    }
}

fn mc_plan(config: &SweepConfig, params: SystemParams, predicted: impl FnOnce() -> Result<f64>) -> SimPlan {
    let mc = config.mc();
    let mut plan = mc.plan(params);
    if mc.min_events.is_some() {
        if let Ok(p) = predicted() {
            plan.trials = mc.trials_for(p);
        }
    }
    plan
}

fn evaluate_point(config: &SweepConfig, x_db: f64, outputs: &[OutputKind]) -> Row {
    let mut w = PointWriter {
        values: vec![Some(x_db)],
        errors: vec![],
    };
    let params = match config.params_at(x_db) {
        Ok(p) => p,
        Err(e) => {
            w.values.resize(columns_for(outputs).len(), None);
            return Row {
                label: config.label.clone(),
                values: w.values,
                error: Some(e.to_string()),
            };
        }
    };
    let (ur_db, rd_db) = config.snrs_db_at(x_db);
    w.values.push(Some(ur_db));
    w.values.push(Some(rd_db));
    for &o in outputs {
        if !config.outputs.contains(&o) {
            w.skip(o);
            continue;
        }
        let name = o.column();
        match o {
            OutputKind::OutageAnalytic => w.scalar(name, outage(&params)),
            OutputKind::OutageAsymptotic => w.scalar(
                name,
                asymptote(&params)
                    .map(|a| a.outage_at(params.rf.gamma_bar_ur, params.fso.gamma_bar_rd)),
            ),
            OutputKind::AsepAnalytic => w.scalar(name, asep_closed(&params)),
            OutputKind::AsepQuad => w.scalar(name, asep_quadrature(&params)),
            OutputKind::OutageMc => {
                let plan = mc_plan(config, params, || outage(&params));
                w.estimate(name, simulate_outage(&plan));
            }
            OutputKind::AsepMc => {
                let plan = mc_plan(config, params, || asep_closed(&params));
                w.estimate(name, simulate_sep(&plan));
            }
        }
    }
    Row {
        label: config.label.clone(),
        values: w.values,
        error: (!w.errors.is_empty()).then(|| w.errors.join("; ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{RangeDb, SweepVariable, SystemConfig};
    use crate::analytics::Modulation;

    fn config(outputs: &[OutputKind]) -> SweepConfig {
        SweepConfig {
            label: "t".into(),
            base: SystemConfig {
                k: 2,
                n: 1,
                gamma_bar_ur_db: 0.0,
                alpha: 4.2,
                beta: 1.4,
                zeta2: 1.1,
                r: 1,
                gamma_bar_rd_db: 30.0,
                gamma_out_db: 0.0,
                modulation: Modulation::BPSK,
            },
            sweep_variable: SweepVariable::GammaUrDb,
            range_db: RangeDb {
                start: 0.0,
                stop: 20.0,
                step: 10.0,
            },
            outputs: outputs.iter().copied().collect(),
            mc: None,
        }
    }

    #[test]
    fn columns_follow_requested_outputs() {
        let t = run_sweep(&config(&[OutputKind::OutageAnalytic])).unwrap();
        assert_eq!(t.columns, ["x_db", "gamma_bar_ur_db", "gamma_bar_rd_db", "outage_analytic"]);
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|r| r.values.len() == t.columns.len()));
    }

    #[test]
    fn point_failures_land_in_error_column() {
        // the threshold underflows to zero: analytic outage is fine, the
        // asymptote is undefined
        let mut c = config(&[OutputKind::OutageAnalytic, OutputKind::OutageAsymptotic]);
        c.base.gamma_out_db = -4000.0;
        let t = run_sweep(&c).unwrap();
        assert_eq!(t.error_count(), 3);
        assert!(t.rows[0].error.as_ref().unwrap().starts_with("outage_asymptotic"));
        assert!(t.rows[0].values[3].is_some());
        assert!(t.rows[0].values[4].is_none());
    }

    #[test]
    fn unrequested_outputs_of_other_curves_are_empty() {
        let a = config(&[OutputKind::OutageAnalytic]);
        let mut b = config(&[OutputKind::AsepAnalytic]);
        b.label = "b".into();
        let t = run_sweeps(&[a, b], "test").unwrap();
        assert_eq!(t.rows.len(), 6);
        assert!(t.rows[0].values[4].is_none() && t.rows[0].values[3].is_some());
        assert!(t.rows[5].values[3].is_none() && t.rows[5].values[4].is_some());
        assert_eq!(t.curve("b").len(), 3);
    }
}
