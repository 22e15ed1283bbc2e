//! Bandwidth sweeps and single-bandwidth comparisons of all schemes.

use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::ModelError;
use crate::oracle_baselines::{
    df_search, equal_bandwidth_search, fixed_placement_search, oracle_search, GridSpec,
};
use crate::penalty_solver::{run, SolveStatus};
use crate::system_model::DesignPoint;

/// One bandwidth of a sweep. Rates are bits/s; an empty rate means the
/// scheme had no feasible point (see the matching status column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SweepRow {
    pub W: f64,
    pub eta_penalty: Option<f64>,
    pub eta_oracle: Option<f64>,
    pub eta_equal_bw: Option<f64>,
    pub eta_fixed_place: Option<f64>,
    pub eta_df: Option<f64>,
    pub alpha_br_opt: Option<f64>,
    pub d_br_opt: Option<f64>,
    pub alpha_br_oracle: Option<f64>,
    pub d_br_oracle: Option<f64>,
    pub zeta: Option<f64>,
    pub status_penalty: String,
    pub status_oracle: String,
    pub status_equal_bw: String,
    pub status_fixed_place: String,
    pub status_df: String,
}

pub const SWEEP_HEADER: [&str; 16] = [
    "W",
    "eta_penalty",
    "eta_oracle",
    "eta_equal_bw",
    "eta_fixed_place",
    "eta_df",
    "alpha_br_opt",
    "d_br_opt",
    "alpha_br_oracle",
    "d_br_oracle",
    "zeta",
    "status_penalty",
    "status_oracle",
    "status_equal_bw",
    "status_fixed_place",
    "status_df",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub w_min: f64,
    pub w_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Grid of the two-dimensional searches (oracle, DF).
    pub grid: GridSpec,
    /// Grid of the one-dimensional baselines.
    pub line: GridSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            w_min: 1e5,
            w_max: 1e7,
            points: 20,
            spacing: Spacing::Log,
            grid: GridSpec::square(1001),
            line: GridSpec::line(10001),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.w_min > 0.0 && self.w_min.is_finite()) {
            return Err(ModelError::invalid("w_min", "must be > 0"));
        }
        if !(self.w_max >= self.w_min && self.w_max.is_finite()) {
            return Err(ModelError::invalid("w_max", "must be >= w_min"));
        }
        if self.points < 2 {
            return Err(ModelError::invalid("points", "need at least 2"));
        }
        self.grid.validate()?;
        self.line.validate()
    }

    /// Bandwidths in increasing order; both endpoints are hit exactly.
    pub fn bandwidths(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.w_min;
                }
                if i == n - 1 {
                    return self.w_max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Log => (self.w_min.ln() + t * (self.w_max / self.w_min).ln()).exp(),
                    Spacing::Linear => self.w_min + t * (self.w_max - self.w_min),
                }
            })
            .collect()
    }
}

fn grid_status(found: bool) -> String {
    if found { "ok" } else { "infeasible" }.to_string()
}

/// Evaluates every scheme at the bandwidth `w`; failures land in the status columns.
pub fn sweep_row(cfg: &Config, w: f64, grid: &GridSpec, line: &GridSpec) -> SweepRow {
    let p = cfg.system.with_bandwidth(w);
    let fit = &cfg.fit;
    let (eta_penalty, alpha_br_opt, d_br_opt, zeta, status_penalty) =
        match run(&p, fit, &cfg.solver, None) {
            Ok(r) if r.status == SolveStatus::Infeasible => {
                (None, None, None, None, r.status.as_str().to_string())
            }
            Ok(r) => (
                Some(r.best.eta),
                Some(r.best.alpha_br),
                Some(r.best.d_br),
                Some(r.zeta),
                r.status.as_str().to_string(),
            ),
            Err(e) => (None, None, None, None, format!("error: {e}")),
        };
    let oracle = oracle_search(&p, fit, grid);
    let equal = equal_bandwidth_search(&p, fit, line);
    let fixed = fixed_placement_search(&p, fit, line).best;
    let df = df_search(&p, grid);
    SweepRow {
        W: w,
        eta_penalty,
        eta_oracle: oracle.map(|o| o.eta),
        eta_equal_bw: equal.map(|o| o.eta),
        eta_fixed_place: fixed.map(|o| o.eta),
        eta_df: Some(df.eta),
        alpha_br_opt,
        d_br_opt,
        alpha_br_oracle: oracle.map(|o| o.alpha_br),
        d_br_oracle: oracle.map(|o| o.d_br),
        zeta,
        status_penalty,
        status_oracle: grid_status(oracle.is_some()),
        status_equal_bw: grid_status(equal.is_some()),
        status_fixed_place: grid_status(fixed.is_some()),
        status_df: "ok".to_string(),
    }
}

/// Rows in increasing `W`; rows are computed concurrently.
pub fn run_sweep(cfg: &Config, spec: &SweepSpec) -> Result<Vec<SweepRow>, ModelError> {
    spec.validate()?;
    cfg.validate()?;
    Ok(spec
        .bandwidths()
        .par_iter()
        .map(|&w| sweep_row(cfg, w, &spec.grid, &spec.line))
        .collect())
}

pub fn write_csv<W: io::Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(out);
    if rows.is_empty() {
        wtr.write_record(SWEEP_HEADER)?;
    }
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> Result<(), csv::Error> {
    write_csv(rows, std::fs::File::create(path)?)
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<SweepRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// One scheme in a single-bandwidth comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub scheme: &'static str,
    pub point: Option<DesignPoint>,
    pub status: String,
}

pub fn compare(
    cfg: &Config,
    grid: &GridSpec,
    line: &GridSpec,
) -> Result<Vec<CompareRow>, ModelError> {
    cfg.validate()?;
    let p = &cfg.system;
    let fit = &cfg.fit;
    let report = run(p, fit, &cfg.solver, None)?;
    let penalty_point = (report.status != SolveStatus::Infeasible).then_some(report.best);
    let oracle = oracle_search(p, fit, grid);
    let equal = equal_bandwidth_search(p, fit, line);
    let fixed = fixed_placement_search(p, fit, line).best;
    Ok(vec![
        CompareRow {
            scheme: "penalty",
            point: penalty_point,
            status: report.status.as_str().to_string(),
        },
        CompareRow {
            scheme: "oracle",
            point: oracle,
            status: grid_status(oracle.is_some()),
        },
        CompareRow {
            scheme: "equal_bw",
            point: equal,
            status: grid_status(equal.is_some()),
        },
        CompareRow {
            scheme: "fixed_place",
            point: fixed,
            status: grid_status(fixed.is_some()),
        },
        CompareRow {
            scheme: "df",
            point: Some(df_search(p, grid)),
            status: "ok".to_string(),
        },
    ])
}

/// Fixed-width text table of a comparison.
pub fn format_compare(w: f64, rows: &[CompareRow]) -> String {
    let mut out = format!("W = {w:e} Hz\n");
    out.push_str(&format!(
        "{:<12} {:>14} {:>10} {:>10} {:>10} {:>10} {:>10}  {}\n",
        "scheme", "eta_bps", "d_br", "d_ru", "alpha_br", "alpha_ru", "gamma_db", "status"
    ));
    for r in rows {
        match r.point {
            Some(pt) => out.push_str(&format!(
                "{:<12} {:>14.6e} {:>10.4} {:>10.4} {:>10.6} {:>10.6} {:>10.4}  {}\n",
                r.scheme,
                pt.eta,
                pt.d_br,
                pt.d_ru,
                pt.alpha_br,
                pt.alpha_ru,
                pt.gamma_br_db,
                r.status
            )),
            None => out.push_str(&format!(
                "{:<12} {:>14} {:>10} {:>10} {:>10} {:>10} {:>10}  {}\n",
                r.scheme, "-", "-", "-", "-", "-", "-", r.status
            )),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_spacing_hits_endpoints() {
        let spec = SweepSpec::default();
        let w = spec.bandwidths();
        assert_eq!(w.len(), 20);
        assert_eq!(w[0], 1e5);
        assert_eq!(w[19], 1e7);
        let ratio = w[1] / w[0];
        for k in 1..19 {
            assert!((w[k + 1] / w[k] - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_spacing() {
        let spec = SweepSpec {
            w_min: 1.0,
            w_max: 5.0,
            points: 5,
            spacing: Spacing::Linear,
            ..SweepSpec::default()
        };
        assert_eq!(spec.bandwidths(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            SweepRow {
                W: 123456.789,
                eta_penalty: Some(1.0 / 3.0),
                eta_oracle: Some(6.02214076e23),
                eta_equal_bw: None,
                eta_fixed_place: Some(0.1 + 0.2),
                eta_df: Some(5e-324),
                alpha_br_opt: Some(0.25),
                d_br_opt: None,
                alpha_br_oracle: Some(0.3),
                d_br_oracle: Some(99.9),
                zeta: Some(9.5e-9),
                status_penalty: "converged".into(),
                status_oracle: "ok".into(),
                status_equal_bw: "infeasible".into(),
                status_fixed_place: "ok".into(),
                status_df: "ok".into(),
            };
            2
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER.join(","));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn empty_sweep_still_has_header() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().trim_end(),
            SWEEP_HEADER.join(",")
        );
    }
}
