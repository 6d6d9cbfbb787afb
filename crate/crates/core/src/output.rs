//! Trajectory CSV and run-report documents.

use std::io::{self, Write};

use serde::Serialize;

use crate::analysis::{AnalysisReport, PairIntersection, Tolerances, Trajectory};
use crate::geometry::Vec2;

/// Header `t,b1x,b1y,...` then one row per sample, every value printed with
/// 17 significant digits so binary doubles survive the round trip.
pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, mut w: W) -> io::Result<()> {
    let n = trajectory.scenario().agent_count();
    let mut header = String::from("t");
    for k in 1..=n {
        header.push_str(&format!(",b{k}x,b{k}y"));
    }
    writeln!(w, "{header}")?;
    for s in trajectory.samples() {
        write!(w, "{:.16e}", s.time)?;
        for b in &s.headings {
            write!(w, ",{:.16e},{:.16e}", b.x(), b.y())?;
        }
        writeln!(w)?;
    }
    w.flush()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EdgeSummary {
    pub from: usize,
    pub to: usize,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IntegrationSettings {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub frames: String,
}

/// Everything written to `report.json` for one run.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_name: Option<String>,
    pub scenario_hash: String,
    pub seed: Option<u64>,
    pub settings: IntegrationSettings,
    pub feasibility: Feasibility,
    pub consensus: bool,
    pub angles_satisfied: bool,
    pub forward_pointing: bool,
    pub tolerances: Tolerances,
    pub final_time: f64,
    pub samples: usize,
    pub final_root_error: f64,
    pub final_edge_errors: Vec<EdgeSummary>,
    pub final_lyapunov: Vec<f64>,
    pub intersection_point: Option<Vec2>,
    pub intersection_residual: Option<f64>,
    pub pairwise_intersections: Vec<PairIntersection>,
}

impl RunReport {
    pub fn new(
        scenario_name: Option<String>,
        scenario_hash: String,
        seed: Option<u64>,
        settings: IntegrationSettings,
        feasibility: Feasibility,
        analysis: &AnalysisReport,
    ) -> Self {
        RunReport {
            scenario_name,
            scenario_hash,
            seed,
            settings,
            feasibility,
            consensus: analysis.consensus,
            angles_satisfied: analysis.angles_satisfied,
            forward_pointing: analysis.forward_pointing,
            tolerances: analysis.tolerances,
            final_time: *analysis.times.last().expect("non-empty"),
            samples: analysis.times.len(),
            final_root_error: analysis.final_root_error(),
            final_edge_errors: analysis
                .edge_error_series
                .iter()
                .map(|e| EdgeSummary { from: e.from, to: e.to, error: e.last() })
                .collect(),
            final_lyapunov: analysis.lyapunov_series.iter().map(|v| *v.last().expect("non-empty")).collect(),
            intersection_point: analysis.intersection_point,
            intersection_residual: analysis.intersection_residual,
            pairwise_intersections: analysis.pairwise_intersections.clone(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// One-line verdict for the terminal.
    pub fn summary(&self) -> String {
        let max_edge = self.final_edge_errors.iter().map(|e| e.error).fold(0.0, f64::max);
        let residual = self.intersection_residual.map_or_else(|| "none".to_string(), |r| format!("{r:.3e} m"));
        format!(
            "consensus={} angles_satisfied={} max_edge_error={:.3e} root_error={:.3e} residual={}",
            self.consensus, self.angles_satisfied, max_edge, self.final_root_error, residual
        )
    }
}
