//! Aggregation of run directories into a CSV and a markdown table.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::run::{load_summary, RunSummary};

pub const COLUMNS: [&str; 20] = [
    "run",
    "equation",
    "d",
    "p",
    "omega",
    "n",
    "initial_data",
    "mass",
    "K0",
    "set_label",
    "prediction",
    "outcome",
    "scattering_proxy",
    "action_margin",
    "k_margin",
    "mass_margin",
    "mass_drift",
    "energy_drift",
    "momentum_drift",
    "agreement",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<RunSummary>,
    /// Unreadable run directories with the reason.
    pub missing: Vec<(PathBuf, String)>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn row(s: &RunSummary) -> Vec<String> {
    let v = &s.verdict;
    vec![
        s.name.clone(),
        format!("{:?}", s.equation),
        s.d.to_string(),
        s.p.to_string(),
        s.omega.to_string(),
        s.n.to_string(),
        s.initial_data.clone(),
        format!("{:e}", s.initial.mass),
        format!("{:e}", s.initial.k),
        v.set_label.map(|l| l.as_str().to_string()).unwrap_or_else(|| "unlabeled".into()),
        v.prediction.as_str().to_string(),
        s.outcome.as_str().to_string(),
        match s.scattering {
            Some(r) if r.pass => "pass".into(),
            Some(_) => "fail".into(),
            None => "n/a".into(),
        },
        opt(v.action_margin.map(|m| m.value)),
        opt(v.k_margin.map(|m| m.value)),
        format!("{:e}", v.mass_margin.value),
        format!("{:e}", s.drifts.mass),
        format!("{:e}", s.drifts.energy),
        format!("{:e}", s.drifts.momentum),
        match s.agreement() {
            Some(true) => "agree".into(),
            Some(false) => "disagree".into(),
            None => "n/a".into(),
        },
    ]
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn collect<P: AsRef<Path>>(run_dirs: &[P]) -> Self {
        let mut rows = Vec::new();
        let mut missing = Vec::new();
        for dir in run_dirs {
            match load_summary(dir.as_ref()) {
                Ok(s) => rows.push(s),
                Err(e) => missing.push((dir.as_ref().to_path_buf(), e)),
            }
        }
        Self { rows, missing }
    }

    pub fn csv(&self) -> String {
        let mut out = COLUMNS.join(",") + "\n";
        for s in &self.rows {
            let cells: Vec<String> = row(s).iter().map(|c| csv_field(c)).collect();
            out += &(cells.join(",") + "\n");
        }
        out
    }

    /// Sign sequence of `K(u0)` over the scaled-ground-state runs of each
    /// model, ordered by amplitude, and whether it changes sign at most once.
    pub fn k_sign_sweeps(&self) -> Vec<(String, String, bool)> {
        let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for s in &self.rows {
            let Some(c) = s.initial_data.strip_suffix("*Q").and_then(|c| c.parse::<f64>().ok()) else {
                continue;
            };
            let key = format!("{:?} d={} p={} omega={}", s.equation, s.d, s.p, s.omega);
            match groups.iter_mut().find(|g| g.0 == key) {
                Some(g) => g.1.push((c, s.initial.k)),
                None => groups.push((key, vec![(c, s.initial.k)])),
            }
        }
        groups
            .into_iter()
            .filter(|g| g.1.len() >= 2)
            .map(|(key, mut pts)| {
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let signs: Vec<char> = pts.iter().map(|p| if p.1 > 0.0 { '+' } else { '-' }).collect();
                let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
                let seq = pts
                    .iter()
                    .zip(&signs)
                    .map(|(p, s)| format!("{}:{s}", p.0))
                    .collect::<Vec<_>>()
                    .join(" ");
                (key, seq, changes <= 1)
            })
            .collect()
    }

    pub fn markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", COLUMNS.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(COLUMNS.len()));
        for s in &self.rows {
            let cells: Vec<String> = row(s).iter().map(|c| c.replace('|', "\\|")).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        let sweeps = self.k_sign_sweeps();
        if !sweeps.is_empty() {
            let _ = writeln!(out, "\n## K(u0) sign across amplitude sweeps\n");
            for (key, seq, monotone) in sweeps {
                let verdict = if monotone { "monotone" } else { "not monotone" };
                let _ = writeln!(out, "- {key}: {seq} ({verdict})");
            }
        }
        if !self.missing.is_empty() {
            let _ = writeln!(out, "\n## Missing or unreadable runs\n");
            for (path, why) in &self.missing {
                let _ = writeln!(out, "- `{}`: {why}", path.display());
            }
        }
        out
    }

    /// Writes `report.csv` and `report.md` into `out_dir`.
    pub fn write(&self, out_dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(out_dir)?;
        fs::write(out_dir.join("report.csv"), self.csv())?;
        fs::write(out_dir.join("report.md"), self.markdown())
    }
}

/// Aggregates `run_dirs` into `out_dir/report.{csv,md}`.
pub fn emit_report<P: AsRef<Path>>(run_dirs: &[P], out_dir: &Path) -> std::io::Result<Report> {
    let report = Report::collect(run_dirs);
    report.write(out_dir)?;
    Ok(report)
}
