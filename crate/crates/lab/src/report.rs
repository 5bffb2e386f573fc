use crate::output::{PLOT_FILE, SAMPLES_FILE, VERDICT_FILE};
use crate::{LabError, Rule, Statement, Verdict};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq)]
pub enum RowStatus {
    Pass,
    Fail,
    Reported,
    /// The verdict could not be read; the message says why.
    Unreadable(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub statement: Option<Statement>,
    /// Experiment name, or the directory name when the verdict is unreadable.
    pub source: String,
    pub check: String,
    pub rule: Option<Rule>,
    pub target: f64,
    pub tolerance: f64,
    pub observed: f64,
    pub status: RowStatus,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

/// Collects the verdict in `dir` itself and in each immediate subdirectory.
/// A subdirectory holding result files but no readable verdict yields one
/// unreadable row; other subdirectories are ignored.
pub fn build_report(dir: &Path) -> Result<Report, LabError> {
    let mut candidates: Vec<PathBuf> = vec![dir.to_path_buf()];
    let mut subdirs: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| LabError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    candidates.extend(subdirs);
    let mut report = Report::default();
    for d in candidates {
        let verdict = d.join(VERDICT_FILE);
        let label = d.file_name().map_or_else(|| d.display().to_string(), |n| n.to_string_lossy().into_owned());
        if verdict.exists() {
            match std::fs::read_to_string(&verdict)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str::<Verdict>(&t).map_err(|e| e.to_string()))
            {
                Ok(v) => report.add_verdict(&v),
                Err(msg) => report.rows.push(ReportRow::unreadable(label, format!("corrupt verdict: {msg}"))),
            }
        } else if d != dir && (d.join(SAMPLES_FILE).exists() || d.join(PLOT_FILE).exists()) {
            report.rows.push(ReportRow::unreadable(label, "missing verdict".into()));
        }
    }
    Ok(report)
}

impl ReportRow {
    fn unreadable(source: String, why: String) -> Self {
        Self {
            statement: None,
            source,
            check: "-".into(),
            rule: None,
            target: f64::NAN,
            tolerance: f64::NAN,
            observed: f64::NAN,
            status: RowStatus::Unreadable(why),
        }
    }
}

fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        "-".into()
    } else if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

impl Report {
    pub fn add_verdict(&mut self, v: &Verdict) {
        for c in &v.checks {
            self.rows.push(ReportRow {
                statement: Some(c.statement),
                source: v.experiment.name().into(),
                check: c.name.clone(),
                rule: Some(c.rule),
                target: c.target,
                tolerance: c.tolerance,
                observed: c.observed,
                status: match (c.rule, c.pass) {
                    (Rule::Report, _) => RowStatus::Reported,
                    (_, true) => RowStatus::Pass,
                    (_, false) => RowStatus::Fail,
                },
            });
        }
    }

    /// No failing and no unreadable rows.
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| matches!(r.status, RowStatus::Pass | RowStatus::Reported))
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Results\n");
        if self.rows.is_empty() {
            out.push_str("\nNo verdicts found.\n");
            return out;
        }
        let head =
            "| experiment | check | rule | target | tolerance | observed | result |\n|---|---|---|---|---|---|---|\n";
        for s in Statement::ALL {
            let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.statement == Some(s)).collect();
            if rows.is_empty() {
                continue;
            }
            let _ = write!(out, "\n## {}\n\n{head}", s.title());
            for r in rows {
                let rule = r.rule.expect("readable rows carry a rule");
                let target = match rule {
                    Rule::Below | Rule::Report | Rule::Holds => "-".into(),
                    _ => fmt_num(r.target),
                };
                let mark = match r.status {
                    RowStatus::Pass => "✓",
                    RowStatus::Fail => "✗",
                    _ => "–",
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    r.source,
                    r.check,
                    rule.symbol(),
                    target,
                    if matches!(rule, Rule::Report | Rule::Holds) { "-".into() } else { fmt_num(r.tolerance) },
                    fmt_num(r.observed),
                    mark
                );
            }
        }
        let bad: Vec<&ReportRow> = self.rows.iter().filter(|r| matches!(r.status, RowStatus::Unreadable(_))).collect();
        if !bad.is_empty() {
            out.push_str("\n## Unreadable results\n\n| directory | problem |\n|---|---|\n");
            for r in bad {
                if let RowStatus::Unreadable(why) = &r.status {
                    let _ = writeln!(out, "| {} | {} |", r.source, why.replace('|', "/").replace('\n', " "));
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let internal = |e: csv::Error| LabError::Internal(e.to_string());
        w.write_record(["statement", "experiment", "check", "rule", "target", "tolerance", "observed", "result"])
            .map_err(internal)?;
        for r in &self.rows {
            let statement = r.statement.map_or(String::new(), |s| {
                serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
            });
            let rule = r.rule.map_or(String::new(), |k| {
                serde_json::to_value(k).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
            });
            let num = |v: f64| if v.is_finite() { v.to_string() } else { String::new() };
            let result = match &r.status {
                RowStatus::Pass => "pass".to_string(),
                RowStatus::Fail => "fail".to_string(),
                RowStatus::Reported => "report".to_string(),
                RowStatus::Unreadable(why) => format!("error: {why}"),
            };
            w.write_record([
                statement,
                r.source.clone(),
                r.check.clone(),
                rule,
                num(r.target),
                num(r.tolerance),
                num(r.observed),
                result,
            ])
            .map_err(internal)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Internal(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
