use crate::{LabError, Outcome};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const SAMPLES_FILE: &str = "samples.jsonl";
pub const VERDICT_FILE: &str = "verdict.json";
pub const PLOT_FILE: &str = "plot.csv";

/// Writes the three result files into `dir`, creating it if needed. The
/// contents depend only on the outcome, so reruns are byte-identical.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let samples = dir.join(SAMPLES_FILE);
    write_samples(outcome, &samples).map_err(|e| LabError::io(&samples, e))?;
    let verdict = dir.join(VERDICT_FILE);
    let mut text = serde_json::to_string_pretty(&outcome.verdict()).map_err(|e| LabError::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(&verdict, text).map_err(|e| LabError::io(&verdict, e))?;
    let plot = dir.join(PLOT_FILE);
    write_plot(outcome, &plot).map_err(|e| LabError::io(&plot, e))?;
    Ok(vec![samples, verdict, plot])
}

fn number(v: f64) -> String {
    // serde_json prints the shortest round-trip form and maps non-finite
    // values to null.
    serde_json::to_string(&v).expect("f64 always serializes")
}

fn write_samples(outcome: &Outcome, path: &Path) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for group in &outcome.samples {
        let name = serde_json::to_string(&group.name).expect("string serializes");
        let keys: Vec<String> =
            group.fields.iter().map(|f| serde_json::to_string(f).expect("string serializes")).collect();
        for row in group.rows() {
            write!(w, "{{\"group\":{name}")?;
            for (k, v) in keys.iter().zip(row) {
                write!(w, ",{k}:{}", number(*v))?;
            }
            w.write_all(b"}\n")?;
        }
    }
    w.flush()
}

fn write_plot(outcome: &Outcome, path: &Path) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["series", "x", "y"])?;
    for (series, x, y) in &outcome.plot.rows {
        w.write_record([series.as_str(), &number(*x), &number(*y)])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Check, Experiment, SampleGroup, Statement};

    #[test]
    fn files_have_the_expected_shape() {
        let mut o = Outcome::new(Experiment::ManyToOne, 3);
        o.check(Check::within(Statement::ManyToOne, "mean", 1.85, 1.8557, 0.1));
        let mut g = SampleGroup::new("runs", &["value", "weight"]);
        g.push(&[1.5, 0.25]);
        g.push(&[f64::NAN, 2.0]);
        o.samples.push(g);
        o.plot.push("curve", 0.5, 0.75);
        let dir = tempfile::tempdir().unwrap();
        write_outcome(&o, dir.path()).unwrap();
        let lines = std::fs::read_to_string(dir.path().join(SAMPLES_FILE)).unwrap();
        assert_eq!(
            lines,
            "{\"group\":\"runs\",\"value\":1.5,\"weight\":0.25}\n{\"group\":\"runs\",\"value\":null,\"weight\":2.0}\n"
        );
        let csv = std::fs::read_to_string(dir.path().join(PLOT_FILE)).unwrap();
        assert_eq!(csv, "series,x,y\ncurve,0.5,0.75\n");
        let v: crate::Verdict =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(VERDICT_FILE)).unwrap()).unwrap();
        assert_eq!(v, o.verdict());
    }
}
