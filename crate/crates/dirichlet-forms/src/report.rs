//! Report files emitted by the experiment commands: CSV tables with a
//! timestamp header line, a JSON verdict sidecar, and plain-text plot
//! scripts. Reruns with the same configuration produce byte-identical CSV
//! output apart from the timestamp line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;

/// One named check inside a scenario report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub verdict: String,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }
}

/// Machine-readable scenario outcome, serialized to `verdicts.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
}

impl ScenarioReport {
    pub fn new(scenario: &str, seed: u64) -> Self {
        Self {
            scenario: scenario.into(),
            seed,
            checks: Vec::new(),
            all_pass: true,
            extra: serde_json::Value::Null,
        }
    }

    /// Records a check: `pass` decides the verdict string.
    pub fn check(&mut self, name: &str, pass: bool, value: f64, threshold: f64, detail: String) {
        self.all_pass &= pass;
        self.checks.push(CheckRecord {
            name: name.into(),
            verdict: if pass { "PASS" } else { "FAIL" }.into(),
            value,
            threshold,
            detail,
        });
    }

    /// Convenience for `value <= threshold` checks.
    pub fn check_le(&mut self, name: &str, value: f64, threshold: f64, detail: &str) {
        self.check(name, value <= threshold, value, threshold, detail.into());
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn write_json(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("verdicts.json");
        let file = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(file, self).map_err(std::io::Error::from)?;
        Ok(path)
    }

    /// One human-readable line per check.
    pub fn print_summary(&self) {
        for c in &self.checks {
            println!(
                "{} {} (value {:e}, threshold {:e}){}{}",
                c.verdict,
                c.name,
                c.value,
                c.threshold,
                if c.detail.is_empty() { "" } else { " — " },
                c.detail
            );
        }
    }
}

/// Writes a CSV file: a `# generated-unix <secs>` timestamp line, an
/// optional `# seed <n>` line, the header, then the rows. All floats should
/// be rendered with `{:e}` by the caller for deterministic bytes.
pub fn write_csv(
    dir: &Path,
    name: &str,
    seed: Option<u64>,
    header: &str,
    rows: &[String],
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    writeln!(file, "# generated-unix {stamp}")?;
    if let Some(s) = seed {
        writeln!(file, "# seed {s}")?;
    }
    writeln!(file, "{header}")?;
    for row in rows {
        writeln!(file, "{row}")?;
    }
    Ok(path)
}

/// Emits a plain-text matplotlib script that plots the named CSV columns.
/// Plotting stays out of the library; the script is a companion file only.
pub fn write_plot_script(dir: &Path, scenario: &str, csvs: &[(&str, &str)]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("plot_{scenario}.py"));
    let mut file = std::fs::File::create(&path)?;
    writeln!(file, "#!/usr/bin/env python3")?;
    writeln!(file, "# Companion plot script for the {scenario} report files.")?;
    writeln!(file, "import csv")?;
    writeln!(file, "import matplotlib.pyplot as plt")?;
    writeln!(file)?;
    writeln!(file, "def load(name):")?;
    writeln!(file, "    with open(name) as fh:")?;
    writeln!(
        file,
        "        rows = [r for r in csv.reader(fh) if r and not r[0].startswith('#')]"
    )?;
    writeln!(file, "    header, data = rows[0], rows[1:]")?;
    writeln!(
        file,
        "    cols = {{h: [float(r[i]) for r in data] for i, h in enumerate(header) if _num(data, i)}}"
    )?;
    writeln!(file, "    return cols")?;
    writeln!(file)?;
    writeln!(file, "def _num(data, i):")?;
    writeln!(file, "    try:")?;
    writeln!(file, "        [float(r[i]) for r in data]")?;
    writeln!(file, "        return True")?;
    writeln!(file, "    except ValueError:")?;
    writeln!(file, "        return False")?;
    writeln!(file)?;
    writeln!(file, "fig, axes = plt.subplots({}, 1, figsize=(7, {}))", csvs.len(), 3 * csvs.len())?;
    writeln!(file, "axes = axes if hasattr(axes, '__len__') else [axes]")?;
    for (idx, (csv_name, title)) in csvs.iter().enumerate() {
        writeln!(file, "cols = load('{csv_name}')")?;
        writeln!(file, "keys = list(cols)")?;
        writeln!(file, "for k in keys[1:]:")?;
        writeln!(file, "    axes[{idx}].plot(cols[keys[0]], cols[k], label=k)")?;
        writeln!(file, "axes[{idx}].set_title('{title}')")?;
        writeln!(file, "axes[{idx}].legend()")?;
    }
    writeln!(file, "fig.tight_layout()")?;
    writeln!(file, "fig.savefig('{scenario}.png', dpi=120)")?;
    writeln!(file, "print('wrote {scenario}.png')")?;
    Ok(path)
}
