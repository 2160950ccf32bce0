use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// A CSV table with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma separated, header first, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Shortest round-tripping text of a float; `inf` and `nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Series drawn on log-log axes by `--plot`.
#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

impl Plot {
    pub fn to_svg(&self) -> String {
        let (w, h, m) = (640.0, 420.0, 60.0);
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.1.iter().copied())
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
        let _ = writeln!(out, "<text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>", w / 2.0, esc(&self.title));
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log10 {}</text>",
            w / 2.0,
            h - 15.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">log10 {}</text>",
            h / 2.0,
            h / 2.0,
            esc(&self.y_label)
        );
        let _ = writeln!(
            out,
            "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            w - 2.0 * m,
            h - 2.0 * m
        );
        if !pts.is_empty() {
            let span = |v: &mut dyn Iterator<Item = f64>| {
                let (lo, hi) = v.fold((f64::MAX, f64::MIN), |(l, h), x| (l.min(x), h.max(x)));
                if hi - lo < 1e-12 { (lo - 0.5, hi + 0.5) } else { (lo, hi) }
            };
            let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
            let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
            let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
            let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
            for (label, x) in [(x0, sx(x0)), (x1, sx(x1))] {
                let _ = writeln!(out, "<text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">{label:.2}</text>", h - m + 15.0);
            }
            for (label, y) in [(y0, sy(y0)), (y1, sy(y1))] {
                let _ = writeln!(out, "<text x=\"{}\" y=\"{y:.1}\" text-anchor=\"end\">{label:.2}</text>", m - 5.0);
            }
            for (i, (name, data)) in self.series.iter().enumerate() {
                let colour = PALETTE[i % PALETTE.len()];
                let path: Vec<String> = data
                    .iter()
                    .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
                    .map(|(x, y)| format!("{:.2},{:.2}", sx(x.log10()), sy(y.log10())))
                    .collect();
                if path.is_empty() {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"/>",
                    path.join(" ")
                );
                for p in &path {
                    let (x, y) = p.split_once(',').expect("formatted pair");
                    let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{colour}\"/>");
                }
                let _ = writeln!(
                    out,
                    "<text x=\"{}\" y=\"{}\" fill=\"{colour}\">{}</text>",
                    w - m - 120.0,
                    m + 15.0 + 15.0 * i as f64,
                    esc(name)
                );
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Everything a subcommand produces.
#[derive(Clone, Debug)]
pub struct Report {
    pub table: Table,
    pub json: Value,
    pub summary: String,
    pub plot: Option<Plot>,
}

/// First 12 hex digits of the SHA-256 of the canonical configuration.
pub fn run_id(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.canonical().as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// Writes `<cmd>.csv`, `<cmd>.json`, `config.json` and optionally
/// `<cmd>.svg` into `dir`; returns the written paths.
pub fn write_artifacts(dir: &Path, cfg: &RunConfig, report: &Report) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = cfg.command.name();
    let id = run_id(cfg);
    let mut written = Vec::new();
    let mut put = |file: String, body: String| -> anyhow::Result<()> {
        let path = dir.join(file);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(format!("{name}.csv"), report.table.to_csv())?;
    let doc = serde_json::json!({
        "run_id": id,
        "seed": cfg.seed,
        "command": name,
        "config": serde_json::from_str::<Value>(&cfg.canonical())?,
        "summary": report.summary,
        "result": report.json,
    });
    put(format!("{name}.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    let echo = serde_json::json!({
        "run_id": id,
        "config": serde_json::from_str::<Value>(&cfg.canonical())?,
    });
    put("config.json".into(), serde_json::to_string_pretty(&echo)? + "\n")?;
    if cfg.plot {
        if let Some(plot) = &report.plot {
            put(format!("{name}.svg"), plot.to_svg())?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(0.1), num(f64::INFINITY)]);
        assert_eq!(t.to_csv(), "a,b\n0.1,inf\n");
    }

    #[test]
    fn run_id_is_stable() {
        let c = RunConfig::default();
        assert_eq!(run_id(&c), run_id(&c.clone()));
        assert_eq!(run_id(&c).len(), 12);
        let other = RunConfig { seed: 1, ..c.clone() };
        assert_ne!(run_id(&c), run_id(&other));
    }

    #[test]
    fn svg_is_well_formed() {
        let p = Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![("s".into(), vec![(1.0, 1.0), (10.0, 100.0)])],
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("polyline"));
    }
}
