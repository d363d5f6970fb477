use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::experiments::Outcome;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const RATE_FIT_FILE: &str = "rate_fit.json";
pub const PLOT_FILE: &str = "plot.svg";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Shortest round-trip decimal; `nan` and `inf` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// A positive series against `n`, drawn on log-log axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// `(slope, intercept)` of `log y = intercept + slope log x`.
    pub fit: Option<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    /// Hand-drawn SVG; `None` if no point is positive.
    pub fn to_svg(&self) -> Option<String> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.0 > 0.0 && p.1 > 0.0)
            .map(|p| (p.0.log10(), p.1.log10()))
            .collect();
        if pts.is_empty() {
            return None;
        }
        let (w, h, ml, mr, mt, mb) = (640.0, 420.0, 70.0, 20.0, 40.0, 50.0);
        let span = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                (a.min(x), b.max(x))
            });
            let (lo, hi) = (lo.floor(), hi.ceil());
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 1.0, hi + 1.0)
            }
        };
        let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
        let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
        let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
        let sy = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            w - ml - mr,
            h - mt - mb
        );
        for d in (x0 as i64)..=(x1 as i64) {
            let x = sx(d as f64);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="gray"/>"#,
                h - mb,
                h - mb + 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">1e{d}</text>"#,
                h - mb + 18.0
            );
        }
        for d in (y0 as i64)..=(y1 as i64) {
            let y = sy(d as f64);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{ml}" y2="{y:.2}" stroke="gray"/>"#,
                ml - 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">1e{d}</text>"#,
                ml - 8.0,
                y + 4.0
            );
        }
        let line: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        for &(x, y) in &pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"/>"#,
                sx(x),
                sy(y)
            );
        }
        let mut title = escape(&self.title);
        if let Some((slope, intercept)) = self.fit {
            let ln10 = std::f64::consts::LN_10;
            let fy = |x: f64| (intercept + slope * x * ln10) / ln10;
            let (a, b) = (pts[0].0, pts[pts.len() - 1].0);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-dasharray="6 4"/>"#,
                sx(a),
                sy(fy(a)),
                sx(b),
                sy(fy(b))
            );
            let _ = write!(title, " (slope {slope:.3})");
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" font-size="14" text-anchor="middle">{title}</text>"#,
            w / 2.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            (ml + w - mr) / 2.0,
            h - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (mt + h - mb) / 2.0,
            (mt + h - mb) / 2.0,
            escape(&self.y_label)
        );
        s.push_str("</svg>\n");
        Some(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub kind: String,
    pub model: String,
    pub seed: u64,
    pub config_sha256: String,
    pub code_version: String,
    pub platform: String,
    pub files: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Caveat on cross-machine reproducibility, recorded in every manifest.
pub fn platform_note() -> String {
    format!(
        "{}-{}; IEEE-754 binary64; transcendental functions come from the platform libm, so bytes may differ across targets",
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}

/// Every output file of one run as `(name, bytes)`, manifest last.
pub fn render(outcome: &Outcome, config: &ExperimentConfig, model: &str) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> =
        vec![(SUMMARY_FILE.into(), outcome.table().to_csv().into_bytes())];
    if let Some(fit) = outcome.rate_fit() {
        let json = serde_json::to_string_pretty(fit).expect("rate fit serializes") + "\n";
        files.push((RATE_FIT_FILE.into(), json.into_bytes()));
    }
    if config.plot {
        if let Some(svg) = outcome.plot().and_then(|p| p.to_svg()) {
            files.push((PLOT_FILE.into(), svg.into_bytes()));
        }
    }
    if let Some((name, value)) = outcome.details() {
        let json = serde_json::to_string_pretty(&value).expect("details serialize") + "\n";
        files.push((name.into(), json.into_bytes()));
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        kind: config.kind.to_string(),
        model: model.into(),
        seed: config.seed,
        config_sha256: sha256_hex(config.canonical_json().as_bytes()),
        code_version: format!("poisdiff {}", env!("CARGO_PKG_VERSION")),
        platform: platform_note(),
        files: files
            .iter()
            .map(|(name, bytes)| FileDigest {
                name: name.clone(),
                sha256: sha256_hex(bytes),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    files.push((MANIFEST_FILE.into(), json.into_bytes()));
    files
}

/// Writes rendered files into `dir`, creating it if needed.
pub fn write_files(dir: &Path, files: &[(String, Vec<u8>)]) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|(name, bytes)| {
            let path = dir.join(name);
            fs::write(&path, bytes)?;
            Ok(path)
        })
        .collect()
}
