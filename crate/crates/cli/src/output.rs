//! Certificate files, Betti tables and barcode plots.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use coarsec_core::certify::{ConnectivityCertificate, FlavorComparison};
use coarsec_core::complexes::Flavor;
use serde::Serialize;

pub const TOOL: &str = "coarsec";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run parameters echoed into output files so a run can be repeated.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunParams {
    pub degree: usize,
    pub schedule: String,
    pub coeff: String,
    pub margin: f64,
    pub max_dim: usize,
    pub pi1_budget: usize,
}

#[derive(Serialize)]
pub struct CertificateFile<'a> {
    pub format: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: &'a str,
    pub params: &'a RunParams,
    pub certificate: &'a ConnectivityCertificate,
}

#[derive(Serialize)]
pub struct ComparisonFile<'a> {
    pub format: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: &'a str,
    pub params: &'a RunParams,
    pub comparison: &'a FlavorComparison,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn betti_csv(cert: &ConnectivityCertificate) -> String {
    let mut s = String::from("stage,degree,betti,coeff\n");
    for st in &cert.stages {
        for (k, b) in st.betti.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{}", st.stage, k, b, cert.coeff);
        }
    }
    s
}

pub fn witness_table(cmp: &FlavorComparison) -> String {
    let mut s = String::from("stage");
    for f in Flavor::ALL {
        let _ = write!(s, ",{}", f.name());
    }
    s.push('\n');
    let m = cmp.composite_stage.len();
    for i in 0..m {
        let _ = write!(s, "{}", i + 1);
        for f in Flavor::ALL {
            match cmp.certificate(f).stages[i].witness {
                Some(j) => {
                    let _ = write!(s, ",{j}");
                }
                None => s.push_str(",none"),
            }
        }
        s.push('\n');
    }
    s
}

struct Bar {
    birth: usize,
    death: Option<usize>,
    degree: usize,
}

fn bars(cert: &ConnectivityCertificate) -> Vec<Bar> {
    let mut out = Vec::new();
    for st in &cert.stages {
        for (k, deaths) in st.deaths.iter().enumerate() {
            for d in deaths {
                out.push(Bar {
                    birth: st.stage,
                    death: *d,
                    degree: k,
                });
            }
        }
    }
    out.sort_by_key(|b| (b.degree, b.birth, b.death.unwrap_or(usize::MAX)));
    out
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// One panel per flavor; one bar per class from its stage to the stage where
/// its image dies, open-ended when it survives the schedule.
pub fn barcode_svg(cmp: &FlavorComparison) -> String {
    let m = cmp.composite_stage.len().max(1);
    let (left, width, row, gap, title) = (90.0, 520.0, 7.0, 18.0, 22.0);
    let step = width / m as f64;
    let panels: Vec<(Flavor, Vec<Bar>)> = Flavor::ALL
        .iter()
        .map(|&f| (f, bars(cmp.certificate(f))))
        .collect();
    let height: f64 = title
        + panels
            .iter()
            .map(|(_, b)| gap + 14.0 + row * b.len().max(1) as f64)
            .sum::<f64>()
        + 30.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
        w = left + width + 20.0,
        h = height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="15" font-size="13">coarse barcode ({} stages)</text>"#,
        m
    );
    let mut y = title;
    for (f, bs) in &panels {
        y += gap;
        let _ = writeln!(
            s,
            r#"<text x="4" y="{:.1}" font-weight="bold">{}</text>"#,
            y,
            f.name()
        );
        for i in 0..m {
            let x = left + step * i as f64;
            let _ = writeln!(
                s,
                r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" fill="#888">{}</text>"##,
                y + 2.0,
                y + 14.0 + row * bs.len().max(1) as f64,
                x + 2.0,
                y,
                i + 1
            );
        }
        y += 14.0;
        for b in bs {
            let x0 = left + step * (b.birth - 1) as f64;
            let x1 = match b.death {
                Some(d) if d == b.birth => x0 + 2.0,
                Some(d) => left + step * (d - 1) as f64,
                None => left + width,
            };
            let color = COLORS[b.degree % COLORS.len()];
            let dash = if b.death.is_none() {
                r#" stroke-dasharray="4 2""#
            } else {
                ""
            };
            let _ = writeln!(
                s,
                r#"<line x1="{x0:.1}" y1="{:.1}" x2="{x1:.1}" y2="{:.1}" stroke="{color}" stroke-width="4"{dash}><title>H{} born {} {}</title></line>"#,
                y + row / 2.0,
                y + row / 2.0,
                b.degree,
                b.birth,
                match b.death {
                    Some(d) => format!("dies {d}"),
                    None => "survives".into(),
                }
            );
            y += row;
        }
        if bs.is_empty() {
            y += row;
        }
    }
    y += 14.0;
    let mut x = left;
    for (k, c) in COLORS
        .iter()
        .enumerate()
        .take(cmp.certificates.first().map_or(1, |c| c.degree_bound))
    {
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{c}"/><text x="{:.1}" y="{:.1}">H{k}</text>"#,
            y - 9.0,
            x + 14.0,
            y
        );
        x += 50.0;
    }
    s.push_str("</svg>\n");
    s
}
