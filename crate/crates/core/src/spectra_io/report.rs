//! Report tables and per-point diagnostic dumps. UTF-8 CSV, LF endings.

use std::fs;
use std::path::Path;

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::evaluation::ClusterReport;
use crate::flow::{Clustering, FlowMap};

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

fn put<I, T>(w: &mut csv::Writer<Vec<u8>>, fields: I)
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(fields).expect("in-memory writer");
}

/// Class name and percent in primary cluster, then the unweighted mean.
pub fn format_preservation(report: &ClusterReport) -> String {
    let mut w = writer();
    put(&mut w, ["class", "percent"]);
    let names = report.confusion.class_names();
    for (name, pct) in names.iter().zip(&report.preservation.pct) {
        put(&mut w, [name.clone(), format!("{pct:.1}")]);
    }
    put(&mut w, ["Mean".to_string(), format!("{:.1}", report.preservation.mean)]);
    finish(w)
}

pub fn format_mixed(report: &ClusterReport) -> String {
    let mut w = writer();
    put(&mut w, ["class", "other_class", "percent"]);
    let names = report.confusion.class_names();
    for e in &report.mixed {
        put(
            &mut w,
            [names[e.class].clone(), names[e.other].clone(), format!("{:.1}", e.pct)],
        );
    }
    finish(w)
}

pub fn format_accuracy(report: &ClusterReport) -> String {
    format!("{:.1}\n", report.percent_accuracy)
}

/// Full class x cluster counts; the header row carries cluster ids.
pub fn format_breakdown(report: &ClusterReport) -> String {
    let t = &report.confusion;
    let mut w = writer();
    put(
        &mut w,
        std::iter::once("class".to_string()).chain(t.cluster_ids().iter().map(|c| c.to_string())),
    );
    for (c, name) in t.class_names().iter().enumerate() {
        put(
            &mut w,
            std::iter::once(name.clone()).chain(t.row(c).iter().map(|v| v.to_string())),
        );
    }
    finish(w)
}

/// Writes preservation.csv, mixed.csv, accuracy.txt and breakdown.csv.
pub fn write_report_tables(report: &ClusterReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        ("preservation.csv", format_preservation(report)),
        ("mixed.csv", format_mixed(report)),
        ("accuracy.txt", format_accuracy(report)),
        ("breakdown.csv", format_breakdown(report)),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Per-point `index,s,ss,codensity`.
pub fn format_density_dump(field: &DensityField, codensity: &[f64]) -> String {
    let mut out = String::from("index,s,ss,codensity\n");
    for i in 0..field.len() {
        out.push_str(&format!("{i},{},{},{}\n", field.s[i], field.ss[i], codensity[i]));
    }
    out
}

/// Per-point `index,f,label,ss` where `f` is the one-step flow target.
pub fn format_flow_dump(flow: &FlowMap, clusters: &Clustering, ss: &[f64]) -> String {
    let mut out = String::from("index,f,label,ss\n");
    for i in 0..flow.f.len() {
        out.push_str(&format!("{i},{},{},{}\n", flow.f[i], clusters.labels[i], ss[i]));
    }
    out
}

pub fn write_text(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}
