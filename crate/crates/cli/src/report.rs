//! Report types emitted by the commands and their CSV/JSON encodings.
//!
//! CSV floats use 17 significant digits so every value round-trips exactly;
//! JSON uses serde_json's shortest round-trip representation.

use std::fs;
use std::io;
use std::path::Path;

use framelab_core::conditions::{ConcentrationReport, ConditionReport, Verdict, Witness};
use framelab_core::experiments::{NormRatioReport, SweepReport};
use framelab_core::frames::FrameReport;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonReport {
    /// Carleson constant of the whole point set.
    pub delta: f64,
    /// Attempted split into `parts` uniformly separated classes.
    pub split: ConditionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Frame(FrameReport),
    Carleson(CarlesonReport),
    NormRatio(NormRatioReport),
    Condition(ConditionReport),
    Concentration(ConcentrationReport),
    Sweep(SweepReport),
}

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

impl Report {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("reports serialize");
        out.push(b'\n');
        out
    }

    pub fn to_csv(&self) -> Vec<u8> {
        match self {
            Report::Frame(r) => csv_bytes(
                &["lower", "upper", "ambient_dim", "family_size", "complete"],
                vec![vec![
                    float(r.lower),
                    float(r.upper),
                    r.ambient_dim.to_string(),
                    r.family_size.to_string(),
                    r.complete.to_string(),
                ]],
            ),
            Report::Carleson(r) => {
                let (classes, deltas) = match &r.split.witness {
                    Witness::Partition {
                        classes,
                        class_deltas,
                    } => (classes.clone(), class_deltas.clone()),
                    Witness::SyndeticGaps { .. } => (Vec::new(), Vec::new()),
                };
                csv_bytes(
                    &["class", "size", "class_delta", "set_delta", "verdict"],
                    classes
                        .iter()
                        .zip(deltas)
                        .enumerate()
                        .map(|(i, (members, d))| {
                            vec![
                                i.to_string(),
                                members.len().to_string(),
                                float(d),
                                float(r.delta),
                                verdict_label(&r.split),
                            ]
                        })
                        .collect(),
                )
            }
            Report::NormRatio(r) => csv_bytes(
                &["n", "rho"],
                r.table
                    .iter()
                    .map(|&(n, rho)| vec![n.to_string(), float(rho)])
                    .collect(),
            ),
            Report::Condition(r) => {
                let seeds = match &r.witness {
                    Witness::SyndeticGaps { seeds } => seeds.clone(),
                    Witness::Partition { .. } => Vec::new(),
                };
                csv_bytes(
                    &[
                        "seed",
                        "good_count",
                        "first_good",
                        "last_good",
                        "max_gap",
                        "trailing_gap",
                    ],
                    seeds
                        .iter()
                        .map(|g| {
                            vec![
                                g.seed.to_string(),
                                g.good_count.to_string(),
                                opt(g.first_good),
                                opt(g.last_good),
                                g.max_gap.to_string(),
                                g.trailing_gap.to_string(),
                            ]
                        })
                        .collect(),
                )
            }
            Report::Concentration(r) => csv_bytes(
                &["radius_index", "radius", "offender_count"],
                r.profile
                    .radii
                    .iter()
                    .zip(&r.region_counts)
                    .enumerate()
                    .map(|(i, (radius, count))| {
                        vec![i.to_string(), float(*radius), count.to_string()]
                    })
                    .collect(),
            ),
            Report::Sweep(r) => csv_bytes(
                &["d", "M", "lower", "upper", "ratio"],
                r.rows
                    .iter()
                    .map(|row| {
                        vec![
                            row.d.to_string(),
                            row.m.to_string(),
                            float(row.lower),
                            float(row.upper),
                            float(row.ratio.unwrap_or(f64::INFINITY)),
                        ]
                    })
                    .collect(),
            ),
        }
    }

    pub fn encode(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub fn verdict_label(r: &ConditionReport) -> String {
    match r.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Indeterminate => "indeterminate",
    }
    .to_string()
}

pub fn write_report(report: &Report, format: Format, path: &Path) -> io::Result<()> {
    fs::write(path, report.encode(format))
}
