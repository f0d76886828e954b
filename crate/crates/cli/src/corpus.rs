//! On-disk corpus layout shared by the subcommands: a manifest JSON, one
//! feature CSV per article (`month,F1..F34,valid,is_change_point`), and a
//! ground-truth JSON for evaluation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qcpd_core::features::FEATURE_COUNT;
use qcpd_core::model::{ChangePointSet, MonthCalendar};
use qcpd_core::{ArticleSeries, QualityClass};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
pub struct CalendarSpec {
    pub start_year: i32,
    pub start_month: u32,
    pub n_months: usize,
}

impl CalendarSpec {
    pub fn from_calendar(cal: &MonthCalendar) -> Self {
        CalendarSpec {
            start_year: cal.start_year,
            start_month: cal.start_month,
            n_months: cal.n_months,
        }
    }

    pub fn to_calendar(&self) -> Result<MonthCalendar> {
        Ok(MonthCalendar::new(
            self.start_year,
            self.start_month,
            self.n_months,
        )?)
    }
}

#[derive(Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub latest_class: Option<QualityClass>,
}

#[derive(Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub calendar: CalendarSpec,
    pub articles: Vec<ManifestEntry>,
}

/// Ground-truth file consumed by `evaluate`: calendar-space change months.
#[derive(Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub schema_version: u32,
    pub n_months: usize,
    pub ground_truth: BTreeMap<String, Vec<usize>>,
    pub latest_class: BTreeMap<String, QualityClass>,
}

fn csv_header() -> Vec<String> {
    let mut header = vec!["month".to_string()];
    header.extend((1..=FEATURE_COUNT).map(|f| format!("F{f}")));
    header.push("valid".to_string());
    header.push("is_change_point".to_string());
    header
}

pub fn write_series_csv(path: &Path, series: &ArticleSeries) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(csv_header())?;
    for month in 1..=series.calendar.n_months {
        let mut record = vec![month.to_string()];
        record.extend(series.matrix[month - 1].iter().map(|v| format!("{v}")));
        record.push(u8::from(series.mask[month - 1]).to_string());
        record.push(u8::from(series.ground_truth.points().contains(&month)).to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_csv(path: &Path, id: &str, cal: &MonthCalendar) -> Result<ArticleSeries> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    if r.headers()?.iter().collect::<Vec<_>>() != csv_header() {
        bail!("{}: unexpected CSV header", path.display());
    }
    let mut matrix = Vec::new();
    let mut mask = Vec::new();
    let mut points = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let month: usize = record[0].parse()?;
        if month != i + 1 {
            bail!("{}: month column must run 1..n_months", path.display());
        }
        let row: Vec<f64> = (1..=FEATURE_COUNT)
            .map(|f| record[f].parse::<f64>())
            .collect::<std::result::Result<_, _>>()?;
        matrix.push(row);
        mask.push(&record[FEATURE_COUNT + 1] == "1");
        if &record[FEATURE_COUNT + 2] == "1" {
            points.push(month);
        }
    }
    if matrix.len() != cal.n_months {
        bail!(
            "{}: {} rows, calendar has {} months",
            path.display(),
            matrix.len(),
            cal.n_months
        );
    }
    Ok(ArticleSeries {
        article_id: id.to_string(),
        calendar: *cal,
        matrix,
        mask,
        ground_truth: ChangePointSet::new(points, cal.n_months)?,
    })
}

/// Writes a full corpus directory: manifest, per-article CSVs, gt.json.
pub fn write_corpus(
    dir: &Path,
    corpus: &[ArticleSeries],
    latest: &BTreeMap<String, QualityClass>,
) -> Result<()> {
    if corpus.is_empty() {
        bail!("corpus is empty");
    }
    fs::create_dir_all(dir)?;
    let cal = corpus[0].calendar;
    let mut entries = Vec::new();
    let mut gt = GroundTruthFile {
        schema_version: SCHEMA_VERSION,
        n_months: cal.n_months,
        ground_truth: BTreeMap::new(),
        latest_class: latest.clone(),
    };
    for series in corpus {
        let file = format!("{}.csv", sanitize(&series.article_id));
        write_series_csv(&dir.join(&file), series)?;
        gt.ground_truth.insert(
            series.article_id.clone(),
            series.ground_truth.points().to_vec(),
        );
        entries.push(ManifestEntry {
            id: series.article_id.clone(),
            file,
            latest_class: latest.get(&series.article_id).copied(),
        });
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        calendar: CalendarSpec::from_calendar(&cal),
        articles: entries,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    fs::write(dir.join("gt.json"), serde_json::to_string_pretty(&gt)?)?;
    Ok(())
}

/// Reads a corpus directory back into series plus latest-class map.
pub fn read_corpus(dir: &Path) -> Result<(Vec<ArticleSeries>, BTreeMap<String, QualityClass>)> {
    let manifest: Manifest = serde_json::from_str(
        &fs::read_to_string(dir.join("manifest.json"))
            .with_context(|| format!("reading {}/manifest.json", dir.display()))?,
    )?;
    if manifest.schema_version != SCHEMA_VERSION {
        bail!("unsupported manifest schema {}", manifest.schema_version);
    }
    let cal = manifest.calendar.to_calendar()?;
    let mut corpus = Vec::new();
    let mut latest = BTreeMap::new();
    for entry in &manifest.articles {
        corpus.push(read_series_csv(&dir.join(&entry.file), &entry.id, &cal)?);
        if let Some(class) = entry.latest_class {
            latest.insert(entry.id.clone(), class);
        }
    }
    Ok((corpus, latest))
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
