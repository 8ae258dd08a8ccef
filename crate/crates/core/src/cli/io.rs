//! CSV readers and writers for every file the tool exchanges.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::npmix::{Partition, Posteriors};
use crate::simulate::Replicate;
use crate::wavelet::Curve;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: `{s}`")))
}

/// A numeric table keyed by a leading `region` column.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTable {
    /// Names of the numeric columns (header without `region`).
    pub columns: Vec<String>,
    pub regions: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl RegionTable {
    pub fn new(columns: Vec<String>, regions: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        RegionTable {
            columns,
            regions,
            rows,
        }
    }

    pub fn from_matrix(columns: Vec<String>, regions: Vec<String>, m: &Array2<f64>) -> Self {
        let rows = m.rows().into_iter().map(|r| r.to_vec()).collect();
        RegionTable {
            columns,
            regions,
            rows,
        }
    }

    pub fn to_matrix(&self) -> Result<Array2<f64>> {
        let width = self.columns.len();
        let flat: Vec<f64> = self.rows.iter().flatten().copied().collect();
        Array2::from_shape_vec((self.rows.len(), width), flat)
            .map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read_from<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.get(0).map(|h| h.to_ascii_lowercase()) != Some("region".into()) {
            return Err(Error::Parse("first column must be `region`".into()));
        }
        let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut regions = Vec::new();
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            regions.push(record.get(0).unwrap_or_default().to_string());
            let row = record
                .iter()
                .skip(1)
                .map(parse_f64)
                .collect::<Result<Vec<_>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Parse(format!(
                    "row `{}` has {} values, header has {}",
                    regions.last().unwrap(),
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(RegionTable {
            columns,
            regions,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_from(file)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "region")?;
        for c in &self.columns {
            write!(out, ",{c}")?;
        }
        writeln!(out)?;
        for (region, row) in self.regions.iter().zip(&self.rows) {
            write!(out, "{region}")?;
            for v in row {
                write!(out, ",{}", fmt_f64(*v))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

/// Column names `prefix0..prefix{k-1}` (or starting at `start`).
pub fn numbered(prefix: &str, start: usize, count: usize) -> Vec<String> {
    (start..start + count)
        .map(|k| format!("{prefix}{k}"))
        .collect()
}

/// Default region names `r1..rn`.
pub fn default_regions(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("r{i}")).collect()
}

/// Partition file: `region,cluster,t_1,...,t_L`.
pub fn write_partition<W: Write>(
    regions: &[String],
    partition: &Partition,
    post: Option<&Posteriors>,
    mut out: W,
) -> Result<()> {
    write!(out, "region,cluster")?;
    let l = post.map_or(0, Posteriors::components);
    for k in 1..=l {
        write!(out, ",t_{k}")?;
    }
    writeln!(out)?;
    for (i, region) in regions.iter().enumerate() {
        write!(out, "{region},{}", partition.labels()[i])?;
        if let Some(p) = post {
            for v in p.matrix().row(i) {
                write!(out, ",{}", fmt_f64(*v))?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads the `region` and `cluster` columns of a partition or label file.
pub fn read_labels(path: &Path) -> Result<(Vec<String>, Vec<usize>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let header = rdr.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("{}: missing `{name}` column", path.display())))
    };
    let (rc, cc) = (col("region")?, col("cluster")?);
    let mut regions = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record?;
        regions.push(record.get(rc).unwrap_or_default().to_string());
        let raw = record.get(cc).unwrap_or_default();
        labels.push(
            raw.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad cluster label `{raw}`")))?,
        );
    }
    Ok((regions, labels))
}

/// `L,loglik` rows.
pub fn write_loglik<W: Write>(values: &[(usize, f64)], mut out: W) -> Result<()> {
    writeln!(out, "L,loglik")?;
    for (l, v) in values {
        writeln!(out, "{l},{}", fmt_f64(*v))?;
    }
    Ok(())
}

pub fn read_loglik(path: &Path) -> Result<Vec<(usize, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let l = record
            .get(0)
            .unwrap_or_default()
            .parse::<usize>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        out.push((l, parse_f64(record.get(1).unwrap_or_default())?));
    }
    out.sort_by_key(|p| p.0);
    Ok(out)
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `curves.csv`, `covariates.csv` and `labels.csv` for a simulated data set.
pub fn write_replicate(rep: &Replicate, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let n = rep.curves.len();
    let regions = default_regions(n);
    let len = rep.curves.first().map_or(0, Curve::len);
    let rows = rep.curves.iter().map(|c| c.values().to_vec()).collect();
    RegionTable::new(numbered("t", 1, len), regions.clone(), rows)
        .write(&dir.join("curves.csv"))?;
    RegionTable::from_matrix(
        rep.covariates.names().to_vec(),
        regions.clone(),
        rep.covariates.matrix(),
    )
    .write(&dir.join("covariates.csv"))?;
    let mut out = create(&dir.join("labels.csv"))?;
    writeln!(out, "region,cluster,shift")?;
    for ((region, label), shift) in regions.iter().zip(&rep.labels).zip(&rep.shifts) {
        writeln!(out, "{region},{label},{shift}")?;
    }
    out.flush()?;
    Ok(())
}
