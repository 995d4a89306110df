//! CSV and JSON serialization of traces and surface meshes.
//!
//! CSV files start with `# key=value` metadata lines followed by a header
//! row. Floats are written with 17 significant digits so every value reads
//! back bit-identical.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::analytic::{predictability, ConcurrenceSextet, Family};
use crate::angle::MixingAngle;
use crate::entanglement::QubitPair;
use crate::geometry::{qubit_pairs, SurfaceMesh, SurfacePoint};
use crate::hilbert::Subsystem;

pub const TRACE_COLUMNS: [&str; 9] = ["gt", "c_AB", "c_ab", "c_Aa", "c_Bb", "c_Ab", "c_aB", "p0", "sum_sq"];
pub const SURFACE_COLUMNS: [&str; 5] = ["alpha", "gt", "c_first", "c_second", "c_third"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("expected columns {expected:?}, found {found:?}")]
    Columns { expected: Vec<String>, found: Vec<String> },
    #[error("bad number `{0}`")]
    Number(String),
    #[error("missing or invalid metadata `{0}`")]
    Metadata(String),
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(s: &str) -> Result<f64, TableError> {
    s.trim().parse().map_err(|_| TableError::Number(s.to_string()))
}

/// Ordered `# key=value` lines.
pub type Metadata = BTreeMap<String, String>;

fn write_metadata<W: Write>(out: &mut W, meta: &Metadata) -> Result<(), TableError> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

/// Splits leading `#` lines from the CSV body.
fn split_metadata(text: &str) -> (Metadata, &str) {
    let mut meta = Metadata::new();
    let mut rest = text;
    while let Some(line) = rest.strip_prefix('#') {
        let (line, tail) = line.split_once('\n').unwrap_or((line, ""));
        if let Some((k, v)) = line.trim().split_once('=') {
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
        rest = tail;
    }
    (meta, rest)
}

fn read_rows(body: &str, expected: &[&str]) -> Result<Vec<Vec<f64>>, TableError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != expected {
        return Err(TableError::Columns {
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: header,
        });
    }
    reader
        .records()
        .map(|record| record?.iter().map(parse_float).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub gt: f64,
    /// Physical time gt/g.
    pub t: f64,
    #[serde(rename = "c_AB")]
    pub c_ab_atoms: f64,
    #[serde(rename = "c_ab")]
    pub c_ab_cavities: f64,
    #[serde(rename = "c_Aa")]
    pub c_arm_a: f64,
    #[serde(rename = "c_Bb")]
    pub c_arm_b: f64,
    #[serde(rename = "c_Ab")]
    pub c_cross_ab: f64,
    #[serde(rename = "c_aB")]
    pub c_cross_ba: f64,
    pub p0: f64,
    pub sum_sq: f64,
}

impl TraceRow {
    pub fn values(&self) -> [f64; 6] {
        [
            self.c_ab_atoms,
            self.c_ab_cavities,
            self.c_arm_a,
            self.c_arm_b,
            self.c_cross_ab,
            self.c_cross_ba,
        ]
    }

    fn csv_fields(&self) -> [f64; 9] {
        let v = self.values();
        [self.gt, v[0], v[1], v[2], v[3], v[4], v[5], self.p0, self.sum_sq]
    }
}

/// One trajectory at fixed α.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceTable {
    pub family: Family,
    pub alpha: f64,
    pub g: f64,
    pub omega: f64,
    pub rows: Vec<TraceRow>,
}

impl TraceTable {
    pub fn from_trace(trace: &[ConcurrenceSextet], family: Family, alpha: &MixingAngle, g: f64, omega: f64) -> Self {
        let p0 = predictability(family, alpha).p0;
        let rows = trace
            .iter()
            .map(|s| {
                let v = s.values();
                TraceRow {
                    gt: s.gt,
                    t: s.gt / g,
                    c_ab_atoms: v[0],
                    c_ab_cavities: v[1],
                    c_arm_a: v[2],
                    c_arm_b: v[3],
                    c_cross_ab: v[4],
                    c_cross_ba: v[5],
                    p0,
                    sum_sq: s.sum_of_squares(),
                }
            })
            .collect();
        Self {
            family,
            alpha: alpha.radians(),
            g,
            omega,
            rows,
        }
    }

    fn metadata(&self) -> Metadata {
        Metadata::from([
            ("alpha".to_string(), format_float(self.alpha)),
            ("family".to_string(), self.family.to_string()),
            ("g".to_string(), format_float(self.g)),
            ("omega".to_string(), format_float(self.omega)),
        ])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), TableError> {
        write_metadata(&mut out, &self.metadata())?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(TRACE_COLUMNS)?;
        for row in &self.rows {
            writer.write_record(row.csv_fields().map(format_float))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), TableError> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(mut input: R) -> Result<Self, TableError> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let (meta, body) = split_metadata(&text);
        let get = |key: &str| -> Result<&String, TableError> {
            meta.get(key).ok_or_else(|| TableError::Metadata(key.to_string()))
        };
        let family: Family = get("family")?.parse().map_err(|_| TableError::Metadata("family".into()))?;
        let alpha = parse_float(get("alpha")?)?;
        let g = parse_float(get("g")?)?;
        let omega = parse_float(get("omega")?)?;
        let rows = read_rows(body, &TRACE_COLUMNS)?
            .into_iter()
            .map(|r| TraceRow {
                gt: r[0],
                t: r[0] / g,
                c_ab_atoms: r[1],
                c_ab_cavities: r[2],
                c_arm_a: r[3],
                c_arm_b: r[4],
                c_cross_ab: r[5],
                c_cross_ba: r[6],
                p0: r[7],
                sum_sq: r[8],
            })
            .collect();
        Ok(Self {
            family,
            alpha,
            g,
            omega,
            rows,
        })
    }
}

pub fn write_surface_csv<W: Write>(mesh: &SurfaceMesh, mut out: W) -> Result<(), TableError> {
    let pairs: Vec<String> = mesh.pairs.iter().map(|p| p.label()).collect();
    let meta = Metadata::from([
        ("alpha_count".to_string(), mesh.alpha_count.to_string()),
        ("family".to_string(), mesh.family.to_string()),
        ("gt_count".to_string(), mesh.gt_count.to_string()),
        ("pairs".to_string(), pairs.join(",")),
        ("qubit".to_string(), mesh.qubit.label().to_string()),
    ]);
    write_metadata(&mut out, &meta)?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SURFACE_COLUMNS)?;
    for p in &mesh.points {
        let [a, b, c] = p.values;
        writer.write_record([p.alpha.radians(), p.gt, a, b, c].map(format_float))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_surface_json<W: Write>(mesh: &SurfaceMesh, mut out: W) -> Result<(), TableError> {
    serde_json::to_writer_pretty(&mut out, mesh)?;
    writeln!(out)?;
    Ok(())
}

/// Reads a surface written by [`write_surface_csv`]. Angles come back as
/// plain radians without exact trigonometric values.
pub fn read_surface_csv<R: Read>(mut input: R) -> Result<SurfaceMesh, TableError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (meta, body) = split_metadata(&text);
    let get = |key: &str| -> Result<&String, TableError> { meta.get(key).ok_or_else(|| TableError::Metadata(key.to_string())) };
    let bad = |key: &str| TableError::Metadata(key.to_string());
    let family: Family = get("family")?.parse().map_err(|_| bad("family"))?;
    let qubit = Subsystem::from_label(get("qubit")?).ok_or_else(|| bad("qubit"))?;
    let pairs = qubit_pairs(qubit);
    let listed: Vec<Option<QubitPair>> = get("pairs")?.split(',').map(QubitPair::from_label).collect();
    if listed != pairs.map(Some) {
        return Err(bad("pairs"));
    }
    let alpha_count: usize = get("alpha_count")?.parse().map_err(|_| bad("alpha_count"))?;
    let gt_count: usize = get("gt_count")?.parse().map_err(|_| bad("gt_count"))?;
    let points: Vec<SurfacePoint> = read_rows(body, &SURFACE_COLUMNS)?
        .into_iter()
        .map(|r| SurfacePoint {
            alpha: MixingAngle::from_radians(r[0]),
            gt: r[1],
            values: [r[2], r[3], r[4]],
        })
        .collect();
    if points.len() != alpha_count * gt_count {
        return Err(bad("alpha_count"));
    }
    Ok(SurfaceMesh {
        family,
        qubit,
        pairs,
        alpha_count,
        gt_count,
        points,
    })
}
