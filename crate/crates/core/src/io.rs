//! File formats: points CSV with its JSON sidecar, graph edge lists, and
//! the numeric text conventions shared by every output.
//!
//! Reals are written with 17 significant digits so that parsing the text
//! gives back the same `f64`. Positive infinity is spelled `inf`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{Edge, GraphKind, NeighborhoodGraph};
use crate::surfaces::{SampleSet, SamplingMode, SurfaceSpec};

/// Formats a real at 17 significant digits, or `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Parses a real, accepting `inf`, `+inf` and `infinity` in any case.
pub fn parse_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let v: f64 = t
        .parse()
        .map_err(|_| Error::invalid(format!("not a number: {t:?}")))?;
    if v.is_nan() {
        return Err(Error::invalid("NaN is not accepted"));
    }
    Ok(v)
}

/// Serde adapter for lengths that may be `+∞`: finite values are numbers,
/// infinity is the string `"inf"`.
pub mod serde_inf {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&super::fmt_f64(*v))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                super::parse_f64(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }

    /// The same convention for `Option<f64>`.
    pub mod option {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        struct W(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.map(W).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
        }
    }
}

/// Metadata written next to a points file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointsSidecar {
    pub surface: SurfaceSpec,
    pub mode: SamplingMode,
    pub n: usize,
    pub seed: u64,
    #[serde(rename = "D")]
    pub dim: usize,
}

/// Sidecar path for a points file: `<points>.json`.
pub fn sidecar_path(points: &Path) -> PathBuf {
    let mut s = points.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_points<P: AsRef<[f64]>>(path: &Path, points: &[P]) -> Result<()> {
    let dim = points.first().map_or(0, |p| p.as_ref().len());
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    if dim > 0 {
        w.write_record((0..dim).map(|k| format!("x{k}")))?;
    }
    for p in points {
        w.write_record(p.as_ref().iter().map(|&c| fmt_f64(c)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a points CSV. A first row that does not parse as numbers is taken
/// as the header.
pub fn read_points(path: &Path) -> Result<Vec<Point>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(File::open(path)?));
    let mut points = Vec::new();
    let mut dim = None;
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let parsed: Result<Vec<f64>> = rec.iter().map(parse_f64).collect();
        let coords = match parsed {
            Ok(c) => c,
            Err(e) if row == 0 => {
                if rec.iter().all(|f| f.starts_with('x')) {
                    continue;
                }
                return Err(e);
            }
            Err(e) => return Err(e),
        };
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(Error::invalid(format!(
                    "row {} has {} columns, expected {d}",
                    row + 1,
                    coords.len()
                )))
            }
            _ => {}
        }
        points.push(Point::new(coords)?);
    }
    Ok(points)
}

/// Writes the points file and its sidecar.
pub fn write_sample(path: &Path, sample: &SampleSet) -> Result<()> {
    write_points(path, sample.points())?;
    let meta = PointsSidecar {
        surface: sample.surface().clone(),
        mode: sample.mode(),
        n: sample.len(),
        seed: sample.seed(),
        dim: sample.dim(),
    };
    let f = BufWriter::new(File::create(sidecar_path(path))?);
    serde_json::to_writer_pretty(f, &meta)?;
    Ok(())
}

/// Reads a points file together with its sidecar.
pub fn read_sample(path: &Path) -> Result<SampleSet> {
    let points = read_points(path)?;
    let meta: PointsSidecar =
        serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))?;
    if meta.n != points.len() {
        return Err(Error::invalid(format!(
            "sidecar records n={} but the file has {} points",
            meta.n,
            points.len()
        )));
    }
    SampleSet::from_parts(points, meta.surface, meta.seed, meta.mode)
}

/// Header comment of a graph file, e.g. `# kind=annulus r=0.25 alpha=0.25`.
pub fn graph_header(kind: GraphKind) -> String {
    match kind {
        GraphKind::Ball { r } => format!("# kind=ball r={}", fmt_f64(r)),
        GraphKind::Annulus { r, alpha } => {
            format!("# kind=annulus r={} alpha={}", fmt_f64(r), fmt_f64(alpha))
        }
    }
}

pub fn parse_graph_header(line: &str) -> Result<GraphKind> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::invalid("graph file must start with a `# kind=...` comment"))?;
    let mut kind = None;
    let mut r = None;
    let mut alpha = None;
    for tok in body.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("malformed header token {tok:?}")))?;
        match k {
            "kind" => kind = Some(v.to_string()),
            "r" => r = Some(parse_f64(v)?),
            "alpha" => alpha = Some(parse_f64(v)?),
            _ => return Err(Error::invalid(format!("unknown header key {k:?}"))),
        }
    }
    let r = r.ok_or_else(|| Error::invalid("graph header lacks r"))?;
    let kind = match (kind.as_deref(), alpha) {
        (Some("ball"), None) => GraphKind::Ball { r },
        (Some("annulus"), Some(alpha)) => GraphKind::Annulus { r, alpha },
        (Some("ball"), Some(_)) => return Err(Error::invalid("ball graph header has alpha")),
        (Some("annulus"), None) => return Err(Error::invalid("annulus graph header lacks alpha")),
        (k, _) => return Err(Error::invalid(format!("unknown graph kind {k:?}"))),
    };
    kind.validate()?;
    Ok(kind)
}

/// Writes `i,j,weight` rows with `i < j` after the header comment.
pub fn write_graph(path: &Path, g: &NeighborhoodGraph) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", graph_header(g.kind()))?;
    for (i, e) in g.edges() {
        writeln!(out, "{},{},{}", i, e.to, fmt_f64(e.weight))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an edge list over `n` nodes.
pub fn read_graph(path: &Path, n: usize) -> Result<NeighborhoodGraph> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let kind = parse_graph_header(&first)?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut edges = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::invalid(format!("edge row with {} fields", rec.len())));
        }
        let i: usize = rec[0]
            .parse()
            .map_err(|_| Error::invalid(format!("bad node index {:?}", &rec[0])))?;
        let j: usize = rec[1]
            .parse()
            .map_err(|_| Error::invalid(format!("bad node index {:?}", &rec[1])))?;
        let w = parse_f64(&rec[2])?;
        if i >= j {
            return Err(Error::invalid(format!("edge row {i},{j} must have i < j")));
        }
        edges.push((i, Edge { to: j, weight: w }));
    }
    NeighborhoodGraph::from_edges(n, kind, edges)
}
