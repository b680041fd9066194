//! Finite metric spaces: a point list, a metric, named landmarks and
//! per-point provenance along one-dimensional pieces.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::matrix::DistanceMatrix;
use crate::point::{euclidean_distance_f64, sup_distance_f64, SparsePoint};
use crate::spaces::glue::GluedMetric;

/// Dense index into a space's point list.
pub type PointId = usize;

/// Largest glued space that will be materialized into a matrix file.
pub const MATERIALIZE_CAP: usize = 8192;

/// Where a sample point sits on the one-dimensional pieces it was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMeta {
    pub piece: u32,
    pub segment: u32,
    /// Arc parameter in `[0, 1]`.
    pub t: f64,
}

#[derive(Clone, Debug)]
pub enum Metric {
    /// ℓ∞ on the stored coordinates.
    Sup,
    /// Euclidean on the stored coordinates.
    Euclidean,
    Matrix(DistanceMatrix),
    /// Quotient of scaled pieces glued at points.
    Glued(GluedMetric),
}

impl Metric {
    pub fn kind(&self) -> &'static str {
        match self {
            Metric::Sup => "sup",
            Metric::Euclidean => "euclidean",
            Metric::Matrix(_) | Metric::Glued(_) => "matrix",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    pub generator: String,
    pub params: serde_json::Value,
    points: Vec<SparsePoint>,
    meta: Vec<Option<PointMeta>>,
    landmarks: BTreeMap<String, PointId>,
    metric: Metric,
    /// Sample spacing along pieces, in metric units (0 when not applicable).
    pub resolution: f64,
}

impl FiniteMetricSpace {
    /// Space on coordinates with the sup or Euclidean metric.
    pub fn from_points(
        generator: impl Into<String>,
        points: Vec<SparsePoint>,
        metric: Metric,
        resolution: f64,
    ) -> Self {
        assert!(matches!(metric, Metric::Sup | Metric::Euclidean));
        let n = points.len();
        Self {
            generator: generator.into(),
            params: serde_json::Value::Null,
            points,
            meta: vec![None; n],
            landmarks: BTreeMap::new(),
            metric,
            resolution,
        }
    }

    /// Space of abstract points with an explicit matrix or a glued metric.
    pub fn abstract_points(generator: impl Into<String>, metric: Metric, resolution: f64) -> Self {
        let n = match &metric {
            Metric::Matrix(m) => m.len(),
            Metric::Glued(g) => g.len(),
            _ => panic!("abstract spaces need an explicit metric"),
        };
        Self {
            generator: generator.into(),
            params: serde_json::Value::Null,
            points: vec![SparsePoint::origin(); n],
            meta: vec![None; n],
            landmarks: BTreeMap::new(),
            metric,
            resolution,
        }
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = params;
        self
    }

    pub fn set_meta(&mut self, id: PointId, meta: PointMeta) {
        self.meta[id] = Some(meta);
    }

    pub fn set_landmark(&mut self, name: impl Into<String>, id: PointId) {
        assert!(id < self.len(), "landmark id out of range");
        self.landmarks.insert(name.into(), id);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SparsePoint] {
        &self.points
    }

    pub fn point(&self, id: PointId) -> &SparsePoint {
        &self.points[id]
    }

    pub fn meta(&self, id: PointId) -> Option<PointMeta> {
        self.meta[id]
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn landmarks(&self) -> &BTreeMap<String, PointId> {
        &self.landmarks
    }

    pub fn landmark(&self, name: &str) -> Result<PointId> {
        self.landmarks
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLandmark(name.to_string()))
    }

    /// Resolves a landmark name or a decimal point id.
    pub fn resolve(&self, name_or_id: &str) -> Result<PointId> {
        if let Some(&id) = self.landmarks.get(name_or_id) {
            return Ok(id);
        }
        match name_or_id.parse::<usize>() {
            Ok(id) if id < self.len() => Ok(id),
            _ => Err(Error::UnknownLandmark(name_or_id.to_string())),
        }
    }

    /// First point carrying exactly this meta (arc parameter within 1e-9).
    pub fn find_meta(&self, piece: u32, segment: u32, t: f64) -> Option<PointId> {
        self.meta.iter().position(|m| {
            m.is_some_and(|m| m.piece == piece && m.segment == segment && (m.t - t).abs() <= 1e-9)
        })
    }

    /// Distance in the space's metric.
    #[inline]
    pub fn dist(&self, a: PointId, b: PointId) -> f64 {
        match &self.metric {
            Metric::Sup => sup_distance_f64(&self.points[a], &self.points[b]),
            Metric::Euclidean => euclidean_distance_f64(&self.points[a], &self.points[b]),
            Metric::Matrix(m) => m.get(a, b),
            Metric::Glued(g) => g.distance(a, b),
        }
    }

    pub fn distance(&self, a: PointId, b: PointId) -> ExtReal {
        ExtReal::from_f64_unchecked(self.dist(a, b))
    }

    /// Full distance matrix (quadratic memory; use on small spaces).
    pub fn to_matrix(&self) -> DistanceMatrix {
        if let Metric::Matrix(m) = &self.metric {
            return m.clone();
        }
        DistanceMatrix::from_fn(self.len(), |i, j| self.dist(i, j))
            .expect("metrics are nonnegative")
    }

    /// Writes the JSON space file; matrix metrics go to `<stem>.dmx` next to it.
    pub fn save(&self, path: &Path) -> Result<()> {
        let matrix_file = match &self.metric {
            Metric::Sup | Metric::Euclidean => None,
            Metric::Matrix(_) | Metric::Glued(_) => {
                if self.len() > MATERIALIZE_CAP {
                    return Err(Error::ResourceCap(format!(
                        "{} points exceed the matrix export cap of {MATERIALIZE_CAP}",
                        self.len()
                    )));
                }
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("space");
                let name = format!("{stem}.dmx");
                let dmx = path.with_file_name(&name);
                self.to_matrix()
                    .write_dmx(BufWriter::new(File::create(dmx)?))?;
                Some(name)
            }
        };
        let file = self.to_file(matrix_file);
        serde_json::to_writer(BufWriter::new(File::create(path)?), &file)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: SpaceFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        let matrix = match &file.matrix_file {
            Some(name) => {
                let p = path.with_file_name(name);
                Some(DistanceMatrix::read_dmx(BufReader::new(File::open(p)?))?)
            }
            None => None,
        };
        Self::from_file(file, matrix)
    }

    pub fn to_file(&self, matrix_file: Option<String>) -> SpaceFile {
        let mut labels: BTreeMap<PointId, &str> = BTreeMap::new();
        for (name, &id) in &self.landmarks {
            labels.entry(id).or_insert(name.as_str());
        }
        let points = (0..self.len())
            .map(|id| PointRecord {
                id,
                coords: self.points[id].coords().to_vec(),
                label: labels.get(&id).map(|s| s.to_string()),
                meta: self.meta[id],
            })
            .collect();
        SpaceFile {
            generator: self.generator.clone(),
            params: self.params.clone(),
            points,
            metric_kind: self.metric.kind().to_string(),
            matrix_file,
            landmarks: self.landmarks.clone(),
            resolution: self.resolution,
        }
    }

    pub fn from_file(file: SpaceFile, matrix: Option<DistanceMatrix>) -> Result<Self> {
        let n = file.points.len();
        let mut points = Vec::with_capacity(n);
        let mut meta = Vec::with_capacity(n);
        let mut landmarks = file.landmarks;
        for (k, rec) in file.points.into_iter().enumerate() {
            if rec.id != k {
                return Err(Error::Format(format!(
                    "point ids must be dense and ordered, got {} at {k}",
                    rec.id
                )));
            }
            points.push(SparsePoint::new(rec.coords)?);
            meta.push(rec.meta);
            if let Some(label) = rec.label {
                landmarks.entry(label).or_insert(k);
            }
        }
        let metric = match file.metric_kind.as_str() {
            "sup" => Metric::Sup,
            "euclidean" => Metric::Euclidean,
            "matrix" => {
                let m = matrix
                    .ok_or_else(|| Error::Format("matrix metric without matrix_file".into()))?;
                if m.len() != n {
                    return Err(Error::DimensionMismatch {
                        left: m.len(),
                        right: n,
                    });
                }
                Metric::Matrix(m)
            }
            other => return Err(Error::Format(format!("unknown metric_kind `{other}`"))),
        };
        if let Some((name, _)) = landmarks.iter().find(|(_, &id)| id >= n) {
            return Err(Error::Format(format!("landmark `{name}` out of range")));
        }
        Ok(Self {
            generator: file.generator,
            params: file.params,
            points,
            meta,
            landmarks,
            metric,
            resolution: file.resolution,
        })
    }
}

/// On-disk JSON layout of a space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub generator: String,
    pub params: serde_json::Value,
    pub points: Vec<PointRecord>,
    pub metric_kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<String>,
    #[serde(default)]
    pub landmarks: BTreeMap<String, PointId>,
    #[serde(default)]
    pub resolution: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: PointId,
    pub coords: Vec<(u32, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<PointMeta>,
}
