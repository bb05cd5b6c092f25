//! JSON file formats. Every rational is a `"p/q"` string and every map is
//! key-ordered, so equal values always serialize to equal bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Measure};
use crate::omega::IntervalSet;
use crate::path::{LiftHistory, LiftedPath, PolygonalPath, SampledPath, TargetPath};
use crate::rational::Rational;
use crate::srv::SimpleRandomVariable;

/// `{"space": .., "weights": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub space: FiniteMetricSpace,
    pub weights: Vec<Rational>,
}

impl MeasureFile {
    pub fn from_measure(mu: &Measure) -> Self {
        MeasureFile {
            space: mu.space().as_ref().clone(),
            weights: mu.weights().to_vec(),
        }
    }

    pub fn into_measure(self) -> Result<Measure> {
        Measure::new(Arc::new(self.space), self.weights)
    }
}

/// `{"blocks": {"a": [["0/1","1/2"]], ..}}`; a missing label is an empty
/// block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlocksRecord {
    pub blocks: BTreeMap<String, IntervalSet>,
}

impl BlocksRecord {
    /// Empty blocks are omitted.
    pub fn from_srv(x: &SimpleRandomVariable) -> Self {
        let blocks = x
            .space()
            .points()
            .iter()
            .zip(x.blocks())
            .filter(|(_, b)| !b.is_empty())
            .map(|(p, b)| (p.clone(), b.clone()))
            .collect();
        BlocksRecord { blocks }
    }

    pub fn to_srv(&self, space: &Arc<FiniteMetricSpace>) -> Result<SimpleRandomVariable> {
        let mut blocks = vec![IntervalSet::empty(); space.len()];
        for (label, set) in &self.blocks {
            let i = space.index_of(label).ok_or_else(|| {
                Error::Domain(format!("block label {label:?} is not a point of the space"))
            })?;
            blocks[i] = set.clone();
        }
        SimpleRandomVariable::new(space.clone(), blocks)
    }
}

/// `{"space": .., "blocks": {..}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrvFile {
    pub space: FiniteMetricSpace,
    pub blocks: BTreeMap<String, IntervalSet>,
}

impl SrvFile {
    pub fn from_srv(x: &SimpleRandomVariable) -> Self {
        SrvFile {
            space: x.space().as_ref().clone(),
            blocks: BlocksRecord::from_srv(x).blocks,
        }
    }

    pub fn into_srv(self) -> Result<SimpleRandomVariable> {
        BlocksRecord {
            blocks: self.blocks,
        }
        .to_srv(&Arc::new(self.space))
    }
}

/// Two variables on one space: `{"space": .., "x": {"blocks"}, "y": {"blocks"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFile {
    pub space: FiniteMetricSpace,
    pub x: BlocksRecord,
    pub y: BlocksRecord,
}

impl PairFile {
    pub fn into_pair(self) -> Result<(SimpleRandomVariable, SimpleRandomVariable)> {
        let space = Arc::new(self.space);
        Ok((self.x.to_srv(&space)?, self.y.to_srv(&space)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Polygonal,
    Sampled,
}

/// Path input.
///
/// A polygonal path is given by `breakpoints` and `vertices`. A sampled path
/// is interpolated affinely through `samples` (pairs `[t, weights]`) when
/// present, otherwise through `breakpoints` and `vertices`, and carries its
/// declared `lipschitz` constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFile {
    pub space: FiniteMetricSpace,
    pub kind: PathKind,
    #[serde(default)]
    pub breakpoints: Vec<Rational>,
    #[serde(default)]
    pub vertices: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(Rational, Vec<Rational>)>>,
}

impl PathFile {
    pub fn from_polygonal(beta: &PolygonalPath) -> Self {
        PathFile {
            space: beta.space().as_ref().clone(),
            kind: PathKind::Polygonal,
            breakpoints: beta.breakpoints().to_vec(),
            vertices: beta
                .vertices()
                .iter()
                .map(|v| v.weights().to_vec())
                .collect(),
            lipschitz: None,
            samples: None,
        }
    }

    pub fn sampled_from_table(table: &PolygonalPath, lipschitz: &Rational) -> Self {
        PathFile {
            kind: PathKind::Sampled,
            lipschitz: Some(lipschitz.clone()),
            ..PathFile::from_polygonal(table)
        }
    }

    pub fn into_target(self) -> Result<TargetPath> {
        let space = Arc::new(self.space);
        let (times, weights) = match self.samples {
            Some(samples) if self.kind == PathKind::Sampled => samples.into_iter().unzip(),
            _ => (self.breakpoints, self.vertices),
        };
        let vertices = weights
            .into_iter()
            .map(|w| Measure::new(space.clone(), w))
            .collect::<Result<Vec<_>>>()?;
        let table = PolygonalPath::new(times, vertices)?;
        match self.kind {
            PathKind::Polygonal => Ok(TargetPath::Polygonal(table)),
            PathKind::Sampled => {
                let l = self.lipschitz.ok_or_else(|| {
                    Error::Domain("sampled path needs a \"lipschitz\" constant".into())
                })?;
                Ok(TargetPath::Sampled(SampledPath::from_table(table, l)?))
            }
        }
    }
}

/// Prescribed endpoint variables: `{"start": {"blocks"}, "end": {"blocks"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointsFile {
    pub start: BlocksRecord,
    pub end: BlocksRecord,
}

/// A lift: its vertex variables at the breakpoints, plus the refinement
/// history that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftFile {
    pub space: FiniteMetricSpace,
    pub breakpoints: Vec<Rational>,
    pub vertices: Vec<BlocksRecord>,
    #[serde(default)]
    pub history: LiftHistory,
}

impl LiftFile {
    pub fn from_lift(lift: &LiftedPath, history: LiftHistory) -> Self {
        LiftFile {
            space: lift.space().as_ref().clone(),
            breakpoints: lift.breakpoints().to_vec(),
            vertices: lift.vertices().iter().map(BlocksRecord::from_srv).collect(),
            history,
        }
    }

    pub fn into_lift(self) -> Result<(LiftedPath, LiftHistory)> {
        let space = Arc::new(self.space);
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.to_srv(&space))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            LiftedPath::from_vertices(self.breakpoints, vertices)?,
            self.history,
        ))
    }
}

/// `{"space": .., "corners": [[weights], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornersFile {
    pub space: FiniteMetricSpace,
    pub corners: Vec<Vec<Rational>>,
}

impl CornersFile {
    pub fn into_measures(self) -> Result<Vec<Measure>> {
        let space = Arc::new(self.space);
        self.corners
            .into_iter()
            .map(|w| Measure::new(space.clone(), w))
            .collect()
    }
}

/// Reads and parses a JSON file; parse errors name the file, line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    from_json_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses JSON; semantic failures (metric axioms, partitions) surface as the
/// matching domain error rather than a parse error.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            Error::Domain(e.to_string())
        } else {
            Error::Parse(e.to_string())
        }
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Domain(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    const SPACE: &str = r#"{"points":["a","b"],"dist":[["0/1","1/1"],["1/1","0/1"]]}"#;

    #[test]
    fn measure_round_trip() {
        let text = format!(r#"{{"space":{SPACE},"weights":["3/4","1/4"]}}"#);
        let mu = from_json_str::<MeasureFile>(&text)
            .unwrap()
            .into_measure()
            .unwrap();
        assert_eq!(mu.weights(), &[q(3, 4), q(1, 4)]);
        let again = to_json_string(&MeasureFile::from_measure(&mu)).unwrap();
        assert_eq!(
            from_json_str::<MeasureFile>(&again)
                .unwrap()
                .into_measure()
                .unwrap(),
            mu
        );
    }

    #[test]
    fn blocks_labels() {
        let text = format!(r#"{{"space":{SPACE},"blocks":{{"b":[["0/1","1/1"]]}}}}"#);
        let x = from_json_str::<SrvFile>(&text).unwrap().into_srv().unwrap();
        assert!(x.block(0).is_empty());
        let text = format!(r#"{{"space":{SPACE},"blocks":{{"z":[["0/1","1/1"]]}}}}"#);
        assert!(matches!(
            from_json_str::<SrvFile>(&text).unwrap().into_srv(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn metric_violation_is_not_a_parse_error() {
        let text = r#"{"space":{"points":["a","b"],"dist":[["0/1","1/1"],["1/2","0/1"]]},"weights":["1/1","0/1"]}"#;
        assert!(matches!(
            from_json_str::<MeasureFile>(text),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            from_json_str::<MeasureFile>("{"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn sampled_path_from_samples() {
        let text = format!(
            r#"{{"space":{SPACE},"kind":"sampled","lipschitz":"2/1",
                "samples":[["0/1",["1/1","0/1"]],["1/1",["0/1","1/1"]]]}}"#
        );
        let p = from_json_str::<PathFile>(&text)
            .unwrap()
            .into_target()
            .unwrap();
        assert!(matches!(p, TargetPath::Sampled(_)));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
