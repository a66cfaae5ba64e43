//! Map-spec files: JSON documents naming a map by components or builtin.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::builtin::{axis_names, builtin_map, BuiltinParams};
use crate::expr::ParseError;
use crate::map::{MapError, MapSpec};
use crate::sampling::Window;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {msg}")]
    Syntax {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("give exactly one of `components` and `builtin`")]
    Source,
    #[error("`vars` has {vars} names but dimension is {dim}")]
    VarCount { vars: usize, dim: usize },
    #[error("components[{index}], column {column}: {source}")]
    Expression {
        index: usize,
        column: usize,
        source: ParseError,
    },
    #[error(transparent)]
    Map(MapError),
}

impl From<MapError> for SpecError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Parse { index, source } => SpecError::Expression {
                index,
                column: source.position() + 1,
                source,
            },
            other => SpecError::Map(other),
        }
    }
}

/// A loaded map together with the file defaults and a digest of the input.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub map: MapSpec,
    pub file: MapSpecFile,
    /// `sha256:` followed by the hex digest of the input bytes.
    pub digest: String,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl MapSpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Syntax {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn to_map(&self) -> Result<MapSpec, SpecError> {
        if self.version != FORMAT_VERSION {
            return Err(SpecError::Version(self.version));
        }
        let map = match (&self.components, &self.builtin) {
            (Some(comps), None) => {
                let dim = self.dim.unwrap_or(comps.len());
                if comps.len() != dim {
                    return Err(MapError::ComponentCount {
                        dim,
                        components: comps.len(),
                    }
                    .into());
                }
                let vars: Vec<String> = match &self.vars {
                    Some(v) => v.clone(),
                    None => axis_names(dim).iter().cloned().collect(),
                };
                if vars.len() != dim {
                    return Err(SpecError::VarCount {
                        vars: vars.len(),
                        dim,
                    });
                }
                MapSpec::parse(&vars, comps)?
            }
            (None, Some(text)) => {
                let text = if text.starts_with("builtin:") {
                    text.clone()
                } else {
                    format!("builtin:{text}")
                };
                let map = builtin_map(&text.parse::<BuiltinParams>()?)?;
                if let Some(dim) = self.dim {
                    if dim != map.dim() {
                        return Err(MapError::DimensionMismatch {
                            left: dim,
                            right: map.dim(),
                        }
                        .into());
                    }
                }
                map
            }
            _ => return Err(SpecError::Source),
        };
        Ok(match &self.window {
            Some(axes) => map.with_window(Window::new(axes.clone()).map_err(MapError::from)?)?,
            None => map,
        })
    }
}

/// Reads a map-spec file, or takes `builtin:...` text inline.
pub fn parse_mapspec(source: &str) -> Result<LoadedSpec, SpecError> {
    if source.starts_with("builtin:") {
        let file = MapSpecFile {
            version: FORMAT_VERSION,
            builtin: Some(source.to_string()),
            ..MapSpecFile::default()
        };
        return Ok(LoadedSpec {
            map: file.to_map()?,
            file,
            digest: digest(source.as_bytes()),
        });
    }
    let bytes = std::fs::read(Path::new(source)).map_err(|e| SpecError::Io {
        path: source.to_string(),
        source: e,
    })?;
    let text = String::from_utf8_lossy(&bytes);
    let file = MapSpecFile::from_json(&text)?;
    Ok(LoadedSpec {
        map: file.to_map()?,
        file,
        digest: digest(&bytes),
    })
}
