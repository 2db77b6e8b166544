//! File loading and argument parsing for the CLI: every failure here is an
//! input error (exit code 2), never a check failure.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use strata_core::exact::GaussianRational;
use strata_core::glue::{BaseSpace, Locus, LocusComponent, SetDescriptor};

type Gq = GaussianRational;

/// An input problem: unreadable file, malformed document, violated
/// invariant, or an ill-formed command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

/// Wraps any displayable module error as an input error.
pub fn input<E: fmt::Display>(e: E) -> CliError {
    CliError(e.to_string())
}

/// Reads and deserializes one JSON document; parse errors carry the file
/// name and the line/column reported by the parser.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError(format!("cannot parse {}: {e}", path.display())))
}

/// Parses a list of scalar literals into exact coordinates.
pub fn parse_scalars(raw: &[String]) -> Result<Vec<Gq>, CliError> {
    raw.iter()
        .map(|s| s.parse::<Gq>().map_err(|e| CliError(format!("bad scalar {s:?}: {e}"))))
        .collect()
}

/// Parameters of a `hecke check` run, loadable from a request file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeCheckRequest {
    /// Root-system spec, e.g. `"A_SL:3"`.
    pub spec: String,
    /// Ball radius the samples are drawn from.
    #[serde(default = "default_radius")]
    pub radius: usize,
    /// Number of random associativity triples.
    #[serde(default = "default_triples")]
    pub triples: usize,
    /// Number of random products for the q = 1 specialization check.
    #[serde(default = "default_products")]
    pub products: usize,
    /// Seed of the deterministic sampler.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_radius() -> usize {
    6
}

fn default_triples() -> usize {
    200
}

fn default_products() -> usize {
    100
}

fn default_seed() -> u64 {
    24601
}

pub const DEFAULT_RADIUS: usize = 6;
pub const DEFAULT_TRIPLES: usize = 200;
pub const DEFAULT_PRODUCTS: usize = 100;
pub const DEFAULT_SEED: u64 = 24601;

/// Splits a trailing `:k` copy selector off a point argument. Copies are
/// numbered from 1 on the command line; `None` means "no selector".
pub fn split_copy(arg: &str) -> (&str, Option<usize>) {
    if let Some((body, suffix)) = arg.rsplit_once(':') {
        if let Ok(k) = suffix.parse::<usize>() {
            return (body, Some(k));
        }
    }
    (arg, None)
}

/// Turns a 1-based command-line copy selector into a 0-based copy index.
pub fn copy_index(selector: Option<usize>) -> Result<usize, CliError> {
    match selector {
        None => Ok(0),
        Some(0) => Err(CliError("copies are numbered from 1".into())),
        Some(k) => Ok(k - 1),
    }
}

/// Resolves the body of a point argument to coordinate literals: inline
/// JSON (`["0","1"]`), the name `origin`, or a file containing the array.
pub fn point_literals(body: &str, base: &BaseSpace) -> Result<Vec<String>, CliError> {
    let trimmed = body.trim();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed)
            .map_err(|e| CliError(format!("bad inline point {trimmed:?}: {e}")));
    }
    if trimmed == "origin" {
        return Ok(match base {
            BaseSpace::Affine { dim } => vec!["0".to_string(); *dim],
            BaseSpace::TorusQuotient { action } => vec!["1".to_string(); action.rank],
        });
    }
    let path = Path::new(trimmed);
    if path.exists() {
        return load(path);
    }
    Err(CliError(format!(
        "unknown point {trimmed:?}: expected \"origin\", inline JSON, or a file"
    )))
}

/// The whole base as a locus: empty linear system on affine space, empty
/// congruence list on a torus.
fn whole_locus(base: &BaseSpace) -> Locus {
    let component = match base {
        BaseSpace::Affine { .. } => LocusComponent::Linear { matrix: vec![], rhs: vec![] },
        BaseSpace::TorusQuotient { .. } => LocusComponent::SubtorusCoset { congruences: vec![] },
    };
    Locus { components: vec![component] }
}

/// Resolves a set argument to a descriptor: the names `whole` and
/// `punctured-line`, inline JSON (`{...}`), or a file containing one.
pub fn set_descriptor(arg: &str, base: &BaseSpace) -> Result<SetDescriptor, CliError> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed)
            .map_err(|e| CliError(format!("bad inline set {trimmed:?}: {e}")));
    }
    match trimmed {
        "whole" => {
            return Ok(SetDescriptor {
                piece: 0,
                copy: None,
                locus: whole_locus(base),
                minus: None,
            });
        }
        "punctured-line" => {
            let BaseSpace::Affine { dim } = base else {
                return Err(CliError(
                    "the set \"punctured-line\" needs an affine base".into(),
                ));
            };
            return Ok(SetDescriptor {
                piece: 0,
                copy: None,
                locus: whole_locus(base),
                minus: Some(Locus {
                    components: vec![LocusComponent::Points {
                        points: vec![vec!["0".to_string(); *dim]],
                    }],
                }),
            });
        }
        _ => {}
    }
    let path = Path::new(trimmed);
    if path.exists() {
        return load(path);
    }
    Err(CliError(format!(
        "unknown set {trimmed:?}: expected \"whole\", \"punctured-line\", inline JSON, or a file"
    )))
}
