//! Built-in monoid families and their configuration model.
//!
//! A family is selected by the `kind` field of a config file (TOML or JSON)
//! and parameterized by a same-named section. [`load_family`] validates the
//! configuration — reporting the offending field by name — and returns a
//! [`MonoidHandle`] wrapping the family implementation.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::MonoidHandle;

pub mod algdyn_f2t;
pub mod algdyn_zd;
pub mod axb;
pub mod graph_product;
pub mod presets;
pub mod selfsim;

/// Configuration errors carry the offending field (or file) by name.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("cannot read config file `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("config syntax: {0}")]
    Syntax(String),
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
        ConfigError::Field { field: field.into(), message: message.into() }
    }
}

/// Top-level config file model. Exactly one family section may be present and
/// it must match `kind`; `run` and `zeta` tune the analysis pipeline.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// One of `AxB`, `SelfSimilar`, `AlgDynZd`, `AlgDynF2t`, `GraphProduct`,
    /// `FreeProduct`.
    pub kind: String,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_similar: Option<SelfSimilarSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alg_dyn_zd: Option<AlgDynZdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_product: Option<GraphProductSection>,
}

/// Pipeline tuning knobs shared by all families.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Cap on the number of enumerated irreducible classes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_cap: Option<usize>,
    /// Bound below which products of component cardinalities are checked for
    /// collisions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeness_bound: Option<u64>,
}

/// ζ-series evaluation request.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSection {
    pub betas: Vec<f64>,
    pub cutoff: u64,
}

/// A self-similar action of a finite group on a finite alphabet, given by
/// explicit multiplication, action, and restriction tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfSimilarSection {
    pub alphabet: Vec<String>,
    pub group: Vec<String>,
    pub identity: String,
    /// `mul[i][j]` is the label of `group[i] · group[j]`.
    pub mul: Vec<Vec<String>>,
    /// `action[i][x]` is the label of the letter `group[i] · alphabet[x]`.
    pub action: Vec<Vec<String>>,
    /// `restriction[i][x]` is the label of the group element `group[i]|_x`.
    pub restriction: Vec<Vec<String>>,
}

/// A lattice dynamical system ℤ^d ⋊ P with injective integer matrices.
///
/// The monoid P is given by generators and `p_mode`: `free` (no relations),
/// `commuting` (all generators commute), or `rewrite` (a finite confluent
/// rewriting system supplied in `rules`). The supported rewriting systems
/// present P as a free abelian monoid on the non-involutive generators
/// extended by one involution that permutes them — each rule must be a
/// commutation `[b,a] → [a,b]`, an involution cancellation `[x,x] → []`, or a
/// conjugation `[x,p] → [p',x]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgDynZdSection {
    pub dimension: usize,
    /// `free`, `commuting`, or `rewrite`.
    pub p_mode: String,
    pub generators: Vec<MatrixGenerator>,
    #[serde(default)]
    pub rules: Vec<RewriteRule>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixGenerator {
    pub label: String,
    /// Row-major d×d integer matrix.
    pub matrix: Vec<Vec<i64>>,
}

/// One rewriting rule over generator labels, applied left-to-right.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewriteRule {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

/// A graph product of vertex monoids over a finite simplicial graph. The
/// `FreeProduct` kind uses the same section with no edges allowed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphProductSection {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<Vec<String>>,
    /// Per-vertex monoid choices; vertices without an entry default to `free`.
    #[serde(default)]
    pub vertex_monoids: std::collections::BTreeMap<String, VertexMonoidSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexMonoidSection {
    /// `free` (ℕ under addition) or `scaled` (ℕ ⋊ ℕ via n ↦ g·n).
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<u64>,
}

/// Loads a config file (TOML by default, JSON for `.json` paths) and builds
/// the configured family.
pub fn load_family_from_path(path: &Path) -> Result<(MonoidHandle, FileConfig), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let config: FileConfig = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| ConfigError::Syntax(e.to_string()))?
    } else {
        toml::from_str(&text).map_err(|e| ConfigError::Syntax(e.to_string()))?
    };
    let handle = load_family(&config)?;
    Ok((handle, config))
}

/// Builds the family described by an in-memory config.
pub fn load_family(config: &FileConfig) -> Result<MonoidHandle, ConfigError> {
    let section_present = |name: &str, present: bool| -> Result<(), ConfigError> {
        if present {
            Err(ConfigError::field(
                name,
                format!("section does not apply to kind `{}`", config.kind),
            ))
        } else {
            Ok(())
        }
    };
    let family: Arc<dyn crate::kernel::Family> = match config.kind.as_str() {
        "AxB" => {
            section_present("self_similar", config.self_similar.is_some())?;
            section_present("alg_dyn_zd", config.alg_dyn_zd.is_some())?;
            section_present("graph_product", config.graph_product.is_some())?;
            Arc::new(axb::AxBFamily::new())
        }
        "AlgDynF2t" => {
            section_present("self_similar", config.self_similar.is_some())?;
            section_present("alg_dyn_zd", config.alg_dyn_zd.is_some())?;
            section_present("graph_product", config.graph_product.is_some())?;
            Arc::new(algdyn_f2t::PolyFamily::new())
        }
        "SelfSimilar" => {
            let section = config.self_similar.as_ref().ok_or_else(|| {
                ConfigError::field("self_similar", "section required for kind `SelfSimilar`")
            })?;
            Arc::new(selfsim::SelfSimilarFamily::from_section(section)?)
        }
        "AlgDynZd" => {
            let section = config.alg_dyn_zd.as_ref().ok_or_else(|| {
                ConfigError::field("alg_dyn_zd", "section required for kind `AlgDynZd`")
            })?;
            Arc::new(algdyn_zd::LatticeFamily::from_section(section)?)
        }
        "GraphProduct" | "FreeProduct" => {
            let section = config.graph_product.as_ref().ok_or_else(|| {
                ConfigError::field("graph_product", "section required for graph/free products")
            })?;
            if config.kind == "FreeProduct" && !section.edges.is_empty() {
                return Err(ConfigError::field(
                    "graph_product.edges",
                    "a free product admits no commutation edges",
                ));
            }
            let kind_tag =
                if config.kind == "FreeProduct" { "free-product" } else { "graph-product" };
            Arc::new(graph_product::GraphProductFamily::from_section(section, kind_tag)?)
        }
        other => {
            return Err(ConfigError::field(
                "kind",
                format!(
                    "unknown family kind `{other}` (expected AxB, SelfSimilar, AlgDynZd, \
                     AlgDynF2t, GraphProduct, or FreeProduct)"
                ),
            ))
        }
    };
    Ok(MonoidHandle::from_family(family))
}

/// Deterministic short digest used to make family tags configuration-specific,
/// so elements of differently configured families cannot be mixed.
pub(crate) fn tag_digest(payload: &str) -> String {
    // FNV-1a, 64-bit: stable across platforms and runs.
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in payload.as_bytes() {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_kind_is_named_in_error() {
        let config = FileConfig { kind: "Nonsense".into(), ..Default::default() };
        let err = load_family(&config).unwrap_err();
        assert!(err.to_string().contains("kind"), "{err}");
        assert!(err.to_string().contains("Nonsense"), "{err}");
    }

    #[test]
    fn missing_section_is_named_in_error() {
        let config = FileConfig { kind: "SelfSimilar".into(), ..Default::default() };
        let err = load_family(&config).unwrap_err();
        assert!(err.to_string().contains("self_similar"), "{err}");
    }

    #[test]
    fn stray_section_is_rejected() {
        let config = FileConfig {
            kind: "AxB".into(),
            graph_product: Some(GraphProductSection {
                vertices: vec!["a".into()],
                edges: vec![],
                vertex_monoids: Default::default(),
            }),
            ..Default::default()
        };
        let err = load_family(&config).unwrap_err();
        assert!(err.to_string().contains("graph_product"), "{err}");
    }

    #[test]
    fn toml_and_json_both_parse() {
        let toml_text = "kind = \"AxB\"\n[run]\nclass_cap = 7\n";
        let c: FileConfig = toml::from_str(toml_text).unwrap();
        assert_eq!(c.kind, "AxB");
        assert_eq!(c.run.class_cap, Some(7));
        let json_text = "{\"kind\": \"AxB\", \"run\": {\"class_cap\": 7}}";
        let c2: FileConfig = serde_json::from_str(json_text).unwrap();
        assert_eq!(c2.run.class_cap, Some(7));
    }

    #[test]
    fn unknown_field_rejected_by_name() {
        let toml_text = "kind = \"AxB\"\nclass_cup = 7\n";
        let err = toml::from_str::<FileConfig>(toml_text).unwrap_err();
        assert!(err.to_string().contains("class_cup"), "{err}");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(tag_digest("abc"), tag_digest("abc"));
        assert_ne!(tag_digest("abc"), tag_digest("abd"));
    }
}
