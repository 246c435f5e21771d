//! The document format: TOML with one array of tables per kind of declaration.
//!
//! Arrows are written `label: src -> dst`, optionally followed by `@ n:p` for
//! an index other than `1:0`. Subsets are comma-separated point labels.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: cannot read: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{col}: {message}")]
    Syntax {
        path: String,
        line: usize,
        col: usize,
        message: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universe: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub category: Vec<CategoryDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topology: Vec<TopologyDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub space: Vec<SpaceDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub map: Vec<MapDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub etale: Vec<EtaleDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub setmap: Vec<SetMapDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphism: Vec<MorphismDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relation: Vec<RelationDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDecl {
    pub name: String,
    pub objects: Vec<String>,
    /// `[name, src, dst]` for each non-identity arrow.
    #[serde(default)]
    pub arrows: Vec<[String; 3]>,
    /// `[g, f, g∘f]` for composable non-identity pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compose: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDecl {
    pub name: String,
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

/// A space is built from exactly one source, then patched entry by entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDecl {
    pub name: String,
    /// The Alexandroff space of a declared category.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alexandroff: Option<String>,
    /// The encoding of a declared topology.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encode: Option<String>,
    /// A copy of another declared space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    /// Raw points; the tables start empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    /// Arrows to add to their hom sets.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hom: Vec<String>,
    /// Arrows to remove from their hom sets.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub remove: Vec<String>,
    /// Identity label at each point.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ident: BTreeMap<String, String>,
    /// `[arrow, index, label]`; an empty label deletes the entry.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reindex: Vec<[String; 3]>,
    /// `[s, r, label]` for `s · r`; an empty label deletes the entry.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comp: Vec<[String; 3]>,
    /// `"invalid"` marks a space that must fail the axiom check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDecl {
    pub name: String,
    pub src: String,
    pub dst: String,
    /// Point label to point label.
    pub points: BTreeMap<String, String>,
    /// `[arrow of src, label in dst]`; when empty, the unique continuity
    /// structure on the point map is used.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrows: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftDecl {
    /// A singleton-indexed base arrow.
    pub arrow: String,
    /// Position of the lift's target in the target fibre, per source element.
    pub to: Vec<usize>,
}

/// Either a declared map, or fibre sizes and lifts over a base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaleDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fibres: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lifts: Vec<LiftDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetMapDecl {
    pub name: String,
    pub base: String,
    /// The value at each point.
    pub values: BTreeMap<String, Vec<usize>>,
    /// `[arrow, function]` for singleton-indexed arrows; identities default
    /// to identity functions.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub name: String,
    pub src: String,
    pub dst: String,
    /// The component function at each point.
    pub components: BTreeMap<String, String>,
}

/// An equivalence relation on a set-valued map; the diagonal is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDecl {
    pub name: String,
    pub on: String,
    #[serde(default)]
    pub pairs: BTreeMap<String, Vec<[usize; 2]>>,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

impl Document {
    pub fn parse(src: &str, path: &str) -> Result<Document, ParseError> {
        toml::from_str(src).map_err(|e| {
            let (line, col) = e.span().map_or((1, 1), |s| line_col(src, s.start));
            ParseError::Syntax {
                path: path.to_string(),
                line,
                col,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Document, ParseError> {
        let shown = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
            path: shown.clone(),
            source,
        })?;
        Document::parse(&src, &shown)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("documents serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
universe = "upto:2"

[[category]]
name = "C2"
objects = ["u", "v"]
arrows = [["f", "u", "v"]]

[[space]]
name = "X"
alexandroff = "C2"
"#;

    #[test]
    fn parses_a_small_document() {
        let d = Document::parse(SAMPLE, "sample").unwrap();
        assert_eq!(d.category.len() + d.space.len(), 2);
        assert_eq!(d.space[0].alexandroff.as_deref(), Some("C2"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let bad = "[[category]]\nname = \"C\"\nobjects = [\"u\",\n";
        match Document::parse(bad, "bad.toml") {
            Err(ParseError::Syntax { line, col, .. }) => assert!(line >= 3 && col >= 1),
            other => panic!("{other:?}"),
        }
        let unknown = "[[category]]\nname = \"C\"\nobjects = []\ncolour = 1\n";
        match Document::parse(unknown, "bad.toml") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn serialization_round_trips() {
        let d = Document::parse(SAMPLE, "sample").unwrap();
        assert_eq!(Document::parse(&d.to_toml(), "again").unwrap(), d);
    }
}
