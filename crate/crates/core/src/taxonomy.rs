//! Microservice vulnerability taxonomy and keyword tagging.
//!
//! Tags are advisory report metadata; nothing in scoring reads them.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::tokenize;

const TAXONOMY_V1: &str = include_str!("../data/taxonomy-v1.txt");
const RULES_V1: &str = include_str!("../data/taxonomy-rules-v1.txt");

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TaxonomyError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Root,
    Category,
    Class,
    Leaf,
}

impl Level {
    fn parse(s: &str) -> Option<Level> {
        match s {
            "root" => Some(Level::Root),
            "category" => Some(Level::Category),
            "class" => Some(Level::Class),
            "leaf" => Some(Level::Leaf),
            _ => None,
        }
    }

    fn parent_level(self) -> Option<Level> {
        match self {
            Level::Root => None,
            Level::Category => Some(Level::Root),
            Level::Class => Some(Level::Category),
            Level::Leaf => Some(Level::Class),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyNode {
    pub id: String,
    pub name: String,
    pub parent: Option<String>,
    pub level: Level,
}

/// An immutable tree, kept in definition-file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    version: String,
    nodes: Vec<TaxonomyNode>,
    index: HashMap<String, usize>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end())).filter(|(_, l)| !l.trim().is_empty())
}

fn first_comment(text: &str) -> String {
    text.lines()
        .find_map(|l| l.trim().strip_prefix('#').map(|c| c.trim().to_string()))
        .unwrap_or_else(|| "unversioned".into())
}

impl Taxonomy {
    /// The definition shipped with this crate.
    pub fn builtin() -> Self {
        Self::parse(TAXONOMY_V1).expect("shipped taxonomy is valid")
    }

    /// Parses tab-separated `id level parent name` lines. Parents must come
    /// before their children, which rules out cycles.
    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        let mut nodes: Vec<TaxonomyNode> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let err = |line, message: String| TaxonomyError { line, message };
        for (line, raw) in content_lines(text) {
            if raw.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').collect();
            let [id, level, parent, name] = cols[..] else {
                return Err(err(line, format!("expected 4 tab-separated columns, found {}", cols.len())));
            };
            let level = Level::parse(level).ok_or_else(|| err(line, format!("unknown level {level:?}")))?;
            let parent = (parent != "-").then(|| parent.to_string());
            match (&parent, level.parent_level()) {
                (None, None) => {
                    if nodes.iter().any(|n| n.level == Level::Root) {
                        return Err(err(line, "second root node".into()));
                    }
                }
                (Some(p), Some(expected)) => {
                    let &pi = index.get(p).ok_or_else(|| err(line, format!("parent {p:?} not defined earlier")))?;
                    let found = nodes[pi].level;
                    if found != expected {
                        return Err(err(line, format!("a {level:?} node needs a {expected:?} parent, {p:?} is {found:?}")));
                    }
                }
                (None, Some(_)) => return Err(err(line, "only the root may lack a parent".into())),
                (Some(_), None) => return Err(err(line, "the root cannot have a parent".into())),
            }
            if index.insert(id.to_string(), nodes.len()).is_some() {
                return Err(err(line, format!("duplicate id {id:?}")));
            }
            nodes.push(TaxonomyNode { id: id.into(), name: name.trim().into(), parent, level });
        }
        if !nodes.iter().any(|n| n.level == Level::Root) {
            return Err(err(0, "no root node".into()));
        }
        Ok(Self { version: first_comment(text), nodes, index })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TaxonomyNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TaxonomyNode {
        self.nodes.iter().find(|n| n.level == Level::Root).expect("validated at parse")
    }

    pub fn get(&self, id: &str) -> Option<&TaxonomyNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    /// Looks a node up by its display name, ignoring case.
    pub fn find_by_name(&self, name: &str) -> Option<&TaxonomyNode> {
        self.nodes.iter().find(|n| n.name.eq_ignore_ascii_case(name))
    }

    pub fn parent(&self, id: &str) -> Option<&TaxonomyNode> {
        self.get(id)?.parent.as_deref().and_then(|p| self.get(p))
    }

    pub fn children(&self, id: &str) -> Vec<&TaxonomyNode> {
        self.nodes.iter().filter(|n| n.parent.as_deref() == Some(id)).collect()
    }

    /// Ancestors from the parent up to the root.
    pub fn ancestors(&self, id: &str) -> Vec<&TaxonomyNode> {
        let mut out = Vec::new();
        let mut cur = self.parent(id);
        while let Some(node) = cur {
            out.push(node);
            cur = self.parent(&node.id);
        }
        out
    }

    pub fn leaves(&self) -> Vec<&TaxonomyNode> {
        self.nodes.iter().filter(|n| n.level == Level::Leaf).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Rule {
    keywords: Vec<String>,
    node: usize,
}

/// Keyword rules mapping descriptions onto taxonomy nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tagger {
    taxonomy: Taxonomy,
    version: String,
    rules: Vec<Rule>,
}

impl Tagger {
    pub fn builtin() -> Self {
        Self::new(Taxonomy::builtin(), RULES_V1).expect("shipped rules are valid")
    }

    /// Parses `keyword keyword ... => node-id` lines against `taxonomy`.
    pub fn new(taxonomy: Taxonomy, rules_text: &str) -> Result<Self, TaxonomyError> {
        let mut rules = Vec::new();
        for (line, raw) in content_lines(rules_text) {
            if raw.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| TaxonomyError { line, message };
            let (lhs, rhs) = raw.split_once("=>").ok_or_else(|| err("expected `keywords => node-id`".into()))?;
            let node_id = rhs.trim();
            let &node = taxonomy.index.get(node_id).ok_or_else(|| err(format!("unknown node {node_id:?}")))?;
            let keywords: Vec<String> = lhs.split_whitespace().map(str::to_lowercase).collect();
            if keywords.is_empty() {
                return Err(err("rule has no keywords".into()));
            }
            if let Some(k) = keywords.iter().find(|k| tokenize(k) != [k.as_str()]) {
                return Err(err(format!("keyword {k:?} is not a single word")));
            }
            rules.push(Rule { keywords, node });
        }
        Ok(Self { version: first_comment(rules_text), taxonomy, rules })
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Nodes whose rules match, in taxonomy order, without duplicates.
    pub fn tag(&self, description: &str) -> Vec<&TaxonomyNode> {
        let words: HashSet<String> = tokenize(description).into_iter().collect();
        let mut hits: Vec<usize> = self
            .rules
            .iter()
            .filter(|r| r.keywords.iter().all(|k| words.contains(k)))
            .map(|r| r.node)
            .collect();
        hits.sort_unstable();
        hits.dedup();
        hits.into_iter().map(|i| &self.taxonomy.nodes[i]).collect()
    }
}
