// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Synonym lookups over a knowledge-graph dump.
//!
//! Nodes: `id \t label \t alias1|alias2 [\t lang]`. Edges: `src \t relation \t dst`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead};

use thiserror::Error;

use crate::candidate::Candidate;
use crate::pos::ModuleId;
use crate::text::normalize;

pub const DEFAULT_RELATION: &str = "synonym";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("nodes line {line}: expected `id \\t label [\\t aliases [\\t lang]]`")]
    MalformedNode { line: usize },
    #[error("edges line {line}: expected `src \\t relation \\t dst`")]
    MalformedEdge { line: usize },
    #[error("nodes line {line}: duplicate node id {id:?}")]
    DuplicateNode { line: usize, id: String },
    #[error("edges line {line}: unknown node id {id:?}")]
    DanglingEdge { line: usize, id: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    pub primary_label: String,
    pub aliases: Vec<String>,
    pub lang: Option<String>,
}

impl GraphNode {
    fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.primary_label.as_str()).chain(self.aliases.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: String,
    pub relation: String,
    pub dst: String,
}

#[derive(Debug, Clone, Default)]
pub struct SynonymGraph {
    nodes: BTreeMap<String, GraphNode>,
    edges: Vec<Edge>,
    label_index: BTreeMap<String, BTreeSet<String>>,
    /// Undirected adjacency per relation.
    adjacency: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
}

fn fields(line: &str) -> Vec<&str> {
    line.split('\t').map(str::trim).collect()
}

impl SynonymGraph {
    pub fn load<N: BufRead, E: BufRead>(nodes: N, edges: E) -> Result<Self, GraphError> {
        let mut g = SynonymGraph::default();
        for (i, line) in nodes.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f = fields(&line);
            if f.len() < 2 || f.len() > 4 || f[0].is_empty() || normalize(f[1]).is_empty() {
                return Err(GraphError::MalformedNode { line: i + 1 });
            }
            let aliases = f
                .get(2)
                .map(|a| a.split('|').map(normalize).filter(|a| !a.is_empty()).collect())
                .unwrap_or_default();
            let node = GraphNode {
                primary_label: normalize(f[1]),
                aliases,
                lang: f.get(3).filter(|l| !l.is_empty()).map(|l| l.to_string()),
            };
            g.insert_node(f[0].to_string(), node)
                .map_err(|id| GraphError::DuplicateNode { line: i + 1, id })?;
        }
        for (i, line) in edges.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f = fields(&line);
            if f.len() != 3 || f.iter().any(|x| x.is_empty()) {
                return Err(GraphError::MalformedEdge { line: i + 1 });
            }
            let edge = Edge {
                src: f[0].to_string(),
                relation: f[1].to_string(),
                dst: f[2].to_string(),
            };
            g.insert_edge(edge)
                .map_err(|id| GraphError::DanglingEdge { line: i + 1, id })?;
        }
        Ok(g)
    }

    fn insert_node(&mut self, id: String, node: GraphNode) -> Result<(), String> {
        if self.nodes.contains_key(&id) {
            return Err(id);
        }
        for label in node.labels() {
            self.label_index.entry(label.to_string()).or_default().insert(id.clone());
        }
        self.nodes.insert(id, node);
        Ok(())
    }

    fn insert_edge(&mut self, edge: Edge) -> Result<(), String> {
        for id in [&edge.src, &edge.dst] {
            if !self.nodes.contains_key(id) {
                return Err(id.clone());
            }
        }
        let adj = self.adjacency.entry(edge.relation.clone()).or_default();
        adj.entry(edge.src.clone()).or_default().insert(edge.dst.clone());
        adj.entry(edge.dst.clone()).or_default().insert(edge.src.clone());
        self.edges.push(edge);
        Ok(())
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Node ids carrying `label` as primary label or alias.
    pub fn nodes_labelled(&self, label: &str) -> Option<&BTreeSet<String>> {
        self.label_index.get(label)
    }

    pub fn label_index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.label_index
    }

    /// Neighbors over `relation`, ignoring direction.
    pub fn neighbors(&self, id: &str, relation: &str) -> impl Iterator<Item = &str> {
        self.adjacency
            .get(relation)
            .and_then(|adj| adj.get(id))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }
}

/// Ranks the nodes matching a target. Output must be a subset of `candidates`.
pub trait EntityLinker: Send + Sync {
    fn link(
        &self,
        graph: &SynonymGraph,
        target: &str,
        context: &str,
        candidates: &BTreeSet<String>,
    ) -> Vec<String>;
}

/// Exact primary-label match first, then alias match, then smaller node id.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalLinker;

impl EntityLinker for LexicalLinker {
    fn link(
        &self,
        graph: &SynonymGraph,
        target: &str,
        _context: &str,
        candidates: &BTreeSet<String>,
    ) -> Vec<String> {
        let mut ranked: Vec<&String> = candidates.iter().collect();
        ranked.sort_by_key(|id| {
            let primary = graph.node(id).is_some_and(|n| n.primary_label == target);
            (!primary, id.as_str())
        });
        ranked.into_iter().cloned().collect()
    }
}

pub fn link_entity(
    graph: &SynonymGraph,
    linker: &dyn EntityLinker,
    target: &str,
    context: &str,
) -> Option<String> {
    let target = normalize(target);
    let candidates = graph.nodes_labelled(&target)?;
    linker
        .link(graph, &target, context, candidates)
        .into_iter()
        .find(|id| candidates.contains(id))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KgConfig {
    pub limit: usize,
    pub relation_name: String,
    /// Keep only neighbors tagged with this language (untagged nodes pass).
    pub lang: Option<String>,
}

impl Default for KgConfig {
    fn default() -> Self {
        KgConfig {
            limit: 15,
            relation_name: DEFAULT_RELATION.to_string(),
            lang: None,
        }
    }
}

/// Primary labels of synonym neighbors of `node`, in node-id order.
pub fn synonym_candidates(graph: &SynonymGraph, node: &str, cfg: &KgConfig) -> Vec<Candidate> {
    let Some(own) = graph.node(node) else {
        return Vec::new();
    };
    let own_labels: BTreeSet<&str> = own.labels().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for id in graph.neighbors(node, &cfg.relation_name) {
        if out.len() >= cfg.limit {
            break;
        }
        let Some(n) = graph.node(id) else { continue };
        if let (Some(want), Some(have)) = (&cfg.lang, &n.lang) {
            if want != have {
                continue;
            }
        }
        let label = n.primary_label.as_str();
        if own_labels.contains(label) || !seen.insert(label) {
            continue;
        }
        out.push(Candidate::from_lemma(label.to_string(), ModuleId::Kg, 1.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const NODES: &str = "\
A\tautomobile\tcar|motorcar
B\tcar\t
C\tmotor vehicle\tauto
";
    const EDGES: &str = "\
A\tsynonym\tB
C\tsynonym\tA
";

    fn graph(nodes: &str, edges: &str) -> SynonymGraph {
        SynonymGraph::load(nodes.as_bytes(), edges.as_bytes()).unwrap()
    }

    fn labels(c: &[Candidate]) -> Vec<&str> {
        c.iter().map(|c| c.lemma.as_str()).collect()
    }

    #[test]
    fn loads_fixture() {
        let g = graph(NODES, EDGES);
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(g.node("B").unwrap().aliases, Vec::<String>::new());
        assert_eq!(g.nodes_labelled("car").unwrap().iter().collect::<Vec<_>>(), ["A", "B"]);
        assert!(g.nodes_labelled("motorcar").unwrap().contains("A"));
    }

    #[test]
    fn label_index_is_transpose() {
        let g = graph(NODES, EDGES);
        for (label, ids) in g.label_index() {
            for id in ids {
                assert!(g.node(id).unwrap().labels().any(|l| l == label));
            }
        }
        for id in ["A", "B", "C"] {
            for l in g.node(id).unwrap().labels() {
                assert!(g.nodes_labelled(l).unwrap().contains(id));
            }
        }
    }

    #[test]
    fn load_errors() {
        let dangling = SynonymGraph::load(NODES.as_bytes(), "A\tsynonym\tB\nA\tsynonym\tZ\n".as_bytes());
        assert!(matches!(dangling, Err(GraphError::DanglingEdge { line: 2, ref id }) if id == "Z"));
        let dup = SynonymGraph::load("A\tx\nA\ty\n".as_bytes(), "".as_bytes());
        assert!(matches!(dup, Err(GraphError::DuplicateNode { line: 2, .. })));
        let bad = SynonymGraph::load("A\n".as_bytes(), "".as_bytes());
        assert!(matches!(bad, Err(GraphError::MalformedNode { line: 1 })));
        let bad = SynonymGraph::load(NODES.as_bytes(), "A\tB\n".as_bytes());
        assert!(matches!(bad, Err(GraphError::MalformedEdge { line: 1 })));
    }

    #[test]
    fn linking() {
        let g = graph(NODES, EDGES);
        assert_eq!(link_entity(&g, &LexicalLinker, "automobile", "").as_deref(), Some("A"));
        // "car" is A's alias and B's primary label
        assert_eq!(link_entity(&g, &LexicalLinker, "Car", "").as_deref(), Some("B"));
        assert_eq!(link_entity(&g, &LexicalLinker, "auto", "").as_deref(), Some("C"));
        assert_eq!(link_entity(&g, &LexicalLinker, "bicycle", ""), None);
        let g2 = graph("Q2\tbank\t\nQ1\tbank\t\nQ0\triver\tbank\n", "");
        assert_eq!(link_entity(&g2, &LexicalLinker, "bank", "").as_deref(), Some("Q1"));
    }

    #[test]
    fn bidirectional_traversal() {
        let g = graph(NODES, EDGES);
        let cfg = KgConfig::default();
        // B's label "car" is one of A's aliases
        assert_eq!(labels(&synonym_candidates(&g, "A", &cfg)), ["motor vehicle"]);
        assert_eq!(labels(&synonym_candidates(&g, "B", &cfg)), ["automobile"]);
        let c = synonym_candidates(&g, "C", &cfg);
        assert_eq!(labels(&c), ["automobile"]);
        assert_eq!((c[0].source, c[0].module_score), (ModuleId::Kg, 1.0));
    }

    #[test]
    fn other_relations_and_isolated_nodes() {
        let g = graph("A\talpha\nB\tbeta\nC\tgamma\n", "A\thypernym\tB\n");
        assert!(synonym_candidates(&g, "A", &KgConfig::default()).is_empty());
        assert!(synonym_candidates(&g, "C", &KgConfig::default()).is_empty());
        let cfg = KgConfig { relation_name: "hypernym".into(), ..KgConfig::default() };
        assert_eq!(labels(&synonym_candidates(&g, "B", &cfg)), ["alpha"]);
    }

    #[test]
    fn language_filter_and_limit() {
        let g = graph(
            "A\tdog\t\ten\nB\tchien\t\tfr\nC\thound\t\ten\nD\tpooch\t\nE\thound\t\ten\n",
            "A\tsynonym\tB\nA\tsynonym\tC\nA\tsynonym\tD\nA\tsynonym\tE\n",
        );
        let all = synonym_candidates(&g, "A", &KgConfig::default());
        assert_eq!(labels(&all), ["chien", "hound", "pooch"]);
        let en = KgConfig { lang: Some("en".into()), ..KgConfig::default() };
        assert_eq!(labels(&synonym_candidates(&g, "A", &en)), ["hound", "pooch"]);
        let one = KgConfig { limit: 1, ..KgConfig::default() };
        assert_eq!(labels(&synonym_candidates(&g, "A", &one)), ["chien"]);
    }

    fn random_dump(seed: u64) -> (Vec<String>, Vec<String>) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words = ["red", "blue", "green", "cyan", "teal", "navy"];
        let n = rng.gen_range(2..10);
        let nodes = (0..n)
            .map(|i| format!("n{i}\t{}\t{}", words[rng.gen_range(0..6)], words[rng.gen_range(0..6)]))
            .collect();
        let edges = (0..rng.gen_range(0..20))
            .map(|_| {
                let rel = if rng.gen_bool(0.8) { "synonym" } else { "related" };
                format!("n{}\t{rel}\tn{}", rng.gen_range(0..n), rng.gen_range(0..n))
            })
            .collect();
        (nodes, edges)
    }

    fn all_outputs(nodes: &[String], edges: &[String]) -> Vec<Vec<String>> {
        let g = graph(&nodes.join("\n"), &edges.join("\n"));
        let mut ids: Vec<&String> = g.nodes.keys().collect();
        ids.sort();
        ids.iter()
            .map(|id| {
                let mut out: Vec<String> = synonym_candidates(&g, id, &KgConfig::default())
                    .into_iter()
                    .map(|c| c.lemma)
                    .collect();
                out.sort();
                out
            })
            .collect()
    }

    proptest! {
        #[test]
        fn reversal_and_shuffle_invariance(seed in any::<u64>()) {
            let (mut nodes, mut edges) = random_dump(seed);
            let base = all_outputs(&nodes, &edges);
            let reversed: Vec<String> = edges
                .iter()
                .map(|e| {
                    let f: Vec<&str> = e.split('\t').collect();
                    format!("{}\t{}\t{}", f[2], f[1], f[0])
                })
                .collect();
            prop_assert_eq!(&all_outputs(&nodes, &reversed), &base);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            nodes.shuffle(&mut rng);
            edges.shuffle(&mut rng);
            prop_assert_eq!(&all_outputs(&nodes, &edges), &base);
            let g = graph(&nodes.join("\n"), &edges.join("\n"));
            for id in g.nodes.keys() {
                let own: BTreeSet<&str> = g.node(id).unwrap().labels().collect();
                let neighbor_labels: BTreeSet<&str> = g
                    .neighbors(id, DEFAULT_RELATION)
                    .map(|n| g.node(n).unwrap().primary_label.as_str())
                    .collect();
                for c in synonym_candidates(&g, id, &KgConfig::default()) {
                    prop_assert!(!own.contains(c.lemma.as_str()));
                    prop_assert!(neighbor_labels.contains(c.lemma.as_str()));
                }
            }
        }
    }
}
