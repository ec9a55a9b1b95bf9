//! Communication topologies as directed reflexive graphs, and their translation into
//! axiom schemata: node `n` receives from every other node with an edge into `n`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::AxiomSchema;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TopologyGraph {
    nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl TopologyGraph {
    /// Graph with `nodes` nodes and the given edges, taken as is (see [`TopologyGraph::reflexive`]).
    pub fn new(nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> TopologyGraph {
        TopologyGraph { nodes, edges: edges.into_iter().collect() }
    }

    /// Same as [`TopologyGraph::new`] with every self-loop added.
    pub fn reflexive(nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> TopologyGraph {
        let mut g = TopologyGraph::new(nodes, edges);
        g.edges.extend((1..=nodes).map(|n| (n, n)));
        g
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edges.contains(&(src, dst))
    }

    /// Self-loops that are absent, in node order.
    pub fn missing_self_loops(&self) -> Vec<usize> {
        (1..=self.nodes).filter(|&n| !self.has_edge(n, n)).collect()
    }

    /// Adds missing self-loops and reports which nodes got one.
    pub fn close_reflexively(&mut self) -> Vec<usize> {
        let missing = self.missing_self_loops();
        for &n in &missing {
            self.edges.insert((n, n));
        }
        missing
    }
}

impl fmt::Display for TopologyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.nodes)?;
        for (s, d) in &self.edges {
            writeln!(f, "edge {s} {d}")?;
        }
        Ok(())
    }
}

/// Every missing self-loop and out-of-range edge; empty when the graph is valid.
pub fn validate_graph(g: &TopologyGraph) -> Vec<String> {
    let mut diags = Vec::new();
    if g.nodes == 0 {
        diags.push("a graph needs at least one node".to_string());
    }
    for &(s, d) in &g.edges {
        if s == 0 || d == 0 || s > g.nodes || d > g.nodes {
            diags.push(format!("edge {s} -> {d} has an endpoint outside 1..{}", g.nodes));
        }
    }
    for n in g.missing_self_loops() {
        diags.push(format!("missing self-loop at node {n}"));
    }
    diags
}

/// Disjunct `n` lists the sorted non-self sources of edges into `n`, or is
/// `Bot` when the self-loop is the only incoming edge.
pub fn extract_axiom(g: &TopologyGraph) -> Result<AxiomSchema> {
    let diags = validate_graph(g);
    if !diags.is_empty() {
        return Err(Error::Graph(diags));
    }
    let disjuncts = (1..=g.nodes)
        .map(|n| {
            let sources: Vec<usize> = (1..=g.nodes).filter(|&s| s != n && g.has_edge(s, n)).collect();
            (!sources.is_empty()).then_some(sources)
        })
        .collect();
    AxiomSchema::new(disjuncts)
}

/// Inverse of [`extract_axiom`]: an edge `i -> j` for each outlink, plus all self-loops.
pub fn schema_to_graph(s: &AxiomSchema) -> TopologyGraph {
    let m = s.len();
    let edges = (1..=m).flat_map(|j| s.outlinks(j).unwrap_or(&[]).iter().map(move |&i| (i, j)));
    TopologyGraph::reflexive(m, edges)
}

/// All reflexive graphs on `nodes` nodes, one per subset of the non-self edges.
pub fn all_reflexive_graphs(nodes: usize) -> impl Iterator<Item = TopologyGraph> {
    let pairs: Vec<(usize, usize)> = (1..=nodes)
        .flat_map(|s| (1..=nodes).filter(move |&d| d != s).map(move |d| (s, d)))
        .collect();
    assert!(pairs.len() < 64, "too many nodes to enumerate");
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e);
        TopologyGraph::reflexive(nodes, edges)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The four-node example: 1 <-> 2, 1 -> 3, 2 -> 3, 4 -> 1.
    fn example() -> TopologyGraph {
        TopologyGraph::reflexive(4, [(1, 2), (2, 1), (1, 3), (2, 3), (4, 1)])
    }

    #[test]
    fn validation() {
        assert!(validate_graph(&TopologyGraph::reflexive(1, [])).is_empty());
        assert!(validate_graph(&TopologyGraph::reflexive(2, [(1, 2)])).is_empty());
        let diags = validate_graph(&TopologyGraph::new(2, [(1, 2)]));
        assert_eq!(diags, vec!["missing self-loop at node 1", "missing self-loop at node 2"]);
        assert_eq!(validate_graph(&TopologyGraph::reflexive(2, [(1, 3)])).len(), 1);
    }

    #[test]
    fn example_axiom() {
        let s = extract_axiom(&example()).unwrap();
        assert_eq!(
            s.notation(),
            "(A1 -> A1 /\\ A2 /\\ A4) \\/ (A2 -> A2 /\\ A1) \\/ (A3 -> A3 /\\ A1 /\\ A2) \\/ (A4 -> A4 /\\ Bot)"
        );
        assert_eq!(schema_to_graph(&s), example());
    }

    #[test]
    fn em_and_cycles() {
        assert_eq!(extract_axiom(&TopologyGraph::reflexive(2, [(1, 2)])).unwrap(), AxiomSchema::em());
        let c3 = TopologyGraph::reflexive(3, [(1, 2), (2, 3), (3, 1)]);
        assert_eq!(extract_axiom(&c3).unwrap(), AxiomSchema::ring(3).unwrap());
        let ring7 = TopologyGraph::reflexive(7, (1..=7).map(|i| (i, i % 7 + 1)));
        assert_eq!(extract_axiom(&ring7).unwrap(), AxiomSchema::ring(7).unwrap());
        assert_eq!(schema_to_graph(&AxiomSchema::ring(7).unwrap()), ring7);
    }

    #[test]
    fn single_node() {
        let s = extract_axiom(&TopologyGraph::reflexive(1, [])).unwrap();
        assert_eq!(s.notation(), "(A1 -> A1 /\\ Bot)");
        assert_eq!(schema_to_graph(&s), TopologyGraph::reflexive(1, []));
    }

    #[test]
    fn invalid_graph_has_no_axiom() {
        assert!(extract_axiom(&TopologyGraph::new(2, [(1, 2)])).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(all_reflexive_graphs(1).count(), 1);
        assert_eq!(all_reflexive_graphs(2).count(), 4);
        assert_eq!(all_reflexive_graphs(3).count(), 64);
    }
}
