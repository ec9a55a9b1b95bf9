use super::{ParseError, SourceSpan};
use crate::topology::TopologyGraph;

/// A loaded topology file. Missing self-loops are added and reported in `notices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyFile {
    pub graph: TopologyGraph,
    pub notices: Vec<String>,
}

/// Reads `nodes <k>` followed by `edge <src> <dst>` lines; `#` starts a comment.
pub fn parse_topology(text: &str) -> Result<TopologyFile, ParseError> {
    let mut nodes: Option<usize> = None;
    let mut edges = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let content = line.split('#').next().unwrap_or("");
        let words: Vec<(usize, &str)> = content
            .split_whitespace()
            .map(|w| (line_start + (w.as_ptr() as usize - content.as_ptr() as usize), w))
            .collect();
        let Some(&(kw_at, kw)) = words.first() else {
            continue;
        };
        let span_of = |at: usize, w: &str| SourceSpan::from_offsets(text, at, at + w.len());
        let number = |i: usize| -> Result<usize, ParseError> {
            let &(at, w) = words.get(i).ok_or_else(|| {
                ParseError::new(format!("`{kw}` needs more arguments"), span_of(kw_at, kw))
            })?;
            w.parse::<usize>()
                .map_err(|_| ParseError::new(format!("expected a number, found {w:?}"), span_of(at, w)))
        };
        let arity = match kw {
            "nodes" => 1,
            "edge" => 2,
            _ => return Err(ParseError::new(format!("unknown statement {kw:?}"), span_of(kw_at, kw))),
        };
        if let Some(&(at, w)) = words.get(arity + 1) {
            return Err(ParseError::new(format!("unexpected {w:?}"), span_of(at, w)));
        }
        match kw {
            "nodes" => {
                if nodes.is_some() {
                    return Err(ParseError::new("`nodes` given twice", span_of(kw_at, kw)));
                }
                let k = number(1)?;
                if k == 0 {
                    return Err(ParseError::new("a graph needs at least one node", span_of(kw_at, kw)));
                }
                nodes = Some(k);
            }
            _ => {
                let k = nodes.ok_or_else(|| ParseError::new("`edge` before `nodes`", span_of(kw_at, kw)))?;
                let (s, d) = (number(1)?, number(2)?);
                for (i, v) in [(1, s), (2, d)] {
                    if v == 0 || v > k {
                        let (at, w) = words[i];
                        return Err(ParseError::new(format!("node {v} outside 1..{k}"), span_of(at, w)));
                    }
                }
                edges.push((s, d));
            }
        }
    }
    let k = nodes.ok_or_else(|| ParseError::new("missing `nodes` statement", SourceSpan::from_offsets(text, 0, 0)))?;
    let mut graph = TopologyGraph::new(k, edges);
    let added = graph.close_reflexively();
    let notices = if added.is_empty() {
        vec![]
    } else {
        let list: Vec<String> = added.iter().map(ToString::to_string).collect();
        vec![format!("added self-loops at node(s) {}", list.join(", "))]
    };
    Ok(TopologyFile { graph, notices })
}
