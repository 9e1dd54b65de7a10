//! Line-oriented graph text format:
//!
//! ```text
//! # comment
//! vertex a
//! vertex b
//! edge a -> b
//! ```

use super::{GraphError, Network, Vertex};

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// One meaningful line of a graph-like file.
pub(crate) enum GraphLine<'a> {
    Vertex(&'a str),
    Edge(&'a str, &'a str),
    /// A line whose keyword is not part of the plain graph format.
    Other(&'a str, &'a str),
}

pub(crate) fn classify(line_no: usize, line: &str) -> Result<Option<GraphLine<'_>>, GraphError> {
    let line = strip_comment(line).trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (keyword, rest) = match line.split_once(char::is_whitespace) {
        Some((k, r)) => (k, r.trim()),
        None => (line, ""),
    };
    let syntax = |message: String| GraphError::Syntax {
        line: line_no,
        message,
    };
    match keyword {
        "vertex" => {
            if rest.is_empty() || rest.contains(char::is_whitespace) {
                return Err(syntax(format!("expected `vertex <name>`, found {line:?}")));
            }
            Ok(Some(GraphLine::Vertex(rest)))
        }
        "edge" => {
            let Some((a, b)) = rest.split_once("->") else {
                return Err(syntax(format!(
                    "expected `edge <a> -> <b>`, found {line:?}"
                )));
            };
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty()
                || b.is_empty()
                || a.contains(char::is_whitespace)
                || b.contains(char::is_whitespace)
            {
                return Err(syntax(format!("malformed edge {line:?}")));
            }
            Ok(Some(GraphLine::Edge(a, b)))
        }
        other => Ok(Some(GraphLine::Other(other, rest))),
    }
}

fn at_line(line: usize, err: GraphError) -> GraphError {
    match err {
        GraphError::Syntax { .. } => err,
        other => GraphError::Syntax {
            line,
            message: other.to_string(),
        },
    }
}

/// Parses the graph text format. Duplicate vertices, self-loops and edges
/// with undeclared endpoints are rejected with the offending line number.
pub fn parse_network(text: &str) -> Result<Network, GraphError> {
    let mut net = Network::default();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        match classify(line_no, raw)? {
            None => {}
            Some(GraphLine::Vertex(v)) => net
                .add_vertex(Vertex::new(v))
                .map_err(|e| at_line(line_no, e))?,
            Some(GraphLine::Edge(a, b)) => edges.push((line_no, a, b)),
            Some(GraphLine::Other(k, _)) => {
                return Err(GraphError::Syntax {
                    line: line_no,
                    message: format!("unknown keyword {k:?}"),
                })
            }
        }
    }
    for (line_no, a, b) in edges {
        net.add_edge(Vertex::new(a), Vertex::new(b))
            .map_err(|e| at_line(line_no, e))?;
    }
    Ok(net)
}

pub fn render_network(net: &Network) -> String {
    let mut out = String::new();
    for v in net.vertices() {
        out.push_str(&format!("vertex {v}\n"));
    }
    for (a, b) in net.edges() {
        out.push_str(&format!("edge {a} -> {b}\n"));
    }
    out
}
