//! Human-readable rendering of a pipeline, root first.
//!
//! ```text
//! LogisticRegression C=1.0
//!   CombineDFs
//!     branch 1:
//!       INPUT
//!     branch 2:
//!       StandardScaler
//! ```
//!
//! A unary operator reading straight from the input has no child line.

use super::{Node, PipelineTree};
use crate::primitives::{ParamValue, COMBINE_TOKEN};

pub fn export_readable(t: &PipelineTree) -> String {
    let mut lines = Vec::new();
    render(t.root(), 0, &mut lines);
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn render(node: &Node, indent: usize, lines: &mut Vec<String>) {
    let pad = "  ".repeat(indent);
    match node {
        Node::Leaf => lines.push(format!("{pad}INPUT")),
        Node::Unary { spec, child } => {
            let params: Vec<String> = spec
                .params()
                .into_iter()
                .map(|(name, value)| match value {
                    ParamValue::Int(v) => format!("{name}={v}"),
                    ParamValue::Float(v) => format!("{name}={v:?}"),
                })
                .collect();
            if params.is_empty() {
                lines.push(format!("{pad}{}", spec.kind()));
            } else {
                lines.push(format!("{pad}{} {}", spec.kind(), params.join(" ")));
            }
            if child.is_operator() {
                render(child, indent + 1, lines);
            }
        }
        Node::Combine { left, right } => {
            lines.push(format!("{pad}{COMBINE_TOKEN}"));
            for (i, branch) in [left, right].into_iter().enumerate() {
                lines.push(format!("{pad}  branch {}:", i + 1));
                render(branch, indent + 2, lines);
            }
        }
    }
}
