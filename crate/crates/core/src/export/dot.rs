use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use crate::checker::render_state;
use crate::model::{state_key, Annotation, Cell, Model, Schema};
use crate::abstraction::AbstractValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Green,
    Red,
    Gray,
}

impl Color {
    fn as_str(self) -> &'static str {
        match self {
            Color::Green => "green",
            Color::Red => "red",
            Color::Gray => "gray",
        }
    }
}

impl FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "green" => Ok(Color::Green),
            "red" => Ok(Color::Red),
            "gray" => Ok(Color::Gray),
            other => Err(format!("unsupported color `{other}`; use green, red, or gray")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LabelMode {
    /// `attr=value` per component.
    #[default]
    Full,
    /// Values only.
    Compact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    /// State keys (see [`state_key`]) to fill with a color.
    pub highlight: BTreeMap<String, Color>,
    pub show_counts: bool,
    pub labels: LabelMode,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            highlight: BTreeMap::new(),
            show_counts: true,
            labels: LabelMode::Full,
        }
    }
}

/// Render a model as a DOT digraph. The start state is green, states
/// with unknown components gray, and highlighted states take their
/// requested color. Output depends only on the model.
pub fn to_dot(model: &Model, opts: &RenderOptions) -> String {
    let mut out = String::new();
    let kind = model.kind();
    writeln!(out, "digraph {kind} {{").unwrap();
    out.push_str("  node [shape=box, style=\"rounded,filled\", fillcolor=white];\n");
    match model {
        Model::Graph(g) => {
            for (i, s) in g.states().iter().enumerate() {
                node(&mut out, i, g.schema(), Some(g.annotation()), s, i == g.start(), opts);
            }
            let mut edges: Vec<_> = g.edges().iter().collect();
            edges.sort_by_key(|e| (e.from, e.to));
            for e in edges {
                edge(&mut out, e.from, e.to, opts.show_counts.then(|| e.count.to_string()));
            }
        }
        Model::Linear(lsm) => {
            let mut cur = lsm.cursor();
            loop {
                let i = cur.pos();
                node(&mut out, i, lsm.schema(), None, cur.state(), i == 0, opts);
                if let Some(step) = cur.next_step() {
                    edge(&mut out, i, i + 1, opts.show_counts.then(|| format!("seq {}", step.seq)));
                }
                if !cur.advance() {
                    break;
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

fn node(
    out: &mut String,
    i: usize,
    schema: &Schema,
    annotation: Option<&Annotation>,
    cells: &[Cell],
    start: bool,
    opts: &RenderOptions,
) {
    let label = render_state(schema, annotation, cells)
        .into_iter()
        .map(|(n, v)| {
            let v = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            match opts.labels {
                LabelMode::Full => format!("{n}={v}"),
                LabelMode::Compact => v,
            }
        })
        .collect::<Vec<_>>()
        .join(", ");
    let unknown = cells
        .iter()
        .any(|c| matches!(c, Cell::Undefined | Cell::Abstract(AbstractValue::Unknown)));
    let color = opts
        .highlight
        .get(&state_key(schema, cells))
        .copied()
        .or(start.then_some(Color::Green))
        .or(unknown.then_some(Color::Gray));
    write!(out, "  s{i} [label=\"{}\"", escape(&label)).unwrap();
    if let Some(c) = color {
        write!(out, ", fillcolor={}", c.as_str()).unwrap();
    }
    out.push_str("];\n");
}

fn edge(out: &mut String, from: usize, to: usize, label: Option<String>) {
    write!(out, "  s{from} -> s{to}").unwrap();
    if let Some(l) = label {
        write!(out, " [label=\"{}\"]", escape(&l)).unwrap();
    }
    out.push_str(";\n");
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}
