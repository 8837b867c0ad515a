//! The implication diagram between the properties, annotated with how each
//! arrow is realized here.

use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gtrelations::Label;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: Label,
    pub to: Label,
    pub mechanism: String,
    pub external_construction: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub nodes: Vec<Label>,
    pub edges: Vec<Edge>,
}

pub fn diagram() -> Diagram {
    let edge = |from, to, mechanism: &str| Edge {
        from,
        to,
        mechanism: mechanism.to_string(),
        external_construction: false,
    };
    let mut edges = vec![
        edge(Label::S, Label::P, "theorem 6.1 + smooth"),
        edge(Label::P, Label::T, "identity-morphism"),
        edge(Label::P, Label::A, "complement-morphism"),
        edge(Label::P, Label::B, "external-construction"),
        edge(Label::B, Label::D, "successor-morphism"),
        edge(Label::B, Label::R, "interval-split-pipeline"),
        edge(Label::R, Label::U, "identity-morphism"),
        edge(Label::R, Label::I, "boolean-combination-pipeline"),
    ];
    edges[3].external_construction = true;
    let nodes = vec![
        Label::S,
        Label::P,
        Label::T,
        Label::A,
        Label::B,
        Label::D,
        Label::R,
        Label::U,
        Label::I,
    ];
    Diagram { nodes, edges }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramFormat {
    Dot,
    Json,
}

impl FromStr for DiagramFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(DiagramFormat::Dot),
            "json" => Ok(DiagramFormat::Json),
            _ => Err(Error::Invalid(format!("unknown diagram format {s:?}"))),
        }
    }
}

pub fn emit_diagram(format: DiagramFormat) -> String {
    let d = diagram();
    match format {
        DiagramFormat::Json => serde_json::to_string_pretty(&d).expect("serializable"),
        DiagramFormat::Dot => {
            let mut out = String::from("digraph properties {\n");
            for n in &d.nodes {
                writeln!(out, "  {n};").unwrap();
            }
            for e in &d.edges {
                let style = if e.external_construction { ", style=dashed" } else { "" };
                writeln!(out, "  {} -> {} [label=\"{}\"{style}];", e.from, e.to, e.mechanism).unwrap();
            }
            out.push_str("}\n");
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_has_complement_edge() {
        let dot = emit_diagram(DiagramFormat::Dot);
        assert!(dot.contains("p -> a [label=\"complement-morphism\"]"));
        assert!(dot.contains("p -> b [label=\"external-construction\", style=dashed]"));
        assert!(!dot.contains("par"));
    }

    #[test]
    fn json_has_eight_edges() {
        let v: serde_json::Value = serde_json::from_str(&emit_diagram(DiagramFormat::Json)).unwrap();
        assert_eq!(v["edges"].as_array().unwrap().len(), 8);
        assert_eq!(v["nodes"].as_array().unwrap().len(), 9);
        assert!("svg".parse::<DiagramFormat>().is_err());
    }
}
