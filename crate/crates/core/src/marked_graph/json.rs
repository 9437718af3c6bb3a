use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use super::{Edge, LengthPolicy, MarkedGraph, MarkedParts, MetricGraph};
use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q};
use crate::words::{Letter, Word, MAX_RANK};

/// Identifiers and lengths may be written as JSON strings or integers.
fn string_or_int<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        S(String),
        I(i64),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::S(s) => s,
        Raw::I(i) => i.to_string(),
    })
}

fn ids<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    struct Id(#[serde(deserialize_with = "string_or_int")] String);
    Ok(Vec::<Id>::deserialize(d)?.into_iter().map(|i| i.0).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeJson {
    #[serde(deserialize_with = "string_or_int")]
    pub id: String,
    #[serde(deserialize_with = "string_or_int")]
    pub from: String,
    #[serde(deserialize_with = "string_or_int")]
    pub to: String,
    #[serde(deserialize_with = "string_or_int")]
    pub length: String,
}

/// Wire form of a marked graph.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub rank: usize,
    #[serde(deserialize_with = "ids")]
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
    pub marking: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_marking: Option<BTreeMap<String, String>>,
    #[serde(deserialize_with = "string_or_int")]
    pub base_vertex: String,
}

impl GraphJson {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_parts(&self) -> Result<MarkedParts> {
        if self.rank == 0 || self.rank > MAX_RANK {
            return Err(Error::Parse(format!("rank {} out of range", self.rank)));
        }
        let vertices = self.vertices.clone();
        let vid = |id: &str| vertices.iter().position(|v| v == id).ok_or_else(|| Error::UnknownVertex(id.to_string()));
        let mut edges = Vec::new();
        for e in &self.edges {
            if edges.iter().any(|x: &Edge| x.id == e.id) {
                return Err(Error::Parse(format!("duplicate edge id {:?}", e.id)));
            }
            edges.push(Edge { id: e.id.clone(), from: vid(&e.from)?, to: vid(&e.to)?, length: parse_q(&e.length)? });
        }
        let base = vid(&self.base_vertex)?;
        let graph = MetricGraph { vertices, edges };
        let mut images = Vec::new();
        for i in 0..self.rank {
            let key = Letter::new(i, false).to_char().to_string();
            let path = self.marking.get(&key).ok_or_else(|| Error::Parse(format!("marking has no image for {key}")))?;
            images.push(graph.parse_path(path)?);
        }
        if self.marking.len() != self.rank {
            return Err(Error::Parse("marking has images for generators outside the rank".into()));
        }
        let inverse = match &self.inverse_marking {
            None => None,
            Some(map) => {
                let mut words = BTreeMap::new();
                for (id, w) in map {
                    let e = graph.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.clone()))?;
                    words.insert(e, Word::parse_in_rank(w, self.rank)?);
                }
                Some(words)
            }
        };
        Ok(MarkedParts { rank: self.rank, graph, base, images, inverse })
    }

    pub fn to_marked(&self, policy: LengthPolicy) -> Result<MarkedGraph> {
        MarkedGraph::with_policy(self.to_parts()?, policy)
    }

    pub fn from_marked(x: &MarkedGraph) -> Self {
        let g = x.graph();
        let marking = x
            .images()
            .iter()
            .enumerate()
            .map(|(i, p)| (Letter::new(i, false).to_char().to_string(), g.format_path(p)))
            .collect();
        let inv = x.inverse();
        let inverse_marking = (0..g.edges.len())
            .filter(|e| !inv.in_tree[*e])
            .map(|e| (g.edges[e].id.clone(), inv.words[e].to_string()))
            .collect();
        GraphJson {
            rank: x.rank(),
            vertices: g.vertices.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id.clone(),
                    from: g.vertices[e.from].clone(),
                    to: g.vertices[e.to].clone(),
                    length: format_q(&e.length),
                })
                .collect(),
            marking,
            inverse_marking: Some(inverse_marking),
            base_vertex: g.vertices[x.base()].clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROSE: &str = r#"{
        "rank": 2,
        "vertices": ["v"],
        "edges": [
            {"id": "e1", "from": "v", "to": "v", "length": "1/2"},
            {"id": "e2", "from": "v", "to": "v", "length": "1/2"}
        ],
        "marking": {"a": "e1", "b": "e2"},
        "base_vertex": "v"
    }"#;

    #[test]
    fn parse_rose() {
        let x = GraphJson::parse(ROSE).unwrap().to_marked(LengthPolicy::Positive).unwrap();
        assert_eq!(x.rank(), 2);
        let back = GraphJson::from_marked(&x);
        let again = back.to_marked(LengthPolicy::Positive).unwrap();
        assert_eq!(again, x);
    }

    #[test]
    fn integer_ids_accepted() {
        let text = r#"{"rank":2,"vertices":[0],"edges":[{"id":1,"from":0,"to":0,"length":"1/3"},
            {"id":2,"from":0,"to":0,"length":"2/3"}],"marking":{"a":"1","b":"-2"},"base_vertex":0}"#;
        assert!(GraphJson::parse(text).unwrap().to_marked(LengthPolicy::Positive).is_ok());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(GraphJson::parse("{"), Err(Error::Json(_))));
        let bad = ROSE.replace("\"e2\"}", "\"e9\"}");
        assert!(matches!(GraphJson::parse(&bad).unwrap().to_parts(), Err(Error::UnknownEdge(_))));
        let bad = ROSE.replace("\"1/2\"}", "\"1/0\"}");
        assert!(matches!(GraphJson::parse(&bad).unwrap().to_parts(), Err(Error::Parse(_))));
    }
}
