//! Finite hypergraphs, vertex stars, units and the unit contraction.
//!
//! Vertices are addressed internally by a dense index `0..n` assigned in
//! label order (numeric order when every label is an integer). All matrices
//! in the crate are indexed by that order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HypergraphError {
    #[error("malformed hypergraph document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("hypergraph has no vertices")]
    NoVertices,
    #[error("duplicate vertex label `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(String),
    #[error("edge `{0}` has no members")]
    EmptyEdge(String),
    #[error("edge `{edge}` lists vertex `{vertex}` more than once")]
    RepeatedMember { edge: String, vertex: String },
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownMember { edge: String, vertex: String },
    #[error("edges `{first}` and `{second}` have the same member set")]
    DuplicateMemberSet { first: String, second: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

/// Input document: `{"vertices": [..], "edges": [{"id": .., "members": [..]}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    pub id: String,
    /// Member vertex indices, ascending.
    pub members: Vec<usize>,
}

impl Hyperedge {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    labels: Vec<String>,
    index_of: HashMap<String, usize>,
    edges: Vec<Hyperedge>,
    edge_index_of: HashMap<String, usize>,
    /// `stars[v]` is the ascending list of edge indices containing `v`.
    stars: Vec<Vec<usize>>,
}

/// Compares vertex labels numerically when both are integers, else lexicographically.
fn label_order(numeric: bool) -> impl Fn(&String, &String) -> Ordering {
    move |a, b| {
        if numeric {
            let (x, y) = (a.parse::<i128>().unwrap(), b.parse::<i128>().unwrap());
            x.cmp(&y).then_with(|| a.cmp(b))
        } else {
            a.cmp(b)
        }
    }
}

impl Hypergraph {
    /// Builds a validated hypergraph; vertices are re-ordered by label.
    pub fn new<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (String, Vec<String>)>,
    ) -> Result<Self, HypergraphError> {
        let mut labels: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let numeric = !labels.is_empty() && labels.iter().all(|l| l.parse::<i128>().is_ok());
        labels.sort_by(label_order(numeric));
        Self::with_vertex_order(labels, edges)
    }

    /// Builds a validated hypergraph keeping the given vertex order as the index order.
    pub(crate) fn with_vertex_order(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (String, Vec<String>)>,
    ) -> Result<Self, HypergraphError> {
        if labels.is_empty() {
            return Err(HypergraphError::NoVertices);
        }
        let mut index_of = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index_of.insert(l.clone(), i).is_some() {
                return Err(HypergraphError::DuplicateVertex(l.clone()));
            }
        }

        let mut built: Vec<Hyperedge> = Vec::new();
        let mut edge_index_of = HashMap::new();
        let mut by_members: HashMap<Vec<usize>, usize> = HashMap::new();
        for (id, members) in edges {
            if members.is_empty() {
                return Err(HypergraphError::EmptyEdge(id));
            }
            let mut idx = Vec::with_capacity(members.len());
            for m in &members {
                match index_of.get(m) {
                    Some(&v) => idx.push(v),
                    None => {
                        return Err(HypergraphError::UnknownMember {
                            edge: id,
                            vertex: m.clone(),
                        })
                    }
                }
            }
            idx.sort_unstable();
            if let Some(w) = idx.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedMember {
                    edge: id,
                    vertex: labels[w[0]].clone(),
                });
            }
            if edge_index_of.contains_key(&id) {
                return Err(HypergraphError::DuplicateEdgeId(id));
            }
            if let Some(&prev) = by_members.get(&idx) {
                return Err(HypergraphError::DuplicateMemberSet {
                    first: built[prev].id.clone(),
                    second: id,
                });
            }
            by_members.insert(idx.clone(), built.len());
            edge_index_of.insert(id.clone(), built.len());
            built.push(Hyperedge { id, members: idx });
        }

        let mut stars = vec![Vec::new(); labels.len()];
        for (e, edge) in built.iter().enumerate() {
            for &v in &edge.members {
                stars[v].push(e);
            }
        }

        Ok(Self {
            labels,
            index_of,
            edges: built,
            edge_index_of,
            stars,
        })
    }

    pub fn from_doc(doc: HypergraphDoc) -> Result<Self, HypergraphError> {
        Self::new(doc.vertices, doc.edges.into_iter().map(|e| (e.id, e.members)))
    }

    pub fn from_json_str(text: &str) -> Result<Self, HypergraphError> {
        let doc: HypergraphDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    /// Canonical document: vertices in index order, members in index order.
    pub fn to_doc(&self) -> HypergraphDoc {
        HypergraphDoc {
            vertices: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    members: e.members.iter().map(|&v| self.labels[v].clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_index(&self, label: &str) -> Result<usize, HypergraphError> {
        self.index_of
            .get(label)
            .copied()
            .ok_or_else(|| HypergraphError::UnknownVertex(label.to_owned()))
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Hyperedge {
        &self.edges[e]
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_index_of.get(id).copied()
    }

    /// Looks up the edge whose member set is exactly `members` (ascending indices).
    pub fn find_edge(&self, members: &[usize]) -> Option<usize> {
        let first = *members.first()?;
        self.stars[first]
            .iter()
            .copied()
            .find(|&e| self.edges[e].members == members)
    }

    /// Edge indices containing vertex `v`, ascending.
    pub fn star(&self, v: usize) -> &[usize] {
        &self.stars[v]
    }

    /// Edge ids in the star of the vertex labelled `label`.
    pub fn star_of(&self, label: &str) -> Result<Vec<&str>, HypergraphError> {
        let v = self.vertex_index(label)?;
        Ok(self.stars[v].iter().map(|&e| self.edges[e].id.as_str()).collect())
    }

    /// `|E_u ∩ E_v|`, the number of edges containing both vertices.
    pub fn common_edges(&self, u: usize, v: usize) -> usize {
        let (a, b) = (&self.stars[u], &self.stars[v]);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Edge indices shared by the stars of `u` and `v`.
    pub fn shared_edges(&self, u: usize, v: usize) -> impl Iterator<Item = usize> + '_ {
        let b = &self.stars[v];
        self.stars[u]
            .iter()
            .copied()
            .filter(move |e| b.binary_search(e).is_ok())
    }
}

/// A star-equivalence class: all vertices whose star equals `generating_set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    /// Edge indices, ascending.
    pub generating_set: Vec<usize>,
    /// Vertex indices, ascending.
    pub members: Vec<usize>,
}

impl Unit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitPartition {
    units: Vec<Unit>,
    vertex_to_unit: Vec<usize>,
}

impl UnitPartition {
    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn unit(&self, i: usize) -> &Unit {
        &self.units[i]
    }

    pub fn unit_of(&self, v: usize) -> usize {
        self.vertex_to_unit[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_to_unit.len()
    }

    /// Unit key: member labels in vertex order joined by `,`.
    pub fn key(&self, h: &Hypergraph, i: usize) -> String {
        self.units[i]
            .members
            .iter()
            .map(|&v| h.label(v))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Resolves a unit key. Whitespace around labels is ignored and the
    /// labels may be listed in any order.
    pub fn find_by_key(&self, h: &Hypergraph, key: &str) -> Option<usize> {
        let mut members = Vec::new();
        for label in key.split(',') {
            members.push(h.vertex_index(label.trim()).ok()?);
        }
        members.sort_unstable();
        let u = self.unit_of(*members.first()?);
        (self.units[u].members == members).then_some(u)
    }
}

/// Groups vertices by identical star. Units are ordered by smallest member.
pub fn compute_units(h: &Hypergraph) -> UnitPartition {
    let mut by_star: BTreeMap<&[usize], usize> = BTreeMap::new();
    let mut units: Vec<Unit> = Vec::new();
    let mut vertex_to_unit = vec![0; h.vertex_count()];
    // Vertices are visited in index order, so first appearance is the smallest member.
    for (v, slot) in vertex_to_unit.iter_mut().enumerate() {
        let star = h.star(v);
        let u = *by_star.entry(star).or_insert_with(|| {
            units.push(Unit {
                generating_set: star.to_vec(),
                members: Vec::new(),
            });
            units.len() - 1
        });
        units[u].members.push(v);
        *slot = u;
    }
    UnitPartition { units, vertex_to_unit }
}

#[derive(Debug, Clone)]
pub struct ContractionResult {
    /// Hypergraph on the units; vertex `i` is unit `i`, labelled by its unit key.
    pub contracted: Hypergraph,
    /// `edge_map[e]` is the contracted edge replacing original edge `e`.
    pub edge_map: Vec<usize>,
}

/// Replaces each unit by a single vertex and each edge by the set of units it covers.
pub fn unit_contraction(h: &Hypergraph, units: &UnitPartition) -> ContractionResult {
    let labels: Vec<String> = (0..units.len()).map(|i| units.key(h, i)).collect();
    let edges: Vec<(String, Vec<String>)> = h
        .edges()
        .iter()
        .map(|e| {
            let mut covered: Vec<usize> = e.members.iter().map(|&v| units.unit_of(v)).collect();
            covered.sort_unstable();
            covered.dedup();
            (e.id.clone(), covered.into_iter().map(|u| labels[u].clone()).collect())
        })
        .collect();
    // Distinct edges are unions of distinct unit sets, so this cannot fail.
    let contracted =
        Hypergraph::with_vertex_order(labels, edges).expect("unit contraction of a valid hypergraph is valid");
    let edge_map = (0..h.edge_count()).collect();
    ContractionResult { contracted, edge_map }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(id: &str, members: &[&str]) -> (String, Vec<String>) {
        (id.into(), members.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let h = Hypergraph::new(["10", "2", "1"], [edge("e", &["10", "1"])]).unwrap();
        assert_eq!(h.labels(), ["1", "2", "10"]);
        assert_eq!(h.edge(0).members, vec![0, 2]);
    }

    #[test]
    fn mixed_labels_sort_lexicographically() {
        let h = Hypergraph::new(["b", "10", "a"], Vec::new()).unwrap();
        assert_eq!(h.labels(), ["10", "a", "b"]);
    }

    #[test]
    fn smallest_hypergraph() {
        let h = Hypergraph::from_json_str(r#"{"vertices":["a"],"edges":[{"id":"e","members":["a"]}]}"#).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (1, 1));
    }

    #[test]
    fn parse_errors() {
        let dup = r#"{"vertices":["a","b"],"edges":[{"id":"e","members":["a","b"]},{"id":"f","members":["b","a"]}]}"#;
        assert!(matches!(
            Hypergraph::from_json_str(dup),
            Err(HypergraphError::DuplicateMemberSet { .. })
        ));
        let empty = r#"{"vertices":["a"],"edges":[{"id":"e","members":[]}]}"#;
        assert!(matches!(
            Hypergraph::from_json_str(empty),
            Err(HypergraphError::EmptyEdge(_))
        ));
        let unknown = r#"{"vertices":["a"],"edges":[{"id":"e","members":["z"]}]}"#;
        assert!(matches!(
            Hypergraph::from_json_str(unknown),
            Err(HypergraphError::UnknownMember { .. })
        ));
        assert!(matches!(
            Hypergraph::from_json_str("{\"vertices\": [\"a\"]"),
            Err(HypergraphError::Malformed(_))
        ));
        let dup_id = r#"{"vertices":["a","b"],"edges":[{"id":"e","members":["a"]},{"id":"e","members":["b"]}]}"#;
        assert!(matches!(
            Hypergraph::from_json_str(dup_id),
            Err(HypergraphError::DuplicateEdgeId(_))
        ));
    }

    #[test]
    fn isolated_vertices_share_one_unit() {
        let h = Hypergraph::new(["a", "b", "c", "d"], [edge("e", &["a", "b"])]).unwrap();
        assert!(h.star(2).is_empty());
        let units = compute_units(&h);
        assert_eq!(units.len(), 2);
        assert_eq!(units.unit(1).members, vec![2, 3]);
        assert!(units.unit(1).generating_set.is_empty());
    }

    #[test]
    fn single_edge_contracts_to_singleton_edge() {
        let h = Hypergraph::new(["a", "b"], [edge("e", &["a", "b"])]).unwrap();
        let units = compute_units(&h);
        assert_eq!(units.len(), 1);
        let c = unit_contraction(&h, &units);
        assert_eq!(c.contracted.vertex_count(), 1);
        assert_eq!(c.contracted.edge(0).members, vec![0]);
        assert_eq!(c.contracted.label(0), "a,b");
    }

    #[test]
    fn unit_keys_resolve() {
        let h = Hypergraph::new(["1", "2", "3"], [edge("e", &["1", "2"])]).unwrap();
        let units = compute_units(&h);
        assert_eq!(units.key(&h, 0), "1,2");
        assert_eq!(units.find_by_key(&h, "2, 1"), Some(0));
        assert_eq!(units.find_by_key(&h, "1"), None);
        assert_eq!(units.find_by_key(&h, "3"), Some(1));
    }
}
