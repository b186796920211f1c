use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fs;
use std::path::Path as FsPath;

use log::warn;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Longest allowed amplifier span, km.
pub const MAX_SPAN_KM: f64 = 80.0;

pub type NodeId = usize;
pub type LinkId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    /// Relative traffic weight (e.g. data centers + IXPs at the site).
    pub weight: f64,
}

/// Bidirectional fiber link. `a < b` always holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub length_km: f64,
    pub spans: Vec<f64>,
}

impl Link {
    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Splits a link into `ceil(length / 80)` equal spans.
pub fn split_spans(length_km: f64) -> Vec<f64> {
    assert!(
        length_km > 0.0,
        "span split of non-positive length {length_km}"
    );
    let n = ((length_km / MAX_SPAN_KM).ceil() as usize).max(1);
    vec![length_km / n as f64; n]
}

/// A simple path through the topology.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    pub length_km: f64,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.links.len()
    }

    /// All span lengths along the path, in traversal order.
    pub fn spans<'a>(&'a self, topo: &'a Topology) -> impl Iterator<Item = f64> + 'a {
        self.links
            .iter()
            .flat_map(move |&l| topo.links[l].spans.iter().copied())
    }

    pub fn display(&self, topo: &Topology) -> String {
        self.nodes
            .iter()
            .map(|&n| topo.nodes[n].id.as_str())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// The physical plant. Nodes are stored sorted by id so that node-index
/// order equals lexicographic id order.
#[derive(Debug, Clone)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
    index: HashMap<String, NodeId>,
    pair_link: HashMap<(NodeId, NodeId), LinkId>,
}

impl Topology {
    /// Builds and validates a topology. All violations are collected and
    /// reported together.
    pub fn new(mut nodes: Vec<Node>, links: Vec<(String, String, f64)>) -> Result<Self> {
        let mut problems = Vec::new();

        nodes.sort_by(|x, y| x.id.cmp(&y.id));
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                problems.push(format!("duplicate node `{}`", n.id));
            }
            if !(n.weight.is_finite() && n.weight >= 0.0) {
                problems.push(format!("node `{}` has invalid weight {}", n.id, n.weight));
            }
        }

        let mut out_links = Vec::new();
        let mut pair_link = HashMap::new();
        for (k, (a, b, len)) in links.into_iter().enumerate() {
            let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) else {
                problems.push(format!("link #{k} {a}-{b} references an unknown node"));
                continue;
            };
            if ia == ib {
                problems.push(format!("link #{k} {a}-{b} is a self-loop"));
                continue;
            }
            if !(len.is_finite() && len > 0.0) {
                problems.push(format!("link #{k} {a}-{b} has non-positive length {len}"));
                continue;
            }
            let key = (ia.min(ib), ia.max(ib));
            if pair_link.contains_key(&key) {
                problems.push(format!("link #{k} {a}-{b} duplicates an earlier link"));
                continue;
            }
            pair_link.insert(key, out_links.len());
            out_links.push(Link {
                a: key.0,
                b: key.1,
                length_km: len,
                spans: split_spans(len),
            });
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (l, link) in out_links.iter().enumerate() {
            adjacency[link.a].push((link.b, l));
            adjacency[link.b].push((link.a, l));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        let topo = Topology {
            nodes,
            links: out_links,
            adjacency,
            index,
            pair_link,
        };
        if problems.is_empty() && !topo.nodes.is_empty() {
            let unreachable = topo.unreachable_from(0);
            if !unreachable.is_empty() {
                problems.push(format!(
                    "graph is disconnected; unreachable from `{}`: {}",
                    topo.nodes[0].id,
                    unreachable.join(", ")
                ));
            }
        }
        if problems.is_empty() {
            Ok(topo)
        } else {
            Err(Error::InvalidTopology(problems))
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: TopologyDoc = serde_json::from_str(text)?;
        warn_unknown("topology", &doc.extra);
        let nodes = doc
            .nodes
            .into_iter()
            .map(|n| {
                warn_unknown(&format!("node `{}`", n.id), &n.extra);
                Node {
                    id: n.id,
                    weight: n.weight,
                }
            })
            .collect();
        let links = doc
            .links
            .into_iter()
            .map(|l| {
                warn_unknown(&format!("link {}-{}", l.a, l.b), &l.extra);
                (l.a, l.b, l.length_km)
            })
            .collect();
        Topology::new(nodes, links)
    }

    fn unreachable_from(&self, start: NodeId) -> Vec<String> {
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        (0..self.nodes.len())
            .filter(|n| !seen.contains(n))
            .map(|n| self.nodes[n].id.clone())
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn node_index(&self, id: &str) -> Result<NodeId> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn neighbors(&self, n: NodeId) -> &[(NodeId, LinkId)] {
        &self.adjacency[n]
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        self.pair_link.get(&(a.min(b), a.max(b))).copied()
    }

    /// Builds a [`Path`] from a node sequence; `None` if consecutive nodes
    /// are not adjacent.
    pub fn path_from_nodes(&self, nodes: &[NodeId]) -> Option<Path> {
        let mut links = Vec::with_capacity(nodes.len().saturating_sub(1));
        let mut length_km = 0.0;
        for w in nodes.windows(2) {
            let l = self.link_between(w[0], w[1])?;
            length_km += self.links[l].length_km;
            links.push(l);
        }
        Some(Path {
            nodes: nodes.to_vec(),
            links,
            length_km,
        })
    }

    /// Shortest-path distances (km) from `src` to every node.
    pub fn distances_from(&self, src: NodeId) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((OrdF64(0.0), src)));
        while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, l) in &self.adjacency[u] {
                let nd = d + self.links[l].length_km;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((OrdF64(nd), v)));
                }
            }
        }
        dist
    }

    /// Mean shortest-path length over all unordered node pairs, km.
    pub fn average_shortest_path_km(&self) -> f64 {
        let n = self.nodes.len();
        let mut total = 0.0;
        let mut pairs = 0usize;
        for s in 0..n {
            let dist = self.distances_from(s);
            for d in dist.iter().skip(s + 1) {
                total += d;
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            total / pairs as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Deserialize)]
struct TopologyDoc {
    nodes: Vec<NodeDoc>,
    links: Vec<LinkDoc>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct NodeDoc {
    id: String,
    weight: f64,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct LinkDoc {
    a: String,
    b: String,
    length_km: f64,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

fn warn_unknown(what: &str, extra: &BTreeMap<String, Value>) {
    for key in extra.keys() {
        warn!("{what}: ignoring unknown field `{key}`");
    }
}

pub fn load_topology(path: impl AsRef<FsPath>) -> Result<Topology> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Topology::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn node(id: &str) -> Node {
        Node {
            id: id.into(),
            weight: 1.0,
        }
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_spans(80.0), vec![80.0]);
        assert_eq!(split_spans(160.0), vec![80.0, 80.0]);
        assert_eq!(split_spans(420.0), vec![70.0; 6]);
        let s = split_spans(200.0);
        assert_eq!(s.len(), 3);
        for x in &s {
            assert!((x - 66.666_666).abs() < 1e-3);
        }
        assert!((s.iter().sum::<f64>() - 200.0).abs() < 1e-9);
    }

    #[test]
    fn two_node_file() {
        let t = Topology::from_json_str(
            r#"{"nodes":[{"id":"A","weight":1},{"id":"B","weight":2}],
                "links":[{"a":"A","b":"B","length_km":80}]}"#,
        )
        .unwrap();
        assert_eq!(t.link_count(), 1);
        assert_eq!(t.links[0].spans, vec![80.0]);
    }

    #[test]
    fn unknown_fields_are_tolerated() {
        let t = Topology::from_json_str(
            r#"{"name":"x","nodes":[{"id":"A","weight":1,"lat":1.0},{"id":"B","weight":2}],
                "links":[{"a":"A","b":"B","length_km":10,"fiber":"SSMF"}]}"#,
        );
        assert!(t.is_ok());
    }

    #[test]
    fn malformed_record_is_an_error() {
        let t = Topology::from_json_str(r#"{"nodes":[{"id":"A"}],"links":[]}"#);
        assert!(matches!(t, Err(Error::Json(_))));
    }

    #[test]
    fn validation_lists_every_problem() {
        let err = Topology::new(
            vec![node("A"), node("B"), node("C"), node("D")],
            vec![
                ("A".into(), "B".into(), 10.0),
                ("B".into(), "A".into(), 12.0),
                ("C".into(), "C".into(), 5.0),
                ("B".into(), "C".into(), 0.0),
            ],
        )
        .unwrap_err();
        let Error::InvalidTopology(problems) = err else {
            panic!("wrong error kind");
        };
        assert_eq!(problems.len(), 3, "{problems:?}");
        assert!(problems.iter().any(|p| p.contains("duplicates")));
        assert!(problems.iter().any(|p| p.contains("self-loop")));
        assert!(problems.iter().any(|p| p.contains("non-positive")));
    }

    #[test]
    fn disconnected_graph_rejected() {
        let err = Topology::new(
            vec![node("A"), node("B"), node("C"), node("D")],
            vec![
                ("A".into(), "B".into(), 10.0),
                ("C".into(), "D".into(), 10.0),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("disconnected"), "{err}");
    }

    #[test]
    fn nodes_sorted_by_id() {
        let t = Topology::new(
            vec![node("Zeta"), node("Alpha")],
            vec![("Zeta".into(), "Alpha".into(), 1.0)],
        )
        .unwrap();
        assert_eq!(t.nodes[0].id, "Alpha");
        assert_eq!(t.links[0].a, 0);
    }

    proptest! {
        #[test]
        fn spans_sum_and_bound(len in 0.001f64..20_000.0) {
            let s = split_spans(len);
            prop_assert!((s.iter().sum::<f64>() - len).abs() < 1e-9);
            prop_assert!(s.iter().all(|&x| x > 0.0 && x <= MAX_SPAN_KM));
            prop_assert_eq!(s.len(), (len / MAX_SPAN_KM).ceil() as usize);
        }
    }
}
