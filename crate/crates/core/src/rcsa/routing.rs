use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use crate::netmodel::{LinkId, NodeId, Path, Topology};

pub const DEFAULT_K: usize = 3;

/// Path label ordered by length, then by node sequence.
#[derive(Debug, Clone, PartialEq)]
struct Label {
    cost: f64,
    nodes: Vec<NodeId>,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.nodes.cmp(&other.nodes))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn path_order(a: &Path, b: &Path) -> Ordering {
    a.length_km
        .total_cmp(&b.length_km)
        .then_with(|| a.nodes.cmp(&b.nodes))
}

/// Shortest path avoiding the given nodes and links; ties go to the
/// lexicographically smaller node sequence.
fn constrained_shortest(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    banned_nodes: &HashSet<NodeId>,
    banned_links: &HashSet<LinkId>,
) -> Option<Vec<NodeId>> {
    let mut settled = vec![false; topo.node_count()];
    let mut best: Vec<Option<Label>> = vec![None; topo.node_count()];
    let mut heap = BinaryHeap::new();
    let start = Label {
        cost: 0.0,
        nodes: vec![src],
    };
    best[src] = Some(start.clone());
    heap.push(Reverse(start));

    while let Some(Reverse(label)) = heap.pop() {
        let u = *label.nodes.last().unwrap();
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if u == dst {
            return Some(label.nodes);
        }
        for &(v, l) in topo.neighbors(u) {
            if settled[v] || banned_nodes.contains(&v) || banned_links.contains(&l) {
                continue;
            }
            let mut nodes = label.nodes.clone();
            nodes.push(v);
            let next = Label {
                cost: label.cost + topo.links[l].length_km,
                nodes,
            };
            if best[v].as_ref().is_none_or(|b| next < *b) {
                best[v] = Some(next.clone());
                heap.push(Reverse(next));
            }
        }
    }
    None
}

pub fn dijkstra(topo: &Topology, src: NodeId, dst: NodeId) -> Option<Path> {
    constrained_shortest(topo, src, dst, &HashSet::new(), &HashSet::new())
        .and_then(|n| topo.path_from_nodes(&n))
}

/// Up to `k` loop-free paths from `src` to `dst` (Yen's algorithm), sorted
/// by length in km with ties broken by node-index sequence.
pub fn k_shortest_paths(topo: &Topology, src: NodeId, dst: NodeId, k: usize) -> Vec<Path> {
    if src == dst || k == 0 {
        return Vec::new();
    }
    let Some(first) = dijkstra(topo, src, dst) else {
        return Vec::new();
    };
    let mut accepted = vec![first];
    let mut candidates: Vec<Path> = Vec::new();

    while accepted.len() < k {
        let prev = accepted.last().unwrap().clone();
        for j in 0..prev.nodes.len() - 1 {
            let spur = prev.nodes[j];
            let root = &prev.nodes[..=j];
            let banned_links: HashSet<LinkId> = accepted
                .iter()
                .filter(|p| p.nodes.len() > j + 1 && p.nodes[..=j] == *root)
                .map(|p| p.links[j])
                .collect();
            let banned_nodes: HashSet<NodeId> = root[..j].iter().copied().collect();
            let Some(spur_nodes) =
                constrained_shortest(topo, spur, dst, &banned_nodes, &banned_links)
            else {
                continue;
            };
            let mut nodes = root[..j].to_vec();
            nodes.extend(spur_nodes);
            // re-sum from the source so equal paths compare equal
            let path = topo
                .path_from_nodes(&nodes)
                .expect("spur path follows links");
            if !accepted.contains(&path) && !candidates.contains(&path) {
                candidates.push(path);
            }
        }
        let Some((i, _)) = candidates
            .iter()
            .enumerate()
            .min_by(|a, b| path_order(a.1, b.1))
        else {
            break;
        };
        accepted.push(candidates.swap_remove(i));
    }
    accepted
}
