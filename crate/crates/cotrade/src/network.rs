//! Insider networks: weighted undirected graphs over insiders of one side,
//! with edges induced by per-company pairwise similarity. Connected
//! components, summary statistics, and egonets live here too.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{map_ordered, Exec};
use crate::similarity::{lcs_length, similarity_s, SimilarityConfig, SimilarityMode};
use crate::types::{DateSequence, Side};

/// One undirected edge. Endpoints are kept ordered (`a < b`) and the edge
/// carries the company whose date sequences induced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    /// `S` value in Overlap mode, LCS length in Lcs mode. The maximum over
    /// all inducing companies is retained.
    pub weight: f64,
    pub company: String,
}

/// Weighted undirected co-trading graph for one side and one construction
/// mode. Isolated nodes are discarded: every node is incident to at least
/// one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsiderNetwork {
    pub side: Side,
    /// Construction mode and thresholds used.
    pub mode: SimilarityConfig,
    /// Sorted insider ids.
    pub nodes: Vec<String>,
    /// Sorted by (a, b); at most one edge per unordered pair.
    pub edges: Vec<Edge>,
}

/// The subgraph induced by an ego and its direct neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Egonet {
    pub ego: String,
    /// Node count of the closed 1-hop neighborhood.
    pub v_count: usize,
    /// Edge count of the induced subgraph.
    pub e_count: usize,
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
}

/// Per-ego (V_u, E_u) counts, the input to power-law fitting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgonetStats {
    pub insider_id: String,
    pub v: usize,
    pub e: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
    /// (component size, number of components of that size), size ascending.
    pub component_size_histogram: Vec<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("insider {0:?} is not a node of this network")]
    UnknownNode(String),
}

impl InsiderNetwork {
    /// Normalizes raw candidate edges into a network: orders endpoints,
    /// drops self-loops, keeps the best edge per unordered pair (max weight,
    /// then lexicographically smallest company), and derives the node set
    /// from edge endpoints.
    pub fn from_edges(side: Side, mode: SimilarityConfig, edges: Vec<Edge>) -> Self {
        let mut best: BTreeMap<(String, String), (f64, String)> = BTreeMap::new();
        for e in edges {
            if e.a == e.b {
                continue;
            }
            let (a, b) = if e.a < e.b { (e.a, e.b) } else { (e.b, e.a) };
            match best.get_mut(&(a.clone(), b.clone())) {
                Some((w, c)) => {
                    if e.weight > *w || (e.weight == *w && e.company < *c) {
                        *w = e.weight;
                        *c = e.company;
                    }
                }
                None => {
                    best.insert((a, b), (e.weight, e.company));
                }
            }
        }
        let mut nodes: BTreeSet<String> = BTreeSet::new();
        let edges: Vec<Edge> = best
            .into_iter()
            .map(|((a, b), (weight, company))| {
                nodes.insert(a.clone());
                nodes.insert(b.clone());
                Edge { a, b, weight, company }
            })
            .collect();
        InsiderNetwork {
            side,
            mode,
            nodes: nodes.into_iter().collect(),
            edges,
        }
    }

    pub fn has_node(&self, insider: &str) -> bool {
        self.nodes.binary_search_by(|n| n.as_str().cmp(insider)).is_ok()
    }

    /// Adjacency lists keyed by insider id.
    pub fn adjacency(&self) -> HashMap<&str, BTreeSet<&str>> {
        let mut adj: HashMap<&str, BTreeSet<&str>> = HashMap::with_capacity(self.nodes.len());
        for n in &self.nodes {
            adj.insert(n.as_str(), BTreeSet::new());
        }
        for e in &self.edges {
            adj.get_mut(e.a.as_str()).unwrap().insert(e.b.as_str());
            adj.get_mut(e.b.as_str()).unwrap().insert(e.a.as_str());
        }
        adj
    }

    /// Edges incident to one insider.
    pub fn incident_edges(&self, insider: &str) -> Vec<&Edge> {
        self.edges
            .iter()
            .filter(|e| e.a == insider || e.b == insider)
            .collect()
    }
}

/// Builds the network for one side. Pairs are enumerated within each
/// company; an edge is added when the mode's score clears its threshold.
/// Companies are processed independently (in parallel under
/// `Exec::Parallel`) and merged deterministically, so the result does not
/// depend on the parallelism degree.
pub fn build_network(
    sequences: &[DateSequence],
    side: Side,
    config: &SimilarityConfig,
    exec: Exec,
) -> InsiderNetwork {
    let mut by_company: BTreeMap<&str, Vec<&DateSequence>> = BTreeMap::new();
    for seq in sequences.iter().filter(|s| s.side == side && !s.is_empty()) {
        by_company.entry(seq.company.as_str()).or_default().push(seq);
    }
    for seqs in by_company.values_mut() {
        seqs.sort_by(|x, y| x.insider_id.cmp(&y.insider_id));
    }

    let companies: Vec<Vec<&DateSequence>> = by_company.into_values().collect();
    let per_company: Vec<Vec<Edge>> = map_ordered(exec, companies, |seqs| {
        company_edges(&seqs, side, config)
    });

    InsiderNetwork::from_edges(side, *config, per_company.into_iter().flatten().collect())
}

fn company_edges(seqs: &[&DateSequence], side: Side, config: &SimilarityConfig) -> Vec<Edge> {
    let mut edges = Vec::new();
    for (i, x) in seqs.iter().enumerate() {
        for y in &seqs[i + 1..] {
            if x.insider_id == y.insider_id {
                continue;
            }
            let weight = match config.mode {
                SimilarityMode::Overlap => {
                    let s = similarity_s(x, y).expect("same company and side by grouping");
                    (s >= config.overlap_threshold).then_some(s)
                }
                SimilarityMode::Lcs => {
                    let len = lcs_length(x, y, config.lcs_variant)
                        .expect("same company and side by grouping");
                    (len >= config.lcs_threshold(side)).then_some(len as f64)
                }
            };
            if let Some(weight) = weight {
                edges.push(Edge {
                    a: x.insider_id.clone(),
                    b: y.insider_id.clone(),
                    weight,
                    company: x.company.clone(),
                });
            }
        }
    }
    edges
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (mut xr, mut yr) = (self.find(x), self.find(y));
        if xr == yr {
            return;
        }
        if self.size[xr] < self.size[yr] {
            std::mem::swap(&mut xr, &mut yr);
        }
        self.parent[yr] = xr;
        self.size[xr] += self.size[yr];
    }
}

/// Partitions the node set into maximal connected components, each returned
/// as a sorted member list. Components are ordered by decreasing size, then
/// by their lexicographically smallest member. Every component has size >= 2
/// because isolated nodes never enter the network.
pub fn connected_components(net: &InsiderNetwork) -> Vec<Vec<String>> {
    let index: HashMap<&str, usize> = net
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut uf = UnionFind::new(net.nodes.len());
    for e in &net.edges {
        uf.union(index[e.a.as_str()], index[e.b.as_str()]);
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, node) in net.nodes.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(node.clone());
    }
    let mut components: Vec<Vec<String>> = groups.into_values().collect();
    // Members are already sorted because nodes are iterated in sorted order.
    components.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x[0].cmp(&y[0])));
    components
}

pub fn network_stats(net: &InsiderNetwork) -> NetworkStats {
    let components = connected_components(net);
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &components {
        *histogram.entry(c.len()).or_insert(0) += 1;
    }
    NetworkStats {
        node_count: net.nodes.len(),
        edge_count: net.edges.len(),
        component_count: components.len(),
        component_size_histogram: histogram.into_iter().collect(),
    }
}

/// The subgraph induced by `ego` and its direct neighbors (closed 1-hop
/// neighborhood), with V_u and E_u counted on that induced subgraph.
pub fn egonet(net: &InsiderNetwork, ego: &str) -> Result<Egonet, NetworkError> {
    if !net.has_node(ego) {
        return Err(NetworkError::UnknownNode(ego.to_string()));
    }
    let adj = net.adjacency();
    let mut members: BTreeSet<&str> = adj[ego].clone();
    members.insert(ego);
    let edges: Vec<Edge> = net
        .edges
        .iter()
        .filter(|e| members.contains(e.a.as_str()) && members.contains(e.b.as_str()))
        .cloned()
        .collect();
    Ok(Egonet {
        ego: ego.to_string(),
        v_count: members.len(),
        e_count: edges.len(),
        nodes: members.into_iter().map(str::to_string).collect(),
        edges,
    })
}

/// (V_u, E_u) for every node, sorted by insider id. Counting runs per node
/// (in parallel under `Exec::Parallel`) over a shared adjacency index.
pub fn all_egonet_stats(net: &InsiderNetwork, exec: Exec) -> Vec<EgonetStats> {
    let adj = net.adjacency();
    let nodes: Vec<&str> = net.nodes.iter().map(String::as_str).collect();
    map_ordered(exec, nodes, |ego| {
        let neighbors = &adj[ego];
        let mut members: BTreeSet<&str> = neighbors.clone();
        members.insert(ego);
        let mut e_count = 0usize;
        for &v in &members {
            for &w in &adj[v] {
                if w > v && members.contains(w) {
                    e_count += 1;
                }
            }
        }
        EgonetStats {
            insider_id: ego.to_string(),
            v: members.len(),
            e: e_count,
        }
    })
}

/// JSON with sorted keys, stable across runs and parallelism levels.
pub fn network_to_json(net: &InsiderNetwork) -> String {
    let value = serde_json::to_value(net).expect("network serializes");
    serde_json::to_string_pretty(&value).expect("json value prints")
}

pub fn network_from_json(s: &str) -> Result<InsiderNetwork, serde_json::Error> {
    serde_json::from_str(s)
}

pub fn stats_to_json(stats: &NetworkStats) -> String {
    let value = serde_json::to_value(stats).expect("stats serialize");
    serde_json::to_string_pretty(&value).expect("json value prints")
}

pub fn stats_from_json(s: &str) -> Result<NetworkStats, serde_json::Error> {
    serde_json::from_str(s)
}

/// `size,count` rows, size ascending.
pub fn component_histogram_csv(stats: &NetworkStats) -> String {
    let mut out = String::from("size,count\n");
    for (size, count) in &stats.component_size_histogram {
        out.push_str(&format!("{size},{count}\n"));
    }
    out
}

/// Formats an edge weight: LCS lengths print as integers, overlap scores as
/// decimals.
pub fn weight_label(weight: f64) -> String {
    if weight.fract() == 0.0 {
        format!("{}", weight as i64)
    } else {
        format!("{weight}")
    }
}

/// Graphviz DOT for the whole network; nodes and edges in sorted order,
/// edges labeled with their weight.
pub fn network_to_dot(net: &InsiderNetwork) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph {}_network {{\n", net.side.as_str()));
    for n in &net.nodes {
        out.push_str(&format!("  \"{n}\";\n"));
    }
    for e in &net.edges {
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
            e.a,
            e.b,
            weight_label(e.weight)
        ));
    }
    out.push_str("}\n");
    out
}

/// DOT for one egonet; the ego node carries a highlight attribute.
pub fn egonet_to_dot(ego: &Egonet) -> String {
    let mut out = String::new();
    out.push_str("graph egonet {\n");
    for n in &ego.nodes {
        if *n == ego.ego {
            out.push_str(&format!(
                "  \"{n}\" [style=filled, fillcolor=lightblue, peripheries=2];\n"
            ));
        } else {
            out.push_str(&format!("  \"{n}\";\n"));
        }
    }
    for e in &ego.edges {
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
            e.a,
            e.b,
            weight_label(e.weight)
        ));
    }
    out.push_str("}\n");
    out
}
