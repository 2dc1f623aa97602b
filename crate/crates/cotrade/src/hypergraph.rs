//! Multi-way co-trading structure: hyperedges are maximal groups of two or
//! more insiders of one company whose date sequences share a common
//! subsequence of length at least the side's threshold `t`.
//!
//! Because date sequences are sorted and deduplicated, a common subsequence
//! of a group is exactly the sorted intersection of the members' date sets,
//! so mining reduces to enumerating maximal insider sets whose date-set
//! intersection still has size >= t. The miner is a depth-first set
//! enumeration in lexicographic member order with two prunes: candidates
//! are filtered by the anti-monotone intersection bound, and when the
//! union of a node with all of its surviving candidates is itself
//! qualifying, the search jumps straight to that union (no intermediate
//! subset can be maximal).

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::exec::{map_ordered, Exec};
use crate::similarity::SimilarityConfig;
use crate::types::{DateSequence, Side};

/// A maximal co-trading group: every member's date sequence contains the
/// witness, and no additional insider of the company could join without
/// shrinking the shared subsequence below `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub company: String,
    pub side: Side,
    /// Sorted insider ids, at least two.
    pub members: Vec<String>,
    /// Sorted intersection of the members' date sets.
    pub witness: Vec<NaiveDate>,
    pub length: usize,
}

/// All hyperedges of one side. Vertices are the insiders that appear in at
/// least one hyperedge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub side: Side,
    pub vertices: Vec<String>,
    pub hyperedges: Vec<Hyperedge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBin {
    pub size: usize,
    pub count: usize,
    pub percent: f64,
}

/// Mines every maximal hyperedge per company. `config` supplies the side's
/// LCS threshold; companies are mined independently (in parallel under
/// `Exec::Parallel`) and merged deterministically: ordering is by company,
/// then decreasing member count, then lexicographic members.
pub fn mine_hyperedges(
    sequences: &[DateSequence],
    side: Side,
    config: &SimilarityConfig,
    exec: Exec,
) -> Hypergraph {
    let t = config.lcs_threshold(side);
    let mut by_company: BTreeMap<&str, Vec<&DateSequence>> = BTreeMap::new();
    for seq in sequences.iter().filter(|s| s.side == side && !s.is_empty()) {
        by_company.entry(seq.company.as_str()).or_default().push(seq);
    }
    for seqs in by_company.values_mut() {
        seqs.sort_by(|x, y| x.insider_id.cmp(&y.insider_id));
    }

    let companies: Vec<Vec<&DateSequence>> = by_company.into_values().collect();
    let per_company: Vec<Vec<Hyperedge>> = map_ordered(exec, companies, |seqs| {
        mine_company(&seqs, side, t)
    });

    let mut hyperedges: Vec<Hyperedge> = per_company.into_iter().flatten().collect();
    hyperedges.sort_by(|x, y| {
        x.company
            .cmp(&y.company)
            .then_with(|| y.members.len().cmp(&x.members.len()))
            .then_with(|| x.members.cmp(&y.members))
    });

    let mut vertices: Vec<String> = hyperedges
        .iter()
        .flat_map(|h| h.members.iter().cloned())
        .collect();
    vertices.sort();
    vertices.dedup();

    Hypergraph { side, vertices, hyperedges }
}

fn intersect(a: &[NaiveDate], b: &[NaiveDate]) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_size(a: &[NaiveDate], b: &[NaiveDate]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn mine_company(seqs: &[&DateSequence], side: Side, t: usize) -> Vec<Hyperedge> {
    // Insiders whose own sequence is shorter than t can never qualify.
    let items: Vec<&DateSequence> = seqs.iter().copied().filter(|s| s.len() >= t).collect();
    if items.len() < 2 {
        return Vec::new();
    }
    let dates: Vec<&[NaiveDate]> = items.iter().map(|s| s.dates.as_slice()).collect();

    let mut found: Vec<(Vec<usize>, Vec<NaiveDate>)> = Vec::new();
    for start in 0..items.len() {
        grow(
            &dates,
            t,
            &mut vec![start],
            dates[start].to_vec(),
            &mut found,
        );
    }

    found
        .into_iter()
        .filter(|(members, _)| members.len() >= 2)
        .map(|(members, witness)| Hyperedge {
            company: items[0].company.clone(),
            side,
            members: members.iter().map(|&i| items[i].insider_id.clone()).collect(),
            witness: witness.clone(),
            length: witness.len(),
        })
        .collect()
}

/// Depth-first growth of one member set. `members` is sorted ascending and
/// `inter` is the intersection of their date sets.
fn grow(
    dates: &[&[NaiveDate]],
    t: usize,
    members: &mut Vec<usize>,
    inter: Vec<NaiveDate>,
    found: &mut Vec<(Vec<usize>, Vec<NaiveDate>)>,
) {
    let last = *members.last().expect("members never empty");
    let forward: Vec<usize> = (last + 1..dates.len())
        .filter(|&w| intersection_size(&inter, dates[w]) >= t)
        .collect();

    // Lookahead: if every surviving candidate fits at once, no strict
    // subset in this subtree can be maximal.
    if !forward.is_empty() {
        let mut all = inter.clone();
        for &w in &forward {
            all = intersect(&all, dates[w]);
            if all.len() < t {
                break;
            }
        }
        if all.len() >= t {
            let mut jumped: Vec<usize> = members.clone();
            jumped.extend(&forward);
            if is_maximal(dates, t, &jumped, &all) {
                found.push((jumped, all));
            }
            return;
        }
    }

    if forward.is_empty() {
        if members.len() >= 2 && is_maximal(dates, t, members, &inter) {
            found.push((members.clone(), inter));
        }
        return;
    }

    for w in forward {
        let next = intersect(&inter, dates[w]);
        members.push(w);
        grow(dates, t, members, next, found);
        members.pop();
    }
    // The set without any forward extension is non-maximal here: each
    // forward candidate extends it, so nothing to emit at this node.
}

/// True when no insider outside the set could join while keeping the
/// intersection at length >= t.
fn is_maximal(dates: &[&[NaiveDate]], t: usize, members: &[usize], inter: &[NaiveDate]) -> bool {
    (0..dates.len())
        .filter(|w| !members.contains(w))
        .all(|w| intersection_size(inter, dates[w]) < t)
}

/// Member-count distribution: (size, count, percent), sizes ascending.
/// Percentages sum to 100 within rounding; empty hypergraph gives an empty
/// distribution.
pub fn hyperedge_size_distribution(h: &Hypergraph) -> Vec<SizeBin> {
    let total = h.hyperedges.len();
    if total == 0 {
        return Vec::new();
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &h.hyperedges {
        *counts.entry(e.members.len()).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(size, count)| SizeBin {
            size,
            count,
            percent: 100.0 * count as f64 / total as f64,
        })
        .collect()
}

/// Insiders incident to at least `min_edges` hyperedges, with the indices of
/// their incident hyperedges, sorted by decreasing incidence then id.
pub fn multi_edge_insiders(h: &Hypergraph, min_edges: usize) -> Vec<(String, Vec<usize>)> {
    let mut incidence: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in h.hyperedges.iter().enumerate() {
        for m in &e.members {
            incidence.entry(m.as_str()).or_default().push(i);
        }
    }
    let mut out: Vec<(String, Vec<usize>)> = incidence
        .into_iter()
        .filter(|(_, edges)| edges.len() >= min_edges)
        .map(|(id, edges)| (id.to_string(), edges))
        .collect();
    out.sort_by(|x, y| y.1.len().cmp(&x.1.len()).then_with(|| x.0.cmp(&y.0)));
    out
}

#[derive(Serialize, Deserialize)]
struct HypergraphExport {
    side: Side,
    hyperedges: Vec<Hyperedge>,
}

/// JSON with sorted keys: `{hyperedges: [...], side}`.
pub fn hypergraph_to_json(h: &Hypergraph) -> String {
    let export = HypergraphExport {
        side: h.side,
        hyperedges: h.hyperedges.clone(),
    };
    let value = serde_json::to_value(&export).expect("hypergraph serializes");
    serde_json::to_string_pretty(&value).expect("json value prints")
}

pub fn hypergraph_from_json(s: &str) -> Result<Hypergraph, serde_json::Error> {
    let export: HypergraphExport = serde_json::from_str(s)?;
    let mut vertices: Vec<String> = export
        .hyperedges
        .iter()
        .flat_map(|h| h.members.iter().cloned())
        .collect();
    vertices.sort();
    vertices.dedup();
    Ok(Hypergraph {
        side: export.side,
        vertices,
        hyperedges: export.hyperedges,
    })
}

/// `size,count,percent` rows, size ascending.
pub fn size_distribution_csv(bins: &[SizeBin]) -> String {
    let mut out = String::from("size,count,percent\n");
    for b in bins {
        out.push_str(&format!("{},{},{:.6}\n", b.size, b.count, b.percent));
    }
    out
}

/// DOT-like rendering: each hyperedge becomes a clique over its members,
/// every edge of the clique labeled with the hyperedge index and LCS
/// length so multi-edge intersections stand out.
pub fn hypergraph_to_dot(h: &Hypergraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph {}_hypergraph {{\n", h.side.as_str()));
    for v in &h.vertices {
        out.push_str(&format!("  \"{v}\";\n"));
    }
    for (i, e) in h.hyperedges.iter().enumerate() {
        out.push_str(&format!(
            "  // h{i}: company {} members {} length {}\n",
            e.company,
            e.members.len(),
            e.length
        ));
        for (j, a) in e.members.iter().enumerate() {
            for b in &e.members[j + 1..] {
                out.push_str(&format!(
                    "  \"{a}\" -- \"{b}\" [label=\"h{i}:{}\"];\n",
                    e.length
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn day(n: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2014, 1, 1).unwrap() + chrono::Duration::days(n)
    }

    fn seq(insider: &str, days: &[i64]) -> DateSequence {
        DateSequence::from_dates(
            insider,
            "ACME",
            Side::Sale,
            days.iter().map(|&n| day(n)).collect(),
        )
    }

    fn lcs_config(t_sale: usize) -> SimilarityConfig {
        SimilarityConfig {
            lcs_threshold_sale: t_sale,
            ..SimilarityConfig::default()
        }
    }

    fn members(h: &Hypergraph) -> Vec<Vec<String>> {
        h.hyperedges.iter().map(|e| e.members.clone()).collect()
    }

    #[test]
    fn shared_sequence_yields_a_single_three_way_hyperedge() {
        // All three insiders share the same five dates.
        let shared = [2, 3, 4, 5, 6];
        let sequences = vec![seq("t1", &shared), seq("t2", &shared), seq("t3", &shared)];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(5), Exec::Sequential);
        assert_eq!(members(&h), vec![vec!["t1", "t2", "t3"]]);
        assert_eq!(h.hyperedges[0].length, 5);
        assert_eq!(h.hyperedges[0].witness, shared.map(day).to_vec());
    }

    #[test]
    fn pairwise_distinct_sequences_yield_three_pair_hyperedges() {
        let sequences = vec![
            seq("t1", &[2, 3, 4, 5, 6, 9, 10, 11, 12, 13]),
            seq("t2", &[2, 3, 4, 5, 6, 15, 16, 17, 18, 19]),
            seq("t3", &[9, 10, 11, 12, 13, 15, 16, 17, 18, 19]),
        ];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(5), Exec::Sequential);
        assert_eq!(
            members(&h),
            vec![vec!["t1", "t2"], vec!["t1", "t3"], vec!["t2", "t3"]]
        );
        assert!(h.hyperedges.iter().all(|e| e.length == 5));
    }

    #[test]
    fn single_insider_gives_an_empty_hypergraph() {
        let sequences = vec![seq("t1", &[1, 2, 3, 4, 5])];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(5), Exec::Sequential);
        assert!(h.hyperedges.is_empty());
        assert!(h.vertices.is_empty());
    }

    #[test]
    fn hyperedges_never_cross_companies() {
        let mut a = seq("t1", &[1, 2, 3]);
        let mut b = seq("t2", &[1, 2, 3]);
        a.company = "ACME".into();
        b.company = "BETA".into();
        let h = mine_hyperedges(&[a, b], Side::Sale, &lcs_config(3), Exec::Sequential);
        assert!(h.hyperedges.is_empty());
    }

    #[test]
    fn size_distribution_counts_and_percentages() {
        let sequences = vec![
            seq("t1", &[2, 3, 4, 5, 6, 9, 10, 11, 12, 13]),
            seq("t2", &[2, 3, 4, 5, 6, 15, 16, 17, 18, 19]),
            seq("t3", &[9, 10, 11, 12, 13, 15, 16, 17, 18, 19]),
        ];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(5), Exec::Sequential);
        let bins = hyperedge_size_distribution(&h);
        assert_eq!(bins.len(), 1);
        assert_eq!((bins[0].size, bins[0].count), (2, 3));
        assert_eq!(bins[0].percent, 100.0);

        let shared = [2, 3, 4, 5, 6];
        let sequences = vec![seq("t1", &shared), seq("t2", &shared), seq("t3", &shared)];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(5), Exec::Sequential);
        let bins = hyperedge_size_distribution(&h);
        assert_eq!((bins[0].size, bins[0].count, bins[0].percent), (3, 1, 100.0));

        let empty = Hypergraph {
            side: Side::Sale,
            vertices: vec![],
            hyperedges: vec![],
        };
        assert!(hyperedge_size_distribution(&empty).is_empty());
    }

    #[test]
    fn percentages_sum_to_one_hundred() {
        let sequences = vec![
            seq("a", &[1, 2, 3]),
            seq("b", &[1, 2, 3]),
            seq("c", &[1, 2, 3]),
            seq("d", &[10, 11, 12]),
            seq("e", &[10, 11, 12]),
            seq("f", &[20, 21, 22, 23]),
            seq("g", &[20, 21, 22, 23]),
        ];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(3), Exec::Sequential);
        let bins = hyperedge_size_distribution(&h);
        let total: f64 = bins.iter().map(|b| b.percent).sum();
        assert!((total - 100.0).abs() < 1e-9);
    }

    #[test]
    fn multi_edge_insiders_filters_and_sorts_by_incidence() {
        // Hub shares a distinct 3-date window with each of three pairs.
        let sequences = vec![
            seq("hub", &[1, 2, 3, 11, 12, 13, 21, 22, 23]),
            seq("a", &[1, 2, 3]),
            seq("b", &[11, 12, 13]),
            seq("c", &[21, 22, 23]),
        ];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(3), Exec::Sequential);
        assert_eq!(h.hyperedges.len(), 3);
        let multi = multi_edge_insiders(&h, 3);
        assert_eq!(multi.len(), 1);
        assert_eq!(multi[0].0, "hub");
        assert_eq!(multi[0].1.len(), 3);
        // Members with one incident hyperedge are excluded for min_edges >= 2.
        assert!(multi_edge_insiders(&h, 2)
            .iter()
            .all(|(id, _)| id == "hub"));
    }

    #[test]
    fn json_round_trips() {
        let shared = [2, 3, 4, 5, 6];
        let sequences = vec![seq("t1", &shared), seq("t2", &shared)];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(5), Exec::Sequential);
        let json = hypergraph_to_json(&h);
        assert_eq!(hypergraph_from_json(&json).unwrap(), h);
    }

    #[test]
    fn dot_renders_each_hyperedge_as_a_labeled_clique() {
        let shared = [2, 3, 4, 5, 6];
        let sequences = vec![seq("t1", &shared), seq("t2", &shared), seq("t3", &shared)];
        let h = mine_hyperedges(&sequences, Side::Sale, &lcs_config(5), Exec::Sequential);
        let dot = hypergraph_to_dot(&h);
        assert!(dot.contains("\"t1\" -- \"t2\" [label=\"h0:5\"]"));
        assert!(dot.contains("\"t1\" -- \"t3\" [label=\"h0:5\"]"));
        assert!(dot.contains("\"t2\" -- \"t3\" [label=\"h0:5\"]"));
    }

    /// Exhaustive reference: every subset of size >= 2 with intersection
    /// >= t, reduced to maximal member sets.
    fn exhaustive_hyperedges(
        seqs: &[DateSequence],
        t: usize,
    ) -> Vec<(Vec<String>, Vec<NaiveDate>)> {
        let n = seqs.len();
        let mut qualifying: Vec<(Vec<usize>, Vec<NaiveDate>)> = Vec::new();
        for mask in 1u32..(1 << n) {
            if mask.count_ones() < 2 {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let mut inter = seqs[idx[0]].dates.clone();
            for &i in &idx[1..] {
                inter = intersect(&inter, &seqs[i].dates);
            }
            if inter.len() >= t {
                qualifying.push((idx, inter));
            }
        }
        let maximal: Vec<(Vec<usize>, Vec<NaiveDate>)> = qualifying
            .iter()
            .filter(|(m, _)| {
                !qualifying
                    .iter()
                    .any(|(other, _)| other.len() > m.len() && m.iter().all(|i| other.contains(i)))
            })
            .cloned()
            .collect();
        let mut out: Vec<(Vec<String>, Vec<NaiveDate>)> = maximal
            .into_iter()
            .map(|(idx, inter)| {
                (
                    idx.iter().map(|&i| seqs[i].insider_id.clone()).collect(),
                    inter,
                )
            })
            .collect();
        out.sort();
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn miner_matches_exhaustive_enumeration(
            date_sets in proptest::collection::vec(
                proptest::collection::btree_set(0i64..20, 1..12),
                2..9,
            ),
            t in 2usize..4,
        ) {
            let seqs: Vec<DateSequence> = date_sets
                .iter()
                .enumerate()
                .map(|(i, s)| seq(&format!("i{i:02}"), &s.iter().copied().collect::<Vec<_>>()))
                .collect();
            let h = mine_hyperedges(&seqs, Side::Sale, &lcs_config(t), Exec::Sequential);
            let mut mined: Vec<(Vec<String>, Vec<NaiveDate>)> = h
                .hyperedges
                .iter()
                .map(|e| (e.members.clone(), e.witness.clone()))
                .collect();
            mined.sort();
            prop_assert_eq!(mined, exhaustive_hyperedges(&seqs, t));
        }

        #[test]
        fn witness_is_contained_in_every_member_sequence(
            date_sets in proptest::collection::vec(
                proptest::collection::btree_set(0i64..15, 1..10),
                2..8,
            ),
        ) {
            let seqs: Vec<DateSequence> = date_sets
                .iter()
                .enumerate()
                .map(|(i, s)| seq(&format!("i{i:02}"), &s.iter().copied().collect::<Vec<_>>()))
                .collect();
            let h = mine_hyperedges(&seqs, Side::Sale, &lcs_config(2), Exec::Sequential);
            for e in &h.hyperedges {
                prop_assert!(e.length >= 2);
                prop_assert_eq!(e.length, e.witness.len());
                for m in &e.members {
                    let member = seqs.iter().find(|s| &s.insider_id == m).unwrap();
                    prop_assert!(e.witness.iter().all(|d| member.dates.contains(d)));
                }
            }
        }

        #[test]
        fn hyperedge_members_are_pairwise_network_edges(
            date_sets in proptest::collection::vec(
                proptest::collection::btree_set(0i64..15, 1..10),
                2..8,
            ),
        ) {
            use crate::network::build_network;
            let seqs: Vec<DateSequence> = date_sets
                .iter()
                .enumerate()
                .map(|(i, s)| seq(&format!("i{i:02}"), &s.iter().copied().collect::<Vec<_>>()))
                .collect();
            let cfg = lcs_config(2);
            let h = mine_hyperedges(&seqs, Side::Sale, &cfg, Exec::Sequential);
            let net = build_network(&seqs, Side::Sale, &cfg, Exec::Sequential);
            for e in &h.hyperedges {
                for (i, a) in e.members.iter().enumerate() {
                    for b in &e.members[i + 1..] {
                        prop_assert!(
                            net.edges.iter().any(|ne| ne.a == *a && ne.b == *b),
                            "pair ({}, {}) missing from the pairwise network", a, b
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn maximality_holds_against_brute_force() {
        // Deterministic moderately-sized instance with overlapping groups.
        let seqs = vec![
            seq("a", &[1, 2, 3, 4, 5, 6]),
            seq("b", &[1, 2, 3, 4, 9, 10]),
            seq("c", &[1, 2, 3, 4, 5, 11]),
            seq("d", &[3, 4, 5, 6, 7, 8]),
            seq("e", &[9, 10, 11, 12, 13, 14]),
            seq("f", &[9, 10, 12, 13, 14, 15]),
        ];
        let t = 3;
        let h = mine_hyperedges(&seqs, Side::Sale, &lcs_config(t), Exec::Sequential);
        for e in &h.hyperedges {
            for w in &seqs {
                if e.members.contains(&w.insider_id) {
                    continue;
                }
                let joined = intersect(&e.witness, &w.dates);
                assert!(
                    joined.len() < t,
                    "{:?} could absorb {}",
                    e.members,
                    w.insider_id
                );
            }
        }
        let mut mined: Vec<(Vec<String>, Vec<NaiveDate>)> = h
            .hyperedges
            .iter()
            .map(|e| (e.members.clone(), e.witness.clone()))
            .collect();
        mined.sort();
        assert_eq!(mined, exhaustive_hyperedges(&seqs, t));
    }
}
