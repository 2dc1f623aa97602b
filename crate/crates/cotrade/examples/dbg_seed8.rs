use cotrade::anomaly::{total_outlier_scores, AnomalyConfig};
use cotrade::exec::Exec;
use cotrade::ingest::{build_date_sequences, parse_trades, IngestConfig};
use cotrade::network::{all_egonet_stats, build_network};
use cotrade::similarity::SimilarityConfig;
use cotrade::synth::{generate, SynthConfig};
use cotrade::types::Side;

fn main() {
    let config = SynthConfig {
        seed: 8,
        n_companies: 50,
        insiders_per_company: (0, 0),
        trades_per_insider: (8, 12),
        n_planted_cliques: 50,
        clique_size: (4, 8),
        shared_subsequence_length: 5,
        n_planted_hubs: 5,
        cliques_per_hub: 3,
        ..SynthConfig::default()
    };
    let out = generate(&config, Exec::Sequential).unwrap();
    let (trades, _) = parse_trades(out.trades_csv.as_bytes(), IngestConfig::default()).unwrap();
    let sequences = build_date_sequences(&trades, 5);
    let scfg = SimilarityConfig { lcs_threshold_sale: 5, ..SimilarityConfig::default() };
    let net = build_network(&sequences, Side::Sale, &scfg, Exec::Sequential);
    let stats = all_egonet_stats(&net, Exec::Sequential);
    // cluster census
    let mut clusters: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
    for s in &stats { *clusters.entry((s.v, s.e)).or_default() += 1; }
    println!("clusters (v,e)->count: {clusters:?}");
    let (fit, records) = total_outlier_scores(&stats, &AnomalyConfig::default(), Exec::Sequential).unwrap();
    println!("exponent {:.4} coeff {:.4}", fit.exponent, fit.intercept.exp());
    for r in records.iter().take(16) {
        println!("rank {:2} {:10} v={:2} e={:3} f_v={:9.2} score={:9.3} lof={:e}", r.rank, r.insider_id, r.v, r.e, r.f_v, r.score, r.lof);
    }
}
