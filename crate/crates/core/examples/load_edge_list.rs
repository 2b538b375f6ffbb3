//! Load an edge-list file (the bundled sample by default) and report what
//! the loader did.
//!
//!     cargo run --example load_edge_list -- [path] [--directed]

use netreduce::graph::load_edge_list_path;

fn main() -> netreduce::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let directed = args.iter().any(|a| a == "--directed");
    let path = args
        .iter()
        .find(|a| !a.starts_with("--"))
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample12.edges").into());

    let report = load_edge_list_path(&path, !directed)?;
    let g = &report.graph;
    println!("{path}");
    println!(
        "  {} nodes, {} edges, total weight {}",
        g.n_nodes(),
        g.edge_count(),
        g.total_weight()
    );
    println!(
        "  {} self-loops dropped, {} duplicates merged",
        report.self_loops_dropped, report.duplicates_merged
    );

    let d = g.degrees();
    println!("  node  id  s_in  s_out");
    for (i, id) in report.original_ids.iter().enumerate().take(20) {
        println!("  {i:>4} {id:>3} {:>5} {:>6}", d.s_in[i], d.s_out[i]);
    }
    if g.n_nodes() > 20 {
        println!("  ...");
    }
    Ok(())
}
