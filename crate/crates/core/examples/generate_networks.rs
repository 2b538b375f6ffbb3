//! Generate one network of each synthetic family and print degree statistics.
//!
//!     cargo run --example generate_networks -- [n] [seed]

use netreduce::graph::{gen_ba, gen_er, gen_sw, Graph};

fn summary(name: &str, g: &Graph) {
    let d = g.degrees();
    let n = g.n_nodes() as f64;
    let mean = d.s_out.iter().sum::<f64>() / n;
    let max = d.s_out.iter().cloned().fold(0.0, f64::max);
    let min = d.s_out.iter().cloned().fold(f64::INFINITY, f64::min);
    let corr = g.degree_correlation().unwrap_or(f64::NAN);
    println!(
        "{name:<14} nodes {:>4}  edges {:>6}  degree mean {mean:>7.2} min {min:>4} max {max:>4}  corr {corr:+.3}",
        g.n_nodes(),
        g.edge_count()
    );
}

fn main() -> netreduce::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(300, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));

    let er = gen_er(n, 0.5, seed)?;
    // m = 25 gives roughly half the mean degree of C = 0.5 at n = 100
    let ba = gen_ba(n, 25, seed)?;
    let sw = gen_sw(n, 100.min(n - 1 - (n - 1) % 2), 0.1, seed)?;

    summary("er(c=0.5)", &er);
    summary("ba(m=25)", &ba);
    summary("sw(k=100)", &sw);

    let path = std::env::temp_dir().join(format!("er_{n}_{seed}.edges"));
    std::fs::write(&path, er.to_edge_list()).map_err(|e| netreduce::Error::io(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}
