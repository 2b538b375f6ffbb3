//! Run a figure preset at reduced scale and write results, stats and the
//! manifest.
//!
//!     cargo run --release --example reproduce_figure -- fig2 [out_dir] [dataset]

use std::path::PathBuf;

use netreduce::cli::execute_sweep;
use netreduce::config::{preset, Figure, PresetOverrides};

fn main() -> netreduce::Result<()> {
    let mut args = std::env::args().skip(1);
    let figure: Figure = args.next().unwrap_or_else(|| "fig1".into()).parse()?;
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join(figure.id()));
    let dataset = args.next().map(PathBuf::from);

    let mut cfg = preset(figure, dataset.as_deref())?;
    PresetOverrides {
        sizes: Some(vec![100, 200]),
        seed_count: Some(5),
        ..Default::default()
    }
    .apply(&mut cfg)?;

    let outcome = execute_sweep(&cfg, &out, 0)?;
    println!(
        "{} -> {} ({} failed cells)",
        figure.id(),
        out.display(),
        outcome.hard_errors
    );
    print!(
        "{}",
        std::fs::read_to_string(out.join("stats.csv"))
            .map_err(|e| netreduce::Error::io(&out, e))?
    );
    Ok(())
}
