use super::sweep::SweepRow;
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::simulate::InitRegime;

/// Five-number summary plus mean and count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

/// Quantile by linear interpolation between order statistics of a sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn error_stats(errs: &[f64]) -> Result<ErrorSummary> {
    if errs.is_empty() {
        return Err(Error::NoData);
    }
    let mut sorted = errs.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ErrorSummary {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        count: sorted.len(),
    })
}

/// Error statistics of one `(p, n)` group of sweep rows.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsRow {
    pub model: ModelKind,
    pub network: String,
    pub p: f64,
    pub n: usize,
    /// Rows that entered the statistics.
    pub count: usize,
    /// Non-converged or failed rows.
    pub excluded: usize,
    /// Included rows whose `|x_num|` fell below the error floor.
    pub degenerate: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Median over low-start rows only; NaN when there are none.
    pub median_low: f64,
    pub median_high: f64,
}

fn median_of(rows: &[&SweepRow], regime: InitRegime) -> f64 {
    let errs: Vec<f64> = rows
        .iter()
        .filter(|r| r.init_regime == regime)
        .map(|r| r.err)
        .collect();
    error_stats(&errs).map_or(f64::NAN, |s| s.median)
}

/// Group usable rows by `(p, n)`, in ascending order. Groups with no usable
/// row are reported with NaN statistics.
pub fn group_stats(rows: &[SweepRow]) -> Vec<StatsRow> {
    let mut keys: Vec<(f64, usize)> = rows.iter().map(|r| (r.p, r.n)).collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.dedup_by(|a, b| a.0.to_bits() == b.0.to_bits() && a.1 == b.1);

    keys.into_iter()
        .map(|(p, n)| {
            let group: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.p.to_bits() == p.to_bits() && r.n == n)
                .collect();
            let usable: Vec<&SweepRow> = group.iter().copied().filter(|r| r.is_usable()).collect();
            let errs: Vec<f64> = usable.iter().map(|r| r.err).collect();
            let s = error_stats(&errs).unwrap_or(ErrorSummary {
                min: f64::NAN,
                q1: f64::NAN,
                median: f64::NAN,
                q3: f64::NAN,
                max: f64::NAN,
                mean: f64::NAN,
                count: 0,
            });
            StatsRow {
                model: group[0].model,
                network: group[0].network.clone(),
                p,
                n,
                count: s.count,
                excluded: group.len() - usable.len(),
                degenerate: usable.iter().filter(|r| r.err_degenerate).count(),
                min: s.min,
                q1: s.q1,
                median: s.median,
                q3: s.q3,
                max: s.max,
                mean: s.mean,
                median_low: median_of(&usable, InitRegime::Low),
                median_high: median_of(&usable, InitRegime::High),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_points() {
        let s = error_stats(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            (s.min, s.q1, s.median, s.q3, s.max),
            (1.0, 2.0, 3.0, 4.0, 5.0)
        );
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.count, 5);
    }

    #[test]
    fn singleton() {
        let s = error_stats(&[0.7]).unwrap();
        assert!([s.min, s.q1, s.median, s.q3, s.max]
            .iter()
            .all(|&v| v == 0.7));
    }

    #[test]
    fn two_points() {
        assert!((error_stats(&[0.1, 0.2]).unwrap().median - 0.15).abs() < 1e-15);
    }

    fn row(p: f64, n: usize, err: f64, regime: InitRegime, converged: bool) -> SweepRow {
        SweepRow {
            model: ModelKind::Sis,
            network: "er(c=0.5)".into(),
            n,
            net_seed: 0,
            dyn_seed: 0,
            p,
            mu_e: 1.0,
            weight_mult: 1.0,
            a_eff: 1.0,
            e_eff: 1.0,
            init_regime: regime,
            x_eff_num: 0.5,
            x_eff_ana: 0.5,
            err,
            converged,
            t_final: 1.0,
            residual: 0.0,
            ana_stable: true,
            err_degenerate: false,
            error: String::new(),
        }
    }

    #[test]
    fn grouping() {
        use InitRegime::*;
        let rows = vec![
            row(0.5, 200, 0.3, Low, true),
            row(0.5, 100, 0.1, Low, true),
            row(0.5, 100, 0.2, High, true),
            row(0.5, 100, 9.0, High, false),
            row(0.25, 100, 0.05, Low, true),
        ];
        let g = group_stats(&rows);
        assert_eq!(g.len(), 3);
        assert_eq!((g[0].p, g[0].n), (0.25, 100));
        assert_eq!((g[1].p, g[1].n), (0.5, 100));
        assert_eq!((g[2].p, g[2].n), (0.5, 200));
        assert_eq!(g[1].count, 2);
        assert_eq!(g[1].excluded, 1);
        assert!((g[1].median - 0.15).abs() < 1e-15);
        assert_eq!(g[1].median_low, 0.1);
        assert_eq!(g[1].median_high, 0.2);
        assert!(g[0].median_high.is_nan());
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(error_stats(&[]), Err(Error::NoData)));
    }
}
