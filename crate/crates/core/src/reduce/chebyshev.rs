use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};

/// Polynomial `Σ_k coeffs[k] x^k` fitted on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyApprox {
    pub coeffs: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl PolyApprox {
    pub fn constant(c: f64, lo: f64, hi: f64) -> Self {
        PolyApprox {
            coeffs: vec![c],
            lo,
            hi,
        }
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// CSV rows `k,coefficient,domain_lo,domain_hi` with `k` starting at 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "coefficient", "domain_lo", "domain_hi"])?;
        for (k, c) in self.coeffs.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                format!("{c:.16e}"),
                format!("{:.16e}", self.lo),
                format!("{:.16e}", self.hi),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// The `m` Chebyshev points of the first kind mapped onto `[lo, hi]`.
pub fn chebyshev_nodes(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..m)
        .map(|k| mid + half * (PI * (k as f64 + 0.5) / m as f64).cos())
        .collect()
}

fn check_domain(lo: f64, hi: f64, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Fit("need at least one term".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Fit(format!("invalid domain [{lo}, {hi}]")));
    }
    Ok(())
}

/// Interpolate `f` at the Chebyshev points of `[lo, hi]` and return the
/// interpolant in the monomial basis.
pub fn chebyshev_fit(f: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> Result<PolyApprox> {
    check_domain(lo, hi, m)?;
    let values: Vec<f64> = chebyshev_nodes(lo, hi, m).into_iter().map(f).collect();
    chebyshev_fit_values(&values, lo, hi)
}

/// As [`chebyshev_fit`], from values already sampled at
/// [`chebyshev_nodes`]`(lo, hi, values.len())`.
pub fn chebyshev_fit_values(values: &[f64], lo: f64, hi: f64) -> Result<PolyApprox> {
    let m = values.len();
    check_domain(lo, hi, m)?;
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Fit(format!("non-finite value at node {k}")));
    }

    // Björck–Pereyra solve of the Vandermonde system on ascending nodes:
    // Newton divided differences, then expansion of the Newton form.
    let mut xs = chebyshev_nodes(lo, hi, m);
    xs.reverse();
    let mut coeffs: Vec<f64> = values.iter().rev().copied().collect();
    for k in 0..m {
        for j in (k + 1..m).rev() {
            coeffs[j] = (coeffs[j] - coeffs[j - 1]) / (xs[j] - xs[j - k - 1]);
        }
    }
    for k in (0..m - 1).rev() {
        for j in k..m - 1 {
            coeffs[j] -= xs[k] * coeffs[j + 1];
        }
    }
    Ok(PolyApprox { coeffs, lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lagrange form through the same nodes, independent of the basis change.
    fn lagrange(nodes: &[f64], values: &[f64], x: f64) -> f64 {
        let mut s = 0.0;
        for (i, (&xi, &yi)) in nodes.iter().zip(values).enumerate() {
            let mut l = 1.0;
            for (j, &xj) in nodes.iter().enumerate() {
                if i != j {
                    l *= (x - xj) / (xi - xj);
                }
            }
            s += yi * l;
        }
        s
    }

    #[test]
    fn recovers_square() {
        let p = chebyshev_fit(|x| x * x, 0.0, 1.0, 3).unwrap();
        for (c, want) in p.coeffs.iter().zip([0.0, 0.0, 1.0]) {
            assert!((c - want).abs() < 1e-12, "{:?}", p.coeffs);
        }
    }

    #[test]
    fn recovers_constant() {
        let p = chebyshev_fit(|_| 5.0, -3.0, 7.0, 4).unwrap();
        for (c, want) in p.coeffs.iter().zip([5.0, 0.0, 0.0, 0.0]) {
            assert!((c - want).abs() < 1e-12, "{:?}", p.coeffs);
        }
    }

    #[test]
    fn single_term_is_value_at_midpoint() {
        let p = chebyshev_fit(|x| 2.0 * x + 1.0, 0.0, 2.0, 1).unwrap();
        assert_eq!(p.coeffs, vec![3.0]);
    }

    #[test]
    fn matches_lagrange_interpolant() {
        let f = |x: f64| (3.0 * x).sin() + 1.0 / (1.0 + x);
        let (lo, hi) = (0.0, 2.5);
        let m = 7;
        let p = chebyshev_fit(f, lo, hi, m).unwrap();
        let nodes = chebyshev_nodes(lo, hi, m);
        let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        for &x in &nodes {
            assert!((p.eval(x) - f(x)).abs() < 1e-12);
        }
        for i in 0..=50 {
            let x = lo + (hi - lo) * i as f64 / 50.0;
            assert!((p.eval(x) - lagrange(&nodes, &values, x)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(chebyshev_fit(|x| x, 0.0, 1.0, 0).is_err());
        assert!(chebyshev_fit(|x| x, 1.0, 1.0, 3).is_err());
        // Chebyshev nodes avoid the endpoint singularity
        assert!(chebyshev_fit(|x| 1.0 / x, 0.0, 1.0, 2).is_ok());
        assert!(matches!(
            chebyshev_fit(|x| if x < 0.5 { f64::NAN } else { x }, 0.0, 1.0, 4),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn csv_rows() {
        let p = PolyApprox {
            coeffs: vec![1.0, -0.5],
            lo: 0.0,
            hi: 1.0,
        };
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,coefficient,domain_lo,domain_hi");
        assert!(lines[2].starts_with("2,-5.0000000000000000e-1,"));
    }
}
