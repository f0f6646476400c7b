//! Finite-window estimates of classical upper densities.
//!
//! Each limsup is replaced by a maximum over a logarithmic grid (16 points
//! per decade) restricted to the top decade `[N/10, N]` of the window.
//! These are approximations with no convergence guarantee.

use serde::Serialize;
use thiserror::Error;

use crate::setspec::{SetSpec, SetSpecError};

pub const CAVEAT: &str = "finite-window approximation, no convergence guarantee";
pub const GRID_POINTS_PER_DECADE: u32 = 16;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("alpha must be >= -1, got {0}")]
    AlphaOutOfRange(f64),
    #[error("analytic density needs every s > 1, got {0}")]
    AnalyticExponent(f64),
    #[error("Polya density needs every s in (0, 1), got {0}")]
    PolyaExponent(f64),
    #[error("invalid window: {0}")]
    Window(String),
    #[error(transparent)]
    Set(#[from] SetSpecError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Alpha,
    Banach,
    Analytic,
    Polya,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Alpha => "alpha",
            Method::Banach => "banach",
            Method::Analytic => "analytic",
            Method::Polya => "polya",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    /// `alpha`, `s`, or window length, depending on the method.
    pub parameter: f64,
    pub n: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub method: Method,
    /// Parameters used, as `name=value` pairs.
    pub window: Vec<(String, String)>,
    pub caveat: &'static str,
    /// Per-parameter values behind `value`.
    pub grid: Vec<GridPoint>,
    /// Analytic only: the largest `sum_{i > B} i^-s` over the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
}

impl DensityEstimate {
    fn new(method: Method, window: Vec<(&str, String)>, grid: Vec<GridPoint>, value: f64) -> Self {
        DensityEstimate {
            value,
            method,
            window: window.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            caveat: CAVEAT,
            grid,
            tail_bound: None,
        }
    }

    pub fn window_string(&self) -> String {
        self.window.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

/// Indicator of `X ∩ [1, n]` (index 0 unused).
fn indicator(spec: &SetSpec, n: u64) -> Result<Vec<bool>, EstimatorError> {
    let mut ind = vec![false; n as usize + 1];
    for x in spec.enumerate(n)? {
        if x >= 1 {
            ind[x as usize] = true;
        }
    }
    Ok(ind)
}

/// Grid points `round(10^(j/16))` within `[lo, hi]`, always including `hi`.
pub fn log_grid(lo: u64, hi: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..=GRID_POINTS_PER_DECADE * 20)
        .map(|j| 10f64.powf(j as f64 / GRID_POINTS_PER_DECADE as f64).round() as u64)
        .filter(|&n| n >= lo.max(1) && n <= hi)
        .collect();
    out.push(hi);
    out.dedup();
    out
}

fn top_decade(n: u64) -> Vec<u64> {
    log_grid(n / 10, n)
}

/// Upper alpha-density: `sum_{i in X, i <= n} i^alpha / sum_{i <= n} i^alpha`,
/// maximised over the top-decade grid. Both sums start after a head of
/// `floor(sqrt(N))` terms, which removes the `O(1/log N)` bias of the
/// logarithmic case without changing the limit.
pub fn alpha_density_upper(spec: &SetSpec, alpha: f64, n: u64) -> Result<DensityEstimate, EstimatorError> {
    if alpha.is_nan() || alpha < -1.0 {
        return Err(EstimatorError::AlphaOutOfRange(alpha));
    }
    if n == 0 {
        return Err(EstimatorError::Window("N must be >= 1".into()));
    }
    let ind = indicator(spec, n)?;
    let head = (n as f64).sqrt().floor() as u64;
    let grid = top_decade(n);
    let (mut num, mut den) = (0f64, 0f64);
    let mut next = grid.iter().peekable();
    let mut points = Vec::new();
    for i in 1..=n {
        if i > head.min(n - 1) {
            let w = (i as f64).powf(alpha);
            den += w;
            if ind[i as usize] {
                num += w;
            }
        }
        if next.peek() == Some(&&i) {
            next.next();
            if den > 0.0 {
                points.push(GridPoint { parameter: alpha, n: i, value: num / den });
            }
        }
    }
    let value = points.iter().map(|p| p.value).fold(0.0, f64::max);
    Ok(DensityEstimate::new(Method::Alpha, vec![("alpha", alpha.to_string()), ("N", n.to_string())], points, value))
}

/// Upper Banach density at window length `len`: the largest share of
/// `X ∩ [k+1, k+len]` over `0 <= k <= B - len`. The grid holds the same
/// quantity at shorter lengths; `value` is the one at `len`.
pub fn banach_upper(spec: &SetSpec, len: u64, scan_bound: u64) -> Result<DensityEstimate, EstimatorError> {
    if len == 0 || len > scan_bound {
        return Err(EstimatorError::Window(format!("need 1 <= n <= B, got n={len}, B={scan_bound}")));
    }
    let ind = indicator(spec, scan_bound)?;
    let mut prefix = vec![0u32; ind.len()];
    for i in 1..ind.len() {
        prefix[i] = prefix[i - 1] + ind[i] as u32;
    }
    let best = |w: u64| -> f64 {
        let w = w as usize;
        let most = (w..ind.len()).map(|end| prefix[end] - prefix[end - w]).max().unwrap_or(0);
        most as f64 / w as f64
    };
    let lengths = log_grid(len.div_ceil(100).max(1), len);
    let grid: Vec<GridPoint> =
        lengths.iter().map(|&w| GridPoint { parameter: w as f64, n: scan_bound, value: best(w) }).collect();
    let value = grid.last().map(|p| p.value).unwrap_or(0.0);
    Ok(DensityEstimate::new(Method::Banach, vec![("n", len.to_string()), ("B", scan_bound.to_string())], grid, value))
}

/// Upper analytic density: the largest `sum_{i in X, h < i <= B} i^-s /
/// sum_{h < i <= B} i^-s` over the grid (truncated zeta denominator, head
/// `h = floor(sqrt(B))`). `tail_bound` is `max_s B^(1-s)/(s-1)`.
pub fn analytic_upper(spec: &SetSpec, s_grid: &[f64], bound: u64) -> Result<DensityEstimate, EstimatorError> {
    if let Some(&s) = s_grid.iter().find(|&&s| s.is_nan() || s <= 1.0) {
        return Err(EstimatorError::AnalyticExponent(s));
    }
    if bound < 2 || s_grid.is_empty() {
        return Err(EstimatorError::Window("need B >= 2 and a non-empty s-grid".into()));
    }
    let ind = indicator(spec, bound)?;
    let head = (bound as f64).sqrt().floor() as u64;
    let logs: Vec<f64> = (0..=bound).map(|i| (i.max(1) as f64).ln()).collect();
    let grid: Vec<GridPoint> = s_grid
        .iter()
        .map(|&s| {
            let (mut num, mut den) = (0f64, 0f64);
            for i in head + 1..=bound {
                let w = (-s * logs[i as usize]).exp();
                den += w;
                if ind[i as usize] {
                    num += w;
                }
            }
            GridPoint { parameter: s, n: bound, value: num / den }
        })
        .collect();
    let value = grid.iter().map(|p| p.value).fold(0.0, f64::max);
    let tail = s_grid.iter().map(|&s| (bound as f64).powf(1.0 - s) / (s - 1.0)).fold(0.0, f64::max);
    let grid_str = s_grid.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    let mut est = DensityEstimate::new(Method::Analytic, vec![("s", grid_str), ("B", bound.to_string())], grid, value);
    est.tail_bound = Some(tail);
    Ok(est)
}

/// Upper Pólya density: for each `s`, the largest
/// `(|X ∩ [1, n]| - |X ∩ [1, ns]|) / ((1 - s) n)` over the top-decade grid.
/// `value` is the one at the largest `s`, standing in for `s -> 1`.
pub fn polya_upper(spec: &SetSpec, s_grid: &[f64], n: u64) -> Result<DensityEstimate, EstimatorError> {
    if let Some(&s) = s_grid.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
        return Err(EstimatorError::PolyaExponent(s));
    }
    if n < 10 || s_grid.is_empty() {
        return Err(EstimatorError::Window("need N >= 10 and a non-empty s-grid".into()));
    }
    let ind = indicator(spec, n)?;
    let mut count = vec![0u32; ind.len()];
    for i in 1..ind.len() {
        count[i] = count[i - 1] + ind[i] as u32;
    }
    let mut grid = Vec::new();
    let mut s_sorted = s_grid.to_vec();
    s_sorted.sort_by(f64::total_cmp);
    for &s in &s_sorted {
        let mut best = GridPoint { parameter: s, n: 0, value: 0.0 };
        for m in top_decade(n) {
            let lower = (m as f64 * s).floor() as usize;
            let v = (count[m as usize] - count[lower]) as f64 / ((1.0 - s) * m as f64);
            if v > best.value || best.n == 0 {
                best = GridPoint { parameter: s, n: m, value: v };
            }
        }
        grid.push(best);
    }
    let value = grid.last().map(|p| p.value).unwrap_or(0.0);
    let grid_str = s_sorted.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    Ok(DensityEstimate::new(Method::Polya, vec![("s", grid_str), ("N", n.to_string())], grid, value))
}

/// Default windows for every estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Windows {
    pub alpha_n: u64,
    pub banach_len: u64,
    pub banach_bound: u64,
    pub analytic_s: Vec<f64>,
    pub analytic_bound: u64,
    pub polya_s: Vec<f64>,
    pub polya_n: u64,
}

impl Default for Windows {
    fn default() -> Self {
        Windows {
            alpha_n: 100_000,
            banach_len: 1000,
            banach_bound: 100_000,
            analytic_s: vec![1.2, 1.1, 1.05, 1.02],
            analytic_bound: 1_000_000,
            polya_s: vec![0.5, 0.75, 0.9],
            polya_n: 100_000,
        }
    }
}

/// Upper asymptotic (alpha = 0), upper logarithmic (alpha = -1), Banach,
/// analytic and Pólya estimates at the given windows.
pub fn all_estimates(spec: &SetSpec, w: &Windows) -> Result<Vec<DensityEstimate>, EstimatorError> {
    Ok(vec![
        alpha_density_upper(spec, 0.0, w.alpha_n)?,
        alpha_density_upper(spec, -1.0, w.alpha_n)?,
        banach_upper(spec, w.banach_len, w.banach_bound)?,
        analytic_upper(spec, &w.analytic_s, w.analytic_bound)?,
        polya_upper(spec, &w.polya_s, w.polya_n)?,
    ])
}

/// One row per estimate: `method,window,value`.
pub fn write_csv<W: std::io::Write>(estimates: &[DensityEstimate], out: W) -> Result<(), EstimatorError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["method", "window", "value"])?;
    for e in estimates {
        writer.write_record([e.method.to_string(), e.window_string(), format!("{:.6}", e.value)])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setspec::{Ambient, Node};

    fn n(node: Node) -> SetSpec {
        SetSpec::new(Ambient::NonNegative, node).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let evens = n(Node::ap(2, 0));
        assert!((alpha_density_upper(&evens, 0.0, 100_000).unwrap().value - 0.5).abs() <= 0.01);
        assert!(alpha_density_upper(&n(Node::poly(&[0, 0, 1])), 0.0, 100_000).unwrap().value <= 0.01);
        assert!((alpha_density_upper(&n(Node::ap(2, 1)), -1.0, 100_000).unwrap().value - 0.5).abs() <= 0.02);
        assert!(alpha_density_upper(&evens, -1.5, 10).is_err());
    }

    #[test]
    fn banach_examples() {
        assert!((banach_upper(&n(Node::ap(3, 1)), 300, 100_000).unwrap().value - 1.0 / 3.0).abs() <= 0.01);
        assert!(banach_upper(&n(Node::finite(&[1, 5, 9, 700])), 1000, 100_000).unwrap().value <= 0.05);
        assert!(banach_upper(&n(Node::FactorialShift), 100, 1_000_000).unwrap().value <= 0.05);
        assert!(banach_upper(&n(Node::ap(3, 1)), 10, 5).is_err());
    }

    #[test]
    fn analytic_examples() {
        let all = analytic_upper(&n(Node::ap(1, 0)), &[1.2, 1.05], 100_000).unwrap();
        assert!((all.value - 1.0).abs() <= 1e-12);
        assert!(all.tail_bound.unwrap() > 0.0);
        let evens = analytic_upper(&n(Node::ap(2, 0)), &[1.05], 1_000_000).unwrap();
        assert!((evens.value - 0.5).abs() <= 0.05);
        assert!(analytic_upper(&n(Node::poly(&[0, 0, 1])), &[1.1], 1_000_000).unwrap().value <= 0.05);
        assert!(analytic_upper(&n(Node::ap(2, 0)), &[1.0], 100).is_err());
    }

    #[test]
    fn polya_examples() {
        assert!((polya_upper(&n(Node::ap(2, 0)), &[0.9], 100_000).unwrap().value - 0.5).abs() <= 0.02);
        assert!((polya_upper(&n(Node::ap(5, 0)), &[0.99], 100_000).unwrap().value - 0.2).abs() <= 0.02);
        assert!(polya_upper(&n(Node::poly(&[0, 0, 1])), &[0.9], 1_000_000).unwrap().value <= 0.05);
        assert!(polya_upper(&n(Node::ap(2, 0)), &[1.0], 100).is_err());
    }

    #[test]
    fn csv_rows() {
        let est = vec![polya_upper(&n(Node::ap(2, 0)), &[0.5, 0.9], 1000).unwrap()];
        let mut buf = Vec::new();
        write_csv(&est, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("method,window,value"));
        assert!(text.lines().nth(1).unwrap().starts_with("polya,\"s=0.5,0.9;N=1000\","));
    }

    #[test]
    fn grid_has_sixteen_points_per_decade() {
        assert_eq!(log_grid(10, 100).len(), 17);
        assert_eq!(*log_grid(1, 99_999).last().unwrap(), 99_999);
    }
}
