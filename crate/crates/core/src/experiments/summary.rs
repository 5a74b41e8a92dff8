use std::collections::BTreeMap;

use serde::Serialize;

use super::record::{sort_records, SweepRecord};
use crate::error::{Error, Result};

/// Seed statistics of one (d, n, c) column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedBand {
    pub mean: f64,
    /// Standard error of the mean over seeds (0 for a single seed).
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
    pub seeds: usize,
}

impl SeedBand {
    pub(crate) fn from_values(values: &[f64]) -> Self {
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let std_error = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
        } else {
            0.0
        };
        SeedBand {
            mean,
            std_error,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            seeds: values.len(),
        }
    }
}

type Columns = BTreeMap<(usize, usize), Vec<(f64, f64, Vec<f64>)>>;

/// Group clean records by (d, n) and then by c, collecting `value` per seed.
/// Returns the grouping plus the coordinates of excluded records.
fn columns(
    records: &[SweepRecord],
    value: impl Fn(&SweepRecord) -> Option<f64>,
) -> (Columns, Vec<String>) {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut excluded = Vec::new();
    let mut out: Columns = BTreeMap::new();
    for r in &sorted {
        let v = match (r.is_clean(), value(r)) {
            (true, Some(v)) if v.is_finite() => v,
            _ => {
                excluded.push(r.coordinates());
                continue;
            }
        };
        let cols = out.entry((r.d, r.n)).or_default();
        match cols.iter_mut().find(|(c, _, _)| *c == r.c) {
            Some((_, _, vs)) => vs.push(v),
            None => cols.push((r.c, r.c_ratio, vec![v])),
        }
    }
    for cols in out.values_mut() {
        cols.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    (out, excluded)
}

fn require_two_c(cols: &Columns) -> Result<()> {
    if cols.is_empty() {
        return Err(Error::InvalidInput("no usable records".into()));
    }
    for ((d, n), c) in cols {
        if c.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "d={d} n={n}: need at least two bandwidths, found {}",
                c.len()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinRiskRow {
    pub d: usize,
    pub n: usize,
    /// Bandwidth with the smallest seed-averaged risk.
    pub c_best: f64,
    pub c_ratio_best: f64,
    pub risk: SeedBand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InconsistencySummary {
    pub rows: Vec<MinRiskRow>,
    /// Spearman correlation of the minimum risk against n, per d
    /// (NaN with fewer than two sample sizes).
    pub trends: Vec<(usize, f64)>,
    /// Records left out: failed, jittered or missing the risk estimate.
    pub excluded: Vec<String>,
}

impl InconsistencySummary {
    pub fn min_risk(&self) -> f64 {
        self.rows.iter().map(|r| r.risk.mean).fold(f64::INFINITY, f64::min)
    }
}

/// Minimum over c of the seed-averaged risk for every (d, n), with its seed
/// band and the trend of that minimum in n.
pub fn inconsistency_summary(records: &[SweepRecord]) -> Result<InconsistencySummary> {
    let (cols, excluded) = columns(records, |r| r.risk_mean);
    require_two_c(&cols)?;
    let mut rows = Vec::new();
    for (&(d, n), cs) in &cols {
        let best = cs
            .iter()
            .map(|(c, ratio, vs)| (*c, *ratio, SeedBand::from_values(vs)))
            .min_by(|a, b| a.2.mean.total_cmp(&b.2.mean))
            .expect("at least two bandwidths");
        rows.push(MinRiskRow {
            d,
            n,
            c_best: best.0,
            c_ratio_best: best.1,
            risk: best.2,
        });
    }
    let mut trends = Vec::new();
    let mut ds: Vec<usize> = rows.iter().map(|r| r.d).collect();
    ds.dedup();
    for d in ds {
        let (ns, risks): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.d == d)
            .map(|r| (r.n as f64, r.risk.mean))
            .unzip();
        trends.push((d, spearman(&ns, &risks)));
    }
    Ok(InconsistencySummary {
        rows,
        trends,
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeRow {
    pub d: usize,
    pub n: usize,
    pub c: f64,
    pub c_ratio: f64,
    /// ‖f̂‖²_{L²(Ω)} / ‖f₀‖²_{L²(Ω)} over seeds.
    pub ratio: SeedBand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeSummary {
    pub rows: Vec<SpikeRow>,
    pub excluded: Vec<String>,
}

/// ‖f̂‖² / ‖f₀‖² against c/n^{1/d} for every (d, n).
pub fn spike_regime_summary(records: &[SweepRecord]) -> Result<SpikeSummary> {
    let (cols, excluded) = columns(records, |r| match (r.l2_fhat_mean, r.l2_f0) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    });
    require_two_c(&cols)?;
    let rows = cols
        .iter()
        .flat_map(|(&(d, n), cs)| {
            cs.iter().map(move |(c, c_ratio, vs)| SpikeRow {
                d,
                n,
                c: *c,
                c_ratio: *c_ratio,
                ratio: SeedBand::from_values(vs),
            })
        })
        .collect();
    Ok(SpikeSummary { rows, excluded })
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // Ties share the average of their positions.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// side is constant or there are fewer than two points.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let k = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / k, ry.iter().sum::<f64>() / k);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}
