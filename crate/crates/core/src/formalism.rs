//! Structure functions, scaling functions and Legendre spectra.
//!
//! Function side: `S(j,p) = 2^{-j} Σ d_λ^p` over the nonzero leaders of level `j`,
//! `ω(p)` is the regression slope of `log2 S(j,p)` against `-j`, and
//! `D(h) = min_{p≠0} (hp - ω(p) + d)`.
//!
//! Measure side: `τ(q)` is the regression slope of `log Σ* μ(λ)^q` against
//! `-n log b`, and `τ*(α) = min_q (αq - τ(q))`.
//!
//! Spectrum values below zero are reported as `f64::NEG_INFINITY`.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::{linear_fit, log2_sum_exp2};
use crate::leaders::{FitWindow, LeaderPyramid};
use crate::measures::BAdicMeasure;
use crate::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 81;
pub const DEFAULT_GRID_BOUND: f64 = 10.0;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// 81 points on `[-10, 10]`, shared by `p` and `q`.
pub fn default_grid() -> Vec<f64> {
    linspace(-DEFAULT_GRID_BOUND, DEFAULT_GRID_BOUND, DEFAULT_GRID_POINTS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureFunction {
    pub p: Vec<f64>,
    pub scales: Vec<usize>,
    /// `log2 S(j, p)`, indexed `[scale][p]`.
    pub log2_values: Vec<Vec<f64>>,
    /// Nonzero leaders per scale.
    pub counts: Vec<usize>,
    /// Zero leaders left out of the sums, per scale.
    pub excluded: Vec<usize>,
}

impl StructureFunction {
    pub fn value(&self, scale_index: usize, p_index: usize) -> f64 {
        self.log2_values[scale_index][p_index].exp2()
    }
}

pub fn structure_function(
    lp: &LeaderPyramid,
    p_grid: &[f64],
    scales: RangeInclusive<usize>,
) -> Result<StructureFunction> {
    if scales.is_empty() || *scales.end() >= lp.levels() {
        return Err(Error::EmptyRange {
            start: *scales.start(),
            end: *scales.end(),
        });
    }
    let mut out = StructureFunction {
        p: p_grid.to_vec(),
        scales: scales.clone().collect(),
        log2_values: Vec::new(),
        counts: Vec::new(),
        excluded: Vec::new(),
    };
    for j in scales {
        let logs: Vec<f64> = lp
            .level(j)
            .iter()
            .filter(|&&d| d > 0.0)
            .map(|d| d.log2())
            .collect();
        if logs.is_empty() {
            return Err(Error::DegenerateLevel { level: j });
        }
        let row = p_grid
            .par_iter()
            .map(|&p| log2_sum_exp2(logs.iter().map(|l| p * l)) - j as f64)
            .collect();
        out.excluded.push(lp.level(j).len() - logs.len());
        out.counts.push(logs.len());
        out.log2_values.push(row);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFunction {
    pub p: Vec<f64>,
    pub omega: Vec<f64>,
    pub r2: Vec<f64>,
    pub range: (usize, usize),
}

impl ScalingFunction {
    /// Largest discrete second difference; concave functions give values `<= 0`.
    pub fn max_second_difference(&self) -> f64 {
        second_differences(&self.p, &self.omega)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_concave(&self, tol: f64) -> bool {
        self.max_second_difference() <= tol
    }
}

/// Second differences normalised to a unit step, so uneven grids compare alike.
fn second_differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    (1..x.len().saturating_sub(1))
        .map(|i| {
            let left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            let right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
            (right - left) * 0.5 * (x[i + 1] - x[i - 1])
        })
        .collect()
}

/// Least-squares `ω(p)` over the scales of `window`, which must hold at least four.
pub fn scaling_function(sf: &StructureFunction, window: FitWindow) -> Result<ScalingFunction> {
    let first = sf.scales.first().copied().unwrap_or(0);
    let last = sf.scales.last().copied().unwrap_or(0);
    if window.start < first || window.end > last || window.end < window.start + 3 {
        return Err(Error::EmptyRange {
            start: window.start,
            end: window.end,
        });
    }
    let rows = (window.start - first)..=(window.end - first);
    let x: Vec<f64> = rows.clone().map(|i| -(sf.scales[i] as f64)).collect();
    let (omega, r2) = (0..sf.p.len())
        .into_par_iter()
        .map(|k| {
            let y: Vec<f64> = rows.clone().map(|i| sf.log2_values[i][k]).collect();
            let fit = linear_fit(&x, &y).expect("distinct scales");
            (fit.slope, fit.r2)
        })
        .unzip();
    Ok(ScalingFunction {
        p: sf.p.clone(),
        omega,
        r2,
        range: (window.start, window.end),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumSource {
    FunctionLeaders,
    MeasureTau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    pub source: SpectrumSource,
}

impl SpectrumEstimate {
    /// Grid point of maximal `D`, if any value is finite.
    pub fn apex(&self) -> Option<(f64, f64)> {
        self.h
            .iter()
            .zip(&self.d)
            .filter(|(_, d)| d.is_finite())
            .fold(None, |best: Option<(f64, f64)>, (&h, &d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((h, d)),
            })
    }

    pub fn max(&self) -> f64 {
        self.d.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest second difference over runs of consecutive finite values.
    pub fn max_second_difference(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        let mut i = 0;
        while i < self.d.len() {
            let start = i;
            while i < self.d.len() && self.d[i].is_finite() {
                i += 1;
            }
            if i > start {
                for v in second_differences(&self.h[start..i], &self.d[start..i]) {
                    worst = worst.max(v);
                }
            }
            i += 1;
        }
        worst
    }

    /// `D(h)` by linear interpolation between grid points, `-∞` off the finite support.
    pub fn at(&self, h: f64) -> f64 {
        let n = self.h.len();
        if n == 0 || h < self.h[0] || h > self.h[n - 1] {
            return f64::NEG_INFINITY;
        }
        let i = self.h.partition_point(|&x| x <= h).clamp(1, n - 1);
        let (h0, h1) = (self.h[i - 1], self.h[i]);
        let (d0, d1) = (self.d[i - 1], self.d[i]);
        if h == h0 {
            return d0;
        }
        if !d0.is_finite() || !d1.is_finite() {
            return f64::NEG_INFINITY;
        }
        d0 + (d1 - d0) * (h - h0) / (h1 - h0)
    }
}

/// Rounding below zero up to this size is read as 0.
const EMPTY_TOL: f64 = 1e-9;

fn dimension_marker(v: f64) -> f64 {
    if v < -EMPTY_TOL {
        f64::NEG_INFINITY
    } else {
        v.max(0.0)
    }
}

/// `D(h) = min_{p≠0} (hp - ω(p) + d)`, capped at `d`.
pub fn legendre_spectrum(omega: &ScalingFunction, h_grid: &[f64], d: f64) -> SpectrumEstimate {
    let pts: Vec<(f64, f64)> = omega
        .p
        .iter()
        .zip(&omega.omega)
        .filter(|(p, _)| **p != 0.0)
        .map(|(&p, &w)| (p, w))
        .collect();
    let values = h_grid
        .iter()
        .map(|&h| {
            let m = pts
                .iter()
                .map(|&(p, w)| h * p - w + d)
                .fold(f64::INFINITY, f64::min);
            dimension_marker(m.min(d))
        })
        .collect();
    SpectrumEstimate {
        h: h_grid.to_vec(),
        d: values,
        source: SpectrumSource::FunctionLeaders,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauFunction {
    pub q: Vec<f64>,
    pub tau: Vec<f64>,
    pub r2: Vec<f64>,
    pub depths: (usize, usize),
    pub base: u32,
}

impl TauFunction {
    /// Linear interpolation on the q-grid.
    pub fn at(&self, q: f64) -> Result<f64> {
        let n = self.q.len();
        let (lo, hi) = (self.q[0], self.q[n - 1]);
        if !(lo..=hi).contains(&q) {
            return Err(Error::Extrapolation { value: q, lo, hi });
        }
        let i = self.q.partition_point(|&x| x <= q).clamp(1, n - 1);
        let (q0, q1) = (self.q[i - 1], self.q[i]);
        Ok(self.tau[i - 1] + (self.tau[i] - self.tau[i - 1]) * (q - q0) / (q1 - q0))
    }
}

pub fn measure_tau(m: &BAdicMeasure, q_grid: &[f64], depths: RangeInclusive<usize>) -> Result<TauFunction> {
    let (n1, n2) = (*depths.start(), *depths.end());
    if n2 > m.depth() || n2 < n1 + 1 {
        return Err(Error::EmptyRange { start: n1, end: n2 });
    }
    let lb = f64::from(m.base()).log2();
    let mut logs = Vec::with_capacity(n2 - n1 + 1);
    for n in depths.clone() {
        let l: Vec<f64> = m
            .level(n)
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|v| v.log2())
            .collect();
        if l.is_empty() {
            return Err(Error::EmptySupport(n));
        }
        logs.push(l);
    }
    let x: Vec<f64> = depths.map(|n| -(n as f64) * lb).collect();
    let (tau, r2) = q_grid
        .par_iter()
        .map(|&q| {
            let y: Vec<f64> = logs
                .iter()
                .map(|l| log2_sum_exp2(l.iter().map(|v| q * v)))
                .collect();
            let fit = linear_fit(&x, &y).expect("distinct depths");
            (fit.slope, fit.r2)
        })
        .unzip();
    Ok(TauFunction {
        q: q_grid.to_vec(),
        tau,
        r2,
        depths: (n1, n2),
        base: m.base(),
    })
}

/// `τ*(α) = min_q (αq - τ(q))`.
pub fn measure_legendre(tau: &TauFunction, alpha_grid: &[f64]) -> SpectrumEstimate {
    let d = alpha_grid
        .iter()
        .map(|&a| {
            let m = tau
                .q
                .iter()
                .zip(&tau.tau)
                .map(|(q, t)| a * q - t)
                .fold(f64::INFINITY, f64::min);
            dimension_marker(m)
        })
        .collect();
    SpectrumEstimate {
        h: alpha_grid.to_vec(),
        d,
        source: SpectrumSource::MeasureTau,
    }
}

/// Scaling function of the transference series built from a measure with
/// scaling function `tau`: `ω(p) = d + p(s0 - d/p0) + τ(p/p0)`.
pub fn predicted_scaling(tau: &TauFunction, p_grid: &[f64], s0: f64, p0: f64, d: f64) -> Result<ScalingFunction> {
    if p0 <= 0.0 {
        return Err(Error::param("p0", format!("{p0} must be positive")));
    }
    let omega = p_grid
        .iter()
        .map(|&p| Ok(d + p * (s0 - d / p0) + tau.at(p / p0)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingFunction {
        p: p_grid.to_vec(),
        r2: vec![1.0; omega.len()],
        omega,
        range: tau.depths,
    })
}

/// Exponent `s0 - d/p0 + α d/p0` carried by points where the measure has exponent `α`.
pub fn transference_h(alpha0: f64, s0: f64, p0: f64, d: f64) -> Result<f64> {
    if p0 <= 0.0 || s0 <= d / p0 {
        return Err(Error::param("s0", format!("{s0} must exceed d/p0 = {}", d / p0)));
    }
    Ok(s0 - d / p0 + alpha0 * d / p0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub pass: bool,
    /// Smallest `estimate + slack - analytic` over the checked points.
    pub margin: f64,
    pub worst_h: f64,
    pub points: usize,
}

/// Checks `analytic(h) <= estimate(h) + slack` at every grid `h` of `estimate`
/// inside `support`.
pub fn upper_bound_check(
    estimate: &SpectrumEstimate,
    analytic: impl Fn(f64) -> f64,
    support: (f64, f64),
    slack: f64,
) -> BoundCheck {
    let mut out = BoundCheck {
        pass: true,
        margin: f64::INFINITY,
        worst_h: f64::NAN,
        points: 0,
    };
    for (&h, &est) in estimate.h.iter().zip(&estimate.d) {
        if h < support.0 || h > support.1 {
            continue;
        }
        let truth = analytic(h);
        if truth == f64::NEG_INFINITY {
            continue;
        }
        out.points += 1;
        let margin = est + slack - truth;
        if margin < out.margin {
            out.margin = margin;
            out.worst_h = h;
        }
    }
    out.pass = out.margin >= 0.0;
    out
}
