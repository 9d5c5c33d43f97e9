//! Wavelet leaders and pointwise exponents.

use serde::{Deserialize, Serialize};

use crate::dyadic::Cube;
use crate::fit::linear_fit;
use crate::wavelet::{CoefficientPyramid, Normalization};
use crate::{Error, Result};

/// Chord spread below which liminf and limsup are reported as a single limit.
pub const LIMIT_SPREAD: f64 = 0.1;

/// `d_λ = sup_{λ' ⊆ λ} |c_λ'|` for every cube of a pyramid.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderPyramid {
    levels: Vec<Vec<f64>>,
    support: usize,
}

impl LeaderPyramid {
    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, j: usize) -> &[f64] {
        &self.levels[j]
    }

    /// Filter length of the wavelet behind the coefficients, 0 when synthetic.
    pub fn support(&self) -> usize {
        self.support
    }

    /// Multiplies every leader by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        LeaderPyramid {
            levels: self
                .levels
                .iter()
                .map(|l| l.iter().map(|d| d * c).collect())
                .collect(),
            support: self.support,
        }
    }
}

pub fn compute_leaders(p: &CoefficientPyramid) -> Result<LeaderPyramid> {
    if p.tag() != Normalization::Linf {
        return Err(Error::Normalization {
            expected: Normalization::Linf,
            found: p.tag(),
        });
    }
    let depth = p.levels();
    let mut levels: Vec<Vec<f64>> = vec![Vec::new(); depth];
    levels[depth - 1] = p.level(depth - 1).iter().map(|c| c.abs()).collect();
    for j in (0..depth - 1).rev() {
        let fine = &levels[j + 1];
        let lvl = p
            .level(j)
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs().max(fine[2 * k]).max(fine[2 * k + 1]))
            .collect();
        levels[j] = lvl;
    }
    Ok(LeaderPyramid {
        levels,
        support: p.support(),
    })
}

/// `d_j(x_0)` for `j = 0..J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalLeaderSeries {
    pub x0: f64,
    pub values: Vec<f64>,
    /// Scale `j` is contaminated when `x_0` lies within `2 L 2^{-j}` of the periodic
    /// seam, `L` being the filter length.
    pub contaminated: Vec<bool>,
}

impl LocalLeaderSeries {
    /// A series not attached to any pyramid; no scale is contaminated.
    pub fn from_values(x0: f64, values: Vec<f64>) -> Self {
        let contaminated = vec![false; values.len()];
        LocalLeaderSeries {
            x0,
            values,
            contaminated,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Chord exponents `L_j = log2 d_j / (-j)` for `j >= 1`, index 0 left as NaN.
    pub fn chords(&self) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &d)| if j == 0 { f64::NAN } else { chord(j as f64, d.log2()) })
            .collect()
    }
}

fn chord(scale: f64, log2_value: f64) -> f64 {
    if log2_value == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        log2_value / -scale
    }
}

/// Sup of the leaders over the (clamped) 3-neighbourhood of `λ_j(x_0)` at every level.
pub fn local_leaders(lp: &LeaderPyramid, x0: f64) -> Result<LocalLeaderSeries> {
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::Domain(x0));
    }
    let seam = x0.min(1.0 - x0);
    let mut values = Vec::with_capacity(lp.levels());
    let mut contaminated = Vec::with_capacity(lp.levels());
    for (j, lvl) in lp.levels.iter().enumerate() {
        let cube = Cube::containing(x0, j as u32, 2)?;
        let d = cube
            .neighbors3()
            .iter()
            .map(|c| lvl[c.index as usize])
            .fold(0.0, f64::max);
        values.push(d);
        let reach = 2.0 * lp.support as f64 * (-(j as f64)).exp2();
        contaminated.push(lp.support > 0 && seam < reach);
    }
    debug_assert!(values.windows(2).all(|w| w[1] <= w[0]));
    Ok(LocalLeaderSeries {
        x0,
        values,
        contaminated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    Liminf,
    Limsup,
    Limit,
}

/// Inclusive scale window `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: usize,
    pub end: usize,
    #[serde(default)]
    pub waive_contamination: bool,
}

impl FitWindow {
    pub fn new(start: usize, end: usize) -> Self {
        FitWindow {
            start,
            end,
            waive_contamination: false,
        }
    }

    /// `[ceil(J/2), J-3]`: drops the two finest levels and the coarse half.
    pub fn default_for(levels: usize) -> Self {
        Self::new(levels.div_ceil(2), levels.saturating_sub(3))
    }

    pub fn waived(self) -> Self {
        FitWindow {
            waive_contamination: true,
            ..self
        }
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    fn check(&self, available: usize, min_span: usize) -> Result<()> {
        if self.start == 0 || self.end >= available || self.end < self.start + min_span {
            return Err(Error::EmptyRange {
                start: self.start,
                end: self.end,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub x0: f64,
    /// Smallest chord exponent over the window.
    pub liminf: f64,
    /// Largest chord exponent over the window.
    pub limsup: f64,
    /// Regression slope; present in limit mode or when the chords agree within
    /// [`LIMIT_SPREAD`].
    pub limit: Option<f64>,
    pub range: (f64, f64),
    pub r2: f64,
    pub mode: EstimateMode,
}

impl ExponentEstimate {
    /// The estimate selected by `mode`.
    pub fn value(&self) -> f64 {
        match self.mode {
            EstimateMode::Liminf => self.liminf,
            EstimateMode::Limsup => self.limsup,
            EstimateMode::Limit => self.limit.unwrap_or(f64::NAN),
        }
    }

    fn infinite(x0: f64, range: (f64, f64), mode: EstimateMode) -> Self {
        ExponentEstimate {
            x0,
            liminf: f64::INFINITY,
            limsup: f64::INFINITY,
            limit: Some(f64::INFINITY),
            range,
            r2: 1.0,
            mode,
        }
    }
}

/// Chord and slope statistics of `log2 v` against `-s` over matched scales.
/// Any vanishing value yields the +∞ marker.
pub(crate) fn scale_estimate(
    x0: f64,
    scales: &[f64],
    log2_values: &[f64],
    mode: EstimateMode,
) -> ExponentEstimate {
    let range = (scales[0], scales[scales.len() - 1]);
    if log2_values.contains(&f64::NEG_INFINITY) {
        return ExponentEstimate::infinite(x0, range, mode);
    }
    let chords: Vec<f64> = scales
        .iter()
        .zip(log2_values)
        .map(|(&s, &v)| chord(s, v))
        .collect();
    let liminf = chords.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup = chords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let neg: Vec<f64> = scales.iter().map(|s| -s).collect();
    let fit = linear_fit(&neg, log2_values).expect("scales are distinct");
    let limit = (mode == EstimateMode::Limit || limsup - liminf <= LIMIT_SPREAD).then_some(fit.slope);
    ExponentEstimate {
        x0,
        liminf,
        limsup,
        limit,
        range,
        r2: fit.r2,
        mode,
    }
}

/// Pointwise exponent from `d_j(x_0)` over `window`, which must span at least five
/// scales, start at `j >= 1`, and avoid seam-contaminated scales unless waived.
pub fn estimate_exponent(
    s: &LocalLeaderSeries,
    window: FitWindow,
    mode: EstimateMode,
) -> Result<ExponentEstimate> {
    window.check(s.len(), 4)?;
    if !window.waive_contamination {
        if let Some(j) = window.scales().find(|&j| s.contaminated[j]) {
            return Err(Error::Contaminated { level: j });
        }
    }
    let scales: Vec<f64> = window.scales().map(|j| j as f64).collect();
    let logs: Vec<f64> = window.scales().map(|j| s.values[j].log2()).collect();
    Ok(scale_estimate(s.x0, &scales, &logs, mode))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateConfig {
    /// Smallest admissible constant.
    pub threshold: f64,
    /// A log2-slope of the per-scale constants below `-trend_tolerance` means they
    /// decay to 0 and the bound fails.
    pub trend_tolerance: f64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig {
            threshold: 1e-12,
            trend_tolerance: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    /// Largest `C` valid at every scale of the window.
    pub constant: f64,
    /// Regression slope of `log2 C_j` against `j`.
    pub trend: f64,
    pub pass: bool,
}

impl Bound {
    fn from_log_constants(scales: &[f64], log2_c: &[f64], cfg: &CertificateConfig) -> Self {
        let min = log2_c.iter().copied().fold(f64::INFINITY, f64::min);
        let trend = if min == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            linear_fit(scales, log2_c).map_or(0.0, |f| f.slope)
        };
        let constant = min.exp2();
        Bound {
            constant,
            trend,
            pass: constant >= cfg.threshold && trend >= -cfg.trend_tolerance,
        }
    }
}

/// Wavelet-leader evidence that `f` is anti-Hölderian of exponent `alpha` at `x_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub x0: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `d_j(x_0) >= C 2^{-jα}` at every scale: sufficient for irregularity.
    pub sufficient: Bound,
    /// `sup_{j'<=j} 2^{j'M} d_j'(x_0) >= C 2^{j(M-α)} / j^β` with `M = [α] + 1`:
    /// necessary for irregularity of a uniformly Hölder function.
    pub necessary: Bound,
}

pub fn irregularity_certificate(
    s: &LocalLeaderSeries,
    alpha: f64,
    beta: f64,
    window: FitWindow,
    cfg: &CertificateConfig,
) -> Result<Certificate> {
    if alpha <= 0.0 {
        return Err(Error::param("alpha", format!("{alpha} must be positive")));
    }
    if beta <= 1.0 {
        return Err(Error::param("beta", format!("{beta} must exceed 1")));
    }
    window.check(s.len(), 1)?;
    let scales: Vec<f64> = window.scales().map(|j| j as f64).collect();
    let logd: Vec<f64> = s.values.iter().map(|d| d.log2()).collect();

    let suff: Vec<f64> = window.scales().map(|j| logd[j] + j as f64 * alpha).collect();

    let order = alpha.floor() + 1.0;
    let mut running = f64::NEG_INFINITY;
    let mut sup_upto = Vec::with_capacity(logd.len());
    for (j, &l) in logd.iter().enumerate() {
        running = running.max(j as f64 * order + l);
        sup_upto.push(running);
    }
    let nec: Vec<f64> = window
        .scales()
        .map(|j| {
            let jf = j as f64;
            sup_upto[j] + beta * jf.log2() - jf * (order - alpha)
        })
        .collect();

    Ok(Certificate {
        x0: s.x0,
        alpha,
        beta,
        sufficient: Bound::from_log_constants(&scales, &suff, cfg),
        necessary: Bound::from_log_constants(&scales, &nec, cfg),
    })
}

/// Something that can be evaluated on a regular grid around a point.
pub enum Probe<'a> {
    /// Periodic samples `f(k / n)` on `[0, 1)`.
    Samples(&'a [f64]),
    /// A function evaluated on a grid of spacing `r / resolution` for radius `r`.
    Callable {
        f: &'a (dyn Fn(f64) -> f64 + Sync),
        resolution: usize,
    },
}

impl Probe<'_> {
    /// Values on the grid `x_0 + i step`, `|i| <= n`, with `n step <= r`.
    fn grid(&self, x0: f64, r: f64) -> Result<(Vec<f64>, f64)> {
        match *self {
            Probe::Samples(s) => {
                let len = s.len();
                let step = 1.0 / len as f64;
                if step > r / 16.0 {
                    return Err(Error::Resolution { step, radius: r });
                }
                let centre = (x0 * len as f64).round() as i64;
                let n = ((r - (x0 - centre as f64 * step).abs()) / step).floor() as i64;
                let vals = (-n..=n)
                    .map(|i| s[(centre + i).rem_euclid(len as i64) as usize])
                    .collect();
                Ok((vals, step))
            }
            Probe::Callable { f, resolution } => {
                if resolution < 16 {
                    return Err(Error::Resolution {
                        step: r / resolution as f64,
                        radius: r,
                    });
                }
                let step = r / resolution as f64;
                let n = resolution as i64;
                let vals = (-n..=n).map(|i| f(x0 + i as f64 * step)).collect();
                Ok((vals, step))
            }
        }
    }
}

fn binomials(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..m {
        let mut next = vec![1.0; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

/// `sup |Δ^M_h f(x)|` over grid `h` with `0 < |h| <= r` and grid `x` such that
/// `[x, x + M h] ⊂ B(x_0, r)`.
pub fn oscillation(f: &Probe<'_>, x0: f64, r: f64, m: usize) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::param("r", format!("{r} must be positive")));
    }
    if m == 0 {
        return Err(Error::param("M", "difference order must be at least 1"));
    }
    let (vals, _) = f.grid(x0, r)?;
    let npts = vals.len();
    let coefs: Vec<f64> = binomials(m)
        .into_iter()
        .enumerate()
        .map(|(t, c)| if (m - t).is_multiple_of(2) { c } else { -c })
        .collect();
    let mut best = 0.0f64;
    // Δ_{-h} is Δ_h read from the other end, so h > 0 suffices.
    for h in 1..npts {
        let span = m * h;
        if span >= npts {
            break;
        }
        for x in 0..npts - span {
            let d: f64 = coefs.iter().enumerate().map(|(t, c)| c * vals[x + t * h]).sum();
            best = best.max(d.abs());
        }
    }
    Ok(best)
}

/// Exponents from `H_r = log2(osc(r) + r^2) / log2(r)` over decreasing radii.
pub fn oscillation_exponents(
    f: &Probe<'_>,
    x0: f64,
    radii: &[f64],
    m: usize,
) -> Result<ExponentEstimate> {
    if radii.len() < 6 {
        return Err(Error::param("radii", "at least six radii are required"));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) || radii[0] >= 1.0 {
        return Err(Error::param("radii", "radii must decrease from below 1"));
    }
    let mut scales = Vec::with_capacity(radii.len());
    let mut logs = Vec::with_capacity(radii.len());
    for &r in radii {
        let osc = oscillation(f, x0, r, m)?;
        scales.push(-r.log2());
        logs.push((osc + r * r).log2());
    }
    Ok(scale_estimate(x0, &scales, &logs, EstimateMode::Limit))
}

/// Radii `2^{-j}` for `j` in `first..=last`.
pub fn dyadic_radii(first: usize, last: usize) -> Vec<f64> {
    (first..=last).map(|j| (-(j as f64)).exp2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(j0: usize, k0: usize, v: f64, levels: usize) -> CoefficientPyramid {
        CoefficientPyramid::from_fn(levels, Normalization::Linf, move |j, k| {
            if (j, k) == (j0, k0) {
                v
            } else {
                0.0
            }
        })
    }

    #[test]
    fn single_coefficient_leaders() {
        let lp = compute_leaders(&single(5, 7, 0.3, 8)).unwrap();
        for j in 0..8 {
            for (k, &d) in lp.level(j).iter().enumerate() {
                let ancestor = j <= 5 && k == 7 >> (5 - j);
                assert_eq!(d, if ancestor { 0.3 } else { 0.0 }, "({j},{k})");
            }
        }
    }

    #[test]
    fn constant_pyramids() {
        let ones = CoefficientPyramid::from_fn(7, Normalization::Linf, |_, _| 1.0);
        let lp = compute_leaders(&ones).unwrap();
        assert!((0..7).all(|j| lp.level(j).iter().all(|&d| d == 1.0)));

        let h = CoefficientPyramid::from_fn(10, Normalization::Linf, |j, _| (-(j as f64) * 0.5).exp2());
        let lp = compute_leaders(&h).unwrap();
        for j in 0..10 {
            assert!(lp.level(j).iter().all(|&d| d == (-(j as f64) * 0.5).exp2()));
        }
    }

    #[test]
    fn leaders_need_linf() {
        let p = CoefficientPyramid::zeros(4, Normalization::L2);
        assert!(matches!(compute_leaders(&p), Err(Error::Normalization { .. })));
    }

    #[test]
    fn local_leaders_of_single_coefficient() {
        let lp = compute_leaders(&single(5, 7, 0.3, 9)).unwrap();
        let x0 = 7.5 / 32.0;
        let s = local_leaders(&lp, x0).unwrap();
        let target = Cube::dyadic(5, 7).unwrap();
        for j in 0..9u32 {
            // (5,7) contributes iff it lies inside 3λ_j(x0), or for j <= 5 its ancestor does
            let around = Cube::containing(x0, j, 2).unwrap().neighbors3();
            let hit = around.iter().any(|c| {
                if j <= 5 {
                    target.index >> (5 - j) == c.index
                } else {
                    false
                }
            });
            assert_eq!(s.values[j as usize], if hit { 0.3 } else { 0.0 }, "j={j}");
        }
        assert!(s.values[..=5].iter().all(|&v| v == 0.3));
        assert!(s.values[6..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_pyramid_gives_zero_series_and_infinite_exponent() {
        let lp = compute_leaders(&CoefficientPyramid::zeros(10, Normalization::Linf)).unwrap();
        let s = local_leaders(&lp, 0.4).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        let e = estimate_exponent(&s, FitWindow::new(2, 8), EstimateMode::Limit).unwrap();
        assert_eq!(e.value(), f64::INFINITY);
        assert_eq!(e.liminf, f64::INFINITY);
    }

    #[test]
    fn exact_power_law() {
        let s = LocalLeaderSeries::from_values(0.3, (0..16).map(|j| (-0.5 * j as f64).exp2()).collect());
        for mode in [EstimateMode::Liminf, EstimateMode::Limsup, EstimateMode::Limit] {
            let e = estimate_exponent(&s, FitWindow::new(4, 12), mode).unwrap();
            assert!((e.value() - 0.5).abs() < 1e-12, "{mode:?}");
            assert!((e.r2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alternating_exponents() {
        let vals = (0..16)
            .map(|j| {
                let h = if j % 2 == 0 { 0.3 } else { 0.7 };
                (-h * j as f64).exp2()
            })
            .collect();
        let s = LocalLeaderSeries::from_values(0.5, vals);
        let w = FitWindow::new(6, 13);
        let lo = estimate_exponent(&s, w, EstimateMode::Liminf).unwrap();
        let hi = estimate_exponent(&s, w, EstimateMode::Limsup).unwrap();
        assert!((lo.value() - 0.3).abs() < 1e-12);
        assert!((hi.value() - 0.7).abs() < 1e-12);
        assert!(lo.limit.is_none());
    }

    #[test]
    fn window_errors() {
        let s = LocalLeaderSeries::from_values(0.5, vec![1.0; 12]);
        assert!(matches!(
            estimate_exponent(&s, FitWindow::new(5, 8), EstimateMode::Limit),
            Err(Error::EmptyRange { .. })
        ));
        assert!(estimate_exponent(&s, FitWindow::new(0, 8), EstimateMode::Limit).is_err());
        assert!(estimate_exponent(&s, FitWindow::new(5, 12), EstimateMode::Limit).is_err());
    }

    #[test]
    fn contamination_is_flagged() {
        let p = CoefficientPyramid::from_fn(12, Normalization::Linf, |j, _| (-(j as f64)).exp2()).with_support(8);
        let lp = compute_leaders(&p).unwrap();
        let s = local_leaders(&lp, 0.01).unwrap();
        // 2 * 8 * 2^{-j} > 0.01 up to j = 10
        assert!(s.contaminated[10] && !s.contaminated[11]);
        let w = FitWindow::new(6, 11);
        assert_eq!(estimate_exponent(&s, w, EstimateMode::Limit), Err(Error::Contaminated { level: 6 }));
        assert!(estimate_exponent(&s, w.waived(), EstimateMode::Limit).is_ok());
        assert!(!local_leaders(&lp, 0.5).unwrap().contaminated[6]);
    }

    #[test]
    fn certificates() {
        let alpha = 0.4;
        let w = FitWindow::new(1, 15);
        let cfg = CertificateConfig::default();
        let exact = LocalLeaderSeries::from_values(0.5, (0..16).map(|j| (-alpha * j as f64).exp2()).collect());
        let c = irregularity_certificate(&exact, alpha, 2.0, w, &cfg).unwrap();
        assert!(c.sufficient.pass);
        assert!((c.sufficient.constant - 1.0).abs() < 1e-12);
        assert!(c.necessary.pass);
        assert!(c.necessary.constant >= 1.0 - 1e-12);

        // d_j = 2^{-jα} / j^2: C_j = 1/j^2 decays
        let decaying = LocalLeaderSeries::from_values(
            0.5,
            (0..16).map(|j| (-alpha * j as f64).exp2() / ((j.max(1) * j.max(1)) as f64)).collect(),
        );
        let short = irregularity_certificate(&decaying, alpha, 2.0, FitWindow::new(2, 8), &cfg).unwrap();
        let long = irregularity_certificate(&decaying, alpha, 2.0, FitWindow::new(2, 15), &cfg).unwrap();
        assert!(!long.sufficient.pass);
        assert!(long.sufficient.constant < short.sufficient.constant);
        assert!((long.sufficient.constant - 1.0 / 225.0).abs() < 1e-12);

        assert!(irregularity_certificate(&exact, 0.0, 2.0, w, &cfg).is_err());
        assert!(irregularity_certificate(&exact, 0.5, 1.0, w, &cfg).is_err());
    }

    #[test]
    fn certificate_coherence_with_limit() {
        let s = LocalLeaderSeries::from_values(0.5, (0..16).map(|j| 3.0 * (-0.6 * j as f64).exp2()).collect());
        let w = FitWindow::new(6, 13);
        let e = estimate_exponent(&s, w, EstimateMode::Limit).unwrap();
        assert!(e.r2 > 0.999);
        let cfg = CertificateConfig::default();
        let above = irregularity_certificate(&s, e.value() + 0.05, 2.0, w, &cfg).unwrap();
        let below = irregularity_certificate(&s, e.value() - 0.05, 2.0, w, &cfg).unwrap();
        assert!(above.sufficient.pass);
        assert!(!below.sufficient.pass);
    }

    #[test]
    fn oscillation_of_polynomials() {
        let affine = |x: f64| 3.0 * x - 1.0;
        let p = Probe::Callable { f: &affine, resolution: 32 };
        assert!(oscillation(&p, 0.2, 0.1, 2).unwrap() < 1e-12);

        let square = |x: f64| x * x;
        let p = Probe::Callable { f: &square, resolution: 64 };
        // sup over x, x+h ∈ [-0.1, 0.1] of |(x+h)^2 - x^2| is 0.01
        let o = oscillation(&p, 0.0, 0.1, 1).unwrap();
        assert!((o - 0.01).abs() < 1e-12, "{o}");

        assert!(matches!(
            oscillation(&Probe::Callable { f: &square, resolution: 8 }, 0.0, 0.1, 1),
            Err(Error::Resolution { .. })
        ));
        let coarse = vec![0.0; 64];
        assert!(matches!(oscillation(&Probe::Samples(&coarse), 0.5, 0.1, 1), Err(Error::Resolution { .. })));
    }

    #[test]
    fn oscillation_exponents_of_cusp_and_constant() {
        let x0 = 0.3;
        let cusp = move |x: f64| (x - x0).abs().powf(0.6);
        let p = Probe::Callable { f: &cusp, resolution: 32 };
        let e = oscillation_exponents(&p, x0, &dyadic_radii(4, 12), 1).unwrap();
        assert!((e.liminf - 0.6).abs() < 0.05 && (e.limsup - 0.6).abs() < 0.05, "{e:?}");

        let flat = |_x: f64| 1.5;
        let p = Probe::Callable { f: &flat, resolution: 16 };
        let e = oscillation_exponents(&p, 0.5, &dyadic_radii(3, 9), 1).unwrap();
        assert_eq!(e.liminf, 2.0);
        assert_eq!(e.limsup, 2.0);

        assert!(oscillation_exponents(&p, 0.5, &dyadic_radii(3, 6), 1).is_err());
    }

    #[test]
    fn sampled_oscillation_matches_callable() {
        let n = 1 << 12;
        let f = |x: f64| (6.0 * x).sin();
        let s: Vec<f64> = (0..n).map(|k| f(k as f64 / n as f64)).collect();
        let x0 = 0.25;
        let r = 1.0 / 64.0;
        let a = oscillation(&Probe::Samples(&s), x0, r, 1).unwrap();
        let b = oscillation(&Probe::Callable { f: &f, resolution: 64 }, x0, r, 1).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} {b}");
    }

    proptest! {
        #[test]
        fn leader_and_local_leader_monotonicity(seed in 0u64..1000, x0 in 0.0f64..1.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<Vec<f64>> = (0..9).map(|j| (0..1usize << j).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let p = CoefficientPyramid::new(vals, vec![0.0], Normalization::Linf, 0).unwrap();
            let lp = compute_leaders(&p).unwrap();
            for j in 0..8 {
                for k in 0..1usize << j {
                    prop_assert!(lp.level(j)[k] >= lp.level(j + 1)[2 * k]);
                    prop_assert!(lp.level(j)[k] >= lp.level(j + 1)[2 * k + 1]);
                    prop_assert!(lp.level(j)[k] >= p.coefficient(j, k).abs());
                }
            }
            let s = local_leaders(&lp, x0).unwrap();
            for w in s.values.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }
    }
}
