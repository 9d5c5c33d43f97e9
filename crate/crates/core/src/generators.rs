//! Reference signals and coefficient pyramids with known exponents.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::rho_phi;
use crate::measures::{multinomial_alpha_range, multinomial_tau_star, BAdicMeasure};
use crate::wavelet::{CoefficientPyramid, Normalization, WaveletSpec};
use crate::{Error, Result};

/// A Hölder exponent prescribed as a function of `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HolderProfile {
    Constant { value: f64 },
    /// `intercept + slope * t`.
    Affine { intercept: f64, slope: f64 },
    /// `mean + amplitude * sin(2π (frequency t + phase))`.
    Sinusoid { mean: f64, amplitude: f64, frequency: u32, phase: f64 },
    /// Linear interpolation through `(t, H)` knots sorted by `t`, constant beyond the ends.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// Values on the uniform grid `i / (n - 1)`, linearly interpolated.
    Table { values: Vec<f64> },
}

impl HolderProfile {
    pub fn constant(value: f64) -> Self {
        HolderProfile::Constant { value }
    }

    pub fn affine(intercept: f64, slope: f64) -> Self {
        HolderProfile::Affine { intercept, slope }
    }

    pub fn sinusoid(mean: f64, amplitude: f64) -> Self {
        HolderProfile::Sinusoid {
            mean,
            amplitude,
            frequency: 1,
            phase: 0.0,
        }
    }

    /// `constant:H`, `affine:a,b`, `sinusoid:mean,amp[,freq[,phase]]`,
    /// `piecewise:t0/h0;t1/h1;...` or `table:h0;h1;...`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let num = |a: &str| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::param("profile", format!("bad number {a:?} in {s:?}")))
        };
        let list = |sep: char| args.split(sep).filter(|a| !a.trim().is_empty()).map(num).collect::<Result<Vec<f64>>>();
        let p = match kind.trim() {
            "constant" => match list(',')?.as_slice() {
                [v] => Self::constant(*v),
                _ => return Err(Error::param("profile", format!("constant takes one value: {s:?}"))),
            },
            "affine" => match list(',')?.as_slice() {
                [a, b] => Self::affine(*a, *b),
                _ => return Err(Error::param("profile", format!("affine takes two values: {s:?}"))),
            },
            "sinusoid" => match list(',')?.as_slice() {
                [m, a] => Self::sinusoid(*m, *a),
                [m, a, f] => HolderProfile::Sinusoid { mean: *m, amplitude: *a, frequency: *f as u32, phase: 0.0 },
                [m, a, f, ph] => HolderProfile::Sinusoid { mean: *m, amplitude: *a, frequency: *f as u32, phase: *ph },
                _ => return Err(Error::param("profile", format!("sinusoid takes 2 to 4 values: {s:?}"))),
            },
            "piecewise" => {
                let knots = args
                    .split(';')
                    .filter(|k| !k.trim().is_empty())
                    .map(|k| {
                        let (t, h) = k
                            .split_once('/')
                            .ok_or_else(|| Error::param("profile", format!("knot {k:?} is not t/h")))?;
                        Ok((num(t)?, num(h)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                HolderProfile::PiecewiseLinear { knots }
            }
            "table" => HolderProfile::Table { values: list(';')? },
            other => return Err(Error::param("profile", format!("unknown profile kind {other:?}"))),
        };
        p.check_shape()?;
        Ok(p)
    }

    fn check_shape(&self) -> Result<()> {
        match self {
            HolderProfile::PiecewiseLinear { knots } => {
                if knots.is_empty() || knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::param("profile", "knots must be non-empty with increasing t"));
                }
            }
            HolderProfile::Table { values } if values.is_empty() => {
                return Err(Error::param("profile", "table is empty"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            HolderProfile::Constant { value } => *value,
            HolderProfile::Affine { intercept, slope } => intercept + slope * t,
            HolderProfile::Sinusoid { mean, amplitude, frequency, phase } => {
                mean + amplitude * (2.0 * PI * (f64::from(*frequency) * t + phase)).sin()
            }
            HolderProfile::PiecewiseLinear { knots } => {
                let i = knots.partition_point(|k| k.0 <= t);
                if i == 0 {
                    knots[0].1
                } else if i == knots.len() {
                    knots[i - 1].1
                } else {
                    let (t0, h0) = knots[i - 1];
                    let (t1, h1) = knots[i];
                    h0 + (h1 - h0) * (t - t0) / (t1 - t0)
                }
            }
            HolderProfile::Table { values } => {
                if values.len() == 1 {
                    return values[0];
                }
                let x = t.clamp(0.0, 1.0) * (values.len() - 1) as f64;
                let i = (x.floor() as usize).min(values.len() - 2);
                values[i] + (values[i + 1] - values[i]) * (x - i as f64)
            }
        }
    }

    /// `[min H, max H]` on `[0, 1]`.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            HolderProfile::Constant { value } => (*value, *value),
            HolderProfile::Affine { intercept, slope } => {
                let end = intercept + slope;
                (intercept.min(end), intercept.max(end))
            }
            HolderProfile::Sinusoid { mean, amplitude, frequency, .. } => {
                if *frequency == 0 {
                    let v = self.eval(0.0);
                    (v, v)
                } else {
                    (mean - amplitude.abs(), mean + amplitude.abs())
                }
            }
            HolderProfile::PiecewiseLinear { knots } => min_max(knots.iter().map(|k| k.1)),
            HolderProfile::Table { values } => min_max(values.iter().copied()),
        }
    }

    /// Upper bound on the Lipschitz constant over `[0, 1]`.
    pub fn lipschitz(&self) -> f64 {
        match self {
            HolderProfile::Constant { .. } => 0.0,
            HolderProfile::Affine { slope, .. } => slope.abs(),
            HolderProfile::Sinusoid { amplitude, frequency, .. } => 2.0 * PI * f64::from(*frequency) * amplitude.abs(),
            HolderProfile::PiecewiseLinear { knots } => knots
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
            HolderProfile::Table { values } => {
                let n = values.len().saturating_sub(1) as f64;
                values.windows(2).map(|w| (w[1] - w[0]).abs() * n).fold(0.0, f64::max)
            }
        }
    }

    /// Values must stay inside `(0, 1)`.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        let (lo, hi) = self.bounds();
        if !(lo > 0.0 && hi < 1.0) {
            return Err(Error::Profile(if lo <= 0.0 { lo } else { hi }));
        }
        Ok(())
    }
}

fn min_max(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

/// Exponents and spectrum known for a generated object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum GroundTruth {
    /// Pointwise lower and upper exponents given by profiles.
    Profiles {
        description: String,
        lower: HolderProfile,
        upper: HolderProfile,
    },
    /// Lower exponent `β/φ(x)`, upper exponent `β` off the dyadics, lower spectrum `h/β`.
    Davenport { beta: f64 },
    /// Spectrum `τ*(α)` carried to `H = s0 - 1/p0 + α/p0`.
    Transference {
        s0: f64,
        p0: f64,
        weights: Option<Vec<f64>>,
    },
}

impl GroundTruth {
    pub fn description(&self) -> String {
        match self {
            GroundTruth::Profiles { description, .. } => description.clone(),
            GroundTruth::Davenport { beta } => format!("davenport series, beta = {beta}"),
            GroundTruth::Transference { s0, p0, .. } => format!("measure transference series, s0 = {s0}, p0 = {p0}"),
        }
    }

    pub fn lower_exponent(&self, x: f64) -> Option<f64> {
        match self {
            GroundTruth::Profiles { lower, .. } => Some(lower.eval(x)),
            GroundTruth::Davenport { beta } => {
                let phi = rho_phi(x, 1024).ok()?.phi;
                Some(beta / phi)
            }
            GroundTruth::Transference { .. } => None,
        }
    }

    pub fn upper_exponent(&self, x: f64) -> Option<f64> {
        match self {
            GroundTruth::Profiles { upper, .. } => Some(upper.eval(x)),
            GroundTruth::Davenport { beta } => {
                let dyadic = rho_phi(x, 1024).ok()?.phi.is_infinite();
                Some(if dyadic { 0.0 } else { *beta })
            }
            GroundTruth::Transference { .. } => None,
        }
    }

    /// Analytic `D(h)` (`-∞` off the support), `None` when unknown.
    pub fn spectrum(&self, h: f64) -> Option<f64> {
        match self {
            GroundTruth::Profiles { lower, upper, .. } => match (lower, upper) {
                (HolderProfile::Constant { value: a }, HolderProfile::Constant { value: b }) if a == b => {
                    Some(if (h - a).abs() < 1e-12 { 1.0 } else { f64::NEG_INFINITY })
                }
                _ => None,
            },
            GroundTruth::Davenport { beta } => Some(if (0.0..=*beta).contains(&h) { h / beta } else { f64::NEG_INFINITY }),
            GroundTruth::Transference { s0, p0, weights } => {
                let w = weights.as_ref()?;
                Some(multinomial_tau_star(w, p0 * (h - s0) + 1.0))
            }
        }
    }

    /// Interval outside which the analytic spectrum is `-∞`.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            GroundTruth::Profiles { lower, upper, .. } => match (lower, upper) {
                (HolderProfile::Constant { value: a }, HolderProfile::Constant { value: b }) if a == b => Some((*a, *a)),
                _ => None,
            },
            GroundTruth::Davenport { beta } => Some((0.0, *beta)),
            GroundTruth::Transference { s0, p0, weights } => {
                let (lo, hi) = multinomial_alpha_range(weights.as_ref()?);
                Some((s0 - 1.0 / p0 + lo / p0, s0 - 1.0 / p0 + hi / p0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated<T> {
    pub data: T,
    pub truth: GroundTruth,
}

/// Bound on the neglected Weierstrass terms, `λ^{-Jmax a} / (1 - λ^{-a})`.
pub fn weierstrass_tail(lambda: u64, jmax: usize, a: f64) -> f64 {
    let l = lambda as f64;
    l.powf(-(jmax as f64) * a) / (1.0 - l.powf(-a))
}

/// Smallest truncation with tail below 1e-10 that also covers the sampling resolution.
pub fn weierstrass_default_jmax(lambda: u64, levels: usize, a: f64) -> usize {
    let l = lambda as f64;
    let mut jmax = (levels as f64 * 2f64.ln() / l.ln()).ceil() as usize + 8;
    while weierstrass_tail(lambda, jmax, a) >= 1e-10 {
        jmax += 1;
    }
    jmax
}

/// `Σ_{j<=Jmax} λ^{-jH(t)} sin(2π λ^j t)` at `t = k 2^{-J}`.
pub fn weierstrass(h: &HolderProfile, lambda: u64, levels: usize, jmax: Option<usize>) -> Result<Generated<Vec<f64>>> {
    h.validate()?;
    if lambda < 2 {
        return Err(Error::param("lambda", format!("{lambda} must be at least 2")));
    }
    if !(1..=62).contains(&levels) {
        return Err(Error::param("J", format!("{levels} is outside 1..=62")));
    }
    let min_jmax = (levels as f64 * 2f64.ln() / (lambda as f64).ln()).ceil() as usize + 8;
    let jmax = jmax.unwrap_or_else(|| weierstrass_default_jmax(lambda, levels, h.bounds().0));
    if jmax < min_jmax {
        return Err(Error::param("Jmax", format!("{jmax} is below {min_jmax}")));
    }
    let n = 1u64 << levels;
    let mask = u128::from(n - 1);
    // λ^j mod 2^J keeps the phase exact
    let mut phases = Vec::with_capacity(jmax + 1);
    let mut pow = 1u128;
    for _ in 0..=jmax {
        phases.push(pow);
        pow = (pow * u128::from(lambda)) & mask;
    }
    let ln_l = (lambda as f64).ln();
    let scale = 1.0 / n as f64;
    let data = (0..n)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * scale;
            let ht = h.eval(t);
            phases
                .iter()
                .enumerate()
                .map(|(j, &ph)| {
                    let frac = ((u128::from(k) * ph) & mask) as f64 * scale;
                    (-(j as f64) * ht * ln_l).exp() * (2.0 * PI * frac).sin()
                })
                .sum()
        })
        .collect();
    Ok(Generated {
        data,
        truth: GroundTruth::Profiles {
            description: format!("weierstrass, lambda = {lambda}"),
            lower: h.clone(),
            upper: h.clone(),
        },
    })
}

/// `H_{j,k} = max(1 / log2 j, H(k 2^{-j}))` for `j >= 2`.
pub fn prescribed_exponent(h: &HolderProfile, j: usize, k: usize) -> Option<f64> {
    if j < 2 {
        return None;
    }
    let t = k as f64 / (1u64 << j) as f64;
    Some(h.eval(t).max(1.0 / (j as f64).log2()))
}

/// `c_{j,k} = 2^{-j H_{j,k}}`, zero for `j < 2`.
pub fn prescribed_series(h: &HolderProfile, w: &WaveletSpec, levels: usize) -> Result<Generated<CoefficientPyramid>> {
    h.validate()?;
    let p = CoefficientPyramid::from_fn(levels, Normalization::Linf, |j, k| {
        prescribed_exponent(h, j, k).map_or(0.0, |e| (-(j as f64) * e).exp2())
    })
    .with_support(w.support());
    Ok(Generated {
        data: p,
        truth: GroundTruth::Profiles {
            description: "prescribed wavelet series".into(),
            lower: h.clone(),
            upper: h.clone(),
        },
    })
}

/// Block ratio `β = β1 β2` with `β1 = [b'/a'] + 1`, `β2 = [(1-a')/(1-b')] + 1`,
/// `a' = a - 1e-3` and `b' = b + 1e-3`.
pub fn block_ratio(a: f64, b: f64) -> usize {
    let (a, b) = (a - 1e-3, b + 1e-3);
    let b1 = (b / a).floor() as usize + 1;
    let b2 = ((1.0 - a) / (1.0 - b)).floor() as usize + 1;
    b1 * b2
}

/// Whether level `j` uses the upper profile: blocks `β^ℓ < j <= β^{ℓ+1}` alternate,
/// starting with the lower profile on `j <= β`.
pub fn upper_block(j: usize, ratio: usize) -> bool {
    let mut ell = 0usize;
    let mut edge = ratio;
    while j > edge {
        edge = edge.saturating_mul(ratio);
        ell += 1;
    }
    ell % 2 == 1
}

const MOLLIFIER_POINTS: usize = 64;

/// Box average of `h` over a window of width `1/max(j,1)`, `h` held constant beyond `[0,1]`.
pub fn mollified(h: &HolderProfile, j: usize, t: f64) -> f64 {
    let width = 1.0 / j.max(1) as f64;
    (0..MOLLIFIER_POINTS)
        .map(|i| {
            let s = t + width * ((i as f64 + 0.5) / MOLLIFIER_POINTS as f64 - 0.5);
            h.eval(s.clamp(0.0, 1.0))
        })
        .sum::<f64>()
        / MOLLIFIER_POINTS as f64
}

/// `c_{j,k} = 2^{-j P_j(k 2^{-j})}` with `P_j` the mollified `lo` or `hi` profile per block.
pub fn two_exponent_series(
    lo: &HolderProfile,
    hi: &HolderProfile,
    w: &WaveletSpec,
    levels: usize,
) -> Result<Generated<CoefficientPyramid>> {
    lo.validate()?;
    hi.validate()?;
    let finest = levels.saturating_sub(1);
    let n = 1usize << finest;
    for k in 0..n {
        let t = k as f64 / n as f64;
        if lo.eval(t) > hi.eval(t) {
            return Err(Error::Ordering(t));
        }
    }
    let ratio = block_ratio(lo.bounds().0, hi.bounds().1);
    let p = CoefficientPyramid::from_fn(levels, Normalization::Linf, |j, k| {
        let prof = if upper_block(j, ratio) { hi } else { lo };
        let t = k as f64 / (1u64 << j) as f64;
        (-(j as f64) * mollified(prof, j, t)).exp2()
    })
    .with_support(w.support());
    Ok(Generated {
        data: p,
        truth: GroundTruth::Profiles {
            description: format!("two-exponent series, block ratio {ratio}"),
            lower: lo.clone(),
            upper: hi.clone(),
        },
    })
}

/// `⟨x⟩ = x - [x] - 1/2`.
pub fn sawtooth(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// Truncation `J + ceil(40/β)`, which leaves a tail below 1e-12.
pub fn davenport_default_terms(beta: f64, levels: usize) -> usize {
    levels + (40.0 / beta).ceil() as usize
}

/// `Σ_{l<=L} 2^{-lβ} ⟨2^l x⟩` at a single point.
pub fn davenport_value(beta: f64, x: f64, terms: usize) -> f64 {
    let mut y = x - x.floor();
    let mut sum = 0.0;
    for l in 0..=terms {
        sum += (-(l as f64) * beta).exp2() * sawtooth(y);
        y *= 2.0;
        y -= y.floor();
    }
    sum
}

/// Samples of the Davenport series at the half-step points `(k + 1/2) 2^{-J}`.
pub fn davenport(beta: f64, levels: usize, terms: Option<usize>) -> Result<Generated<Vec<f64>>> {
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("{beta} must exceed 1")));
    }
    if !(1..=52).contains(&levels) {
        return Err(Error::param("J", format!("{levels} is outside 1..=52")));
    }
    let min_terms = levels as f64 + 40.0 / beta;
    let terms = terms.unwrap_or_else(|| davenport_default_terms(beta, levels));
    if (terms as f64) < min_terms {
        return Err(Error::param("L", format!("{terms} is below J + 40/beta = {min_terms}")));
    }
    let n = 1u64 << levels;
    let den = 2 * n;
    let amps: Vec<f64> = (0..=terms).map(|l| (-(l as f64) * beta).exp2()).collect();
    let data = (0..n)
        .into_par_iter()
        .map(|k| {
            // 2^l (2k+1) / 2^{J+1} mod 1 is exact in integers
            let mut num = 2 * k + 1;
            let mut s = 0.0;
            for a in &amps {
                s += a * (num as f64 / den as f64 - 0.5);
                num = (2 * num) % den;
            }
            s
        })
        .collect();
    Ok(Generated {
        data,
        truth: GroundTruth::Davenport { beta },
    })
}

/// `c_{j,k} = 2^{-j(s0 - 1/p0)} μ(λ_{j,k})^{1/p0}` from a dyadic measure.
pub fn transference_series(
    m: &BAdicMeasure,
    s0: f64,
    p0: f64,
    w: &WaveletSpec,
    levels: usize,
) -> Result<Generated<CoefficientPyramid>> {
    if m.base() != 2 {
        return Err(Error::param("b", format!("base {} is not dyadic", m.base())));
    }
    if !(p0 > 0.0 && s0 > 1.0 / p0) {
        return Err(Error::param("s0", format!("{s0} must exceed 1/p0 = {}", 1.0 / p0)));
    }
    if m.depth() + 1 < levels {
        return Err(Error::Depth {
            requested: levels.saturating_sub(1),
            available: m.depth(),
        });
    }
    let shift = s0 - 1.0 / p0;
    let p = CoefficientPyramid::from_fn(levels, Normalization::Linf, |j, k| {
        (-(j as f64) * shift).exp2() * m.level(j)[k].powf(1.0 / p0)
    })
    .with_support(w.support());
    Ok(Generated {
        data: p,
        truth: GroundTruth::Transference {
            s0,
            p0,
            weights: m.weights().map(<[f64]>::to_vec),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaders::{compute_leaders, estimate_exponent, local_leaders, EstimateMode, FitWindow};
    use crate::measures::multinomial;
    use crate::wavelet::analyze;

    fn db4() -> WaveletSpec {
        WaveletSpec::daubechies(4).unwrap()
    }

    fn measured_lipschitz(f: impl Fn(f64) -> f64) -> f64 {
        let n = 20_000;
        (0..n)
            .map(|i| {
                let (a, b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
                (f(b) - f(a)).abs() * n as f64
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn profiles() {
        let all = [
            HolderProfile::constant(0.5),
            HolderProfile::affine(0.3, 0.4),
            HolderProfile::sinusoid(0.4, 0.3),
            HolderProfile::Sinusoid { mean: 0.5, amplitude: -0.1, frequency: 3, phase: 0.25 },
            HolderProfile::PiecewiseLinear { knots: vec![(0.2, 0.3), (0.5, 0.8), (0.9, 0.4)] },
            HolderProfile::Table { values: vec![0.2, 0.6, 0.5, 0.9] },
        ];
        for p in &all {
            p.validate().unwrap();
            let (lo, hi) = p.bounds();
            let lip = p.lipschitz();
            for i in 0..=1000 {
                let v = p.eval(i as f64 / 1000.0);
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "{p:?}");
            }
            assert!(measured_lipschitz(|t| p.eval(t)) <= lip + 1e-6, "{p:?}");
        }
        assert!(HolderProfile::constant(1.0).validate().is_err());
        assert!(HolderProfile::affine(-0.1, 0.5).validate().is_err());
        assert!(HolderProfile::PiecewiseLinear { knots: vec![] }.validate().is_err());
        assert_eq!(HolderProfile::Table { values: vec![0.2, 0.6] }.eval(0.5), 0.4);
    }

    #[test]
    fn profile_parsing() {
        assert_eq!(HolderProfile::parse("constant:0.5").unwrap(), HolderProfile::constant(0.5));
        assert_eq!(HolderProfile::parse("affine:0.3,0.4").unwrap(), HolderProfile::affine(0.3, 0.4));
        assert_eq!(HolderProfile::parse("sinusoid:0.4,0.3").unwrap(), HolderProfile::sinusoid(0.4, 0.3));
        assert_eq!(
            HolderProfile::parse("piecewise:0/0.3;1/0.7").unwrap(),
            HolderProfile::PiecewiseLinear { knots: vec![(0.0, 0.3), (1.0, 0.7)] }
        );
        assert_eq!(HolderProfile::parse("table:0.3;0.7").unwrap(), HolderProfile::Table { values: vec![0.3, 0.7] });
        assert!(HolderProfile::parse("piecewise:1/0.3;0/0.7").is_err());
        assert!(HolderProfile::parse("wiggle:1").is_err());
        assert!(HolderProfile::parse("constant:x").is_err());
    }

    #[test]
    fn weierstrass_basics() {
        let g = weierstrass(&HolderProfile::constant(0.5), 2, 10, None).unwrap();
        assert_eq!(g.data.len(), 1024);
        assert_eq!(g.data[0], 0.0);
        // direct evaluation at t = 3/1024 with the same truncation
        let jmax = weierstrass_default_jmax(2, 10, 0.5);
        let t = 3.0 / 1024.0;
        let direct: f64 = (0..=jmax)
            .map(|j| 2f64.powf(-0.5 * j as f64) * (2.0 * PI * (2f64.powi(j as i32) * t).fract()).sin())
            .sum();
        assert!((g.data[3] - direct).abs() < 1e-9);
        assert!(weierstrass_tail(2, jmax, 0.5) < 1e-10);
        assert!(weierstrass_tail(2, weierstrass_default_jmax(2, 16, 0.3), 0.3) < 1e-10);

        let g3 = weierstrass(&HolderProfile::constant(0.4), 3, 8, None).unwrap();
        let jmax = weierstrass_default_jmax(3, 8, 0.4);
        let direct: f64 = (0..=jmax)
            .map(|j| {
                let ph = (3u128.pow(j as u32) * 77 % 256) as f64 / 256.0;
                3f64.powf(-0.4 * j as f64) * (2.0 * PI * ph).sin()
            })
            .sum();
        assert!((g3.data[77] - direct).abs() < 1e-9);

        assert!(weierstrass(&HolderProfile::constant(0.5), 2, 10, Some(5)).is_err());
        assert!(weierstrass(&HolderProfile::constant(1.2), 2, 10, None).is_err());
        assert!(weierstrass(&HolderProfile::constant(0.5), 1, 10, None).is_err());
    }

    #[test]
    fn weierstrass_affine_exponent_at_half() {
        let g = weierstrass(&HolderProfile::affine(0.3, 0.4), 2, 16, None).unwrap();
        let lp = compute_leaders(&analyze(&g.data, &db4()).unwrap()).unwrap();
        let s = local_leaders(&lp, 0.5).unwrap();
        let e = estimate_exponent(&s, FitWindow::default_for(16), EstimateMode::Limit).unwrap();
        assert!((e.value() - 0.5).abs() < 0.1, "{e:?}");
    }

    #[test]
    fn prescribed_coefficients() {
        let g = prescribed_series(&HolderProfile::constant(0.5), &db4(), 12).unwrap();
        let p = &g.data;
        assert_eq!(p.coefficient(0, 0), 0.0);
        assert_eq!(p.coefficient(1, 1), 0.0);
        assert_eq!(p.coefficient(2, 3), 0.25);
        assert!((p.coefficient(3, 0) - (-3.0 / 3f64.log2()).exp2()).abs() < 1e-15);
        for j in 4..12 {
            assert_eq!(p.coefficient(j, 5 % (1 << j)), (-(j as f64) * 0.5).exp2());
        }
        assert_eq!(p.support(), 8);
        assert_eq!(g.truth.spectrum(0.5), Some(1.0));
        assert_eq!(g.truth.spectrum(0.6), Some(f64::NEG_INFINITY));
    }

    #[test]
    fn prescribed_sinusoid_exponents() {
        let h = HolderProfile::sinusoid(0.4, 0.3);
        let g = prescribed_series(&h, &db4(), 16).unwrap();
        let lp = compute_leaders(&g.data).unwrap();
        let w = FitWindow::default_for(16);
        // below 1/log2(j) on the window the floor, not H, sets the coefficients
        let floor = 1.0 / (w.start as f64).log2();
        let mut checked = 0;
        for i in 0..16 {
            let x = 0.1 + 0.8 * i as f64 / 15.0;
            let s = local_leaders(&lp, x).unwrap();
            let e = estimate_exponent(&s, w, EstimateMode::Limit).unwrap();
            if h.eval(x) >= floor + 0.02 {
                assert!((e.value() - h.eval(x)).abs() < 0.05, "x={x}: {e:?}");
                checked += 1;
            } else if h.eval(x) < 1.0 / (w.end as f64).log2() {
                let low = 1.0 / (w.end as f64).log2();
                assert!(e.liminf >= low - 1e-9 && e.limsup <= floor + 1e-9, "x={x}: {e:?}");
            }
        }
        assert!(checked >= 8);
    }

    #[test]
    fn block_schedule() {
        assert_eq!(block_ratio(0.3, 0.7), 9);
        assert!(!upper_block(0, 9) && !upper_block(9, 9));
        assert!(upper_block(10, 9) && upper_block(81, 9));
        assert!(!upper_block(82, 9));
        assert_eq!(block_ratio(0.5, 0.5), 4);
    }

    #[test]
    fn mollifier_lipschitz_cap() {
        let profiles = [HolderProfile::sinusoid(0.5, 0.4), HolderProfile::affine(0.1, 0.8), HolderProfile::Table { values: vec![0.1, 0.9, 0.1] }];
        for h in &profiles {
            for j in 1..=16 {
                let lip = measured_lipschitz(|t| mollified(h, j, t));
                assert!(lip <= j as f64 + 1e-9, "{h:?} j={j}: {lip}");
            }
        }
        assert!((mollified(&HolderProfile::constant(0.3), 5, 0.2) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn two_exponent_degenerate_and_ordering() {
        let half = HolderProfile::constant(0.5);
        let g = two_exponent_series(&half, &half, &db4(), 16).unwrap();
        let lp = compute_leaders(&g.data).unwrap();
        for x in [0.2, 0.5, 0.8] {
            let s = local_leaders(&lp, x).unwrap();
            let e = estimate_exponent(&s, FitWindow::default_for(16), EstimateMode::Limit).unwrap();
            assert!((e.liminf - 0.5).abs() < 0.05 && (e.limsup - 0.5).abs() < 0.05);
        }
        let err = two_exponent_series(&HolderProfile::constant(0.6), &half, &db4(), 8).unwrap_err();
        assert!(matches!(err, Error::Ordering(_)));
    }

    #[test]
    fn sawtooth_values() {
        assert_eq!(sawtooth(0.75), 0.25);
        assert_eq!(sawtooth(0.0), -0.5);
        assert_eq!(sawtooth(-0.25), 0.25);
    }

    #[test]
    fn davenport_values() {
        let terms = 80;
        assert!((davenport_value(2.0, 0.0, terms) + 2.0 / 3.0).abs() < 1e-12);
        assert!((davenport_value(2.0, 0.5, terms) + 1.0 / 6.0).abs() < 1e-12);
        // jump at 3/8 (l = 3): one-sided limits
        let eps = 1e-12;
        let jump = davenport_value(2.0, 0.375 - eps, terms) - davenport_value(2.0, 0.375 + eps, terms);
        let expect = (-3.0f64 * 2.0).exp2() / (1.0 - 0.25);
        assert!((jump - expect).abs() < 1e-6, "{jump} {expect}");

        let g = davenport(2.0, 10, None).unwrap();
        assert_eq!(g.data.len(), 1024);
        for k in [0usize, 1, 511, 1023] {
            let x = (k as f64 + 0.5) / 1024.0;
            assert!((g.data[k] - davenport_value(2.0, x, davenport_default_terms(2.0, 10))).abs() < 1e-12);
        }
        assert!(davenport(1.0, 10, None).is_err());
        assert!(davenport(2.0, 10, Some(20)).is_err());
    }

    #[test]
    fn davenport_ground_truth() {
        let t = GroundTruth::Davenport { beta: 2.0 };
        // a double carries 55 digits of 1/3, which resolves φ only to about 4/55
        assert!((t.lower_exponent(1.0 / 3.0).unwrap() - 2.0).abs() < 0.15);
        assert_eq!(t.lower_exponent(0.25), Some(0.0));
        assert_eq!(t.upper_exponent(0.25), Some(0.0));
        assert_eq!(t.upper_exponent(1.0 / 3.0), Some(2.0));
        assert_eq!(t.spectrum(1.0), Some(0.5));
        assert_eq!(t.spectrum(2.5), Some(f64::NEG_INFINITY));
    }

    #[test]
    fn transference_coefficients() {
        let leb = BAdicMeasure::lebesgue(2, 10).unwrap();
        let g = transference_series(&leb, 1.0, 2.0, &db4(), 11).unwrap();
        for j in 0..11 {
            assert!(g.data.level(j).iter().all(|&c| (c - (-(j as f64)).exp2()).abs() < 1e-15));
        }
        assert!(transference_series(&leb, 1.0, 2.0, &db4(), 12).is_err());
        assert!(transference_series(&leb, 0.4, 2.0, &db4(), 8).is_err());

        let m = multinomial(2, &[0.25, 0.75], 12).unwrap();
        let g = transference_series(&m, 1.0, 2.0, &db4(), 13).unwrap();
        let lp = compute_leaders(&g.data).unwrap();
        for j in 0..13 {
            for (k, &d) in lp.level(j).iter().enumerate() {
                assert!(d >= g.data.coefficient(j, k));
                // child/parent ratio sqrt(m/2) < 1, so leaders equal coefficients
                assert_eq!(d, g.data.coefficient(j, k));
            }
        }
        let (lo, hi) = g.truth.support().unwrap();
        assert!((lo - (0.5 - 0.75f64.log2() / 2.0)).abs() < 1e-12 && (hi - 1.5).abs() < 1e-12);
        let apex = 0.5 + (2.0 - 0.75f64.log2()) / 4.0;
        assert!((g.truth.spectrum(apex).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ground_truth_ordering() {
        let truths = [
            weierstrass(&HolderProfile::affine(0.3, 0.4), 2, 8, None).unwrap().truth,
            two_exponent_series(&HolderProfile::constant(0.3), &HolderProfile::sinusoid(0.6, 0.1), &db4(), 8).unwrap().truth,
            GroundTruth::Davenport { beta: 2.0 },
        ];
        for t in &truths {
            for i in 0..64 {
                let x = (i as f64 + 0.37) / 64.0;
                assert!(t.lower_exponent(x).unwrap() <= t.upper_exponent(x).unwrap() + 1e-12, "{t:?} at {x}");
            }
        }
    }

    #[test]
    fn ground_truth_serializes() {
        let t = GroundTruth::Profiles {
            description: "x".into(),
            lower: HolderProfile::affine(0.3, 0.4),
            upper: HolderProfile::Table { values: vec![0.5, 0.6] },
        };
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<GroundTruth>(&s).unwrap(), t);
    }
}
