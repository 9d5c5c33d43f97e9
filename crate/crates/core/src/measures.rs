//! b-adic measures on `[0,1)`: multinomial products and random multiplicative cascades.
//!
//! Masses are stored per level in word order, the word `w_1 ... w_n` sitting at index
//! `Σ w_ℓ b^{n-ℓ}`, so level `n` is the b-adic cube `[k b^{-n}, (k+1) b^{-n})`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::Cube;
use crate::leaders::{scale_estimate, EstimateMode, ExponentEstimate};
use crate::{Error, Result};

/// Identifier recorded in output metadata for seeded measures.
pub const RNG_ALGORITHM: &str = "chacha8/stream-per-node";

const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Multinomial,
    Cascade,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Consistency {
    /// Children sum to their parent within 1e-12.
    Exact,
    Approximate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BAdicMeasure {
    base: u32,
    levels: Vec<Vec<f64>>,
    kind: MeasureKind,
    consistency: Consistency,
    seed: Option<u64>,
    weights: Option<Vec<f64>>,
}

fn validate_base(b: u32) -> Result<()> {
    if b < 2 {
        return Err(Error::param("b", format!("base {b} must be at least 2")));
    }
    Ok(())
}

impl BAdicMeasure {
    /// Wraps externally computed masses; consistency is detected.
    pub fn from_levels(base: u32, levels: Vec<Vec<f64>>) -> Result<Self> {
        validate_base(base)?;
        if levels.is_empty() {
            return Err(Error::param("levels", "at least level 0 is required"));
        }
        let mut width = 1usize;
        for (n, lvl) in levels.iter().enumerate() {
            if lvl.len() != width {
                return Err(Error::param(
                    "levels",
                    format!("level {n} has {} cells, expected {width}", lvl.len()),
                ));
            }
            if let Some(bad) = lvl.iter().find(|m| !(**m >= 0.0 && m.is_finite())) {
                return Err(Error::param("levels", format!("mass {bad} at level {n}")));
            }
            width *= base as usize;
        }
        let consistency = detect_consistency(base, &levels);
        Ok(BAdicMeasure {
            base,
            levels,
            kind: MeasureKind::External,
            consistency,
            seed: None,
            weights: None,
        })
    }

    pub fn lebesgue(base: u32, depth: usize) -> Result<Self> {
        validate_base(base)?;
        multinomial(base, &vec![1.0 / f64::from(base); base as usize], depth)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n]
    }

    pub fn total(&self) -> f64 {
        self.levels[0][0]
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn consistency(&self) -> Consistency {
        self.consistency
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Generating weights of a multinomial measure.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn mass(&self, c: &Cube) -> Result<f64> {
        if c.base != self.base {
            return Err(Error::param("cube", format!("base {} differs from {}", c.base, self.base)));
        }
        if c.level as usize > self.depth() {
            return Err(Error::Depth {
                requested: c.level as usize,
                available: self.depth(),
            });
        }
        Ok(self.levels[c.level as usize][c.index as usize])
    }

    pub fn to_file(&self) -> MeasureFile {
        MeasureFile {
            b: self.base,
            depth: self.depth(),
            tag: self.kind,
            seed: self.seed,
            weights: self.weights.clone(),
            levels: self.levels.clone(),
        }
    }

    pub fn from_file(f: MeasureFile) -> Result<Self> {
        if f.levels.len() != f.depth + 1 {
            return Err(Error::param("depth", format!("{} levels for depth {}", f.levels.len(), f.depth)));
        }
        let mut m = BAdicMeasure::from_levels(f.b, f.levels)?;
        m.kind = f.tag;
        m.seed = f.seed;
        m.weights = f.weights;
        Ok(m)
    }
}

fn detect_consistency(base: u32, levels: &[Vec<f64>]) -> Consistency {
    let b = base as usize;
    let exact = levels.windows(2).all(|w| {
        w[0].iter()
            .enumerate()
            .all(|(k, &parent)| (w[1][k * b..(k + 1) * b].iter().sum::<f64>() - parent).abs() <= CONSISTENCY_TOL)
    });
    if exact {
        Consistency::Exact
    } else {
        Consistency::Approximate
    }
}

/// JSON layout `{b, depth, tag, seed, levels}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub b: u32,
    pub depth: usize,
    pub tag: MeasureKind,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub levels: Vec<Vec<f64>>,
}

/// `μ(I_w) = Π m_{w_ℓ}`.
pub fn multinomial(b: u32, weights: &[f64], depth: usize) -> Result<BAdicMeasure> {
    validate_base(b)?;
    if weights.len() != b as usize {
        return Err(Error::param("weights", format!("{} weights for base {b}", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
        return Err(Error::param("weights", format!("{w} is outside (0, 1)")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::param("weights", format!("sum to {sum}")));
    }
    let mut levels = vec![vec![1.0]];
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let next = prev
            .par_iter()
            .flat_map_iter(|&m| weights.iter().map(move |w| m * w))
            .collect();
        levels.push(next);
    }
    Ok(BAdicMeasure {
        base: b,
        levels,
        kind: MeasureKind::Multinomial,
        consistency: Consistency::Exact,
        seed: None,
        weights: Some(weights.to_vec()),
    })
}

/// Law of the cascade weight `W`, each with `E W = 1/b` in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum WeightLaw {
    /// `W = exp(σZ - σ²/2) / b`.
    LogNormal { sigma: f64 },
    /// `W = v1` with probability `prob`, else `v2`.
    TwoPoint { v1: f64, v2: f64, prob: f64 },
    /// `W` uniform on `[(1 - spread)/b, (1 + spread)/b]`.
    UniformScaled { spread: f64 },
}

impl WeightLaw {
    /// `lognormal:σ`, `two-point:v1,v2[,prob]` or `uniform:spread`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::param("law", format!("bad number {a:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match (name.trim(), nums.as_slice()) {
            ("lognormal", [sigma]) => Ok(WeightLaw::LogNormal { sigma: *sigma }),
            ("two-point", [v1, v2]) => Ok(WeightLaw::TwoPoint { v1: *v1, v2: *v2, prob: 0.5 }),
            ("two-point", [v1, v2, prob]) => Ok(WeightLaw::TwoPoint { v1: *v1, v2: *v2, prob: *prob }),
            ("uniform", [spread]) => Ok(WeightLaw::UniformScaled { spread: *spread }),
            _ => Err(Error::param("law", format!("unrecognised law {s:?}"))),
        }
    }
}

/// Two readings of the cascade non-degeneracy condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nondegeneracy {
    /// `-1 - log_b E(W)`, identically zero under `E W = 1/b`.
    pub mean_form: f64,
    /// `τ'(1) = -b E(W log_b W)`; the cascade is non-degenerate when positive.
    pub entropy_form: f64,
}

impl Nondegeneracy {
    pub fn holds(&self) -> bool {
        self.entropy_form > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeSpec {
    pub base: u32,
    pub law: WeightLaw,
}

impl CascadeSpec {
    pub fn new(base: u32, law: WeightLaw) -> Result<Self> {
        validate_base(base)?;
        let inv = 1.0 / f64::from(base);
        match law {
            WeightLaw::LogNormal { sigma } => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(Error::param("sigma", format!("{sigma} must be finite and non-negative")));
                }
            }
            WeightLaw::TwoPoint { v1, v2, prob } => {
                if !(v1 > 0.0 && v2 > 0.0) {
                    return Err(Error::param("law", "two-point values must be positive"));
                }
                if !(0.0..=1.0).contains(&prob) {
                    return Err(Error::param("prob", format!("{prob} is not a probability")));
                }
                let mean = prob * v1 + (1.0 - prob) * v2;
                if (mean - inv).abs() > 1e-12 {
                    return Err(Error::param("law", format!("E W = {mean}, expected {inv}")));
                }
            }
            WeightLaw::UniformScaled { spread } => {
                if !(0.0..1.0).contains(&spread) {
                    return Err(Error::param("spread", format!("{spread} is outside [0, 1)")));
                }
            }
        }
        Ok(CascadeSpec { base, law })
    }

    pub fn mean(&self) -> f64 {
        1.0 / f64::from(self.base)
    }

    /// `E(W ln W)` in closed form.
    fn mean_w_ln_w(&self) -> f64 {
        let b = f64::from(self.base);
        match self.law {
            WeightLaw::LogNormal { sigma } => (0.5 * sigma * sigma - b.ln()) / b,
            WeightLaw::TwoPoint { v1, v2, prob } => prob * v1 * v1.ln() + (1.0 - prob) * v2 * v2.ln(),
            WeightLaw::UniformScaled { spread } => {
                if spread == 0.0 {
                    return -b.ln() / b;
                }
                let (lo, hi) = ((1.0 - spread) / b, (1.0 + spread) / b);
                let anti = |x: f64| if x == 0.0 { 0.0 } else { 0.5 * x * x * x.ln() - 0.25 * x * x };
                (anti(hi) - anti(lo)) / (hi - lo)
            }
        }
    }

    pub fn nondegeneracy(&self) -> Nondegeneracy {
        let b = f64::from(self.base);
        Nondegeneracy {
            mean_form: -1.0 - self.mean().ln() / b.ln(),
            entropy_form: -b * self.mean_w_ln_w() / b.ln(),
        }
    }

    fn sampler(&self) -> Sampler {
        let b = f64::from(self.base);
        match self.law {
            WeightLaw::LogNormal { sigma: 0.0 } => Sampler::Constant(1.0 / b),
            WeightLaw::LogNormal { sigma } => Sampler::LogNormal(
                LogNormal::new(-0.5 * sigma * sigma - b.ln(), sigma).expect("validated sigma"),
            ),
            WeightLaw::TwoPoint { v1, v2, prob } => Sampler::TwoPoint(v1, v2, prob),
            WeightLaw::UniformScaled { spread: 0.0 } => Sampler::Constant(1.0 / b),
            WeightLaw::UniformScaled { spread } => Sampler::Uniform(
                Uniform::new_inclusive((1.0 - spread) / b, (1.0 + spread) / b).expect("validated spread"),
            ),
        }
    }
}

enum Sampler {
    Constant(f64),
    LogNormal(LogNormal<f64>),
    TwoPoint(f64, f64, f64),
    Uniform(Uniform<f64>),
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Constant(c) => *c,
            Sampler::LogNormal(d) => d.sample(rng),
            Sampler::TwoPoint(v1, v2, p) => {
                if rng.random::<f64>() < *p {
                    *v1
                } else {
                    *v2
                }
            }
            Sampler::Uniform(d) => d.sample(rng),
        }
    }
}

/// Finite-depth cascade `μ_n(I_w) = W_{w_1} W_{w_1 w_2} ... W_{w_1...w_n}`.
///
/// The children weights of the node with breadth-first index `i` come from the
/// ChaCha8 stream `i` keyed by `seed`, so a realisation does not depend on the
/// thread count.
pub fn cascade(spec: &CascadeSpec, depth: usize, seed: u64) -> Result<BAdicMeasure> {
    let spec = CascadeSpec::new(spec.base, spec.law)?;
    let b = spec.base as usize;
    let sampler = spec.sampler();
    let root = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = vec![vec![1.0]];
    let mut first_id = 0u64;
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let next: Vec<f64> = prev
            .par_iter()
            .enumerate()
            .flat_map_iter(|(k, &m)| {
                let mut rng = root.clone();
                rng.set_stream(first_id + k as u64);
                let w: Vec<f64> = (0..b).map(|_| m * sampler.draw(&mut rng)).collect();
                w
            })
            .collect();
        first_id += prev.len() as u64;
        levels.push(next);
    }
    let consistency = detect_consistency(spec.base, &levels);
    Ok(BAdicMeasure {
        base: spec.base,
        levels,
        kind: MeasureKind::Cascade,
        consistency,
        seed: Some(seed),
        weights: None,
    })
}

/// Brute-force `max(μ(I_vw) / (μ(I_v) μ(I_w)), μ(I_v) μ(I_w) / μ(I_vw))` over all
/// words with `1 <= |v| <= depth_v` and `1 <= |w| <= depth_w`, skipping null words.
pub fn quasi_bernoulli_constant(m: &BAdicMeasure, depth_v: usize, depth_w: usize) -> Result<f64> {
    if depth_v == 0 || depth_w == 0 {
        return Err(Error::param("depth", "word lengths must be positive"));
    }
    if depth_v + depth_w > m.depth() {
        return Err(Error::Depth {
            requested: depth_v + depth_w,
            available: m.depth(),
        });
    }
    let b = m.base() as usize;
    let mut worst = 1.0f64;
    for lv in 1..=depth_v {
        for lw in 1..=depth_w {
            let width_w = b.pow(lw as u32);
            let c = (0..m.level(lv).len())
                .into_par_iter()
                .map(|v| {
                    let mv = m.level(lv)[v];
                    let mut worst = 1.0f64;
                    if mv == 0.0 {
                        return worst;
                    }
                    for w in 0..width_w {
                        let mw = m.level(lw)[w];
                        let mvw = m.level(lv + lw)[v * width_w + w];
                        if mw == 0.0 || mvw == 0.0 {
                            continue;
                        }
                        let r = mvw / (mv * mw);
                        worst = worst.max(r).max(1.0 / r);
                    }
                    worst
                })
                .reduce(|| 1.0, f64::max);
            worst = worst.max(c);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureExponent {
    /// Field-wise minimum over the admissible shifts.
    pub estimate: ExponentEstimate,
    /// Estimates for the shifts `σ = -1, 0, 1`; `None` when the shifted cube leaves `[0,1)`.
    pub shifts: [Option<ExponentEstimate>; 3],
}

/// `log_b μ(λ_n(x) + σ b^{-n}) / (-n)` over `depths`, minimised over `σ ∈ {-1, 0, 1}`.
pub fn measure_alpha(m: &BAdicMeasure, x: f64, depths: std::ops::RangeInclusive<usize>) -> Result<MeasureExponent> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    let (n1, n2) = (*depths.start(), *depths.end());
    if n1 == 0 || n2 < n1 + 1 {
        return Err(Error::EmptyRange { start: n1, end: n2 });
    }
    if n2 > m.depth() {
        return Err(Error::Depth {
            requested: n2,
            available: m.depth(),
        });
    }
    let scales: Vec<f64> = depths.clone().map(|n| n as f64).collect();
    let lb = f64::from(m.base()).log2();
    let mut shifts: [Option<ExponentEstimate>; 3] = [None, None, None];
    for (slot, sigma) in shifts.iter_mut().zip([-1i64, 0, 1]) {
        let mut logs = Vec::with_capacity(scales.len());
        for n in depths.clone() {
            match Cube::containing(x, n as u32, m.base())?.shift(sigma) {
                Some(c) => logs.push(m.mass(&c)?.log2() / lb),
                None => break,
            }
        }
        if logs.len() == scales.len() {
            *slot = Some(scale_estimate(x, &scales, &logs, EstimateMode::Limit));
        }
    }
    let valid: Vec<&ExponentEstimate> = shifts.iter().flatten().collect();
    let best = valid
        .iter()
        .min_by(|a, b| a.value().total_cmp(&b.value()))
        .expect("the unshifted cube always exists");
    let estimate = ExponentEstimate {
        liminf: valid.iter().map(|e| e.liminf).fold(f64::INFINITY, f64::min),
        limsup: valid.iter().map(|e| e.limsup).fold(f64::INFINITY, f64::min),
        ..(*best).clone()
    };
    Ok(MeasureExponent { estimate, shifts })
}

/// `τ(q) = -log_b Σ m_i^q`.
pub fn multinomial_tau(weights: &[f64], q: f64) -> f64 {
    let b = weights.len() as f64;
    -weights.iter().map(|m| m.powf(q)).sum::<f64>().ln() / b.ln()
}

fn multinomial_tau_prime(weights: &[f64], q: f64) -> f64 {
    // weights rescaled by the largest term to keep m^q finite for large |q|
    let lead = weights
        .iter()
        .map(|m| q * m.ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for m in weights {
        let w = (q * m.ln() - lead).exp();
        num += w * m.ln();
        den += w;
    }
    -num / (den * (weights.len() as f64).ln())
}

/// Support `[α_min, α_max]` of the multinomial spectrum.
pub fn multinomial_alpha_range(weights: &[f64]) -> (f64, f64) {
    let lb = (weights.len() as f64).ln();
    let max = weights.iter().copied().fold(0.0, f64::max);
    let min = weights.iter().copied().fold(1.0, f64::min);
    (-max.ln() / lb, -min.ln() / lb)
}

/// `τ*(α) = inf_q (αq - τ(q))` in closed form, `-∞` outside the support.
pub fn multinomial_tau_star(weights: &[f64], alpha: f64) -> f64 {
    let (lo, hi) = multinomial_alpha_range(weights);
    let b = weights.len() as f64;
    if alpha < lo || alpha > hi {
        return f64::NEG_INFINITY;
    }
    if lo == hi {
        return 1.0;
    }
    let ends = |target: f64| weights.iter().filter(|m| (m.ln() - target).abs() < 1e-15).count() as f64;
    if alpha == lo {
        return ends(weights.iter().copied().fold(0.0, f64::max).ln()).ln() / b.ln();
    }
    if alpha == hi {
        return ends(weights.iter().copied().fold(1.0, f64::min).ln()).ln() / b.ln();
    }
    // τ' decreases from α_max to α_min; bracket then bisect for τ'(q) = α
    let (mut a, mut c) = (-1.0, 1.0);
    while multinomial_tau_prime(weights, a) < alpha {
        a *= 2.0;
        if a < -1e6 {
            break;
        }
    }
    while multinomial_tau_prime(weights, c) > alpha {
        c *= 2.0;
        if c > 1e6 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + c);
        if multinomial_tau_prime(weights, mid) > alpha {
            a = mid;
        } else {
            c = mid;
        }
    }
    let q = 0.5 * (a + c);
    (alpha * q - multinomial_tau(weights, q)).min(1.0)
}
