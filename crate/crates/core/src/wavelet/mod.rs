//! Periodic orthonormal wavelet transforms on `[0, 1)`.
//!
//! A [`CoefficientPyramid`] indexes its coefficients by dyadic cube: entry `(j, k)`
//! belongs to the wavelet whose support is centred in `[k 2^{-j}, (k+1) 2^{-j})`.
//! The Daubechies wavelet `ψ(2^j x - n)` has support `[n, n + L - 1] 2^{-j}` for `L`
//! taps, so the transform stores the coefficient of translate `n` at cube
//! `n + L/2 - 1` (mod `2^j`).

mod filters;

use std::borrow::Cow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Below this many outputs per level the convolutions run serially.
const PAR_THRESHOLD: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalization {
    /// `c_{j,k} = ∫ f(x) 2^{j/2} ψ(2^j x - k) dx`
    L2,
    /// `c_{j,k} = 2^j ∫ f(x) ψ(2^j x - k) dx`
    Linf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub family: String,
    pub vanishing_moments: usize,
    /// Low-pass analysis filter `h`.
    pub taps: Vec<f64>,
    /// Hölder exponent of the scaling function.
    pub regularity: f64,
}

impl Default for WaveletSpec {
    fn default() -> Self {
        Self::daubechies(4).expect("db4 is tabulated")
    }
}

impl WaveletSpec {
    /// Daubechies wavelet with `r` vanishing moments, `2 <= r <= 10`.
    pub fn daubechies(r: usize) -> Result<Self> {
        use filters::*;
        let (taps, regularity): (&[f64], f64) = match r {
            2 => (&DB2, 0.5500),
            3 => (&DB3, 1.0878),
            4 => (&DB4, 1.6179),
            5 => (&DB5, 1.9690),
            6 => (&DB6, 2.1891),
            7 => (&DB7, 2.4604),
            8 => (&DB8, 2.7608),
            9 => (&DB9, 3.0736),
            10 => (&DB10, 3.3614),
            _ => return Err(Error::Wavelet(format!("db{r}: supported orders are 2 to 10"))),
        };
        Ok(WaveletSpec {
            family: format!("db{r}"),
            vanishing_moments: r,
            taps: taps.to_vec(),
            regularity,
        })
    }

    /// Parses names of the form `dbN`.
    pub fn parse(name: &str) -> Result<Self> {
        let order = name
            .strip_prefix("db")
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| Error::Wavelet(name.to_string()))?;
        Self::daubechies(order)
    }

    pub fn support(&self) -> usize {
        self.taps.len()
    }

    /// High-pass filter `g[n] = (-1)^n h[L-1-n]`.
    pub fn high_pass(&self) -> Vec<f64> {
        let l = self.taps.len();
        (0..l)
            .map(|n| {
                let v = self.taps[l - 1 - n];
                if n % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect()
    }

    /// Cube offset between a translate index and the cube holding its centre.
    pub fn alignment(&self) -> usize {
        (self.taps.len() / 2).saturating_sub(1)
    }

    /// Checks `Σ h = √2` and `Σ_n h[n] h[n + 2m] = δ_m`.
    pub fn check_qmf(&self) -> Result<()> {
        let h = &self.taps;
        let sum: f64 = h.iter().sum();
        if (sum - std::f64::consts::SQRT_2).abs() > 1e-12 {
            return Err(Error::Wavelet(format!("{}: taps sum to {sum}", self.family)));
        }
        for m in 0..h.len().div_ceil(2) {
            let dot: f64 = (0..h.len() - 2 * m).map(|n| h[n] * h[n + 2 * m]).sum();
            let target = if m == 0 { 1.0 } else { 0.0 };
            if (dot - target).abs() > 1e-10 {
                return Err(Error::Wavelet(format!(
                    "{}: shift-{} autocorrelation is {dot}",
                    self.family,
                    2 * m
                )));
            }
        }
        Ok(())
    }
}

/// Wavelet coefficients of a periodic function on `[0, 1)`, levels `0..J`.
///
/// Values are stored once, in the normalisation they were produced in, and viewed
/// through the current tag; renormalising only changes the view, so converting
/// back and forth is lossless.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    details: Vec<Vec<f64>>,
    scaling: Vec<f64>,
    stored: Normalization,
    tag: Normalization,
    support: usize,
}

impl CoefficientPyramid {
    /// `levels[j]` must hold `2^j` values. `support` is the number of filter taps of the
    /// generating wavelet, or 0 for pyramids built directly from a formula.
    pub fn new(
        levels: Vec<Vec<f64>>,
        scaling: Vec<f64>,
        tag: Normalization,
        support: usize,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::param("levels", "a pyramid needs at least one level"));
        }
        for (j, lvl) in levels.iter().enumerate() {
            if lvl.len() != 1 << j {
                return Err(Error::param(
                    "levels",
                    format!("level {j} holds {} coefficients instead of {}", lvl.len(), 1usize << j),
                ));
            }
        }
        if scaling.len() != 1 {
            return Err(Error::param("scaling", "expected a single coarse coefficient"));
        }
        Ok(CoefficientPyramid {
            details: levels,
            scaling,
            stored: tag,
            tag,
            support,
        })
    }

    /// Pyramid filled by `coef(j, k)` for `j < levels`.
    pub fn from_fn(levels: usize, tag: Normalization, coef: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let details = (0..levels)
            .map(|j| (0..1usize << j).map(|k| coef(j, k)).collect())
            .collect();
        CoefficientPyramid {
            details,
            scaling: vec![0.0],
            stored: tag,
            tag,
            support: 0,
        }
    }

    pub fn zeros(levels: usize, tag: Normalization) -> Self {
        Self::from_fn(levels, tag, |_, _| 0.0)
    }

    /// Number of detail levels `J`.
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn tag(&self) -> Normalization {
        self.tag
    }

    pub fn support(&self) -> usize {
        self.support
    }

    pub fn with_support(mut self, support: usize) -> Self {
        self.support = support;
        self
    }

    /// Scaling coefficients, identical under both normalisations at level 0.
    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    pub fn set_scaling(&mut self, value: f64) {
        self.scaling[0] = value;
    }

    fn factor(&self, j: usize) -> Option<f64> {
        match (self.stored, self.tag) {
            (a, b) if a == b => None,
            (Normalization::L2, Normalization::Linf) => Some(level_gain(j)),
            _ => Some(level_gain(j).recip()),
        }
    }

    /// Level `j` under the current tag.
    pub fn level(&self, j: usize) -> Cow<'_, [f64]> {
        match self.factor(j) {
            None => Cow::Borrowed(&self.details[j]),
            Some(f) => Cow::Owned(self.details[j].iter().map(|c| c * f).collect()),
        }
    }

    pub fn coefficient(&self, j: usize, k: usize) -> f64 {
        let c = self.details[j][k];
        self.factor(j).map_or(c, |f| c * f)
    }

    /// Same coefficients viewed under `target`; `c_Linf = 2^{j/2} c_L2`.
    pub fn renormalize(&self, target: Normalization) -> Self {
        CoefficientPyramid {
            tag: target,
            ..self.clone()
        }
    }

    /// Whether the wavelet at cube `(j, k)` overlaps the periodic seam at 0.
    pub fn wraps(&self, j: usize, k: usize) -> bool {
        if self.support == 0 {
            return false;
        }
        let cells = 1usize << j;
        let shift = (self.support / 2).saturating_sub(1);
        let n = (k + cells - shift % cells) % cells;
        n + self.support - 1 > cells
    }

    pub fn to_file(&self) -> PyramidFile {
        PyramidFile {
            levels_count: self.levels(),
            tag: self.tag,
            levels: (0..self.levels()).map(|j| self.level(j).into_owned()).collect(),
            scaling: self.scaling.clone(),
            support: self.support,
        }
    }

    pub fn from_file(file: PyramidFile) -> Result<Self> {
        if file.levels.len() != file.levels_count {
            return Err(Error::param(
                "J",
                format!("declares {} levels but holds {}", file.levels_count, file.levels.len()),
            ));
        }
        Self::new(file.levels, file.scaling, file.tag, file.support)
    }
}

/// On-disk layout of a pyramid: `{J, tag, levels, scaling, support}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PyramidFile {
    #[serde(rename = "J")]
    pub levels_count: usize,
    pub tag: Normalization,
    pub levels: Vec<Vec<f64>>,
    pub scaling: Vec<f64>,
    #[serde(default)]
    pub support: usize,
}

/// `2^{j/2}`, exact for even `j`.
fn level_gain(j: usize) -> f64 {
    let half = (j / 2) as i32;
    let g = 2f64.powi(half);
    if j % 2 == 1 {
        g * std::f64::consts::SQRT_2
    } else {
        g
    }
}

fn signal_levels(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let j = len.trailing_zeros() as usize;
    if j < 3 {
        return Err(Error::TooShort { len, min: 8 });
    }
    Ok(j)
}

/// Periodic convolution with decimation: `out[k] = Σ_i f[i] a[(2k + i) mod n]`.
fn decimate(a: &[f64], f: &[f64]) -> Vec<f64> {
    let n = a.len();
    let half = n / 2;
    let one = |k: usize| -> f64 {
        f.iter()
            .enumerate()
            .map(|(i, &fi)| fi * a[(2 * k + i) % n])
            .sum()
    };
    if half >= PAR_THRESHOLD {
        (0..half).into_par_iter().map(one).collect()
    } else {
        (0..half).map(one).collect()
    }
}

/// Adjoint of [`decimate`] for both channels, in gather form so each output is
/// accumulated in a fixed order.
fn upsample(lo: &[f64], hi: &[f64], h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = lo.len();
    let m2 = 2 * n;
    let one = |m: usize| -> f64 {
        let mut acc = 0.0;
        for i in 0..h.len() {
            let d = (m + m2 * h.len() - i) % m2;
            if d.is_multiple_of(2) {
                let k = d / 2;
                acc += h[i] * lo[k] + g[i] * hi[k];
            }
        }
        acc
    };
    if m2 >= PAR_THRESHOLD {
        (0..m2).into_par_iter().map(one).collect()
    } else {
        (0..m2).map(one).collect()
    }
}

/// Discrete wavelet transform of `2^J` point samples on `[0, 1)`, `J >= 3`.
///
/// Samples are taken as the finest scaling coefficients `2^{-J/2} f(k 2^{-J})`, so
/// a constant signal has its constant as coarse scaling coefficient. Output is
/// tagged [`Normalization::Linf`].
pub fn analyze(signal: &[f64], w: &WaveletSpec) -> Result<CoefficientPyramid> {
    let levels = signal_levels(signal.len())?;
    let h = &w.taps;
    let g = w.high_pass();
    let scale = level_gain(levels).recip();
    let mut approx: Vec<f64> = signal.iter().map(|s| s * scale).collect();
    let mut details = vec![Vec::new(); levels];
    for j in (0..levels).rev() {
        let hi = decimate(&approx, &g);
        let lo = decimate(&approx, h);
        let cells = hi.len();
        let gain = level_gain(j);
        let shift = w.alignment() % cells;
        let mut lvl = vec![0.0; cells];
        for (n, c) in hi.into_iter().enumerate() {
            lvl[(n + shift) % cells] = c * gain;
        }
        details[j] = lvl;
        approx = lo;
    }
    Ok(CoefficientPyramid {
        details,
        scaling: approx,
        stored: Normalization::Linf,
        tag: Normalization::Linf,
        support: w.support(),
    })
}

/// Inverse of [`analyze`]. Expects an `Linf`-tagged pyramid; convert explicitly
/// with [`CoefficientPyramid::renormalize`] otherwise.
pub fn synthesize(p: &CoefficientPyramid, w: &WaveletSpec) -> Result<Vec<f64>> {
    if p.tag != Normalization::Linf {
        return Err(Error::Normalization {
            expected: Normalization::Linf,
            found: p.tag,
        });
    }
    if p.support != 0 && p.support != w.support() {
        return Err(Error::Wavelet(format!(
            "pyramid was produced with {} taps, {} has {}",
            p.support,
            w.family,
            w.support()
        )));
    }
    let h = &w.taps;
    let g = w.high_pass();
    let mut approx = p.scaling.clone();
    for j in 0..p.levels() {
        let cells = 1usize << j;
        let gain = level_gain(j);
        let shift = w.alignment() % cells;
        let lvl = p.level(j);
        let hi: Vec<f64> = (0..cells).map(|n| lvl[(n + shift) % cells] / gain).collect();
        approx = upsample(&approx, &hi, h, &g);
    }
    let scale = level_gain(p.levels());
    Ok(approx.into_iter().map(|a| a * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn all_filters_are_qmf() {
        for r in 2..=10 {
            let w = WaveletSpec::daubechies(r).unwrap();
            w.check_qmf().unwrap();
            assert_eq!(w.support(), 2 * r);
            // discrete vanishing moments of the high-pass filter
            let g = w.high_pass();
            for m in 0..r {
                let mom: f64 = g.iter().enumerate().map(|(n, v)| v * (n as f64).powi(m as i32)).sum();
                assert!(mom.abs() < 1e-6 * 10f64.powi(m as i32), "db{r} moment {m}: {mom}");
            }
        }
        assert!(WaveletSpec::daubechies(1).is_err());
        assert!(WaveletSpec::daubechies(11).is_err());
        assert_eq!(WaveletSpec::parse("db6").unwrap().vanishing_moments, 6);
        assert!(WaveletSpec::parse("haar").is_err());
    }

    #[test]
    fn constant_signal() {
        let w = WaveletSpec::default();
        let p = analyze(&vec![3.25; 1024], &w).unwrap();
        for j in 0..p.levels() {
            assert!(p.level(j).iter().all(|c| c.abs() < 1e-12));
        }
        assert!((p.scaling()[0] - 3.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_lengths() {
        let w = WaveletSpec::default();
        assert_eq!(analyze(&[0.0; 12], &w), Err(Error::NotPowerOfTwo(12)));
        assert!(matches!(analyze(&[0.0; 4], &w), Err(Error::TooShort { .. })));
    }

    #[test]
    fn round_trip() {
        let w = WaveletSpec::daubechies(4).unwrap();
        let s = random_signal(1 << 10, 1);
        let back = synthesize(&analyze(&s, &w).unwrap(), &w).unwrap();
        let err = s.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn affine_signal_has_no_interior_detail() {
        for r in [2, 4, 6] {
            let w = WaveletSpec::daubechies(r).unwrap();
            let n = 1 << 10;
            let s: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
            let p = analyze(&s, &w).unwrap();
            for j in 0..p.levels() {
                for (k, c) in p.level(j).iter().enumerate() {
                    if !p.wraps(j, k) {
                        assert!(c.abs() < 1e-10, "db{r} ({j},{k}) = {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn polynomial_below_moment_order() {
        let w = WaveletSpec::daubechies(4).unwrap();
        let n = 1 << 11;
        let s: Vec<f64> = (0..n)
            .map(|k| {
                let x = k as f64 / n as f64;
                1.0 - 2.0 * x + 3.0 * x * x - 1.5 * x * x * x
            })
            .collect();
        let p = analyze(&s, &w).unwrap();
        for j in 0..p.levels() {
            for (k, c) in p.level(j).iter().enumerate() {
                if !p.wraps(j, k) {
                    assert!(c.abs() < 1e-8, "({j},{k}) = {c}");
                }
            }
        }
    }

    #[test]
    fn parseval_in_l2() {
        let w = WaveletSpec::daubechies(3).unwrap();
        let s = random_signal(1 << 9, 2);
        let p = analyze(&s, &w).unwrap().renormalize(Normalization::L2);
        let coef: f64 = (0..p.levels())
            .flat_map(|j| p.level(j).into_owned())
            .chain(p.scaling().iter().copied())
            .map(|c| c * c)
            .sum();
        let samples: f64 = s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64;
        assert!(((coef - samples) / samples).abs() < 1e-9);
    }

    #[test]
    fn linearity() {
        let w = WaveletSpec::daubechies(5).unwrap();
        let a = random_signal(256, 3);
        let b = random_signal(256, 4);
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
        let (pa, pb, pm) = (
            analyze(&a, &w).unwrap(),
            analyze(&b, &w).unwrap(),
            analyze(&mix, &w).unwrap(),
        );
        for j in 0..pm.levels() {
            for k in 0..1 << j {
                let want = 2.0 * pa.coefficient(j, k) - 0.5 * pb.coefficient(j, k);
                assert!((pm.coefficient(j, k) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_pyramid_synthesizes_to_zero() {
        let w = WaveletSpec::default();
        let s = synthesize(&CoefficientPyramid::zeros(6, Normalization::Linf), &w).unwrap();
        assert_eq!(s.len(), 64);
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn synthesize_rejects_l2() {
        let w = WaveletSpec::default();
        let p = CoefficientPyramid::zeros(4, Normalization::L2);
        assert!(matches!(synthesize(&p, &w), Err(Error::Normalization { .. })));
    }

    #[test]
    fn linf_atoms_have_scale_free_amplitude() {
        let w = WaveletSpec::daubechies(4).unwrap();
        let levels = 14;
        let peaks: Vec<f64> = [6usize, 8, 10]
            .iter()
            .map(|&j| {
                let mut p = CoefficientPyramid::zeros(levels, Normalization::Linf).with_support(w.support());
                p.details[j][1 << (j - 1)] = 1.0;
                let s = synthesize(&p, &w).unwrap();
                s.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .collect();
        for p in &peaks[1..] {
            assert!((p - peaks[0]).abs() / peaks[0] < 0.02, "{peaks:?}");
        }
    }

    #[test]
    fn coefficients_sit_on_their_cube() {
        // a jump at 1/2 shows up in the cubes around k = 2^{j-1}
        let w = WaveletSpec::daubechies(4).unwrap();
        let n = 1 << 12;
        let s: Vec<f64> = (0..n).map(|k| if 2 * k < n { 0.0 } else { 1.0 }).collect();
        let p = analyze(&s, &w).unwrap();
        for j in 5..10 {
            let lvl = p.level(j);
            let (kmax, _) = lvl
                .iter()
                .enumerate()
                .filter(|(k, _)| !p.wraps(j, *k))
                .fold((0, 0.0), |best, (k, c)| if c.abs() > best.1 { (k, c.abs()) } else { best });
            let centre = 1usize << (j - 1);
            assert!(kmax + 2 >= centre && kmax <= centre + 1, "level {j}: {kmax} vs {centre}");
        }
    }

    #[test]
    fn renormalization() {
        let p = CoefficientPyramid::from_fn(5, Normalization::L2, |j, k| if (j, k) == (3, 0) { 1.0 } else { 0.0 });
        let linf = p.renormalize(Normalization::Linf);
        assert!((linf.coefficient(3, 0) - 2f64.powf(1.5)).abs() < 1e-15);
        assert_eq!(linf.renormalize(Normalization::L2), p);
        assert_eq!(p.renormalize(Normalization::L2), p);
        let q = CoefficientPyramid::from_fn(6, Normalization::Linf, |j, k| (j * 7 + k) as f64 * 0.1);
        assert_eq!(q.renormalize(Normalization::L2).renormalize(Normalization::Linf), q);
    }

    #[test]
    fn file_round_trip() {
        let w = WaveletSpec::daubechies(2).unwrap();
        let p = analyze(&random_signal(64, 5), &w).unwrap();
        let file = p.to_file();
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("\"J\":6"));
        let back = CoefficientPyramid::from_file(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
