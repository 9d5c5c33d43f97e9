//! b-adic grid arithmetic: cubes, digit expansions, and the rate at which a point
//! is approximated by dyadic rationals.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A b-adic interval `[k b^{-j}, (k+1) b^{-j})` of `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub level: u32,
    pub index: u64,
    pub base: u32,
}

impl Cube {
    pub fn new(level: u32, index: u64, base: u32) -> Result<Self> {
        check_base(base)?;
        let cube = Cube { level, index, base };
        if index >= cube.cells() {
            return Err(Error::param(
                "index",
                format!("{index} is outside level {level} of base {base}"),
            ));
        }
        Ok(cube)
    }

    pub fn dyadic(level: u32, index: u64) -> Result<Self> {
        Self::new(level, index, 2)
    }

    /// The level-`level` cube containing `x`, i.e. `k = floor(x b^j)`.
    pub fn containing(x: f64, level: u32, base: u32) -> Result<Self> {
        check_base(base)?;
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        let cells = cells_at(level, base);
        let k = ((x * cells as f64).floor() as u64).min(cells - 1);
        Ok(Cube {
            level,
            index: k,
            base,
        })
    }

    /// Number of cubes at this level, `b^j`.
    pub fn cells(&self) -> u64 {
        cells_at(self.level, self.base)
    }

    /// Side length `b^{-j}`.
    pub fn width(&self) -> f64 {
        (self.base as f64).powi(-(self.level as i32))
    }

    /// Left endpoint `k b^{-j}`.
    pub fn left(&self) -> f64 {
        self.index as f64 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        let w = self.width();
        let a = self.index as f64 * w;
        x >= a && x < a + w
    }

    /// Same-level cube shifted by `sigma` cells, `None` outside `[0, 1)`.
    pub fn shift(&self, sigma: i64) -> Option<Cube> {
        let k = self.index as i64 + sigma;
        if k < 0 || k as u64 >= self.cells() {
            return None;
        }
        Some(Cube {
            index: k as u64,
            ..*self
        })
    }

    /// The adjacent cubes `{k-1, k, k+1}` at the same level. Cubes that would fall
    /// outside `[0, 1)` are dropped rather than wrapped.
    pub fn neighbors3(&self) -> Vec<Cube> {
        (-1..=1).filter_map(|s| self.shift(s)).collect()
    }

    pub fn parent(&self) -> Option<Cube> {
        (self.level > 0).then(|| Cube {
            level: self.level - 1,
            index: self.index / self.base as u64,
            base: self.base,
        })
    }

    pub fn children(&self) -> impl Iterator<Item = Cube> + '_ {
        let b = self.base as u64;
        (0..b).map(move |i| Cube {
            level: self.level + 1,
            index: self.index * b + i,
            base: self.base,
        })
    }
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::param("base", format!("{base} < 2")));
    }
    Ok(())
}

pub(crate) fn cells_at(level: u32, base: u32) -> u64 {
    (base as u64)
        .checked_pow(level)
        .expect("b-adic level overflows u64")
}

/// A truncated base-`p` expansion `(0; x_1, ..., x_N)_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub base: u32,
    pub digits: Vec<u8>,
    /// False when the stored window ends in a run of `p-1` digits covering at
    /// least its second half, the finite-window signature of an improper expansion.
    pub proper: bool,
}

impl Expansion {
    pub fn from_digits(base: u32, digits: Vec<u8>) -> Result<Self> {
        check_base(base)?;
        if base > 256 {
            return Err(Error::param("base", "digits are stored as bytes"));
        }
        if let Some(&d) = digits.iter().find(|&&d| d as u32 >= base) {
            return Err(Error::param("digits", format!("{d} is not a base-{base} digit")));
        }
        let top = (base - 1) as u8;
        let tail = digits.iter().rev().take_while(|&&d| d == top).count();
        let proper = digits.is_empty() || 2 * tail < digits.len();
        Ok(Expansion {
            base,
            digits,
            proper,
        })
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    /// `Σ x_l p^{-l}` over the stored digits.
    pub fn value(&self) -> f64 {
        let p = self.base as f64;
        self.digits
            .iter()
            .rev()
            .fold(0.0, |acc, &d| (acc + d as f64) / p)
    }

    /// `inf{l : x_l != 0} - 1`, or `None` (standing for +∞) if every stored digit is zero.
    pub fn theta(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0)
    }

    fn trailing_zeros(&self) -> usize {
        self.digits.iter().rev().take_while(|&&d| d == 0).count()
    }
}

/// Proper base-`p` expansion of `x ∈ [0, 1)` truncated at depth `n`, by repeated
/// multiply-and-floor. Exact for power-of-two bases; see [`expand_ratio`] for exact
/// arithmetic in other bases.
pub fn expand(x: f64, p: u32, n: usize) -> Result<Expansion> {
    check_base(p)?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    let pf = p as f64;
    let mut r = x;
    let mut digits = Vec::with_capacity(n);
    for _ in 0..n {
        r *= pf;
        let d = r.floor().clamp(0.0, pf - 1.0);
        digits.push(d as u8);
        r -= d;
    }
    Expansion::from_digits(p, digits)
}

/// Expansion of `num / den ∈ [0, 1)` by exact long division.
pub fn expand_ratio(num: u64, den: u64, p: u32, n: usize) -> Result<Expansion> {
    check_base(p)?;
    if den == 0 || num >= den {
        return Err(Error::Domain(num as f64 / den as f64));
    }
    let (den, p128) = (den as u128, p as u128);
    let mut r = num as u128;
    let mut digits = Vec::with_capacity(n);
    for _ in 0..n {
        r *= p128;
        digits.push((r / den) as u8);
        r %= den;
    }
    Expansion::from_digits(p, digits)
}

/// θ_p(x) at depth `n`; `None` stands for +∞ (all stored digits vanish).
pub fn theta_p(x: f64, p: u32, n: usize) -> Result<Option<usize>> {
    Ok(expand(x, p, n)?.theta())
}

/// One run of a repeated extreme digit (0 or p-1) in an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    /// 1-based position m_k of the first digit of the run.
    pub start: usize,
    /// δ_k: number of consecutive equal digits starting at `start`, inclusive.
    pub len: usize,
    /// Whether the run reaches the end of the stored window.
    pub censored: bool,
}

/// Finite-depth estimate of ρ_p(x) and φ(x) = ρ_p(x) + 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxRate {
    pub runs: Vec<Run>,
    pub rho: f64,
    pub phi: f64,
    pub depth: usize,
}

impl ApproxRate {
    fn infinite(depth: usize) -> Self {
        ApproxRate {
            runs: Vec::new(),
            rho: f64::INFINITY,
            phi: f64::INFINITY,
            depth,
        }
    }

    pub fn positions(&self) -> Vec<usize> {
        self.runs.iter().map(|r| r.start).collect()
    }

    pub fn run_lengths(&self) -> Vec<usize> {
        self.runs.iter().map(|r| r.len).collect()
    }
}

/// Runs m_k, δ_k of the extreme digits 0 and p-1.
///
/// `m_1` is the first position holding 0 or p-1, and `m_k` the first such position at
/// or after `m_{k-1} + δ_{k-1}`. The run length δ counts the digit at `m_k` itself.
pub fn runs(exp: &Expansion) -> Vec<Run> {
    let digits = &exp.digits;
    let top = (exp.base - 1) as u8;
    let n = digits.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let d = digits[i];
        if d != 0 && d != top {
            i += 1;
            continue;
        }
        let len = digits[i..].iter().take_while(|&&e| e == d).count();
        out.push(Run {
            start: i + 1,
            len,
            censored: i + len == n,
        });
        i += len;
    }
    out
}

/// Estimate of the approximation rate from an expansion window.
///
/// ρ is the largest δ_k/m_k over runs starting beyond a quarter of the window,
/// ignoring a run cut by the window end unless it is the only candidate. A window
/// whose second half is all zeros is read as a terminating (p-adic rational)
/// expansion and yields ρ = φ = +∞.
pub fn approx_rate(exp: &Expansion) -> ApproxRate {
    let n = exp.depth();
    if n == 0 || 2 * exp.trailing_zeros() >= n {
        return ApproxRate::infinite(n);
    }
    rate_from_runs(runs(exp), n)
}

fn rate_from_runs(runs: Vec<Run>, n: usize) -> ApproxRate {
    let late = |r: &&Run| 4 * r.start > n;
    let ratio = |r: &Run| r.len as f64 / r.start as f64;
    let uncensored = runs
        .iter()
        .filter(late)
        .filter(|r| !r.censored)
        .map(ratio)
        .reduce(f64::max);
    let rho = uncensored
        .or_else(|| runs.iter().filter(late).map(ratio).reduce(f64::max))
        .unwrap_or(0.0);
    ApproxRate {
        runs,
        rho,
        phi: rho + 1.0,
        depth: n,
    }
}

/// Binary approximation rate of a double.
///
/// Digits are read exactly from the binary representation, over at most `n`
/// positions and never beyond the 53 significant bits of `x`. A value whose
/// expansion stops at least 8 bits before the end of that window is treated as a
/// dyadic rational.
pub fn rho_phi(x: f64, n: usize) -> Result<ApproxRate> {
    const DYADIC_SLACK: usize = 8;
    let exp = expand(x, 2, n.max(1))?;
    let Some(lead) = exp.digits.iter().position(|&d| d != 0) else {
        return Ok(ApproxRate::infinite(n));
    };
    let window = n.min(lead + 1 + 52);
    let last = exp.digits.iter().rposition(|&d| d != 0).unwrap_or(0) + 1;
    if last + DYADIC_SLACK <= lead + 1 + 52 && last <= n {
        return Ok(ApproxRate::infinite(n));
    }
    let truncated = Expansion::from_digits(2, exp.digits[..window].to_vec())?;
    Ok(rate_from_runs(runs(&truncated), window))
}

/// Binary approximation rate of `num / den` using exact arithmetic; dyadic rationals
/// are detected from the reduced denominator.
pub fn rho_phi_ratio(num: u64, den: u64, n: usize) -> Result<ApproxRate> {
    let exp = expand_ratio(num, den, 2, n)?;
    let g = gcd(num, den);
    if num == 0 || (den / g).is_power_of_two() {
        return Ok(ApproxRate::infinite(n));
    }
    Ok(rate_from_runs(runs(&exp), n))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
