//! Detector parameterization: user-level knobs and the derived quantities
//! every component consumes.

use serde::{Deserialize, Serialize};

use crate::randomness::fingerprint;
use crate::{Error, Result};

/// Exact rational heaviness parameter ε ∈ (0, 1].
///
/// Kept as a ratio end to end so threshold comparisons in the oracle are
/// integer-exact; float form is used only for sizing derived parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsRatio {
    pub num: u64,
    pub den: u64,
}

impl EpsRatio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::config(format!("epsilon {num}/{den} not in (0, 1]")));
        }
        let g = gcd64(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// Parse either a fraction (`"1/16"`) or a decimal (`"0.0625"`), exactly.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            let num = a
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(format!("bad fraction numerator in {text:?}")))?;
            let den = b
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(format!("bad fraction denominator in {text:?}")))?;
            return Self::new(num, den);
        }
        if let Some((int, frac)) = text.split_once('.') {
            if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(Error::parse(format!("bad decimal {text:?}")));
            }
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse()
                    .map_err(|_| Error::parse(format!("bad decimal {text:?}")))?
            };
            let scale = 10u64.pow(frac.len() as u32);
            let frac: u64 = if frac.is_empty() {
                0
            } else {
                frac.parse()
                    .map_err(|_| Error::parse(format!("bad decimal {text:?}")))?
            };
            let num = int
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(|| Error::parse(format!("decimal {text:?} out of range")))?;
            return Self::new(num, scale);
        }
        let int: u64 = text
            .parse()
            .map_err(|_| Error::parse(format!("bad epsilon {text:?}")))?;
        Self::new(int, 1)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for EpsRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Which ordering promise the input stream carries. The detector machinery is
/// identical; the mode is recorded so fixtures, result records, and tests can
/// state what was assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamOrderMode {
    /// Every position of the stream is uniformly shuffled.
    RandomOrder,
    /// Only the heavy elements' positions are uniformly random; the rest may
    /// be placed adversarially.
    PartialOrder,
}

/// User-level detector knobs. Everything else is derived.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Expected stream length (or the current ladder guess for it).
    pub n: u64,
    pub epsilon: EpsRatio,
    /// Heaviness constant: windows are sized to `√(n/ε)/C`.
    pub c: f64,
    /// Hash range of the per-repetition hash functions.
    pub k: u64,
    /// Segment-count multiplier for confirmation intervals.
    pub t_factor: f64,
    /// Repetition-count multiplier: `J = ⌈c_j·log2(U)/(ε·log2 K)⌉`.
    pub c_j: f64,
    /// Vote-threshold multiplier: `θ = ⌈c_theta·log2(U)/log2 K⌉`.
    pub c_theta: f64,
    /// Heavy-mode budget multiplier: at most `⌈c_b/ε⌉` distinct repetitions
    /// may hold a full candidate identity at once.
    pub c_b: f64,
    /// Verification-stride multiplier: candidates must reappear once per
    /// `⌈c_s·log2 n⌉` consecutive windows rather than in every window.
    pub c_s: f64,
    /// Maximum concurrently live checks per repetition.
    pub check_cap_per_j: u32,
    /// How many levels below the top of the interval hierarchy checks start.
    pub start_depth: u32,
    pub mode: StreamOrderMode,
    pub seed: u64,
    /// Exact second moment, when promised in advance.
    pub known_f2: Option<u128>,
    /// Universe bound; defaults to `max(4, n²)`.
    pub universe: Option<u64>,
    /// Discard candidates sampled in blocked windows instead of holding their
    /// short hash for later promotion.
    pub discard_on_block: bool,
}

impl DetectorParams {
    pub fn new(n: u64, epsilon: EpsRatio) -> Self {
        Self {
            n,
            epsilon,
            c: 2.0,
            k: 256,
            t_factor: 0.5,
            c_j: 12.0,
            c_theta: 1.0,
            c_b: 8.0,
            c_s: 0.125,
            check_cap_per_j: 100,
            start_depth: 1,
            mode: StreamOrderMode::RandomOrder,
            seed: 0,
            known_f2: None,
            universe: None,
            discard_on_block: false,
        }
    }
}

/// Fully derived detector configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub params: DetectorParams,
    /// Window width.
    pub w: u64,
    /// Number of complete windows in a stream of length `n`.
    pub full_windows: u64,
    /// Per-window sampling probability, exact.
    pub q_num: u64,
    pub q_den: u64,
    /// Number of hash repetitions.
    pub j: u32,
    /// Minimum hash-match votes for an element to be reported.
    pub vote_threshold: u32,
    /// Top level of the interval hierarchy.
    pub max_level: u32,
    /// Level at which checks start (raised past levels whose confirmation
    /// geometry cannot reach a YES).
    pub start_level: u32,
    /// Max distinct repetitions simultaneously holding a full identity.
    pub heavy_mode_cap: u32,
    /// Universe bound used for sizing.
    pub universe: u64,
    /// Effective window constant: `max(C, √(F2/n))` when F2 is promised.
    pub c_eff: f64,
    /// Unclamped verification stride; each level clamps it to its own width.
    pub stride_hint: u32,
    /// Stable hash of all inputs, embedded in result records.
    pub config_hash: u64,
}

impl DetectorConfig {
    pub fn derive(params: DetectorParams) -> Result<Self> {
        if params.k < 2 {
            return Err(Error::config("K must be at least 2"));
        }
        if !(params.c >= 1.0) {
            return Err(Error::config("C must be at least 1"));
        }
        if !(params.t_factor > 0.0) {
            return Err(Error::config("t_factor must be positive"));
        }
        if params.c_j <= 0.0 || params.c_theta <= 0.0 || params.c_b <= 0.0 || params.c_s <= 0.0 {
            return Err(Error::config("multipliers must be positive"));
        }
        if params.check_cap_per_j == 0 {
            return Err(Error::config("check cap must be positive"));
        }
        let n = params.n;
        let eps = params.epsilon.as_f64();
        let universe = params
            .universe
            .unwrap_or_else(|| n.saturating_mul(n).max(4));
        if universe < 2 {
            return Err(Error::config("universe must hold at least two ids"));
        }
        let c_eff = match params.known_f2 {
            Some(f2) if n > 0 => params.c.max((f2 as f64 / n as f64).sqrt()),
            _ => params.c,
        };
        let root = ((n.max(1) as f64) / eps).sqrt();
        let w = (root / c_eff).round().max(1.0) as u64;
        let full_windows = n / w;
        let q_den = (c_eff * root).round().max(1.0) as u64;
        let log_u = (universe as f64).log2();
        let log_k = (params.k as f64).log2();
        let j = ((params.c_j * log_u) / (eps * log_k)).ceil().max(1.0) as u32;
        let vote_threshold = ((params.c_theta * log_u) / log_k).ceil().max(1.0) as u32;
        let level_arg = c_eff * (eps * n as f64).sqrt() / 8.0;
        let max_level = if level_arg >= 1.0 {
            level_arg.log2().floor() as u32
        } else {
            0
        };
        let heavy_mode_cap = (params.c_b / eps).ceil().max(1.0) as u32;
        let stride_hint = (params.c_s * (n.max(2) as f64).log2()).ceil().max(1.0) as u32;

        let requested = max_level.saturating_sub(params.start_depth);
        let start_level = (requested..=max_level)
            .find(|&l| {
                crate::kshh::level_feasible(1u64 << l, w, params.k, params.t_factor, stride_hint)
            })
            .ok_or_else(|| {
                Error::config(format!(
                    "no check level in {requested}..={max_level} can confirm a candidate \
                     (stream too short for the configured interval geometry)"
                ))
            })?;

        let mut cfg = Self {
            params,
            w,
            full_windows,
            q_num: 1,
            q_den,
            j,
            vote_threshold,
            max_level,
            start_level,
            heavy_mode_cap,
            universe,
            c_eff,
            stride_hint,
            config_hash: 0,
        };
        cfg.config_hash = cfg.compute_hash();
        Ok(cfg)
    }

    fn compute_hash(&self) -> u64 {
        let p = &self.params;
        fingerprint(&[
            p.n,
            p.epsilon.num,
            p.epsilon.den,
            p.c.to_bits(),
            p.k,
            p.t_factor.to_bits(),
            p.c_j.to_bits(),
            p.c_theta.to_bits(),
            p.c_b.to_bits(),
            p.c_s.to_bits(),
            p.check_cap_per_j as u64,
            p.start_depth as u64,
            matches!(p.mode, StreamOrderMode::PartialOrder) as u64,
            p.seed,
            p.known_f2.map_or(u64::MAX, |v| v as u64),
            p.known_f2.map_or(u64::MAX, |v| (v >> 64) as u64),
            p.universe.unwrap_or(0),
            p.discard_on_block as u64,
        ])
    }
}
