//! Run configuration: a TOML file, command-line overrides and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decay::geometric_times;
use crate::error::{Error, Result};
use crate::hyperboloid::SLICE_REFINEMENT;
use crate::profile::VelocityKind;
use crate::spectral::Grid;

/// Largest translate of the randomized low-frequency bumps.
pub const LOWFREQ_MAX_SHIFT: f64 = 8.0;
/// Radius range of the randomized low-frequency bumps.
pub const LOWFREQ_RADII: (f64, f64) = (0.5, 4.0);
/// Radius of the data used by the slice and localized-decay suites; the
/// data is prescribed at `t = 2`.
pub const SLICE_DATA_RADIUS: f64 = 1.0;
/// Geometric samples on `[1, 64]`; sup-norms of massive solutions oscillate
/// with period `2 pi / m`, and coarser grids alias the oscillation into the
/// fitted exponents.
pub const DESK_TIME_COUNT: usize = 241;
/// Slices below this `tau` reach into `{t < 2}` for data in `B(0, 1)`.
pub const MIN_TAU: f64 = 1.732_050_807_568_877_2;

/// One verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Energy,
    Sobolev,
    Entoinfty,
    Prop2,
    Lowfreq,
    Highfreq,
    Interpolation,
    Lp,
    Partition,
    All,
}

impl SuiteKind {
    pub const EACH: [SuiteKind; 9] = [
        SuiteKind::Energy,
        SuiteKind::Sobolev,
        SuiteKind::Entoinfty,
        SuiteKind::Prop2,
        SuiteKind::Lowfreq,
        SuiteKind::Highfreq,
        SuiteKind::Interpolation,
        SuiteKind::Lp,
        SuiteKind::Partition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Energy => "energy",
            SuiteKind::Sobolev => "sobolev",
            SuiteKind::Entoinfty => "entoinfty",
            SuiteKind::Prop2 => "prop2",
            SuiteKind::Lowfreq => "lowfreq",
            SuiteKind::Highfreq => "highfreq",
            SuiteKind::Interpolation => "interpolation",
            SuiteKind::Lp => "lp",
            SuiteKind::Partition => "partition",
            SuiteKind::All => "all",
        }
    }

    /// The statement a suite verifies, recorded in every summary.
    pub fn statement(self) -> &'static str {
        match self {
            SuiteKind::Energy => {
                "hyperboloidal energy identity: E_m(phi, tau) <= int g^2 + |grad f|^2 + m^2 f^2, \
                 with equality for data supported in B(0, 2) at t = 2"
            }
            SuiteKind::Sobolev => {
                "global Sobolev inequality on Sigma_tau with a tau-independent constant"
            }
            SuiteKind::Entoinfty => {
                "weighted sup-norms on Sigma_tau controlled by energies of boosted solutions"
            }
            SuiteKind::Prop2 => {
                "localized decay: m^2 t^d |phi|^2 + t^(d-1) |d phi|^2 bounded by \
                 H^(s_d+1) x H^(s_d) norms of data in B(0, 1)"
            }
            SuiteKind::Lowfreq => {
                "low-frequency dispersive estimate m0 |P_-1 phi| <= C (1+t)^(-d/2) \
                 (||P_-1 f||_1 + ||P_-1 g||_1)"
            }
            SuiteKind::Highfreq => {
                "band-k dispersive estimates with factors 2^(kd/2) (2^k, 1) for phi and \
                 2^(k(d-1)/2) (2^2k, 2^k) for d phi"
            }
            SuiteKind::Interpolation => {
                "regularity-decay trade-off |P_k phi| <= C 2^(ks) t^(-s) (2^k ||P_k f||_1 + \
                 ||P_k g||_1), s in [(d-1)/2, d/2]"
            }
            SuiteKind::Lp => "Littlewood-Paley completeness u = sum_(j >= -1) P_j u",
            SuiteKind::Partition => {
                "lattice partition of unity with bounded overlap and W^(k,1) comparability"
            }
            SuiteKind::All => "every suite",
        }
    }

    /// Expands `all` and removes duplicates, keeping the canonical order.
    pub fn expand(list: &[SuiteKind]) -> Vec<SuiteKind> {
        let all = list.contains(&SuiteKind::All);
        SuiteKind::EACH
            .into_iter()
            .filter(|s| all || list.contains(s))
            .collect()
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteKind::EACH
            .into_iter()
            .chain([SuiteKind::All])
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// Observation times, either geometric or listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    Geometric { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl TimeGrid {
    pub fn resolve(&self) -> Vec<f64> {
        match self {
            TimeGrid::Geometric { start, stop, count } => geometric_times(*start, *stop, *count),
            TimeGrid::List(v) => v.clone(),
        }
    }

    fn problems(&self, what: &str) -> Vec<String> {
        let mut out = Vec::new();
        if let TimeGrid::Geometric { start, stop, count } = self {
            if !(*start > 0.0 && stop > start && stop.is_finite()) || *count < 2 {
                out.push(format!(
                    "{what}: geometric time grid needs 0 < start < stop and count >= 2"
                ));
                return out;
            }
        }
        let t = self.resolve();
        if t.is_empty() {
            out.push(format!("{what}: time grid is empty"));
        } else if t.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            out.push(format!("{what}: times must be finite and positive"));
        } else if t.windows(2).any(|w| w[1] <= w[0]) {
            out.push(format!("{what}: times must be strictly increasing"));
        }
        out
    }

    fn max(&self) -> f64 {
        self.resolve().into_iter().fold(0.0, f64::max)
    }
}

impl FromStr for TimeGrid {
    type Err = Error;

    /// `start:stop:count` for a geometric grid, or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse time grid '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 {
            return Ok(TimeGrid::Geometric {
                start: parts[0].trim().parse().map_err(|_| bad())?,
                stop: parts[1].trim().parse().map_err(|_| bad())?,
                count: parts[2].trim().parse().map_err(|_| bad())?,
            });
        }
        parse_list(s).map(TimeGrid::List)
    }
}

/// Comma-separated numbers.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse '{p}' in list '{s}'")))
        })
        .collect()
}

/// Separate grid and horizon for the band suites.
///
/// Band `k` only enters its dispersive regime once `t` exceeds roughly
/// `2^k / m0^2`, which usually needs a longer horizon and a wider box than
/// the other suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandGrid {
    pub grid_n: usize,
    pub box_length: f64,
    pub times: TimeGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    /// Points per axis.
    pub grid_n: usize,
    pub box_length: f64,
    /// `m0`, the mass of every evolved solution.
    pub mass: f64,
    /// `M`, the upper end of the admissible mass range.
    pub max_mass: f64,
    pub bands: Vec<i32>,
    pub taus: Vec<f64>,
    pub times: TimeGrid,
    pub seed: u64,
    pub suites: Vec<SuiteKind>,
    /// Randomized data sets per family.
    pub samples: usize,
    /// Velocity built from each position bump.
    pub velocity: VelocityKind,
    /// Masses swept when checking the vanishing-mass behavior.
    pub mass_sweep: Vec<f64>,
    /// Radius of the band-suite bump; defaults to `2^(1 - max band)`.
    pub band_bump_radius: Option<f64>,
    pub band_grid: Option<BandGrid>,
    #[serde(skip_serializing)]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            grid_n: 4096,
            box_length: 256.0,
            mass: 1.0,
            max_mass: 1.0,
            bands: vec![0, 1, 2, 3, 4],
            taus: vec![2.0, 4.0, 8.0, 16.0],
            times: TimeGrid::Geometric {
                start: 1.0,
                stop: 64.0,
                count: DESK_TIME_COUNT,
            },
            seed: 0,
            suites: vec![SuiteKind::All],
            samples: 10,
            velocity: VelocityKind::Zero,
            mass_sweep: vec![1.0, 0.25, 0.0625],
            band_bump_radius: None,
            band_grid: Some(BandGrid {
                grid_n: 65536,
                box_length: 2048.0,
                times: TimeGrid::Geometric {
                    start: 1.0,
                    stop: 1000.0,
                    count: 41,
                },
            }),
            out: PathBuf::from("kgdisp-out"),
        }
    }
}

impl RunConfig {
    /// Desk-scale defaults for dimension `d`.
    pub fn desk(dim: usize) -> Result<Self> {
        let grid = Grid::desk_default(dim)?;
        let times = if dim == 1 {
            TimeGrid::Geometric {
                start: 1.0,
                stop: 64.0,
                count: DESK_TIME_COUNT,
            }
        } else if dim == 2 {
            TimeGrid::Geometric {
                start: 1.0,
                stop: 32.0,
                count: 161,
            }
        } else {
            // The smaller 3-d box only fits a shorter horizon.
            TimeGrid::Geometric {
                start: 1.0,
                stop: 16.0,
                count: 81,
            }
        };
        // Slices in d >= 2 cost one spectral sum per sample point.
        let taus = if dim == 1 {
            vec![2.0, 4.0, 8.0, 16.0]
        } else {
            vec![2.0, 4.0]
        };
        // Keep only bands whose annulus `|xi| <= 2^(k+1)` the grid resolves.
        let bands = Self::default()
            .bands
            .into_iter()
            .filter(|&k| 2f64.powi(k + 1) <= grid.nyquist())
            .collect();
        Ok(Self {
            dim,
            grid_n: grid.points_per_axis(),
            box_length: grid.box_length(),
            times,
            taus,
            bands,
            band_grid: if dim == 1 {
                Self::default().band_grid
            } else {
                None
            },
            ..Self::default()
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.grid_n, self.box_length)
    }

    /// Grid and times of the band suites.
    pub fn band_setup(&self) -> Result<(Grid, Vec<f64>)> {
        match &self.band_grid {
            Some(b) => Ok((
                Grid::new(self.dim, b.grid_n, b.box_length)?,
                b.times.resolve(),
            )),
            None => Ok((self.grid()?, self.times.resolve())),
        }
    }

    pub fn band_radius(&self) -> f64 {
        self.band_bump_radius.unwrap_or_else(|| {
            let top = self.bands.iter().copied().max().unwrap_or(0);
            2f64.powi(1 - top).min(1.0)
        })
    }

    pub fn selected(&self) -> Vec<SuiteKind> {
        SuiteKind::expand(&self.suites)
    }

    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(1..=3).contains(&self.dim) {
            bad.push(format!("dim must be 1, 2 or 3, got {}", self.dim));
        }
        let grid = match Grid::new(self.dim.clamp(1, 3), self.grid_n, self.box_length) {
            Ok(g) => Some(g),
            Err(e) => {
                bad.push(format!("grid: {e}"));
                None
            }
        };
        if !(self.max_mass >= 0.0 && self.max_mass.is_finite()) {
            bad.push(format!(
                "max_mass M must be finite and >= 0, got {}",
                self.max_mass
            ));
        }
        if !(0.0..=self.max_mass).contains(&self.mass) {
            bad.push(format!(
                "mass m0 = {} must lie in [0, M] with M = {}",
                self.mass, self.max_mass
            ));
        }
        for &m in &self.mass_sweep {
            if !(0.0..=self.max_mass).contains(&m) {
                bad.push(format!(
                    "mass_sweep entry {m} lies outside [0, M = {}]",
                    self.max_mass
                ));
            }
        }
        if self.samples == 0 {
            bad.push("samples must be at least 1".into());
        }
        if self.suites.is_empty() {
            bad.push("no suite selected".into());
        }
        bad.extend(self.times.problems("times"));
        let suites = self.selected();
        let uses = |k: SuiteKind| suites.contains(&k);
        let t_max = self.times.max();

        if let Some(grid) = grid {
            let wrap = |what: &str, radius: f64, t_max: f64, l: f64, out: &mut Vec<String>| {
                let need = 2.0 * (radius + t_max + 2.0);
                if l < need {
                    out.push(format!(
                        "{what}: anti-wraparound bound L >= 2 (R + T + 2) = {need} fails for \
                         L = {l} (R = {radius}, T = {t_max})"
                    ));
                }
            };
            if uses(SuiteKind::Prop2) {
                wrap("prop2", SLICE_DATA_RADIUS, t_max, self.box_length, &mut bad);
                if self.times.resolve().iter().filter(|t| **t >= 2.0).count() < 2 {
                    bad.push("prop2: needs at least two times t >= 2".into());
                }
            }
            if uses(SuiteKind::Lowfreq) {
                let r = LOWFREQ_MAX_SHIFT + LOWFREQ_RADII.1;
                wrap("lowfreq", r, t_max, self.box_length, &mut bad);
            }
            if uses(SuiteKind::Highfreq) || uses(SuiteKind::Interpolation) {
                self.check_bands(grid, &mut bad, wrap);
            }
            if uses(SuiteKind::Energy) || uses(SuiteKind::Sobolev) || uses(SuiteKind::Entoinfty) {
                self.check_slices(grid, &mut bad);
            }
            if uses(SuiteKind::Partition) && self.box_length < 6.0 {
                bad.push(format!(
                    "partition: box length {} leaves no active region",
                    self.box_length
                ));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(bad))
        }
    }

    fn check_bands(
        &self,
        base: Grid,
        bad: &mut Vec<String>,
        wrap: impl Fn(&str, f64, f64, f64, &mut Vec<String>),
    ) {
        if self.bands.is_empty() {
            bad.push("bands: list is empty".into());
        }
        let radius = self.band_radius();
        if !(radius > 0.0 && radius.is_finite()) {
            bad.push(format!("band_bump_radius must be positive, got {radius}"));
        }
        let (grid, t_max) = match &self.band_grid {
            Some(b) => {
                bad.extend(b.times.problems("band_grid.times"));
                match Grid::new(self.dim.clamp(1, 3), b.grid_n, b.box_length) {
                    Ok(g) => (g, b.times.max()),
                    Err(e) => {
                        bad.push(format!("band_grid: {e}"));
                        return;
                    }
                }
            }
            None => (base, self.times.max()),
        };
        for &k in &self.bands {
            if k < 0 {
                bad.push(format!(
                    "bands: band {k} is not a high-frequency band (k >= 0)"
                ));
            } else if 2f64.powi(k + 1) > grid.nyquist() {
                bad.push(format!(
                    "bands: band {k} reaches |xi| = {} above the Nyquist frequency {:.3}",
                    2f64.powi(k + 1),
                    grid.nyquist()
                ));
            }
        }
        wrap("band suites", radius, t_max, grid.box_length(), bad);
    }

    fn check_slices(&self, grid: Grid, bad: &mut Vec<String>) {
        if self.taus.is_empty() {
            bad.push("taus: list is empty".into());
        }
        let h = grid.spacing() / SLICE_REFINEMENT as f64;
        let a = 2.0 - SLICE_DATA_RADIUS;
        for &tau in &self.taus {
            if !(tau >= MIN_TAU && tau.is_finite()) {
                bad.push(format!(
                    "taus: slice tau = {tau} is below sqrt(3) and reaches into t < 2"
                ));
                continue;
            }
            let reach = (tau * tau - a * a) / (2.0 * a) + 2.0 * h;
            if reach > 0.5 * self.box_length - h {
                bad.push(format!(
                    "taus: slice tau = {tau} meets the solution out to |x| = {reach:.3}, \
                     beyond the half box {}",
                    0.5 * self.box_length
                ));
            }
        }
    }
}
