//! Run configuration: a flat `key = value` file whose keys mirror the
//! fields below, with command-line overrides applied on top.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::domain::{plan_domain, DomainConfig};
use crate::dynamics::{Scheme, StepperConfig};
use crate::error::{Error, Result};
use crate::flux::RegularizedFlux;
use crate::initial::InitialData;
use crate::trajectory::DiagnosticLevel;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub width: f64,
    pub half_period: f64,
    pub nx: usize,
    pub ny: usize,
    pub delta: f64,
    pub scheme: Scheme,
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub dealias: bool,
    /// Flux cutoff; `None` means the unregularized flux `u^2/2`.
    pub h: Option<f64>,
    pub init: InitialData,
    pub amplitude: f64,
    pub seed: u64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub out_dir: PathBuf,
    /// Times `t0` at which the Picard study is run.
    pub picard_t0: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            width: PI,
            half_period: 16.0 * PI,
            nx: 256,
            ny: 64,
            delta: 0.5,
            scheme: Scheme::Etd2,
            dt: 1e-3,
            picard_tol: 1e-12,
            picard_max_iter: 50,
            dealias: true,
            h: None,
            init: InitialData::GaussianBump {
                x0: 0.0,
                sigma_x: 2.0,
                l: 1,
            },
            amplitude: 1.0,
            seed: 0,
            t_end: 1.0,
            snapshot_stride: 100,
            out_dir: PathBuf::from("out"),
            picard_t0: vec![0.0125, 0.025, 0.05],
        }
    }
}

/// Parse a real number, optionally a multiple of `pi` (`pi`, `16pi`,
/// `16*pi`, `0.5 * pi`).
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a number"));
    if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>().map_err(|_| bad())?
        };
        return Ok(factor * PI);
    }
    t.parse::<f64>().map_err(|_| bad())
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("`{key}` expects an integer, got `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(Error::Parse(format!("`{key}` expects a boolean, got `{other}`"))),
    }
}

/// Parameters of the initial-data generators collected while parsing, so
/// that `init = ...` may appear before or after its parameters.
#[derive(Debug, Clone)]
struct InitParams {
    name: String,
    l: usize,
    j: i64,
    x0: f64,
    sigma_x: f64,
    jmax: i64,
    lmax: usize,
}

impl InitParams {
    fn from_data(init: &InitialData) -> Self {
        let mut p = Self {
            name: init.name().to_string(),
            l: 1,
            j: 1,
            x0: 0.0,
            sigma_x: 2.0,
            jmax: 8,
            lmax: 4,
        };
        match *init {
            InitialData::Eigenmode { l } => p.l = l,
            InitialData::TravelingMode { j, l } => {
                p.j = j;
                p.l = l;
            }
            InitialData::GaussianBump { x0, sigma_x, l } => {
                p.x0 = x0;
                p.sigma_x = sigma_x;
                p.l = l;
            }
            InitialData::RandomBand { jmax, lmax, .. } => {
                p.jmax = jmax;
                p.lmax = lmax;
            }
        }
        p
    }

    fn build(&self, seed: u64) -> Result<InitialData> {
        Ok(match self.name.as_str() {
            "eigenmode" => InitialData::Eigenmode { l: self.l },
            "traveling_mode" => InitialData::TravelingMode { j: self.j, l: self.l },
            "gaussian_bump" => InitialData::GaussianBump {
                x0: self.x0,
                sigma_x: self.sigma_x,
                l: self.l,
            },
            "random_band" => InitialData::RandomBand {
                seed,
                jmax: self.jmax,
                lmax: self.lmax,
            },
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown initial-data generator `{other}`"
                )))
            }
        })
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parse a configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let pairs = text
            .lines()
            .enumerate()
            .filter_map(|(n, line)| {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    return None;
                }
                Some(match line.split_once('=') {
                    Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
                    None => Err(Error::Parse(format!("line {}: expected `key = value`", n + 1))),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        cfg.apply(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        Ok(cfg)
    }

    /// Apply `key = value` assignments in order.
    pub fn apply<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        let mut init = InitParams::from_data(&self.init);
        for (key, v) in pairs {
            match key {
                "L" => self.width = parse_real(v)?,
                "X" => self.half_period = parse_real(v)?,
                "nx" => self.nx = parse_int(key, v)?,
                "ny" => self.ny = parse_int(key, v)?,
                "delta" => self.delta = parse_real(v)?,
                "scheme" => self.scheme = v.parse()?,
                "dt" => self.dt = parse_real(v)?,
                "picard_tol" => self.picard_tol = parse_real(v)?,
                "picard_max_iter" => self.picard_max_iter = parse_int(key, v)?,
                "picard_t0" => {
                    self.picard_t0 = v.split(',').map(parse_real).collect::<Result<Vec<_>>>()?;
                }
                "dealias" => self.dealias = parse_bool(key, v)?,
                "h" => {
                    self.h = match v {
                        "none" => None,
                        other => Some(parse_real(other)?),
                    }
                }
                "init" => init.name = v.to_string(),
                "init.l" => init.l = parse_int(key, v)?,
                "init.j" => init.j = parse_int(key, v)?,
                "init.x0" => init.x0 = parse_real(v)?,
                "init.sigma_x" => init.sigma_x = parse_real(v)?,
                "init.jmax" => init.jmax = parse_int(key, v)?,
                "init.lmax" => init.lmax = parse_int(key, v)?,
                "amplitude" => self.amplitude = parse_real(v)?,
                "seed" => self.seed = parse_int(key, v)?,
                "t_end" => self.t_end = parse_real(v)?,
                "snapshot_stride" => self.snapshot_stride = parse_int(key, v)?,
                "out_dir" => self.out_dir = PathBuf::from(v),
                other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
            }
        }
        self.init = init.build(self.seed)?;
        Ok(())
    }

    pub fn domain(&self) -> Result<DomainConfig> {
        plan_domain(self.width, self.half_period, self.nx, self.ny, self.delta)
    }

    pub fn stepper(&self, level: DiagnosticLevel) -> StepperConfig {
        StepperConfig {
            scheme: self.scheme,
            dt: self.dt,
            picard_tol: self.picard_tol,
            picard_max_iter: self.picard_max_iter,
            dealias: self.dealias,
            snapshot_stride: self.snapshot_stride,
            level,
            ..StepperConfig::default()
        }
    }

    pub fn flux(&self) -> Result<RegularizedFlux> {
        match self.h {
            None => Ok(RegularizedFlux::Quadratic),
            Some(h) => RegularizedFlux::regularized(h),
        }
    }

    /// Check everything that can be checked without running.
    pub fn validate(&self) -> Result<DomainConfig> {
        let d = self.domain()?;
        self.stepper(DiagnosticLevel::H2).validate()?;
        self.flux()?;
        self.init.validate(&d)?;
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig("snapshot_stride must be at least 1".into()));
        }
        crate::semigroup::step_count(self.t_end, self.dt)?;
        Ok(d)
    }

    /// Configuration text that parses back to the same values.
    pub fn to_text(&self) -> String {
        let p = InitParams::from_data(&self.init);
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("L", format!("{:?}", self.width));
        line("X", format!("{:?}", self.half_period));
        line("nx", self.nx.to_string());
        line("ny", self.ny.to_string());
        line("delta", format!("{:?}", self.delta));
        line("scheme", self.scheme.to_string());
        line("dt", format!("{:?}", self.dt));
        line("picard_tol", format!("{:?}", self.picard_tol));
        line("picard_max_iter", self.picard_max_iter.to_string());
        line(
            "picard_t0",
            self.picard_t0
                .iter()
                .map(|t| format!("{t:?}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        line("dealias", self.dealias.to_string());
        line("h", self.h.map_or_else(|| "none".to_string(), |h| format!("{h:?}")));
        line("init", p.name.clone());
        line("init.l", p.l.to_string());
        line("init.j", p.j.to_string());
        line("init.x0", format!("{:?}", p.x0));
        line("init.sigma_x", format!("{:?}", p.sigma_x));
        line("init.jmax", p.jmax.to_string());
        line("init.lmax", p.lmax.to_string());
        line("amplitude", format!("{:?}", self.amplitude));
        line("seed", self.seed.to_string());
        line("t_end", format!("{:?}", self.t_end));
        line("snapshot_stride", self.snapshot_stride.to_string());
        line("out_dir", self.out_dir.display().to_string());
        s
    }
}
