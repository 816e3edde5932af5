//! Synthetic market: per-company random walks with drift, a per-company
//! volatility, and threshold classification into stable/volatile.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{sample_normal, RngStream};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolatilityClass {
    Stable,
    Volatile,
}

impl VolatilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            VolatilityClass::Stable => "stable",
            VolatilityClass::Volatile => "volatile",
        }
    }
}

impl fmt::Display for VolatilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VolatilityClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "stable" => Ok(VolatilityClass::Stable),
            "volatile" => Ok(VolatilityClass::Volatile),
            other => Err(format!("unknown volatility class `{other}`")),
        }
    }
}

/// Volatile iff `sigma > threshold`; the boundary is stable.
pub fn classify(sigma: f64, threshold: f64) -> Result<VolatilityClass> {
    if !(sigma >= 0.0) || !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma and threshold must be non-negative, got sigma={sigma}, threshold={threshold}"
        )));
    }
    Ok(if sigma > threshold {
        VolatilityClass::Volatile
    } else {
        VolatilityClass::Stable
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyProfile {
    pub id: u32,
    /// Daily drift, price units per day.
    pub mu: f64,
    /// Standard deviation of the daily shock, price units.
    pub sigma: f64,
    pub class: VolatilityClass,
}

/// Daily prices; `prices[0]` is day 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub company_id: u32,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Price on a 1-based day.
    pub fn on_day(&self, day: usize) -> f64 {
        self.prices[day - 1]
    }

    /// Prices for the inclusive 1-based day range.
    pub fn days(&self, first: usize, last: usize) -> &[f64] {
        &self.prices[first - 1..last]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetConfig {
    pub n_companies: usize,
    /// Series length in trading days.
    pub days: usize,
    pub mu: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_threshold: f64,
    pub p0: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            n_companies: 100,
            days: 100,
            mu: 0.05,
            sigma_min: 0.01,
            sigma_max: 0.15,
            sigma_threshold: 0.05,
            p0: 100.0,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_companies < 2 {
            return Err(Error::config("dataset.n_companies", "must be at least 2"));
        }
        if self.days < 2 {
            return Err(Error::config("dataset.days", "must be at least 2"));
        }
        if !self.mu.is_finite() {
            return Err(Error::config("dataset.mu", "must be finite"));
        }
        if !self.p0.is_finite() {
            return Err(Error::config("dataset.p0", "must be finite"));
        }
        if !(self.sigma_min >= 0.0) || !self.sigma_min.is_finite() {
            return Err(Error::config("dataset.sigma_min", "must be finite and >= 0"));
        }
        if !(self.sigma_max > 0.0) || !self.sigma_max.is_finite() || self.sigma_max < self.sigma_min {
            return Err(Error::config(
                "dataset.sigma_max",
                "must be finite, positive and >= sigma_min",
            ));
        }
        if !(self.sigma_threshold >= 0.0) || !self.sigma_threshold.is_finite() {
            return Err(Error::config("dataset.sigma_threshold", "must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: DatasetConfig,
    pub master_seed: u64,
    pub companies: Vec<CompanyProfile>,
    pub series: Vec<PriceSeries>,
}

impl Dataset {
    pub fn days(&self) -> usize {
        self.config.days
    }

    pub fn len(&self) -> usize {
        self.companies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.companies.is_empty()
    }

    pub fn count(&self, class: VolatilityClass) -> usize {
        self.companies.iter().filter(|c| c.class == class).count()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.config.days;
        if self.companies.len() != self.series.len() {
            return Err(Error::Validation(format!(
                "{} companies but {} series",
                self.companies.len(),
                self.series.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (c, s) in self.companies.iter().zip(&self.series) {
            if c.id != s.company_id {
                return Err(Error::Validation(format!(
                    "company {} is paired with series {}",
                    c.id, s.company_id
                )));
            }
            if !seen.insert(c.id) {
                return Err(Error::Validation(format!("duplicate company id {}", c.id)));
            }
            if s.len() != t || t < 2 {
                return Err(Error::Validation(format!(
                    "company {} has {} prices, expected {t}",
                    c.id,
                    s.len()
                )));
            }
            if let Some(day) = s.prices.iter().position(|p| !p.is_finite()) {
                return Err(Error::Validation(format!(
                    "company {} has a non-finite price on day {}",
                    c.id,
                    day + 1
                )));
            }
            let expected = classify(c.sigma, self.config.sigma_threshold)
                .map_err(|e| Error::Validation(format!("company {}: {e}", c.id)))?;
            if expected != c.class {
                return Err(Error::Validation(format!(
                    "company {} has sigma {} but class {} (threshold {})",
                    c.id, c.sigma, c.class, self.config.sigma_threshold
                )));
            }
        }
        Ok(())
    }
}

/// Random walk with drift: `P₁ = P0`, `Pₜ = Pₜ₋₁ + μ + εₜ`, `εₜ ~ N(0, σ²)`.
pub fn generate_series(
    profile: &CompanyProfile,
    days: usize,
    p0: f64,
    rng: &mut RngStream,
) -> Result<PriceSeries> {
    if days < 2 {
        return Err(Error::InvalidParameter(format!("series needs >= 2 days, got {days}")));
    }
    if !p0.is_finite() {
        return Err(Error::InvalidParameter("initial price must be finite".into()));
    }
    // Accumulate drift and shocks separately so the noiseless path is exactly
    // P0 + μ(t − 1) rather than a running sum of rounded increments.
    let mut prices = Vec::with_capacity(days);
    prices.push(p0);
    let mut shocks = 0.0;
    for t in 1..days {
        shocks += sample_normal(rng, 0.0, profile.sigma)?;
        prices.push(p0 + profile.mu * t as f64 + shocks);
    }
    Ok(PriceSeries {
        company_id: profile.id,
        prices,
    })
}

/// Company `i` draws its sigma from stream `i` and its path from stream `n + i`.
pub fn generate_dataset(cfg: &DatasetConfig, master_seed: u64) -> Result<Dataset> {
    generate_dataset_with(cfg, master_seed, Execution::default())
}

pub fn generate_dataset_with(
    cfg: &DatasetConfig,
    master_seed: u64,
    exec: Execution,
) -> Result<Dataset> {
    cfg.validate()?;
    let n = cfg.n_companies;
    let built = exec.map_indexed(n, |i| -> Result<(CompanyProfile, PriceSeries)> {
        let mut sigma_rng = RngStream::new(master_seed, i as u64);
        let sigma = sigma_rng.uniform(cfg.sigma_min, cfg.sigma_max);
        let profile = CompanyProfile {
            id: i as u32,
            mu: cfg.mu,
            sigma,
            class: classify(sigma, cfg.sigma_threshold)?,
        };
        let mut path_rng = RngStream::new(master_seed, (n + i) as u64);
        let series = generate_series(&profile, cfg.days, cfg.p0, &mut path_rng)?;
        Ok((profile, series))
    });
    let (companies, series) = built.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(Dataset {
        config: cfg.clone(),
        master_seed,
        companies,
        series,
    })
}

pub const CSV_HEADER: [&str; 6] = ["company_id", "day", "price", "sigma", "mu", "class"];

/// Long format, one row per (company, day). Floats use the shortest
/// representation that parses back to the same `f64`.
pub fn export_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_io(path, e))?;
    for (c, s) in ds.companies.iter().zip(&ds.series) {
        for (d, p) in s.prices.iter().enumerate() {
            w.write_record([
                c.id.to_string(),
                (d + 1).to_string(),
                p.to_string(),
                c.sigma.to_string(),
                c.mu.to_string(),
                c.class.to_string(),
            ])
            .map_err(|e| csv_io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Validation(format!("csv: {other:?}")),
    }
}

/// Reads a file written by [`export_csv`]. `cfg` supplies the threshold and
/// the snapshot the file must agree with; `master_seed` is recorded as-is.
pub fn import_csv(path: &Path, cfg: &DatasetConfig, master_seed: u64) -> Result<Dataset> {
    cfg.validate()?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_io(path, e))?;
    let header = r.headers().map_err(|e| csv_io(path, e))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }

    let mut companies: Vec<CompanyProfile> = Vec::new();
    let mut series: Vec<PriceSeries> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
            });
        }
        let field = |i: usize| rec.get(i).unwrap_or("");
        let parse_err = |name: &str, msg: String| Error::Parse {
            line,
            message: format!("column `{name}`: {msg}"),
        };
        let id: u32 = field(0).parse().map_err(|e| parse_err("company_id", format!("{e}")))?;
        let day: usize = field(1).parse().map_err(|e| parse_err("day", format!("{e}")))?;
        let price: f64 = field(2).parse().map_err(|e| parse_err("price", format!("{e}")))?;
        let sigma: f64 = field(3).parse().map_err(|e| parse_err("sigma", format!("{e}")))?;
        let mu: f64 = field(4).parse().map_err(|e| parse_err("mu", format!("{e}")))?;
        let class: VolatilityClass = field(5).parse().map_err(|e| parse_err("class", e))?;

        let new_company = companies.last().is_none_or(|c| c.id != id);
        if new_company {
            if companies.iter().any(|c| c.id == id) {
                return Err(parse_err("company_id", format!("rows for company {id} are not contiguous")));
            }
            companies.push(CompanyProfile { id, mu, sigma, class });
            series.push(PriceSeries {
                company_id: id,
                prices: Vec::new(),
            });
        }
        let c = companies.last().unwrap();
        if c.sigma.to_bits() != sigma.to_bits() || c.mu.to_bits() != mu.to_bits() || c.class != class {
            return Err(parse_err("sigma", format!("profile of company {id} changes between rows")));
        }
        let s = series.last_mut().unwrap();
        if day != s.prices.len() + 1 {
            return Err(parse_err("day", format!("expected day {}, found {day}", s.prices.len() + 1)));
        }
        s.prices.push(price);
    }

    let ds = Dataset {
        config: cfg.clone(),
        master_seed,
        companies,
        series,
    };
    check_against_config(&ds)?;
    ds.validate()?;
    Ok(ds)
}

fn check_against_config(ds: &Dataset) -> Result<()> {
    let cfg = &ds.config;
    if ds.companies.len() != cfg.n_companies {
        return Err(Error::Validation(format!(
            "file has {} companies, config expects {}",
            ds.companies.len(),
            cfg.n_companies
        )));
    }
    for (c, s) in ds.companies.iter().zip(&ds.series) {
        if s.len() != cfg.days {
            return Err(Error::Validation(format!(
                "company {} has {} days, config expects {}",
                c.id,
                s.len(),
                cfg.days
            )));
        }
        if c.mu != cfg.mu {
            return Err(Error::Validation(format!("company {} has mu {} != {}", c.id, c.mu, cfg.mu)));
        }
        if !(cfg.sigma_min..=cfg.sigma_max).contains(&c.sigma) {
            return Err(Error::Validation(format!(
                "company {} sigma {} outside [{}, {}]",
                c.id, c.sigma, cfg.sigma_min, cfg.sigma_max
            )));
        }
        if s.prices[0] != cfg.p0 {
            return Err(Error::Validation(format!(
                "company {} starts at {} instead of p0 = {}",
                c.id, s.prices[0], cfg.p0
            )));
        }
    }
    Ok(())
}
