//! Run configuration loaded from TOML.
//!
//! Every section is optional; omitted values fall back to the defaults below.
//! Algebraic integers are written `x` or `[x, y]` for `x + yω`.

use std::path::Path;

use serde::Deserialize;

use crate::elliptic::EllipticDatum;
use crate::error::{Error, Result};
use crate::field::{AlgInt, FieldDescriptor};
use crate::kloosterman::{Truncation, DEFAULT_NODE_CAP};

/// An algebraic integer in the basis `(1, ω)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Pair([i64; 2]),
}

impl Coord {
    pub fn to_alg(self) -> AlgInt {
        match self {
            Coord::Int(x) => AlgInt::int(x as i128),
            Coord::Pair([x, y]) => AlgInt::new(x as i128, y as i128),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    #[default]
    Rational,
    Quadratic,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default)]
    pub kind: FieldKind,
    /// Squarefree `m > 1` for `ℚ(√m)`.
    pub m: Option<i64>,
    /// Replaces the continued-fraction fundamental unit in unit sweeps.
    pub unit: Option<Coord>,
}

/// An elliptic datum: prime `𝔭` above `p` (by index), `(ρ) = 𝔭^h`, `det γ = u·ρ^{k/h}`, trace `τ`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSpec {
    pub p: u64,
    #[serde(default)]
    pub index: u8,
    #[serde(default = "one_u32")]
    pub h: u32,
    /// Defaults to a generator of `𝔭` found by search (requires `h = 1`).
    pub rho: Option<Coord>,
    pub k: u32,
    #[serde(default = "unit_coord")]
    pub u: Coord,
    #[serde(default = "unit_coord")]
    pub tau: Coord,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TableSpec {
    /// Rational primes; every supported prime ideal above each is tabulated.
    pub primes: Vec<u64>,
    pub v_max: u32,
    pub r_max: u32,
    /// Powers `k` of the uniformizer in the constant `4u·π^k`.
    pub k_max: u32,
}

impl Default for TableSpec {
    fn default() -> Self {
        TableSpec { primes: vec![3, 5, 7], v_max: 3, r_max: 3, k_max: 3 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationKind {
    #[default]
    PrimeSupport,
    IdealBox,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirichletSpec {
    /// Evaluation points `[re, im]` or `re`.
    pub z: Vec<ZPoint>,
    pub bound: u64,
    pub truncation: TruncationKind,
    pub tolerance: f64,
    /// Tolerance on the spread of values across unit representatives.
    pub unit_tolerance: f64,
    /// Largest prime-ideal norm for the local factor checks.
    pub local_norm_max: u64,
}

impl Default for DirichletSpec {
    fn default() -> Self {
        DirichletSpec {
            z: vec![ZPoint::Real(2.0)],
            bound: 10_000,
            truncation: TruncationKind::PrimeSupport,
            tolerance: 1e-6,
            unit_tolerance: 1e-10,
            local_norm_max: 13,
        }
    }
}

impl DirichletSpec {
    pub fn truncation(&self) -> Truncation {
        match self.truncation {
            TruncationKind::PrimeSupport => Truncation::PrimeSupport { bound: self.bound },
            TruncationKind::IdealBox => Truncation::IdealBox { bound: self.bound },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ZPoint {
    Real(f64),
    Complex([f64; 2]),
}

impl ZPoint {
    pub fn to_complex(self) -> num_complex::Complex64 {
        match self {
            ZPoint::Real(x) => num_complex::Complex64::new(x, 0.0),
            ZPoint::Complex([x, y]) => num_complex::Complex64::new(x, y),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LfunSpec {
    pub deltas: Vec<i64>,
    /// Points of the functional-equation sweep.
    pub z: Vec<f64>,
    pub tolerance: f64,
    pub afe_z: f64,
    pub alpha: f64,
    pub afe_tolerance: f64,
    /// AFE budget level 0 (coarse), 1 (standard) or 2 (fine).
    pub level: u32,
}

impl Default for LfunSpec {
    fn default() -> Self {
        LfunSpec {
            deltas: vec![5, 12, 29, 45, 48],
            z: vec![0.25, 0.3, 0.4, 0.7],
            tolerance: 1e-6,
            afe_z: 1.0,
            alpha: 0.5,
            afe_tolerance: 1e-4,
            level: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitalSpec {
    /// Exhaustive congruence check over `|δ| ≤ delta_max` (ℚ only; 0 disables).
    pub delta_max: i64,
    pub d_max: i64,
    /// Number of random data for the orbital and symbol checks.
    pub random: usize,
}

impl Default for OrbitalSpec {
    fn default() -> Self {
        OrbitalSpec { delta_max: 10_000, d_max: 30, random: 1000 }
    }
}

/// Run-level settings; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    /// Overrides every suite tolerance.
    pub tolerance: Option<f64>,
    /// Node cap for brute-force enumerations.
    pub budget: Option<u64>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<std::path::PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub field: FieldSpec,
    #[serde(rename = "datum")]
    pub data: Vec<DatumSpec>,
    pub kloosterman: TableSpec,
    pub dirichlet: DirichletSpec,
    pub lfun: LfunSpec,
    pub orbital: OrbitalSpec,
    pub run: RunSpec,
}

fn one_u32() -> u32 {
    1
}

fn unit_coord() -> Coord {
    Coord::Int(1)
}

fn check_tolerance(name: &str, t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {t} must lie in (0, 1)")))
    }
}

fn check_positive(name: &str, n: u64) -> Result<()> {
    if n > 0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Applies `--tol`: every suite tolerance is replaced.
    pub fn override_tolerance(&mut self, tol: f64) -> Result<()> {
        check_tolerance("--tol", tol)?;
        self.run.tolerance = Some(tol);
        self.dirichlet.tolerance = tol;
        self.lfun.tolerance = tol;
        self.lfun.afe_tolerance = tol;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.run.tolerance {
            check_tolerance("run.tolerance", t)?;
        }
        check_tolerance("dirichlet.tolerance", self.dirichlet.tolerance)?;
        check_tolerance("dirichlet.unit_tolerance", self.dirichlet.unit_tolerance)?;
        check_tolerance("lfun.tolerance", self.lfun.tolerance)?;
        check_tolerance("lfun.afe_tolerance", self.lfun.afe_tolerance)?;
        check_positive("run.budget", self.run.budget.unwrap_or(1))?;
        check_positive("run.workers", self.run.workers.unwrap_or(1) as u64)?;
        check_positive("dirichlet.bound", self.dirichlet.bound)?;
        check_positive("orbital.d_max", self.orbital.d_max.max(0) as u64)?;
        if self.orbital.delta_max < 0 {
            return Err(Error::Config("orbital.delta_max must be non-negative".into()));
        }
        if !(self.lfun.alpha > 0.0 && self.lfun.alpha < 1.0) {
            return Err(Error::Config(format!("lfun.alpha = {} must lie in (0, 1)", self.lfun.alpha)));
        }
        for z in &self.dirichlet.z {
            let z = z.to_complex();
            if z.re <= 1.0 {
                return Err(Error::Config(format!(
                    "dirichlet.z = {z}: the series converges only for Re z > 1; refusing to evaluate"
                )));
            }
        }
        let field = self.field()?;
        self.data_for(&field)?;
        Ok(())
    }

    pub fn field(&self) -> Result<FieldDescriptor> {
        match (self.field.kind, self.field.m) {
            (FieldKind::Rational, None) => {
                if self.field.unit.is_some() {
                    return Err(Error::Config("ℚ has no fundamental unit to override".into()));
                }
                Ok(FieldDescriptor::rational())
            }
            (FieldKind::Rational, Some(_)) => Err(Error::Config("field.m given for kind = \"rational\"".into())),
            (FieldKind::Quadratic, None) => Err(Error::Config("field.m is required for kind = \"quadratic\"".into())),
            (FieldKind::Quadratic, Some(m)) => {
                let field = FieldDescriptor::real_quadratic(m).map_err(|e| Error::Config(e.to_string()))?;
                if let Some(u) = self.field.unit {
                    let u = u.to_alg();
                    if !field.is_unit(u) || u == AlgInt::ONE || u == field.neg(AlgInt::ONE) {
                        return Err(Error::Config(format!("field.unit = {u} is not a unit of infinite order")));
                    }
                }
                Ok(field)
            }
        }
    }

    /// The unit used for unit sweeps, if the field has one.
    pub fn unit(&self, field: &FieldDescriptor) -> Result<Option<AlgInt>> {
        if field.is_rational() {
            return Ok(None);
        }
        match self.field.unit {
            Some(u) => Ok(Some(u.to_alg())),
            None => Ok(Some(field.fundamental_unit()?.fundamental)),
        }
    }

    /// Configured data, or one default datum when none are given.
    pub fn data_for(&self, field: &FieldDescriptor) -> Result<Vec<EllipticDatum>> {
        if self.data.is_empty() {
            return Ok(vec![default_datum(field)?]);
        }
        self.data.iter().map(|d| build_datum(field, d)).collect()
    }

    pub fn node_cap(&self) -> u64 {
        self.run.budget.unwrap_or(DEFAULT_NODE_CAP)
    }

    pub fn seed(&self) -> u64 {
        self.run.seed.unwrap_or(0)
    }
}

fn build_datum(field: &FieldDescriptor, d: &DatumSpec) -> Result<EllipticDatum> {
    let bad = |m: String| Error::Config(format!("datum p = {}: {m}", d.p));
    let primes = field.split_prime(d.p).map_err(|e| bad(e.to_string()))?;
    let prime = primes.get(d.index as usize).ok_or_else(|| bad(format!("no prime of index {} above {}", d.index, d.p)))?;
    let rho = match d.rho {
        Some(r) => r.to_alg(),
        None if field.is_rational() => AlgInt::int((d.p as i128).pow(d.h)),
        None if d.h == 1 => field
            .find_generator(&field.prime_power(prime, 1), 200)
            .ok_or_else(|| bad(format!("no generator of {prime} found; give rho")))?,
        None => return Err(bad("rho is required when h > 1".into())),
    };
    EllipticDatum::new(field, prime, d.h, rho, d.k, d.u.to_alg(), d.tau.to_alg()).map_err(|e| bad(e.to_string()))
}

/// `p = 5, k = 1` over ℚ; the first prime above 2 with `k = 2` over a quadratic field.
pub fn default_datum(field: &FieldDescriptor) -> Result<EllipticDatum> {
    let spec = if field.is_rational() {
        DatumSpec { p: 5, index: 0, h: 1, rho: None, k: 1, u: Coord::Int(1), tau: Coord::Int(1) }
    } else {
        DatumSpec { p: 2, index: 0, h: 1, rho: None, k: 2, u: Coord::Int(1), tau: Coord::Int(1) }
    };
    build_datum(field, &spec)
}
