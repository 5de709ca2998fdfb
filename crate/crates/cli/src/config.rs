//! Study configuration as flat `key=value` text.
//!
//! The same keys serve as command-line flags (`--nmax 20` is `nmax=20`), so
//! flags and files go through one parser. Lists are written `[x,y,...]`.

use std::fmt::Write as _;
use std::path::PathBuf;

use planar_ortho::kernel::max_kernel_size;
use planar_ortho::moments::check_degree;
use planar_ortho::{DomainSpec, C64};

use crate::domain::{
    domain_from_fields, format_complex, format_list, parse_complex, parse_complex_list, parse_domain, parse_real,
    parse_real_list, parse_usize_list,
};
use crate::error::CliError;

/// Every accepted key, in serialisation order.
pub const KEYS: &[&str] = &[
    "domain",
    "q",
    "cap",
    "coeffs",
    "nmin",
    "nmax",
    "N",
    "srule",
    "s",
    "ell",
    "theta",
    "a",
    "b",
    "weighted",
    "seed",
    "out",
    "cache",
    "nodes-angular",
    "nodes-radial",
    "tol",
    "samples",
    "center",
    "radius",
    "levels",
    "grid",
    "extent",
    "bins",
    "rmax",
];

/// How the weight exponent follows the size parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SRule {
    Fixed(f64),
    /// `s = c·N`.
    Linear(f64),
    /// `s = N + c`.
    Offset(f64),
    Infinite,
}

impl SRule {
    pub fn s_for(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            SRule::Fixed(s) => s,
            SRule::Linear(c) => c * n,
            SRule::Offset(c) => n + c,
            SRule::Infinite => f64::INFINITY,
        }
    }

    /// `ℓ = lim N/s` for the rule; the fixed rule reports the finite ratio.
    pub fn ell(&self, n: usize) -> f64 {
        match *self {
            SRule::Fixed(s) => n as f64 / s,
            SRule::Linear(c) => 1.0 / c,
            SRule::Offset(_) => 1.0,
            SRule::Infinite => 0.0,
        }
    }

    fn parse(rule: Option<&str>, s: Option<&str>) -> Result<Self, CliError> {
        let value = s.map(parse_real).transpose()?;
        let need = |name: &str| value.ok_or_else(|| CliError::config(format!("srule={name} needs s")));
        let rule = match rule.unwrap_or(if value.is_some() { "fixed" } else { "inf" }) {
            "fixed" => {
                let s = need("fixed")?;
                if s.is_infinite() {
                    SRule::Infinite
                } else {
                    SRule::Fixed(s)
                }
            }
            "linear" => SRule::Linear(need("linear")?),
            "offset" => SRule::Offset(need("offset")?),
            "inf" => match value {
                Some(v) if v.is_finite() => return Err(CliError::config("srule=inf conflicts with a finite s")),
                _ => SRule::Infinite,
            },
            other => return Err(CliError::config(format!("unknown srule `{other}`"))),
        };
        match rule {
            SRule::Fixed(v) | SRule::Linear(v) | SRule::Offset(v) if !(v.is_finite() && v > 0.0) => {
                Err(CliError::config("s must be positive and finite for this rule"))
            }
            r => Ok(r),
        }
    }

    fn fields(&self) -> (&'static str, Option<f64>) {
        match *self {
            SRule::Fixed(s) => ("fixed", Some(s)),
            SRule::Linear(c) => ("linear", Some(c)),
            SRule::Offset(c) => ("offset", Some(c)),
            SRule::Infinite => ("inf", None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub domain: DomainSpec,
    /// Degrees `nmin..=nmax` for the leading-coefficient study.
    pub nmin: usize,
    pub nmax: Option<usize>,
    /// Kernel sizes for scaling, gap and sampling studies.
    pub sizes: Vec<usize>,
    pub srule: SRule,
    /// Explicit `ℓ` values; empty means "derive from the rule".
    pub ell: Vec<f64>,
    pub theta: Vec<f64>,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub weighted: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    /// Node counts and tolerance; `None` keeps each routine's default.
    pub nodes_angular: Option<usize>,
    pub nodes_radial: Option<usize>,
    pub tol: Option<f64>,
    pub samples: usize,
    pub center: C64,
    pub radius: Vec<f64>,
    pub levels: Vec<f64>,
    pub grid: usize,
    pub extent: f64,
    pub bins: usize,
    pub rmax: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            domain: DomainSpec::Disk,
            nmin: 0,
            nmax: None,
            sizes: Vec::new(),
            srule: SRule::Infinite,
            ell: Vec::new(),
            theta: vec![0.0],
            a: vec![C64::new(0.0, 0.0)],
            b: vec![C64::new(0.0, 0.0)],
            weighted: false,
            seed: 20_240_917,
            out: None,
            cache: None,
            nodes_angular: None,
            nodes_radial: None,
            tol: None,
            samples: 20_000,
            center: C64::new(0.0, 0.0),
            radius: vec![0.5],
            levels: vec![1.0, 1.25, 1.5, 2.0],
            grid: 101,
            extent: 10.0,
            bins: 16,
            rmax: 1.6,
        }
    }
}

/// Ordered `key=value` pairs with unique keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Pairs(Vec<(String, String)>);

impl Pairs {
    /// Reads `key=value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut pairs = Pairs::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected key=value", lineno + 1)))?;
            let k = k.trim();
            if pairs.get(k).is_some() {
                return Err(CliError::config(format!("line {}: `{k}` given twice", lineno + 1)));
            }
            pairs.0.push((k.to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Inserts or overrides.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key.to_string(), value)),
        }
    }

    pub fn remove(&mut self, key: &str) {
        self.0.retain(|(k, _)| k != key);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize, CliError> {
    v.trim().parse().map_err(|_| CliError::config(format!("{key}: bad integer `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::config(format!("{key}: bad boolean `{v}`"))),
    }
}

impl StudyConfig {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        Self::from_pairs(&Pairs::parse(text)?)
    }

    pub fn from_pairs(pairs: &Pairs) -> Result<Self, CliError> {
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !KEYS.contains(k)) {
            return Err(CliError::config(format!("unknown key `{k}`")));
        }
        let mut cfg = StudyConfig::default();

        let (q, cap, coeffs) = (pairs.get("q"), pairs.get("cap"), pairs.get("coeffs"));
        cfg.domain = match pairs.get("domain") {
            Some(record) if record.contains('=') => {
                if q.is_some() || cap.is_some() || coeffs.is_some() {
                    return Err(CliError::config("give domain fields either in the record or as keys, not both"));
                }
                parse_domain(record)?
            }
            Some(kind) => domain_from_fields(kind.trim(), q, cap, coeffs)?,
            None if q.is_some() => domain_from_fields("ellipse", q, cap, coeffs)?,
            None if cap.is_some() || coeffs.is_some() => domain_from_fields("custom", q, cap, coeffs)?,
            None => DomainSpec::Disk,
        };

        for (k, v) in pairs.iter() {
            match k {
                "nmin" => cfg.nmin = parse_usize(k, v)?,
                "nmax" => cfg.nmax = Some(parse_usize(k, v)?),
                "N" => cfg.sizes = parse_usize_list(v)?,
                "ell" => cfg.ell = parse_real_list(v)?,
                "theta" => cfg.theta = parse_real_list(v)?,
                "a" => cfg.a = parse_complex_list(v)?,
                "b" => cfg.b = parse_complex_list(v)?,
                "weighted" => cfg.weighted = parse_bool(k, v)?,
                "seed" => cfg.seed = v.trim().parse().map_err(|_| CliError::config(format!("seed: bad integer `{v}`")))?,
                "out" => cfg.out = Some(PathBuf::from(v)),
                "cache" => cfg.cache = Some(PathBuf::from(v)),
                "nodes-angular" => cfg.nodes_angular = Some(parse_usize(k, v)?),
                "nodes-radial" => cfg.nodes_radial = Some(parse_usize(k, v)?),
                "tol" => cfg.tol = Some(parse_real(v)?),
                "samples" => cfg.samples = parse_usize(k, v)?,
                "center" => cfg.center = parse_complex(v)?,
                "radius" => cfg.radius = parse_real_list(v)?,
                "levels" => cfg.levels = parse_real_list(v)?,
                "grid" => cfg.grid = parse_usize(k, v)?,
                "extent" => cfg.extent = parse_real(v)?,
                "bins" => cfg.bins = parse_usize(k, v)?,
                "rmax" => cfg.rmax = parse_real(v)?,
                _ => {}
            }
        }
        cfg.srule = SRule::parse(pairs.get("srule"), pairs.get("s"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects any (size, s) pair outside the theory's range, plus obviously
    /// malformed grids.
    pub fn validate(&self) -> Result<(), CliError> {
        for &n in &self.sizes {
            let s = self.srule.s_for(n);
            if n == 0 {
                return Err(CliError::config("N must be positive"));
            }
            if !(s > 1.0) || n > max_kernel_size(s) {
                return Err(CliError::config(format!("N = {n} needs N ≤ ⌊s−1⌋, but s = {s}")));
            }
        }
        if let Some(nmax) = self.nmax {
            if self.nmin > nmax {
                return Err(CliError::config("nmin exceeds nmax"));
            }
            for n in self.nmin..=nmax {
                let s = self.srule.s_for(n);
                check_degree(n, s)
                    .map_err(|_| CliError::config(format!("degree {n} needs n ≤ s − 2, but s = {s}")))?;
            }
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !finite(&self.theta) || !finite(&self.ell) || self.ell.iter().any(|&l| !(0.0..=1.0).contains(&l)) {
            return Err(CliError::config("theta must be finite and ell must lie in [0, 1]"));
        }
        if self.radius.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(CliError::config("radius must be finite and non-negative"));
        }
        if self.levels.iter().any(|&c| !(c >= 1.0 && c.is_finite())) {
            return Err(CliError::config("levels must be finite and at least 1"));
        }
        if self.grid < 2 || self.bins == 0 || self.samples == 0 {
            return Err(CliError::config("grid needs at least 2 points; bins and samples must be positive"));
        }
        if !(self.rmax > 0.0 && self.rmax.is_finite()) || !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(CliError::config("rmax and extent must be positive and finite"));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(CliError::config("tol must be positive"));
            }
        }
        if matches!(self.nodes_angular, Some(0)) || matches!(self.nodes_radial, Some(0)) {
            return Err(CliError::config("node counts must be positive"));
        }
        Ok(())
    }

    /// Serialises every key; `from_text(to_text())` returns `self`.
    pub fn to_text(&self) -> String {
        let mut t = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(t, "{k}={v}");
        };
        match &self.domain {
            DomainSpec::Disk => put("domain", "disk".into()),
            DomainSpec::Ellipse { q } => {
                put("domain", "ellipse".into());
                put("q", q.to_string());
            }
            DomainSpec::Custom(map) => {
                put("domain", "custom".into());
                put("cap", map.capacity().to_string());
                put("coeffs", format_list(map.laurent_coeffs(), |c| format_complex(*c)));
            }
        }
        put("nmin", self.nmin.to_string());
        if let Some(n) = self.nmax {
            put("nmax", n.to_string());
        }
        put("N", format_list(&self.sizes, |n| n.to_string()));
        let (rule, s) = self.srule.fields();
        put("srule", rule.into());
        if let Some(s) = s {
            put("s", s.to_string());
        }
        let reals = |xs: &[f64]| format_list(xs, |x| x.to_string());
        let complexes = |xs: &[C64]| format_list(xs, |z| format_complex(*z));
        put("ell", reals(&self.ell));
        put("theta", reals(&self.theta));
        put("a", complexes(&self.a));
        put("b", complexes(&self.b));
        put("weighted", self.weighted.to_string());
        put("seed", self.seed.to_string());
        if let Some(p) = &self.out {
            put("out", p.display().to_string());
        }
        if let Some(p) = &self.cache {
            put("cache", p.display().to_string());
        }
        if let Some(n) = self.nodes_angular {
            put("nodes-angular", n.to_string());
        }
        if let Some(n) = self.nodes_radial {
            put("nodes-radial", n.to_string());
        }
        if let Some(x) = self.tol {
            put("tol", x.to_string());
        }
        put("samples", self.samples.to_string());
        put("center", format_complex(self.center));
        put("radius", reals(&self.radius));
        put("levels", reals(&self.levels));
        put("grid", self.grid.to_string());
        put("extent", self.extent.to_string());
        put("bins", self.bins.to_string());
        put("rmax", self.rmax.to_string());
        t
    }

    /// `ℓ` for a kernel of size `n`: the single explicit value if given,
    /// otherwise the rule's.
    pub fn ell_for(&self, n: usize) -> Result<f64, CliError> {
        match self.ell.as_slice() {
            [] => Ok(self.srule.ell(n)),
            [l] => Ok(*l),
            _ => Err(CliError::config("this command takes a single ell")),
        }
    }

    /// `ℓ` values for the correlation plots; all five Appendix values when
    /// none are given.
    pub fn ell_list(&self) -> Vec<f64> {
        if self.ell.is_empty() {
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        } else {
            self.ell.clone()
        }
    }
}
