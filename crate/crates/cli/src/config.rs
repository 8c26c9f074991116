use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use minorkern::{EnsembleKind, EnsembleSpec};
use serde::{Deserialize, Serialize};

use crate::error::CmdError;

pub const SEED_ENV: &str = "MINORKERN_SEED";
pub const DEFAULT_SEED: u64 = 1;

/// Evenly spaced positions `min, min + step, ...` up to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.min + i as f64 * self.step).collect()
    }
}

pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected min:max:step, got '{s}'"));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    let g = GridSpec {
        min: num(parts[0])?,
        max: num(parts[1])?,
        step: num(parts[2])?,
    };
    if !g.min.is_finite() || !g.max.is_finite() || g.max < g.min {
        return Err(format!("need finite min <= max, got {}:{}", g.min, g.max));
    }
    if !(g.step > 0.0) || !g.step.is_finite() {
        return Err(format!("step must be positive, got {}", g.step));
    }
    if (g.max - g.min) / g.step > 1e7 {
        return Err("grid has more than 10^7 points".into());
    }
    Ok(g)
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|e| format!("'{}': {e}", p.trim())))
        .collect()
}

pub fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let v: f64 = value.trim().parse().map_err(|e| format!("'{value}': {e}"))?;
    if !(v > 0.0) {
        return Err(format!("tolerance {name} must be positive"));
    }
    Ok((name.trim().to_string(), v))
}

/// Settings shared by every subcommand. Stored as JSON; fields appear in
/// declaration order and tolerances sorted by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

/// Values given on the command line; `None` leaves the file value alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kind: Option<EnsembleKind>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<usize>,
    pub species: Option<Vec<usize>>,
    pub grid: Option<GridSpec>,
    pub seed: Option<u64>,
    pub draws: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub tolerances: Vec<(String, f64)>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CmdError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CmdError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CmdError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), CmdError> {
        std::fs::write(path, self.to_json()).map_err(CmdError::from)
    }

    pub fn apply(&mut self, o: Overrides) {
        if o.kind.is_some() || o.a.is_some() || o.b.is_some() {
            let mut e = self.ensemble.unwrap_or_else(EnsembleSpec::gaussian);
            if let Some(k) = o.kind {
                e.kind = k;
            }
            if let Some(a) = o.a {
                e.a = a;
            }
            if let Some(b) = o.b {
                e.b = b;
            }
            self.ensemble = Some(e);
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if o.$f.is_some() { self.$f = o.$f; } )* };
        }
        take!(n, species, grid, seed, draws, out, threads);
        self.tolerances.extend(o.tolerances);
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec, CmdError> {
        let e = self.ensemble.unwrap_or_else(EnsembleSpec::gaussian);
        e.validate()?;
        Ok(e)
    }

    pub fn require_n(&self) -> Result<usize, CmdError> {
        self.n.ok_or_else(|| CmdError::Usage("the --N option is required".into()))
    }

    /// Flag or config value, then `MINORKERN_SEED`, then the default.
    pub fn resolved_seed(&self) -> Result<u64, CmdError> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|e| CmdError::Usage(format!("{SEED_ENV}='{v}': {e}"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    pub fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    pub fn tolerance(&self, name: &str) -> Option<f64> {
        self.tolerances.get(name).copied()
    }

    /// Rejects tolerance names the current subcommand does not read.
    pub fn check_tolerances(&self, known: &[&str]) -> Result<(), CmdError> {
        match self.tolerances.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(CmdError::Usage(format!(
                "unknown tolerance '{k}' (accepted here: {})",
                if known.is_empty() { "none".to_string() } else { known.join(", ") }
            ))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        let g = parse_grid("0:1:0.25").unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0:1").unwrap().points(), vec![0.0]);
        assert_eq!(parse_grid("-3:3:0.1").unwrap().points().len(), 61);
    }

    #[test]
    fn malformed_grids_are_rejected() {
        for bad in ["0:1", "1:0:0.1", "0:1:0", "0:1:-1", "a:1:0.1", "0:inf:1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_override_file_values() {
        let mut cfg = RunConfig {
            ensemble: Some(EnsembleSpec::laguerre(2.0).unwrap()),
            n: Some(5),
            seed: Some(9),
            ..Default::default()
        };
        cfg.apply(Overrides {
            a: Some(0.5),
            n: Some(3),
            tolerances: vec![("sup-norm".into(), 0.03)],
            ..Default::default()
        });
        let e = cfg.ensemble.unwrap();
        assert_eq!((e.kind, e.a), (EnsembleKind::Laguerre, 0.5));
        assert_eq!(cfg.n, Some(3));
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.tolerance("sup-norm"), Some(0.03));
    }

    #[test]
    fn serialization_round_trips() {
        let mut cfg = RunConfig {
            subcommand: Some("density".into()),
            ensemble: Some(EnsembleSpec::jacobi(0.5, 1.5).unwrap()),
            n: Some(4),
            species: Some(vec![1, 3]),
            grid: Some(parse_grid("0:1:0.125").unwrap()),
            seed: Some(17),
            draws: Some(1000),
            out: Some("x.csv".into()),
            threads: Some(2),
            ..Default::default()
        };
        cfg.tolerances.insert("zeta".into(), 1.0);
        cfg.tolerances.insert("alpha".into(), 2.0);
        let text = cfg.to_json();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json(), text);
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
    }
}
