//! Flag values merged with an optional flat JSON config file.

use std::collections::BTreeMap;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command};
use serde::Serialize;

use crate::error::{config_err, CliResult};

/// Where a parameter value came from, in increasing priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Default,
    Env,
    File,
    Flag,
}

/// String-valued parameters of one command.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Params {
    values: BTreeMap<String, (String, Origin)>,
}

/// Keys of a config file may use `_` or `-`.
fn normalize(key: &str) -> String {
    key.replace('_', "-")
}

impl Params {
    /// Merges `matches` (the leaf subcommand's matches, whose arguments are
    /// listed by `cmd`) with the config file named by the `config` flag.
    pub fn collect(cmd: &Command, matches: &ArgMatches) -> CliResult<Params> {
        let mut values = BTreeMap::new();
        let known: Vec<String> = cmd.get_arguments().map(|a| a.get_id().to_string()).collect();
        for id in &known {
            let Ok(Some(v)) = matches.try_get_one::<String>(id) else { continue };
            let origin = match matches.value_source(id) {
                Some(ValueSource::CommandLine) => Origin::Flag,
                Some(ValueSource::EnvVariable) => Origin::Env,
                _ => Origin::Default,
            };
            values.insert(id.clone(), (v.clone(), origin));
        }
        if let Some(path) = values.get("config").map(|v| v.0.clone()) {
            for (key, value) in read_config(Path::new(&path))? {
                let key = normalize(&key);
                if key == "config" || !known.contains(&key) {
                    return Err(config_err(format!("config key '{key}' is not accepted by '{}'", cmd.get_name())));
                }
                match values.get(&key) {
                    Some((_, Origin::Flag)) => {}
                    _ => {
                        values.insert(key, (value, Origin::File));
                    }
                }
            }
        }
        Ok(Params { values })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Params {
        Params { values: pairs.into_iter().map(|(k, v)| (k.to_string(), (v.to_string(), Origin::Flag))).collect() }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|v| v.0.as_str())
    }

    pub fn origin(&self, key: &str) -> Option<Origin> {
        self.values.get(key).map(|v| v.1)
    }

    /// All values, for the run manifest.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.values.iter().filter(|(k, _)| k.as_str() != "config").map(|(k, v)| (k.clone(), v.0.clone())).collect()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        self.get(key).map_or(Ok(default), |s| parse_f64(key, s))
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        parse_f64(key, self.get(key).ok_or_else(|| config_err(format!("missing required parameter '{key}'")))?)
    }

    pub fn u64_or(&self, key: &str, default: u64) -> CliResult<u64> {
        self.get(key).map_or(Ok(default), |s| parse_u64(key, s))
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        self.get(key).map_or(Ok(default.to_vec()), |s| parse_grid(key, s))
    }

    pub fn grid_or(&self, key: &str, default: &str) -> CliResult<Vec<f64>> {
        parse_grid(key, self.get(key).unwrap_or(default))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    /// Linear SNR from `snr-db` or `snr-linear`; the two are exclusive
    /// unless one comes from a flag, which then wins.
    pub fn snr_or(&self, default_db: f64) -> CliResult<f64> {
        let db = self.values.get("snr-db");
        let lin = self.values.get("snr-linear");
        let pick_db = match (db, lin) {
            (Some(d), Some(l)) if d.1 == l.1 || d.1.max(l.1) != Origin::Flag => {
                return Err(config_err("snr-db and snr-linear are mutually exclusive"));
            }
            (Some(d), Some(l)) => d.1 > l.1,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => return Ok(10f64.powf(default_db / 10.0)),
        };
        if pick_db {
            Ok(10f64.powf(self.f64("snr-db")? / 10.0))
        } else {
            let p = self.f64("snr-linear")?;
            if !(p > 0.0) {
                return Err(config_err(format!("snr-linear = {p} must be positive")));
            }
            Ok(p)
        }
    }
}

fn read_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
    let json: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| config_err(format!("config {} is not valid JSON: {e}", path.display())))?;
    let obj = json.as_object().ok_or_else(|| config_err("config must be a flat JSON object"))?;
    obj.iter()
        .map(|(k, v)| {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                _ => return Err(config_err(format!("config key '{k}' must be a string or number"))),
            };
            Ok((k.clone(), s))
        })
        .collect()
}

pub fn parse_f64(key: &str, s: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_err(format!("'{key}' must be a decimal number, got '{s}'")))
}

pub fn parse_u64(key: &str, s: &str) -> CliResult<u64> {
    let t = s.trim();
    t.parse::<u64>()
        .ok()
        .or_else(|| t.parse::<f64>().ok().filter(|x| *x >= 0.0 && x.fract() == 0.0 && *x < 2f64.powi(63)).map(|x| x as u64))
        .ok_or_else(|| config_err(format!("'{key}' must be a non-negative integer, got '{s}'")))
}

/// Parses `start:stop:step`, a comma-separated list or a single value into
/// a non-empty, strictly increasing grid.
pub fn parse_grid(key: &str, s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h) = (parse_f64(key, start)?, parse_f64(key, stop)?, parse_f64(key, step)?);
            if !(h > 0.0) || b < a {
                return Err(config_err(format!("grid '{key}' = '{s}' needs step > 0 and stop >= start")));
            }
            let count = ((b - a) / h + 1e-9).floor() as u64 + 1;
            if count > 1_000_000 {
                return Err(config_err(format!("grid '{key}' has {count} points")));
            }
            // Round away accumulated binary noise so 0.3 prints as 0.3.
            (0..count).map(|i| clean(a + i as f64 * h)).collect()
        }
        [single] => single.split(',').map(|v| parse_f64(key, v)).collect::<CliResult<Vec<_>>>()?,
        _ => return Err(config_err(format!("grid '{key}' = '{s}' is not start:stop:step"))),
    };
    if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_err(format!("grid '{key}' = '{s}' must be non-empty and strictly increasing")));
    }
    Ok(values)
}

fn clean(x: f64) -> f64 {
    format!("{x:.12e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("rf", "0:0.9:0.01").unwrap();
        assert_eq!(g.len(), 91);
        assert_eq!(g[30], 0.3);
        assert_eq!(g[90], 0.9);
        assert_eq!(parse_grid("b", "5").unwrap(), vec![5.0]);
        assert_eq!(parse_grid("b", "1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        for bad in ["1:0:0.1", "0:1:0", "0:1", "2,1", "x", "0:1:-1"] {
            assert!(parse_grid("g", bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn snr_sources() {
        let p = Params::from_pairs([("snr-db", "20")]);
        assert!((p.snr_or(5.0).unwrap() - 100.0).abs() < 1e-9);
        let p = Params::from_pairs([("snr-db", "20"), ("snr-linear", "3")]);
        assert!(p.snr_or(5.0).is_err());
        let mut p = Params::from_pairs([("snr-linear", "3")]);
        p.values.insert("snr-db".into(), ("20".into(), Origin::File));
        assert_eq!(p.snr_or(5.0).unwrap(), 3.0);
    }
}
