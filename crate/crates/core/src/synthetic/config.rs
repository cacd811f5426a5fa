//! Plain-text scenario files.
//!
//! ```text
//! # comment
//! n_users = 300
//! n_items = 200
//! scale = 1 2 3 4 5
//! alpha = 0.1 0.2 0.4 0.2 0.1
//! beta = 0.1 0.15 0.45 0.25 0.05
//! eta = 0.2
//! outlier_rate = 0.1
//! seed = 0
//! delta = per-pair        # or global
//! mask = bernoulli        # or exact-count
//! note = free text, may repeat
//! mu 1                    # level 1: K lines of L numbers
//! 0.65 0.45 ...
//! ```
//!
//! Floats are written in shortest round-trip form, so a file read back gives
//! bit-identical values. `mu` blocks are re-validated on load (every `(k, l)`
//! vector must sum to one).

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array3;

use super::{DeltaMode, MaskMode, SimScenario};
use crate::error::{Bm2Error, Result};
use crate::model::{BlockArray, RatingScale};

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn scenario_to_string(sc: &SimScenario) -> String {
    let mut out = String::from("# bm2 synthetic scenario\n");
    let _ = writeln!(out, "n_users = {}", sc.n_users);
    let _ = writeln!(out, "n_items = {}", sc.n_items);
    let _ = writeln!(out, "scale = {}", join(sc.scale.values().iter().copied()));
    let _ = writeln!(out, "alpha = {}", join(sc.alpha.iter().copied()));
    let _ = writeln!(out, "beta = {}", join(sc.beta.iter().copied()));
    let _ = writeln!(out, "eta = {}", sc.eta);
    let _ = writeln!(out, "outlier_rate = {}", sc.outlier_rate);
    let _ = writeln!(out, "seed = {}", sc.seed);
    let delta = match sc.delta {
        DeltaMode::PerPair => "per-pair",
        DeltaMode::Global => "global",
    };
    let _ = writeln!(out, "delta = {delta}");
    let mask = match sc.mask {
        MaskMode::Bernoulli => "bernoulli",
        MaskMode::ExactCount => "exact-count",
    };
    let _ = writeln!(out, "mask = {mask}");
    for note in &sc.notes {
        let _ = writeln!(out, "note = {}", note.replace('\n', " "));
    }
    for s in 0..sc.levels() {
        let _ = writeln!(out, "mu {}", s + 1);
        for k in 0..sc.k() {
            let _ = writeln!(out, "{}", join((0..sc.l()).map(|l| sc.mu.get(k, l, s))));
        }
    }
    out
}

pub fn write_scenario(path: impl AsRef<Path>, sc: &SimScenario) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_string(sc)).map_err(|e| Bm2Error::io(path, e))
}

pub fn read_scenario(path: impl AsRef<Path>) -> Result<SimScenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Bm2Error::io(path, e))?;
    parse(&text, path)
}

pub fn scenario_from_str(text: &str) -> Result<SimScenario> {
    parse(text, Path::new("<scenario>"))
}

#[derive(Default)]
struct Fields {
    n_users: Option<usize>,
    n_items: Option<usize>,
    scale: Option<Vec<f64>>,
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
    eta: Option<f64>,
    outlier_rate: Option<f64>,
    seed: Option<u64>,
    delta: Option<DeltaMode>,
    mask: Option<MaskMode>,
    notes: Vec<String>,
    // (level, rows)
    mu: Vec<(usize, Vec<Vec<f64>>)>,
}

fn parse(text: &str, path: &Path) -> Result<SimScenario> {
    let err = |line: usize, message: String| Bm2Error::Parse { path: path.to_path_buf(), line, message };
    let floats = |line: usize, s: &str| -> Result<Vec<f64>> {
        s.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(line, format!("not a number: {t:?}"))))
            .collect()
    };

    let mut f = Fields::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("mu ") {
            let level: usize = rest.trim().parse().map_err(|_| err(lineno, format!("bad mu header {line:?}")))?;
            f.mu.push((level, Vec::new()));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            let (_, rows) = f.mu.last_mut().ok_or_else(|| err(lineno, format!("unexpected line {line:?}")))?;
            rows.push(floats(lineno, line)?);
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let int = |v: &str| v.parse::<u64>().map_err(|_| err(lineno, format!("{key}: not an integer: {v:?}")));
        let real = |v: &str| v.parse::<f64>().map_err(|_| err(lineno, format!("{key}: not a number: {v:?}")));
        match key {
            "n_users" => f.n_users = Some(int(value)? as usize),
            "n_items" => f.n_items = Some(int(value)? as usize),
            "scale" => f.scale = Some(floats(lineno, value)?),
            "alpha" => f.alpha = Some(floats(lineno, value)?),
            "beta" => f.beta = Some(floats(lineno, value)?),
            "eta" => f.eta = Some(real(value)?),
            "outlier_rate" => f.outlier_rate = Some(real(value)?),
            "seed" => f.seed = Some(int(value)?),
            "delta" => {
                f.delta = Some(match value {
                    "per-pair" => DeltaMode::PerPair,
                    "global" => DeltaMode::Global,
                    other => return Err(err(lineno, format!("unknown delta mode {other:?}"))),
                })
            }
            "mask" => {
                f.mask = Some(match value {
                    "bernoulli" => MaskMode::Bernoulli,
                    "exact-count" => MaskMode::ExactCount,
                    other => return Err(err(lineno, format!("unknown mask mode {other:?}"))),
                })
            }
            "note" => f.notes.push(value.to_string()),
            other => return Err(err(lineno, format!("unknown key {other:?}"))),
        }
    }

    let end = text.lines().count();
    let missing = |name: &str| err(end, format!("missing {name}"));
    let alpha = f.alpha.ok_or_else(|| missing("alpha"))?;
    let beta = f.beta.ok_or_else(|| missing("beta"))?;
    let scale = RatingScale::new(f.scale.ok_or_else(|| missing("scale"))?)?;
    let (k, l, s) = (alpha.len(), beta.len(), scale.len());
    if f.mu.len() != s {
        return Err(err(end, format!("expected {s} mu blocks, found {}", f.mu.len())));
    }
    let mut weights = Array3::zeros((k, l, s));
    for (level, rows) in &f.mu {
        if *level == 0 || *level > s {
            return Err(err(end, format!("mu level {level} outside 1..={s}")));
        }
        if rows.len() != k || rows.iter().any(|r| r.len() != l) {
            return Err(err(end, format!("mu {level} must be {k} rows of {l} values")));
        }
        for (a, row) in rows.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                weights[[a, b, level - 1]] = v;
            }
        }
    }
    let sc = SimScenario {
        n_users: f.n_users.ok_or_else(|| missing("n_users"))?,
        n_items: f.n_items.ok_or_else(|| missing("n_items"))?,
        alpha,
        beta,
        mu: BlockArray::new(weights)?,
        scale,
        eta: f.eta.ok_or_else(|| missing("eta"))?,
        outlier_rate: f.outlier_rate.unwrap_or(SimScenario::DEFAULT_OUTLIER_RATE),
        seed: f.seed.unwrap_or(0),
        delta: f.delta.unwrap_or(DeltaMode::PerPair),
        mask: f.mask.unwrap_or(MaskMode::Bernoulli),
        notes: f.notes,
    };
    sc.validate()?;
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::builtin_scenario;

    #[test]
    fn builtin_scenarios_round_trip_exactly() {
        for k in [5, 7, 9] {
            let mut sc = builtin_scenario(k).unwrap().with_seed(1234);
            sc.mask = MaskMode::ExactCount;
            let text = scenario_to_string(&sc);
            let back = scenario_from_str(&text).unwrap();
            assert_eq!(back, sc);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k5.txt");
        let sc = builtin_scenario(5).unwrap();
        write_scenario(&path, &sc).unwrap();
        assert_eq!(read_scenario(&path).unwrap(), sc);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "n_users = 3\nn_items = x\n";
        match scenario_from_str(text) {
            Err(Bm2Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let bad_mode = scenario_to_string(&builtin_scenario(5).unwrap()).replace("per-pair", "sometimes");
        assert!(matches!(scenario_from_str(&bad_mode), Err(Bm2Error::Parse { .. })));
    }

    #[test]
    fn unnormalised_mu_is_rejected() {
        let text = scenario_to_string(&builtin_scenario(5).unwrap());
        let broken = text.replacen("mu 1\n0.65", "mu 1\n0.95", 1);
        assert_ne!(broken, text);
        assert!(scenario_from_str(&broken).is_err());
    }
}
