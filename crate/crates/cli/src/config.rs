use std::fs;
use std::path::{Path, PathBuf};

use dwt_core::asymptotics::FamilyTemplate;
use dwt_core::nonselection::{StageParams, Thresholds};
use dwt_core::potential::PotentialSpec;
use dwt_core::spectrum::{DEFAULT_NMAX, DEFAULT_TOL};
use serde::Deserialize;

use crate::error::{Failure, Outcome};

/// Inclusive arithmetic range `start, start + step, ..., <= stop`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Either an explicit list of values or a range.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range(Range),
}

impl Axis {
    pub fn values(&self, name: &str) -> Outcome<Vec<f64>> {
        match self {
            Axis::Values(v) => Ok(v.clone()),
            Axis::Range(r) => {
                if !(r.step > 0.0 && r.step.is_finite() && r.start.is_finite() && r.stop.is_finite()) {
                    return Err(invalid(format!("{name}: range needs finite bounds and a positive step")));
                }
                if r.stop < r.start {
                    return Err(invalid(format!("{name}: range stop {} is below start {}", r.stop, r.start)));
                }
                // index-based so that rounding never drops the endpoint
                let count = ((r.stop - r.start) / r.step + 1e-9).floor() as usize + 1;
                if count > 1_000_000 {
                    return Err(invalid(format!("{name}: range has {count} points")));
                }
                Ok((0..count).map(|i| r.start + i as f64 * r.step).collect())
            }
        }
    }
}

/// Everything one invocation needs. Paths are relative to the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: Option<PathBuf>,
    pub betas: Option<Axis>,
    pub nmax: Option<usize>,
    pub tol: Option<f64>,
    pub kappa_tol: Option<f64>,
    pub words: Option<Vec<String>>,
    /// Class-table length for barrier and sub-action output.
    pub len: Option<usize>,
    pub max_iter: Option<usize>,
    pub depth: Option<usize>,
    pub max_blocks: Option<usize>,
    pub schedule: Option<PathBuf>,
    pub thresholds: Option<Thresholds>,
    pub family: Option<FamilyTemplate>,
    pub s: Option<Axis>,
    pub t: Option<Axis>,
    #[serde(skip)]
    base: PathBuf,
}

fn invalid(msg: String) -> Failure {
    Failure::Validation(msg)
}

pub fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> Outcome<RunConfig> {
        let text = read_text(path)?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Outcome<()> {
        if let Some(tol) = self.tol {
            if !(1e-15..=1e-3).contains(&tol) {
                return Err(invalid(format!("tol {tol} outside [1e-15, 1e-3]")));
            }
        }
        if let Some(tol) = self.kappa_tol {
            if !(0.0..=1e-2).contains(&tol) {
                return Err(invalid(format!("kappa_tol {tol} outside [0, 1e-2]")));
            }
        }
        if let Some(n) = self.nmax {
            if !(1..=100_000).contains(&n) {
                return Err(invalid(format!("nmax {n} outside 1..=100000")));
            }
        }
        if let Some(n) = self.len {
            if !(1..=100_000).contains(&n) {
                return Err(invalid(format!("len {n} outside 1..=100000")));
            }
        }
        if self.max_iter == Some(0) {
            return Err(invalid("max_iter must be positive".into()));
        }
        if let Some(b) = self.max_blocks {
            if !(1..=4).contains(&b) {
                return Err(invalid(format!("max_blocks {b} outside 1..=4")));
            }
        }
        self.betas()?;
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn potential_spec(&self) -> Outcome<PotentialSpec> {
        let path = self.potential.as_ref().ok_or_else(|| invalid("config has no potential file".into()))?;
        let path = self.resolve(path);
        let text = read_text(&path)?;
        PotentialSpec::from_json(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn potential(&self) -> Outcome<dwt_core::ReducedPotential> {
        Ok(self.potential_spec()?.to_reduced()?)
    }

    /// The β values, each positive and finite. Empty when none are given.
    pub fn betas(&self) -> Outcome<Vec<f64>> {
        let Some(axis) = &self.betas else { return Ok(Vec::new()) };
        let betas = axis.values("betas")?;
        if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(invalid(format!("beta {b} is not positive and finite")));
        }
        Ok(betas)
    }

    pub fn require_betas(&self) -> Outcome<Vec<f64>> {
        let betas = self.betas()?;
        if betas.is_empty() {
            return Err(invalid("config needs at least one beta".into()));
        }
        Ok(betas)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn nmax(&self) -> usize {
        self.nmax.unwrap_or(DEFAULT_NMAX)
    }

    pub fn len(&self) -> usize {
        self.len.unwrap_or(16)
    }

    /// The configured words, or every word of length `1..=default_len`.
    pub fn words(&self, default_len: usize) -> Vec<String> {
        match &self.words {
            Some(w) => w.clone(),
            None => all_words(default_len),
        }
    }

    pub fn schedule(&self) -> Outcome<StageParams> {
        let path = self.schedule.as_ref().ok_or_else(|| invalid("config has no schedule file".into()))?;
        let path = self.resolve(path);
        Ok(StageParams::from_json(&read_text(&path)?)?)
    }

    pub fn grid(&self) -> Outcome<(&FamilyTemplate, Vec<f64>, Vec<f64>)> {
        let family = self.family.as_ref().ok_or_else(|| invalid("config has no family".into()))?;
        let s = self.s.as_ref().ok_or_else(|| invalid("config has no s axis".into()))?.values("s")?;
        let t = self.t.as_ref().ok_or_else(|| invalid("config has no t axis".into()))?.values("t")?;
        Ok((family, s, t))
    }
}

pub fn all_words(max_len: usize) -> Vec<String> {
    (1..=max_len)
        .flat_map(|n| (0..1u32 << n).map(move |bits| (0..n).rev().map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect()))
        .collect()
}
