//! Run configuration: a sectioned TOML file covering the sector, the data
//! profile, the quadrature budget, the scan lists, and run plumbing, every
//! value overridable from the command line. The parsed struct is embedded
//! verbatim in each run manifest so a run can be replayed from its output
//! directory alone.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use currentlab::{BoundaryData, EpsilonProfile, Hyperbolicity, QuadratureSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub hyperbolicity: SectorSection,
    pub profile: ProfileSection,
    pub quadrature: QuadSection,
    pub scan: ScanSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorSection {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSection {
    /// "power" or "log_power".
    pub kind: String,
    /// Exponent for the power profile.
    pub p: f64,
    /// Exponent for the log-power profile.
    pub alpha: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSection {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_subdivisions: u32,
    pub tail_cutoff_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Bidisc radii, strictly decreasing in (0, 1].
    pub deltas: Vec<f64>,
    /// Exhaustion heights, strictly increasing and positive.
    pub s_values: Vec<f64>,
    /// Support cutoff for the edge integrals.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub out_dir: PathBuf,
    /// Worker threads; 0 keeps the library default.
    pub threads: usize,
    /// Seed for the sampling-based spot checks.
    pub seed: u64,
}

impl Default for SectorSection {
    fn default() -> Self {
        SectorSection { a: -1.0, b: 1.0 }
    }
}

impl Default for ProfileSection {
    fn default() -> Self {
        ProfileSection {
            kind: "power".into(),
            p: 1.0,
            alpha: 1.0,
            amplitude: 10.0,
        }
    }
}

impl Default for QuadSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadSection {
            tol_rel: q.tol_rel,
            tol_abs: q.tol_abs,
            max_subdivisions: q.max_subdivisions,
            tail_cutoff_t: q.tail_cutoff_t,
        }
    }
}

impl Default for ScanSection {
    fn default() -> Self {
        ScanSection {
            deltas: vec![0.5, 0.3, 0.1, 0.05, 0.02],
            s_values: vec![5.0, 10.0, 20.0, 40.0, 80.0],
            lambda: 1.0,
        }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            out_dir: PathBuf::from("runs"),
            threads: 0,
            seed: 42,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hyperbolicity: SectorSection::default(),
            profile: ProfileSection::default(),
            quadrature: QuadSection::default(),
            scan: ScanSection::default(),
            run: RunSection::default(),
        }
    }
}

/// Command-line overrides applied on top of the file values.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// "power", "power:0.5", "log_power:1.0", and so on.
    pub profile: Option<String>,
    pub amplitude: Option<f64>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    pub fn apply(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(out) = &ov.out {
            self.run.out_dir = out.clone();
        }
        if let Some(a) = ov.a {
            self.hyperbolicity.a = a;
        }
        if let Some(b) = ov.b {
            self.hyperbolicity.b = b;
        }
        if let Some(choice) = &ov.profile {
            let (kind, param) = match choice.split_once(':') {
                None => (choice.as_str(), None),
                Some((k, v)) => {
                    let x: f64 = v
                        .parse()
                        .with_context(|| format!("profile parameter in {choice:?}"))?;
                    (k, Some(x))
                }
            };
            match kind {
                "power" => {
                    self.profile.kind = "power".into();
                    if let Some(x) = param {
                        self.profile.p = x;
                    }
                }
                "log_power" => {
                    self.profile.kind = "log_power".into();
                    if let Some(x) = param {
                        self.profile.alpha = x;
                    }
                }
                other => bail!("unknown profile kind {other:?} (expected power or log_power)"),
            }
        }
        if let Some(amp) = ov.amplitude {
            self.profile.amplitude = amp;
        }
        if let Some(t) = ov.threads {
            self.run.threads = t;
        }
        if let Some(s) = ov.seed {
            self.run.seed = s;
        }
        Ok(())
    }

    /// The sector, with a mirrored exponent folded to the upper half plane.
    /// Returns the note to record when the flip happens: a + ib with b < 0
    /// generates the conjugate foliation, whose leaves have the same moduli
    /// as those of a + i|b| after reflecting the leaf coordinate.
    pub fn sector(&self) -> Result<(Hyperbolicity, Option<String>)> {
        let (a, b) = (self.hyperbolicity.a, self.hyperbolicity.b);
        let (bb, note) = if b < 0.0 {
            (
                -b,
                Some(format!(
                    "b = {b} mirrored to {} (conjugate foliation, identical moduli)",
                    -b
                )),
            )
        } else {
            (b, None)
        };
        let h = Hyperbolicity::new(a, bb)?;
        Ok((h, note))
    }

    pub fn epsilon(&self) -> Result<EpsilonProfile> {
        let amp = self.profile.amplitude;
        let ep = match self.profile.kind.as_str() {
            "power" => EpsilonProfile::power(self.profile.p, amp)?,
            "log_power" => EpsilonProfile::log_power(self.profile.alpha, amp)?,
            other => bail!("unknown profile kind {other:?} (expected power or log_power)"),
        };
        Ok(ep)
    }

    pub fn boundary(&self, gamma: f64) -> Result<BoundaryData> {
        Ok(BoundaryData::profile(self.epsilon()?, gamma)?)
    }

    pub fn quad(&self) -> Result<QuadratureSpec> {
        let q = QuadratureSpec {
            tol_rel: self.quadrature.tol_rel,
            tol_abs: self.quadrature.tol_abs,
            max_subdivisions: self.quadrature.max_subdivisions,
            tail_cutoff_t: self.quadrature.tail_cutoff_t,
        };
        q.validate()?;
        Ok(q)
    }

    /// Full validation pass before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.sector()?;
        self.epsilon()?;
        self.quad()?;
        let d = &self.scan.deltas;
        if d.is_empty() {
            bail!("scan.deltas must not be empty");
        }
        for &x in d {
            if !(x > 0.0 && x <= 1.0) {
                bail!("scan.deltas entries must lie in (0, 1], got {x}");
            }
        }
        if !d.windows(2).all(|w| w[1] < w[0]) {
            bail!("scan.deltas must be strictly decreasing");
        }
        let s = &self.scan.s_values;
        if s.is_empty() {
            bail!("scan.s_values must not be empty");
        }
        for &x in s {
            if !(x.is_finite() && x > 0.0) {
                bail!("scan.s_values entries must be positive, got {x}");
            }
        }
        if !s.windows(2).all(|w| w[1] > w[0]) {
            bail!("scan.s_values must be strictly increasing");
        }
        if !(self.scan.lambda.is_finite() && self.scan.lambda > 0.0) {
            bail!("scan.lambda must be positive, got {}", self.scan.lambda);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn overrides_reshape_the_profile() {
        let mut cfg = RunConfig::default();
        cfg.apply(&Overrides {
            a: Some(0.0),
            profile: Some("log_power:2.5".into()),
            amplitude: Some(3.0),
            seed: Some(7),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(cfg.hyperbolicity.a, 0.0);
        assert_eq!(cfg.profile.kind, "log_power");
        assert_eq!(cfg.profile.alpha, 2.5);
        assert_eq!(cfg.profile.amplitude, 3.0);
        assert_eq!(cfg.run.seed, 7);
        cfg.validate().unwrap();

        let bad = cfg.apply(&Overrides {
            profile: Some("spline".into()),
            ..Overrides::default()
        });
        assert!(bad.is_err());
    }

    #[test]
    fn negative_b_is_mirrored_with_a_note() {
        let mut cfg = RunConfig::default();
        cfg.hyperbolicity.b = -2.0;
        let (h, note) = cfg.sector().unwrap();
        assert_eq!(h.b, 2.0);
        assert!(note.unwrap().contains("mirrored"));
    }

    #[test]
    fn scan_lists_are_checked() {
        let mut cfg = RunConfig::default();
        cfg.scan.deltas = vec![0.5, 0.5];
        assert!(cfg.validate().is_err());
        cfg.scan.deltas = vec![0.5, 1.2];
        assert!(cfg.validate().is_err());
        cfg.scan.deltas = vec![0.5, 0.1];
        cfg.scan.s_values = vec![5.0, 4.0];
        assert!(cfg.validate().is_err());
    }
}
