//! File formats: JSON sequences and Verblunsky coefficients, the daisy TOML
//! configuration, and CSV tables.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::daisy::{DaisyParams, GrowthRow, Schedule};
use crate::error::{NlftError, Result};
use crate::laurent::LaurentPoly;
use crate::nlft::{ComplexSequence, NlftPair};
use crate::opuc::VerblunskyCoeffs;

/// `{"offset": int, "entries": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub offset: i64,
    pub entries: Vec<[f64; 2]>,
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

fn to_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

impl From<&ComplexSequence> for SequenceFile {
    fn from(f: &ComplexSequence) -> Self {
        SequenceFile { offset: f.offset(), entries: to_pairs(f.entries()) }
    }
}

impl TryFrom<SequenceFile> for ComplexSequence {
    type Error = NlftError;

    fn try_from(f: SequenceFile) -> Result<Self> {
        ComplexSequence::new(f.offset, to_complex(&f.entries))
    }
}

pub fn parse_sequence(json: &str) -> Result<ComplexSequence> {
    let file: SequenceFile = serde_json::from_str(json).map_err(|e| NlftError::Format(e.to_string()))?;
    file.try_into()
}

pub fn sequence_json(f: &ComplexSequence) -> String {
    serde_json::to_string_pretty(&SequenceFile::from(f)).expect("plain data")
}

/// JSON array of `[re, im]`.
pub fn parse_gamma(json: &str) -> Result<VerblunskyCoeffs> {
    let v: Vec<[f64; 2]> = serde_json::from_str(json).map_err(|e| NlftError::Format(e.to_string()))?;
    VerblunskyCoeffs::new(to_complex(&v))
}

pub fn gamma_json(g: &VerblunskyCoeffs) -> String {
    serde_json::to_string_pretty(&to_pairs(g.gamma())).expect("plain data")
}

/// A Laurent polynomial as `{"lo": int, "coeffs": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFile {
    pub lo: i64,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&LaurentPoly> for PolyFile {
    fn from(p: &LaurentPoly) -> Self {
        PolyFile { lo: p.lo(), coeffs: to_pairs(p.coeffs()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFile {
    pub a: PolyFile,
    pub b: PolyFile,
}

impl From<&NlftPair> for PairFile {
    fn from(p: &NlftPair) -> Self {
        PairFile { a: (&p.a).into(), b: (&p.b).into() }
    }
}

/// ```toml
/// [schedule]
/// nu = [16, 64]
/// delta = [0.3, 0.15]
/// eps = [0.1, 0.05]
/// mu = 0.5
/// n_star = 0
///
/// [grid]
/// certify = 4096
/// scan = 4096
///
/// [growth]
/// delta = 0.3
/// nu = [16, 64, 256]
/// grid = 32768
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DaisyConfig {
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub grid: GridConfig,
    pub growth: Option<GrowthConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub nu: Vec<usize>,
    pub delta: Vec<f64>,
    pub eps: Vec<f64>,
    pub mu: f64,
    #[serde(default)]
    pub n_star: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub certify: usize,
    pub scan: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { certify: 4096, scan: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub delta: f64,
    pub nu: Vec<usize>,
    pub grid: usize,
}

impl DaisyConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: DaisyConfig = toml::from_str(text).map_err(|e| NlftError::Format(e.to_string()))?;
        cfg.schedule()?;
        crate::fft::check_grid(cfg.grid.certify)?;
        crate::fft::check_grid(cfg.grid.scan)?;
        if let Some(g) = &cfg.growth {
            crate::fft::check_grid(g.grid)?;
        }
        Ok(cfg)
    }

    pub fn schedule(&self) -> Result<Schedule> {
        let s = &self.schedule;
        if s.nu.len() != s.delta.len() || s.nu.len() != s.eps.len() {
            return Err(NlftError::Format(format!(
                "schedule arrays differ in length: nu {}, delta {}, eps {}",
                s.nu.len(),
                s.delta.len(),
                s.eps.len()
            )));
        }
        let levels = (0..s.nu.len())
            .map(|i| DaisyParams::new(s.nu[i], s.delta[i], s.eps[i]))
            .collect::<Result<Vec<_>>>()?;
        let schedule = Schedule { levels, mu: s.mu, n_star: s.n_star };
        schedule.validate()?;
        Ok(schedule)
    }
}

pub fn write_growth_csv<W: Write>(rows: &[GrowthRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "nu,j,min_arc_arg")?;
    for r in rows {
        writeln!(w, "{},{},{:.16e}", r.nu, r.j, r.min_arc_arg)?;
    }
    Ok(())
}
