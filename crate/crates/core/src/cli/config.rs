//! Experiment configuration files and their validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::builtin::{sample_builtin, Builtin};
use crate::error::{Error, Result};
use crate::grid::{Grid, NormExponent, SampledFunction, Side};
use crate::growth::{GrowthOptions, Method, DEFAULT_N_MAX, FD_ORDERS, MIN_ENTRIES};
use crate::io::{read_mask, read_signal};
use crate::poly::{
    center_lattice, circle_directions, family_explicit, family_linear, family_quadratic, parse_poly, MultiPoly,
    PolyFamily,
};
use crate::transform::{forward_dft, inverse_dft, support_mask, SupportMask, DEFAULT_EPS_REL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub input: Option<InputSpec>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub poly: Vec<String>,
    #[serde(default = "default_p", deserialize_with = "one_or_many")]
    pub p: Vec<NormExponent>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde: Option<PdeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_p() -> Vec<NormExponent> {
    vec![NormExponent::TWO]
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

fn default_eps_rel() -> f64 {
    DEFAULT_EPS_REL
}

fn default_method() -> Method {
    Method::Spectral
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    Builtin { builtin: Builtin, grid: Grid },
    /// A signal file; `h` is required for `.csv` input.
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Linear { directions: Vec<Vec<f64>> },
    /// `count` directions over a half turn of the plane.
    Circle { count: usize },
    Quadratic { centers: Vec<Vec<f64>> },
    /// `per_axis^d` centers spread evenly over `[lo, hi]` on every axis.
    QuadraticLattice { per_axis: usize, lo: f64, hi: f64 },
    Explicit { polys: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// The thresholded spectrum of the input itself.
    Input,
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TWindow {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TWindow {
    pub fn samples(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.count)
            .map(|k| self.start + span * k as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub x0: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    pub t: TWindow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSpec {
    #[serde(rename = "P")]
    pub p_poly: String,
    #[serde(rename = "Q")]
    pub q_poly: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_zero: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Adds a member whose spectrum reaches the Nyquist shells.
    #[serde(default)]
    pub include_under_resolved: bool,
    /// Restricts the corpus to these member names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl OutputSpec {
    /// An explicit path, or one derived from the report path with the given suffix.
    pub fn sibling(&self, explicit: &Option<PathBuf>, suffix: &str) -> Option<PathBuf> {
        explicit.clone().or_else(|| {
            let r = self.report.as_ref()?;
            let stem = r.file_stem()?.to_string_lossy().into_owned();
            Some(r.with_file_name(format!("{stem}{suffix}")))
        })
    }
}

/// Reads a config file: I/O failures keep their kind, malformed JSON becomes a `config` argument error.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::arg("config", e.to_string()))
}

fn field_err(field: impl Into<String>, e: Error) -> Error {
    match e {
        Error::InvalidArgument { field: inner, msg } => Error::arg(field.into(), format!("{inner}: {msg}")),
        Error::Io { .. } => e,
        other => Error::arg(field.into(), other.to_string()),
    }
}

impl ExperimentConfig {
    pub fn growth_options(&self) -> GrowthOptions {
        GrowthOptions {
            eps_rel: self.eps_rel,
            method: self.method,
        }
    }

    /// Checks every knob that does not need the input.
    pub fn validate_knobs(&self) -> Result<()> {
        if self.n_max < MIN_ENTRIES {
            return Err(Error::arg(
                "n_max",
                format!("{} is below the minimum of {MIN_ENTRIES}", self.n_max),
            ));
        }
        if !(self.eps_rel > 0.0 && self.eps_rel < 1.0) {
            return Err(Error::arg("eps_rel", format!("{} is not in (0, 1)", self.eps_rel)));
        }
        if self.p.is_empty() {
            return Err(Error::arg("p", "at least one exponent is required"));
        }
        if let Method::FiniteDifference { order } = self.method {
            if !FD_ORDERS.contains(&order) {
                return Err(Error::arg("method.order", format!("{order} is not one of {:?}", FD_ORDERS)));
            }
        }
        if let Some(s) = self.slack {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::arg("slack", format!("{s} must be nonnegative")));
            }
        }
        if let Some(c) = &self.complex {
            if c.t.count < 3 {
                return Err(Error::arg("complex.t.count", "at least 3 samples are required"));
            }
            if !(c.t.start.is_finite() && c.t.stop.is_finite() && c.t.stop > c.t.start) {
                return Err(Error::arg("complex.t", "need finite start < stop"));
            }
            if c.x0.is_empty() {
                return Err(Error::arg("complex.x0", "at least one base point is required"));
            }
        }
        if let Some(InputSpec::Builtin { grid, .. }) = &self.input {
            // derived deserialization skips the grid checks
            Grid::new(grid.dim(), grid.points_per_axis(), grid.step()).map_err(|e| field_err("input.grid", e))?;
        }
        Ok(())
    }

    pub fn load_input(&self) -> Result<SampledFunction> {
        let spec = self.input.as_ref().ok_or_else(|| Error::arg("input", "an input is required"))?;
        let f = match spec {
            InputSpec::Builtin { builtin, grid } => sample_builtin(builtin, grid).map_err(|e| field_err("input.builtin", e))?,
            InputSpec::File { path, h } => read_signal(path, *h).map_err(|e| field_err("input.path", e))?,
        };
        Ok(match f.side() {
            Side::Spatial => f,
            Side::Frequency => inverse_dft(&f)?,
        })
    }

    pub fn polys(&self, d: usize) -> Result<Vec<MultiPoly>> {
        if self.poly.is_empty() {
            return Err(Error::arg("poly", "at least one polynomial is required"));
        }
        self.poly
            .iter()
            .enumerate()
            .map(|(k, text)| parse_poly(text, d).map_err(|e| field_err(format!("poly[{k}]"), e)))
            .collect()
    }

    pub fn family(&self, grid: &Grid) -> Result<PolyFamily> {
        let spec = self
            .family
            .as_ref()
            .ok_or_else(|| Error::arg("family", "reconstruction needs a family"))?;
        let d = grid.dim();
        let fam = match spec {
            FamilySpec::Linear { directions } => family_linear(directions),
            FamilySpec::Circle { count } => {
                if d != 2 {
                    return Err(Error::arg("family", "circle directions need d = 2"));
                }
                family_linear(&circle_directions(*count))
            }
            FamilySpec::Quadratic { centers } => family_quadratic(centers, grid),
            FamilySpec::QuadraticLattice { per_axis, lo, hi } => {
                center_lattice(grid, *per_axis, *lo, *hi).and_then(|c| family_quadratic(&c, grid))
            }
            FamilySpec::Explicit { polys } => polys
                .iter()
                .map(|t| parse_poly(t, d))
                .collect::<Result<Vec<_>>>()
                .and_then(family_explicit),
        }
        .map_err(|e| field_err("family", e))?;
        if fam.dim() != d {
            return Err(Error::arg("family", format!("members have d = {}, input has d = {d}", fam.dim())));
        }
        Ok(fam)
    }

    pub fn reference(&self, f: &SampledFunction) -> Result<Option<SupportMask>> {
        match &self.reference {
            None => Ok(None),
            Some(ReferenceSpec::Input) => Ok(Some(support_mask(&forward_dft(f)?, self.eps_rel)?)),
            Some(ReferenceSpec::File { path }) => {
                let m = read_mask(path).map_err(|e| field_err("reference.path", e))?;
                m.grid().check_same(f.grid()).map_err(|e| field_err("reference", e))?;
                Ok(Some(m))
            }
        }
    }
}
