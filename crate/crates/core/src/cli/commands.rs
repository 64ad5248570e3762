//! The four subcommands. Each returns a JSON result and a verdict.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::ExperimentConfig;
use crate::checks::{cauchy_bound_check, plancherel_gap};
use crate::corpus::{corpus_polys, default_corpus, under_resolved_member, CorpusMember};
use crate::error::{Error, Result};
use crate::grid::{NormExponent, SampledFunction, Side};
use crate::growth::{
    canonical_phi_check, growth_sequences, pointwise_growth, GrowthOptions, WeightMode, LIMINF_TOLERANCE,
};
use crate::io::{write_atomic, write_mask};
use crate::poly::{parse_poly, Symbol};
use crate::reconstruct::{pde_support_probe_with, reconstruct_support_with, ReconstructOptions, SLACK};
use crate::transform::{
    complex_growth_rate, compute_r, forward_dft, max_admissible_t, support_mask, supporting_function, RValue,
};

/// Relative tolerance on `|limit - R|`.
pub const LIMIT_TOLERANCE: f64 = 0.02;
/// Relative tolerance on `R~` versus `R`.
pub const R_TILDE_TOLERANCE: f64 = 0.03;
/// Plancherel agreement required of every iterate.
pub const PLANCHEREL_TOLERANCE: f64 = 1e-10;

pub struct Outcome {
    pub result: Value,
    /// True when every verdict in the result is positive.
    pub passed: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data")
}

/// `|a - r|/r`, or `|a - r|` when `r = 0`.
pub fn relative_gap(a: f64, r: f64) -> f64 {
    if r > 0.0 {
        (a - r).abs() / r
    } else {
        (a - r).abs()
    }
}

fn input_summary(f: &SampledFunction, eps_rel: f64) -> Result<Value> {
    let mask = support_mask(&forward_dft(f)?, eps_rel)?;
    Ok(json!({
        "label": f.label(),
        "grid": f.grid(),
        "mask_cells": mask.count(),
        "resolved": mask.resolved(),
        "boundary_level": f.boundary_level(10),
    }))
}

pub fn estimate(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate_knobs()?;
    if cfg.poly.is_empty() {
        return Err(Error::arg("poly", "at least one polynomial is required"));
    }
    let f = cfg.load_input()?;
    let d = f.grid().dim();
    let polys = cfg.polys(d)?;
    let pde = match &cfg.pde {
        Some(spec) => {
            if let Some(v) = spec.delta_zero {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::arg("pde.delta_zero", format!("{v} must be positive")));
                }
            }
            let p = parse_poly(&spec.p_poly, d).map_err(|e| Error::arg("pde.P", e.to_string()))?;
            let q = parse_poly(&spec.q_poly, d).map_err(|e| Error::arg("pde.Q", e.to_string()))?;
            Some((p, q, spec.delta_zero))
        }
        None => None,
    };
    let opts = cfg.growth_options();
    let mask = support_mask(&forward_dft(&f)?, cfg.eps_rel)?;
    let mut entries = Vec::new();
    let mut passed = true;
    for poly in &polys {
        let r = compute_r(poly, &mask)?;
        let seqs = growth_sequences(&f, poly, &cfg.p, cfg.n_max, &opts)?;
        let verdicts: Vec<Value> = seqs
            .iter()
            .map(|s| {
                let gap = relative_gap(s.limit, r.value);
                let within = gap <= LIMIT_TOLERANCE;
                passed &= within;
                json!({"p": s.p, "limit": s.limit, "gap": gap, "within_tolerance": within})
            })
            .collect();
        entries.push(json!({
            "P": poly.to_string(),
            "R": r,
            "tolerance": LIMIT_TOLERANCE,
            "verdicts": verdicts,
            "sequences": seqs,
        }));
    }
    let mut result = json!({
        "input": input_summary(&f, cfg.eps_rel)?,
        "entries": entries,
    });
    if let Some((p, q, delta)) = pde {
        let rep = pde_support_probe_with(&f, &p, &q, delta, cfg.p[0], cfg.n_max, &opts)?;
        result["pde_probe"] = to_value(&rep);
    }
    Ok(Outcome { result, passed })
}

pub fn reconstruct(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate_knobs()?;
    if cfg.family.is_none() {
        return Err(Error::arg("family", "reconstruction needs a family"));
    }
    let f = cfg.load_input()?;
    let family = cfg.family(f.grid())?;
    let reference = cfg.reference(&f)?;
    let opts = ReconstructOptions {
        growth: cfg.growth_options(),
        slack: cfg.slack.unwrap_or(SLACK),
    };
    let p = cfg.p[0];
    let res = reconstruct_support_with(&f, &family, p, cfg.n_max, reference.as_ref(), &opts)?;
    if let Some(path) = cfg.output.sibling(&cfg.output.mask, ".mask.json") {
        write_mask(&path, &res.mask)?;
    }
    let members: Vec<String> = family.members().iter().map(|m| m.label()).collect();
    Ok(Outcome {
        result: json!({
            "input": input_summary(&f, cfg.eps_rel)?,
            "p": p,
            "family": members,
            "reconstruction": res,
        }),
        passed: true,
    })
}

pub fn complex_growth(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate_knobs()?;
    let spec = cfg
        .complex
        .as_ref()
        .ok_or_else(|| Error::arg("complex", "complex-growth needs x0, y and a t window"))?;
    let f = cfg.load_input()?;
    let grid = *f.grid();
    let d = grid.dim();
    let mut notes = Vec::new();
    let y = match &spec.y {
        Some(y) => y.clone(),
        None if d == 1 => {
            notes.push("y omitted; defaulted to [1] in one dimension".to_string());
            vec![1.0]
        }
        None => return Err(Error::arg("complex.y", "required when d > 1")),
    };
    if y.len() != d {
        return Err(Error::arg("complex.y", format!("{} components for d = {d}", y.len())));
    }
    for (k, x0) in spec.x0.iter().enumerate() {
        if x0.len() != d {
            return Err(Error::arg(format!("complex.x0[{k}]"), format!("{} components for d = {d}", x0.len())));
        }
    }
    let t_cap = max_admissible_t(&grid, &y);
    let t_reach = spec.t.start.abs().max(spec.t.stop.abs());
    if t_reach > t_cap {
        return Err(Error::arg(
            "complex.t",
            format!("|t| up to {t_reach} exceeds the overflow guard limit {t_cap}"),
        ));
    }
    let t = spec.t.samples();
    // expected rate: the supporting function of the thresholded spatial support
    let peak = f.max_abs();
    let support: Vec<Vec<f64>> = (0..grid.len())
        .filter(|&j| f.values()[j].norm() > cfg.eps_rel * peak)
        .map(|j| grid.point(j, Side::Spatial)[..d].to_vec())
        .collect();
    let expected = supporting_function(&support, &y)?;
    let mut fits = Vec::new();
    let mut csv = String::from("x0_index,t,log_abs\n");
    for (k, x0) in spec.x0.iter().enumerate() {
        let rep = complex_growth_rate(&f, x0, &y, &t)?;
        for (tv, lv) in &rep.samples {
            csv.push_str(&format!("{k},{tv:?},{lv:?}\n"));
        }
        let gap = relative_gap(rep.slope, expected);
        fits.push(json!({"fit": rep, "relative_gap": gap}));
    }
    if let Some(path) = cfg.output.sibling(&cfg.output.csv, ".csv") {
        write_atomic(&path, csv.as_bytes())?;
    }
    Ok(Outcome {
        result: json!({
            "input": input_summary(&f, cfg.eps_rel)?,
            "y": y,
            "expected_rate": expected,
            "fits": fits,
            "notes": notes,
        }),
        passed: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pass,
    Fail,
    /// The spectrum is not resolved on the grid.
    Skipped,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub status: CellStatus,
    pub detail: String,
}

impl Cell {
    fn verdict(ok: bool, detail: String) -> Self {
        Cell {
            status: if ok { CellStatus::Pass } else { CellStatus::Fail },
            detail,
        }
    }

    fn skipped() -> Self {
        Cell {
            status: CellStatus::Skipped,
            detail: "spectrum reaches the Nyquist shells".into(),
        }
    }

    fn not_applicable(why: &str) -> Self {
        Cell {
            status: CellStatus::NotApplicable,
            detail: why.into(),
        }
    }
}

pub const VERIFY_ROWS: [&str; 6] = ["parseval", "limit", "liminf", "r_tilde", "schwartz", "cauchy"];

fn verify_member(m: &CorpusMember, ps: &[NormExponent], n_max: usize, opts: &GrowthOptions) -> Result<Vec<Cell>> {
    let f = m.sample()?;
    let d = f.grid().dim();
    let polys = corpus_polys(d);
    let mask = support_mask(&forward_dft(&f)?, opts.eps_rel)?;
    let x1 = &polys[0];

    let mut ns = vec![];
    let mut n = 1;
    while n < n_max {
        ns.push(n as u32);
        n *= 2;
    }
    ns.push(n_max as u32);
    let mut worst = 0.0f64;
    for &n in &ns {
        worst = worst.max(plancherel_gap(&f, x1, n)?);
    }
    let parseval = Cell::verdict(worst <= PLANCHEREL_TOLERANCE, format!("max relative gap {worst:.2e}"));

    if !mask.resolved() {
        let mut cells = vec![parseval];
        cells.extend((1..VERIFY_ROWS.len()).map(|_| Cell::skipped()));
        return Ok(cells);
    }

    let (mut worst_gap, mut worst_margin) = (0.0f64, f64::INFINITY);
    let (mut gap_at, mut margin_at) = (String::new(), String::new());
    for poly in &polys {
        let r = compute_r(poly, &mask)?;
        for s in growth_sequences(&f, poly, ps, n_max, opts)? {
            let gap = relative_gap(s.limit, r.value);
            if gap > worst_gap {
                worst_gap = gap;
                gap_at = format!("{} p={}", poly, s.p);
            }
            let margin = liminf_margin(s.tail_min(), r);
            if margin < worst_margin {
                worst_margin = margin;
                margin_at = format!("{} p={}", poly, s.p);
            }
        }
    }
    let limit = Cell::verdict(
        worst_gap <= LIMIT_TOLERANCE,
        format!("worst gap {:.2}% at {gap_at}", 100.0 * worst_gap),
    );
    let liminf = Cell::verdict(
        worst_margin >= -LIMINF_TOLERANCE,
        format!("worst tail-minimum margin {:.2}% at {margin_at}", 100.0 * worst_margin),
    );

    let r1 = compute_r(x1, &mask)?.value;
    let pw = pointwise_growth(&f, x1, 2, n_max, WeightMode::Decay)?;
    let rt_gap = relative_gap(pw.r_tilde, r1);
    let r_tilde = Cell::verdict(
        rt_gap <= R_TILDE_TOLERANCE,
        format!("R~ = {:.4}, R = {r1:.4}", pw.r_tilde),
    );

    let above = canonical_phi_check(&f, x1, 1.05 * r1, n_max)?;
    let below = canonical_phi_check(&f, x1, 0.8 * r1, n_max)?;
    let schwartz = Cell::verdict(
        above.plateaued && below.last_quarter_growth >= 10.0,
        format!(
            "1.05R plateaued: {}; 0.8R last-quarter growth {:.3e}",
            above.plateaued, below.last_quarter_growth
        ),
    );

    let cauchy = if d == 1 {
        let rep = cauchy_bound_check(&f, 20)?;
        Cell::verdict(rep.violations == 0, format!("{} violations for n <= 20, C = {:.4e}", rep.violations, rep.c))
    } else {
        Cell::not_applicable("one-dimensional inputs only")
    };
    Ok(vec![parseval, limit, liminf, r_tilde, schwartz, cauchy])
}

fn liminf_margin(tail_min: f64, r: RValue) -> f64 {
    if r.value > 0.0 {
        (tail_min - r.value) / r.value
    } else {
        tail_min - r.value
    }
}

pub fn verify(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate_knobs()?;
    let spec = cfg.verify.clone().unwrap_or_default();
    let mut corpus = default_corpus();
    if spec.include_under_resolved {
        corpus.push(under_resolved_member());
    }
    if let Some(names) = &spec.members {
        for n in names {
            if !corpus.iter().any(|m| &m.name == n) {
                return Err(Error::arg("verify.members", format!("no corpus member named {n:?}")));
            }
        }
        corpus.retain(|m| names.contains(&m.name));
    }
    let opts = cfg.growth_options();
    let columns: Vec<Vec<Cell>> = corpus
        .par_iter()
        .map(|m| verify_member(m, &cfg.p, cfg.n_max, &opts))
        .collect::<Result<_>>()?;
    let passed = columns.iter().flatten().all(|c| c.status != CellStatus::Fail);
    let matrix: Vec<Value> = VERIFY_ROWS
        .iter()
        .enumerate()
        .map(|(r, name)| {
            let cells: Vec<&Cell> = columns.iter().map(|c| &c[r]).collect();
            json!({"property": name, "cells": cells})
        })
        .collect();
    let names: Vec<&str> = corpus.iter().map(|m| m.name.as_str()).collect();
    Ok(Outcome {
        result: json!({"columns": names, "rows": matrix, "all_pass": passed}),
        passed,
    })
}

/// The pass/fail matrix as aligned text.
pub fn matrix_text(result: &Value) -> String {
    let cols: Vec<String> = result["columns"]
        .as_array()
        .map(|a| a.iter().map(|v| v.as_str().unwrap_or("").to_string()).collect())
        .unwrap_or_default();
    let width = cols.iter().map(|c| c.len()).max().unwrap_or(4).max(7);
    let mut out = format!("{:<10}", "");
    for c in &cols {
        out.push_str(&format!(" {c:>width$}"));
    }
    out.push('\n');
    for row in result["rows"].as_array().into_iter().flatten() {
        out.push_str(&format!("{:<10}", row["property"].as_str().unwrap_or("")));
        for cell in row["cells"].as_array().into_iter().flatten() {
            let s = cell["status"].as_str().unwrap_or("?");
            out.push_str(&format!(" {s:>width$}"));
        }
        out.push('\n');
    }
    out
}
