//! Signal and mask files.
//!
//! A signal file is a JSON object `{d, M, h, side, label, encoding, values}`.
//! With `encoding: "array"` the values are a flat list of interleaved
//! `re, im` numbers in row-major order; with `"base64"` they are the same
//! numbers as little-endian `f64` bytes. Masks use the same header with
//! `encoding: "bool"`, a list of booleans, and the fields `eps_rel` and
//! `resolved`. One-dimensional signals are also read from CSV rows
//! `index,re,im`, where `index` is the lattice index `k` in `-M/2..M/2`.

use std::fs;
use std::io::Write;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction, Side};
use crate::transform::SupportMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Array,
    Base64,
    Bool,
}

#[derive(Serialize, Deserialize)]
struct FileRepr {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    h: f64,
    side: Side,
    #[serde(default)]
    label: String,
    #[serde(default = "default_encoding")]
    encoding: Encoding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolved: Option<bool>,
    values: Value,
}

fn default_encoding() -> Encoding {
    Encoding::Array
}

impl FileRepr {
    fn grid(&self) -> Result<Grid> {
        Grid::new(self.d, self.m, self.h)
    }
}

fn signal_repr(f: &SampledFunction, encoding: Encoding) -> Result<FileRepr> {
    let flat = f.values().iter().flat_map(|v| [v.re, v.im]);
    let values = match encoding {
        Encoding::Array => Value::from(flat.collect::<Vec<f64>>()),
        Encoding::Base64 => {
            let bytes: Vec<u8> = flat.flat_map(f64::to_le_bytes).collect();
            Value::from(STANDARD.encode(bytes))
        }
        Encoding::Bool => return Err(Error::arg("encoding", "bool is reserved for masks")),
    };
    let g = f.grid();
    Ok(FileRepr {
        d: g.dim(),
        m: g.points_per_axis(),
        h: g.step(),
        side: f.side(),
        label: f.label().to_string(),
        encoding,
        eps_rel: None,
        resolved: None,
        values,
    })
}

fn signal_from_repr(r: FileRepr) -> Result<SampledFunction> {
    let grid = r.grid()?;
    let flat: Vec<f64> = match r.encoding {
        Encoding::Array => serde_json::from_value(r.values).map_err(|e| Error::Format(format!("values: {e}")))?,
        Encoding::Base64 => {
            let s = r
                .values
                .as_str()
                .ok_or_else(|| Error::Format("base64 values must be a string".into()))?;
            let bytes = STANDARD
                .decode(s)
                .map_err(|e| Error::Format(format!("base64: {e}")))?;
            if bytes.len() % 8 != 0 {
                return Err(Error::Format(format!("{} bytes is not a whole number of f64", bytes.len())));
            }
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect()
        }
        Encoding::Bool => return Err(Error::Format("a mask file is not a signal".into())),
    };
    if flat.len() != 2 * grid.len() {
        return Err(Error::Format(format!(
            "{} numbers for {} complex samples",
            flat.len(),
            grid.len()
        )));
    }
    let values = flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    SampledFunction::new(grid, r.side, values, r.label)
}

pub fn signal_to_json(f: &SampledFunction, encoding: Encoding) -> Result<String> {
    Ok(serde_json::to_string(&signal_repr(f, encoding)?).expect("plain data"))
}

pub fn signal_from_json(text: &str) -> Result<SampledFunction> {
    let r: FileRepr = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    signal_from_repr(r)
}

fn mask_repr(mask: &SupportMask) -> FileRepr {
    let g = mask.grid();
    FileRepr {
        d: g.dim(),
        m: g.points_per_axis(),
        h: g.step(),
        side: Side::Frequency,
        label: "mask".into(),
        encoding: Encoding::Bool,
        eps_rel: Some(mask.eps_rel()),
        resolved: Some(mask.resolved()),
        values: Value::from(mask.cells().to_vec()),
    }
}

fn mask_from_repr(r: FileRepr) -> Result<SupportMask> {
    if r.encoding != Encoding::Bool {
        return Err(Error::Format("a mask needs encoding \"bool\"".into()));
    }
    let grid = r.grid()?;
    let cells: Vec<bool> = serde_json::from_value(r.values).map_err(|e| Error::Format(format!("values: {e}")))?;
    // the resolved flag is recomputed from the cells
    SupportMask::from_cells(grid, cells, r.eps_rel.unwrap_or(crate::transform::DEFAULT_EPS_REL))
}

pub fn mask_to_json(mask: &SupportMask) -> String {
    serde_json::to_string(&mask_repr(mask)).expect("plain data")
}

pub fn mask_from_json(text: &str) -> Result<SupportMask> {
    let r: FileRepr = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    mask_from_repr(r)
}

/// Serde adapter writing a [`SupportMask`] in the signal file layout.
pub mod mask_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(mask: &SupportMask, s: S) -> std::result::Result<S::Ok, S::Error> {
        mask_repr(mask).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SupportMask, D::Error> {
        let r = FileRepr::deserialize(d)?;
        mask_from_repr(r).map_err(serde::de::Error::custom)
    }
}

/// Parses `index,re,im` rows (an optional header line is skipped) into a spatial signal.
pub fn signal_from_csv(text: &str, h: f64, label: &str) -> Result<SampledFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<(i64, Complex64)> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("csv: {e}")))?;
        if rec.len() != 3 {
            return Err(Error::Format(format!("csv row {}: expected 3 fields, found {}", line + 1, rec.len())));
        }
        let num = |i: usize| rec[i].parse::<f64>();
        match (rec[0].parse::<i64>(), num(1), num(2)) {
            (Ok(k), Ok(re), Ok(im)) => rows.push((k, Complex64::new(re, im))),
            _ if line == 0 => continue,
            _ => return Err(Error::Format(format!("csv row {}: not numeric", line + 1))),
        }
    }
    let m = rows.len();
    let grid = Grid::new(1, m, h)?;
    let mut values = vec![None; m];
    for (k, v) in rows {
        if k < grid.min_index() || k > grid.max_index() {
            return Err(Error::Format(format!("csv index {k} outside {}..={}", grid.min_index(), grid.max_index())));
        }
        let slot = &mut values[(k - grid.min_index()) as usize];
        if slot.replace(v).is_some() {
            return Err(Error::Format(format!("csv index {k} repeated")));
        }
    }
    let values = values.into_iter().map(|v| v.expect("each index once")).collect();
    SampledFunction::new(grid, Side::Spatial, values, label)
}

/// Reads a signal file; `.csv` files need the spacing `csv_h`.
pub fn read_signal(path: impl AsRef<Path>, csv_h: Option<f64>) -> Result<SampledFunction> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let h = csv_h.ok_or_else(|| Error::arg("h", "a csv signal needs the grid step from the config"))?;
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        signal_from_csv(&text, h, &label)
    } else {
        signal_from_json(&text)
    }
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<SupportMask> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    mask_from_json(&text)
}

pub fn write_signal(path: impl AsRef<Path>, f: &SampledFunction, encoding: Encoding) -> Result<()> {
    write_atomic(path, signal_to_json(f, encoding)?.as_bytes())
}

pub fn write_mask(path: impl AsRef<Path>, mask: &SupportMask) -> Result<()> {
    write_atomic(path, mask_to_json(mask).as_bytes())
}

/// Writes to a temporary file beside `path`, then renames it over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::other("not a file path")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn sample() -> SampledFunction {
        let g = make_grid(2, 8, 0.25).unwrap();
        SampledFunction::from_fn(g, Side::Spatial, "s", |x| Complex64::new(x[0] - 0.1, x[1] * 3.0)).unwrap()
    }

    #[test]
    fn json_round_trips_bit_exactly() {
        let f = sample();
        for enc in [Encoding::Array, Encoding::Base64] {
            let back = signal_from_json(&signal_to_json(&f, enc).unwrap()).unwrap();
            assert_eq!(back.values(), f.values());
            assert_eq!(back.grid(), f.grid());
            assert_eq!(back.label(), "s");
        }
    }

    #[test]
    fn rejects_short_payload() {
        let text = r#"{"d":1,"M":8,"h":1.0,"side":"spatial","values":[1,2,3]}"#;
        assert!(matches!(signal_from_json(text), Err(Error::Format(_))));
        let odd = r#"{"d":1,"M":9,"h":1.0,"side":"spatial","values":[]}"#;
        assert!(matches!(signal_from_json(odd), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn mask_round_trip() {
        let g = make_grid(1, 16, 0.5).unwrap();
        let m = SupportMask::from_predicate(g, 1e-6, |l| l[0].abs() < 1.0);
        let back = mask_from_json(&mask_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn csv_rows_in_any_order() {
        let mut text = String::from("index,re,im\n");
        for k in (-4..4).rev() {
            text.push_str(&format!("{k},{},0\n", k as f64 * 0.5));
        }
        let f = signal_from_csv(&text, 0.1, "c").unwrap();
        assert_eq!(f.grid().points_per_axis(), 8);
        assert_eq!(f.values()[0], Complex64::new(-2.0, 0.0));
        assert!(signal_from_csv("0,1,0\n0,1,0\n", 0.1, "").is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
