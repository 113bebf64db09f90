//! File formats: LPGF1 grid files, grid CSV, coefficient files and atom-family directories.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dyadic::DyadicCube;
use crate::error::{Error, Result};
use crate::grid::{make_grid, GridFunction, GridSpec};
use crate::operators::{AtomFamily, Normalization};
use crate::transform::CoefficientField;
use crate::weights::ScaleRange;

pub const LPGF_MAGIC: &[u8] = b"LPGF1\n";

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn read_line<R: BufRead>(r: &mut R, what: &str) -> Result<String> {
    let mut line = String::new();
    if r.read_line(&mut line)? == 0 || !line.ends_with('\n') {
        return Err(format_err(format!("missing {what} line")));
    }
    line.pop();
    Ok(line)
}

fn kind_of(f: &GridFunction) -> &'static str {
    if f.is_real() {
        "real"
    } else {
        "complex"
    }
}

fn parse_header(fields: &[&str]) -> Result<(GridSpec, bool)> {
    if fields.len() != 4 {
        return Err(format_err(format!("header needs `n L T kind`, got {} fields", fields.len())));
    }
    let n: usize = fields[0].parse().map_err(|_| format_err(format!("bad dimension `{}`", fields[0])))?;
    let level: u32 = fields[1].parse().map_err(|_| format_err(format!("bad level `{}`", fields[1])))?;
    let side: f64 = fields[2].parse().map_err(|_| format_err(format!("bad side `{}`", fields[2])))?;
    let complex = match fields[3] {
        "complex" => true,
        "real" => false,
        other => return Err(format_err(format!("unknown sample kind `{other}`"))),
    };
    let spec = make_grid(n, level, side).map_err(|e| format_err(e.to_string()))?;
    Ok((spec, complex))
}

/// Writes `f` in LPGF1; real functions are stored without imaginary parts.
pub fn write_lpgf<W: Write>(f: &GridFunction, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let s = f.spec();
    w.write_all(LPGF_MAGIC)?;
    writeln!(w, "{} {} {} {}", s.dim(), s.level(), s.side(), kind_of(f))?;
    let complex = !f.is_real();
    for v in f.values() {
        w.write_all(&v.re.to_le_bytes())?;
        if complex {
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_lpgf<R: Read>(input: R) -> Result<GridFunction> {
    let mut r = BufReader::new(input);
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(|_| format_err("file too short for LPGF1 magic"))?;
    if magic != LPGF_MAGIC {
        return Err(format_err("bad LPGF1 magic bytes"));
    }
    let header = read_line(&mut r, "header")?;
    let (spec, complex) = parse_header(&header.split_whitespace().collect::<Vec<_>>())?;
    let width = if complex { 16 } else { 8 };
    let mut bytes = Vec::with_capacity(spec.len() * width);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != spec.len() * width {
        return Err(format_err(format!("expected {} payload bytes, found {}", spec.len() * width, bytes.len())));
    }
    let num = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("eight bytes"));
    let values = bytes
        .chunks_exact(width)
        .map(|c| if complex { Complex64::new(num(&c[..8]), num(&c[8..])) } else { Complex64::new(num(c), 0.0) })
        .collect();
    GridFunction::new(spec, values)
}

pub fn save_lpgf(f: &GridFunction, path: &Path) -> Result<()> {
    write_lpgf(f, File::create(path)?)
}

pub fn load_lpgf(path: &Path) -> Result<GridFunction> {
    read_lpgf(File::open(path)?)
}

/// CSV with a `# n L T kind` first line, then `x[,y],re[,im]` rows in grid order.
pub fn write_grid_csv<W: Write>(f: &GridFunction, mut out: W) -> Result<()> {
    let s = f.spec();
    writeln!(out, "# {} {} {} {}", s.dim(), s.level(), s.side(), kind_of(f))?;
    let complex = !f.is_real();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = if s.dim() == 1 { vec!["x"] } else { vec!["x", "y"] };
    header.push("re");
    if complex {
        header.push("im");
    }
    w.write_record(&header)?;
    for (i, v) in f.values().iter().enumerate() {
        let x = s.point(i);
        let mut row: Vec<String> = x[..s.dim()].iter().map(|c| c.to_string()).collect();
        row.push(v.re.to_string());
        if complex {
            row.push(v.im.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv<R: Read>(input: R) -> Result<GridFunction> {
    let mut r = BufReader::new(input);
    let first = read_line(&mut r, "header")?;
    let fields: Vec<&str> = first
        .strip_prefix('#')
        .ok_or_else(|| format_err("grid CSV must start with `# n L T kind`"))?
        .split_whitespace()
        .collect();
    let (spec, complex) = parse_header(&fields)?;
    let mut rows = csv::Reader::from_reader(r);
    let expected = spec.dim() + 1 + usize::from(complex);
    let mut values = Vec::with_capacity(spec.len());
    for rec in rows.records() {
        let rec = rec?;
        if rec.len() != expected {
            return Err(format_err(format!("row has {} columns, expected {expected}", rec.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            rec[i].trim().parse().map_err(|_| format_err(format!("bad number `{}`", &rec[i])))
        };
        let re = parse(spec.dim())?;
        let im = if complex { parse(spec.dim() + 1)? } else { 0.0 };
        values.push(Complex64::new(re, im));
    }
    if values.len() != spec.len() {
        return Err(format_err(format!("expected {} rows, found {}", spec.len(), values.len())));
    }
    GridFunction::new(spec, values)
}

#[derive(Debug, Serialize, Deserialize)]
struct CoefficientHeader {
    n: usize,
    window: [i32; 2],
    counts: Vec<usize>,
}

/// JSON header line, then `(k: i32, m: i32 x n, re: f64, im: f64)` little-endian records.
pub fn write_coefficients<W: Write>(lam: &CoefficientField, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let header = CoefficientHeader {
        n: lam.dim(),
        window: [lam.window().lo, lam.window().hi],
        counts: lam.blocks().iter().map(Vec::len).collect(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (q, v) in lam.entries() {
        w.write_all(&q.k.to_le_bytes())?;
        for m in &q.m[..q.n] {
            w.write_all(&(*m as i32).to_le_bytes())?;
        }
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_coefficients<R: Read>(input: R) -> Result<CoefficientField> {
    let mut r = BufReader::new(input);
    let line = read_line(&mut r, "coefficient header")?;
    let header: CoefficientHeader =
        serde_json::from_str(&line).map_err(|e| format_err(format!("bad coefficient header: {e}")))?;
    let window = ScaleRange::new(header.window[0], header.window[1]).map_err(|e| format_err(e.to_string()))?;
    if header.counts.len() != window.len() || !(header.n == 1 || header.n == 2) {
        return Err(format_err("coefficient header is inconsistent"));
    }
    let blocks = header.counts.iter().map(|&c| vec![Complex64::new(0.0, 0.0); c]).collect();
    let mut field = CoefficientField::from_blocks(header.n, window, blocks)?;
    let width = 4 * (1 + header.n) + 16;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let total: usize = header.counts.iter().sum();
    if bytes.len() != total * width {
        return Err(format_err(format!("expected {total} records, found {} bytes", bytes.len())));
    }
    let int = |c: &[u8]| i32::from_le_bytes(c.try_into().expect("four bytes"));
    let num = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("eight bytes"));
    for rec in bytes.chunks_exact(width) {
        let k = int(&rec[..4]);
        let m: Vec<i64> = (0..header.n).map(|a| int(&rec[4 + 4 * a..8 + 4 * a]) as i64).collect();
        let off = 4 * (1 + header.n);
        let v = Complex64::new(num(&rec[off..off + 8]), num(&rec[off + 8..off + 16]));
        field.set(k, &m, v).map_err(|e| format_err(e.to_string()))?;
    }
    Ok(field)
}

pub fn save_coefficients(lam: &CoefficientField, path: &Path) -> Result<()> {
    write_coefficients(lam, File::create(path)?)
}

pub fn load_coefficients(path: &Path) -> Result<CoefficientField> {
    read_coefficients(File::open(path)?)
}

/// Every entry as `{k, m, re, im}` with the layout header.
pub fn coefficients_to_json(lam: &CoefficientField) -> serde_json::Value {
    let entries: Vec<_> = lam
        .entries()
        .map(|(q, v)| json!({"k": q.k, "m": &q.m[..q.n], "re": v.re, "im": v.im}))
        .collect();
    json!({
        "n": lam.dim(),
        "window": [lam.window().lo, lam.window().hi],
        "side": lam.side(),
        "count": entries.len(),
        "entries": entries,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct AtomIndexEntry {
    cube: Vec<i64>,
    file: String,
    normalization: Normalization,
    #[serde(rename = "N")]
    moments: i32,
    #[serde(rename = "K")]
    derivatives: u32,
}

/// Writes one LPGF1 file per atom plus `index.json`.
pub fn save_atom_family(family: &AtomFamily, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut index = Vec::with_capacity(family.len());
    for (i, atom) in family.atoms().iter().enumerate() {
        let file = format!("atom_{i:06}.lpgf");
        save_lpgf(&atom.to_grid(family.spec()), &dir.join(&file))?;
        index.push(AtomIndexEntry {
            cube: atom.cube.to_vec(),
            file,
            normalization: family.normalization,
            moments: family.moments,
            derivatives: family.derivatives,
        });
    }
    let s = family.spec();
    let doc = json!({
        "grid": {"n": s.dim(), "L": s.level(), "T": s.side()},
        "family": {"normalization": family.normalization, "N": family.moments, "K": family.derivatives},
        "atoms": index,
    });
    fs::write(dir.join("index.json"), serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

pub fn load_atom_family(dir: &Path) -> Result<AtomFamily> {
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("index.json"))?)?;
    let grid = &doc["grid"];
    let n = grid["n"].as_u64().ok_or_else(|| format_err("index grid lacks n"))? as usize;
    let level = grid["L"].as_u64().ok_or_else(|| format_err("index grid lacks L"))? as u32;
    let side = grid["T"].as_f64().ok_or_else(|| format_err("index grid lacks T"))?;
    let spec = make_grid(n, level, side).map_err(|e| format_err(e.to_string()))?;
    let entries: Vec<AtomIndexEntry> = serde_json::from_value(doc["atoms"].clone())?;
    let meta = &doc["family"];
    let (norm, moments, derivatives) = if meta.is_object() {
        let norm: Normalization = serde_json::from_value(meta["normalization"].clone())?;
        let moments = meta["N"].as_i64().ok_or_else(|| format_err("index family lacks N"))? as i32;
        let derivatives = meta["K"].as_u64().ok_or_else(|| format_err("index family lacks K"))? as u32;
        (norm, moments, derivatives)
    } else {
        entries.first().map_or((Normalization::default(), -1, 0), |e| (e.normalization, e.moments, e.derivatives))
    };
    let mut family = AtomFamily::new(spec, norm, moments, derivatives);
    for e in entries {
        let cube = DyadicCube::from_slice(&e.cube)?;
        let a = load_lpgf(&dir.join(&e.file))?;
        if a.spec() != &spec {
            return Err(format_err(format!("{} lives on a different grid", e.file)));
        }
        family.push(cube, &a)?;
    }
    Ok(family)
}
