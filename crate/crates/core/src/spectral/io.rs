//! Binary field files: a `key: value` text header, a blank line, then
//! little-endian `f64` samples in (time, tangential..., x_n, component) order.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use super::field::PhysicalField;
use super::grid::{Grid, NormalGrid};
use crate::error::{Error, Result};

const DTYPE: &str = "float64-le";

fn bad(path: &Path, reason: impl Into<String>) -> Error {
    Error::FieldFile {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Serialises a field; identical fields give identical bytes.
pub fn encode_field(field: &PhysicalField) -> Vec<u8> {
    let g = field.grid();
    let mut dims = vec![g.nt()];
    dims.extend(std::iter::repeat_n(g.tangential(), g.tdim()));
    dims.push(g.nz());
    let mut out = Vec::new();
    let header = format!(
        "dims: {}\ncomponents: {}\ntau: {}\nL: {}\nnormal_grid: {}\ndtype: {DTYPE}\n\n",
        join(&dims),
        field.components(),
        g.tau(),
        g.box_length(),
        join(g.normal().nodes()),
    );
    out.extend_from_slice(header.as_bytes());
    let nc = field.components();
    out.reserve(8 * g.block() * nc);
    for s in 0..g.block() {
        for c in 0..nc {
            out.extend_from_slice(&field.component(c)[s].to_le_bytes());
        }
    }
    out
}

pub fn write_field(path: &Path, field: &PhysicalField) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_field(field))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<PhysicalField> {
    let file = std::fs::File::open(path).map_err(|e| bad(path, e.to_string()))?;
    decode_field(BufReader::new(file), path)
}

fn parse_list<T: std::str::FromStr>(path: &Path, key: &str, v: &str) -> Result<Vec<T>> {
    v.split_whitespace()
        .map(|x| x.parse().map_err(|_| bad(path, format!("bad value {x:?} for {key}"))))
        .collect()
}

pub fn decode_field<R: BufRead>(mut reader: R, path: &Path) -> Result<PhysicalField> {
    let mut dims = None;
    let mut components = None;
    let mut tau = None;
    let mut length = None;
    let mut normal = None;
    let mut dtype = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Err(bad(path, "header not terminated by a blank line"));
        }
        let line = line.trim_end_matches(['\n', '\r']);
        if line.is_empty() {
            break;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| bad(path, format!("malformed header line {line:?}")))?;
        let value = value.trim();
        match key.trim() {
            "dims" => dims = Some(parse_list::<usize>(path, key, value)?),
            "components" => components = Some(parse_list::<usize>(path, key, value)?),
            "tau" => tau = Some(parse_list::<f64>(path, key, value)?),
            "L" => length = Some(parse_list::<f64>(path, key, value)?),
            "normal_grid" => normal = Some(parse_list::<f64>(path, key, value)?),
            "dtype" => dtype = Some(value.to_string()),
            other => return Err(bad(path, format!("unknown header key {other:?}"))),
        }
    }
    let need = |name: &str| bad(path, format!("missing header key {name:?}"));
    let dims = dims.ok_or_else(|| need("dims"))?;
    let one = |v: Option<Vec<f64>>, name: &str| -> Result<f64> {
        match v.as_deref() {
            Some([x]) => Ok(*x),
            Some(_) => Err(bad(path, format!("{name} takes one value"))),
            None => Err(need(name)),
        }
    };
    let tau = one(tau, "tau")?;
    let length = one(length, "L")?;
    let components = match components.as_deref() {
        Some([c]) if *c > 0 => *c,
        _ => return Err(bad(path, "components must be one positive integer")),
    };
    if dtype.as_deref() != Some(DTYPE) {
        return Err(bad(path, format!("dtype must be {DTYPE}")));
    }
    let normal = normal.ok_or_else(|| need("normal_grid"))?;
    if !(3..=4).contains(&dims.len()) {
        return Err(bad(path, "dims must list time, 1 or 2 tangential sizes, and x_n"));
    }
    let nt = dims[0];
    if nt % 2 == 0 {
        return Err(bad(path, "time sample count must be odd"));
    }
    let tang = dims[1];
    if dims[1..dims.len() - 1].iter().any(|&d| d != tang) {
        return Err(bad(path, "tangential sizes must agree"));
    }
    if *dims.last().unwrap() != normal.len() {
        return Err(bad(path, "normal_grid length disagrees with dims"));
    }
    let grid = Grid::new(
        tau,
        dims.len() - 1,
        nt / 2,
        tang,
        length,
        NormalGrid::from_nodes(normal)?,
    )?;
    let grid = Arc::new(grid);
    let block = grid.block();
    let mut raw = Vec::new();
    reader.read_to_end(&mut raw)?;
    if raw.len() != 8 * block * components {
        return Err(bad(
            path,
            format!("expected {} data bytes, found {}", 8 * block * components, raw.len()),
        ));
    }
    let mut data = vec![0.0; block * components];
    for (i, chunk) in raw.chunks_exact(8).enumerate() {
        let (s, c) = (i / components, i % components);
        data[c * block + s] = f64::from_le_bytes(chunk.try_into().unwrap());
    }
    PhysicalField::from_vec(grid, components, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn encode_decode_round_trip() {
        let normal = NormalGrid::from_nodes(vec![0.0, 0.5, 2.0]).unwrap();
        let grid = Arc::new(Grid::new(2.0 * PI, 3, 1, 4, 3.0, normal).unwrap());
        let f = PhysicalField::from_fn(grid, 2, |c, t, x, xn| c as f64 + t * x[0] - x[1] * xn);
        let bytes = encode_field(&f);
        let g = decode_field(&bytes[..], Path::new("mem")).unwrap();
        assert_eq!(f, g);
        assert_eq!(bytes, encode_field(&g));
    }

    #[test]
    fn rejects_truncated_data() {
        let grid = Arc::new(Grid::new(1.0, 2, 1, 2, 1.0, NormalGrid::boundary()).unwrap());
        let f = PhysicalField::zeros(grid, 1);
        let mut bytes = encode_field(&f);
        bytes.pop();
        assert!(decode_field(&bytes[..], Path::new("mem")).is_err());
    }
}
