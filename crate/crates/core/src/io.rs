//! Point files: one point per line, `x,y` or `x,y,z`, no header.

use std::path::Path;

use crate::error::{Result, VgError};
use crate::geometry::Point;

/// Parses point CSV text; errors carry the line and field number.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut dim = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| VgError::InvalidInput(format!("malformed CSV: {e}")))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut coords = Vec::with_capacity(3);
        for (i, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                VgError::InvalidInput(format!("line {line}, field {}: not a number: {field:?}", i + 1))
            })?;
            if !v.is_finite() {
                return Err(VgError::InvalidInput(format!("line {line}, field {}: not finite", i + 1)));
            }
            coords.push(v);
        }
        if coords.len() != 2 && coords.len() != 3 {
            return Err(VgError::InvalidInput(format!(
                "line {line}: expected 2 or 3 coordinates, found {}",
                coords.len()
            )));
        }
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(VgError::InvalidInput(format!(
                    "line {line}: expected {d} coordinates like the first line, found {}",
                    coords.len()
                )))
            }
            _ => {}
        }
        out.push(Point::from_slice(&coords)?);
    }
    if out.is_empty() {
        return Err(VgError::InvalidInput("point file holds no points".into()));
    }
    Ok(out)
}

pub fn read_points(path: &Path) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| VgError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_points(&text)
}

pub fn format_points(points: &[Point]) -> String {
    let mut s = String::new();
    for p in points {
        let parts: Vec<String> = p.coords().iter().map(|v| v.to_string()).collect();
        s.push_str(&parts.join(","));
        s.push('\n');
    }
    s
}
