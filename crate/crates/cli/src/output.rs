//! CSV/JSON writers. Floats use Rust's shortest round-trip formatting, so
//! identical values always produce identical bytes.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

pub fn csv_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink)
}

pub fn write_rows<W: Write, const N: usize>(sink: W, header: [&str; N], rows: &[[f64; N]]) -> Result<(), CliError> {
    let mut w = csv_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows_to_file<const N: usize>(path: &Path, header: [&str; N], rows: &[[f64; N]]) -> Result<(), CliError> {
    write_rows(File::create(path)?, header, rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Equal-width histogram over `[min, max]` normalised to a density.
pub fn histogram(sorted: &[f64], bins: usize) -> Vec<[f64; 3]> {
    assert!(!sorted.is_empty() && bins > 0);
    let (mut lo, mut hi) = (sorted[0], sorted[sorted.len() - 1]);
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in sorted {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let total = sorted.len() as f64;
    (0..bins)
        .map(|k| {
            let left = lo + width * k as f64;
            let right = if k + 1 == bins { hi } else { lo + width * (k + 1) as f64 };
            [left, right, counts[k] as f64 / (total * (right - left))]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_integrates_to_one() {
        let values: Vec<f64> = (0..997).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        for bins in [1, 10, 100] {
            let h = histogram(&sorted, bins);
            let mass: f64 = h.iter().map(|r| (r[1] - r[0]) * r[2]).sum();
            assert!((mass - 1.0).abs() < 1e-9);
            assert_eq!(h.len(), bins);
        }
        let flat = histogram(&[2.0, 2.0], 4);
        assert_eq!(flat[0][0], 1.5);
        assert_eq!(flat[3][1], 2.5);
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let mut buf = Vec::new();
        write_rows(&mut buf, ["x", "density"], &[[0.5, 1.0], [1.0, 0.25]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,density\n0.5,1\n1,0.25\n");
    }
}
