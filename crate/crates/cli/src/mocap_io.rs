//! Marker CSV files: a `t` (or `time`) column followed by `NAME_x`,
//! `NAME_y`, `NAME_z` triplets for every marker.

use std::path::Path;

use anyhow::Context;
use saddlegait_core::mocap::{validate_series, Marker, MarkerFrame};
use saddlegait_core::Point3;

use crate::output::fmt_float;
use crate::table::Table;

pub fn read_mocap_csv(path: &Path) -> anyhow::Result<Vec<MarkerFrame>> {
    let table = Table::read(path)?;
    let t_col = table.column_any(&["t", "time"])?;
    let mut cols = Vec::with_capacity(Marker::ALL.len());
    for m in Marker::ALL {
        let axes = ["x", "y", "z"].map(|a| table.column(&format!("{}_{a}", m.name())));
        let [x, y, z] = axes;
        cols.push([x?, y?, z?]);
    }
    let mut frames = Vec::with_capacity(table.rows.len());
    for row in 0..table.rows.len() {
        let mut markers = [Point3::origin(); 10];
        for (slot, [x, y, z]) in markers.iter_mut().zip(&cols) {
            *slot = Point3::new(
                table.float(row, *x)?,
                table.float(row, *y)?,
                table.float(row, *z)?,
            );
        }
        frames.push(MarkerFrame {
            t: table.float(row, t_col)?,
            markers,
        });
    }
    validate_series(&frames).with_context(|| format!("in {}", path.display()))?;
    Ok(frames)
}

pub fn write_mocap_csv(frames: &[MarkerFrame], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    let mut header = vec!["t".to_string()];
    for m in Marker::ALL {
        for a in ["x", "y", "z"] {
            header.push(format!("{}_{a}", m.name()));
        }
    }
    w.write_record(&header)?;
    for f in frames {
        let mut row = vec![fmt_float(f.t)];
        for p in &f.markers {
            row.extend([fmt_float(p.x), fmt_float(p.y), fmt_float(p.z)]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frames() -> Vec<MarkerFrame> {
        (0..3)
            .map(|i| MarkerFrame {
                t: i as f64 * 0.01,
                markers: std::array::from_fn(|k| Point3::new(k as f64, i as f64, 0.5)),
            })
            .collect()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_mocap_csv(&frames(), &path).unwrap();
        assert_eq!(read_mocap_csv(&path).unwrap(), frames());
    }

    #[test]
    fn missing_marker_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_mocap_csv(&frames(), &path).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("R_HEEL_y", "R_HEEL_q");
        std::fs::write(&path, text).unwrap();
        let err = format!("{:#}", read_mocap_csv(&path).unwrap_err());
        assert!(err.contains("R_HEEL_y"), "{err}");
    }

    #[test]
    fn accepts_time_column_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_mocap_csv(&frames(), &path).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replacen("t,", "time,", 1);
        std::fs::write(&path, text).unwrap();
        assert_eq!(read_mocap_csv(&path).unwrap().len(), 3);
    }

    #[test]
    fn non_monotone_time_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mut f = frames();
        f[2].t = 0.0;
        write_mocap_csv(&f, &path).unwrap();
        assert!(read_mocap_csv(&path).is_err());
    }
}
