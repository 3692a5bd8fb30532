//! File formats: the trajectory CSV, state snapshots and the resolved
//! configuration echo.
//!
//! All floating-point values are written as `{:.16e}` (17 significant
//! digits), so every file round-trips bit-exactly and identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::FlowConfig;
use crate::discretization::GridMode;
use crate::flow::{snapshot_rows, GraphState};
use crate::monitors::TrajectoryRecord;
use crate::{Error, Result};

/// Exact header line of a trajectory CSV.
pub const TRAJECTORY_HEADER: &str = "t,min_u,max_u,min_phi,max_phi,min_phidot,max_phidot,\
max_grad_phi,min_H_theta,max_H_theta,area,rescaled_area,osc_rescaled_u,dt_used";

/// Render a trajectory as CSV text.
pub fn render_trajectory(records: &[TrajectoryRecord]) -> String {
    let mut s = String::with_capacity(64 + records.len() * 360);
    s.push_str(TRAJECTORY_HEADER);
    s.push('\n');
    for r in records {
        let cols = [
            r.t,
            r.min_u,
            r.max_u,
            r.min_phi,
            r.max_phi,
            r.min_phidot,
            r.max_phidot,
            r.max_grad_phi,
            r.min_h_theta,
            r.max_h_theta,
            r.area,
            r.rescaled_area,
            r.osc_rescaled_u,
            r.dt_used,
        ];
        for (i, v) in cols.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v:.16e}");
        }
        s.push('\n');
    }
    s
}

/// Write a trajectory CSV file.
pub fn write_trajectory(path: &Path, records: &[TrajectoryRecord]) -> Result<()> {
    std::fs::write(path, render_trajectory(records))?;
    Ok(())
}

/// Read a trajectory CSV file, enforcing the exact header and row shape.
pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read trajectory '{}': {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Input(format!("{}: empty trajectory file", path.display())))?;
    if header.trim_end() != TRAJECTORY_HEADER {
        return Err(Error::Input(format!(
            "{}: line 1: unexpected header (expected '{TRAJECTORY_HEADER}')",
            path.display()
        )));
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut cols = [0.0f64; 14];
        let mut count = 0;
        for part in line.split(',') {
            if count == 14 {
                count += 1;
                break;
            }
            cols[count] = part.parse::<f64>().map_err(|_| {
                Error::Input(format!(
                    "{}: line {lineno}: column {} is not a number: '{part}'",
                    path.display(),
                    count + 1
                ))
            })?;
            count += 1;
        }
        if count != 14 {
            return Err(Error::Input(format!(
                "{}: line {lineno}: expected 14 columns, found {count}",
                path.display()
            )));
        }
        records.push(TrajectoryRecord {
            t: cols[0],
            min_u: cols[1],
            max_u: cols[2],
            min_phi: cols[3],
            max_phi: cols[4],
            min_phidot: cols[5],
            max_phidot: cols[6],
            max_grad_phi: cols[7],
            min_h_theta: cols[8],
            max_h_theta: cols[9],
            area: cols[10],
            rescaled_area: cols[11],
            osc_rescaled_u: cols[12],
            dt_used: cols[13],
        });
    }
    if records.is_empty() {
        return Err(Error::Input(format!(
            "{}: no data rows after the header",
            path.display()
        )));
    }
    Ok(records)
}

/// Render a state snapshot as CSV text: per-node coordinates plus the
/// derived fields.  Radial grids use `rho,...`, disk grids `r,theta,...`.
pub fn render_snapshot(state: &GraphState) -> Result<String> {
    let rows = snapshot_rows(state)?;
    let mut s = String::with_capacity(32 + rows.len() * 140);
    match state.grid().mode {
        GridMode::Radial => s.push_str("rho,u,v,H,grad_phi\n"),
        GridMode::Disk => s.push_str("r,theta,u,v,H,grad_phi\n"),
    }
    for row in rows {
        match row.coord2 {
            None => {
                let _ = writeln!(
                    s,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    row.coord1, row.u, row.v, row.h, row.grad_phi
                );
            }
            Some(c2) => {
                let _ = writeln!(
                    s,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    row.coord1, c2, row.u, row.v, row.h, row.grad_phi
                );
            }
        }
    }
    Ok(s)
}

/// Write a snapshot CSV file.
pub fn write_snapshot(path: &Path, state: &GraphState) -> Result<()> {
    std::fs::write(path, render_snapshot(state)?)?;
    Ok(())
}

/// Read any numeric CSV produced by this crate: returns the header line and
/// the parsed rows (each row must have as many columns as the header).
pub fn read_numeric_csv(path: &Path) -> Result<(String, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read '{}': {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Input(format!("{}: empty file", path.display())))?;
    let width = header.split(',').count();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|p| {
                p.parse::<f64>().map_err(|_| {
                    Error::Input(format!(
                        "{}: line {}: not a number: '{p}'",
                        path.display(),
                        idx + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != width {
            return Err(Error::Input(format!(
                "{}: line {}: expected {width} columns, found {}",
                path.display(),
                idx + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok((header.to_string(), rows))
}

/// Write the resolved configuration echo.
pub fn write_resolved_config(path: &Path, cfg: &FlowConfig) -> Result<()> {
    std::fs::write(path, cfg.render_resolved())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{Field, Grid};
    use crate::flow::FlowMode;
    use std::sync::Arc;

    fn sample_records() -> Vec<TrajectoryRecord> {
        (0..5)
            .map(|i| {
                let t = i as f64 * 0.1;
                TrajectoryRecord {
                    t,
                    min_u: 1.5 * (-t / 2.0).exp(),
                    max_u: 1.5 * (-t / 2.0).exp() + 1e-9,
                    min_phi: -0.3 + t,
                    max_phi: 0.4 + t,
                    min_phidot: -0.5,
                    max_phidot: -0.49,
                    max_grad_phi: 0.01,
                    min_h_theta: 1.9,
                    max_h_theta: 2.1,
                    area: 10.0 * (-t).exp(),
                    rescaled_area: 10.0,
                    osc_rescaled_u: 1e-7 * (1.0 + t),
                    dt_used: if i == 0 { 0.0 } else { 1.25e-5 },
                }
            })
            .collect()
    }

    #[test]
    fn header_is_frozen() {
        assert_eq!(
            TRAJECTORY_HEADER,
            "t,min_u,max_u,min_phi,max_phi,min_phidot,max_phidot,max_grad_phi,\
min_H_theta,max_H_theta,area,rescaled_area,osc_rescaled_u,dt_used"
        );
    }

    #[test]
    fn trajectory_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trajectory.csv");
        let records = sample_records();
        write_trajectory(&path, &records).unwrap();
        let back = read_trajectory(&path).unwrap();
        assert_eq!(back, records);
        // Re-rendering the parsed records is byte-identical.
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(render_trajectory(&back), text);
        assert!(text.starts_with(TRAJECTORY_HEADER));
    }

    #[test]
    fn malformed_trajectories_are_rejected_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");

        std::fs::write(&path, "wrong,header\n1,2\n").unwrap();
        let err = read_trajectory(&path).unwrap_err();
        assert!(err.to_string().contains("header"), "{err}");
        assert_eq!(err.exit_code(), 4);

        let mut text = render_trajectory(&sample_records());
        text.push_str("1.0,2.0,3.0\n");
        std::fs::write(&path, &text).unwrap();
        let err = read_trajectory(&path).unwrap_err();
        assert!(err.to_string().contains("line 7"), "{err}");
        assert!(err.to_string().contains("columns"), "{err}");

        // Replace the fourth column of the second data row with garbage.
        let text: String = render_trajectory(&sample_records())
            .lines()
            .enumerate()
            .map(|(i, line)| {
                let mut cols: Vec<&str> = line.split(',').collect();
                if i == 2 {
                    cols[3] = "abc";
                }
                cols.join(",") + "\n"
            })
            .collect();
        std::fs::write(&path, &text).unwrap();
        let err = read_trajectory(&path).unwrap_err();
        assert!(err.to_string().contains("not a number"), "{err}");
        assert!(err.to_string().contains("line 3"), "{err}");

        std::fs::write(&path, format!("{TRAJECTORY_HEADER}\n")).unwrap();
        let err = read_trajectory(&path).unwrap_err();
        assert!(err.to_string().contains("no data rows"), "{err}");
    }

    #[test]
    fn snapshots_render_for_both_grid_kinds() {
        let dir = tempfile::tempdir().unwrap();

        let grid = Arc::new(Grid::build(GridMode::Radial, 2, 1.0, 32, 1).unwrap());
        let state = GraphState {
            t: 0.0,
            c: 1.5f64.ln(),
            mode: FlowMode::Raw,
            u: Field::constant(&grid, 1.5),
        };
        let path = dir.path().join("snap_radial.csv");
        write_snapshot(&path, &state).unwrap();
        let (header, rows) = read_numeric_csv(&path).unwrap();
        assert_eq!(header, "rho,u,v,H,grad_phi");
        assert_eq!(rows.len(), 32);
        for row in &rows {
            assert!((row[1] - 1.5).abs() < 1e-15);
            assert!((row[2] - 1.0).abs() < 1e-12);
            assert!((row[3] - 2.0 / 1.5).abs() < 1e-10);
            assert!(row[4].abs() < 1e-12);
        }

        let grid = Arc::new(Grid::build(GridMode::Disk, 2, 1.0, 24, 16).unwrap());
        let state = GraphState {
            t: 0.0,
            c: 1.5f64.ln(),
            mode: FlowMode::Raw,
            u: Field::constant(&grid, 1.5),
        };
        let path = dir.path().join("snap_disk.csv");
        write_snapshot(&path, &state).unwrap();
        let (header, rows) = read_numeric_csv(&path).unwrap();
        assert_eq!(header, "r,theta,u,v,H,grad_phi");
        assert_eq!(rows.len(), 24 * 16);
        for row in &rows {
            assert!((row[2] - 1.5).abs() < 1e-15);
            assert!((row[4] - 2.0 / 1.5).abs() < 1e-10);
        }
    }

    #[test]
    fn resolved_config_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.resolved");
        let mut cfg = FlowConfig::default();
        cfg.apply_key("cells", "48").unwrap();
        write_resolved_config(&path, &cfg).unwrap();
        let back = FlowConfig::from_file(&path).unwrap();
        assert_eq!(back, cfg);
    }
}
