//! CSV emission helpers.
//!
//! All numeric fields go through [`float_field`], which uses the shortest
//! round-trippable decimal form. Output bytes are therefore a pure function
//! of the computed values: repeated runs with the same config produce
//! byte-identical data files.

use std::path::Path;

use duet_core::dynamics::BlochTrajectory;

use crate::CliError;

/// Shortest decimal representation that parses back to the same f64.
pub fn float_field(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

/// Write one CSV table; every row must match the header width.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    writer
        .write_record(header)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writer
            .write_record(&row)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Io(format!("flushing {}: {e}", path.display())))?;
    Ok(())
}

pub const TRAJECTORY_HEADER: [&str; 6] = [
    "t",
    "alpha_x_lab",
    "alpha_y_lab",
    "alpha_z",
    "alpha_x_polaron",
    "alpha_y_polaron",
];

/// Rows for one trajectory: lab-frame coherences plus their polaron-frame
/// counterparts (lab divided by the dressing factor). The z component is
/// frame-invariant and appears once.
pub fn trajectory_rows(lab: &BlochTrajectory) -> Vec<Vec<String>> {
    let inv = 1.0 / lab.dressing;
    lab.times
        .iter()
        .zip(&lab.states)
        .map(|(t, a)| {
            vec![
                float_field(*t),
                float_field(a[0]),
                float_field(a[1]),
                float_field(a[2]),
                float_field(a[0] * inv),
                float_field(a[1] * inv),
            ]
        })
        .collect()
}

/// File name for a trajectory at temperature `t`, e.g. `trajectory_t5.csv`;
/// the temperature is printed in its shortest form so names stay readable
/// for round grid values and still unique for fractional ones.
pub fn trajectory_file_name(t: f64) -> String {
    format!("trajectory_t{}.csv", float_field(t).replace('-', "m"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_fields_round_trip() {
        for x in [0.0, 1.0, -1.5, 0.1, 2.0 / 3.0, 1e-17, 6.02e23] {
            assert_eq!(float_field(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(float_field(f64::NAN), "nan");
        assert_eq!(float_field(f64::INFINITY), "inf");
    }

    #[test]
    fn trajectory_file_names() {
        assert_eq!(trajectory_file_name(5.0), "trajectory_t5.csv");
        assert_eq!(trajectory_file_name(12.5), "trajectory_t12.5.csv");
    }

    #[test]
    fn table_rows_match_header() {
        use duet_core::{BlochVector, Frame};
        let traj = BlochTrajectory {
            frame: Frame::Lab,
            dressing: 0.5,
            times: vec![0.0, 1.0],
            states: vec![
                BlochVector::new(0.2, 0.0, 1.0),
                BlochVector::new(0.1, 0.05, 0.8),
            ],
        };
        let rows = trajectory_rows(&traj);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.len() == TRAJECTORY_HEADER.len()));
        // Polaron coherence = lab / B.
        assert_eq!(rows[0][4], "0.4");
    }
}
