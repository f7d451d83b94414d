//! In-memory datasets and their CSV rendering.
//!
//! Datasets render to a string first — determinism contracts are checked by
//! byte-comparing rendered output — and hit the filesystem only through
//! [`Dataset::write_to`]. Layout: '#'-prefixed metadata lines, a header row,
//! then data rows. UTF-8, '.' decimal separator, floats at 17 significant
//! digits so round-tripping is lossless.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::phase::{ATREvent, ManifoldCurve, SSBRecord};
use crate::sweep::{PhaseCell, SweepRecord, Table1Report};

/// One renderable table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    /// File name used by [`Dataset::write_to`], e.g. "sweep.csv".
    pub file_name: String,
    /// Free-form provenance lines, rendered with a leading "# ".
    pub metadata: Vec<String>,
    /// Column names.
    pub header: Vec<String>,
    /// Data cells, already formatted.
    pub rows: Vec<Vec<String>>,
}

/// Render a float with 17 significant digits; empty cell for NaN (the
/// marker for not-computed fields).
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

impl Dataset {
    /// The full CSV text: metadata lines, header, rows.
    pub fn render_csv(&self) -> String {
        let mut buf: Vec<u8> = Vec::new();
        for line in &self.metadata {
            // Metadata lines precede the CSV body; readers strip '#' lines.
            writeln!(buf, "# {line}").expect("writing to a Vec cannot fail");
        }
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(&self.header).expect("in-memory CSV write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory CSV write");
        }
        let buf = w.into_inner().expect("in-memory CSV flush");
        String::from_utf8(buf).expect("CSV output is UTF-8 by construction")
    }

    /// Write the rendered CSV into `dir`, creating the directory if needed.
    /// Returns the full path written.
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::InvalidSpec {
            message: format!("cannot create output directory {}: {e}", dir.display()),
        })?;
        let path = dir.join(&self.file_name);
        std::fs::write(&path, self.render_csv()).map_err(|e| Error::InvalidSpec {
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        Ok(path)
    }
}

/// Sweep records in the standard sweep schema.
pub fn sweep_dataset(records: &[SweepRecord], metadata: Vec<String>) -> Dataset {
    let mut header: Vec<String> = ["E_over_E0", "R_L", "R_R", "T", "pseudo_residual", "ssb_measure"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 1..=4 {
        header.push(format!("re_l{i}"));
        header.push(format!("im_l{i}"));
    }
    header.push("phase".into());

    let rows = records
        .iter()
        .map(|r| {
            let mut row = vec![
                fmt_float(r.energy_over_e0),
                fmt_float(r.refl_left),
                fmt_float(r.refl_right),
                fmt_float(r.trans),
                fmt_float(r.pseudo_residual),
                fmt_float(r.ssb_measure),
            ];
            for l in &r.eigenvalues {
                row.push(fmt_float(l.re));
                row.push(fmt_float(l.im));
            }
            row.push(phase_cell_text(&r.phase));
            row
        })
        .collect();
    Dataset {
        file_name: "sweep.csv".into(),
        metadata,
        header,
        rows,
    }
}

fn phase_cell_text(cell: &PhaseCell) -> String {
    match cell {
        PhaseCell::Label(overall) => overall.to_string(),
        PhaseCell::Indeterminate => "indeterminate".into(),
        PhaseCell::Gap => "gap".into(),
        PhaseCell::NotRequested => String::new(),
    }
}

/// Resonance events in the standard schema. `e0` converts energies to the
/// dimensionless axis.
pub fn atr_dataset(events: &[ATREvent], e0: f64, metadata: Vec<String>) -> Dataset {
    let mut metadata = metadata;
    let ambiguous: Vec<String> = events
        .iter()
        .filter(|e| e.ambiguous)
        .map(|e| fmt_float(e.energy / e0))
        .collect();
    if !ambiguous.is_empty() {
        metadata.push(format!(
            "ambiguous events (both reflectances < 1e-6) at E_over_E0: {}",
            ambiguous.join(" ")
        ));
    }
    Dataset {
        file_name: "atr.csv".into(),
        metadata,
        header: ["E_over_E0", "side", "T", "R_min", "tangent"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: events
            .iter()
            .map(|e| {
                vec![
                    fmt_float(e.energy / e0),
                    e.side.to_string(),
                    fmt_float(e.trans),
                    fmt_float(e.vanishing_reflectance),
                    e.tangent.to_string(),
                ]
            })
            .collect(),
    }
}

/// Breaking crossings in the standard single-column schema.
pub fn ssb_dataset(crossings: &[SSBRecord], e0: f64, metadata: Vec<String>) -> Dataset {
    Dataset {
        file_name: "ssb.csv".into(),
        metadata,
        header: vec!["E_over_E0_critical".into()],
        rows: crossings
            .iter()
            .map(|r| vec![fmt_float(r.energy / e0)])
            .collect(),
    }
}

/// Critical-gain curves flattened into the standard manifold schema.
pub fn manifold_dataset(curves: &[ManifoldCurve], e0: f64, metadata: Vec<String>) -> Dataset {
    let mut metadata = metadata;
    for c in curves {
        if !c.skipped.is_empty() {
            metadata.push(format!(
                "L = {} um: no crossing below the search cap at E_over_E0: {}",
                c.length,
                c.skipped
                    .iter()
                    .map(|e| fmt_float(e / e0))
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
        }
    }
    Dataset {
        file_name: "manifold.csv".into(),
        metadata,
        header: ["L_um", "V_R_over_E0", "E_over_E0", "V_I_over_E0_critical"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: curves
            .iter()
            .flat_map(|c| {
                c.points.iter().map(|pt| {
                    vec![
                        fmt_float(c.length),
                        fmt_float(c.v_real / e0),
                        fmt_float(pt.energy / e0),
                        fmt_float(pt.v_imag_critical / e0),
                    ]
                })
            })
            .collect(),
    }
}

/// Configuration-table report in the standard schema.
pub fn table1_dataset(report: &Table1Report) -> Dataset {
    let mut metadata = vec![
        format!(
            "reference point: E_over_E0 = {}",
            fmt_float(report.reference_energy_over_e0)
        ),
        format!(
            "phase-mix probe window: E_over_E0 in [{}, {}], {} points, \
             anchored just above the first breaking crossing",
            fmt_float(report.probe_window.0),
            fmt_float(report.probe_window.1),
            report.probe_points
        ),
    ];
    if let Some(ec) = report.anchor_crossing {
        metadata.push(format!(
            "anchor crossing: E_over_E0 = {}",
            fmt_float(ec)
        ));
    }
    Dataset {
        file_name: "table1.csv".into(),
        metadata,
        header: [
            "config",
            "case",
            "mix_observed",
            "case_paper",
            "mix_paper",
            "match",
            "note",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: report
            .entries
            .iter()
            .map(|e| {
                vec![
                    e.config.to_string(),
                    e.case_label.to_string(),
                    e.mix_observed.to_string(),
                    e.case_printed.to_string(),
                    e.mix_printed.to_string(),
                    e.matches.to_string(),
                    e.note.clone(),
                ]
            })
            .collect(),
    }
}

/// Eigenvalue-magnitude dataset behind the phase-diagram panels: log₁₀|λᵢ|
/// per grid point plus the phase verdict.
pub fn eigenlog_dataset(
    file_name: &str,
    records: &[SweepRecord],
    metadata: Vec<String>,
) -> Dataset {
    let mut header: Vec<String> = vec!["E_over_E0".into()];
    for i in 1..=4 {
        header.push(format!("log10_abs_l{i}"));
    }
    header.push("phase".into());
    Dataset {
        file_name: file_name.into(),
        metadata,
        header,
        rows: records
            .iter()
            .map(|r| {
                let mut row = vec![fmt_float(r.energy_over_e0)];
                for l in &r.eigenvalues {
                    row.push(fmt_float(l.norm().log10()));
                }
                row.push(phase_cell_text(&r.phase));
                row
            })
            .collect(),
    }
}
