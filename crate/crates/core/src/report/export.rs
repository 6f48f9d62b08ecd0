use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{render_markdown, Analysis};
use crate::error::{Error, Result};
use crate::spectral::{waterfall, TimeFrequencyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitKind {
    Edc,
    Modes,
    Reflections,
    Spectrum,
    Spectrogram,
    Waterfall,
    Octave,
    Fingerprint,
    Compliance,
    Metrics,
    Report,
}

impl EmitKind {
    pub const ALL: [EmitKind; 11] = [
        EmitKind::Edc,
        EmitKind::Modes,
        EmitKind::Reflections,
        EmitKind::Spectrum,
        EmitKind::Spectrogram,
        EmitKind::Waterfall,
        EmitKind::Octave,
        EmitKind::Fingerprint,
        EmitKind::Compliance,
        EmitKind::Metrics,
        EmitKind::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmitKind::Edc => "edc",
            EmitKind::Modes => "modes",
            EmitKind::Reflections => "reflections",
            EmitKind::Spectrum => "spectrum",
            EmitKind::Spectrogram => "spectrogram",
            EmitKind::Waterfall => "waterfall",
            EmitKind::Octave => "octave",
            EmitKind::Fingerprint => "fingerprint",
            EmitKind::Compliance => "compliance",
            EmitKind::Metrics => "metrics",
            EmitKind::Report => "report",
        }
    }

    fn formats(self) -> &'static [EmitFormat] {
        match self {
            EmitKind::Report => &[EmitFormat::Json, EmitFormat::Markdown],
            _ => &[EmitFormat::Csv, EmitFormat::Json],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
    Markdown,
}

/// An output file whose stem picks the data and whose extension picks the
/// format, e.g. `out/edc.csv` or `modes.json`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitRequest {
    pub path: PathBuf,
    pub kind: EmitKind,
    pub format: EmitFormat,
}

impl EmitRequest {
    pub fn parse(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("").to_ascii_lowercase();
        let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("").to_ascii_lowercase();
        let kind = EmitKind::ALL.into_iter().find(|k| k.name() == stem).ok_or_else(|| {
            let names: Vec<&str> = EmitKind::ALL.iter().map(|k| k.name()).collect();
            Error::InvalidArgument(format!(
                "unknown emit target {:?}; the file name must be one of {}",
                path.display().to_string(),
                names.join(", ")
            ))
        })?;
        let format = match ext.as_str() {
            "csv" => EmitFormat::Csv,
            "json" => EmitFormat::Json,
            "md" => EmitFormat::Markdown,
            _ => EmitFormat::Json,
        };
        if !kind.formats().contains(&format) || ext.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} cannot be written as .{ext}",
                kind.name()
            )));
        }
        Ok(Self { path, kind, format })
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn flag(v: Option<bool>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn grid_csv(grid: &TimeFrequencyGrid) -> Result<Vec<u8>> {
    let mut head = vec!["time_s".to_string()];
    head.extend(grid.freqs_hz.iter().map(|f| f.to_string()));
    let rows = grid.times_s.iter().zip(&grid.magnitude_db).map(|(t, row)| {
        let mut r = vec![t.to_string()];
        r.extend(row.iter().map(|v| v.to_string()));
        r
    });
    csv_bytes(&head, rows)
}

fn unavailable(what: &str, reason: Option<&str>) -> Error {
    Error::InvalidArgument(format!("{what} unavailable: {}", reason.unwrap_or("not computed")))
}

/// Writes one requested file.
pub fn emit(analysis: &Analysis, request: &EmitRequest, waterfall_slices: usize) -> Result<()> {
    let report = &analysis.report;
    let path = request.path.as_path();
    let csv = request.format == EmitFormat::Csv;
    match request.kind {
        EmitKind::Edc => {
            let edc = &analysis.edc;
            if csv {
                let rows = edc
                    .values_db
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![edc.time_s(i).to_string(), v.to_string()]);
                write_bytes(path, &csv_bytes(&header(&["time_s", "edc_db"]), rows)?)
            } else {
                write_json(path, edc)
            }
        }
        EmitKind::Modes => {
            if report.spatial.geometry.is_none() {
                return Err(unavailable("modes", report.spatial.modes.reason.as_deref()));
            }
            if csv {
                let rows = analysis.modes.iter().map(|m| {
                    let [x, y, z] = m.indices;
                    vec![
                        m.f_hz.to_string(),
                        x.to_string(),
                        y.to_string(),
                        z.to_string(),
                        m.mode_type.as_str().to_string(),
                    ]
                });
                write_bytes(path, &csv_bytes(&header(&["f_hz", "nx", "ny", "nz", "type"]), rows)?)
            } else {
                write_json(path, &analysis.modes)
            }
        }
        EmitKind::Reflections => {
            let paths = report
                .spatial
                .reflections
                .value
                .as_ref()
                .ok_or_else(|| unavailable("reflections", report.spatial.reflections.reason.as_deref()))?;
            if csv {
                let source = report.spatial.geometry.map(|g| g.source).unwrap_or_default();
                let mut rows = vec![vec![
                    "direct".to_string(),
                    source[0].to_string(),
                    source[1].to_string(),
                    source[2].to_string(),
                    paths.direct.path_length.to_string(),
                    paths.direct.arrival_s.to_string(),
                ]];
                rows.extend(paths.reflections.iter().map(|r| {
                    vec![
                        r.surface.as_str().to_string(),
                        r.image_source[0].to_string(),
                        r.image_source[1].to_string(),
                        r.image_source[2].to_string(),
                        r.path_length.to_string(),
                        r.arrival_s.to_string(),
                    ]
                }));
                let head = header(&["path", "source_x_m", "source_y_m", "source_z_m", "path_length_m", "arrival_s"]);
                write_bytes(path, &csv_bytes(&head, rows)?)
            } else {
                write_json(path, paths)
            }
        }
        EmitKind::Spectrum => {
            let s = analysis
                .spectrum
                .as_ref()
                .ok_or_else(|| unavailable("spectrum", report.spectral.reason.as_deref()))?;
            if csv {
                let smoothed = analysis.smoothed_spectrum.as_ref();
                let rows = s.freqs_hz.iter().zip(&s.magnitude_db).enumerate().map(|(k, (f, m))| {
                    vec![
                        f.to_string(),
                        m.to_string(),
                        cell(smoothed.map(|sm| sm.magnitude_db[k])),
                    ]
                });
                let head = header(&["freq_hz", "magnitude_db", "smoothed_db"]);
                write_bytes(path, &csv_bytes(&head, rows)?)
            } else {
                write_json(path, s)
            }
        }
        EmitKind::Spectrogram => {
            let g = analysis
                .spectrogram
                .as_ref()
                .ok_or_else(|| unavailable("spectrogram", report.spectral.reason.as_deref()))?;
            if csv {
                write_bytes(path, &grid_csv(g)?)
            } else {
                write_json(path, g)
            }
        }
        EmitKind::Waterfall => {
            let g = waterfall(&analysis.mono, waterfall_slices)?;
            if csv {
                write_bytes(path, &grid_csv(&g)?)
            } else {
                write_json(path, &g)
            }
        }
        EmitKind::Octave => {
            if csv {
                let rows = report.octave_bands.iter().map(|b| {
                    vec![
                        b.center_hz.to_string(),
                        b.lower_hz.to_string(),
                        b.upper_hz.to_string(),
                        cell(b.metrics.edt_s()),
                        cell(b.metrics.t20_s()),
                        cell(b.metrics.t30_s()),
                    ]
                });
                let head = header(&["center_hz", "lower_hz", "upper_hz", "edt_s", "t20_s", "t30_s"]);
                write_bytes(path, &csv_bytes(&head, rows)?)
            } else {
                write_json(path, &report.octave_bands)
            }
        }
        EmitKind::Fingerprint => {
            let f = &report.fingerprint;
            if csv {
                let rows = [
                    ("clarity", Some(f.clarity)),
                    ("definition", Some(f.definition)),
                    ("spatial", f.spatial.value),
                    ("intelligibility", f.intelligibility.value),
                ]
                .into_iter()
                .map(|(axis, v)| vec![axis.to_string(), cell(v)]);
                write_bytes(path, &csv_bytes(&header(&["axis", "value"]), rows)?)
            } else {
                write_json(path, f)
            }
        }
        EmitKind::Compliance => {
            if csv {
                let rows = report.compliance.iter().map(|r| {
                    vec![
                        r.space_type.clone(),
                        cell(r.thresholds.rt60_min_s),
                        cell(r.thresholds.rt60_max_s),
                        cell(r.thresholds.sti_min),
                        cell(r.measured.rt60_s),
                        cell(r.measured.sti),
                        flag(r.pass.rt60),
                        flag(r.pass.sti),
                        r.pass.overall.as_str().to_string(),
                        r.advisory.join(";"),
                    ]
                });
                let head = header(&[
                    "space_type", "rt60_min_s", "rt60_max_s", "sti_min", "rt60_s", "sti", "rt60_pass",
                    "sti_pass", "overall", "advisory",
                ]);
                write_bytes(path, &csv_bytes(&head, rows)?)
            } else {
                write_json(path, &report.compliance)
            }
        }
        EmitKind::Metrics => {
            let b = &report.broadband;
            let rows: Vec<(&str, Option<f64>, &str)> = vec![
                ("edt", b.decay.edt_s(), "s"),
                ("t20", b.decay.t20_s(), "s"),
                ("t30", b.decay.t30_s(), "s"),
                ("rt60", b.rt60.value.as_ref().map(|r| r.seconds), "s"),
                ("c80", Some(b.c80_db.db), "dB"),
                ("d50", Some(b.d50), ""),
                ("drr", Some(b.drr_db.db), "dB"),
                ("snr", Some(b.snr.snr_db), "dB"),
                ("sti", b.sti.value.value, ""),
                ("iacc", report.spatial.iacc.value, ""),
                ("wellness", report.wellness.score.value, ""),
            ];
            if csv {
                let rows = rows
                    .into_iter()
                    .map(|(name, v, unit)| vec![name.to_string(), cell(v), unit.to_string()]);
                write_bytes(path, &csv_bytes(&header(&["metric", "value", "unit"]), rows)?)
            } else {
                let map: serde_json::Map<String, serde_json::Value> = rows
                    .into_iter()
                    .map(|(name, v, _)| (name.to_string(), v.into()))
                    .collect();
                write_json(path, &map)
            }
        }
        EmitKind::Report => match request.format {
            EmitFormat::Markdown => write_bytes(path, render_markdown(report).as_bytes()),
            _ => write_json(path, report),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{analyze, AnalyzeOptions};
    use crate::signal::ImpulseResponse;

    fn analysis() -> Analysis {
        let h: Vec<f64> = (0..24_000).map(|n| (-(n as f64) / 2000.0).exp() * if n % 2 == 0 { 1.0 } else { -0.7 }).collect();
        analyze(&ImpulseResponse::mono(h, 48_000).unwrap(), "x", &AnalyzeOptions::default()).unwrap()
    }

    #[test]
    fn parse_requests() {
        let r = EmitRequest::parse("out/edc.csv").unwrap();
        assert_eq!((r.kind, r.format), (EmitKind::Edc, EmitFormat::Csv));
        let r = EmitRequest::parse("Modes.JSON").unwrap();
        assert_eq!((r.kind, r.format), (EmitKind::Modes, EmitFormat::Json));
        assert!(EmitRequest::parse("report.md").is_ok());
        assert!(EmitRequest::parse("edc.md").is_err());
        assert!(EmitRequest::parse("nonsense.csv").is_err());
        assert!(EmitRequest::parse("edc").is_err());
    }

    #[test]
    fn edc_csv_contract() {
        let a = analysis();
        let dir = tempfile::tempdir().unwrap();
        let req = EmitRequest::parse(dir.path().join("edc.csv")).unwrap();
        emit(&a, &req, 40).unwrap();
        let text = fs::read_to_string(&req.path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("time_s,edc_db"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 0.0]);
    }

    #[test]
    fn grid_csv_layout() {
        let a = analysis();
        let dir = tempfile::tempdir().unwrap();
        let req = EmitRequest::parse(dir.path().join("waterfall.csv")).unwrap();
        emit(&a, &req, 8).unwrap();
        let text = fs::read_to_string(&req.path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        let head: Vec<&str> = lines[0].split(',').collect();
        assert_eq!(head[0], "time_s");
        assert!(lines.iter().all(|l| l.split(',').count() == head.len()));
    }

    #[test]
    fn geometry_outputs_need_geometry() {
        let a = analysis();
        let dir = tempfile::tempdir().unwrap();
        for name in ["modes.csv", "reflections.json"] {
            let req = EmitRequest::parse(dir.path().join(name)).unwrap();
            let err = emit(&a, &req, 40).unwrap_err().to_string();
            assert!(err.contains("room geometry not provided"), "{err}");
        }
    }

    #[test]
    fn every_other_kind_writes() {
        let a = analysis();
        let dir = tempfile::tempdir().unwrap();
        for name in [
            "spectrum.csv", "spectrum.json", "spectrogram.csv", "octave.csv", "fingerprint.json",
            "compliance.csv", "metrics.csv", "metrics.json", "report.json", "report.md", "edc.json",
        ] {
            let req = EmitRequest::parse(dir.path().join(name)).unwrap();
            emit(&a, &req, 40).unwrap();
            assert!(fs::metadata(&req.path).unwrap().len() > 0, "{name}");
        }
        let text = fs::read_to_string(dir.path().join("metrics.json")).unwrap();
        assert!(!text.contains("NaN") && !text.contains("inf"));
    }
}
