use std::fmt::Write;

use super::{Measured, MetricsReport};
use crate::compliance::Verdict;
use crate::decay::DecayFit;

fn num(v: f64) -> String {
    format!("{v:.3}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), num)
}

fn measured(m: &Measured<f64>) -> String {
    match (m.value, &m.reason) {
        (Some(v), _) => num(v),
        (None, Some(reason)) => format!("n/a ({reason})"),
        (None, None) => "n/a".into(),
    }
}

fn fit_row(out: &mut String, name: &str, unit: &str, fit: &DecayFit) {
    let value = match (fit.seconds, &fit.reason) {
        (Some(s), _) => num(s),
        (None, Some(r)) => format!("n/a ({r})"),
        (None, None) => "n/a".into(),
    };
    let _ = writeln!(out, "| {name} | {value} | {unit} | r2 {} |", opt(fit.r2));
}

fn mark(pass: Option<bool>) -> &'static str {
    match pass {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "-",
    }
}

/// Human-readable report with input metadata, metric tables, visualization
/// data, the compliance summary and methodology notes.
pub fn render_markdown(report: &MetricsReport) -> String {
    let mut out = String::new();
    let b = &report.broadband;
    let _ = writeln!(out, "# Room acoustics report\n");

    let _ = writeln!(out, "## Input file metadata\n");
    let _ = writeln!(out, "| Field | Value |\n|---|---|");
    let _ = writeln!(out, "| Source | {} |", report.source);
    let _ = writeln!(out, "| Channels | {} |", report.input.channels);
    let _ = writeln!(out, "| Sample rate | {} Hz |", report.input.sample_rate);
    let _ = writeln!(out, "| Duration | {} s |", num(report.input.duration_s));
    let _ = writeln!(out, "| Leading samples trimmed | {} |", report.preprocess.samples_trimmed_leading);
    let _ = writeln!(out, "| Truncated to 10 s | {} |", report.preprocess.truncated);
    let _ = writeln!(out, "| Schema version | {} |\n", report.schema_version);

    let _ = writeln!(out, "## Computed metrics\n");
    let _ = writeln!(out, "### Broadband\n");
    let _ = writeln!(out, "| Metric | Value | Unit | Notes |\n|---|---|---|---|");
    fit_row(&mut out, "EDT", "s", &b.decay.edt);
    fit_row(&mut out, "T20", "s", &b.decay.t20);
    fit_row(&mut out, "T30", "s", &b.decay.t30);
    match &b.rt60.value {
        Some(r) => {
            let _ = writeln!(out, "| RT60 | {} | s | from {} |", num(r.seconds), r.estimate);
        }
        None => {
            let _ = writeln!(out, "| RT60 | n/a | s | {} |", b.rt60.reason.as_deref().unwrap_or(""));
        }
    }
    let sat = |s: bool| if s { "saturated" } else { "" };
    let _ = writeln!(out, "| C80 | {} | dB | {} |", num(b.c80_db.db), sat(b.c80_db.saturated));
    let _ = writeln!(out, "| D50 | {} | - | |", num(b.d50));
    let _ = writeln!(out, "| DRR | {} | dB | {} |", num(b.drr_db.db), sat(b.drr_db.saturated));
    let snr_note = match b.snr.source {
        crate::energy::SnrSource::Estimated => "estimated",
        crate::energy::SnrSource::UserSupplied => "user supplied",
        crate::energy::SnrSource::Default => "default",
    };
    let _ = writeln!(out, "| SNR | {} | dB | {snr_note} |", num(b.snr.snr_db));
    let _ = writeln!(out, "| STI (proxy) | {} | - | proxy-based, advisory |", measured(&b.sti.value));
    let _ = writeln!(out, "| IACC | {} | - | |", measured(&report.spatial.iacc));
    let _ = writeln!(out, "| Wellness | {} | /100 | |\n", measured(&report.wellness.score));
    for note in &report.wellness.notes {
        let _ = writeln!(out, "- {note}");
    }
    if !report.wellness.notes.is_empty() {
        out.push('\n');
    }

    let _ = writeln!(out, "### Octave bands\n");
    let _ = writeln!(out, "| Center (Hz) | Band (Hz) | EDT (s) | T20 (s) | T30 (s) |\n|---|---|---|---|---|");
    for band in &report.octave_bands {
        let _ = writeln!(
            out,
            "| {} | {}-{} | {} | {} | {} |",
            band.center_hz,
            band.lower_hz.round(),
            band.upper_hz.round(),
            opt(band.metrics.edt_s()),
            opt(band.metrics.t20_s()),
            opt(band.metrics.t30_s()),
        );
    }
    for omitted in &report.omitted_bands {
        let _ = writeln!(out, "| {} | omitted: {} | | | |", omitted.center_hz, omitted.reason);
    }
    out.push('\n');

    let _ = writeln!(out, "### Room\n");
    let s = &report.spatial;
    match &s.geometry {
        Some(g) => {
            let _ = writeln!(
                out,
                "- Dimensions {} x {} x {} m, volume {} m^3",
                num(g.length),
                num(g.width),
                num(g.height),
                num(g.volume())
            );
        }
        None => {
            let _ = writeln!(out, "- Geometry: room geometry not provided");
        }
    }
    match &s.schroeder.value {
        Some(f) => {
            let _ = writeln!(out, "- Schroeder frequency {} Hz ({})", num(f.hz), f.expression);
        }
        None => {
            let _ = writeln!(out, "- Schroeder frequency: {}", s.schroeder.reason.as_deref().unwrap_or("n/a"));
        }
    }
    if let Some(m) = &s.modes.value {
        let _ = writeln!(
            out,
            "- {} modes up to {} Hz ({} axial, {} tangential, {} oblique)",
            m.total, m.f_max_hz, m.axial, m.tangential, m.oblique
        );
        for mode in &m.lowest {
            let [x, y, z] = mode.indices;
            let _ = writeln!(out, "  - {} Hz ({x},{y},{z}) {}", num(mode.f_hz), mode.mode_type.as_str());
        }
    }
    if let Some(p) = &s.reflections.value {
        let _ = writeln!(out, "- Direct path {} m, {} ms", num(p.direct.path_length), num(p.direct.arrival_s * 1e3));
        for r in &p.reflections {
            let _ = writeln!(
                out,
                "  - {} reflection {} m, {} ms",
                r.surface.as_str(),
                num(r.path_length),
                num(r.arrival_s * 1e3)
            );
        }
    }
    out.push('\n');

    let _ = writeln!(out, "## Visualization data\n");
    let f = &report.fingerprint;
    let _ = writeln!(out, "| Fingerprint axis | Value |\n|---|---|");
    let _ = writeln!(out, "| Clarity | {} |", num(f.clarity));
    let _ = writeln!(out, "| Definition | {} |", num(f.definition));
    let _ = writeln!(out, "| Spatial | {} |", measured(&f.spatial));
    let _ = writeln!(out, "| Intelligibility | {} |\n", measured(&f.intelligibility));
    if let Some(sp) = &report.spectral.value {
        let _ = writeln!(
            out,
            "Spectrum: {}-point FFT, peak at {} Hz; spectrogram of {} frames ({} s window, {} s hop).\n",
            sp.fft_len,
            num(sp.peak_hz),
            sp.spectrogram_frames,
            num(sp.window_s),
            num(sp.hop_s)
        );
    }
    let _ = writeln!(
        out,
        "Plot data (EDC, spectrum, spectrogram, waterfall, modes, reflections) is written with `--emit`.\n"
    );

    let _ = writeln!(out, "## Standards compliance summary\n");
    let _ = writeln!(out, "| Space type | RT60 limit | STI limit | RT60 | STI | Overall | Advisory |\n|---|---|---|---|---|---|---|");
    for row in &report.compliance {
        let t = &row.thresholds;
        let rt_limit = match (t.rt60_min_s, t.rt60_max_s) {
            (Some(lo), Some(hi)) => format!("{lo}-{hi} s"),
            (None, Some(hi)) => format!("<= {hi} s"),
            (Some(lo), None) => format!(">= {lo} s"),
            (None, None) => "-".into(),
        };
        let sti_limit = t.sti_min.map_or("-".into(), |s| format!(">= {s:.2}"));
        let overall = match row.pass.overall {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "N/A",
        };
        let name = match &row.standard {
            Some(std) => format!("{} ({std})", row.space_type),
            None => row.space_type.clone(),
        };
        let _ = writeln!(
            out,
            "| {name} | {rt_limit} | {sti_limit} | {} | {} | {overall} | {} |",
            mark(row.pass.rt60),
            mark(row.pass.sti),
            row.advisory.join(", ")
        );
    }
    out.push('\n');

    let _ = writeln!(out, "## Methodology notes\n");
    let _ = writeln!(
        out,
        "- Preprocessing trims leading samples below 1e-4 of the peak, truncates to 10 s and normalizes the joint peak."
    );
    let _ = writeln!(
        out,
        "- Decay times come from least-squares fits to the Schroeder backward-integrated energy decay curve: EDT over 0 to -10 dB, T20 over -5 to -25 dB, T30 over -5 to -35 dB. RT60 is T30 when available, otherwise T20."
    );
    let _ = writeln!(
        out,
        "- Octave bands use fourth-order Butterworth band-pass filters with edges at fc/sqrt(2) and fc*sqrt(2)."
    );
    let _ = writeln!(
        out,
        "- C80 and D50 split the energy at 80 ms and 50 ms. DRR takes the direct sound as the peak +/- 2.5 ms."
    );
    let _ = writeln!(
        out,
        "- STI is a proxy built from RT60 and SNR. It is not the full modulation-transfer method and compliance rows using it are advisory."
    );
    let _ = writeln!(out, "\nReferences:\n");
    let _ = writeln!(out, "- ISO 3382-1:2009, Measurement of room acoustic parameters.");
    let _ = writeln!(out, "- M. R. Schroeder, New method of measuring reverberation time, JASA 37 (1965).");
    let _ = writeln!(out, "- J. B. Allen and D. A. Berkley, Image method for efficiently simulating small-room acoustics, JASA 65 (1979).");
    let _ = writeln!(out, "- IEC 60268-16, Objective rating of speech intelligibility by speech transmission index.");
    let _ = writeln!(out, "- ANSI/ASA S12.60, Acoustical performance criteria for schools.");
    out
}
