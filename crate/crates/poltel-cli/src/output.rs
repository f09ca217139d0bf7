//! Deterministic CSV and JSON writers. CSV uses '.' as the decimal separator
//! and 12 significant digits; JSON mirrors the same rows. Output bytes are a
//! pure function of the rows, so repeated runs with one configuration produce
//! identical files.

use poltel::sweeps::{FidelityRow, TvRow};
use std::io::{self, Write};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutFormat {
    Csv,
    Json,
}

impl OutFormat {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutFormat::Csv),
            "json" => Ok(OutFormat::Json),
            other => Err(format!("unknown format `{other}` (csv|json)")),
        }
    }
}

/// 12 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn render_fidelity_rows(rows: &[FidelityRow], format: OutFormat) -> String {
    match format {
        OutFormat::Csv => {
            let mut out = String::from(
                "scheme,v_sq,v_sq3,eps1,eps2,fidelity,fidelity_closed_form,abs_diff\n",
            );
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.scheme,
                    fmt_f64(r.v_sq),
                    fmt_f64(r.v_sq3),
                    fmt_opt(r.eps1),
                    fmt_opt(r.eps2),
                    fmt_f64(r.fidelity),
                    fmt_opt(r.fidelity_closed_form),
                    fmt_opt(r.abs_diff),
                ));
            }
            out
        }
        OutFormat::Json => to_json(rows),
    }
}

pub fn render_tv_rows(rows: &[TvRow], format: OutFormat) -> String {
    match format {
        OutFormat::Csv => {
            let mut out = String::from("scheme,segment,v_sq,gain,t_q,v_cv\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.scheme,
                    r.segment,
                    fmt_f64(r.v_sq),
                    fmt_f64(r.gain),
                    fmt_f64(r.t_q),
                    fmt_f64(r.v_cv),
                ));
            }
            out
        }
        OutFormat::Json => to_json(rows),
    }
}

pub fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable rows");
    s.push('\n');
    s
}

/// Write to the given path, or stdout when no path is set.
pub fn emit(content: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}
