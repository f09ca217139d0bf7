//! Parsing of squeezing values and sweep grids from command-line strings.
//!
//! Squeezing accepts either a variance in (0, 1] or a decibel figure with a
//! `db` suffix (`3db` means `10^(−3/10) ≈ 0.5012`). Grids accept a single
//! value, a comma list (`1,0.5,0.1`), or a `lo:hi` range expanded to the
//! configured number of points.

use poltel::sweeps::closed_grid;

pub fn parse_squeeze(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let v = if let Some(db) = t.strip_suffix("db") {
        let db: f64 = db
            .trim()
            .parse()
            .map_err(|_| format!("invalid dB value `{s}`"))?;
        if db < 0.0 {
            return Err(format!("squeezing in dB must be >= 0, got `{s}`"));
        }
        10f64.powf(-db / 10.0)
    } else {
        t.parse()
            .map_err(|_| format!("invalid squeezing value `{s}`"))?
    };
    if !(v > 0.0 && v <= 1.0) {
        return Err(format!(
            "squeezed variance must lie in (0, 1], got {v} (from `{s}`)"
        ));
    }
    Ok(v)
}

pub fn parse_squeeze_grid(s: &str, n: usize) -> Result<Vec<f64>, String> {
    if let Some((lo, hi)) = s.split_once(':') {
        let lo = parse_squeeze(lo)?;
        let hi = parse_squeeze(hi)?;
        if hi <= lo {
            return Err(format!("range `{s}` needs lo < hi"));
        }
        if n < 2 {
            return Err("a range needs --grid >= 2".into());
        }
        Ok(closed_grid(lo, hi, n))
    } else if s.contains(',') {
        s.split(',').map(parse_squeeze).collect()
    } else {
        Ok(vec![parse_squeeze(s)?])
    }
}

pub fn parse_gain_grid(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parse_one = |x: &str| -> Result<f64, String> {
        x.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid gain `{x}`"))
    };
    if let Some((lo, hi)) = s.split_once(':') {
        let lo = parse_one(lo)?;
        let hi = parse_one(hi)?;
        if hi <= lo {
            return Err(format!("range `{s}` needs lo < hi"));
        }
        if n < 2 {
            return Err("a range needs --grid >= 2".into());
        }
        Ok(closed_grid(lo, hi, n))
    } else if s.contains(',') {
        s.split(",").map(parse_one).collect()
    } else {
        Ok(vec![parse_one(s)?])
    }
}

/// `plus:0.5`, `minus:3db`, or a bare value (amplitude-squeezed by default).
pub fn parse_mode_squeeze(s: &str) -> Result<(poltel::optics::Quadrature, f64), String> {
    use poltel::optics::Quadrature;
    if let Some((which, value)) = s.split_once(':') {
        let quad = match which.trim().to_ascii_lowercase().as_str() {
            "plus" | "amplitude" => Quadrature::Amplitude,
            "minus" | "phase" => Quadrature::Phase,
            other => return Err(format!("unknown quadrature `{other}` (plus|minus)")),
        };
        Ok((quad, parse_squeeze(value)?))
    } else {
        Ok((Quadrature::Amplitude, parse_squeeze(s)?))
    }
}

/// `vp[,vm]` classical signal variances.
pub fn parse_signal_pair(s: &str) -> Result<(f64, f64), String> {
    let parse_one = |x: &str| -> Result<f64, String> {
        let v: f64 = x
            .trim()
            .parse()
            .map_err(|_| format!("invalid signal variance `{x}`"))?;
        if v < 0.0 {
            return Err(format!("signal variance must be >= 0, got {v}"));
        }
        Ok(v)
    };
    match s.split_once(',') {
        Some((a, b)) => Ok((parse_one(a)?, parse_one(b)?)),
        None => Ok((parse_one(s)?, 0.0)),
    }
}
