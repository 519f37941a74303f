//! Number formatting and CSV/JSON writers.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use anyon_entropy::spectrum::{EntropyCurve, EntropySample};

/// Eigenvalue columns in the sweep CSV.
pub const EIGEN_COLUMNS: usize = 8;

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn csv_header() -> Vec<String> {
    let mut h = vec!["eta".to_string(), "entropy".into(), "trace_error".into()];
    h.extend((0..EIGEN_COLUMNS).map(|k| format!("lambda{k}")));
    h.extend(["M".to_string(), "K".into(), "L".into(), "status".into()]);
    h
}

pub fn csv_row(s: &EntropySample) -> Vec<String> {
    let mut row = vec![sig12(s.eta), sig12(s.entropy), sig12(s.trace_error)];
    row.extend((0..EIGEN_COLUMNS).map(|k| s.eigenvalues.get(k).map_or_else(String::new, |v| sig12(*v))));
    row.extend([
        s.basis_dim.to_string(),
        s.trace_cap.to_string(),
        s.series_len.to_string(),
    ]);
    row.push(match &s.error {
        None => "ok".into(),
        Some(e) => format!("failed: {e}"),
    });
    row
}

pub fn write_csv<W: Write>(out: W, samples: &[EntropySample], stamp: Option<&str>) -> Result<()> {
    let mut out = out;
    if let Some(ts) = stamp {
        writeln!(out, "# generated {ts}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header())?;
    for s in samples {
        w.write_record(csv_row(s))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated: Option<&'a str>,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, body: &T, stamp: Option<&str>) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &Stamped { generated: stamp, body })?;
    writeln!(out)?;
    Ok(())
}

pub fn write_curve<W: Write>(out: W, curve: &EntropyCurve, json: bool, stamp: Option<&str>) -> Result<()> {
    if json {
        write_json(out, curve, stamp)
    } else {
        write_csv(out, &curve.samples, stamp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0 * 1e6), "666666.666667");
        assert_eq!(sig12(1.5e-9), "1.5e-09");
        assert_eq!(sig12(-2.5e13), "-2.5e+13");
        assert_eq!(sig12(f64::NAN), "nan");
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(6.87111516296e-5), "6.87111516296e-05");
        assert_eq!(sig12(1.25e-4), "0.000125");
        assert_eq!(sig12(123456789012.0), "123456789012");
    }

    #[test]
    fn header_order() {
        let h = csv_header().join(",");
        assert_eq!(
            h,
            "eta,entropy,trace_error,lambda0,lambda1,lambda2,lambda3,lambda4,lambda5,lambda6,lambda7,M,K,L,status"
        );
    }
}
