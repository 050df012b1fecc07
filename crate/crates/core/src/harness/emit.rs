//! Result files.
//!
//! * `csv`: one row per record, columns `chain, modulation, family,
//!   code_rate, snr_db, ebn0_db, bits, errors, ber, seed`.
//! * `json`: an array of objects with the same field names (schema in
//!   `schema/records.schema.json`).
//! * `plotdata`: one block per series, separated by two blank lines as
//!   gnuplot expects. Each block starts with `# <chain>/<modulation>/<rate>`
//!   and has columns `ebn0_db snr_db ber`; a BER of 0 is left blank so
//!   log-scale plots skip the point instead of clipping it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metrics::BerRecord;

use super::config::XAxis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Plotdata,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "plotdata" => Ok(Format::Plotdata),
            other => Err(Error::Config(format!(
                "unknown format {other:?}; expected csv, json or plotdata"
            ))),
        }
    }
}

/// Writes `records` to `path`.
pub fn emit(records: &[BerRecord], format: Format, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_records(records, format, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_records<W: Write>(records: &[BerRecord], format: Format, w: &mut W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to write".into()));
    }
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            for r in records {
                out.serialize(r)?;
            }
            out.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, records)?;
            writeln!(w)?;
        }
        Format::Plotdata => w.write_all(plotdata(records).as_bytes())?,
    }
    Ok(())
}

fn plotdata(records: &[BerRecord]) -> String {
    let mut out = String::new();
    for (i, s) in Series::group(records, XAxis::Ebn0Db).iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# {}", s.label);
        out.push_str("# ebn0_db snr_db ber\n");
        for r in &s.records {
            let _ = write!(out, "{} {}", num(r.ebn0_db), num(r.snr_db));
            if r.ber > 0.0 {
                let _ = write!(out, " {}", r.ber);
            }
            out.push('\n');
        }
    }
    out
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), |v| v.to_string())
}

pub fn parse_csv(text: &str) -> Result<Vec<BerRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_csv(path: &Path) -> Result<Vec<BerRecord>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_csv(&text)
}

/// Parses a symbol grid: one row per line, each row a sequence of `re im`
/// pairs separated by whitespace or commas. Blank lines and `#` comments
/// are skipped.
pub fn parse_symbol_grid(text: &str) -> Result<Vec<Vec<Complex64>>> {
    let mut grid = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        if !vals.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "line {}: odd number of values; expected re im pairs",
                n + 1
            )));
        }
        grid.push(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect());
    }
    if grid.is_empty() {
        return Err(Error::Config("symbol file is empty".into()));
    }
    Ok(grid)
}

/// Records sharing a label, ordered along an x axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub records: Vec<BerRecord>,
}

impl Series {
    /// Groups by [`BerRecord::label`] (sorted) and orders each group by `axis`.
    pub fn group(records: &[BerRecord], axis: XAxis) -> Vec<Series> {
        let mut map: BTreeMap<String, Vec<BerRecord>> = BTreeMap::new();
        for r in records {
            map.entry(r.label()).or_default().push(r.clone());
        }
        map.into_iter()
            .map(|(label, mut records)| {
                records.sort_by(|a, b| x_of(a, axis).total_cmp(&x_of(b, axis)));
                Series { label, records }
            })
            .collect()
    }
}

fn x_of(r: &BerRecord, axis: XAxis) -> f64 {
    match axis {
        XAxis::SnrDb => r.snr_db,
        XAxis::Ebn0Db => r.ebn0_db,
    }
    .unwrap_or(f64::NAN)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// A log-BER SVG chart with one polyline per series. Zero-BER points break
/// the line.
pub fn render_svg(records: &[BerRecord], axis: XAxis) -> Result<String> {
    let series = Series::group(records, axis);
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (x_of(r, axis), r.ber))
        .filter(|&(x, b)| x.is_finite() && b > 0.0)
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidParameter(
            "nothing to plot: no finite point with nonzero BER".into(),
        ));
    }
    let (mut x0, mut x1) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if x1 - x0 < 1e-9 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let lo = pts
        .iter()
        .map(|p| p.1.log10().floor())
        .fold(0.0f64, f64::min)
        .min(-1.0);
    let (w, h, m) = (640.0, 420.0, 50.0);
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |b: f64| m + b.log10() / lo * (h - 2.0 * m);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for d in 0..=(-lo as i32) {
        let y = sy(10f64.powi(-d));
        let _ = writeln!(
            svg,
            r##"<line x1="{m}" x2="{}" y1="{y:.1}" y2="{y:.1}" stroke="#ddd"/><text x="4" y="{:.1}">1e-{d}</text>"##,
            w - m,
            y + 4.0
        );
    }
    let name = match axis {
        XAxis::SnrDb => "SNR (dB)",
        XAxis::Ebn0Db => "Eb/N0 (dB)",
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}">{x0} .. {x1} {name}</text>"#,
        w / 2.0 - 60.0,
        h - 12.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, svg: &mut String| {
            if !run.is_empty() {
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    run.join(" ")
                );
                run.clear();
            }
        };
        for r in &s.records {
            let x = x_of(r, axis);
            if r.ber > 0.0 && x.is_finite() {
                run.push(format!("{:.1},{:.1}", sx(x), sy(r.ber)));
            } else {
                flush(&mut run, &mut svg);
            }
        }
        flush(&mut run, &mut svg);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            w - m - 160.0,
            m + 14.0 * i as f64,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(label: &str, x: f64, bits: u64, errors: u64) -> BerRecord {
        let mut r = BerRecord::new(bits, errors);
        r.chain = "punctured_bpsk".into();
        r.modulation = "bpsk".into();
        r.family = "psk".into();
        r.code_rate = label.into();
        r.ebn0_db = Some(x);
        r.snr_db = Some(x - 1.25);
        r.seed = 5;
        r
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![
            rec("1/2", 0.0, 1000, 37),
            rec("3/4", 1.5, 360110, 0),
            rec("1/2", 0.1, 3, 1),
        ];
        let mut buf = Vec::new();
        write_records(&recs, Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "chain,modulation,family,code_rate,snr_db,ebn0_db,bits,errors,ber,seed\n"
        ));
        assert_eq!(parse_csv(&text).unwrap(), recs);
    }

    #[test]
    fn plotdata_blocks() {
        let recs = vec![
            rec("1/2", 1.0, 100, 10),
            rec("3/4", 0.0, 100, 0),
            rec("1/2", 0.0, 100, 20),
        ];
        let text = plotdata(&recs);
        let blocks: Vec<&str> = text.split("\n\n\n").collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks[0].starts_with("# punctured_bpsk/bpsk/1/2"));
        assert!(blocks[0].ends_with("\n0 -1.25 0.2\n1 -0.25 0.1"));
        assert!(blocks[1].ends_with("\n0 -1.25\n"));
    }

    #[test]
    fn symbol_grid() {
        let g = parse_symbol_grid("# R\n1 0, 0 -1\n\n0.5 0.5 1 1\n").unwrap();
        assert_eq!(
            g,
            vec![
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)],
                vec![Complex64::new(0.5, 0.5), Complex64::new(1.0, 1.0)]
            ]
        );
        assert!(parse_symbol_grid("1 2 3").is_err());
        assert!(parse_symbol_grid("").is_err());
    }

    #[test]
    fn empty_input_rejected() {
        assert!(write_records(&[], Format::Json, &mut Vec::new()).is_err());
        assert!(render_svg(&[rec("1", 0.0, 10, 0)], XAxis::Ebn0Db).is_err());
    }

    #[test]
    fn svg_has_one_line_per_series() {
        let recs = vec![
            rec("1/2", 0.0, 100, 10),
            rec("1/2", 1.0, 100, 1),
            rec("3/4", 0.0, 100, 30),
            rec("3/4", 1.0, 100, 3),
        ];
        let svg = render_svg(&recs, XAxis::Ebn0Db).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
