//! Plain CSV for series and results.
//!
//! Files may start with `# key=value` lines. Series files understand
//! `sample_rate` and `columns` (comma-separated names); other keys, such as
//! the provenance block written with every result, are carried along but
//! ignored on load. Numbers are written with 17 significant digits so a
//! save/load cycle reproduces every `f64` exactly.

use std::io::Write;
use std::path::Path;

use cmc::{CausalStrengthProfile, CcmCurve, CmcSurface, TimeSeries};
use csv::{ReaderBuilder, Trim, WriterBuilder};

use crate::error::{CliError, Result};

/// Named columns loaded from or written to a series file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub names: Vec<String>,
    pub series: Vec<TimeSeries>,
}

impl SeriesTable {
    pub fn column(&self, name: &str) -> Result<&TimeSeries> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.series[i])
            .ok_or_else(|| {
                CliError::Usage(format!("no column {name:?}; available: {}", self.names.join(", ")))
            })
    }
}

/// Ordered `key=value` header lines.
pub type Header = Vec<(String, String)>;

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn header_lines(text: &str) -> Header {
    text.lines()
        .map(str::trim)
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

pub fn parse_csv(text: &str) -> Result<SeriesTable> {
    let header = header_lines(text);
    let lookup = |key: &str| header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let sample_rate = match lookup("sample_rate") {
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| CliError::Data(format!("invalid sample_rate header {v:?}")))?,
        None => {
            log::warn!("no sample_rate header; assuming 1.0");
            1.0
        }
    };
    let mut names: Option<Vec<String>> =
        lookup("columns").map(|v| v.split(',').map(|s| s.trim().to_string()).collect());

    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = names.as_ref().map(Vec::len);
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first && names.is_none() && record.iter().all(|c| c.parse::<f64>().is_err()) {
            names = Some(record.iter().map(str::to_string).collect());
            width = Some(record.len());
            first = false;
            continue;
        }
        first = false;
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(CliError::Data(format!(
                "line {line}: expected {w} columns, found {}",
                record.len()
            )));
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); w];
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Data(format!("line {line}, column {}: {cell:?} is not a number", j + 1))
            })?;
            columns[j].push(v);
        }
    }
    if columns.is_empty() {
        return Err(CliError::Data("no data rows".into()));
    }
    let names = names.unwrap_or_else(|| (0..columns.len()).map(|j| format!("c{j}")).collect());
    let series = columns
        .into_iter()
        .map(|c| TimeSeries::new(c, sample_rate).map_err(|e| CliError::Data(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesTable { names, series })
}

pub fn load_csv(path: &Path) -> Result<SeriesTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_csv(&text).map_err(|e| e.context(&path.display().to_string()))
}

fn render(header: &[(String, String)], columns: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = Vec::new();
    for (k, v) in header {
        writeln!(out, "# {k}={v}").expect("write to memory");
    }
    let mut w = WriterBuilder::new().from_writer(out);
    w.write_record(columns).expect("write to memory");
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("ASCII output")
}

pub fn render_series(table: &SeriesTable, provenance: &[(String, String)]) -> Result<String> {
    let Some(first) = table.series.first() else {
        return Err(CliError::Usage("nothing to write".into()));
    };
    if table.series.iter().any(|s| s.len() != first.len() || s.sample_rate() != first.sample_rate()) {
        return Err(CliError::Usage("columns must share length and sample rate".into()));
    }
    let mut header = vec![
        ("sample_rate".to_string(), format_f64(first.sample_rate())),
        ("columns".to_string(), table.names.join(",")),
    ];
    header.extend_from_slice(provenance);
    // the names live in the header, so the data block has no title row
    let mut out = Vec::new();
    for (k, v) in &header {
        writeln!(out, "# {k}={v}").expect("write to memory");
    }
    let mut w = WriterBuilder::new().from_writer(out);
    for i in 0..first.len() {
        w.write_record(table.series.iter().map(|s| format_f64(s.samples()[i])))
            .expect("write to memory");
    }
    Ok(String::from_utf8(w.into_inner().expect("flush to memory")).expect("ASCII output"))
}

pub fn save_csv(path: &Path, table: &SeriesTable, provenance: &[(String, String)]) -> Result<()> {
    write_atomic(path, &render_series(table, provenance)?)
}

/// Long form: one row per (shift, frequency).
pub fn render_surface(surface: &CmcSurface, header: &[(String, String)]) -> String {
    let mut header = header.to_vec();
    header.push(("direction".into(), surface.direction_label.clone()));
    header.push(("normalized".into(), surface.normalized.to_string()));
    let rows = surface.shifts.iter().enumerate().flat_map(|(si, &s)| {
        surface.frequencies.iter().enumerate().map(move |(fi, &f)| {
            vec![s.to_string(), format_f64(f), format_f64(surface.value(si, fi))]
        })
    });
    render(&header, &["shift_samples", "frequency_hz", "coherence"], rows)
}

pub fn render_profile(profile: &CausalStrengthProfile, header: &[(String, String)]) -> String {
    let mut header = header.to_vec();
    header.push(("direction".into(), profile.direction_label.clone()));
    let rows = profile.frequencies.iter().enumerate().map(|(i, &f)| {
        vec![
            format_f64(f),
            format_f64(profile.strength[i]),
            profile.delay[i].map_or(String::new(), |d| d.to_string()),
        ]
    });
    render(&header, &["frequency_hz", "strength", "delay_samples"], rows)
}

pub fn render_ccm(curve: &CcmCurve, header: &[(String, String)]) -> String {
    let mut header = header.to_vec();
    header.push(("direction".into(), curve.direction_label.clone()));
    let rows = curve
        .shifts
        .iter()
        .zip(&curve.scores)
        .map(|(s, v)| vec![s.to_string(), format_f64(*v)]);
    render(&header, &["shift_samples", "score"], rows)
}

pub fn render_convergence(points: &[(usize, f64)], label: &str, header: &[(String, String)]) -> String {
    let mut header = header.to_vec();
    header.push(("direction".into(), label.to_string()));
    let rows = points.iter().map(|(l, v)| vec![l.to_string(), format_f64(*v)]);
    render(&header, &["library_length", "score"], rows)
}

/// Generic numeric table with the given column names.
pub fn render_table(header: &[(String, String)], columns: &[&str], rows: &[Vec<String>]) -> String {
    render(header, columns, rows.iter().cloned())
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_columns_with_rate() {
        let mut text = String::from("# sample_rate=200\n");
        for i in 0..100 {
            text.push_str(&format!("{},{}\n", i, 2 * i));
        }
        let t = parse_csv(&text).unwrap();
        assert_eq!(t.series.len(), 2);
        assert_eq!(t.series[1].len(), 100);
        assert_eq!(t.series[0].sample_rate(), 200.0);
        assert_eq!(t.names, vec!["c0", "c1"]);
    }

    #[test]
    fn missing_rate_defaults_to_one() {
        let t = parse_csv("1,2\n3,4\n").unwrap();
        assert_eq!(t.series[0].sample_rate(), 1.0);
    }

    #[test]
    fn title_row_and_columns_header() {
        let t = parse_csv("x,y\n1,2\n3,4\n").unwrap();
        assert_eq!(t.names, vec!["x", "y"]);
        assert_eq!(t.column("y").unwrap().samples(), &[2.0, 4.0]);
        let t = parse_csv("# columns=a, b\n1,2\n").unwrap();
        assert_eq!(t.names, vec!["a", "b"]);
        assert!(t.column("c").is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_csv("# sample_rate=1\n1,2\n3,oops\n").unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("column 2"), "{err}");
        let err = parse_csv("1,2\n3\n").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("expected 2 columns"), "{err}");
        assert!(parse_csv("# sample_rate=fast\n1\n").is_err());
        assert!(parse_csv("# only a comment\n").is_err());
    }

    #[test]
    fn surface_long_form() {
        let s = CmcSurface {
            shifts: vec![-1, 0],
            frequencies: vec![0.0, 0.5],
            values: vec![0.1, 0.2, 0.3, 0.4],
            degenerate: vec![false; 4],
            direction_label: "x->y".into(),
            normalized: false,
        };
        let text = render_surface(&s, &[("seed".into(), "3".into())]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# seed=3");
        assert_eq!(lines[3], "shift_samples,frequency_hz,coherence");
        assert_eq!(lines.len(), 8);
        assert!(lines[5].starts_with("-1,5.0000000000000000e-1,"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            cols in prop::collection::vec(prop::collection::vec(-1e12f64..1e12, 5), 1..4),
            rate in 0.1f64..1000.0,
        ) {
            let table = SeriesTable {
                names: (0..cols.len()).map(|i| format!("s{i}")).collect(),
                series: cols.iter().map(|c| TimeSeries::new(c.clone(), rate).unwrap()).collect(),
            };
            let text = render_series(&table, &[("seed".into(), "1".into())]).unwrap();
            prop_assert_eq!(parse_csv(&text).unwrap(), table);
        }
    }
}
