//! CSV and SVG result emission.
//!
//! CSV files are LF-terminated, one header line plus one line per row,
//! fields in declaration order. Reals are rendered with 17 significant
//! digits so emitted values parse back bit-identically.

use std::io::Write;
use std::path::Path;

use crate::bench::BenchRow;
use crate::controller::TraceRecord;
use crate::error::{Error, Result};

/// Render a real with 17 significant digits (round-trip exact for f64).
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A row type with a fixed CSV schema.
pub trait CsvRecord {
    const HEADER: &'static str;
    fn csv_line(&self) -> String;
}

impl CsvRecord for BenchRow {
    const HEADER: &'static str =
        "instance_id,backend,N,seed,linf_error,wall_time_ns,hoeffding_bound";

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.instance_id,
            self.backend,
            self.n,
            self.seed,
            format_real(self.linf_error),
            self.wall_time_ns,
            format_real(self.hoeffding_bound),
        )
    }
}

impl CsvRecord for TraceRecord {
    const HEADER: &'static str =
        "step,plant_state,error_input,control_output,backend_latency_samples";

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.step,
            format_real(self.plant_state),
            format_real(self.error_input),
            format_real(self.control_output),
            self.backend_latency_samples,
        )
    }
}

/// Header plus one line per row, LF endings. An empty slice yields a
/// header-only file.
pub fn csv_string<R: CsvRecord>(rows: &[R]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(R::HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Write rows as CSV to any sink.
pub fn emit_csv<R: CsvRecord, W: Write>(rows: &[R], w: &mut W) -> Result<()> {
    w.write_all(csv_string(rows).as_bytes())?;
    Ok(())
}

/// Write rows as CSV to a file path.
pub fn write_csv<R: CsvRecord>(rows: &[R], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(rows))?;
    Ok(())
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 190.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 56.0;

/// Errors of exactly zero (exact backends) are floored here so they still
/// appear on the log axis.
const LOG_FLOOR: f64 = 1e-16;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Series {
    backend: String,
    /// (N, median error) sorted by N.
    medians: Vec<(usize, f64)>,
}

fn collect_series(rows: &[BenchRow]) -> Vec<Series> {
    let mut backends: Vec<&str> = Vec::new();
    for row in rows {
        if !backends.contains(&row.backend) {
            backends.push(row.backend);
        }
    }
    backends
        .into_iter()
        .map(|backend| {
            let mut ns: Vec<usize> = rows
                .iter()
                .filter(|r| r.backend == backend)
                .map(|r| r.n)
                .collect();
            ns.sort_unstable();
            ns.dedup();
            let medians = ns
                .into_iter()
                .map(|n| {
                    let mut errs: Vec<f64> = rows
                        .iter()
                        .filter(|r| r.backend == backend && r.n == n)
                        .map(|r| r.linf_error)
                        .collect();
                    errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let k = errs.len();
                    let med = if k % 2 == 1 {
                        errs[k / 2]
                    } else {
                        0.5 * (errs[k / 2 - 1] + errs[k / 2])
                    };
                    (n, med)
                })
                .collect();
            Series {
                backend: backend.to_string(),
                medians,
            }
        })
        .collect()
}

/// Log-log line plot of median error per sample count, one polyline per
/// backend. Standalone SVG, no external resources.
pub fn svg_string(rows: &[BenchRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::NothingToPlot);
    }
    let series = collect_series(rows);

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in &series {
        for &(n, e) in &s.medians {
            xs.push((n as f64).ln());
            ys.push(e.max(LOG_FLOOR).ln());
        }
    }
    let (xmin, xmax) = span(&xs);
    let (ymin, ymax) = span(&ys);
    let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| MARGIN_T + (ymax - y) / (ymax - ymin) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // axes
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));

    // x ticks at every distinct N
    let mut all_n: Vec<usize> = rows.iter().map(|r| r.n).collect();
    all_n.sort_unstable();
    all_n.dedup();
    for &n in &all_n {
        let x = px((n as f64).ln());
        svg.push_str(&format!(
            "  <line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{x}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{n}</text>\n",
            y0 + 18.0
        ));
    }

    // y ticks at powers of ten spanning the data
    let dec_lo = (ymin / std::f64::consts::LN_10).floor() as i32;
    let dec_hi = (ymax / std::f64::consts::LN_10).ceil() as i32;
    let step = (((dec_hi - dec_lo) as usize) / 8 + 1) as i32;
    let mut dec = dec_lo;
    while dec <= dec_hi {
        let y_ln = dec as f64 * std::f64::consts::LN_10;
        if y_ln >= ymin - 1e-9 && y_ln <= ymax + 1e-9 {
            let y = py(y_ln);
            svg.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{y}\" x2=\"{x0}\" y2=\"{y}\" stroke=\"black\"/>\n",
                x0 - 5.0
            ));
            svg.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">1e{dec}</text>\n",
                x0 - 8.0,
                y + 4.0
            ));
        }
        dec += step;
    }

    // axis labels
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">N (samples)</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {})\">L&#8734; error</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));

    // one polyline per backend
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = s
            .medians
            .iter()
            .map(|&(n, e)| {
                format!(
                    "{:.2},{:.2}",
                    px((n as f64).ln()),
                    py(e.max(LOG_FLOOR).ln())
                )
            })
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" \
             data-backend=\"{}\" points=\"{}\"/>\n",
            xml_escape(&s.backend),
            points.join(" ")
        ));
    }

    // legend
    let lx = WIDTH - MARGIN_R + 16.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ly = MARGIN_T + 16.0 + 20.0 * i as f64;
        svg.push_str(&format!(
            "  <line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n",
            lx + 22.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            lx + 28.0,
            ly + 4.0,
            xml_escape(&s.backend)
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn span(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5) // degenerate span: pad so mapping stays finite
    } else {
        (lo, hi)
    }
}

/// Write the log-log line plot to a file path.
pub fn write_svg_lineplot(rows: &[BenchRow], path: &Path) -> Result<()> {
    std::fs::write(path, svg_string(rows)?)?;
    Ok(())
}
