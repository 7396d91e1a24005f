//! CSV serialization and best-effort SVG plotting.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Formats a float with 17 significant digits so parsing the text recovers
/// the exact bit pattern.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

/// A CSV table with a fixed header; cells are pre-formatted strings.
pub struct Csv {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: Vec<&'static str>) -> Self {
        Csv {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        let mut buf = Vec::new();
        writeln!(buf, "{}", self.header.join(",")).expect("vec write");
        for row in &self.rows {
            writeln!(buf, "{}", row.join(",")).expect("vec write");
        }
        std::fs::write(path, buf)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
    }
}

/// One plotted curve; `points` additionally marks each sample with a circle.
pub struct Series {
    pub label: String,
    pub xy: Vec<(f64, f64)>,
    pub points: bool,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
    /// Horizontal dashed guide lines (e.g. the sigma = 1 contour).
    pub h_lines: Vec<f64>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

impl Plot {
    /// Renders the plot as a standalone SVG. Plotting is best-effort: the
    /// caller logs failures to stderr without changing the exit code.
    pub fn write_svg(&self, path: &Path) -> Result<(), String> {
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let finite = |v: f64| v.is_finite();

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.xy {
                let x = tx(x);
                if finite(x) && finite(y) {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        ys.extend(self.h_lines.iter().copied());
        if xs.is_empty() {
            return Err("no finite points to plot".into());
        }
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        let px = |x: f64| MARGIN_L + (tx(x) - x0) / (x1 - x0) * (W - MARGIN_L - MARGIN_R);
        let py = |y: f64| H - MARGIN_B - (y - y0) / (y1 - y0) * (H - MARGIN_T - MARGIN_B);

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
             viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
             <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        ));
        // axes
        svg.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
             <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
            l = MARGIN_L,
            r = W - MARGIN_R,
            t = MARGIN_T,
            b = H - MARGIN_B,
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            W / 2.0,
            esc(&self.title)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            W / 2.0,
            H - 12.0,
            esc(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            H / 2.0,
            H / 2.0,
            esc(&self.y_label)
        ));
        // axis range labels
        let range_label = |v: f64, log: bool| {
            if log {
                format!("{:.3e}", 10f64.powf(v))
            } else {
                format!("{v:.3}")
            }
        };
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            MARGIN_L,
            H - MARGIN_B + 16.0,
            range_label(x0, self.log_x)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            W - MARGIN_R,
            H - MARGIN_B + 16.0,
            range_label(x1, self.log_x)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y0:.3}</text>\n",
            MARGIN_L - 6.0,
            H - MARGIN_B
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y1:.3}</text>\n",
            MARGIN_L - 6.0,
            MARGIN_T + 10.0
        ));
        for &y in &self.h_lines {
            if y >= y0 && y <= y1 {
                svg.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{py}\" x2=\"{}\" y2=\"{py}\" stroke=\"gray\" \
                     stroke-dasharray=\"6,4\"/>\n",
                    MARGIN_L,
                    W - MARGIN_R,
                    py = py(y),
                ));
            }
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s
                .xy
                .iter()
                .copied()
                .filter(|&(x, y)| finite(tx(x)) && finite(y))
                .map(|(x, y)| (px(x), py(y)))
                .collect();
            if pts.len() > 1 && !s.points {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                    path.join(" ")
                ));
            }
            if s.points {
                for (x, y) in &pts {
                    svg.push_str(&format!(
                        "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>\n"
                    ));
                }
            }
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>\n",
                W - MARGIN_R - 160.0,
                MARGIN_T + 16.0 * (i as f64 + 1.0),
                esc(&s.label)
            ));
        }
        svg.push_str("</svg>\n");
        std::fs::write(path, svg).map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}

fn span(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        // degenerate range: pad so the mapping stays finite
        lo -= 0.5;
        hi += 0.5;
    }
    (lo, hi)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
