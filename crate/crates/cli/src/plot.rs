//! Minimal SVG scatter/line plots, rendered by hand so chart output has no
//! dependencies and is byte-deterministic for identical inputs.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = [
    "#1f6feb", "#d29922", "#2da44e", "#cf222e", "#8250df", "#57606a",
];

enum SeriesKind {
    Points,
    Line,
}

struct Series {
    name: String,
    kind: SeriesKind,
    data: Vec<(f64, f64)>,
}

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<Series>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
        }
    }

    pub fn points(&mut self, name: &str, data: &[(f64, f64)]) -> &mut Self {
        self.series.push(Series {
            name: name.to_string(),
            kind: SeriesKind::Points,
            data: data.to_vec(),
        });
        self
    }

    pub fn line(&mut self, name: &str, data: &[(f64, f64)]) -> &mut Self {
        self.series.push(Series {
            name: name.to_string(),
            kind: SeriesKind::Line,
            data: data.to_vec(),
        });
        self
    }

    /// Data range over all series, padded 5% each side; a degenerate span
    /// widens to ±0.5 so the axes stay well-formed.
    fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            return (0.0, 1.0);
        }
        if lo == hi {
            return (lo - 0.5, hi + 0.5);
        }
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }

    pub fn render(&self) -> String {
        let (x_lo, x_hi) = Self::range(self.series.iter().flat_map(|s| s.data.iter().map(|d| d.0)));
        let (y_lo, y_hi) = Self::range(self.series.iter().flat_map(|s| s.data.iter().map(|d| d.1)));
        let px = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Axes.
        let _ = writeln!(
            svg,
            "<line x1=\"{m:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\
             <line x1=\"{m:.1}\" y1=\"{t:.1}\" x2=\"{m:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>",
            m = MARGIN,
            b = HEIGHT - MARGIN,
            r = WIDTH - MARGIN,
            t = MARGIN,
        );
        for i in 0..TICKS {
            let f = i as f64 / (TICKS - 1) as f64;
            let xv = x_lo + f * (x_hi - x_lo);
            let yv = y_lo + f * (y_hi - y_lo);
            let (tx, ty) = (px(xv), py(yv));
            let _ = writeln!(
                svg,
                "<line x1=\"{tx:.1}\" y1=\"{b:.1}\" x2=\"{tx:.1}\" y2=\"{b2:.1}\" stroke=\"black\"/>\
                 <text x=\"{tx:.1}\" y=\"{lbl:.1}\" text-anchor=\"middle\">{xv:.2}</text>",
                b = HEIGHT - MARGIN,
                b2 = HEIGHT - MARGIN + 5.0,
                lbl = HEIGHT - MARGIN + 18.0,
            );
            let _ = writeln!(
                svg,
                "<line x1=\"{m2:.1}\" y1=\"{ty:.1}\" x2=\"{m:.1}\" y2=\"{ty:.1}\" stroke=\"black\"/>\
                 <text x=\"{lbl:.1}\" y=\"{ty2:.1}\" text-anchor=\"end\">{yv:.2}</text>",
                m = MARGIN,
                m2 = MARGIN - 5.0,
                lbl = MARGIN - 8.0,
                ty2 = ty + 4.0,
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );

        for (idx, series) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            match series.kind {
                SeriesKind::Points => {
                    for &(x, y) in &series.data {
                        let _ = writeln!(
                            svg,
                            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3.5\" fill=\"{color}\" fill-opacity=\"0.85\"/>",
                            px(x),
                            py(y)
                        );
                    }
                }
                SeriesKind::Line => {
                    let path: Vec<String> = series
                        .data
                        .iter()
                        .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
                        .collect();
                    let _ = writeln!(
                        svg,
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>",
                        path.join(" ")
                    );
                }
            }
            // Legend entry, top-right inside the plot area.
            let ly = MARGIN + 14.0 + 16.0 * idx as f64;
            let _ = writeln!(
                svg,
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\
                 <text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
                WIDTH - MARGIN - 150.0,
                ly - 9.0,
                WIDTH - MARGIN - 136.0,
                ly,
                escape(&series.name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points_lines_axes_and_legend() {
        let mut plot = Plot::new("demo", "x", "y");
        plot.points("dots", &[(0.1, 0.2), (0.5, 0.6)]);
        plot.line("trend", &[(0.0, 0.0), (1.0, 1.0)]);
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(">demo<"));
        assert!(svg.contains(">trend<"));
        // Data span [0, 1] padded by 5% puts the extreme ticks at ±0.05.
        assert!(svg.contains(">-0.05<"));
        assert!(svg.contains(">1.05<"));
    }

    #[test]
    fn degenerate_ranges_still_produce_finite_coordinates() {
        let mut plot = Plot::new("flat", "x", "y");
        plot.points("one", &[(0.5, 0.5)]);
        let svg = plot.render();
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }

    #[test]
    fn identical_input_renders_identical_bytes() {
        let build = || {
            let mut p = Plot::new("t", "x", "y");
            p.points("a", &[(0.25, 0.75), (0.5, 0.5)]);
            p.line("b", &[(0.0, 1.0), (1.0, 0.0)]);
            p.render()
        };
        assert_eq!(build(), build());
    }
}
