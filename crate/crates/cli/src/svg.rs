//! Minimal deterministic line-chart writer.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f4e9c", "#c0392b", "#27864a", "#8e44ad", "#d68910", "#5d6d7e"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// Disjoint polylines; a series is split where it leaves the plotted range.
    pub pieces: Vec<Vec<(f64, f64)>>,
    pub dashed: bool,
}

impl Series {
    pub fn solid(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), pieces: vec![points], dashed: false }
    }

    fn points(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.pieces.iter().flatten()
    }
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Fixed y range; otherwise fitted to all series.
    pub y_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
}

impl Axis {
    fn fit(lo: f64, hi: f64) -> Axis {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let step = nice_step((hi - lo) / 6.0);
        Axis { lo: (lo / step).floor() * step, hi: (hi / step).ceil() * step, step }
    }

    fn ticks(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step).round() as i64;
        (0..=count).map(|i| self.lo + i as f64 * self.step).collect()
    }

    fn decimals(&self) -> usize {
        (-self.step.log10().floor()).max(0.0) as usize
    }
}

/// Smallest of 1, 2, 5 times a power of ten that is at least `raw`.
fn nice_step(raw: f64) -> f64 {
    let p = 10f64.powf(raw.log10().floor());
    let m = raw / p;
    let f = if m <= 1.0 {
        1.0
    } else if m <= 2.0 {
        2.0
    } else if m <= 5.0 {
        5.0
    } else {
        10.0
    };
    f * p
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    fn bounds(&self) -> Option<((f64, f64), (f64, f64))> {
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in self.series.iter().flat_map(Series::points) {
            xs = (xs.0.min(*x), xs.1.max(*x));
            ys = (ys.0.min(*y), ys.1.max(*y));
        }
        if !xs.0.is_finite() {
            return None;
        }
        Some((xs, self.y_range.unwrap_or(ys)))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds().unwrap_or(((0.0, 1.0), (0.0, 1.0)));
        let xa = Axis::fit(x0, x1);
        let ya = Axis::fit(y0, y1);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - xa.lo) / (xa.hi - xa.lo) * pw;
        let sy = |y: f64| TOP + ph - (y - ya.lo) / (ya.hi - ya.lo) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(out, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);

        let _ = writeln!(out, r##"<g stroke="#dddddd" stroke-width="1">"##);
        for t in xa.ticks().into_iter().filter(|t| *t <= xa.hi + 1e-9 * xa.step) {
            let _ = writeln!(out, r#"<line x1="{:.2}" y1="{TOP}" x2="{:.2}" y2="{:.2}"/>"#, sx(t), sx(t), TOP + ph);
        }
        for t in ya.ticks().into_iter().filter(|t| *t <= ya.hi + 1e-9 * ya.step) {
            let _ = writeln!(out, r#"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, sy(t), LEFT + pw, sy(t));
        }
        let _ = writeln!(out, "</g>");

        let (dx, dy) = (xa.decimals(), ya.decimals());
        for t in xa.ticks().into_iter().filter(|t| *t <= xa.hi + 1e-9 * xa.step) {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                sx(t),
                TOP + ph + 18.0,
                tick_label(t, dx)
            );
        }
        for t in ya.ticks().into_iter().filter(|t| *t <= ya.hi + 1e-9 * ya.step) {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                sy(t) + 4.0,
                tick_label(t, dy)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        let _ =
            writeln!(out, r#"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath>"#);
        let _ = writeln!(out, r#"<g clip-path="url(#plot)" fill="none" stroke-width="1.8">"#);
        for (i, s) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            for piece in s.pieces.iter().filter(|p| p.len() > 1) {
                let pts: Vec<String> = piece.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(out, r#"<polyline stroke="{colour}"{dash} points="{}"/>"#, pts.join(" "));
            }
        }
        let _ = writeln!(out, "</g>");

        let _ = writeln!(out, r#"<g font-size="12">"#);
        for (i, s) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let y = TOP + 16.0 + 18.0 * i as f64;
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="1.8"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
                LEFT + 12.0,
                LEFT + 36.0,
                LEFT + 42.0,
                y + 4.0,
                escape(&s.label)
            );
        }
        let _ = writeln!(out, "</g>");
        out.push_str("</svg>\n");
        out
    }
}

fn tick_label(t: f64, decimals: usize) -> String {
    let s = format!("{t:.decimals$}");
    // avoid "-0" and "-0.0"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Splits `points` into runs whose `y` stays within `[lo, hi]` and is finite.
pub fn split_in_range(points: impl IntoIterator<Item = (f64, f64)>, lo: f64, hi: f64) -> Vec<Vec<(f64, f64)>> {
    let mut pieces = vec![Vec::new()];
    for (x, y) in points {
        if y.is_finite() && y >= lo && y <= hi {
            pieces.last_mut().unwrap().push((x, y));
        } else if !pieces.last().unwrap().is_empty() {
            pieces.push(Vec::new());
        }
    }
    pieces.retain(|p| !p.is_empty());
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(0.13), 0.2);
        assert_eq!(nice_step(3.0), 5.0);
        assert_eq!(nice_step(7.0), 10.0);
        assert_eq!(nice_step(1.0), 1.0);
    }

    #[test]
    fn axis_covers_data() {
        let a = Axis::fit(0.013, 2.71);
        assert!(a.lo <= 0.013 && a.hi >= 2.71);
        assert_eq!(a.ticks().first().copied(), Some(a.lo));
    }

    #[test]
    fn render_is_deterministic_and_labelled() {
        let chart = Chart {
            title: "a < b".into(),
            x_label: "r".into(),
            y_label: "du".into(),
            series: vec![Series::solid("profile", vec![(0.0, 0.0), (1.0, 2.0)])],
            y_range: None,
        };
        let a = chart.render();
        assert_eq!(a, chart.render());
        assert!(a.contains("a &lt; b"));
        assert!(a.contains("<polyline"));
        assert!(a.contains(">profile</text>"));
    }

    #[test]
    fn out_of_range_points_split_series() {
        let pieces = split_in_range([(0.0, 0.0), (1.0, 5.0), (2.0, 1.0), (3.0, f64::NAN), (4.0, 1.0)], 0.0, 2.0);
        assert_eq!(pieces, vec![vec![(0.0, 0.0)], vec![(2.0, 1.0)], vec![(4.0, 1.0)]]);
    }

    #[test]
    fn no_negative_zero_labels() {
        assert_eq!(tick_label(-0.0, 1), "0.0");
        assert_eq!(tick_label(-0.5, 1), "-0.5");
    }
}
