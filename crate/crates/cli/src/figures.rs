//! Static SVG scatter plots. Output depends only on the input points, so
//! identical runs emit identical files.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

/// Viridis anchor colors, low to high.
const SEQUENTIAL: [(u8, u8, u8); 5] = [
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
];
type Rgb = (u8, u8, u8);

const DIVERGING: [(u8, u8, u8); 3] = [(33, 102, 172), (247, 247, 247), (178, 24, 43)];

#[derive(Debug, Clone, PartialEq)]
pub enum Coloring {
    /// one color for the whole series, e.g. `#444444`
    Fixed(String),
    /// per-point value mapped from its minimum to its maximum
    Sequential(Vec<f64>),
    /// per-point value mapped symmetrically around zero
    Diverging(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub coloring: Coloring,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl ScatterPlot {
    pub fn to_svg(&self) -> String {
        let finite = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite();
        let all: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(finite)
            .collect();
        let (x0, x1) = padded_range(all.iter().map(|p| p.0));
        let (y0, y1) = padded_range(all.iter().map(|p| p.1));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(
            s,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
        );
        for i in 0..=TICKS {
            let t = i as f64 / TICKS as f64;
            let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(
                s,
                r##"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="#333"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 18.0,
                tick_label(xv)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{:.1}" y1="{py:.1}" x2="{LEFT}" y2="{py:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        let mut legend_y = TOP + 10.0;
        let legend_x = WIDTH - RIGHT + 15.0;
        for series in &self.series {
            let colors = series_colors(series);
            let _ = writeln!(s, r#"<g fill-opacity="0.75">"#);
            for (&(x, y), c) in series.points.iter().zip(&colors) {
                if finite(&(x, y)) {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#,
                        sx(x),
                        sy(y)
                    );
                }
            }
            let _ = writeln!(s, "</g>");
            let swatch = match &series.coloring {
                Coloring::Fixed(c) => c.clone(),
                Coloring::Sequential(_) => rgb(SEQUENTIAL[2]),
                Coloring::Diverging(_) => rgb(DIVERGING[2]),
            };
            let _ = writeln!(
                s,
                r#"<circle cx="{legend_x:.1}" cy="{legend_y:.1}" r="4" fill="{swatch}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                legend_x + 8.0,
                legend_y + 4.0,
                escape(&series.name)
            );
            legend_y += 18.0;
            if let Some((lo, hi, stops)) = color_scale(&series.coloring) {
                for (i, c) in stops.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{legend_x:.1}" y="{:.1}" width="12" height="12" fill="{}"/>"#,
                        legend_y + 12.0 * (stops.len() - 1 - i) as f64,
                        rgb(*c)
                    );
                }
                let _ = writeln!(
                    s,
                    r#"<text x="{:.1}" y="{:.1}">{}</text><text x="{:.1}" y="{:.1}">{}</text>"#,
                    legend_x + 16.0,
                    legend_y + 10.0,
                    tick_label(hi),
                    legend_x + 16.0,
                    legend_y + 12.0 * stops.len() as f64,
                    tick_label(lo)
                );
                legend_y += 12.0 * stops.len() as f64 + 14.0;
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn series_colors(series: &Series) -> Vec<String> {
    match &series.coloring {
        Coloring::Fixed(c) => vec![c.clone(); series.points.len()],
        Coloring::Sequential(v) => {
            let (lo, hi) = min_max(v.iter().copied());
            v.iter()
                .map(|&x| {
                    rgb(interpolate(
                        &SEQUENTIAL,
                        if hi > lo { (x - lo) / (hi - lo) } else { 0.5 },
                    ))
                })
                .collect()
        }
        Coloring::Diverging(v) => {
            let m = v
                .iter()
                .filter(|x| x.is_finite())
                .fold(0.0f64, |a, x| a.max(x.abs()));
            v.iter()
                .map(|&x| {
                    rgb(interpolate(
                        &DIVERGING,
                        if m > 0.0 { 0.5 + 0.5 * x / m } else { 0.5 },
                    ))
                })
                .collect()
        }
    }
}

fn color_scale(c: &Coloring) -> Option<(f64, f64, Vec<Rgb>)> {
    match c {
        Coloring::Fixed(_) => None,
        Coloring::Sequential(v) => {
            let (lo, hi) = min_max(v.iter().copied());
            Some((lo, hi, SEQUENTIAL.to_vec()))
        }
        Coloring::Diverging(v) => {
            let m = v
                .iter()
                .filter(|x| x.is_finite())
                .fold(0.0f64, |a, x| a.max(x.abs()));
            Some((-m, m, DIVERGING.to_vec()))
        }
    }
}

fn interpolate(stops: &[(u8, u8, u8)], t: f64) -> (u8, u8, u8) {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.5
    };
    let pos = t * (stops.len() - 1) as f64;
    let i = (pos.floor() as usize).min(stops.len() - 2);
    let f = pos - i as f64;
    let mix = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
    let (a, b) = (stops[i], stops[i + 1]);
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn rgb((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Data range widened by 5% per side; a degenerate range becomes unit width.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = min_max(values);
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.2}");
        if s == "-0.00" {
            "0.00".into()
        } else {
            s
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
