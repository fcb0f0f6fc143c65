//! Static SVG rendering with inline styles only.
//!
//! Heatmaps use a fixed five-stop ramp interpolated linearly in sRGB:
//! `#440154` (minimum), `#3b528b`, `#21918c`, `#5ec962`, `#fde725`
//! (maximum). Values are normalised by the plotted minimum and maximum,
//! both of which are printed in the legend. Non-finite cells are grey.

use std::fmt::Write;

const RAMP: [[u8; 3]; 5] = [
    [0x44, 0x01, 0x54],
    [0x3b, 0x52, 0x8b],
    [0x21, 0x91, 0x8c],
    [0x5e, 0xc9, 0x62],
    [0xfd, 0xe7, 0x25],
];

const LINE_COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone)]
pub enum Plot {
    /// `values[iy * nx + ix]`, `iy = 0` at the bottom.
    Heatmap {
        title: String,
        x_label: String,
        y_label: String,
        x_range: (f64, f64),
        y_range: (f64, f64),
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    },
    Lines {
        title: String,
        x_label: String,
        y_label: String,
        x: Vec<f64>,
        series: Vec<(String, Vec<f64>)>,
    },
}

pub fn ramp(u: f64) -> String {
    let u = if u.is_finite() {
        u.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let pos = u * (RAMP.len() - 1) as f64;
    let i = (pos.floor() as usize).min(RAMP.len() - 2);
    let f = pos - i as f64;
    let mix = |k: usize| (RAMP[i][k] as f64 * (1.0 - f) + RAMP[i + 1][k] as f64 * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" style="font-family:sans-serif;font-size:12px">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" style="fill:#ffffff"/>"#
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" style="font-size:15px;text-anchor:middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" style="text-anchor:middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let cy = TOP + (HEIGHT - TOP - BOTTOM) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="18" y="{cy}" transform="rotate(-90 18 {cy})" style="text-anchor:middle">{}</text>"#,
        escape(y_label)
    );
}

fn tick_labels(out: &mut String, x_range: (f64, f64), y_range: (f64, f64)) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    for (x, v) in [(x0, x_range.0), (x1, x_range.1)] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" style="text-anchor:middle">{v:.3}</text>"#,
            y0 + 16.0
        );
    }
    for (y, v) in [(y0, y_range.0), (y1, y_range.1)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" style="text-anchor:end">{v:.3}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" style="fill:none;stroke:#000000"/>"#,
        x1 - x0,
        y0 - y1
    );
}

pub fn render(plot: &Plot) -> String {
    let mut out = String::new();
    match plot {
        Plot::Heatmap {
            title,
            x_label,
            y_label,
            x_range,
            y_range,
            nx,
            ny,
            values,
        } => {
            header(&mut out, title, x_label, y_label);
            let (lo, hi) = finite_range(values.iter().copied());
            let span = if hi > lo { hi - lo } else { 1.0 };
            let cw = (WIDTH - LEFT - RIGHT) / *nx as f64;
            let ch = (HEIGHT - TOP - BOTTOM) / *ny as f64;
            for iy in 0..*ny {
                for ix in 0..*nx {
                    let v = values[iy * nx + ix];
                    let fill = if v.is_finite() {
                        ramp((v - lo) / span)
                    } else {
                        "#bbbbbb".to_string()
                    };
                    let x = LEFT + ix as f64 * cw;
                    let y = HEIGHT - BOTTOM - (iy + 1) as f64 * ch;
                    // a hairline overlap hides anti-aliasing seams between cells
                    let _ = writeln!(
                        out,
                        r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" style="fill:{fill}"/>"#,
                        cw + 0.3,
                        ch + 0.3
                    );
                }
            }
            tick_labels(&mut out, *x_range, *y_range);
            legend(&mut out, lo, hi);
        }
        Plot::Lines {
            title,
            x_label,
            y_label,
            x,
            series,
        } => {
            header(&mut out, title, x_label, y_label);
            let x_range = finite_range(x.iter().copied());
            let y_range = finite_range(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
            let sx = |v: f64| {
                let span = x_range.1 - x_range.0;
                LEFT + if span > 0.0 {
                    (v - x_range.0) / span
                } else {
                    0.5
                } * (WIDTH - LEFT - RIGHT)
            };
            let sy = |v: f64| {
                let span = y_range.1 - y_range.0;
                HEIGHT
                    - BOTTOM
                    - if span > 0.0 {
                        (v - y_range.0) / span
                    } else {
                        0.5
                    } * (HEIGHT - TOP - BOTTOM)
            };
            for (k, (name, ys)) in series.iter().enumerate() {
                let colour = LINE_COLOURS[k % LINE_COLOURS.len()];
                let points: Vec<String> = x
                    .iter()
                    .zip(ys)
                    .filter(|(a, b)| a.is_finite() && b.is_finite())
                    .map(|(&a, &b)| format!("{:.3},{:.3}", sx(a), sy(b)))
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" style="fill:none;stroke:{colour};stroke-width:2"/>"#,
                    points.join(" ")
                );
                let ly = TOP + 14.0 + 18.0 * k as f64;
                let lx = WIDTH - RIGHT + 10.0;
                let _ = writeln!(
                    out,
                    r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" style="stroke:{colour};stroke-width:2"/>"#,
                    ly - 4.0,
                    lx + 18.0,
                    ly - 4.0
                );
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{ly}">{}</text>"#,
                    lx + 22.0,
                    escape(name)
                );
            }
            tick_labels(&mut out, x_range, y_range);
        }
    }
    out.push_str("</svg>\n");
    out
}

fn legend(out: &mut String, lo: f64, hi: f64) {
    let x = WIDTH - RIGHT + 20.0;
    let steps = 32;
    let h = (HEIGHT - TOP - BOTTOM) / steps as f64;
    for k in 0..steps {
        let u = (k as f64 + 0.5) / steps as f64;
        let y = HEIGHT - BOTTOM - (k + 1) as f64 * h;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{y:.3}" width="16" height="{:.3}" style="fill:{}"/>"#,
            h + 0.3,
            ramp(u)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">max {hi:.4}</text>"#,
        x + 20.0,
        TOP + 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">min {lo:.4}</text>"#,
        x + 20.0,
        HEIGHT - BOTTOM
    );
}
