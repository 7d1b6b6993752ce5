//! Byte-deterministic CSV and SVG output.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use stripelab_core::boundaries::Polyline;
use stripelab_core::{DiagramGrid64, RegionLabel};

pub const GRID_HEADER: &str = "x,y,exists,zigzag,eckhaus,square,hex,quasihex,stable";

/// Shortest decimal that round-trips the value rounded to 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

/// Grid CSV: one row per cell, `x` varying fastest.
pub fn grid_csv(grid: &DiagramGrid64) -> String {
    let mut s = String::new();
    s.push_str(GRID_HEADER);
    s.push('\n');
    for (j, &y) in grid.y.iter().enumerate() {
        for (i, &x) in grid.x.iter().enumerate() {
            let l = grid.label(i, j);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                fmt_num(x),
                fmt_num(y),
                bit(l.exists),
                bit(l.zigzag_unstable),
                bit(l.eckhaus_unstable),
                bit(l.square_unstable),
                bit(l.hex_unstable),
                bit(l.quasihex_unstable),
                bit(l.stable_all_checked),
            );
        }
    }
    s
}

pub fn emit_grid(grid: &DiagramGrid64, path: &Path) -> io::Result<()> {
    fs::write(path, grid_csv(grid))
}

/// Boundary polylines as `name,segment,x,y`.
pub fn boundaries_csv(lines: &[Polyline<f64>]) -> String {
    let mut s = String::from("name,segment,x,y\n");
    for line in lines {
        for (k, seg) in line.segments.iter().enumerate() {
            for &(x, y) in seg {
                let _ = writeln!(s, "{},{},{},{}", line.name, k, fmt_num(x), fmt_num(y));
            }
        }
    }
    s
}

struct Layer {
    id: &'static str,
    label: &'static str,
    fill: &'static str,
    test: fn(&RegionLabel) -> bool,
}

const LAYERS: [Layer; 7] = [
    Layer { id: "none", label: "no stripe", fill: "#ffffff", test: |l| !l.exists },
    Layer { id: "stable", label: "stable", fill: "#c8e6c9", test: |l| l.exists && l.stable_all_checked },
    Layer { id: "eckhaus", label: "Eckhaus", fill: "#9e9e9e", test: |l| l.exists && l.eckhaus_unstable },
    Layer { id: "zigzag", label: "zigzag", fill: "#90caf9", test: |l| l.exists && l.zigzag_unstable },
    Layer { id: "square", label: "square / rectangle", fill: "#ffb74d", test: |l| l.exists && l.square_unstable },
    Layer { id: "hex", label: "hexagon / rhomb", fill: "#f48fb1", test: |l| l.exists && l.hex_unstable },
    Layer { id: "quasihex", label: "quasi-hexagon", fill: "url(#hatch)", test: |l| l.exists && l.quasihex_unstable },
];

const BOUNDARY_COLORS: [&str; 7] = ["#000000", "#424242", "#e65100", "#ad1457", "#6a1b9a", "#1565c0", "#2e7d32"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const LEGEND: f64 = 170.0;

/// Cell edges: midpoints between samples, extended by half a step at the ends.
fn edges(v: &[f64]) -> Vec<f64> {
    match v.len() {
        0 => vec![],
        1 => vec![v[0] - 0.5, v[0] + 0.5],
        n => {
            let mut e = Vec::with_capacity(n + 1);
            e.push(v[0] - (v[1] - v[0]) / 2.0);
            e.extend(v.windows(2).map(|w| (w[0] + w[1]) / 2.0));
            e.push(v[n - 1] + (v[n - 1] - v[n - 2]) / 2.0);
            e
        }
    }
}

fn px(x: f64) -> String {
    format!("{x:.2}")
}

/// SVG with one group per flag, boundary curves as paths and a legend.
pub fn plot_svg(grid: &DiagramGrid64, title: &str, axis_names: (&str, &str)) -> String {
    let xe = edges(&grid.x);
    let ye = edges(&grid.y);
    let (x0, x1) = (xe.first().copied().unwrap_or(0.0), xe.last().copied().unwrap_or(1.0));
    let (y0, y1) = (ye.first().copied().unwrap_or(0.0), ye.last().copied().unwrap_or(1.0));
    let pw = WIDTH - 2.0 * MARGIN;
    let ph = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        WIDTH + LEGEND,
        HEIGHT,
        WIDTH + LEGEND,
        HEIGHT
    );
    s.push_str(concat!(
        "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" ",
        "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#4a148c\" ",
        "stroke-width=\"1.5\"/></pattern></defs>\n"
    ));
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));

    for layer in &LAYERS {
        let opacity = if matches!(layer.id, "none" | "stable") { "1" } else { "0.55" };
        let _ = writeln!(s, r#"<g id="layer-{}" fill="{}" fill-opacity="{}">"#, layer.id, layer.fill, opacity);
        for j in 0..grid.y.len() {
            let mut i = 0;
            while i < grid.x.len() {
                if !(layer.test)(&grid.label(i, j)) {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < grid.x.len() && (layer.test)(&grid.label(i, j)) {
                    i += 1;
                }
                let (left, right) = (sx(xe[start]), sx(xe[i]));
                let (top, bottom) = (sy(ye[j + 1]), sy(ye[j]));
                let _ = writeln!(
                    s,
                    r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                    px(left),
                    px(top),
                    px(right - left),
                    px(bottom - top)
                );
            }
        }
        s.push_str("</g>\n");
    }

    s.push_str("<g id=\"boundaries\" fill=\"none\" stroke-width=\"1.5\">\n");
    for (k, line) in grid.boundaries.iter().enumerate() {
        let color = BOUNDARY_COLORS[k % BOUNDARY_COLORS.len()];
        for seg in &line.segments {
            let pts: Vec<(f64, f64)> = seg.iter().copied().filter(|&(_, y)| y >= y0 && y <= y1).collect();
            if pts.len() < 2 {
                continue;
            }
            let mut d = String::new();
            for (n, (x, y)) in pts.iter().enumerate() {
                let _ = write!(d, "{}{} {}", if n == 0 { "M" } else { " L" }, px(sx(*x)), px(sy(*y)));
            }
            let _ = writeln!(s, r#"<path class="{}" stroke="{}" d="{}"/>"#, escape(&line.name), color, d);
        }
    }
    s.push_str("</g>\n");

    // Frame and axis labels.
    let _ = writeln!(
        s,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
        px(MARGIN),
        px(MARGIN),
        px(pw),
        px(ph)
    );
    for (v, anchor_x) in [(x0, MARGIN), (x1, MARGIN + pw)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(anchor_x),
            px(HEIGHT - MARGIN + 16.0),
            fmt_num(v)
        );
    }
    for (v, anchor_y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            px(MARGIN - 4.0),
            px(anchor_y + 4.0),
            fmt_num(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        px(MARGIN + pw / 2.0),
        px(HEIGHT - 20.0),
        escape(axis_names.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        px(MARGIN + ph / 2.0),
        px(MARGIN + ph / 2.0),
        escape(axis_names.1)
    );
    let _ = writeln!(s, r#"<text x="{}" y="30" text-anchor="middle">{}</text>"#, px(MARGIN + pw / 2.0), escape(title));

    s.push_str("<g id=\"legend\">\n");
    let lx = WIDTH + 10.0;
    let mut ly = MARGIN;
    for layer in &LAYERS {
        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="14" height="14" fill="{}" stroke="#000"/><text x="{}" y="{}">{}</text>"##,
            px(lx),
            px(ly),
            layer.fill,
            px(lx + 20.0),
            px(ly + 11.0),
            layer.label
        );
        ly += 20.0;
    }
    for (k, line) in grid.boundaries.iter().enumerate() {
        let color = BOUNDARY_COLORS[k % BOUNDARY_COLORS.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.5"/><text x="{}" y="{}">{}</text>"#,
            px(lx),
            px(ly + 7.0),
            px(lx + 14.0),
            px(ly + 7.0),
            color,
            px(lx + 20.0),
            px(ly + 11.0),
            escape(&line.name)
        );
        ly += 20.0;
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn emit_plot(grid: &DiagramGrid64, title: &str, axis_names: (&str, &str), path: &Path) -> io::Result<()> {
    fs::write(path, plot_svg(grid, title, axis_names))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(-2.8), "-2.8");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(123456789012345.0), "123456789012000");
        assert_eq!(fmt_num(1.5e-9), "1.5e-9");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn cell_edges() {
        assert_eq!(edges(&[0.0, 1.0, 2.0]), vec![-0.5, 0.5, 1.5, 2.5]);
    }
}
