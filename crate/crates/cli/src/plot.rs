//! Static SVG decay plots on log-log axes.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub enum Style {
    Measured,
    Bound,
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

fn decades(lo: f64, hi: f64) -> (i32, i32) {
    let a = lo.log10().floor() as i32;
    let b = hi.log10().ceil() as i32;
    (a, if b > a { b } else { a + 1 })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Log-log plot of `(T, value)` series. Nonpositive values are drawn at
/// the bottom of the axis and flagged in the legend.
pub fn decay_svg(title: &str, series: &[Series]) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(|x| *x > 0.0);
    let (xmin, xmax) = xs.fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).filter(|y| *y > 0.0 && y.is_finite());
    let (mut ymin, mut ymax) = ys.fold((f64::INFINITY, 0.0f64), |(a, b), y| (a.min(y), b.max(y)));
    if !ymin.is_finite() {
        (ymin, ymax) = (1e-3, 1.0);
    }
    let (xmin, xmax) = if xmin.is_finite() { (xmin, xmax.max(xmin * 1.0001)) } else { (1.0, 10.0) };
    let (xa, xb) = decades(xmin, xmax);
    let (ya, yb) = decades(ymin, ymax);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x.log10() - xa as f64) / (xb - xa) as f64 * pw;
    let py = |y: f64| {
        let l = if y > 0.0 { y.log10() } else { ya as f64 };
        TOP + ph - (l - ya as f64) / (yb - ya) as f64 * ph
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#);
    for k in xa..=xb {
        let x = LEFT + (k - xa) as f64 / (xb - xa) as f64 * pw;
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##, TOP + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{k}</text>"#, TOP + ph + 18.0);
    }
    for k in ya..=yb {
        let y = TOP + ph - (k - ya) as f64 / (yb - ya) as f64 * ph;
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{k}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">window start T</text>"#, LEFT + pw / 2.0, HEIGHT - 16.0);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">discrepancy (log scale)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser.points.iter().filter(|p| p.0 > 0.0).map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let dash = match ser.style {
            Style::Measured => "",
            Style::Bound => r#" stroke-dasharray="6 4""#,
        };
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#, pts.join(" "));
        if let Style::Measured = ser.style {
            for &(x, y) in ser.points.iter().filter(|p| p.0 > 0.0) {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(x), py(y));
            }
        }
        let floored = ser.points.iter().any(|p| !(p.1 > 0.0));
        let ly = TOP + 14.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0
        );
        let label = if floored { format!("{} (zeros at axis floor)", ser.label) } else { ser.label.clone() };
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&label));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn handles_zero_series() {
        let doc =
            decay_svg("zero", &[Series { label: "measured".into(), points: vec![(50.0, 0.0), (100.0, 0.0)], style: Style::Measured }]);
        assert!(doc.starts_with("<svg") && doc.ends_with("</svg>\n"));
        assert!(doc.contains("zeros at axis floor"));
        assert!(!doc.contains("NaN") && !doc.contains("inf"));
    }

    #[test]
    fn points_land_inside_the_frame() {
        let pts = vec![(50.0, 0.3), (12800.0, 0.004)];
        let doc = decay_svg("t", &[Series { label: "m".into(), points: pts, style: Style::Measured }]);
        for c in doc.lines().filter(|l| l.starts_with("<circle")) {
            let cx: f64 = c.split("cx=\"").nth(1).unwrap().split('"').next().unwrap().parse().unwrap();
            assert!((LEFT..=WIDTH - RIGHT).contains(&cx));
        }
    }
}
