//! Self-contained SVG plot generation. Everything is emitted directly as
//! markup: axes, decade ticks, polylines, and cell grids, with no plotting
//! dependency. Layout constants are shared so the figures look uniform.

use std::fmt::Write;

use currentlab::Hyperbolicity;

const W: f64 = 860.0;
const H: f64 = 620.0;
const ML: f64 = 80.0;
const MR: f64 = 30.0;
const MT: f64 = 50.0;
const MB: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#1f6fb2", "#d1495b", "#2e8b57", "#8d5a97", "#e07b39", "#4d4d4d",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn head(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"Helvetica, Arial, sans-serif\" font-size=\"13\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"17\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axis_box(s: &mut String, xlabel: &str, ylabel: &str) {
    let _ = write!(
        s,
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
        W - ML - MR,
        H - MT - MB,
        ML + (W - ML - MR) / 2.0,
        H - 18.0,
        escape(xlabel),
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0,
        escape(ylabel)
    );
}

struct LogMap {
    lx0: f64,
    lx1: f64,
    ly0: f64,
    ly1: f64,
}

impl LogMap {
    fn x(&self, v: f64) -> f64 {
        ML + (v.log10() - self.lx0) / (self.lx1 - self.lx0) * (W - ML - MR)
    }
    fn y(&self, v: f64) -> f64 {
        H - MB - (v.log10() - self.ly0) / (self.ly1 - self.ly0) * (H - MT - MB)
    }
}

fn decade_ticks(s: &mut String, lo: f64, hi: f64, map: impl Fn(f64) -> f64, vertical: bool) {
    let (mut d, top) = (lo.floor() as i64, hi.ceil() as i64);
    while d <= top {
        let v = 10f64.powi(d as i32);
        let pos = map(d as f64);
        if vertical {
            if pos >= MT - 1.0 && pos <= H - MB + 1.0 {
                let _ = write!(
                    s,
                    "<line x1=\"{ML}\" y1=\"{pos:.1}\" x2=\"{}\" y2=\"{pos:.1}\" stroke=\"#ddd\"/>\n\
                     <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{v:e}</text>\n",
                    W - MR,
                    ML - 8.0,
                    pos + 4.0
                );
            }
        } else if pos >= ML - 1.0 && pos <= W - MR + 1.0 {
            let _ = write!(
                s,
                "<line x1=\"{pos:.1}\" y1=\"{MT}\" x2=\"{pos:.1}\" y2=\"{}\" stroke=\"#ddd\"/>\n\
                 <text x=\"{pos:.1}\" y=\"{}\" text-anchor=\"middle\">{v:e}</text>\n",
                H - MB,
                H - MB + 18.0
            );
        }
        d += 1;
    }
}

fn legend(s: &mut String, series: &[Series]) {
    for (i, sr) in series.iter().enumerate() {
        let y = MT + 16.0 + 18.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let _ = write!(
            s,
            "<line x1=\"{}\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{}\" y=\"{:.1}\">{}</text>\n",
            W - MR - 180.0,
            W - MR - 150.0,
            W - MR - 144.0,
            y + 4.0,
            escape(&sr.label)
        );
    }
}

fn polyline(s: &mut String, pts: &[(f64, f64)], color: &str) {
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = write!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
        coords.join(" ")
    );
    for (x, y) in pts {
        let _ = write!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.6\" fill=\"{color}\"/>\n");
    }
}

/// Log-log line plot of positive data.
pub fn log_log_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for sr in series {
        pts.extend(sr.points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0));
    }
    let (mut lx0, mut lx1, mut ly0, mut ly1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &pts {
        lx0 = lx0.min(x.log10());
        lx1 = lx1.max(x.log10());
        ly0 = ly0.min(y.log10());
        ly1 = ly1.max(y.log10());
    }
    if !(lx0 < lx1) {
        lx1 = lx0 + 1.0;
    }
    if !(ly0 < ly1) {
        ly1 = ly0 + 1.0;
    }
    let pad = 0.05;
    let map = LogMap {
        lx0: lx0 - pad * (lx1 - lx0),
        lx1: lx1 + pad * (lx1 - lx0),
        ly0: ly0 - pad * (ly1 - ly0),
        ly1: ly1 + pad * (ly1 - ly0),
    };
    let mut s = head(title);
    decade_ticks(
        &mut s,
        map.ly0,
        map.ly1,
        |d| H - MB - (d - map.ly0) / (map.ly1 - map.ly0) * (H - MT - MB),
        true,
    );
    decade_ticks(
        &mut s,
        map.lx0,
        map.lx1,
        |d| ML + (d - map.lx0) / (map.lx1 - map.lx0) * (W - ML - MR),
        false,
    );
    axis_box(&mut s, xlabel, ylabel);
    for (i, sr) in series.iter().enumerate() {
        let mapped: Vec<(f64, f64)> = sr
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|&(x, y)| (map.x(x), map.y(y)))
            .collect();
        polyline(&mut s, &mapped, PALETTE[i % PALETTE.len()]);
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    s
}

/// Linear-axes line plot.
pub fn xy_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for sr in series {
        for &(x, y) in &sr.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if !(x0 < x1) {
        x1 = x0 + 1.0;
    }
    if !(y0 < y1) {
        y1 = y0 + 1.0;
    }
    let mx = |v: f64| ML + (v - x0) / (x1 - x0) * (W - ML - MR);
    let my = |v: f64| H - MB - (v - y0) / (y1 - y0) * (H - MT - MB);
    let mut s = head(title);
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = write!(
            s,
            "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{fx:.3}</text>\n\
             <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{fy:.3}</text>\n",
            mx(fx),
            H - MB + 18.0,
            ML - 8.0,
            my(fy) + 4.0
        );
    }
    axis_box(&mut s, xlabel, ylabel);
    for (i, sr) in series.iter().enumerate() {
        let mapped: Vec<(f64, f64)> = sr.points.iter().map(|&(x, y)| (mx(x), my(y))).collect();
        polyline(&mut s, &mapped, PALETTE[i % PALETTE.len()]);
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    s
}

/// Cell grid colored by log magnitude, dark blue (small) to warm yellow
/// (large). `grid[j][i]` holds the value at (xs[i], ys[j]).
pub fn heat_map(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64], grid: &[Vec<f64>]) -> String {
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for row in grid {
        for &v in row {
            if v > 0.0 {
                lo = lo.min(v.log10());
                hi = hi.max(v.log10());
            }
        }
    }
    if !(lo < hi) {
        hi = lo + 1.0;
    }
    let cw = (W - ML - MR) / xs.len() as f64;
    let ch = (H - MT - MB) / ys.len() as f64;
    let mut s = head(title);
    for (j, row) in grid.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let t = if v > 0.0 {
                ((v.log10() - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            // two-segment ramp through mid blue
            let (r, g, b) = if t < 0.5 {
                let u = t * 2.0;
                (20.0 + 40.0 * u, 30.0 + 110.0 * u, 90.0 + 90.0 * u)
            } else {
                let u = (t - 0.5) * 2.0;
                (60.0 + 190.0 * u, 140.0 + 90.0 * u, 180.0 - 130.0 * u)
            };
            let _ = write!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({},{},{})\"/>\n",
                ML + i as f64 * cw,
                H - MB - (j + 1) as f64 * ch,
                cw + 0.5,
                ch + 0.5,
                r as u32,
                g as u32,
                b as u32
            );
        }
    }
    axis_box(&mut s, xlabel, ylabel);
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"{}\">log10 range [{lo:.2}, {hi:.2}], x in [{:.3}, {:.3}], y in [{:.3}, {:.3}]</text>\n",
        ML,
        MT - 8.0,
        xs.first().unwrap_or(&0.0),
        xs.last().unwrap_or(&0.0),
        ys.first().unwrap_or(&0.0),
        ys.last().unwrap_or(&0.0)
    );
    s.push_str("</svg>\n");
    s
}

/// The sector between its two boundary rays with the exhaustion overlaid:
/// for each s, the segment of {v = s} and of {bu + av = s} that closes the
/// truncated region.
pub fn sector_view(h: &Hyperbolicity, s_values: &[f64], lambda: f64) -> String {
    let smax = s_values.iter().cloned().fold(1.0, f64::max) * 1.15;
    let umax = (h.u_star.abs() + 1.0 / h.b + 0.15) * smax;
    let (u0, u1) = (-umax, umax);
    let mx = |u: f64| ML + (u - u0) / (u1 - u0) * (W - ML - MR);
    let my = |v: f64| H - MB - v / (smax * 1.05) * (H - MT - MB);
    let mut s = head(&format!(
        "sector and exhaustion, a = {}, b = {}",
        h.a, h.b
    ));
    axis_box(&mut s, "u", "v");
    // boundary rays: v = 0 on one side, bu + av = 0 on the other
    let _ = write!(
        s,
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#333\" stroke-width=\"2\"/>\n",
        mx(0.0),
        my(0.0),
        mx(umax.min(1e6)),
        my(0.0)
    );
    let _ = write!(
        s,
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#333\" stroke-width=\"2\"/>\n",
        mx(0.0),
        my(0.0),
        mx(h.u_star * smax),
        my(smax)
    );
    for (i, &sv) in s_values.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        // horizontal edge from the slanted ray to the closing segment
        let u_corner = (sv - h.a * sv) / h.b;
        let _ = write!(
            s,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            mx(h.u_star * sv),
            my(sv),
            mx(u_corner),
            my(sv)
        );
        // vertical edge along bu + av = s down to v = 0
        let _ = write!(
            s,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n",
            mx(u_corner),
            my(sv),
            mx(sv / h.b),
            my(0.0)
        );
        let _ = write!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">s = {sv}</text>\n",
            mx(u_corner) + 6.0,
            my(sv) - 4.0
        );
    }
    // support cutoff bu + av = lambda
    let _ = write!(
        s,
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#999\" stroke-dasharray=\"3 3\"/>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" fill=\"#777\">cutoff {lambda}</text>\n",
        mx((lambda - h.a * lambda) / h.b),
        my(lambda),
        mx(lambda / h.b),
        my(0.0),
        mx(lambda / h.b) + 4.0,
        my(0.0) - 6.0
    );
    s.push_str("</svg>\n");
    s
}
