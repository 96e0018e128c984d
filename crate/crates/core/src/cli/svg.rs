//! Minimal SVG line charts with a logarithmic `d` axis.

use std::fmt::Write as _;

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 320.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

/// One chart: `M` against `d` plus an optional dashed reference level.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub d: Vec<f64>,
    pub m: Vec<f64>,
    pub reference: Option<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

struct Axes {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Axes {
    fn fit(panel: &Panel) -> Self {
        let logs = panel.d.iter().map(|d| d.log10());
        let x_lo = logs.clone().fold(f64::INFINITY, f64::min).floor();
        let mut x_hi = logs.fold(f64::NEG_INFINITY, f64::max).ceil();
        if x_hi <= x_lo {
            x_hi = x_lo + 1.0;
        }
        let ys = panel.m.iter().chain(panel.reference.iter());
        let lo = ys.clone().fold(f64::INFINITY, |a, &b| a.min(b));
        let hi = ys.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let pad = if hi > lo {
            0.05 * (hi - lo)
        } else {
            (1e-3 * hi.abs()).max(1e-12)
        };
        Self {
            x_lo,
            x_hi,
            y_lo: lo - pad,
            y_hi: hi + pad,
        }
    }

    fn px(&self, d: f64) -> f64 {
        LEFT + (d.log10() - self.x_lo) / (self.x_hi - self.x_lo) * (PANEL_W - LEFT - RIGHT)
    }

    fn py(&self, m: f64) -> f64 {
        PANEL_H - BOTTOM - (m - self.y_lo) / (self.y_hi - self.y_lo) * (PANEL_H - TOP - BOTTOM)
    }
}

fn draw_panel(out: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let ax = Axes::fit(panel);
    let (x0, x1) = (LEFT, PANEL_W - RIGHT);
    let (y0, y1) = (TOP, PANEL_H - BOTTOM);
    let _ = writeln!(out, r#"<g transform="translate({ox:.2},{oy:.2})">"#);
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (x0 + x1) / 2.0,
        escape(&panel.title)
    );

    let mut e = ax.x_lo as i32;
    while e as f64 <= ax.x_hi {
        let x = ax.px(10f64.powi(e));
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="11">1e{e}</text>"#,
            y1 + 5.0,
            y1 + 18.0
        );
        e += 1;
    }
    let step = nice_step(ax.y_hi - ax.y_lo);
    let decimals = (-step.log10().floor()).clamp(0.0, 12.0) as usize;
    let mut tick = (ax.y_lo / step).ceil() * step;
    while tick <= ax.y_hi {
        let y = ax.py(tick);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{:.*}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            decimals,
            tick
        );
        tick += step;
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">d (log scale)</text>"#,
        (x0 + x1) / 2.0,
        PANEL_H - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {:.2})">M(d)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    if let Some(level) = panel.reference {
        let y = ax.py(level);
        let _ = writeln!(
            out,
            r#"<line data-role="reference" x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="6 4"/>"#
        );
    }
    let points: Vec<String> = panel
        .d
        .iter()
        .zip(&panel.m)
        .map(|(&d, &m)| format!("{:.2},{:.2}", ax.px(d), ax.py(m)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline data-role="curve" fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    out.push_str("</g>\n");
}

/// Lays the panels out on a grid with `columns` panels per row.
pub fn render(panels: &[Panel], columns: usize) -> String {
    let columns = columns.clamp(1, panels.len().max(1));
    let rows = panels.len().div_ceil(columns).max(1);
    let (w, h) = (PANEL_W * columns as f64, PANEL_H * rows as f64);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * (i % columns) as f64;
        let oy = PANEL_H * (i / columns) as f64;
        draw_panel(&mut out, panel, ox, oy);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(m: Vec<f64>) -> Panel {
        let d = (0..m.len()).map(|i| 10f64.powi(i as i32 - 2)).collect();
        Panel {
            title: "a < b & c".into(),
            d,
            m,
            reference: Some(1.0),
        }
    }

    #[test]
    fn renders_curve_reference_and_escaped_title() {
        let svg = render(&[panel(vec![1.0, 1.5, 2.0, 1.2])], 1);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b &amp; c"));
        assert!(svg.contains(r#"data-role="reference""#));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(">1e-2<") && svg.contains(">1e1<"));
    }

    #[test]
    fn multi_panel_layout_and_determinism() {
        let panels = vec![panel(vec![1.0, 2.0, 3.0]); 5];
        let svg = render(&panels, 3);
        assert!(svg.contains(r#"width="1440" height="640""#));
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert_eq!(svg, render(&panels, 3));
    }

    #[test]
    fn flat_curve_gets_a_finite_axis() {
        let svg = render(&[panel(vec![1.0; 4])], 1);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
