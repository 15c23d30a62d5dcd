//! Minimal SVG line plots: axes with ticks, linear or logarithmic scales,
//! dashed series, vertical markers and a legend.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub color: &'static str,
    /// SVG `stroke-dasharray`, solid when `None`.
    pub dash: Option<&'static str>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
    /// Labelled vertical lines at data-space x positions.
    pub markers: Vec<(f64, String)>,
}

struct Axis {
    scale: Scale,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(scale: Scale, values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (scale == Scale::Linear || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (1.0, 10.0);
        }
        match scale {
            Scale::Linear => {
                if hi == lo {
                    hi = lo + 1.0;
                }
                let step = nice_step((hi - lo) / 6.0);
                lo = (lo / step).floor() * step;
                hi = (hi / step).ceil() * step;
            }
            Scale::Log => {
                lo = 10f64.powf(lo.log10().floor());
                hi = 10f64.powf(hi.log10().ceil());
                if hi <= lo {
                    hi = lo * 10.0;
                }
            }
        }
        Axis {
            scale,
            lo,
            hi,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        let f = match self.scale {
            Scale::Linear => (v - self.lo) / (self.hi - self.lo),
            Scale::Log => (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10()),
        };
        self.px_lo + f * (self.px_hi - self.px_lo)
    }

    fn contains(&self, v: f64) -> bool {
        v.is_finite() && (self.scale == Scale::Linear || v > 0.0)
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => {
                let step = nice_step((self.hi - self.lo) / 6.0);
                let n = ((self.hi - self.lo) / step).round() as i64;
                (0..=n).map(|i| self.lo + i as f64 * step).collect()
            }
            Scale::Log => {
                let (a, b) = (
                    self.lo.log10().round() as i32,
                    self.hi.log10().round() as i32,
                );
                let stride = ((b - a) / 8).max(1);
                (a..=b)
                    .step_by(stride as usize)
                    .map(|e| 10f64.powi(e))
                    .collect()
            }
        }
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn tick_label(v: f64, scale: Scale) -> String {
    match scale {
        Scale::Log => format!("1e{}", v.log10().round() as i32),
        Scale::Linear if v == 0.0 => "0".into(),
        Scale::Linear if v.abs() >= 1e4 || v.abs() < 1e-2 => format!("{v:.1e}"),
        Scale::Linear => {
            let s = format!("{v:.3}");
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    /// Renders the plot. `timestamp` adds a generation-time comment.
    pub fn render(&self, timestamp: Option<u64>) -> String {
        let x = Axis::new(
            self.x_scale,
            self.series.iter().flat_map(|s| s.xs.iter().copied()),
            LEFT,
            WIDTH - RIGHT,
        );
        let y = Axis::new(
            self.y_scale,
            self.series.iter().flat_map(|s| s.ys.iter().copied()),
            HEIGHT - BOTTOM,
            TOP,
        );
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        if let Some(ts) = timestamp {
            let _ = writeln!(w, "<!-- generated at unix time {ts} -->");
        }
        let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            w,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            escape(&self.title)
        );

        // frame and ticks
        let (x0, x1, y0, y1) = (x.px_lo, x.px_hi, y.px_lo, y.px_hi);
        let _ = writeln!(
            w,
            r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        for t in x.ticks() {
            let px = x.map(t);
            let _ = writeln!(
                w,
                r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
                y0 + 5.0,
                y0 + 19.0,
                tick_label(t, x.scale)
            );
        }
        for t in y.ticks() {
            let py = y.map(t);
            let _ = writeln!(
                w,
                r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                tick_label(t, y.scale)
            );
        }
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            w,
            r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );

        let _ = writeln!(
            w,
            r#"<clipPath id="plot-area"><rect x="{x0}" y="{y1}" width="{}" height="{}"/></clipPath>"#,
            x1 - x0,
            y0 - y1
        );
        for (mx, label) in &self.markers {
            if !x.contains(*mx) {
                continue;
            }
            let px = x.map(*mx);
            let _ = writeln!(
                w,
                r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{y1}" stroke="gray" stroke-dasharray="2 3"/><text x="{:.2}" y="{}" fill="gray">{}</text>"#,
                px + 3.0,
                y1 + 14.0,
                escape(label)
            );
        }
        for s in &self.series {
            let mut d = String::new();
            let mut pen_down = false;
            for (&xv, &yv) in s.xs.iter().zip(&s.ys) {
                if !(x.contains(xv) && y.contains(yv)) {
                    pen_down = false;
                    continue;
                }
                let cmd = if pen_down { 'L' } else { 'M' };
                let _ = write!(d, "{cmd}{:.2} {:.2} ", x.map(xv), y.map(yv));
                pen_down = true;
            }
            let dash = s
                .dash
                .map(|p| format!(r#" stroke-dasharray="{p}""#))
                .unwrap_or_default();
            let _ = writeln!(
                w,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5"{dash} clip-path="url(#plot-area)"/>"#,
                d.trim_end(),
                s.color
            );
        }

        // legend
        for (i, s) in self.series.iter().enumerate() {
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = x1 + 12.0;
            let dash = s
                .dash
                .map(|p| format!(r#" stroke-dasharray="{p}""#))
                .unwrap_or_default();
            let _ = writeln!(
                w,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="1.5"{dash}/><text x="{}" y="{}">{}</text>"#,
                lx + 28.0,
                s.color,
                lx + 34.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(scale: Scale) -> Plot {
        Plot {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_scale: scale,
            y_scale: scale,
            series: vec![Series {
                label: "s".into(),
                xs: vec![0.0, 0.1, 1.0, 10.0],
                ys: vec![0.0, 0.01, 1.0, 100.0],
                color: "black",
                dash: Some("6 3"),
            }],
            markers: vec![(1.0, "t_b".into())],
        }
    }

    #[test]
    fn renders_well_formed_document() {
        let s = plot(Scale::Linear).render(None);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert!(s.contains("stroke-dasharray=\"6 3\""));
        assert!(s.contains(">t_b</text>"));
        assert!(!s.contains("generated at"));
        assert!(plot(Scale::Linear).render(Some(5)).contains("unix time 5"));
    }

    #[test]
    fn log_axes_skip_nonpositive_points() {
        let s = plot(Scale::Log).render(None);
        let path = s.lines().find(|l| l.starts_with("<path")).unwrap();
        assert_eq!(path.matches('M').count(), 1);
        assert_eq!(path.matches('L').count(), 2);
        assert!(s.contains(">1e-2</text>") && s.contains(">1e2</text>"));
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(0.13), 0.2);
        assert_eq!(nice_step(3.0), 5.0);
        assert_eq!(nice_step(70.0), 100.0);
    }
}
