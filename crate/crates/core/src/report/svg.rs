//! Minimal SVG chart writer: one plot area, two axes, a few mark types.

use std::fmt::Write as _;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub label: String,
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
}

impl Axis {
    /// Range covering `values` with a little padding. Non-finite values,
    /// and non-positive ones on a log axis, are ignored.
    pub fn fit(label: &str, scale: Scale, values: impl IntoIterator<Item = f64>) -> Self {
        let usable = values
            .into_iter()
            .filter(|v| v.is_finite() && (scale == Scale::Linear || *v > 0.0));
        let (lo, hi) = usable.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        let (min, max) = match scale {
            _ if !lo.is_finite() => match scale {
                Scale::Linear => (0.0, 1.0),
                Scale::Log10 => (1.0, 10.0),
            },
            Scale::Linear => {
                let pad = if hi > lo {
                    0.05 * (hi - lo)
                } else {
                    0.5_f64.max(lo.abs() * 0.1)
                };
                (lo - pad, hi + pad)
            }
            Scale::Log10 => {
                let (a, b) = (lo.log10(), hi.log10());
                let pad = if b > a { 0.05 * (b - a) } else { 0.5 };
                (10f64.powf(a - pad), 10f64.powf(b + pad))
            }
        };
        Self {
            label: label.to_string(),
            scale,
            min,
            max,
        }
    }

    pub fn with_range(mut self, min: f64, max: f64) -> Self {
        self.min = min;
        self.max = max;
        self
    }

    fn unit(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => (v - self.min) / (self.max - self.min),
            Scale::Log10 => (v.log10() - self.min.log10()) / (self.max.log10() - self.min.log10()),
        }
    }

    fn accepts(&self, v: f64) -> bool {
        v.is_finite() && (self.scale == Scale::Linear || v > 0.0)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match self.scale {
            Scale::Linear => {
                let span = self.max - self.min;
                let raw = span / 6.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 5.0, 10.0]
                    .iter()
                    .map(|m| m * mag)
                    .find(|s| *s >= raw)
                    .unwrap_or(10.0 * mag);
                let decimals = (-step.log10().floor()).max(0.0) as usize;
                let first = (self.min / step).ceil() as i64;
                let last = (self.max / step).floor() as i64;
                (first..=last)
                    .map(|i| {
                        let v = i as f64 * step;
                        (v, format!("{v:.decimals$}"))
                    })
                    .collect()
            }
            Scale::Log10 => {
                let first = self.min.log10().ceil() as i32;
                let last = self.max.log10().floor() as i32;
                (first..=last)
                    .map(|e| {
                        let v = 10f64.powi(e);
                        let label = if (0..=5).contains(&e) {
                            format!("{v:.0}")
                        } else {
                            format!("1e{e}")
                        };
                        (v, label)
                    })
                    .collect()
            }
        }
    }
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Chart {
    title: String,
    x: Axis,
    y: Axis,
    categories: Vec<String>,
    body: String,
    legend: Vec<(String, String)>,
}

impl Chart {
    pub fn new(title: &str, x: Axis, y: Axis) -> Self {
        Self {
            title: title.to_string(),
            x,
            y,
            categories: Vec::new(),
            body: String::new(),
            legend: Vec::new(),
        }
    }

    fn plot_w() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + self.x.unit(x) * Self::plot_w()
    }

    fn py(&self, y: f64) -> f64 {
        TOP + (1.0 - self.y.unit(y)) * Self::plot_h()
    }

    fn usable(&self, x: f64, y: f64) -> bool {
        self.x.accepts(x) && self.y.accepts(y)
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str, width: f64, dashed: bool) {
        let coords: Vec<String> = points
            .iter()
            .filter(|(x, y)| self.usable(*x, *y))
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        if coords.len() < 2 {
            return;
        }
        let dash = if dashed {
            r#" stroke-dasharray="6,4""#
        } else {
            ""
        };
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width}"{dash} points="{}"/>"#,
            coords.join(" ")
        );
    }

    pub fn circles(&mut self, points: &[(f64, f64)], color: &str, radius: f64) {
        for &(x, y) in points {
            if self.usable(x, y) {
                let _ = writeln!(
                    self.body,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{color}" fill-opacity="0.8"/>"#,
                    self.px(x),
                    self.py(y)
                );
            }
        }
    }

    pub fn diamond(&mut self, x: f64, y: f64, color: &str, size: f64) {
        if !self.usable(x, y) {
            return;
        }
        let (cx, cy) = (self.px(x), self.py(y));
        let _ = writeln!(
            self.body,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}" stroke="black" stroke-width="0.5"/>"#,
            cx,
            cy - size,
            cx + size,
            cy,
            cx,
            cy + size,
            cx - size,
            cy
        );
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str, color: &str) {
        if self.usable(x, y) {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{:.2}" font-size="9" fill="{color}">{}</text>"#,
                self.px(x) + 4.0,
                self.py(y) - 3.0,
                escape(text)
            );
        }
    }

    pub fn hline(&mut self, y: f64, color: &str, dashed: bool) {
        let pts = [(self.x.min, y), (self.x.max, y)];
        self.polyline(&pts, color, 1.2, dashed);
    }

    pub fn vline(&mut self, x: f64, color: &str, dashed: bool) {
        let pts = [(x, self.y.min), (x, self.y.max)];
        self.polyline(&pts, color, 1.2, dashed);
    }

    /// Vertical bars at positions `0..n`, with the x axis ticked by name.
    pub fn bars(&mut self, bars: &[(String, f64, &str)]) {
        self.categories = bars.iter().map(|b| b.0.clone()).collect();
        self.x = Axis {
            label: self.x.label.clone(),
            scale: Scale::Linear,
            min: -0.5,
            max: bars.len().max(1) as f64 - 0.5,
        };
        let half = 0.4 * Self::plot_w() / bars.len().max(1) as f64;
        let base = self.py(self.y.min.max(0.0));
        for (i, (_, v, color)) in bars.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let top = self.py(v.min(self.y.max));
            let _ = writeln!(
                self.body,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                self.px(i as f64) - half,
                top.min(base),
                2.0 * half,
                (base - top).abs()
            );
        }
    }

    pub fn note(&mut self, text: &str) {
        let _ = writeln!(
            self.body,
            r##"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle" fill="#555">{}</text>"##,
            LEFT + Self::plot_w() / 2.0,
            TOP + Self::plot_h() / 2.0,
            escape(text)
        );
    }

    pub fn legend_entry(&mut self, label: &str, color: &str) {
        self.legend.push((label.to_string(), color.to_string()));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let (pw, ph) = (Self::plot_w(), Self::plot_h());
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
        );
        let _ = writeln!(
            s,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath></defs>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );

        let bottom = TOP + ph;
        if self.categories.is_empty() {
            for (v, label) in self.x.ticks() {
                let x = self.px(v);
                let _ = writeln!(
                    s,
                    r##"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.1}" stroke="black"/><line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{bottom}" stroke="#e5e5e5"/><text x="{x:.2}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"##,
                    bottom + 5.0,
                    bottom + 18.0,
                    escape(&label)
                );
            }
        } else {
            for (i, name) in self.categories.iter().enumerate() {
                let x = self.px(i as f64);
                let _ = writeln!(
                    s,
                    r#"<text x="{x:.2}" y="{:.1}" font-size="9" text-anchor="end" transform="rotate(-60 {x:.2} {:.1})">{}</text>"#,
                    bottom + 10.0,
                    bottom + 10.0,
                    escape(name)
                );
            }
        }
        for (v, label) in self.y.ticks() {
            let y = self.py(v);
            let _ = writeln!(
                s,
                r##"<line x1="{:.1}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><line x1="{LEFT}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#e5e5e5"/><text x="{:.1}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
                LEFT - 5.0,
                LEFT + pw,
                LEFT - 8.0,
                y + 4.0,
                escape(&label)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 8.0,
            escape(&self.x.label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y.label)
        );

        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        s.push_str(&self.body);
        s.push_str("</g>\n");

        for (i, (label, color)) in self.legend.iter().enumerate().take(24) {
            let y = TOP + 8.0 + 15.0 * i as f64;
            let x = LEFT + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                y - 8.0,
                x + 15.0,
                y + 1.0,
                escape(label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
