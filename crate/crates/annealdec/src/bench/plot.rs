//! SVG renderings of experiment output: effort-vs-size curves, logical
//! error rate sweeps, proxy statistics, and a lattice picture of a single
//! decoded instance. All plots are derived from the CSV rows; regenerating
//! them never changes the canonical data.

use super::runner::{CellSummary, DemoArtifacts};
use crate::decode::Method;
use crate::lattice::CodeLattice;
use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
];

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 70.0;
const MR: f64 = 30.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_x: bool,
    log_y: bool,
}

impl Frame {
    fn fit(points: &[(f64, f64)], log_x: bool, log_y: bool) -> Frame {
        let tr = |v: f64, log: bool| if log { v.log10() } else { v };
        let xs: Vec<f64> = points.iter().map(|&(x, _)| tr(x, log_x)).collect();
        let ys: Vec<f64> = points.iter().map(|&(_, y)| tr(y, log_y)).collect();
        let span = |vs: &[f64]| {
            let lo = vs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if lo.is_finite() && hi.is_finite() {
                let pad = ((hi - lo) * 0.08).max(0.05);
                (lo - pad, hi + pad)
            } else {
                (0.0, 1.0)
            }
        };
        let (x_min, x_max) = span(&xs);
        let (y_min, y_max) = span(&ys);
        Frame { x_min, x_max, y_min, y_max, log_x, log_y }
    }

    fn px(&self, x: f64) -> f64 {
        let v = if self.log_x { x.log10() } else { x };
        ML + (v - self.x_min) / (self.x_max - self.x_min) * (W - ML - MR)
    }

    fn py(&self, y: f64) -> f64 {
        let v = if self.log_y { y.log10() } else { y };
        H - MB - (v - self.y_min) / (self.y_max - self.y_min) * (H - MT - MB)
    }

    fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
        if log {
            let (a, b) = (lo.floor() as i32, hi.ceil() as i32);
            return (a..=b).map(|k| 10f64.powi(k)).filter(|v| {
                let l = v.log10();
                l >= lo - 1e-9 && l <= hi + 1e-9
            }).collect();
        }
        let raw = (hi - lo) / 4.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|s| s * mag)
            .find(|s| raw <= *s)
            .unwrap_or(10.0 * mag);
        let mut t = (lo / step).ceil() * step;
        let mut out = Vec::new();
        while t <= hi + 1e-9 {
            out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
            t += step;
        }
        out
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = write!(
            svg,
            "<rect x='{ML}' y='{MT}' width='{}' height='{}' fill='none' stroke='#333'/>",
            W - ML - MR,
            H - MT - MB
        );
        let _ = write!(
            svg,
            "<text x='{}' y='22' text-anchor='middle' font-size='15'>{title}</text>",
            W / 2.0
        );
        let _ = write!(
            svg,
            "<text x='{}' y='{}' text-anchor='middle' font-size='13'>{xlabel}</text>",
            W / 2.0,
            H - 12.0
        );
        let _ = write!(
            svg,
            "<text x='16' y='{}' text-anchor='middle' font-size='13' transform='rotate(-90 16 {})'>{ylabel}</text>",
            H / 2.0,
            H / 2.0
        );
        for t in Frame::ticks(self.x_min, self.x_max, self.log_x) {
            let x = self.px(t);
            let _ = write!(svg, "<line x1='{x:.1}' y1='{}' x2='{x:.1}' y2='{}' stroke='#333'/>", H - MB, H - MB + 5.0);
            let label = if self.log_x { format!("{t:e}") } else { format!("{t}") };
            let _ = write!(
                svg,
                "<text x='{x:.1}' y='{}' text-anchor='middle' font-size='11'>{label}</text>",
                H - MB + 18.0
            );
        }
        for t in Frame::ticks(self.y_min, self.y_max, self.log_y) {
            let y = self.py(t);
            let _ = write!(svg, "<line x1='{}' y1='{y:.1}' x2='{ML}' y2='{y:.1}' stroke='#333'/>", ML - 5.0);
            let label = if self.log_y { format!("{t:e}") } else { format!("{t}") };
            let _ = write!(
                svg,
                "<text x='{}' y='{:.1}' text-anchor='end' font-size='11'>{label}</text>",
                ML - 8.0,
                y + 4.0
            );
        }
    }
}

struct Series {
    label: String,
    /// (x, y, optional y standard error)
    points: Vec<(f64, f64, Option<f64>)>,
}

fn xy_chart(series: &[Series], title: &str, xlabel: &str, ylabel: &str, log: bool) -> String {
    let mut svg = format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}' viewBox='0 0 {W} {H}' font-family='sans-serif'>\n<rect width='{W}' height='{H}' fill='white'/>"
    );
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(x, y, _)| (x, y)))
        .collect();
    if all.is_empty() {
        let _ = write!(
            svg,
            "<text x='{}' y='{}' text-anchor='middle' font-size='14'>no data</text></svg>",
            W / 2.0,
            H / 2.0
        );
        return svg;
    }
    let frame = Frame::fit(&all, log, log);
    frame.axes(&mut svg, title, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = s.points.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y, _)| format!("{:.1},{:.1}", frame.px(x), frame.py(y)))
            .collect();
        if path.len() > 1 {
            let _ = write!(
                svg,
                "<polyline points='{}' fill='none' stroke='{color}' stroke-width='1.5'/>",
                path.join(" ")
            );
        }
        for &(x, y, se) in &pts {
            let (cx, cy) = (frame.px(x), frame.py(y));
            if let Some(se) = se {
                if se > 0.0 && !frame.log_y {
                    let (y0, y1) = (frame.py(y - se), frame.py(y + se));
                    let _ = write!(
                        svg,
                        "<line x1='{cx:.1}' y1='{y0:.1}' x2='{cx:.1}' y2='{y1:.1}' stroke='{color}'/>\
                         <line x1='{:.1}' y1='{y0:.1}' x2='{:.1}' y2='{y0:.1}' stroke='{color}'/>\
                         <line x1='{:.1}' y1='{y1:.1}' x2='{:.1}' y2='{y1:.1}' stroke='{color}'/>",
                        cx - 3.0, cx + 3.0, cx - 3.0, cx + 3.0
                    );
                }
            }
            let _ = write!(svg, "<circle cx='{cx:.1}' cy='{cy:.1}' r='3' fill='{color}'/>");
        }
        let ly = MT + 16.0 + 16.0 * i as f64;
        let _ = write!(
            svg,
            "<circle cx='{}' cy='{ly:.1}' r='3' fill='{color}'/><text x='{}' y='{:.1}' font-size='11'>{}</text>",
            ML + 12.0,
            ML + 20.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>");
    svg
}

/// Mean decode effort vs problem size on log-log axes, one series per
/// (method, error rate). Trials that finish at iteration 0 cannot appear
/// on log axes and are dropped from the picture only.
pub fn scaling_plot(cells: &[CellSummary]) -> String {
    let mut keys: Vec<(Method, u64)> = cells.iter().map(|c| (c.method, c.p.to_bits())).collect();
    keys.sort();
    keys.dedup();
    let series: Vec<Series> = keys
        .into_iter()
        .map(|(method, p_bits)| {
            let p = f64::from_bits(p_bits);
            Series {
                label: format!("{method} p={p}"),
                points: cells
                    .iter()
                    .filter(|c| c.method == method && c.p.to_bits() == p_bits)
                    .filter(|c| c.mean_iterations > 0.0)
                    .map(|c| (c.n_d as f64, c.mean_iterations, None))
                    .collect(),
            }
        })
        .collect();
    xy_chart(&series, "decode effort vs problem size", "data qubits N_d", "mean iterations", true)
}

/// Logical error rate vs physical error rate with binomial error bars,
/// one series per (method, d).
pub fn threshold_plot(cells: &[CellSummary]) -> String {
    let mut keys: Vec<(Method, usize)> = cells.iter().map(|c| (c.method, c.d)).collect();
    keys.sort();
    keys.dedup();
    let series: Vec<Series> = keys
        .into_iter()
        .map(|(method, d)| Series {
            label: format!("{method} d={d}"),
            points: cells
                .iter()
                .filter(|c| c.method == method && c.d == d)
                .map(|c| (c.p, c.logical_rate, Some(c.logical_se)))
                .collect(),
        })
        .collect();
    xy_chart(&series, "logical error rate", "physical error rate p", "P_L", false)
}

/// Ground-state-proxy fraction vs physical error rate per (method, d).
pub fn ground_stats_plot(cells: &[CellSummary]) -> String {
    let mut keys: Vec<(Method, usize)> = cells.iter().map(|c| (c.method, c.d)).collect();
    keys.sort();
    keys.dedup();
    let series: Vec<Series> = keys
        .into_iter()
        .map(|(method, d)| Series {
            label: format!("{method} d={d}"),
            points: cells
                .iter()
                .filter(|c| c.method == method && c.d == d)
                .map(|c| (c.p, c.proxy_rate, Some(c.proxy_se)))
                .collect(),
        })
        .collect();
    xy_chart(&series, "ground-state proxy fraction", "physical error rate p", "fraction", false)
}

/// Picture of one decoded instance: data qubits, defects, the actual
/// error, and the first method's estimate.
pub fn demo_plot(lat: &CodeLattice, art: &DemoArtifacts) -> String {
    let cell = if lat.d <= 12 { 40.0 } else { 16.0 };
    let margin = 50.0;
    let side = (lat.d - 1) as f64 * cell + 2.0 * margin;
    let pos_q = |q: usize| {
        let (row, col) = lat.qubit_position(q);
        (margin + col * cell, margin + row * cell)
    };
    let pos_v = |v: usize| {
        let (row, col) = lat.vertex_position(v);
        (margin + col * cell, margin + row * cell)
    };
    let mut svg = format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{side}' height='{}' viewBox='0 0 {side} {}' font-family='sans-serif'>\n<rect width='{side}' height='{}' fill='white'/>",
        side + 30.0,
        side + 30.0,
        side + 30.0
    );
    let (method, estimate) = match art.estimates.first() {
        Some((m, e)) => (Some(*m), Some(e)),
        None => (None, None),
    };
    for q in 0..lat.n_data {
        let (x, y) = pos_q(q);
        let _ = write!(svg, "<circle cx='{x:.1}' cy='{y:.1}' r='2' fill='#ccc'/>");
    }
    if let Some(est) = estimate {
        for q in 0..lat.n_data {
            if est.bits[q] {
                let (x, y) = pos_q(q);
                let _ = write!(
                    svg,
                    "<circle cx='{x:.1}' cy='{y:.1}' r='6' fill='none' stroke='#1f77b4' stroke-width='2'/>"
                );
            }
        }
    }
    for q in 0..lat.n_data {
        if art.actual.bits[q] {
            let (x, y) = pos_q(q);
            let _ = write!(svg, "<circle cx='{x:.1}' cy='{y:.1}' r='3.5' fill='#d62728'/>");
        }
    }
    for v in art.syndrome.defects() {
        let (x, y) = pos_v(v);
        let _ = write!(
            svg,
            "<rect x='{:.1}' y='{:.1}' width='7' height='7' transform='rotate(45 {x:.1} {y:.1})' fill='#111'/>",
            x - 3.5,
            y - 3.5
        );
    }
    let method_label = method.map(|m| m.to_string()).unwrap_or_else(|| "none".into());
    let _ = write!(
        svg,
        "<text x='{margin}' y='{:.1}' font-size='13'>d={} p={} method={} | red: actual, blue ring: estimate, diamond: defect</text>",
        side + 18.0,
        art.d,
        art.p,
        method_label
    );
    svg.push_str("</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::Method;
    use crate::lattice::{build_lattice, extract_syndrome, sample_errors, ErrorPattern};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cell(d: usize, p: f64, method: Method) -> CellSummary {
        CellSummary {
            d,
            n_d: d * d + (d - 1) * (d - 1),
            p,
            method,
            trials: 100,
            syndrome_rate: 1.0,
            logical_rate: 0.1 * p * d as f64,
            logical_se: 0.01,
            proxy_rate: 0.9,
            proxy_se: 0.02,
            mean_iterations: (d * d) as f64,
            mean_iterations_proxy: Some(1.0),
            mean_iterations_excited: None,
        }
    }

    #[test]
    fn charts_are_valid_svg_with_legends() {
        let cells: Vec<CellSummary> = [4, 6, 8]
            .iter()
            .flat_map(|&d| {
                [(0.01, Method::Da), (0.01, Method::Sa)]
                    .iter()
                    .map(move |&(p, m)| cell(d, p, m))
                    .collect::<Vec<_>>()
            })
            .collect();
        for svg in [scaling_plot(&cells), threshold_plot(&cells), ground_stats_plot(&cells)] {
            assert!(svg.starts_with("<svg"));
            assert!(svg.ends_with("</svg>"));
            assert!(svg.contains("da"));
        }
        assert!(scaling_plot(&[]).contains("no data"));
    }

    #[test]
    fn demo_render_marks_all_layers() {
        let lat = build_lattice(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let actual = sample_errors(&lat, 0.1, &mut rng).unwrap();
        let syndrome = extract_syndrome(&lat, &actual).unwrap();
        let art = DemoArtifacts {
            d: 5,
            p: 0.1,
            actual: actual.clone(),
            syndrome: syndrome.clone(),
            estimates: vec![(Method::Mwpm, ErrorPattern::empty(lat.n_data))],
        };
        let svg = demo_plot(&lat, &art);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>"));
        assert_eq!(svg.matches("fill='#d62728'").count(), actual.weight());
        assert_eq!(svg.matches("rotate(45").count(), syndrome.defects().len());
    }
}
