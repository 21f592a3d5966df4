//! SVG rendering of an entropy trace and its first two differences.

use std::fmt::Write;

use anyhow::{ensure, Result};
use pdelum::EvolutionTrace;

/// Entropy, first and second differences as `(iteration, value)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePlot {
    pub entropy: Vec<(f64, f64)>,
    pub first_diff: Vec<(f64, f64)>,
    pub second_diff: Vec<(f64, f64)>,
    pub chosen: usize,
}

impl TracePlot {
    /// `chosen` overrides the trace's own choice.
    pub fn new(trace: &EvolutionTrace, chosen: Option<usize>) -> Result<Self> {
        let recs = trace.records();
        let chosen = chosen.unwrap_or_else(|| trace.chosen_iteration());
        let last = recs.last().map_or(0, |r| r.iter);
        ensure!(
            chosen <= last,
            "chosen iteration {chosen} is past the last row ({last})"
        );
        let e: Vec<f64> = recs.iter().map(|r| r.entropy).collect();
        let at = |i: usize| recs[i].iter as f64;
        Ok(Self {
            entropy: recs.iter().map(|r| (r.iter as f64, r.entropy)).collect(),
            // Backward difference, plotted at the later iteration.
            first_diff: e
                .windows(2)
                .enumerate()
                .map(|(i, w)| (at(i + 1), w[1] - w[0]))
                .collect(),
            // Central difference, plotted at the middle iteration.
            second_diff: e
                .windows(3)
                .enumerate()
                .map(|(i, w)| (at(i + 1), w[2] - 2.0 * w[1] + w[0]))
                .collect(),
            chosen,
        })
    }

    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const PANEL: f64 = 180.0;
        const LEFT: f64 = 60.0;
        const RIGHT: f64 = 20.0;
        const TOP: f64 = 30.0;
        const GAP: f64 = 40.0;
        let height = TOP + 3.0 * PANEL + 2.0 * GAP + 30.0;
        let x_max = self.entropy.last().map_or(0.0, |p| p.0);
        let x = |it: f64| {
            if x_max == 0.0 {
                LEFT + (W - LEFT - RIGHT) / 2.0
            } else {
                LEFT + it / x_max * (W - LEFT - RIGHT)
            }
        };

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{height}" viewBox="0 0 {W} {height}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let panels = [
            ("entropy", "entropy (bits)", &self.entropy, "#1f77b4"),
            ("d1", "first difference", &self.first_diff, "#ff7f0e"),
            ("d2", "second difference", &self.second_diff, "#2ca02c"),
        ];
        let mut chosen_y = None;
        for (i, (id, title, pts, color)) in panels.into_iter().enumerate() {
            let top = TOP + i as f64 * (PANEL + GAP);
            let (lo, hi) = y_range(pts);
            let y = |v: f64| top + PANEL - (v - lo) / (hi - lo) * PANEL;
            let _ = writeln!(
                svg,
                r##"<rect x="{LEFT}" y="{top}" width="{}" height="{PANEL}" fill="none" stroke="#999"/>"##,
                W - LEFT - RIGHT
            );
            let _ = writeln!(
                svg,
                r#"<text x="{LEFT}" y="{:.2}" font-size="13">{title}</text>"#,
                top - 6.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
                LEFT - 4.0,
                top + 10.0,
                label(hi)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
                LEFT - 4.0,
                top + PANEL,
                label(lo)
            );
            let points: Vec<String> = pts
                .iter()
                .map(|&(it, v)| format!("{:.2},{:.2}", x(it), y(v)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline id="{id}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            if i == 0 {
                chosen_y = pts
                    .iter()
                    .find(|p| p.0 == self.chosen as f64)
                    .map(|p| y(p.1));
            }
        }
        let cx = x(self.chosen as f64);
        let bottom = TOP + 3.0 * PANEL + 2.0 * GAP;
        let _ = writeln!(
            svg,
            r##"<line id="chosen" x1="{cx:.2}" y1="{TOP}" x2="{cx:.2}" y2="{bottom}" stroke="#d62728" stroke-dasharray="4 3"/>"##
        );
        if let Some(cy) = chosen_y {
            let _ = writeln!(
                svg,
                r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="#d62728"/>"##
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">iteration (chosen = {})</text>"#,
            W / 2.0,
            height - 8.0,
            self.chosen
        );
        svg.push_str("</svg>\n");
        svg
    }
}

fn label(v: f64) -> String {
    format!("{v:.3}")
}

fn y_range(pts: &[(f64, f64)]) -> (f64, f64) {
    let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        (-1.0, 1.0)
    } else if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

/// Parses a trace CSV and renders it.
pub fn trace_plot(csv: &str, chosen: Option<usize>) -> Result<String> {
    let trace = EvolutionTrace::from_csv(csv)?;
    Ok(TracePlot::new(&trace, chosen)?.to_svg())
}
