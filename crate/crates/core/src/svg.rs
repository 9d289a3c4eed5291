//! Static SVG diagrams of interval sets.

use std::fmt::Write;

use crate::interval::IntervalSet;
use crate::rational::{self, Rational};

const WIDTH: f64 = 960.0;
const MARGIN: f64 = 20.0;
const BAR_Y: f64 = 40.0;
const BAR_H: f64 = 24.0;

/// Bars for the components of `set`; the `labelled_gaps` largest gaps carry their length.
pub fn interval_diagram(set: &IntervalSet, title: &str, labelled_gaps: usize) -> String {
    let mut out = String::new();
    let height = BAR_Y + BAR_H + 60.0;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{MARGIN}" y="20" font-family="monospace" font-size="12">{}</text>"#,
        escape(title)
    )
    .unwrap();
    let Some(hull) = set.hull() else {
        out.push_str("</svg>\n");
        return out;
    };
    let span = hull.length();
    let x = |v: &Rational| -> f64 {
        if span == Rational::from_integer(0.into()) {
            MARGIN
        } else {
            MARGIN + (WIDTH - 2.0 * MARGIN) * rational::to_f64(&((v - &hull.lo) / &span))
        }
    };
    for i in set.intervals() {
        let (x0, x1) = (x(&i.lo), x(&i.hi));
        writeln!(
            out,
            r#"<rect x="{x0:.3}" y="{BAR_Y}" width="{:.3}" height="{BAR_H}" fill="steelblue"/>"#,
            (x1 - x0).max(0.5)
        )
        .unwrap();
    }
    let mut gaps = set.gaps();
    gaps.sort_by(|a, b| b.length().cmp(&a.length()).then_with(|| a.lo.cmp(&b.lo)));
    gaps.truncate(labelled_gaps);
    gaps.sort_by(|a, b| a.lo.cmp(&b.lo));
    for (n, g) in gaps.iter().enumerate() {
        let mid = (x(&g.lo) + x(&g.hi)) / 2.0;
        let y = BAR_Y + BAR_H + 16.0 + 14.0 * (n % 3) as f64;
        writeln!(
            out,
            r#"<text x="{mid:.3}" y="{y}" font-family="monospace" font-size="10" text-anchor="middle">{}</text>"#,
            escape(&rational::format(&g.length()))
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{MARGIN}" y="{}" font-family="monospace" font-size="10">[{}, {}]</text>"#,
        height - 6.0,
        escape(&rational::format(&hull.lo)),
        escape(&rational::format(&hull.hi))
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
