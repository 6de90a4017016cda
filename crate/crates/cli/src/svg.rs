//! A small overlay plot of rate regions as an SVG document.

use std::collections::BTreeMap;
use std::fmt::Write;

use qic_core::region::RatePoint;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Renders the named regions (counterclockwise vertex lists) on shared
/// axes, translucent fills over solid outlines, largest rates setting the
/// scale. Region order — and so color assignment — follows the sorted
/// names.
pub fn render_regions(regions: &BTreeMap<String, Vec<RatePoint>>) -> String {
    let plot = SIZE - 2.0 * MARGIN;
    let max_rate = regions
        .values()
        .flatten()
        .map(|v| v.r1.max(v.r2))
        .fold(0.0, f64::max)
        .max(1e-9);
    // Round the axis end up to a tidy half-integer.
    let axis_max = (max_rate * 2.0).ceil() / 2.0;
    let x = |r1: f64| MARGIN + r1 / axis_max * plot;
    let y = |r2: f64| SIZE - MARGIN - r2 / axis_max * plot;

    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    );
    for (k, (name, vertices)) in regions.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = vertices
            .iter()
            .map(|v| format!("{:.2},{:.2}", x(v.r1), y(v.r2)))
            .collect();
        let _ = write!(
            out,
            "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.3\" \
             stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            points.join(" ")
        );
        let ly = MARGIN + 18.0 * k as f64;
        let _ = write!(
            out,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{color}\" \
             fill-opacity=\"0.6\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\">{name}</text>\n",
            SIZE - MARGIN - 170.0,
            ly,
            SIZE - MARGIN - 152.0,
            ly + 10.0,
        );
    }
    // Axes with ticks at 0, half, and full scale.
    let _ = write!(
        out,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{b}\" x2=\"{m}\" y2=\"{m}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = SIZE - MARGIN,
        r = SIZE - MARGIN,
    );
    for tick in [0.0, axis_max / 2.0, axis_max] {
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{tick:.2}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">{tick:.2}</text>\n",
            x(tick),
            SIZE - MARGIN + 16.0,
            MARGIN - 6.0,
            y(tick) + 4.0,
        );
    }
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\">R1 (bits/use)</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 {:.1} {:.1})\">R2 (bits/use)</text>\n</svg>\n",
        SIZE / 2.0,
        SIZE - 14.0,
        16.0,
        SIZE / 2.0,
        16.0,
        SIZE / 2.0,
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_every_region_with_a_stable_palette() {
        let mut regions = BTreeMap::new();
        regions.insert(
            "alpha".to_string(),
            vec![
                RatePoint { r1: 0.0, r2: 0.0 },
                RatePoint { r1: 1.0, r2: 0.0 },
                RatePoint { r1: 0.0, r2: 1.0 },
            ],
        );
        regions.insert(
            "beta".to_string(),
            vec![
                RatePoint { r1: 0.0, r2: 0.0 },
                RatePoint { r1: 0.5, r2: 0.0 },
                RatePoint { r1: 0.0, r2: 0.5 },
            ],
        );
        let svg = render_regions(&regions);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polygon").count(), 2);
        // Sorted names take palette entries in order.
        let alpha_at = svg.find("alpha").unwrap();
        let beta_at = svg.find("beta").unwrap();
        assert!(alpha_at < beta_at);
        assert!(svg.find(PALETTE[0]).unwrap() < svg.find(PALETTE[1]).unwrap());
    }
}
