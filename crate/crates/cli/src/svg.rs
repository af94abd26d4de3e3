//! Minimal SVG line-plot emitter: axes, tick labels, polylines, optional
//! dashed horizontal baselines, and a legend. Diagnostic quality only.

/// One plotted curve.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A dashed horizontal reference line.
pub struct Baseline {
    pub label: String,
    pub y: f64,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e5) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() { "0".into() } else { s }
    } else {
        format!("{v:.2e}")
    }
}

fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect()
}

/// Renders a complete standalone SVG document.
pub fn line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    baselines: &[Baseline],
) -> String {
    let all_pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (mut x_lo, mut x_hi) = all_pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let mut y_vals: Vec<f64> = all_pts.iter().map(|p| p.1).collect();
    y_vals.extend(baselines.iter().map(|b| b.y));
    let (mut y_lo, mut y_hi) = y_vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !x_lo.is_finite() {
        (x_lo, x_hi) = (0.0, 1.0);
    }
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    if x_lo == x_hi {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_lo == y_hi {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = move |y: f64| MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        esc(title)
    ));

    // Axes with tick marks and labels.
    out.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = MARGIN_L + plot_w,
        t = MARGIN_T,
        b = MARGIN_T + plot_h
    ));
    for tx in ticks(x_lo, x_hi, 5) {
        let px = sx(tx);
        out.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{b}\" x2=\"{px}\" y2=\"{b2}\" stroke=\"black\"/>\n\
             <text x=\"{px}\" y=\"{ty}\" text-anchor=\"middle\">{}</text>\n",
            fmt(tx),
            b = MARGIN_T + plot_h,
            b2 = MARGIN_T + plot_h + 5.0,
            ty = MARGIN_T + plot_h + 20.0,
        ));
    }
    for ty in ticks(y_lo, y_hi, 5) {
        let py = sy(ty);
        out.push_str(&format!(
            "<line x1=\"{l2}\" y1=\"{py}\" x2=\"{l}\" y2=\"{py}\" stroke=\"black\"/>\n\
             <text x=\"{tx}\" y=\"{tyy}\" text-anchor=\"end\">{}</text>\n",
            fmt(ty),
            l = MARGIN_L,
            l2 = MARGIN_L - 5.0,
            tx = MARGIN_L - 8.0,
            tyy = py + 4.0,
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0,
        esc(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        esc(y_label)
    ));

    // Baselines first so curves draw on top.
    let mut legend: Vec<(String, String, bool)> = Vec::new();
    for (i, b) in baselines.iter().enumerate() {
        let color = PALETTE[(series.len() + i) % PALETTE.len()];
        let py = sy(b.y);
        out.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{py}\" x2=\"{r}\" y2=\"{py}\" stroke=\"{color}\" \
             stroke-dasharray=\"6 4\"/>\n",
            l = MARGIN_L,
            r = MARGIN_L + plot_w,
        ));
        legend.push((b.label.clone(), color.to_string(), true));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> =
            s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        for &(x, y) in &s.points {
            out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
        legend.push((s.label.clone(), color.to_string(), false));
    }

    for (i, (label, color, dashed)) in legend.iter().enumerate() {
        let ly = MARGIN_T + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        let dash = if *dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        out.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"{dash}/>\n\
             <text x=\"{}\" y=\"{}\">{}</text>\n",
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            esc(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed_and_contains_data() {
        let svg = line_plot(
            "demo",
            "x",
            "y",
            &[Series { label: "curve<1>".into(), points: vec![(1.0, 0.5), (2.0, 0.25)] }],
            &[Baseline { label: "base".into(), y: 0.4 }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("curve&lt;1&gt;"));
        roxmltree::Document::parse(&svg).expect("well-formed XML");
    }

    #[test]
    fn degenerate_inputs_still_render() {
        let svg = line_plot(
            "single point",
            "x",
            "y",
            &[Series { label: "p".into(), points: vec![(3.0, 3.0)] }],
            &[],
        );
        roxmltree::Document::parse(&svg).expect("well-formed XML");
    }
}
