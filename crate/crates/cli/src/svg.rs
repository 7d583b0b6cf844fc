//! Minimal standalone SVG line plots on log-log axes.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;

/// Polyline of `(x, y)` with both axes in `log10`. Points with a non-positive
/// or non-finite coordinate are dropped.
pub fn loglog_polyline(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let span = |sel: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(sel).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
        match (lo.is_finite(), hi > lo) {
            (false, _) => (0.0, 1.0),
            (true, true) => (lo, hi),
            (true, false) => (lo - 0.5, lo + 0.5),
        }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n"
    ));
    s.push_str(&format!("  <title>{}</title>\n", escape(title)));
    s.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "  <path d=\"M{m},{t} V{b} H{r}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    ));
    s.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
        coords.join(" ")
    ));
    let label = |x: f64, y: f64, anchor: &str, text: String| {
        format!("  <text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"{anchor}\">{}</text>\n", escape(&text))
    };
    s.push_str(&label(WIDTH / 2.0, HEIGHT - 10.0, "middle", format!("log10 {x_label}")));
    s.push_str(&label(12.0, MARGIN - 16.0, "start", format!("log10 {y_label}")));
    s.push_str(&label(MARGIN, HEIGHT - MARGIN + 14.0, "start", format!("{x0:.3}")));
    s.push_str(&label(WIDTH - MARGIN, HEIGHT - MARGIN + 14.0, "end", format!("{x1:.3}")));
    s.push_str(&label(MARGIN - 4.0, HEIGHT - MARGIN, "end", format!("{y0:.3}")));
    s.push_str(&label(MARGIN - 4.0, MARGIN + 4.0, "end", format!("{y1:.3}")));
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
