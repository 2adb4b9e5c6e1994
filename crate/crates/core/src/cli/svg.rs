use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

/// Minimal SVG line chart of a cumulative MAPE series.
pub(crate) fn line_chart(series: &[f64]) -> String {
    let max = series.iter().copied().fold(0.0f64, f64::max);
    let y_top = if max > 0.0 { max } else { 1.0 };
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let span = series.len().saturating_sub(1).max(1) as f64;

    let points: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = MARGIN + plot_w * i as f64 / span;
            let y = HEIGHT - MARGIN - plot_h * v / y_top;
            format!("{x:.2},{y:.2}")
        })
        .collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        s,
        r#"<text x="{x0}" y="{:.2}" font-family="sans-serif" font-size="12">{y_top:.2}%</text>"#,
        y1 - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{x1}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">test step {}</text>"#,
        y0 + 20.0,
        series.len()
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">Cumulative MAPE</text>"#,
        WIDTH / 2.0
    );
    s.push_str("</svg>\n");
    s
}
