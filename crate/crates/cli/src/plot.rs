use std::fmt::Write;

/// Scatter of log(mean τ) against 1/q^α as a standalone SVG.
pub fn svg(family: &str, alpha: u64, points: &[(f64, f64)]) -> String {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p.1 > 0.0).map(|&(q, m)| (q.powi(-(alpha as i32)), m.ln())).collect();
    let (w, h, pad) = (480.0, 360.0, 50.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>").unwrap();
    writeln!(s, "<text x=\"{}\" y=\"20\" text-anchor=\"middle\">{family}: log mean tau vs 1/q^{alpha}</text>", w / 2.0)
        .unwrap();
    let axis = format!("stroke=\"black\" x1=\"{pad}\" y1=\"{}\"", h - pad);
    writeln!(s, "<line {axis} x2=\"{}\" y2=\"{}\"/>", w - pad, h - pad).unwrap();
    writeln!(s, "<line {axis} x2=\"{pad}\" y2=\"{pad}\"/>").unwrap();
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    for &(x, y) in &pts {
        writeln!(s, "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"4\" fill=\"steelblue\"/>", px(x), py(y)).unwrap();
    }
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        writeln!(s, "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"{anchor}\">{v:.2}</text>", px(v), h - pad + 16.0)
            .unwrap();
    }
    for v in [y0, y1] {
        writeln!(s, "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{v:.2}</text>", pad - 4.0, py(v) + 4.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
