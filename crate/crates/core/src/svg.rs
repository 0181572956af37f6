//! Deterministic SVG rendering of planar instances: gray lines, black
//! points, red forest edges, and a face-count legend.

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::forest::SpanningForest;
use crate::geometry::Instance;

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Clips the line a x + b y + c = 0 to a rectangle; `None` when it misses.
fn clip_line(a: f64, b: f64, c: f64, rect: (f64, f64, f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (x0, y0, x1, y1) = rect;
    let mut hits: Vec<(f64, f64)> = Vec::new();
    let mut push = |x: f64, y: f64| {
        if hits.iter().all(|&(hx, hy)| (hx - x).abs() > 1e-9 || (hy - y).abs() > 1e-9) {
            hits.push((x, y));
        }
    };
    if b.abs() > 1e-12 {
        for x in [x0, x1] {
            let y = -(a * x + c) / b;
            if (y0..=y1).contains(&y) {
                push(x, y);
            }
        }
    }
    if a.abs() > 1e-12 {
        for y in [y0, y1] {
            let x = -(b * y + c) / a;
            if (x0..=x1).contains(&x) {
                push(x, y);
            }
        }
    }
    if hits.len() >= 2 {
        Some((hits[0], hits[1]))
    } else {
        None
    }
}

/// Renders a planar instance. The arrangement is only consulted for the
/// face-count legend; the forest overlay is optional.
pub fn render(
    inst: &Instance,
    arr: Option<&Arrangement>,
    forest: Option<&SpanningForest>,
) -> Result<String> {
    if inst.dim != 2 {
        return Err(Error::DimensionUnsupported { expected: 2, got: inst.dim });
    }
    let xs: Vec<f64> = inst.points.iter().map(|p| p.coords[0] as f64).collect();
    let ys: Vec<f64> = inst.points.iter().map(|p| p.coords[1] as f64).collect();
    let (mut x0, mut x1) = xs
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let (mut y0, mut y1) = ys
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if xs.is_empty() {
        (x0, x1, y0, y1) = (-10.0, 10.0, -10.0, 10.0);
    }
    let margin = ((x1 - x0).max(y1 - y0) * 0.12).max(5.0);
    let rect = (x0 - margin, y0 - margin, x1 + margin, y1 + margin);
    let (rx0, ry0, rx1, ry1) = rect;
    let w = rx1 - rx0;
    let h = ry1 - ry0;
    let dot = (w.max(h) * 0.008).max(0.2);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n",
        fmt(rx0), fmt(-ry1), fmt(w), fmt(h), fmt(800.0 * h / w),
    ));
    out.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\" stroke=\"black\" stroke-width=\"{}\"/>\n",
        fmt(rx0), fmt(-ry1), fmt(w), fmt(h), fmt(w * 0.002),
    ));
    for hp in &inst.hyperplanes {
        let (a, b, c) = (hp.normal[0] as f64, hp.normal[1] as f64, hp.offset as f64);
        if let Some(((ax, ay), (bx, by))) = clip_line(a, b, c, (rx0, ry0, rx1, ry1)) {
            out.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-width=\"{}\"/>\n",
                fmt(ax), fmt(-ay), fmt(bx), fmt(-by), fmt(w * 0.0025),
            ));
        }
    }
    if let Some(f) = forest {
        for e in &f.edges {
            let p = &inst.points[e.a as usize];
            let q = &inst.points[e.b as usize];
            out.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"red\" stroke-width=\"{}\"/>\n",
                fmt(p.coords[0] as f64),
                fmt(-(p.coords[1] as f64)),
                fmt(q.coords[0] as f64),
                fmt(-(q.coords[1] as f64)),
                fmt(w * 0.004),
            ));
        }
    }
    for p in &inst.points {
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>\n",
            fmt(p.coords[0] as f64),
            fmt(-(p.coords[1] as f64)),
            fmt(dot),
        ));
    }
    let legend = match arr {
        Some(a) => format!(
            "lines: {}  points: {}  faces: {}",
            inst.n_hyperplanes(),
            inst.n_points(),
            a.face_count()
        ),
        None => format!("lines: {}  points: {}", inst.n_hyperplanes(), inst.n_points()),
    };
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"{}\" fill=\"black\">{}</text>\n",
        fmt(rx0 + w * 0.02),
        fmt(-ry1 + h * 0.05),
        fmt(h * 0.035),
        legend,
    ));
    out.push_str("</svg>\n");
    Ok(out)
}
