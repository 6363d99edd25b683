//! Deterministic SVG rendering of 1D graphs and 2D level sets.

use cvxlab::{Error, Function, Halfspace, Polyhedron, Result};
use std::fmt::Write;

const SIZE: f64 = 480.0;
const PAD: f64 = 32.0;

/// Affine map from a data window onto the SVG canvas (y pointing up).
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - PAD - (y - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * PAD)
    }

    fn point(&self, p: &[f64]) -> String {
        format!("{:.3},{:.3}", self.px(p[0]), self.py(p[1]))
    }
}

/// Constant zero on its domain.
fn is_indicator(f: &Function) -> bool {
    f.pieces().iter().all(|p| p.slope.iter().all(|s| *s == 0.0))
        && f.pieces().iter().map(|p| p.intercept).fold(f64::NEG_INFINITY, f64::max) == 0.0
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
}

fn axes(out: &mut String, fr: &Frame) {
    if fr.y0 <= 0.0 && 0.0 <= fr.y1 {
        let y = fr.py(0.0);
        let _ = writeln!(out, r##"<line class="axis" x1="{PAD}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#999" stroke-width="0.5"/>"##, SIZE - PAD);
    }
    if fr.x0 <= 0.0 && 0.0 <= fr.x1 {
        let x = fr.px(0.0);
        let _ = writeln!(out, r##"<line class="axis" x1="{x:.3}" y1="{PAD}" x2="{x:.3}" y2="{:.3}" stroke="#999" stroke-width="0.5"/>"##, SIZE - PAD);
    }
}

pub fn render(f: &Function, levels: &[f64]) -> Result<String> {
    match f.n() {
        1 => Ok(render_1d(f)),
        2 => render_2d(f, levels),
        n => Err(Error::UnsupportedDimension(n)),
    }
}

fn render_1d(f: &Function) -> String {
    let dom = f.domain_or_whole();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in dom.halfspaces() {
        if h.normal[0] > 0.0 {
            hi = hi.min(h.offset / h.normal[0]);
        } else if h.normal[0] < 0.0 {
            lo = lo.max(h.offset / h.normal[0]);
        }
    }
    let mut xs: Vec<f64> = f.epigraph().vertices().iter().map(|v| v[0]).collect();
    xs.extend([lo, hi].into_iter().filter(|x| x.is_finite()));
    if xs.is_empty() {
        xs.push(0.0);
    }
    let (a, b) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let margin = (0.5 * (b - a)).max(1.0);
    let wx0 = if lo.is_finite() { lo } else { a - margin };
    let wx1 = if hi.is_finite() { hi } else { b + margin };
    xs.extend([wx0, wx1]);
    xs.retain(|x| *x >= wx0 && *x <= wx1);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let pts: Vec<[f64; 2]> = xs.iter().map(|&x| [x, f.eval(&[x])]).collect();
    let (y0, y1) = pts
        .iter()
        .fold((0.0f64, 0.0f64), |(a, b), p| (a.min(p[1]), b.max(p[1])));
    let ypad = (0.1 * (y1 - y0)).max(0.5);
    let xpad = 0.05 * (wx1 - wx0).max(1e-9);
    let fr = Frame {
        x0: wx0 - xpad,
        x1: wx1 + xpad,
        y0: y0 - ypad,
        y1: y1 + ypad,
    };

    let mut out = String::new();
    header(&mut out);
    axes(&mut out, &fr);
    // domain bar just below the plot, with end ticks where the domain stops
    let by = SIZE - PAD / 2.0;
    let _ = writeln!(
        out,
        r##"<line class="domain" x1="{:.3}" y1="{by:.3}" x2="{:.3}" y2="{by:.3}" stroke="#2a6" stroke-width="3"/>"##,
        fr.px(wx0),
        fr.px(wx1)
    );
    for e in [lo, hi].into_iter().filter(|x| x.is_finite()) {
        let x = fr.px(e);
        let _ = writeln!(
            out,
            r##"<line class="domain-end" x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="#2a6" stroke-width="2"/>"##,
            by - 6.0,
            by + 6.0
        );
    }
    if is_indicator(f) {
        let _ = writeln!(
            out,
            r##"<line class="flat-zero" x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#c33" stroke-width="2" stroke-dasharray="6 4"/>"##,
            fr.px(wx0),
            fr.px(wx1),
            y = fr.py(0.0)
        );
        let _ = writeln!(out, r##"<text class="flat-zero" x="{:.3}" y="{:.3}" font-size="12" fill="#c33">0 on domain</text>"##, fr.px(wx0) + 4.0, fr.py(0.0) - 6.0);
    } else {
        let path: Vec<String> = pts.iter().map(|p| fr.point(p)).collect();
        let _ = writeln!(out, r##"<polyline class="graph" points="{}" fill="none" stroke="#236" stroke-width="2"/>"##, path.join(" "));
    }
    out.push_str("</svg>\n");
    out
}

fn polygon_points(p: &Polyhedron) -> Vec<Vec<f64>> {
    let mut v = p.vertices().to_vec();
    if v.is_empty() {
        return v;
    }
    let c = [
        v.iter().map(|q| q[0]).sum::<f64>() / v.len() as f64,
        v.iter().map(|q| q[1]).sum::<f64>() / v.len() as f64,
    ];
    v.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])));
    v
}

fn clip_box(w: f64) -> Vec<Halfspace> {
    let mut hs = Vec::new();
    for i in 0..2 {
        for s in [1.0, -1.0] {
            let mut a = vec![0.0; 2];
            a[i] = s;
            hs.push(Halfspace::new(a, w).expect("unit normal"));
        }
    }
    hs
}

fn render_2d(f: &Function, levels: &[f64]) -> Result<String> {
    let indicator = is_indicator(f);
    let dom = f.domain_or_whole();
    let mut sets = Vec::new();
    if !indicator {
        for &s in levels {
            match f.level_set(s) {
                Ok(k) => sets.push((s, k)),
                Err(Error::EmptyLevelSet { .. } | Error::EmptyPolyhedron) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let extent = sets
        .iter()
        .map(|(_, k)| k)
        .chain(std::iter::once(&dom))
        .flat_map(|k| k.vertices().iter().flatten())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let unbounded = !dom.is_bounded() || sets.iter().any(|(_, k)| !k.is_bounded());
    let w = if unbounded { 1.5 * extent + 1.0 } else { (1.1 * extent).max(1e-6) };
    let clip = clip_box(w);
    let fr = Frame {
        x0: -w,
        x1: w,
        y0: -w,
        y1: w,
    };

    let mut out = String::new();
    header(&mut out);
    axes(&mut out, &fr);
    let d = dom.intersect_halfspaces(&clip)?;
    let pts: Vec<String> = polygon_points(&d).iter().map(|p| fr.point(p)).collect();
    if !pts.is_empty() {
        let style = if indicator {
            r##"fill="#fdd" stroke="#c33" stroke-width="2""##
        } else {
            r##"fill="none" stroke="#2a6" stroke-width="1" stroke-dasharray="4 3""##
        };
        let _ = writeln!(out, r#"<polygon class="domain" points="{}" {style}/>"#, pts.join(" "));
    }
    if indicator {
        let _ = writeln!(out, r##"<text class="flat-zero" x="{:.3}" y="{:.3}" font-size="12" fill="#c33">0 on domain</text>"##, PAD, PAD - 8.0);
    }
    for (s, k) in &sets {
        let clipped = k.intersect_halfspaces(&clip)?;
        let pts: Vec<String> = polygon_points(&clipped).iter().map(|p| fr.point(p)).collect();
        if pts.is_empty() {
            continue;
        }
        let _ = writeln!(
            out,
            r##"<polygon class="level" data-level="{s}" points="{}" fill="none" stroke="#236" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
