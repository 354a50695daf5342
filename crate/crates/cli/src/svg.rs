//! SVG rendering of 2-D polytopes with overlaid piecewise-linear complexes.
//!
//! All geometry stays rational until path serialization, where coordinates
//! become decimal strings with 12 significant digits.

use tropfiber::lp::HSystem;
use tropfiber::polytope::Polytope;
use tropfiber::tropical::PLComplex;
use tropfiber::{Error, IntVec, Rat, Result};

/// Viewport and styling knobs for a figure.
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// Extra border around the polytope's bounding box, in polytope units.
    pub margin: Rat,
    /// Stroke colors cycled across overlaid complexes.
    pub colors: Vec<&'static str>,
    /// Stroke color of an emphasized overlay (e.g. a detection locus).
    pub emphasis: &'static str,
    /// Marker radius for zero-dimensional cells, in pixels.
    pub point_radius: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 640,
            height: 480,
            margin: Rat::ratio(1, 2),
            colors: vec!["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"],
            emphasis: "#d62728",
            point_radius: 4.0,
        }
    }
}

/// One overlaid complex with its emphasis flag.
pub struct Overlay<'a> {
    pub complex: &'a PLComplex,
    pub emphasized: bool,
}

struct Viewport {
    x0: f64,
    y0: f64,
    scale: f64,
    off_x: f64,
    off_y: f64,
    height: f64,
}

impl Viewport {
    fn map(&self, u: &[Rat]) -> (f64, f64) {
        let px = (u[0].to_f64() - self.x0) * self.scale + self.off_x;
        let py = (u[1].to_f64() - self.y0) * self.scale + self.off_y;
        (px, self.height - py)
    }
}

/// Format with 12 significant digits, trailing zeros trimmed.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let prec = (11 - mag).max(0) as usize;
    let s = format!("{x:.prec$}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Render the polytope outline plus overlays into a complete SVG document.
pub fn render(p: &Polytope, overlays: &[Overlay<'_>], spec: &RenderSpec) -> Result<String> {
    if p.dim != 2 {
        return Err(Error::MetricDimension(p.dim));
    }
    let bb = p.bounding_box()?;
    let lo: Vec<Rat> = bb.iter().map(|(l, _)| l - &spec.margin).collect();
    let hi: Vec<Rat> = bb.iter().map(|(_, h)| h + &spec.margin).collect();
    let dx = (&hi[0] - &lo[0]).to_f64();
    let dy = (&hi[1] - &lo[1]).to_f64();
    let (w, h) = (spec.width as f64, spec.height as f64);
    let scale = (w / dx).min(h / dy);
    let vp = Viewport {
        x0: lo[0].to_f64(),
        y0: lo[1].to_f64(),
        scale,
        off_x: (w - dx * scale) / 2.0,
        off_y: (h - dy * scale) / 2.0,
        height: h,
    };
    let clip = box_system(&lo, &hi);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        spec.width, spec.height, spec.width, spec.height
    ));
    out.push_str("  <g class=\"polytope\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\">\n");
    for path in facet_paths(p, &vp)? {
        out.push_str(&format!("    <path class=\"facet\" d=\"{path}\"/>\n"));
    }
    out.push_str("  </g>\n");
    for (idx, overlay) in overlays.iter().enumerate() {
        let (color, width) = if overlay.emphasized {
            (spec.emphasis, 3.0)
        } else {
            (spec.colors[idx % spec.colors.len()], 1.5)
        };
        out.push_str(&format!(
            "  <g class=\"complex\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\">\n"
        ));
        for cell in &overlay.complex.cells {
            let d = cell_path(&cell.system, &clip, &vp, spec.point_radius)?;
            out.push_str(&format!("    <path class=\"cell\" d=\"{d}\"/>\n"));
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn box_system(lo: &[Rat], hi: &[Rat]) -> HSystem {
    let mut s = HSystem::new(2);
    s.push_ge(IntVec::from_i64(&[1, 0]), lo[0].clone());
    s.push_ge(IntVec::from_i64(&[-1, 0]), -&hi[0]);
    s.push_ge(IntVec::from_i64(&[0, 1]), lo[1].clone());
    s.push_ge(IntVec::from_i64(&[0, -1]), -&hi[1]);
    s
}

/// One line path per facet, joining the two vertices where it is active.
fn facet_paths(p: &Polytope, vp: &Viewport) -> Result<Vec<String>> {
    let vertices = p.weak_system().vertices()?;
    let mut out = Vec::with_capacity(p.num_facets());
    for j in 1..=p.num_facets() {
        let active: Vec<&Vec<Rat>> = vertices
            .iter()
            .filter(|v| p.facet_value(j, v).map(|x| x.is_zero()).unwrap_or(false))
            .collect();
        let mut d = String::new();
        for (k, v) in active.iter().enumerate() {
            let (x, y) = vp.map(v);
            let op = if k == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{}{} {}", op, sig12(x), sig12(y)));
        }
        out.push(d);
    }
    Ok(out)
}

/// Path data for a single cell clipped to the viewport box.
fn cell_path(system: &HSystem, clip: &HSystem, vp: &Viewport, radius: f64) -> Result<String> {
    let clipped = system.and(clip)?;
    let mut verts = clipped.weak_closure().vertices()?;
    if verts.is_empty() {
        return Ok(String::new());
    }
    if verts.len() == 1 {
        let (x, y) = vp.map(&verts[0]);
        return Ok(format!(
            "M{} {}m-{r} 0a{r} {r} 0 1 0 {d} 0a{r} {r} 0 1 0 -{d} 0",
            sig12(x),
            sig12(y),
            r = sig12(radius),
            d = sig12(2.0 * radius),
        ));
    }
    if verts.len() > 2 {
        // Order polygon vertices by angle around the centroid.
        let pts: Vec<(f64, f64)> = verts.iter().map(|v| (v[0].to_f64(), v[1].to_f64())).collect();
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let mut order: Vec<usize> = (0..verts.len()).collect();
        order.sort_by(|&a, &b| {
            let ta = (pts[a].1 - cy).atan2(pts[a].0 - cx);
            let tb = (pts[b].1 - cy).atan2(pts[b].0 - cx);
            ta.partial_cmp(&tb).unwrap()
        });
        verts = order.into_iter().map(|i| verts[i].clone()).collect();
    }
    let mut d = String::new();
    for (k, v) in verts.iter().enumerate() {
        let (x, y) = vp.map(v);
        let op = if k == 0 { 'M' } else { 'L' };
        d.push_str(&format!("{}{} {}", op, sig12(x), sig12(y)));
    }
    if verts.len() > 2 {
        d.push('Z');
    }
    Ok(d)
}
