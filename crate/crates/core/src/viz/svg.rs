//! Standalone SVG rendering of plot bundles.
//!
//! Output is deterministic: fixed float formatting, fixed element order.
//! Interaction bundles are drawn as an orthographic projection at a
//! configurable azimuth/elevation.

use std::path::Path;

use crate::error::{Error, Result};

use super::{Overlay, PlotBundle, PlotKind};

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub width: f64,
    pub height: f64,
    /// Camera yaw for 3d bundles, degrees.
    pub azimuth_deg: f64,
    /// Camera pitch for 3d bundles, degrees.
    pub elevation_deg: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 800.0,
            height: 600.0,
            azimuth_deg: 35.0,
            elevation_deg: 25.0,
        }
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const LEGEND_WIDTH: f64 = 120.0;

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw_step = (hi - lo) / 4.0;
    let mag = 10f64.powf(raw_step.log10().floor());
    let norm = raw_step / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + step * 1e-9 {
        // snap values like -0.0000000001 to zero for stable labels
        let snapped = if t.abs() < step * 1e-9 { 0.0 } else { t };
        ticks.push(snapped);
        t += step;
    }
    ticks
}

struct Extent {
    lo: f64,
    hi: f64,
}

impl Extent {
    fn of(values: impl Iterator<Item = f64>) -> Extent {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if lo > hi {
            // empty bundle: draw a unit box
            lo = 0.0;
            hi = 1.0;
        }
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        Extent { lo, hi }
    }

    fn pad(mut self, frac: f64) -> Extent {
        let pad = (self.hi - self.lo) * frac;
        self.lo -= pad;
        self.hi += pad;
        self
    }

    fn scale(&self, v: f64, out_lo: f64, out_hi: f64) -> f64 {
        out_lo + (v - self.lo) / (self.hi - self.lo) * (out_hi - out_lo)
    }
}

/// Render a bundle to its SVG text.
pub fn svg_string(bundle: &PlotBundle, opts: &RenderOptions) -> String {
    match bundle.kind {
        PlotKind::Interaction3d => render_3d(bundle, opts),
        PlotKind::Simplex => render_simplex(bundle, opts),
        _ => render_2d(bundle, opts),
    }
}

/// Render a bundle to a file.
pub fn render_svg(bundle: &PlotBundle, path: impl AsRef<Path>, opts: &RenderOptions) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, svg_string(bundle, opts)).map_err(|e| Error::io(path, e))
}

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n\
         <rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        px(w),
        px(h),
        px(w),
        px(h),
        px(w),
        px(h)
    )
}

fn title_block(out: &mut String, bundle: &PlotBundle, width: f64) {
    out.push_str(&format!(
        "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        px(width / 2.0),
        esc(&bundle.title)
    ));
    let mut notes = Vec::new();
    if let Some(gov) = bundle.annotations.gov {
        notes.push(format!("R2 = {gov:.3}"));
    }
    if bundle.annotations.clip_count > 0 {
        notes.push(format!("{} points clipped", bundle.annotations.clip_count));
    }
    if let Some(note) = &bundle.annotations.note {
        notes.push(note.clone());
    }
    if !notes.is_empty() {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"40\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" fill=\"#444444\">{}</text>\n",
            px(width / 2.0),
            esc(&notes.join("  |  "))
        ));
    }
}

fn legend_block(out: &mut String, bundle: &PlotBundle, x: f64, y0: f64) {
    let Some(names) = &bundle.class_names else {
        return;
    };
    for (k, name) in names.iter().enumerate() {
        let y = y0 + 18.0 * k as f64;
        let color = super::class_color(k);
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            px(x),
            px(y - 9.0),
            color.hex()
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            px(x + 14.0),
            px(y),
            esc(name)
        ));
    }
}

fn render_2d(bundle: &PlotBundle, opts: &RenderOptions) -> String {
    let has_legend = bundle.class_names.is_some();
    let right = if has_legend {
        MARGIN_RIGHT + LEGEND_WIDTH
    } else {
        MARGIN_RIGHT
    };
    let (w, h) = (opts.width, opts.height);
    let (x0, x1) = (MARGIN_LEFT, w - right);
    let (y0, y1) = (h - MARGIN_BOTTOM, MARGIN_TOP);

    let xe = Extent::of(bundle.points.iter().map(|p| p.x)).pad(0.04);
    let ye = Extent::of(
        bundle
            .points
            .iter()
            .map(|p| p.y)
            .chain(overlay_ys(&bundle.overlay)),
    )
    .pad(0.04);

    let mut out = svg_open(w, h);
    title_block(&mut out, bundle, w);

    // axes
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        px(x0),
        px(y0),
        px(x1),
        px(y0)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        px(x0),
        px(y0),
        px(x0),
        px(y1)
    ));
    for t in nice_ticks(xe.lo, xe.hi) {
        let sx = xe.scale(t, x0, x1);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            px(sx),
            px(y0),
            px(sx),
            px(y0 + 5.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            px(sx),
            px(y0 + 18.0),
            tick_label(t)
        ));
    }
    for t in nice_ticks(ye.lo, ye.hi) {
        let sy = ye.scale(t, y0, y1);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            px(x0 - 5.0),
            px(sy),
            px(x0),
            px(sy)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            px(x0 - 8.0),
            px(sy + 4.0),
            tick_label(t)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        px((x0 + x1) / 2.0),
        px(h - 15.0),
        esc(&bundle.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        px((y0 + y1) / 2.0),
        px((y0 + y1) / 2.0),
        esc(&bundle.y_label)
    ));

    for p in &bundle.points {
        out.push_str(&format!(
            "<circle class=\"pt\" cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.7\"/>\n",
            px(xe.scale(p.x, x0, x1)),
            px(ye.scale(p.y, y0, y1)),
            p.color.hex()
        ));
    }

    match &bundle.overlay {
        Some(Overlay::Curve(curve)) => {
            out.push_str(&polyline(curve, &xe, &ye, x0, x1, y0, y1, "#222222"));
        }
        Some(Overlay::Curves(list)) => {
            for (class, curve) in list {
                out.push_str(&polyline(
                    curve,
                    &xe,
                    &ye,
                    x0,
                    x1,
                    y0,
                    y1,
                    &super::class_color(*class).hex(),
                ));
            }
        }
        Some(Overlay::CurveFamily { family, mean }) => {
            for curve in family {
                out.push_str(&polyline(curve, &xe, &ye, x0, x1, y0, y1, "#c8c8c8"));
            }
            out.push_str(&polyline(mean, &xe, &ye, x0, x1, y0, y1, "#222222"));
        }
        _ => {}
    }

    if let Some((mx, my)) = bundle.annotations.base_rate_marker {
        cross(&mut out, xe.scale(mx, x0, x1), ye.scale(my, y0, y1));
    }
    legend_block(&mut out, bundle, x1 + 20.0, y1 + 10.0);
    out.push_str("</svg>\n");
    out
}

fn overlay_ys(overlay: &Option<Overlay>) -> Box<dyn Iterator<Item = f64> + '_> {
    match overlay {
        Some(Overlay::Curve(c)) => Box::new(c.iter().map(|&(_, y)| y)),
        Some(Overlay::Curves(list)) => {
            Box::new(list.iter().flat_map(|(_, c)| c.iter().map(|&(_, y)| y)))
        }
        Some(Overlay::CurveFamily { family, mean }) => Box::new(
            family
                .iter()
                .flat_map(|c| c.iter().map(|&(_, y)| y))
                .chain(mean.iter().map(|&(_, y)| y)),
        ),
        _ => Box::new(std::iter::empty()),
    }
}

#[allow(clippy::too_many_arguments)]
fn polyline(
    curve: &[(f64, f64)],
    xe: &Extent,
    ye: &Extent,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    color: &str,
) -> String {
    let pts: Vec<String> = curve
        .iter()
        .map(|&(x, y)| format!("{},{}", px(xe.scale(x, x0, x1)), px(ye.scale(y, y0, y1))))
        .collect();
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
        pts.join(" "),
        color
    )
}

fn cross(out: &mut String, cx: f64, cy: f64) {
    let arm = 6.0;
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#1f4fd8\" stroke-width=\"2\"/>\n",
        px(cx - arm),
        px(cy),
        px(cx + arm),
        px(cy)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#1f4fd8\" stroke-width=\"2\"/>\n",
        px(cx),
        px(cy - arm),
        px(cx),
        px(cy + arm)
    ));
}

fn render_simplex(bundle: &PlotBundle, opts: &RenderOptions) -> String {
    let (w, h) = (opts.width, opts.height);
    let side = (w - 160.0).min(h - 120.0);
    let x0 = (w - side) / 2.0;
    let y_base = h - 50.0;
    let tri_h = side * 0.866_025_403_784_438_6;
    let map = |x: f64, y: f64| (x0 + x * side, y_base - y * side);
    let mut out = svg_open(w, h);
    title_block(&mut out, bundle, w);

    let (ax, ay) = map(0.0, 0.0);
    let (bx, by) = map(1.0, 0.0);
    let (cx, cy) = map(0.5, 0.866_025_403_784_438_6);
    out.push_str(&format!(
        "<polygon points=\"{},{} {},{} {},{}\" fill=\"none\" stroke=\"black\"/>\n",
        px(ax),
        px(ay),
        px(bx),
        px(by),
        px(cx),
        px(cy)
    ));
    let _ = tri_h;
    if let Some(names) = &bundle.class_names {
        let anchors = [
            (ax - 8.0, ay + 16.0, "end"),
            (bx + 8.0, by + 16.0, "start"),
            (cx, cy - 8.0, "middle"),
        ];
        for (name, (tx, ty, anchor)) in names.iter().zip(anchors) {
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"{}\">{}</text>\n",
                px(tx),
                px(ty),
                anchor,
                esc(name)
            ));
        }
    }
    for p in &bundle.points {
        let (sx, sy) = map(p.x, p.y);
        out.push_str(&format!(
            "<circle class=\"pt\" cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.7\"/>\n",
            px(sx),
            px(sy),
            p.color.hex()
        ));
    }
    if let Some((mx, my)) = bundle.annotations.base_rate_marker {
        let (sx, sy) = map(mx, my);
        cross(&mut out, sx, sy);
    }
    out.push_str("</svg>\n");
    out
}

fn render_3d(bundle: &PlotBundle, opts: &RenderOptions) -> String {
    let (w, h) = (opts.width, opts.height);
    let az = opts.azimuth_deg.to_radians();
    let el = opts.elevation_deg.to_radians();

    let xe = Extent::of(bundle.points.iter().map(|p| p.x));
    let ye = Extent::of(bundle.points.iter().map(|p| p.y));
    let ze = Extent::of(
        bundle
            .points
            .iter()
            .filter_map(|p| p.z)
            .chain(surface_zs(&bundle.overlay)),
    );

    // normalize to the unit cube, then orthographic projection
    let project = |x: f64, y: f64, z: f64| -> (f64, f64) {
        let nx = xe.scale(x, 0.0, 1.0) - 0.5;
        let ny = ye.scale(y, 0.0, 1.0) - 0.5;
        let nz = ze.scale(z, 0.0, 1.0) - 0.5;
        let sx = nx * az.cos() + ny * az.sin();
        let sy = (-nx * az.sin() + ny * az.cos()) * el.sin() + nz * el.cos();
        (sx, sy)
    };

    // projected extent over cube corners
    let mut pxe = Extent {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    let mut pye = Extent {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    for corner in 0..8u8 {
        let x = if corner & 1 == 0 { xe.lo } else { xe.hi };
        let y = if corner & 2 == 0 { ye.lo } else { ye.hi };
        let z = if corner & 4 == 0 { ze.lo } else { ze.hi };
        let (sx, sy) = project(x, y, z);
        pxe.lo = pxe.lo.min(sx);
        pxe.hi = pxe.hi.max(sx);
        pye.lo = pye.lo.min(sy);
        pye.hi = pye.hi.max(sy);
    }
    let (x0, x1) = (MARGIN_LEFT, w - MARGIN_RIGHT);
    let (y0, y1) = (h - MARGIN_BOTTOM, MARGIN_TOP);
    let to_screen = |sx: f64, sy: f64| (pxe.scale(sx, x0, x1), pye.scale(sy, y0, y1));

    let mut out = svg_open(w, h);
    title_block(&mut out, bundle, w);

    // axis frame from the data-minimum corner
    let origin = (xe.lo, ye.lo, ze.lo);
    let no_label = String::new();
    let axes = [
        ((xe.hi, ye.lo, ze.lo), &bundle.x_label),
        ((xe.lo, ye.hi, ze.lo), &bundle.y_label),
        (
            (xe.lo, ye.lo, ze.hi),
            bundle.z_label.as_ref().unwrap_or(&no_label),
        ),
    ];
    let (ox, oy) = {
        let (sx, sy) = project(origin.0, origin.1, origin.2);
        to_screen(sx, sy)
    };
    for ((ex, ey, ez), label) in axes {
        let (sx, sy) = project(ex, ey, ez);
        let (tx, ty) = to_screen(sx, sy);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#555555\"/>\n",
            px(ox),
            px(oy),
            px(tx),
            px(ty)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            px(tx + 4.0),
            px(ty),
            esc(label)
        ));
    }

    if let Some(Overlay::Surface { xs, ys, z }) = &bundle.overlay {
        let at = |xi: usize, yi: usize| {
            let (sx, sy) = project(xs[xi], ys[yi], z[xi * ys.len() + yi]);
            to_screen(sx, sy)
        };
        for xi in 0..xs.len() {
            let pts: Vec<String> = (0..ys.len())
                .map(|yi| {
                    let (sx, sy) = at(xi, yi);
                    format!("{},{}", px(sx), px(sy))
                })
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.8\"/>\n",
                pts.join(" ")
            ));
        }
        for yi in 0..ys.len() {
            let pts: Vec<String> = (0..xs.len())
                .map(|xi| {
                    let (sx, sy) = at(xi, yi);
                    format!("{},{}", px(sx), px(sy))
                })
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.8\"/>\n",
                pts.join(" ")
            ));
        }
    }

    for p in &bundle.points {
        let (sx, sy) = project(p.x, p.y, p.z.unwrap_or(ze.lo));
        let (tx, ty) = to_screen(sx, sy);
        out.push_str(&format!(
            "<circle class=\"pt\" cx=\"{}\" cy=\"{}\" r=\"1.8\" fill=\"{}\" fill-opacity=\"0.7\"/>\n",
            px(tx),
            px(ty),
            p.color.hex()
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn surface_zs(overlay: &Option<Overlay>) -> Box<dyn Iterator<Item = f64> + '_> {
    match overlay {
        Some(Overlay::Surface { z, .. }) => Box::new(z.iter().copied()),
        _ => Box::new(std::iter::empty()),
    }
}
