//! Static SVG figures of an instance, its hull and an optional selection.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write;

use crate::geom::{instance_diameter, Disk, Point};
use crate::hull::DiskHull;

/// One `<circle>` per disk (points get a small marker), plus the hull
/// outline. Drawing happens in a y-up group so angles keep their orientation.
pub fn render_svg(disks: &[Disk], hull: &DiskHull, selected: &[usize]) -> String {
    let chosen: BTreeSet<usize> = selected.iter().copied().collect();
    let diam = instance_diameter(disks);
    let marker = 0.006 * diam;
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for d in disks {
        let r = d.radius.max(marker);
        lo = Point::new(lo.x.min(d.center.x - r), lo.y.min(d.center.y - r));
        hi = Point::new(hi.x.max(d.center.x + r), hi.y.max(d.center.y + r));
    }
    if disks.is_empty() {
        lo = Point::new(-1.0, -1.0);
        hi = Point::new(1.0, 1.0);
    }
    let pad = 0.05 * diam;
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let stroke = 0.004 * diam;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}" width="600" height="{}">"#,
        num(lo.x - pad),
        num(-hi.y - pad),
        num(w),
        num(h),
        num(600.0 * h / w)
    );
    let _ = writeln!(
        s,
        "<style>.disk{{fill:#9ab;fill-opacity:0.35;stroke:#345}} .chosen{{fill:#e63;fill-opacity:0.6;stroke:#a20}} .aux{{fill:#333}} .hull{{fill:none;stroke:#000}}</style>"
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" stroke-width="{}">"#, num(stroke));
    for d in disks {
        let mut class = String::from(if chosen.contains(&d.id) { "disk chosen" } else { "disk" });
        if d.is_auxiliary {
            class.push_str(" aux");
        }
        let _ = writeln!(
            s,
            r#"<circle class="{class}" data-id="{}" cx="{}" cy="{}" r="{}"/>"#,
            d.id,
            num(d.center.x),
            num(d.center.y),
            num(if d.radius > 0.0 { d.radius } else { marker })
        );
    }
    if let Some(path) = hull_path(disks, hull) {
        let _ = writeln!(s, r#"<path class="hull" d="{path}"/>"#);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn hull_path(disks: &[Disk], hull: &DiskHull) -> Option<String> {
    let first = hull.arcs.first()?;
    let radius = |id: usize| disks.iter().find(|d| d.id == id).map_or(0.0, |d| d.radius);
    let mut p = format!("M {} {}", num(first.start.x), num(first.start.y));
    for (k, arc) in hull.arcs.iter().enumerate() {
        let r = radius(arc.disk_id);
        if r > 0.0 && arc.sweep > 0.0 {
            // A full turn cannot be one SVG arc; split it at the antipode.
            let pieces = if arc.sweep >= 2.0 * PI - 1e-12 { 2 } else { 1 };
            let centre = disks.iter().find(|d| d.id == arc.disk_id).map(|d| d.center).unwrap_or(arc.start);
            for piece in 1..=pieces {
                let angle = arc.start_angle + arc.sweep * piece as f64 / pieces as f64;
                let to = centre + Point::unit(angle) * r;
                let large = u8::from(arc.sweep / pieces as f64 > PI);
                let _ = write!(p, " A {} {} 0 {large} 1 {} {}", num(r), num(r), num(to.x), num(to.y));
            }
        }
        let next = &hull.arcs[(k + 1) % hull.arcs.len()];
        let _ = write!(p, " L {} {}", num(next.start.x), num(next.start.y));
    }
    p.push_str(" Z");
    Some(p)
}

/// Six significant decimals keep files small and stable.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}
