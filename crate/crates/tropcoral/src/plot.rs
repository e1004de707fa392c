//! Deterministic SVG figures of corals, curves and Morse trees.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::coral::TropicalCoral;
use crate::counting::{EndKind, TropicalCurve};
use crate::lattice::{to_f64, LatticeVector, RationalPoint};
use crate::morse::MorseTree;

/// Drawing window in model coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Viewport {
    /// Parses "xmin,xmax,ymin,ymax".
    pub fn parse(s: &str) -> Option<Viewport> {
        let v: Vec<f64> = s.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
        match v[..] {
            [xmin, xmax, ymin, ymax] if xmin < xmax && ymin < ymax => Some(Viewport { xmin, xmax, ymin, ymax }),
            _ => None,
        }
    }

    /// Bounding box of the points with a margin, always containing the
    /// origin and height 1.
    pub fn around<'a>(pts: impl IntoIterator<Item = &'a RationalPoint>) -> Viewport {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (0f64, 0f64, 0f64, 1f64);
        for p in pts {
            let (x, y) = (to_f64(&p.x), to_f64(&p.h));
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        let m = 0.25 * (xmax - xmin).max(ymax - ymin).max(1.0) + 1.0;
        Viewport { xmin: xmin - m, xmax: xmax + m, ymin: ymin - 0.5, ymax: ymax + m }
    }

    fn contains(&self, (x, y): (f64, f64)) -> bool {
        (self.xmin..=self.xmax).contains(&x) && (self.ymin..=self.ymax).contains(&y)
    }
}

const SIZE: f64 = 480.0;

struct Canvas {
    vp: Viewport,
    body: String,
}

impl Canvas {
    fn new(vp: Viewport) -> Self {
        Canvas { vp, body: String::new() }
    }

    fn scale(&self) -> f64 {
        SIZE / (self.vp.xmax - self.vp.xmin).max(self.vp.ymax - self.vp.ymin)
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let s = self.scale();
        ((x - self.vp.xmin) * s, (self.vp.ymax - y) * s)
    }

    fn line(&mut self, class: &str, a: (f64, f64), b: (f64, f64)) {
        let (p, q) = (self.map(a), self.map(b));
        let dash = if class == "extension" { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"  <line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"{dash}/>"#,
            p.0, p.1, q.0, q.1
        );
    }

    fn text(&mut self, class: &str, at: (f64, f64), s: &str) {
        let p = self.map(at);
        let _ = writeln!(self.body, r#"  <text class="{class}" x="{:.3}" y="{:.3}">{s}</text>"#, p.0 + 4.0, p.1 - 4.0);
    }

    fn dot(&mut self, class: &str, at: (f64, f64)) {
        let p = self.map(at);
        let _ = writeln!(self.body, r#"  <circle class="{class}" cx="{:.3}" cy="{:.3}" r="3"/>"#, p.0, p.1);
    }

    /// Clips the ray a + t·u (t ≥ 0) to the viewport (Liang–Barsky).
    fn ray(&mut self, class: &str, a: (f64, f64), u: (f64, f64)) -> bool {
        match clip(&self.vp, a, u, f64::INFINITY) {
            Some((p, q)) => {
                self.line(class, p, q);
                true
            }
            None => false,
        }
    }

    fn segment(&mut self, class: &str, a: (f64, f64), b: (f64, f64)) -> bool {
        match clip(&self.vp, a, (b.0 - a.0, b.1 - a.1), 1.0) {
            Some((p, q)) => {
                self.line(class, p, q);
                true
            }
            None => false,
        }
    }

    fn finish(self) -> String {
        let h = (self.vp.ymax - self.vp.ymin) * self.scale();
        let w = (self.vp.xmax - self.vp.xmin) * self.scale();
        format!(
            concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\">\n",
                "  <style>line {{ stroke: black; stroke-width: 1.5 }} .boundary {{ stroke: grey }} ",
                ".extension {{ stroke: grey }} text {{ font: 11px sans-serif }}</style>\n",
                "{}</svg>\n"
            ),
            w, h, self.body
        )
    }
}

/// Liang–Barsky clipping of a + t·u, t ∈ [0, tmax].
fn clip(vp: &Viewport, a: (f64, f64), u: (f64, f64), tmax: f64) -> Option<((f64, f64), (f64, f64))> {
    let (mut t0, mut t1) = (0.0f64, tmax);
    for (p, q) in [(-u.0, a.0 - vp.xmin), (u.0, vp.xmax - a.0), (-u.1, a.1 - vp.ymin), (u.1, vp.ymax - a.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1 && t1.is_finite()).then_some(((a.0 + t0 * u.0, a.1 + t0 * u.1), (a.0 + t1 * u.0, a.1 + t1 * u.1)))
}

fn pt(p: &RationalPoint) -> (f64, f64) {
    (to_f64(&p.x), to_f64(&p.h))
}

fn dir(u: LatticeVector) -> (f64, f64) {
    (u.a as f64, u.b as f64)
}

fn mid(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
}

fn boundary(cv: &mut Canvas) {
    let vp = cv.vp;
    if (vp.ymin..=vp.ymax).contains(&1.0) {
        cv.line("boundary", (vp.xmin, 1.0), (vp.xmax, 1.0));
    }
}

pub fn coral_svg(c: &TropicalCoral, vp: Option<Viewport>) -> String {
    let vp = vp.unwrap_or_else(|| Viewport::around(c.positions.values()));
    let mut cv = Canvas::new(vp);
    boundary(&mut cv);
    let t = &c.ctype;
    let g = &t.graph;
    for &(e, (a, b)) in &g.bounded_edges {
        let (pa, pb) = (pt(&c.positions[&a]), pt(&c.positions[&b]));
        if cv.segment("segment", pa, pb) && g.weight(e) > 1 && vp.contains(mid(pa, pb)) {
            cv.text("weight", mid(pa, pb), &g.weight(e).to_string());
        }
    }
    for &(e, v) in &g.positive_edges {
        let p = pt(&c.positions[&v]);
        let u = dir(t.flag(v, e));
        if cv.ray("ray", p, u) && g.weight(e) > 1 {
            let at = (p.0 + 0.5 * u.0, p.1 + 0.5 * u.1);
            if vp.contains(at) {
                cv.text("weight", at, &g.weight(e).to_string());
            }
        }
    }
    for (v, p) in &c.positions {
        let class = if g.class(*v) == Some(crate::coralgraph::VertexClass::Negative) { "negative" } else { "vertex" };
        if vp.contains(pt(p)) {
            cv.dot(class, pt(p));
        }
    }
    cv.finish()
}

pub fn curve_svg(tc: &TropicalCurve, vp: Option<Viewport>) -> String {
    let vp = vp.unwrap_or_else(|| Viewport::around(tc.vertices.values()));
    let mut cv = Canvas::new(vp);
    boundary(&mut cv);
    for &(_, (a, b), w) in &tc.edges {
        let (pa, pb) = (pt(&tc.vertices[&a]), pt(&tc.vertices[&b]));
        if cv.segment("segment", pa, pb) && w > 1 && vp.contains(mid(pa, pb)) {
            cv.text("weight", mid(pa, pb), &w.to_string());
        }
    }
    for e in &tc.ends {
        let p = pt(&tc.vertices[&e.vertex]);
        let class = if e.kind == EndKind::Origin { "extension" } else { "ray" };
        if cv.ray(class, p, dir(e.dir)) && e.weight > 1 {
            let at = (p.0 + 0.5 * e.dir.a as f64, p.1 + 0.5 * e.dir.b as f64);
            if vp.contains(at) {
                cv.text("weight", at, &e.weight.to_string());
            }
        }
    }
    for p in tc.vertices.values() {
        if vp.contains(pt(p)) {
            cv.dot("vertex", pt(p));
        }
    }
    cv.finish()
}

/// The tree drawn over its image on a horizontal axis: each vertex sits at
/// x = φ, one row per depth, external vertices labelled p_ij.
pub fn morse_svg(m: &MorseTree) -> String {
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    let mut stack = vec![(m.root, None::<usize>, 0usize)];
    while let Some((v, p, d)) = stack.pop() {
        depth.insert(v, d);
        for &w in &m.vertices[&v] {
            if Some(w) != p {
                stack.push((w, Some(v), d + 1));
            }
        }
    }
    let xs: Vec<f64> = m.phi.values().map(to_f64).collect();
    let (lo, hi) = xs.iter().fold((0f64, 0f64), |(a, b), x| (a.min(*x), b.max(*x)));
    let maxd = depth.values().copied().max().unwrap_or(0) as f64;
    let vp = Viewport { xmin: lo - 1.0, xmax: hi + 1.0, ymin: -1.0, ymax: maxd + 1.0 };
    let mut cv = Canvas::new(vp);
    cv.line("axis", (vp.xmin, 0.0), (vp.xmax, 0.0));
    let at = |v: usize| (to_f64(&m.phi[&v]), maxd - depth[&v] as f64 + 0.0);
    for (&v, nbrs) in &m.vertices {
        for &w in nbrs {
            if v < w {
                cv.line("segment", at(v), at(w));
            }
        }
    }
    let leaves = m.leaves();
    let d = leaves.len();
    for &v in m.vertices.keys() {
        cv.dot("vertex", at(v));
        let label = if v == m.root {
            Some(format!("p{d}0"))
        } else {
            leaves.iter().position(|x| *x == v).map(|i| format!("p{}{}", i, i + 1))
        };
        if let Some(l) = label {
            cv.text("label", at(v), &l);
        }
    }
    cv.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coral::samples::*;
    use crate::counting::extend_coral;
    use crate::morse::samples::simple_morse;

    #[test]
    fn simple_example_figure() {
        let s = coral_svg(&simple_example(), None);
        assert_eq!(s.matches(r#"class="segment""#).count(), 1);
        assert_eq!(s.matches(r#"class="ray""#).count(), 2);
        assert_eq!(s.matches(r#"class="boundary""#).count(), 1);
        assert!(s.contains(">5<") && s.contains(">3<") && s.contains(">2<"));
        assert_eq!(s, coral_svg(&simple_example(), None));
    }

    #[test]
    fn y_coral_and_curve() {
        let s = coral_svg(&y_coral(), None);
        assert_eq!(s.matches(r#"class="segment""#).count() + s.matches(r#"class="ray""#).count(), 3);
        let x = curve_svg(&extend_coral(&simple_example()).unwrap(), None);
        assert!(x.contains(r#"class="extension""#) && x.contains("stroke-dasharray"));
    }

    #[test]
    fn morse_figure() {
        let s = morse_svg(&simple_morse());
        for l in ["p01", "p12", "p20"] {
            assert!(s.contains(l), "{l}");
        }
    }

    #[test]
    fn clipping() {
        let vp = Viewport { xmin: 0.0, xmax: 1.0, ymin: 0.0, ymax: 1.0 };
        assert!(clip(&vp, (2.0, 2.0), (1.0, 0.0), f64::INFINITY).is_none());
        let (a, b) = clip(&vp, (0.5, 0.5), (1.0, 1.0), f64::INFINITY).unwrap();
        assert_eq!((a, b), ((0.5, 0.5), (1.0, 1.0)));
        assert!(Viewport::parse("0,1,0,1").is_some());
        assert!(Viewport::parse("1,0,0,1").is_none());
    }
}
