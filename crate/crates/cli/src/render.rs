//! Deterministic SVG drawings of packings. The model is y-up; the flip to
//! SVG's y-down happens here only.

use std::fmt::Write;

use rectpack_core::lshape::LShape;
use rectpack_core::model::{Container, Instance, Label, Packing, Rect};

pub const CANVAS: i64 = 600;
const MARGIN: i64 = 10;

pub struct Scene<'a> {
    pub inst: &'a Instance,
    pub packing: &'a Packing,
    pub containers: &'a [Container],
    pub lshape: Option<LShape>,
    /// Thickness of the top and right strips to overlay.
    pub strip: Option<i64>,
}

struct Frame {
    n: i64,
}

impl Frame {
    fn len(&self, v: i64) -> f64 {
        v as f64 * CANVAS as f64 / self.n as f64
    }

    fn rect(&self, r: &Rect) -> String {
        let x = MARGIN as f64 + self.len(r.x);
        let y = MARGIN as f64 + self.len(self.n - r.top());
        format!(r#"x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}""#, self.len(r.w), self.len(r.h))
    }

    fn point(&self, x: i64, y: i64) -> String {
        format!("{:.3},{:.3}", MARGIN as f64 + self.len(x), MARGIN as f64 + self.len(self.n - y))
    }
}

fn label_color(l: Label) -> &'static str {
    match l {
        Label::Horizontal => "#c0392b",
        Label::Vertical => "#2471a3",
        Label::Area => "#7d3c98",
    }
}

pub fn render_svg(scene: &Scene) -> String {
    let f = Frame { n: scene.inst.n.max(1) };
    let size = CANVAS + 2 * MARGIN;
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#).unwrap();
    writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{CANVAS}" height="{CANVAS}" fill="white" stroke="black" stroke-width="2"/>"#).unwrap();

    let idx = scene.inst.index();
    let pmax = scene.inst.items.iter().map(|i| i.p).max().unwrap_or(1).max(1);
    let mut placed: Vec<_> = scene.packing.placements.iter().filter_map(|p| idx.get(p.id.as_str()).map(|it| (p, *it))).collect();
    placed.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    for (pl, it) in placed {
        // darker means more profitable
        let light = 88 - 48 * it.p / pmax;
        writeln!(
            s,
            r##"<rect {} fill="hsl(40,70%,{light}%)" stroke="#333" stroke-width="0.5"><title>{} p={}</title></rect>"##,
            f.rect(&pl.rect(it)),
            escape(&pl.id),
            it.p
        )
        .unwrap();
    }
    for c in scene.containers {
        writeln!(
            s,
            r#"<rect {} fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="6,3"/>"#,
            f.rect(&c.rect()),
            label_color(c.label)
        )
        .unwrap();
    }
    if let Some(l) = scene.lshape.filter(|l| !l.is_degenerate()) {
        let pts = [(0, 0), (l.big_w, 0), (l.big_w, l.h), (l.w, l.h), (l.w, l.big_h), (0, l.big_h)];
        let pts: Vec<String> = pts.iter().map(|&(x, y)| f.point(x, y)).collect();
        writeln!(s, r##"<polygon points="{}" fill="none" stroke="#117a65" stroke-width="2"/>"##, pts.join(" ")).unwrap();
    }
    if let Some(t) = scene.strip {
        let n = scene.inst.n;
        for (name, r) in [("S^h", Rect::new(0, n - t, n, t)), ("S^v", Rect::new(n - t, 0, t, n))] {
            writeln!(s, r##"<rect {} fill="#5dade2" fill-opacity="0.25" stroke="none"><title>{name}</title></rect>"##, f.rect(&r)).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
