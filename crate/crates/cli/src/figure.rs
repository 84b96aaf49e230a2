//! SVG figures of the stability plane and of the polygon search.
//!
//! All geometry is computed exactly; coordinates become floats only when
//! written, with three decimals.

use clap::ValueEnum;
use num_traits::ToPrimitive;
use svg::node::element::{Circle, ClipPath, Definitions, Group, Line, Path, Polyline, Text, Title};
use svg::Document;

use k3wall::exactnum::{rat, Rational};
use k3wall::hzero::GaussPoint;
use k3wall::mukai::Surface;
use k3wall::plane::{enumerate_roots_in_strip, grey_points, hole_segment, RatPoint, Slit};
use k3wall::polysearch::{lattice_points, envelope_bound, max_interior_bound, triangle, Mode, Status};
use k3wall::walls::pivot;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Holes,
    Grey,
    Triangle,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Affine map from a data window onto the drawing area, `y` pointing up.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let sx = MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let sy = HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (sx, sy)
    }

    fn pt(&self, p: &RatPoint) -> (f64, f64) {
        self.map(p.to_f64())
    }

    fn path(&self, pts: &[RatPoint], closed: bool) -> String {
        let mut d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (x, y) = self.pt(p);
                format!("{}{} {}", if i == 0 { "M" } else { "L" }, num(x), num(y))
            })
            .collect();
        if closed {
            d.push("Z".into());
        }
        d.join(" ")
    }

    fn curve(&self, f: impl Fn(f64) -> f64, samples: usize) -> String {
        (0..=samples)
            .map(|i| {
                let x = self.x.0 + (self.x.1 - self.x.0) * i as f64 / samples as f64;
                let (sx, sy) = self.map((x, f(x)));
                format!("{},{}", num(sx), num(sy))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn document(title: String) -> Document {
    Document::new()
        .set("version", "1.1")
        .set("width", WIDTH)
        .set("height", HEIGHT)
        .set("viewBox", (0, 0, WIDTH, HEIGHT))
        .add(Title::new(title))
}

fn marker(frame: &Frame, p: &RatPoint, label: &str) -> Group {
    let (x, y) = frame.pt(p);
    Group::new()
        .set("class", "point")
        .add(Circle::new().set("cx", num(x)).set("cy", num(y)).set("r", "3"))
        .add(
            Text::new(label)
                .set("x", num(x + 5.0))
                .set("y", num(y - 5.0))
                .set("font-size", "12")
                .set("font-family", "serif"),
        )
}

fn clip() -> Definitions {
    Definitions::new().add(
        ClipPath::new().set("id", "frame").add(
            svg::node::element::Rectangle::new()
                .set("x", num(MARGIN))
                .set("y", num(MARGIN))
                .set("width", num(WIDTH - 2.0 * MARGIN))
                .set("height", num(HEIGHT - 2.0 * MARGIN)),
        ),
    )
}

fn parabola(frame: &Frame, x: &Surface) -> Polyline {
    let p = x.p() as f64;
    Polyline::new()
        .set("class", "parabola")
        .set("points", frame.curve(|t| p * t * t, 400))
        .set("fill", "none")
        .set("stroke", "black")
        .set("clip-path", "url(#frame)")
}

/// Window around the grey quadrilateral and the pivot.
fn plane_frame(x: &Surface) -> Frame {
    let g = grey_points(x);
    let pv = pivot(x);
    let xs = [g.p_u.x.clone(), g.q.x.clone(), g.p_v.x.clone(), pv.x.clone(), rat(0, 1)];
    let lo = xs.iter().min().unwrap().to_f64().unwrap();
    let hi = xs.iter().max().unwrap().to_f64().unwrap();
    let pad = (hi - lo) * 0.15;
    let top = g.q.y.to_f64().unwrap().max(1.0) * 1.25;
    Frame {
        x: (lo - pad, hi + pad),
        y: (-top * 0.05, top),
    }
}

fn holes(x: &Surface, s_max: i64) -> Document {
    let frame = plane_frame(x);
    let (lo, hi) = (
        Rational::from_float(frame.x.0).unwrap(),
        Rational::from_float(frame.x.1).unwrap(),
    );
    let mut slits = Group::new().set("class", "holes").set("clip-path", "url(#frame)");
    for delta in enumerate_roots_in_strip(&lo, &hi, x, s_max) {
        let Ok(slit) = hole_segment(&delta, x) else { continue };
        let (a, b) = match slit {
            Slit::Segment(seg) => (frame.pt(&seg.a), frame.pt(&seg.b)),
            Slit::VerticalRay { start } => {
                let a = frame.pt(&start);
                (a, (a.0, 0.0))
            }
        };
        slits = slits.add(
            Line::new()
                .set("class", "hole")
                .set("x1", num(a.0))
                .set("y1", num(a.1))
                .set("x2", num(b.0))
                .set("y2", num(b.1))
                .set("stroke", "red")
                .add(Title::new(delta.to_string())),
        );
    }
    document(format!("holes of V(X) for p = {}, roots with 1 <= s <= {s_max}", x.p()))
        .add(clip())
        .add(parabola(&frame, x))
        .add(slits)
        .add(marker(&frame, &RatPoint::o_prime(), "o'"))
        .add(marker(&frame, &RatPoint::origin(), "o"))
}

fn grey(x: &Surface) -> Document {
    let frame = plane_frame(x);
    let g = grey_points(x);
    let o = RatPoint::origin();
    let region = Path::new()
        .set("class", "grey")
        .set("d", frame.path(&[o.clone(), g.p_v.clone(), g.q.clone(), g.p_u.clone()], true))
        .set("fill", "#bbbbbb")
        .set("stroke", "none");
    let pv = pivot(x);
    let wall = Path::new()
        .set("class", "wall")
        .set("d", frame.path(&[pv.clone(), g.p_u.clone(), g.p_v.clone()], false))
        .set("fill", "none")
        .set("stroke", "blue");
    document(format!("grey region and first wall for p = {}, m = {}", x.p(), x.m()))
        .add(clip())
        .add(region)
        .add(parabola(&frame, x))
        .add(wall)
        .add(marker(&frame, &o, "o"))
        .add(marker(&frame, &RatPoint::o_prime(), "o'"))
        .add(marker(&frame, &g.p_v, "p_v"))
        .add(marker(&frame, &g.p_u, "p_u"))
        .add(marker(&frame, &g.q, "q"))
        .add(marker(&frame, &pv, "pr(w)"))
}

fn triangle_figure(x: &Surface) -> Result<Document, CliError> {
    let t = triangle(x);
    let v = max_interior_bound(x, Mode::Refined);
    if let Status::Capped(c) = v.status {
        return Err(CliError::Capped(format!("{c:?}")));
    }
    let witness = v.witness.ok_or(CliError::Capped("no interior chain found".into()))?;
    let e = envelope_bound(x);
    let pts = lattice_points(&t);
    let frame = Frame {
        x: (t.z1.a.min(0) as f64 - 1.0, t.z2.a.max(0) as f64 + 1.0),
        y: (-0.5, t.z2.b as f64 + 0.5),
    };
    let g = |q: &GaussPoint| q.to_rat();
    let shape = |class: &str, d: String, stroke: &str| {
        Path::new()
            .set("class", class)
            .set("d", d)
            .set("fill", "none")
            .set("stroke", stroke)
    };
    let tri = shape("triangle", frame.path(&[g(&t.o), g(&t.z1), g(&t.z2)], true), "black");
    let chain: Vec<RatPoint> = witness.vertices().iter().map(g).collect();
    let wit = shape("witness", frame.path(&chain, true), "blue");
    let pentagon = [RatPoint::origin(), t.z1p.clone(), e.q2.to_rat(), t.z2p.clone(), g(&t.z2)];
    let env = shape("envelope", frame.path(&pentagon, true), "green").set("stroke-dasharray", "4 2");
    let mut lattice = Group::new().set("class", "lattice-points");
    for q in &pts {
        let (cx, cy) = frame.pt(&q.to_rat());
        lattice = lattice.add(
            Circle::new()
                .set("class", "lattice")
                .set("cx", num(cx))
                .set("cy", num(cy))
                .set("r", "1.5"),
        );
    }
    Ok(document(format!(
        "triangle o z1 z2 for p = {}, m = {}: {} lattice points, witness {}",
        x.p(),
        x.m(),
        pts.len(),
        witness
    ))
    .add(tri)
    .add(wit)
    .add(env)
    .add(lattice))
}

pub fn render(x: &Surface, kind: Kind, s_max: i64) -> Result<String, CliError> {
    let doc = match kind {
        Kind::Holes => holes(x, s_max),
        Kind::Grey => grey(x),
        Kind::Triangle => triangle_figure(x)?,
    };
    Ok(format!("{doc}\n"))
}
