use std::f64::consts::TAU;
use std::fmt::Write as _;

use pompeiu_core::geometry::StarShape;

const SAMPLES: usize = 256;
const SIZE: f64 = 480.0;

/// Boundary polyline of `shape` inside a square viewport of half width `extent`
/// centered at the origin, with a caption line.
pub fn frame(shape: &StarShape, extent: f64, caption: &str) -> String {
    let scale = SIZE / (2.0 * extent);
    let c = shape.center();
    let mut points = String::new();
    for j in 0..=SAMPLES {
        let t = TAU * (j % SAMPLES) as f64 / SAMPLES as f64;
        let r = shape.radius(t);
        let (x, y) = (c[0] + r * t.cos(), c[1] + r * t.sin());
        let _ = write!(points, "{:.3},{:.3} ", SIZE / 2.0 + scale * x, SIZE / 2.0 - scale * y);
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n",
            "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"{p}\"/>\n",
            "<text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"13\">{cap}</text>\n",
            "</svg>\n"
        ),
        s = SIZE,
        p = points.trim_end(),
        cap = caption
    )
}
