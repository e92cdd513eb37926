use std::fmt::Write;

use mixdisp::Field;

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

/// Static profile plot: `|u|` and `Re u` along the line for N=1, a `|u|` heat map for N=2,
/// and the `x₂ = … = 0` section otherwise.
pub fn profile(u: &Field, title: &str) -> String {
    let u = u.to_physical();
    let g = u.grid();
    let m = g.points_per_axis();
    let vals = u.values();
    match g.dim() {
        2 => heat_map(g.coords(), m, vals, title),
        d => {
            let centre = (m / 2) * (0..d - 1).map(|k| m.pow(k as u32)).sum::<usize>();
            let stride = m.pow(d as u32 - 1);
            let line: Vec<_> = (0..m).map(|i| vals[i * stride + centre]).collect();
            line_plot(g.coords(), &line, title)
        }
    }
}

fn line_plot(x: &[f64], v: &[mixdisp::Complex64], title: &str) -> String {
    let amp: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let top = amp.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let px = |t: f64| PAD + (t - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H / 2.0 - y / top * (H / 2.0 - PAD);
    let path = |ys: &mut dyn Iterator<Item = f64>| -> String {
        let mut s = String::new();
        for (i, (t, y)) in x.iter().zip(ys).enumerate() {
            let _ = write!(s, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, px(*t), py(y));
        }
        s
    };
    let mut out = header(title);
    let _ = writeln!(
        out,
        r##"<line x1="{PAD}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#999"/>"##,
        H / 2.0,
        W - PAD
    );
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="none" stroke="#1f77b4" stroke-width="1"/>"##,
        path(&mut v.iter().map(|z| z.re))
    );
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="none" stroke="#d62728" stroke-width="1.5"/>"##,
        path(&mut amp.iter().cloned())
    );
    let _ = writeln!(
        out,
        r##"<text x="{PAD}" y="{:.0}" font-size="11">x in [{x0:.3}, {x1:.3}], max |u| = {top:.4e}</text>"##,
        H - 10.0
    );
    out.push_str("</svg>\n");
    out
}

fn heat_map(x: &[f64], m: usize, v: &[mixdisp::Complex64], title: &str) -> String {
    let step = m.div_ceil(128);
    let cells = m.div_ceil(step);
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let side = (H - 2.0 * PAD).min(W - 2.0 * PAD);
    let cell = side / cells as f64;
    let mut out = header(title);
    for (a, i) in (0..m).step_by(step).enumerate() {
        for (b, j) in (0..m).step_by(step).enumerate() {
            let t = v[i * m + j].norm() / top;
            let shade = (255.0 * (1.0 - t)).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},255)"/>"#,
                PAD + b as f64 * cell,
                PAD + a as f64 * cell,
                cell + 0.05,
                cell + 0.05
            );
        }
    }
    let _ = writeln!(
        out,
        r##"<text x="{PAD}" y="{:.0}" font-size="11">|u| on [{:.3}, {:.3}]^2, max {top:.4e}</text>"##,
        H - 10.0,
        x[0],
        x[m - 1]
    );
    out.push_str("</svg>\n");
    out
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{PAD}\" y=\"24\" font-size=\"14\">{}</text>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
