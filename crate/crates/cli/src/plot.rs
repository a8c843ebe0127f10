//! SVG of the two-agent utility set.

use std::fmt::Write;

use choremarket::{Instance, Rational, UtilityProfile};
use num_traits::ToPrimitive;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

type Point = (Rational, Rational);

/// Utility pairs when the first agent takes the first `k` chores of `order`.
fn sweep(inst: &Instance, order: &[usize]) -> Vec<Point> {
    let m = order.len();
    (0..=m)
        .map(|k| {
            let first = order[..k].iter().map(|&j| inst.value(0, j)).sum();
            let second = order[k..].iter().map(|&j| inst.value(1, j)).sum();
            (first, second)
        })
        .collect()
}

/// Vertices of the feasible utility polygon: the Pareto chain with chores
/// in ascending ratio order, then the opposite chain back.
pub fn polygon(inst: &Instance) -> (Vec<Point>, Vec<Point>) {
    let m = inst.m();
    let ratios: Vec<Rational> = (0..m).map(|j| inst.value(0, j) / inst.value(1, j)).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| ratios[a].cmp(&ratios[b]));
    let frontier = sweep(inst, &order);
    order.reverse();
    let mut back = sweep(inst, &order);
    back.reverse();
    (frontier, back)
}

fn f(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

/// Requires `inst.n() == 2`.
pub fn render(inst: &Instance, profiles: &[UtilityProfile]) -> String {
    let (frontier, back) = polygon(inst);
    let min_x = frontier.iter().map(|p| f(&p.0)).fold(0.0, f64::min);
    let min_y = frontier.iter().map(|p| f(&p.1)).fold(0.0, f64::min);
    let sx = |x: f64| MARGIN + (x - min_x) / (-min_x).max(f64::MIN_POSITIVE) * (SIZE - 2.0 * MARGIN);
    let sy = |y: f64| SIZE - MARGIN - (y - min_y) / (-min_y).max(f64::MIN_POSITIVE) * (SIZE - 2.0 * MARGIN);
    let points = |pts: &[Point]| {
        pts.iter()
            .map(|(x, y)| format!("{:.3},{:.3}", sx(f(x)), sy(f(y))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut outline = frontier.clone();
    outline.extend(back.iter().skip(1).cloned());
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="#dde6f2" stroke="#7a8ca6" stroke-width="1"/>"##,
        points(&outline)
    );
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="3"/>"##,
        points(&frontier)
    );
    for u in profiles {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.3}" cy="{:.3}" r="5" fill="#1f5fbf"><title>({}, {})</title></circle>"##,
            sx(f(&u[0])),
            sy(f(&u[1])),
            u[0],
            u[1]
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">u1</text>"#,
        SIZE - MARGIN,
        SIZE - MARGIN / 3.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12">u2</text>"#,
        MARGIN / 4.0,
        MARGIN
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use choremarket::int;

    #[test]
    fn example_polygon() {
        let inst = Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -2]).unwrap();
        let (frontier, back) = polygon(&inst);
        assert_eq!(frontier, vec![(int(0), int(-3)), (int(-1), int(-2)), (int(-9), int(0))]);
        assert_eq!(back, vec![(int(-9), int(0)), (int(-8), int(-1)), (int(0), int(-3))]);
        let svg = render(&inst, &[vec![int(-1), int(-2)]]);
        assert!(svg.contains("<circle"));
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn single_chore_segment() {
        let inst = Instance::from_ints(&[vec![-3], vec![-5]], &[-1, -1]).unwrap();
        let (frontier, _) = polygon(&inst);
        assert_eq!(frontier, vec![(int(0), int(-5)), (int(-3), int(0))]);
    }
}
