//! Intersection matrices of arrangements of genuine circles in the plane.
//!
//! Each circle is walked in its orientation starting from angle 0 around its
//! center. At every crossing with circle `k` the entry is `+k` when circle
//! `k` comes from the left, i.e. its tangent points from the left side of the
//! walked circle to the right side (`cross(t_i, t_k) < 0`), and `-k`
//! otherwise.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::matrix::{IntersectionMatrix, Label, Sign, SignedEntry};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Attempts made by [`random_arrangement`] before giving up.
pub const SAMPLING_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("circle {0}: radius must be positive")]
    NonPositiveRadius(Label),
    #[error("label {0} used twice (or label 0)")]
    BadLabel(Label),
    #[error("circles {0} and {1} are tangent")]
    Tangent(Label, Label),
    #[error("circles {0} and {1} are disjoint")]
    Disjoint(Label, Label),
    #[error("circles {0} and {1} are nested without crossing")]
    Nested(Label, Label),
    #[error("intersection points of circles {0:?} and {1:?} coincide within tolerance")]
    Coincident((Label, Label), (Label, Label)),
    #[error("no admissible arrangement after {0} attempts")]
    SamplingExhausted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Counterclockwise,
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: (f64, f64),
    pub radius: f64,
    pub orientation: Orientation,
}

impl Circle {
    /// Counterclockwise circle.
    pub fn new(cx: f64, cy: f64, radius: f64) -> Circle {
        Circle {
            center: (cx, cy),
            radius,
            orientation: Orientation::Counterclockwise,
        }
    }

    pub fn clockwise(self) -> Circle {
        Circle {
            orientation: Orientation::Clockwise,
            ..self
        }
    }

    /// Unit tangent direction of travel at point `p` on the circle.
    fn tangent(&self, p: (f64, f64)) -> (f64, f64) {
        let (dx, dy) = (p.0 - self.center.0, p.1 - self.center.1);
        match self.orientation {
            Orientation::Counterclockwise => (-dy, dx),
            Orientation::Clockwise => (dy, -dx),
        }
    }

    /// Position of `p` along the walk, in `[0, 2π)`, starting at angle 0.
    fn walk_parameter(&self, p: (f64, f64)) -> f64 {
        let theta = (p.1 - self.center.1)
            .atan2(p.0 - self.center.0)
            .rem_euclid(TAU);
        match self.orientation {
            Orientation::Counterclockwise => theta,
            Orientation::Clockwise => (TAU - theta) % TAU,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleArrangement {
    pub circles: Vec<(Label, Circle)>,
    /// Distances below this are treated as degenerate.
    pub tolerance: f64,
}

impl CircleArrangement {
    pub fn new(circles: Vec<(Label, Circle)>) -> Self {
        CircleArrangement {
            circles,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Applies `f` to every center and scales radii by `scale`.
    pub fn transformed(&self, f: impl Fn((f64, f64)) -> (f64, f64), scale: f64) -> Self {
        CircleArrangement {
            circles: self
                .circles
                .iter()
                .map(|(l, c)| {
                    (
                        *l,
                        Circle {
                            center: f(c.center),
                            radius: c.radius * scale,
                            orientation: c.orientation,
                        },
                    )
                })
                .collect(),
            tolerance: self.tolerance,
        }
    }
}

struct Crossings {
    /// `(pair labels, point)` for every intersection point.
    points: Vec<((usize, usize), (f64, f64))>,
}

fn crossings(arr: &CircleArrangement, eps: f64) -> std::result::Result<Crossings, GeomError> {
    let cs = &arr.circles;
    let mut seen = std::collections::BTreeSet::new();
    for (l, c) in cs {
        if *l == 0 || !seen.insert(*l) {
            return Err(GeomError::BadLabel(*l));
        }
        if c.radius.is_nan() || c.radius <= 0.0 {
            return Err(GeomError::NonPositiveRadius(*l));
        }
    }
    let mut points = Vec::new();
    for a in 0..cs.len() {
        for b in a + 1..cs.len() {
            let (la, ca) = cs[a];
            let (lb, cb) = cs[b];
            let (dx, dy) = (cb.center.0 - ca.center.0, cb.center.1 - ca.center.1);
            let d = dx.hypot(dy);
            let (ra, rb) = (ca.radius, cb.radius);
            if (d - (ra + rb)).abs() <= eps || (d - (ra - rb).abs()).abs() <= eps {
                return Err(GeomError::Tangent(la, lb));
            }
            if d > ra + rb {
                return Err(GeomError::Disjoint(la, lb));
            }
            if d < (ra - rb).abs() {
                return Err(GeomError::Nested(la, lb));
            }
            let along = (d * d + ra * ra - rb * rb) / (2.0 * d);
            let h = (ra * ra - along * along).max(0.0).sqrt();
            let (ux, uy) = (dx / d, dy / d);
            let base = (ca.center.0 + along * ux, ca.center.1 + along * uy);
            points.push(((a, b), (base.0 - h * uy, base.1 + h * ux)));
            points.push(((a, b), (base.0 + h * uy, base.1 - h * ux)));
        }
    }
    for s in 0..points.len() {
        for t in s + 1..points.len() {
            let (p, q) = (points[s].1, points[t].1);
            if (p.0 - q.0).hypot(p.1 - q.1) <= eps {
                let name = |(a, b): (usize, usize)| (cs[a].0, cs[b].0);
                return Err(GeomError::Coincident(name(points[s].0), name(points[t].0)));
            }
        }
    }
    Ok(Crossings { points })
}

/// Checks the arrangement conditions (pairwise transversal crossings in two
/// points, no near-coincident intersection points) at tolerance `eps`.
pub fn check_arrangement(arr: &CircleArrangement, eps: f64) -> std::result::Result<(), GeomError> {
    crossings(arr, eps).map(|_| ())
}

pub fn matrix_from_circles(arr: &CircleArrangement) -> Result<IntersectionMatrix> {
    let cs = &arr.circles;
    let Crossings { points } = crossings(arr, arr.tolerance)?;
    let mut walks: Vec<Vec<(f64, SignedEntry)>> = vec![Vec::new(); cs.len()];
    for ((a, b), p) in points {
        let (la, ca) = cs[a];
        let (lb, cb) = cs[b];
        let (ta, tb) = (ca.tangent(p), cb.tangent(p));
        let cross = ta.0 * tb.1 - ta.1 * tb.0;
        // b comes from the left of a iff b's tangent points to a's right
        let (sign_in_a, sign_in_b) = if cross < 0.0 {
            (Sign::Plus, Sign::Minus)
        } else {
            (Sign::Minus, Sign::Plus)
        };
        walks[a].push((ca.walk_parameter(p), SignedEntry::new(sign_in_a, lb)));
        walks[b].push((cb.walk_parameter(p), SignedEntry::new(sign_in_b, la)));
    }
    let rows = cs
        .iter()
        .zip(walks)
        .map(|((l, _), mut walk)| {
            walk.sort_by(|x, y| x.0.total_cmp(&y.0));
            (*l, walk.into_iter().map(|(_, e)| e).collect())
        })
        .collect();
    IntersectionMatrix::new(rows)
}

/// Samples `n` counterclockwise circles labelled `1..=n`: centers uniform in
/// the unit disc, radii uniform in `[0.8, 1.8]`, rejected until the
/// arrangement conditions hold with margin `10 * tolerance`.
pub fn random_arrangement(n: usize, seed: u64) -> Result<CircleArrangement> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "need at least 2 circles, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 10.0 * DEFAULT_TOLERANCE;
    for _ in 0..SAMPLING_ATTEMPTS {
        let circles = (1..=n as Label)
            .map(|l| {
                let (x, y) = loop {
                    let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    if x * x + y * y < 1.0 {
                        break (x, y);
                    }
                };
                (l, Circle::new(x, y, rng.gen_range(0.8..1.8)))
            })
            .collect();
        let arr = CircleArrangement::new(circles);
        if check_arrangement(&arr, margin).is_ok() {
            return Ok(arr);
        }
    }
    Err(GeomError::SamplingExhausted(SAMPLING_ATTEMPTS).into())
}

/// Parses the `.circ` format: one `<label>: <cx> <cy> <r> [ccw|cw]` line per
/// circle, `#` comments, blank lines ignored.
pub fn parse_circles(text: &str) -> Result<CircleArrangement> {
    let mut circles = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Syntax {
            line: lineno + 1,
            column: 1,
            message,
        };
        let (label, rest) = line
            .split_once(':')
            .ok_or_else(|| err("expected `<label>: <cx> <cy> <r>`".to_string()))?;
        let label: Label = label
            .trim()
            .parse()
            .map_err(|_| err(format!("invalid label `{}`", label.trim())))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if toks.len() != 3 && toks.len() != 4 {
            return Err(err(format!(
                "expected 3 numbers, found {} tokens",
                toks.len()
            )));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| err(format!("invalid number `{t}`")))
        };
        let mut c = Circle::new(num(toks[0])?, num(toks[1])?, num(toks[2])?);
        match toks.get(3) {
            None | Some(&"ccw") => {}
            Some(&"cw") => c = c.clockwise(),
            Some(t) => return Err(err(format!("unknown orientation `{t}`"))),
        }
        circles.push((label, c));
    }
    Ok(CircleArrangement::new(circles))
}
