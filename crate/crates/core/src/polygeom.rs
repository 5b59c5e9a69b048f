//! Newton polygons as lower convex hulls, their slopes, and the copolygon
//! duality onto concave piecewise-linear functions.
//!
//! Points are `(x, y)` with `y` the valuation of the coefficient of `x^i`.
//! Segment slopes are then usually negative; the valuation of a root attached
//! to a segment is the negated slope.

use crate::error::{Error, Result};
use crate::exactval::Extended;
use crate::plf::PLFunction;
use crate::scalar::{cross, slope, Scalar};

/// Vertex list of a lower convex hull: strictly increasing abscissae and
/// strictly increasing segment slopes (no collinear vertices).
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon<T> {
    vertices: Vec<(T, T)>,
}

impl<T: Scalar> NewtonPolygon<T> {
    /// Wraps an explicit vertex list after checking strict convexity.
    pub fn from_vertices(vertices: Vec<(T, T)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Degenerate("a Newton polygon needs at least one vertex".into()));
        }
        for w in vertices.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidInput(
                    "polygon vertices must have strictly increasing x".into(),
                ));
            }
        }
        for w in vertices.windows(3) {
            if slope(&w[1], &w[2]) <= slope(&w[0], &w[1]) {
                return Err(Error::InvalidInput(format!(
                    "polygon is not strictly convex at x = {:?}",
                    w[1].0
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[(T, T)] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Segment slopes, left to right (strictly increasing).
    pub fn slopes(&self) -> Result<Vec<T>> {
        if self.vertices.len() < 2 {
            return Err(Error::Degenerate("a single-vertex polygon has no slopes".into()));
        }
        Ok(self.vertices.windows(2).map(|w| slope(&w[0], &w[1])).collect())
    }

    /// The dual concave function `t -> min_i (y_i + x_i t)`.
    ///
    /// Each segment contributes one vertex at `t = -slope`; the slopes of the
    /// result are the vertex abscissae of the polygon in decreasing order.
    pub fn copolygon(&self) -> Result<PLFunction<T>> {
        let slopes = self.slopes()?;
        if slopes.iter().any(|s| s.is_positive()) {
            log::warn!("copolygon of a polygon with non-negative slopes is experimental");
        }
        let mut vertices = Vec::with_capacity(slopes.len());
        // rightmost segment first: shallowest slope gives the leftmost dual vertex
        for (k, s) in slopes.iter().enumerate().rev() {
            let t = -s.clone();
            let (x, y) = &self.vertices[k];
            vertices.push((t.clone(), y.clone() + x.clone() * t));
        }
        let initial = self.vertices.last().expect("non-empty").0.clone();
        let fin = self.vertices[0].0.clone();
        PLFunction::new(initial, vertices, fin)
    }

    /// Height of the polygon at `x` by interpolation; `None` outside the span.
    pub fn height_at(&self, x: &T) -> Option<T> {
        let first = self.vertices.first()?;
        let last = self.vertices.last()?;
        if *x < first.0 || *x > last.0 {
            return None;
        }
        if self.vertices.len() == 1 {
            return Some(first.1.clone());
        }
        let w = self
            .vertices
            .windows(2)
            .find(|w| *x <= w[1].0)
            .expect("x lies within the span");
        Some(w[0].1.clone() + slope(&w[0], &w[1]) * (x.clone() - w[0].0.clone()))
    }

    /// Converts coordinates, e.g. to `f64` for rendering. No re-validation.
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> NewtonPolygon<U> {
        NewtonPolygon {
            vertices: self.vertices.iter().map(|(x, y)| (f(x), f(y))).collect(),
        }
    }
}

/// Lower convex hull of points whose heights may be infinite.
///
/// Infinite points are discarded first. Collinear interior points are never
/// vertices.
pub fn lower_hull<T: Scalar>(points: &[(T, Extended<T>)]) -> Result<NewtonPolygon<T>> {
    let finite: Vec<(T, T)> = points
        .iter()
        .filter_map(|(x, y)| y.finite().map(|y| (x.clone(), y.clone())))
        .collect();
    lower_hull_finite(&finite)
}

/// [`lower_hull`] for finite points.
pub fn lower_hull_finite<T: Scalar>(points: &[(T, T)]) -> Result<NewtonPolygon<T>> {
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "lower hull needs at least two finite points, got {}",
            points.len()
        )));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable abscissae"));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidInput("hull points must have distinct x".into()));
    }
    let mut hull: Vec<(T, T)> = Vec::with_capacity(sorted.len());
    for pt in sorted {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt).is_positive()
        {
            hull.pop();
        }
        hull.push(pt);
    }
    Ok(NewtonPolygon { vertices: hull })
}

/// True iff `mid` lies strictly below the line through `start` and `end`.
pub fn below_line<T: Scalar>(start: &(T, T), mid: &(T, T), end: &(T, T)) -> Result<bool> {
    if !(start.0 < mid.0 && mid.0 < end.0) {
        return Err(Error::InvalidInput("below_line needs strictly increasing x".into()));
    }
    let line = start.1.clone() + slope(start, end) * (mid.0.clone() - start.0.clone());
    Ok(mid.1 < line)
}
