//! Increasing concave piecewise-linear functions.
//!
//! A function is stored as its initial slope, its genuine slope breaks and its
//! final slope; the last segment is an unbounded ray. A function without
//! vertices is the line `x -> slope * x`.

use crate::error::{Error, Result};
use crate::scalar::{slope, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct PLFunction<T> {
    initial_slope: T,
    vertices: Vec<(T, T)>,
    final_slope: T,
}

impl<T: Scalar> PLFunction<T> {
    pub fn identity() -> Self {
        Self::linear(T::one()).expect("one is positive")
    }

    pub fn linear(slope: T) -> Result<Self> {
        if !slope.is_positive() {
            return Err(Error::InvalidInput("slopes must be positive".into()));
        }
        Ok(Self {
            initial_slope: slope.clone(),
            vertices: Vec::new(),
            final_slope: slope,
        })
    }

    /// Builds a function from its minimal representation, rejecting
    /// redundant vertices, non-positive slopes and convex kinks.
    pub fn new(initial_slope: T, vertices: Vec<(T, T)>, final_slope: T) -> Result<Self> {
        let f = Self {
            initial_slope,
            vertices,
            final_slope,
        };
        f.validate()?;
        Ok(f)
    }

    /// Like [`PLFunction::new`] but merges breakpoints where the slope does
    /// not change.
    pub fn from_breakpoints(initial_slope: T, points: Vec<(T, T)>, final_slope: T) -> Result<Self> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidInput(
                    "breakpoints must have strictly increasing x".into(),
                ));
            }
        }
        let n = points.len();
        let mut kept = Vec::with_capacity(n);
        for i in 0..n {
            let incoming = if i == 0 {
                initial_slope.clone()
            } else {
                slope(&points[i - 1], &points[i])
            };
            let outgoing = if i + 1 == n {
                final_slope.clone()
            } else {
                slope(&points[i], &points[i + 1])
            };
            if incoming != outgoing {
                kept.push(points[i].clone());
            }
        }
        if kept.is_empty() {
            if let Some(p) = points.first() {
                if p.1 != initial_slope.clone() * p.0.clone() {
                    return Err(Error::Degenerate(
                        "a vertex-free function must pass through the origin".into(),
                    ));
                }
            }
            if initial_slope != final_slope {
                return Err(Error::InvalidInput("initial and final slopes differ without a vertex".into()));
            }
        }
        Self::new(initial_slope, kept, final_slope)
    }

    fn validate(&self) -> Result<()> {
        let slopes = self.slopes();
        if slopes.iter().any(|s| !s.is_positive()) {
            return Err(Error::InvalidInput("slopes must be positive".into()));
        }
        for w in self.vertices.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidInput("vertex x must be strictly increasing".into()));
            }
        }
        if self.vertices.is_empty() && self.initial_slope != self.final_slope {
            return Err(Error::InvalidInput("initial and final slopes differ without a vertex".into()));
        }
        for w in slopes.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::InvalidInput(
                    "slopes must strictly decrease (concave, no redundant vertices)".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn initial_slope(&self) -> &T {
        &self.initial_slope
    }

    pub fn final_slope(&self) -> &T {
        &self.final_slope
    }

    pub fn vertices(&self) -> &[(T, T)] {
        &self.vertices
    }

    /// All segment slopes left to right; one more than the vertex count.
    pub fn slopes(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.vertices.len() + 1);
        out.push(self.initial_slope.clone());
        out.extend(self.vertices.windows(2).map(|w| slope(&w[0], &w[1])));
        if !self.vertices.is_empty() {
            out.push(self.final_slope.clone());
        }
        out
    }

    /// `f(0) = 0`.
    pub fn passes_through_origin(&self) -> bool {
        self.value_at(&T::zero()).is_zero()
    }

    pub fn evaluate(&self, x: &T) -> Result<T> {
        if x.is_negative() {
            return Err(Error::InvalidInput(format!("evaluation at negative x = {x:?}")));
        }
        Ok(self.value_at(x))
    }

    /// Evaluation on the whole line, extending the outer rays.
    pub(crate) fn value_at(&self, x: &T) -> T {
        let Some(first) = self.vertices.first() else {
            return self.initial_slope.clone() * x.clone();
        };
        if *x <= first.0 {
            return first.1.clone() + self.initial_slope.clone() * (x.clone() - first.0.clone());
        }
        for w in self.vertices.windows(2) {
            if *x <= w[1].0 {
                return w[0].1.clone() + slope(&w[0], &w[1]) * (x.clone() - w[0].0.clone());
            }
        }
        let last = self.vertices.last().expect("non-empty");
        last.1.clone() + self.final_slope.clone() * (x.clone() - last.0.clone())
    }

    /// The unique `x` with `f(x) = y`.
    pub fn preimage(&self, y: &T) -> T {
        let Some(first) = self.vertices.first() else {
            return y.clone() / self.initial_slope.clone();
        };
        if *y <= first.1 {
            return first.0.clone() + (y.clone() - first.1.clone()) / self.initial_slope.clone();
        }
        for w in self.vertices.windows(2) {
            if *y <= w[1].1 {
                return w[0].0.clone() + (y.clone() - w[0].1.clone()) / slope(&w[0], &w[1]);
            }
        }
        let last = self.vertices.last().expect("non-empty");
        last.0.clone() + (y.clone() - last.1.clone()) / self.final_slope.clone()
    }

    /// `self ∘ inner`.
    ///
    /// Breakpoints of the composite are those of `inner` together with the
    /// preimages under `inner` of the breakpoints of `self`.
    pub fn compose(&self, inner: &PLFunction<T>) -> Result<Self> {
        let mut xs: Vec<T> = inner.vertices.iter().map(|v| v.0.clone()).collect();
        xs.extend(self.vertices.iter().map(|v| inner.preimage(&v.0)));
        xs.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.value_at(&inner.value_at(&x));
                (x, y)
            })
            .collect();
        Self::from_breakpoints(
            self.initial_slope.clone() * inner.initial_slope.clone(),
            points,
            self.final_slope.clone() * inner.final_slope.clone(),
        )
    }

    /// Moves every vertex by `(x_shift, initial_slope * x_shift)`, which keeps
    /// all slopes, then stretches by `x_scale` horizontally and `y_scale`
    /// vertically.
    pub fn affine_transform(&self, x_shift: &T, x_scale: &T, y_scale: &T) -> Result<Self> {
        if !x_scale.is_positive() || !y_scale.is_positive() {
            return Err(Error::InvalidInput("affine scales must be positive".into()));
        }
        let ratio = y_scale.clone() / x_scale.clone();
        let lift = self.initial_slope.clone() * x_shift.clone();
        let vertices = self
            .vertices
            .iter()
            .map(|(x, y)| {
                (
                    x_scale.clone() * (x.clone() + x_shift.clone()),
                    y_scale.clone() * (y.clone() + lift.clone()),
                )
            })
            .collect();
        Self::new(
            self.initial_slope.clone() * ratio.clone(),
            vertices,
            self.final_slope.clone() * ratio,
        )
    }

    /// Height of the rightmost vertex.
    pub fn altitude(&self) -> Result<T> {
        self.vertices
            .last()
            .map(|v| v.1.clone())
            .ok_or_else(|| Error::Degenerate("a vertex-free function has no altitude".into()))
    }

    /// Converts coordinates, e.g. to `f64` for rendering. No re-validation.
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> PLFunction<U> {
        PLFunction {
            initial_slope: f(&self.initial_slope),
            vertices: self.vertices.iter().map(|(x, y)| (f(x), f(y))).collect(),
            final_slope: f(&self.final_slope),
        }
    }
}
