//! Spatial points and directions in dimension 1 or 2.

/// A point of R^1 or R^2 (spatial position, path output, or direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    D1(f64),
    D2([f64; 2]),
}

impl Point {
    pub fn dimension(&self) -> usize {
        match self {
            Point::D1(_) => 1,
            Point::D2(_) => 2,
        }
    }

    /// Coordinates as a fixed pair; the second entry is 0 in dimension 1.
    pub fn coords(&self) -> [f64; 2] {
        match self {
            Point::D1(x) => [*x, 0.0],
            Point::D2(xy) => *xy,
        }
    }

    pub fn scalar(&self) -> f64 {
        match self {
            Point::D1(x) => *x,
            Point::D2(_) => panic!("scalar() on a 2D point"),
        }
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Point {
        match self {
            Point::D1(x) => Point::D1(f(x)),
            Point::D2([x, y]) => Point::D2([f(x), f(y)]),
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::D1(x)
    }
}

impl From<[f64; 2]> for Point {
    fn from(xy: [f64; 2]) -> Self {
        Point::D2(xy)
    }
}
