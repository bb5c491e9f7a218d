//! Planar vectors and lifted torus points.
//!
//! The torus is `(R/Z)^2`. Vortex positions are carried as points of the
//! plane (lifts) and only reduced modulo 1 for display and field sampling.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Applies the symplectic matrix `[[0, 1], [-1, 0]]`.
    pub fn rotate_j(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    /// Applies the transpose `[[0, -1], [1, 0]]` (counter-clockwise quarter turn).
    pub fn rotate_jt(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Nearest-image representative, componentwise in `[-1/2, 1/2]`.
    pub fn wrap_centered(self) -> Vec2 {
        Vec2::new(self.x - self.x.round(), self.y - self.y.round())
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self * rhs.x, self * rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A point of the plane standing for its image `(x mod 1, y mod 1)` on the torus.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LiftedPoint {
    pub x: f64,
    pub y: f64,
}

impl LiftedPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn as_vec(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Representative in the fundamental domain `[0, 1)^2`.
    pub fn torus_image(self) -> LiftedPoint {
        // rem_euclid rounds tiny negative inputs up to exactly 1.
        let wrap = |c: f64| {
            let r = c.rem_euclid(1.0);
            if r >= 1.0 {
                0.0
            } else {
                r
            }
        };
        LiftedPoint::new(wrap(self.x), wrap(self.y))
    }

    /// Shortest displacement `self - other` over all integer shifts.
    pub fn periodic_displacement(self, other: LiftedPoint) -> Vec2 {
        (self - other).wrap_centered()
    }

    pub fn periodic_distance(self, other: LiftedPoint) -> f64 {
        self.periodic_displacement(other).norm()
    }
}

impl Sub for LiftedPoint {
    type Output = Vec2;
    fn sub(self, rhs: LiftedPoint) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<Vec2> for LiftedPoint {
    type Output = LiftedPoint;
    fn add(self, rhs: Vec2) -> LiftedPoint {
        LiftedPoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl From<Vec2> for LiftedPoint {
    fn from(v: Vec2) -> Self {
        LiftedPoint::new(v.x, v.y)
    }
}

/// Smallest pairwise periodic distance and the pair attaining it.
pub fn min_pair_distance(points: &[LiftedPoint]) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].periodic_distance(points[j]);
            if best.is_none_or(|(b, _, _)| d < b) {
                best = Some((d, i, j));
            }
        }
    }
    best
}
