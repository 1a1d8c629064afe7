//! Plane geometry primitives.

use serde::{Deserialize, Serialize};

/// 2D point / vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct V2 {
    pub x: f64,
    pub y: f64,
}

impl V2 {
    pub const ZERO: V2 = V2 { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        V2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: V2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    #[inline]
    pub fn cross(self, o: V2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn normalized(self) -> V2 {
        let n = self.norm();
        V2::new(self.x / n, self.y / n)
    }

    /// Clockwise 90° rotation; maps a CCW boundary tangent to the outward normal.
    #[inline]
    pub fn rot_cw(self) -> V2 {
        V2::new(self.y, -self.x)
    }

    #[inline]
    pub fn dist(self, o: V2) -> f64 {
        (self - o).norm()
    }
}

impl std::ops::Add for V2 {
    type Output = V2;
    #[inline]
    fn add(self, o: V2) -> V2 {
        V2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for V2 {
    type Output = V2;
    #[inline]
    fn sub(self, o: V2) -> V2 {
        V2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for V2 {
    type Output = V2;
    #[inline]
    fn mul(self, s: f64) -> V2 {
        V2::new(self.x * s, self.y * s)
    }
}

/// Signed area of the triangle (a, b, c); positive when CCW.
#[inline]
pub fn signed_area(a: V2, b: V2, c: V2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_and_rotation() {
        let a = V2::new(0.0, 0.0);
        let b = V2::new(1.0, 0.0);
        let c = V2::new(0.0, 1.0);
        assert!((signed_area(a, b, c) - 0.5).abs() < 1e-15);
        assert!((signed_area(a, c, b) + 0.5).abs() < 1e-15);

        // tangent along +x on the bottom edge of a CCW triangle -> outward normal -y
        let n = (b - a).rot_cw().normalized();
        assert!((n.x - 0.0).abs() < 1e-15 && (n.y + 1.0).abs() < 1e-15);
    }
}
