//! NACA 0012 airfoil profile (sharp-trailing-edge variant) and its boundary
//! projection.

use super::BoundaryGeometry;
use crate::error::Error;
use crate::geom::V2;
use crate::Result;

/// Half-thickness of the modified NACA 0012 profile at chordwise position
/// `x` in [0,1]. The x^4 coefficient is adjusted so the trailing edge closes
/// exactly: the coefficients sum to zero at x = 1.
pub fn naca0012_modified(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "chordwise coordinate {x} outside [0, 1]"
        )));
    }
    Ok(0.6
        * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x
            - 0.1036 * x * x * x * x))
}

/// Projects points onto the airfoil surface, keeping the chordwise
/// coordinate and snapping the half-thickness.
pub struct NacaBoundary {
    pub wall_tag: String,
}

impl NacaBoundary {
    pub fn new(wall_tag: impl Into<String>) -> Self {
        NacaBoundary {
            wall_tag: wall_tag.into(),
        }
    }
}

impl BoundaryGeometry for NacaBoundary {
    fn project(&self, tag: &str, p: V2) -> V2 {
        if tag != self.wall_tag {
            return p;
        }
        let x = p.x.clamp(0.0, 1.0);
        let y = naca0012_modified(x).expect("x clamped to domain");
        V2::new(x, if p.y >= 0.0 { y } else { -y })
    }

    fn is_curved(&self, tag: &str) -> bool {
        tag == self.wall_tag
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_trailing_edge() {
        // the modified x^4 coefficient closes the profile: the decimal
        // coefficients sum to zero, leaving only float rounding
        assert!(naca0012_modified(1.0).unwrap().abs() < 1e-15);
        assert_eq!(naca0012_modified(0.0).unwrap(), 0.0);
    }

    #[test]
    fn quarter_chord_thickness() {
        let x: f64 = 0.25;
        let expect = 0.6
            * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x
                - 0.1036 * x * x * x * x);
        assert_eq!(naca0012_modified(x).unwrap(), expect);
        assert!(expect > 0.0);
    }

    #[test]
    fn domain_is_enforced() {
        assert!(naca0012_modified(-0.1).is_err());
        assert!(naca0012_modified(1.5).is_err());
    }

    #[test]
    fn projection_snaps_to_surface() {
        let b = NacaBoundary::new("wall");
        let p = b.project("wall", V2::new(0.3, -0.2));
        assert!((p.y + naca0012_modified(0.3).unwrap()).abs() < 1e-15);
        // other tags pass through
        let q = b.project("farfield", V2::new(0.3, -0.2));
        assert_eq!(q, V2::new(0.3, -0.2));
    }
}
