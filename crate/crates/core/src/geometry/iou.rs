//! Exact intersection volume and IoU of two oriented cuboids.
//!
//! The intersection of two convex boxes is a convex polytope whose boundary
//! is made of the faces of `a` clipped to the inside of `b` plus the faces of
//! `b` clipped to the inside of `a`. Each face is clipped against the six
//! half-spaces of the other box (Sutherland–Hodgman in 3D), and the volume
//! of the closed polytope follows from the divergence theorem as a sum of
//! signed tetrahedra over the fan-triangulated, outward-oriented faces.

use nalgebra::Vector3;

use super::{corner_sign, Cuboid3D};
use crate::scalar::Real;

/// Oriented plane `normal · x = offset`; the inside is `normal · x <= offset`.
#[derive(Clone, Copy, Debug)]
struct HalfSpace<T: Real> {
    normal: Vector3<T>,
    offset: T,
}

impl<T: Real> HalfSpace<T> {
    #[inline]
    fn signed_distance(&self, p: &Vector3<T>) -> T {
        self.normal.dot(p) - self.offset
    }
}

/// One face of a box: its outward plane and its four vertices ordered
/// counter-clockwise when seen from outside.
#[derive(Clone, Copy, Debug)]
struct Face<T: Real> {
    plane: HalfSpace<T>,
    vertices: [Vector3<T>; 4],
}

fn box_faces<T: Real>(c: &Cuboid3D<T>) -> [Face<T>; 6] {
    let corners = c.corners().0;
    let half = c.dims() * T::lit(0.5);
    std::array::from_fn(|f| {
        let axis = f / 2;
        let sign: i8 = if f % 2 == 0 { -1 } else { 1 };
        let normal = c.rotation().axis(axis) * T::lit(sign as f64);
        let offset = normal.dot(c.center()) + half[axis];
        // the two remaining axes, walked as a square loop
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let pick = |su: i8, sv: i8| {
            let idx = (0..8)
                .find(|&i| {
                    corner_sign(i, axis) == sign && corner_sign(i, u) == su && corner_sign(i, v) == sv
                })
                .expect("every sign pattern names a corner");
            corners[idx]
        };
        let mut vertices = [pick(-1, -1), pick(1, -1), pick(1, 1), pick(-1, 1)];
        let winding = (vertices[1] - vertices[0]).cross(&(vertices[2] - vertices[0]));
        if winding.dot(&normal) < T::zero() {
            vertices.reverse();
        }
        Face {
            plane: HalfSpace { normal, offset },
            vertices,
        }
    })
}

/// Keeps the part of `poly` with `signed_distance <= eps`.
fn clip_polygon<T: Real>(poly: &[Vector3<T>], plane: &HalfSpace<T>, eps: T) -> Vec<Vector3<T>> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let mut prev = poly[n - 1];
    let mut prev_d = plane.signed_distance(&prev);
    for &cur in poly {
        let cur_d = plane.signed_distance(&cur);
        let prev_in = prev_d <= eps;
        let cur_in = cur_d <= eps;
        if prev_in != cur_in {
            let denom = prev_d - cur_d;
            let t = if denom.abs() > T::zero() {
                (prev_d / denom).max(T::zero()).min(T::one())
            } else {
                T::zero()
            };
            out.push(prev + (cur - prev) * t);
        }
        if cur_in {
            out.push(cur);
        }
        prev = cur;
        prev_d = cur_d;
    }
    out
}

/// Each face clipped to the inside of the box bounded by `clip_planes`.
fn clipped_faces<'a, T: Real>(
    faces: &'a [Face<T>],
    clip_planes: &'a [Face<T>; 6],
    eps: T,
) -> impl Iterator<Item = Vec<Vector3<T>>> + 'a {
    faces.iter().filter_map(move |face| {
        let mut poly = face.vertices.to_vec();
        for clip in clip_planes {
            poly = clip_polygon(&poly, &clip.plane, eps);
            if poly.len() < 3 {
                return None;
            }
        }
        Some(poly)
    })
}

/// True when `face` lies (within `eps`) on a plane of `others` with the
/// same outward orientation. Such a face would duplicate the clipped face
/// of the other box.
fn is_shared_face<T: Real>(face: &Face<T>, others: &[Face<T>; 6], eps: T) -> bool {
    others.iter().any(|o| {
        o.plane.normal.dot(&face.plane.normal) > T::zero()
            && face
                .vertices
                .iter()
                .all(|v| o.plane.signed_distance(v).abs() <= eps)
    })
}

/// Signed volume enclosed by outward-oriented polygons, relative to `origin`.
fn enclosed_volume<T: Real>(polys: &[Vec<Vector3<T>>], origin: &Vector3<T>) -> T {
    let mut six_v = T::zero();
    for poly in polys {
        let p0 = poly[0] - origin;
        for w in poly[1..].windows(2) {
            let p1 = w[0] - origin;
            let p2 = w[1] - origin;
            six_v += p0.dot(&p1.cross(&p2));
        }
    }
    six_v / T::lit(6.0)
}

/// Volume of `a ∩ b` in m³.
pub fn intersection_volume<T: Real>(a: &Cuboid3D<T>, b: &Cuboid3D<T>) -> T {
    let half = T::lit(0.5);
    let reach = (a.diagonal() + b.diagonal()) * half;
    if (a.center() - b.center()).norm() > reach {
        return T::zero();
    }
    let eps = T::tol();
    let faces_a = box_faces(a);
    let faces_b = box_faces(b);

    let mut polys: Vec<Vec<Vector3<T>>> = clipped_faces(&faces_a, &faces_b, eps).collect();
    let b_unique: Vec<Face<T>> = faces_b
        .iter()
        .filter(|f| !is_shared_face(f, &faces_a, eps))
        .copied()
        .collect();
    polys.extend(clipped_faces(&b_unique, &faces_a, eps));
    if polys.is_empty() {
        return T::zero();
    }
    let origin = (a.center() + b.center()) * half;
    let v = enclosed_volume(&polys, &origin);
    v.max(T::zero()).min(a.volume().min(b.volume()))
}

/// Intersection over union of two oriented boxes, in `[0, 1]`.
pub fn iou3d<T: Real>(a: &Cuboid3D<T>, b: &Cuboid3D<T>) -> T {
    let inter = intersection_volume(a, b);
    if inter <= T::zero() {
        return T::zero();
    }
    let union = a.volume() + b.volume() - inter;
    (inter / union).max(T::zero()).min(T::one())
}
