//! Reference computations that share no code with the library routines
//! they check: sampling, exhaustive search and quadratic scans.

use mono3d_core::geometry::{Cuboid3D, RotationMatrix};
use nalgebra::Vector3;
use rand::Rng;

/// Random cuboid with extents in `dims` and center within `radius` of
/// `around`, under a uniformly distributed rotation.
pub fn random_cuboid<R: Rng>(rng: &mut R, dims: (f64, f64), around: Vector3<f64>, radius: f64) -> Cuboid3D<f64> {
    let rot = random_rotation(rng);
    let offset = loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm_squared() <= 1.0 {
            break v * radius;
        }
    };
    let d = Vector3::new(rng.gen_range(dims.0..dims.1), rng.gen_range(dims.0..dims.1), rng.gen_range(dims.0..dims.1));
    Cuboid3D::new(around + offset, d, rot).expect("positive extents")
}

/// Extents with one short, one medium and one long side (in random
/// order), each at least twice the previous. Closer extents make the
/// sampled covariance's eigenvectors noisy enough that a long side leaks
/// into a shorter side's min/max extent.
pub fn random_separated_dims<R: Rng>(rng: &mut R) -> Vector3<f64> {
    let mut d = [rng.gen_range(0.2..0.4), rng.gen_range(0.8..1.2), rng.gen_range(2.4..3.0)];
    for i in (1..3).rev() {
        d.swap(i, rng.gen_range(0..=i));
    }
    Vector3::from(d)
}

/// Uniform rotation from a random unit quaternion.
pub fn random_rotation<R: Rng>(rng: &mut R) -> RotationMatrix<f64> {
    let q = loop {
        let q: nalgebra::Vector4<f64> = nalgebra::Vector4::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = q.norm();
        if n > 1e-3 && n <= 1.0 {
            break q / n;
        }
    };
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    let m = nalgebra::Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    );
    RotationMatrix::nearest(m).expect("unit quaternion")
}

/// Membership test written out from the box definition: project the
/// offset onto each rotated axis and compare with the half extent.
fn inside(c: &Cuboid3D<f64>, p: &Vector3<f64>) -> bool {
    let m = c.rotation().matrix();
    let d = p - c.center();
    (0..3).all(|k| {
        let along = m[(0, k)] * d.x + m[(1, k)] * d.y + m[(2, k)] * d.z;
        along.abs() <= 0.5 * c.dims()[k]
    })
}

fn corner_aabb(c: &Cuboid3D<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let m = c.rotation().matrix();
    let half = Vector3::from_fn(|r, _| (0..3).map(|k| m[(r, k)].abs() * 0.5 * c.dims()[k]).sum::<f64>());
    (c.center() - half, c.center() + half)
}

/// IoU estimated from `samples` uniform points over the bounding box of
/// both cuboids.
pub fn monte_carlo_iou<R: Rng>(a: &Cuboid3D<f64>, b: &Cuboid3D<f64>, samples: usize, rng: &mut R) -> f64 {
    let (a0, a1) = corner_aabb(a);
    let (b0, b1) = corner_aabb(b);
    let lo = a0.inf(&b0);
    let hi = a1.sup(&b1);
    let (mut both, mut either) = (0usize, 0usize);
    for _ in 0..samples {
        let p = Vector3::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y), rng.gen_range(lo.z..hi.z));
        let (ia, ib) = (inside(a, &p), inside(b, &p));
        both += (ia && ib) as usize;
        either += (ia || ib) as usize;
    }
    if either == 0 {
        0.0
    } else {
        both as f64 / either as f64
    }
}

/// IoU of two axis-aligned boxes as the product of per-axis overlaps.
pub fn axis_aligned_iou(a: &Cuboid3D<f64>, b: &Cuboid3D<f64>) -> f64 {
    let mut inter = 1.0;
    for k in 0..3 {
        let lo = (a.center()[k] - a.dims()[k] / 2.0).max(b.center()[k] - b.dims()[k] / 2.0);
        let hi = (a.center()[k] + a.dims()[k] / 2.0).min(b.center()[k] + b.dims()[k] / 2.0);
        inter *= (hi - lo).max(0.0);
    }
    let va = a.dims().x * a.dims().y * a.dims().z;
    let vb = b.dims().x * b.dims().y * b.dims().z;
    inter / (va + vb - inter)
}

/// Minimum total cost over all permutations, each total summed in row
/// order.
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> f64 {
    fn walk(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>, chosen: &mut Vec<usize>, best: &mut f64) {
        if row == cost.len() {
            let total = chosen.iter().enumerate().fold(0.0, |acc, (r, &c)| acc + cost[r][c]);
            *best = best.min(total);
            return;
        }
        for c in 0..cost.len() {
            if !used[c] {
                used[c] = true;
                chosen.push(c);
                walk(cost, row + 1, used, chosen, best);
                chosen.pop();
                used[c] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    walk(cost, 0, &mut vec![false; cost.len()], &mut Vec::new(), &mut best);
    best
}

/// Uniform samples from the interior of `c`.
pub fn sample_interior<R: Rng>(c: &Cuboid3D<f64>, n: usize, rng: &mut R) -> Vec<Vector3<f64>> {
    (0..n)
        .map(|_| {
            let local = Vector3::new(
                rng.gen_range(-0.5..0.5) * c.dims().x,
                rng.gen_range(-0.5..0.5) * c.dims().y,
                rng.gen_range(-0.5..0.5) * c.dims().z,
            );
            c.center() + c.rotation().matrix() * local
        })
        .collect()
}

/// Quadratic DBSCAN: direct neighbour counts for core status, union-find
/// over core pairs, borders to the nearest core neighbour (lower index on
/// ties). `None` is noise; cluster ids are arbitrary.
pub fn dbscan_reference(points: &[Vector3<f64>], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let d2 = |i: usize, j: usize| (points[i] - points[j]).norm_squared();
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| d2(i, j) <= eps * eps).count() >= min_pts).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if core[i] && core[j] && d2(i, j) <= eps * eps {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            if core[i] {
                return Some(root(&mut parent, i));
            }
            let nearest = (0..n)
                .filter(|&j| core[j] && d2(i, j) <= eps * eps)
                .fold(None::<usize>, |best, j| match best {
                    Some(b) if d2(i, b) <= d2(i, j) => Some(b),
                    _ => Some(j),
                });
            nearest.map(|j| root(&mut parent, j))
        })
        .collect()
}

/// Whether two labelings describe the same partition (noise must agree).
pub fn same_partition<A: Copy + Eq + std::hash::Hash, B: Copy + Eq + std::hash::Hash>(
    a: &[Option<A>],
    b: &[Option<B>],
) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: HashMap<A, B> = HashMap::new();
    let mut back: HashMap<B, A> = HashMap::new();
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (None, None) => true,
        (Some(x), Some(y)) => *fwd.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x,
        _ => false,
    })
}
