//! Density-based clustering used to strip outliers from unprojected clouds.
//!
//! A point is *core* when at least `min_pts` points (itself included) lie
//! within `eps` of it. Clusters are the connected components of core points
//! under the `eps`-neighbourhood relation. A non-core point within `eps` of
//! some core point is a *border* point and joins the cluster of its nearest
//! core neighbour (lowest index on exact ties); everything else is noise.
//! Clusters are numbered by their lowest-index core point, so the output
//! does not depend on traversal order.

use std::collections::{HashMap, VecDeque};

use nalgebra::Vector3;

use super::{LiftError, PointCloud};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Noise,
    Cluster(usize),
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Cluster(c) => Some(c),
            Label::Noise => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub labels: Vec<Label>,
    pub core: Vec<bool>,
    pub n_clusters: usize,
}

impl Clustering {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for c in self.labels.iter().filter_map(|l| l.cluster()) {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Noise).count()
    }
}

type Cell = (i64, i64, i64);

/// Uniform grid with cell size `eps` for fixed-radius neighbour queries.
struct Grid<'a, T: Real> {
    points: &'a [Vector3<T>],
    eps: T,
    eps2: T,
    cells: HashMap<Cell, Vec<usize>>,
}

impl<'a, T: Real> Grid<'a, T> {
    fn new(points: &'a [Vector3<T>], eps: T) -> Self {
        let mut cells: HashMap<Cell, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(cell_of(p, eps)).or_default().push(i);
        }
        Self {
            points,
            eps,
            eps2: eps * eps,
            cells,
        }
    }

    /// Calls `f` for every point within `eps` of point `i` (including `i`).
    fn for_each_neighbour(&self, i: usize, mut f: impl FnMut(usize, T)) {
        let p = &self.points[i];
        let (cx, cy, cz) = cell_of(p, self.eps);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let key = (cx.saturating_add(dx), cy.saturating_add(dy), cz.saturating_add(dz));
                    if let Some(bucket) = self.cells.get(&key) {
                        for &j in bucket {
                            let d2 = (self.points[j] - p).norm_squared();
                            if d2 <= self.eps2 {
                                f(j, d2);
                            }
                        }
                    }
                }
            }
        }
    }
}

fn cell_of<T: Real>(p: &Vector3<T>, eps: T) -> Cell {
    let c = |v: T| (v / eps).floor().to_f64_lossy() as i64;
    (c(p.x), c(p.y), c(p.z))
}

pub fn dbscan<T: Real>(pc: &PointCloud<T>, eps: T, min_pts: usize) -> Result<Clustering, LiftError> {
    if !(eps.is_finite() && eps > T::zero()) || min_pts == 0 {
        return Err(LiftError::InvalidParams("dbscan needs eps > 0 and min_pts >= 1"));
    }
    let points = &pc.points;
    let n = points.len();
    let grid = Grid::new(points, eps);

    let core: Vec<bool> = (0..n)
        .map(|i| {
            let mut count = 0usize;
            grid.for_each_neighbour(i, |_, _| count += 1);
            count >= min_pts
        })
        .collect();

    let mut labels = vec![Label::Noise; n];
    let mut n_clusters = 0;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if !core[seed] || labels[seed] != Label::Noise {
            continue;
        }
        let id = n_clusters;
        n_clusters += 1;
        labels[seed] = Label::Cluster(id);
        queue.push_back(seed);
        while let Some(i) = queue.pop_front() {
            grid.for_each_neighbour(i, |j, _| {
                if core[j] && labels[j] == Label::Noise {
                    labels[j] = Label::Cluster(id);
                    queue.push_back(j);
                }
            });
        }
    }

    for i in (0..n).filter(|&i| !core[i]) {
        let mut best: Option<(T, usize)> = None;
        grid.for_each_neighbour(i, |j, d2| {
            if core[j] {
                let better = match best {
                    None => true,
                    Some((bd, bj)) => d2 < bd || (d2 == bd && j < bj),
                };
                if better {
                    best = Some((d2, j));
                }
            }
        });
        if let Some((_, j)) = best {
            labels[i] = labels[j];
        }
    }

    Ok(Clustering {
        labels,
        core,
        n_clusters,
    })
}

/// Points of the largest cluster; equal sizes go to the cluster with the
/// smallest mean depth.
pub fn select_primary_cluster<T: Real>(
    clustering: &Clustering,
    pc: &PointCloud<T>,
) -> Result<PointCloud<T>, LiftError> {
    let sizes = clustering.cluster_sizes();
    let mut depth_sum = vec![T::zero(); clustering.n_clusters];
    for (label, p) in clustering.labels.iter().zip(&pc.points) {
        if let Some(c) = label.cluster() {
            depth_sum[c] += p.z;
        }
    }
    let mut best: Option<(usize, T, usize)> = None;
    for (c, (&size, &sum)) in sizes.iter().zip(&depth_sum).enumerate() {
        if size == 0 {
            continue;
        }
        let mean_z = sum / T::lit(size as f64);
        let better = match best {
            None => true,
            Some((bs, bz, _)) => size > bs || (size == bs && mean_z < bz),
        };
        if better {
            best = Some((size, mean_z, c));
        }
    }
    let (_, _, chosen) = best.ok_or(LiftError::AllNoise)?;
    let points = clustering
        .labels
        .iter()
        .zip(&pc.points)
        .filter(|(l, _)| l.cluster() == Some(chosen))
        .map(|(_, p)| *p)
        .collect();
    Ok(PointCloud::new(points))
}

/// Median distance from each point to its nearest other point.
pub fn median_nn_distance<T: Real>(pc: &PointCloud<T>) -> Option<T> {
    let pts = &pc.points;
    if pts.len() < 2 {
        return None;
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].x.partial_cmp(&pts[b].x).unwrap_or(std::cmp::Ordering::Equal));
    let mut nn: Vec<T> = (0..order.len())
        .map(|pos| {
            let p = &pts[order[pos]];
            let mut best2: Option<T> = None;
            let mut scan = |range: &mut dyn Iterator<Item = usize>| {
                for q in range {
                    let other = &pts[order[q]];
                    let dx = other.x - p.x;
                    if let Some(b) = best2 {
                        if dx * dx > b {
                            break;
                        }
                    }
                    let d2 = (other - p).norm_squared();
                    if best2.is_none_or(|b| d2 < b) {
                        best2 = Some(d2);
                    }
                }
            };
            scan(&mut (pos + 1..order.len()));
            scan(&mut (0..pos).rev());
            best2.map(|b| b.sqrt()).unwrap_or_else(T::zero)
        })
        .collect();
    nn.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = nn.len();
    Some(if m % 2 == 1 {
        nn[m / 2]
    } else {
        (nn[m / 2 - 1] + nn[m / 2]) * T::lit(0.5)
    })
}
