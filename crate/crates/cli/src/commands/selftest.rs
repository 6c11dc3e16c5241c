use std::fmt;

use mono3d_core::eval::hungarian_assign;
use mono3d_core::geometry::{iou3d, Cuboid3D};
use mono3d_core::lifting::{dbscan, fit_obb_pca, PointCloud};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::{Fault, SelftestArgs};
use crate::oracle;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed error, in the suite's own unit.
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelftestSummary {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }

    pub fn failed_suites(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| s.failures > 0).map(|s| s.name).collect()
    }
}

impl fmt::Display for SelftestSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selftest seed={}", self.seed)?;
        for s in &self.suites {
            writeln!(
                f,
                "  {:<18} {}  {}/{} cases  worst {:.3e} (tol {:.1e})",
                s.name,
                if s.failures == 0 { "PASS" } else { "FAIL" },
                s.cases - s.failures,
                s.cases,
                s.worst,
                s.tolerance
            )?;
        }
        writeln!(f, "{}", if self.passed() { "all suites passed" } else { "FAILED" })
    }
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            result: SuiteResult { name, cases: 0, failures: 0, worst: 0.0, tolerance },
        }
    }

    fn record(&mut self, err: f64, ok: bool) {
        self.result.cases += 1;
        self.result.worst = self.result.worst.max(err);
        self.result.failures += usize::from(!ok);
    }

    fn check(&mut self, err: f64) {
        let ok = err <= self.result.tolerance;
        self.record(err, ok);
    }
}

fn rng_for(seed: u64, suite: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ suite)
}

fn iou_under_test(a: &Cuboid3D<f64>, b: &Cuboid3D<f64>, fault: Option<Fault>) -> f64 {
    let v = iou3d(a, b);
    if fault == Some(Fault::Iou) {
        0.9 * v + 0.05
    } else {
        v
    }
}

/// Runs the oracle suites. Output depends only on the arguments.
pub fn cmd_selftest(a: &SelftestArgs) -> SelftestSummary {
    let fault = a.inject_fault;
    let mut suites = Vec::new();

    let mut s = Suite::new("iou_monte_carlo", 0.01);
    let mut rng = rng_for(a.seed, 1);
    for _ in 0..a.pairs {
        let x = oracle::random_cuboid(&mut rng, (0.2, 3.0), Vector3::zeros(), 0.0);
        let y = oracle::random_cuboid(&mut rng, (0.2, 3.0), *x.center(), 2.0);
        let mc = oracle::monte_carlo_iou(&x, &y, a.samples, &mut rng);
        s.check((iou_under_test(&x, &y, fault) - mc).abs());
    }
    suites.push(s.result);

    let mut s = Suite::new("iou_axis_aligned", 1e-9);
    let mut rng = rng_for(a.seed, 2);
    for _ in 0..200 {
        let mut aa = || {
            let c = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let d = Vector3::new(rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0));
            Cuboid3D::axis_aligned(c, d).expect("positive extents")
        };
        let (x, y) = (aa(), aa());
        s.check((iou_under_test(&x, &y, fault) - oracle::axis_aligned_iou(&x, &y)).abs());
    }
    suites.push(s.result);

    let mut s = Suite::new("hungarian", 0.0);
    let mut rng = rng_for(a.seed, 3);
    for _ in 0..20 {
        let cost: Vec<Vec<f64>> = (0..8).map(|_| (0..8).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
        let mut got = hungarian_assign(&cost).expect("finite square matrix").cost;
        if fault == Some(Fault::Hungarian) {
            got += 0.5;
        }
        s.check((got - oracle::brute_force_assignment(&cost)).abs());
    }
    suites.push(s.result);

    // worst = largest relative dimension error; axes must also agree
    let mut s = Suite::new("obb_recovery", 0.05);
    let mut rng = rng_for(a.seed, 4);
    for _ in 0..10 {
        let dims = oracle::random_separated_dims(&mut rng);
        let truth = Cuboid3D::new(
            Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(2.0..8.0)),
            dims,
            oracle::random_rotation(&mut rng),
        )
        .expect("positive extents");
        let pts = oracle::sample_interior(&truth, 10_000, &mut rng);
        match fit_obb_pca(&PointCloud::new(pts)) {
            Ok(fit) => {
                let (mut worst, mut axes_ok) = (0.0f64, true);
                for i in 0..3 {
                    let ax = fit.rotation().axis(i);
                    let (j, dot) = (0..3)
                        .map(|j| (j, ax.dot(&truth.rotation().axis(j)).abs()))
                        .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
                    axes_ok &= dot >= 0.99;
                    worst = worst.max((fit.dims()[i] - dims[j]).abs() / dims[j]);
                }
                s.record(worst, axes_ok && worst <= 0.05);
            }
            Err(_) => s.record(f64::INFINITY, false),
        }
    }
    suites.push(s.result);

    // worst = number of mislabeled clouds
    let mut s = Suite::new("dbscan", 0.0);
    let mut rng = rng_for(a.seed, 5);
    for _ in 0..5 {
        let n = rng.gen_range(50..300);
        let pts: Vec<Vector3<f64>> = (0..n)
            .map(|_| Vector3::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..0.2)))
            .collect();
        let eps = rng.gen_range(0.05..0.15);
        let got = dbscan(&PointCloud::new(pts.clone()), eps, 4).expect("valid parameters");
        let labels: Vec<Option<usize>> = got.labels.iter().map(|l| l.cluster()).collect();
        let ok = oracle::same_partition(&labels, &oracle::dbscan_reference(&pts, eps, 4));
        s.record(f64::from(u8::from(!ok)), ok);
    }
    suites.push(s.result);

    SelftestSummary { seed: a.seed, suites }
}
