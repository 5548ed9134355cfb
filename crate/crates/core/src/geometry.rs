//! Spatial model: PPP base stations, uniform-in-disk users, and the analytic
//! distance distributions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioParams;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotation about the origin.
    pub fn rotated(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

/// One sampled drop of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    bs_positions: Vec<Point>,
    dl_user: Vec<Point>,
    ul_user: Vec<Point>,
    tagged_cell: usize,
}

impl NetworkRealization {
    /// Builds a realization from explicit positions, checking that every user
    /// lies within `r_c` of its parent and that `tagged_cell` exists.
    pub fn new(
        bs_positions: Vec<Point>,
        dl_user: Vec<Point>,
        ul_user: Vec<Point>,
        tagged_cell: usize,
        r_c: f64,
    ) -> Result<Self> {
        let n = bs_positions.len();
        if dl_user.len() != n || ul_user.len() != n {
            return Err(Error::DegenerateGeometry(format!(
                "{n} base stations but {} downlink and {} uplink users",
                dl_user.len(),
                ul_user.len()
            )));
        }
        if tagged_cell >= n {
            return Err(Error::DegenerateGeometry(format!(
                "tagged cell {tagged_cell} out of range for {n} base stations"
            )));
        }
        // small slack for user positions computed in floating point
        let limit = r_c * (1.0 + 1e-12);
        for (i, bs) in bs_positions.iter().enumerate() {
            for user in [dl_user[i], ul_user[i]] {
                if bs.distance(user) > limit {
                    return Err(Error::DegenerateGeometry(format!(
                        "user of cell {i} lies {} m from its BS (r_c = {r_c})",
                        bs.distance(user)
                    )));
                }
            }
        }
        Ok(Self {
            bs_positions,
            dl_user,
            ul_user,
            tagged_cell,
        })
    }

    /// Samples BSs over the square window centred on the origin, one downlink
    /// and one uplink user per cell, and tags the BS nearest the centre.
    pub fn sample<R: Rng + ?Sized>(params: &ScenarioParams, rng: &mut R) -> Result<Self> {
        let bs_positions = sample_ppp_with(params.lambda_bs(), params.window_len(), rng)?;
        if bs_positions.is_empty() {
            return Err(Error::DegenerateGeometry(
                "no base station in the window".into(),
            ));
        }
        let r_c = params.r_c();
        let mut dl_user = Vec::with_capacity(bs_positions.len());
        let mut ul_user = Vec::with_capacity(bs_positions.len());
        for &bs in &bs_positions {
            dl_user.push(uniform_in_disk(bs, r_c, rng));
            ul_user.push(uniform_in_disk(bs, r_c, rng));
        }
        let tagged_cell = nearest_to(&bs_positions, Point::ORIGIN);
        Ok(Self {
            bs_positions,
            dl_user,
            ul_user,
            tagged_cell,
        })
    }

    pub fn bs_positions(&self) -> &[Point] {
        &self.bs_positions
    }
    pub fn dl_users(&self) -> &[Point] {
        &self.dl_user
    }
    pub fn ul_users(&self) -> &[Point] {
        &self.ul_user
    }
    pub fn tagged_cell(&self) -> usize {
        self.tagged_cell
    }
    pub fn len(&self) -> usize {
        self.bs_positions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bs_positions.is_empty()
    }

    pub fn tagged_bs(&self) -> Point {
        self.bs_positions[self.tagged_cell]
    }
    pub fn tagged_dl_user(&self) -> Point {
        self.dl_user[self.tagged_cell]
    }
    pub fn tagged_ul_user(&self) -> Point {
        self.ul_user[self.tagged_cell]
    }

    /// Indices of all cells except the tagged one.
    pub fn other_cells(&self) -> impl Iterator<Item = usize> + '_ {
        let tagged = self.tagged_cell;
        (0..self.len()).filter(move |&i| i != tagged)
    }

    /// Every position rotated by `theta` about the origin.
    pub fn rotated(&self, theta: f64) -> Self {
        let rot = |v: &[Point]| v.iter().map(|p| p.rotated(theta)).collect();
        Self {
            bs_positions: rot(&self.bs_positions),
            dl_user: rot(&self.dl_user),
            ul_user: rot(&self.ul_user),
            tagged_cell: self.tagged_cell,
        }
    }
}

fn nearest_to(points: &[Point], target: Point) -> usize {
    points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.distance(target).total_cmp(&b.1.distance(target)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Homogeneous PPP on the square `[-L/2, L/2]^2`, deterministic in `seed`.
pub fn sample_ppp(lambda: f64, window_len: f64, seed: u64) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_ppp_with(lambda, window_len, &mut rng)
}

pub fn sample_ppp_with<R: Rng + ?Sized>(
    lambda: f64,
    window_len: f64,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::param("lambda", format!("{lambda} must be positive")));
    }
    if !(window_len.is_finite() && window_len > 0.0) {
        return Err(Error::param(
            "window_len",
            format!("{window_len} must be positive"),
        ));
    }
    let mean = lambda * window_len * window_len;
    let count = Poisson::new(mean)
        .map_err(|e| Error::param("lambda", e.to_string()))?
        .sample(rng) as usize;
    let half = window_len / 2.0;
    Ok((0..count)
        .map(|_| {
            Point::new(
                rng.random_range(-half..half),
                rng.random_range(-half..half),
            )
        })
        .collect())
}

/// `n` points uniform on the disk of radius `r_c` about `center`.
pub fn sample_users_in_disk(center: Point, r_c: f64, n: usize, seed: u64) -> Result<Vec<Point>> {
    if !(r_c.is_finite() && r_c > 0.0) {
        return Err(Error::param("r_c", format!("{r_c} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| uniform_in_disk(center, r_c, &mut rng)).collect())
}

/// Inverse-CDF radius `r_c * sqrt(u)` and a uniform angle; exactly two draws.
pub fn uniform_in_disk<R: Rng + ?Sized>(center: Point, r_c: f64, rng: &mut R) -> Point {
    let r = r_c * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    let (s, c) = theta.sin_cos();
    Point::new(center.x + r * c, center.y + r * s)
}

/// Density of the user-to-BS distance, `2r / r_c^2` on `[0, r_c]`.
pub fn serving_distance_pdf(r: f64, r_c: f64) -> f64 {
    if (0.0..=r_c).contains(&r) {
        2.0 * r / (r_c * r_c)
    } else {
        0.0
    }
}

/// Distance between two users at `r_d` and `r_u` from the same BS separated by
/// angle `gamma`.
pub fn pair_distance(r_d: f64, r_u: f64, gamma: f64) -> f64 {
    pair_distance_sq(r_d, r_u, gamma).sqrt()
}

/// Squared law-of-cosines distance in the cancellation-free form
/// `(r_d - r_u)^2 + 4 r_d r_u sin^2(gamma / 2)`.
pub fn pair_distance_sq(r_d: f64, r_u: f64, gamma: f64) -> f64 {
    let s = (0.5 * gamma).sin();
    (r_d - r_u).powi(2) + 4.0 * r_d * r_u * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::quad::{integrate_plain, QuadratureSpec};

    #[test]
    fn ppp_is_deterministic_and_validated() {
        let a = sample_ppp(1.9894e-6, 10_000.0, 7).unwrap();
        let b = sample_ppp(1.9894e-6, 10_000.0, 7).unwrap();
        assert_eq!(a, b);
        assert!(sample_ppp(1e-6, 0.0, 1).is_err());
        assert!(sample_ppp(0.0, 100.0, 1).is_err());
        assert!(sample_ppp(-1.0, 100.0, 1).is_err());
        for p in &a {
            assert!(p.x.abs() <= 5_000.0 && p.y.abs() <= 5_000.0);
        }
    }

    #[test]
    fn ppp_count_statistics() {
        let lambda = 1.9894e-6;
        let n = 10_000u64;
        let counts: Vec<f64> = (0..n)
            .map(|s| sample_ppp(lambda, 10_000.0, s).unwrap().len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 198.94).abs() < 2.0, "mean {mean}");
        assert!((var / mean - 1.0).abs() < 0.05, "var {var} mean {mean}");
    }

    #[test]
    fn disk_radius_matches_quadratic_cdf() {
        let r_c = 150.0;
        let mut radii: Vec<f64> = sample_users_in_disk(Point::new(3.0, -4.0), r_c, 100_000, 11)
            .unwrap()
            .into_iter()
            .map(|p| p.distance(Point::new(3.0, -4.0)))
            .collect();
        assert!(radii.iter().all(|&r| r <= r_c));
        radii.sort_by(f64::total_cmp);
        let n = radii.len() as f64;
        let ks = radii
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let cdf = (r / r_c).powi(2);
                (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS statistic {ks}");
        assert!(sample_users_in_disk(Point::ORIGIN, r_c, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn serving_pdf_values_and_normalisation() {
        assert_eq!(serving_distance_pdf(200.0, 200.0), 2.0 / 200.0);
        assert_eq!(serving_distance_pdf(0.0, 200.0), 0.0);
        assert_eq!(serving_distance_pdf(201.0, 200.0), 0.0);
        let total = integrate_plain(
            |r| serving_distance_pdf(r, 200.0),
            0.0,
            200.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pair_distance_cases() {
        assert_eq!(pair_distance(7.0, 7.0, 0.0), 0.0);
        assert!((pair_distance(3.0, 5.0, PI) - 8.0).abs() < 1e-12);
        assert!((pair_distance(3.0, 4.0, PI / 2.0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_clusters_stay_within_radius() {
        let params = ScenarioParams::from_inter_bs_distance(400.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let real = NetworkRealization::sample(&params, &mut rng).unwrap();
        for i in 0..real.len() {
            let bs = real.bs_positions()[i];
            assert!(bs.distance(real.dl_users()[i]) <= params.r_c());
            assert!(bs.distance(real.ul_users()[i]) <= params.r_c());
        }
        let tagged = real.tagged_bs().norm();
        assert!(real.bs_positions().iter().all(|p| p.norm() >= tagged));
    }

    #[test]
    fn rotation_preserves_distances() {
        let params = ScenarioParams::from_inter_bs_distance(400.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let real = NetworkRealization::sample(&params, &mut rng).unwrap();
        let rot = real.rotated(1.234);
        assert_ne!(real.bs_positions()[0], rot.bs_positions()[0]);
        for i in real.other_cells().take(50) {
            let a = real.tagged_dl_user().distance(real.bs_positions()[i]);
            let b = rot.tagged_dl_user().distance(rot.bs_positions()[i]);
            assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn manual_realization_is_checked() {
        let bs = vec![Point::ORIGIN];
        assert!(NetworkRealization::new(bs.clone(), vec![Point::new(1.0, 0.0)], vec![Point::new(0.0, 1.0)], 0, 2.0).is_ok());
        assert!(NetworkRealization::new(bs.clone(), vec![Point::new(3.0, 0.0)], vec![Point::ORIGIN], 0, 2.0).is_err());
        assert!(NetworkRealization::new(bs, vec![Point::ORIGIN], vec![Point::ORIGIN], 1, 2.0).is_err());
    }
}
