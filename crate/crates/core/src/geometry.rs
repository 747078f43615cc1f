//! Sparse linear array geometries and their difference / sum coarrays.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::{CVector, Error, Result, C64};

/// Default inter-element spacing in wavelengths.
pub const HALF_WAVELENGTH: f64 = 0.5;

/// A linear array whose sensors sit on an integer grid of unit spacing `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseArrayGeometry {
    positions: Vec<u32>,
    spacing: f64,
}

impl SparseArrayGeometry {
    /// Builds a geometry with half-wavelength unit spacing.
    pub fn new(positions: Vec<u32>) -> Result<Self> {
        Self::with_spacing(positions, HALF_WAVELENGTH)
    }

    /// `spacing` is `d / lambda`.
    pub fn with_spacing(positions: Vec<u32>, spacing: f64) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidGeometry(format!(
                "need at least 2 sensors, got {}",
                positions.len()
            )));
        }
        if let Some(w) = positions.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGeometry(format!(
                "positions must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "unit spacing over wavelength must be positive, got {spacing}"
            )));
        }
        Ok(Self { positions, spacing })
    }

    /// Parses a comma-separated position list such as `1,2,3,4,8,12`.
    pub fn parse_positions(list: &str) -> Result<Vec<u32>> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|_| Error::InvalidGeometry(format!("bad sensor position `{s}`")))
            })
            .collect()
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    /// `d / lambda`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn num_sensors(&self) -> usize {
        self.positions.len()
    }

    /// Phase slope `2 pi (d/lambda) sin(theta)`, i.e. the phase advance per
    /// unit of lag for a plane wave from `theta_deg`.
    pub(crate) fn phase_per_lag(&self, theta_deg: f64) -> f64 {
        2.0 * PI * self.spacing * theta_deg.to_radians().sin()
    }
}

/// Two-level nested array: inner ULA `{1..n1}`, outer `{(n1+1) m : m = 1..n2}`.
pub fn nested_array(n1: u32, n2: u32) -> Result<SparseArrayGeometry> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidGeometry(format!(
            "nested array needs n1, n2 >= 1 (got {n1}, {n2})"
        )));
    }
    let mut positions: Vec<u32> = (1..=n1).collect();
    positions.extend((1..=n2).map(|m| (n1 + 1) * m));
    positions.dedup();
    SparseArrayGeometry::new(positions)
}

/// Returns an error unless `theta_deg` lies in the open interval (-90, 90).
pub fn check_angle(theta_deg: f64) -> Result<()> {
    if theta_deg.is_finite() && theta_deg > -90.0 && theta_deg < 90.0 {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(theta_deg))
    }
}

/// `a(theta)[i] = exp(-j 2 pi p_i (d/lambda) sin theta)`.
pub fn steering_vector(geom: &SparseArrayGeometry, theta_deg: f64) -> Result<CVector> {
    check_angle(theta_deg)?;
    let w = geom.phase_per_lag(theta_deg);
    Ok(CVector::from_iterator(
        geom.num_sensors(),
        geom.positions.iter().map(|&p| C64::from_polar(1.0, -w * f64::from(p))),
    ))
}

/// Difference and sum coarrays of a geometry together with the consecutive
/// segments used to build the lag vectors.
///
/// Pair lists hold sensor *indices*. Difference pairs are ordered `(i, j)` with
/// `p_i - p_j = lag` (all `M^2` of them); sum pairs are unordered `(u, v)`,
/// `u <= v`, with `p_u + p_v = lag` (all `M(M+1)/2` of them).
#[derive(Debug, Clone, PartialEq)]
pub struct CoarrayProfile {
    geometry: SparseArrayGeometry,
    diff_lags: BTreeMap<i64, Vec<(usize, usize)>>,
    sum_lags: BTreeMap<i64, Vec<(usize, usize)>>,
    l1: usize,
    l2: usize,
    delta_p: i64,
    diff_run: usize,
    sum_run: usize,
}

impl CoarrayProfile {
    pub fn geometry(&self) -> &SparseArrayGeometry {
        &self.geometry
    }

    pub fn diff_lags(&self) -> &BTreeMap<i64, Vec<(usize, usize)>> {
        &self.diff_lags
    }

    pub fn sum_lags(&self) -> &BTreeMap<i64, Vec<(usize, usize)>> {
        &self.sum_lags
    }

    /// Length of the (possibly truncated) zero-centred consecutive difference segment.
    pub fn l1(&self) -> usize {
        self.l1
    }

    /// Length of the (possibly truncated) consecutive sum segment.
    pub fn l2(&self) -> usize {
        self.l2
    }

    /// First lag of the sum segment.
    pub fn delta_p(&self) -> i64 {
        self.delta_p
    }

    /// Largest difference lag kept, `(L1 - 1) / 2`.
    pub fn max_diff_lag(&self) -> i64 {
        ((self.l1 - 1) / 2) as i64
    }

    /// Top block size `c = (L1 + 1) / 2` of the extended covariance.
    pub fn top_block(&self) -> usize {
        self.l1.div_ceil(2)
    }

    /// Bottom block size `e = L2 + 1 - c`.
    pub fn bottom_block(&self) -> usize {
        self.l2 + 1 - self.top_block()
    }

    /// Side length of the extended covariance, `L2 + 1`.
    pub fn extended_dim(&self) -> usize {
        self.l2 + 1
    }

    /// Length of the maximal zero-centred difference run before truncation.
    pub fn raw_diff_run(&self) -> usize {
        self.diff_run
    }

    /// Length of the maximal sum run before truncation.
    pub fn raw_sum_run(&self) -> usize {
        self.sum_run
    }

    /// Difference lags of the kept segment, ascending.
    pub fn diff_segment(&self) -> impl Iterator<Item = i64> {
        let h = self.max_diff_lag();
        -h..=h
    }

    /// Overrides the segment parameters, bypassing the truncation rules.
    #[cfg(test)]
    pub(crate) fn with_segments(geom: &SparseArrayGeometry, l1: usize, l2: usize, delta_p: i64) -> Self {
        let mut prof = coarray_profile(geom).expect("valid geometry");
        prof.l1 = l1;
        prof.l2 = l2;
        prof.delta_p = delta_p;
        prof
    }

    /// Sum lags of the kept segment, ascending.
    pub fn sum_segment(&self) -> impl Iterator<Item = i64> {
        self.delta_p..self.delta_p + self.l2 as i64
    }
}

/// Enumerates both coarrays and selects the consecutive segments.
///
/// The sum segment is the longest run of consecutive sum lags; ties go to the
/// smallest start. Two truncations keep the extended covariance well formed:
/// `L1` is cut symmetrically to `2 L2 - 1` when it exceeds that, and `L2` is
/// cut to `L1` (keeping its start) when it exceeds `L1`.
pub fn coarray_profile(geom: &SparseArrayGeometry) -> Result<CoarrayProfile> {
    let p = geom.positions();
    let m = p.len();

    let mut diff_lags: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    let mut sum_lags: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..m {
        for j in 0..m {
            let lag = i64::from(p[i]) - i64::from(p[j]);
            diff_lags.entry(lag).or_default().push((i, j));
            if i <= j {
                let lag = i64::from(p[i]) + i64::from(p[j]);
                sum_lags.entry(lag).or_default().push((i, j));
            }
        }
    }

    let mut half = 0i64;
    while diff_lags.contains_key(&(half + 1)) {
        half += 1;
    }
    let diff_run = (2 * half + 1) as usize;

    // longest consecutive run of sum lags, first one wins on ties
    let (mut best_start, mut best_len) = (0i64, 0usize);
    let mut run: Option<(i64, usize)> = None;
    let mut prev: Option<i64> = None;
    for &lag in sum_lags.keys() {
        run = match (run, prev) {
            (Some((s, n)), Some(q)) if lag == q + 1 => Some((s, n + 1)),
            _ => Some((lag, 1)),
        };
        if let Some((s, n)) = run {
            if n > best_len {
                best_start = s;
                best_len = n;
            }
        }
        prev = Some(lag);
    }
    let sum_run = best_len;

    if diff_run < 1 || sum_run < 1 {
        return Err(Error::DegenerateProfile { l1: diff_run, l2: sum_run });
    }

    let (mut l1, mut l2) = (diff_run, sum_run);
    if l1 > 2 * l2 - 1 {
        l1 = 2 * l2 - 1;
    } else if l2 > l1 {
        l2 = l1;
    }

    Ok(CoarrayProfile {
        geometry: geom.clone(),
        diff_lags,
        sum_lags,
        l1,
        l2,
        delta_p: best_start,
        diff_run,
        sum_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn geom(p: &[u32]) -> SparseArrayGeometry {
        SparseArrayGeometry::new(p.to_vec()).unwrap()
    }

    #[test]
    fn nested_construction() {
        assert_eq!(nested_array(3, 3).unwrap().positions(), &[1, 2, 3, 4, 8, 12]);
        assert_eq!(nested_array(1, 1).unwrap().positions(), &[1, 2]);
        assert_eq!(nested_array(2, 2).unwrap().positions(), &[1, 2, 3, 6]);
        assert!(nested_array(0, 3).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(SparseArrayGeometry::new(vec![3]).is_err());
        assert!(SparseArrayGeometry::new(vec![1, 1, 2]).is_err());
        assert!(SparseArrayGeometry::new(vec![2, 1]).is_err());
        assert!(SparseArrayGeometry::with_spacing(vec![0, 1], 0.0).is_err());
        assert_eq!(
            SparseArrayGeometry::parse_positions("1, 2,3,4,8,12").unwrap(),
            vec![1, 2, 3, 4, 8, 12]
        );
        assert!(SparseArrayGeometry::parse_positions("1,x").is_err());
    }

    #[test]
    fn profile_of_nested_3_3() {
        let prof = coarray_profile(&nested_array(3, 3).unwrap()).unwrap();
        assert_eq!((prof.l1(), prof.l2(), prof.delta_p()), (23, 15, 2));
        assert_eq!((prof.top_block(), prof.bottom_block()), (12, 4));
    }

    #[test]
    fn profile_of_ula_and_pair() {
        let prof = coarray_profile(&geom(&[1, 2, 3, 4])).unwrap();
        assert_eq!((prof.l1(), prof.l2(), prof.delta_p()), (7, 7, 2));
        let prof = coarray_profile(&geom(&[0, 1])).unwrap();
        assert_eq!((prof.l1(), prof.l2(), prof.delta_p()), (3, 3, 0));
    }

    #[test]
    fn pair_counts() {
        let prof = coarray_profile(&nested_array(3, 3).unwrap()).unwrap();
        let diff: usize = prof.diff_lags().values().map(Vec::len).sum();
        let sum: usize = prof.sum_lags().values().map(Vec::len).sum();
        assert_eq!(diff, 36);
        assert_eq!(sum, 21);
    }

    #[test]
    fn sum_tie_takes_smallest_start() {
        // sums {0,1,2} ∪ {8,9,10} ∪ ... ; positions 0,1,4,5 give sums 0,1,2,4,5,6,8,9,10
        let prof = coarray_profile(&geom(&[0, 1, 4, 5])).unwrap();
        assert_eq!(prof.raw_sum_run(), 3);
        assert_eq!(prof.delta_p(), 0);
    }

    #[test]
    fn truncation_keeps_blocks_valid() {
        // diffs of {0,1,3} are -3..3 (L1 = 7); sums 0,1,2,3,4,6 give a run of 5
        let prof = coarray_profile(&geom(&[0, 1, 3])).unwrap();
        assert_eq!(prof.raw_diff_run(), 7);
        assert_eq!(prof.l2(), 5);
        assert_eq!(prof.l1(), 7);
        // a sparse pair: diff lags -5..5 are not consecutive, sums {0, 5, 10}
        let prof = coarray_profile(&geom(&[0, 5])).unwrap();
        assert_eq!((prof.l1(), prof.l2()), (1, 1));
        assert_eq!(prof.bottom_block(), 1);
    }

    #[test]
    fn steering_examples() {
        let g = nested_array(3, 3).unwrap();
        let a = steering_vector(&g, 0.0).unwrap();
        assert!(a.iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-15));

        let a = steering_vector(&geom(&[0, 1]), 30.0).unwrap();
        assert!((a[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((a[1] - C64::new(0.0, -1.0)).norm() < 1e-12);

        assert!(matches!(steering_vector(&g, 90.0), Err(Error::AngleOutOfRange(_))));
        assert!(steering_vector(&g, -90.0).is_err());
        assert!(steering_vector(&g, f64::NAN).is_err());
    }

    fn positions_strategy() -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::btree_set(0u32..40, 2..9).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn coarrays_match_brute_force(p in positions_strategy()) {
            let g = geom(&p);
            let prof = coarray_profile(&g).unwrap();
            let mut diffs = BTreeSet::new();
            let mut sums = BTreeSet::new();
            for &a in &p {
                for &b in &p {
                    diffs.insert(i64::from(a) - i64::from(b));
                    sums.insert(i64::from(a) + i64::from(b));
                }
            }
            let got_d: BTreeSet<i64> = prof.diff_lags().keys().copied().collect();
            let got_s: BTreeSet<i64> = prof.sum_lags().keys().copied().collect();
            prop_assert_eq!(&got_d, &diffs);
            prop_assert_eq!(&got_s, &sums);

            let mut run = 1;
            while diffs.contains(&run) { run += 1; }
            prop_assert_eq!(prof.raw_diff_run() as i64, 2 * run - 1);

            prop_assert!(prof.l1() % 2 == 1);
            prop_assert!(prof.l1() < 2 * prof.l2());
            prop_assert!(prof.bottom_block() >= 1);
            prop_assert!(prof.bottom_block() <= prof.top_block());
            for l in prof.sum_segment() {
                prop_assert!(sums.contains(&l));
            }
        }

        #[test]
        fn difference_pairs_are_mirrored(p in positions_strategy()) {
            let prof = coarray_profile(&geom(&p)).unwrap();
            for (&lag, pairs) in prof.diff_lags() {
                let mut mirrored: Vec<_> = prof.diff_lags()[&-lag].iter().map(|&(i, j)| (j, i)).collect();
                mirrored.sort_unstable();
                let mut own = pairs.clone();
                own.sort_unstable();
                prop_assert_eq!(own, mirrored);
            }
        }

        #[test]
        fn steering_is_unit_modulus_and_odd(p in positions_strategy(), theta in -89.9f64..89.9) {
            let g = geom(&p);
            let a = steering_vector(&g, theta).unwrap();
            let b = steering_vector(&g, -theta).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                prop_assert!((x.norm() - 1.0).abs() < 1e-12);
                prop_assert!((x.conj() - y).norm() < 1e-12);
            }
        }
    }
}
