//! Empirical semivariogram estimation and parametric model fitting.
//!
//! The estimator is the classical Matheron one: for every lag bin,
//! `gamma = sum((v_i - v_j)^2) / (2 * n_pairs)` over the unordered pairs whose
//! Euclidean separation falls in the bin. Bin `j` covers
//! `[(j - 0.5) * bin_width, (j + 0.5) * bin_width)`, so with unit width the
//! bins are centred on integer pixel distances.
//!
//! Fitted models follow the exact-interpolator convention: `gamma(0) == 0`
//! even when the nugget is positive.

use crate::error::{Error, Result};
use crate::raster::PixelSample;

/// Sill used when the field is constant and every bin is zero.
pub const SILL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramBin {
    /// Mean separation of the pairs that fell in this bin.
    pub lag: f64,
    /// Semivariance (half the mean squared difference).
    pub gamma: f64,
    pub pair_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVariogram {
    pub bins: Vec<VariogramBin>,
    pub max_lag: f64,
    pub bin_width: f64,
}

/// Bin index of a separation `h`.
pub(crate) fn bin_index(h: f64, bin_width: f64) -> usize {
    (h / bin_width + 0.5).floor() as usize
}

/// Estimates the semivariogram of `samples` up to `max_lag`.
///
/// Empty bins are dropped, so the result has strictly increasing lags and a
/// pair count of at least one in every bin.
pub fn empirical_variogram(samples: &[PixelSample], max_lag: f64, bin_width: f64) -> Result<EmpiricalVariogram> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if !(max_lag > 0.0) || !(bin_width > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "max_lag ({max_lag}) and bin_width ({bin_width}) must be positive"
        )));
    }
    let nbins = bin_index(max_lag, bin_width) + 1;
    let mut sq_sum = vec![0.0f64; nbins];
    let mut lag_sum = vec![0.0f64; nbins];
    let mut counts = vec![0usize; nbins];

    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i + 1..] {
            let h = a.distance_to(b.row, b.col);
            if h > max_lag {
                continue;
            }
            let j = bin_index(h, bin_width);
            let d = a.value - b.value;
            sq_sum[j] += d * d;
            lag_sum[j] += h;
            counts[j] += 1;
        }
    }

    let bins: Vec<VariogramBin> = (0..nbins)
        .filter(|&j| counts[j] > 0)
        .map(|j| VariogramBin {
            lag: lag_sum[j] / counts[j] as f64,
            gamma: sq_sum[j] / (2.0 * counts[j] as f64),
            pair_count: counts[j],
        })
        .collect();
    if bins.is_empty() {
        return Err(Error::NoPairs(max_lag));
    }
    Ok(EmpiricalVariogram { bins, max_lag, bin_width })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    Spherical,
    Exponential,
    Linear,
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelFamily::Spherical => "spherical",
            ModelFamily::Exponential => "exponential",
            ModelFamily::Linear => "linear",
        })
    }
}

/// Parametric semivariogram.
///
/// For the linear family `(sill - nugget) / range` is the slope and the model
/// keeps growing past `range`. The exponential family uses the practical
/// range, reaching 95% of the partial sill at `h == range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramModel {
    pub family: ModelFamily,
    pub nugget: f64,
    pub sill: f64,
    pub range: f64,
}

impl VariogramModel {
    pub fn new(family: ModelFamily, nugget: f64, sill: f64, range: f64) -> Result<Self> {
        if !(nugget >= 0.0) || !(sill >= nugget) || !(range > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= nugget <= sill and range > 0 (got nugget {nugget}, sill {sill}, range {range})"
            )));
        }
        Ok(Self { family, nugget, sill, range })
    }

    pub fn spherical(nugget: f64, sill: f64, range: f64) -> Result<Self> {
        Self::new(ModelFamily::Spherical, nugget, sill, range)
    }

    /// Flat model used for constant fields.
    pub fn constant_field(max_lag: f64) -> Self {
        Self { family: ModelFamily::Spherical, nugget: 0.0, sill: SILL_FLOOR, range: max_lag.max(1.0) }
    }

    /// Checked evaluation; rejects negative or NaN distances.
    pub fn gamma(&self, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative lag {h}")));
        }
        Ok(self.eval(h))
    }

    /// Evaluates the model at `h >= 0`.
    #[inline]
    pub fn eval(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let partial = self.sill - self.nugget;
        let x = h / self.range;
        self.nugget
            + partial
                * match self.family {
                    ModelFamily::Spherical => spherical_shape(x),
                    ModelFamily::Exponential => 1.0 - (-3.0 * x).exp(),
                    ModelFamily::Linear => x,
                }
    }
}

/// Normalised spherical structure, 0 at the origin and 1 from `x >= 1` on.
#[inline]
fn spherical_shape(x: f64) -> f64 {
    if x >= 1.0 {
        1.0
    } else {
        1.5 * x - 0.5 * x * x * x
    }
}

/// Free function form of [`VariogramModel::gamma`].
pub fn model_gamma(model: &VariogramModel, h: f64) -> Result<f64> {
    model.gamma(h)
}

const RANGE_GRID: usize = 256;

/// Fits a model to the empirical bins by pair-count-weighted least squares.
///
/// * every gamma zero: [`VariogramModel::constant_field`]
/// * fewer than 3 bins: linear through the origin
/// * otherwise: spherical, nugget and partial sill solved in closed form for
///   each candidate range, range found by a log grid plus golden-section refinement
pub fn fit_model(empirical: &EmpiricalVariogram) -> VariogramModel {
    let bins = &empirical.bins;
    if bins.iter().all(|b| b.gamma == 0.0) {
        return VariogramModel::constant_field(empirical.max_lag);
    }
    if bins.len() < 3 {
        return fit_linear(empirical);
    }

    let min_lag = bins.iter().map(|b| b.lag).fold(f64::INFINITY, f64::min);
    let max_lag = bins.iter().map(|b| b.lag).fold(0.0, f64::max);
    let lo = (0.5 * min_lag).ln();
    let hi = (2.0 * max_lag).ln();
    let range_at = |i: usize| (lo + (hi - lo) * i as f64 / (RANGE_GRID - 1) as f64).exp();

    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..RANGE_GRID {
        let sse = fit_spherical_at(bins, range_at(i)).2;
        if sse < best {
            best = sse;
            best_i = i;
        }
    }

    // golden-section search over the grid cells adjacent to the best node
    let mut a = range_at(best_i.saturating_sub(1));
    let mut b = range_at((best_i + 1).min(RANGE_GRID - 1));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = fit_spherical_at(bins, x1).2;
    let mut f2 = fit_spherical_at(bins, x2).2;
    for _ in 0..100 {
        if (b - a) <= 1e-12 * b {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = fit_spherical_at(bins, x1).2;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = fit_spherical_at(bins, x2).2;
        }
    }
    let mut range = 0.5 * (a + b);
    let (mut nugget, mut partial, sse) = fit_spherical_at(bins, range);
    if best < sse {
        range = range_at(best_i);
        (nugget, partial, _) = fit_spherical_at(bins, range);
    }
    VariogramModel { family: ModelFamily::Spherical, nugget, sill: (nugget + partial).max(SILL_FLOOR), range }
}

fn fit_linear(empirical: &EmpiricalVariogram) -> VariogramModel {
    let (num, den) = empirical.bins.iter().fold((0.0, 0.0), |(n, d), b| {
        let w = b.pair_count as f64;
        (n + w * b.gamma * b.lag, d + w * b.lag * b.lag)
    });
    let slope = num / den;
    let range = empirical.max_lag;
    VariogramModel { family: ModelFamily::Linear, nugget: 0.0, sill: (slope * range).max(SILL_FLOOR), range }
}

/// Weighted least squares for `gamma = nugget + partial * shape(lag / range)`
/// with both coefficients constrained non-negative. Returns `(nugget, partial, sse)`.
fn fit_spherical_at(bins: &[VariogramBin], range: f64) -> (f64, f64, f64) {
    let (mut s, mut sf, mut sff, mut sg, mut sfg) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for b in bins {
        let w = b.pair_count as f64;
        let f = spherical_shape(b.lag / range);
        s += w;
        sf += w * f;
        sff += w * f * f;
        sg += w * b.gamma;
        sfg += w * f * b.gamma;
    }
    let sse = |n: f64, p: f64| -> f64 {
        bins.iter()
            .map(|b| {
                let r = b.gamma - n - p * spherical_shape(b.lag / range);
                b.pair_count as f64 * r * r
            })
            .sum()
    };

    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(3);
    let det = s * sff - sf * sf;
    if det > 1e-12 * s * sff {
        let n = (sff * sg - sf * sfg) / det;
        let p = (s * sfg - sf * sg) / det;
        if n >= 0.0 && p >= 0.0 {
            candidates.push((n, p));
        }
    }
    if sff > 0.0 {
        candidates.push((0.0, (sfg / sff).max(0.0)));
    }
    candidates.push(((sg / s).max(0.0), 0.0));

    candidates
        .into_iter()
        .map(|(n, p)| (n, p, sse(n, p)))
        .fold((0.0, 0.0, f64::INFINITY), |best, c| if c.2 < best.2 { c } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent estimator: for each bin, scan every pair and keep those whose
    /// separation lies in the bin's half-open interval.
    fn brute_force(samples: &[PixelSample], max_lag: f64, bw: f64) -> Vec<VariogramBin> {
        let mut out = Vec::new();
        let mut j = 0usize;
        while (j as f64 - 0.5) * bw <= max_lag {
            let (lo, hi) = ((j as f64 - 0.5) * bw, (j as f64 + 0.5) * bw);
            let (mut sq, mut lag, mut n) = (0.0, 0.0, 0usize);
            for i in 0..samples.len() {
                for k in i + 1..samples.len() {
                    let (a, b) = (samples[i], samples[k]);
                    let dr = a.row as f64 - b.row as f64;
                    let dc = a.col as f64 - b.col as f64;
                    let h = (dr * dr + dc * dc).sqrt();
                    if h >= lo && h < hi && h <= max_lag {
                        sq += (a.value - b.value).powi(2);
                        lag += h;
                        n += 1;
                    }
                }
            }
            if n > 0 {
                out.push(VariogramBin { lag: lag / n as f64, gamma: sq / (2.0 * n as f64), pair_count: n });
            }
            j += 1;
        }
        out
    }

    fn line(values: &[f64]) -> Vec<PixelSample> {
        values.iter().enumerate().map(|(i, &v)| PixelSample::new(0, i, v)).collect()
    }

    fn bins_from(model: &VariogramModel, lags: impl Iterator<Item = f64>) -> EmpiricalVariogram {
        let bins: Vec<_> = lags.map(|h| VariogramBin { lag: h, gamma: model.eval(h), pair_count: 10 }).collect();
        let max_lag = bins.last().unwrap().lag;
        EmpiricalVariogram { bins, max_lag, bin_width: 1.0 }
    }

    #[test]
    fn constant_field_has_zero_gamma() {
        let s: Vec<_> = (0..25).map(|i| PixelSample::new(i / 5, i % 5, 42.0)).collect();
        let v = empirical_variogram(&s, 8.0, 1.0).unwrap();
        assert!(v.bins.iter().all(|b| b.gamma == 0.0));
    }

    #[test]
    fn hand_enumerated_line() {
        let v = empirical_variogram(&line(&[0.0, 2.0, 4.0]), 1.0, 1.0).unwrap();
        assert_eq!(v.bins.len(), 1);
        assert_eq!(v.bins[0].pair_count, 2);
        assert_eq!(v.bins[0].gamma, 2.0);
        assert_eq!(v.bins[0].lag, 1.0);
    }

    #[test]
    fn lena_patch_first_bin_matches_oracle() {
        let img = crate::samples::lena_patch();
        let mask = crate::samples::lena_patch_scratch();
        let mut samples = Vec::new();
        for r in 0..8 {
            for c in 0..9 {
                if !mask.is_damaged(r, c) {
                    samples.push(PixelSample::new(r, c, img.get(0, r, c) as f64));
                }
            }
        }
        assert_eq!(samples.len(), 57);
        let diag = (7f64 * 7.0 + 8.0 * 8.0).sqrt();
        let v = empirical_variogram(&samples, diag, 1.0).unwrap();
        let oracle = brute_force(&samples, diag, 1.0);
        assert_eq!(v.bins, oracle);
        // [0.5, 1.5) holds both the unit and the diagonal neighbours
        assert!(v.bins[0].lag > 1.0 && v.bins[0].lag < 1.5);
    }

    #[test]
    fn input_errors() {
        assert_eq!(empirical_variogram(&line(&[1.0]), 3.0, 1.0), Err(Error::TooFewSamples(1)));
        let far = [PixelSample::new(0, 0, 1.0), PixelSample::new(0, 10, 2.0)];
        assert_eq!(empirical_variogram(&far, 3.0, 1.0), Err(Error::NoPairs(3.0)));
        assert!(empirical_variogram(&line(&[1.0, 2.0]), 0.0, 1.0).is_err());
        assert!(empirical_variogram(&line(&[1.0, 2.0]), 2.0, -1.0).is_err());
    }

    #[test]
    fn model_values() {
        let m = VariogramModel::spherical(0.0, 10.0, 4.0).unwrap();
        assert_eq!(m.gamma(0.0).unwrap(), 0.0);
        assert_eq!(m.gamma(4.0).unwrap(), 10.0);
        assert_eq!(m.gamma(7.5).unwrap(), 10.0);
        assert!((m.gamma(2.0).unwrap() - 6.875).abs() < 1e-12);
        assert!(m.gamma(-0.1).is_err());

        let nug = VariogramModel::spherical(2.0, 10.0, 4.0).unwrap();
        assert_eq!(nug.eval(0.0), 0.0);
        assert!(nug.eval(1e-9) >= 2.0);

        let exp = VariogramModel::new(ModelFamily::Exponential, 0.0, 1.0, 3.0).unwrap();
        assert!((exp.eval(3.0) - (1.0 - (-3.0f64).exp())).abs() < 1e-15);
        let lin = VariogramModel::new(ModelFamily::Linear, 0.0, 6.0, 2.0).unwrap();
        assert_eq!(lin.eval(5.0), 15.0);

        assert!(VariogramModel::spherical(3.0, 2.0, 1.0).is_err());
        assert!(VariogramModel::spherical(0.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn all_zero_bins_fall_back_to_floor() {
        let v = EmpiricalVariogram {
            bins: vec![
                VariogramBin { lag: 1.0, gamma: 0.0, pair_count: 4 },
                VariogramBin { lag: 2.0, gamma: 0.0, pair_count: 4 },
                VariogramBin { lag: 3.0, gamma: 0.0, pair_count: 4 },
            ],
            max_lag: 5.0,
            bin_width: 1.0,
        };
        let m = fit_model(&v);
        assert_eq!(m, VariogramModel { family: ModelFamily::Spherical, nugget: 0.0, sill: SILL_FLOOR, range: 5.0 });
    }

    #[test]
    fn single_bin_is_linear() {
        let v = EmpiricalVariogram {
            bins: vec![VariogramBin { lag: 1.0, gamma: 3.0, pair_count: 7 }],
            max_lag: 4.0,
            bin_width: 1.0,
        };
        let m = fit_model(&v);
        assert_eq!(m.family, ModelFamily::Linear);
        assert_eq!(m.nugget, 0.0);
        assert!((m.eval(1.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn recovers_synthesized_spherical() {
        let truth = VariogramModel::spherical(1.0, 10.0, 4.0).unwrap();
        let m = fit_model(&bins_from(&truth, (1..=6).map(|h| h as f64)));
        assert_eq!(m.family, ModelFamily::Spherical);
        assert!((m.nugget - 1.0).abs() / 1.0 < 0.01, "{m:?}");
        assert!((m.sill - 10.0).abs() / 10.0 < 0.01, "{m:?}");
        assert!((m.range - 4.0).abs() / 4.0 < 0.01, "{m:?}");
    }

    fn arb_samples() -> impl Strategy<Value = Vec<PixelSample>> {
        proptest::collection::hash_set((0usize..24, 0usize..24), 2..120).prop_flat_map(|pos| {
            let pos: Vec<_> = pos.into_iter().collect();
            let n = pos.len();
            (Just(pos), proptest::collection::vec(0.0f64..255.0, n))
                .prop_map(|(pos, vals)| pos.into_iter().zip(vals).map(|((r, c), v)| PixelSample::new(r, c, v)).collect())
        })
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(samples in arb_samples(), max_lag in 1.0f64..20.0, bw in prop_oneof![Just(1.0), 0.5f64..3.0]) {
            match empirical_variogram(&samples, max_lag, bw) {
                Ok(v) => {
                    let oracle = brute_force(&samples, max_lag, bw);
                    prop_assert_eq!(v.bins.len(), oracle.len());
                    for (a, b) in v.bins.iter().zip(&oracle) {
                        prop_assert_eq!(a.pair_count, b.pair_count);
                        prop_assert!((a.gamma - b.gamma).abs() <= 1e-12 * b.gamma.max(1.0));
                        prop_assert!((a.lag - b.lag).abs() <= 1e-12 * b.lag.max(1.0));
                    }
                    prop_assert!(v.bins.windows(2).all(|w| w[0].lag < w[1].lag));
                }
                Err(e) => {
                    prop_assert_eq!(e, Error::NoPairs(max_lag));
                    prop_assert!(brute_force(&samples, max_lag, bw).is_empty());
                }
            }
        }

        #[test]
        fn shift_and_scale_laws(samples in arb_samples(), shift in -100.0f64..100.0, scale in 0.1f64..4.0) {
            let Ok(base) = empirical_variogram(&samples, 12.0, 1.0) else { return Ok(()) };
            let shifted: Vec<_> = samples.iter().map(|s| PixelSample { value: s.value + shift, ..*s }).collect();
            let scaled: Vec<_> = samples.iter().map(|s| PixelSample { value: s.value * scale, ..*s }).collect();
            let vs = empirical_variogram(&shifted, 12.0, 1.0).unwrap();
            let vc = empirical_variogram(&scaled, 12.0, 1.0).unwrap();
            for ((b, s), c) in base.bins.iter().zip(&vs.bins).zip(&vc.bins) {
                prop_assert!((b.gamma - s.gamma).abs() <= 1e-9 * b.gamma.max(1.0));
                prop_assert!((b.gamma * scale * scale - c.gamma).abs() <= 1e-9 * c.gamma.max(1.0));
            }
        }

        #[test]
        fn models_are_non_decreasing(
            family in prop_oneof![Just(ModelFamily::Spherical), Just(ModelFamily::Exponential), Just(ModelFamily::Linear)],
            nugget in 0.0f64..5.0, partial in 0.0f64..100.0, range in 0.5f64..20.0,
            h1 in 0.0f64..40.0, dh in 0.0f64..10.0,
        ) {
            let m = VariogramModel::new(family, nugget, nugget + partial, range).unwrap();
            prop_assert!(m.eval(h1) <= m.eval(h1 + dh));
            prop_assert_eq!(m.eval(0.0), 0.0);
            if family == ModelFamily::Spherical && h1 >= range {
                prop_assert_eq!(m.eval(h1), m.sill);
            }
        }

        #[test]
        fn fit_round_trip(nugget in 0.5f64..5.0, partial in 2.0f64..200.0, range in 2.0f64..6.5) {
            let truth = VariogramModel::spherical(nugget, nugget + partial, range).unwrap();
            let m = fit_model(&bins_from(&truth, (1..=8).map(|h| h as f64)));
            prop_assert!((m.nugget - nugget).abs() / nugget < 0.01, "{:?} vs {:?}", m, truth);
            prop_assert!((m.sill - truth.sill).abs() / truth.sill < 0.01, "{:?} vs {:?}", m, truth);
            prop_assert!((m.range - range).abs() / range < 0.01, "{:?} vs {:?}", m, truth);
        }
    }
}
