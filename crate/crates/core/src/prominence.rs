//! Peak prominence and the causal-strength readout.
//!
//! For every frequency band the CMC function over shifts is reduced to one
//! strength and one delay. Only shifts below an admissibility limit count as
//! causal (cause before or roughly simultaneous with effect). If the absolute
//! maximum is admissible its height is the strength; otherwise the most
//! prominent admissible peak is used, which suppresses shoulders of a larger
//! anti-causal ("Granger") peak.

use serde::Serialize;

use crate::scan::CmcSurface;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub index: usize,
    pub height: f64,
    pub prominence: f64,
}

/// All strict local maxima with their topographic prominence.
///
/// Flat-topped maxima are reported once, at the plateau midpoint (rounded
/// down). A peak with no strictly higher value on either side is a global
/// maximum and its prominence is its height above 0.
pub fn find_peaks(values: &[f64]) -> Vec<Peak> {
    let n = values.len();
    let mut peaks = Vec::new();
    if n < 3 {
        return peaks;
    }
    let mut i = 1;
    while i < n - 1 {
        if values[i - 1] < values[i] {
            let mut ahead = i + 1;
            while ahead < n - 1 && values[ahead] == values[i] {
                ahead += 1;
            }
            if values[ahead] < values[i] {
                let index = (i + ahead - 1) / 2;
                peaks.push(Peak {
                    index,
                    height: values[index],
                    prominence: prominence(values, index),
                });
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    peaks
}

fn prominence(values: &[f64], index: usize) -> f64 {
    let h = values[index];
    let (left_min, left_higher) = walk(values[..index].iter().rev(), h);
    let (right_min, right_higher) = walk(values[index + 1..].iter(), h);
    if !left_higher && !right_higher {
        return h;
    }
    h - left_min.max(right_min)
}

/// Lowest value passed before reaching something strictly higher than `h`,
/// and whether such a value was found.
fn walk<'a>(side: impl Iterator<Item = &'a f64>, h: f64) -> (f64, bool) {
    let mut lowest = h;
    for &v in side {
        if v > h {
            return (lowest, true);
        }
        lowest = lowest.min(v);
    }
    (lowest, false)
}

/// Strength and delay of the causal effect in one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausalStrength {
    pub strength: f64,
    /// Shift (samples) of the selected maximum; `None` when strength is 0.
    pub delay: Option<i64>,
}

impl CausalStrength {
    pub const NONE: Self = Self {
        strength: 0.0,
        delay: None,
    };
}

/// Admissibility limit for the causal readout: shifts `< limit` count.
///
/// Derived as `E * step`, i.e. the shift index must be below the embedding
/// dimension.
pub fn causal_limit(dimension: usize, step: usize) -> i64 {
    (dimension * step) as i64
}

fn closer_to_zero(a: i64, b: i64) -> bool {
    (a.unsigned_abs(), a) < (b.unsigned_abs(), b)
}

/// Reads out causal strength from a curve over `shifts`.
pub fn causal_strength(values: &[f64], shifts: &[i64], limit: i64) -> CausalStrength {
    assert_eq!(values.len(), shifts.len(), "values and shifts must align");
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(top > 0.0) {
        return CausalStrength::NONE;
    }
    let global = values
        .iter()
        .zip(shifts)
        .filter(|&(&v, &s)| v == top && s < limit)
        .map(|(_, &s)| s)
        .reduce(|a, b| if closer_to_zero(b, a) { b } else { a });
    if let Some(delay) = global {
        return CausalStrength {
            strength: top,
            delay: Some(delay),
        };
    }
    let best = find_peaks(values)
        .into_iter()
        .filter(|p| shifts[p.index] < limit && p.prominence > 0.0)
        .reduce(|a, b| {
            let (sa, sb) = (shifts[a.index], shifts[b.index]);
            if b.prominence > a.prominence || (b.prominence == a.prominence && closer_to_zero(sb, sa)) {
                b
            } else {
                a
            }
        });
    match best {
        Some(p) => CausalStrength {
            strength: p.prominence,
            delay: Some(shifts[p.index]),
        },
        None => CausalStrength::NONE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalStrengthProfile {
    pub frequencies: Vec<f64>,
    pub strength: Vec<f64>,
    pub delay: Vec<Option<i64>>,
    pub direction_label: String,
}

impl CausalStrengthProfile {
    pub fn mean_strength(&self) -> f64 {
        self.strength.iter().sum::<f64>() / self.strength.len() as f64
    }

    /// Mean strength over bands with `lo <= f <= hi`.
    pub fn mean_over(&self, lo: f64, hi: f64) -> Option<f64> {
        let sel: Vec<f64> = self
            .frequencies
            .iter()
            .zip(&self.strength)
            .filter(|(&f, _)| f >= lo && f <= hi)
            .map(|(_, &s)| s)
            .collect();
        (!sel.is_empty()).then(|| sel.iter().sum::<f64>() / sel.len() as f64)
    }

    /// Sum of strength × bin width over bands with `lo <= f <= hi`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let df = if self.frequencies.len() > 1 {
            self.frequencies[1] - self.frequencies[0]
        } else {
            1.0
        };
        self.frequencies
            .iter()
            .zip(&self.strength)
            .filter(|(&f, _)| f >= lo && f <= hi)
            .map(|(_, &s)| s * df)
            .sum()
    }

    /// Frequency of the strongest band.
    pub fn peak_frequency(&self) -> f64 {
        let i = (0..self.strength.len())
            .reduce(|a, b| if self.strength[b] > self.strength[a] { b } else { a })
            .unwrap_or(0);
        self.frequencies[i]
    }
}

/// Applies [`causal_strength`] to every frequency column of `surface`.
pub fn strength_profile(surface: &CmcSurface, limit: i64) -> CausalStrengthProfile {
    let mut strength = Vec::with_capacity(surface.frequencies.len());
    let mut delay = Vec::with_capacity(surface.frequencies.len());
    for f in 0..surface.frequencies.len() {
        let c = causal_strength(&surface.column(f), &surface.shifts, limit);
        strength.push(c.strength);
        delay.push(c.delay);
    }
    CausalStrengthProfile {
        frequencies: surface.frequencies.clone(),
        strength,
        delay,
        direction_label: surface.direction_label.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent contour sweep: for each local maximum walk outwards to the
    /// nearest strictly higher sample on each side.
    fn oracle(values: &[f64]) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let n = values.len();
        let mut i = 1;
        while i + 1 < n {
            // plateau [i, j]
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[i - 1] < values[i] && values[j + 1] < values[i] {
                let p = (i + j) / 2;
                let h = values[p];
                let mut lmin = h;
                let mut lhit = false;
                for k in (0..p).rev() {
                    if values[k] > h {
                        lhit = true;
                        break;
                    }
                    lmin = lmin.min(values[k]);
                }
                let mut rmin = h;
                let mut rhit = false;
                for &v in &values[p + 1..] {
                    if v > h {
                        rhit = true;
                        break;
                    }
                    rmin = rmin.min(v);
                }
                let prom = if lhit || rhit { h - lmin.max(rmin) } else { h };
                out.push((p, prom));
            }
            i = j + 1;
        }
        out
    }

    #[test]
    fn single_peak() {
        assert_eq!(
            find_peaks(&[0.0, 1.0, 0.0]),
            vec![Peak { index: 1, height: 1.0, prominence: 1.0 }]
        );
    }

    #[test]
    fn two_peaks_with_saddle() {
        let p = find_peaks(&[0.0, 3.0, 1.0, 2.0, 0.0]);
        assert_eq!(p.len(), 2);
        assert_eq!((p[0].index, p[0].prominence), (1, 3.0));
        assert_eq!((p[1].index, p[1].prominence), (3, 1.0));
    }

    #[test]
    fn plateau_and_border_cases() {
        let p = find_peaks(&[0.0, 2.0, 2.0, 2.0, 2.0, 1.0]);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].index, 2);
        // plateaus touching the border and monotone runs are not peaks
        assert!(find_peaks(&[0.0, 1.0, 1.0]).is_empty());
        assert!(find_peaks(&[3.0, 2.0, 1.0]).is_empty());
        assert!(find_peaks(&[1.0, 2.0]).is_empty());
    }

    #[test]
    fn matches_oracle_on_integer_sequences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let v: Vec<f64> = (0..200).map(|_| rng.random_range(0..12) as f64).collect();
            let got: Vec<(usize, f64)> = find_peaks(&v).iter().map(|p| (p.index, p.prominence)).collect();
            assert_eq!(got, oracle(&v));
        }
    }

    #[test]
    fn global_max_on_causal_side() {
        let shifts: Vec<i64> = (-5..=5).collect();
        let mut v = vec![0.1; 11];
        v[2] = 0.8; // shift -3
        let c = causal_strength(&v, &shifts, 2);
        assert_eq!(c, CausalStrength { strength: 0.8, delay: Some(-3) });
    }

    #[test]
    fn granger_peak_falls_back_to_prominence() {
        let shifts: Vec<i64> = (-8..=8).collect();
        let mut v = vec![0.1; 17];
        v[5] = 0.4; // shift -3, prominence 0.3
        v[14] = 0.9; // shift +6
        let c = causal_strength(&v, &shifts, 2);
        assert_eq!(c.delay, Some(-3));
        assert!((c.strength - 0.3).abs() < 1e-12);
    }

    #[test]
    fn monotone_anticausal_rise_gives_zero() {
        let shifts: Vec<i64> = (-10..=10).collect();
        let v: Vec<f64> = (0..21).map(|i| 0.02 * i as f64).collect();
        assert_eq!(causal_strength(&v, &shifts, 2), CausalStrength::NONE);
        // small shoulder bump on the rising flank is still admissible but tiny
        let mut w = v.clone();
        w[8] += 0.05; // shift -2
        let c = causal_strength(&w, &shifts, 2);
        assert!(c.strength <= 0.05 + 1e-12);
    }

    #[test]
    fn zero_curve() {
        let shifts: Vec<i64> = (-3..=3).collect();
        assert_eq!(causal_strength(&[0.0; 7], &shifts, 2), CausalStrength::NONE);
    }

    #[test]
    fn equal_prominence_tie_prefers_smaller_delay() {
        let shifts: Vec<i64> = (-6..=6).collect();
        let mut v = vec![0.0; 13];
        v[1] = 0.5; // -5
        v[4] = 0.5; // -2
        v[12] = 0.9; // +6: border, not a peak but global max
        let c = causal_strength(&v, &shifts, 2);
        assert_eq!(c.delay, Some(-2));
    }

    #[test]
    fn profile_of_zero_surface() {
        let s = CmcSurface {
            shifts: vec![-1, 0, 1],
            frequencies: vec![0.0, 0.25, 0.5],
            values: vec![0.0; 9],
            degenerate: vec![false; 9],
            direction_label: "x->y".into(),
            normalized: false,
        };
        let p = strength_profile(&s, 2);
        assert_eq!(p.strength, vec![0.0; 3]);
        assert_eq!(p.delay, vec![None; 3]);
        assert_eq!(p.direction_label, "x->y");
    }

    fn curve() -> impl Strategy<Value = (Vec<f64>, Vec<i64>, i64)> {
        (5usize..40, 1usize..4).prop_flat_map(|(half, e)| {
            let n = 2 * half + 1;
            (
                prop::collection::vec(0.0f64..1.0, n),
                Just((-(half as i64)..=half as i64).collect::<Vec<_>>()),
                Just(e as i64),
            )
        })
    }

    proptest! {
        #[test]
        fn prominence_matches_oracle(v in prop::collection::vec(0.0f64..1.0, 3..120)) {
            let got: Vec<(usize, f64)> = find_peaks(&v).iter().map(|p| (p.index, p.prominence)).collect();
            prop_assert_eq!(got, oracle(&v));
            for p in find_peaks(&v) {
                prop_assert!(p.prominence > 0.0 && p.prominence <= p.height);
            }
        }

        #[test]
        fn delay_always_admissible((v, shifts, limit) in curve()) {
            let c = causal_strength(&v, &shifts, limit);
            if let Some(d) = c.delay {
                prop_assert!(d < limit);
            }
            prop_assert!((0.0..=1.0).contains(&c.strength));
        }

        #[test]
        fn positively_homogeneous((v, shifts, limit) in curve(), alpha in 0.01f64..10.0) {
            let scaled: Vec<f64> = v.iter().map(|x| x * alpha).collect();
            let a = causal_strength(&v, &shifts, limit);
            let b = causal_strength(&scaled, &shifts, limit);
            prop_assert!((a.strength * alpha - b.strength).abs() < 1e-9 * alpha.max(1.0));
        }

        #[test]
        fn anticausal_peak_never_increases_strength(
            (v, shifts, limit) in curve(),
            pos in any::<prop::sample::Index>(),
            height in 0.0f64..50.0,
        ) {
            let before = causal_strength(&v, &shifts, limit);
            let anti: Vec<usize> = (0..v.len()).filter(|&i| shifts[i] >= limit).collect();
            let at = anti[pos.index(anti.len())];
            let mut w = v.clone();
            w[at] += height;
            let after = causal_strength(&w, &shifts, limit);
            prop_assert!(after.strength <= before.strength + 1e-12);
        }
    }
}
