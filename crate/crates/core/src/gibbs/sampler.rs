use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::calibration::ShapeParams;
use crate::count::PartSet;
use crate::error::{Error, Result};

/// Largest admissible total-variation budget.
pub const MAX_TV_BUDGET: f64 = 1e-3;

/// Refuse supports larger than this many parts.
pub const MAX_SUPPORT: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerSpec {
    pub params: ShapeParams<f64>,
    pub part_set: PartSet,
    pub tv_budget: f64,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn new(params: ShapeParams<f64>, part_set: PartSet, tv_budget: f64, seed: u64) -> Result<Self> {
        if !(tv_budget > 0.0 && tv_budget <= MAX_TV_BUDGET) {
            return Err(Error::Config(format!("tv budget must be in (0, {MAX_TV_BUDGET}], got {tv_budget}")));
        }
        Ok(Self { params, part_set, tv_budget, seed })
    }
}

/// A multiset of parts drawn from the Gibbs measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampledPartition {
    #[serde(serialize_with = "as_triples")]
    pub multiplicities: BTreeMap<(u32, u32), u64>,
    #[serde(rename = "total")]
    pub n: [u64; 2],
}

fn as_triples<S: Serializer>(m: &BTreeMap<(u32, u32), u64>, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for (&(x1, x2), &k) in m {
        seq.serialize_element(&[x1 as u64, x2 as u64, k])?;
    }
    seq.end()
}

impl SampledPartition {
    pub fn multiplicity(&self, x1: u32, x2: u32) -> u64 {
        self.multiplicities.get(&(x1, x2)).copied().unwrap_or(0)
    }

    /// `Σ ω(x)·x` recomputed from the multiplicities.
    pub fn weighted_sum(&self) -> [u64; 2] {
        self.multiplicities
            .iter()
            .fold([0, 0], |[a, b], (&(x1, x2), &k)| [a + k * x1 as u64, b + k * x2 as u64])
    }
}

#[derive(Clone, Copy, Debug)]
struct Part {
    x1: u32,
    x2: u32,
    /// `e^{−⟨λ,x⟩}`
    q: f64,
    /// `−⟨λ,x⟩`
    log_q: f64,
}

/// Independent geometric multiplicities over a finite part set whose
/// complement has total mass `Σ e^{−⟨λ,x⟩}` at most the TV budget.
///
/// Row `x1` draws from its own stream of the seeded generator, so shrinking
/// the budget only appends parts and leaves the existing draws unchanged.
#[derive(Clone, Debug)]
pub struct Sampler {
    spec: SamplerSpec,
    rows: Vec<Vec<Part>>,
}

fn first_x2(part_set: PartSet, x1: u32) -> u32 {
    if part_set == PartSet::NonzeroVectors && x1 > 0 {
        0
    } else {
        1
    }
}

impl Sampler {
    pub fn new(spec: SamplerSpec) -> Result<Self> {
        let (a, b) = (spec.params.alpha(), spec.params.beta());
        let gap_a = -(-a).exp_m1();
        let gap_b = -(-b).exp_m1();
        let half = spec.tv_budget / 2.0;
        // rows x1 > m: total mass ≤ e^{−α(m+1)} / ((1 − e^{−α})(1 − e^{−β}))
        let rows = ((-(half * gap_a * gap_b).ln() / a).ceil() - 1.0).max(1.0);
        if !rows.is_finite() || rows > MAX_SUPPORT as f64 {
            return Err(Error::Config("tv budget too small for these parameters".into()));
        }
        let rows = rows as u32;
        let x1_start = if spec.part_set == PartSet::NonzeroVectors { 0 } else { 1 };
        let per_row = half / f64::from(rows + 1);
        let mut out = Vec::new();
        let mut total = 0usize;
        for x1 in x1_start..=rows {
            let lead = -a * f64::from(x1);
            // tail of the row past x2 = j: e^{−αx1 − β(j+1)} / (1 − e^{−β}) ≤ per_row
            let last = ((lead - (per_row * gap_b).ln()) / b).ceil() - 1.0;
            let x2_min = first_x2(spec.part_set, x1);
            if last < f64::from(x2_min) {
                continue;
            }
            if total as f64 + last > MAX_SUPPORT as f64 {
                return Err(Error::Config("tv budget too small for these parameters".into()));
            }
            let row: Vec<Part> = (x2_min..=last as u32)
                .map(|x2| {
                    let log_q = lead - b * f64::from(x2);
                    Part { x1, x2, q: log_q.exp(), log_q }
                })
                .collect();
            total += row.len();
            out.push(row);
        }
        Ok(Self { spec, rows: out })
    }

    pub fn spec(&self) -> &SamplerSpec {
        &self.spec
    }

    pub fn support_size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Whether `x` is among the retained parts.
    pub fn retains(&self, x1: u32, x2: u32) -> bool {
        self.rows.iter().flatten().any(|p| p.x1 == x1 && p.x2 == x2)
    }

    /// One draw from the generator seeded with `seed`.
    pub fn draw_seeded(&self, seed: u64) -> SampledPartition {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut multiplicities = BTreeMap::new();
        let mut n = [0u64; 2];
        for row in &self.rows {
            let Some(first) = row.first() else { continue };
            rng.set_stream(u64::from(first.x1));
            rng.set_word_pos(0);
            for part in row {
                let v = 1.0 - rng.random::<f64>();
                if v > part.q {
                    continue;
                }
                // P(ω ≥ k) = q^k
                let k = (v.ln() / part.log_q).floor() as u64;
                if k == 0 {
                    continue;
                }
                multiplicities.insert((part.x1, part.x2), k);
                n[0] += k * u64::from(part.x1);
                n[1] += k * u64::from(part.x2);
            }
        }
        SampledPartition { multiplicities, n }
    }

    /// `reps` independent draws; replica `i` uses seed `seed + i`.
    pub fn replicas(&self, reps: usize) -> Vec<SampledPartition> {
        (0..reps as u64)
            .into_par_iter()
            .map(|i| self.draw_seeded(self.spec.seed.wrapping_add(i)))
            .collect()
    }
}

/// A single draw for `spec`.
pub fn sample(spec: SamplerSpec) -> Result<SampledPartition> {
    Ok(Sampler::new(spec)?.draw_seeded(spec.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: f64, b: f64, part_set: PartSet) -> SamplerSpec {
        SamplerSpec::new(ShapeParams::new(a, b).unwrap(), part_set, 1e-4, 3).unwrap()
    }

    #[test]
    fn budget_is_validated() {
        let p = ShapeParams::new(1.0, 1.0).unwrap();
        assert!(SamplerSpec::new(p, PartSet::StrictPositive, 0.0, 0).is_err());
        assert!(SamplerSpec::new(p, PartSet::StrictPositive, 1e-2, 0).is_err());
    }

    #[test]
    fn dropped_mass_within_budget() {
        for part_set in PartSet::ALL {
            let s = spec(0.7, 0.05, part_set);
            let sampler = Sampler::new(s).unwrap();
            let kept: f64 = sampler.rows.iter().flatten().map(|p| p.q).sum();
            let mut total = 0.0;
            for x1 in 0..200u32 {
                for x2 in 0..2000u32 {
                    if part_set.contains(x1 as usize, x2 as usize) {
                        total += (-0.7 * f64::from(x1) - 0.05 * f64::from(x2)).exp();
                    }
                }
            }
            assert!(total - kept <= s.tv_budget, "{part_set}: {}", total - kept);
            assert!(sampler.rows.iter().flatten().all(|p| part_set.contains(p.x1 as usize, p.x2 as usize)));
        }
    }

    #[test]
    fn draws_are_consistent_and_deterministic() {
        let sampler = Sampler::new(spec(0.5, 0.1, PartSet::NonzeroVectors)).unwrap();
        let a = sampler.draw_seeded(11);
        assert_eq!(a, sampler.draw_seeded(11));
        assert_eq!(a.n, a.weighted_sum());
        assert!(a.multiplicities.values().all(|&k| k >= 1));
    }
}
