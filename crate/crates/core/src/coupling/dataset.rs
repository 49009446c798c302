use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    couple_rod_channel, extract_sensors, CaseSpec, CoupledSolution, PipelineConfig, SensorSet, Split, BURNUP_MAX,
};
use crate::error::{Result, RodError};

/// Min-max scales mapping training coordinates and temperatures to [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub r_min: f64,
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

fn to_unit(v: f64, lo: f64, hi: f64) -> f64 {
    2.0 * (v - lo) / (hi - lo) - 1.0
}

impl Normalization {
    /// Smallest temperature span kept, so isothermal training sets stay invertible [K].
    const MIN_T_SPAN: f64 = 1.0;

    pub fn from_cases<'a>(cases: impl IntoIterator<Item = &'a CaseRecord>) -> Result<Self> {
        let mut n = Self {
            r_min: f64::INFINITY,
            r_max: f64::NEG_INFINITY,
            z_min: f64::INFINITY,
            z_max: f64::NEG_INFINITY,
            t_min: f64::INFINITY,
            t_max: f64::NEG_INFINITY,
        };
        let mut any = false;
        for c in cases {
            any = true;
            let f = &c.solution.field;
            for (node, &t) in f.mesh.nodes().zip(&f.values) {
                n.r_min = n.r_min.min(node.r);
                n.r_max = n.r_max.max(node.r);
                n.z_min = n.z_min.min(node.z);
                n.z_max = n.z_max.max(node.z);
                n.t_min = n.t_min.min(t);
                n.t_max = n.t_max.max(t);
            }
        }
        if !any {
            return Err(RodError::config("normalization needs at least one training case"));
        }
        if n.t_max - n.t_min < Self::MIN_T_SPAN {
            let mid = 0.5 * (n.t_max + n.t_min);
            n.t_min = mid - 0.5 * Self::MIN_T_SPAN;
            n.t_max = mid + 0.5 * Self::MIN_T_SPAN;
        }
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [
            (self.r_min, self.r_max),
            (self.z_min, self.z_max),
            (self.t_min, self.t_max),
        ]
        .iter()
        .all(|&(a, b)| a.is_finite() && b.is_finite() && b > a);
        if ok {
            Ok(())
        } else {
            Err(RodError::config("degenerate normalization constants"))
        }
    }

    pub fn r(&self, r: f64) -> f64 {
        to_unit(r, self.r_min, self.r_max)
    }

    pub fn z(&self, z: f64) -> f64 {
        to_unit(z, self.z_min, self.z_max)
    }

    pub fn temperature(&self, t: f64) -> f64 {
        to_unit(t, self.t_min, self.t_max)
    }

    pub fn temperature_inv(&self, u: f64) -> f64 {
        self.t_min + 0.5 * (u + 1.0) * (self.t_max - self.t_min)
    }

    /// Scale for temperature differences such as `dhat`: differences map like temperatures.
    pub fn temperature_scale(&self) -> f64 {
        2.0 / (self.t_max - self.t_min)
    }
}

/// Ground truth and sensor readings of one case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub spec: CaseSpec,
    pub solution: CoupledSolution,
    pub sensors: SensorSet,
}

impl CaseRecord {
    /// Interior sample table: every mesh node with its true temperature, as (r, z, T).
    pub fn samples(&self) -> Vec<(f64, f64, f64)> {
        let f = &self.solution.field;
        f.mesh.nodes().zip(&f.values).map(|(n, &t)| (n.r, n.z, t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: PipelineConfig,
    pub cases: Vec<CaseRecord>,
    pub normalization: Normalization,
    pub seed: Option<u64>,
}

impl Dataset {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &CaseRecord> + '_ {
        self.cases.iter().filter(move |c| c.spec.split == split)
    }

    pub fn count(&self, split: Split) -> usize {
        self.split(split).count()
    }

    pub fn case(&self, id: &str) -> Option<&CaseRecord> {
        self.cases.iter().find(|c| c.spec.id == id)
    }

    /// Checks id uniqueness, split coverage and that the normalization comes
    /// from the training cases.
    pub fn validate(&self) -> Result<()> {
        check_roster(self.cases.iter().map(|c| &c.spec))?;
        let expect = Normalization::from_cases(self.split(Split::Train))?;
        if expect != self.normalization {
            return Err(RodError::config(
                "normalization constants do not match the training cases",
            ));
        }
        Ok(())
    }
}

fn check_roster<'a>(specs: impl IntoIterator<Item = &'a CaseSpec>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    let (mut train, mut test) = (0, 0);
    for s in specs {
        s.validate()?;
        if !seen.insert(s.id.as_str()) {
            return Err(RodError::config(format!("duplicate case id '{}'", s.id)));
        }
        match s.split {
            Split::Train => train += 1,
            Split::Test => test += 1,
            Split::Validate => {}
        }
    }
    if seen.is_empty() || train == 0 || test == 0 {
        return Err(RodError::config("roster needs at least one training and one test case"));
    }
    Ok(())
}

/// The published split by peak LHGR. The 16 kW/m point appears under both
/// training and validation; `exclude_duplicate` drops the validation copy.
pub fn reference_roster(exclude_duplicate: bool) -> Vec<CaseSpec> {
    let mut out = Vec::new();
    let mut push = |split: Split, prefix: &str, kw: &[u32]| {
        for &q in kw {
            out.push(CaseSpec {
                id: format!("{prefix}-q{q}"),
                peak_lhgr: q as f64 * 1000.0,
                burnup: 0.0,
                split,
            });
        }
    };
    push(Split::Train, "train", &[10, 12, 16, 18, 22, 24, 30, 36]);
    push(
        Split::Validate,
        "val",
        if exclude_duplicate { &[14] } else { &[14, 16] },
    );
    push(Split::Test, "test", &[20]);
    out
}

fn run_case(spec: &CaseSpec, cfg: &PipelineConfig) -> Result<CaseRecord> {
    let solution = couple_rod_channel(spec, cfg)?;
    let sensors = extract_sensors(
        &solution,
        &cfg.sensors.locations(&cfg.geometry),
        cfg.sensors.eta,
        cfg.sensors.t_inf,
    )?;
    Ok(CaseRecord {
        spec: spec.clone(),
        solution,
        sensors,
    })
}

/// Solves every case (in parallel, output in roster order) and fits the
/// normalization on the training split.
pub fn generate_dataset(specs: &[CaseSpec], cfg: &PipelineConfig) -> Result<Dataset> {
    check_roster(specs)?;
    cfg.validate()?;
    let cases = specs
        .par_iter()
        .map(|s| {
            run_case(s, cfg).map_err(|e| RodError::Case {
                case_id: s.id.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let normalization = Normalization::from_cases(cases.iter().filter(|c| c.spec.split == Split::Train))?;
    Ok(Dataset {
        config: cfg.clone(),
        cases,
        normalization,
        seed: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_cases: usize,
    pub burnup_min: f64,
    pub burnup_max: f64,
    /// Peak LHGR shared by every sweep case [W/m].
    pub peak_lhgr: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_cases: 70,
            burnup_min: 2.4,
            burnup_max: 59.7,
            peak_lhgr: 20_000.0,
            seed: 42,
        }
    }
}

impl SweepConfig {
    /// Uniform burnups with a seeded 60/20/20 split.
    pub fn roster(&self) -> Result<Vec<CaseSpec>> {
        let (lo, hi) = (self.burnup_min, self.burnup_max);
        if self.n_cases < 10 {
            return Err(RodError::config("burnup sweep needs n_cases >= 10"));
        }
        if !(lo >= 0.0 && hi <= BURNUP_MAX && lo < hi) {
            return Err(RodError::config(format!(
                "burnup range [{lo}, {hi}] outside the conductivity fit [0, {BURNUP_MAX}] MWd/kgU"
            )));
        }
        let n = self.n_cases;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let burnups: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let n_train = (0.6 * n as f64).round() as usize;
        let n_val = (0.2 * n as f64).round() as usize;
        let mut split = vec![Split::Test; n];
        for (rank, &k) in order.iter().enumerate() {
            split[k] = if rank < n_train {
                Split::Train
            } else if rank < n_train + n_val {
                Split::Validate
            } else {
                Split::Test
            };
        }
        (0..n)
            .map(|k| CaseSpec::new(format!("bu-{k:03}"), self.peak_lhgr, burnups[k], split[k]))
            .collect()
    }
}

pub fn burnup_sweep(sweep: &SweepConfig, cfg: &PipelineConfig) -> Result<Dataset> {
    let mut ds = generate_dataset(&sweep.roster()?, cfg)?;
    ds.seed = Some(sweep.seed);
    Ok(ds)
}
