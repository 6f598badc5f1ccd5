//! Instance files, random instance generation and benchmark suites.

use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{RapError, Result};
use crate::model::Instance;
use crate::solver::{solve, SolveOptions};

/// Name of the generator recorded in benchmark output.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.3";

/// On-disk JSON form of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub k: Vec<usize>,
    pub r: Vec<Vec<f64>>,
    pub c: Vec<Vec<i64>>,
    #[serde(default)]
    pub l: Option<Vec<Vec<i64>>>,
    pub u: Vec<Vec<i64>>,
    #[serde(rename = "R0")]
    pub r0: f64,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            n: inst.n(),
            k: inst.k().to_vec(),
            r: inst.r_rows(),
            c: inst.c_rows(),
            l: Some(inst.l_rows()),
            u: inst.u_rows(),
            r0: inst.r0(),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let bad = |msg: String| Err(RapError::Parse(msg));
        if self.k.len() != self.n {
            return bad(format!("field `k`: has {} entries but n = {}", self.k.len(), self.n));
        }
        let l = self.l.unwrap_or_else(|| self.k.iter().map(|&k| vec![0; k]).collect());
        for (name, lens) in [
            ("r", self.r.iter().map(Vec::len).collect::<Vec<_>>()),
            ("c", self.c.iter().map(Vec::len).collect()),
            ("l", l.iter().map(Vec::len).collect()),
            ("u", self.u.iter().map(Vec::len).collect()),
        ] {
            if lens.len() != self.n {
                return bad(format!("field `{name}`: has {} rows but n = {}", lens.len(), self.n));
            }
            if let Some(i) = (0..self.n).find(|&i| lens[i] != self.k[i]) {
                return bad(format!("field `{name}`: row {} has {} entries but k = {}", i + 1, lens[i], self.k[i]));
            }
        }
        Instance::new(self.r, self.c, l, self.u, self.r0).map_err(|e| match e {
            RapError::InvalidInstance(msg) => RapError::Parse(msg),
            other => other,
        })
    }
}

/// Parses and validates an instance from JSON text.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| RapError::Parse(e.to_string()))?;
    file.into_instance()
}

pub fn read_instance(path: &std::path::Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| RapError::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn write_instance(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenMode {
    /// Reliabilities and costs drawn independently.
    #[default]
    Uniform,
    /// Within each subsystem a more reliable component never costs less.
    Ordered,
}

impl FromStr for GenMode {
    type Err = RapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GenMode::Uniform),
            "ordered" => Ok(GenMode::Ordered),
            other => Err(RapError::Parse(format!("unknown generator mode `{other}`"))),
        }
    }
}

/// Parameters of the random instance generator. Costs are integers drawn
/// uniformly from `[cmin, cmax]`; every upper bound is `umax`, lower bounds are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub k: usize,
    pub rmin: f64,
    pub rmax: f64,
    pub cmin: i64,
    pub cmax: i64,
    pub umax: i64,
    pub r0: f64,
    pub mode: GenMode,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(RapError::InvalidInstance(format!("generator: {msg}")));
        if self.n == 0 || self.k == 0 {
            return bad("n and k must be positive");
        }
        if !(0.0 < self.rmin && self.rmin <= self.rmax && self.rmax < 1.0) {
            return bad("need 0 < rmin <= rmax < 1");
        }
        if !(1 <= self.cmin && self.cmin <= self.cmax) {
            return bad("need 1 <= cmin <= cmax");
        }
        if self.umax < 1 {
            return bad("need umax >= 1");
        }
        if !(0.0..=1.0).contains(&self.r0) {
            return bad("R0 must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Deterministic instance for `spec.seed`.
pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    generate_with(spec, &mut rng)
}

/// Draws an instance from `rng`, ignoring `spec.seed`.
pub fn generate_with<R: Rng>(spec: &GeneratorSpec, rng: &mut R) -> Result<Instance> {
    spec.validate()?;
    let mut r = Vec::with_capacity(spec.n);
    let mut c = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let mut ri: Vec<f64> = (0..spec.k).map(|_| rng.gen_range(spec.rmin..=spec.rmax)).collect();
        let mut ci: Vec<i64> = (0..spec.k).map(|_| rng.gen_range(spec.cmin..=spec.cmax)).collect();
        if spec.mode == GenMode::Ordered {
            ri.sort_by(f64::total_cmp);
            ci.sort_unstable();
        }
        r.push(ri);
        c.push(ci);
    }
    let l = vec![vec![0; spec.k]; spec.n];
    let u = vec![vec![spec.umax; spec.k]; spec.n];
    Instance::new(r, c, l, u, spec.r0)
}

/// Benchmark families with their `(n, k)` grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Independent draws, `r ∈ [0.99, 0.998]`.
    Table1,
    /// Cost increasing with reliability, `r ∈ [0.99, 0.998]`.
    Table2,
    /// Cost increasing with reliability, `r ∈ [0.98, 0.99]`.
    Table3,
}

impl FromStr for Suite {
    type Err = RapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Suite::Table1),
            "table2" => Ok(Suite::Table2),
            "table3" => Ok(Suite::Table3),
            other => Err(RapError::Parse(format!("unknown suite `{other}`"))),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Suite::Table1 => "table1",
            Suite::Table2 => "table2",
            Suite::Table3 => "table3",
        })
    }
}

impl Suite {
    pub fn rows(&self) -> &'static [(usize, usize)] {
        match self {
            Suite::Table1 => &[(10, 2), (10, 3), (10, 5), (15, 2), (15, 3), (20, 2)],
            Suite::Table2 => &[(10, 2), (10, 3), (10, 5), (15, 2), (15, 3), (15, 4), (17, 2)],
            Suite::Table3 => &[(6, 4), (6, 5), (7, 4), (7, 5), (8, 4)],
        }
    }

    /// Generator parameters of one row; the seed field is unused by [`bench`].
    pub fn spec(&self, n: usize, k: usize) -> GeneratorSpec {
        let (rmin, rmax, mode) = match self {
            Suite::Table1 => (0.99, 0.998, GenMode::Uniform),
            Suite::Table2 => (0.99, 0.998, GenMode::Ordered),
            Suite::Table3 => (0.98, 0.99, GenMode::Ordered),
        };
        GeneratorSpec { n, k, rmin, rmax, cmin: 10, cmax: 20, umax: 4, r0: 0.90, mode, seed: 0 }
    }

    /// Instances of one row, drawn from the generator stream keyed by `(n, k)`.
    pub fn instances(&self, n: usize, k: usize, reps: usize, seed: u64) -> Result<Vec<Instance>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((n as u64) << 32) | k as u64);
        let spec = self.spec(n, k);
        (0..reps).map(|_| generate_with(&spec, &mut rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    pub mean_nodes_generated: Option<f64>,
    pub mean_nodes_expanded: Option<f64>,
    pub mean_wall_time: Option<f64>,
    pub status: String,
}

/// Solves `reps` instances for each selected row of `suite`.
///
/// `only` restricts the run to the listed `(n, k)` rows.
pub fn bench(
    suite: Suite,
    reps: usize,
    seed: u64,
    options: &SolveOptions,
    only: Option<&[(usize, usize)]>,
) -> Result<Vec<BenchRow>> {
    let mut out = Vec::new();
    for &(n, k) in suite.rows() {
        if only.is_some_and(|sel| !sel.contains(&(n, k))) {
            continue;
        }
        let instances = suite.instances(n, k, reps, seed)?;
        let mut sums = (0.0, 0.0, 0.0);
        let mut failure = None;
        for inst in &instances {
            match solve(inst, options) {
                Ok(r) => {
                    sums.0 += r.nodes_generated as f64;
                    sums.1 += r.nodes_expanded as f64;
                    sums.2 += r.wall_time;
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        let m = reps.max(1) as f64;
        out.push(match failure {
            None => BenchRow {
                n,
                k,
                reps,
                mean_nodes_generated: Some(sums.0 / m),
                mean_nodes_expanded: Some(sums.1 / m),
                mean_wall_time: Some(sums.2 / m),
                status: "ok".into(),
            },
            Some(e) => BenchRow {
                n,
                k,
                reps,
                mean_nodes_generated: None,
                mean_nodes_expanded: None,
                mean_wall_time: None,
                status: format!("error: {e}"),
            },
        });
    }
    Ok(out)
}

/// Writes benchmark rows as CSV preceded by a `#` comment line naming the
/// suite, seed and random generator.
pub fn write_bench_csv<W: Write>(mut w: W, suite: Suite, seed: u64, rows: &[BenchRow]) -> Result<()> {
    writeln!(w, "# suite={suite} seed={seed} rng={RNG_NAME}")?;
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row).map_err(|e| RapError::Io(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}
