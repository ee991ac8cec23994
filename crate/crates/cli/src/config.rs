//! Run configuration: a flat `key = value` file merged with flag overrides,
//! validated into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use derand_core::graph::GraphSpec;
use derand_core::hashfam::DEFAULT_T_MAX;
use derand_core::mis::MisConfig;
use derand_core::sim::{CostModel, ModelKind};
use derand_core::spanner::SpannerConfig;
use serde::Serialize;

use crate::CliError;

/// Keys accepted in config files and as `--key` flags.
pub const KEYS: &[&str] = &[
    "algo",
    "graph",
    "gen",
    "n",
    "p",
    "rows",
    "cols",
    "degree",
    "max-weight",
    "k",
    "d",
    "model",
    "bandwidth-factor",
    "c-prime",
    "t-max",
    "rng-seed",
    "out",
    "csv",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    RandMis,
    DetMis,
    DetMisBounded,
    DetMisCongest,
    Color,
    RandSpanner,
    DetSpanner,
}

impl Algo {
    pub const ALL: [Algo; 7] = [
        Algo::RandMis,
        Algo::DetMis,
        Algo::DetMisBounded,
        Algo::DetMisCongest,
        Algo::Color,
        Algo::RandSpanner,
        Algo::DetSpanner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::RandMis => "rand-mis",
            Algo::DetMis => "det-mis",
            Algo::DetMisBounded => "det-mis-bounded",
            Algo::DetMisCongest => "det-mis-congest",
            Algo::Color => "color",
            Algo::RandSpanner => "rand-spanner",
            Algo::DetSpanner => "det-spanner",
        }
    }

    pub fn is_deterministic(self) -> bool {
        !matches!(self, Algo::RandMis | Algo::RandSpanner)
    }

    pub fn is_spanner(self) -> bool {
        matches!(self, Algo::RandSpanner | Algo::DetSpanner)
    }

    /// Models the algorithm runs in; the first is the default.
    pub fn models(self) -> &'static [ModelKind] {
        match self {
            Algo::DetMis => &[ModelKind::Clique, ModelKind::BroadcastClique],
            Algo::DetMisCongest => &[ModelKind::Congest],
            _ => &[ModelKind::Clique],
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algo::ALL.iter().map(|a| a.name()).collect();
                CliError::Config(format!("unknown algo `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Where the input graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GraphSource {
    File { path: PathBuf },
    Gen { kind: String, spec: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub algo: Algo,
    pub model: ModelKind,
    pub graph: GraphSource,
    #[serde(skip)]
    pub spec: Option<GraphSpec>,
    pub rng_seed: u64,
    pub k: u32,
    pub d: Option<u32>,
    pub c_prime: u32,
    pub bandwidth_factor: usize,
    pub t_max: u32,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

/// Raw key/value pairs; later insertions override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(pub BTreeMap<String, String>);

impl RawConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let raw = RawConfig(map);
        raw.check_keys()?;
        Ok(raw)
    }

    /// Parses whitespace-separated `key=value` tokens (one bench line).
    pub fn parse_line(line: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("expected `key=value`, got `{tok}`")))?;
            map.insert(k.trim_start_matches("--").to_string(), v.to_string());
        }
        let raw = RawConfig(map);
        raw.check_keys()?;
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn merge(&mut self, other: RawConfig) {
        self.0.extend(other.0);
    }

    fn check_keys(&self) -> Result<(), CliError> {
        match self.0.keys().find(|k| !KEYS.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Config(format!("invalid value `{v}` for `{key}`")))
            })
            .transpose()
    }

    fn require<T: FromStr>(&self, key: &str, ctx: &str) -> Result<T, CliError> {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("`{key}` is required for {ctx}")))
    }

    pub fn into_config(self) -> Result<RunConfig, CliError> {
        self.check_keys()?;
        let algo: Algo = self.require("algo", "every run")?;
        let model = match self.0.get("model") {
            None => algo.models()[0],
            Some(m) => {
                let kind = ModelKind::parse(m)
                    .ok_or_else(|| CliError::Config(format!("unknown model `{m}`")))?;
                if !algo.models().contains(&kind) {
                    return Err(CliError::Config(format!("{algo} does not run in the {kind} model")));
                }
                kind
            }
        };
        let rng_seed = self.get("rng-seed")?.unwrap_or(0);
        let (graph, spec) = match (self.0.get("graph"), self.0.get("gen")) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either `graph` or `gen`, not both".into()));
            }
            (None, None) => return Err(CliError::Config("one of `graph` or `gen` is required".into())),
            (Some(path), None) => (GraphSource::File { path: PathBuf::from(path) }, None),
            (None, Some(kind)) => {
                let spec = self.graph_spec(kind)?;
                (
                    GraphSource::Gen {
                        kind: kind.clone(),
                        spec: format!("{spec:?}"),
                    },
                    Some(spec),
                )
            }
        };
        let k = self.get("k")?.unwrap_or(2);
        if k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        let d = self.get("d")?;
        if d == Some(0) {
            return Err(CliError::Config("d must be at least 1".into()));
        }
        let bandwidth_factor = self
            .get("bandwidth-factor")?
            .unwrap_or(CostModel::DEFAULT_BANDWIDTH_FACTOR);
        if bandwidth_factor == 0 {
            return Err(CliError::Config("bandwidth-factor must be at least 1".into()));
        }
        let c_prime = self.get("c-prime")?.unwrap_or(MisConfig::default().c_prime);
        if c_prime == 0 {
            return Err(CliError::Config("c-prime must be at least 1".into()));
        }
        Ok(RunConfig {
            algo,
            model,
            graph,
            spec,
            rng_seed,
            k,
            d,
            c_prime,
            bandwidth_factor,
            t_max: self.get("t-max")?.unwrap_or(DEFAULT_T_MAX),
            out: self.get("out")?,
            csv: self.get("csv")?,
        })
    }

    fn graph_spec(&self, kind: &str) -> Result<GraphSpec, CliError> {
        let ctx = format!("gen={kind}");
        let n = || self.require::<usize>("n", &ctx);
        let p = || -> Result<f64, CliError> {
            let p: f64 = self.require("p", &ctx)?;
            if (0.0..=1.0).contains(&p) {
                Ok(p)
            } else {
                Err(CliError::Config(format!("p = {p} is outside [0, 1]")))
            }
        };
        Ok(match kind {
            "gnp" => GraphSpec::Gnp { n: n()?, p: p()? },
            "weighted_gnp" => GraphSpec::WeightedGnp {
                n: n()?,
                p: p()?,
                max_weight: self.get("max-weight")?.unwrap_or(10),
            },
            "grid" => GraphSpec::Grid {
                rows: self.require("rows", &ctx)?,
                cols: self.require("cols", &ctx)?,
            },
            "clique" => GraphSpec::Clique { n: n()? },
            "path" => GraphSpec::Path { n: n()? },
            "cycle" => GraphSpec::Cycle { n: n()? },
            "star" => GraphSpec::Star { n: n()? },
            "random_tree" => GraphSpec::RandomTree { n: n()? },
            "random_regular" => GraphSpec::RandomRegular {
                n: n()?,
                d: self.require("degree", &ctx)?,
            },
            other => return Err(CliError::Config(format!("unknown generator `{other}`"))),
        })
    }
}

impl RunConfig {
    pub fn mis_config(&self) -> MisConfig {
        MisConfig {
            c_prime: self.c_prime,
            bandwidth_factor: self.bandwidth_factor,
            ..MisConfig::default()
        }
    }

    pub fn spanner_config(&self, c_size: Option<f64>) -> SpannerConfig {
        SpannerConfig {
            d: self.d,
            t_max: self.t_max,
            c_size,
            bandwidth_factor: self.bandwidth_factor,
        }
    }

    /// Short graph label for CSV rows.
    pub fn graph_label(&self) -> String {
        match &self.graph {
            GraphSource::File { path } => path.display().to_string(),
            GraphSource::Gen { spec, .. } => spec.clone(),
        }
    }
}
