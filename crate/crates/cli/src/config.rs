use anyhow::{bail, Context, Result};
use nnls_core::pde::{EvolveParams, C_STAB};
use nnls_core::profiles::InitialProfile;
use nnls_core::scattering::{KGrid, ScatterOptions};
use nnls_core::wedge::{wedge_point, Side};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub profile: InitialProfile,
    #[serde(default)]
    pub kgrid: KGrid,
    #[serde(default)]
    pub wedge: WedgeConfig,
    #[serde(default)]
    pub pde: Option<PdeConfig>,
    #[serde(default)]
    pub matching: MatchConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeConfig {
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default = "default_s")]
    pub s_values: Vec<f64>,
    #[serde(default)]
    pub t_ladder: Vec<f64>,
    #[serde(default = "default_sides")]
    pub sides: Vec<Side>,
}

fn default_s() -> Vec<f64> {
    vec![1.0]
}

fn default_sides() -> Vec<Side> {
    vec![Side::PlusX, Side::MinusX]
}

impl Default for WedgeConfig {
    fn default() -> Self {
        Self { alphas: Vec::new(), s_values: default_s(), t_ladder: Vec::new(), sides: default_sides() }
    }
}

/// PDE block. Absent or `skip = true` disables the direct solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    #[serde(default)]
    pub skip: bool,
    /// Half-width L; derived from the largest wedge x when omitted.
    pub half_width: Option<f64>,
    pub h: f64,
    /// Defaults to C_STAB·h².
    pub dt: Option<f64>,
    /// Defaults to the last entry of the t ladder.
    pub t_final: Option<f64>,
    #[serde(default)]
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchConfig {
    #[serde(default = "default_match_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_match_log_ts")]
    pub log_ts: Vec<f64>,
    /// The fixed value of (1−α)·ln t.
    #[serde(default = "one")]
    pub scale: f64,
}

fn default_match_alphas() -> Vec<f64> {
    vec![0.9, 0.99, 0.999]
}

fn default_match_log_ts() -> Vec<f64> {
    vec![10.0, 100.0, 1000.0]
}

fn one() -> f64 {
    1.0
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self { alphas: default_match_alphas(), log_ts: default_match_log_ts(), scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Spectral cache path; defaults to `<dir>/spectrum.json`.
    pub cache: Option<PathBuf>,
    /// Also write the PDE snapshots (CSV and binary) in `compare`.
    #[serde(default)]
    pub snapshots: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub assumption2: f64,
    pub case_eps: f64,
    pub reflectionless: f64,
    /// Allowed |fitted exponent + 1/2| in the x < 0 matching check.
    pub match_exponent: f64,
    /// Largest gap to the constant-A prediction accepted for reflectionless data.
    pub soliton_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { assumption2: 1e-2, case_eps: 1e-6, reflectionless: 1e-8, match_exponent: 0.05, soliton_gap: 1e-3 }
    }
}

impl Tolerances {
    /// Apply a `key=value` override.
    pub fn set(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv.split_once('=').with_context(|| format!("tolerance override `{kv}` is not key=value"))?;
        let v: f64 = v.trim().parse().with_context(|| format!("tolerance `{k}` needs a number"))?;
        if !(v > 0.0 && v.is_finite()) {
            bail!("tolerance `{k}` must be positive");
        }
        match k.trim() {
            "assumption2" => self.assumption2 = v,
            "case_eps" => self.case_eps = v,
            "reflectionless" => self.reflectionless = v,
            "match_exponent" => self.match_exponent = v,
            "soliton_gap" => self.soliton_gap = v,
            other => bail!("unknown tolerance `{other}`"),
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate().context("profile block")?;
        self.kgrid.validate().context("kgrid block")?;
        let w = &self.wedge;
        if !w.t_ladder.windows(2).all(|p| p[1] > p[0]) {
            bail!("t ladder must be strictly increasing");
        }
        for &a in &w.alphas {
            if !(a > 0.0 && a < 1.0) {
                bail!("wedge alpha {a} outside (0,1)");
            }
        }
        for &s in &w.s_values {
            if !(s > 0.0 && s.is_finite()) {
                bail!("wedge s {s} must be positive");
            }
        }
        for &t in &w.t_ladder {
            if !(t > 0.0 && t.is_finite()) {
                bail!("wedge t {t} must be positive");
            }
        }
        if let Some(p) = self.pde_config() {
            if !(p.h > 0.0) {
                bail!("pde h must be positive");
            }
            let ep = self.evolve_params()?.expect("pde enabled");
            ep.validate()?;
            let l = ep.half_width - self.spread();
            for (alpha, s, t) in self.wedge_triples() {
                let x = wedge_point(alpha, s, t, Side::PlusX)?.x;
                if x >= l {
                    bail!("wedge point x = {x:.3} (alpha={alpha}, s={s}, t={t}) is not inside the PDE domain (L = {}, margin {})", ep.half_width, self.spread());
                }
            }
        }
        Ok(())
    }

    pub fn wedge_triples(&self) -> Vec<(f64, f64, f64)> {
        let w = &self.wedge;
        let mut out = Vec::new();
        for &alpha in &w.alphas {
            for &s in &w.s_values {
                for &t in &w.t_ladder {
                    out.push((alpha, s, t));
                }
            }
        }
        out
    }

    pub fn scatter_options(&self) -> ScatterOptions {
        ScatterOptions {
            case_eps: self.tolerances.case_eps,
            reflectionless_tol: self.tolerances.reflectionless,
            assumption2_tol: self.tolerances.assumption2,
            ..ScatterOptions::default()
        }
    }

    pub fn pde_config(&self) -> Option<&PdeConfig> {
        self.pde.as_ref().filter(|p| !p.skip)
    }

    /// Margin kept between the outermost wedge point and the Dirichlet boundary.
    pub fn spread(&self) -> f64 {
        4.0 * self.profile.width.max(1.0)
    }

    /// Solver parameters; snapshot times are the t ladder entries up to the final time.
    pub fn evolve_params(&self) -> Result<Option<EvolveParams>> {
        let Some(p) = self.pde_config() else {
            return Ok(None);
        };
        let t_final = match p.t_final.or_else(|| self.wedge.t_ladder.last().copied()) {
            Some(t) => t,
            None => bail!("pde block needs t_final or a non-empty t ladder"),
        };
        let x_max = self
            .wedge_triples()
            .iter()
            .filter(|(_, _, t)| *t <= t_final)
            .map(|&(a, s, t)| wedge_point(a, s, t, Side::PlusX).map(|w| w.x))
            .collect::<nnls_core::Result<Vec<_>>>()?
            .into_iter()
            .fold(self.profile.radius, f64::max);
        let half_width = p.half_width.unwrap_or_else(|| (x_max + 2.0 * self.spread()).ceil());
        let mut ep = EvolveParams::with_spacing(half_width, p.h, t_final);
        if let Some(dt) = p.dt {
            ep.dt = dt;
        } else {
            let h = ep.spacing();
            ep.dt = C_STAB * h * h;
        }
        ep.stride = p.stride;
        ep.snapshot_times = self.wedge.t_ladder.iter().copied().filter(|&t| t < t_final).collect();
        Ok(Some(ep))
    }

    pub fn output_dir(&self, cli: Option<&Path>) -> PathBuf {
        cli.map(Path::to_path_buf).or_else(|| self.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn cache_path(&self, out: &Path) -> PathBuf {
        self.output.cache.clone().unwrap_or_else(|| out.join("spectrum.json"))
    }
}
