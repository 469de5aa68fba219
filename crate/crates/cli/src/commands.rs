use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use steklov_core::analytic::{h_star, rectangle_spectrum, RectCondition, Window};
use steklov_core::experiments::{
    check_lemma_inequalities, converge_eps, find_h_multiplicity, glued_surface, sweep_h, topology_of_attachment,
    verify_monotonicity, BaseSurface, Settings,
};
use steklov_core::mesh::{make_annulus_mesh, make_disk_mesh, make_rectangle_mesh, Mesh, MeshTopology};
use steklov_core::steklov::{solve_steklov, Condition, SpectrumReport, SteklovProblem};
use steklov_core::{Error, Result};

use crate::config::{parse_list, ConfigFile};
use crate::{BaseArgs, Cli, Command};

/// Output directory used when neither `--out`, `STEKLOV_LAB_OUT` nor the
/// config file names one.
pub const DEFAULT_OUT: &str = "steklov-lab-out";
pub const OUT_ENV: &str = "STEKLOV_LAB_OUT";

// Defaults reproduce the disk experiment used for acceptance.
const EPS: f64 = 0.15;
const H: f64 = 2.5;
const EPS_LIST: [f64; 4] = [0.3, 0.2, 0.15, 0.1];
const J_MAX: usize = 4;
const N_RADIAL: usize = 20;
const N_ANGULAR: usize = 160;
const H0: f64 = 2.0;
const H1: f64 = 3.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshKind {
    Disk,
    Annulus,
    Rectangle,
}

impl FromStr for MeshKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "disk" => Ok(MeshKind::Disk),
            "annulus" => Ok(MeshKind::Annulus),
            "rectangle" => Ok(MeshKind::Rectangle),
            _ => Err(format!("unknown mesh kind '{s}' (disk, annulus, rectangle)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CondArg(pub RectCondition);

impl FromStr for CondArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dirichlet" => Ok(CondArg(RectCondition::DirichletOnI)),
            "neumann" => Ok(CondArg(RectCondition::NeumannOnI)),
            _ => Err(format!("unknown condition '{s}' (dirichlet, neumann)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub path: String,
    pub hash: String,
    pub boundary_length: f64,
    pub labels: Vec<String>,
    pub topology: MeshTopology,
}

impl MeshSummary {
    fn new(mesh: &Mesh, path: &Path) -> Self {
        MeshSummary {
            path: path.display().to_string(),
            hash: mesh.metadata_hash(),
            boundary_length: mesh.boundary_length(),
            labels: mesh.labels().into_iter().collect(),
            topology: mesh.topology(),
        }
    }

    fn human(&self) -> String {
        let t = &self.topology;
        format!(
            "wrote {}\nvertices={} faces={} boundary_length={:.6} chi={} k={} {} genus={}\nlabels: {}\nhash {}",
            self.path,
            t.vertices,
            t.faces,
            self.boundary_length,
            t.euler_characteristic,
            t.boundary_components,
            if t.orientable { "orientable" } else { "non-orientable" },
            t.genus,
            self.labels.join(", "),
            self.hash
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectReport {
    pub epsilon: f64,
    pub h: f64,
    pub condition: RectCondition,
    pub values: Vec<f64>,
}

/// Seven significant digits.
pub fn sig7(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (6 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

struct Ctx {
    cfg: ConfigFile,
    out: PathBuf,
    json: bool,
}

impl Ctx {
    fn path(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out)
            .map_err(|source| Error::Io { path: self.out.display().to_string(), source })?;
        Ok(self.out.join(name))
    }

    fn write(&self, name: &str, text: &str) -> Result<()> {
        let p = self.path(name)?;
        std::fs::write(&p, text).map_err(|source| Error::Io { path: p.display().to_string(), source })
    }

    /// Write `<name>.json` (and `<name>.csv`), then print JSON or `human`.
    fn emit<R: Serialize>(&self, name: &str, report: &R, csv: Option<String>, human: String) -> Result<()> {
        let json = serde_json::to_string_pretty(report).map_err(|e| Error::Serialization(e.to_string()))?;
        self.write(&format!("{name}.json"), &json)?;
        if let Some(csv) = csv {
            self.write(&format!("{name}.csv"), &csv)?;
        }
        if self.json {
            println!("{json}");
        } else {
            println!("{human}");
        }
        Ok(())
    }

    fn flag(&self, cli: bool, key: &str, default: bool) -> Result<bool> {
        self.cfg.pick(cli.then_some(true), key, default)
    }

    fn base(&self, b: &BaseArgs) -> Result<BaseSurface> {
        match self.cfg.pick_opt(b.base.clone(), "base")? {
            Some(p) => Ok(BaseSurface::Fixed(Mesh::read(&p)?)),
            None => Ok(BaseSurface::unit_disk(
                self.cfg.pick(b.n_radial, "n_radial", N_RADIAL)?,
                self.cfg.pick(b.n_angular, "n_angular", N_ANGULAR)?,
            )),
        }
    }

    fn settings(&self, b: &BaseArgs, grid: Option<usize>, tol_gap: Option<f64>) -> Result<Settings> {
        let d = Settings::default();
        Ok(Settings {
            nx: self.cfg.pick(b.nx, "nx", d.nx)?,
            ny: self.cfg.pick(b.ny, "ny", d.ny)?,
            reverse_orientation: self.flag(b.reverse, "reverse", false)?,
            sweep_grid: self.cfg.pick(grid, "grid", d.sweep_grid)?,
            multiplicity_tol: self.cfg.pick(tol_gap, "tol_gap", d.multiplicity_tol)?,
            ..d
        })
    }

    /// `(h0, h1)` from the arguments; `h_star` from the computed `σ_1` of the base.
    fn window(&self, base: &BaseSurface, h0: Option<f64>, h1: Option<f64>) -> Result<Window> {
        let h0 = self.cfg.pick(h0, "h0", H0)?;
        let h1 = self.cfg.pick(h1, "h1", H1)?;
        let plain = base.plain()?;
        let sigma1 = solve_steklov(&SteklovProblem::new(&plain, 2))?.values[1];
        Ok(Window { h0, h1, h_star: h_star(sigma1)? })
    }
}

fn output_dir(cli: &Cli, cfg: &ConfigFile) -> Result<PathBuf> {
    if let Some(p) = &cli.out {
        return Ok(p.clone());
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|p| !p.is_empty()) {
        return Ok(PathBuf::from(p));
    }
    cfg.pick(None, "out", PathBuf::from(DEFAULT_OUT))
}

fn labels(cfg: &ConfigFile, cli: Vec<String>, key: &str) -> Result<Vec<String>> {
    let cli = (!cli.is_empty()).then_some(cli);
    cfg.pick_list(cli, key, Vec::new())
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::read(p)?,
        None => ConfigFile::default(),
    };
    if let Some(n) = cfg.pick_opt(cli.jobs, "jobs")? {
        if n == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {n} worker threads: {e}")))?;
    }
    let out = output_dir(&cli, &cfg)?;
    let ctx = Ctx { cfg, out, json: cli.json };
    let cfg = &ctx.cfg;

    match cli.command {
        Command::Mesh { kind, n_radial, n_angular, r_inner, eps, h, nx, ny, output } => {
            let n_radial = cfg.pick(n_radial, "n_radial", N_RADIAL)?;
            let n_angular = cfg.pick(n_angular, "n_angular", N_ANGULAR)?;
            let mesh = match cfg.pick(kind, "kind", MeshKind::Disk)? {
                MeshKind::Disk => make_disk_mesh(n_radial, n_angular, &[], 1.0)?,
                MeshKind::Annulus => make_annulus_mesh(cfg.pick(r_inner, "r_inner", 0.5)?, n_radial, n_angular)?,
                MeshKind::Rectangle => make_rectangle_mesh(
                    cfg.pick(eps, "eps", EPS)?,
                    cfg.pick(h, "h", H)?,
                    cfg.pick(nx, "nx", Settings::default().nx)?,
                    cfg.pick(ny, "ny", Settings::default().ny)?,
                )?,
            };
            let path = match output {
                Some(p) => p,
                None => ctx.path("mesh.msh")?,
            };
            mesh.write(&path)?;
            let summary = MeshSummary::new(&mesh, &path);
            ctx.emit("mesh", &summary, None, summary.human())
        }
        Command::Spectrum { mesh, count, dirichlet, neumann } => {
            let path = cfg
                .pick_opt(mesh, "mesh")?
                .ok_or_else(|| Error::InvalidArgument("no mesh given (--mesh)".into()))?;
            let m = Mesh::read(&path)?;
            let mut p = SteklovProblem::new(&m, cfg.pick(count, "count", 6)?);
            for l in labels(cfg, dirichlet, "dirichlet")? {
                p = p.with_condition(&l, Condition::Dirichlet);
            }
            for l in labels(cfg, neumann, "neumann")? {
                p = p.with_condition(&l, Condition::Neumann);
            }
            let s = solve_steklov(&p)?;
            let report = SpectrumReport::new(&p, &s);
            let mut csv = String::from("j,sigma,residual\n");
            let mut human = format!("{} ({} vertices, {} spectral)\n", path.display(), report.n_vertices, report.n_spectral);
            for (j, (v, r)) in report.eigenvalues.iter().zip(&report.residuals).enumerate() {
                writeln!(csv, "{j},{v},{r}").unwrap();
                writeln!(human, "sigma_{j} = {}  (residual {r:.1e})", sig7(*v)).unwrap();
            }
            ctx.emit("spectrum", &report, Some(csv), human.trim_end().to_string())
        }
        Command::RectAnalytic { eps, h, condition, count } => {
            let epsilon = cfg.pick(eps, "eps", EPS)?;
            let h = cfg.pick(h, "h", H)?;
            let condition = cfg.pick(condition, "condition", CondArg(RectCondition::DirichletOnI))?.0;
            let values = rectangle_spectrum(epsilon, h, condition, cfg.pick(count, "count", 4)?)?;
            let human = values.iter().map(|v| sig7(*v)).collect::<Vec<_>>().join(" ");
            ctx.emit("rect-analytic", &RectReport { epsilon, h, condition, values }, None, human)
        }
        Command::Glue { eps, h, base, output } => {
            let b = ctx.base(&base)?;
            let s = ctx.settings(&base, None, None)?;
            let mesh = glued_surface(&b, cfg.pick(eps, "eps", EPS)?, cfg.pick(h, "h", H)?, &s)?;
            let path = match output {
                Some(p) => p,
                None => ctx.path("glued.msh")?,
            };
            mesh.write(&path)?;
            let summary = MeshSummary::new(&mesh, &path);
            ctx.emit("glue", &summary, None, summary.human())
        }
        Command::ConvergeEps { h, eps_list, j, base } => {
            let eps_list = match eps_list {
                Some(s) => Some(parse_list(&s).map_err(|e| Error::InvalidArgument(format!("--eps-list: {e}")))?),
                None => None,
            };
            let eps = cfg.pick_list(eps_list, "eps_list", EPS_LIST.to_vec())?;
            let r = converge_eps(
                &ctx.base(&base)?,
                cfg.pick(h, "h", H)?,
                &eps,
                cfg.pick(j, "j", J_MAX)?,
                &ctx.settings(&base, None, None)?,
            )?;
            let mut human = format!("h = {}\ntargets: {}\n", r.h, join7(&r.targets));
            for (i, e) in r.epsilons.iter().enumerate() {
                writeln!(human, "eps = {e}: {}  max deviation {:.4e}", join7(&r.eigenvalues[i]), r.max_deviation[i])
                    .unwrap();
            }
            write!(human, "non-increasing: {}  strictly decreasing: {}", r.non_increasing, r.strictly_decreasing)
                .unwrap();
            ctx.emit("converge-eps", &r, Some(r.to_csv()?), human)
        }
        Command::SweepH { eps, h0, h1, grid, base } => {
            let b = ctx.base(&base)?;
            let w = ctx.window(&b, h0, h1)?;
            let s = ctx.settings(&base, grid, None)?;
            let r = sweep_h(&b, cfg.pick(eps, "eps", EPS)?, &w, s.sweep_grid, &s)?;
            let mut human = String::from("h        sigma_1    sigma_2    tracked  m\n");
            for i in 0..r.h.len() {
                writeln!(
                    human,
                    "{:<8.4} {:<10} {:<10} {:<8} {:.4}",
                    r.h[i],
                    sig7(r.eigenvalues[i][1]),
                    sig7(r.eigenvalues[i][2]),
                    r.tracked[i],
                    r.m[i]
                )
                .unwrap();
            }
            match r.h_eps {
                Some(h) => write!(human, "smallest gap at h = {h}").unwrap(),
                None => write!(human, "smallest gap at the window edge").unwrap(),
            }
            ctx.emit("sweep-h", &r, Some(r.to_csv()?), human)
        }
        Command::FindMultiplicity { eps, h0, h1, grid, tol_gap, base } => {
            let b = ctx.base(&base)?;
            let w = ctx.window(&b, h0, h1)?;
            let s = ctx.settings(&base, grid, tol_gap)?;
            let r = find_h_multiplicity(&b, cfg.pick(eps, "eps", EPS)?, &w, s.multiplicity_tol, &s)?;
            let human = format!(
                "h_eps = {}\nsigma_1 = {}  sigma_2 = {}  relative gap {:.3e}\nconverged: {} after {} refinements",
                r.h_eps,
                sig7(r.sigma1),
                sig7(r.sigma2),
                r.relative_gap,
                r.converged,
                r.evaluations
            );
            ctx.emit("find-multiplicity", &r, None, human)
        }
        Command::CheckLemmas { eps, h, tol_gap, base } => {
            let s = ctx.settings(&base, None, tol_gap)?;
            let r = check_lemma_inequalities(&ctx.base(&base)?, cfg.pick(eps, "eps", EPS)?, cfg.pick(h, "h", H)?, &s)?;
            let lower = match r.lower_holds {
                Some(v) => v.to_string(),
                None => "not judged (sigma_1 is simple)".into(),
            };
            let human = format!(
                "sigma_eps = {}  next = {}  relative gap {:.3e}\nneumann bound {} <= sigma_eps: {lower} (slack {:.3e})\nsigma_eps <= dirichlet bound {}: {} (slack {:.3e})",
                sig7(r.sigma_eps),
                sig7(r.sigma_eps_next),
                r.relative_gap,
                sig7(r.sigma_neumann),
                r.lower_slack,
                sig7(r.sigma_dirichlet),
                r.upper_holds,
                r.upper_slack
            );
            ctx.emit("check-lemmas", &r, None, human)
        }
        Command::VerifyMonotonicity { eps, grid, tol_gap, base } => {
            let s = ctx.settings(&base, grid, tol_gap)?;
            let r = verify_monotonicity(&ctx.base(&base)?, cfg.pick(eps, "eps", EPS)?, &s)?;
            let human = format!(
                "sigma_1*L: base {:.6}  glued {:.6}  gain {:.4e}  required {:.4e}\nverdict: {:?}",
                r.product_base,
                r.product_glued,
                r.product_glued - r.product_base,
                r.margin,
                r.verdict
            );
            ctx.emit("verify-monotonicity", &r, None, human)
        }
        Command::Topology { orientable, non_orientable, genus, k, same_component, different_components, preserve, reverse } => {
            let orientable = cfg.pick(pair(orientable, non_orientable), "orientable", true)?;
            let same = cfg.pick(pair(same_component, different_components), "same_component", true)?;
            let reverse = cfg.pick(pair(reverse, preserve), "reverse", false)?;
            let r = topology_of_attachment(orientable, cfg.pick(genus, "genus", 0)?, cfg.pick(k, "k", 1)?, same, reverse)?;
            ctx.emit("topology", &r, None, r.to_string())
        }
    }
}

/// `Some(true)` for `--x`, `Some(false)` for its opposite, `None` for neither.
fn pair(yes: bool, no: bool) -> Option<bool> {
    match (yes, no) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

fn join7(v: &[f64]) -> String {
    v.iter().map(|x| sig7(*x)).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_significant_digits() {
        assert_eq!(sig7(4.7786171), "4.778617");
        assert_eq!(sig7(17.495321), "17.49532");
        assert_eq!(sig7(0.0123456789), "0.01234568");
        assert_eq!(sig7(1234567.4), "1234567");
    }

    #[test]
    fn enum_arguments() {
        assert_eq!("annulus".parse::<MeshKind>().unwrap(), MeshKind::Annulus);
        assert!("torus".parse::<MeshKind>().is_err());
        assert_eq!("neumann".parse::<CondArg>().unwrap().0, RectCondition::NeumannOnI);
    }

    #[test]
    fn flag_pairs() {
        assert_eq!(pair(true, false), Some(true));
        assert_eq!(pair(false, true), Some(false));
        assert_eq!(pair(false, false), None);
    }
}
