//! The five experiment suites behind the CLI: Cheeger contrast, recurrence
//! profiles, supported-point counting, triangulation properties and
//! distributional-limit diagnostics.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bslimit::{self, SamplingMode};
use crate::config::ExperimentConfig;
use crate::embedding::{self, RotationSystem};
use crate::error::{Error, Result};
use crate::genfam::{self, FamilySpec};
use crate::graph::Graph;
use crate::pointsupport::{self, CenterMode, FiniteMetric};
use crate::potential;
use crate::spectral::{self, LaplacianKind};
use crate::svg;

/// Rectangular result table with string cells for deterministic output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch in {}", self.title);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub plot: bool,
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Table>> {
    match cfg.experiment.as_str() {
        "e1" => run_e1_cheeger_contrast(cfg, opts),
        "e2" => run_e2_recurrence(cfg, opts),
        "e3" => run_e3_supported_points(cfg, opts),
        "e4" => run_e4_triangulation(cfg, opts),
        "e5" => run_e5_bs_convergence(cfg, opts),
        other => Err(Error::InvalidParameter(format!("unknown experiment id {other:?}"))),
    }
}

fn write_artifact(opts: &RunOptions, name: &str, content: &str) -> Result<()> {
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), content)?;
    }
    Ok(())
}

/// Explicit half-grid column cut: vertices in the left ⌊n/2⌋ columns of an
/// n x n grid (vertex ids i*n + j).
pub fn grid_column_cut(n: usize) -> Vec<usize> {
    let half = n / 2;
    (0..n).flat_map(|i| (0..half).map(move |j| i * n + j)).collect()
}

fn cut_value(g: &Graph, witness: &[usize]) -> f64 {
    spectral::boundary_edges(g, witness) as f64 / witness.len() as f64
}

const SWEEP_SIZE_CAP: usize = 700;

/// E1: sweep-cut upper bounds on h for sublinear-genus grid families against
/// spectral lower bounds for random regular graphs.
pub fn run_e1_cheeger_contrast(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Table>> {
    let mut table = Table::new("e1_cheeger_contrast", &["family", "n", "h_upper", "h_lower"]);
    for fam in &cfg.families {
        let (n, g) = match *fam {
            FamilySpec::PlanarGrid { n } => (n, genfam::planar_grid(n)?.0),
            FamilySpec::TorusGrid { n } => (n, genfam::torus_grid(n)?.0),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "e1 grid families must be planar_grid or torus_grid, got {}",
                    fam.label()
                )))
            }
        };
        let mut h_upper = cut_value(&g, &grid_column_cut(n));
        if g.vertex_count() <= SWEEP_SIZE_CAP {
            let fiedler = spectral::fiedler_vector(&g, LaplacianKind::Combinatorial)?;
            let sweep = spectral::sweep_cut(&g, &fiedler)?;
            h_upper = h_upper.min(sweep.value);
        }
        let h_lower = spectral::lambda2(&g, LaplacianKind::Combinatorial)? / 2.0;
        table.push(vec![fam.label(), n.to_string(), h_upper.to_string(), h_lower.to_string()]);
        write_artifact(opts, &format!("e1_{}.edges", fam.label()), &g.to_edge_list_text())?;
    }
    let reg_n = cfg.sizes.first().copied().unwrap_or(200);
    let mut reg =
        Table::new("e1_random_regular", &["family", "n", "seed", "h_lower", "certified"]);
    for &seed in &cfg.seeds {
        let g = genfam::random_regular(reg_n, 3, seed)?;
        let cert = spectral::expander_certify(&g, cfg.lambda2_floor)?;
        reg.push(vec![
            format!("random_regular({reg_n},3)"),
            reg_n.to_string(),
            seed.to_string(),
            cert.bound.to_string(),
            cert.certified.to_string(),
        ]);
    }
    write_artifact(opts, "e1_grids.csv", &table.to_csv())?;
    write_artifact(opts, "e1_random_regular.csv", &reg.to_csv())?;
    Ok(vec![table, reg])
}

/// E2: capacity profiles along ball exhaustions plus Monte-Carlo escape
/// probabilities checked against the electrical identity.
pub fn run_e2_recurrence(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Table>> {
    let mut prof = Table::new("e2_profiles", &["family", "r", "cap", "verdict"]);
    let mut esc = Table::new(
        "e2_escape",
        &["family", "boundary_r", "estimate", "std_error", "predicted"],
    );
    let mut plot_series = Vec::new();
    for fam in &cfg.families {
        let g = fam.generate()?;
        let root = 0usize;
        let ecc = g.eccentricity(root)?;
        let radii: Vec<usize> = cfg.radii.iter().copied().filter(|&r| r >= 2 && r <= ecc).collect();
        if radii.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "no usable radii for {} (eccentricity {ecc})",
                fam.label()
            )));
        }
        let rep = potential::parabolicity_profile(&g, root, &radii, cfg.p)?;
        for (&r, &cap) in rep.radii.iter().zip(&rep.caps) {
            prof.push(vec![fam.label(), r.to_string(), cap.to_string(), rep.verdict.clone()]);
        }
        plot_series.push(svg::Series {
            label: fam.label(),
            points: rep
                .radii
                .iter()
                .zip(&rep.caps)
                .map(|(&r, &c)| ((r as f64).ln(), c))
                .collect(),
        });
        write_artifact(
            opts,
            &format!("e2_{}.profile.json", fam.label()),
            &serde_json::to_string_pretty(&rep).expect("profile serializes"),
        )?;
        if cfg.trials > 0 {
            let r_b = *radii.last().unwrap();
            let dist = g.distances_from(root)?;
            let boundary: Vec<usize> = (0..g.vertex_count())
                .filter(|&v| dist[v].map_or(false, |d| d >= r_b))
                .collect();
            let seed = cfg.seeds.first().copied().unwrap_or(0);
            let (est, se) =
                potential::escape_probability_mc(&g, root, &boundary, cfg.trials, seed)?;
            let r_eff = potential::effective_resistance(&g, &[root], &boundary)?;
            let predicted = 1.0 / (g.degree(root) as f64 * r_eff);
            esc.push(vec![
                fam.label(),
                r_b.to_string(),
                est.to_string(),
                se.to_string(),
                predicted.to_string(),
            ]);
        }
    }
    if opts.plot {
        let plot = svg::line_plot("cap_2 against log r", "ln r", "cap_2", &plot_series);
        write_artifact(opts, "e2_profiles.svg", &plot)?;
    }
    write_artifact(opts, "e2_profiles.csv", &prof.to_csv())?;
    write_artifact(opts, "e2_escape.csv", &esc.to_csv())?;
    Ok(vec![prof, esc])
}

/// Uniform points in the unit square, seeded.
pub fn uniform_square(n: usize, seed: u64) -> FiniteMetric {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    FiniteMetric::from_points(2, pts).expect("generated coordinates are valid")
}

/// E3: s * count / |C| matrix over sizes and s, with a stability report.
pub fn run_e3_supported_points(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Table>> {
    let delta = cfg.deltas.first().copied().unwrap_or(1.0 / 3.0);
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let mut table =
        Table::new("e3_supported", &["size", "s", "count", "s_count_over_size"]);
    let mut stab = Table::new("e3_stability", &["size", "max_s_count_over_size"]);
    let mut maxima = Vec::new();
    for (i, &n) in cfg.sizes.iter().enumerate() {
        let c = uniform_square(n, seed.wrapping_add(i as u64));
        let profile = pointsupport::support_profile(&c, delta, CenterMode::Necessary)?;
        let mut max_norm: f64 = 0.0;
        for &s in &cfg.s_values {
            let count = profile.iter().filter(|&&x| x >= s).count();
            let norm = s as f64 * count as f64 / n as f64;
            max_norm = max_norm.max(norm);
            table.push(vec![n.to_string(), s.to_string(), count.to_string(), norm.to_string()]);
        }
        maxima.push((n as f64, max_norm));
        stab.push(vec![n.to_string(), max_norm.to_string()]);
        write_artifact(opts, &format!("e3_points_{n}.txt"), &c.to_point_cloud_text()?)?;
    }
    if maxima.len() >= 2 {
        let xs: Vec<f64> = maxima.iter().map(|m| m.0.ln()).collect();
        let ys: Vec<f64> = maxima.iter().map(|m| m.1.max(1e-300).ln()).collect();
        let slope = fit_line(&xs, &ys).0;
        stab.push(vec!["log_fit_slope".into(), slope.to_string()]);
    }
    write_artifact(opts, "e3_supported.csv", &table.to_csv())?;
    write_artifact(opts, "e3_stability.csv", &stab.to_csv())?;
    Ok(vec![table, stab])
}

/// Seeded random triangulation-fill instance: a connected simple graph with
/// minimum degree 2 (so all faces have length >= 3), valence <= 6, at most
/// 40 vertices, under a uniformly random rotation system.
pub fn random_fill_instance(seed: u64) -> Result<RotationSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(5..=40);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let mut deg = vec![2usize; n];
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || deg[u] >= 6 || deg[v] >= 6 {
            continue;
        }
        if edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)) {
            continue;
        }
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    let g = Graph::new(n, &edges)?;
    RotationSystem::random(&g, &mut rng)
}

/// The five triangulation-fill postconditions, each checked independently.
#[derive(Debug, Clone, Copy, Default)]
pub struct FillCheck {
    pub all_triangles: bool,
    pub vertices_preserved: bool,
    pub edges_preserved: bool,
    pub valence_bounded: bool,
    pub genus_preserved: bool,
}

impl FillCheck {
    pub fn all(&self) -> bool {
        self.all_triangles
            && self.vertices_preserved
            && self.edges_preserved
            && self.valence_bounded
            && self.genus_preserved
    }
}

pub fn check_fill(input: &RotationSystem, output: &RotationSystem) -> Result<FillCheck> {
    let mut c = FillCheck::default();
    c.all_triangles = output.trace_faces().lengths().iter().all(|&l| l == 3);
    c.vertices_preserved = output.vertex_count() == input.vertex_count();
    let in_g = input.underlying_graph();
    let out_g = output.underlying_graph();
    c.edges_preserved = out_g.edges().len() >= in_g.edges().len()
        && out_g.edges()[..in_g.edge_count()] == *in_g.edges();
    c.valence_bounded =
        (0..input.vertex_count()).all(|v| output.valence(v) <= 3 * input.valence(v));
    c.genus_preserved = output.euler_genus()? == input.euler_genus()?;
    Ok(c)
}

/// E4: randomized triangulation property suite plus metric stretch rows.
pub fn run_e4_triangulation(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Table>> {
    let trials = if cfg.trials > 0 { cfg.trials } else { 200 };
    let base_seed = cfg.seeds.first().copied().unwrap_or(0);
    let mut fails = [0usize; 5];
    let mut passes = 0usize;
    let mut max_stretch: f64 = 1.0;
    for t in 0..trials {
        let rs = random_fill_instance(base_seed.wrapping_add(t as u64))?;
        let filled = embedding::triangulate_fill(&rs, 6)?;
        let check = check_fill(&rs, &filled)?;
        for (i, ok) in [
            check.all_triangles,
            check.vertices_preserved,
            check.edges_preserved,
            check.valence_bounded,
            check.genus_preserved,
        ]
        .iter()
        .enumerate()
        {
            if !ok {
                fails[i] += 1;
            }
        }
        if check.all() {
            passes += 1;
        }
        let sub = rs.underlying_graph();
        let sup = filled.underlying_graph();
        let inclusion: Vec<usize> = (0..sub.vertex_count()).collect();
        let stretch = embedding::metric_stretch(&sub, &sup, &inclusion, 0, 0)?;
        max_stretch = max_stretch.max(stretch.sub_over_super).max(stretch.super_over_sub);
    }
    let mut table = Table::new("e4_triangulation", &["property", "passes", "fails"]);
    let names =
        ["all_triangles", "vertices_preserved", "edges_preserved", "valence_bounded", "genus_preserved"];
    for (name, &f) in names.iter().zip(&fails) {
        table.push(vec![name.to_string(), (trials - f).to_string(), f.to_string()]);
    }
    table.push(vec!["all_five".into(), passes.to_string(), (trials - passes).to_string()]);

    let mut stretch_t = Table::new("e4_stretch", &["case", "stretch"]);
    stretch_t.push(vec!["max_over_suite".into(), max_stretch.to_string()]);
    // identity on a triangulation: stretch 1
    let tri = embedding::triangulate_fill(&genfam::planar_grid(3)?.1, 4)?;
    let tg = tri.underlying_graph();
    let idmap: Vec<usize> = (0..tg.vertex_count()).collect();
    let ident = embedding::metric_stretch(&tg, &tg, &idmap, 0, 0)?;
    stretch_t.push(vec![
        "identity_on_triangulation".into(),
        ident.sub_over_super.max(ident.super_over_sub).to_string(),
    ]);
    // C4 against its fill: opposite corners collapse from 2 to 1
    let c4 = genfam::cycle(4)?;
    let c4fill = embedding::triangulate_fill(&RotationSystem::from_graph_default(&c4)?, 2)?;
    let c4sup = c4fill.underlying_graph();
    let c4map: Vec<usize> = (0..4).collect();
    let st = embedding::metric_stretch(&c4, &c4sup, &c4map, 0, 0)?;
    stretch_t.push(vec!["c4_fill".into(), st.sub_over_super.to_string()]);
    write_artifact(opts, "e4_triangulation.csv", &table.to_csv())?;
    write_artifact(opts, "e4_stretch.csv", &stretch_t.to_csv())?;
    Ok(vec![table, stretch_t])
}

/// Fraction of vertices whose depth-r ball is a tree.
pub fn tree_ball_fraction(g: &Graph, r: usize) -> Result<f64> {
    let n = g.vertex_count();
    let mut trees = 0usize;
    for v in 0..n {
        let b = g.ball(v, r)?;
        if b.graph.edge_count() + 1 == b.graph.vertex_count() {
            trees += 1;
        }
    }
    Ok(trees as f64 / n as f64)
}

/// E5: TV matrices for grid and path sequences, tree-ball fractions for
/// random regular graphs.
pub fn run_e5_bs_convergence(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Table>> {
    let r = cfg.radii.first().copied().unwrap_or(2);
    let mut tv_t = Table::new("e5_tv", &["pair", "r", "tv", "expected"]);
    for &n in &cfg.sizes {
        if n < 2 * r + 2 {
            return Err(Error::InvalidParameter(format!(
                "torus size {n} too small for radius {r}"
            )));
        }
        let a = bslimit::neighborhood_distribution(&genfam::torus_grid(n)?.0, r, SamplingMode::Exact)?;
        let b =
            bslimit::neighborhood_distribution(&genfam::torus_grid(2 * n)?.0, r, SamplingMode::Exact)?;
        let tv = bslimit::tv_distance(&a, &b)?;
        tv_t.push(vec![format!("torus({n})|torus({})", 2 * n), r.to_string(), tv.to_string(), "0".into()]);
    }
    for &n in &cfg.sizes {
        let n = 8 * n;
        let a = bslimit::neighborhood_distribution(&genfam::path(n)?, r, SamplingMode::Exact)?;
        let b = bslimit::neighborhood_distribution(&genfam::path(2 * n)?, r, SamplingMode::Exact)?;
        let tv = bslimit::tv_distance(&a, &b)?;
        tv_t.push(vec![
            format!("path({n})|path({})", 2 * n),
            r.to_string(),
            tv.to_string(),
            (r as f64 / n as f64).to_string(),
        ]);
    }
    let mut tree_t =
        Table::new("e5_tree_balls", &["family", "seed", "fraction", "floor", "above_floor"]);
    for &seed in &cfg.seeds {
        let g = genfam::random_regular(1000, 3, seed)?;
        let frac = tree_ball_fraction(&g, r)?;
        tree_t.push(vec![
            "random_regular(1000,3)".into(),
            seed.to_string(),
            frac.to_string(),
            cfg.tree_ball_floor.to_string(),
            (frac >= cfg.tree_ball_floor).to_string(),
        ]);
    }
    write_artifact(opts, "e5_tv.csv", &tv_t.to_csv())?;
    write_artifact(opts, "e5_tree_balls.csv", &tree_t.to_csv())?;
    Ok(vec![tv_t, tree_t])
}

/// Least-squares line fit returning (slope, intercept, r_squared).
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return (0.0, my, if syy == 0.0 { 1.0 } else { 0.0 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}
