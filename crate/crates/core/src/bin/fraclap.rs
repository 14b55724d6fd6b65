use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fraclap::assembly::{assemble_1d, assemble_2d, save_system, Assembly2dOptions, GramPair, Potential};
use fraclap::io::{read_json, read_mesh, write_dat, write_grid, write_json, write_mesh, EigenReportFile, FunctionFile, SolutionFile};
use fraclap::kernel::Kernel;
use fraclap::limit::{limit_study, LimitOptions};
use fraclap::mesh::{make_disk_mesh, make_interval_mesh, FemFunction, Mesh};
use fraclap::solver::{modified_mountain_pass, mountain_pass, solve_linear, SolveReport};
use fraclap::spectral::spectrum;
use fraclap::studies::{convergence_study, ground_state_guess, nodal_guess, symmetry_report, table_study, Isometry, Parity};
use fraclap::variational::ProblemSpec;
use fraclap::Error;

#[derive(Parser)]
#[command(name = "fraclap", version, about = "Fractional Laplacian Dirichlet problems: eigenpairs, ground states, nodal solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a mesh file.
    MeshGen(MeshGenArgs),
    /// Assemble and store the Gram pair.
    Assemble(AssembleArgs),
    /// Lowest eigenpairs of (-Δ)^s + V.
    Eigen(EigenArgs),
    /// Solve (-Δ)^s u + V u = f for constant f.
    SolveLinear(LinearArgs),
    /// Ground state by the Mountain-Pass Algorithm.
    GroundState(NonlinearArgs),
    /// Least-energy nodal solution by the Modified Mountain-Pass Algorithm.
    Nodal(NonlinearArgs),
    /// Errors against the explicit solution of (-Δ)^s u = 1 on (-1, 1).
    Converge(ConvergeArgs),
    /// λ-scaled solutions as p decreases to 2.
    Limit(LimitArgs),
    /// Symmetry diagnostic of a stored solution.
    Symmetry(SymmetryArgs),
    /// Energies and extrema of ground states and nodal solutions.
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainKind {
    Interval,
    Disk,
}

#[derive(Args, Clone)]
struct DomainArgs {
    #[arg(long, value_enum, default_value = "interval")]
    domain: DomainKind,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    b: f64,
    /// Node count of the interval mesh.
    #[arg(long, default_value_t = 512)]
    nodes: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Refinement level of the disk mesh.
    #[arg(long, default_value_t = 2)]
    level: usize,
    /// Read the mesh from a file instead.
    #[arg(long)]
    mesh: Option<PathBuf>,
}

impl DomainArgs {
    fn build(&self) -> fraclap::Result<Mesh> {
        if let Some(path) = &self.mesh {
            return read_mesh(path);
        }
        Ok(match self.domain {
            DomainKind::Interval => Mesh::from(make_interval_mesh(self.a, self.b, self.nodes)?),
            DomainKind::Disk => Mesh::from(make_disk_mesh(self.radius, self.level)?),
        })
    }
}

#[derive(Args, Clone)]
struct OperatorArgs {
    #[arg(long)]
    s: f64,
    /// `const:c` for V ≡ c, or `quad:c` for V = c|x|².
    #[arg(long, default_value = "const:0")]
    potential: String,
}

impl OperatorArgs {
    fn potential(&self) -> fraclap::Result<Option<Box<Potential>>> {
        let bad = || Error::Domain(format!("unknown potential `{}`", self.potential));
        let (kind, value) = self.potential.split_once(':').ok_or_else(bad)?;
        let c: f64 = value.parse().map_err(|_| bad())?;
        if !c.is_finite() {
            return Err(bad());
        }
        Ok(match kind {
            "const" if c == 0.0 => None,
            "const" => Some(Box::new(move |_| c)),
            "quad" => Some(Box::new(move |x: [f64; 2]| c * (x[0] * x[0] + x[1] * x[1]))),
            _ => return Err(bad()),
        })
    }

    fn gram(&self, mesh: Mesh) -> fraclap::Result<GramPair> {
        let v = self.potential()?;
        let kernel = Kernel::new(mesh.dim(), self.s)?;
        match &mesh {
            Mesh::Interval(m) => assemble_1d(m, &kernel, v.as_deref()),
            Mesh::Triangles(m) => assemble_2d(m, &kernel, v.as_deref(), &Assembly2dOptions::default()),
        }
    }
}

#[derive(Args)]
struct MeshGenArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AssembleArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    op: OperatorArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    op: OperatorArgs,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LinearArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    op: OperatorArgs,
    /// Constant right-hand side.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    f: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NonlinearArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    op: OperatorArgs,
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    s: f64,
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512,1024")]
    sizes: Vec<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LimitArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    op: OperatorArgs,
    /// 1 for ground states, 2 for nodal solutions.
    #[arg(long, default_value_t = 1)]
    index: usize,
    #[arg(long, value_delimiter = ',', default_value = "3,2.5,2.1,2.05")]
    p_sequence: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum IsometryKind {
    /// x ↦ -x (interval: about its midpoint).
    Reflect,
    /// (x, y) ↦ (x, -y).
    ReflectY,
    /// Rotation by 90 degrees.
    Rotate90,
}

#[derive(Args)]
struct SymmetryArgs {
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, value_enum, default_value = "reflect")]
    isometry: IsometryKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.4,0.7,0.9")]
    s_values: Vec<f64>,
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    #[arg(long, default_value_t = 512)]
    nodes: usize,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long)]
    out: PathBuf,
}

fn prepare(out: &Path) -> fraclap::Result<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

fn dat(mesh: &Mesh, coeffs: &[f64], path: &Path) -> fraclap::Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match mesh {
        Mesh::Interval(_) => write_dat(mesh, coeffs, w),
        Mesh::Triangles(_) => write_grid(mesh, coeffs, w),
    }
}

fn save_solution(name: &str, out: &Path, gram: &GramPair, p: f64, report: &SolveReport) -> fraclap::Result<()> {
    prepare(out)?;
    write_mesh(gram.mesh(), &out.join("mesh.json"))?;
    let file = SolutionFile {
        mesh: "mesh.json".into(),
        coefficients: report.solution.coeffs().to_vec(),
        p,
        s: gram.kernel().s(),
        energy: report.energy,
        grad_norm: report.final_gradient_norm,
    };
    write_json(&file, &out.join(format!("{name}.json")))?;
    dat(gram.mesh(), report.solution.coeffs(), &out.join(format!("{name}.dat")))?;
    println!(
        "{name}: energy {:.6} max {:.6} min {:.6} iterations {} gradient {:.3e}",
        report.energy,
        report.solution.max(),
        report.solution.min(),
        report.iterations,
        report.final_gradient_norm
    );
    eprintln!("wall time {:.3} s", report.wall_time);
    Ok(())
}

fn run(cli: Cli) -> fraclap::Result<()> {
    match cli.command {
        Command::MeshGen(a) => {
            let mesh = a.domain.build()?;
            if let Some(dir) = a.out.parent() {
                prepare(dir)?;
            }
            write_mesh(&mesh, &a.out)?;
            println!("{} vertices, {} unknowns", mesh.vertex_count(), mesh.dof_count());
        }
        Command::Assemble(a) => {
            let gram = a.op.gram(a.domain.build()?)?;
            prepare(&a.out)?;
            write_mesh(gram.mesh(), &a.out.join("mesh.json"))?;
            save_system(&gram, "mesh.json", &a.out.join("system.json"))?;
            println!("assembled {} unknowns", gram.dof_count());
        }
        Command::Eigen(a) => {
            let gram = a.op.gram(a.domain.build()?)?;
            let spec = spectrum(&gram, a.k, a.tol)?;
            prepare(&a.out)?;
            write_mesh(gram.mesh(), &a.out.join("mesh.json"))?;
            let mut phis = Vec::new();
            for (k, pair) in spec.pairs.iter().enumerate() {
                let name = format!("phi_{}", k + 1);
                write_json(
                    &FunctionFile {
                        mesh: "mesh.json".into(),
                        coefficients: pair.phi.coeffs().to_vec(),
                    },
                    &a.out.join(format!("{name}.json")),
                )?;
                dat(gram.mesh(), pair.phi.coeffs(), &a.out.join(format!("{name}.dat")))?;
                phis.push(format!("{name}.json"));
                println!("λ_{} = {:.10} (residual {:.2e})", k + 1, pair.lambda, pair.residual);
            }
            if spec.second_multiple {
                println!("λ_2 appears to be multiple");
            }
            write_json(
                &EigenReportFile {
                    lambdas: spec.pairs.iter().map(|p| p.lambda).collect(),
                    residuals: spec.pairs.iter().map(|p| p.residual).collect(),
                    phis,
                    second_multiple: spec.second_multiple,
                },
                &a.out.join("eigen.json"),
            )?;
        }
        Command::SolveLinear(a) => {
            let gram = a.op.gram(a.domain.build()?)?;
            let f = a.f;
            let u = solve_linear(&gram, |_| f)?;
            prepare(&a.out)?;
            write_mesh(gram.mesh(), &a.out.join("mesh.json"))?;
            write_json(
                &FunctionFile {
                    mesh: "mesh.json".into(),
                    coefficients: u.coeffs().to_vec(),
                },
                &a.out.join("linear.json"),
            )?;
            dat(gram.mesh(), u.coeffs(), &a.out.join("linear.dat"))?;
            println!("u(0) = {:.10}", u.evaluate([0.0, 0.0]));
        }
        Command::GroundState(a) => {
            let gram = Arc::new(a.op.gram(a.domain.build()?)?);
            let spec = ProblemSpec::new(gram.clone(), a.p, 1.0)?;
            let r = mountain_pass(&spec, &ground_state_guess(gram.mesh()), a.tol, a.max_iter)?;
            save_solution("ground_state", &a.out, &gram, a.p, &r)?;
        }
        Command::Nodal(a) => {
            let gram = Arc::new(a.op.gram(a.domain.build()?)?);
            let spec = ProblemSpec::new(gram.clone(), a.p, 1.0)?;
            let r = modified_mountain_pass(&spec, &nodal_guess(gram.mesh()), a.tol, a.max_iter)?;
            save_solution("nodal", &a.out, &gram, a.p, &r)?;
        }
        Command::Converge(a) => {
            let t = convergence_study(a.s, &a.sizes)?;
            prepare(&a.out)?;
            let mut h = String::new();
            let mut l2 = String::new();
            println!("{:>6} {:>14} {:>14} {:>14}", "M", "H error", "H (Galerkin)", "L2 error");
            for r in &t.rows {
                println!("{:>6} {:>14.6e} {:>14.6e} {:>14.6e}", r.nodes, r.h_error, r.h_error_galerkin, r.l2_error);
                h.push_str(&format!("{:.6} {:.6}\n", (r.nodes as f64).log10(), r.h_error.log10()));
                l2.push_str(&format!("{:.6} {:.6}\n", (r.nodes as f64).log10(), r.l2_error.log10()));
            }
            println!("slopes: H {:.3} (Galerkin {:.3}), L2 {:.3}", t.h_slope, t.h_slope_galerkin, t.l2_slope);
            fs::write(a.out.join(format!("err_norm_{}.dat", a.s)), h)?;
            fs::write(a.out.join(format!("err_norm_L2_{}.dat", a.s)), l2)?;
            let rows: Vec<_> = t
                .rows
                .iter()
                .map(|r| serde_json::json!({"M": r.nodes, "h_error": r.h_error, "h_error_galerkin": r.h_error_galerkin, "l2_error": r.l2_error, "center_value": r.center_value}))
                .collect();
            write_json(
                &serde_json::json!({"s": a.s, "rows": rows, "h_slope": t.h_slope, "h_slope_galerkin": t.h_slope_galerkin, "l2_slope": t.l2_slope}),
                &a.out.join("converge.json"),
            )?;
        }
        Command::Limit(a) => {
            let gram = Arc::new(a.op.gram(a.domain.build()?)?);
            let opts = LimitOptions {
                tol: a.tol,
                ..Default::default()
            };
            let r = limit_study(gram.clone(), a.index, &a.p_sequence, &opts)?;
            prepare(&a.out)?;
            r.write_csv(BufWriter::new(File::create(a.out.join(format!("limit_{}.csv", a.index)))?))?;
            for (k, p) in r.p_sequence.iter().enumerate() {
                println!(
                    "p = {p}: energy {:.6e}, angle {:.4}°, limit residual {:.3e}",
                    r.energies[k],
                    r.angles[k].to_degrees(),
                    r.limit_residuals[k]
                );
                if let Mesh::Interval(_) = gram.mesh().as_ref() {
                    // pointwise ratio u_p / φ_i, for plotting
                    let basis = r.basis[0].coeffs();
                    let ratio: Vec<f64> = r.solutions[k]
                        .coeffs()
                        .iter()
                        .zip(basis)
                        .map(|(u, e)| if e.abs() > 1e-12 { u / e } else { 0.0 })
                        .collect();
                    dat(gram.mesh(), &ratio, &a.out.join(format!("ratio_{}_{p}.dat", a.index)))?;
                }
            }
        }
        Command::Symmetry(a) => {
            let sol: SolutionFile = read_json(&a.solution)?;
            let dir = a.solution.parent().unwrap_or(Path::new("."));
            let mesh = Arc::new(read_mesh(&dir.join(&sol.mesh))?);
            let gram = OperatorArgs {
                s: sol.s,
                potential: "const:0".into(),
            }
            .gram(mesh.as_ref().clone())?;
            let u = FemFunction::new(gram.mesh().clone(), sol.coefficients)?;
            let iso = match a.isometry {
                IsometryKind::Reflect => Isometry::Reflection,
                IsometryKind::ReflectY => Isometry::ReflectY,
                IsometryKind::Rotate90 => Isometry::Rotation(std::f64::consts::FRAC_PI_2),
            };
            let r = symmetry_report(&gram, &u, iso)?;
            let parity = match r.parity {
                Parity::Symmetric => "symmetric",
                Parity::Antisymmetric => "antisymmetric",
            };
            println!("ρ+ = {:.3e}, ρ- = {:.3e}: {parity} (residual {:.3e})", r.rho_plus, r.rho_minus, r.residual());
            if let Some(out) = a.out {
                write_json(
                    &serde_json::json!({"rho_plus": r.rho_plus, "rho_minus": r.rho_minus, "classification": parity, "exact_permutation": r.exact}),
                    &out,
                )?;
            }
        }
        Command::Table(a) => {
            let rows = table_study(&a.s_values, a.p, a.nodes, a.tol, a.max_iter)?;
            prepare(&a.out)?;
            println!("{:>5} {:>10} {:>8} {:>10} {:>8} {:>8}", "s", "E(u1)", "max u1", "E(u2)", "max u2", "min u2");
            let mut json = Vec::new();
            for r in &rows {
                println!(
                    "{:>5} {:>10.4} {:>8.4} {:>10.4} {:>8.4} {:>8.4}",
                    r.s,
                    r.ground_energy(),
                    r.ground_max(),
                    r.nodal_energy(),
                    r.nodal_max(),
                    r.nodal_min()
                );
                let mesh = r.ground.solution.mesh();
                dat(mesh, r.ground.solution.coeffs(), &a.out.join(format!("u1D_gs_{}_{}.dat", r.s, a.p)))?;
                dat(mesh, r.nodal.solution.coeffs(), &a.out.join(format!("u1D_nodal_{}_{}.dat", r.s, a.p)))?;
                json.push(serde_json::json!({
                    "s": r.s, "ground_energy": r.ground_energy(), "ground_max": r.ground_max(),
                    "nodal_energy": r.nodal_energy(), "nodal_max": r.nodal_max(), "nodal_min": r.nodal_min(),
                }));
            }
            write_json(&serde_json::json!({"p": a.p, "nodes": a.nodes, "rows": json}), &a.out.join("table.json"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) | Error::Format(_) | Error::Io(_) => 2,
                Error::Convergence { .. } | Error::Degenerate(_) => 3,
                Error::Indefinite { .. } | Error::Singular(_) => 4,
            })
        }
    }
}
