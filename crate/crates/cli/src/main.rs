use clap::{Args, Parser, Subcommand, ValueEnum};
use rotelast::energy::{
    compare_gradients, directional_derivative_check, ElasticModuli, Functional, GradientMethod, TimeNeighbours,
};
use rotelast::fieldio::{read_field, render_arrow_svg, write_field, AnyField, ArrowScene};
use rotelast::grid::{field_exp, synthesize_smooth_field, Axis, Boundary, GridSpec};
use rotelast::material::derived_properties;
use rotelast::radial::bisect_j0_zero;
use rotelast::wavesim::{pulse_grid, simulate, InitialCondition, WaveConfig, WaveMode};
use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

mod suites;

type CliResult = Result<bool, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "rotelast", version, about = "Rotational elasticity laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print its convergence table.
    Validate(ValidateArgs),
    /// Derived material properties of a set of moduli.
    Material(MaterialArgs),
    /// Run the single-axis wave solver and dump snapshots as CSV.
    Simulate(SimulateArgs),
    /// Arrow plot of the radial standing mode `v0 J0(k r)`.
    Radial(RadialArgs),
    /// Compare analytic and finite-difference energy gradients.
    Gradcheck(GradcheckArgs),
    /// Arrow plot of a planar field dump.
    Render(RenderArgs),
}

#[derive(Args)]
struct Moduli {
    #[arg(long, default_value_t = 5.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 1.0)]
    c3: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
}

impl Moduli {
    fn build(&self) -> Result<ElasticModuli, Box<dyn Error>> {
        Ok(ElasticModuli::new(self.c1, self.c2, self.c3, self.rho)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Material,
    Waves,
    Radial,
    All,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "identities")]
    suite: Suite,
    /// Nodes per axis of the finest periodic grid in the identity suite.
    #[arg(long, default_value_t = 32)]
    grid: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct MaterialArgs {
    #[command(flatten)]
    moduli: Moduli,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Transversal,
    Longitudinal,
}

impl From<ModeArg> for WaveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Transversal => WaveMode::Transversal2D,
            ModeArg::Longitudinal => WaveMode::Longitudinal1D,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialArg {
    Pulse,
    Radial,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    moduli: Moduli,
    #[arg(long, value_enum, default_value = "transversal")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "pulse")]
    initial: InitialArg,
    /// Nodes along the propagation axis (both planar axes for radial runs).
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    spacing: f64,
    /// Time step; defaults to the largest stable one.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = 5)]
    saves: usize,
    /// Gaussian width of the pulse.
    #[arg(long, default_value_t = 0.25)]
    width: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value = "pi", value_parser = parse_real)]
    v0: f64,
    /// Directory receiving `snapshot_NNNN.csv` and `energy.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RadialArgs {
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value = "pi", value_parser = parse_real)]
    v0: f64,
    /// Half width of the square scene.
    #[arg(long, default_value_t = 10.0)]
    extent: f64,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    #[arg(long)]
    render: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionalArg {
    V1,
    V2,
    Action,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Periodic,
    Dirichlet,
}

#[derive(Args)]
struct GradcheckArgs {
    #[command(flatten)]
    moduli: Moduli,
    #[arg(long, value_enum, default_value = "v1")]
    functional: FunctionalArg,
    #[arg(long, default_value_t = 8)]
    grid: usize,
    #[arg(long, value_enum, default_value = "dirichlet")]
    boundary: BoundaryArg,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    directions: usize,
    #[arg(long, default_value_t = 0.8)]
    amplitude: f64,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Args)]
struct RenderArgs {
    /// Scalar dump (angle per node) or vector dump (z component used) with
    /// a single z layer.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    glyph_length: f64,
    #[arg(long, default_value_t = 40.0)]
    pixels_per_unit: f64,
}

/// Accepts plain numbers and multiples of pi such as `pi`, `-pi`, `2pi`,
/// `pi/2`.
fn parse_real(s: &str) -> Result<f64, String> {
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let t = s.trim().to_ascii_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| format!("bad denominator in '{s}'"))?),
        None => (t.clone(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(|| format!("'{s}' is not a number"))?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("bad coefficient in '{s}'"))?,
    };
    Ok(c * std::f64::consts::PI / den)
}

fn material(args: &MaterialArgs) -> CliResult {
    let m = args.moduli.build()?;
    let report = derived_properties(&m)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("lambda          {:.16e}", report.lambda);
        println!("mu              {:.16e}", report.mu);
        println!("sigma           {:.16e}", report.sigma);
        println!("youngs_modulus  {:.16e}", report.youngs_modulus);
        println!("v_t             {:.16e}", report.v_t);
        println!("v_l             {:.16e}", report.v_l);
        println!("nu              {:.16e}", report.nu);
        let class = serde_json::to_value(report.class)?;
        println!("class           {}{}", class.as_str().unwrap_or("?"), if report.boundary_flag { " (boundary)" } else { "" });
    }
    Ok(true)
}

fn simulate_cmd(args: &SimulateArgs) -> CliResult {
    let m = args.moduli.build()?;
    let mode = WaveMode::from(args.mode);
    let (grid, initial) = match args.initial {
        InitialArg::Pulse => {
            let grid = pulse_grid(mode, args.nodes, args.spacing)?;
            let axis = mode.propagation_axis();
            let mut center = [0.0; 3];
            center[axis.index()] = grid.extent(axis) / 2.0;
            (grid, InitialCondition::GaussianPulse { center, width: args.width, amplitude: 1.0, axis: Some(axis) })
        }
        InitialArg::Radial => {
            if !matches!(mode, WaveMode::Transversal2D) {
                return Err("radial initial data needs --mode transversal".into());
            }
            let grid = GridSpec::new([args.nodes, args.nodes, 1], args.spacing, Boundary::DirichletIdentity)?;
            (grid, InitialCondition::RadialHalfTurn { k: args.k, v0: args.v0 })
        }
    };
    let mut config = WaveConfig { moduli: m, grid, dt: 1.0, steps: args.steps, saves: args.saves, mode, initial };
    config.dt = match args.dt {
        Some(dt) => dt,
        None => config.max_dt()?,
    };
    let traj = simulate(&config)?;
    fs::create_dir_all(&args.out)?;
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let file = fs::File::create(args.out.join(format!("snapshot_{i:04}.csv")))?;
        write_field(snap, std::io::BufWriter::new(file))?;
    }
    let mut energy = std::io::BufWriter::new(fs::File::create(args.out.join("energy.csv"))?);
    writeln!(energy, "time,energy")?;
    for (t, e) in traj.times.iter().zip(&traj.energy_series) {
        writeln!(energy, "{t:.16e},{e:.16e}")?;
    }
    energy.flush()?;
    println!("speed         {:.6e}", config.speed()?);
    println!("dt            {:.6e}", config.dt);
    println!("steps         {}", config.steps);
    println!("snapshots     {}", traj.snapshots.len());
    println!("energy drift  {:.3e}", traj.energy_drift());
    Ok(true)
}

fn radial(args: &RadialArgs) -> CliResult {
    if !(args.k > 0.0 && args.spacing > 0.0 && args.extent > 0.0) {
        return Err("k, spacing and extent must be positive".into());
    }
    let scene = ArrowScene::radial_mode(args.k, args.v0, args.extent, args.spacing);
    let centre = scene.glyphs().into_iter().min_by(|a, b| a.x.hypot(a.y).total_cmp(&b.x.hypot(b.y)));
    if let Some(g) = centre {
        println!("centre angle  {:.12}", g.angle);
    }
    let z = bisect_j0_zero(2.0, 3.0, 1e-14)?;
    println!("first zero    r = {:.12}", z / args.k);
    if let Some(path) = &args.render {
        fs::write(path, render_arrow_svg(&scene))?;
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn gradcheck(args: &GradcheckArgs) -> CliResult {
    let m = args.moduli.build()?;
    let boundary = match args.boundary {
        BoundaryArg::Periodic => Boundary::Periodic,
        BoundaryArg::Dirichlet => Boundary::DirichletIdentity,
    };
    let grid = GridSpec::new([args.grid; 3], 1.0 / args.grid as f64, boundary)?;
    let u = synthesize_smooth_field(&grid, args.seed, 1, args.amplitude)?;
    let neighbours;
    let f = match args.functional {
        FunctionalArg::V1 => Functional::V1,
        FunctionalArg::V2 => Functional::V2,
        FunctionalArg::Action => {
            let prev = synthesize_smooth_field(&grid, args.seed + 1, 1, args.amplitude)?;
            let next = synthesize_smooth_field(&grid, args.seed + 2, 1, args.amplitude)?;
            neighbours = TimeNeighbours::new(field_exp(&prev), field_exp(&next), 0.05)?;
            Functional::Action(&neighbours)
        }
    };
    let pointwise = compare_gradients(&f, &u, &m)?;
    let dir = directional_derivative_check(&f, &u, &m, GradientMethod::Analytic, args.seed, args.directions)?;
    println!("analytic vs finite difference   {:.3e}", pointwise.max_rel_error);
    println!("finite difference step gap      {:.3e}", pointwise.richardson_gap);
    println!("directional derivatives (max)   {:.3e}", dir.max_rel_error());
    let ok = pointwise.max_rel_error <= args.tolerance && dir.max_rel_error() <= args.tolerance;
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn render(args: &RenderArgs) -> CliResult {
    let field = read_field(fs::File::open(&args.input)?)?;
    let grid = *field.grid();
    let [nx, ny, nz] = grid.dims();
    if nz != 1 {
        return Err(format!("render needs a single z layer, dump has {nz}").into());
    }
    let angles: Vec<f64> = match field {
        AnyField::Scalar(f) => f.into_values(),
        AnyField::Vector(f) => f.values().iter().map(|v| v[Axis::Z.index()]).collect(),
        other => return Err(format!("cannot render a {} field", other.kind()).into()),
    };
    // Flat grid order is x fastest, matching the scene's row-major layout.
    let scene = ArrowScene {
        nx,
        ny,
        spacing: grid.spacing(),
        origin: [0.0, 0.0],
        angles,
        glyph_length: args.glyph_length,
        pixels_per_unit: args.pixels_per_unit,
    };
    fs::write(&args.output, render_arrow_svg(&scene))?;
    println!("wrote {} ({} glyphs)", args.output.display(), nx * ny);
    Ok(true)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("ROTELAST_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("ROTELAST_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Validate(a) => suites::run(a.suite, a.grid, a.seed),
        Command::Material(a) => material(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Radial(a) => radial(a),
        Command::Gradcheck(a) => gradcheck(a),
        Command::Render(a) => render(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
