use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use planar_ortho_cli::{run, CliError, Command, Pairs, StudyConfig};

#[derive(Parser)]
#[command(name = "planar-ortho", version, about = "Orthogonal polynomial and kernel studies on planar domains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Leading coefficients κ_n against their asymptotics.
    Poly(Flags),
    /// Scaled boundary kernel ratios against the H_ℓ predictor.
    Scaling(Flags),
    /// Scaled correlation functions for the appendix plots.
    Corr(Flags),
    /// Gap probabilities of disks.
    Gap(Flags),
    /// Level lines of the equilibrium potential.
    Levelsets(Flags),
    /// Exact samples of the disk ensemble and a radial histogram.
    Sample(Flags),
}

/// Every flag mirrors a config-file key of the same name; flags win.
#[derive(Args)]
struct Flags {
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// disk | ellipse | custom, or a record such as "kind=ellipse q=0.5".
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    cap: Option<String>,
    /// Laurent coefficients [c0,c1,...] as a+bi literals.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long)]
    nmin: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    /// Kernel sizes, e.g. [50,100,200].
    #[arg(long = "N")]
    sizes: Option<String>,
    /// Weight exponent, or the rule's parameter.
    #[arg(long)]
    s: Option<String>,
    /// fixed | linear (s = c·N) | offset (s = N + c) | inf.
    #[arg(long)]
    srule: Option<String>,
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long)]
    weighted: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory; without it the main table goes to stdout.
    #[arg(long)]
    out: Option<String>,
    /// Directory for the binary moment cache.
    #[arg(long)]
    cache: Option<String>,
    #[arg(long = "nodes-angular")]
    nodes_angular: Option<String>,
    #[arg(long = "nodes-radial")]
    nodes_radial: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    extent: Option<String>,
    #[arg(long)]
    bins: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Result<Pairs, CliError> {
        let mut pairs = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
                Pairs::parse(&text)?
            }
            None => Pairs::default(),
        };
        // A domain flag replaces the file's whole domain description.
        if self.domain.is_some() || self.q.is_some() || self.cap.is_some() || self.coeffs.is_some() {
            for k in ["domain", "q", "cap", "coeffs"] {
                pairs.remove(k);
            }
        }
        // Likewise s and srule travel together.
        if self.s.is_some() || self.srule.is_some() {
            pairs.remove("s");
            pairs.remove("srule");
        }
        let flags = [
            ("domain", &self.domain),
            ("q", &self.q),
            ("cap", &self.cap),
            ("coeffs", &self.coeffs),
            ("nmin", &self.nmin),
            ("nmax", &self.nmax),
            ("N", &self.sizes),
            ("s", &self.s),
            ("srule", &self.srule),
            ("ell", &self.ell),
            ("theta", &self.theta),
            ("a", &self.a),
            ("b", &self.b),
            ("weighted", &self.weighted),
            ("seed", &self.seed),
            ("out", &self.out),
            ("cache", &self.cache),
            ("nodes-angular", &self.nodes_angular),
            ("nodes-radial", &self.nodes_radial),
            ("tol", &self.tol),
            ("samples", &self.samples),
            ("center", &self.center),
            ("radius", &self.radius),
            ("levels", &self.levels),
            ("grid", &self.grid),
            ("extent", &self.extent),
            ("bins", &self.bins),
            ("rmax", &self.rmax),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                pairs.set(k, v.as_str());
            }
        }
        Ok(pairs)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, flags) = match &cli.cmd {
        Cmd::Poly(f) => (Command::Poly, f),
        Cmd::Scaling(f) => (Command::Scaling, f),
        Cmd::Corr(f) => (Command::Corr, f),
        Cmd::Gap(f) => (Command::Gap, f),
        Cmd::Levelsets(f) => (Command::Levelsets, f),
        Cmd::Sample(f) => (Command::Sample, f),
    };
    let result = flags
        .pairs()
        .and_then(|p| StudyConfig::from_pairs(&p))
        .and_then(|cfg| {
            let report = run(cmd, &cfg)?;
            let stdout = io::stdout().lock();
            report.write(cfg.out.as_deref(), stdout)?;
            Ok(report)
        });
    match result {
        Ok(report) => {
            let mut err = io::stderr().lock();
            for note in &report.notes {
                let _ = writeln!(err, "{note}");
            }
            ExitCode::SUCCESS
        }
        // A closed pipe (e.g. `| head`) is the reader's choice, not a failure.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("planar-ortho: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
