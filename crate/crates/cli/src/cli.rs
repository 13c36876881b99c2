//! Argument definitions. Every long flag also reads `MFLAB_<FLAG>` and may be
//! given in the `--config` file as `flag = value`.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mflab", version, about = "Multi-frequency variation and circle-method laboratory")]
pub struct Cli {
    /// Flat `key = value` file; flags and environment variables take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecayKindArg {
    GaussSum,
    MinorArc,
    ErrorTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Random,
    Classical,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// r-variation seminorm of a series.
    Variation {
        #[arg(long)]
        r: f64,
        /// Comma-separated samples; `re:im` for complex entries, `;` between vector rows.
        #[arg(long)]
        samples: Option<String>,
        /// JSON series file `{times, dim, samples}`.
        #[arg(long)]
        series: Option<PathBuf>,
        /// Use the exhaustive search instead of dynamic programming.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Greedy and maximal lambda-jump counts.
    Jumps {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Forward (or inverse) DFT of a JSON grid signal.
    Dft {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        inverse: bool,
        /// Also write the result in binary form.
        #[arg(long)]
        binary_out: Option<PathBuf>,
    },
    /// Complete Gauss sum `S(a/q, b/q)`.
    GaussSum {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        q: u64,
        /// Comma-separated numerators `b_1..b_n`.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Persistent cache file, read before and appended after.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Major-arc membership of lambda at scale j.
    Arcs {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        j: u32,
        /// Major-arc exponent; defaults to 1/(10d).
        #[arg(long)]
        eps1: Option<f64>,
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Write the arcs of X_j as CSV.
        #[arg(long)]
        table_csv: Option<PathBuf>,
        /// Write the refined lambda grid as CSV.
        #[arg(long)]
        grid_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        base_bits: u32,
        #[arg(long, default_value_t = 4)]
        refine: usize,
    },
    /// Rational frequency set R_s.
    EnumerateRs {
        #[arg(long)]
        s: u32,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Exponential-sum multiplier m_{j,lambda} at xi, or on a whole dual grid.
    Multiplier {
        #[arg(long)]
        j: u32,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        /// Dual grid size; evaluates at every k/N instead of at xi.
        #[arg(long = "N")]
        side: Option<usize>,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// `riesz1d`, `riesz:<component>` or `table:<json file>`.
        #[arg(long, default_value = "riesz1d")]
        kernel: String,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Continuous multiplier Phi_{j,lambda}(xi).
    Phi {
        #[arg(long)]
        j: u32,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "riesz1d")]
        kernel: String,
        /// Riemann-sum proxy on (1/refine)Z^n instead of quadrature.
        #[arg(long)]
        proxy_refine: Option<u32>,
        /// Apply the Phi* indicator for this eps1.
        #[arg(long)]
        eps1: Option<f64>,
    },
    /// Approximant L^s_{j,lambda}, L^s_lambda (with --j-max) or Phi^s_lambda (with --phi-s).
    AssembleLs {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        j_max: Option<u32>,
        #[arg(long)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Major-arc exponent; defaults to 1/(10d).
        #[arg(long)]
        eps1: Option<f64>,
        #[arg(long, default_value_t = 10)]
        kappa: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "riesz1d")]
        kernel: String,
        #[arg(long)]
        proxy_refine: Option<u32>,
        #[arg(long)]
        phi_s: bool,
    },
    /// Error term E_{j,lambda} at xi, or on the dual grid of size --N.
    ErrorTerm {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[arg(long = "N")]
        side: Option<usize>,
        #[arg(long, default_value_t = 8)]
        oversample: usize,
        /// Major-arc exponent; defaults to 1/(10d).
        #[arg(long)]
        eps1: Option<f64>,
        #[arg(long, default_value_t = 10)]
        kappa: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "riesz1d")]
        kernel: String,
        #[arg(long)]
        proxy_refine: Option<u32>,
    },
    /// Truncated maximal operator over a finite lambda grid.
    Carleson {
        /// JSON grid signal.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Use the unit impulse on a grid of this size instead of --input.
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        lambdas: Option<String>,
        /// Dyadic lambda grid k 2^-bits refined across the major arcs of scale --j-max.
        #[arg(long)]
        grid_bits: Option<u32>,
        #[arg(long, default_value_t = 4)]
        refine: usize,
        /// Major-arc exponent; defaults to 1/(10d).
        #[arg(long)]
        eps1: Option<f64>,
        #[arg(long)]
        j_max: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value = "riesz1d")]
        kernel: String,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Almost-orthogonality constant A1.
    A1 {
        /// JSON array of grid signals g_beta.
        #[arg(long)]
        coefficients: Option<PathBuf>,
        /// Classical frequencies xi_beta (n = 1).
        #[arg(long)]
        classical: Option<String>,
        /// Number of random unimodular coefficient signals (needs --seed).
        #[arg(long)]
        random_labels: Option<usize>,
        #[arg(long = "N", default_value_t = 256)]
        side: usize,
        #[arg(long, default_value_t = 2)]
        kappa: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long)]
        seed: Option<u64>,
        /// Restrict rows to the numerical support of phi.
        #[arg(long)]
        window_support: bool,
    },
    /// One multi-frequency instance: lhs, A1, |f| and the bound.
    Multifreq {
        #[arg(long)]
        labels: usize,
        #[arg(long = "N", default_value_t = 256)]
        side: usize,
        #[arg(long, default_value_t = 3.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 2)]
        kappa: u32,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 12)]
        times: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Random)]
        mode: ModeArg,
        #[arg(long)]
        seed: u64,
    },
    /// Both sides of the transfer inequality on a random instance.
    Lemma21 {
        #[arg(long)]
        labels: usize,
        #[arg(long)]
        times: usize,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 3.0)]
        q: f64,
        #[arg(long, default_value_t = 2.5)]
        r: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Experiment runners; records are printed and optionally appended to --records.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
    /// CSV tables and a text summary of a record file.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Every flag with its default value.
    Defaults,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Scaling of the multi-frequency bound in the number of labels
    Thm1 {
        #[arg(long, default_value = "2,4,8,16")]
        sizes: String,
        #[arg(long = "N", default_value_t = 256)]
        side: usize,
        #[arg(long, default_value_t = 3.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 2)]
        kappa: u32,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 12)]
        times: usize,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        packets: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Random)]
        mode: ModeArg,
        #[arg(long)]
        no_n_doubling: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// A1 of the lambda-field reduction against the label count
    A1Reduction {
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 2)]
        kappa: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long = "N", default_value_t = 192)]
        side: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        x: i64,
        /// `a/q`; defaults to the alpha with the largest Gauss sum.
        #[arg(long)]
        alpha: Option<String>,
        /// Coefficients over B_s(alpha), `re:im` entries.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        /// `alpha-windows`, `uniform` or `constant:<lambda>`.
        #[arg(long, default_value = "alpha-windows")]
        lambda_field: String,
        #[arg(long)]
        no_n_doubling: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Decay rate of Gauss sums, minor-arc multipliers or error terms
    Decay {
        #[arg(long, value_enum)]
        kind: DecayKindArg,
        /// Primes q for gauss-sum, scales j otherwise.
        #[arg(long)]
        sweep: String,
        #[arg(long)]
        eps1: Option<f64>,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        kappa: u32,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 8)]
        grid_factor: usize,
        #[arg(long, default_value_t = 8)]
        oversample: usize,
        #[arg(long, default_value_t = 1e-10)]
        noise_floor: f64,
        #[arg(long)]
        no_n_doubling: bool,
        /// Required for minor-arc and error-term sweeps.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        records: Option<PathBuf>,
    },
}
