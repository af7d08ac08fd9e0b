//! Typed parameters for every subcommand.
//!
//! Each command has a resolved `*Params` struct (all fields concrete, with
//! defaults) and a `*Flags` struct holding only what was given on the command
//! line. Resolution order is defaults, then the `--config` file, then flags.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::RunError;

/// Uniform grid `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self, String> {
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(format!("grid needs start ≤ stop and step > 0, got {start}:{stop}:{step}"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if n > 1_000_000 {
            return Err(format!("grid has {n} points"));
        }
        Ok(Grid { start, stop, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step, got {s:?}"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

impl TryFrom<String> for Grid {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> String {
        format!("{:?}:{:?}:{:?}", g.start, g.stop, g.step)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from(self.clone()))
    }
}

/// Comma-separated numbers on the command line, a JSON array in config files.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NumList(pub Vec<f64>);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(NumList(Vec::new()));
        }
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<_, _>>()
            .map(NumList)
    }
}

/// Comma-separated indices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(IndexList(Vec::new()));
        }
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<_, _>>()
            .map(IndexList)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    Exact,
    Universal,
}

impl From<ConventionArg> for tdgn_core::scattering::Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Exact => tdgn_core::scattering::Convention::Exact,
            ConventionArg::Universal => tdgn_core::scattering::Convention::Universal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExpectRegime {
    Any,
    Adiabatic,
    Intermediate,
    FastDriving,
}

macro_rules! params {
    (
        $(#[$doc:meta])*
        $name:ident / $flags:ident {
            $( $field:ident : $ty:ty = $default:expr, $long:literal, $help:literal; )*
        }
    ) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $( pub $field: $ty, )*
        }

        impl Default for $name {
            fn default() -> Self {
                $name { $( $field: $default, )* }
            }
        }

        #[derive(Debug, Clone, Default, PartialEq, Serialize, clap::Args)]
        pub struct $flags {
            $(
                #[arg(long = $long, help = $help, allow_hyphen_values = true)]
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $flags {
            pub fn overrides(&self) -> Map<String, Value> {
                match serde_json::to_value(self) {
                    Ok(Value::Object(m)) => m,
                    _ => Map::new(),
                }
            }
        }
    };
}

params! {
    /// Seeded Yang–Baxter sweep over every S-matrix family.
    VerifyYbParams / VerifyYbFlags {
        alpha: f64 = 1.0, "alpha", "drive rate α";
        beta: f64 = 2.0, "beta", "drive offset β";
        samples: usize = 100, "samples", "random triples per family";
        tolerance: f64 = 1e-10, "tolerance", "max-norm residual bound";
    }
}

params! {
    /// Transport compatibility, equal-time commutation and the unequal-time witness.
    VerifyTransportParams / VerifyTransportFlags {
        alpha: f64 = 1.0, "alpha", "drive rate α";
        beta: f64 = 2.0, "beta", "drive offset β";
        n_left: usize = 3, "NL", "left movers";
        n_right: usize = 3, "NR", "right movers";
        length: f64 = 4.0, "length", "system length L";
        samples: usize = 3, "samples", "random frames";
        t: f64 = 0.0, "t", "time of the commuting transfer matrices";
        t_other: f64 = 3.0, "t-other", "second time for the non-commuting witness";
        tolerance: f64 = 1e-9, "tolerance", "residual bound for the identities";
        witness_floor: f64 = 1e-3, "witness-floor", "lower bound for the witness residual";
    }
}

params! {
    /// qKZ residual of the Jackson amplitude, Yang–Yang equivalence and the saddle point.
    QkzCheckParams / QkzCheckFlags {
        w: NumList = NumList(vec![-0.4, 0.05]), "w", "right mover w as re,im";
        wbar: NumList = NumList(vec![0.3, 0.1]), "wbar", "left mover w̄ as re,im";
        eta: NumList = NumList(vec![0.7, 1.5]), "eta", "crossing η as re,im";
        base: NumList = NumList(vec![0.123, 0.377]), "base", "Jackson base point as re,im";
        ladder: IndexList = IndexList(vec![25, 50, 100, 200]), "ladder", "fixed truncations for the monotonicity check";
        initial_l_max: usize = 25, "l-max", "initial adaptive truncation";
        tail_tolerance: f64 = 1e-6, "tail-tolerance", "adaptive tail target";
        tolerance: f64 = 1e-4, "tolerance", "qKZ residual bound";
        yy_tolerance: f64 = 1e-6, "yy-tolerance", "relative bound for exp(−S) against the Gamma product";
        saddle_sites: NumList = NumList(vec![-20.0, 20.0, 60.0]), "saddle-sites", "real sites (w̄ then w) for the saddle check";
        saddle_left: usize = 1, "saddle-left", "how many saddle sites are left movers";
        saddle_eta: f64 = 0.8, "saddle-eta", "real crossing for the saddle check";
        saddle_numbers: NumList = NumList(vec![-0.5, 0.5]), "saddle-m", "Bethe quantum numbers, one root each";
        saddle_tolerance: f64 = 1e-4, "saddle-tolerance", "saddle residual bound";
    }
}

params! {
    /// Logarithmic Bethe equations in the instantaneous frame.
    SolveBetheParams / SolveBetheFlags {
        n_left: usize = 1, "NL", "left movers";
        n_right: usize = 1, "NR", "right movers";
        m: usize = 1, "M", "number of roots";
        g: f64 = 0.5, "g", "instantaneous coupling";
        quantum_numbers: NumList = NumList(Vec::new()), "quantum-numbers", "explicit m_α (default: ground window)";
        holes: IndexList = IndexList(Vec::new()), "holes", "slots of the allowed window left empty";
        charges: NumList = NumList(Vec::new()), "charges", "charge quantum numbers n_j";
        length: f64 = 4.0, "length", "system length for the energy";
        cutoff: f64 = 1.0, "Lambda", "cutoff Λ for the charges";
        tolerance: f64 = 1e-10, "tolerance", "Newton residual target";
        max_iterations: usize = 200, "max-iterations", "Newton iteration cap";
    }
}

params! {
    /// Bethe vectors against exact diagonalization of every right-mover transfer matrix.
    VerifyEigenParams / VerifyEigenFlags {
        n_left: usize = 2, "NL", "left movers";
        n_right: usize = 2, "NR", "right movers";
        g: f64 = 0.6, "g", "instantaneous coupling";
        tolerance: f64 = 1e-8, "tolerance", "eigenvector residual bound";
        momentum_tolerance: f64 = 1e-6, "momentum-tolerance", "eigenvalue vs momentum product";
    }
}

params! {
    /// Root density by Nyström, against the closed form.
    DensityParams / DensityFlags {
        n: usize = 100, "N", "particle number";
        inv_g: f64 = 2.0, "inv-g", "source shift b";
        half_width: f64 = 20.0, "lambda-max", "grid half width";
        nodes: usize = 2001, "nodes", "grid nodes";
        holes: NumList = NumList(Vec::new()), "holes", "hole rapidities";
        h0: f64 = 1.0, "h0", "coarsest step of the refinement study";
        halvings: usize = 2, "halvings", "refinement steps (0 to skip)";
        tolerance: f64 = 1e-6, "tolerance", "max-norm bound against the closed form";
        norm_tolerance: f64 = 1e-8, "norm-tolerance", "bound on |∫ρ − expected|/N";
        hole_norm_tolerance: f64 = 1e-6, "hole-norm-tolerance", "same bound with holes";
        min_order: f64 = 2.0, "min-order", "lowest accepted refinement order";
    }
}

params! {
    /// Spinon dispersion (thermodynamic route) and the finite-N gap extrapolation.
    SpinonFitParams / SpinonFitFlags {
        cutoff: f64 = 1.0, "Lambda", "cutoff Λ";
        inv_g: f64 = 3.0, "inv-g", "source shift b for the dispersion";
        hole_grid: Grid = Grid { start: -1.0, stop: 1.0, step: 0.1 }, "hole-grid", "hole rapidities start:stop:step";
        half_width: f64 = 20.0, "lambda-max", "grid half width";
        nodes: usize = 2001, "nodes", "grid nodes";
        tolerance: f64 = 5e-3, "tolerance", "bound on |E(λ)/E(0) − cosh πλ|/cosh πλ";
        sizes: IndexList = IndexList(vec![32, 64, 128]), "sizes", "chain lengths for the extrapolation (empty to skip)";
        finite_inv_g: f64 = 1.0, "finite-inv-g", "source shift for the finite-N gap";
        gap_tolerance: f64 = 0.1, "gap-tolerance", "bound on |ratio − 1|";
    }
}

params! {
    /// Time-dependent mass gap m(t) = 2Λ e^{−π/g(t)}.
    MassGapParams / MassGapFlags {
        alpha: f64 = 1.0, "alpha", "drive rate α";
        beta: f64 = 2.0, "beta", "drive offset β";
        cutoff: f64 = 2000.0, "Lambda", "cutoff Λ";
        m0: f64 = 4.0, "m0", "static mass gap";
        alpha0: f64 = 1.0, "alpha0", "reference rate α₀";
        t_grid: Grid = Grid { start: 0.0, stop: 10.0, step: 0.1 }, "t-grid", "output times start:stop:step";
        convention: ConventionArg = ConventionArg::Exact, "convention", "coupling inversion";
        fit_grid: Grid = Grid { start: 2000.0, stop: 20000.0, step: 450.0 }, "fit-grid", "window for the affine fit of ln m";
        fit_tolerance: f64 = 1e-8, "fit-tolerance", "affine fit residual bound";
    }
}

params! {
    /// RG form of the coupling trajectory.
    RgFlowParams / RgFlowFlags {
        alpha: f64 = 1.0, "alpha", "drive rate α";
        beta: f64 = 2.0, "beta", "drive offset β";
        t_grid: Grid = Grid { start: 10.0, stop: 1000.0, step: 10.0 }, "t-grid", "times start:stop:step";
        convention: ConventionArg = ConventionArg::Exact, "convention", "coupling inversion";
        slope_tolerance: f64 = 0.01, "slope-tolerance", "bound on |slope − 2|";
        mass: f64 = 4.0, "mass", "static mass for the running-coupling check";
        flow_tolerance: f64 = 1e-6, "flow-tolerance", "bound on the static flow defect";
    }
}

params! {
    /// Adiabatic, intermediate or fast-driving regime at time t.
    ClassifyRegimeParams / ClassifyRegimeFlags {
        alpha: f64 = 1.0, "alpha", "drive rate α";
        beta: f64 = 2.0, "beta", "drive offset β";
        cutoff: f64 = 2000.0, "Lambda", "cutoff Λ";
        m0: f64 = 4.0, "m0", "static mass gap";
        alpha0: f64 = 1.0, "alpha0", "reference rate α₀";
        t_over_t0: f64 = 1.0, "t-over-t0", "evaluation time in units of t0";
        expect: ExpectRegime = ExpectRegime::Any, "expect", "fail unless this regime is found";
    }
}

params! {
    /// Classical r-matrix from the η → 0 limit of R(λ; η).
    RClassicalParams / RClassicalFlags {
        lambda: f64 = 0.7, "lambda", "spectral parameter λ₁₂";
        lambda23: f64 = -1.9, "lambda23", "second parameter for the classical Yang–Baxter check";
        eta0: f64 = 0.1, "eta0", "largest η";
        levels: usize = 6, "levels", "η halvings in the extrapolation";
        tolerance: f64 = 1e-8, "tolerance", "bound on closed-form, antisymmetry and CYBE defects";
        order_tolerance: f64 = 0.1, "order-tolerance", "bound on |order − 1|";
    }
}

/// Merges `layer` into `base`; both must be objects.
pub fn merge(base: &mut Map<String, Value>, layer: Map<String, Value>) {
    for (k, v) in layer {
        base.insert(k, v);
    }
}

/// Defaults, then `config`, then `flags`, deserialized with unknown keys rejected.
pub fn resolve<P>(config: Option<&Map<String, Value>>, flags: Map<String, Value>) -> Result<P, RunError>
where
    P: Default + Serialize + for<'de> Deserialize<'de>,
{
    let mut base = match serde_json::to_value(P::default()) {
        Ok(Value::Object(m)) => m,
        _ => return Err(RunError::Usage("parameter defaults are not an object".into())),
    };
    if let Some(c) = config {
        // Reject unknown keys before they are shadowed by defaults.
        serde_json::from_value::<P>(Value::Object(c.clone())).map_err(|e| RunError::Usage(format!("config: {e}")))?;
        merge(&mut base, c.clone());
    }
    merge(&mut base, flags);
    serde_json::from_value(Value::Object(base)).map_err(|e| RunError::Usage(format!("parameters: {e}")))
}
