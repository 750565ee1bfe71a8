//! Command-line arguments. The parsed arguments double as the run
//! configuration embedded in every report.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spantree::bound::MuVector;
use spantree::dual::{DualProgram, Pool};
use spantree::families::{FamilySpec, Solid};
use spantree::signatures::Variant;

#[derive(Debug, Parser, Serialize)]
#[command(name = "spantree", version, about = "Spanning-tree counts and upper-bound certificates for planar graphs")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "SPANTREE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Exact spanning-tree count, optionally cross-checked by both oracles.
    Count(CountArgs),
    /// Probability that a random outdegree-one selection is acyclic.
    Pnc(PncArgs),
    /// Exhaustive checks of the two dependency inequalities.
    Oracle(OracleArgs),
    /// Signature tally and primal constraint check.
    Signatures(SignaturesArgs),
    /// Upper bound on log t(G) from the signature tally.
    Bound(BoundArgs),
    /// Verify a dual certificate over its whole case space.
    VerifyDual(VerifyArgs),
    /// Re-solve the finite dual program and verify the result.
    SolveDual(SolveArgs),
    /// Derived asymptotic constants.
    Asymptotics(AsymptoticsArgs),
    /// Generate family members as .rot files and their growth rates.
    Family(FamilyArgs),
    /// Run the certificate, bound and constant checks end to end.
    Reproduce(ReproduceArgs),
}

/// Where a graph comes from.
#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// A `.rot` file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// A generated graph, e.g. `icosahedron`, `wrapped_tri_grid:4,10`.
    #[arg(long, value_parser = parse_family)]
    #[serde(serialize_with = "serialize_label")]
    pub family: Option<FamilySpec>,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Also count by enumeration and by deletion-contraction.
    #[arg(long)]
    pub oracles: bool,
    /// Search-node budget of the enumeration oracle.
    #[arg(long, default_value_t = 10_000_000)]
    pub enumeration_budget: u64,
    /// Call budget of the deletion-contraction oracle.
    #[arg(long, default_value_t = 10_000_000)]
    pub dc_budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct PncArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    /// Exact value `t(G) / prod d_v`.
    #[arg(long)]
    pub exact: bool,
    /// Monte-Carlo samples.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Vertex without an out-edge; every vertex chooses when omitted.
    #[arg(long)]
    pub root: Option<usize>,
    /// Longest cycle taken as an event.
    #[arg(long, default_value_t = 3)]
    pub max_len: usize,
    #[arg(long, default_value_t = 100)]
    pub orderings: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of selections to enumerate.
    #[arg(long, default_value_t = 5_000_000)]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SignaturesArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Check the primal constraints of this variant.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[arg(long, value_parser = parse_variant, default_value = "general")]
    pub variant: Variant,
    /// Four comma-separated weights; the variant default when omitted.
    #[arg(long, value_parser = parse_mu)]
    pub mu: Option<MuVector>,
}

#[derive(Debug, Args, Serialize)]
#[group(id = "certificate", required = true, multiple = false)]
pub struct CertificateSource {
    /// Certificate JSON with keys variant, mu, lambda, m_ratio.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// A built-in certificate: GEN2, GEN3, R4 or R5.
    #[arg(long)]
    #[serde(serialize_with = "serialize_program")]
    pub builtin: Option<DualProgram>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub certificate: CertificateSource,
    /// Case space: `table` or `box:MAX_DEGREE,MAX_ENTRY`.
    #[arg(long, value_parser = parse_pool, default_value = "table")]
    #[serde(serialize_with = "serialize_pool")]
    pub space: Pool,
    /// Check the tail rays beyond the case space.
    #[arg(long)]
    pub tail: bool,
    /// Recompute the per-side entry bounds of the case space.
    #[arg(long)]
    pub rederive_bounds: bool,
    /// Skip the brute-force cross-check of the small groups.
    #[arg(long)]
    pub no_brute_force: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    /// GEN2, GEN3, R4 or R5.
    #[arg(long)]
    #[serde(serialize_with = "serialize_program_required")]
    pub variant: DualProgram,
    /// Four comma-separated weights; the tabulated ones when omitted.
    #[arg(long, value_parser = parse_mu)]
    pub mu: Option<MuVector>,
    /// Constraint pool: `table` or `box:MAX_DEGREE,MAX_ENTRY`.
    #[arg(long, value_parser = parse_pool)]
    #[serde(serialize_with = "serialize_pool_opt")]
    pub pool: Option<Pool>,
    /// Skip verification of the solved certificate.
    #[arg(long)]
    pub no_verify: bool,
    /// Write the solved certificate here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymptoticsArgs {
    /// Base of the general bound.
    #[arg(long, default_value_t = 5.28515)]
    pub beta: f64,
    /// Base of the bound without triangles.
    #[arg(long, default_value_t = 3.41619)]
    pub beta4: f64,
    /// Base of the bound without triangles and quadrilaterals.
    #[arg(long, default_value_t = 2.71567)]
    pub beta5: f64,
    /// Base of the bound on triangulations of a point set.
    #[arg(long, default_value_t = spantree::asymptotics::DEFAULT_TRIANGULATION_BASE)]
    pub triangulation_base: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FamilyArgs {
    /// Family members, e.g. `wrapped_tri_grid:4,10 stacked:20,7 cube`.
    #[arg(required = true, value_parser = parse_family)]
    #[serde(serialize_with = "serialize_labels")]
    pub specs: Vec<FamilySpec>,
    /// Write one `.rot` file per member into this directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Count spanning trees and report `t(G)^(1/n)`.
    #[arg(long)]
    pub growth: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    /// Run every section.
    #[arg(long)]
    pub all: bool,
    /// Run one section only.
    #[arg(long, value_enum, conflicts_with = "all")]
    pub section: Option<Section>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    /// Certificate verification and re-solving.
    Certificates,
    /// Growth bases from the certificates.
    Bases,
    /// Derived constants.
    Constants,
}

pub fn parse_family(s: &str) -> Result<FamilySpec, String> {
    let (name, params) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<u64> = if params.is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|e| format!("{s}: {e}")))
            .collect::<Result<_, _>>()?
    };
    let arity = |k: usize| {
        if nums.len() == k {
            Ok(())
        } else {
            Err(format!("{name} takes {k} parameters, got {}", nums.len()))
        }
    };
    if let Some(solid) = Solid::from_name(name) {
        arity(0)?;
        return Ok(FamilySpec::Platonic { solid });
    }
    let u = |i: usize| nums[i] as usize;
    match name {
        "wrapped_tri_grid" => arity(2).map(|_| FamilySpec::WrappedTriGrid { rows: u(0), cols: u(1) }),
        "quad_grid" => arity(2).map(|_| FamilySpec::QuadGrid { rows: u(0), cols: u(1) }),
        "pentagonal" => arity(1).map(|_| FamilySpec::Pentagonal { layers: u(0) }),
        "stacked" => arity(2).map(|_| FamilySpec::StackedTriangulation { n: u(0), seed: nums[1] }),
        _ => Err(format!("unknown family {name:?}")),
    }
}

pub fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| format!("unknown variant {s:?}; expected general, r4 or r5"))
}

pub fn parse_mu(s: &str) -> Result<MuVector, String> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{s}: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 4] = xs.try_into().map_err(|v: Vec<f64>| format!("mu needs 4 values, got {}", v.len()))?;
    Ok(MuVector(arr))
}

pub fn parse_pool(s: &str) -> Result<Pool, String> {
    if s == "table" {
        return Ok(Pool::Table);
    }
    let params = s.strip_prefix("box:").ok_or_else(|| format!("expected table or box:D,E, got {s:?}"))?;
    let (d, e) = params.split_once(',').ok_or_else(|| format!("expected box:D,E, got {s:?}"))?;
    let num = |x: &str| u32::from_str(x.trim()).map_err(|e| format!("{s}: {e}"));
    Ok(Pool::Box {
        max_degree: num(d)?,
        max_entry: num(e)?,
    })
}

pub fn pool_label(p: &Pool) -> String {
    match p {
        Pool::Table => "table".into(),
        Pool::Box { max_degree, max_entry } => format!("box:{max_degree},{max_entry}"),
        Pool::Explicit(v) => format!("explicit({})", v.len()),
    }
}

fn serialize_label<S: serde::Serializer>(spec: &Option<FamilySpec>, s: S) -> Result<S::Ok, S::Error> {
    match spec {
        Some(spec) => s.serialize_some(&spec.label()),
        None => s.serialize_none(),
    }
}

fn serialize_labels<S: serde::Serializer>(specs: &[FamilySpec], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(specs.iter().map(|x| x.label()))
}

fn serialize_program<S: serde::Serializer>(p: &Option<DualProgram>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_some(p.name()),
        None => s.serialize_none(),
    }
}

fn serialize_program_required<S: serde::Serializer>(p: &DualProgram, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(p.name())
}

fn serialize_pool<S: serde::Serializer>(p: &Pool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&pool_label(p))
}

fn serialize_pool_opt<S: serde::Serializer>(p: &Option<Pool>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_some(&pool_label(p)),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_specs_parse() {
        assert_eq!(parse_family("cube").unwrap(), FamilySpec::Platonic { solid: Solid::Cube });
        assert_eq!(
            parse_family("wrapped_tri_grid:4,10").unwrap(),
            FamilySpec::WrappedTriGrid { rows: 4, cols: 10 }
        );
        assert_eq!(
            parse_family("stacked:9,3").unwrap(),
            FamilySpec::StackedTriangulation { n: 9, seed: 3 }
        );
        assert!(parse_family("cube:1").is_err());
        assert!(parse_family("quad_grid:3").is_err());
        assert!(parse_family("torus:3,3").is_err());
    }

    #[test]
    fn mu_and_pool_parse() {
        assert_eq!(parse_mu("0.9,0.1,0,0").unwrap(), MuVector::NO_TRIANGLES);
        assert!(parse_mu("0.9,0.1").is_err());
        assert_eq!(parse_pool("table").unwrap(), Pool::Table);
        assert_eq!(
            parse_pool("box:12,10").unwrap(),
            Pool::Box {
                max_degree: 12,
                max_entry: 10
            }
        );
        assert!(parse_pool("box:12").is_err());
    }
}
