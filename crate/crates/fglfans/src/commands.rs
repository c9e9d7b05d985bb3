//! The `rank`, `basis`, `check-descent` and `resolve` commands.
//!
//! Each command returns its full report as a string so output is assembled
//! in degree order no matter how the per-degree work was scheduled.

use std::fmt::Write as _;
use std::sync::Arc;

use fglfans_core::descent::{DescentSquare, GluingReport};
use fglfans_core::fan::{CenterOrder, Fan, FanError, SubdivisionMap};
use fglfans_core::fgl::GradedRing;
use fglfans_core::intlin::{invariant_factors, primitive_part, IntVector};
use fglfans_core::pps::{PiecewiseSeries, PpsSheaf};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, JobConfig, SCHEMA_VERSION};
use crate::fanfile::{load_fan, to_json, FanFile};
use crate::CliError;

/// Results assume the fan is quasiprojective; nothing checks it.
pub const QUASIPROJECTIVE_WARNING: &str =
    "warning: results assume the fan defines a quasiprojective toric variety; this is not checked";

/// Text and exit status of a finished command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, exit_code: 0 }
    }
}

fn load(cfg: &JobConfig) -> Result<Arc<Fan>, CliError> {
    cfg.validate()?;
    load_fan(&cfg.fan).map(Arc::new).map_err(|e| CliError::input(e.to_string()))
}

fn fmt_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn fmt_set(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn to_i64(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).unwrap_or(i64::MAX)).collect()
}

fn header(cfg: &JobConfig, fan: &Fan) -> String {
    format!(
        "fan: {} (rank {}, {} rays, {} maximal cones)\ncoefficients: {}, trunc {}\n",
        cfg.fan.display(),
        fan.rank(),
        fan.rays().len(),
        fan.maximal_cones().len(),
        cfg.coeff,
        cfg.trunc
    )
}

fn csv_text(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankRow {
    pub degree: i64,
    pub rank: usize,
    /// Invariant factors above 1 of the section lattice in its cochain
    /// lattice; empty when the sections form a saturated sublattice.
    pub torsion: Vec<String>,
}

/// Ranks of the global sections in each degree, computed in parallel.
pub fn rank_rows(fan: &Arc<Fan>, ring: &Arc<GradedRing>, degrees: &[i64]) -> Result<Vec<RankRow>, CliError> {
    let sheaf = PpsSheaf::new(fan.clone(), ring.clone()).map_err(CliError::internal)?;
    degrees
        .par_iter()
        .map(|&d| {
            let m = sheaf.global_sections(0, d).map_err(CliError::internal)?;
            let torsion = if m.rank() == 0 {
                Vec::new()
            } else {
                invariant_factors(&m.basis_matrix())
                    .into_iter()
                    .filter(|x| *x > BigInt::from(1))
                    .map(|x| x.to_string())
                    .collect()
            };
            Ok(RankRow { degree: d, rank: m.rank(), torsion })
        })
        .collect()
}

pub fn cmd_rank(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let fan = load(cfg)?;
    let ring = cfg.coeff.ring(cfg.trunc)?;
    let degrees: Vec<i64> = cfg.degrees.iter().collect();
    let rows = rank_rows(&fan, &ring, &degrees)?;
    let out = match cfg.format {
        Format::Table => {
            let mut s = header(cfg, &fan);
            let _ = writeln!(s, "{:>6}  {:>6}  torsion", "degree", "rank");
            for r in &rows {
                let t = if r.torsion.is_empty() { "-".to_string() } else { r.torsion.join(" ") };
                let _ = writeln!(s, "{:>6}  {:>6}  {t}", r.degree, r.rank);
            }
            s
        }
        Format::Json => json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "rank",
            "fan": FanFile::from_fan(&fan).map_err(|e| CliError::input(e.to_string()))?,
            "coeff": cfg.coeff.name(),
            "trunc": cfg.trunc,
            "rows": rows,
        })),
        Format::Csv => {
            let mut table = vec![vec!["degree".into(), "rank".into(), "torsion".into()]];
            table.extend(rows.iter().map(|r| vec![r.degree.to_string(), r.rank.to_string(), r.torsion.join(" ")]));
            csv_text(table)
        }
    };
    Ok(Outcome::ok(out))
}

#[derive(Clone, Debug, Serialize)]
struct ValueOut {
    cone: Vec<usize>,
    /// Rows: the lattice basis in which the stalk variables are written.
    lattice: Vec<Vec<i64>>,
    series: String,
}

fn section_values(sheaf: &PpsSheaf, p: &PiecewiseSeries) -> Vec<ValueOut> {
    p.values
        .iter()
        .map(|(&c, f)| ValueOut {
            cone: sheaf.fan().cone(c).rays.clone(),
            lattice: sheaf.stalk(c).lattice_basis().row_vectors().iter().map(|r| to_i64(r)).collect(),
            series: f.to_string(),
        })
        .collect()
}

pub fn cmd_basis(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let fan = load(cfg)?;
    let ring = cfg.coeff.ring(cfg.trunc)?;
    let sheaf = PpsSheaf::new(fan.clone(), ring).map_err(CliError::internal)?;
    let degrees: Vec<i64> = cfg.degrees.iter().collect();
    let per_degree: Vec<(i64, Vec<PiecewiseSeries>, bool)> = degrees
        .par_iter()
        .map(|&d| {
            let basis = sheaf.global_sections(0, d).map_err(CliError::internal)?.basis();
            let mut verified = true;
            for b in &basis {
                verified &= sheaf.is_global_section(b).map_err(CliError::internal)?;
            }
            Ok((d, basis, verified))
        })
        .collect::<Result<_, CliError>>()?;
    let all_verified = per_degree.iter().all(|(_, _, v)| *v);
    let out = match cfg.format {
        Format::Table => {
            let mut s = header(cfg, &fan);
            for (c, stalk) in fan.maximal_cones().into_iter().map(|c| (c, sheaf.stalk(c))) {
                let rows: Vec<String> = stalk.lattice_basis().row_vectors().iter().map(|r| fmt_vec(r)).collect();
                let _ = writeln!(s, "cone {}: variables along {}", fmt_set(&fan.cone(c).rays), rows.join(" "));
            }
            for (d, basis, verified) in &per_degree {
                let mark = if *verified { "verified" } else { "NOT VERIFIED" };
                let _ = writeln!(s, "degree {d}: {} sections ({mark})", basis.len());
                for (n, b) in basis.iter().enumerate() {
                    let _ = writeln!(s, "  [{}]", n + 1);
                    for v in section_values(&sheaf, b) {
                        let _ = writeln!(s, "    {}: {}", fmt_set(&v.cone), v.series);
                    }
                }
            }
            s
        }
        Format::Json => {
            let degrees: Vec<serde_json::Value> = per_degree
                .iter()
                .map(|(d, basis, verified)| {
                    let sections: Vec<Vec<ValueOut>> = basis.iter().map(|b| section_values(&sheaf, b)).collect();
                    json!({ "degree": d, "rank": basis.len(), "verified": verified, "sections": sections })
                })
                .collect();
            json_text(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "basis",
                "fan": FanFile::from_fan(&fan).map_err(|e| CliError::input(e.to_string()))?,
                "coeff": cfg.coeff.name(),
                "trunc": cfg.trunc,
                "degrees": degrees,
            }))
        }
        Format::Csv => {
            let mut table = vec![vec!["degree".into(), "section".into(), "cone".into(), "series".into()]];
            for (d, basis, _) in &per_degree {
                for (n, b) in basis.iter().enumerate() {
                    for v in section_values(&sheaf, b) {
                        let cone: Vec<String> = v.cone.iter().map(ToString::to_string).collect();
                        table.push(vec![d.to_string(), (n + 1).to_string(), cone.join(" "), v.series]);
                    }
                }
            }
            csv_text(table)
        }
    };
    Ok(Outcome { output: out, exit_code: if all_verified { 0 } else { 4 } })
}

#[derive(Clone, Debug, Serialize)]
struct GluingOut {
    degree: i64,
    /// Ranks of the sections on the coarse fan, the fine fan, the star of
    /// the center and the star of the new ray.
    coarse: usize,
    fine: usize,
    center_star: usize,
    ray_star: usize,
    fiber: usize,
    commutes: bool,
    injective: bool,
    glued: bool,
    cartesian: bool,
    witness: Option<String>,
}

impl From<&GluingReport> for GluingOut {
    fn from(r: &GluingReport) -> Self {
        GluingOut {
            degree: r.degree,
            coarse: r.ranks[0],
            fine: r.ranks[1],
            center_star: r.ranks[2],
            ray_star: r.ranks[3],
            fiber: r.fiber_rank,
            commutes: r.commutes,
            injective: r.injective,
            glued: r.glued,
            cartesian: r.cartesian,
            witness: r.witness.as_ref().map(|w| {
                let parts: Vec<String> = w.values.iter().map(|(c, f)| format!("{c}: {f}")).collect();
                parts.join("; ")
            }),
        }
    }
}

/// Star subdivision at `ray`, or the identity when no ray is given.
pub fn subdivision(fan: &Arc<Fan>, ray: Option<&[i64]>) -> Result<SubdivisionMap, CliError> {
    let Some(ray) = ray else {
        return Ok(SubdivisionMap::identity(fan.clone()));
    };
    let v: IntVector = ray.iter().map(|&x| BigInt::from(x)).collect();
    if v.len() != fan.rank() {
        return Err(CliError::input(format!("ray has {} coordinates, fan has rank {}", v.len(), fan.rank())));
    }
    if v.iter().all(|x| *x == BigInt::from(0)) {
        return Err(CliError::input("the zero vector is not a ray".into()));
    }
    match fan.star_subdivision(&primitive_part(&v)) {
        Ok(m) => Ok(m),
        Err(e @ (FanError::OutsideSupport | FanError::AlreadyRay)) => Err(CliError::input(e.to_string())),
        Err(e) => Err(CliError::internal(e)),
    }
}

pub fn cmd_check_descent(cfg: &JobConfig, ray: Option<&[i64]>) -> Result<Outcome, CliError> {
    let fan = load(cfg)?;
    let ring = cfg.coeff.ring(cfg.trunc)?;
    let map = subdivision(&fan, ray)?;
    let description = match map.center {
        Some(c) => format!(
            "star subdivision at {} in cone {}",
            fmt_vec(map.source.ray(map.source.cone(c.rho).rays[0])),
            fmt_set(&fan.cone(c.pi).rays)
        ),
        None => "identity subdivision".to_string(),
    };
    let square = DescentSquare::new(map, ring).map_err(CliError::internal)?;
    let degrees: Vec<i64> = cfg.degrees.iter().collect();
    let reports: Vec<GluingReport> = degrees
        .par_iter()
        .map(|&d| square.check_cartesian(d).map_err(CliError::internal))
        .collect::<Result<_, _>>()?;
    let rows: Vec<GluingOut> = reports.iter().map(GluingOut::from).collect();
    let all = rows.iter().all(|r| r.cartesian);
    let yn = |b: bool| if b { "yes" } else { "no" };
    let out = match cfg.format {
        Format::Table => {
            let mut s = header(cfg, &fan);
            let _ = writeln!(s, "{description}");
            let _ = writeln!(
                s,
                "{:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  commutes  injective  glued  cartesian",
                "degree", "coarse", "fine", "St pi", "St rho", "fiber"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>8}  {:>9}  {:>5}  {:>9}",
                    r.degree,
                    r.coarse,
                    r.fine,
                    r.center_star,
                    r.ray_star,
                    r.fiber,
                    yn(r.commutes),
                    yn(r.injective),
                    yn(r.glued),
                    yn(r.cartesian)
                );
                if let Some(w) = &r.witness {
                    let _ = writeln!(s, "        witness: {w}");
                }
            }
            let _ = writeln!(s, "{}", if all { "all squares Cartesian" } else { "NOT Cartesian" });
            s
        }
        Format::Json => json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "check-descent",
            "subdivision": description,
            "coeff": cfg.coeff.name(),
            "trunc": cfg.trunc,
            "reports": rows,
            "cartesian": all,
        })),
        Format::Csv => {
            let mut table = vec![[
                "degree",
                "coarse",
                "fine",
                "center_star",
                "ray_star",
                "fiber",
                "commutes",
                "injective",
                "glued",
                "cartesian",
            ]
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()];
            for r in &rows {
                table.push(vec![
                    r.degree.to_string(),
                    r.coarse.to_string(),
                    r.fine.to_string(),
                    r.center_star.to_string(),
                    r.ray_star.to_string(),
                    r.fiber.to_string(),
                    r.commutes.to_string(),
                    r.injective.to_string(),
                    r.glued.to_string(),
                    r.cartesian.to_string(),
                ]);
            }
            csv_text(table)
        }
    };
    Ok(Outcome { output: out, exit_code: if all { 0 } else { 4 } })
}

#[derive(Clone, Debug, Serialize)]
struct StepOut {
    ray: Vec<i64>,
    /// Rays of the subdivided cone, as vectors.
    center: Vec<Vec<i64>>,
    maximal_cones: usize,
}

pub fn cmd_resolve(cfg: &JobConfig, order: CenterOrder) -> Result<Outcome, CliError> {
    let fan = load(cfg)?;
    let steps = fan.resolve(order).map_err(CliError::internal)?;
    let rows: Vec<StepOut> = steps
        .iter()
        .map(|s| {
            let c = s.center.expect("resolution steps are star subdivisions");
            StepOut {
                ray: to_i64(s.source.ray(s.source.cone(c.rho).rays[0])),
                center: s.target.cone(c.pi).rays.iter().map(|&r| to_i64(s.target.ray(r))).collect(),
                maximal_cones: s.source.maximal_cones().len(),
            }
        })
        .collect();
    let terminal = steps.last().map(|s| s.source.clone()).unwrap_or_else(|| fan.clone());
    let multiplicities: Vec<String> = terminal
        .maximal_cones()
        .into_iter()
        .map(|c| terminal.cone(c).geometry.multiplicity().map_or("non-simplicial".into(), |m| m.to_string()))
        .collect();
    let smooth = terminal.is_smooth();
    let terminal_json = to_json(&terminal).map_err(|e| CliError::input(e.to_string()))?;
    let out = match cfg.format {
        Format::Table => {
            let mut s = format!("fan: {}\n", cfg.fan.display());
            let _ = writeln!(s, "{} subdivision steps", rows.len());
            for (n, r) in rows.iter().enumerate() {
                let center: Vec<String> = r.center.iter().map(|v| format!("{v:?}")).collect();
                let _ = writeln!(
                    s,
                    "  {}: new ray {:?} in cone [{}] -> {} maximal cones",
                    n + 1,
                    r.ray,
                    center.join(" "),
                    r.maximal_cones
                );
            }
            let _ = writeln!(s, "terminal fan: {terminal_json}");
            let _ = writeln!(s, "multiplicities: {}", multiplicities.join(" "));
            let _ = writeln!(s, "smooth: {}", if smooth { "yes" } else { "no" });
            s
        }
        Format::Json => json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "resolve",
            "steps": rows,
            "terminal": FanFile::from_fan(&terminal).map_err(|e| CliError::input(e.to_string()))?,
            "multiplicities": multiplicities,
            "smooth": smooth,
        })),
        Format::Csv => {
            let mut table = vec![vec!["step".into(), "ray".into(), "center".into(), "maximal_cones".into()]];
            for (n, r) in rows.iter().enumerate() {
                let center: Vec<String> = r.center.iter().map(|v| format!("{v:?}")).collect();
                table.push(vec![(n + 1).to_string(), format!("{:?}", r.ray), center.join(" "), r.maximal_cones.to_string()]);
            }
            csv_text(table)
        }
    };
    Ok(Outcome { output: out, exit_code: if smooth { 0 } else { 4 } })
}
