//! Self-test over the bundled corpus.
//!
//! The report lists one line per check in a fixed order and contains no
//! timings or paths, so two runs with the same flags are byte-identical.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use fglfans_core::descent::{compute_via_resolution, pullback_is_injective, DescentSquare};
use fglfans_core::fan::{CenterOrder, Fan, SubdivisionMap};
use fglfans_core::fgl::{fgl_sum, inverse_series, n_series, ChernElement, GradedRing, SeriesSpace};
use fglfans_core::intlin::primitive_part;
use fglfans_core::lazard::{build_lazard, LazardRing};
use fglfans_core::oracles::pp_global_sections;
use fglfans_core::pps::PpsSheaf;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::commands::{rank_rows, Outcome};
use crate::config::Coeff;
use crate::corpus::{bundled, corpus_dir, load_dir, Entry, Fixture};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub trunc: usize,
    /// Reads fans and fixtures from this directory instead of the bundle.
    pub corpus: Option<PathBuf>,
    /// Rewrites the fixtures instead of comparing against them.
    pub bless: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { trunc: crate::config::DEFAULT_TRUNC, corpus: None, bless: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug)]
struct Check {
    name: String,
    status: Status,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }

    fn skip(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Skip, detail: detail.into() }
    }

    fn error(name: impl Into<String>, e: impl std::fmt::Display) -> Self {
        Check { name: name.into(), status: Status::Fail, detail: format!("error: {e}") }
    }
}

/// `p(0..=n)` by the standard recurrence over allowed part sizes.
fn partitions(n: usize) -> Vec<usize> {
    let mut p = vec![0usize; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for k in part..=n {
            p[k] += p[k - part];
        }
    }
    p
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn lazard_checks(trunc: usize, lazard: &LazardRing) -> Vec<Check> {
    let expected = partitions(trunc);
    let mut ranks = Vec::new();
    let mut ok = true;
    for (k, &p) in expected.iter().enumerate() {
        match lazard.graded_rank(k) {
            Ok(r) => {
                ok &= r.rank == p && r.torsion.is_empty();
                ranks.push(r.rank);
            }
            Err(e) => return vec![Check::error("lazard-ranks", e)],
        }
    }
    vec![Check::new("lazard-ranks", ok, format!("trunc {trunc}: ranks {} expected {}", join(&ranks), join(&expected)))]
}

fn axiom_checks(trunc: usize, lazard: &LazardRing) -> Vec<Check> {
    let ring = lazard.ring();
    let run = || -> Result<(bool, bool, bool), String> {
        let s2 = SeriesSpace::with_order(ring.clone(), 2, trunc + 1);
        let v2 = s2.variables();
        let zero = ChernElement::new(s2.zero(1)).map_err(|e| e.to_string())?;
        let fuv = fgl_sum(&v2[0], &v2[1]).map_err(|e| e.to_string())?;
        let fvu = fgl_sum(&v2[1], &v2[0]).map_err(|e| e.to_string())?;
        let unit = fgl_sum(&v2[0], &zero).map_err(|e| e.to_string())? == v2[0]
            && fgl_sum(&zero, &v2[0]).map_err(|e| e.to_string())? == v2[0];
        let s3 = SeriesSpace::with_order(ring.clone(), 3, trunc + 1);
        let v3 = s3.variables();
        let left = fgl_sum(&fgl_sum(&v3[0], &v3[1]).map_err(|e| e.to_string())?, &v3[2]).map_err(|e| e.to_string())?;
        let right = fgl_sum(&v3[0], &fgl_sum(&v3[1], &v3[2]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mut assoc = left == right;
        for (_, p) in lazard.associativity_residual() {
            if p.is_zero() {
                continue;
            }
            assoc &= lazard.normal_form(&p).map_err(|e| e.to_string())?.is_zero();
        }
        Ok((unit, fuv == fvu, assoc))
    };
    match run() {
        Ok((unit, comm, assoc)) => vec![
            Check::new("fgl-unit", unit, format!("F(u,0) = F(0,u) = u to order {}", trunc + 1)),
            Check::new("fgl-commutative", comm, format!("F(u,v) = F(v,u) to order {}", trunc + 1)),
            Check::new("fgl-associative", assoc, format!("F(F(u,v),w) = F(u,F(v,w)) to order {}", trunc + 1)),
        ],
        Err(e) => vec![Check::error("fgl-axioms", e)],
    }
}

fn inverse_checks(ring: &Arc<GradedRing>) -> Vec<Check> {
    let run = || -> Result<(bool, bool, bool), String> {
        let chi = inverse_series(ring);
        let u = SeriesSpace::new(ring.clone(), 1).variables().remove(0);
        let cancels = fgl_sum(&u, &chi).map_err(|e| e.to_string())?.is_zero();
        let twice = chi.substitute(&[chi.as_series().clone()]).map_err(|e| e.to_string())? == *u.as_series();
        let mut additive = true;
        for m in -5..=5i64 {
            for n in -5..=5i64 {
                let sum = fgl_sum(&n_series(ring, m), &n_series(ring, n)).map_err(|e| e.to_string())?;
                additive &= sum == n_series(ring, m + n);
            }
        }
        Ok((cancels, twice, additive))
    };
    match run() {
        Ok((a, b, c)) => vec![
            Check::new("inverse", a && b, "F(u, chi(u)) = 0 and chi(chi(u)) = u"),
            Check::new("n-series", c, "[m+n]u = F([m]u, [n]u) for |m|,|n| <= 5"),
        ],
        Err(e) => vec![Check::error("inverse", e)],
    }
}

/// `res(sigma, sigma) = id` and `res(tau, rho) o res(sigma, tau) = res(sigma,
/// rho)` on the images of the variables, over every chain of faces.
fn sheaf_axioms(sheaf: &PpsSheaf) -> Result<(bool, usize), String> {
    let fan = sheaf.fan();
    let mut chains = 0;
    for sigma in 0..fan.num_cones() {
        let id = sheaf.restriction(sigma, sigma).map_err(|e| e.to_string())?;
        let space = sheaf.stalk(sigma).space();
        for (i, img) in id.images().iter().enumerate() {
            if *img.as_series() != space.variable(i) {
                return Ok((false, chains));
            }
        }
        for &tau in &fan.cone(sigma).faces {
            let st = sheaf.restriction(sigma, tau).map_err(|e| e.to_string())?;
            for &rho in &fan.cone(tau).faces {
                let tr = sheaf.restriction(tau, rho).map_err(|e| e.to_string())?;
                let sr = sheaf.restriction(sigma, rho).map_err(|e| e.to_string())?;
                for (a, b) in st.images().iter().zip(sr.images()) {
                    if tr.apply(a.as_series()).map_err(|e| e.to_string())? != *b.as_series() {
                        return Ok((false, chains));
                    }
                }
                chains += 1;
            }
        }
    }
    Ok((true, chains))
}

/// Subdivisions exercised for a fan: both resolution chains and the star
/// subdivision at the ray sum of the first maximal cone of dimension two or
/// more.
fn subdivisions(fan: &Arc<Fan>) -> Result<(Vec<SubdivisionMap>, Vec<SubdivisionMap>), String> {
    let forward = fan.resolve(CenterOrder::Forward).map_err(|e| e.to_string())?;
    let reverse = fan.resolve(CenterOrder::Reverse).map_err(|e| e.to_string())?;
    let mut squares = forward.clone();
    if let Some(c) = fan.maximal_cones().into_iter().find(|&c| fan.cone(c).dim() >= 2) {
        let mut sum = vec![BigInt::from(0); fan.rank()];
        for &r in &fan.cone(c).rays {
            for (s, x) in sum.iter_mut().zip(fan.ray(r)) {
                *s += x;
            }
        }
        let v = primitive_part(&sum);
        if fan.ray_index(&v).is_none() {
            squares.push(fan.star_subdivision(&v).map_err(|e| e.to_string())?);
        }
    }
    let mut all = squares.clone();
    all.extend(reverse);
    Ok((squares, all))
}

fn fan_checks(entry: &Entry, trunc: usize, rings: &[Arc<GradedRing>; 3], bless: bool) -> (Vec<Check>, Option<Fixture>) {
    let name = &entry.name;
    let fan = match entry.fan() {
        Ok(f) => f,
        Err(e) => return (vec![Check::new(format!("{name}/valid"), false, e.to_string())], None),
    };
    let mut out = vec![Check::new(
        format!("{name}/valid"),
        true,
        format!("{} rays, {} maximal cones", fan.rays().len(), fan.maximal_cones().len()),
    )];
    let universal = &rings[0];

    match PpsSheaf::new(fan.clone(), universal.clone()).map_err(|e| e.to_string()).and_then(|s| sheaf_axioms(&s)) {
        Ok((ok, chains)) => out.push(Check::new(format!("{name}/sheaf-axioms"), ok, format!("{chains} face chains"))),
        Err(e) => out.push(Check::error(format!("{name}/sheaf-axioms"), e)),
    }

    let degrees: Vec<i64> = (0..=trunc as i64).collect();
    let mut ranks: Vec<Vec<usize>> = Vec::new();
    for ring in rings {
        match rank_rows(&fan, ring, &degrees) {
            Ok(rows) => ranks.push(rows.iter().map(|r| r.rank).collect()),
            Err(e) => {
                out.push(Check::error(format!("{name}/ranks"), e));
                return (out, None);
            }
        }
    }
    let fixture = Fixture::new(name, trunc, [ranks[0].clone(), ranks[1].clone(), ranks[2].clone()]);
    let summary = format!("universal {} additive {} multiplicative {}", join(&ranks[0]), join(&ranks[1]), join(&ranks[2]));
    if bless {
        out.push(Check::skip(format!("{name}/fixture"), format!("blessed: {summary}")));
    } else {
        match entry.fixture() {
            Some(f) if f.trunc == trunc => out.push(Check::new(format!("{name}/fixture"), f == fixture, summary)),
            Some(f) => out.push(Check::skip(format!("{name}/fixture"), format!("fixture is for trunc {}", f.trunc))),
            None => out.push(Check::new(format!("{name}/fixture"), false, format!("missing fixture; {summary}"))),
        }
    }

    let oracle: Vec<usize> = (0..=trunc.min(3)).map(|d| pp_global_sections(&fan, d).rank).collect();
    let additive = &ranks[1][..oracle.len()];
    out.push(Check::new(
        format!("{name}/oracle"),
        additive == oracle.as_slice(),
        format!("additive {} oracle {}", join(additive), join(&oracle)),
    ));

    let low: Vec<i64> = (0..=trunc.min(2) as i64).collect();
    for order in [CenterOrder::Forward, CenterOrder::Reverse] {
        let label = format!("{name}/routes-{}", if order == CenterOrder::Forward { "forward" } else { "reverse" });
        let mut steps = 0;
        let res: Result<(), String> = low.iter().try_for_each(|&d| {
            let r = compute_via_resolution(&fan, d, universal, order).map_err(|e| e.to_string())?;
            steps = r.steps;
            Ok(())
        });
        match res {
            Ok(()) => out.push(Check::new(label, true, format!("{steps} steps, degrees 0..{}", trunc.min(2)))),
            Err(e) => out.push(Check::error(label, e)),
        }
    }

    match subdivisions(&fan) {
        Ok((squares, all)) => {
            let mut cartesian = true;
            let mut err = None;
            for map in &squares {
                match DescentSquare::new(map.clone(), universal.clone()) {
                    Ok(sq) => {
                        for &d in &low {
                            match sq.check_cartesian(d) {
                                Ok(r) => cartesian &= r.cartesian,
                                Err(e) => err = Some(e.to_string()),
                            }
                        }
                    }
                    Err(e) => err = Some(e.to_string()),
                }
            }
            match err {
                Some(e) => out.push(Check::error(format!("{name}/cartesian"), e)),
                None => out.push(Check::new(format!("{name}/cartesian"), cartesian, format!("{} squares", squares.len()))),
            }
            let mut injective = true;
            let mut err = None;
            for map in &all {
                for &d in &degrees {
                    match pullback_is_injective(map, universal, d) {
                        Ok(b) => injective &= b,
                        Err(e) => err = Some(e.to_string()),
                    }
                }
            }
            match err {
                Some(e) => out.push(Check::error(format!("{name}/injective"), e)),
                None => out.push(Check::new(format!("{name}/injective"), injective, format!("{} subdivisions", all.len()))),
            }
        }
        Err(e) => out.push(Check::error(format!("{name}/subdivisions"), e)),
    }
    (out, Some(fixture))
}

pub fn cmd_selftest(cfg: &SelftestConfig) -> Result<Outcome, CliError> {
    let trunc = cfg.trunc;
    if trunc == 0 {
        return Err(CliError::config("selftest needs --trunc of at least 1".into()));
    }
    let entries = match &cfg.corpus {
        Some(dir) => load_dir(dir).map_err(|e| CliError::input(format!("cannot read {}: {e}", dir.display())))?,
        None => bundled(),
    };
    let lazard = build_lazard(trunc).map_err(CliError::internal)?;
    let rings = [lazard.ring().clone(), Coeff::Additive.ring(trunc)?, Coeff::Multiplicative.ring(trunc)?];

    let mut checks = lazard_checks(trunc, &lazard);
    checks.extend(axiom_checks(trunc, &lazard));
    checks.extend(inverse_checks(lazard.ring()));
    let per_fan: Vec<(Vec<Check>, Option<Fixture>)> =
        entries.par_iter().map(|e| fan_checks(e, trunc, &rings, cfg.bless)).collect();

    let mut report = format!("selftest trunc={trunc} fans={}\n", entries.len());
    if cfg.bless {
        let dir = cfg.corpus.clone().unwrap_or_else(corpus_dir);
        for (entry, (_, fixture)) in entries.iter().zip(&per_fan) {
            if let Some(f) = fixture {
                std::fs::write(dir.join(format!("{}.ranks.json", entry.name)), f.to_json())
                    .map_err(|e| CliError::input(format!("cannot write fixture for {}: {e}", entry.name)))?;
                let _ = writeln!(report, "blessed {}", entry.name);
            }
        }
    }
    let invalid_input = per_fan.iter().any(|(c, _)| c.iter().any(|k| k.name.ends_with("/valid") && k.status == Status::Fail));
    checks.extend(per_fan.into_iter().flat_map(|(c, _)| c));

    let (mut passed, mut failed, mut skipped) = (0, 0, 0);
    for c in &checks {
        let tag = match c.status {
            Status::Pass => {
                passed += 1;
                "PASS"
            }
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Skip => {
                skipped += 1;
                "SKIP"
            }
        };
        let _ = writeln!(report, "{tag} {}: {}", c.name, c.detail);
    }
    let _ = writeln!(report, "selftest: {passed} passed, {failed} failed, {skipped} skipped");
    let exit_code = if invalid_input {
        2
    } else if failed > 0 {
        4
    } else {
        0
    };
    Ok(Outcome { output: report, exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_numbers() {
        assert_eq!(partitions(7), vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }
}
